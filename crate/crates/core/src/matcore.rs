//! Dense complex matrices for small quantum systems.
//!
//! Matrices are stored row-major. Tensor factors follow the convention that the
//! leftmost factor of a Kronecker product is register 0 and is the most
//! significant digit of a basis index.

use crate::{Error, Result, C64};
use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

/// Maximum `‖m − m†‖_max` accepted as Hermitian (scaled by `max(1, ‖m‖_max)`).
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Most negative eigenvalue accepted as positive semidefinite.
pub const PSD_TOL: f64 = 1e-10;
/// Default support cutoff for pseudo-inverse square roots.
pub const PINV_CUTOFF: f64 = 1e-12;

const JACOBI_TOL: f64 = 1e-14;
const SVD_TOL: f64 = 1e-15;
const MAX_SWEEPS: usize = 100;

/// A dense complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                let z = self[(r, c)];
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row-major entries.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from row-major real entries.
    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::from_vec(rows, cols, data.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn diag_real(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = C64::new(v, 0.0);
        }
        m
    }

    /// Column vector `|v⟩`.
    pub fn column(v: &[C64]) -> Self {
        Self {
            rows: v.len(),
            cols: 1,
            data: v.to_vec(),
        }
    }

    /// `|a⟩⟨b|`.
    pub fn outer(a: &[C64], b: &[C64]) -> Self {
        Self::from_fn(a.len(), b.len(), |r, c| a[r] * b[c].conj())
    }

    /// `|v⟩⟨v|`.
    pub fn projector(v: &[C64]) -> Self {
        Self::outer(v, v)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn column_vec(&self, c: usize) -> Vec<C64> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, k: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * k).collect(),
        }
    }

    pub fn scale_real(&self, k: f64) -> Self {
        self.scale(C64::new(k, 0.0))
    }

    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.cols, "matvec dimension mismatch");
        (0..self.rows)
            .map(|r| {
                let row = &self.data[r * self.cols..(r + 1) * self.cols];
                row.iter().zip(v).map(|(a, b)| a * b).sum()
            })
            .collect()
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(
            (self.rows, self.cols),
            (other.rows, other.cols),
            "shape mismatch"
        );
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `‖m − m†‖_max`, or infinity for non-square matrices.
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut dev: f64 = 0.0;
        for r in 0..self.rows {
            for c in r..self.cols {
                dev = dev.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        dev
    }

    /// `(m + m†)/2`.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |r, c| {
            (self[(r, c)] + self[(c, r)].conj()) * 0.5
        })
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    fn require_square(&self, what: &str) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(Error::Dimension(format!(
                "{what} needs a square matrix, got {}x{}",
                self.rows, self.cols
            )))
        }
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.cols + c]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(
            (self.rows, self.cols),
            (rhs.rows, rhs.cols),
            "add shape mismatch"
        );
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(
            (self.rows, self.cols),
            (rhs.rows, rhs.cols),
            "sub shape mismatch"
        );
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.scale_real(-1.0)
    }
}

impl AddAssign<&ComplexMatrix> for ComplexMatrix {
    fn add_assign(&mut self, rhs: &ComplexMatrix) {
        assert_eq!(
            (self.rows, self.cols),
            (rhs.rows, rhs.cols),
            "add shape mismatch"
        );
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "mul dimension mismatch");
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[r * self.cols + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let dst = &mut out.data[r * rhs.cols..(r + 1) * rhs.cols];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }
}

/// `Σ conj(a_k) b_k`.
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    assert_eq!(a.len(), b.len(), "inner product dimension mismatch");
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Kronecker product; `a` is the leftmost factor.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::from_fn(a.rows * b.rows, a.cols * b.cols, |r, c| {
        a[(r / b.rows, c / b.cols)] * b[(r % b.rows, c % b.cols)]
    })
}

/// Kronecker product of state vectors.
pub fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            out.push(x * y);
        }
    }
    out
}

/// Kronecker product of a list of matrices, left to right.
pub fn kron_all(factors: &[&ComplexMatrix]) -> ComplexMatrix {
    factors
        .iter()
        .fold(ComplexMatrix::identity(1), |acc, f| kron(&acc, f))
}

/// Dimensions of the tensor factors (registers) of a Hilbert space.
#[derive(
    Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize,
)]
pub struct RegisterShape {
    dims: Vec<usize>,
}

impl RegisterShape {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.contains(&0) {
            return Err(Error::Dimension(format!(
                "register dimensions must be positive: {dims:?}"
            )));
        }
        Ok(Self { dims })
    }

    /// `n` qubit registers.
    pub fn qubits(n: usize) -> Self {
        Self { dims: vec![2; n] }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    /// Total dimension (1 for the empty shape).
    pub fn total(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn concat(&self, other: &Self) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self { dims }
    }

    /// Sub-shape of the given registers, in the given order.
    pub fn select(&self, regs: &[usize]) -> Result<Self> {
        regs.iter()
            .map(|&r| {
                self.dims.get(r).copied().ok_or_else(|| {
                    Error::Dimension(format!("register {r} out of range for {:?}", self.dims))
                })
            })
            .collect::<Result<Vec<_>>>()
            .map(|dims| Self { dims })
    }

    fn strides(&self) -> Vec<usize> {
        let mut s = vec![1; self.dims.len()];
        for k in (0..self.dims.len().saturating_sub(1)).rev() {
            s[k] = s[k + 1] * self.dims[k + 1];
        }
        s
    }

    /// Basis-index offsets of every multi-index over `regs`, with `regs[0]` as the
    /// most significant digit.
    fn offsets(&self, regs: &[usize]) -> Vec<usize> {
        let strides = self.strides();
        let mut offs = vec![0usize];
        for &r in regs {
            let mut next = Vec::with_capacity(offs.len() * self.dims[r]);
            for &o in &offs {
                for d in 0..self.dims[r] {
                    next.push(o + d * strides[r]);
                }
            }
            offs = next;
        }
        offs
    }

    fn check_registers(&self, regs: &[usize]) -> Result<()> {
        for (k, &r) in regs.iter().enumerate() {
            if r >= self.dims.len() {
                return Err(Error::Dimension(format!(
                    "register {r} out of range for {:?}",
                    self.dims
                )));
            }
            if regs[..k].contains(&r) {
                return Err(Error::Dimension(format!("register {r} listed twice")));
            }
        }
        Ok(())
    }
}

/// Traces out every register not in `keep`; kept registers stay in original order.
pub fn partial_trace(
    m: &ComplexMatrix,
    shape: &RegisterShape,
    keep: &[usize],
) -> Result<ComplexMatrix> {
    m.require_square("partial_trace")?;
    if shape.total() != m.rows {
        return Err(Error::Dimension(format!(
            "shape {:?} does not annotate a {}x{} matrix",
            shape.dims, m.rows, m.cols
        )));
    }
    shape.check_registers(keep)?;
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    let traced: Vec<usize> = (0..shape.len()).filter(|r| !kept.contains(r)).collect();
    let keep_off = shape.offsets(&kept);
    let trace_off = shape.offsets(&traced);
    let n = keep_off.len();
    Ok(ComplexMatrix::from_fn(n, n, |r, c| {
        trace_off
            .iter()
            .map(|&t| m[(keep_off[r] + t, keep_off[c] + t)])
            .sum()
    }))
}

/// Embeds `op` acting on `targets` of `shape` into the full space, with the
/// identity on the remaining registers.
///
/// `op` maps the target registers (in the listed order) to registers of
/// dimensions `out_dims`. When the register counts agree the outputs replace the
/// inputs in place; otherwise the outputs are inserted where the first target
/// register was. Returns the embedded operator and the output shape.
pub fn embed_operator(
    op: &ComplexMatrix,
    shape: &RegisterShape,
    targets: &[usize],
    out_dims: &[usize],
) -> Result<(ComplexMatrix, RegisterShape)> {
    shape.check_registers(targets)?;
    if targets.is_empty() {
        return Err(Error::Dimension("no target registers".into()));
    }
    let in_dim: usize = targets.iter().map(|&t| shape.dims[t]).product();
    let out_dim: usize = out_dims.iter().product();
    if op.cols != in_dim || op.rows != out_dim {
        return Err(Error::Dimension(format!(
            "operator is {}x{} but targets need {}x{}",
            op.rows, op.cols, out_dim, in_dim
        )));
    }
    enum Slot {
        Rest(usize),
        Out(usize),
    }
    let mut slots = Vec::new();
    if targets.len() == out_dims.len() {
        for p in 0..shape.len() {
            match targets.iter().position(|&t| t == p) {
                Some(j) => slots.push(Slot::Out(j)),
                None => slots.push(Slot::Rest(p)),
            }
        }
    } else {
        let first = *targets.iter().min().expect("nonempty");
        for p in 0..shape.len() {
            if p == first {
                slots.extend((0..out_dims.len()).map(Slot::Out));
            } else if !targets.contains(&p) {
                slots.push(Slot::Rest(p));
            }
        }
    }
    let new_dims: Vec<usize> = slots
        .iter()
        .map(|s| match *s {
            Slot::Rest(p) => shape.dims[p],
            Slot::Out(j) => out_dims[j],
        })
        .collect();
    let new_shape = RegisterShape::new(new_dims)?;
    let rest: Vec<usize> = (0..shape.len()).filter(|p| !targets.contains(p)).collect();
    let rest_new: Vec<usize> = rest
        .iter()
        .map(|&p| {
            slots
                .iter()
                .position(|s| matches!(*s, Slot::Rest(q) if q == p))
                .expect("rest slot")
        })
        .collect();
    let out_new: Vec<usize> = (0..out_dims.len())
        .map(|j| {
            slots
                .iter()
                .position(|s| matches!(*s, Slot::Out(k) if k == j))
                .expect("out slot")
        })
        .collect();
    let in_rest = shape.offsets(&rest);
    let out_rest = new_shape.offsets(&rest_new);
    let in_t = shape.offsets(targets);
    let out_t = new_shape.offsets(&out_new);
    let mut full = ComplexMatrix::zeros(new_shape.total(), shape.total());
    for (ir, or) in in_rest.iter().zip(&out_rest) {
        for (to, oo) in out_t.iter().enumerate() {
            for (ti, io) in in_t.iter().enumerate() {
                full[(or + oo, ir + io)] = op[(to, ti)];
            }
        }
    }
    Ok((full, new_shape))
}

/// Reorders the registers of a state vector: register `perm[k]` of the input
/// becomes register `k` of the output.
pub fn permute_vec(
    v: &[C64],
    shape: &RegisterShape,
    perm: &[usize],
) -> Result<(Vec<C64>, RegisterShape)> {
    if perm.len() != shape.len() {
        return Err(Error::Dimension(
            "permutation length differs from register count".into(),
        ));
    }
    shape.check_registers(perm)?;
    if v.len() != shape.total() {
        return Err(Error::Dimension("vector length differs from shape".into()));
    }
    let new_shape = shape.select(perm)?;
    let offs = shape.offsets(perm);
    Ok((offs.iter().map(|&o| v[o]).collect(), new_shape))
}

/// Hermitian eigendecomposition `m = V diag(values) V†`, eigenvalues descending.
#[derive(Clone, Debug)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl Eigen {
    /// `V f(Λ) V†`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.values.len();
        let fv: Vec<f64> = self.values.iter().map(|&l| f(l)).collect();
        let v = &self.vectors;
        ComplexMatrix::from_fn(n, n, |r, c| {
            (0..n).map(|k| v[(r, k)] * fv[k] * v[(c, k)].conj()).sum()
        })
    }
}

/// Unitary 2×2 rotation `G` (acting on indices p<q) that diagonalizes the
/// Hermitian block `[[app, apq], [conj(apq), aqq]]` as `G† H G`.
/// Returned as `(c, s, e^{-iφ})` with `G = [[c, s], [-s e^{-iφ}, c e^{-iφ}]]`.
fn jacobi_rotation(app: f64, aqq: f64, apq: C64) -> (f64, f64, C64) {
    let beta = apq.norm();
    let phase = apq / beta;
    let tau = (aqq - app) / (2.0 * beta);
    let sign = if tau >= 0.0 { 1.0 } else { -1.0 };
    let t = sign / (tau.abs() + (1.0 + tau * tau).sqrt());
    let c = 1.0 / (1.0 + t * t).sqrt();
    (c, t * c, phase.conj())
}

fn rotate_columns(m: &mut ComplexMatrix, p: usize, q: usize, c: f64, s: f64, ph: C64) {
    for k in 0..m.rows {
        let a = m[(k, p)];
        let b = m[(k, q)];
        m[(k, p)] = a * c - b * ph * s;
        m[(k, q)] = a * s + b * ph * c;
    }
}

fn rotate_rows_adjoint(m: &mut ComplexMatrix, p: usize, q: usize, c: f64, s: f64, ph: C64) {
    let phc = ph.conj();
    for k in 0..m.cols {
        let a = m[(p, k)];
        let b = m[(q, k)];
        m[(p, k)] = a * c - b * phc * s;
        m[(q, k)] = a * s + b * phc * c;
    }
}

/// Cyclic Jacobi eigensolver for Hermitian matrices.
pub fn eig_hermitian(m: &ComplexMatrix) -> Result<Eigen> {
    m.require_square("eig_hermitian")?;
    let scale = m.max_abs().max(1.0);
    let dev = m.hermitian_deviation();
    if dev > HERMITIAN_TOL * scale {
        return Err(Error::NotHermitian(dev));
    }
    let n = m.rows;
    let mut a = m.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let norm = a.frobenius_norm();
    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in 0..n {
                if p != q {
                    off += a[(p, q)].norm_sqr();
                }
            }
        }
        if off.sqrt() <= JACOBI_TOL * norm || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq.norm() <= f64::MIN_POSITIVE {
                    continue;
                }
                let (c, s, ph) = jacobi_rotation(a[(p, p)].re, a[(q, q)].re, apq);
                rotate_columns(&mut a, p, q, c, s, ph);
                rotate_rows_adjoint(&mut a, p, q, c, s, ph);
                a[(p, q)] = C64::new(0.0, 0.0);
                a[(q, p)] = C64::new(0.0, 0.0);
                a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
                rotate_columns(&mut v, p, q, c, s, ph);
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(Eigen { values, vectors })
}

/// Thin singular value decomposition `m = U diag(s) V†`, `s` descending.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: ComplexMatrix,
    pub s: Vec<f64>,
    pub v: ComplexMatrix,
}

impl Svd {
    pub fn v_adjoint(&self) -> ComplexMatrix {
        self.v.adjoint()
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        let k = self.s.len();
        let us = ComplexMatrix::from_fn(self.u.rows, k, |r, c| self.u[(r, c)] * self.s[c]);
        &us * &self.v.adjoint()
    }
}

/// Singular value decomposition by one-sided Jacobi rotations.
///
/// For an `r×c` matrix the factors are `U: r×k`, `V: c×k` with `k = min(r, c)`;
/// both have orthonormal columns, so they are unitary for square input.
pub fn svd(m: &ComplexMatrix) -> Svd {
    if m.rows < m.cols {
        let t = svd(&m.adjoint());
        return Svd {
            u: t.v,
            s: t.s,
            v: t.u,
        };
    }
    let (r, c) = (m.rows, m.cols);
    let mut w = m.clone();
    let mut v = ComplexMatrix::identity(c);
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..c {
            for q in p + 1..c {
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gamma = C64::new(0.0, 0.0);
                for k in 0..r {
                    let x = w[(k, p)];
                    let y = w[(k, q)];
                    alpha += x.norm_sqr();
                    beta += y.norm_sqr();
                    gamma += x.conj() * y;
                }
                if gamma.norm() <= SVD_TOL * (alpha * beta).sqrt()
                    || gamma.norm() <= f64::MIN_POSITIVE
                {
                    continue;
                }
                rotated = true;
                let (cs, sn, ph) = jacobi_rotation(alpha, beta, gamma);
                rotate_columns(&mut w, p, q, cs, sn, ph);
                rotate_columns(&mut v, p, q, cs, sn, ph);
            }
        }
        if !rotated {
            break;
        }
    }
    let norms: Vec<f64> = (0..c).map(|j| vec_norm(&w.column_vec(j))).collect();
    let mut order: Vec<usize> = (0..c).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    let s: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    let smax = s.first().copied().unwrap_or(0.0);
    let floor = (smax * 1e-13).max(f64::MIN_POSITIVE);
    let mut u_cols: Vec<Option<Vec<C64>>> = order
        .iter()
        .zip(&s)
        .map(|(&j, &sj)| (sj > floor).then(|| w.column_vec(j).iter().map(|z| z / sj).collect()))
        .collect();
    complete_orthonormal(&mut u_cols, r);
    let u = ComplexMatrix::from_fn(r, c, |i, k| u_cols[k].as_ref().expect("completed")[i]);
    let v = ComplexMatrix::from_fn(c, c, |i, k| v[(i, order[k])]);
    Svd { u, s, v }
}

/// Fills the `None` slots with unit vectors orthogonal to all other slots.
fn complete_orthonormal(cols: &mut [Option<Vec<C64>>], dim: usize) {
    for k in 0..cols.len() {
        if cols[k].is_some() {
            continue;
        }
        // pick the standard basis vector with the largest residual
        let mut best: Option<(f64, Vec<C64>)> = None;
        for candidate in 0..dim {
            let mut e = vec![C64::new(0.0, 0.0); dim];
            e[candidate] = C64::new(1.0, 0.0);
            for _ in 0..2 {
                for other in cols.iter().flatten() {
                    let proj = inner(other, &e);
                    for (x, o) in e.iter_mut().zip(other) {
                        *x -= proj * o;
                    }
                }
            }
            let nrm = vec_norm(&e);
            if best.as_ref().is_none_or(|(b, _)| nrm > *b) {
                best = Some((nrm, e));
            }
        }
        let (nrm, e) = best.expect("dim > 0");
        cols[k] = Some(e.iter().map(|z| z / nrm).collect());
    }
}

/// Schatten 1-norm (sum of singular values).
pub fn trace_norm(m: &ComplexMatrix) -> f64 {
    if m.is_square() && m.hermitian_deviation() <= 1e-13 * m.max_abs().max(1.0) {
        if let Ok(e) = eig_hermitian(m) {
            return e.values.iter().map(|l| l.abs()).sum();
        }
    }
    svd(m).s.iter().sum()
}

fn eig_psd(m: &ComplexMatrix) -> Result<Eigen> {
    let e = eig_hermitian(m)?;
    if let Some(&min) = e.values.last() {
        if min < -PSD_TOL {
            return Err(Error::NotPsd(min));
        }
    }
    Ok(e)
}

/// Principal square root of a positive semidefinite matrix.
pub fn sqrt_psd(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(eig_psd(m)?.map(|l| l.max(0.0).sqrt()))
}

/// Pseudo-inverse square root: eigenvalues below `cutoff` are treated as zero.
pub fn inv_sqrt_psd(m: &ComplexMatrix, cutoff: f64) -> Result<ComplexMatrix> {
    Ok(eig_psd(m)?.map(|l| if l < cutoff { 0.0 } else { 1.0 / l.sqrt() }))
}

/// Projector onto the span of eigenvectors with eigenvalue ≥ `cutoff`.
pub fn support_projector(m: &ComplexMatrix, cutoff: f64) -> Result<ComplexMatrix> {
    Ok(eig_psd(m)?.map(|l| if l < cutoff { 0.0 } else { 1.0 }))
}
