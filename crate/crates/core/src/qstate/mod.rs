//! Quantum states, channels, measurements and the distance toolkit.
//!
//! Conventions:
//! * `Δ(a, b) = ½‖a − b‖₁` (trace distance),
//! * `F(a, b) = ‖√a √b‖₁` (fidelity, not squared),
//! * channels are Kraus sets acting on a designated subset of registers.

pub mod random;

use crate::matcore::{
    eig_hermitian, embed_operator, inner, inv_sqrt_psd, kron, kron_vec, partial_trace, permute_vec,
    support_projector, svd, trace_norm, vec_norm, ComplexMatrix, RegisterShape, PINV_CUTOFF,
};
use crate::{Error, Result, C64};
use std::collections::BTreeMap;

/// Tolerance for density-matrix validity (Hermiticity, positivity, unit trace).
pub const STATE_TOL: f64 = 1e-10;
/// Tolerance for Kraus completeness and POVM completeness.
pub const COMPLETENESS_TOL: f64 = 1e-9;
/// Tolerance before a probability outside `[0, 1]` becomes an error.
pub const PROB_TOL: f64 = 1e-9;

/// Eigenvalues at or below this are dropped from the square roots inside
/// [`fidelity`]; it sits above eigensolver noise for unit-trace inputs.
const FIDELITY_EIG_FLOOR: f64 = 1e-14;

/// A density matrix annotated with its register structure.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityState {
    mat: ComplexMatrix,
    shape: RegisterShape,
}

impl DensityState {
    /// Validates Hermiticity, positivity and unit trace.
    pub fn new(mat: ComplexMatrix, shape: RegisterShape) -> Result<Self> {
        check_annotation(&mat, &shape)?;
        let dev = mat.hermitian_deviation();
        if dev > STATE_TOL {
            return Err(Error::NotHermitian(dev));
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::Precondition(format!("trace {tr} is not 1")));
        }
        let min = *eig_hermitian(&mat)?.values.last().expect("nonempty");
        if min < -STATE_TOL {
            return Err(Error::NotPsd(min));
        }
        Ok(Self {
            mat: mat.hermitian_part(),
            shape,
        })
    }

    /// Wraps a matrix produced by trace- and positivity-preserving operations.
    pub(crate) fn trusted(mat: ComplexMatrix, shape: RegisterShape) -> Self {
        debug_assert_eq!(mat.rows(), shape.total());
        Self {
            mat: mat.hermitian_part(),
            shape,
        }
    }

    pub fn basis(shape: RegisterShape, index: usize) -> Result<Self> {
        Ok(PureState::basis(shape, index)?.density())
    }

    pub fn maximally_mixed(shape: RegisterShape) -> Self {
        let n = shape.total();
        Self {
            mat: ComplexMatrix::identity(n).scale_real(1.0 / n as f64),
            shape,
        }
    }

    pub fn mat(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn shape(&self) -> &RegisterShape {
        &self.shape
    }

    pub fn dim(&self) -> usize {
        self.shape.total()
    }

    pub fn tensor(&self, other: &Self) -> Self {
        Self {
            mat: kron(&self.mat, &other.mat),
            shape: self.shape.concat(&other.shape),
        }
    }

    /// Marginal on `keep` (kept registers stay in original order).
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        let mut k = keep.to_vec();
        k.sort_unstable();
        let mat = partial_trace(&self.mat, &self.shape, &k)?;
        Ok(Self::trusted(mat, self.shape.select(&k)?))
    }

    /// Convex combination; weights must be nonnegative and sum to 1.
    pub fn mixture(parts: &[(f64, &DensityState)]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::Precondition("empty mixture".into()))?;
        let total: f64 = parts.iter().map(|p| p.0).sum();
        if parts.iter().any(|p| p.0 < 0.0) || (total - 1.0).abs() > STATE_TOL {
            return Err(Error::Precondition(
                "mixture weights must be a probability vector".into(),
            ));
        }
        let mut mat = ComplexMatrix::zeros(first.1.dim(), first.1.dim());
        for (w, s) in parts {
            if s.shape != first.1.shape {
                return Err(Error::Dimension(
                    "mixture of differently shaped states".into(),
                ));
            }
            mat += &s.mat.scale_real(*w);
        }
        Ok(Self::trusted(mat, first.1.shape.clone()))
    }

    /// Smallest eigenvalue.
    pub fn min_eigenvalue(&self) -> f64 {
        *eig_hermitian(&self.mat)
            .expect("Hermitian by construction")
            .values
            .last()
            .expect("nonempty")
    }
}

fn check_annotation(mat: &ComplexMatrix, shape: &RegisterShape) -> Result<()> {
    if !mat.is_square() || mat.rows() != shape.total() {
        return Err(Error::Dimension(format!(
            "{}x{} matrix annotated with registers {:?}",
            mat.rows(),
            mat.cols(),
            shape.dims()
        )));
    }
    Ok(())
}

/// A unit vector annotated with its register structure.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    vec: Vec<C64>,
    shape: RegisterShape,
}

impl PureState {
    pub fn new(vec: Vec<C64>, shape: RegisterShape) -> Result<Self> {
        if vec.len() != shape.total() {
            return Err(Error::Dimension(format!(
                "vector of length {} for registers {:?}",
                vec.len(),
                shape.dims()
            )));
        }
        let n = vec_norm(&vec);
        if (n - 1.0).abs() > STATE_TOL {
            return Err(Error::Precondition(format!("state norm {n} is not 1")));
        }
        Ok(Self { vec, shape })
    }

    /// Normalizes a nonzero vector.
    pub fn normalized(vec: Vec<C64>, shape: RegisterShape) -> Result<Self> {
        let n = vec_norm(&vec);
        if n <= f64::MIN_POSITIVE {
            return Err(Error::Precondition(
                "cannot normalize the zero vector".into(),
            ));
        }
        Self::new(vec.iter().map(|z| z / n).collect(), shape)
    }

    pub fn basis(shape: RegisterShape, index: usize) -> Result<Self> {
        if index >= shape.total() {
            return Err(Error::Dimension(format!(
                "basis index {index} out of range"
            )));
        }
        let mut vec = vec![C64::new(0.0, 0.0); shape.total()];
        vec[index] = C64::new(1.0, 0.0);
        Ok(Self { vec, shape })
    }

    pub(crate) fn trusted(vec: Vec<C64>, shape: RegisterShape) -> Self {
        debug_assert_eq!(vec.len(), shape.total());
        Self { vec, shape }
    }

    pub fn vec(&self) -> &[C64] {
        &self.vec
    }

    pub fn shape(&self) -> &RegisterShape {
        &self.shape
    }

    pub fn tensor(&self, other: &Self) -> Self {
        Self {
            vec: kron_vec(&self.vec, &other.vec),
            shape: self.shape.concat(&other.shape),
        }
    }

    /// `⟨self|other⟩`.
    pub fn overlap(&self, other: &Self) -> C64 {
        inner(&self.vec, &other.vec)
    }

    pub fn density(&self) -> DensityState {
        DensityState {
            mat: ComplexMatrix::projector(&self.vec),
            shape: self.shape.clone(),
        }
    }

    pub fn marginal(&self, keep: &[usize]) -> Result<DensityState> {
        self.density().partial_trace(keep)
    }

    /// Applies a unitary (or isometry) to the `targets` registers.
    pub fn apply(&self, op: &ComplexMatrix, targets: &[usize], out_dims: &[usize]) -> Result<Self> {
        let (full, shape) = embed_operator(op, &self.shape, targets, out_dims)?;
        Self::new(full.matvec(&self.vec), shape)
    }

    /// Applies an arbitrary operator and returns the unnormalized vector.
    pub fn apply_unnormalized(&self, op: &ComplexMatrix, targets: &[usize]) -> Result<Vec<C64>> {
        let out: Vec<usize> = targets.iter().map(|&t| self.shape.dims()[t]).collect();
        let (full, _) = embed_operator(op, &self.shape, targets, &out)?;
        Ok(full.matvec(&self.vec))
    }

    /// Register `perm[k]` becomes register `k`.
    pub fn permute(&self, perm: &[usize]) -> Result<Self> {
        let (vec, shape) = permute_vec(&self.vec, &self.shape, perm)?;
        Ok(Self { vec, shape })
    }
}

/// A completely positive trace-preserving map in Kraus form.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausChannel {
    ops: Vec<ComplexMatrix>,
    in_shape: RegisterShape,
    out_shape: RegisterShape,
}

impl KrausChannel {
    /// Validates dimensions and `Σ K†K = I`.
    pub fn new(
        ops: Vec<ComplexMatrix>,
        in_shape: RegisterShape,
        out_shape: RegisterShape,
    ) -> Result<Self> {
        if ops.is_empty() {
            return Err(Error::InvalidChannel("no Kraus operators".into()));
        }
        let (din, dout) = (in_shape.total(), out_shape.total());
        if ops.iter().any(|k| k.rows() != dout || k.cols() != din) {
            return Err(Error::Dimension(format!(
                "Kraus operators must be {dout}x{din}"
            )));
        }
        let ch = Self {
            ops,
            in_shape,
            out_shape,
        };
        let dev = ch.completeness_deviation();
        if dev > COMPLETENESS_TOL {
            return Err(Error::InvalidChannel(format!(
                "Σ K†K deviates from I by {dev:e}"
            )));
        }
        Ok(ch)
    }

    pub fn unitary(u: ComplexMatrix, shape: RegisterShape) -> Result<Self> {
        Self::new(vec![u], shape.clone(), shape)
    }

    pub fn identity(shape: RegisterShape) -> Self {
        Self {
            ops: vec![ComplexMatrix::identity(shape.total())],
            in_shape: shape.clone(),
            out_shape: shape,
        }
    }

    pub fn ops(&self) -> &[ComplexMatrix] {
        &self.ops
    }

    pub fn in_shape(&self) -> &RegisterShape {
        &self.in_shape
    }

    pub fn out_shape(&self) -> &RegisterShape {
        &self.out_shape
    }

    /// `‖Σ K†K − I‖_max`.
    pub fn completeness_deviation(&self) -> f64 {
        let mut sum = ComplexMatrix::zeros(self.in_shape.total(), self.in_shape.total());
        for k in &self.ops {
            sum += &(&k.adjoint() * k);
        }
        sum.max_abs_diff(&ComplexMatrix::identity(self.in_shape.total()))
    }

    /// `Σ K m K†` on the full input space.
    pub fn apply_matrix(&self, m: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.out_shape.total(), self.out_shape.total());
        for k in &self.ops {
            out += &(&(k * m) * &k.adjoint());
        }
        out
    }

    /// `then ∘ self`.
    pub fn then(&self, then: &KrausChannel) -> Result<KrausChannel> {
        if then.in_shape.total() != self.out_shape.total() {
            return Err(Error::Dimension(
                "channel composition dimension mismatch".into(),
            ));
        }
        let ops = then
            .ops
            .iter()
            .flat_map(|b| self.ops.iter().map(move |a| b * a))
            .collect();
        Ok(KrausChannel {
            ops,
            in_shape: self.in_shape.clone(),
            out_shape: then.out_shape.clone(),
        })
    }

    /// Convex combination of channels with equal shapes.
    pub fn mixture(parts: &[(f64, &KrausChannel)]) -> Result<KrausChannel> {
        let first = parts
            .first()
            .ok_or_else(|| Error::InvalidChannel("empty mixture".into()))?
            .1;
        let mut ops = Vec::new();
        for (w, ch) in parts {
            if ch.in_shape != first.in_shape || ch.out_shape != first.out_shape {
                return Err(Error::Dimension(
                    "mixture of differently shaped channels".into(),
                ));
            }
            if *w < 0.0 {
                return Err(Error::InvalidChannel("negative mixture weight".into()));
            }
            ops.extend(ch.ops.iter().map(|k| k.scale_real(w.sqrt())));
        }
        KrausChannel::new(ops, first.in_shape.clone(), first.out_shape.clone())
    }

    /// `K ⊗ I` on the input registers followed by the `reference` registers.
    pub fn extend(&self, reference: &RegisterShape) -> KrausChannel {
        let id = ComplexMatrix::identity(reference.total());
        KrausChannel {
            ops: self.ops.iter().map(|k| kron(k, &id)).collect(),
            in_shape: self.in_shape.concat(reference),
            out_shape: self.out_shape.concat(reference),
        }
    }

    /// Output of the channel on a pure input, `Σ K|ψ⟩⟨ψ|K†`.
    pub fn apply_pure(&self, psi: &PureState) -> Result<DensityState> {
        if psi.vec.len() != self.in_shape.total() {
            return Err(Error::Dimension(
                "pure input does not match the channel input".into(),
            ));
        }
        let n = self.out_shape.total();
        let mut out = ComplexMatrix::zeros(n, n);
        for k in &self.ops {
            let v = k.matvec(&psi.vec);
            out += &ComplexMatrix::projector(&v);
        }
        Ok(DensityState::trusted(out, self.out_shape.clone()))
    }

    /// The adjoint (Heisenberg-picture) map.
    pub fn adjoint(&self) -> AdjointMap {
        AdjointMap {
            ops: self.ops.iter().map(|k| k.adjoint()).collect(),
            in_shape: self.out_shape.clone(),
            out_shape: self.in_shape.clone(),
        }
    }
}

/// A completely positive unital map given by Kraus operators `{K†}`.
#[derive(Clone, Debug, PartialEq)]
pub struct AdjointMap {
    ops: Vec<ComplexMatrix>,
    in_shape: RegisterShape,
    out_shape: RegisterShape,
}

impl AdjointMap {
    pub fn ops(&self) -> &[ComplexMatrix] {
        &self.ops
    }

    pub fn in_shape(&self) -> &RegisterShape {
        &self.in_shape
    }

    pub fn out_shape(&self) -> &RegisterShape {
        &self.out_shape
    }

    pub fn apply_matrix(&self, m: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.out_shape.total(), self.out_shape.total());
        for k in &self.ops {
            out += &(&(k * m) * &k.adjoint());
        }
        out
    }

    /// `‖Φ*(I) − I‖_max`.
    pub fn unitality_deviation(&self) -> f64 {
        self.apply_matrix(&ComplexMatrix::identity(self.in_shape.total()))
            .max_abs_diff(&ComplexMatrix::identity(self.out_shape.total()))
    }
}

/// Kraus set `{K†}` of `ch`, checked to be unital.
pub fn adjoint_channel(ch: &KrausChannel) -> Result<AdjointMap> {
    let adj = ch.adjoint();
    let dev = adj.unitality_deviation();
    if dev > COMPLETENESS_TOL {
        return Err(Error::InvalidChannel(format!(
            "adjoint map is not unital ({dev:e})"
        )));
    }
    Ok(adj)
}

/// Applies `ch` to the registers `on` of `state`; the output registers replace
/// the input registers in place.
pub fn apply_channel(
    ch: &KrausChannel,
    state: &DensityState,
    on: &[usize],
) -> Result<DensityState> {
    let target_dims = state.shape.select(on)?;
    if target_dims.dims() != ch.in_shape.dims() {
        return Err(Error::Dimension(format!(
            "channel expects registers {:?} but targets have {:?}",
            ch.in_shape.dims(),
            target_dims.dims()
        )));
    }
    let mut out: Option<(ComplexMatrix, RegisterShape)> = None;
    for k in &ch.ops {
        let (e, shape) = embed_operator(k, &state.shape, on, ch.out_shape.dims())?;
        let term = &(&e * &state.mat) * &e.adjoint();
        match &mut out {
            Some((acc, _)) => *acc += &term,
            None => out = Some((term, shape)),
        }
    }
    let (mat, shape) = out.expect("channels have at least one Kraus operator");
    Ok(DensityState::trusted(mat, shape))
}

/// A positive operator valued measure with keyed outcomes.
#[derive(Clone, Debug, PartialEq)]
pub struct Povm<K> {
    elements: Vec<(K, ComplexMatrix)>,
    shape: RegisterShape,
}

impl<K: Clone + Ord> Povm<K> {
    /// Validates positivity of each element, distinct keys and `Σ E = I`.
    pub fn new(elements: Vec<(K, ComplexMatrix)>, shape: RegisterShape) -> Result<Self> {
        let n = shape.total();
        let mut sum = ComplexMatrix::zeros(n, n);
        for (idx, (k, e)) in elements.iter().enumerate() {
            check_annotation(e, &shape)?;
            if elements[..idx].iter().any(|(k2, _)| k2 == k) {
                return Err(Error::InvalidPovm("duplicate outcome key".into()));
            }
            let min = *eig_hermitian(e)
                .map_err(|_| Error::InvalidPovm("non-Hermitian element".into()))?
                .values
                .last()
                .expect("nonempty");
            if min < -STATE_TOL {
                return Err(Error::InvalidPovm(format!(
                    "element has eigenvalue {min:e}"
                )));
            }
            sum += e;
        }
        let dev = sum.max_abs_diff(&ComplexMatrix::identity(n));
        if dev > COMPLETENESS_TOL {
            return Err(Error::InvalidPovm(format!(
                "elements sum to I only within {dev:e}"
            )));
        }
        Ok(Self { elements, shape })
    }

    pub fn elements(&self) -> &[(K, ComplexMatrix)] {
        &self.elements
    }

    pub fn shape(&self) -> &RegisterShape {
        &self.shape
    }

    pub fn get(&self, key: &K) -> Option<&ComplexMatrix> {
        self.elements.iter().find(|(k, _)| k == key).map(|(_, e)| e)
    }

    pub fn keys(&self) -> Vec<K> {
        self.elements.iter().map(|(k, _)| k.clone()).collect()
    }
}

/// `Tr(E_k ρ)` for every outcome.
pub fn measure<K: Clone + Ord>(povm: &Povm<K>, state: &DensityState) -> Result<BTreeMap<K, f64>> {
    if povm.shape.total() != state.dim() {
        return Err(Error::Dimension(
            "measurement and state dimensions differ".into(),
        ));
    }
    let mut out = BTreeMap::new();
    let mut total = 0.0;
    for (k, e) in &povm.elements {
        let p = clip_probability((e * &state.mat).trace().re)?;
        total += p;
        out.insert(k.clone(), p);
    }
    if (total - 1.0).abs() > PROB_TOL {
        return Err(Error::InvalidPovm(format!(
            "outcome probabilities sum to {total}"
        )));
    }
    Ok(out)
}

/// Clips rounding noise into `[0, 1]`; larger violations are errors.
pub fn clip_probability(p: f64) -> Result<f64> {
    if !(-PROB_TOL..=1.0 + PROB_TOL).contains(&p) || p.is_nan() {
        return Err(Error::Precondition(format!(
            "probability {p} outside [0, 1]"
        )));
    }
    Ok(p.clamp(0.0, 1.0))
}

fn same_dims(a: &DensityState, b: &DensityState) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::Dimension(format!(
            "states of dimension {} and {}",
            a.dim(),
            b.dim()
        )));
    }
    Ok(())
}

/// `½‖a − b‖₁`.
pub fn trace_distance(a: &DensityState, b: &DensityState) -> Result<f64> {
    same_dims(a, b)?;
    Ok((0.5 * trace_norm(&(&a.mat - &b.mat))).clamp(0.0, 1.0))
}

fn fidelity_root(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let e = eig_hermitian(m)?;
    if let Some(&min) = e.values.last() {
        if min < -STATE_TOL {
            return Err(Error::NotPsd(min));
        }
    }
    Ok(e.map(|l| {
        if l <= FIDELITY_EIG_FLOOR {
            0.0
        } else {
            l.sqrt()
        }
    }))
}

/// `‖√a √b‖₁`.
pub fn fidelity(a: &DensityState, b: &DensityState) -> Result<f64> {
    same_dims(a, b)?;
    let sa = fidelity_root(&a.mat)?;
    let sb = fidelity_root(&b.mat)?;
    Ok(svd(&(&sa * &sb)).s.iter().sum::<f64>().clamp(0.0, 1.0))
}

/// Rank cutoff used by [`purify`].
pub const PURIFY_CUTOFF: f64 = 1e-12;

/// Canonical purification `Σ √λ_i |v_i⟩|i⟩`: eigenvalues descending, reference
/// register appended last with dimension equal to the rank.
pub fn purify(rho: &DensityState) -> PureState {
    let e = eig_hermitian(&rho.mat).expect("density states are Hermitian");
    let rank = e
        .values
        .iter()
        .filter(|&&l| l > PURIFY_CUTOFF)
        .count()
        .max(1);
    let n = rho.dim();
    let mut vec = vec![C64::new(0.0, 0.0); n * rank];
    for i in 0..rank {
        let w = e.values[i].max(0.0).sqrt();
        for a in 0..n {
            vec[a * rank + i] = e.vectors[(a, i)] * w;
        }
    }
    let shape = rho
        .shape
        .concat(&RegisterShape::new(vec![rank]).expect("positive rank"));
    let norm = vec_norm(&vec);
    PureState::trusted(vec.iter().map(|z| z / norm).collect(), shape)
}

/// Unitary on the `local` registers (in the listed order) maximizing
/// `|⟨phi2|(U ⊗ I)|phi1⟩|`; the maximum equals the fidelity of the marginals on
/// the remaining registers and is attained with a real positive overlap.
pub fn uhlmann_unitary(
    phi1: &PureState,
    phi2: &PureState,
    local: &[usize],
) -> Result<ComplexMatrix> {
    if phi1.shape != phi2.shape {
        return Err(Error::Precondition(
            "purifications must share the register structure".into(),
        ));
    }
    if local.is_empty() || local.len() >= phi1.shape.len() {
        return Err(Error::Precondition(
            "local registers must be a proper nonempty subset".into(),
        ));
    }
    let rest: Vec<usize> = (0..phi1.shape.len())
        .filter(|r| !local.contains(r))
        .collect();
    let perm: Vec<usize> = rest.iter().chain(local).copied().collect();
    let a = phi1.permute(&perm)?;
    let b = phi2.permute(&perm)?;
    let dl = phi1.shape.select(local)?.total();
    let dc = phi1.shape.total() / dl;
    // X[l, l'] = Σ_c phi1[c, l] conj(phi2[c, l']) so that the overlap is Tr(U X).
    let x = ComplexMatrix::from_fn(dl, dl, |l, lp| {
        (0..dc)
            .map(|c| a.vec[c * dl + l] * b.vec[c * dl + lp].conj())
            .sum()
    });
    let d = svd(&x);
    Ok(&d.v * &d.u.adjoint())
}

/// Two-outcome discrimination result; outcome 0 guesses the first state.
#[derive(Clone, Debug)]
pub struct Helstrom {
    pub povm: Povm<u8>,
    pub success: f64,
}

/// Optimal equal-prior discrimination of `a` and `b`.
pub fn helstrom(a: &DensityState, b: &DensityState) -> Result<Helstrom> {
    same_dims(a, b)?;
    helstrom_weighted(
        &a.mat.scale_real(0.5),
        &b.mat.scale_real(0.5),
        a.shape.clone(),
    )
}

/// Optimal discrimination of sub-normalized hypotheses `a`, `b` with
/// `Tr a + Tr b = 1`: success `½(1 + ‖a − b‖₁)`.
pub fn helstrom_weighted(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    shape: RegisterShape,
) -> Result<Helstrom> {
    check_annotation(a, &shape)?;
    check_annotation(b, &shape)?;
    let total = (a.trace() + b.trace()).re;
    if (total - 1.0).abs() > STATE_TOL {
        return Err(Error::Precondition(format!(
            "hypothesis weights sum to {total}"
        )));
    }
    let diff = (a - b).hermitian_part();
    let e = eig_hermitian(&diff)?;
    let p = e.map(|l| if l > 0.0 { 1.0 } else { 0.0 });
    let q = &ComplexMatrix::identity(shape.total()) - &p;
    let success = clip_probability(0.5 * (1.0 + e.values.iter().map(|l| l.abs()).sum::<f64>()))?;
    let povm = Povm::new(vec![(0, p), (1, q)], shape)?;
    Ok(Helstrom { povm, success })
}

/// Outcome label of a pretty good measurement.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PgmOutcome {
    State(usize),
    /// Projector onto the complement of the ensemble's support.
    Null,
}

#[derive(Clone, Debug)]
pub struct Pgm {
    pub povm: Povm<PgmOutcome>,
    pub success: f64,
}

/// Pretty good measurement `S^{-1/2} p_i ρ_i S^{-1/2}` with `S = Σ p_i ρ_i`
/// inverted on its support.
pub fn pgm(states: &[(f64, DensityState)]) -> Result<Pgm> {
    let first = states
        .first()
        .ok_or_else(|| Error::Precondition("empty ensemble".into()))?;
    let total: f64 = states.iter().map(|s| s.0).sum();
    if states.iter().any(|s| s.0 < 0.0) || (total - 1.0).abs() > STATE_TOL {
        return Err(Error::Precondition(
            "priors must be a probability vector".into(),
        ));
    }
    let n = first.1.dim();
    let mut s = ComplexMatrix::zeros(n, n);
    for (p, rho) in states {
        if rho.shape != first.1.shape {
            return Err(Error::Dimension("ensemble states differ in shape".into()));
        }
        s += &rho.mat.scale_real(*p);
    }
    let s = s.hermitian_part();
    let inv = inv_sqrt_psd(&s, PINV_CUTOFF)?;
    let support = support_projector(&s, PINV_CUTOFF)?;
    let mut elements = Vec::with_capacity(states.len() + 1);
    let mut success = 0.0;
    for (i, (p, rho)) in states.iter().enumerate() {
        let e = (&(&inv * &rho.mat.scale_real(*p)) * &inv).hermitian_part();
        success += p * (&e * &rho.mat).trace().re;
        elements.push((PgmOutcome::State(i), e));
    }
    elements.push((PgmOutcome::Null, &ComplexMatrix::identity(n) - &support));
    let povm = Povm::new(elements, first.1.shape.clone())?;
    Ok(Pgm {
        povm,
        success: clip_probability(success)?,
    })
}

#[cfg(test)]
mod tests;
