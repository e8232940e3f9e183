//! Seeded random states, unitaries and channels for tests and candidate sets.

use super::{DensityState, KrausChannel, PureState};
use crate::matcore::{inner, vec_norm, ComplexMatrix, RegisterShape};
use crate::{Result, C64};
use rand::Rng;
use rand_distr::StandardNormal;

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Ginibre matrix with i.i.d. standard complex Gaussian entries.
pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Haar-random pure state.
pub fn pure_state<R: Rng + ?Sized>(shape: RegisterShape, rng: &mut R) -> PureState {
    let v: Vec<C64> = (0..shape.total()).map(|_| gaussian(rng)).collect();
    let n = vec_norm(&v);
    PureState::trusted(v.iter().map(|z| z / n).collect(), shape)
}

/// Random density matrix of the given rank (induced Hilbert–Schmidt measure).
pub fn density_state<R: Rng + ?Sized>(
    shape: RegisterShape,
    rank: usize,
    rng: &mut R,
) -> DensityState {
    let g = ginibre(shape.total(), rank.max(1), rng);
    let m = &g * &g.adjoint();
    let t = m.trace().re;
    DensityState::trusted(m.scale_real(1.0 / t), shape)
}

/// Orthonormalizes the columns of `m` (modified Gram–Schmidt, two passes).
fn orthonormal_columns(m: &ComplexMatrix) -> ComplexMatrix {
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(m.cols());
    for j in 0..m.cols() {
        let mut v = m.column_vec(j);
        for _ in 0..2 {
            for u in &cols {
                let p = inner(u, &v);
                for (x, y) in v.iter_mut().zip(u) {
                    *x -= p * y;
                }
            }
        }
        let n = vec_norm(&v);
        cols.push(v.iter().map(|z| z / n).collect());
    }
    ComplexMatrix::from_fn(m.rows(), m.cols(), |r, c| cols[c][r])
}

/// Haar-random unitary.
pub fn unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    orthonormal_columns(&ginibre(n, n, rng))
}

/// Random channel with `kraus_rank` Kraus operators, cut from a random isometry.
pub fn channel<R: Rng + ?Sized>(
    in_shape: RegisterShape,
    out_shape: RegisterShape,
    kraus_rank: usize,
    rng: &mut R,
) -> Result<KrausChannel> {
    let (din, dout) = (in_shape.total(), out_shape.total());
    let v = orthonormal_columns(&ginibre(dout * kraus_rank, din, rng));
    let ops = (0..kraus_rank)
        .map(|k| ComplexMatrix::from_fn(dout, din, |r, c| v[(k * dout + r, c)]))
        .collect();
    KrausChannel::new(ops, in_shape, out_shape)
}
