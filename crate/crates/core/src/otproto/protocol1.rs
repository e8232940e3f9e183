//! Generic N-round semi-random OT.
//!
//! Registers are ordered `A` (message), `R_A` (Alice's memory), `R_B` (Bob's
//! memory), each a single register. `R_B` starts in `|0⟩`. Round `ℓ` applies
//! Bob's `U_{x,ℓ}` on `A R_B` followed by Alice's `V_ℓ` on `A R_A`; Alice then
//! measures `{N_(i,x̂)}` on `A R_A`.

use super::check_bits;
use crate::channelzoo::{pauli_x, pauli_z, Bit, SOT_LABELS};
use crate::matcore::{kron, kron_all, ComplexMatrix, RegisterShape};
use crate::qstate::{fidelity, measure, DensityState, Povm, PureState};
use crate::{Error, Result, C64};
use serde::Serialize;
use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_4;

const UNITARY_TOL: f64 = 1e-10;
/// Coupling angle of [`leaky_rotation_instance`].
pub const LEAKY_COUPLING: f64 = FRAC_PI_4;

fn label_index(x0: Bit, x1: Bit) -> usize {
    usize::from(2 * x0 + x1)
}

#[derive(Clone, Debug)]
pub struct Round {
    /// `U_(x0,x1)` on `A R_B`, indexed by `2·x0 + x1`.
    pub bob: [ComplexMatrix; 4],
    /// `V` on `A R_A`.
    pub alice: ComplexMatrix,
}

#[derive(Clone, Debug)]
pub struct ProtocolOneInstance {
    name: String,
    dims: [usize; 3],
    alice_init: PureState,
    rounds: Vec<Round>,
    alice_accept: ComplexMatrix,
    bob_accept: ComplexMatrix,
    final_povm: Povm<(Bit, Bit)>,
}

fn check_unitary(u: &ComplexMatrix, n: usize, what: &str) -> Result<()> {
    if u.rows() != n || u.cols() != n {
        return Err(Error::Dimension(format!("{what} must be {n}x{n}")));
    }
    if (&(&u.adjoint() * u) - &ComplexMatrix::identity(n)).max_abs() > UNITARY_TOL {
        return Err(Error::InvalidInstance(format!("{what} is not unitary")));
    }
    Ok(())
}

fn check_projector(p: &ComplexMatrix, n: usize, what: &str) -> Result<()> {
    if p.rows() != n || p.cols() != n {
        return Err(Error::Dimension(format!("{what} must be {n}x{n}")));
    }
    if p.hermitian_deviation() > UNITARY_TOL || (&(p * p) - p).max_abs() > UNITARY_TOL {
        return Err(Error::InvalidInstance(format!("{what} is not a projector")));
    }
    Ok(())
}

impl ProtocolOneInstance {
    /// `alice_init` lives on `A R_A` with shape `[dim A, dim R_A]`; `bob_ref_dim`
    /// may be 1. The accept projectors act on `A R_A` and `R_B`; the abort
    /// projectors are their complements.
    pub fn new(
        name: &str,
        alice_init: PureState,
        bob_ref_dim: usize,
        rounds: Vec<Round>,
        alice_accept: ComplexMatrix,
        bob_accept: ComplexMatrix,
        final_povm: Povm<(Bit, Bit)>,
    ) -> Result<Self> {
        let sd = alice_init.shape().dims();
        if sd.len() != 2 || bob_ref_dim == 0 {
            return Err(Error::Dimension(
                "initial state must have registers [A, R_A] and R_B nonempty".into(),
            ));
        }
        let (da, dra, db) = (sd[0], sd[1], bob_ref_dim);
        if rounds.is_empty() {
            return Err(Error::InvalidInstance(
                "at least one round is required".into(),
            ));
        }
        for (l, round) in rounds.iter().enumerate() {
            for u in &round.bob {
                check_unitary(u, da * db, &format!("Bob's round-{} unitary", l + 1))?;
            }
            check_unitary(
                &round.alice,
                da * dra,
                &format!("Alice's round-{} unitary", l + 1),
            )?;
        }
        check_projector(&alice_accept, da * dra, "Alice's accept projector")?;
        check_projector(&bob_accept, db, "Bob's accept projector")?;
        let mut keys = final_povm.keys();
        keys.sort();
        if keys != SOT_LABELS.to_vec() {
            return Err(Error::InvalidPovm(
                "final measurement must have outcomes (i, x) in {0,1}^2".into(),
            ));
        }
        if final_povm.shape().total() != da * dra {
            return Err(Error::Dimension(
                "final measurement must act on A R_A".into(),
            ));
        }
        Ok(Self {
            name: name.to_string(),
            dims: [da, dra, db],
            alice_init,
            rounds,
            alice_accept,
            bob_accept,
            final_povm,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// `[dim A, dim R_A, dim R_B]`.
    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn joint_shape(&self) -> RegisterShape {
        RegisterShape::new(self.dims.to_vec()).expect("positive dims")
    }

    pub fn rounds(&self) -> &[Round] {
        &self.rounds
    }

    pub fn final_povm(&self) -> &Povm<(Bit, Bit)> {
        &self.final_povm
    }

    pub fn alice_accept(&self) -> &ComplexMatrix {
        &self.alice_accept
    }

    pub fn bob_accept(&self) -> &ComplexMatrix {
        &self.bob_accept
    }

    /// `|ψ⟩_{A R_A} ⊗ |0⟩_{R_B}`.
    pub fn initial_state(&self) -> PureState {
        self.alice_init.tensor(
            &PureState::basis(RegisterShape::new(vec![self.dims[2]]).expect("dim"), 0)
                .expect("basis"),
        )
    }

    /// Runs the rounds with Bob's operations chosen per round by `bob`.
    pub fn evolve_with(
        &self,
        mut bob: impl FnMut(usize, &Round) -> ComplexMatrix,
    ) -> Result<PureState> {
        let [da, dra, db] = self.dims;
        let mut psi = self.initial_state();
        for (l, round) in self.rounds.iter().enumerate() {
            psi = psi.apply(&bob(l, round), &[0, 2], &[da, db])?;
            psi = psi.apply(&round.alice, &[0, 1], &[da, dra])?;
        }
        Ok(psi)
    }

    /// `|ψ^(x0,x1)⟩ = V_N U_{x,N} ⋯ V_1 U_{x,1} |ψ⟩|0⟩`.
    pub fn final_state(&self, x0: Bit, x1: Bit) -> Result<PureState> {
        check_bits(&[x0, x1])?;
        self.evolve_with(|_, r| r.bob[label_index(x0, x1)].clone())
    }
}

#[derive(Clone, Debug)]
pub struct HonestRun {
    pub state: PureState,
    /// Distribution of Alice's `(i, x̂)`.
    pub distribution: BTreeMap<(Bit, Bit), f64>,
    /// `σ_(x0,x1)`: Alice's final state on `A R_A`.
    pub sigma: DensityState,
    pub alice_accept: f64,
    pub bob_accept: f64,
}

pub fn run_protocol1_honest(inst: &ProtocolOneInstance, x0: Bit, x1: Bit) -> Result<HonestRun> {
    let state = inst.final_state(x0, x1)?;
    let sigma = state.marginal(&[0, 1])?;
    let bob_marginal = state.marginal(&[2])?;
    let alice_accept = (&inst.alice_accept * sigma.mat()).trace().re;
    let bob_accept = (&inst.bob_accept * bob_marginal.mat()).trace().re;
    let distribution = measure(&inst.final_povm, &sigma)?;
    Ok(HonestRun {
        state,
        distribution,
        sigma,
        alice_accept,
        bob_accept,
    })
}

/// Completeness error and the per-branch error terms.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Completeness {
    pub delta: f64,
    /// `theta[2·x0 + x1][i]` with `Pr[i, x̂ ≠ x_i] = θ/2`.
    pub theta: [[f64; 2]; 4],
}

/// `δ = max_x Pr[x̂ ≠ x_i]` over honest runs; fails if `i` is not uniform.
pub fn completeness_delta(inst: &ProtocolOneInstance) -> Result<Completeness> {
    let mut theta = [[0.0; 2]; 4];
    let mut delta: f64 = 0.0;
    for &(x0, x1) in &SOT_LABELS {
        let run = run_protocol1_honest(inst, x0, x1)?;
        let xs = [x0, x1];
        let mut err = 0.0;
        for i in 0..2u8 {
            let marginal = run.distribution[&(i, 0)] + run.distribution[&(i, 1)];
            if (marginal - 0.5).abs() > 1e-6 {
                return Err(Error::InvalidInstance(format!(
                    "Pr[i={i}] = {marginal} is not 1/2"
                )));
            }
            let wrong = run.distribution[&(i, 1 - xs[usize::from(i)])];
            theta[label_index(x0, x1)][usize::from(i)] = 2.0 * wrong;
            err += wrong;
        }
        delta = delta.max(err);
    }
    Ok(Completeness { delta, theta })
}

/// Maximum fidelity between Alice's final states for distinct inputs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FidelityPair {
    pub f: f64,
    pub pair: ((Bit, Bit), (Bit, Bit)),
}

/// `f = max F(σ_x, σ_x')` over `x ≠ x'`. Among pairs within `1e-12` of the
/// maximum, one differing only in `x1` is preferred, then one differing in `x1`,
/// then the first in lexicographic order.
pub fn max_fidelity(inst: &ProtocolOneInstance) -> Result<FidelityPair> {
    let sigmas: Vec<DensityState> = SOT_LABELS
        .iter()
        .map(|&(a, b)| Ok(run_protocol1_honest(inst, a, b)?.sigma))
        .collect::<Result<_>>()?;
    let mut pairs = Vec::new();
    for p in 0..4 {
        for q in p + 1..4 {
            pairs.push((
                fidelity(&sigmas[p], &sigmas[q])?,
                SOT_LABELS[p],
                SOT_LABELS[q],
            ));
        }
    }
    let f = pairs.iter().map(|p| p.0).fold(0.0, f64::max);
    let near: Vec<_> = pairs.iter().filter(|p| p.0 >= f - 1e-12).collect();
    let chosen = near
        .iter()
        .find(|(_, a, b)| a.0 == b.0)
        .or_else(|| near.iter().find(|(_, a, b)| a.1 != b.1))
        .unwrap_or(&near[0]);
    Ok(FidelityPair {
        f,
        pair: (chosen.1, chosen.2),
    })
}

fn i2() -> ComplexMatrix {
    ComplexMatrix::identity(2)
}

fn z_rotation(angle: f64) -> ComplexMatrix {
    let d = [C64::from_polar(1.0, -angle), C64::from_polar(1.0, angle)];
    ComplexMatrix::from_fn(2, 2, |r, c| if r == c { d[r] } else { C64::new(0.0, 0.0) })
}

/// `|Φ+⟩_{A1 R1} |Φ+⟩_{A2 R2}` stored as `A = A1A2`, `R_A = R1R2`.
fn two_bell_pairs() -> PureState {
    let h = 0.5;
    let v = (0..16)
        .map(|k| {
            let (a, r) = (k / 4, k % 4);
            C64::new(if a == r { h } else { 0.0 }, 0.0)
        })
        .collect();
    PureState::new(v, RegisterShape::new(vec![4, 4]).expect("dims")).expect("unit")
}

/// `N_(i,x̂) = ½ (I + (−1)^x̂ X_{Ai} X_{Ri}) / 2`, optionally with the `x̂`
/// labels exchanged on pair `swap`.
fn parity_povm(swap: Option<Bit>) -> Povm<(Bit, Bit)> {
    let x = pauli_x();
    let mut elements = Vec::new();
    for i in 0..2u8 {
        let xx = if i == 0 {
            kron_all(&[&x, &i2(), &x, &i2()])
        } else {
            kron_all(&[&i2(), &x, &i2(), &x])
        };
        for xhat in 0..2u8 {
            let sign = if xhat == 0 { 1.0 } else { -1.0 };
            let p = (&ComplexMatrix::identity(16) + &xx.scale_real(sign)).scale_real(0.25);
            let label = if swap == Some(i) { 1 - xhat } else { xhat };
            elements.push(((i, label), p));
        }
    }
    Povm::new(elements, RegisterShape::new(vec![4, 4]).expect("dims")).expect("complete")
}

fn single_round_instance(
    name: &str,
    bob_ref_dim: usize,
    bob: impl Fn(Bit, Bit) -> ComplexMatrix,
    povm: Povm<(Bit, Bit)>,
) -> Result<ProtocolOneInstance> {
    let round = Round {
        bob: [bob(0, 0), bob(0, 1), bob(1, 0), bob(1, 1)],
        alice: ComplexMatrix::identity(16),
    };
    ProtocolOneInstance::new(
        name,
        two_bell_pairs(),
        bob_ref_dim,
        vec![round],
        ComplexMatrix::identity(16),
        ComplexMatrix::identity(bob_ref_dim),
        povm,
    )
}

fn pow(m: &ComplexMatrix, e: Bit) -> ComplexMatrix {
    if e == 1 {
        m.clone()
    } else {
        ComplexMatrix::identity(m.rows())
    }
}

/// Bob applies `Z^{x0} ⊗ Z^{x1}` to the message halves of two Bell pairs;
/// Alice picks a pair uniformly and reads its `X⊗X` parity.
pub fn bell_pair_instance() -> ProtocolOneInstance {
    let z = pauli_z();
    single_round_instance(
        "bell-pair",
        1,
        |x0, x1| kron(&pow(&z, x0), &pow(&z, x1)),
        parity_povm(None),
    )
    .expect("valid instance")
}

fn check_theta(theta: f64) -> Result<()> {
    if !(0.0..=std::f64::consts::PI).contains(&theta) {
        return Err(Error::Precondition(format!(
            "rotation angle {theta} outside [0, pi]"
        )));
    }
    Ok(())
}

fn rotations(theta: f64, x0: Bit, x1: Bit) -> ComplexMatrix {
    kron(
        &z_rotation(theta * f64::from(x0)),
        &z_rotation(theta * f64::from(x1)),
    )
}

/// As [`bell_pair_instance`] with `Z^{x_b}` replaced by `exp(−iθ x_b Z)`:
/// `f = |cos θ|`, `δ = cos²θ`.
pub fn rotation_instance(theta: f64) -> Result<ProtocolOneInstance> {
    check_theta(theta)?;
    single_round_instance(
        &format!("rotation(theta={theta})"),
        1,
        |x0, x1| rotations(theta, x0, x1),
        parity_povm(None),
    )
}

/// Bob does nothing: every `σ_x` is the same.
pub fn no_encoding_instance() -> ProtocolOneInstance {
    single_round_instance(
        "no-encoding",
        1,
        |_, _| ComplexMatrix::identity(4),
        parity_povm(None),
    )
    .expect("valid")
}

/// [`rotation_instance`] where Bob also rotates a private qubit `R_B` by
/// `exp(−i·LEAKY_COUPLING·Y)` conditioned on message qubit 1 being `|1⟩`.
pub fn leaky_rotation_instance(theta: f64) -> Result<ProtocolOneInstance> {
    check_theta(theta)?;
    let (s, c) = LEAKY_COUPLING.sin_cos();
    let ry = ComplexMatrix::from_real(2, 2, &[c, -s, s, c])?;
    let p0 = ComplexMatrix::diag_real(&[1.0, 0.0]);
    let p1 = ComplexMatrix::diag_real(&[0.0, 1.0]);
    let coupling = &kron_all(&[&p0, &i2(), &i2()]) + &kron_all(&[&p1, &i2(), &ry]);
    single_round_instance(
        &format!("leaky-rotation(theta={theta})"),
        2,
        |x0, x1| &coupling * &kron(&rotations(theta, x0, x1), &i2()),
        parity_povm(None),
    )
}

/// [`bell_pair_instance`] with Alice's outcome labels exchanged on pair 0.
pub fn swapped_outcome_instance() -> ProtocolOneInstance {
    let z = pauli_z();
    single_round_instance(
        "swapped-outcome",
        1,
        |x0, x1| kron(&pow(&z, x0), &pow(&z, x1)),
        parity_povm(Some(0)),
    )
    .expect("valid instance")
}
