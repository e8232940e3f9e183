//! Constructive adversaries and bound certification.
//!
//! Every success probability here is computed exactly from density matrices.

use crate::channelzoo::{Bit, SOT_LABELS};
use crate::matcore::{inner, kron, sqrt_psd, ComplexMatrix, RegisterShape};
use crate::otproto::{
    completeness_delta, induced_delta, max_fidelity, run_protocol1_honest, FidelityPair,
    ProtocolOneInstance,
};
use crate::qhe::{best_sot_pgm_attack, metrics, QheScheme, SchemeMetrics};
use crate::qstate::{
    fidelity, helstrom, helstrom_weighted, pgm, trace_distance, uhlmann_unitary, DensityState,
    PgmOutcome,
};
use crate::{Error, Result};
use serde::Serialize;

/// Tolerance of every certified inequality.
pub const THEOREM_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    /// Guaranteed minimum success.
    Floor,
    /// Maximum possible success.
    Ceiling,
}

/// Attack success against its guaranteed bound. `slack` is positive when the
/// bound is respected.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AttackReport {
    pub attack: String,
    pub success: f64,
    pub bound: f64,
    pub slack: f64,
    #[serde(skip)]
    pub kind: BoundKind,
    pub witness: String,
}

impl AttackReport {
    pub fn floor(attack: &str, success: f64, bound: f64, witness: String) -> Self {
        Self {
            attack: attack.into(),
            success,
            bound,
            slack: success - bound,
            kind: BoundKind::Floor,
            witness,
        }
    }

    pub fn ceiling(attack: &str, success: f64, bound: f64, witness: String) -> Self {
        Self {
            attack: attack.into(),
            success,
            bound,
            slack: bound - success,
            kind: BoundKind::Ceiling,
            witness,
        }
    }

    pub fn holds(&self) -> bool {
        self.slack >= -THEOREM_TOL
    }
}

fn label(x: (Bit, Bit)) -> String {
    format!("({},{})", x.0, x.1)
}

fn sigmas(inst: &ProtocolOneInstance) -> Result<Vec<DensityState>> {
    SOT_LABELS
        .iter()
        .map(|&(a, b)| Ok(run_protocol1_honest(inst, a, b)?.sigma))
        .collect()
}

/// `1 − (1/8) Σ F(σ_x, σ_x')` over ordered pairs `x ≠ x'`.
pub fn pgm_fidelity_floor(states: &[DensityState]) -> Result<f64> {
    let mut total = 0.0;
    for (p, a) in states.iter().enumerate() {
        for (q, b) in states.iter().enumerate() {
            if p != q {
                total += fidelity(a, b)?;
            }
        }
    }
    Ok(1.0 - total / 8.0)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AlicePgmReport {
    pub report: AttackReport,
    pub f: f64,
    pub delta: f64,
    /// `1 − (1/8) Σ F` over ordered pairs of final states.
    pub fidelity_sum_floor: f64,
}

/// Cheating Alice replaces her final measurement by the PGM on `{σ_x}` and
/// guesses `(x0, x1)`; success counts only runs Bob accepts.
pub fn alice_pgm_attack(inst: &ProtocolOneInstance) -> Result<AlicePgmReport> {
    let states = sigmas(inst)?;
    let ensemble: Vec<(f64, DensityState)> = states.iter().map(|s| (0.25, s.clone())).collect();
    let measurement = pgm(&ensemble)?;
    let mut success = 0.0;
    for (k, &(x0, x1)) in SOT_LABELS.iter().enumerate() {
        let e = measurement
            .povm
            .get(&PgmOutcome::State(k))
            .expect("outcome");
        let joint = kron(e, inst.bob_accept());
        let psi = inst.final_state(x0, x1)?;
        success += 0.25 * inner(psi.vec(), &joint.matvec(psi.vec())).re;
    }
    let fp = max_fidelity(inst)?;
    let delta = completeness_delta(inst)?.delta;
    let bound = 1.0 - fp.f - (delta * (1.0 - delta)).max(0.0).sqrt();
    Ok(AlicePgmReport {
        report: AttackReport::floor(
            "alice-pgm",
            success.clamp(0.0, 1.0),
            bound,
            format!(
                "pretty good measurement on the four final states of {}",
                inst.name()
            ),
        ),
        f: fp.f,
        delta,
        fidelity_sum_floor: pgm_fidelity_floor(&states)?,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BobSuperpositionReport {
    pub report: AttackReport,
    pub pair: ((Bit, Bit), (Bit, Bit)),
    /// Index bit on which the two inputs of the superposition differ.
    pub differing_index: Bit,
    /// `|⟨φ^b|φ^a⟩|` after Bob's alignment.
    pub aligned_overlap: f64,
    /// `Δ(ρ_B^(0), ρ_B^(1))` of the normalized post-measurement states.
    pub trace_distance: f64,
    /// `f − 2√(2δ)`.
    pub trace_distance_floor: f64,
    /// `max_x̂ |⟨φ^b|N|φ^a⟩| − √(⟨φ^a|N|φ^a⟩⟨φ^b|N|φ^b⟩)` on the differing index.
    pub cauchy_schwarz_gap: f64,
    /// `max_x̂ |⟨φ^b|N|φ^a⟩| − √(2δ)/2` on the differing index.
    pub cauchy_schwarz_delta_gap: f64,
    /// Probability that honest Alice accepts.
    pub alice_accept: f64,
}

fn embed_on_alice(op: &ComplexMatrix, db: usize) -> ComplexMatrix {
    kron(op, &ComplexMatrix::identity(db))
}

/// Cheating Bob runs the rounds controlled on a register `B` holding
/// `(|x⟩ + |x'⟩)/√2` for the pair `(x, x')`, aligns the branches on `R_B` with
/// the Uhlmann unitary, and after Alice's honest measurement `E = N^{1/2}`
/// guesses `i` with the Helstrom measurement on `B`.
pub fn bob_superposition_attack(
    inst: &ProtocolOneInstance,
    pair: ((Bit, Bit), (Bit, Bit)),
) -> Result<BobSuperpositionReport> {
    let (a, b) = pair;
    if a == b {
        return Err(Error::Precondition(
            "superposition needs two distinct inputs".into(),
        ));
    }
    let differing_index: Bit = if a.1 != b.1 { 1 } else { 0 };
    let psi_a = inst.final_state(a.0, a.1)?;
    let psi_b = inst.final_state(b.0, b.1)?;
    let [_, _, db] = inst.dims();
    let u = uhlmann_unitary(&psi_a, &psi_b, &[2])?;
    let phi_a = psi_a.apply(&u, &[2], &[db])?;
    let phi = [phi_a.vec().to_vec(), psi_b.vec().to_vec()];
    let aligned_overlap = inner(&phi[1], &phi[0]).norm();

    let accept = embed_on_alice(inst.alice_accept(), db);
    let alice_accept: f64 = phi
        .iter()
        .map(|v| 0.5 * inner(v, &accept.matvec(v)).re)
        .sum();

    let fp: FidelityPair = max_fidelity(inst)?;
    let delta = completeness_delta(inst)?.delta;
    let mut joint = [ComplexMatrix::zeros(2, 2), ComplexMatrix::zeros(2, 2)];
    let mut cs_gap = f64::NEG_INFINITY;
    let mut cs_delta_gap = f64::NEG_INFINITY;
    for (key, n) in inst.final_povm().elements() {
        let (i, _) = *key;
        let e = embed_on_alice(&sqrt_psd(n)?, db);
        let ev = [e.matvec(&phi[0]), e.matvec(&phi[1])];
        for al in 0..2 {
            for be in 0..2 {
                joint[usize::from(i)][(al, be)] += inner(&ev[be], &ev[al]) * 0.5;
            }
        }
        if i == differing_index {
            let cross = inner(&ev[1], &ev[0]).norm();
            let na = inner(&ev[0], &ev[0]).re.max(0.0);
            let nb = inner(&ev[1], &ev[1]).re.max(0.0);
            cs_gap = cs_gap.max(cross - (na * nb).sqrt());
            cs_delta_gap = cs_delta_gap.max(cross - (2.0 * delta).sqrt() / 2.0);
        }
    }
    let shape = RegisterShape::qubits(1);
    let h = helstrom_weighted(&joint[0], &joint[1], shape.clone())?;
    let norm = |m: &ComplexMatrix| -> Result<DensityState> {
        let t = m.trace().re;
        DensityState::new(m.scale_real(1.0 / t), shape.clone())
    };
    let trace_distance = trace_distance(&norm(&joint[0])?, &norm(&joint[1])?)?;
    let bound = 0.5 * (1.0 + fp.f - 2.0 * (2.0 * delta).sqrt());
    Ok(BobSuperpositionReport {
        report: AttackReport::floor(
            "bob-superposition",
            h.success,
            bound,
            format!(
                "superposition of inputs {} and {} on {}",
                label(a),
                label(b),
                inst.name()
            ),
        ),
        pair,
        differing_index,
        aligned_overlap,
        trace_distance,
        trace_distance_floor: fp.f - 2.0 * (2.0 * delta).sqrt(),
        cauchy_schwarz_gap: cs_gap,
        cauchy_schwarz_delta_gap: cs_delta_gap,
        alice_accept,
    })
}

/// Bob's optimal guess of `i` from the key-averaged ciphertext of `|i,0⟩`,
/// against the ceiling `½(1 + ε_d)`.
pub fn bob_helstrom_attack_on_protocol4(s: &QheScheme, eps_d: f64) -> Result<AttackReport> {
    let plain = |i: usize| DensityState::basis(RegisterShape::qubits(2), i << 1);
    let a = s.averaged_ciphertext(&plain(0)?)?;
    let b = s.averaged_ciphertext(&plain(1)?)?;
    let h = helstrom(&a, &b)?;
    Ok(AttackReport::ceiling(
        "bob-helstrom",
        h.success,
        0.5 * (1.0 + eps_d),
        format!(
            "Helstrom between averaged encryptions of |0,0> and |1,0> under {}",
            s.name()
        ),
    ))
}

/// Alice's best PGM guess of `(x0, x1)` from one evaluated probe, against the
/// ceiling `½ + ε_c`.
pub fn alice_pgm_attack_on_protocol4(s: &QheScheme, eps_c_ub: f64) -> Result<AttackReport> {
    let best = best_sot_pgm_attack(s)?;
    Ok(AttackReport::ceiling(
        "alice-pgm-protocol4",
        best.value,
        0.5 + eps_c_ub,
        format!("probe {}", best.witness.input.unwrap_or_default()),
    ))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FidelityComplement {
    /// `max_x F(σ_x, σ_x̄)`.
    pub value: f64,
    /// `2√(δ(1−δ))`.
    pub bound: f64,
    /// The bound is asserted only for `δ ≤ ½`.
    pub checked: bool,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Theorem2Report {
    pub instance: String,
    pub delta: f64,
    pub f: f64,
    pub p_a: f64,
    pub p_b: f64,
    pub p_a_floor: f64,
    pub p_b_floor: f64,
    /// `P_A + 2 P_B + 4√δ`.
    pub lhs: f64,
    /// `P_A + 2 P_B + √(δ(1−δ)) + 2√(2δ)`.
    pub lhs_sharp: f64,
    pub slack: f64,
    pub fidelity_complement: FidelityComplement,
    pub alice: AlicePgmReport,
    pub bob: BobSuperpositionReport,
    pub holds: bool,
}

/// Runs both attacks on `inst` and checks every inequality of the tradeoff
/// `P_A + 2 P_B + 4√δ ≥ 2`.
pub fn certify_theorem2(inst: &ProtocolOneInstance) -> Result<Theorem2Report> {
    let alice = alice_pgm_attack(inst)?;
    let fp = max_fidelity(inst)?;
    let bob = bob_superposition_attack(inst, fp.pair)?;
    let delta = alice.delta;
    let states = sigmas(inst)?;
    let mut complement: f64 = 0.0;
    for (k, &(x0, x1)) in SOT_LABELS.iter().enumerate() {
        let kbar = SOT_LABELS
            .iter()
            .position(|&l| l == (1 - x0, 1 - x1))
            .expect("label");
        complement = complement.max(fidelity(&states[k], &states[kbar])?);
    }
    let cbound = 2.0 * (delta * (1.0 - delta)).max(0.0).sqrt();
    let checked = delta <= 0.5;
    let fidelity_complement = FidelityComplement {
        value: complement,
        bound: cbound,
        checked,
        holds: !checked || complement <= cbound + THEOREM_TOL,
    };
    let (p_a, p_b) = (alice.report.success, bob.report.success);
    let lhs = p_a + 2.0 * p_b + 4.0 * delta.sqrt();
    let lhs_sharp =
        p_a + 2.0 * p_b + (delta * (1.0 - delta)).max(0.0).sqrt() + 2.0 * (2.0 * delta).sqrt();
    let holds = lhs >= 2.0 - THEOREM_TOL
        && lhs_sharp >= 2.0 - THEOREM_TOL
        && alice.report.holds()
        && bob.report.holds()
        && alice.report.success >= alice.fidelity_sum_floor - THEOREM_TOL
        && bob.trace_distance >= bob.trace_distance_floor - THEOREM_TOL
        && bob.cauchy_schwarz_gap <= THEOREM_TOL
        && bob.cauchy_schwarz_delta_gap <= THEOREM_TOL
        && fidelity_complement.holds;
    Ok(Theorem2Report {
        instance: inst.name().to_string(),
        delta,
        f: alice.f,
        p_a,
        p_b,
        p_a_floor: alice.report.bound,
        p_b_floor: bob.report.bound,
        lhs,
        lhs_sharp,
        slack: lhs - 2.0,
        fidelity_complement,
        alice,
        bob,
        holds,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainCheck {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    pub holds: bool,
}

impl ChainCheck {
    fn at_most(name: &str, value: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            value,
            bound,
            holds: value <= bound + THEOREM_TOL,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Corollary1Certificate {
    pub scheme: String,
    pub metrics: SchemeMetrics,
    /// Completeness error of the induced standard OT.
    pub delta: f64,
    pub p_a: AttackReport,
    pub p_b: AttackReport,
    pub chain: Vec<ChainCheck>,
    /// `ε_d + ε_c^UB + 4√ε`.
    pub lhs: f64,
    /// `P_A + 2 P_B + 4√δ` of the induced OT, for information.
    pub induced_tradeoff: f64,
    pub holds: bool,
}

/// Runs Protocol 4 on `s` and checks that the induced OT parameters respect the
/// scheme's metrics, then reports `ε_d + ε_c^UB + 4√ε` against `½`.
pub fn certify_corollary1(s: &QheScheme) -> Result<Corollary1Certificate> {
    let m = metrics(s)?;
    let delta = induced_delta(s)?;
    let p_a = alice_pgm_attack_on_protocol4(s, m.eps_c_ub)?;
    let p_b = bob_helstrom_attack_on_protocol4(s, m.eps_d)?;
    let chain = vec![
        ChainCheck::at_most("P_A <= 1/2 + eps_c_ub", p_a.success, p_a.bound),
        ChainCheck::at_most("P_B <= (1 + eps_d)/2", p_b.success, p_b.bound),
        ChainCheck::at_most("delta <= eps", delta, m.eps),
    ];
    let lhs = m.eps_d + m.eps_c_ub + 4.0 * m.eps.sqrt();
    let holds = chain.iter().all(|c| c.holds) && lhs >= 0.5 - THEOREM_TOL;
    Ok(Corollary1Certificate {
        scheme: s.name().to_string(),
        induced_tradeoff: p_a.success + 2.0 * p_b.success + 4.0 * delta.sqrt(),
        metrics: m,
        delta,
        p_a,
        p_b,
        chain,
        lhs,
        holds,
    })
}

#[cfg(test)]
mod tests;
