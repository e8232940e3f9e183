//! QHE schemes and their security metrics.
//!
//! A scheme is a key space `{0,1}^L` (L ≤ 8), per-key encryption and decryption
//! channels, and a family of delegable channels `F` each paired with the
//! channel `F̂` Bob actually applies to ciphertexts.
//!
//! Metrics are suprema over all inputs and cannot be computed exactly. Each
//! evaluator maximizes over a fixed, seeded candidate set and reports a witness:
//!
//! * `eps` (correctness) and `eps_d` (data privacy) are lower bounds on the true
//!   suprema,
//! * circuit privacy is bracketed: `eps_c_lb` comes from an explicit attack,
//!   `eps_c_ub` from an explicit simulator.
//!
//! Expectations over keys are exact sums over the whole key space.

use crate::channelzoo::{pad_gate, pauli_pad, sot_channel_compact, Bit, SOT_LABELS};
use crate::matcore::{kron, ComplexMatrix, RegisterShape};
use crate::qstate::{
    clip_probability, pgm, random, trace_distance, DensityState, KrausChannel, Povm, PureState,
    STATE_TOL,
};
use crate::{Error, Result, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

/// Largest supported key length.
pub const MAX_KEY_LENGTH: usize = 8;
/// Seed of the random part of every candidate input set.
pub const CANDIDATE_SEED: u64 = 0x51A7_E5EE_D000_0001;
/// Number of random pure inputs in the correctness candidate set.
pub const RANDOM_CORRECTNESS_INPUTS: usize = 64;
/// Number of random pure pairs in the data-privacy candidate set.
pub const RANDOM_PRIVACY_PAIRS: usize = 64;
/// Number of random probes in the circuit-privacy attack search.
pub const RANDOM_PROBES: usize = 16;
/// Names accepted by [`scheme_by_name`].
pub const SCHEME_NAMES: [&str; 3] = ["trivial", "correlated-pad", "independent-qotp"];

/// A key in `{0,1}^L`; component `j` carries weight `2^j` in the index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Key {
    index: u16,
    len: u8,
}

impl Key {
    pub fn from_index(index: usize, len: usize) -> Result<Self> {
        if len > MAX_KEY_LENGTH || index >= 1 << len {
            return Err(Error::Precondition(format!(
                "key index {index} invalid for length {len}"
            )));
        }
        Ok(Self {
            index: index as u16,
            len: len as u8,
        })
    }

    pub fn from_bits(bits: &[Bit]) -> Result<Self> {
        if bits.iter().any(|&b| b > 1) {
            return Err(Error::Precondition("key components must be bits".into()));
        }
        let index = bits
            .iter()
            .enumerate()
            .map(|(j, &b)| usize::from(b) << j)
            .sum();
        Self::from_index(index, bits.len())
    }

    pub fn all(len: usize) -> Vec<Key> {
        (0..1usize << len)
            .map(|i| Key {
                index: i as u16,
                len: len as u8,
            })
            .collect()
    }

    pub fn index(&self) -> usize {
        usize::from(self.index)
    }

    pub fn len(&self) -> usize {
        usize::from(self.len)
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn bit(&self, j: usize) -> Bit {
        (self.index >> j & 1) as Bit
    }

    pub fn bits(&self) -> Vec<Bit> {
        (0..self.len()).map(|j| self.bit(j)).collect()
    }
}

impl fmt::Display for Key {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.bits().iter().map(|b| b.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// A delegable channel and its homomorphic evaluation.
#[derive(Clone, Debug)]
pub struct FamilyMember {
    pub label: String,
    /// Set for the strong OT channel `F_(x0,x1)`.
    pub sot: Option<(Bit, Bit)>,
    /// `F`: plaintext input → plaintext output.
    pub ideal: KrausChannel,
    /// `F̂`: ciphertext input → ciphertext output.
    pub evaluated: KrausChannel,
}

/// Label of the strong OT channel `F_(x0,x1)`.
pub fn sot_label(x0: Bit, x1: Bit) -> String {
    format!("F({x0},{x1})")
}

fn sot_family_evaluated_as_ideal() -> Vec<FamilyMember> {
    SOT_LABELS
        .iter()
        .map(|&(x0, x1)| {
            let ch = sot_channel_compact(x0, x1).expect("bits");
            FamilyMember {
                label: sot_label(x0, x1),
                sot: Some((x0, x1)),
                ideal: ch.clone(),
                evaluated: ch,
            }
        })
        .collect()
}

/// A QHE scheme with an enumerable key space.
#[derive(Clone, Debug)]
pub struct QheScheme {
    name: String,
    key_length: usize,
    enc: Vec<KrausChannel>,
    dec: Vec<KrausChannel>,
    family: Vec<FamilyMember>,
}

impl QheScheme {
    /// `enc[k]` and `dec[k]` are indexed by [`Key::index`].
    pub fn new(
        name: &str,
        key_length: usize,
        enc: Vec<KrausChannel>,
        dec: Vec<KrausChannel>,
        family: Vec<FamilyMember>,
    ) -> Result<Self> {
        if key_length > MAX_KEY_LENGTH {
            return Err(Error::Precondition(format!(
                "key length {key_length} exceeds {MAX_KEY_LENGTH}"
            )));
        }
        let n = 1usize << key_length;
        if enc.len() != n || dec.len() != n {
            return Err(Error::Precondition(format!(
                "need {n} encryption and decryption channels"
            )));
        }
        let first = family
            .first()
            .ok_or_else(|| Error::Precondition("empty channel family".into()))?;
        let (a, o) = (first.ideal.in_shape(), first.ideal.out_shape());
        let (ah, oh) = (first.evaluated.in_shape(), first.evaluated.out_shape());
        let shapes_ok = enc.iter().all(|e| e.in_shape() == a && e.out_shape() == ah)
            && dec.iter().all(|d| d.in_shape() == oh && d.out_shape() == o)
            && family.iter().all(|m| {
                m.ideal.in_shape() == a
                    && m.ideal.out_shape() == o
                    && m.evaluated.in_shape() == ah
                    && m.evaluated.out_shape() == oh
            });
        if !shapes_ok {
            return Err(Error::Dimension(
                "scheme channels disagree on register shapes".into(),
            ));
        }
        for (i, m) in family.iter().enumerate() {
            if family[..i].iter().any(|o| o.label == m.label) {
                return Err(Error::Precondition(format!(
                    "duplicate family label {}",
                    m.label
                )));
            }
        }
        Ok(Self {
            name: name.to_string(),
            key_length,
            enc,
            dec,
            family,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn key_length(&self) -> usize {
        self.key_length
    }

    pub fn keys(&self) -> Vec<Key> {
        Key::all(self.key_length)
    }

    pub fn family(&self) -> &[FamilyMember] {
        &self.family
    }

    pub fn member(&self, label: &str) -> Option<&FamilyMember> {
        self.family.iter().find(|m| m.label == label)
    }

    pub fn sot_member(&self, x0: Bit, x1: Bit) -> Option<&FamilyMember> {
        self.family.iter().find(|m| m.sot == Some((x0, x1)))
    }

    /// Plaintext input registers `A`.
    pub fn input_shape(&self) -> &RegisterShape {
        self.family[0].ideal.in_shape()
    }

    /// Ciphertext registers `Â`.
    pub fn cipher_shape(&self) -> &RegisterShape {
        self.family[0].evaluated.in_shape()
    }

    /// Uniform key.
    pub fn key_gen<R: Rng + ?Sized>(&self, rng: &mut R) -> Key {
        let n = 1usize << self.key_length;
        Key::from_index(rng.random_range(0..n), self.key_length).expect("in range")
    }

    pub fn enc(&self, k: Key) -> &KrausChannel {
        &self.enc[k.index()]
    }

    pub fn dec(&self, k: Key) -> &KrausChannel {
        &self.dec[k.index()]
    }

    /// `Dec_k ∘ F̂ ∘ Enc_k`.
    pub fn pipeline(&self, member: &FamilyMember, k: Key) -> KrausChannel {
        self.enc(k)
            .then(&member.evaluated)
            .and_then(|c| c.then(self.dec(k)))
            .expect("shapes validated at construction")
    }

    /// `E_k Enc_k(ρ)` exactly.
    pub fn averaged_ciphertext(&self, rho: &DensityState) -> Result<DensityState> {
        let keys = self.keys();
        let w = 1.0 / keys.len() as f64;
        let n = self.cipher_shape().total();
        let mut m = ComplexMatrix::zeros(n, n);
        for k in keys {
            m += &self.enc(k).apply_matrix(rho.mat()).scale_real(w);
        }
        Ok(DensityState::trusted(m, self.cipher_shape().clone()))
    }
}

fn identity_channel_2q() -> KrausChannel {
    KrausChannel::identity(RegisterShape::qubits(2))
}

/// Plaintext delegation: identity encryption and decryption, `F̂ = F`.
pub fn scheme_trivial() -> QheScheme {
    QheScheme::new(
        "trivial",
        0,
        vec![identity_channel_2q()],
        vec![identity_channel_2q()],
        sot_family_evaluated_as_ideal(),
    )
    .expect("valid scheme")
}

fn flip_second_qubit(a: Bit) -> KrausChannel {
    KrausChannel::unitary(
        kron(&ComplexMatrix::identity(2), &pad_gate(a, 0)),
        RegisterShape::qubits(2),
    )
    .expect("unitary")
}

/// Key `(a, b1, b2)`: `Enc = X^a Z^{b1} ⊗ X^a Z^{b2}`, `Dec` flips output qubit 2 by `X^a`.
pub fn scheme_correlated_pad() -> QheScheme {
    let keys = Key::all(3);
    let enc = keys
        .iter()
        .map(|k| pauli_pad(k.bit(0), k.bit(1), k.bit(0), k.bit(2)).expect("bits"))
        .collect();
    let dec = keys.iter().map(|k| flip_second_qubit(k.bit(0))).collect();
    QheScheme::new(
        "correlated-pad",
        3,
        enc,
        dec,
        sot_family_evaluated_as_ideal(),
    )
    .expect("valid scheme")
}

/// Key `(a1, b1, a2, b2)`: `Enc = X^{a1}Z^{b1} ⊗ X^{a2}Z^{b2}`, `Dec` flips output qubit 2 by `X^{a2}`.
pub fn scheme_independent_qotp() -> QheScheme {
    let keys = Key::all(4);
    let enc = keys
        .iter()
        .map(|k| pauli_pad(k.bit(0), k.bit(1), k.bit(2), k.bit(3)).expect("bits"))
        .collect();
    let dec = keys.iter().map(|k| flip_second_qubit(k.bit(2))).collect();
    QheScheme::new(
        "independent-qotp",
        4,
        enc,
        dec,
        sot_family_evaluated_as_ideal(),
    )
    .expect("valid scheme")
}

pub fn scheme_by_name(name: &str) -> Result<QheScheme> {
    match name {
        "trivial" => Ok(scheme_trivial()),
        "correlated-pad" => Ok(scheme_correlated_pad()),
        "independent-qotp" => Ok(scheme_independent_qotp()),
        other => Err(Error::UnknownName(format!(
            "scheme '{other}' (known: {})",
            SCHEME_NAMES.join(", ")
        ))),
    }
}

/// Description of the input, key and channel attaining a reported value.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Witness {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub channel: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub key: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

/// A value attained on the recorded witness.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Certified {
    pub value: f64,
    pub witness: Witness,
}

/// Tie margin: later candidates must beat the incumbent by this much.
const TIE: f64 = 1e-12;

fn better(best: &Option<Certified>, value: f64) -> bool {
    best.as_ref().is_none_or(|b| value > b.value + TIE)
}

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn two_qubit_labelled_states() -> Vec<(String, Vec<C64>)> {
    let z = c(0.0);
    let h = c(FRAC_1_SQRT_2);
    let mut out: Vec<(String, Vec<C64>)> = (0..4)
        .map(|k| {
            let mut v = vec![z; 4];
            v[k] = c(1.0);
            (format!("|{},{}>", k >> 1, k & 1), v)
        })
        .collect();
    out.push(("|Phi+>".into(), vec![h, z, z, h]));
    out.push(("|Phi->".into(), vec![h, z, z, -h]));
    out.push(("|Psi+>".into(), vec![z, h, h, z]));
    out.push(("|Psi->".into(), vec![z, h, -h, z]));
    out
}

/// Correctness candidates on `A R_A` (two plus two qubits): computational-basis
/// inputs and Bell states on `A` with the reference in `|0,0⟩`, the state
/// maximally entangled across `A:R_A`, and seeded Haar-random states.
pub fn correctness_inputs() -> Vec<(String, PureState)> {
    let shape = RegisterShape::qubits(4);
    let ref0 = [c(1.0), c(0.0), c(0.0), c(0.0)];
    let mut out: Vec<(String, PureState)> = two_qubit_labelled_states()
        .into_iter()
        .map(|(label, v)| {
            let full: Vec<C64> = v
                .iter()
                .flat_map(|a| ref0.iter().map(move |r| a * r))
                .collect();
            (label, PureState::new(full, shape.clone()).expect("unit"))
        })
        .collect();
    let omega: Vec<C64> = (0..16)
        .map(|k| if k / 4 == k % 4 { c(0.5) } else { c(0.0) })
        .collect();
    out.push((
        "|Omega> on A:R_A".into(),
        PureState::new(omega, shape.clone()).expect("unit"),
    ));
    let mut rng = ChaCha8Rng::seed_from_u64(CANDIDATE_SEED);
    for k in 0..RANDOM_CORRECTNESS_INPUTS {
        out.push((
            format!("random #{k}"),
            random::pure_state(shape.clone(), &mut rng),
        ));
    }
    out
}

/// `max Δ((Dec_k F̂ Enc_k ⊗ id)[ψ], (F ⊗ id)[ψ])` over family, keys and
/// [`correctness_inputs`].
pub fn correctness_eps(s: &QheScheme) -> Result<Certified> {
    check_two_qubit_plaintexts(s)?;
    let reference = RegisterShape::qubits(2);
    let inputs = correctness_inputs();
    let mut best: Option<Certified> = None;
    for member in s.family() {
        let ideal = member.ideal.extend(&reference);
        let ideal_out: Vec<DensityState> = inputs
            .iter()
            .map(|(_, p)| ideal.apply_pure(p))
            .collect::<Result<_>>()?;
        for k in s.keys() {
            let actual = s.pipeline(member, k).extend(&reference);
            for ((label, psi), want) in inputs.iter().zip(&ideal_out) {
                let d = trace_distance(&actual.apply_pure(psi)?, want)?;
                if better(&best, d) {
                    best = Some(Certified {
                        value: d,
                        witness: Witness {
                            channel: Some(member.label.clone()),
                            key: Some(k.to_string()),
                            input: Some(label.clone()),
                            detail: None,
                        },
                    });
                }
            }
        }
    }
    Ok(best.expect("nonempty candidate set"))
}

fn check_two_qubit_plaintexts(s: &QheScheme) -> Result<()> {
    if s.input_shape() != &RegisterShape::qubits(2) {
        return Err(Error::Precondition(
            "candidate sets are defined for two-qubit plaintexts".into(),
        ));
    }
    Ok(())
}

/// Data-privacy candidate pairs on `A`: the two plaintexts `|0,0⟩`, `|1,0⟩` used
/// by the OT construction first, then every other pair of basis and Bell
/// states, then seeded Haar-random pairs.
pub fn privacy_pairs() -> Vec<((String, PureState), (String, PureState))> {
    let shape = RegisterShape::qubits(2);
    let fixed: Vec<(String, PureState)> = two_qubit_labelled_states()
        .into_iter()
        .map(|(l, v)| (l, PureState::new(v, shape.clone()).expect("unit")))
        .collect();
    let mut out = vec![(fixed[0].clone(), fixed[2].clone())];
    for i in 0..fixed.len() {
        for j in i + 1..fixed.len() {
            if (i, j) != (0, 2) {
                out.push((fixed[i].clone(), fixed[j].clone()));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(CANDIDATE_SEED ^ 0xD);
    for k in 0..RANDOM_PRIVACY_PAIRS {
        let a = random::pure_state(shape.clone(), &mut rng);
        let b = random::pure_state(shape.clone(), &mut rng);
        out.push(((format!("random #{k}a"), a), (format!("random #{k}b"), b)));
    }
    out
}

/// `max Δ(E_k Enc_k[ρ], E_k Enc_k[ρ'])` over [`privacy_pairs`].
pub fn data_privacy_eps(s: &QheScheme) -> Result<Certified> {
    check_two_qubit_plaintexts(s)?;
    let mut best: Option<Certified> = None;
    for ((la, a), (lb, b)) in privacy_pairs() {
        let d = trace_distance(
            &s.averaged_ciphertext(&a.density())?,
            &s.averaged_ciphertext(&b.density())?,
        )?;
        if better(&best, d) {
            best = Some(Certified {
                value: d,
                witness: Witness {
                    input: Some(format!("{la} vs {lb}")),
                    ..Witness::default()
                },
            });
        }
    }
    Ok(best.expect("nonempty candidate set"))
}

/// Hypothesis-testing simulator value `max_F Tr((I − M_F) F(|ψ'⟩⟨ψ'|))`.
///
/// `psi_prime` lives on the plaintext registers followed by any reference; the
/// POVM acts on the ideal output registers followed by the same reference and is
/// keyed by family labels.
pub fn circuit_privacy_ub(
    s: &QheScheme,
    psi_prime: &PureState,
    povm: &Povm<String>,
) -> Result<f64> {
    let mut keys = povm.keys();
    keys.sort();
    let mut labels: Vec<String> = s.family().iter().map(|m| m.label.clone()).collect();
    labels.sort();
    if keys != labels {
        return Err(Error::Precondition(
            "measurement outcomes must be the family labels".into(),
        ));
    }
    let reference = reference_shape(psi_prime.shape(), s.input_shape())?;
    let mut worst: f64 = 0.0;
    for m in s.family() {
        let out = m.ideal.extend(&reference).apply_pure(psi_prime)?;
        if povm.shape().total() != out.dim() {
            return Err(Error::Dimension(
                "measurement does not act on the ideal output".into(),
            ));
        }
        let hit = (povm.get(&m.label).expect("keys checked") * out.mat())
            .trace()
            .re;
        worst = worst.max(clip_probability(1.0 - hit)?);
    }
    Ok(worst)
}

fn reference_shape(full: &RegisterShape, plain: &RegisterShape) -> Result<RegisterShape> {
    let k = plain.len();
    if full.len() < k || &full.select(&(0..k).collect::<Vec<_>>())? != plain {
        return Err(Error::Dimension(
            "state must start with the plaintext registers".into(),
        ));
    }
    full.select(&(k..full.len()).collect::<Vec<_>>())
}

/// `ψ' = |0,0⟩|0,0⟩` and `M_(x0,x1) = I ⊗ ½|x0⟩⟨x0| ⊗ I_R`.
pub fn corollary2_witness() -> (PureState, Povm<String>) {
    let psi = PureState::basis(RegisterShape::qubits(4), 0).expect("in range");
    let elements = SOT_LABELS
        .iter()
        .map(|&(x0, x1)| {
            let proj = if x0 == 0 { [0.5, 0.0] } else { [0.0, 0.5] };
            let m = kron(
                &kron(
                    &ComplexMatrix::identity(2),
                    &ComplexMatrix::diag_real(&proj),
                ),
                &ComplexMatrix::identity(4),
            );
            (sot_label(x0, x1), m)
        })
        .collect();
    (
        psi,
        Povm::new(elements, RegisterShape::qubits(4)).expect("valid measurement"),
    )
}

/// `ψ' = |0…0⟩` and the uninformative measurement `I/|F|`.
pub fn uniform_witness(s: &QheScheme) -> (PureState, Povm<String>) {
    let shape = s.input_shape().clone();
    let psi = PureState::basis(shape.clone(), 0).expect("in range");
    let out = s.family()[0].ideal.out_shape().clone();
    let w = 1.0 / s.family().len() as f64;
    let elements = s
        .family()
        .iter()
        .map(|m| {
            (
                m.label.clone(),
                ComplexMatrix::identity(out.total()).scale_real(w),
            )
        })
        .collect();
    (psi, Povm::new(elements, out).expect("valid measurement"))
}

/// Identity-simulator bound `max_F min(1, d · Δ(J(F̂), J(F)))` with `J` the
/// normalized Choi state and `d` the input dimension (the diamond distance is at
/// most `d` times the Choi trace distance). `None` if `F̂` and `F` act on
/// different spaces.
pub fn identity_simulator_bound(s: &QheScheme) -> Result<Option<f64>> {
    let mut worst: f64 = 0.0;
    for m in s.family() {
        if m.ideal.in_shape() != m.evaluated.in_shape()
            || m.ideal.out_shape() != m.evaluated.out_shape()
        {
            return Ok(None);
        }
        let d = m.ideal.in_shape().total() as f64;
        let dist = crate::channelzoo::choi_distance(&m.ideal, &m.evaluated)?;
        worst = worst.max((d * dist).min(1.0));
    }
    Ok(Some(worst))
}

/// Smallest certified upper bound on `eps_c` over the available simulators.
pub fn circuit_privacy_ub_search(s: &QheScheme) -> Result<Certified> {
    let mut best: Option<Certified> = None;
    let mut consider = |value: f64, detail: &str| {
        if best.as_ref().is_none_or(|b| value < b.value - TIE) {
            best = Some(Certified {
                value,
                witness: Witness {
                    detail: Some(detail.into()),
                    ..Witness::default()
                },
            });
        }
    };
    if let Some(v) = identity_simulator_bound(s)? {
        consider(v, "simulator psi'=psi, N=id (Choi bound)");
    }
    let (psi, povm) = uniform_witness(s);
    consider(
        circuit_privacy_ub(s, &psi, &povm)?,
        "hypothesis testing, uniform POVM",
    );
    if s.family().len() == 4
        && s.family().iter().all(|m| m.sot.is_some())
        && s.input_shape() == &RegisterShape::qubits(2)
    {
        let (psi, povm) = corollary2_witness();
        consider(
            circuit_privacy_ub(s, &psi, &povm)?,
            "hypothesis testing, psi'=|0,0>|0,0>, M=I(x)1/2|x0><x0|",
        );
    }
    Ok(best.expect("at least one simulator"))
}

/// PGM attack on the four outputs `F̂_(x0,x1)[|ψ⟩⟨ψ|]`; returns the success
/// probability. `psi` lives on the ciphertext registers followed by any reference.
pub fn sot_pgm_success(s: &QheScheme, psi: &PureState) -> Result<f64> {
    let reference = reference_shape(psi.shape(), s.cipher_shape())?;
    let mut states = Vec::with_capacity(4);
    for &(x0, x1) in &SOT_LABELS {
        let m = s
            .sot_member(x0, x1)
            .ok_or_else(|| Error::Precondition("family lacks a strong OT channel".into()))?;
        states.push((0.25, m.evaluated.extend(&reference).apply_pure(psi)?));
    }
    Ok(pgm(&states)?.success)
}

/// `max(0, success − ½)` for the PGM attack with probe `psi`.
pub fn circuit_privacy_lb(s: &QheScheme, psi: &PureState) -> Result<f64> {
    Ok((sot_pgm_success(s, psi)? - 0.5).max(0.0))
}

/// Probes on `Â R_Â` for the circuit-privacy attack: honest encryptions of
/// `|i,0⟩` under every key (purified), computational-basis states, Bell probes
/// entangling one ciphertext qubit with the reference, the maximally entangled
/// state, and seeded Haar-random states.
pub fn attack_probes(s: &QheScheme) -> Result<Vec<(String, PureState)>> {
    let shape = RegisterShape::qubits(4);
    let mut out = Vec::new();
    for k in s.keys() {
        for i in 0..2usize {
            let plain = DensityState::basis(RegisterShape::qubits(2), i << 1)?;
            let cipher =
                DensityState::trusted(s.enc(k).apply_matrix(plain.mat()), s.cipher_shape().clone());
            out.push((format!("Enc_{k}(|{i},0>)"), crate::qstate::purify(&cipher)));
        }
    }
    let z = c(0.0);
    let h = c(FRAC_1_SQRT_2);
    for (label, v) in two_qubit_labelled_states().into_iter().take(4) {
        let full: Vec<C64> = v
            .iter()
            .flat_map(|a| (0..4).map(move |r| if r == 0 { *a } else { z }))
            .collect();
        out.push((label, PureState::new(full, shape.clone())?));
    }
    // Bell pair between ciphertext qubit q and reference qubit q, other qubits |0>
    for q in 0..2usize {
        let mut v = vec![z; 16];
        let bit = |j: usize| 1usize << (3 - j);
        v[0] = h;
        v[bit(q) | bit(2 + q)] = h;
        out.push((
            format!("Bell probe on cipher qubit {}", q + 1),
            PureState::new(v, shape.clone())?,
        ));
    }
    let omega: Vec<C64> = (0..16)
        .map(|k| if k / 4 == k % 4 { c(0.5) } else { z })
        .collect();
    out.push((
        "|Omega> on A^:R".into(),
        PureState::new(omega, shape.clone())?,
    ));
    let mut rng = ChaCha8Rng::seed_from_u64(CANDIDATE_SEED ^ 0xC);
    for k in 0..RANDOM_PROBES {
        out.push((
            format!("random #{k}"),
            random::pure_state(shape.clone(), &mut rng),
        ));
    }
    Ok(out)
}

/// Best PGM attack over [`attack_probes`]: the success probability and its probe.
pub fn best_sot_pgm_attack(s: &QheScheme) -> Result<Certified> {
    let mut best: Option<Certified> = None;
    for (label, psi) in attack_probes(s)? {
        let p = sot_pgm_success(s, &psi)?;
        if better(&best, p) {
            best = Some(Certified {
                value: p,
                witness: Witness {
                    input: Some(label),
                    ..Witness::default()
                },
            });
        }
    }
    Ok(best.expect("nonempty probe set"))
}

/// Lower bound on `eps_c` from the best PGM attack.
pub fn circuit_privacy_lb_search(s: &QheScheme) -> Result<Certified> {
    let attack = best_sot_pgm_attack(s)?;
    Ok(Certified {
        value: (attack.value - 0.5).max(0.0),
        witness: attack.witness,
    })
}

/// `eps_d + eps_c_ub + 4√eps` against ½.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Corollary1Report {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl Corollary1Report {
    pub fn new(eps: f64, eps_d: f64, eps_c_ub: f64) -> Self {
        let lhs = eps_d + eps_c_ub + 4.0 * eps.sqrt();
        Self {
            lhs,
            rhs: 0.5,
            holds: lhs >= 0.5 - 1e-9,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Provenance {
    pub eps: Witness,
    pub eps_d: Witness,
    pub eps_c_lb: Witness,
    pub eps_c_ub: Witness,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SchemeMetrics {
    pub scheme: String,
    pub eps: f64,
    pub eps_d: f64,
    pub eps_c_lb: f64,
    pub eps_c_ub: f64,
    pub corollary1: Corollary1Report,
    pub provenance: Provenance,
}

/// All metrics of a scheme; fails if the circuit-privacy bracket is inverted.
pub fn metrics(s: &QheScheme) -> Result<SchemeMetrics> {
    let eps = correctness_eps(s)?;
    let eps_d = data_privacy_eps(s)?;
    let lb = circuit_privacy_lb_search(s)?;
    let ub = circuit_privacy_ub_search(s)?;
    if lb.value > ub.value + 1e-9 {
        return Err(Error::Precondition(format!(
            "circuit-privacy bounds inverted: lb {} > ub {}",
            lb.value, ub.value
        )));
    }
    Ok(SchemeMetrics {
        scheme: s.name().to_string(),
        eps: eps.value,
        eps_d: eps_d.value,
        eps_c_lb: lb.value,
        eps_c_ub: ub.value,
        corollary1: Corollary1Report::new(eps.value, eps_d.value, ub.value),
        provenance: Provenance {
            eps: eps.witness,
            eps_d: eps_d.witness,
            eps_c_lb: lb.witness,
            eps_c_ub: ub.witness,
        },
    })
}

/// Validity spot check: every channel of the scheme has a positive Choi state
/// and is trace preserving.
pub fn check_channels(s: &QheScheme) -> Result<()> {
    let all = s
        .enc
        .iter()
        .chain(&s.dec)
        .chain(s.family.iter().flat_map(|m| [&m.ideal, &m.evaluated]));
    for ch in all {
        if ch.completeness_deviation() > crate::qstate::COMPLETENESS_TOL {
            return Err(Error::InvalidChannel("not trace preserving".into()));
        }
        if crate::channelzoo::choi(ch).min_eigenvalue() < -STATE_TOL {
            return Err(Error::InvalidChannel("Choi state not positive".into()));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests;
