//! Gates and channels: Paulis, CNOT, Pauli pads, dephasing, depolarising, and
//! the strong oblivious-transfer (SOT) channels.
//!
//! The SOT channel `F_(x0,x1)` measures its two input qubits in the
//! computational basis, obtaining `(i, i')`, and outputs a maximally mixed first
//! qubit together with the classical bit `x_{i⊕i'} ⊕ i'` on the second qubit.
//!
//! The Clifford form randomizes a reversible classical circuit with Pauli pads:
//!
//! ```text
//! wire 1: ─Z^{r3}──⊕──●──────────X^{r1}Z^{r2}─
//!                  │  │
//! wire 2: ─────────●──⊕──X^{x0}──Z^{r0}───────
//! ```
//!
//! The CNOT pair is present iff `x0 ≠ x1`. Averaging over `r0` dephases the
//! output wire, averaging over `(r1, r2)` depolarises the discarded wire, and
//! `Z^{r3}` acts on a wire whose phase is erased by either average.

use crate::matcore::{kron, ComplexMatrix, RegisterShape};
use crate::qstate::{apply_channel, trace_distance, DensityState, KrausChannel, PureState};
use crate::{Error, Result, C64};
use std::f64::consts::FRAC_1_SQRT_2;

pub type Bit = u8;

fn check_bits(bits: &[Bit]) -> Result<()> {
    match bits.iter().find(|&&b| b > 1) {
        Some(b) => Err(Error::Precondition(format!("{b} is not a bit"))),
        None => Ok(()),
    }
}

pub fn identity2() -> ComplexMatrix {
    ComplexMatrix::identity(2)
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).expect("2x2")
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0]).expect("2x2")
}

pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::from_vec(
        2,
        2,
        vec![
            C64::new(0.0, 0.0),
            C64::new(0.0, -1.0),
            C64::new(0.0, 1.0),
            C64::new(0.0, 0.0),
        ],
    )
    .expect("2x2")
}

pub fn hadamard() -> ComplexMatrix {
    ComplexMatrix::from_real(
        2,
        2,
        &[FRAC_1_SQRT_2, FRAC_1_SQRT_2, FRAC_1_SQRT_2, -FRAC_1_SQRT_2],
    )
    .expect("2x2")
}

/// `X^a Z^b`.
pub fn pad_gate(a: Bit, b: Bit) -> ComplexMatrix {
    let x = if a == 1 { pauli_x() } else { identity2() };
    let z = if b == 1 { pauli_z() } else { identity2() };
    &x * &z
}

/// Two-qubit CNOT; `control` and `target` are 0 (first qubit) or 1.
pub fn cnot(control: usize, target: usize) -> ComplexMatrix {
    assert!(
        control < 2 && target < 2 && control != target,
        "CNOT needs two distinct qubits"
    );
    ComplexMatrix::from_fn(4, 4, |r, c| {
        let bits = [c >> 1, c & 1];
        let mut out = bits;
        out[target] ^= bits[control];
        if r == (out[0] << 1 | out[1]) {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Completely dephasing qubit channel: `I` or `Z` uniformly at random.
pub fn dephasing() -> KrausChannel {
    KrausChannel::new(
        vec![
            identity2().scale_real(FRAC_1_SQRT_2),
            pauli_z().scale_real(FRAC_1_SQRT_2),
        ],
        RegisterShape::qubits(1),
        RegisterShape::qubits(1),
    )
    .expect("valid Kraus set")
}

/// Completely depolarising qubit channel: `I`, `Z`, `X`, `XZ` uniformly at random.
pub fn depolarising() -> KrausChannel {
    let ops = [(0, 0), (0, 1), (1, 0), (1, 1)]
        .iter()
        .map(|&(a, b)| pad_gate(a, b).scale_real(0.5))
        .collect();
    KrausChannel::new(ops, RegisterShape::qubits(1), RegisterShape::qubits(1))
        .expect("valid Kraus set")
}

/// Unitary channel `X^{a1}Z^{b1} ⊗ X^{a2}Z^{b2}`.
pub fn pauli_pad(a1: Bit, b1: Bit, a2: Bit, b2: Bit) -> Result<KrausChannel> {
    check_bits(&[a1, b1, a2, b2])?;
    KrausChannel::unitary(
        kron(&pad_gate(a1, b1), &pad_gate(a2, b2)),
        RegisterShape::qubits(2),
    )
}

/// The classical output `x_{i⊕i'} ⊕ i'` of `F_(x0,x1)` on basis input `|i, i'⟩`.
pub fn sot_output_bit(i: Bit, ip: Bit, x0: Bit, x1: Bit) -> Bit {
    let x = [x0, x1];
    x[usize::from(i ^ ip)] ^ ip
}

/// `F_(x0,x1)` as 16 Kraus operators `½ (P ⊗ I)|0, c⟩⟨i, i'|`, one per basis
/// input `(i, i')` and Pauli `P ∈ {I, X, Y, Z}`.
pub fn sot_channel_compact(x0: Bit, x1: Bit) -> Result<KrausChannel> {
    check_bits(&[x0, x1])?;
    let paulis = [identity2(), pauli_x(), pauli_y(), pauli_z()];
    let mut ops = Vec::with_capacity(16);
    for input in 0..4usize {
        let (i, ip) = ((input >> 1) as Bit, (input & 1) as Bit);
        let c = usize::from(sot_output_bit(i, ip, x0, x1));
        for p in &paulis {
            let mut k = ComplexMatrix::zeros(4, 4);
            for a in 0..2 {
                k[(a << 1 | c, input)] = p[(a, 0)] * 0.5;
            }
            ops.push(k);
        }
    }
    KrausChannel::new(ops, RegisterShape::qubits(2), RegisterShape::qubits(2))
}

/// Parameters of a strong OT Clifford: data bits and four randomization bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SotParams {
    pub x0: Bit,
    pub x1: Bit,
    pub r: [Bit; 4],
}

impl SotParams {
    pub fn new(x0: Bit, x1: Bit, r: [Bit; 4]) -> Result<Self> {
        check_bits(&[x0, x1])?;
        check_bits(&r)?;
        Ok(Self { x0, x1, r })
    }

    /// All 16 randomizations of `(x0, x1)`, `r` in lexicographic order.
    pub fn randomizations(x0: Bit, x1: Bit) -> Result<Vec<Self>> {
        (0..16u8)
            .map(|k| Self::new(x0, x1, [k >> 3 & 1, k >> 2 & 1, k >> 1 & 1, k & 1]))
            .collect()
    }
}

/// Variants of the Clifford circuit; the faulty one exists to exercise
/// verification failures.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CircuitVariant {
    Faithful,
    /// Drops the `Z^{r0}` pad on the output wire.
    OmitDephasingPad,
}

/// The unitary of the strong OT Clifford `F^{(r)}_(x0,x1)`.
pub fn sot_clifford_unitary(p: &SotParams, variant: CircuitVariant) -> ComplexMatrix {
    let [r0, r1, r2, r3] = p.r;
    let mut u = kron(&pad_gate(0, r3), &identity2());
    if p.x0 != p.x1 {
        u = &cnot(1, 0) * &u;
        u = &cnot(0, 1) * &u;
    }
    u = &kron(&identity2(), &pad_gate(p.x0, 0)) * &u;
    let r0 = if variant == CircuitVariant::OmitDephasingPad {
        0
    } else {
        r0
    };
    &kron(&pad_gate(r1, r2), &pad_gate(0, r0)) * &u
}

/// `F^{(r)}_(x0,x1)` as a single-Kraus channel.
pub fn sot_clifford(p: &SotParams) -> KrausChannel {
    KrausChannel::unitary(
        sot_clifford_unitary(p, CircuitVariant::Faithful),
        RegisterShape::qubits(2),
    )
    .expect("Clifford circuits are unitary")
}

/// Uniform average of the 16 randomized Cliffords of `(x0, x1)`.
pub fn sot_clifford_average(x0: Bit, x1: Bit, variant: CircuitVariant) -> Result<KrausChannel> {
    let ops = SotParams::randomizations(x0, x1)?
        .iter()
        .map(|p| sot_clifford_unitary(p, variant).scale_real(0.25))
        .collect();
    KrausChannel::new(ops, RegisterShape::qubits(2), RegisterShape::qubits(2))
}

/// Normalized Choi state `(ch ⊗ id)(|Ω⟩⟨Ω|)`; the reference copy of the input
/// registers comes after the output registers.
pub fn choi(ch: &KrausChannel) -> DensityState {
    let shape = ch.in_shape().concat(ch.in_shape());
    let d = ch.in_shape().total();
    let mut omega = vec![C64::new(0.0, 0.0); d * d];
    for j in 0..d {
        omega[j * d + j] = C64::new(1.0 / (d as f64).sqrt(), 0.0);
    }
    let state = PureState::new(omega, shape).expect("unit vector").density();
    let targets: Vec<usize> = (0..ch.in_shape().len()).collect();
    apply_channel(ch, &state, &targets).expect("shapes agree by construction")
}

/// Trace distance between the Choi states of two channels.
pub fn choi_distance(a: &KrausChannel, b: &KrausChannel) -> Result<f64> {
    if a.in_shape() != b.in_shape() || a.out_shape() != b.out_shape() {
        return Err(Error::Dimension("channels act on different spaces".into()));
    }
    trace_distance(&choi(a), &choi(b))
}

/// The four SOT labels in lexicographic order.
pub const SOT_LABELS: [(Bit, Bit); 4] = [(0, 0), (0, 1), (1, 0), (1, 1)];
