//! Standard OT from a QHE scheme delegating the strong OT channels.
//!
//! Alice encrypts `|i,0⟩` under a fresh key, Bob evaluates `F̂_(x0,x1)` and
//! returns the ciphertext, Alice decrypts and measures `{M_x}`, the Helstrom
//! measurement between the two possible ideal outputs.

use super::{check_bits, pick, AliceOutput, BobOutput, Message, OtOutcome, StandardOt, Transcript};
use crate::channelzoo::Bit;
use crate::matcore::RegisterShape;
use crate::qhe::QheScheme;
use crate::qstate::{helstrom, measure, DensityState, Povm};
use crate::{Error, Result};
use rand::{Rng, RngCore};

fn plaintext(i: Bit) -> DensityState {
    DensityState::basis(RegisterShape::qubits(2), usize::from(i) << 1).expect("in range")
}

/// `{M_0, M_1}` separating `F_(0,0)(|i,0⟩⟨i,0|)` from `F_(1,1)(|i,0⟩⟨i,0|)`.
pub fn protocol4_measurement(s: &QheScheme, i: Bit) -> Result<Povm<u8>> {
    check_bits(&[i])?;
    let member = |x: Bit| {
        s.sot_member(x, x).ok_or_else(|| {
            Error::Precondition("scheme must delegate the strong OT channels".into())
        })
    };
    let out_shape = member(0)?.ideal.out_shape().clone();
    let out = |x: Bit| -> Result<DensityState> {
        DensityState::new(
            member(x)?.ideal.apply_matrix(plaintext(i).mat()),
            out_shape.clone(),
        )
    };
    Ok(helstrom(&out(0)?, &out(1)?)?.povm)
}

fn decrypted_output(
    s: &QheScheme,
    k: crate::qhe::Key,
    i: Bit,
    x0: Bit,
    x1: Bit,
) -> Result<DensityState> {
    let member = s
        .sot_member(x0, x1)
        .ok_or_else(|| Error::Precondition("scheme must delegate the strong OT channels".into()))?;
    let out = s.pipeline(member, k).apply_matrix(plaintext(i).mat());
    DensityState::new(out, member.ideal.out_shape().clone())
}

/// Exact `Pr[x̂ = x_i]` averaged over keys.
pub fn honest_success(s: &QheScheme, i: Bit, x0: Bit, x1: Bit) -> Result<f64> {
    check_bits(&[i, x0, x1])?;
    let povm = protocol4_measurement(s, i)?;
    let want = pick(x0, x1, i);
    let keys = s.keys();
    let mut p = 0.0;
    for &k in &keys {
        p += measure(&povm, &decrypted_output(s, k, i, x0, x1)?)?[&want];
    }
    Ok(p / keys.len() as f64)
}

/// Honest-run inputs `(i, x0, x1)`.
pub type OtInputs = (Bit, Bit, Bit);

/// `((i, x0, x1), Pr[x̂ = x_i])` for all eight inputs.
pub fn honest_success_table(s: &QheScheme) -> Result<Vec<(OtInputs, f64)>> {
    let mut out = Vec::with_capacity(8);
    for i in 0..2 {
        for x0 in 0..2 {
            for x1 in 0..2 {
                out.push(((i, x0, x1), honest_success(s, i, x0, x1)?));
            }
        }
    }
    Ok(out)
}

/// Completeness error of the induced OT: `max Pr[x̂ ≠ x_i]`.
pub fn induced_delta(s: &QheScheme) -> Result<f64> {
    Ok(honest_success_table(s)?
        .iter()
        .map(|(_, p)| 1.0 - p)
        .fold(0.0, f64::max))
}

fn sample(dist: &std::collections::BTreeMap<u8, f64>, rng: &mut dyn RngCore) -> Bit {
    let u: f64 = rng.random();
    if u < dist[&0] {
        0
    } else {
        1
    }
}

/// One sampled run.
pub fn ot_from_qhe(
    s: &QheScheme,
    i: Bit,
    x0: Bit,
    x1: Bit,
    rng: &mut dyn RngCore,
) -> Result<OtOutcome> {
    Ok(protocol4_transcript(s, i, x0, x1, false, rng)?.0)
}

/// One sampled run and its two messages (ciphertext to Bob, evaluated
/// ciphertext to Alice).
pub fn protocol4_transcript(
    s: &QheScheme,
    i: Bit,
    x0: Bit,
    x1: Bit,
    include_payload: bool,
    rng: &mut dyn RngCore,
) -> Result<(OtOutcome, Transcript)> {
    check_bits(&[i, x0, x1])?;
    let member = s
        .sot_member(x0, x1)
        .ok_or_else(|| Error::Precondition("scheme must delegate the strong OT channels".into()))?;
    let k = s.key_gen(rng);
    let sigma = DensityState::new(
        s.enc(k).apply_matrix(plaintext(i).mat()),
        s.cipher_shape().clone(),
    )?;
    let theta = DensityState::new(
        member.evaluated.apply_matrix(sigma.mat()),
        member.evaluated.out_shape().clone(),
    )?;
    let out = DensityState::new(
        s.dec(k).apply_matrix(theta.mat()),
        member.ideal.out_shape().clone(),
    )?;
    let xhat = sample(&measure(&protocol4_measurement(s, i)?, &out)?, rng);
    let mut t = Transcript::new();
    t.push(Message::new(1, "alice", &sigma, include_payload));
    t.push(Message::new(2, "bob", &theta, include_payload));
    Ok((
        OtOutcome {
            alice: AliceOutput::Bit(xhat),
            bob: BobOutput::Accept,
        },
        t,
    ))
}

/// Standard OT runner backed by a QHE scheme.
#[derive(Clone, Debug)]
pub struct QheOt {
    pub scheme: QheScheme,
}

impl StandardOt for QheOt {
    fn run(&self, i: Bit, x0: Bit, x1: Bit, rng: &mut dyn RngCore) -> Result<OtOutcome> {
        ot_from_qhe(&self.scheme, i, x0, x1, rng)
    }
}
