use super::{check_bits, coin, pick, AliceOutput, BobOutput, OtOutcome, SemiRandomOt, StandardOt};
use crate::channelzoo::Bit;
use crate::{Error, Result};
use rand::RngCore;
use serde::Serialize;

/// Every message of one standard-from-semi-random run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Protocol3Trace {
    /// Bob's masks `(y0, y1)`, his inputs to the sub-protocol.
    pub y: (Bit, Bit),
    pub sub: OtOutcome,
    /// `r = i ⊕ j`, sent by Alice.
    pub r: Option<Bit>,
    /// `s0 = x_r ⊕ y0`, `s1 = x_{r̄} ⊕ y1`, sent by Bob.
    pub s: Option<(Bit, Bit)>,
    pub outcome: OtOutcome,
}

/// Standard OT from semi-random OT.
pub fn srot_to_standard(
    ot: &dyn SemiRandomOt,
    i: Bit,
    x0: Bit,
    x1: Bit,
    rng: &mut dyn RngCore,
) -> Result<OtOutcome> {
    Ok(srot_to_standard_traced(ot, i, x0, x1, rng)?.outcome)
}

/// [`srot_to_standard`] exposing the classical messages.
pub fn srot_to_standard_traced(
    ot: &dyn SemiRandomOt,
    i: Bit,
    x0: Bit,
    x1: Bit,
    rng: &mut dyn RngCore,
) -> Result<Protocol3Trace> {
    check_bits(&[i, x0, x1])?;
    let y = (coin(rng), coin(rng));
    let sub = ot.run(y.0, y.1, rng)?;
    protocol3_finish(i, x0, x1, y, sub)
}

/// Classical part of the wrapper once Bob has chosen masks `y` and the
/// sub-protocol returned `sub`.
pub fn protocol3_finish(
    i: Bit,
    x0: Bit,
    x1: Bit,
    y: (Bit, Bit),
    sub: OtOutcome,
) -> Result<Protocol3Trace> {
    check_bits(&[i, x0, x1, y.0, y.1])?;
    let aborted = |sub| Protocol3Trace {
        y,
        sub,
        r: None,
        s: None,
        outcome: OtOutcome::aborted(),
    };
    let (j, yhat) = match sub.alice {
        AliceOutput::Pair { index, bit } => (index, bit),
        AliceOutput::Abort => return Ok(aborted(sub)),
        AliceOutput::Bit(_) => {
            return Err(Error::Precondition(
                "sub-protocol must be semi-random".into(),
            ))
        }
    };
    if sub.bob == BobOutput::Abort {
        return Ok(aborted(sub));
    }
    let r = i ^ j;
    let s = (pick(x0, x1, r) ^ y.0, pick(x0, x1, r ^ 1) ^ y.1);
    let out = pick(s.0, s.1, j) ^ yhat;
    Ok(Protocol3Trace {
        y,
        sub,
        r: Some(r),
        s: Some(s),
        outcome: OtOutcome {
            alice: AliceOutput::Bit(out),
            bob: BobOutput::Accept,
        },
    })
}

/// Semi-random OT from standard OT: Alice draws `i` herself.
pub fn standard_to_srot(
    ot: &dyn StandardOt,
    x0: Bit,
    x1: Bit,
    rng: &mut dyn RngCore,
) -> Result<OtOutcome> {
    check_bits(&[x0, x1])?;
    let i = coin(rng);
    let sub = ot.run(i, x0, x1, rng)?;
    let alice = match sub.alice {
        AliceOutput::Bit(bit) => AliceOutput::Pair { index: i, bit },
        AliceOutput::Abort => AliceOutput::Abort,
        AliceOutput::Pair { .. } => {
            return Err(Error::Precondition("sub-protocol must be standard".into()))
        }
    };
    Ok(OtOutcome {
        alice,
        bob: sub.bob,
    })
}
