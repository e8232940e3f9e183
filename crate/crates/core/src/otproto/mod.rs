//! Oblivious-transfer layer.
//!
//! Standard OT: Alice chooses `i`, Bob holds `(x0, x1)`, Alice learns `x_i`.
//! Semi-random OT: `i` is uniformly random and learned by Alice together with
//! `x_i`. Both flavors run as in-process state machines driven by a caller
//! supplied random source.

mod protocol1;
mod protocol4;
mod reductions;
mod transcript;

pub use protocol1::{
    bell_pair_instance, completeness_delta, leaky_rotation_instance, max_fidelity,
    no_encoding_instance, rotation_instance, run_protocol1_honest, swapped_outcome_instance,
    Completeness, FidelityPair, HonestRun, ProtocolOneInstance, Round, LEAKY_COUPLING,
};
pub use protocol4::{
    honest_success, honest_success_table, induced_delta, ot_from_qhe, protocol4_measurement,
    protocol4_transcript, OtInputs, QheOt,
};
pub use reductions::{
    protocol3_finish, srot_to_standard, srot_to_standard_traced, standard_to_srot, Protocol3Trace,
};
pub use transcript::{payload_digest, Message, Transcript};

use crate::channelzoo::Bit;
use crate::{Error, Result};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AliceOutput {
    /// Standard OT: the received bit.
    Bit(Bit),
    /// Semi-random OT: the random index and the received bit.
    Pair {
        index: Bit,
        bit: Bit,
    },
    Abort,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BobOutput {
    Accept,
    Abort,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct OtOutcome {
    pub alice: AliceOutput,
    pub bob: BobOutput,
}

impl OtOutcome {
    pub fn aborted() -> Self {
        Self {
            alice: AliceOutput::Abort,
            bob: BobOutput::Abort,
        }
    }

    pub fn is_abort(&self) -> bool {
        self.alice == AliceOutput::Abort || self.bob == BobOutput::Abort
    }
}

pub(crate) fn check_bits(bits: &[Bit]) -> Result<()> {
    if bits.iter().any(|&b| b > 1) {
        return Err(Error::Precondition("protocol inputs must be bits".into()));
    }
    Ok(())
}

fn pick(x0: Bit, x1: Bit, i: Bit) -> Bit {
    if i == 0 {
        x0
    } else {
        x1
    }
}

fn coin(rng: &mut dyn RngCore) -> Bit {
    rng.random_range(0..2u8)
}

pub trait StandardOt {
    fn run(&self, i: Bit, x0: Bit, x1: Bit, rng: &mut dyn RngCore) -> Result<OtOutcome>;
}

pub trait SemiRandomOt {
    fn run(&self, x0: Bit, x1: Bit, rng: &mut dyn RngCore) -> Result<OtOutcome>;
}

/// Perfect standard OT.
#[derive(Clone, Copy, Debug, Default)]
pub struct IdealStandardOt;

impl StandardOt for IdealStandardOt {
    fn run(&self, i: Bit, x0: Bit, x1: Bit, _rng: &mut dyn RngCore) -> Result<OtOutcome> {
        check_bits(&[i, x0, x1])?;
        Ok(OtOutcome {
            alice: AliceOutput::Bit(pick(x0, x1, i)),
            bob: BobOutput::Accept,
        })
    }
}

/// Standard OT whose output bit is flipped with probability `delta`.
#[derive(Clone, Copy, Debug)]
pub struct NoisyStandardOt {
    pub delta: f64,
}

impl StandardOt for NoisyStandardOt {
    fn run(&self, i: Bit, x0: Bit, x1: Bit, rng: &mut dyn RngCore) -> Result<OtOutcome> {
        check_bits(&[i, x0, x1])?;
        let flip = Bit::from(rng.random_bool(self.delta));
        Ok(OtOutcome {
            alice: AliceOutput::Bit(pick(x0, x1, i) ^ flip),
            bob: BobOutput::Accept,
        })
    }
}

/// Standard OT that always aborts.
#[derive(Clone, Copy, Debug, Default)]
pub struct AbortingStandardOt;

impl StandardOt for AbortingStandardOt {
    fn run(&self, i: Bit, x0: Bit, x1: Bit, _rng: &mut dyn RngCore) -> Result<OtOutcome> {
        check_bits(&[i, x0, x1])?;
        Ok(OtOutcome::aborted())
    }
}

/// Perfect semi-random OT.
#[derive(Clone, Copy, Debug, Default)]
pub struct IdealSemiRandomOt;

impl SemiRandomOt for IdealSemiRandomOt {
    fn run(&self, x0: Bit, x1: Bit, rng: &mut dyn RngCore) -> Result<OtOutcome> {
        NoisySemiRandomOt { delta: 0.0 }.run(x0, x1, rng)
    }
}

/// Semi-random OT whose output bit is flipped with probability `delta`.
#[derive(Clone, Copy, Debug)]
pub struct NoisySemiRandomOt {
    pub delta: f64,
}

impl SemiRandomOt for NoisySemiRandomOt {
    fn run(&self, x0: Bit, x1: Bit, rng: &mut dyn RngCore) -> Result<OtOutcome> {
        check_bits(&[x0, x1])?;
        let index = coin(rng);
        let flip = Bit::from(rng.random_bool(self.delta));
        Ok(OtOutcome {
            alice: AliceOutput::Pair {
                index,
                bit: pick(x0, x1, index) ^ flip,
            },
            bob: BobOutput::Accept,
        })
    }
}

/// Semi-random OT that always aborts.
#[derive(Clone, Copy, Debug, Default)]
pub struct AbortingSemiRandomOt;

impl SemiRandomOt for AbortingSemiRandomOt {
    fn run(&self, x0: Bit, x1: Bit, _rng: &mut dyn RngCore) -> Result<OtOutcome> {
        check_bits(&[x0, x1])?;
        Ok(OtOutcome::aborted())
    }
}

/// Random source of trial `trial`: stream `trial` of the generator seeded with `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Runs `trials` independent trials on worker threads; trial `t` draws from
/// [`trial_rng`]`(seed, t)` so the results do not depend on scheduling.
pub fn run_trials<T, F>(trials: usize, seed: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng) -> T + Sync,
{
    let workers = std::thread::available_parallelism()
        .map_or(1, |n| n.get())
        .min(trials.max(1));
    let chunk = trials.div_ceil(workers.max(1)).max(1);
    let f = &f;
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..trials)
            .step_by(chunk)
            .map(|start| {
                scope.spawn(move || {
                    (start..(start + chunk).min(trials))
                        .map(|t| f(&mut trial_rng(seed, t as u64)))
                        .collect::<Vec<T>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("trial worker panicked"))
            .collect()
    })
}
