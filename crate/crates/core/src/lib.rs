//! Desk-scale simulation of quantum homomorphic encryption (QHE) schemes and the
//! oblivious-transfer (OT) protocols built from them.
//!
//! The crate is layered bottom-up:
//!
//! * [`matcore`] dense complex linear algebra (dimension ≤ 64),
//! * [`qstate`] states, channels, measurements and distance measures,
//! * [`channelzoo`] Paulis, pads and the strong OT channels,
//! * [`qhe`] schemes and their correctness / privacy metrics,
//! * [`otproto`] OT state machines and reductions,
//! * [`attacks`] cheating strategies and bound certification.
//!
//! All numerics are deterministic: the same inputs and seeds produce bit-identical
//! floating-point results.

pub mod attacks;
pub mod channelzoo;
pub mod matcore;
pub mod otproto;
pub mod qhe;
pub mod qstate;

pub use num_complex::Complex64 as C64;

use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),
    #[error("matrix is not positive semidefinite (eigenvalue {0:e})")]
    NotPsd(f64),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid channel: {0}")]
    InvalidChannel(String),
    #[error("invalid measurement: {0}")]
    InvalidPovm(String),
    #[error("invalid protocol instance: {0}")]
    InvalidInstance(String),
    #[error("unknown name: {0}")]
    UnknownName(String),
}

pub type Result<T> = std::result::Result<T, Error>;
