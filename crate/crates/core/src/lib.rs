//! Polar codes over piecewise-stationary AWGN channels.
//!
//! This crate implements the full pipeline for evaluating polar codes on a
//! channel whose noise variance changes in random-length pieces and is
//! unknown at the receiver:
//!
//! * [`polar`] — the polar transform, Monte Carlo code construction and the
//!   transmission permutation,
//! * [`channel`] — the piecewise-stationary AWGN model and its capacity
//!   bounds,
//! * [`decoders`] — successive cancellation (SC) and iterative soft
//!   cancellation (SCAN) decoding with a CRC-free verification rule,
//! * [`estimation`] — per-iteration noise-variance re-estimation from
//!   decoder soft outputs (the SWSCAN sliding window and the W²SCAN
//!   weighted window),
//! * [`qp`] — the small constrained quadratic program that optimizes the
//!   window tap weights,
//! * [`sim`] — a deterministic Monte Carlo harness producing BER/FER/FPR
//!   tables.

pub mod channel;
pub mod decoders;
pub mod estimation;
pub mod polar;
pub mod qp;
pub mod sim;

mod seeding;

pub use channel::{ChannelParams, ChannelRealization};
pub use decoders::{DecodeOutcome, FnUpdater, LlrState, StateUpdater};
pub use estimation::{ChannelEstimator, EstimatorKind, ResidualSeries, TapWeights};
pub use polar::{CodeSpec, ReliabilityOrder};
pub use qp::QpProblem;
pub use sim::{DecoderKind, DecoderSetup, MetricsCell, SimConfig};

/// Finite surrogate for an infinite log-likelihood ratio.
///
/// Frozen-bit priors are pinned to `+LLR_MAX` and every message is clamped
/// to `[-LLR_MAX, LLR_MAX]`; `exp(LLR_MAX)` dwarfs any channel LLR that
/// arises at the simulated noise levels.
pub const LLR_MAX: f64 = 40.0;

/// Lower bound applied to noise-variance estimates before they are turned
/// into channel LLRs, guarding the division for zero-variance states.
pub const VAR_FLOOR: f64 = 1e-6;
