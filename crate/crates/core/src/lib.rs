//! Addressing a single spin qubit in a linear exchange-coupled array with a
//! global microwave drive.
//!
//! Qubit frequencies are grouped into bins of width δ and tuned to the bin
//! centers. A target is addressed with an eight-step sequence of bin-selective
//! rotations interleaved with exchange-based SWAPs, so that every other qubit
//! returns to its initial state. The crate covers the small-matrix algebra,
//! drive-parameter selection, SWAP synthesis from finite exchange, sequence
//! planning, the analytic and Monte Carlo fidelity models, and an exact
//! propagation oracle used to check them.
//!
//! The low-level algebra, drive and exchange code is generic over [`Real`]
//! (`f32`/`f64`); the aliases below fix it to `f64`, which the planning and
//! Monte Carlo layers use throughout.
//!
//! All frequencies are angular frequencies in rad/µs and all times are in µs.

// `!(x > 0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Fixed 4×4 index loops read better than zipped iterators.
#![allow(clippy::needless_range_loop)]

pub mod drive;
pub mod error;
pub mod fidelity;
pub mod oracle;
pub mod rng;
pub mod scalar;
pub mod sequencer;
pub mod spectrum;
pub mod su2;
pub mod swap_synth;
pub mod two_qubit;

pub use error::{Error, Result};
pub use scalar::Real;
pub use su2::Axis;

/// Single-qubit unitary in double precision.
pub type Unitary2 = su2::Mat2<f64>;
/// Single-qubit unitary in single precision.
pub type Unitary2F32 = su2::Mat2<f32>;
/// Two-qubit unitary in double precision.
pub type Unitary4 = two_qubit::Mat4<f64>;
/// Two-qubit unitary in single precision.
pub type Unitary4F32 = two_qubit::Mat4<f32>;
/// ZXZ Euler angles in double precision.
pub type EulerZXZ = su2::ZxzAngles<f64>;

pub use drive::{DriveAxis, DriveParams};
pub use fidelity::{Estimator, FidelityReport, McSettings, SweepPoint};
pub use oracle::{simulate_sequence_exact, verify_swap_plan, ExactSequenceResult, SwapMode};
pub use sequencer::{plan_sequence, SequenceOptions, SequencePlan};
pub use spectrum::{ArrayConfig, BinOccupancy, SpectrumParams};
pub use swap_synth::{ExchangeLink, SwapPlan};
