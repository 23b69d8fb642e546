//! Optimal time-averaged spectral efficiency for broadcast links that mix
//! time sharing with two-layer hierarchical modulation.
//!
//! The crate is `no_std` (it needs `alloc`) and holds every algorithmic
//! piece:
//!
//! - [`constellation`]: QPSK, 8-PSK, 16-APSK and 32-APSK layouts, uniform and
//!   non-uniform, with their stream-1 / stream-2 bit split.
//! - [`capacity`]: per-stream AWGN mutual information and decoding thresholds,
//!   and the modcod table built from them.
//! - [`channel`]: parabolic spot-beam pattern, weather attenuation and
//!   receiver sampling.
//! - [`ratevectors`]: enumeration of achievable rate vectors.
//! - [`lp`]: the standard-form linear program and a revised simplex solver.
//! - [`baselines`]: reference time sharing and the pairing heuristic.
//! - [`sim`]: one trial of the beam experiment and sweep aggregation.
//!
//! File formats, configuration, threading and the command line live in the
//! companion `hmlp` crate.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod baselines;
pub mod capacity;
pub mod channel;
pub mod constellation;
pub mod lp;
pub mod ratevectors;
pub mod sim;

mod error;
mod math;

pub use error::{Error, Result};
