//! Spectral machinery for discrete Schrödinger operators whose potentials
//! are read along orbits of a subshift of finite type.
//!
//! The crate provides:
//!
//! - subshifts of finite type with periodic-orbit enumeration and splicing
//!   ([`symbolic`]);
//! - stationary Markov measures with seeded orbit sampling ([`measure`]);
//! - the SL(2,ℝ) transfer cocycle: renormalized products, Lyapunov-exponent
//!   estimation, holonomies and elliptic fixed points ([`cocycle`]);
//! - exact periodic-orbit discriminants, spectral bands and punctured band
//!   unions with an interval-set algebra ([`spectra`], [`poly`],
//!   [`intervals`]);
//! - Lyapunov-zero scanning, the removable/unremovable classification, the
//!   interval functional J and embedding monotonicity experiments
//!   ([`zeros`]);
//! - configuration parsing and deterministic report emission for the CLI
//!   ([`config`], [`report`]).

pub mod cocycle;
pub mod config;
pub mod error;
pub mod intervals;
pub mod measure;
pub mod poly;
pub mod report;
pub mod spectra;
pub mod symbolic;
pub mod zeros;

pub use error::{Error, Result};
