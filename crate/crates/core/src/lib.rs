//! Multi-user opportunistic scheduling with beamforming from a dumb
//! reconfigurable surface (RS).
//!
//! The crate is split along the simulation pipeline:
//!
//! - [`numerics`]: special functions, the noncentral chi-square law,
//!   Hermitian matrix helpers, quadrature and reproducible RNG streams.
//! - [`channel`]: RS line-of-sight vectors, per-user fading draws and the
//!   cascaded / composite / MISO channel gains.
//! - [`beamforming`]: random and deterministic RS phase schedules, dumb
//!   antenna weights at the base station and MISO channel whitening.
//! - [`scheduler`]: scenarios, max-SNR scheduling and the Monte-Carlo
//!   sum-rate estimators (single carrier, OFDMA, MISO).
//! - [`analytics`]: exact finite-K sum capacity, extreme-value machinery and
//!   the large-K scaling laws.
//! - [`harness`]: scenario builders, the geometric path-loss model, config
//!   files and the figure jobs that emit CSV.

pub mod analytics;
pub mod beamforming;
pub mod channel;
mod error;
pub mod harness;
pub mod numerics;
pub mod scheduler;

pub use error::{Error, Result};
