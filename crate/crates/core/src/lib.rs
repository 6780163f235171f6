//! Optical Bloch equations and Doppler-cooling observables for a three-level
//! ladder system with a metastable intermediate level.
//!
//! The system has a ground state `g`, a metastable state `m` and a short-lived
//! excited state `e`. A weak laser couples `g -> m` (Rabi frequency `omega_w`,
//! detuning `delta_w`) and a strong laser couples `m -> e` (`omega_st`,
//! `delta_st`); `e` decays at rate `gamma` into `g` and `m` with branching
//! ratio `beta_eg` / `1 - beta_eg`. The same machinery also covers the
//! conventional Lambda configuration where both lasers share the excited
//! state.
//!
//! The crate provides:
//!
//! * [`model`] — domain types, ion presets and construction of the Liouvillian
//!   (the 9x9 generator of the master equation), including Doppler-shifted
//!   detunings for a moving atom.
//! * [`steady_state`] — exact numerical steady state by a dense linear solve,
//!   a fixed-step RK4 time-evolution oracle, spectrum scans and peak/FWHM
//!   extraction.
//! * [`analytics`] — closed-form expressions: the exact excited-state
//!   population, light shift, corrected resonance, maximum population,
//!   optimal drive ratio and the limit/effective linewidths.
//! * [`cooling`] — radiative force, damping coefficient, momentum diffusion,
//!   Doppler limit temperature, capture-range curves and drive optimization.
//! * [`acceptance`] — the self-contained validation suite used by the CLI
//!   `verify` command and the `acceptance` integration test.
//!
//! All frequencies are angular frequencies in rad/s. User-facing interfaces
//! quote frequencies in MHz with the convention `x MHz == 2*pi*x*1e6 rad/s`
//! (i.e. the quoted number is `omega / 2 pi`), matching the usual
//! "gamma / 2 pi = 20 MHz" style of spectroscopy parameter tables.

pub mod acceptance;
pub mod analytics;
pub mod consts;
pub mod cooling;
pub mod error;
pub mod model;
pub mod optimize;
pub mod presets;
pub mod scan;
pub mod steady_state;

pub use error::Error;
pub use model::{build_generator, doppler_shift, effective_wavevector};
pub use model::{AtomSpec, DensityMatrix3, Generator, LaserDrive, Scheme};
pub use scan::{Column, PeakSummary, ScanResult};

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
