//! Numerics for wave–particle duality games on an n-port interferometer.
//!
//! A particle enters an n-arm interferometer whose arms carry path detectors;
//! the House applies one of n phase sets and flips a coin to decide which
//! sub-game is played: guess the particle's path (*ways*) or guess the phase
//! label (*phases*). This crate provides
//!
//! - [`numerics`]: a dense complex matrix kernel (Hermitian eigensolver, PSD
//!   square roots, polar factors) with explicit tolerances;
//! - [`interferometer`]: the states of the setup — inputs ρ, detector overlap
//!   Gram matrices S, phase sets, joint and reduced states, and the
//!   normalized coherence X with its phase-guessing bound X + 1/n;
//! - [`discrimination`]: minimum-error discrimination — the Gram-matrix
//!   maximization over the unitary fiber, the pretty-good measurement, a
//!   general fixed-point POVM solver, and an optimality certificate;
//! - [`duality`]: the trade-off bounds between path knowledge and phase
//!   knowledge, normalized (x, y) coordinates, and the physical region
//!   (triangle ∪ ellipse) with boundary parametrization and sweeps;
//! - [`game`]: seeded, schedule-independent Monte Carlo play of the combined
//!   game plus the unrestricted-Bob cheating demonstration;
//! - [`sample`]: reproducible random physical configurations;
//! - [`serial`]: structured-text (de)serialization of configurations and
//!   results with bit-exact float round-trips;
//! - [`verify`]: the invariant suites behind the CLI `verify` subcommand.

pub mod discrimination;
pub mod duality;
pub mod error;
pub mod game;
pub mod interferometer;
pub mod numerics;
pub mod sample;
pub mod serial;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64;

pub use discrimination::{Ensemble, GramFactor, Povm};
pub use duality::{DualityPoint, RegionSpec};
pub use game::{GameConfig, GameStats};
pub use interferometer::{DensityMatrix, DetectorGram, PhaseSet};
pub use numerics::{herm_eig, polar_unitary, psd_sqrt, ComplexMatrix, HermEig};
