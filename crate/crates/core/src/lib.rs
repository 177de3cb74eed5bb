//! Analysis toolkit for two-mode Gaussian quantum states described by their
//! 4x4 covariance matrix (vacuum variance 1/2 convention).
//!
//! Provides symplectic invariants, physicality and purity tests, the
//! PHS / Duan / Reid entanglement criteria, a closed-form displaced-parity
//! CHSH function with analytic maximization, classification of the
//! purity-correlation plane, evolution under a lossy beam-splitter channel,
//! and a synthetic single-homodyne covariance-reconstruction pipeline.

pub mod bell;
pub mod channel;
pub mod cli;
pub mod criteria;
pub mod error;
pub mod gaussian;
pub mod homodyne;
pub mod numeric;
pub mod wigner;

pub use error::{Error, Result};
pub use gaussian::{CovarianceMatrix, StandardForm, SymplecticInvariants};
