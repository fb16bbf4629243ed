//! Quantum-enhanced phase estimation in collective spin systems with noisy
//! detectors.
//!
//! The crate is organised bottom-up:
//!
//! * [`spin`]: collective angular-momentum operators in the Dicke (Jz) basis,
//!   states, unitaries from Hermitian generators and Husimi Q data.
//! * [`prep`]: the input-state preparation schemes (OAT, TACT, TNT, cat,
//!   adiabatic QPT, QND mixed state, coherent spin state).
//! * [`metrology`]: phase encoding, measurement distributions with analytic
//!   phase derivatives, classical/quantum Fisher information, Hellinger distance.
//! * [`noise`]: the Gaussian detection-noise kernel and the noisy quantum
//!   Cramér-Rao bound.
//! * [`readout`]: interaction-based readouts (echo, flip, optimum) and
//!   φ-optimised Fisher information sweeps.
//! * [`optimizer`]: stochastic hill-climbing over Fisher-constrained
//!   distributions and random-distribution bound certification.
//! * [`csv`]: the CSV schemas every exporter writes and the matching readers.
//!
//! Basis convention: index `i` of every vector or matrix corresponds to the
//! Jz eigenvalue `m = i - N/2`, ascending.

pub mod csv;
pub mod error;
pub mod linalg;
pub mod metrology;
pub mod noise;
pub mod optimizer;
pub mod prep;
pub mod readout;
pub mod spin;

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = nalgebra::Complex<f64>;
/// Dense complex matrix.
pub type CMatrix = nalgebra::DMatrix<C64>;
/// Dense complex column vector.
pub type CVector = nalgebra::DVector<C64>;

/// Library version, recorded in every output sidecar.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
