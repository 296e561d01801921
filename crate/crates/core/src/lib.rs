//! Gaussian-state quantum illumination for target detection.
//!
//! The crate models an entangled (two-mode squeezed vacuum) transmitter and a
//! coherent-state transmitter probing a lossy, noisy target channel, and
//! evaluates the receivers that decide between "target absent" (H₀) and
//! "target present" (H₁):
//!
//! - [`gaussian`]: moment calculus for multimode Gaussian states and
//!   Bogoliubov mode maps.
//! - [`scenario`]: hypothesis-conditioned return states.
//! - [`receivers`]: OPA, phase-conjugate and homodyne receivers with their
//!   thresholds, error probabilities and exponents.
//! - [`fock`]: a truncated Fock-space oracle computing the quantum Chernoff
//!   bound and receiver moments from first principles.
//! - [`special`]: tail-accurate erfc and incomplete beta.

pub mod error;
pub mod fock;
pub mod gaussian;
pub mod receivers;
pub mod scenario;
pub mod special;

pub use error::{Error, Result};
pub use scenario::{Hypothesis, ScenarioParams};
