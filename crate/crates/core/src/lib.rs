//! Relative entropy of entanglement (REE) and closest separable states (CSS)
//! for two-qubit X-like states with z-directional Bloch vectors.
//!
//! The state family is
//!
//! ```text
//! ρ = ⎡A1  0         0        0 ⎤
//!     ⎢0   A2        D e^{iφ} 0 ⎥
//!     ⎢0   D e^{-iφ} A3       0 ⎥
//!     ⎣0   0         0        A4⎦
//! ```
//!
//! and is entangled exactly when `D² > A1 A4`. [`compute_ree`] returns the REE
//! in nats together with the CSS, and [`oracle::oracle_ree`] independently
//! minimizes `S(ρ‖σ)` over explicit mixtures of product states.
//!
//! ```
//! use xstate_ree::{compute_ree, Branch, NamedState};
//!
//! let rho = NamedState::Rains.x_params().unwrap();
//! let result = compute_ree(&rho).unwrap();
//! assert_eq!(result.branch, Branch::Theorem3);
//! assert!((result.css.unwrap().r1 - 1.0 / 6.0).abs() < 1e-9);
//! ```

pub mod cli;
pub mod error;
pub mod oracle;
pub mod qmath;
pub mod ree;
pub mod states;
pub mod tolerances;

pub use error::{Error, Result};
pub use qmath::{DensityMatrix, EigenSystem};
pub use ree::{compute_ree, compute_ree_with, Branch, CssSolution, ReeResult};
pub use states::{BlochZParams, NamedState, XStateParams};
pub use tolerances::Tolerances;
