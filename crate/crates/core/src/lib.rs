//! Quasi-Lie brackets on quaternionic modules: cochain calculus, radial
//! homotopy, Neumann-series rigidification, bound verification and a
//! pseudospectral solver for the transport equation `∂ₜu + {u, ∂ₓu} = 0`.
//!
//! The numerical core is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix `f64`, which every report and the CLI use.

pub mod cochain;
pub mod constants;
pub mod error;
pub mod pde;
pub mod quaternion;
pub mod rigidify;
pub mod scalar;
pub mod verifier;

pub use error::{Error, Result};
pub use quaternion::{qconj_abs, qmul, right_action, sample_ball, vec_norm, BallMode, ModuleVector, Quaternion};
pub use scalar::Scalar;

pub type Quat = Quaternion<f64>;
pub type Vector = ModuleVector<f64>;
pub type Cochain64 = cochain::Cochain<f64>;
pub type Bracket64 = cochain::Bracket<f64>;

pub type Quat32 = Quaternion<f32>;
pub type Vector32 = ModuleVector<f32>;
