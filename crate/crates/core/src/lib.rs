//! Numerical toolkit for locating the s-points of a compactly supported
//! potential `q` in three dimensions.
//!
//! Two independent computational routes are provided and cross-validate
//! each other:
//!
//! * a volume Nyström discretization of the zero-energy Lippmann–Schwinger
//!   equations ([`lse`]), on top of which q-harmonic polynomial bases are
//!   built and jet degeneration is tested ([`jets`]);
//! * a radial ODE pipeline ([`radial`]) with Kram determinants, the
//!   alternating zero-count sum rule, and partial-wave Levinson checks
//!   ([`scattering`]).
//!
//! The [`cli`] module drives batch runs from a config file and emits
//! deterministic JSON/CSV reports.

pub mod cli;
pub mod error;
pub mod geom;
pub mod jets;
pub mod lse;
pub mod poly;
pub mod potentials;
pub mod radial;
pub mod scattering;

pub use error::{Error, Result};
pub use potentials::{PotentialField, RadialProfile};
