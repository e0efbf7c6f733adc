//! Partial-wave scattering: spherical Bessel functions, phase shifts by
//! log-derivative matching at the support edge, unwrapped phase curves,
//! and per-channel Levinson checks with the total S-matrix index.

mod bessel;
mod levinson;
mod phase;

pub use bessel::{spherical_bessel, spherical_bessel_with_derivatives};
pub use levinson::{levinson_check, levinson_check_with_curves, ChannelLevinson, LevinsonReport};
pub use phase::{phase_curve, phase_shift, PhaseCurve};
