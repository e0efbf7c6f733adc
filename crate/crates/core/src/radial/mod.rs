//! Radial pipeline: regular zero-energy solutions per angular channel,
//! node counts, Kram determinants with the alternating zero-count sum
//! rule, s-sphere radii, and the radial biharmonic companion field.
//!
//! Everything here is independent of the 3D Nyström route and serves as
//! its cross-check for radially symmetric potentials.

mod counts;
pub(crate) mod kram;
mod phi;
mod psi;
pub(crate) mod solution;
mod spheres;

pub use counts::{count_bound_states, ChannelCounts};
pub use kram::{
    jet_det_product, kram_det, verify_sum_rule, zero_count, KramTable, RadialChannels,
    SumRuleReport, ZeroCount,
};
pub use phi::{critical_coupling, radial_phi, RadialPhi};
pub use psi::{solve_psi_radial, PsiResidualReport, RadialPsi};
pub use solution::{integrate_regular, integrate_regular_with_step, RadialSolution};
pub use spheres::{find_s_spheres, SSphereReport, SphereRadius};
