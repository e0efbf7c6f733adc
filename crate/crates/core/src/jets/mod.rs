//! q-harmonic polynomial bases, jet matrices, and s-point detection.
//!
//! Order 1 detection tracks sign changes of the distorted wave Phi; order
//! m >= 2 tests jet degeneration: the (2m-2)-jets of the q-harmonic basis
//! span less than (2m-1)^2 dimensions exactly at the s-points, which the
//! scanner reads off the smallest singular value of the jet matrix.

mod basis;
mod harmonics;
mod jet;
mod scan;

pub use basis::{q_harmonic_basis, QHarmonicBasis};
pub use harmonics::{solid_harmonics, HarmonicBasis};
pub use jet::{d_k, jet_matrix, multi_indices, numerical_rank, JetMatrix, JetOptions};
pub use scan::{refine_phi_zero, scan_spoints, Candidate, ScanBox, ScanOptions, ScanReport};
