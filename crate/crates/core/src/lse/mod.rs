//! Zero-energy Lippmann–Schwinger solver.
//!
//! The operator u(x) -> Integral of q(s) u(s) / (4 pi |x - s|) ds is
//! discretized by Nyström quadrature on the cell centers of a uniform
//! Cartesian grid intersected with the support ball. Solved node values
//! define a natural global interpolant, evaluable anywhere off the nodes,
//! which extends the solution exactly outside the support.

mod field;
mod grid;
mod kernel;

pub use field::{eval_batch, green_function, solve_field, FieldSolution, Incident};
pub use grid::{build_grid, VolumeGrid};
pub use kernel::{assemble_kernel, ConventionCheck, KernelOperator, SELF_CELL_MEAN_INV_R};
