//! Independent numerical checks: geometric grids, matrix discretizations of
//! composition operators, reproducing-kernel norms and the Laplace isometry.

mod grid;
mod kernel;
mod laplace;
mod matrix;

pub use grid::{build_grid, GridFunction, LogGrid};
pub use kernel::{kernel_norm, kernel_weak_null_check, KernelNorm};
pub use laplace::{laplace_isometry_check, laplace_transform, IsometryReport};
pub use matrix::{discretize, operator_norm, OperatorMatrix, OperatorTag, PowerOptions, PowerResult};
