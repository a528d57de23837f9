//! Plane-wave Bloch eigenproblem: assembly, dense solve, band paths and
//! finite-difference derivative oracles.

mod bands;
mod basis;
mod fd;
mod mode;
mod operator;
mod solve;

pub use bands::{band_structure, write_band_csv, BandTable};
pub use basis::PlaneWaveBasis;
pub use fd::{fd_band_derivatives, fd_lines, stencil_directions, BranchDerivatives, FdLine, FdOptions, FdResult};
pub use mode::{FourierRule, PhysicsMode};
pub use operator::{frob_inner, hermiticity_residual, BlochOperator, Frames, OperatorPair};
pub use solve::{eigenvalues_pair, omega_of, pair_residual, solve_pair, BlochSolution, Eigenpairs, OMEGA_FLOOR};
