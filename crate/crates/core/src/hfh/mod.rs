//! High-frequency homogenisation about standing waves at zone vertices.

mod analysis;
mod asymptotic;
mod dirac;
mod group;
pub mod ops;
mod report;
mod tensors;
mod tuning;

pub use analysis::{analyse_group, GroupAnalysis, HfhOptions, OracleLine, OracleReport};
pub use asymptotic::{AsymptoticBand, BranchModel};
pub use dirac::{dirac_dispersion, dirac_matrices, dirac_operator, DiracBranch, DiracModel};
pub use group::{cluster_range, locate_group, theta, StandingWaveGroup, CLUSTER_TOL};
pub use report::{ComplexMatrix, GroupReport, SCHEMA_VERSION};
pub use tensors::{
    classify, compute_p, compute_p_operator, compute_q, compute_t, directional_eigenvalues, first_order_rhs,
    hermitian_eigen, solve_first_order, solve_first_order_all, symmetrise, t_hat_operator, t_hat_raw,
    Classification, FirstOrderField, FirstOrderSolution, FirstOrderSolver, HfhTensors, CLASSIFY_TOL,
    COMPATIBILITY_TOL, DECOUPLE_TOL,
};
pub use tuning::{find_accidental_degeneracy, TuningParameter, TuningResult};
