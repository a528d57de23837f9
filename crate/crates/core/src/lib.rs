//! Plane-wave Bloch eigensolver for periodic dielectrics, with high-frequency
//! homogenisation (HFH) of the standing waves at Brillouin-zone vertices.
//!
//! Lengths are measured in units of the half-pitch `l`, so the unit cell is
//! `[-1, 1]^d`, reciprocal vectors are `π·m` and frequencies are `Ω = ωl/c`.

pub mod bloch;
pub mod effmed;
pub mod error;
pub mod geom;
pub mod hfh;
pub mod lattice;
pub mod medium;
pub mod numfmt;
pub mod problem;

pub use error::{Error, Result};
pub use faer::c64;

pub use bloch::{
    band_structure, fd_band_derivatives, BandTable, BlochOperator, BlochSolution, FdOptions,
    FourierRule, PhysicsMode, PlaneWaveBasis,
};
pub use lattice::{ibz_path, ibz_vertices, BrillouinVertex, KPath, LatticeSpec, VertexLabel};
pub use medium::{CoefficientRole, Inclusion, MediumSpec, Shape};
pub use problem::Problem;
