use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::LatticeSpec;

/// Field formulation of the cell problem.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PhysicsMode {
    /// Out-of-plane magnetic field: stiffness ε⁻¹, mass 1.
    ScalarH3,
    /// Out-of-plane electric field: stiffness 1, mass ε.
    ScalarE3,
    /// Fibre problem with axial dependence `exp(iβx₃)`, `beta_l = βl`.
    Quasi2d { beta_l: f64 },
    Vector3d,
}

impl PhysicsMode {
    pub fn is_vector(&self) -> bool {
        matches!(self, PhysicsMode::Quasi2d { .. } | PhysicsMode::Vector3d)
    }

    pub fn components(&self) -> usize {
        if self.is_vector() {
            3
        } else {
            1
        }
    }

    pub fn beta(&self) -> f64 {
        match *self {
            PhysicsMode::Quasi2d { beta_l } => beta_l,
            _ => 0.0,
        }
    }

    pub fn validate(&self, lattice: &LatticeSpec) -> Result<()> {
        let need = match self {
            PhysicsMode::Vector3d => 3,
            _ => 2,
        };
        if lattice.dimension != need {
            return Err(Error::InvalidArgument(format!(
                "{self:?} needs a {need}D lattice, got {}D",
                lattice.dimension
            )));
        }
        if let PhysicsMode::Quasi2d { beta_l } = *self {
            if !(beta_l >= 0.0 && beta_l.is_finite()) {
                return Err(Error::InvalidArgument(format!("beta_l must be >= 0, got {beta_l}")));
            }
        }
        Ok(())
    }
}

/// How the stiffness coefficient's Fourier matrix is formed from the medium.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FourierRule {
    /// Toeplitz matrix of the ε⁻¹ coefficients.
    Direct,
    /// Inverse of the Toeplitz matrix of the ε coefficients.
    #[default]
    Inverse,
}
