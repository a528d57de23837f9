use serde::{Deserialize, Serialize};

use crate::bloch::{BlochOperator, FourierRule, PhysicsMode};
use crate::error::Result;
use crate::geom::Vec3;
use crate::lattice::LatticeSpec;
use crate::medium::MediumSpec;

/// Everything needed to build a cell operator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Problem {
    pub lattice: LatticeSpec,
    pub medium: MediumSpec,
    pub mode: PhysicsMode,
    /// Plane-wave cutoff per axis; defaults to 12 in 2D and 6 in 3D.
    #[serde(default)]
    pub cutoff: Option<usize>,
    #[serde(default)]
    pub rule: FourierRule,
}

impl Problem {
    pub fn new(lattice: LatticeSpec, medium: MediumSpec, mode: PhysicsMode) -> Self {
        Self { lattice, medium, mode, cutoff: None, rule: FourierRule::default() }
    }

    pub fn with_cutoff(mut self, cutoff: usize) -> Self {
        self.cutoff = Some(cutoff);
        self
    }

    pub fn with_rule(mut self, rule: FourierRule) -> Self {
        self.rule = rule;
        self
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff.unwrap_or(if self.lattice.dimension == 2 { 12 } else { 6 })
    }

    /// Copy with every default filled in.
    pub fn resolved(&self) -> Self {
        let mut p = self.clone();
        p.cutoff = Some(self.cutoff());
        p
    }

    /// Operator on a Γ-centred basis, or one centred on the vertex `k0`.
    pub fn operator(&self, k0: Option<Vec3>) -> Result<BlochOperator> {
        BlochOperator::with_cutoff(
            self.lattice,
            self.medium.clone(),
            self.mode,
            self.cutoff(),
            self.rule,
            k0,
        )
    }
}
