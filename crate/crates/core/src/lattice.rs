//! Square and cubic lattices, their irreducible Brillouin-zone vertices and k-paths.

use std::f64::consts::FRAC_PI_2;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{Vec3, ZERO};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSpec {
    pub dimension: usize,
    /// The half-pitch `l`. Only used to convert results back to physical units.
    #[serde(default = "one")]
    pub half_pitch: f64,
}

fn one() -> f64 {
    1.0
}

impl LatticeSpec {
    pub fn new(dimension: usize) -> Result<Self> {
        let l = Self { dimension, half_pitch: 1.0 };
        l.validate()?;
        Ok(l)
    }

    pub fn validate(&self) -> Result<()> {
        if !(2..=3).contains(&self.dimension) {
            return Err(Error::InvalidLattice(format!(
                "dimension must be 2 or 3, got {}",
                self.dimension
            )));
        }
        if !(self.half_pitch > 0.0 && self.half_pitch.is_finite()) {
            return Err(Error::InvalidLattice(format!(
                "half_pitch must be positive, got {}",
                self.half_pitch
            )));
        }
        Ok(())
    }

    /// Magnitude of the primitive reciprocal vectors in ξ-units.
    pub fn reciprocal_spacing(&self) -> f64 {
        std::f64::consts::PI
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VertexLabel {
    #[serde(rename = "G", alias = "Gamma", alias = "Γ")]
    Gamma,
    X,
    M,
    R,
}

impl VertexLabel {
    pub fn ascii(self) -> &'static str {
        match self {
            VertexLabel::Gamma => "G",
            VertexLabel::X => "X",
            VertexLabel::M => "M",
            VertexLabel::R => "R",
        }
    }

    fn antiperiodic_axes(self) -> usize {
        match self {
            VertexLabel::Gamma => 0,
            VertexLabel::X => 1,
            VertexLabel::M => 2,
            VertexLabel::R => 3,
        }
    }
}

impl fmt::Display for VertexLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            VertexLabel::Gamma => "Γ",
            other => other.ascii(),
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    Periodic,
    Antiperiodic,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BrillouinVertex {
    pub label: VertexLabel,
    /// Bloch vector; components beyond the lattice dimension are zero.
    pub k: Vec3,
    pub parity: Vec<Parity>,
}

impl BrillouinVertex {
    pub fn new(lattice: &LatticeSpec, label: VertexLabel) -> Result<Self> {
        let n = label.antiperiodic_axes();
        if n > lattice.dimension {
            return Err(Error::InvalidArgument(format!(
                "vertex {label} does not exist in {} dimensions",
                lattice.dimension
            )));
        }
        let mut k = ZERO;
        let mut parity = vec![Parity::Periodic; lattice.dimension];
        for i in 0..n {
            k[i] = FRAC_PI_2;
            parity[i] = Parity::Antiperiodic;
        }
        Ok(Self { label, k, parity })
    }
}

pub fn ibz_vertices(lattice: &LatticeSpec) -> Vec<BrillouinVertex> {
    let labels: &[VertexLabel] = if lattice.dimension == 2 {
        &[VertexLabel::Gamma, VertexLabel::X, VertexLabel::M]
    } else {
        &[VertexLabel::Gamma, VertexLabel::X, VertexLabel::M, VertexLabel::R]
    };
    labels
        .iter()
        .map(|&l| BrillouinVertex::new(lattice, l).expect("label valid for dimension"))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PathPoint {
    pub segment: usize,
    pub k: Vec3,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KPath {
    pub segments: Vec<(VertexLabel, VertexLabel)>,
    pub samples_per_segment: usize,
    /// Shared segment endpoints appear once, attributed to the earlier segment.
    pub points: Vec<PathPoint>,
}

pub fn ibz_path(lattice: &LatticeSpec, samples_per_segment: usize) -> Result<KPath> {
    use VertexLabel::*;
    if samples_per_segment < 2 {
        return Err(Error::InvalidArgument(format!(
            "samples_per_segment must be at least 2, got {samples_per_segment}"
        )));
    }
    let stops: &[VertexLabel] = if lattice.dimension == 2 {
        &[Gamma, X, M, Gamma]
    } else {
        &[Gamma, X, M, Gamma, R, X]
    };
    let segments: Vec<_> = stops.windows(2).map(|w| (w[0], w[1])).collect();
    let mut points = Vec::new();
    for (s, &(a, b)) in segments.iter().enumerate() {
        let ka = BrillouinVertex::new(lattice, a)?.k;
        let kb = BrillouinVertex::new(lattice, b)?.k;
        let first = if s == 0 { 0 } else { 1 };
        for t in first..samples_per_segment {
            let u = t as f64 / (samples_per_segment - 1) as f64;
            let mut k = ZERO;
            for i in 0..3 {
                k[i] = ka[i] + u * (kb[i] - ka[i]);
            }
            points.push(PathPoint { segment: s, k });
        }
    }
    Ok(KPath { segments, samples_per_segment, points })
}
