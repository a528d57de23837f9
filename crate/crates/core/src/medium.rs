//! Unit-cell material layout and analytic Fourier coefficients of ε, ε⁻¹ and μ.

use std::f64::consts::PI;

use faer::c64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{norm, Vec3, ZERO};
use crate::lattice::LatticeSpec;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Shape {
    /// Circular disk; in a 3D cell, a cylinder along the third axis.
    Disk { radius: f64 },
    Sphere { radius: f64 },
    /// Sphere in a cell stretched to `cell_height` along the third axis.
    SphereInSupercell { radius: f64, cell_height: f64 },
}

impl Shape {
    pub fn radius(&self) -> f64 {
        match *self {
            Shape::Disk { radius } | Shape::Sphere { radius } => radius,
            Shape::SphereInSupercell { radius, .. } => radius,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Inclusion {
    pub shape: Shape,
    pub eps: f64,
    #[serde(default)]
    pub center: Vec3,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MediumSpec {
    pub background_eps: f64,
    #[serde(default)]
    pub inclusions: Vec<Inclusion>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoefficientRole {
    InvEps,
    Eps,
    Mu,
}

/// Side lengths of the computational cell in ξ-units.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Cell {
    pub dimension: usize,
    pub lengths: Vec3,
}

impl Cell {
    pub fn volume(&self) -> f64 {
        self.lengths[..self.dimension].iter().product()
    }

    /// Reciprocal-lattice spacing along `axis`.
    pub fn spacing(&self, axis: usize) -> f64 {
        2.0 * PI / self.lengths[axis]
    }

    pub fn g_vector(&self, m: [i32; 3]) -> Vec3 {
        let mut g = ZERO;
        for i in 0..self.dimension {
            g[i] = m[i] as f64 * self.spacing(i);
        }
        g
    }

    /// Integer indices of `g`, or `None` when it is off the reciprocal lattice.
    pub fn lattice_indices(&self, g: Vec3) -> Option<[i32; 3]> {
        let mut m = [0i32; 3];
        for i in 0..3 {
            if i >= self.dimension {
                if g[i] != 0.0 {
                    return None;
                }
                continue;
            }
            let x = g[i] / self.spacing(i);
            let r = x.round();
            if (x - r).abs() > 1e-9 * x.abs().max(1.0) {
                return None;
            }
            m[i] = r as i32;
        }
        Some(m)
    }
}

impl MediumSpec {
    pub fn homogeneous(eps: f64) -> Self {
        Self { background_eps: eps, inclusions: Vec::new() }
    }

    pub fn with_inclusion(mut self, shape: Shape, eps: f64) -> Self {
        self.inclusions.push(Inclusion { shape, eps, center: ZERO });
        self
    }

    /// Supercell height if any inclusion requests one.
    pub fn supercell_height(&self) -> Option<f64> {
        self.inclusions.iter().find_map(|inc| match inc.shape {
            Shape::SphereInSupercell { cell_height, .. } => Some(cell_height),
            _ => None,
        })
    }

    pub fn cell(&self, lattice: &LatticeSpec) -> Result<Cell> {
        self.validate(lattice)?;
        let mut lengths = [2.0, 2.0, 0.0];
        if lattice.dimension == 3 {
            lengths[2] = self.supercell_height().unwrap_or(2.0);
        }
        Ok(Cell { dimension: lattice.dimension, lengths })
    }

    pub fn validate(&self, lattice: &LatticeSpec) -> Result<()> {
        lattice.validate()?;
        let bad = |msg: String| Err(Error::InvalidMedium(msg));
        if !(self.background_eps > 0.0 && self.background_eps.is_finite()) {
            return bad(format!("background_eps must be positive, got {}", self.background_eps));
        }
        let mut height = None;
        for (n, inc) in self.inclusions.iter().enumerate() {
            if !(inc.eps > 0.0 && inc.eps.is_finite()) {
                return bad(format!("inclusion {n}: eps must be positive, got {}", inc.eps));
            }
            let r = inc.shape.radius();
            if !(r > 0.0 && r <= 1.0) {
                return bad(format!("inclusion {n}: radius must lie in (0, 1], got {r}"));
            }
            match inc.shape {
                Shape::Disk { .. } => {}
                Shape::Sphere { .. } if lattice.dimension == 3 => {}
                Shape::SphereInSupercell { cell_height, .. } if lattice.dimension == 3 => {
                    if !(cell_height >= 2.0 * r && cell_height >= 2.0) {
                        return bad(format!(
                            "inclusion {n}: cell_height {cell_height} cannot hold radius {r}"
                        ));
                    }
                    if height.is_some_and(|h| h != cell_height) {
                        return bad("all supercell inclusions must share one cell_height".into());
                    }
                    height = Some(cell_height);
                }
                _ => return bad(format!("inclusion {n}: spheres need a 3D lattice")),
            }
        }
        let lengths = [2.0, 2.0, height.unwrap_or(2.0)];
        for (a, p) in self.inclusions.iter().enumerate() {
            for q in &self.inclusions[a + 1..] {
                let planar = matches!(p.shape, Shape::Disk { .. })
                    || matches!(q.shape, Shape::Disk { .. })
                    || lattice.dimension == 2;
                let axes = if planar { 2 } else { 3 };
                let mut d2 = 0.0;
                for i in 0..axes {
                    let mut d = p.center[i] - q.center[i];
                    d -= lengths[i] * (d / lengths[i]).round();
                    d2 += d * d;
                }
                let reach = p.shape.radius() + q.shape.radius();
                if d2.sqrt() < reach - 1e-12 {
                    return bad("inclusions overlap".into());
                }
            }
        }
        Ok(())
    }

    /// Inclusion volume (area) divided by cell volume (area).
    pub fn filling_fraction(&self, lattice: &LatticeSpec) -> Result<f64> {
        let cell = self.cell(lattice)?;
        Ok(self.inclusions.iter().map(|inc| indicator_volume(inc, &cell)).sum::<f64>()
            / cell.volume())
    }

    fn value(&self, role: CoefficientRole, eps: f64) -> f64 {
        match role {
            CoefficientRole::InvEps => 1.0 / eps,
            CoefficientRole::Eps => eps,
            CoefficientRole::Mu => 1.0,
        }
    }

    /// Cell average of the selected material function.
    pub fn mean(&self, lattice: &LatticeSpec, role: CoefficientRole) -> Result<f64> {
        Ok(self.fourier_coefficient(lattice, role, ZERO)?.re)
    }

    /// `(1/|C|) ∫_C f(ξ) e^{-iG·ξ} dξ` for the material function selected by `role`.
    pub fn fourier_coefficient(
        &self,
        lattice: &LatticeSpec,
        role: CoefficientRole,
        g: Vec3,
    ) -> Result<c64> {
        let cell = self.cell(lattice)?;
        let m = cell.lattice_indices(g).ok_or(Error::OffLattice(g))?;
        Ok(self.coefficient_at(&cell, role, m))
    }

    /// Coefficient at integer reciprocal index `m`. The medium must be valid for `cell`.
    pub fn coefficient_at(&self, cell: &Cell, role: CoefficientRole, m: [i32; 3]) -> c64 {
        let g = cell.g_vector(m);
        let fm = self.value(role, self.background_eps);
        let mut c = if m == [0, 0, 0] { c64::new(fm, 0.0) } else { c64::new(0.0, 0.0) };
        if role == CoefficientRole::Mu {
            return c;
        }
        for inc in &self.inclusions {
            let contrast = self.value(role, inc.eps) - fm;
            let chi = indicator_transform(inc, cell, g);
            if chi == 0.0 {
                continue;
            }
            let phase = -crate::geom::dot(g, inc.center);
            c += c64::new(phase.cos(), phase.sin()) * (contrast * chi);
        }
        c
    }

    /// Material function at a point of the cell, for quadrature checks.
    pub fn eval(&self, cell: &Cell, role: CoefficientRole, xi: Vec3) -> f64 {
        let mut eps = self.background_eps;
        for inc in &self.inclusions {
            let axes = match inc.shape {
                Shape::Disk { .. } => 2,
                _ => cell.dimension,
            };
            let mut d2 = 0.0;
            for i in 0..axes {
                let mut d = xi[i] - inc.center[i];
                d -= cell.lengths[i] * (d / cell.lengths[i]).round();
                d2 += d * d;
            }
            if d2 <= inc.shape.radius().powi(2) {
                eps = inc.eps;
            }
        }
        self.value(role, eps)
    }
}

fn indicator_volume(inc: &Inclusion, cell: &Cell) -> f64 {
    let r = inc.shape.radius();
    match inc.shape {
        Shape::Disk { .. } => {
            let extrude = if cell.dimension == 3 { cell.lengths[2] } else { 1.0 };
            PI * r * r * extrude
        }
        _ => 4.0 / 3.0 * PI * r.powi(3),
    }
}

/// Fourier transform of an inclusion's indicator, centred at the origin, over the cell volume.
fn indicator_transform(inc: &Inclusion, cell: &Cell, g: Vec3) -> f64 {
    let r = inc.shape.radius();
    match inc.shape {
        Shape::Disk { .. } => {
            if cell.dimension == 3 && g[2] != 0.0 {
                return 0.0;
            }
            let area = cell.lengths[0] * cell.lengths[1];
            let q = norm([g[0], g[1], 0.0]);
            if q == 0.0 {
                PI * r * r / area
            } else {
                2.0 * PI * r * libm::j1(q * r) / (area * q)
            }
        }
        _ => {
            let x = norm(g) * r;
            let shape = if x < 1e-2 {
                let x2 = x * x;
                1.0 / 3.0 - x2 / 30.0 + x2 * x2 / 840.0
            } else {
                (x.sin() - x * x.cos()) / x.powi(3)
            };
            4.0 * PI * r.powi(3) * shape / cell.volume()
        }
    }
}
