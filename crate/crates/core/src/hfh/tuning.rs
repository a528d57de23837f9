use serde::{Deserialize, Serialize};

use crate::bloch::PhysicsMode;
use crate::error::{Error, Result};
use crate::lattice::{BrillouinVertex, VertexLabel};
use crate::medium::Shape;
use crate::problem::Problem;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TuningParameter {
    BetaL,
    /// Radius of the first inclusion.
    Radius,
    /// Permittivity of the first inclusion.
    Eps,
}

impl TuningParameter {
    pub fn apply(self, problem: &Problem, value: f64) -> Result<Problem> {
        let mut p = problem.clone();
        let first = || Error::InvalidArgument("tuning needs at least one inclusion".into());
        match self {
            TuningParameter::BetaL => match &mut p.mode {
                PhysicsMode::Quasi2d { beta_l } => *beta_l = value,
                _ => return Err(Error::InvalidArgument("beta_l tuning needs the quasi_2d mode".into())),
            },
            TuningParameter::Radius => {
                let inc = p.medium.inclusions.first_mut().ok_or_else(first)?;
                inc.shape = match inc.shape {
                    Shape::Disk { .. } => Shape::Disk { radius: value },
                    Shape::Sphere { .. } => Shape::Sphere { radius: value },
                    Shape::SphereInSupercell { cell_height, .. } => {
                        Shape::SphereInSupercell { radius: value, cell_height }
                    }
                };
            }
            TuningParameter::Eps => p.medium.inclusions.first_mut().ok_or_else(first)?.eps = value,
        }
        Ok(p)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TuningResult {
    pub parameter: TuningParameter,
    pub value: f64,
    pub gap: f64,
    /// Frequency of the lower band at `value`.
    pub omega: f64,
    pub success: bool,
    /// Every `(value, gap)` evaluated, in order.
    pub trace: Vec<(f64, f64)>,
}

impl TuningResult {
    pub fn into_result(self) -> Result<Self> {
        if self.success {
            Ok(self)
        } else {
            Err(Error::NoDegeneracy { value: self.value, gap: self.gap })
        }
    }
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Minimises the gap `Ω_upper − Ω_lower` at `vertex` over `range` by a
/// coarse scan followed by golden-section search. Success means the gap is at
/// most `gap_tol·Ω_lower`. Bands count from 0.
pub fn find_accidental_degeneracy(
    problem: &Problem,
    parameter: TuningParameter,
    range: (f64, f64),
    vertex: VertexLabel,
    bands: (usize, usize),
    gap_tol: f64,
    scan_points: usize,
) -> Result<TuningResult> {
    let (lower, upper) = bands;
    if lower >= upper {
        return Err(Error::InvalidArgument("band pair must satisfy lower < upper".into()));
    }
    if !(range.0 < range.1) || scan_points < 3 {
        return Err(Error::InvalidArgument("need range.0 < range.1 and at least 3 scan points".into()));
    }
    let k0 = BrillouinVertex::new(&problem.lattice, vertex)?.k;
    let mut trace = Vec::new();
    let mut eval = |v: f64| -> Result<(f64, f64)> {
        let op = parameter.apply(problem, v)?.operator(Some(k0))?;
        let w = op.frequencies(k0, upper + 1)?;
        let gap = w[upper] - w[lower];
        trace.push((v, gap));
        Ok((gap, w[lower]))
    };
    let xs: Vec<f64> = (0..scan_points)
        .map(|i| range.0 + (range.1 - range.0) * i as f64 / (scan_points - 1) as f64)
        .collect();
    let mut scan = Vec::new();
    for &x in &xs {
        scan.push(eval(x)?);
    }
    let best = (0..scan.len()).min_by(|&a, &b| scan[a].0.total_cmp(&scan[b].0)).unwrap();
    let (mut value, (mut gap, mut omega)) = (xs[best], scan[best]);
    let done = |g: f64, w: f64| g <= 1e-2 * gap_tol * w.max(f64::MIN_POSITIVE);
    if !done(gap, omega) {
        let mut a = xs[best.saturating_sub(1)];
        let mut b = xs[(best + 1).min(xs.len() - 1)];
        let mut c = b - INV_PHI * (b - a);
        let mut d = a + INV_PHI * (b - a);
        let mut fc = eval(c)?;
        let mut fd = eval(d)?;
        for _ in 0..80 {
            if fc.0 < fd.0 {
                b = d;
                d = c;
                fd = fc;
                c = b - INV_PHI * (b - a);
                fc = eval(c)?;
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + INV_PHI * (b - a);
                fd = eval(d)?;
            }
            for (x, f) in [(c, fc), (d, fd)] {
                if f.0 < gap {
                    value = x;
                    gap = f.0;
                    omega = f.1;
                }
            }
            if done(gap, omega) || (b - a) < 1e-12 * (range.1 - range.0) {
                break;
            }
        }
    }
    Ok(TuningResult {
        parameter,
        value,
        gap,
        omega,
        success: gap <= gap_tol * omega,
        trace,
    })
}
