use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};
use std::ops::Range;

use faer::{c64, Mat};
use serde::Serialize;

use super::operator::BlochOperator;
use super::solve::BlochSolution;
use crate::error::{Error, Result};
use crate::geom::{add, scale, unit, Vec3, ZERO};

#[derive(Clone, Debug)]
pub struct FdOptions {
    pub step: f64,
    /// Minimum squared overlap accepted when following a branch between stencil points.
    pub min_overlap: f64,
}

impl Default for FdOptions {
    fn default() -> Self {
        Self { step: 0.01 * FRAC_PI_2, min_overlap: 0.8 }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct FdBranch {
    pub omega0: f64,
    pub slope: f64,
    pub curvature: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct FdLine {
    pub direction: Vec3,
    /// Branches ordered by slope, then curvature.
    pub branches: Vec<FdBranch>,
    /// Smallest squared overlap met while following the branches.
    pub min_overlap: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BranchDerivatives {
    pub gradient: Vec<f64>,
    pub hessian: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FdResult {
    pub k0: Vec3,
    pub step: f64,
    pub long_dims: usize,
    /// Axis lines first, then `(e_i ± e_j)/√2` for `i < j`.
    pub lines: Vec<FdLine>,
    /// Gradient and Hessian, available when the cluster is a single band.
    pub single: Option<BranchDerivatives>,
}

impl FdResult {
    /// Largest slope magnitude over the axis lines and branches.
    pub fn max_gradient(&self) -> f64 {
        self.lines[..self.long_dims]
            .iter()
            .flat_map(|l| l.branches.iter().map(|b| b.slope.abs()))
            .fold(0.0, f64::max)
    }
}

/// Axis and diagonal directions in the first `dims` coordinates.
pub fn stencil_directions(dims: usize) -> Vec<Vec3> {
    let mut dirs: Vec<Vec3> = (0..dims).map(unit).collect();
    for i in 0..dims {
        for j in i + 1..dims {
            let mut p = ZERO;
            p[i] = FRAC_1_SQRT_2;
            p[j] = FRAC_1_SQRT_2;
            let mut m = p;
            m[j] = -FRAC_1_SQRT_2;
            dirs.extend([p, m]);
        }
    }
    dirs
}

struct Tracked {
    omegas: Vec<f64>,
    fields: Vec<Mat<c64>>,
}

fn window_states(op: &BlochOperator, sol: &BlochSolution, window: Range<usize>) -> Tracked {
    Tracked {
        omegas: sol.omegas[window.clone()].to_vec(),
        fields: window.map(|n| sol.full_mode(n)).collect(),
    }
    .normalised(op)
}

impl Tracked {
    fn normalised(mut self, op: &BlochOperator) -> Self {
        for f in &mut self.fields {
            let n = op.mass_inner(f.as_ref(), f.as_ref()).re.sqrt();
            *f = &*f * faer::Scale(c64::new(1.0 / n, 0.0));
        }
        self
    }
}

fn overlap2(op: &BlochOperator, a: &Mat<c64>, b: &Mat<c64>) -> f64 {
    op.mass_inner(a.as_ref(), b.as_ref()).norm_sqr()
}

/// Picks the `p` window states lying most inside `span(reference)`.
fn select_in_span(
    op: &BlochOperator,
    states: &Tracked,
    reference: &[Mat<c64>],
    min_overlap: f64,
    direction: Vec3,
) -> Result<(Vec<usize>, f64)> {
    let weight: Vec<f64> = states
        .fields
        .iter()
        .map(|f| reference.iter().map(|r| overlap2(op, r, f)).sum())
        .collect();
    let mut order: Vec<usize> = (0..weight.len()).collect();
    order.sort_by(|&a, &b| weight[b].total_cmp(&weight[a]));
    let p = reference.len();
    let chosen: Vec<usize> = order[..p].to_vec();
    let worst = chosen.iter().map(|&c| weight[c]).fold(1.0, f64::min);
    let intruder = order.get(p).map_or(0.0, |&c| weight[c]);
    if worst < min_overlap || intruder > 1.0 - min_overlap {
        return Err(Error::BranchCrossing { direction, overlap: worst.min(1.0 - intruder) });
    }
    Ok((chosen, worst))
}

/// Matches each `from` state to a distinct `to` state by largest overlap.
fn match_states(
    op: &BlochOperator,
    from: &[Mat<c64>],
    to: &Tracked,
    candidates: &[usize],
    min_overlap: f64,
    direction: Vec3,
) -> Result<(Vec<usize>, f64)> {
    let mut pairs = Vec::new();
    for (a, f) in from.iter().enumerate() {
        for &c in candidates {
            pairs.push((overlap2(op, f, &to.fields[c]), a, c));
        }
    }
    pairs.sort_by(|x, y| y.0.total_cmp(&x.0));
    let mut out = vec![usize::MAX; from.len()];
    let mut used = Vec::new();
    let mut worst: f64 = 1.0;
    for (o, a, c) in pairs {
        if out[a] != usize::MAX || used.contains(&c) {
            continue;
        }
        out[a] = c;
        used.push(c);
        worst = worst.min(o);
    }
    if worst < min_overlap {
        return Err(Error::BranchCrossing { direction, overlap: worst });
    }
    Ok((out, worst))
}

/// Slopes and curvatures of the branches leaving the degenerate cluster at
/// `k0` along each direction, with the five-point stencil `0, ±h, ±2h`.
pub fn fd_lines(
    op: &BlochOperator,
    k0: Vec3,
    cluster: Range<usize>,
    n_bands: usize,
    directions: &[Vec3],
    opts: &FdOptions,
) -> Result<Vec<FdLine>> {
    let p = cluster.len();
    let window = cluster.start.saturating_sub(p)..(cluster.end + p).min(n_bands);
    let centre = op.solve(k0, window.end)?;
    let reference = window_states(op, &centre, cluster.clone());
    let h = opts.step;
    let offsets = [-2.0 * h, -h, h, 2.0 * h];

    let jobs: Vec<(usize, f64)> = (0..directions.len())
        .flat_map(|d| offsets.iter().map(move |&t| (d, t)))
        .collect();
    let solve = |&(d, t): &(usize, f64)| -> Result<Tracked> {
        let sol = op.solve(add(k0, scale(t, directions[d])), window.end)?;
        Ok(window_states(op, &sol, window.clone()))
    };
    #[cfg(feature = "parallel")]
    let solved: Result<Vec<Tracked>> = {
        use rayon::prelude::*;
        jobs.par_iter().map(solve).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let solved: Result<Vec<Tracked>> = jobs.iter().map(solve).collect();
    let solved = solved?;

    let mut lines = Vec::new();
    for (d, &dir) in directions.iter().enumerate() {
        let [m2, m1, p1, p2] = [&solved[4 * d], &solved[4 * d + 1], &solved[4 * d + 2], &solved[4 * d + 3]];
        let (sel_p, o1) = select_in_span(op, p1, &reference.fields, opts.min_overlap, dir)?;
        let (sel_m, o2) = select_in_span(op, m1, &reference.fields, opts.min_overlap, dir)?;
        let plus: Vec<Mat<c64>> = sel_p.iter().map(|&i| p1.fields[i].clone()).collect();
        let (to_m, o3) = match_states(op, &plus, m1, &sel_m, opts.min_overlap, dir)?;
        let all: Vec<usize> = (0..p1.fields.len()).collect();
        let minus: Vec<Mat<c64>> = to_m.iter().map(|&i| m1.fields[i].clone()).collect();
        let (to_p2, o4) = match_states(op, &plus, p2, &all, opts.min_overlap, dir)?;
        let (to_m2, o5) = match_states(op, &minus, m2, &all, opts.min_overlap, dir)?;

        let mut branches = Vec::new();
        for b in 0..p {
            let f = [
                m2.omegas[to_m2[b]],
                m1.omegas[to_m[b]],
                centre_value(op, &reference, &plus[b], &minus[b]),
                p1.omegas[sel_p[b]],
                p2.omegas[to_p2[b]],
            ];
            branches.push(FdBranch {
                omega0: f[2],
                slope: (f[0] - 8.0 * f[1] + 8.0 * f[3] - f[4]) / (12.0 * h),
                curvature: (-f[0] + 16.0 * f[1] - 30.0 * f[2] + 16.0 * f[3] - f[4]) / (12.0 * h * h),
            });
        }
        branches.sort_by(|a, b| a.slope.total_cmp(&b.slope).then(a.curvature.total_cmp(&b.curvature)));
        lines.push(FdLine { direction: dir, branches, min_overlap: o1.min(o2).min(o3).min(o4).min(o5) });
    }
    Ok(lines)
}

/// Frequency at the vertex of the branch through `plus` and `minus`: the
/// Rayleigh quotient of its zero-order state within the cluster.
fn centre_value(op: &BlochOperator, reference: &Tracked, plus: &Mat<c64>, minus: &Mat<c64>) -> f64 {
    let cp: Vec<c64> = reference.fields.iter().map(|r| op.mass_inner(r.as_ref(), plus.as_ref())).collect();
    let cm: Vec<c64> = reference.fields.iter().map(|r| op.mass_inner(r.as_ref(), minus.as_ref())).collect();
    let align: c64 = cm.iter().zip(&cp).map(|(m, p)| m.conj() * p).sum();
    let phase = if align.norm() > 0.0 { align / align.norm() } else { c64::new(1.0, 0.0) };
    let c: Vec<c64> = cp.iter().zip(&cm).map(|(p, m)| p + m * phase).collect();
    let w: f64 = c.iter().map(|x| x.norm_sqr()).sum();
    let lam: f64 = c
        .iter()
        .zip(&reference.omegas)
        .map(|(x, o)| x.norm_sqr() * o * o)
        .sum::<f64>()
        / w;
    lam.sqrt()
}

/// Gradient and curvature of the bands in `cluster` at `k0` along the
/// long-scale axes and their diagonals.
pub fn fd_band_derivatives(
    op: &BlochOperator,
    k0: Vec3,
    cluster: Range<usize>,
    n_bands: usize,
    opts: &FdOptions,
) -> Result<FdResult> {
    let dims = op.long_dims();
    let dirs = stencil_directions(dims);
    let lines = fd_lines(op, k0, cluster.clone(), n_bands, &dirs, opts)?;
    let single = (cluster.len() == 1).then(|| {
        let gradient: Vec<f64> = (0..dims).map(|i| lines[i].branches[0].slope).collect();
        let mut hessian = vec![vec![0.0; dims]; dims];
        let mut next = dims;
        for i in 0..dims {
            hessian[i][i] = lines[i].branches[0].curvature;
            for j in i + 1..dims {
                let cp = lines[next].branches[0].curvature;
                let cm = lines[next + 1].branches[0].curvature;
                hessian[i][j] = (cp - cm) / 2.0;
                hessian[j][i] = hessian[i][j];
                next += 2;
            }
        }
        BranchDerivatives { gradient, hessian }
    });
    Ok(FdResult { k0, step: opts.step, long_dims: dims, lines, single })
}
