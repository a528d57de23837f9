use faer::{c64, Mat};
use serde::Serialize;

use super::asymptotic::AsymptoticBand;
use super::dirac::{dirac_dispersion, DiracModel};
use super::group::{locate_group, StandingWaveGroup, CLUSTER_TOL};
use super::tensors::{
    classify, compute_p, compute_t, solve_first_order_all, Classification, HfhTensors, CLASSIFY_TOL,
    DECOUPLE_TOL,
};
use crate::bloch::{fd_lines, BlochOperator, FdLine, FdOptions};
use crate::error::{Error, Result};
use crate::geom::{unit, Vec3};

#[derive(Clone, Debug)]
pub struct HfhOptions {
    pub cluster_tol: f64,
    pub classify_tol: f64,
    pub decouple_tol: f64,
    pub seed: u64,
    /// Bands solved beyond the requested one; grown automatically if a cluster is cut.
    pub band_margin: usize,
    /// Run the finite-difference oracle with these settings.
    pub oracle: Option<FdOptions>,
}

impl Default for HfhOptions {
    fn default() -> Self {
        Self {
            cluster_tol: CLUSTER_TOL,
            classify_tol: CLASSIFY_TOL,
            decouple_tol: DECOUPLE_TOL,
            seed: 0,
            band_margin: 4,
            oracle: None,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleLine {
    pub direction: Vec3,
    pub fd_slopes: Vec<f64>,
    /// `Ω0 · d²Ω/dt²` per branch.
    pub fd_t: Vec<f64>,
    pub predicted_slopes: Vec<f64>,
    pub predicted_t: Vec<Option<f64>>,
    pub min_overlap: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleReport {
    pub step: f64,
    pub lines: Vec<OracleLine>,
    /// Largest FD slope over the axis lines.
    pub max_gradient: f64,
    /// Largest relative error of the curvatures over components with `|T| > 0.01`.
    pub max_rel_error_t: f64,
    /// Largest relative error of the nonzero slopes.
    pub max_rel_error_slope: f64,
}

pub struct GroupAnalysis<'a> {
    pub group: StandingWaveGroup<'a>,
    pub p: Vec<Mat<c64>>,
    pub classification: Classification,
    pub tensors: Option<HfhTensors>,
    /// Dirac models along each long-scale axis.
    pub dirac: Vec<DiracModel>,
    pub asymptotic: AsymptoticBand,
    pub oracle: Option<OracleReport>,
}

/// Locates the group containing `band` (from 0) at the vertex `k0` and
/// derives its effective model. The operator should be centred on `k0`.
pub fn analyse_group<'a>(
    op: &'a BlochOperator,
    k0: Vec3,
    band: usize,
    opts: &HfhOptions,
) -> Result<GroupAnalysis<'a>> {
    let available = op.frames(k0).len();
    let mut n_bands = (band + 1 + opts.band_margin).min(available);
    let group = loop {
        let sol = op.solve(k0, n_bands)?;
        match locate_group(op, &sol, band, opts.cluster_tol) {
            Err(Error::ClusterTruncated { .. }) if n_bands < available => {
                n_bands = (2 * n_bands).min(available);
            }
            other => break other?,
        }
    };
    let p = compute_p(&group)?;
    let classification = classify(&p, group.omega0, opts.classify_tol);
    let dims = op.long_dims();
    let (tensors, dirac, asymptotic) = match classification {
        Classification::Essential => {
            let first = solve_first_order_all(&group)?;
            let t = compute_t(&group, &first, p.clone(), opts.seed, opts.decouple_tol)?;
            let asym = AsymptoticBand::quadratic(k0, &t);
            (Some(t), Vec::new(), asym)
        }
        Classification::Dirac => {
            let q = group.q();
            let models: Vec<DiracModel> = (0..dims)
                .map(|j| dirac_dispersion(&group, &p, &q, unit(j)))
                .collect::<Result<_>>()?;
            let asym = AsymptoticBand::linear(k0, group.omega0, models[0].c.clone());
            (None, models, asym)
        }
    };
    let mut analysis = GroupAnalysis { group, p, classification, tensors, dirac, asymptotic, oracle: None };
    if let Some(fd) = &opts.oracle {
        analysis.oracle = Some(run_oracle(&analysis, n_bands.max(analysis.group.bands.end + 1), fd)?);
    }
    Ok(analysis)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn run_oracle(a: &GroupAnalysis, n_bands: usize, fd: &FdOptions) -> Result<OracleReport> {
    let g = &a.group;
    let op = g.op;
    let dims = op.long_dims();
    let dirs = match a.classification {
        Classification::Essential => crate::bloch::stencil_directions(dims),
        Classification::Dirac => (0..dims).map(unit).collect(),
    };
    let n_bands = n_bands.max(g.bands.end + g.p()).min(op.frames(g.k0).len());
    let lines: Vec<FdLine> = fd_lines(op, g.k0, g.bands.clone(), n_bands, &dirs, fd)?;
    let mut out = Vec::new();
    let mut err_t: f64 = 0.0;
    let mut err_s: f64 = 0.0;
    for (l, line) in lines.iter().enumerate() {
        let fd_slopes: Vec<f64> = line.branches.iter().map(|b| b.slope).collect();
        let fd_t: Vec<f64> = line.branches.iter().map(|b| g.omega0 * b.curvature).collect();
        let (predicted_slopes, predicted_t) = match a.classification {
            Classification::Essential => {
                let t = a.tensors.as_ref().expect("essential groups carry tensors");
                let pred = t.directional(&line.direction[..dims]);
                let mut fd_sorted = fd_t.clone();
                fd_sorted.sort_by(f64::total_cmp);
                for (f, p) in fd_sorted.iter().zip(&pred) {
                    if p.abs() > 0.01 {
                        err_t = err_t.max(rel(*f, *p));
                    }
                }
                (vec![0.0; pred.len()], pred.into_iter().map(Some).collect::<Vec<_>>())
            }
            Classification::Dirac => {
                let m = &a.dirac[l];
                let s: Vec<f64> = m.branches.iter().map(|b| b.slope).collect();
                for (b, (f, p)) in m.branches.iter().zip(fd_slopes.iter().zip(&s)) {
                    if b.quadratic {
                        continue;
                    }
                    err_s = err_s.max(rel(*f, *p));
                }
                let t: Vec<Option<f64>> = m.branches.iter().map(|b| b.curvature).collect();
                for (i, tb) in t.iter().enumerate() {
                    if let Some(tb) = tb {
                        if tb.abs() > 0.01 {
                            err_t = err_t.max(rel(fd_t[i], *tb));
                        }
                    }
                }
                (s, t)
            }
        };
        out.push(OracleLine {
            direction: line.direction,
            fd_slopes,
            fd_t,
            predicted_slopes,
            predicted_t,
            min_overlap: line.min_overlap,
        });
    }
    let max_gradient = lines[..dims]
        .iter()
        .flat_map(|l| l.branches.iter().map(|b| b.slope.abs()))
        .fold(0.0, f64::max);
    Ok(OracleReport { step: fd.step, lines: out, max_gradient, max_rel_error_t: err_t, max_rel_error_slope: err_s })
}
