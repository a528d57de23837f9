use std::io::Write;
use std::path::Path;

use bloch_hfh::bloch::write_band_csv;
use bloch_hfh::effmed::{classify_pde, decay_rate, effective_report, DecayEstimate, PdeClassification, DEGENERACY_TOL};
use bloch_hfh::hfh::{analyse_group, find_accidental_degeneracy, GroupAnalysis, GroupReport, HfhOptions, TuningResult};
use bloch_hfh::numfmt::fmt9;
use bloch_hfh::{band_structure, ibz_path, BrillouinVertex, Error, FdOptions, Problem, VertexLabel};
use serde::Serialize;

use crate::config::{HfhParams, RunConfig, Task};
use crate::output::{write_json, write_text};

/// Failure with the step that produced it.
#[derive(Debug, Serialize)]
pub struct TaskError {
    pub kind: String,
    pub message: String,
    pub context: String,
}

impl TaskError {
    pub fn new(kind: &str, message: impl Into<String>, context: impl Into<String>) -> Self {
        Self { kind: kind.into(), message: message.into(), context: context.into() }
    }

    fn core(e: Error, context: impl Into<String>) -> Self {
        let kind = format!("{e:?}");
        let kind = kind.split(|c: char| !c.is_alphanumeric()).next().unwrap_or("Error").to_string();
        Self { kind, message: e.to_string(), context: context.into() }
    }

    fn io(e: std::io::Error, path: &Path) -> Self {
        Self::new("Io", e.to_string(), path.display().to_string())
    }
}

type TaskResult<T = ()> = Result<T, TaskError>;

fn vertex_k(problem: &Problem, label: VertexLabel) -> TaskResult<[f64; 3]> {
    BrillouinVertex::new(&problem.lattice, label).map(|v| v.k).map_err(|e| TaskError::core(e, format!("vertex {label}")))
}

fn band_index(band: usize, what: &str) -> TaskResult<usize> {
    band.checked_sub(1).ok_or_else(|| TaskError::new("InvalidConfig", format!("{what} counts from 1"), what.to_string()))
}

fn hfh_options(p: &HfhParams, seed: u64, oracle: bool) -> HfhOptions {
    HfhOptions {
        cluster_tol: p.cluster_tol,
        classify_tol: p.classify_tol,
        decouple_tol: p.decouple_tol,
        seed,
        oracle: oracle.then(|| FdOptions { step: p.fd_step, ..FdOptions::default() }),
        ..HfhOptions::default()
    }
}

fn with_group<T>(
    problem: &Problem,
    label: VertexLabel,
    band: usize,
    opts: &HfhOptions,
    f: impl FnOnce(&GroupAnalysis) -> TaskResult<T>,
) -> TaskResult<T> {
    let k0 = vertex_k(problem, label)?;
    let ctx = format!("vertex {label}, band {band}");
    let b = band_index(band, "band")?;
    let op = problem.operator(Some(k0)).map_err(|e| TaskError::core(e, ctx.clone()))?;
    let a = analyse_group(&op, k0, b, opts).map_err(|e| TaskError::core(e, ctx))?;
    f(&a)
}

pub fn run(task: Task, cfg: &RunConfig, out: &Path) -> TaskResult {
    match task {
        Task::Bands => bands(cfg, out),
        Task::Hfh => hfh(cfg, out),
        Task::DiracTune => tune(cfg, out),
        Task::Effective => effective(cfg, out),
        Task::Decay => decay(cfg, out),
    }
}

fn bands(cfg: &RunConfig, out: &Path) -> TaskResult {
    let p = &cfg.problem;
    let path = ibz_path(&p.lattice, cfg.bands.samples_per_segment).map_err(|e| TaskError::core(e, "path"))?;
    let op = p.operator(None).map_err(|e| TaskError::core(e, "operator"))?;
    let table = band_structure(&op, &path, cfg.bands.n_bands).map_err(|e| TaskError::core(e, "band structure"))?;
    let file = out.join("bands.csv");
    write_text(&file, |w| write_band_csv(&table, w)).map_err(|e| TaskError::io(e, &file))?;
    if cfg.bands.overlay.is_empty() {
        return Ok(());
    }
    let dims = p.lattice.dimension;
    let mut rows = Vec::new();
    for ov in &cfg.bands.overlay {
        let k0 = vertex_k(p, ov.vertex)?;
        with_group(p, ov.vertex, ov.band, &hfh_options(&cfg.hfh, cfg.seed, false), |a| {
            for pt in &path.points {
                let kappa = [pt.k[0] - k0[0], pt.k[1] - k0[1], pt.k[2] - k0[2]];
                let dist = kappa.iter().map(|x| x * x).sum::<f64>().sqrt();
                if dist > cfg.bands.overlay_radius {
                    continue;
                }
                for (r, w) in a.asymptotic.evaluate(kappa).into_iter().enumerate() {
                    rows.push((pt.k, a.group.bands.start + r + 1, w));
                }
            }
            Ok(())
        })?;
    }
    let file = out.join("overlay.csv");
    write_text(&file, |w| {
        let head = if dims == 3 { "K1,K2,K3,branch,omega_asym" } else { "K1,K2,branch,omega_asym" };
        writeln!(w, "{head}")?;
        for (k, branch, omega) in &rows {
            let ks: Vec<String> = k[..dims].iter().map(|&x| fmt9(x)).collect();
            writeln!(w, "{},{branch},{}", ks.join(","), fmt9(*omega))?;
        }
        Ok(())
    })
    .map_err(|e| TaskError::io(e, &file))
}

fn hfh(cfg: &RunConfig, out: &Path) -> TaskResult {
    let h = &cfg.hfh;
    let report = with_group(&cfg.problem, h.vertex, h.band, &hfh_options(h, cfg.seed, h.oracle), |a| {
        Ok(GroupReport::new(&h.vertex.to_string(), a))
    })?;
    let file = out.join("hfh.json");
    write_json(&file, &report).map_err(|e| TaskError::io(e, &file))
}

#[derive(Serialize)]
struct TuneReport {
    vertex: VertexLabel,
    bands: [usize; 2],
    range: [f64; 2],
    gap_tol: f64,
    result: TuningResult,
    /// Analysis of the lower band at the tuned value.
    group: Option<GroupReport>,
}

fn tune(cfg: &RunConfig, out: &Path) -> TaskResult {
    let t = &cfg.tune;
    let bands = (band_index(t.bands[0], "tune.bands")?, band_index(t.bands[1], "tune.bands")?);
    let ctx = format!("tuning {:?} over {:?} at {}", t.parameter, t.range, t.vertex);
    let result = find_accidental_degeneracy(
        &cfg.problem,
        t.parameter,
        (t.range[0], t.range[1]),
        t.vertex,
        bands,
        t.gap_tol,
        t.scan_points,
    )
    .map_err(|e| TaskError::core(e, ctx.clone()))?;
    let trace = out.join("tune_trace.csv");
    write_text(&trace, |w| {
        writeln!(w, "value,gap")?;
        for (v, g) in &result.trace {
            writeln!(w, "{},{}", fmt9(*v), fmt9(*g))?;
        }
        Ok(())
    })
    .map_err(|e| TaskError::io(e, &trace))?;
    let group = if result.success {
        let tuned = t.parameter.apply(&cfg.problem, result.value).map_err(|e| TaskError::core(e, ctx.clone()))?;
        Some(with_group(&tuned, t.vertex, t.bands[0], &hfh_options(&cfg.hfh, cfg.seed, cfg.hfh.oracle), |a| {
            Ok(GroupReport::new(&t.vertex.to_string(), a))
        })?)
    } else {
        None
    };
    let success = result.success;
    let (value, gap) = (result.value, result.gap);
    let file = out.join("tune.json");
    let report = TuneReport { vertex: t.vertex, bands: t.bands, range: t.range, gap_tol: t.gap_tol, result, group };
    write_json(&file, &report).map_err(|e| TaskError::io(e, &file))?;
    if success {
        Ok(())
    } else {
        Err(TaskError::core(Error::NoDegeneracy { value, gap }, ctx))
    }
}

fn effective(cfg: &RunConfig, out: &Path) -> TaskResult {
    let op = cfg.problem.operator(None).map_err(|e| TaskError::core(e, "operator"))?;
    let report = effective_report(&op, cfg.effective.fd_step).map_err(|e| TaskError::core(e, "static cell problems"))?;
    let file = out.join("effective.json");
    write_json(&file, &report).map_err(|e| TaskError::io(e, &file))
}

#[derive(Serialize)]
struct DecayBranch {
    band: usize,
    t_tilde: Vec<Vec<f64>>,
    pde: PdeClassification,
    estimates: Vec<DecayEstimate>,
}

#[derive(Serialize)]
struct DecayReport {
    vertex: VertexLabel,
    omega0: f64,
    /// Long-scale axis, counted from 1.
    direction: usize,
    branches: Vec<DecayBranch>,
}

fn decay(cfg: &RunConfig, out: &Path) -> TaskResult {
    let h = &cfg.hfh;
    let axis = band_index(cfg.decay.direction, "decay.direction")?;
    if cfg.decay.frequencies.is_empty() {
        return Err(TaskError::new("InvalidConfig", "decay.frequencies is empty", "decay"));
    }
    let report = with_group(&cfg.problem, h.vertex, h.band, &hfh_options(h, cfg.seed, false), |a| {
        let t = a.tensors.as_ref().ok_or_else(|| {
            TaskError::new("Classification", "decay rates need an essential (quadratic) group", format!("vertex {}", h.vertex))
        })?;
        let mut branches = Vec::new();
        for r in 0..a.group.p() {
            let tt = t.branch_tensor(r);
            let band = a.group.bands.start + r + 1;
            let estimates = cfg
                .decay
                .frequencies
                .iter()
                .map(|&w| decay_rate(&tt, a.group.omega0, w, axis))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| TaskError::core(e, format!("vertex {}, band {band}", h.vertex)))?;
            branches.push(DecayBranch { band, pde: classify_pde(&tt, DEGENERACY_TOL), t_tilde: tt, estimates });
        }
        Ok(DecayReport { vertex: h.vertex, omega0: a.group.omega0, direction: cfg.decay.direction, branches })
    })?;
    let file = out.join("decay.json");
    write_json(&file, &report).map_err(|e| TaskError::io(e, &file))
}
