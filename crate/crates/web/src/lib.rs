//! WebAssembly bindings for the browser demo. Every entry point takes a JSON
//! request and returns a JSON response, so the same functions run natively in tests.

use bloch_hfh::effmed::{classify_pde, decay_rate, PdeClassification, DEGENERACY_TOL};
use bloch_hfh::hfh::{analyse_group, GroupReport, HfhOptions};
use bloch_hfh::{band_structure, ibz_path, BrillouinVertex, Problem, VertexLabel};
use serde::{Deserialize, Serialize};
use wasm_bindgen::prelude::*;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandsRequest {
    pub problem: Problem,
    #[serde(default = "default_samples")]
    pub samples_per_segment: usize,
    #[serde(default = "default_bands")]
    pub n_bands: usize,
}

fn default_samples() -> usize {
    15
}

fn default_bands() -> usize {
    6
}

#[derive(Serialize)]
pub struct Tick {
    pub label: String,
    pub x: f64,
}

#[derive(Serialize)]
pub struct BandsResponse {
    /// Arc length along the path for every sample.
    pub x: Vec<f64>,
    pub k: Vec<[f64; 3]>,
    pub ticks: Vec<Tick>,
    /// `omegas[point][band]`.
    pub omegas: Vec<Vec<f64>>,
}

fn arc_lengths(k: &[[f64; 3]]) -> Vec<f64> {
    let mut x = vec![0.0];
    for w in k.windows(2) {
        let d = (0..3).map(|i| (w[1][i] - w[0][i]).powi(2)).sum::<f64>().sqrt();
        x.push(x.last().unwrap() + d);
    }
    x
}

pub fn bands_json(request: &str) -> Result<String, String> {
    let req: BandsRequest = serde_json::from_str(request).map_err(|e| e.to_string())?;
    let p = &req.problem;
    let path = ibz_path(&p.lattice, req.samples_per_segment).map_err(|e| e.to_string())?;
    let op = p.operator(None).map_err(|e| e.to_string())?;
    let table = band_structure(&op, &path, req.n_bands).map_err(|e| e.to_string())?;
    let k: Vec<[f64; 3]> = path.points.iter().map(|pt| pt.k).collect();
    let x = arc_lengths(&k);
    let mut ticks = vec![Tick { label: path.segments[0].0.to_string(), x: 0.0 }];
    for (s, seg) in path.segments.iter().enumerate() {
        let last = path.points.iter().rposition(|pt| pt.segment == s).unwrap_or(0);
        ticks.push(Tick { label: seg.1.to_string(), x: x[last] });
    }
    serde_json::to_string(&BandsResponse { x, k, ticks, omegas: table.omegas }).map_err(|e| e.to_string())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupRequest {
    pub problem: Problem,
    pub vertex: VertexLabel,
    /// Counted from 1.
    pub band: usize,
    #[serde(default = "default_samples")]
    pub samples_per_segment: usize,
    /// Overlay radius around the vertex.
    #[serde(default = "default_radius")]
    pub radius: f64,
    #[serde(default)]
    pub seed: u64,
}

fn default_radius() -> f64 {
    0.3
}

#[derive(Serialize)]
pub struct OverlayPoint {
    pub x: f64,
    pub branch: usize,
    pub omega: f64,
}

#[derive(Serialize)]
pub struct GroupResponse {
    pub report: GroupReport,
    /// Asymptotic branches along the band path, on the same arc-length axis as the diagram.
    pub overlay: Vec<OverlayPoint>,
    pub pde: Vec<PdeClassification>,
}

pub fn hfh_json(request: &str) -> Result<String, String> {
    let req: GroupRequest = serde_json::from_str(request).map_err(|e| e.to_string())?;
    let p = &req.problem;
    let band = req.band.checked_sub(1).ok_or("band counts from 1")?;
    let k0 = BrillouinVertex::new(&p.lattice, req.vertex).map_err(|e| e.to_string())?.k;
    let op = p.operator(Some(k0)).map_err(|e| e.to_string())?;
    let opts = HfhOptions { seed: req.seed, ..HfhOptions::default() };
    let a = analyse_group(&op, k0, band, &opts).map_err(|e| e.to_string())?;
    let path = ibz_path(&p.lattice, req.samples_per_segment).map_err(|e| e.to_string())?;
    let k: Vec<[f64; 3]> = path.points.iter().map(|pt| pt.k).collect();
    let x = arc_lengths(&k);
    let mut overlay = Vec::new();
    for (kk, xx) in k.iter().zip(&x) {
        let kappa = [kk[0] - k0[0], kk[1] - k0[1], kk[2] - k0[2]];
        if kappa.iter().map(|c| c * c).sum::<f64>().sqrt() > req.radius {
            continue;
        }
        for (r, w) in a.asymptotic.evaluate(kappa).into_iter().enumerate() {
            overlay.push(OverlayPoint { x: *xx, branch: a.group.bands.start + r + 1, omega: w });
        }
    }
    let pde = match &a.tensors {
        Some(t) => (0..a.group.p()).map(|r| classify_pde(&t.branch_tensor(r), DEGENERACY_TOL)).collect(),
        None => Vec::new(),
    };
    let report = GroupReport::new(&req.vertex.to_string(), &a);
    serde_json::to_string(&GroupResponse { report, overlay, pde }).map_err(|e| e.to_string())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecayRequest {
    pub problem: Problem,
    pub vertex: VertexLabel,
    /// Counted from 1.
    pub band: usize,
    pub omega: f64,
    /// Long-scale axis, counted from 1.
    #[serde(default = "default_direction")]
    pub direction: usize,
}

fn default_direction() -> usize {
    1
}

#[derive(Serialize)]
pub struct DecayResponse {
    pub omega0: f64,
    pub t_tilde: Vec<Vec<f64>>,
    pub alpha: f64,
    /// Distance over which the envelope falls by `e`.
    pub decay_length: f64,
}

pub fn decay_json(request: &str) -> Result<String, String> {
    let req: DecayRequest = serde_json::from_str(request).map_err(|e| e.to_string())?;
    let p = &req.problem;
    let band = req.band.checked_sub(1).ok_or("band counts from 1")?;
    let axis = req.direction.checked_sub(1).ok_or("direction counts from 1")?;
    let k0 = BrillouinVertex::new(&p.lattice, req.vertex).map_err(|e| e.to_string())?.k;
    let op = p.operator(Some(k0)).map_err(|e| e.to_string())?;
    let a = analyse_group(&op, k0, band, &HfhOptions::default()).map_err(|e| e.to_string())?;
    let t = a.tensors.as_ref().ok_or("the group is a Dirac point; decay needs a quadratic band edge")?;
    let member = band - a.group.bands.start;
    let tt = t.branch_tensor(member);
    let d = decay_rate(&tt, a.group.omega0, req.omega, axis).map_err(|e| e.to_string())?;
    let decay_length = if d.alpha > 0.0 { 1.0 / d.alpha } else { f64::INFINITY };
    serde_json::to_string(&DecayResponse { omega0: a.group.omega0, t_tilde: tt, alpha: d.alpha, decay_length })
        .map_err(|e| e.to_string())
}

/// Band diagram along Γ–X–M–Γ (or the cubic path).
#[wasm_bindgen]
pub fn band_diagram(request: &str) -> Result<String, JsValue> {
    bands_json(request).map_err(|e| JsValue::from_str(&e))
}

/// Effective tensors of a vertex group plus the asymptotic overlay.
#[wasm_bindgen]
pub fn hfh_group(request: &str) -> Result<String, JsValue> {
    hfh_json(request).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn decay(request: &str) -> Result<String, JsValue> {
    decay_json(request).map_err(|e| JsValue::from_str(&e))
}
