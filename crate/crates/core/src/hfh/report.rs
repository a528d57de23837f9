use faer::{c64, Mat};
use serde::Serialize;

use super::analysis::{GroupAnalysis, OracleReport};
use crate::geom::Vec3;
use crate::numfmt::round_sig;

pub const SCHEMA_VERSION: u32 = 1;

fn r9(x: f64) -> f64 {
    let r = round_sig(x, 9);
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ComplexMatrix {
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl From<&Mat<c64>> for ComplexMatrix {
    fn from(m: &Mat<c64>) -> Self {
        let part = |f: fn(c64) -> f64| {
            (0..m.nrows()).map(|r| (0..m.ncols()).map(|c| r9(f(m[(r, c)]))).collect()).collect()
        };
        Self { re: part(|z| z.re), im: part(|z| z.im) }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DiracReport {
    pub direction: Vec3,
    pub slopes: Vec<f64>,
    pub eigenvalues: Vec<f64>,
    pub quadratic: Vec<bool>,
    pub curvature: Vec<Option<f64>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TensorReport {
    pub t: Vec<Vec<ComplexMatrix>>,
    pub m: ComplexMatrix,
    /// Decoupled tensor of each branch as a real `d × d` matrix.
    pub t_tilde: Vec<Vec<Vec<f64>>>,
    pub decoupling_residual: f64,
    pub decoupled: bool,
    pub compatibility: f64,
    pub first_order_residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct GroupReport {
    pub schema_version: u32,
    pub vertex: String,
    pub k: Vec3,
    pub omega0: f64,
    pub multiplicity: usize,
    /// Member bands, counted from 1.
    pub bands: Vec<usize>,
    pub member_omegas: Vec<f64>,
    pub classification: String,
    pub standing_gauge: bool,
    pub q_residual: f64,
    pub max_p_diagonal: f64,
    pub p: Vec<ComplexMatrix>,
    pub tensors: Option<TensorReport>,
    pub dirac: Vec<DiracReport>,
    pub oracle: Option<OracleReport>,
}

impl GroupReport {
    pub fn new(label: &str, a: &GroupAnalysis) -> Self {
        let g = &a.group;
        let q = g.q();
        let p = g.p();
        let mut q_residual: f64 = 0.0;
        for n in 0..p {
            for r in 0..p {
                let id = if n == r { 1.0 } else { 0.0 };
                q_residual = q_residual.max((q[(n, r)] - id).norm());
            }
        }
        let max_p_diagonal = a
            .p
            .iter()
            .flat_map(|m| (0..p).map(move |n| m[(n, n)].norm()))
            .fold(0.0, f64::max);
        let tensors = a.tensors.as_ref().map(|t| TensorReport {
            t: t.t.iter().map(|row| row.iter().map(ComplexMatrix::from).collect()).collect(),
            m: ComplexMatrix::from(&t.m),
            t_tilde: (0..p)
                .map(|r| t.branch_tensor(r).iter().map(|row| row.iter().map(|&x| r9(x)).collect()).collect())
                .collect(),
            decoupling_residual: r9(t.decoupling_residual),
            decoupled: t.decoupled,
            compatibility: r9(t.compatibility),
            first_order_residual: r9(t.first_order_residual),
        });
        let dirac = a
            .dirac
            .iter()
            .map(|m| DiracReport {
                direction: m.direction,
                slopes: m.branches.iter().map(|b| r9(b.slope)).collect(),
                eigenvalues: m.branches.iter().map(|b| r9(b.eigenvalue)).collect(),
                quadratic: m.branches.iter().map(|b| b.quadratic).collect(),
                curvature: m.branches.iter().map(|b| b.curvature.map(r9)).collect(),
            })
            .collect();
        let oracle = a.oracle.clone().map(|mut o| {
            o.max_gradient = r9(o.max_gradient);
            o.max_rel_error_t = r9(o.max_rel_error_t);
            o.max_rel_error_slope = r9(o.max_rel_error_slope);
            for l in &mut o.lines {
                l.fd_slopes.iter_mut().for_each(|x| *x = r9(*x));
                l.fd_t.iter_mut().for_each(|x| *x = r9(*x));
                l.predicted_slopes.iter_mut().for_each(|x| *x = r9(*x));
                l.predicted_t.iter_mut().flatten().for_each(|x| *x = r9(*x));
                l.min_overlap = r9(l.min_overlap);
            }
            o
        });
        Self {
            schema_version: SCHEMA_VERSION,
            vertex: label.to_string(),
            k: g.k0.map(r9),
            omega0: r9(g.omega0),
            multiplicity: p,
            bands: g.bands.clone().map(|b| b + 1).collect(),
            member_omegas: g.member_omegas.iter().map(|&x| r9(x)).collect(),
            classification: a.classification.name().to_string(),
            standing_gauge: g.standing_gauge,
            q_residual: r9(q_residual),
            max_p_diagonal: r9(max_p_diagonal),
            p: a.p.iter().map(ComplexMatrix::from).collect(),
            tensors,
            dirac,
            oracle,
        }
    }
}
