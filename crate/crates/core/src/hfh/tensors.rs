use faer::linalg::solvers::PartialPivLu;
use faer::linalg::solvers::DenseSolveCore;
use faer::prelude::*;
use faer::{c64, Mat, MatRef, Side};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::group::StandingWaveGroup;
use super::ops::FieldOps;
use crate::bloch::frob_inner;
use crate::error::{Error, Result};

/// Default threshold on `max_j ‖P_j‖ / Ω0` separating essential from accidental degeneracies.
pub const CLASSIFY_TOL: f64 = 1e-3;
/// Default relative tolerance for the off-diagonal part of the decoupled tensors.
pub const DECOUPLE_TOL: f64 = 1e-6;
/// Largest compatibility ratio accepted by the first-order solve.
pub const COMPATIBILITY_TOL: f64 = 1e-6;

const I: c64 = c64 { re: 0.0, im: 1.0 };

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Classification {
    Essential,
    Dirac,
}

impl Classification {
    pub fn name(self) -> &'static str {
        match self {
            Classification::Essential => "essential",
            Classification::Dirac => "dirac",
        }
    }
}

pub fn compute_q(group: &StandingWaveGroup) -> Mat<c64> {
    group.q()
}

/// `P_j^{nr} = iΩ0 Σ_G {conj(e_n) × h_r + e_r × conj(h_n)}_j` with
/// `ε⁻¹∇×h = −iΩ0 e`; scalar modes use `⟨h_n, S∂_j h_r⟩ − ⟨∂_j h_n, S h_r⟩`.
pub fn compute_p(group: &StandingWaveGroup) -> Result<Vec<Mat<c64>>> {
    if group.omega0 == 0.0 {
        return Err(Error::ZeroFrequency);
    }
    let ops = FieldOps::new(group.op, &group.frames);
    let p = group.p();
    let dims = group.op.long_dims();
    if !ops.vector {
        let mut out = Vec::new();
        for j in 0..dims {
            let d: Vec<Mat<c64>> = group.modes.iter().map(|h| ops.deriv(j, h.as_ref())).collect();
            let sh: Vec<Mat<c64>> = group.modes.iter().map(|h| ops.stiff(h.as_ref())).collect();
            let sd: Vec<Mat<c64>> = d.iter().map(|x| ops.stiff(x.as_ref())).collect();
            out.push(Mat::from_fn(p, p, |n, r| {
                frob_inner(group.modes[n].as_ref(), sd[r].as_ref()) - frob_inner(d[n].as_ref(), sh[r].as_ref())
            }));
        }
        return Ok(out);
    }
    let w0 = group.omega0;
    let e: Vec<Mat<c64>> = group
        .modes
        .iter()
        .map(|h| ops.stiff(ops.curl(h.as_ref()).as_ref()) * faer::Scale(I / w0))
        .collect();
    let h = &group.modes;
    let mut out = Vec::new();
    for j in 0..dims {
        let (a, b) = ((j + 1) % 3, (j + 2) % 3);
        let cross_j = |u: &Mat<c64>, v: &Mat<c64>, conj_u: bool, conj_v: bool| -> c64 {
            let mut s = c64::new(0.0, 0.0);
            for g in 0..u.nrows() {
                let cu = |c| if conj_u { u[(g, c)].conj() } else { u[(g, c)] };
                let cv = |c| if conj_v { v[(g, c)].conj() } else { v[(g, c)] };
                s += cu(a) * cv(b) - cu(b) * cv(a);
            }
            s
        };
        out.push(Mat::from_fn(p, p, |n, r| {
            I * w0 * (cross_j(&e[n], &h[r], true, false) + cross_j(&e[r], &h[n], false, true))
        }));
    }
    Ok(out)
}

/// `P_j^{nr} = i⟨h_n, A_j h_r⟩`, the same quantity through the expanded operator.
pub fn compute_p_operator(group: &StandingWaveGroup) -> Vec<Mat<c64>> {
    let ops = FieldOps::new(group.op, &group.frames);
    let p = group.p();
    (0..group.op.long_dims())
        .map(|j| {
            let aj: Vec<Mat<c64>> = group.modes.iter().map(|h| ops.a_j(j, h.as_ref())).collect();
            Mat::from_fn(p, p, |n, r| I * frob_inner(group.modes[n].as_ref(), aj[r].as_ref()))
        })
        .collect()
}

pub fn classify(p: &[Mat<c64>], omega0: f64, tol: f64) -> Classification {
    let worst = p.iter().map(|m| m.norm_l2()).fold(0.0, f64::max);
    if worst <= tol * omega0 {
        Classification::Essential
    } else {
        Classification::Dirac
    }
}

/// Solutions of `(A0 − Ω0² B) h1 = rhs` orthogonal to the group, with the
/// group deflated out of the singular matrix.
pub struct FirstOrderSolver<'g, 'a> {
    group: &'g StandingWaveGroup<'a>,
    lu: PartialPivLu<c64>,
    v: Mat<c64>,
    bv: Mat<c64>,
    m: Mat<c64>,
}

#[derive(Clone, Debug)]
pub struct FirstOrderSolution {
    pub field: Mat<c64>,
    /// `‖Vᴴ r‖ / ‖r‖` for the transverse right side.
    pub compatibility: f64,
    pub residual: f64,
}

impl<'g, 'a> FirstOrderSolver<'g, 'a> {
    pub fn new(group: &'g StandingWaveGroup<'a>) -> Result<Self> {
        let (pair, frames) = group.op.assemble(group.k0)?;
        let lam = group.omega0 * group.omega0;
        let n = frames.len();
        let p = group.p();
        let v = Mat::from_fn(n, p, |a, r| group.frames.from_full(group.modes[r].as_ref())[(a, 0)]);
        let bv = match &pair.b {
            Some(b) => b * &v,
            None => v.clone(),
        };
        let mut m = pair.a.clone();
        match &pair.b {
            Some(b) => m -= b * faer::Scale(c64::new(lam, 0.0)),
            None => {
                for i in 0..n {
                    m[(i, i)] -= c64::new(lam, 0.0);
                }
            }
        }
        let sigma = lam.max(1.0);
        let md = &m + &bv * bv.adjoint() * faer::Scale(c64::new(sigma, 0.0));
        let lu = md.partial_piv_lu();
        Ok(Self { group, lu, v, bv, m })
    }

    /// Solves with a full-field right side.
    pub fn solve(&self, rhs: MatRef<'_, c64>) -> Result<FirstOrderSolution> {
        let g = self.group;
        let frames = &g.frames;
        let rt = frames.from_full(rhs);
        let rnorm = rt.norm_l2();
        let vr = self.v.adjoint() * &rt;
        let compatibility = if rnorm > 0.0 { vr.norm_l2() / rnorm } else { 0.0 };
        let rp = &rt - &self.bv * &vr;
        let mut x = self.lu.solve(&rp);
        let vbx = self.bv.adjoint() * &x;
        x -= &self.v * vbx;
        let res = &self.m * &x - &rp;
        let residual = if rp.norm_l2() > 0.0 { res.norm_l2() / rp.norm_l2() } else { res.norm_l2() };
        let mut field = frames.to_full(x.as_ref());
        if frames.vector {
            let longitudinal = rhs.to_owned() - frames.to_full(rt.as_ref());
            let lam = g.omega0 * g.omega0;
            if lam > 0.0 {
                field -= longitudinal * faer::Scale(c64::new(1.0 / lam, 0.0));
            }
        }
        for h in &g.modes {
            let a = g.op.mass_inner(h.as_ref(), field.as_ref());
            field -= h * faer::Scale(a);
        }
        if !field.norm_l2().is_finite() {
            return Err(Error::Solve("first-order solution is not finite".into()));
        }
        Ok(FirstOrderSolution { field, compatibility, residual })
    }
}

/// First-order fields `h1[r][j]` for every mode and long-scale direction.
#[derive(Clone, Debug)]
pub struct FirstOrderField {
    pub h1: Vec<Vec<Mat<c64>>>,
    pub compatibility: f64,
    pub residual: f64,
}

/// Right side `i A_j h_r` of the first-order cell problem.
pub fn first_order_rhs(group: &StandingWaveGroup, j: usize, r: usize) -> Mat<c64> {
    let ops = FieldOps::new(group.op, &group.frames);
    ops.a_j(j, group.modes[r].as_ref()) * faer::Scale(I)
}

pub fn solve_first_order(group: &StandingWaveGroup, j: usize, r: usize) -> Result<FirstOrderSolution> {
    let solver = FirstOrderSolver::new(group)?;
    let s = solver.solve(first_order_rhs(group, j, r).as_ref())?;
    if s.compatibility > COMPATIBILITY_TOL {
        return Err(Error::Compatibility { ratio: s.compatibility });
    }
    Ok(s)
}

pub fn solve_first_order_all(group: &StandingWaveGroup) -> Result<FirstOrderField> {
    let solver = FirstOrderSolver::new(group)?;
    let dims = group.op.long_dims();
    let mut h1 = Vec::new();
    let mut compatibility: f64 = 0.0;
    let mut residual: f64 = 0.0;
    for r in 0..group.p() {
        let mut row = Vec::new();
        for j in 0..dims {
            let s = solver.solve(first_order_rhs(group, j, r).as_ref())?;
            compatibility = compatibility.max(s.compatibility);
            residual = residual.max(s.residual);
            row.push(s.field);
        }
        h1.push(row);
    }
    if compatibility > COMPATIBILITY_TOL {
        return Err(Error::Compatibility { ratio: compatibility });
    }
    Ok(FirstOrderField { h1, compatibility, residual })
}

/// `T̂_ij^{nr}` for every `(i, j)`, before symmetrisation. Vector modes use the
/// six-term cell integral; scalar modes its reduced form.
pub fn t_hat_raw(group: &StandingWaveGroup, first: &FirstOrderField) -> Result<Vec<Vec<Mat<c64>>>> {
    let ops = FieldOps::new(group.op, &group.frames);
    let dims = group.op.long_dims();
    let p = group.p();
    for r in 0..p {
        for j in 0..dims {
            if first.h1.get(r).and_then(|row| row.get(j)).is_none() {
                return Err(Error::MissingFirstOrder { direction: j, mode: r });
            }
        }
    }
    let h = &group.modes;
    let sh: Vec<Mat<c64>> = h.iter().map(|x| ops.stiff(x.as_ref())).collect();
    // dh[n][k] = ∂_k h_n
    let dh: Vec<Vec<Mat<c64>>> = h.iter().map(|x| (0..3).map(|k| ops.deriv(k, x.as_ref())).collect()).collect();
    let mut t = vec![vec![Mat::<c64>::zeros(p, p); dims]; dims];
    for r in 0..p {
        for j in 0..dims {
            let h1 = &first.h1[r][j];
            let eh1 = ops.stiff(h1.as_ref());
            for i in 0..dims {
                let e_di_h1 = ops.stiff(ops.deriv(i, h1.as_ref()).as_ref());
                if !ops.vector {
                    for n in 0..p {
                        let mut v = frob_inner(dh[n][i].as_ref(), eh1.as_ref()) * -1.0
                            + frob_inner(h[n].as_ref(), e_di_h1.as_ref());
                        if i == j {
                            v += frob_inner(h[n].as_ref(), sh[r].as_ref());
                        }
                        t[i][j][(n, r)] = v;
                    }
                    continue;
                }
                // w_k = ∂_k h1_i
                let w = Mat::from_fn(h1.nrows(), 3, |g, k| I * ops.kg[g][k] * h1[(g, i)]);
                let ew = ops.stiff(w.as_ref());
                for n in 0..p {
                    let mut v = c64::new(0.0, 0.0);
                    if i == j {
                        v += frob_inner(h[n].as_ref(), sh[r].as_ref());
                    }
                    v -= col_inner(h[n].as_ref(), j, sh[r].as_ref(), i);
                    for k in 0..3 {
                        v += col_inner(dh[n][k].as_ref(), i, eh1.as_ref(), k);
                    }
                    v -= frob_inner(dh[n][i].as_ref(), eh1.as_ref());
                    v += frob_inner(h[n].as_ref(), e_di_h1.as_ref());
                    v -= frob_inner(h[n].as_ref(), ew.as_ref());
                    t[i][j][(n, r)] = v;
                }
            }
        }
    }
    Ok(t)
}

/// `T̂_ij^{nr} = ⟨h_n, A_ij h_r⟩ + i⟨h_n, A_i h1_j^r⟩`, for cross-checking.
pub fn t_hat_operator(group: &StandingWaveGroup, first: &FirstOrderField) -> Vec<Vec<Mat<c64>>> {
    let ops = FieldOps::new(group.op, &group.frames);
    let dims = group.op.long_dims();
    let p = group.p();
    let h = &group.modes;
    let mut t = vec![vec![Mat::<c64>::zeros(p, p); dims]; dims];
    for i in 0..dims {
        for j in 0..dims {
            for r in 0..p {
                let aij = ops.a_ij(i, j, h[r].as_ref());
                let ai = ops.a_j(i, first.h1[r][j].as_ref());
                for n in 0..p {
                    t[i][j][(n, r)] = frob_inner(h[n].as_ref(), aij.as_ref())
                        + I * frob_inner(h[n].as_ref(), ai.as_ref());
                }
            }
        }
    }
    t
}

fn col_inner(u: MatRef<'_, c64>, cu: usize, v: MatRef<'_, c64>, cv: usize) -> c64 {
    (0..u.nrows()).map(|g| u[(g, cu)].conj() * v[(g, cv)]).sum()
}

pub fn symmetrise(t: &[Vec<Mat<c64>>]) -> Vec<Vec<Mat<c64>>> {
    let d = t.len();
    (0..d)
        .map(|i| (0..d).map(|j| (&t[i][j] + &t[j][i]) * faer::Scale(c64::new(0.5, 0.0))).collect())
        .collect()
}

#[derive(Clone, Debug)]
pub struct HfhTensors {
    pub omega0: f64,
    pub q: Mat<c64>,
    pub p: Vec<Mat<c64>>,
    pub classification: Classification,
    /// Unsymmetrised cell integrals.
    pub t_hat: Vec<Vec<Mat<c64>>>,
    /// `Q⁻¹T̂`, symmetrised over `(i, j)`.
    pub t: Vec<Vec<Mat<c64>>>,
    /// Unitary matrix of the eigenvectors of a generic combination of the `T_ij`.
    pub m: Mat<c64>,
    pub t_tilde: Vec<Vec<Mat<c64>>>,
    pub decoupling_residual: f64,
    pub decoupled: bool,
    pub compatibility: f64,
    pub first_order_residual: f64,
}

impl HfhTensors {
    /// Diagonal of the decoupled tensor for mode `r` as a real `d × d` matrix.
    pub fn branch_tensor(&self, r: usize) -> Vec<Vec<f64>> {
        self.t_tilde.iter().map(|row| row.iter().map(|m| m[(r, r)].re).collect()).collect()
    }

    /// Eigenvalues of `Σ n_i n_j T_ij`, ascending: `Ω² ≈ Ω0² + λ|κ|²` along `n`.
    pub fn directional(&self, n: &[f64]) -> Vec<f64> {
        directional_eigenvalues(&self.t, n)
    }
}

pub fn directional_eigenvalues(t: &[Vec<Mat<c64>>], n: &[f64]) -> Vec<f64> {
    let p = t[0][0].nrows();
    let mut s = Mat::<c64>::zeros(p, p);
    for i in 0..t.len() {
        for j in 0..t.len() {
            s += &t[i][j] * faer::Scale(c64::new(n[i] * n[j], 0.0));
        }
    }
    hermitian_eigen(&s).0
}

/// Ascending eigenvalues and eigenvectors of the Hermitian part of `m`.
pub fn hermitian_eigen(m: &Mat<c64>) -> (Vec<f64>, Mat<c64>) {
    let p = m.nrows();
    let h = Mat::from_fn(p, p, |a, b| (m[(a, b)] + m[(b, a)].conj()) * 0.5);
    let evd = h.self_adjoint_eigen(Side::Lower).expect("small Hermitian eigenproblem");
    let s = evd.S().column_vector();
    ((0..p).map(|i| s[i].re).collect(), evd.U().to_owned())
}

/// Second-order tensors of an essential group.
pub fn compute_t(
    group: &StandingWaveGroup,
    first: &FirstOrderField,
    p_mats: Vec<Mat<c64>>,
    seed: u64,
    decouple_tol: f64,
) -> Result<HfhTensors> {
    let q = group.q();
    let t_hat = t_hat_raw(group, first)?;
    let qinv = q.partial_piv_lu().inverse();
    let t_full: Vec<Vec<Mat<c64>>> =
        t_hat.iter().map(|row| row.iter().map(|m| &qinv * m).collect()).collect();
    let t = symmetrise(&t_full);
    let d = t.len();
    let p = group.p();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut combo = Mat::<c64>::zeros(p, p);
    for i in 0..d {
        for j in i..d {
            let c: f64 = rng.gen_range(-1.0..1.0);
            combo += &t[i][j] * faer::Scale(c64::new(c, 0.0));
        }
    }
    let (_, m) = hermitian_eigen(&combo);
    let mut scale: f64 = 0.0;
    let mut off: f64 = 0.0;
    let t_tilde: Vec<Vec<Mat<c64>>> = t
        .iter()
        .map(|row| {
            row.iter()
                .map(|tij| {
                    let x = m.adjoint() * tij * &m;
                    for a in 0..p {
                        for b in 0..p {
                            let v = x[(a, b)].norm();
                            scale = scale.max(v);
                            if a != b {
                                off = off.max(v);
                            }
                        }
                    }
                    x
                })
                .collect()
        })
        .collect();
    let decoupling_residual = if scale > 0.0 { off / scale } else { 0.0 };
    Ok(HfhTensors {
        omega0: group.omega0,
        classification: classify(&p_mats, group.omega0.max(f64::MIN_POSITIVE), CLASSIFY_TOL),
        q,
        p: p_mats,
        t_hat,
        t,
        m,
        t_tilde,
        decoupling_residual,
        decoupled: decoupling_residual <= decouple_tol,
        compatibility: first.compatibility,
        first_order_residual: first.residual,
    })
}

