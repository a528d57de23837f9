use faer::linalg::solvers::DenseSolveCore;
use faer::{c64, Mat};
use serde::Serialize;

use super::group::StandingWaveGroup;
use super::ops::FieldOps;
use super::tensors::{classify, hermitian_eigen, Classification, FirstOrderSolver, CLASSIFY_TOL};
use crate::bloch::frob_inner;
use crate::error::{Error, Result};
use crate::geom::Vec3;

const I: c64 = c64 { re: 0.0, im: 1.0 };

#[derive(Clone, Copy, Debug, Serialize)]
pub struct DiracBranch {
    /// Eigenvalue `λ` of `−i Σ C_j κ̂_j`, so that `Ω² ≈ Ω0² + λ|κ|`.
    pub eigenvalue: f64,
    /// `dΩ/d|κ| = λ / 2Ω0`.
    pub slope: f64,
    /// Set when `λ` vanishes and the branch is quadratic along this direction.
    pub quadratic: bool,
    /// For quadratic branches, `t` in `Ω² ≈ Ω0² + t|κ|²`.
    pub curvature: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct DiracModel {
    pub direction: Vec3,
    pub omega0: f64,
    /// `C_j = Q⁻¹ P_j`.
    pub c: Vec<Mat<c64>>,
    /// `D_ij = −C_j C_i`.
    pub d: Vec<Vec<Mat<c64>>>,
    /// Ordered by slope.
    pub branches: Vec<DiracBranch>,
}

impl DiracModel {
    /// `Ω0 + slope·|κ|` per branch (quadratic branches include their curvature).
    pub fn omega(&self, kappa: f64) -> Vec<f64> {
        self.branches
            .iter()
            .map(|b| match b.curvature {
                Some(t) => self.omega0 + t * kappa * kappa / (2.0 * self.omega0),
                None => self.omega0 + b.slope * kappa,
            })
            .collect()
    }

    /// `√(Ω0² + λ|κ|)` per branch.
    pub fn omega_sqrt(&self, kappa: f64) -> Vec<f64> {
        self.branches
            .iter()
            .map(|b| (self.omega0 * self.omega0 + b.eigenvalue * kappa).max(0.0).sqrt())
            .collect()
    }
}

pub fn dirac_matrices(p: &[Mat<c64>], q: &Mat<c64>) -> (Vec<Mat<c64>>, Vec<Vec<Mat<c64>>>) {
    let qinv = q.partial_piv_lu().inverse();
    let c: Vec<Mat<c64>> = p.iter().map(|pj| &qinv * pj).collect();
    let d = (0..c.len())
        .map(|i| (0..c.len()).map(|j| (&c[j] * &c[i]) * faer::Scale(c64::new(-1.0, 0.0))).collect())
        .collect();
    (c, d)
}

/// `−i Σ_j C_j n_j`, Hermitian when `P` is anti-Hermitian.
pub fn dirac_operator(c: &[Mat<c64>], n: &[f64]) -> Mat<c64> {
    let p = c[0].nrows();
    let mut m = Mat::<c64>::zeros(p, p);
    for (j, cj) in c.iter().enumerate() {
        m += cj * faer::Scale(-I * n[j]);
    }
    m
}

/// Linear branches of an accidental degeneracy along `direction`. Branches
/// whose slope vanishes get a quadratic curvature from a directional
/// second-order cell problem.
pub fn dirac_dispersion(
    group: &StandingWaveGroup,
    p: &[Mat<c64>],
    q: &Mat<c64>,
    direction: Vec3,
) -> Result<DiracModel> {
    let omega0 = group.omega0;
    if omega0 == 0.0 {
        return Err(Error::ZeroFrequency);
    }
    if classify(p, omega0, CLASSIFY_TOL) == Classification::Essential {
        return Err(Error::Classification { expected: "dirac", found: "essential" });
    }
    let (c, d) = dirac_matrices(p, q);
    let dims = c.len();
    let (lam, u) = hermitian_eigen(&dirac_operator(&c, &direction[..dims]));
    let zero: Vec<usize> = (0..lam.len()).filter(|&a| lam[a].abs() <= CLASSIFY_TOL * omega0).collect();
    let mut curv = vec![None; lam.len()];
    if !zero.is_empty() {
        let t = null_space_curvatures(group, &u, &zero, &direction[..dims])?;
        for (k, &a) in zero.iter().enumerate() {
            curv[a] = Some(t[k]);
        }
    }
    let mut branches: Vec<DiracBranch> = (0..lam.len())
        .map(|a| DiracBranch {
            eigenvalue: lam[a],
            slope: if curv[a].is_some() { 0.0 } else { lam[a] / (2.0 * omega0) },
            quadratic: curv[a].is_some(),
            curvature: curv[a],
        })
        .collect();
    branches.sort_by(|a, b| a.slope.total_cmp(&b.slope).then(a.curvature.unwrap_or(0.0).total_cmp(&b.curvature.unwrap_or(0.0))));
    Ok(DiracModel { direction, omega0, c, d, branches })
}

fn null_space_curvatures(group: &StandingWaveGroup, u: &Mat<c64>, zero: &[usize], n: &[f64]) -> Result<Vec<f64>> {
    let ops = FieldOps::new(group.op, &group.frames);
    let solver = FirstOrderSolver::new(group)?;
    let states: Vec<Mat<c64>> = zero
        .iter()
        .map(|&a| {
            let mut h = ops.zeros();
            for (r, m) in group.modes.iter().enumerate() {
                h += m * faer::Scale(u[(r, a)]);
            }
            h
        })
        .collect();
    let a_dir = |h: &Mat<c64>| {
        let mut out = ops.zeros();
        for (j, &nj) in n.iter().enumerate() {
            out += ops.a_j(j, h.as_ref()) * faer::Scale(c64::new(nj, 0.0));
        }
        out
    };
    let a_dir2 = |h: &Mat<c64>| {
        let mut out = ops.zeros();
        for (i, &ni) in n.iter().enumerate() {
            for (j, &nj) in n.iter().enumerate() {
                out += ops.a_ij(i, j, h.as_ref()) * faer::Scale(c64::new(ni * nj, 0.0));
            }
        }
        out
    };
    let mut h1 = Vec::new();
    for s in &states {
        let rhs = a_dir(s) * faer::Scale(I);
        h1.push(solver.solve(rhs.as_ref())?.field);
    }
    let m = zero.len();
    let w = Mat::from_fn(m, m, |a, b| {
        frob_inner(states[a].as_ref(), a_dir2(&states[b]).as_ref())
            + I * frob_inner(states[a].as_ref(), a_dir(&h1[b]).as_ref())
    });
    Ok(hermitian_eigen(&w).0)
}
