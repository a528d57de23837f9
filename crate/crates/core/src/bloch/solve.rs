use faer::prelude::*;
use faer::{c64, Mat, Side};

use super::operator::{BlochOperator, Frames, OperatorPair};
use crate::error::{Error, Result};
use crate::geom::Vec3;

/// Frequencies below this are reported as exactly zero.
pub const OMEGA_FLOOR: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct Eigenpairs {
    /// Ascending eigenvalues `Ω²`.
    pub values: Vec<f64>,
    /// B-orthonormal eigenvectors, one per column.
    pub vectors: Mat<c64>,
}

fn is_real(m: &Mat<c64>) -> bool {
    (0..m.ncols()).all(|c| (0..m.nrows()).all(|r| m[(r, c)].im == 0.0))
}

fn standard_eigen(c: &Mat<c64>, n_bands: usize, vectors: bool) -> Result<(Vec<f64>, Option<Mat<c64>>)> {
    let fail = |e| Error::Eigensolver(format!("{e:?}"));
    let n = c.nrows();
    if is_real(c) {
        let re = Mat::<f64>::from_fn(n, n, |i, j| c[(i, j)].re);
        if vectors {
            let evd = re.self_adjoint_eigen(Side::Lower).map_err(fail)?;
            let s = evd.S().column_vector();
            let u = evd.U();
            let vals = (0..n_bands).map(|i| s[i]).collect();
            let vecs = Mat::from_fn(n, n_bands, |i, j| c64::new(u[(i, j)], 0.0));
            Ok((vals, Some(vecs)))
        } else {
            let s = re.self_adjoint_eigenvalues(Side::Lower).map_err(fail)?;
            Ok((s[..n_bands].to_vec(), None))
        }
    } else if vectors {
        let evd = c.self_adjoint_eigen(Side::Lower).map_err(fail)?;
        let s = evd.S().column_vector();
        let vals = (0..n_bands).map(|i| s[i].re).collect();
        let vecs = evd.U().subcols(0, n_bands).to_owned();
        Ok((vals, Some(vecs)))
    } else {
        let s = c.self_adjoint_eigenvalues(Side::Lower).map_err(fail)?;
        Ok((s[..n_bands].to_vec(), None))
    }
}

fn solve_impl(pair: &OperatorPair, n_bands: usize, vectors: bool) -> Result<(Vec<f64>, Option<Mat<c64>>)> {
    let n = pair.a.nrows();
    if n_bands > n || n_bands == 0 {
        return Err(Error::TooManyBands { requested: n_bands, available: n });
    }
    let (values, vecs) = match &pair.b {
        None => standard_eigen(&pair.a, n_bands, vectors)?,
        Some(b) => {
            let llt = b
                .llt(Side::Lower)
                .map_err(|e| Error::Eigensolver(format!("mass matrix not positive definite: {e:?}")))?;
            let l = llt.L();
            let mut w = pair.a.clone();
            l.solve_lower_triangular_in_place(w.as_mut());
            let mut c = w.adjoint().to_owned();
            l.solve_lower_triangular_in_place(c.as_mut());
            let c = Mat::from_fn(n, n, |r, s| (c[(r, s)] + c[(s, r)].conj()) * 0.5);
            let (values, y) = standard_eigen(&c, n_bands, vectors)?;
            let vecs = y.map(|mut y| {
                l.adjoint().solve_upper_triangular_in_place(y.as_mut());
                y
            });
            (values, vecs)
        }
    };
    let scale = (0..n).map(|i| pair.a[(i, i)].re.abs()).fold(1.0, f64::max);
    for (band, &v) in values.iter().enumerate() {
        if v < -1e-10 * scale {
            return Err(Error::NegativeEigenvalue { band, value: v });
        }
    }
    Ok((values, vecs))
}

/// Lowest `n_bands` eigenpairs of `A v = Ω² B v`.
pub fn solve_pair(pair: &OperatorPair, n_bands: usize) -> Result<Eigenpairs> {
    let (values, vectors) = solve_impl(pair, n_bands, true)?;
    Ok(Eigenpairs { values, vectors: vectors.expect("vectors requested") })
}

/// Lowest `n_bands` eigenvalues only.
pub fn eigenvalues_pair(pair: &OperatorPair, n_bands: usize) -> Result<Vec<f64>> {
    Ok(solve_impl(pair, n_bands, false)?.0)
}

pub fn omega_of(lambda: f64) -> f64 {
    let w = lambda.max(0.0).sqrt();
    if w < OMEGA_FLOOR {
        0.0
    } else {
        w
    }
}

/// `‖A v − λ B v‖ / ‖v‖`.
pub fn pair_residual(pair: &OperatorPair, lambda: f64, v: MatRef<'_, c64>) -> f64 {
    let av = &pair.a * v;
    let bv = match &pair.b {
        Some(b) => b * v,
        None => v.to_owned(),
    };
    let r = av - bv * faer::Scale(c64::new(lambda, 0.0));
    r.norm_l2() / v.norm_l2()
}

/// Eigenpairs of the cell problem at one Bloch vector.
#[derive(Clone, Debug)]
pub struct BlochSolution {
    pub k: Vec3,
    pub eigenvalues: Vec<f64>,
    /// Ascending frequencies `Ω = √λ`.
    pub omegas: Vec<f64>,
    /// Eigenvectors in solve coordinates, one column per band.
    pub vectors: Mat<c64>,
    pub frames: Frames,
}

impl BlochSolution {
    pub fn n_bands(&self) -> usize {
        self.omegas.len()
    }

    /// Field coefficients (plane waves × components) of band `n`.
    pub fn full_mode(&self, n: usize) -> Mat<c64> {
        self.frames.to_full(self.vectors.subcols(n, 1))
    }
}

impl BlochOperator {
    pub fn solve(&self, k: Vec3, n_bands: usize) -> Result<BlochSolution> {
        let (pair, frames) = self.assemble(k)?;
        let ep = solve_pair(&pair, n_bands)?;
        Ok(BlochSolution {
            k,
            omegas: ep.values.iter().map(|&l| omega_of(l)).collect(),
            eigenvalues: ep.values,
            vectors: ep.vectors,
            frames,
        })
    }

    pub fn frequencies(&self, k: Vec3, n_bands: usize) -> Result<Vec<f64>> {
        let (pair, _) = self.assemble(k)?;
        Ok(eigenvalues_pair(&pair, n_bands)?.into_iter().map(omega_of).collect())
    }
}
