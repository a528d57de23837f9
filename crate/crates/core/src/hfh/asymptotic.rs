use faer::{c64, Mat};

use super::dirac::dirac_operator;
use super::tensors::{directional_eigenvalues, hermitian_eigen, HfhTensors};
use crate::geom::Vec3;

#[derive(Clone, Debug)]
pub enum BranchModel {
    /// `Ω ≈ Ω0 + T_ij κ_i κ_j / 2Ω0` per decoupled mode, or from the
    /// eigenvalues of `Σ κ_i κ_j T_ij` when the modes stay coupled.
    Quadratic { t: Vec<Vec<Mat<c64>>>, decoupled: Option<Vec<Vec<Vec<f64>>>> },
    /// `Ω ≈ Ω0 + λ(κ)/2Ω0` with `λ` the eigenvalues of `−i Σ C_j κ_j`.
    Linear { c: Vec<Mat<c64>> },
}

/// Local dispersion model about a standing-wave frequency.
#[derive(Clone, Debug)]
pub struct AsymptoticBand {
    pub k0: Vec3,
    pub omega0: f64,
    pub model: BranchModel,
}

impl AsymptoticBand {
    pub fn quadratic(k0: Vec3, tensors: &HfhTensors) -> Self {
        let p = tensors.q.nrows();
        let decoupled = tensors.decoupled.then(|| (0..p).map(|r| tensors.branch_tensor(r)).collect());
        Self {
            k0,
            omega0: tensors.omega0,
            model: BranchModel::Quadratic { t: tensors.t.clone(), decoupled },
        }
    }

    pub fn linear(k0: Vec3, omega0: f64, c: Vec<Mat<c64>>) -> Self {
        Self { k0, omega0, model: BranchModel::Linear { c } }
    }

    pub fn branches(&self) -> usize {
        match &self.model {
            BranchModel::Quadratic { t, .. } => t[0][0].nrows(),
            BranchModel::Linear { c } => c[0].nrows(),
        }
    }

    /// Frequencies of every branch at offset `κ` from the vertex.
    pub fn evaluate(&self, kappa: Vec3) -> Vec<f64> {
        let w0 = self.omega0;
        match &self.model {
            BranchModel::Quadratic { t, decoupled } => {
                let d = t.len();
                match decoupled {
                    Some(branches) => branches
                        .iter()
                        .map(|tr| {
                            let mut s = 0.0;
                            for i in 0..d {
                                for j in 0..d {
                                    s += tr[i][j] * kappa[i] * kappa[j];
                                }
                            }
                            w0 + s / (2.0 * w0)
                        })
                        .collect(),
                    None => directional_eigenvalues(t, &kappa[..d])
                        .into_iter()
                        .map(|l| w0 + l / (2.0 * w0))
                        .collect(),
                }
            }
            BranchModel::Linear { c } => {
                let m = dirac_operator(c, &kappa[..c.len()]);
                hermitian_eigen(&m).0.into_iter().map(|l| w0 + l / (2.0 * w0)).collect()
            }
        }
    }
}
