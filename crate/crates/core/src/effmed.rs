//! Quasi-static homogenisation, long-scale PDE classification and
//! evanescent decay rates.

use faer::linalg::solvers::DenseSolveCore;
use faer::{c64, Mat, Side};
use serde::Serialize;

use crate::bloch::{BlochOperator, PhysicsMode};
use crate::error::{Error, Result};
use crate::geom::{add, levi_civita, scale, Vec3};
use crate::hfh::{solve_first_order_all, t_hat_raw, FirstOrderField, StandingWaveGroup};
use crate::medium::CoefficientRole;

/// Default threshold below which a tensor eigenvalue counts as zero.
pub const DEGENERACY_TOL: f64 = 1e-3;

#[derive(Clone, Debug, Serialize)]
pub struct EffectivePermittivity {
    /// `ε^hom`.
    pub eps: Vec<Vec<f64>>,
    /// `ε^{-1,hom} = ⟨ε⁻¹⟩ I + correction`.
    pub inv_eps: Vec<Vec<f64>>,
    pub mean_inv_eps: f64,
    pub correction: Vec<Vec<f64>>,
    pub eigenvalues: Vec<f64>,
    /// Harmonic and arithmetic means of ε.
    pub wiener_bounds: (f64, f64),
}

impl EffectivePermittivity {
    /// Smallest distance of an eigenvalue inside the Wiener bounds (negative when outside).
    pub fn wiener_margin(&self) -> f64 {
        let (lo, hi) = self.wiener_bounds;
        self.eigenvalues.iter().map(|&e| (e - lo).min(hi - e)).fold(f64::INFINITY, f64::min)
    }
}

/// Static cell solution: rank-4 tensor `T_ij^{nr}` and first-order fields.
pub struct StaticSolution {
    /// `t[i][j][(n, r)]`, unsymmetrised.
    pub t: Vec<Vec<Mat<c64>>>,
    pub first: FirstOrderField,
    pub effective: EffectivePermittivity,
}

fn sym_eigen(m: &[Vec<f64>]) -> Vec<f64> {
    let d = m.len();
    let a = Mat::<f64>::from_fn(d, d, |i, j| 0.5 * (m[i][j] + m[j][i]));
    let s = a.self_adjoint_eigenvalues(Side::Lower).expect("small symmetric eigenproblem");
    s.to_vec()
}

fn inverse(m: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let d = m.len();
    let a = Mat::<f64>::from_fn(d, d, |i, j| m[i][j]);
    let inv = a.partial_piv_lu().inverse();
    (0..d).map(|i| (0..d).map(|j| inv[(i, j)]).collect()).collect()
}

/// Effective permittivity from the static cell problems at Γ. `op` must use a
/// Γ-centred basis; vector problems need a bulk 3D medium.
pub fn low_frequency_tensor(op: &BlochOperator) -> Result<StaticSolution> {
    if let PhysicsMode::Quasi2d { .. } = op.mode() {
        return Err(Error::InvalidArgument(
            "quasi-static homogenisation needs Vector3d or a scalar polarisation".into(),
        ));
    }
    if op.mode() == PhysicsMode::Vector3d && op.long_dims() != 3 {
        return Err(Error::InvalidArgument("quasi-static homogenisation needs a bulk 3D cell".into()));
    }
    let group = StandingWaveGroup::static_fields(op)?;
    let first = solve_first_order_all(&group)?;
    let t = t_hat_raw(&group, &first)?;
    let d = t.len();
    let lattice = op.lattice();
    let medium = op.medium();
    let mean_inv_eps = medium.mean(lattice, CoefficientRole::InvEps)?;
    let mean_eps = medium.mean(lattice, CoefficientRole::Eps)?;
    let inv_eps: Vec<Vec<f64>> = if op.mode() == PhysicsMode::Vector3d {
        (0..3)
            .map(|k| {
                (0..3)
                    .map(|l| {
                        let mut s = 0.0;
                        for n in 0..3 {
                            for i in 0..3 {
                                for j in 0..3 {
                                    for r in 0..3 {
                                        let w = levi_civita(n, i, k) * levi_civita(j, r, l);
                                        if w != 0.0 {
                                            s += w * t[i][j][(n, r)].re;
                                        }
                                    }
                                }
                            }
                        }
                        -0.25 * s
                    })
                    .collect()
            })
            .collect()
    } else {
        (0..d)
            .map(|i| (0..d).map(|j| 0.5 * (t[i][j][(0, 0)].re + t[j][i][(0, 0)].re)).collect())
            .collect()
    };
    let eps = inverse(&inv_eps);
    let eigenvalues = sym_eigen(&eps);
    if let Some(&bad) = eigenvalues.iter().find(|&&e| !(e > 0.0)) {
        return Err(Error::NotPositiveDefinite(bad));
    }
    let correction = (0..d)
        .map(|i| (0..d).map(|j| inv_eps[i][j] - if i == j { mean_inv_eps } else { 0.0 }).collect())
        .collect();
    Ok(StaticSolution {
        t,
        first,
        effective: EffectivePermittivity {
            eps,
            inv_eps,
            mean_inv_eps,
            correction,
            eigenvalues,
            wiener_bounds: (1.0 / mean_inv_eps, mean_eps),
        },
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SymmetryReport {
    /// `T_ij^{nr} = T_nr^{ij}`.
    pub pair_exchange: f64,
    /// `T_ij^{nr} = −T_ir^{nj}`.
    pub swap_jr: f64,
    /// `T_ij^{nr} = −T_nj^{ir}`.
    pub swap_in: f64,
    /// `h1_j^{(r)} = −h1_r^{(j)}`.
    pub h1_antisymmetry: f64,
    /// `h1_r^{(r)} = 0`.
    pub h1_diagonal: f64,
    pub passed: bool,
}

/// Index symmetries of the static tensor, relative to its largest entry.
pub fn verify_symmetries(s: &StaticSolution) -> SymmetryReport {
    let t = &s.t;
    let d = t.len();
    let p = t[0][0].nrows();
    let scale_t = (0..d)
        .flat_map(|i| (0..d).map(move |j| (i, j)))
        .flat_map(|(i, j)| (0..p).flat_map(move |n| (0..p).map(move |r| (i, j, n, r))))
        .map(|(i, j, n, r)| t[i][j][(n, r)].norm())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let (mut a, mut b, mut c) = (0.0f64, 0.0f64, 0.0f64);
    if p == d {
        for i in 0..d {
            for j in 0..d {
                for n in 0..d {
                    for r in 0..d {
                        let v = t[i][j][(n, r)];
                        a = a.max((v - t[n][r][(i, j)]).norm());
                        b = b.max((v + t[i][r][(n, j)]).norm());
                        c = c.max((v + t[n][j][(i, r)]).norm());
                    }
                }
            }
        }
    }
    let h1 = &s.first.h1;
    let h_scale = h1.iter().flatten().map(|m| m.norm_l2()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let (mut anti, mut diag) = (0.0f64, 0.0f64);
    if p == d {
        for r in 0..d {
            diag = diag.max(h1[r][r].norm_l2());
            for j in 0..d {
                anti = anti.max((&h1[r][j] + &h1[j][r]).norm_l2());
            }
        }
    }
    let rep = SymmetryReport {
        pair_exchange: a / scale_t,
        swap_jr: b / scale_t,
        swap_in: c / scale_t,
        h1_antisymmetry: anti / h_scale,
        h1_diagonal: diag / h_scale,
        passed: false,
    };
    let passed = [rep.pair_exchange, rep.swap_jr, rep.swap_in, rep.h1_antisymmetry, rep.h1_diagonal]
        .iter()
        .all(|&x| x <= 1e-6);
    SymmetryReport { passed, ..rep }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PdeKind {
    Elliptic,
    Hyperbolic,
    Degenerate,
}

#[derive(Clone, Debug, Serialize)]
pub struct PdeClassification {
    pub kind: PdeKind,
    pub eigenvalues: Vec<f64>,
}

pub fn classify_pde(t: &[Vec<f64>], tol: f64) -> PdeClassification {
    let eigenvalues = sym_eigen(t);
    let kind = if eigenvalues.iter().any(|e| e.abs() < tol) {
        PdeKind::Degenerate
    } else if eigenvalues.iter().all(|&e| e > 0.0) || eigenvalues.iter().all(|&e| e < 0.0) {
        PdeKind::Elliptic
    } else {
        PdeKind::Hyperbolic
    };
    PdeClassification { kind, eigenvalues }
}

#[derive(Clone, Debug, Serialize)]
pub struct DecayEstimate {
    pub direction: usize,
    /// Decay rate in units of `1/l`.
    pub alpha: f64,
    pub omega0: f64,
    pub omega: f64,
    pub t_dd: f64,
}

/// `α = √((Ω0² − Ω²)/T_dd)` for the evanescent envelope `e^{−αx}`.
pub fn decay_rate(t: &[Vec<f64>], omega0: f64, omega: f64, direction: usize) -> Result<DecayEstimate> {
    let t_dd = *t
        .get(direction)
        .and_then(|row| row.get(direction))
        .ok_or_else(|| Error::InvalidArgument(format!("no tensor component for direction {direction}")))?;
    let ratio = (omega0 * omega0 - omega * omega) / t_dd;
    if ratio < 0.0 || !ratio.is_finite() {
        return Err(Error::PropagatingSide { omega0, omega });
    }
    Ok(DecayEstimate { direction, alpha: ratio.sqrt(), omega0, omega, t_dd })
}

/// Phase speed of the lowest band at Γ along `direction`, from `Ω(h)/h`
/// with one Richardson step.
pub fn fd_phase_speed(op: &BlochOperator, direction: Vec3, h: f64) -> Result<f64> {
    let speed = |t: f64| -> Result<f64> {
        let w = op.frequencies(add([0.0; 3], scale(t, direction)), 1)?;
        Ok(w[0] / t)
    };
    let s1 = speed(h)?;
    let s2 = speed(h / 2.0)?;
    Ok((4.0 * s2 - s1) / 3.0)
}

#[derive(Clone, Debug, Serialize)]
pub struct PhaseSpeedCheck {
    pub direction: Vec3,
    /// From the lowest band near Γ.
    pub fd: f64,
    /// `1/√ε^hom` along `direction`.
    pub predicted: f64,
    pub rel_error: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct EffectiveReport {
    pub effective: EffectivePermittivity,
    pub wiener_margin: f64,
    pub symmetries: SymmetryReport,
    pub phase_speed: Vec<PhaseSpeedCheck>,
}

/// Homogenised tensor with its diagnostics; `step` is the acoustic-branch probe offset.
pub fn effective_report(op: &BlochOperator, step: f64) -> Result<EffectiveReport> {
    let s = low_frequency_tensor(op)?;
    let d = op.long_dims();
    let mut phase_speed = Vec::new();
    for axis in 0..d {
        let dir = crate::geom::unit(axis);
        let fd = fd_phase_speed(op, dir, step)?;
        let predicted = 1.0 / s.effective.eps[axis][axis].sqrt();
        phase_speed.push(PhaseSpeedCheck { direction: dir, fd, predicted, rel_error: (fd - predicted).abs() / predicted });
    }
    Ok(EffectiveReport {
        wiener_margin: s.effective.wiener_margin(),
        symmetries: verify_symmetries(&s),
        effective: s.effective,
        phase_speed,
    })
}
