use faer::linalg::solvers::DenseSolveCore;
use faer::{c64, Mat, MatRef, Side};

use super::basis::PlaneWaveBasis;
use super::mode::{FourierRule, PhysicsMode};
use crate::error::{Error, Result};
use crate::geom::{add, cross, dot, norm, normalize, unit, Vec3};
use crate::lattice::LatticeSpec;
use crate::medium::{Cell, CoefficientRole, MediumSpec};

/// Polarisation frames of the solve coordinates. Scalar modes have one
/// coordinate per plane wave; vector modes have two vectors transverse to
/// `K̃ + G`, or all three axes where `K̃ + G = 0`.
#[derive(Clone, Debug)]
pub struct Frames {
    pub k_tilde: Vec3,
    /// `K̃ + G` for every plane wave.
    pub kg: Vec<Vec3>,
    /// Plane wave owning each solve coordinate.
    pub owner: Vec<usize>,
    /// Polarisation of each solve coordinate (vector modes only).
    pub dirs: Vec<Vec3>,
    pub vector: bool,
}

impl Frames {
    fn new(basis: &PlaneWaveBasis, k_tilde: Vec3, vector: bool) -> Self {
        let kg: Vec<Vec3> = (0..basis.len()).map(|n| add(k_tilde, basis.g(n))).collect();
        let mut owner = Vec::new();
        let mut dirs = Vec::new();
        for (n, &q) in kg.iter().enumerate() {
            if !vector {
                owner.push(n);
                continue;
            }
            if norm(q) < 1e-9 {
                for a in 0..3 {
                    owner.push(n);
                    dirs.push(unit(a));
                }
                continue;
            }
            let khat = normalize(q);
            let mut axis = 0;
            for a in 1..3 {
                if khat[a].abs() < khat[axis].abs() - 1e-12 {
                    axis = a;
                }
            }
            let e1 = normalize(cross(khat, unit(axis)));
            let e2 = cross(khat, e1);
            owner.extend([n, n]);
            dirs.extend([e1, e2]);
        }
        Self { k_tilde, kg, owner, dirs, vector }
    }

    pub fn len(&self) -> usize {
        self.owner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.owner.is_empty()
    }

    pub fn components(&self) -> usize {
        if self.vector {
            3
        } else {
            1
        }
    }

    /// Field coefficients (plane waves × components) of a solve-coordinate vector.
    pub fn to_full(&self, c: MatRef<'_, c64>) -> Mat<c64> {
        let mut h = Mat::<c64>::zeros(self.kg.len(), self.components());
        for (a, &n) in self.owner.iter().enumerate() {
            let v = c[(a, 0)];
            if self.vector {
                for i in 0..3 {
                    h[(n, i)] += v * self.dirs[a][i];
                }
            } else {
                h[(n, 0)] += v;
            }
        }
        h
    }

    /// Projection of a full field onto the solve coordinates.
    pub fn from_full(&self, h: MatRef<'_, c64>) -> Mat<c64> {
        Mat::from_fn(self.len(), 1, |a, _| {
            let n = self.owner[a];
            if self.vector {
                (0..3).map(|i| h[(n, i)] * self.dirs[a][i]).sum()
            } else {
                h[(n, 0)]
            }
        })
    }
}

/// Generalized Hermitian pair `A v = Ω² B v`; `b = None` means `B = I`.
#[derive(Clone, Debug)]
pub struct OperatorPair {
    pub a: Mat<c64>,
    pub b: Option<Mat<c64>>,
}

/// Discretised cell operator for one medium, mode and basis; assembles the
/// eigenproblem at any Bloch vector.
#[derive(Clone, Debug)]
pub struct BlochOperator {
    lattice: LatticeSpec,
    medium: MediumSpec,
    mode: PhysicsMode,
    rule: FourierRule,
    basis: PlaneWaveBasis,
    /// Fourier matrix of the stiffness coefficient; `None` is the identity.
    stiffness: Option<Mat<c64>>,
    /// Fourier matrix of the mass coefficient; `None` is the identity.
    mass: Option<Mat<c64>>,
}

fn toeplitz(medium: &MediumSpec, basis: &PlaneWaveBasis, role: CoefficientRole) -> Mat<c64> {
    let idx = basis.indices();
    let cell = basis.cell();
    Mat::from_fn(idx.len(), idx.len(), |r, c| {
        let (a, b) = (idx[r], idx[c]);
        medium.coefficient_at(cell, role, [a[0] - b[0], a[1] - b[1], a[2] - b[2]])
    })
}

fn hermitian_part(m: &Mat<c64>) -> Mat<c64> {
    Mat::from_fn(m.nrows(), m.ncols(), |r, c| (m[(r, c)] + m[(c, r)].conj()) * 0.5)
}

impl BlochOperator {
    pub fn new(
        lattice: LatticeSpec,
        medium: MediumSpec,
        mode: PhysicsMode,
        basis: PlaneWaveBasis,
        rule: FourierRule,
    ) -> Result<Self> {
        mode.validate(&lattice)?;
        let cell = medium.cell(&lattice)?;
        if cell != *basis.cell() {
            return Err(Error::InvalidArgument("basis was built for a different cell".into()));
        }
        let (stiffness, mass) = match mode {
            PhysicsMode::ScalarE3 => (None, Some(toeplitz(&medium, &basis, CoefficientRole::Eps))),
            _ => {
                let e = match rule {
                    FourierRule::Direct => toeplitz(&medium, &basis, CoefficientRole::InvEps),
                    FourierRule::Inverse => {
                        let t = toeplitz(&medium, &basis, CoefficientRole::Eps);
                        let llt = t.llt(Side::Lower).map_err(|e| {
                            Error::Eigensolver(format!("permittivity matrix not positive definite: {e:?}"))
                        })?;
                        hermitian_part(&llt.inverse())
                    }
                };
                (Some(e), None)
            }
        };
        Ok(Self { lattice, medium, mode, rule, basis, stiffness, mass })
    }

    /// Operator with the default basis (Γ-centred, or centred on `k0` when given).
    pub fn with_cutoff(
        lattice: LatticeSpec,
        medium: MediumSpec,
        mode: PhysicsMode,
        cutoff: usize,
        rule: FourierRule,
        k0: Option<Vec3>,
    ) -> Result<Self> {
        let cell = medium.cell(&lattice)?;
        let cutoffs = PlaneWaveBasis::default_cutoffs(&cell, cutoff);
        let basis = PlaneWaveBasis::centred(cell, cutoffs, k0.unwrap_or([0.0; 3]))?;
        Self::new(lattice, medium, mode, basis, rule)
    }

    pub fn lattice(&self) -> &LatticeSpec {
        &self.lattice
    }

    pub fn medium(&self) -> &MediumSpec {
        &self.medium
    }

    pub fn mode(&self) -> PhysicsMode {
        self.mode
    }

    pub fn rule(&self) -> FourierRule {
        self.rule
    }

    pub fn basis(&self) -> &PlaneWaveBasis {
        &self.basis
    }

    pub fn cell(&self) -> &Cell {
        self.basis.cell()
    }

    pub fn stiffness(&self) -> Option<&Mat<c64>> {
        self.stiffness.as_ref()
    }

    pub fn mass(&self) -> Option<&Mat<c64>> {
        self.mass.as_ref()
    }

    /// Number of long-scale directions: in-plane for 2D, fibre and supercell
    /// problems, three for bulk 3D media.
    pub fn long_dims(&self) -> usize {
        match self.mode {
            PhysicsMode::Vector3d if self.medium.supercell_height().is_none() => 3,
            _ => 2,
        }
    }

    /// Bloch vector including the fixed axial wavenumber of fibre problems.
    pub fn k_tilde(&self, k: Vec3) -> Vec3 {
        let mut kt = k;
        if let PhysicsMode::Quasi2d { beta_l } = self.mode {
            kt[2] = beta_l;
        }
        kt
    }

    pub fn frames(&self, k: Vec3) -> Frames {
        Frames::new(&self.basis, self.k_tilde(k), self.mode.is_vector())
    }

    pub fn assemble(&self, k: Vec3) -> Result<(OperatorPair, Frames)> {
        let frames = self.frames(k);
        let n = frames.len();
        let a = match self.mode {
            PhysicsMode::ScalarE3 => Mat::from_fn(n, n, |r, c| {
                if r == c {
                    c64::new(dot(frames.kg[r], frames.kg[r]), 0.0)
                } else {
                    c64::new(0.0, 0.0)
                }
            }),
            PhysicsMode::ScalarH3 => {
                let e = self.stiffness.as_ref().expect("H3 has a stiffness matrix");
                Mat::from_fn(n, n, |r, c| e[(r, c)] * dot(frames.kg[r], frames.kg[c]))
            }
            _ => {
                let e = self.stiffness.as_ref().expect("vector modes have a stiffness matrix");
                let u: Vec<Vec3> = (0..n)
                    .map(|s| cross(frames.kg[frames.owner[s]], frames.dirs[s]))
                    .collect();
                Mat::from_fn(n, n, |r, c| {
                    e[(frames.owner[r], frames.owner[c])] * dot(u[r], u[c])
                })
            }
        };
        let residual = hermiticity_residual(&a);
        if residual > 1e-12 {
            return Err(Error::NonHermitian(residual));
        }
        Ok((OperatorPair { a, b: self.mass.clone() }, frames))
    }

    /// Multiplies full field coefficients by the stiffness matrix.
    pub fn apply_stiffness(&self, h: MatRef<'_, c64>) -> Mat<c64> {
        match &self.stiffness {
            Some(e) => e * h,
            None => h.to_owned(),
        }
    }

    /// Multiplies full field coefficients by the mass matrix.
    pub fn apply_mass(&self, h: MatRef<'_, c64>) -> Mat<c64> {
        match &self.mass {
            Some(b) => b * h,
            None => h.to_owned(),
        }
    }

    /// `⟨u, B v⟩` for full fields.
    pub fn mass_inner(&self, u: MatRef<'_, c64>, v: MatRef<'_, c64>) -> c64 {
        let bv = self.apply_mass(v);
        frob_inner(u, bv.as_ref())
    }
}

/// Frobenius inner product `Σ conj(u) v`.
pub fn frob_inner(u: MatRef<'_, c64>, v: MatRef<'_, c64>) -> c64 {
    let mut s = c64::new(0.0, 0.0);
    for j in 0..u.ncols() {
        for i in 0..u.nrows() {
            s += u[(i, j)].conj() * v[(i, j)];
        }
    }
    s
}

/// `‖A − Aᴴ‖_F / ‖A‖_F`.
pub fn hermiticity_residual(a: &Mat<c64>) -> f64 {
    let mut diff = 0.0;
    let mut total = 0.0;
    for c in 0..a.ncols() {
        for r in 0..a.nrows() {
            diff += (a[(r, c)] - a[(c, r)].conj()).norm_sqr();
            total += a[(r, c)].norm_sqr();
        }
    }
    if total == 0.0 {
        0.0
    } else {
        (diff / total).sqrt()
    }
}
