//! Fixed-basis expansion of the cell operator about a vertex,
//! `A(K0 + κ) = A0 + κ_j A_j + κ_i κ_j A_ij`, acting on full field coefficients.

use faer::{c64, Mat, MatRef};

use crate::bloch::{BlochOperator, Frames};
use crate::geom::Vec3;

pub struct FieldOps<'a> {
    pub op: &'a BlochOperator,
    pub kg: &'a [Vec3],
    pub vector: bool,
}

const I: c64 = c64 { re: 0.0, im: 1.0 };

impl<'a> FieldOps<'a> {
    pub fn new(op: &'a BlochOperator, frames: &'a Frames) -> Self {
        Self { op, kg: &frames.kg, vector: frames.vector }
    }

    pub fn zeros(&self) -> Mat<c64> {
        Mat::zeros(self.kg.len(), if self.vector { 3 } else { 1 })
    }

    /// `∂_k`: multiplies every component by `i(K̃ + G)_k`.
    pub fn deriv(&self, k: usize, h: MatRef<'_, c64>) -> Mat<c64> {
        Mat::from_fn(h.nrows(), h.ncols(), |n, c| I * self.kg[n][k] * h[(n, c)])
    }

    /// `∇×`: `i(K̃ + G) × h`.
    pub fn curl(&self, h: MatRef<'_, c64>) -> Mat<c64> {
        let kg = self.kg;
        Mat::from_fn(h.nrows(), 3, |n, c| {
            let (a, b) = ((c + 1) % 3, (c + 2) % 3);
            I * (kg[n][a] * h[(n, b)] - kg[n][b] * h[(n, a)])
        })
    }

    /// `i e_j × h`.
    pub fn cross_unit(&self, j: usize, h: MatRef<'_, c64>) -> Mat<c64> {
        let mut out = Mat::<c64>::zeros(h.nrows(), 3);
        let (a, b) = ((j + 1) % 3, (j + 2) % 3);
        for n in 0..h.nrows() {
            out[(n, b)] = I * h[(n, a)];
            out[(n, a)] = -I * h[(n, b)];
        }
        out
    }

    /// `(K̃ + G)_j h` without the factor `i`.
    fn k_mul(&self, j: usize, h: MatRef<'_, c64>) -> Mat<c64> {
        Mat::from_fn(h.nrows(), h.ncols(), |n, c| h[(n, c)] * self.kg[n][j])
    }

    pub fn stiff(&self, h: MatRef<'_, c64>) -> Mat<c64> {
        self.op.apply_stiffness(h)
    }

    pub fn a0(&self, h: MatRef<'_, c64>) -> Mat<c64> {
        if self.vector {
            let e = self.stiff(self.curl(h).as_ref());
            self.curl(e.as_ref())
        } else {
            let mut out = self.zeros();
            for k in 0..3 {
                let s = self.stiff(self.k_mul(k, h).as_ref());
                out += self.k_mul(k, s.as_ref());
            }
            out
        }
    }

    pub fn a_j(&self, j: usize, h: MatRef<'_, c64>) -> Mat<c64> {
        if self.vector {
            let ec = self.stiff(self.curl(h).as_ref());
            let ex = self.stiff(self.cross_unit(j, h).as_ref());
            self.cross_unit(j, ec.as_ref()) + self.curl(ex.as_ref())
        } else {
            let sh = self.stiff(h);
            self.k_mul(j, sh.as_ref()) + self.stiff(self.k_mul(j, h).as_ref())
        }
    }

    pub fn a_ij(&self, i: usize, j: usize, h: MatRef<'_, c64>) -> Mat<c64> {
        if self.vector {
            let a = self.stiff(self.cross_unit(j, h).as_ref());
            let b = self.stiff(self.cross_unit(i, h).as_ref());
            (self.cross_unit(i, a.as_ref()) + self.cross_unit(j, b.as_ref())) * faer::Scale(c64::new(0.5, 0.0))
        } else if i == j {
            self.stiff(h)
        } else {
            self.zeros()
        }
    }
}
