use std::ops::Range;

use faer::{c64, Mat};

use crate::bloch::{frob_inner, BlochOperator, BlochSolution, Frames};
use crate::error::{Error, Result};
use crate::geom::Vec3;

/// Cluster of (possibly degenerate) standing waves at a zone vertex.
#[derive(Clone, Debug)]
pub struct StandingWaveGroup<'a> {
    pub op: &'a BlochOperator,
    pub k0: Vec3,
    pub frames: Frames,
    /// Band indices of the members, counted from 0.
    pub bands: Range<usize>,
    pub member_omegas: Vec<f64>,
    pub omega0: f64,
    /// B-orthonormal full field coefficients, one per member.
    pub modes: Vec<Mat<c64>>,
    /// Whether the modes were put in the time-reversal-symmetric gauge.
    pub standing_gauge: bool,
}

/// Default relative clustering tolerance.
pub const CLUSTER_TOL: f64 = 1e-4;

pub fn cluster_range(omegas: &[f64], band: usize, tol: f64) -> Range<usize> {
    let w = omegas[band];
    let near = |x: f64| (x - w).abs() <= tol * w.max(1.0);
    let mut lo = band;
    while lo > 0 && near(omegas[lo - 1]) {
        lo -= 1;
    }
    let mut hi = band + 1;
    while hi < omegas.len() && near(omegas[hi]) {
        hi += 1;
    }
    lo..hi
}

/// Finds the cluster containing `band` and orthonormalises it in the
/// standing-wave gauge.
pub fn locate_group<'a>(
    op: &'a BlochOperator,
    solution: &BlochSolution,
    band: usize,
    cluster_tol: f64,
) -> Result<StandingWaveGroup<'a>> {
    let n_bands = solution.n_bands();
    if band >= n_bands {
        return Err(Error::TooManyBands { requested: band + 1, available: n_bands });
    }
    let bands = cluster_range(&solution.omegas, band, cluster_tol);
    if bands.end == n_bands {
        return Err(Error::ClusterTruncated { band, n_bands });
    }
    let member_omegas = solution.omegas[bands.clone()].to_vec();
    let omega0 = (member_omegas.iter().map(|w| w * w).sum::<f64>() / member_omegas.len() as f64).sqrt();
    let raw: Vec<Mat<c64>> = bands.clone().map(|n| solution.full_mode(n)).collect();
    let reflection = op.basis().reflection_map(solution.k);
    let standing_gauge = reflection.is_some();
    let modes = match reflection {
        Some(map) => {
            let sign = theta_sign(op);
            let mut cands = Vec::new();
            for v in &raw {
                let tv = theta(v, &map, sign);
                cands.push(v + &tv);
                cands.push((v - &tv) * faer::Scale(c64::new(0.0, 1.0)));
            }
            gram_schmidt(op, cands, raw.len())?
        }
        None => gram_schmidt(op, raw, bands.len())?,
    };
    Ok(StandingWaveGroup {
        op,
        k0: solution.k,
        frames: solution.frames.clone(),
        bands,
        member_omegas,
        omega0,
        modes,
        standing_gauge,
    })
}

/// Component signs of the antiunitary symmetry: plain time reversal, combined
/// with the mirror `x3 -> -x3` for fibre problems so that `β` is preserved.
fn theta_sign(op: &BlochOperator) -> [f64; 3] {
    match op.mode() {
        crate::bloch::PhysicsMode::Quasi2d { .. } => [-1.0, -1.0, 1.0],
        _ => [1.0; 3],
    }
}

/// `(Θh)_G = S conj(h_{-2K0-G})`.
pub fn theta(h: &Mat<c64>, map: &[usize], sign: [f64; 3]) -> Mat<c64> {
    Mat::from_fn(h.nrows(), h.ncols(), |n, c| h[(map[n], c)].conj() * sign[c])
}

/// Modified Gram-Schmidt in the B inner product, keeping the `keep` best-conditioned vectors.
fn gram_schmidt(op: &BlochOperator, mut cands: Vec<Mat<c64>>, keep: usize) -> Result<Vec<Mat<c64>>> {
    let mut out: Vec<Mat<c64>> = Vec::new();
    while out.len() < keep {
        let norms: Vec<f64> = cands.iter().map(|c| op.mass_inner(c.as_ref(), c.as_ref()).re).collect();
        let (best, &nb) = norms
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .ok_or_else(|| Error::Solve("degenerate cluster lost rank".into()))?;
        if nb <= 1e-20 {
            return Err(Error::Solve("degenerate cluster lost rank".into()));
        }
        let v = cands.swap_remove(best) * faer::Scale(c64::new(1.0 / nb.sqrt(), 0.0));
        for c in &mut cands {
            let a = op.mass_inner(v.as_ref(), c.as_ref());
            *c -= &v * faer::Scale(a);
        }
        out.push(v);
    }
    Ok(out)
}

impl<'a> StandingWaveGroup<'a> {
    pub fn p(&self) -> usize {
        self.modes.len()
    }

    /// Group of the constant fields at Γ with `Ω0 = 0`.
    pub fn static_fields(op: &'a BlochOperator) -> Result<Self> {
        let k0 = [0.0; 3];
        let frames = op.frames(k0);
        let g0 = op
            .basis()
            .index_of([0, 0, 0])
            .ok_or_else(|| Error::BasisTooSmall("basis lacks G = 0".into()))?;
        let ncomp = frames.components();
        let mut modes = Vec::new();
        for c in 0..ncomp {
            let mut h = Mat::<c64>::zeros(op.basis().len(), ncomp);
            h[(g0, c)] = c64::new(1.0, 0.0);
            let norm = op.mass_inner(h.as_ref(), h.as_ref()).re.sqrt();
            modes.push(h * faer::Scale(c64::new(1.0 / norm, 0.0)));
        }
        Ok(Self {
            op,
            k0,
            frames,
            bands: 0..ncomp,
            member_omegas: vec![0.0; ncomp],
            omega0: 0.0,
            modes,
            standing_gauge: true,
        })
    }

    /// `Q^{nr} = ⟨h_n, B h_r⟩`.
    pub fn q(&self) -> Mat<c64> {
        let p = self.p();
        Mat::from_fn(p, p, |n, r| self.op.mass_inner(self.modes[n].as_ref(), self.modes[r].as_ref()))
    }

    /// Largest deviation of the modes from `A h = Ω0² B h`, relative to `‖A h‖`.
    pub fn eigen_residual(&self) -> f64 {
        let ops = super::ops::FieldOps::new(self.op, &self.frames);
        self.modes
            .iter()
            .map(|h| {
                let ah = ops.a0(h.as_ref());
                let bh = self.op.apply_mass(h.as_ref());
                let r = &ah - bh * faer::Scale(c64::new(self.omega0 * self.omega0, 0.0));
                r.norm_l2() / ah.norm_l2().max(1e-300)
            })
            .fold(0.0, f64::max)
    }

    pub fn plain_inner(&self, n: usize, r: usize) -> c64 {
        frob_inner(self.modes[n].as_ref(), self.modes[r].as_ref())
    }
}
