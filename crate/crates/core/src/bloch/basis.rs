use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::geom::{Vec3, ZERO};
use crate::medium::Cell;

/// Truncated set of reciprocal vectors `G = (2π m_i / L_i)`, a box of integer indices.
#[derive(Clone, Debug)]
pub struct PlaneWaveBasis {
    cell: Cell,
    ranges: [(i32, i32); 3],
    indices: Vec<[i32; 3]>,
    lookup: HashMap<[i32; 3], usize>,
}

impl PlaneWaveBasis {
    /// Per-axis cutoffs for a nominal cutoff: the stretched axis of a supercell
    /// scales with its length.
    pub fn default_cutoffs(cell: &Cell, cutoff: usize) -> [usize; 3] {
        let mut c = [cutoff, cutoff, 0];
        if cell.dimension == 3 {
            c[2] = (cutoff as f64 * cell.lengths[2] / 2.0).round() as usize;
        }
        c
    }

    /// Box `|m_i| <= cutoffs[i]` centred on Γ.
    pub fn gamma_centred(cell: Cell, cutoffs: [usize; 3]) -> Result<Self> {
        Self::centred(cell, cutoffs, ZERO)
    }

    /// Box centred on the Brillouin-zone vertex `k0`. On antiperiodic axes the box
    /// gains one index so that it is closed under `G -> -2k0 - G`.
    pub fn centred(cell: Cell, cutoffs: [usize; 3], k0: Vec3) -> Result<Self> {
        let mut ranges = [(0, 0); 3];
        for i in 0..cell.dimension {
            let c = cutoffs[i] as i32;
            if c < 1 {
                return Err(Error::BasisTooSmall(format!(
                    "axis {i} needs a cutoff of at least 1 (3 plane waves)"
                )));
            }
            let s = k0[i] / cell.spacing(i);
            ranges[i] = if s.abs() < 1e-12 {
                (-c, c)
            } else if (s - 0.5).abs() < 1e-9 {
                (-c - 1, c)
            } else if (s + 0.5).abs() < 1e-9 {
                (-c, c + 1)
            } else {
                return Err(Error::InvalidArgument(format!(
                    "k0 component {} is not a zone-vertex value",
                    k0[i]
                )));
            };
        }
        let mut indices = Vec::new();
        for m0 in ranges[0].0..=ranges[0].1 {
            for m1 in ranges[1].0..=ranges[1].1 {
                for m2 in ranges[2].0..=ranges[2].1 {
                    indices.push([m0, m1, m2]);
                }
            }
        }
        let lookup = indices.iter().enumerate().map(|(n, &m)| (m, n)).collect();
        Ok(Self { cell, ranges, indices, lookup })
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn cell(&self) -> &Cell {
        &self.cell
    }

    pub fn ranges(&self) -> [(i32, i32); 3] {
        self.ranges
    }

    pub fn indices(&self) -> &[[i32; 3]] {
        &self.indices
    }

    pub fn index_of(&self, m: [i32; 3]) -> Option<usize> {
        self.lookup.get(&m).copied()
    }

    pub fn g(&self, n: usize) -> Vec3 {
        self.cell.g_vector(self.indices[n])
    }

    /// Index map `G -> -2k0 - G`, if the basis is closed under it.
    pub fn reflection_map(&self, k0: Vec3) -> Option<Vec<usize>> {
        let mut shift = [0i32; 3];
        for i in 0..self.cell.dimension {
            shift[i] = (2.0 * k0[i] / self.cell.spacing(i)).round() as i32;
        }
        self.indices
            .iter()
            .map(|m| {
                let r = [-shift[0] - m[0], -shift[1] - m[1], -shift[2] - m[2]];
                self.index_of(r)
            })
            .collect()
    }
}
