use std::io::Write;

use serde::Serialize;

use super::operator::BlochOperator;
use crate::error::Result;
use crate::lattice::{KPath, PathPoint, VertexLabel};
use crate::numfmt::fmt9;

#[derive(Clone, Debug, Serialize)]
pub struct BandTable {
    pub dimension: usize,
    pub segments: Vec<(VertexLabel, VertexLabel)>,
    pub points: Vec<PathPoint>,
    /// `omegas[point][band]`, ascending in band.
    pub omegas: Vec<Vec<f64>>,
}

/// Frequencies of the lowest `n_bands` bands at every point of `path`.
pub fn band_structure(op: &BlochOperator, path: &KPath, n_bands: usize) -> Result<BandTable> {
    let solve = |p: &PathPoint| op.frequencies(p.k, n_bands);
    #[cfg(feature = "parallel")]
    let omegas: Result<Vec<_>> = {
        use rayon::prelude::*;
        path.points.par_iter().map(solve).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let omegas: Result<Vec<_>> = path.points.iter().map(solve).collect();
    Ok(BandTable {
        dimension: op.lattice().dimension,
        segments: path.segments.clone(),
        points: path.points.clone(),
        omegas: omegas?,
    })
}

/// Writes `segment,index,K1,K2[,K3],band,omega`, one row per point and band.
/// Bands are numbered from 1.
pub fn write_band_csv<W: Write>(table: &BandTable, mut out: W) -> std::io::Result<()> {
    let d = table.dimension;
    let ks = ["K1", "K2", "K3"][..d].join(",");
    writeln!(out, "segment,index,{ks},band,omega")?;
    for (i, (p, row)) in table.points.iter().zip(&table.omegas).enumerate() {
        let k: Vec<String> = p.k[..d].iter().map(|&x| fmt9(x)).collect();
        for (b, &w) in row.iter().enumerate() {
            writeln!(out, "{},{},{},{},{}", p.segment, i, k.join(","), b + 1, fmt9(w))?;
        }
    }
    Ok(())
}
