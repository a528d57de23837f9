#![allow(dead_code)]

use bloch_hfh::*;
use std::f64::consts::FRAC_PI_2;

pub const GAMMA: [f64; 3] = [0.0; 3];
pub const X: [f64; 3] = [FRAC_PI_2, 0.0, 0.0];
pub const M: [f64; 3] = [FRAC_PI_2, FRAC_PI_2, 0.0];

pub fn square() -> LatticeSpec {
    LatticeSpec::new(2).unwrap()
}

pub fn cubic() -> LatticeSpec {
    LatticeSpec::new(3).unwrap()
}

/// Air holes of radius 0.75 in ε = 6.
pub fn pcf() -> MediumSpec {
    MediumSpec::homogeneous(6.0).with_inclusion(Shape::Disk { radius: 0.75 }, 1.0)
}

pub fn op2(medium: MediumSpec, mode: PhysicsMode, cutoff: usize, k0: Option<[f64; 3]>) -> BlochOperator {
    BlochOperator::with_cutoff(square(), medium, mode, cutoff, FourierRule::Inverse, k0).unwrap()
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Sorted `|K + πm|` over a generous integer window.
pub fn free_space(k: [f64; 3], dims: usize, n: usize) -> Vec<f64> {
    let r = 8i32;
    let mut out = Vec::new();
    let z = if dims == 3 { -r..=r } else { 0..=0 };
    for a in -r..=r {
        for b in -r..=r {
            for c in z.clone() {
                let q = [
                    k[0] + std::f64::consts::PI * a as f64,
                    k[1] + std::f64::consts::PI * b as f64,
                    k[2] + std::f64::consts::PI * c as f64,
                ];
                out.push((q[0] * q[0] + q[1] * q[1] + q[2] * q[2]).sqrt());
            }
        }
    }
    out.sort_by(f64::total_cmp);
    out.truncate(n);
    out
}
