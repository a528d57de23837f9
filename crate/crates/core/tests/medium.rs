mod common;

use bloch_hfh::medium::Cell;
use bloch_hfh::*;
use common::*;
use std::f64::consts::PI;

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

/// `(1/4) ∫_disk e^{-iG·x} dA` by slicing along x1; the x2 integral is closed form.
fn disk_transform(r: f64, g: [f64; 2]) -> f64 {
    let chord = |x: f64| {
        let y = (r * r - x * x).max(0.0).sqrt();
        let inner = if g[1] == 0.0 { 2.0 * y } else { 2.0 * (g[1] * y).sin() / g[1] };
        (g[0] * x).cos() * inner
    };
    // substitute x = r sin θ to remove the square-root endpoint singularity
    simpson(|t| chord(r * t.sin()) * r * t.cos(), -PI / 2.0, PI / 2.0, 4000) / 4.0
}

fn sphere_transform(r: f64, g: f64, volume: f64) -> f64 {
    let sinc = |x: f64| if x == 0.0 { 1.0 } else { x.sin() / x };
    simpson(|s| 4.0 * PI * s * s * sinc(g * s), 0.0, r, 4000) / volume
}

#[test]
fn disk_coefficients_match_quadrature() {
    let lat = square();
    let med = pcf();
    for m in [[0, 0], [1, 0], [1, 1], [2, 1], [3, 0], [4, 3]] {
        let g = [PI * m[0] as f64, PI * m[1] as f64];
        for role in [CoefficientRole::Eps, CoefficientRole::InvEps] {
            let (fm, fi) = match role {
                CoefficientRole::Eps => (6.0, 1.0),
                _ => (1.0 / 6.0, 1.0),
            };
            let oracle = if m == [0, 0] { fm } else { 0.0 } + (fi - fm) * disk_transform(0.75, g);
            let c = med.fourier_coefficient(&lat, role, [g[0], g[1], 0.0]).unwrap();
            assert!((c.re - oracle).abs() < 1e-9 && c.im.abs() < 1e-15, "{m:?} {role:?}: {} vs {oracle}", c.re);
        }
    }
}

#[test]
fn inverse_eps_coefficient_at_x() {
    let c = pcf().fourier_coefficient(&square(), CoefficientRole::InvEps, [PI, 0.0, 0.0]).unwrap();
    assert!((c.re - 0.165_387_605_755_38).abs() < 1e-12);
    assert!((c.re - 0.163).abs() < 3e-3);
}

#[test]
fn sphere_coefficients_match_quadrature() {
    let lat = cubic();
    let med = MediumSpec::homogeneous(1.0).with_inclusion(Shape::Sphere { radius: 0.8 }, 20.0);
    for m in [[1, 0, 0], [1, 1, 0], [2, 1, 1]] {
        let g = [PI * m[0] as f64, PI * m[1] as f64, PI * m[2] as f64];
        let gn = (g[0] * g[0] + g[1] * g[1] + g[2] * g[2]).sqrt();
        let c = med.fourier_coefficient(&lat, CoefficientRole::Eps, g).unwrap();
        assert!((c.re - 19.0 * sphere_transform(0.8, gn, 8.0)).abs() < 1e-9);
    }
    let cell_height = 12.0;
    let film = MediumSpec::homogeneous(1.0).with_inclusion(Shape::SphereInSupercell { radius: 0.8, cell_height }, 20.0);
    let g = [PI, 0.0, 2.0 * PI / cell_height];
    let gn = (g[0] * g[0] + g[2] * g[2]).sqrt();
    let c = film.fourier_coefficient(&lat, CoefficientRole::Eps, g).unwrap();
    assert!((c.re - 19.0 * sphere_transform(0.8, gn, 4.0 * cell_height)).abs() < 1e-9);
}

#[test]
fn off_lattice_vector_is_rejected() {
    let r = pcf().fourier_coefficient(&square(), CoefficientRole::Eps, [1.0, 0.0, 0.0]);
    assert!(matches!(r, Err(Error::OffLattice(_))));
}

#[test]
fn shifted_inclusion_picks_up_phase() {
    let mut med = pcf();
    med.inclusions[0].center = [0.1, -0.2, 0.0];
    med.inclusions[0].shape = Shape::Disk { radius: 0.5 };
    let centred = MediumSpec::homogeneous(6.0).with_inclusion(Shape::Disk { radius: 0.5 }, 1.0);
    let g = [PI, 2.0 * PI, 0.0];
    let a = med.fourier_coefficient(&square(), CoefficientRole::Eps, g).unwrap();
    let b = centred.fourier_coefficient(&square(), CoefficientRole::Eps, g).unwrap();
    let phase = -(g[0] * 0.1 - g[1] * 0.2);
    let expect = b * c64::new(phase.cos(), phase.sin());
    assert!((a - expect).norm() < 1e-14);
}

#[test]
fn filling_fractions() {
    assert!((pcf().filling_fraction(&square()).unwrap() - 0.441_786_466_911_065_5).abs() < 1e-14);
    let sph = MediumSpec::homogeneous(1.0).with_inclusion(Shape::Sphere { radius: 0.8 }, 20.0);
    assert!((sph.filling_fraction(&cubic()).unwrap() - 0.268_082_573_106_329).abs() < 1e-14);
}

#[test]
fn truncated_series_converges_in_mean_square() {
    let lat = square();
    let med = pcf();
    let cell: Cell = med.cell(&lat).unwrap();
    let n = 96;
    let grid: Vec<[f64; 3]> = (0..n * n)
        .map(|i| {
            let x = -1.0 + (2.0 * (i % n) as f64 + 1.0) / n as f64;
            let y = -1.0 + (2.0 * (i / n) as f64 + 1.0) / n as f64;
            [x, y, 0.0]
        })
        .collect();
    let mut prev = f64::INFINITY;
    for c in [1, 2, 4, 8, 16] {
        let mut err = 0.0;
        for p in &grid {
            let mut s = 0.0;
            for a in -c..=c {
                for b in -c..=c {
                    let co = med.coefficient_at(&cell, CoefficientRole::InvEps, [a, b, 0]);
                    let ph = PI * (a as f64 * p[0] + b as f64 * p[1]);
                    s += co.re * ph.cos() - co.im * ph.sin();
                }
            }
            let d = s - med.eval(&cell, CoefficientRole::InvEps, *p);
            err += d * d;
        }
        let err = (err / grid.len() as f64).sqrt();
        assert!(err < prev, "cutoff {c}: {err} >= {prev}");
        prev = err;
    }
}

#[test]
fn overlapping_inclusions_are_rejected() {
    let med = MediumSpec::homogeneous(1.0).with_inclusion(Shape::Disk { radius: 1.05 }, 2.0);
    assert!(med.validate(&square()).is_err());
}
