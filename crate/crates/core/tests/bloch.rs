mod common;

use bloch_hfh::bloch::*;
use bloch_hfh::hfh::{locate_group, theta};
use bloch_hfh::*;
use common::*;
use faer::Mat;

#[test]
fn empty_lattice_matches_free_space() {
    let op = op2(MediumSpec::homogeneous(1.0), PhysicsMode::ScalarH3, 8, None);
    for k in [GAMMA, X, M, [0.3, 0.7, 0.0]] {
        let w = op.frequencies(k, 8).unwrap();
        let exact = free_space(k, 2, 8);
        for (a, b) in w.iter().zip(&exact) {
            assert!((a - b).abs() < 1e-10, "{k:?}: {a} vs {b}");
        }
    }
}

#[test]
fn empty_lattice_gamma_and_x() {
    let op = op2(MediumSpec::homogeneous(1.0), PhysicsMode::ScalarE3, 4, None);
    let pi = std::f64::consts::PI;
    let w = op.frequencies(GAMMA, 5).unwrap();
    assert!(w[0] == 0.0);
    assert!(w[1..].iter().all(|x| (x - pi).abs() < 1e-12));
    let w = op.frequencies(X, 2).unwrap();
    assert!(w.iter().all(|x| (x - pi / 2.0).abs() < 1e-12));
}

#[test]
fn homogeneous_index_two() {
    let k = [0.4, -0.9, 0.0];
    let exact = free_space(k, 2, 6);
    for mode in [PhysicsMode::ScalarH3, PhysicsMode::ScalarE3] {
        let op = op2(MediumSpec::homogeneous(4.0), mode, 6, None);
        let w = op.frequencies(k, 6).unwrap();
        for (a, b) in w.iter().zip(&exact) {
            assert!((a - b / 2.0).abs() < 1e-10, "{mode:?}");
        }
    }
    let k3 = [0.4, -0.9, 0.2];
    let op = BlochOperator::with_cutoff(cubic(), MediumSpec::homogeneous(4.0), PhysicsMode::Vector3d, 3, FourierRule::Inverse, None)
        .unwrap();
    let w = op.frequencies(k3, 8).unwrap();
    let exact = free_space(k3, 3, 4);
    for (n, a) in w.iter().enumerate() {
        assert!((a - exact[n / 2] / 2.0).abs() < 1e-10);
    }
}

#[test]
fn quasi2d_at_zero_beta_is_union_of_polarisations() {
    let k = [0.7, 0.3, 0.0];
    let q = op2(pcf(), PhysicsMode::Quasi2d { beta_l: 0.0 }, 5, None).frequencies(k, 12).unwrap();
    let mut union = op2(pcf(), PhysicsMode::ScalarH3, 5, None).frequencies(k, 12).unwrap();
    union.extend(op2(pcf(), PhysicsMode::ScalarE3, 5, None).frequencies(k, 12).unwrap());
    union.sort_by(f64::total_cmp);
    for (a, b) in q.iter().zip(&union) {
        assert!(rel(*a, *b) < 1e-9, "{a} vs {b}");
    }
}

#[test]
fn assembly_is_hermitian() {
    let k = [0.37, 1.1, 0.0];
    for mode in [PhysicsMode::ScalarH3, PhysicsMode::ScalarE3, PhysicsMode::Quasi2d { beta_l: 2.0 }] {
        for rule in [FourierRule::Inverse, FourierRule::Direct] {
            let op = BlochOperator::with_cutoff(square(), pcf(), mode, 6, rule, None).unwrap();
            let (pair, _) = op.assemble(k).unwrap();
            assert!(hermiticity_residual(&pair.a) <= 1e-12);
            if let Some(b) = &pair.b {
                assert!(hermiticity_residual(b) <= 1e-12);
            }
        }
    }
}

#[test]
fn spectrum_respects_square_symmetry() {
    let op = op2(pcf(), PhysicsMode::Quasi2d { beta_l: 1.3 }, 6, None);
    let k = [0.41, 0.93, 0.0];
    let base = op.frequencies(k, 8).unwrap();
    for image in [[-k[0], k[1], 0.0], [k[1], k[0], 0.0], [-k[1], k[0], 0.0], [-k[0], -k[1], 0.0]] {
        let w = op.frequencies(image, 8).unwrap();
        for (a, b) in w.iter().zip(&base) {
            assert!((a - b).abs() <= 1e-9 * b.max(1.0), "{image:?}");
        }
    }
}

#[test]
fn direct_rule_converges_monotonically() {
    let mut prev: Option<Vec<f64>> = None;
    for c in [3, 5, 7, 9] {
        let op = BlochOperator::with_cutoff(square(), pcf(), PhysicsMode::ScalarH3, c, FourierRule::Direct, None).unwrap();
        let w = op.frequencies(X, 5).unwrap();
        if let Some(p) = &prev {
            for (a, b) in w.iter().zip(p) {
                assert!(*a <= b + 1e-12, "cutoff {c}: {a} > {b}");
            }
        }
        prev = Some(w);
    }
}

#[test]
fn vector_modes_are_transverse() {
    let op = BlochOperator::with_cutoff(
        cubic(),
        MediumSpec::homogeneous(1.0).with_inclusion(Shape::Sphere { radius: 0.6 }, 8.0),
        PhysicsMode::Vector3d,
        2,
        FourierRule::Inverse,
        None,
    )
    .unwrap();
    let k = [0.5, 0.2, 0.1];
    let sol = op.solve(k, 6).unwrap();
    for n in 0..6 {
        let h = sol.full_mode(n);
        let mut worst: f64 = 0.0;
        for (g, q) in sol.frames.kg.iter().enumerate() {
            let div = (0..3).map(|c| h[(g, c)] * q[c]).fold(c64::new(0.0, 0.0), |a, b| a + b);
            worst = worst.max(div.norm());
        }
        assert!(worst < 1e-12);
    }
}

#[test]
fn eigenvectors_are_mass_orthonormal_with_small_residual() {
    for mode in [PhysicsMode::ScalarE3, PhysicsMode::Quasi2d { beta_l: 3.0 }] {
        let op = op2(pcf(), mode, 6, None);
        let (pair, _) = op.assemble([0.2, 0.9, 0.0]).unwrap();
        let ep = solve_pair(&pair, 6).unwrap();
        let v = &ep.vectors;
        let bv = match &pair.b {
            Some(b) => b * v,
            None => v.clone(),
        };
        let gram = v.adjoint() * &bv;
        for i in 0..6 {
            for j in 0..6 {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((gram[(i, j)] - c64::new(e, 0.0)).norm() < 1e-10);
            }
            let scale = ep.values[i].abs().max(1.0);
            assert!(pair_residual(&pair, ep.values[i], v.subcols(i, 1)) < 1e-9 * scale);
        }
    }
}

#[test]
fn too_many_bands_is_rejected() {
    let op = op2(pcf(), PhysicsMode::ScalarH3, 3, None);
    assert!(matches!(op.frequencies(X, 1000), Err(Error::TooManyBands { .. })));
}

#[test]
fn standing_gauge_modes_are_theta_invariant() {
    for (mode, sign) in [
        (PhysicsMode::ScalarH3, [1.0; 3]),
        (PhysicsMode::Quasi2d { beta_l: 3.0 }, [-1.0, -1.0, 1.0]),
    ] {
        for k0 in [X, M] {
            let op = op2(pcf(), mode, 5, Some(k0));
            let map = op.basis().reflection_map(k0).unwrap();
            let sol = op.solve(k0, 6).unwrap();
            let group = locate_group(&op, &sol, 1, 1e-4).unwrap();
            assert!(group.standing_gauge);
            for h in &group.modes {
                let d: Mat<c64> = theta(h, &map, sign) - h;
                assert!(d.norm_l2() < 1e-10 * h.norm_l2());
            }
        }
    }
}

#[test]
fn band_table_follows_the_path() {
    let op = op2(MediumSpec::homogeneous(1.0), PhysicsMode::ScalarH3, 4, None);
    let path = ibz_path(&square(), 11).unwrap();
    let table = band_structure(&op, &path, 3).unwrap();
    assert_eq!(table.omegas.len(), 31);
    for (pt, w) in path.points.iter().zip(&table.omegas).take(11) {
        assert!((w[0] - pt.k[0]).abs() < 1e-12);
    }
    let mut csv = Vec::new();
    write_band_csv(&table, &mut csv).unwrap();
    let text = String::from_utf8(csv).unwrap();
    assert!(text.starts_with("segment,index,K1,K2,band,omega\n"));
    assert_eq!(text.lines().count(), 1 + 31 * 3);
}

#[test]
fn pcf_has_transverse_partial_gap() {
    let op = op2(pcf(), PhysicsMode::Quasi2d { beta_l: 3.0 }, 6, None);
    let path = ibz_path(&square(), 5).unwrap();
    let table = band_structure(&op, &path, 5).unwrap();
    let top2 = table.omegas.iter().map(|w| w[1]).fold(0.0, f64::max);
    let bottom3 = table.omegas.iter().map(|w| w[2]).fold(f64::INFINITY, f64::min);
    assert!(top2 < bottom3, "{top2} >= {bottom3}");
}

#[test]
fn fd_curvature_of_free_space() {
    let op = op2(MediumSpec::homogeneous(1.0), PhysicsMode::ScalarH3, 4, None);
    let fd = fd_band_derivatives(&op, [0.3, 0.0, 0.0], 0..1, 3, &FdOptions::default()).unwrap();
    let b = fd.single.as_ref().unwrap();
    assert!((b.gradient[0] - 1.0).abs() < 1e-6);
    assert!(rel(b.hessian[1][1], 1.0 / 0.3) < 1e-4);
}

#[test]
fn fd_doublet_slopes_at_x() {
    let op = op2(MediumSpec::homogeneous(1.0), PhysicsMode::ScalarH3, 4, Some(X));
    let lines = fd_lines(&op, X, 0..2, 4, &[[1.0, 0.0, 0.0]], &FdOptions::default()).unwrap();
    let s: Vec<f64> = lines[0].branches.iter().map(|b| b.slope).collect();
    assert!((s[0] + 1.0).abs() < 1e-6 && (s[1] - 1.0).abs() < 1e-6, "{s:?}");
}
