mod common;

use bloch_hfh::effmed::{classify_pde, decay_rate, PdeKind};
use bloch_hfh::hfh::cluster_range;
use bloch_hfh::*;
use common::*;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn decay_deepens_into_the_gap(t in 0.05f64..3.0, w0 in 0.5f64..3.0, a in 0.0f64..0.5, b in 0.0f64..0.5) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let near = decay_rate(&[vec![t]], w0, w0 * (1.0 - lo), 0).unwrap();
        let far = decay_rate(&[vec![t]], w0, w0 * (1.0 - hi), 0).unwrap();
        prop_assert!(near.alpha <= far.alpha);
        prop_assert!(near.alpha >= 0.0);
        let w = w0 * (1.0 - hi);
        prop_assert!((far.alpha - ((w0 * w0 - w * w) / t).sqrt()).abs() <= 1e-12);
    }

    #[test]
    fn pde_sign_pattern(a in -2.0f64..2.0, b in -2.0f64..2.0) {
        prop_assume!(a.abs() > 1e-2 && b.abs() > 1e-2);
        let kind = classify_pde(&[vec![a, 0.0], vec![0.0, b]], 1e-3).kind;
        let expect = if a * b > 0.0 { PdeKind::Elliptic } else { PdeKind::Hyperbolic };
        prop_assert_eq!(kind, expect);
    }

    #[test]
    fn coefficients_are_conjugate_symmetric(
        r in 0.1f64..0.9, eps in 1.5f64..12.0, cx in -0.1f64..0.1, cy in -0.1f64..0.1,
        m1 in -6i32..6, m2 in -6i32..6,
    ) {
        let mut med = MediumSpec::homogeneous(1.0).with_inclusion(Shape::Disk { radius: r }, eps);
        med.inclusions[0].center = [cx, cy, 0.0];
        let cell = med.cell(&square()).unwrap();
        for role in [CoefficientRole::Eps, CoefficientRole::InvEps] {
            let a = med.coefficient_at(&cell, role, [m1, m2, 0]);
            let b = med.coefficient_at(&cell, role, [-m1, -m2, 0]);
            prop_assert!((a - b.conj()).norm() < 1e-14);
        }
    }

    #[test]
    fn homogeneous_bands_scale_with_index(eps in 1.0f64..16.0, k1 in -1.5f64..1.5, k2 in -1.5f64..1.5) {
        let op = op2(MediumSpec::homogeneous(eps), PhysicsMode::ScalarH3, 4, None);
        let k = [k1, k2, 0.0];
        let w = op.frequencies(k, 4).unwrap();
        let exact = free_space(k, 2, 4);
        for (a, b) in w.iter().zip(&exact) {
            prop_assert!((a - b / eps.sqrt()).abs() < 1e-10);
        }
    }

    #[test]
    fn path_sampling_shares_endpoints(n in 2usize..40, d in 2usize..4) {
        let path = ibz_path(&LatticeSpec::new(d).unwrap(), n).unwrap();
        let segments = if d == 2 { 3 } else { 5 };
        prop_assert_eq!(path.points.len(), segments * (n - 1) + 1);
        prop_assert_eq!(path.points.first().unwrap().k, [0.0; 3]);
    }

    #[test]
    fn clusters_contain_their_band(mut w in proptest::collection::vec(0.0f64..3.0, 2..12), pick in 0usize..12) {
        w.sort_by(f64::total_cmp);
        let band = pick % w.len();
        let r = cluster_range(&w, band, 1e-4);
        prop_assert!(r.contains(&band));
        for n in r.clone() {
            prop_assert!((w[n] - w[band]).abs() <= 1e-4 * w[band].max(1.0) * r.len() as f64);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, ..ProptestConfig::default() })]

    #[test]
    fn spectra_are_hermitian_and_symmetric(
        r in 0.2f64..0.9, eps in 1.5f64..12.0, beta in 0.0f64..3.0, k1 in -1.5f64..1.5, k2 in -1.5f64..1.5,
    ) {
        let med = MediumSpec::homogeneous(eps).with_inclusion(Shape::Disk { radius: r }, 1.0);
        let op = op2(med, PhysicsMode::Quasi2d { beta_l: beta }, 4, None);
        let (pair, _) = op.assemble([k1, k2, 0.0]).unwrap();
        prop_assert!(bloch_hfh::bloch::hermiticity_residual(&pair.a) <= 1e-12);
        let base = op.frequencies([k1, k2, 0.0], 6).unwrap();
        let image = op.frequencies([k2, -k1, 0.0], 6).unwrap();
        for (a, b) in base.iter().zip(&image) {
            prop_assert!((a - b).abs() <= 1e-9 * b.max(1.0));
        }
    }
}
