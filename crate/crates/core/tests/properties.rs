//! Randomized invariant checks across the dyadic group, the Gauss rules,
//! the transforms, and the approximation layer.

use std::sync::OnceLock;

use num_complex::Complex64;
use proptest::prelude::*;

use chromax_core::approx::{en_proxy, weighted_norm, NormGrid};
use chromax_core::chromatic::ChromaticBasis;
use chromax_core::dyadic::{dyadic_add, dyadic_mul, walsh_eval, DyadicGrid, DyadicRational};
use chromax_core::kernels::{transform, Kernel, Point, QuadSpec};
use chromax_core::orthopoly::{classical_recurrence, Interval, WeightSpec};
use chromax_core::quad::AdaptiveSpec;
use chromax_core::wavelet::WaveletPoint;

fn cfg(cases: u32) -> ProptestConfig {
    ProptestConfig {
        failure_persistence: None,
        cases,
        ..ProptestConfig::default()
    }
}

fn bits() -> impl Strategy<Value = Vec<i32>> {
    proptest::collection::vec(-4i32..4, 0..6)
}

fn rational(indices: &[i32]) -> DyadicRational {
    DyadicRational::from_indices(indices, 8, 8).unwrap()
}

proptest! {
    #![proptest_config(cfg(256))]
    #[test]
    fn dyadic_sum_is_commutative_and_associative(a in bits(), b in bits(), c in bits()) {
        let (x, y, z) = (rational(&a), rational(&b), rational(&c));
        prop_assert_eq!(dyadic_add(&x, &y).indices(), dyadic_add(&y, &x).indices());
        let left = dyadic_add(&dyadic_add(&x, &y), &z);
        let right = dyadic_add(&x, &dyadic_add(&y, &z));
        prop_assert_eq!(left.indices(), right.indices());
    }

    #[test]
    fn dyadic_sum_is_self_inverse(a in bits()) {
        let x = rational(&a);
        prop_assert!(dyadic_add(&x, &x).is_zero());
    }

    #[test]
    fn dyadic_product_distributes_over_sum(a in bits(), b in bits(), c in bits()) {
        let (x, y, z) = (rational(&a), rational(&b), rational(&c));
        let lhs = dyadic_mul(&x, &dyadic_add(&y, &z), 16, 16).unwrap();
        let xy = dyadic_mul(&x, &y, 16, 16).unwrap();
        let xz = dyadic_mul(&x, &z, 16, 16).unwrap();
        prop_assert_eq!(lhs.indices(), dyadic_add(&xy, &xz).indices());
    }

    #[test]
    fn walsh_character_splits_dyadic_sums(a in bits(), b in bits(), c in bits()) {
        let y = rational(&a);
        let (t1, t2) = (rational(&b), rational(&c));
        let lhs = walsh_eval(&y, &dyadic_add(&t1, &t2));
        prop_assert_eq!(lhs, walsh_eval(&y, &t1) * walsh_eval(&y, &t2));
    }

    #[test]
    fn distinct_characters_integrate_to_zero(a in bits(), b in bits()) {
        let (y1, y2) = (rational(&a), rational(&b));
        prop_assume!(y1.indices() != y2.indices());
        let grid = DyadicGrid::new(4, 4).unwrap();
        let mut acc = 0.0;
        for r in 0..grid.cell_count() {
            let t = grid.left_point(r).unwrap();
            acc += walsh_eval(&y1, &t) * walsh_eval(&y2, &t) * grid.cell_width();
        }
        prop_assert_eq!(acc, 0.0);
    }
}

fn norm_exponent() -> impl Strategy<Value = f64> {
    prop_oneof![
        Just(1.0),
        Just(1.7),
        Just(2.0),
        Just(3.0),
        Just(f64::INFINITY)
    ]
}

proptest! {
    #![proptest_config(cfg(64))]
    #[test]
    fn weighted_norm_is_absolutely_homogeneous(
        lambda in -10.0f64..10.0,
        coeffs in proptest::collection::vec(-5.0f64..5.0, 4),
        p in norm_exponent(),
    ) {
        let grid = NormGrid::plain(-4.0, 4.0, 16, 6);
        let h = |y: f64| coeffs[0] + y * (coeffs[1] + y * (coeffs[2] + y * coeffs[3]));
        let w = |y: f64| (-y * y).exp();
        let base = weighted_norm(h, w, p, &grid).unwrap();
        let scaled = weighted_norm(|y| lambda * h(y), w, p, &grid).unwrap();
        prop_assert!((scaled - lambda.abs() * base).abs() <= 1e-10 * (1.0 + base));
    }
}

fn weight_family() -> impl Strategy<Value = WeightSpec> {
    prop_oneof![
        Just(WeightSpec::hermite()),
        (-0.5f64..3.0).prop_map(|a| WeightSpec::laguerre(a).unwrap()),
        ((-0.9f64..2.0), (-0.9f64..2.0))
            .prop_map(|(a, b)| WeightSpec::jacobi(a, b).unwrap()),
        ((-0.5f64..2.0), (0.5f64..4.0))
            .prop_map(|(a, s)| WeightSpec::scaled_laguerre(a, s).unwrap()),
    ]
}

proptest! {
    #![proptest_config(cfg(32))]
    #[test]
    fn gauss_weights_sum_to_the_total_mass(w in weight_family(), n in 1usize..20) {
        let rec = classical_recurrence(&w, n).unwrap();
        let rule = rec.gauss_rule(n).unwrap();
        let total: f64 = rule.weights.iter().sum();
        let beta0 = rec.betas()[0];
        prop_assert!((total - beta0).abs() <= 1e-12 * beta0);
    }

    #[test]
    fn gauss_rule_is_exact_through_degree_2n_minus_1(
        w in weight_family(),
        n in 2usize..12,
        frac in 0.0f64..1.0,
    ) {
        let j = ((frac * (2 * n) as f64) as i32).min(2 * n as i32 - 1);
        let rec = classical_recurrence(&w, n + 6).unwrap();
        let rule = rec.gauss_rule(n).unwrap();
        let reference = rec.gauss_rule(n + 6).unwrap();
        let got = rule.integrate(|y| y.powi(j));
        let want = reference.integrate(|y| y.powi(j));
        let scale = reference.integrate(|y| y.abs().powi(j)).max(f64::MIN_POSITIVE);
        prop_assert!((got - want).abs() <= 1e-10 * scale, "j = {j}: {got} vs {want}");
    }

    #[test]
    fn jacobi_bases_are_orthonormal_under_their_gauss_rule(
        a in -0.9f64..2.0,
        b in -0.9f64..2.0,
        n in 1usize..8,
    ) {
        let w = WeightSpec::jacobi(a, b).unwrap();
        let rec = classical_recurrence(&w, n + 1).unwrap();
        let rule = rec.gauss_rule(n + 1).unwrap();
        for i in 0..=n {
            for j in 0..=n {
                let inner = rule.integrate(|y| {
                    let vals = rec.eval_orthonormal(n, y).unwrap();
                    vals[i] * vals[j]
                });
                let target = if i == j { 1.0 } else { 0.0 };
                prop_assert!((inner - target).abs() < 1e-8, "({i},{j}): {inner}");
            }
        }
    }
}

proptest! {
    #![proptest_config(cfg(16))]
    #[test]
    fn laplace_transform_is_linear(s in -3.0f64..3.0, t in -3.0f64..3.0) {
        let kernel = Kernel::Laplace;
        let x = Point::Real(0.7);
        let quad = QuadSpec::Adaptive(AdaptiveSpec::default());
        let f1 = |y: f64| Complex64::new((-y).exp(), 0.0);
        let f2 = |y: f64| Complex64::new(y * (-2.0 * y).exp(), 0.0);
        let lhs = transform(&kernel, |y| s * f1(y) + t * f2(y), &x, &quad).unwrap();
        let t1 = transform(&kernel, f1, &x, &quad).unwrap();
        let t2 = transform(&kernel, f2, &x, &quad).unwrap();
        let want = s * t1.value + t * t2.value;
        prop_assert!((lhs.value - want).norm() <= 1e-7 * (1.0 + want.norm()));
    }

    #[test]
    fn en_proxy_is_non_increasing_in_degree(
        coeffs in proptest::collection::vec(-3.0f64..3.0, 6),
        p in norm_exponent(),
    ) {
        let grid = NormGrid::plain(0.0, 25.0, 16, 8);
        let g = |y: f64| {
            coeffs.iter().rev().fold(0.0, |acc, &c| acc * y + c)
        };
        let w = |y: f64| (-y).exp();
        let mut prev = f64::INFINITY;
        for n in 0..=6 {
            let r = en_proxy(g, w, p, n, &grid).unwrap();
            prop_assert!(
                r.value <= prev * (1.0 + 1e-7) + 1e-12,
                "n = {n}: {} > {prev}",
                r.value
            );
            prev = r.value;
        }
    }
}

fn fourier_hermite_basis() -> &'static ChromaticBasis {
    static BASIS: OnceLock<ChromaticBasis> = OnceLock::new();
    BASIS.get_or_init(|| {
        ChromaticBasis::build(
            Kernel::Fourier,
            &[WeightSpec::hermite()],
            Point::Real(0.0),
            10,
        )
        .unwrap()
    })
}

proptest! {
    #![proptest_config(cfg(24))]
    #[test]
    fn coefficient_energy_obeys_the_bessel_bound(
        coeffs in proptest::collection::vec(-2.0f64..2.0, 4),
    ) {
        let basis = fourier_hermite_basis();
        let fhat = |y: f64| {
            let q = coeffs.iter().rev().fold(0.0, |acc, &c| acc * y + c);
            Complex64::new(q * (-y * y / 4.0).exp(), 0.0)
        };
        let cs = basis.coefficients(fhat, 10).unwrap();
        let lhs: f64 = cs.single().iter().map(|c| c.norm_sqr()).sum();
        let grid = NormGrid::plain(-12.0, 12.0, 32, 8);
        let rhs = weighted_norm(|y| fhat(y).re, |_| 1.0, 2.0, &grid).unwrap().powi(2);
        prop_assert!(lhs <= rhs * (1.0 + 1e-8) + 1e-12, "{lhs} > {rhs}");
    }
}

proptest! {
    #![proptest_config(cfg(8))]
    #[test]
    fn segment_signs_match_the_kernel_at_quadrature_nodes(
        a0 in 0.5f64..2.0,
        b0 in -1.0f64..1.0,
    ) {
        let kernel = Kernel::PoissonWavelet { n: 1 };
        let x0 = Point::Plane(WaveletPoint::new(a0, b0).unwrap());
        let base = WeightSpec::generic(Interval::half_line(), |_| 1.0);
        // Discretization budgets are a separate concern; anchors whose
        // segment weights refuse to settle are skipped, not failed.
        let basis = match ChromaticBasis::build(kernel, &[base], x0, 4) {
            Ok(b) => b,
            Err(_) => return Err(TestCaseError::Reject("discretization did not settle".into())),
        };
        for seg in basis.segments() {
            for &y in &seg.quad.nodes {
                let v = kernel.eval(basis.x0(), y).unwrap().re;
                prop_assert!(seg.sign * v > 0.0, "sign {} at y = {y}: {v}", seg.sign);
            }
        }
    }
}
