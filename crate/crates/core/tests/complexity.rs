mod oracles;

use ccshape_core::{
    cc_residual, complexity, complexity_gradient, hessian_vector_product, hessian_vector_product_fd, mhl_length,
    rms_length, MassConfiguration, ShapeError,
};
use oracles::{shapes, SplitMix, ThreeBodyShape};
use proptest::prelude::*;

#[test]
fn closed_form_values() {
    let cases = [
        (shapes::two_body(0.5, 0.5, 3.7), oracles::analytic_c_two_body(0.5, 0.5)),
        (shapes::two_body(0.9, 0.1, 0.2), oracles::analytic_c_two_body(0.9, 0.1)),
        (shapes::equilateral(2.5), oracles::analytic_c_three_equal(ThreeBodyShape::Equilateral)),
        (shapes::collinear(0.3), oracles::analytic_c_three_equal(ThreeBodyShape::CollinearEquispaced)),
        (shapes::square(1.7), oracles::analytic_c_square()),
    ];
    for (config, oracle) in cases {
        let c = complexity(&config).unwrap().complexity;
        assert!(oracle.agrees(c), "{}: {c} vs {}", oracle.quantity, oracle.value);
        assert!((c - oracles::naive_complexity(&config)).abs() <= 1e-13 * c);
    }
}

#[test]
fn oracle_reference_numbers() {
    assert_eq!(oracles::analytic_c_two_body(0.5, 0.5).value, 0.125);
    assert!((oracles::analytic_c_two_body(0.9, 0.1).value - 0.027).abs() < 1e-15);
    let eq = oracles::analytic_c_three_equal(ThreeBodyShape::Equilateral).value;
    let col = oracles::analytic_c_three_equal(ThreeBodyShape::CollinearEquispaced).value;
    assert!((eq - 0.19245008973).abs() < 1e-11);
    assert!((col - 0.22680460580).abs() < 2e-11);
    assert!((col / eq - 1.17851).abs() < 1e-5);
    assert!((oracles::analytic_c_square().value - 0.2392767).abs() < 1e-7);
}

#[test]
fn two_body_complexity_is_shape_independent() {
    let mut rng = SplitMix(2);
    for _ in 0..50 {
        let m1 = 0.05 + 0.9 * rng.uniform();
        let a = rng.in_ball(3);
        let b = rng.in_ball(3);
        let config = MassConfiguration::new(3, vec![m1, 1.0 - m1], [a, b].concat()).unwrap();
        let c = complexity(&config).unwrap().complexity;
        assert!(oracles::analytic_c_two_body(m1, 1.0 - m1).agrees(c));
        assert_eq!(cc_residual(&config).unwrap(), 0.0);
    }
}

#[test]
fn lengths_scale_linearly() {
    let mut rng = SplitMix(5);
    for _ in 0..50 {
        let n = 3 + (rng.next_u64() % 15) as usize;
        let d = 2 + (rng.next_u64() % 2) as usize;
        let c = rng.configuration(n, d);
        let s = 0.01 + 100.0 * rng.uniform();
        let scaled = c.scaled(s);
        assert!((rms_length(&scaled) - s * rms_length(&c)).abs() <= 1e-12 * s * rms_length(&c));
        let (a, b) = (mhl_length(&scaled).unwrap(), mhl_length(&c).unwrap());
        assert!((a - s * b).abs() <= 1e-12 * a);
    }
}

#[test]
fn gradient_matches_central_differences() {
    let mut rng = SplitMix(11);
    let mut worst: f64 = 0.0;
    for k in 0..100 {
        let n = 3 + k % 18;
        let d = 2 + k % 2;
        let c = rng.configuration(n, d);
        let g = complexity_gradient(&c).unwrap();
        let fd = oracles::fd_gradient(&c, 1e-6).unwrap();
        let num: f64 = g.as_slice().iter().zip(&fd).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        let den: f64 = fd.iter().map(|x| x * x).sum::<f64>().sqrt();
        worst = worst.max(num / den);
    }
    assert!(worst <= 1e-6, "max relative error {worst:e}");
}

#[test]
fn gradient_is_gauge_orthogonal() {
    let mut rng = SplitMix(13);
    for _ in 0..20 {
        let c = rng.configuration(9, 3);
        let fd = oracles::fd_gradient(&c, 1e-6).unwrap();
        for k in 0..3 {
            let t: f64 = fd.chunks(3).map(|p| p[k]).sum();
            assert!(t.abs() <= 1e-9, "{t:e}");
        }
        let g = complexity_gradient(&c).unwrap();
        assert!(g.translation_sum().iter().all(|v| v.abs() <= 1e-12 * g.norm().max(1.0)));
        assert!(g.dilation_sum(&c).abs() <= 1e-12 * g.norm().max(1.0));
    }
}

#[test]
fn analytic_hvp_matches_finite_differences() {
    let mut rng = SplitMix(17);
    for k in 0..20 {
        let c = rng.configuration(4 + k, 2 + k % 2);
        let v: Vec<f64> = (0..c.positions().len()).map(|_| rng.normal()).collect();
        let a = hessian_vector_product(&c, &v).unwrap();
        let b = hessian_vector_product_fd(&c, &v).unwrap();
        let err: f64 = a.iter().zip(&b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
        let scale: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!(err <= 1e-5 * scale, "{err:e} vs {scale:e}");
    }
}

#[test]
fn residual_at_known_critical_points() {
    for c in [shapes::square(1.0), shapes::equilateral(1.0)] {
        assert!(cc_residual(&c).unwrap() <= 1e-12);
        assert!(oracles::central_configuration_defect(&c) <= 1e-12);
    }
    assert!(cc_residual(&shapes::collinear(1.0)).unwrap() <= 1e-12);
    let mut rng = SplitMix(23);
    let eq = shapes::equilateral(1.0);
    let positions: Vec<f64> = eq.positions().iter().map(|x| x + 0.1 * rng.normal()).collect();
    let bent = eq.with_positions(positions).unwrap();
    assert!(cc_residual(&bent).unwrap() >= 1e-3);
    assert!(oracles::central_configuration_defect(&bent) >= 1e-3);
}

#[test]
fn coincident_particles_are_rejected() {
    let err = MassConfiguration::equal_masses(2, vec![0.0, 0.0, 1.0, 1.0, 1.0, 1.0]).unwrap_err();
    assert!(matches!(err, ShapeError::Collision { .. }));
    let near = MassConfiguration::equal_masses(2, vec![0.0, 0.0, 1.0, 1.0, 1.0, 1.0 + 1e-14]).unwrap();
    assert!(matches!(complexity(&near), Err(ShapeError::Collision { .. })));
}

fn config_strategy() -> impl Strategy<Value = (MassConfiguration, u64)> {
    (3usize..12, 2usize..4, any::<u64>()).prop_map(|(n, d, seed)| (SplitMix(seed).configuration(n, d), seed))
}

fn closest_pair(c: &MassConfiguration) -> (usize, usize) {
    let mut best = (0, 1, f64::INFINITY);
    for i in 0..c.len() {
        for j in i + 1..c.len() {
            if c.separation(i, j) < best.2 {
                best = (i, j, c.separation(i, j));
            }
        }
    }
    (best.0, best.1)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn similarity_invariance((c, seed) in config_strategy(), scale in 0.001f64..1000.0) {
        let mut rng = SplitMix(seed ^ 0xA5A5);
        let d = c.dim();
        let shift: Vec<f64> = (0..d).map(|_| 10.0 * scale * (2.0 * rng.uniform() - 1.0)).collect();
        let moved = c.transformed(&rng.rotation(d)).scaled(scale).translated(&shift);
        let a = complexity(&c).unwrap().complexity;
        let b = complexity(&moved).unwrap().complexity;
        prop_assert!((a - b).abs() <= 1e-12 * a, "{} vs {}", a, b);
    }

    #[test]
    fn relabeling_invariance((c, seed) in config_strategy()) {
        let mut rng = SplitMix(seed);
        let mut order: Vec<usize> = (0..c.len()).collect();
        for i in (1..order.len()).rev() {
            order.swap(i, (rng.next_u64() % (i as u64 + 1)) as usize);
        }
        let a = complexity(&c).unwrap().complexity;
        let b = complexity(&c.permuted(&order)).unwrap().complexity;
        prop_assert!((a - b).abs() <= 1e-13 * a);
    }

    #[test]
    fn clustering_the_closest_pair_raises_complexity((c, _) in config_strategy()) {
        let d = c.dim();
        let (i, j) = closest_pair(&c);
        let mut x = c.positions().to_vec();
        let mid: Vec<f64> = (0..d).map(|k| 0.5 * (x[i * d + k] + x[j * d + k])).collect();
        for k in 0..d {
            x[i * d + k] = mid[k] + 0.5 * (x[i * d + k] - mid[k]);
            x[j * d + k] = mid[k] + 0.5 * (x[j * d + k] - mid[k]);
        }
        let squeezed = c.with_positions(x).unwrap();
        let squeezed = squeezed.scaled(rms_length(&c) / rms_length(&squeezed));
        prop_assert!((rms_length(&squeezed) - rms_length(&c)).abs() <= 1e-12 * rms_length(&c));
        let before = complexity(&c).unwrap().complexity;
        let after = complexity(&squeezed).unwrap().complexity;
        prop_assert!(after > before, "{} -> {}", before, after);
    }
}
