mod oracles;

use ccshape_core::analysis::tiers::mean_cv;
use ccshape_core::analysis::{
    counting_report, edge_tier_ladder, euclidean_mst, fingerprint, nearest_neighbor_stats, radial_density_profile,
    void_census, EdgeTierLadder, DEFAULT_GAP,
};
use ccshape_core::{MassConfiguration, ShapeError};
use oracles::{shapes, SplitMix};
use proptest::prelude::*;

fn points_of(c: &MassConfiguration) -> Vec<Vec<f64>> {
    c.points().map(|p| p.to_vec()).collect()
}

#[test]
fn mst_small_cases() {
    // Isoceles triangle with sides 1, 1, 1.5.
    let h = (1.0f64 - 0.75 * 0.75).sqrt();
    let c = MassConfiguration::equal_masses(2, vec![0.0, 0.0, 1.5, 0.0, 0.75, h]).unwrap();
    let mst = euclidean_mst(&c);
    let mut pairs: Vec<(usize, usize)> = mst.edges.iter().map(|e| (e.i, e.j)).collect();
    pairs.sort();
    assert_eq!(pairs, vec![(0, 2), (1, 2)]);
    assert!((mst.total_weight() - 2.0).abs() < 1e-12);
    assert!((oracles::brute_force_mst(&points_of(&c)).unwrap().0 - 2.0).abs() < 1e-12);

    let line = MassConfiguration::equal_masses(2, vec![0.0, 0.0, 1.0, 0.0, 2.0, 0.0, 3.0, 0.0]).unwrap();
    let mst = euclidean_mst(&line);
    let mut pairs: Vec<(usize, usize)> = mst.edges.iter().map(|e| (e.i, e.j)).collect();
    pairs.sort();
    assert_eq!(pairs, vec![(0, 1), (1, 2), (2, 3)]);
    assert_eq!(oracles::brute_force_mst(&points_of(&line)).unwrap().0, 3.0);
}

#[test]
fn brute_force_refuses_large_inputs() {
    let pts: Vec<Vec<f64>> = (0..9).map(|i| vec![i as f64, 0.0]).collect();
    assert_eq!(oracles::brute_force_mst(&pts), Err(oracles::TooLarge(9)));
}

#[test]
fn mst_weight_matches_enumeration() {
    let mut rng = SplitMix(31);
    for k in 0..40 {
        let n = 2 + k % 7;
        let d = 2 + k % 2;
        let c = rng.configuration(n, d);
        let (w, _) = oracles::brute_force_mst(&points_of(&c)).unwrap();
        let mst = euclidean_mst(&c);
        assert_eq!(mst.len(), n - 1);
        assert!((mst.total_weight() - w).abs() <= 1e-12 * w, "{} vs {w}", mst.total_weight());
    }
}

#[test]
fn mst_of_fifty_points_is_minimal() {
    // Kruskal over all pairs as an independent reference.
    let mut rng = SplitMix(37);
    let c = rng.configuration(50, 2);
    let n = c.len();
    let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            pairs.push((c.separation(i, j), i, j));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(p: &mut Vec<usize>, mut x: usize) -> usize {
        while p[x] != x {
            x = p[x];
        }
        x
    }
    let mut weight = 0.0;
    for (w, i, j) in pairs {
        let (a, b) = (root(&mut parent, i), root(&mut parent, j));
        if a != b {
            parent[a] = b;
            weight += w;
        }
    }
    let mst = euclidean_mst(&c);
    assert!((mst.total_weight() - weight).abs() <= 1e-12 * weight);
}

#[test]
fn ladder_splits_at_gaps() {
    let ladder = EdgeTierLadder::from_lengths(&[2.0, 0.99, 1.01, 2.02, 1.0], 0.15);
    assert_eq!(ladder.tiers.len(), 2);
    assert!((ladder.tiers[0].mean - 1.0).abs() < 1e-12);
    assert!((ladder.tiers[1].mean - 2.01).abs() < 1e-12);
    assert_eq!(ladder.step_ratios.len(), 1);
    assert!((ladder.step_differences[0] - 1.01).abs() < 1e-12);
    assert!(!ladder.no_ladder);
    assert_eq!(ladder.tier_of(), vec![1, 0, 0, 1, 0]);

    let flat = EdgeTierLadder::from_lengths(&[0.7; 9], DEFAULT_GAP);
    assert_eq!(flat.tiers.len(), 1);
    assert_eq!(flat.tiers[0].cv, 0.0);
    assert!(flat.no_ladder);
}

#[test]
fn uniform_lengths_rarely_form_a_ladder() {
    let mut flagged = 0;
    for seed in 0..20 {
        let mut rng = SplitMix(1000 + seed);
        let lengths: Vec<f64> = (0..200).map(|_| rng.uniform().max(1e-12)).collect();
        if EdgeTierLadder::from_lengths(&lengths, 0.15).no_ladder {
            flagged += 1;
        }
    }
    assert!(flagged >= 18, "only {flagged} of 20 flagged");
}

proptest! {
    #[test]
    fn tiers_partition_the_sorted_edges(lengths in prop::collection::vec(0.01f64..10.0, 1..80), gap in 0.01f64..1.0) {
        let ladder = EdgeTierLadder::from_lengths(&lengths, gap);
        let concatenated: Vec<f64> = ladder.tiers.iter().flat_map(|t| t.lengths.clone()).collect();
        let mut sorted = lengths.clone();
        sorted.sort_by(f64::total_cmp);
        prop_assert_eq!(concatenated, sorted);
        let mut members: Vec<usize> = ladder.tiers.iter().flat_map(|t| t.members.clone()).collect();
        members.sort();
        prop_assert_eq!(members, (0..lengths.len()).collect::<Vec<_>>());
        prop_assert!(ladder.tiers.windows(2).all(|w| w[0].mean < w[1].mean));
        prop_assert_eq!(ladder.step_ratios.len(), ladder.tiers.len() - 1);
    }
}

#[test]
fn radial_profile_of_uniform_disk_is_flat() {
    let mut rng = SplitMix(41);
    let pts: Vec<f64> = (0..10_000).flat_map(|_| rng.in_ball(2)).collect();
    let c = MassConfiguration::equal_masses(2, pts).unwrap();
    let p = radial_density_profile(&c, 10);
    assert_eq!(p.counts.iter().sum::<usize>(), 10_000);
    assert!(p.edges.windows(2).all(|w| w[0] < w[1]));
    let area: f64 = std::f64::consts::PI * p.edges[10].powi(2);
    let expected_density = 10_000.0 / area;
    for (k, &count) in p.counts.iter().enumerate() {
        let share = (p.edges[k + 1].powi(2) - p.edges[k].powi(2)) / p.edges[10].powi(2);
        let expected = 10_000.0 * share;
        let sigma = expected.sqrt();
        assert!((count as f64 - expected).abs() <= 3.0 * sigma, "bin {k}: {count} vs {expected}");
        assert!((p.densities[k] - expected_density).abs() <= 3.0 * sigma / (share * area));
    }
}

#[test]
fn ring_fills_one_bin() {
    let pts: Vec<f64> = (0..12)
        .flat_map(|k| {
            let t = k as f64 * std::f64::consts::PI / 6.0;
            [t.cos(), t.sin()]
        })
        .collect();
    let c = MassConfiguration::equal_masses(2, pts).unwrap();
    let p = radial_density_profile(&c, 5);
    assert_eq!(p.counts.iter().filter(|&&k| k > 0).count(), 1);
    assert_eq!(p.counts.iter().sum::<usize>(), 12);
}

fn triangular_patch(rings: i64) -> MassConfiguration {
    let mut pts = Vec::new();
    for a in -rings..=rings {
        for b in -rings..=rings {
            let x = a as f64 + 0.5 * b as f64;
            let y = b as f64 * 3f64.sqrt() / 2.0;
            if (x * x + y * y).sqrt() <= rings as f64 {
                pts.extend([x, y]);
            }
        }
    }
    MassConfiguration::equal_masses(2, pts).unwrap()
}

#[test]
fn lattice_neighbors_are_regular() {
    let s = nearest_neighbor_stats(&triangular_patch(8), 0.7);
    assert!(s.cv <= 0.02);
    assert!((s.mean - 1.0).abs() < 1e-12);
}

#[test]
fn poisson_neighbor_spread() {
    let mut cvs = Vec::new();
    for seed in 0..20 {
        let mut rng = SplitMix(500 + seed);
        let c = rng.configuration(1000, 2);
        cvs.push(nearest_neighbor_stats(&c, 0.7).cv);
    }
    let (mean, _) = mean_cv(&cvs);
    assert!((mean - 0.52).abs() <= 0.1, "mean cv {mean}");
}

#[test]
fn two_body_neighbors() {
    let s = nearest_neighbor_stats(&shapes::two_body(0.5, 0.5, 2.5), 1.0);
    assert_eq!(s.mean, 2.5);
    assert_eq!(s.cv, 0.0);
}

#[test]
fn square_perimeter_void() {
    let mut pts = Vec::new();
    for k in 0..10 {
        let t = k as f64 / 10.0;
        pts.extend([t, 0.0, 1.0, t, 1.0 - t, 1.0, 0.0, 1.0 - t]);
    }
    let c = MassConfiguration::equal_masses(2, pts).unwrap();
    let report = void_census(&c, 3).unwrap();
    let top = &report.voids[0];
    assert!((top.radius - 0.5).abs() <= 1e-9, "{}", top.radius);
    assert!((top.center[0] - 0.5).abs() <= 1e-9 && (top.center[1] - 0.5).abs() <= 1e-9);
}

#[test]
fn voids_are_empty_and_sorted() {
    let mut rng = SplitMix(53);
    for d in [2, 3] {
        let c = rng.configuration(120, d);
        let report = void_census(&c, 10).unwrap();
        assert_eq!(report.voids.len(), 10);
        assert!(report.voids.windows(2).all(|w| w[0].radius >= w[1].radius));
        for v in &report.voids {
            for p in c.points() {
                let r: f64 = p.iter().zip(&v.center).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
                assert!(r >= v.radius * (1.0 - 1e-12));
            }
            assert!((v.radius_rms * report.rms_length - v.radius).abs() <= 1e-12 * v.radius);
        }
    }
}

#[test]
fn grid_void_radius() {
    let h = 0.25;
    let pts: Vec<f64> = (0..7).flat_map(|i| (0..7).flat_map(move |j| [i as f64 * h, j as f64 * h])).collect();
    let c = MassConfiguration::equal_masses(2, pts).unwrap();
    let top = &void_census(&c, 1).unwrap().voids[0];
    assert!((top.radius - h / 2f64.sqrt()).abs() <= 1e-12);
}

#[test]
fn collinear_points_have_no_voids() {
    let c = MassConfiguration::equal_masses(2, vec![0.0, 0.0, 1.0, 1.0, 2.0, 2.0]).unwrap();
    assert!(matches!(void_census(&c, 1), Err(ShapeError::DegenerateGeometry(_))));
}

#[test]
fn fingerprints() {
    let mut rng = SplitMix(59);
    for _ in 0..20 {
        let c = rng.configuration(9, 3);
        let mut order: Vec<usize> = (0..9).collect();
        order.reverse();
        let moved = c.transformed(&rng.rotation(3)).scaled(7.5).translated(&[1.0, 2.0, 3.0]).permuted(&order);
        let (a, b) = (fingerprint(&c).unwrap(), fingerprint(&moved).unwrap());
        assert!(a.matches(&b) && b.matches(&a) && a.matches(&a));
    }
    let sq = fingerprint(&shapes::square(1.0)).unwrap();
    let ct = fingerprint(&shapes::centered_triangle(1.0)).unwrap();
    assert!(!sq.matches(&ct));
    let tri = fingerprint(&shapes::equilateral(2.0)).unwrap();
    assert!(tri.spectrum.iter().all(|s| (s - 3f64.sqrt()).abs() <= 1e-12));
}

#[test]
fn analysis_is_similarity_invariant() {
    let mut rng = SplitMix(61);
    let c = rng.configuration(60, 2);
    let moved = c.transformed(&rng.rotation(2)).scaled(0.3).translated(&[5.0, -1.0]);
    let (p, q) = (radial_density_profile(&c, 8), radial_density_profile(&moved, 8));
    assert_eq!(p.counts, q.counts);
    let scale = ccshape_core::rms_length(&c) / ccshape_core::rms_length(&moved);
    let (a, b) = (edge_tier_ladder(&euclidean_mst(&c), 0.15), edge_tier_ladder(&euclidean_mst(&moved), 0.15));
    assert_eq!(a.tiers.len(), b.tiers.len());
    for (s, t) in a.tiers.iter().zip(&b.tiers) {
        assert!((s.mean - scale * t.mean).abs() <= 1e-12 * s.mean);
        assert!((s.cv - t.cv).abs() <= 1e-10);
    }
    let (v, w) = (void_census(&c, 3).unwrap(), void_census(&moved, 3).unwrap());
    for (x, y) in v.voids.iter().zip(&w.voids) {
        assert!((x.radius_rms - y.radius_rms).abs() <= 1e-10);
    }
    let (n1, n2) = (nearest_neighbor_stats(&c, 0.7), nearest_neighbor_stats(&moved, 0.7));
    assert!((n1.cv - n2.cv).abs() <= 1e-10);
}

#[test]
fn counting() {
    let r = counting_report(100, 3);
    assert_eq!((r.pairs, r.coordinates), (4950, 294));
    let r = counting_report(100, 2);
    assert_eq!((r.pairs, r.coordinates), (4950, 197));
    let r = counting_report(3, 2);
    assert_eq!((r.pairs, r.coordinates, r.excess), (3, 3, 0));
    let r = counting_report(4, 2);
    assert_eq!((r.pairs, r.coordinates), (6, 5));
}
