//! Property tests for the invariants the modules promise, using
//! independent oracles where one exists (GF(2) boundary ranks for Betti
//! numbers).

mod common;

use common::{random_measure, random_space};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;
use std::sync::Arc;

use thickening::{
    build_complex, compute_diagram, diam_p, distortion, i_qp, rad_p, wasserstein, BuildKind,
    FilteredComplex, FiniteMetricSpace, Measure, PValue, Simplex,
};

fn pf(v: f64) -> PValue {
    PValue::finite(v).unwrap()
}

/// Betti numbers of the closed sublevel complex at `r`, from GF(2) ranks
/// of the boundary matrices. Independent of the reduction pipeline.
fn betti_by_rank(fc: &FilteredComplex, r: f64) -> Vec<usize> {
    let present: Vec<&Simplex> = fc
        .entries()
        .iter()
        .filter(|&&(_, v)| v <= r)
        .map(|(s, _)| s)
        .collect();
    let max_dim = present.iter().map(|s| s.dim()).max().unwrap_or(0);

    let mut by_dim: Vec<Vec<&Simplex>> = vec![Vec::new(); max_dim + 1];
    for s in &present {
        by_dim[s.dim()].push(s);
    }
    let index: Vec<HashMap<&[usize], usize>> = by_dim
        .iter()
        .map(|list| {
            list.iter()
                .enumerate()
                .map(|(i, s)| (s.vertices(), i))
                .collect()
        })
        .collect();

    // rank of the boundary map from dimension k to k-1 over GF(2)
    let rank = |k: usize| -> usize {
        if k == 0 || by_dim[k].is_empty() {
            return 0;
        }
        let mut rows: Vec<u128> = by_dim[k]
            .iter()
            .map(|s| {
                let mut row: u128 = 0;
                for facet in s.facets() {
                    let col = index[k - 1][facet.vertices()];
                    row |= 1 << col;
                }
                row
            })
            .collect();
        let mut rank = 0;
        for col in 0..by_dim[k - 1].len() {
            let pivot = (rank..rows.len()).find(|&i| rows[i] >> col & 1 == 1);
            let Some(pivot) = pivot else { continue };
            rows.swap(rank, pivot);
            for i in 0..rows.len() {
                if i != rank && rows[i] >> col & 1 == 1 {
                    rows[i] ^= rows[rank];
                }
            }
            rank += 1;
        }
        rank
    };

    (0..=max_dim)
        .map(|k| {
            let cells = by_dim[k].len();
            let boundary_out = rank(k);
            let boundary_in = if k < max_dim { rank(k + 1) } else { 0 };
            cells - boundary_out - boundary_in
        })
        .collect()
}

#[test]
fn euler_consistency_against_rank_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for trial in 0..5u64 {
        let space = random_space(9000 + trial, 7);
        let diam = space.diam();
        for kind in [BuildKind::VietorisRips, BuildKind::Cech] {
            let fc = build_complex(&space, pf(2.0), &kind, 6).unwrap();
            let diagram = compute_diagram(&fc).unwrap();
            for _ in 0..5 {
                let r = rng.gen::<f64>() * diam;
                let betti = betti_by_rank(&fc, r);
                for (k, &expected) in betti.iter().enumerate() {
                    assert_eq!(
                        diagram.betti_at(k, r),
                        expected,
                        "trial {trial} kind {kind:?} degree {k} at r = {r}"
                    );
                }
            }
        }
    }
}

#[test]
fn rad_p_is_one_lipschitz_in_wasserstein() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for trial in 0..200u64 {
        let space = random_space(9100 + trial % 20, 7);
        let alpha = random_measure(&space, &mut rng);
        let beta = random_measure(&space, &mut rng);
        for p in [pf(1.0), pf(2.0), pf(3.0), PValue::INF] {
            let (dist, _) = wasserstein(&alpha, &beta, p).unwrap();
            let gap = (rad_p(&alpha, p) - rad_p(&beta, p)).abs();
            assert!(gap <= dist + 1e-9, "rad_p stability violated at p={p}");
        }
    }
}

#[test]
fn iqp_stability_two_sided() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for trial in 0..200u64 {
        let space = random_space(9200 + trial % 20, 6);
        let alpha = random_measure(&space, &mut rng);
        let beta = random_measure(&space, &mut rng);
        for (q, p) in [(pf(1.0), pf(2.0)), (pf(2.0), pf(2.0)), (pf(3.0), pf(1.0))] {
            let (dq, _) = wasserstein(&alpha, &beta, q).unwrap();
            let (dp, _) = wasserstein(&alpha, &beta, p).unwrap();
            let gap = (i_qp(&alpha, q, p) - i_qp(&beta, q, p)).abs();
            assert!(gap <= dq + dp + 1e-9, "i_qp stability violated at q={q} p={p}");
        }
    }
}

/// Pushforward of a measure along an index map between spaces.
fn pushforward(alpha: &Measure, target: &Arc<FiniteMetricSpace>, map: &[usize]) -> Measure {
    let mut w = vec![0.0; target.len()];
    for (i, &wi) in alpha.weights().iter().enumerate() {
        w[map[i]] += wi;
    }
    Measure::new(target.clone(), w).unwrap()
}

#[test]
fn pushforward_bounds_by_distortion() {
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    for trial in 0..100u64 {
        let from = random_space(9300 + trial % 10, 6);
        let to = random_space(9400 + trial % 10, 5);
        let map: Vec<usize> = (0..6).map(|_| (rng.gen::<u32>() % 5) as usize).collect();
        let dis = distortion(&from, &to, &map).unwrap();
        let alpha = random_measure(&from, &mut rng);
        let image = pushforward(&alpha, &to, &map);
        for p in [pf(1.0), pf(2.0), PValue::INF] {
            assert!(diam_p(&image, p) <= diam_p(&alpha, p) + dis + 1e-9);
            assert!(rad_p(&image, p) <= rad_p(&alpha, p) + dis + 1e-9);
            for q in [pf(1.0), pf(2.0)] {
                assert!(i_qp(&image, q, p) <= i_qp(&alpha, q, p) + dis + 1e-9);
            }
        }
    }
}

#[test]
fn wasserstein_metric_axioms() {
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    for trial in 0..60u64 {
        let space = random_space(9500 + trial % 12, 6);
        let a = random_measure(&space, &mut rng);
        let b = random_measure(&space, &mut rng);
        let c = random_measure(&space, &mut rng);
        for q in [pf(1.0), pf(2.0), PValue::INF] {
            let (ab, _) = wasserstein(&a, &b, q).unwrap();
            let (ba, _) = wasserstein(&b, &a, q).unwrap();
            assert!((ab - ba).abs() <= 1e-7, "symmetry violated at q={q}");
            let (bc, _) = wasserstein(&b, &c, q).unwrap();
            let (ac, _) = wasserstein(&a, &c, q).unwrap();
            assert!(ac <= ab + bc + 1e-7, "triangle violated at q={q}");
            let (aa, _) = wasserstein(&a, &a, q).unwrap();
            assert!(aa.abs() <= 1e-9);
        }
    }
}

mod random_weight_properties {
    use super::*;
    use proptest::prelude::*;

    fn weights_strategy() -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(0.0f64..1.0, 5)
            .prop_filter("need some mass", |w| w.iter().sum::<f64>() > 1e-3)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn sandwich_holds_for_arbitrary_weights(raw in weights_strategy(), seed in 0u64..50) {
            let space = random_space(seed, 5);
            let total: f64 = raw.iter().sum();
            let alpha = Measure::new(space, raw.iter().map(|x| x / total).collect()).unwrap();
            for p in [pf(1.0), pf(2.0), pf(7.0), PValue::INF] {
                let r = rad_p(&alpha, p);
                let d = diam_p(&alpha, p);
                prop_assert!(r <= d + 1e-12);
                prop_assert!(d <= 2.0 * r + 1e-12);
            }
        }

        #[test]
        fn greedy_net_covers_within_radius(seed in 0u64..50, frac in 0.05f64..1.0) {
            let space = random_space(seed, 9);
            let eps = frac * space.diam();
            let net = thickening::epsilon_net(&space, eps);
            let hausdorff = thickening::hausdorff_subset(&space, &net).unwrap();
            prop_assert!(hausdorff < eps);
        }
    }
}
