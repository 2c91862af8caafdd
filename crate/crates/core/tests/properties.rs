use std::collections::BTreeMap;

use cplab::graphs::{
    automorphisms, complete_to_plane, gen_binary_tower, gen_dyadic_halfplane, gen_dyadic_with_bits, hex_patch,
    is_automorphism, DyadicParams, VertexId, ROW_AXIS, ROW_UPPER_CENTER,
};
use cplab::packing::{layout, nerve, solve_radii, uniform_boundary, validate_packing, SolverOptions};
use cplab::rng::RandomSource;
use cplab::stats::{leaf_log_s_samples, log_quantile_ratio, fixture_cocycles, CocycleKind};
use proptest::prelude::*;

/// Exact law of `s = [1 1]·M·(1,1)` over all `2^n` words.
fn exhaustive_s(n: u32) -> BTreeMap<u64, u64> {
    let mut counts = BTreeMap::new();
    for word in 0u32..(1 << n) {
        let (mut a, mut b) = (1u64, 1u64);
        for i in 0..n {
            if word >> i & 1 == 1 {
                b += a;
            } else {
                a += b;
            }
        }
        *counts.entry(a + b).or_insert(0) += 1;
    }
    counts
}

#[test]
fn leaf_samples_match_exhaustive_words() {
    for n in [3u32, 6, 9, 12] {
        let exact = exhaustive_s(n);
        let total = (1u64 << n) as f64;
        let samples = 20_000usize;
        let xs = leaf_log_s_samples(n, samples, &RandomSource::new(n as u64), (1.0, 1.0)).unwrap();
        let mut seen: BTreeMap<u64, u64> = BTreeMap::new();
        for x in xs {
            let s = x.exp().round() as u64;
            assert!(exact.contains_key(&s), "impossible value {s} at n={n}");
            *seen.entry(s).or_insert(0) += 1;
        }
        // Pearson chi-square over bins of expected count >= 20, against
        // its mean plus three standard deviations.
        let (mut chi2, mut bins) = (0.0, 0usize);
        let (mut want, mut got) = (0.0, 0.0);
        for (s, &c) in &exact {
            want += samples as f64 * c as f64 / total;
            got += *seen.get(s).unwrap_or(&0) as f64;
            if want >= 20.0 {
                chi2 += (got - want).powi(2) / want;
                bins += 1;
                (want, got) = (0.0, 0.0);
            }
        }
        if want > 0.0 {
            chi2 += (got - want).powi(2) / want;
            bins += 1;
        }
        let df = (bins - 1) as f64;
        assert!(chi2 <= df + 3.0 * (2.0 * df).sqrt(), "n={n}: chi2 {chi2:.1} with {df} degrees of freedom");
    }
}

#[test]
fn tower_of_depth_twenty() {
    let t = gen_binary_tower(20);
    assert_eq!(t.num_triangles(), (1 << 21) - 1);
    assert_eq!(t.leaves().len(), 1 << 20);
}

#[test]
fn mirror_swap_is_an_automorphism() {
    for bits in [[0u8, 0, 0], [1, 0, 1], [1, 1, 0]] {
        let g = complete_to_plane(&gen_dyadic_with_bits(&bits, DyadicParams { levels: 3, window: 8 }).unwrap()).unwrap();
        let half = g.vertices().iter().filter(|v| v.row == ROW_AXIS || v.row == ROW_UPPER_CENTER).count() as VertexId;
        let perm: Vec<VertexId> = (0..g.num_vertices() as VertexId)
            .map(|v| if v < half { v + half } else if v < 2 * half { v - half } else { v })
            .collect();
        assert!(is_automorphism(&g.to_simple_graph(), &perm));
    }
}

#[test]
fn hex_patch_symmetry_group() {
    // The dihedral group of the hexagon.
    assert_eq!(automorphisms(&hex_patch(2).unwrap().to_simple_graph(), 100).len(), 12);
}

#[test]
fn nerve_of_packed_hex_patch_is_the_patch() {
    let g = hex_patch(2).unwrap();
    let r = solve_radii(&g, &uniform_boundary(&g, 1.0), SolverOptions::default()).unwrap();
    let p = layout(&g, &r.radii).unwrap();
    assert_eq!(nerve(&p, 1e-8).unwrap(), g.to_simple_graph());
}

#[test]
fn z1_log_ratio_grows_linearly() {
    // slope (1 - 2ε) log 2 at ε = 1/4
    let mean = |n: i64| {
        (0..50)
            .map(|s| {
                let (_, c) = fixture_cocycles(CocycleKind::Z1 { n }, &RandomSource::new(s)).unwrap();
                log_quantile_ratio(&c.log_r, 0.25).unwrap()
            })
            .sum::<f64>()
            / 50.0
    };
    let slope = (mean(400) - mean(100)) / 300.0;
    let want = 0.5 * std::f64::consts::LN_2;
    assert!((slope - want).abs() <= 0.05 * want, "{slope}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn dyadic_windows_pack_validly(seed in 0u64..10_000, levels in 0u32..=3) {
        let params = DyadicParams { levels, window: 1 << levels.max(1) };
        let g = complete_to_plane(&gen_dyadic_halfplane(&RandomSource::new(seed), params).unwrap()).unwrap();
        let r = solve_radii(&g, &uniform_boundary(&g, 1.0), SolverOptions::default()).unwrap();
        let p = layout(&g, &r.radii).unwrap();
        let rep = validate_packing(&p, &g.to_simple_graph(), 1e-6);
        prop_assert!(rep.pass, "{:?}", rep);
    }

    #[test]
    fn leaf_values_are_word_values(seed in any::<u64>(), n in 1u32..=10) {
        let exact = exhaustive_s(n);
        for x in leaf_log_s_samples(n, 50, &RandomSource::new(seed), (1.0, 1.0)).unwrap() {
            prop_assert!(exact.contains_key(&(x.exp().round() as u64)));
        }
    }
}
