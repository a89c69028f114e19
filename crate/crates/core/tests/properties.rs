use covprob::critical::{breakpoints_continuous, breakpoints_hypergeom, gap_violations};
use covprob::dist::{t_weight, DistributionSpec};
use covprob::engine::{
    coverage_at, gap_profile, hypergeom_shifted, inf_closed_coverage, min_hypergeom_coverage,
    min_open_coverage,
};
use covprob::oracle::sampling::{random_case, random_hypergeom_case, CaseFamily};
use covprob::oracle::{check_unimodal_between, direct_coverage, exhaustive_min_hypergeom, grid_scan};
use covprob::procedures::{clopper_pearson, BoundsMode, Direction, IntervalProcedure, KIndexInterval};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn monotone_tables(max_len: usize) -> impl Strategy<Value = (Vec<f64>, Vec<f64>, Direction)> {
    (1..=max_len, any::<bool>(), any::<bool>()).prop_flat_map(|(len, dec, coarse)| {
        let cell = if coarse { 0..8u32 } else { 0..1000u32 };
        (
            prop::collection::vec(cell.clone(), len),
            prop::collection::vec(cell, len),
        )
            .prop_map(move |(mut l, mut u)| {
                let scale = if coarse { 8.0 } else { 1000.0 };
                l.sort_unstable();
                u.sort_unstable();
                let mut lower: Vec<f64> = l.iter().map(|&x| f64::from(x) / scale).collect();
                let mut upper: Vec<f64> = u.iter().map(|&x| f64::from(x) / scale).collect();
                for (u, l) in upper.iter_mut().zip(&lower) {
                    *u = u.max(*l);
                }
                let dir = if dec {
                    Direction::NonDecreasing
                } else {
                    lower.reverse();
                    upper.reverse();
                    Direction::NonIncreasing
                };
                (lower, upper, dir)
            })
    })
}

fn brute_interval(lower: &[f64], upper: &[f64], theta: f64, mode: BoundsMode) -> Vec<u64> {
    (0..lower.len())
        .filter(|&k| mode.holds(lower[k], theta, upper[k]))
        .map(|k| k as u64)
        .collect()
}

fn as_set(ks: &KIndexInterval, k_max: u64) -> Vec<u64> {
    (0..=k_max).filter(|&k| ks.contains(k)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn k_interval_matches_enumeration(
        (lower, upper, dir) in monotone_tables(200),
        theta_cell in 0..=1000u32,
        pick in any::<prop::sample::Index>(),
    ) {
        let p = IntervalProcedure::from_table(lower.clone(), upper.clone(), dir).unwrap();
        let k_max = lower.len() as u64 - 1;
        // probe exactly on a bound value half of the time
        let values: Vec<f64> = lower.iter().chain(&upper).copied().collect();
        let theta = if theta_cell % 2 == 0 { *pick.get(&values) } else { f64::from(theta_cell) / 1000.0 };
        let mut sets = Vec::new();
        for mode in BoundsMode::ALL {
            let ks = p.k_interval_for(theta, mode).unwrap();
            let got = as_set(&ks, k_max);
            prop_assert_eq!(&got, &brute_interval(&lower, &upper, theta, mode));
            sets.push(ks);
        }
        // OpenOpen, ClosedOpen, OpenClosed, ClosedClosed
        prop_assert!(sets[0].is_subset_of(&sets[1]));
        prop_assert!(sets[0].is_subset_of(&sets[2]));
        prop_assert!(sets[1].is_subset_of(&sets[3]));
        prop_assert!(sets[2].is_subset_of(&sets[3]));
    }

    #[test]
    fn critical_set_is_complete(
        (lower, upper, dir) in monotone_tables(60),
        a_cell in 0..1000u32,
        width in 1..1000u32,
    ) {
        let p = IntervalProcedure::from_table(lower.clone(), upper.clone(), dir).unwrap();
        let a = f64::from(a_cell) / 1000.0;
        let b = (f64::from(a_cell + width) / 1000.0).min(1.0);
        prop_assume!(a < b);
        let set = breakpoints_continuous(&p, a, b).unwrap();
        let mut expect: Vec<f64> = lower.iter().chain(&upper).copied().filter(|v| a < *v && *v < b).collect();
        expect.sort_by(f64::total_cmp);
        expect.dedup();
        let interior: Vec<f64> = set.interior().iter().map(|c| c.value).collect();
        prop_assert_eq!(interior, expect);
        prop_assert_eq!(set.points()[0].value, a);
        prop_assert_eq!(set.points()[set.len() - 1].value, b);
        prop_assert!(gap_violations(&set, &p, 100).is_empty());
        // the event inside a gap is the right limit at its left end
        for w in set.points().windows(2) {
            let mid = 0.5 * (w[0].value + w[1].value);
            for mode in BoundsMode::ALL {
                prop_assert_eq!(
                    p.k_interval_for(mid, mode).unwrap(),
                    p.k_interval_for(w[0].value, BoundsMode::ClosedOpen).unwrap()
                );
                prop_assert_eq!(
                    p.k_interval_for(mid, mode).unwrap(),
                    p.k_interval_for(w[1].value, BoundsMode::OpenClosed).unwrap()
                );
            }
        }
    }

    #[test]
    fn binomial_kernel_is_normalized(n in 1..400u64, p in 0.0..=1.0f64) {
        let spec = DistributionSpec::binomial(n).unwrap();
        let total: f64 = (0..=n as i64).map(|k| spec.pmf(p, k).unwrap()).sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        let mut prev = 0.0;
        for k in 0..=n as i64 {
            let c = spec.cdf(p, k).unwrap();
            prop_assert!(c >= prev - 1e-15);
            prev = c;
        }
        prop_assert!((prev - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hypergeometric_kernel_matches_exact(big in 1..80u64, frac in 0.0..1.0f64, mfrac in 0.0..=1.0f64) {
        let n = 1 + ((big - 1) as f64 * frac) as u64;
        let m = (big as f64 * mfrac).round() as u64;
        let spec = DistributionSpec::hypergeometric(big, n).unwrap();
        for k in 0..=n as i64 {
            let exact = covprob::dist::exact::hypergeom_pmf_exact(big, n, m, k);
            let exact = num_traits::ToPrimitive::to_f64(&exact).unwrap();
            let got = spec.pmf(m as f64, k).unwrap();
            prop_assert!((got - exact).abs() <= 1e-13 * exact.max(1e-300), "k={k}: {got} vs {exact}");
        }
    }

    #[test]
    fn t_weight_matches_exact(big in 2..60u64, n in 1..60u64, m in 0..59u64, k in -2..62i64) {
        prop_assume!(n <= big && m < big);
        let exact = covprob::dist::exact::t_weight_exact(k, m, big, n);
        let exact = num_traits::ToPrimitive::to_f64(&exact).unwrap();
        let got = t_weight(k, m, big, n).unwrap();
        prop_assert!((got - exact).abs() <= 1e-13 * exact.max(1e-300));
    }
}

#[test]
fn engine_matches_oracle_on_random_cases() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for family in CaseFamily::ALL {
        for _ in 0..8 {
            let c = random_case(family, &mut rng);
            let grid = grid_scan(&c.spec, &c.procedure, c.a, c.b, 801).unwrap();
            let open = min_open_coverage(&c.spec, &c.procedure, c.a, c.b).unwrap();
            let closed = inf_closed_coverage(&c.spec, &c.procedure, c.a, c.b).unwrap();
            let g_open = grid.iter().map(|g| g.value(BoundsMode::OpenOpen)).fold(f64::INFINITY, f64::min);
            let g_closed = grid
                .iter()
                .map(|g| g.value(BoundsMode::ClosedClosed))
                .fold(f64::INFINITY, f64::min);
            assert!((open.infimum - g_open).abs() < 1e-10, "{}: {} vs {}", c.label, open.infimum, g_open);
            assert!(closed.infimum <= g_closed + 1e-12, "{}", c.label);
            assert!(g_closed - closed.infimum < 1e-7, "{}: {} vs {}", c.label, closed.infimum, g_closed);
            for e in &open.evaluations {
                for mode in BoundsMode::ALL {
                    let direct = direct_coverage(&c.spec, &c.procedure, e.theta(), mode).unwrap();
                    assert!((direct - e.value(mode)).abs() < 1e-12, "{} at {}", c.label, e.theta());
                }
            }
        }
    }
}

#[test]
fn gaps_are_unimodal() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for family in CaseFamily::ALL {
        for _ in 0..4 {
            let c = random_case(family, &mut rng);
            let set = breakpoints_continuous(&c.procedure, c.a, c.b).unwrap();
            for w in set.points().windows(2) {
                let values = gap_profile(&c.spec, &c.procedure, w[0].value, w[1].value, 200).unwrap();
                assert!(check_unimodal_between(&values, 1e-12), "{}", c.label);
            }
        }
    }
}

#[test]
fn hypergeometric_reduction_is_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for big in [5u64, 12, 40] {
        for _ in 0..10 {
            let c = random_hypergeom_case(big, &mut rng);
            let (a, b) = (c.a as u64, c.b as u64);
            for mode in [BoundsMode::OpenOpen, BoundsMode::ClosedClosed] {
                let r = min_hypergeom_coverage(&c.spec, &c.procedure, a, b, mode).unwrap();
                let e = exhaustive_min_hypergeom(&c.spec, &c.procedure, a, b, mode).unwrap();
                assert_eq!(r.exact_infimum.as_ref(), Some(&e.exact), "{} {mode}", c.label);
                assert!((r.infimum - e.value).abs() < 1e-12);
                let shifted = hypergeom_shifted(&c.procedure, mode).unwrap();
                let set = breakpoints_hypergeom(&shifted, a, b, big).unwrap();
                for w in set.points().windows(2) {
                    let v = gap_profile(&c.spec, &shifted, w[0].value, w[1].value, 1000).unwrap();
                    assert!(check_unimodal_between(&v, 1e-12), "{}", c.label);
                }
            }
        }
    }
}

#[test]
fn clopper_pearson_tail_equations() {
    let n = 25;
    let delta = 0.05;
    let cp = clopper_pearson(n, delta).unwrap();
    let spec = DistributionSpec::binomial(n).unwrap();
    for k in 1..=n {
        let l = cp.lower(k).unwrap();
        let tail = 1.0 - spec.cdf(l, k as i64 - 1).unwrap();
        assert!((tail - delta / 2.0).abs() < 1e-10, "k={k}");
    }
    for k in 0..n {
        let u = cp.upper(k).unwrap();
        assert!((spec.cdf(u, k as i64).unwrap() - delta / 2.0).abs() < 1e-10, "k={k}");
    }
    let c = coverage_at(&spec, &cp, 0.3, BoundsMode::ClosedClosed).unwrap();
    assert!(c >= 0.95);
}
