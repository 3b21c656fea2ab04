mod common;

use fixedrank::diagnostics::{build_chain, FiniteChain, HighPrecision, Scalar};
use fixedrank::lozenge::PlanePartitionPoset;
use fixedrank::partitions::{Region, RegionPoset};
use fixedrank::permutations::PermutationPoset;
use fixedrank::poset::{advance, enumerate, run_chain, Bias, ChainState, Direction, GradedPoset};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

fn rational(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// The acceptance probability the kernel actually uses, as an exact rational.
fn implemented_acceptance(bias: &Bias, d: Direction) -> BigRational {
    // accepts(u) holds exactly for u < threshold, so probe the boundary by bisection.
    let (mut lo, mut hi) = (0u128, 1u128 << 64);
    if !bias.accepts(d, 0) {
        return rational(0, 1);
    }
    if bias.accepts(d, u64::MAX) {
        return rational(1, 1);
    }
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if bias.accepts(d, mid as u64) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    BigRational::new(BigInt::from(hi), BigInt::from(1u128 << 64))
}

fn check_reversible<E: Clone>(chain: &FiniteChain<E, BigRational>) {
    assert!(chain.detailed_balance_holds());
    assert!(chain.row_sums().iter().all(|s| *s == rational(1, 1)));
    assert!(chain.stationarity_residual() == rational(0, 1));
    assert!(chain.min_holding() >= rational(1, 2));
}

#[test]
fn implemented_kernel_is_reversible_exactly() {
    for beta in [-1.0f64, 0.0, 0.7] {
        let bias = Bias::from_log_bias(beta);
        let up = implemented_acceptance(&bias, Direction::Up);
        let down = implemented_acceptance(&bias, Direction::Down);
        // The implemented chain is exactly reversible at the rational bias up/down.
        let lambda = &up / &down;
        assert!((Scalar::to_f64(&lambda) - beta.exp()).abs() < 1e-15 * beta.exp().max(1.0));
        check_reversible(&build_chain(&RegionPoset::new(Region::rectangle(4, 4)), &lambda, 10_000).unwrap());
        check_reversible(&build_chain(&PermutationPoset::new(5).unwrap(), &lambda, 10_000).unwrap());
        check_reversible(&build_chain(&PlanePartitionPoset::new(2, 2, 3).unwrap(), &lambda, 10_000).unwrap());
    }
}

#[test]
fn rational_biases_have_exact_thresholds() {
    for (p, q) in [(1u32, 2u32), (30, 42), (5, 7), (3, 1), (7, 7)] {
        let bias = Bias::from_ratio(&p.into(), &q.into()).unwrap();
        let up = implemented_acceptance(&bias, Direction::Up);
        let down = implemented_acceptance(&bias, Direction::Down);
        let lambda = rational(p as i64, q as i64);
        let target_up = if lambda < rational(1, 1) { lambda.clone() } else { rational(1, 1) };
        let target_down = if lambda > rational(1, 1) { rational(1, 1) / &lambda } else { rational(1, 1) };
        // ceil(2^64 p) / 2^64 differs from p by less than 2^-64.
        let eps = BigRational::new(BigInt::from(1), BigInt::from(1u128 << 64));
        assert!(up >= target_up && &up - &target_up < eps);
        assert!(down >= target_down && &down - &target_down < eps);
    }
}

#[test]
fn high_precision_kernel_balances_at_irrational_bias() {
    let mut cc = astro_float::Consts::new().unwrap();
    let lambda = HighPrecision::from_f64(0.7).exp(&mut cc);
    let chain = build_chain(&RegionPoset::new(Region::rectangle(3, 3)), &lambda, 1000).unwrap();
    for (i, row) in chain.transitions.iter().enumerate() {
        for (j, p) in row {
            let lhs = chain.stationary[i].mul(p);
            let rhs = chain.stationary[*j].mul(&chain.probability(*j, i));
            assert!(lhs.sub(&rhs).abs().surely_le(&HighPrecision::from_f64(1e-100)));
        }
    }
}

#[test]
fn rank_histogram_matches_stationary_law() {
    let poset = RegionPoset::new(Region::rectangle(3, 3));
    let chain = build_chain(&poset, &1.0f64, 1000).unwrap();
    let r = poset.rank_bound();
    let exact: Vec<f64> = (0..=r).map(|k| chain.rank_mass(k)).collect();
    // 10^6 steps thinned every 500, far beyond the mixing time, so the
    // retained ranks are close to independent.
    let mut state = ChainState::new(poset.minimum(), Bias::unbiased(), 2024);
    advance(&poset, &mut state, 5_000);
    let (total, gap) = (1_000_000u64, 500u64);
    let samples = total / gap;
    let mut counts = vec![0u64; r + 1];
    for _ in 0..samples {
        advance(&poset, &mut state, gap);
        counts[poset.rank(&state.element)] += 1;
    }
    for k in 0..=r {
        let p = exact[k];
        let sigma = (p * (1.0 - p) / samples as f64).sqrt();
        let freq = counts[k] as f64 / samples as f64;
        assert!((freq - p).abs() < 3.0 * sigma, "rank {k}: {freq} vs {p}");
    }
}

#[test]
fn stepping_changes_rank_by_at_most_one() {
    let poset = PlanePartitionPoset::new(3, 3, 3).unwrap();
    let mut state = ChainState::new(poset.minimum(), Bias::from_log_bias(0.2), 9);
    let mut prev = 0usize;
    for _ in 0..50_000 {
        advance(&poset, &mut state, 1);
        let r = poset.rank(&state.element);
        assert!(r.abs_diff(prev) <= 1);
        prev = r;
    }
}

#[test]
fn enumeration_is_graded_and_sized() {
    let all = enumerate(&PermutationPoset::new(5).unwrap(), 1000).unwrap();
    assert_eq!(all.elements.len(), 120);
    let poset = RegionPoset::new(Region::rectangle(2, 2));
    let all = enumerate(&poset, 100).unwrap();
    assert_eq!(all.rank_profile.as_u64(), vec![1, 1, 2, 1, 1]);
}

proptest! {
    #[test]
    fn run_chain_is_reproducible(seed in any::<u64>(), steps in 0u64..2000, beta in -1.5f64..1.5) {
        let poset = RegionPoset::new(Region::under_hyperbola(12));
        let bias = Bias::from_log_bias(beta);
        let a = run_chain(&poset, &bias, steps, seed, poset.minimum());
        let b = run_chain(&poset, &bias, steps, seed, poset.minimum());
        prop_assert_eq!(a, b);
    }

    #[test]
    fn region_chain_stays_inside(seed in any::<u64>(), beta in -1.0f64..1.0) {
        let region = Region::new(vec![6, 6, 4, 4, 2, 1], Some(vec![2, 1, 1])).unwrap();
        let poset = RegionPoset::new(region.clone());
        let mut state = ChainState::new(poset.minimum(), Bias::from_log_bias(beta), seed);
        for _ in 0..500 {
            advance(&poset, &mut state, 1);
            let heights = state.element.heights();
            prop_assert!(heights.windows(2).all(|w| w[0] >= w[1]));
            prop_assert!(heights.len() <= region.width());
            for (x, &h) in heights.iter().enumerate() {
                prop_assert!(h <= region.ceiling_at(x) && h >= region.floor_at(x));
            }
            for x in heights.len()..region.width() {
                prop_assert_eq!(region.floor_at(x), 0);
            }
        }
    }
}
