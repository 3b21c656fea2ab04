//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p fixedrank-cli --test acceptance`. Single
//! criteria can be selected by number: `-- 3 4`.

use std::collections::HashMap;
use std::hash::Hash;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use fixedrank::balance::{approx_count, sample_lattice_rank, BalanceOptions, FixedRankOptions};
use fixedrank::cftp::{cftp_sample, DEFAULT_MAX_STEPS};
use fixedrank::counts;
use fixedrank::diagnostics::{
    lambda_bounds, salvage_bound_holds, salvage_bound_value, salvage_probability, verify_bias_inequalities, z_n_bound, Scalar,
};
use fixedrank::lozenge::PlanePartitionPoset;
use fixedrank::partitions::{mixing_bound, moves, salvage, PartitionSampler, PartitionSamplerConfig, Region, RegionPoset};
use fixedrank::permutations::PermutationPoset;
use fixedrank::poset::{advance, ChainState, GradedPoset};
use fixedrank::rng::split_seed;
use num_bigint::BigUint;
use num_traits::ToPrimitive;
use statrs::distribution::{ChiSquared, ContinuousCDF};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

// Oracles

fn brute_partitions(n: u32, max: u32) -> Vec<Vec<u32>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in (1..=n.min(max)).rev() {
        for mut rest in brute_partitions(n - first, first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn inversions(p: &[u32]) -> usize {
    (0..p.len()).map(|i| (i + 1..p.len()).filter(|&j| p[i] > p[j]).count()).sum()
}

fn brute_permutations(n: u32) -> Vec<Vec<u32>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in brute_permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n);
            out.push(q);
        }
    }
    out
}

/// Monotone `a × b` matrices with entries in `[0, c]`.
fn brute_plane_partitions(a: usize, b: usize, c: u32) -> Vec<Vec<Vec<u32>>> {
    let cells = a * b;
    let mut out = Vec::new();
    let mut m = vec![0u32; cells];
    loop {
        let ok = (0..a).all(|i| {
            (0..b).all(|j| (j + 1 >= b || m[i * b + j] >= m[i * b + j + 1]) && (i + 1 >= a || m[i * b + j] >= m[(i + 1) * b + j]))
        });
        if ok {
            out.push(m.chunks(b).map(|r| r.to_vec()).collect());
        }
        let mut pos = 0;
        loop {
            if pos == cells {
                return out;
            }
            if m[pos] < c {
                m[pos] += 1;
                break;
            }
            m[pos] = 0;
            pos += 1;
        }
    }
}

/// Pearson statistic against the uniform law on `support`; draws outside
/// the support make it infinite.
fn chi_square_uniform<T: Eq + Hash>(draws: impl IntoIterator<Item = T>, support: &[T]) -> f64 {
    let mut counts: HashMap<&T, u64> = support.iter().map(|s| (s, 0)).collect();
    let mut total = 0u64;
    for d in draws {
        match counts.get_mut(&d) {
            Some(c) => *c += 1,
            None => return f64::INFINITY,
        }
        total += 1;
    }
    let expected = total as f64 / support.len() as f64;
    counts.values().map(|&o| (o as f64 - expected).powi(2) / expected).sum()
}

fn quantile(df: usize, q: f64) -> f64 {
    ChiSquared::new(df as f64).unwrap().inverse_cdf(q)
}

// Criteria

fn exact_counts() -> Outcome {
    let table = counts::partition_numbers(40);
    let partitions_ok = (0..=40u32).all(|n| table[n as usize] == BigUint::from(brute_partitions(n, n).len()));
    let small = table[5] == BigUint::from(7u32) && table[8] == BigUint::from(22u32);
    let inversions_ok = (1..=7u32).all(|n| {
        let mut hist = vec![0u64; (n * (n - 1) / 2 + 1) as usize];
        for p in brute_permutations(n) {
            hist[inversions(&p)] += 1;
        }
        let got: Vec<u64> = counts::inversion_numbers(n as usize).iter().map(|c| c.to_u64().unwrap()).collect();
        got == hist
    });
    let total: BigUint = (0..=8).map(|k| counts::box_plane_partitions(2, 2, 2, k)).sum();
    let boxes_ok = total == BigUint::from(20u32) && brute_plane_partitions(2, 2, 2).len() == 20;
    outcome(
        partitions_ok && small && inversions_ok && boxes_ok,
        format!("p(n) n≤40: {partitions_ok}, p(5)=7 p(8)=22: {small}, inversions n≤7: {inversions_ok}, 2×2×2 total 20: {boxes_ok}"),
    )
}

fn lambda_range() -> Outcome {
    let table = counts::partition_numbers(2000);
    let failures: Vec<usize> = (30..=2000)
        .filter(|&n| {
            let b = lambda_bounds(&table, n);
            !(b.lower && b.upper)
        })
        .collect();
    outcome(failures.is_empty(), format!("1 − 2/√n < λ_n < 1 − 1/√n for 30 ≤ n ≤ 2000; failures {failures:?}"))
}

fn report_ranks<P: GradedPoset>(name: &str, poset: &P, ok3: &mut bool, ok4: &mut bool, lines: &mut Vec<String>) {
    let c = BalanceOptions::default().resolve_c(poset);
    // Ranks 0 and R hold one element each and need no bias.
    let r = poset.rank_bound();
    let (mut three, mut four) = (true, true);
    for k in 1..r {
        let rep = verify_bias_inequalities(poset, c, k).unwrap();
        three &= rep.ratio_bound && rep.balanced_t_exists;
        four &= rep.cut_conductance_bound && rep.rank_mass_bound_spectral;
    }
    lines.push(format!("{name} (c={c}, k=1..{}): ratio and tails {three}, conductance and rank mass {four}", r - 1));
    *ok3 &= three;
    *ok4 &= four;
}

fn bias_checks() -> (bool, bool, String) {
    let (mut ok3, mut ok4, mut lines) = (true, true, Vec::new());
    report_ranks("3×3 box", &RegionPoset::new(Region::rectangle(3, 3)), &mut ok3, &mut ok4, &mut lines);
    report_ranks("Bruhat n=4", &PermutationPoset::new(4).unwrap(), &mut ok3, &mut ok4, &mut lines);
    report_ranks("2×2×2 box", &PlanePartitionPoset::new(2, 2, 2).unwrap(), &mut ok3, &mut ok4, &mut lines);
    (ok3, ok4, lines.join("; "))
}

fn perfect_uniformity() -> Outcome {
    const SEEDS: u64 = 5;
    const PER_SEED: usize = 20_000;
    let q = 0.999;
    let options = FixedRankOptions::default();
    let mut details = Vec::new();
    let mut ok = true;

    let mut run = |name: &str, stats: Vec<f64>, df: usize| {
        let limit = quantile(df, q);
        let failures = stats.iter().filter(|&&s| !(s < limit)).count();
        let stat_text: Vec<String> = stats.iter().map(|s| format!("{s:.1}")).collect();
        details.push(format!("{name}: χ² [{}] vs {limit:.1}, {failures} seed failures", stat_text.join(", ")));
        ok &= failures <= 1;
    };

    let poset = RegionPoset::new(Region::under_hyperbola(8));
    let support = brute_partitions(8, 8);
    let stats = (0..SEEDS)
        .map(|s| {
            let batch = sample_lattice_rank(&poset, 8, PER_SEED, &options, 500 + s).unwrap();
            chi_square_uniform(batch.samples.into_iter().map(|x| x.element.parts()), &support)
        })
        .collect();
    run("partitions of 8", stats, support.len() - 1);

    let poset = PermutationPoset::new(5).unwrap();
    let support: Vec<Vec<u32>> = brute_permutations(5).into_iter().filter(|p| inversions(p) == 3).collect();
    let stats = (0..SEEDS)
        .map(|s| {
            let batch = sample_lattice_rank(&poset, 3, PER_SEED, &options, 600 + s).unwrap();
            chi_square_uniform(batch.samples.into_iter().map(|x| x.element.mapping().to_vec()), &support)
        })
        .collect();
    run("permutations of 5 with 3 inversions", stats, support.len() - 1);

    let poset = PlanePartitionPoset::new(3, 3, 3).unwrap();
    let support: Vec<Vec<Vec<u32>>> =
        brute_plane_partitions(3, 3, 3).into_iter().filter(|m| m.iter().flatten().sum::<u32>() == 6).collect();
    let stats = (0..SEEDS)
        .map(|s| {
            let batch = sample_lattice_rank(&poset, 6, PER_SEED, &options, 700 + s).unwrap();
            chi_square_uniform(batch.samples.into_iter().map(|x| x.element.to_rows()), &support)
        })
        .collect();
    run(&format!("{} plane partitions of volume 6 in 3×3×3", support.len()), stats, support.len() - 1);

    details.push(format!("{} draws per family", SEEDS as usize * PER_SEED));
    outcome(ok, details.join("; "))
}

fn salvage_success() -> Outcome {
    let mut exact_ok = true;
    let mut worst = f64::INFINITY;
    for n in 30..=60 {
        let prob = salvage_probability(n).unwrap();
        exact_ok &= salvage_bound_holds(&prob, n);
        worst = worst.min(Scalar::to_f64(&prob) / salvage_bound_value(n));
    }
    // Empirical: stationary draws at n = 100 by coupling from the past.
    let n = 100;
    let sampler = PartitionSampler::new(n, PartitionSamplerConfig::default()).unwrap();
    let draws = 10_000u64;
    let successes = (0..draws)
        .filter(|&s| {
            let d = cftp_sample(sampler.poset(), sampler.bias(), split_seed(1000, s), DEFAULT_MAX_STEPS).unwrap().element;
            let size = d.size();
            size >= n as u64 && size <= 2 * n as u64 && salvage(&d.parts(), n as u64).is_some()
        })
        .count();
    let rate = successes as f64 / draws as f64;
    let bound = salvage_bound_value(n);
    let empirical_ok = rate >= bound;
    outcome(
        exact_ok && empirical_ok,
        format!("exact 30..=60: {exact_ok} (min prob/bound {worst:.1}); n=100: {successes}/{draws} = {rate:.4} vs {bound:.5}"),
    )
}

fn z_bound() -> Outcome {
    let mut ok = true;
    let mut worst: f64 = 0.0;
    for n in 30..=60 {
        let (holds, ratio) = z_n_bound(n).unwrap();
        ok &= holds;
        worst = worst.max(ratio / (40.0 * (n as f64).powf(0.75)));
    }
    outcome(ok, format!("Z_n < 40 n^(3/4) λ^n p(n) for 30 ≤ n ≤ 60; max ratio/bound {worst:.3}"))
}

fn space() -> Outcome {
    let n = 10_000usize;
    let steps = 10_000_000u64;
    let sampler = PartitionSampler::new(n, PartitionSamplerConfig::default()).unwrap();
    let poset = sampler.poset();
    let root = ((2 * n) as f64).sqrt().floor() as usize;
    let (run_cap, move_cap) = (2 * root, 4 * root);
    let mut state = ChainState::new(poset.minimum(), sampler.bias().clone(), 8);
    let (mut max_runs, mut max_moves) = (0usize, moves(&state.element, poset.region()).len());
    let mut size = state.element.size();
    for _ in 0..steps {
        advance(poset, &mut state, 1);
        max_runs = max_runs.max(state.element.stored_runs());
        // A state changes exactly when its size does.
        let s = state.element.size();
        if s != size {
            size = s;
            max_moves = max_moves.max(moves(&state.element, poset.region()).len());
        }
    }
    outcome(
        max_runs <= run_cap && max_moves <= move_cap,
        format!("n={n}, {steps} steps: max runs {max_runs} ≤ {run_cap}, max moves {max_moves} ≤ {move_cap}, final size {size}"),
    )
}

fn mixing_formula() -> Outcome {
    let eps = (-1f64).exp();
    let mut ok = true;
    let mut ratios = Vec::new();
    for n in [1_000usize, 10_000] {
        let r = mixing_bound(2 * n, eps).unwrap() as f64 / mixing_bound(n, eps).unwrap() as f64;
        ok &= (3.2..=4.8).contains(&r);
        ratios.push(format!("n={n}: {r:.3}"));
    }
    let table = counts::partition_numbers(2000);
    let beta_ok = (30..=2000).all(|n| lambda_bounds(&table, n).inverse_bias);
    outcome(ok && beta_ok, format!("mixing_bound(2n)/mixing_bound(n) {}; 1/β ≤ 2√n − 1 for 30..=2000: {beta_ok}", ratios.join(", ")))
}

fn approximate_counting() -> Outcome {
    let exact = 42.0;
    assert_eq!(brute_partitions(10, 10).len(), 42);
    let region = Region::under_hyperbola(10);
    let options = FixedRankOptions::default();
    let estimates: Vec<f64> = (0..10).map(|s| approx_count(&region, 10, 4_000, 900 + s, &options).unwrap().estimate).collect();
    let good = estimates.iter().filter(|&&e| ((e - exact) / exact).abs() < 0.1).count();
    let text: Vec<String> = estimates.iter().map(|e| format!("{e:.1}")).collect();
    outcome(good >= 9, format!("{good}/10 within 10% of p(10)=42: [{}]", text.join(", ")))
}

fn throughput() -> Outcome {
    let n = 100_000usize;
    let budget = Duration::from_secs(600);
    let sampler = PartitionSampler::new(n, PartitionSamplerConfig::default()).unwrap();
    let steps = sampler.steps_per_draw();
    // One draw needs at least `steps` kernel steps; time a slice of them.
    let mut state = ChainState::new(sampler.poset().minimum(), sampler.bias().clone(), 11);
    let probe = steps.min(20_000_000);
    let start = Instant::now();
    advance(sampler.poset(), &mut state, probe);
    let rate = probe as f64 / start.elapsed().as_secs_f64();
    let projected = steps as f64 / rate;
    if projected > budget.as_secs_f64() {
        return outcome(
            false,
            format!(
                "n={n}: {steps} steps per draw at {rate:.3e} steps/s needs ≥ {projected:.0} s for one draw, budget {} s",
                budget.as_secs()
            ),
        );
    }
    let start = Instant::now();
    let mut child = std::process::Command::new(env!("CARGO_BIN_EXE_fixedrank"))
        .args(["sample", "partitions", "--n", "100000", "--samples", "1", "--seed", "1"])
        .stdout(std::process::Stdio::null())
        .spawn()
        .unwrap();
    loop {
        if let Some(status) = child.try_wait().unwrap() {
            let t = start.elapsed().as_secs_f64();
            return outcome(status.success() && t < budget.as_secs_f64(), format!("completed in {t:.0} s"));
        }
        if start.elapsed() > budget {
            let _ = child.kill();
            return outcome(false, format!("still running after {} s", budget.as_secs()));
        }
        std::thread::sleep(Duration::from_millis(200));
    }
}

fn main() -> ExitCode {
    let selected: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let wanted = |i: usize| selected.is_empty() || selected.contains(&i);
    let limits = [10, 30, 60, 120, 600, 600, 300, 300, 10, 300, 600];
    let mut failed = Vec::new();
    let mut ran = 0;
    let mut record = |i: usize, o: Outcome, seconds: f64| {
        let in_time = seconds < limits[i - 1] as f64;
        let verdict = if o.passed && in_time { "PASS" } else { "FAIL" };
        let late = if in_time { String::new() } else { format!(" over the {} s limit", limits[i - 1]) };
        println!("criterion {i:>2}: {verdict} [{seconds:.1} s{late}] {}", o.detail);
        ran += 1;
        if verdict == "FAIL" {
            failed.push(i);
        }
    };
    let checks: [(usize, fn() -> Outcome); 2] = [(1, exact_counts), (2, lambda_range)];
    for (i, f) in checks {
        if wanted(i) {
            let start = Instant::now();
            let o = f();
            record(i, o, start.elapsed().as_secs_f64());
        }
    }
    if wanted(3) || wanted(4) {
        // One pass over the three posets serves both criteria.
        let start = Instant::now();
        let (ok3, ok4, detail) = bias_checks();
        let t = start.elapsed().as_secs_f64();
        if wanted(3) {
            record(3, outcome(ok3, detail.clone()), t);
        }
        if wanted(4) {
            record(4, outcome(ok4, detail), t);
        }
    }
    let checks: [(usize, fn() -> Outcome); 7] = [
        (5, perfect_uniformity),
        (6, salvage_success),
        (7, z_bound),
        (8, space),
        (9, mixing_formula),
        (10, approximate_counting),
        (11, throughput),
    ];
    for (i, f) in checks {
        if wanted(i) {
            let start = Instant::now();
            let o = f();
            record(i, o, start.elapsed().as_secs_f64());
        }
    }
    println!("{} of {ran} criteria passed", ran - failed.len());
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("failed: {failed:?}");
        ExitCode::FAILURE
    }
}
