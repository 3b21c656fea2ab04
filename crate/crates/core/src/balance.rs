//! The bias schedule `λ_t = c^{t/R − 1}`, the search for a balanced `t`,
//! the fixed-rank rejection sampler and approximate counting by
//! self-reducibility.

use rand::RngExt;

use crate::cftp::{cftp_sample, MonotoneLattice, PerfectSampler};
use crate::partitions::{Region, RegionPoset};
use crate::poset::{advance, Bias, ChainState, GradedPoset};
use crate::rng::{rng_from_seed, split_seed, ChainRng};
use crate::{Error, Result};

/// The grid `β_t = ln(1/c) + t·ln(c)/R` for `t ∈ [0, R²]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiasSchedule {
    c: f64,
    rank_bound: usize,
}

impl BiasSchedule {
    pub fn new(c: f64, rank_bound: usize) -> Result<Self> {
        if !(c > 1.0 && c.is_finite()) {
            return Err(Error::out_of_range("c", c, 1, f64::INFINITY));
        }
        if rank_bound == 0 {
            return Err(Error::out_of_range("rank bound", 0, 1, f64::INFINITY));
        }
        Ok(BiasSchedule { c, rank_bound })
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn rank_bound(&self) -> usize {
        self.rank_bound
    }

    /// `R²`, the last schedule index.
    pub fn t_max(&self) -> u64 {
        (self.rank_bound as u64).pow(2)
    }

    pub fn log_bias(&self, t: u64) -> Result<f64> {
        if t > self.t_max() {
            return Err(Error::out_of_range("t", t as f64, 0, self.t_max() as f64));
        }
        let r = self.rank_bound as f64;
        Ok((1.0 / self.c).ln() + t as f64 * self.c.ln() / r)
    }

    /// `(λ_t, β_t)`.
    pub fn lambda_at(&self, t: u64) -> Result<(f64, f64)> {
        let beta = self.log_bias(t)?;
        Ok((beta.exp(), beta))
    }

    pub fn bias(&self, t: u64) -> Result<Bias> {
        Ok(Bias::from_log_bias(self.log_bias(t)?))
    }
}

pub fn lambda_at(schedule: &BiasSchedule, t: u64) -> Result<(f64, f64)> {
    schedule.lambda_at(t)
}

/// A source of (approximately) Boltzmann-distributed elements.
pub trait Sampler<P: GradedPoset> {
    fn draw(&mut self, model: &P, bias: &Bias, seed: u64) -> Result<P::Element>;

    /// Whether draws are exactly stationary.
    fn is_exact(&self) -> bool {
        false
    }
}

/// Runs the chain for a fixed number of steps per draw.
///
/// With `warm` set, consecutive draws at the same bias continue one
/// trajectory instead of restarting from the minimum.
#[derive(Debug, Clone)]
pub struct ChainSampler<E> {
    pub steps: u64,
    pub warm: bool,
    state: Option<ChainState<E>>,
}

impl<E> ChainSampler<E> {
    pub fn new(steps: u64, warm: bool) -> Self {
        ChainSampler { steps, warm, state: None }
    }
}

impl<P: GradedPoset> Sampler<P> for ChainSampler<P::Element> {
    fn draw(&mut self, model: &P, bias: &Bias, seed: u64) -> Result<P::Element> {
        let reuse = self.warm && self.state.as_ref().is_some_and(|s| s.bias == *bias);
        if !reuse {
            self.state = Some(ChainState::new(model.minimum(), bias.clone(), seed));
        }
        let state = self.state.as_mut().unwrap();
        advance(model, state, self.steps);
        Ok(state.element.clone())
    }
}

#[derive(Debug, Clone)]
pub struct BalanceOptions {
    /// Growth bound `c`; defaults to the model's `Δ`.
    pub c: Option<f64>,
    /// Target probability that every probe is within the Hoeffding slack.
    pub confidence: f64,
    /// Samples per probe; defaults to the Hoeffding count for `confidence`.
    pub samples_per_probe: Option<usize>,
}

impl Default for BalanceOptions {
    fn default() -> Self {
        BalanceOptions { c: None, confidence: 0.95, samples_per_probe: None }
    }
}

impl BalanceOptions {
    pub fn resolve_c<P: GradedPoset>(&self, model: &P) -> f64 {
        self.c.unwrap_or((model.max_degree() as f64).max(2.0))
    }
}

/// Samples per probe so that, with probability `confidence`, all `probes`
/// empirical tails are within `1/(2(c+1))` of the truth.
pub fn hoeffding_samples(c: f64, confidence: f64, probes: usize) -> usize {
    let slack = 1.0 / (2.0 * (c + 1.0));
    let delta = (1.0 - confidence).max(1e-12);
    ((2.0 * probes as f64 / delta).ln() / (2.0 * slack * slack)).ceil() as usize
}

#[derive(Debug, Clone, PartialEq)]
pub struct Probe {
    pub t: u64,
    /// Empirical `Pr_t[r > k]`.
    pub upper_tail: f64,
    pub samples: usize,
}

#[derive(Debug, Clone)]
pub struct BalancedBias {
    pub t: u64,
    pub schedule: BiasSchedule,
    pub bias: Bias,
    pub probes: Vec<Probe>,
}

/// Binary search for the smallest `t` whose empirical upper tail
/// `Pr_t[r > k]` exceeds `1/(c+1)`.
pub fn find_balanced_bias<P, S>(model: &P, k: usize, sampler: &mut S, options: &BalanceOptions, seed: u64) -> Result<BalancedBias>
where
    P: GradedPoset,
    S: Sampler<P>,
{
    let r = model.rank_bound();
    if k == 0 || k >= r {
        return Err(Error::out_of_range("rank", k as f64, 1, r as f64 - 1.0));
    }
    let c = options.resolve_c(model);
    let schedule = BiasSchedule::new(c, r)?;
    let t_max = schedule.t_max();
    let probe_budget = (64 - t_max.leading_zeros()) as usize + 2;
    let samples = options.samples_per_probe.unwrap_or_else(|| hoeffding_samples(c, options.confidence, probe_budget)).max(1);
    let threshold = 1.0 / (c + 1.0);
    let mut seeds = rng_from_seed(split_seed(seed, 0xBA1A));
    let mut probes: Vec<Probe> = Vec::new();
    let mut probe = |t: u64, probes: &mut Vec<Probe>, seeds: &mut ChainRng| -> Result<bool> {
        let bias = schedule.bias(t)?;
        let mut above = 0usize;
        for _ in 0..samples {
            let e = sampler.draw(model, &bias, seeds.random())?;
            if model.rank(&e) > k {
                above += 1;
            }
        }
        let upper_tail = above as f64 / samples as f64;
        probes.push(Probe { t, upper_tail, samples });
        Ok(upper_tail > threshold)
    };

    if !probe(t_max, &mut probes, &mut seeds)? {
        return Err(Error::NoBalancedBias { rank: k, t_max });
    }
    let t = if probe(0, &mut probes, &mut seeds)? {
        0
    } else {
        let (mut lo, mut hi) = (0u64, t_max);
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if probe(mid, &mut probes, &mut seeds)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    };
    Ok(BalancedBias { t, schedule, bias: schedule.bias(t)?, probes })
}

#[derive(Debug, Clone)]
pub struct FixedRankSample<E> {
    pub element: E,
    /// Draws consumed, including the accepted one; zero for the extremes.
    pub draws: u64,
}

/// Draws at `bias` until one has rank `k`.
pub fn sample_fixed_rank<P, S>(
    model: &P,
    k: usize,
    bias: &Bias,
    sampler: &mut S,
    retry_cap: Option<u64>,
    seed: u64,
) -> Result<FixedRankSample<P::Element>>
where
    P: GradedPoset,
    S: Sampler<P>,
{
    if let Some(e) = extreme_of_rank(model, k) {
        return Ok(FixedRankSample { element: e, draws: 0 });
    }
    let cap = retry_cap.unwrap_or(u64::MAX);
    let mut seeds = rng_from_seed(split_seed(seed, 0xF1CE));
    for draw in 1..=cap {
        let e = sampler.draw(model, bias, seeds.random())?;
        if model.rank(&e) == k {
            return Ok(FixedRankSample { element: e, draws: draw });
        }
    }
    Err(Error::RejectionBudgetExhausted { draws: cap })
}

fn extreme_of_rank<P: GradedPoset>(model: &P, k: usize) -> Option<P::Element> {
    if k == 0 {
        return Some(model.minimum());
    }
    if k == model.rank_bound() {
        return model.maximum();
    }
    None
}

/// Finds the balanced bias for `k`, then samples one element of rank `k`.
pub fn sample_uniform_rank<P, S>(
    model: &P,
    k: usize,
    sampler: &mut S,
    options: &BalanceOptions,
    retry_cap: Option<u64>,
    seed: u64,
) -> Result<FixedRankSample<P::Element>>
where
    P: GradedPoset,
    S: Sampler<P>,
{
    Ok(sample_many_uniform_rank(model, k, sampler, options, retry_cap, 1, seed)?.samples.pop().unwrap())
}

#[derive(Debug, Clone)]
pub struct FixedRankBatch<E> {
    /// `None` when `k` is an extreme rank and no search was needed.
    pub balanced: Option<BalancedBias>,
    pub samples: Vec<FixedRankSample<E>>,
}

/// One bias search followed by `count` independent rank-`k` draws.
pub fn sample_many_uniform_rank<P, S>(
    model: &P,
    k: usize,
    sampler: &mut S,
    options: &BalanceOptions,
    retry_cap: Option<u64>,
    count: usize,
    seed: u64,
) -> Result<FixedRankBatch<P::Element>>
where
    P: GradedPoset,
    S: Sampler<P>,
{
    if k > model.rank_bound() {
        return Err(Error::out_of_range("rank", k as f64, 0, model.rank_bound() as f64));
    }
    if let Some(e) = extreme_of_rank(model, k) {
        let samples = (0..count).map(|_| FixedRankSample { element: e.clone(), draws: 0 }).collect();
        return Ok(FixedRankBatch { balanced: None, samples });
    }
    let balanced = find_balanced_bias(model, k, sampler, options, split_seed(seed, 0))?;
    let mut samples = Vec::with_capacity(count);
    for i in 0..count {
        samples.push(sample_fixed_rank(model, k, &balanced.bias, sampler, retry_cap, split_seed(seed, i as u64 + 1))?);
    }
    Ok(FixedRankBatch { balanced: Some(balanced), samples })
}

/// How a lattice sampler produces its Boltzmann draws.
#[derive(Debug, Clone)]
pub struct FixedRankOptions {
    pub balance: BalanceOptions,
    /// Route draws through coupling from the past.
    pub exact: bool,
    /// Chain steps per draw when not exact; calibrated from coupling when absent.
    pub steps: Option<u64>,
    pub retry_cap: Option<u64>,
    pub cftp_max_steps: u64,
}

impl Default for FixedRankOptions {
    fn default() -> Self {
        FixedRankOptions {
            balance: BalanceOptions::default(),
            exact: true,
            steps: None,
            retry_cap: None,
            cftp_max_steps: crate::cftp::DEFAULT_MAX_STEPS,
        }
    }
}

/// `count` uniform elements of rank `k` of a monotone lattice.
pub fn sample_lattice_rank<L: MonotoneLattice>(
    lattice: &L,
    k: usize,
    count: usize,
    options: &FixedRankOptions,
    seed: u64,
) -> Result<FixedRankBatch<L::Element>> {
    if options.exact {
        let mut sampler = PerfectSampler::new(options.cftp_max_steps);
        sample_many_uniform_rank(lattice, k, &mut sampler, &options.balance, options.retry_cap, count, seed)
    } else {
        let steps = match options.steps {
            Some(s) => s,
            None => calibrate_mixing_steps(lattice, &Bias::unbiased(), seed, options.cftp_max_steps)?,
        };
        let mut sampler: ChainSampler<L::Element> = ChainSampler::new(steps, true);
        sample_many_uniform_rank(lattice, k, &mut sampler, &options.balance, options.retry_cap, count, seed)
    }
}

/// Chain steps per draw estimated from coupling: twice the largest
/// coalescing horizon over eight runs.
pub fn calibrate_mixing_steps<L: MonotoneLattice>(lattice: &L, bias: &Bias, seed: u64, max_steps: u64) -> Result<u64> {
    let mut horizon = 1;
    for i in 0..8 {
        horizon = horizon.max(cftp_sample(lattice, bias, split_seed(seed, i), max_steps)?.horizon);
    }
    Ok(2 * horizon)
}

/// One level of the recursion.
#[derive(Debug, Clone, PartialEq)]
pub struct CountLevel {
    pub target: usize,
    /// First-column height conditioned on.
    pub height: u32,
    /// Fraction of samples with that first-column height.
    pub fraction: f64,
}

#[derive(Debug, Clone)]
pub struct ApproxCount {
    pub estimate: f64,
    pub levels: Vec<CountLevel>,
}

/// Estimates the number of size-`n` diagrams in `region`.
///
/// Each level samples uniform diagrams, fixes the first column at the
/// rounded mean height `m`, and divides by the fraction `f̂` of samples with
/// that height; the rest of the diagram is a size-`(n − m)` diagram in the
/// remaining columns capped at `m`.
pub fn approx_count(region: &Region, n: usize, samples_per_level: usize, seed: u64, options: &FixedRankOptions) -> Result<ApproxCount> {
    if region.has_floor() {
        return Err(Error::InvalidRegion("approximate counting needs a region without floor".into()));
    }
    if n > region.area() {
        return Err(Error::out_of_range("n", n as f64, 0, region.area() as f64));
    }
    if samples_per_level == 0 {
        return Err(Error::InvalidInput("samples_per_level must be positive".into()));
    }
    let mut region = region.clone();
    let mut target = n;
    let mut estimate = 1.0;
    let mut levels = Vec::new();
    let mut level_index = 0u64;
    while target > 0 && target < region.area() {
        let poset = RegionPoset::new(region.clone());
        let level_seed = split_seed(seed, level_index);
        let samples = sample_lattice_rank(&poset, target, samples_per_level, options, level_seed)?;
        let heights: Vec<u32> = samples.samples.iter().map(|s| s.element.first_column_height()).collect();
        let mean = heights.iter().map(|&h| h as f64).sum::<f64>() / heights.len() as f64;
        let mut m = mean.round() as u32;
        let mut hits = heights.iter().filter(|&&h| h == m).count();
        if hits == 0 {
            m = mode(&heights);
            hits = heights.iter().filter(|&&h| h == m).count();
        }
        let fraction = hits as f64 / heights.len() as f64;
        estimate /= fraction;
        levels.push(CountLevel { target, height: m, fraction });
        region = region.restrict(1, m)?;
        target -= m as usize;
        level_index += 1;
    }
    // Remaining cases have exactly one diagram: empty, or the full region.
    Ok(ApproxCount { estimate, levels })
}

fn mode(values: &[u32]) -> u32 {
    let mut counts = std::collections::BTreeMap::new();
    for &v in values {
        *counts.entry(v).or_insert(0usize) += 1;
    }
    counts.into_iter().max_by_key(|&(v, c)| (c, std::cmp::Reverse(v))).map_or(0, |(v, _)| v)
}
