//! Exact finite-chain analysis on enumerable posets.
//!
//! [`FiniteChain`] is generic over a [`Scalar`]: `BigRational` for exact
//! work at rational biases, [`HighPrecision`] for the irrational schedule
//! points `λ_t = c^{t/R − 1}`, and `f64` for spectra and total variation.
//! Inequalities are decided with [`Scalar::surely_le`], which is exact for
//! rationals and demands a margin above the rounding error otherwise, so a
//! reported pass is never an artifact of rounding.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt::Debug;

use astro_float::{BigFloat, Consts, RoundingMode};
use nalgebra::{DMatrix, SymmetricEigen};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::balance::BiasSchedule;
use crate::counts::{self, BigCount};
use crate::partitions::Region;
use crate::poset::{enumerate, GradedPoset, RankProfile};
use crate::{Error, Result};

pub const DEFAULT_STATE_CAP: usize = 100_000;
/// Largest chain for dense matrix work.
pub const DENSE_CAP: usize = 2_000;
/// Largest chain whose conductance is minimized over every subset.
pub const EXHAUSTIVE_CAP: usize = 20;

/// Field operations plus a rounding-aware comparison.
pub trait Scalar: Clone + PartialOrd + Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_u64(v: u64) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn div(&self, other: &Self) -> Self;
    fn to_f64(&self) -> f64;
    /// `self ≤ other`, and certainly so despite rounding.
    fn surely_le(&self, other: &Self) -> bool;

    fn from_big(v: &BigUint) -> Self {
        let mut acc = Self::zero();
        let base = Self::from_u64(1 << 32).mul(&Self::from_u64(1 << 32));
        for limb in v.to_u64_digits().iter().rev() {
            acc = acc.mul(&base).add(&Self::from_u64(*limb));
        }
        acc
    }

    fn abs(&self) -> Self {
        if *self < Self::zero() {
            Self::zero().sub(self)
        } else {
            self.clone()
        }
    }

    fn min_of(&self, other: &Self) -> Self {
        if self <= other {
            self.clone()
        } else {
            other.clone()
        }
    }
}

const F64_MARGIN: f64 = 1e-9;

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_u64(v: u64) -> Self {
        v as f64
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn div(&self, other: &Self) -> Self {
        self / other
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn surely_le(&self, other: &Self) -> bool {
        *self <= *other - F64_MARGIN * (f64::abs(*self) + f64::abs(*other))
    }
}

impl Scalar for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_u64(v: u64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn div(&self, other: &Self) -> Self {
        self / other
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn surely_le(&self, other: &Self) -> bool {
        self <= other
    }
}

/// Working precision of [`HighPrecision`], in bits.
pub const HIGH_PRECISION_BITS: usize = 384;
const HP_MARGIN_BITS: usize = 320;
const RM: RoundingMode = RoundingMode::ToEven;

/// A 384-bit binary float. Comparisons through `surely_le` require a
/// relative gap of `2^-320`.
#[derive(Clone, Debug, PartialEq, PartialOrd)]
pub struct HighPrecision(pub BigFloat);

impl HighPrecision {
    pub fn from_f64(v: f64) -> Self {
        HighPrecision(BigFloat::from_f64(v, HIGH_PRECISION_BITS))
    }

    pub fn exp(&self, cc: &mut Consts) -> Self {
        HighPrecision(self.0.exp(HIGH_PRECISION_BITS, RM, cc))
    }

    pub fn ln(&self, cc: &mut Consts) -> Self {
        HighPrecision(self.0.ln(HIGH_PRECISION_BITS, RM, cc))
    }

    pub fn from_i64(v: i64) -> Self {
        let mut x = BigFloat::from_u64(v.unsigned_abs(), HIGH_PRECISION_BITS);
        if v < 0 {
            x.inv_sign();
        }
        HighPrecision(x)
    }
}

impl Scalar for HighPrecision {
    fn zero() -> Self {
        HighPrecision(BigFloat::from_u64(0, HIGH_PRECISION_BITS))
    }
    fn one() -> Self {
        HighPrecision(BigFloat::from_u64(1, HIGH_PRECISION_BITS))
    }
    fn from_u64(v: u64) -> Self {
        HighPrecision(BigFloat::from_u64(v, HIGH_PRECISION_BITS))
    }
    fn add(&self, other: &Self) -> Self {
        HighPrecision(self.0.add(&other.0, HIGH_PRECISION_BITS, RM))
    }
    fn sub(&self, other: &Self) -> Self {
        HighPrecision(self.0.sub(&other.0, HIGH_PRECISION_BITS, RM))
    }
    fn mul(&self, other: &Self) -> Self {
        HighPrecision(self.0.mul(&other.0, HIGH_PRECISION_BITS, RM))
    }
    fn div(&self, other: &Self) -> Self {
        HighPrecision(self.0.div(&other.0, HIGH_PRECISION_BITS, RM))
    }
    fn to_f64(&self) -> f64 {
        self.0.to_string().parse().unwrap_or(f64::NAN)
    }
    fn surely_le(&self, other: &Self) -> bool {
        let scale = self.abs().add(&other.abs());
        let margin = HighPrecision(scale.0.mul(
            &BigFloat::from_u64(1, HIGH_PRECISION_BITS).div(
                &BigFloat::from_u64(2, HIGH_PRECISION_BITS).powi(HP_MARGIN_BITS, HIGH_PRECISION_BITS, RM),
                HIGH_PRECISION_BITS,
                RM,
            ),
            HIGH_PRECISION_BITS,
            RM,
        ));
        self.add(&margin) <= *other
    }
}

/// The Metropolis kernel on an enumerated poset.
#[derive(Debug, Clone)]
pub struct FiniteChain<E, T> {
    pub states: Vec<E>,
    pub ranks: Vec<usize>,
    /// Off-diagonal entries per row.
    pub transitions: Vec<Vec<(usize, T)>>,
    pub holding: Vec<T>,
    pub stationary: Vec<T>,
}

/// Builds the chain at bias `lambda`; `π` comes from the closed form
/// `λ^{rank} / Z`.
pub fn build_chain<P: GradedPoset, T: Scalar>(model: &P, lambda: &T, cap: usize) -> Result<FiniteChain<P::Element, T>> {
    if !(T::zero() < *lambda) {
        return Err(Error::InvalidInput("bias must be positive".into()));
    }
    let all = enumerate(model, cap)?;
    let index: HashMap<P::Element, usize> = all.index();
    let ranks: Vec<usize> = all.elements.iter().map(|e| model.rank(e)).collect();
    let two_delta = T::from_u64(2 * model.max_degree() as u64);
    let up = T::one().min_of(lambda).div(&two_delta);
    let down = T::one().min_of(&T::one().div(lambda)).div(&two_delta);
    let mut transitions = Vec::with_capacity(all.elements.len());
    let mut holding = Vec::with_capacity(all.elements.len());
    for e in &all.elements {
        let mut row = Vec::new();
        let mut out = T::zero();
        for n in model.up_neighbors(e) {
            row.push((index[&n], up.clone()));
            out = out.add(&up);
        }
        for n in model.down_neighbors(e) {
            row.push((index[&n], down.clone()));
            out = out.add(&down);
        }
        holding.push(T::one().sub(&out));
        transitions.push(row);
    }
    let max_rank = ranks.iter().copied().max().unwrap_or(0);
    let mut powers = vec![T::one()];
    for i in 1..=max_rank {
        powers.push(powers[i - 1].mul(lambda));
    }
    let z = ranks.iter().fold(T::zero(), |acc, &r| acc.add(&powers[r]));
    let stationary = ranks.iter().map(|&r| powers[r].div(&z)).collect();
    Ok(FiniteChain { states: all.elements, ranks, transitions, holding, stationary })
}

impl<E: Clone, T: Scalar> FiniteChain<E, T> {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn probability(&self, from: usize, to: usize) -> T {
        if from == to {
            return self.holding[from].clone();
        }
        self.transitions[from].iter().find(|(j, _)| *j == to).map_or_else(T::zero, |(_, p)| p.clone())
    }

    pub fn row_sums(&self) -> Vec<T> {
        (0..self.len()).map(|i| self.transitions[i].iter().fold(self.holding[i].clone(), |acc, (_, p)| acc.add(p))).collect()
    }

    /// `max_j |(πP)_j − π_j|`.
    pub fn stationarity_residual(&self) -> T {
        let mut next: Vec<T> = (0..self.len()).map(|i| self.stationary[i].mul(&self.holding[i])).collect();
        for (i, row) in self.transitions.iter().enumerate() {
            for (j, p) in row {
                next[*j] = next[*j].add(&self.stationary[i].mul(p));
            }
        }
        next.iter().zip(&self.stationary).map(|(a, b)| a.sub(b).abs()).fold(T::zero(), |m, x| if x > m { x } else { m })
    }

    /// `π(σ)P(σ,ρ) = π(ρ)P(ρ,σ)` on every edge, compared with `==`.
    pub fn detailed_balance_holds(&self) -> bool
    where
        T: PartialEq,
    {
        self.transitions
            .iter()
            .enumerate()
            .all(|(i, row)| row.iter().all(|(j, p)| self.stationary[i].mul(p) == self.stationary[*j].mul(&self.probability(*j, i))))
    }

    pub fn min_holding(&self) -> T {
        self.holding.iter().cloned().fold(T::one(), |m, x| if x < m { x } else { m })
    }

    pub fn mass(&self, subset: &[usize]) -> T {
        subset.iter().fold(T::zero(), |acc, &i| acc.add(&self.stationary[i]))
    }

    /// `π(Ω_k)`.
    pub fn rank_mass(&self, k: usize) -> T {
        let idx: Vec<usize> = (0..self.len()).filter(|&i| self.ranks[i] == k).collect();
        self.mass(&idx)
    }

    /// Indices of `Ω_{≤k}`.
    pub fn rank_cut(&self, k: usize) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.ranks[i] <= k).collect()
    }

    /// `Φ(S) = Σ_{σ∈S, ρ∉S} π(σ)P(σ,ρ) / π(S)`.
    pub fn conductance_of_cut(&self, subset: &[usize]) -> Result<T> {
        let mut inside = vec![false; self.len()];
        for &i in subset {
            if i >= self.len() {
                return Err(Error::InvalidInput(format!("state {i} out of range")));
            }
            inside[i] = true;
        }
        let count = inside.iter().filter(|&&b| b).count();
        if count == 0 || count == self.len() {
            return Err(Error::InvalidInput("cut must be a nonempty proper subset".into()));
        }
        let mut flow = T::zero();
        let mut mass = T::zero();
        for i in (0..self.len()).filter(|&i| inside[i]) {
            mass = mass.add(&self.stationary[i]);
            for (j, p) in &self.transitions[i] {
                if !inside[*j] {
                    flow = flow.add(&self.stationary[i].mul(p));
                }
            }
        }
        Ok(flow.div(&mass))
    }

    pub fn to_f64(&self) -> FiniteChain<E, f64> {
        FiniteChain {
            states: self.states.clone(),
            ranks: self.ranks.clone(),
            transitions: self.transitions.iter().map(|row| row.iter().map(|(j, p)| (*j, p.to_f64())).collect()).collect(),
            holding: self.holding.iter().map(Scalar::to_f64).collect(),
            stationary: self.stationary.iter().map(Scalar::to_f64).collect(),
        }
    }
}

impl<E: Clone> FiniteChain<E, f64> {
    pub fn dense(&self) -> Result<DMatrix<f64>> {
        if self.len() > DENSE_CAP {
            return Err(Error::TooLarge { cap: DENSE_CAP });
        }
        let n = self.len();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = self.holding[i];
            for (j, p) in &self.transitions[i] {
                m[(i, *j)] += p;
            }
        }
        Ok(m)
    }

    /// `1 − λ₂` of the reversible kernel, via the symmetrization
    /// `D^{1/2} P D^{-1/2}` with `D = diag(π)`.
    pub fn spectral_gap(&self) -> Result<f64> {
        let p = self.dense()?;
        let n = self.len();
        if n < 2 {
            return Ok(1.0);
        }
        let s: Vec<f64> = self.stationary.iter().map(|x| x.sqrt()).collect();
        let sym = DMatrix::from_fn(n, n, |i, j| {
            let a = s[i] * p[(i, j)] / s[j];
            let b = s[j] * p[(j, i)] / s[i];
            0.5 * (a + b)
        });
        let mut eig: Vec<f64> = SymmetricEigen::new(sym).eigenvalues.iter().copied().collect();
        eig.sort_by(|a, b| b.partial_cmp(a).unwrap_or(Ordering::Equal));
        Ok(1.0 - eig[1])
    }

    /// `⌈ln(1/(ε·π_min)) / gap⌉`, an upper bound on `τ(ε)`. The gap is
    /// shrunk by a small margin first so eigenvalue error cannot lower it.
    pub fn relaxation_mixing_bound(&self, epsilon: f64) -> Result<u64> {
        let gap = self.spectral_gap()?;
        let gap = gap * (1.0 - 1e-9) - 1e-12;
        if gap <= 0.0 {
            return Err(Error::HypothesisViolation("chain has no spectral gap".into()));
        }
        let pi_min = self.stationary.iter().copied().fold(f64::INFINITY, f64::min);
        Ok(((1.0 / (epsilon * pi_min)).ln() / gap).ceil() as u64)
    }

    fn step_distribution(&self, dist: &[f64]) -> Vec<f64> {
        let mut next: Vec<f64> = dist.iter().zip(&self.holding).map(|(d, h)| d * h).collect();
        for (i, row) in self.transitions.iter().enumerate() {
            if dist[i] == 0.0 {
                continue;
            }
            for (j, p) in row {
                next[*j] += dist[i] * p;
            }
        }
        next
    }

    fn tv_to_stationary(&self, dist: &[f64]) -> f64 {
        0.5 * dist.iter().zip(&self.stationary).map(|(a, b)| (a - b).abs()).sum::<f64>()
    }

    /// `‖P^t(start, ·) − π‖_TV` for `t = 1..=horizon`.
    pub fn tv_curve(&self, start: usize, horizon: usize) -> Vec<f64> {
        let mut dist = vec![0.0; self.len()];
        dist[start] = 1.0;
        (0..horizon)
            .map(|_| {
                dist = self.step_distribution(&dist);
                self.tv_to_stationary(&dist)
            })
            .collect()
    }

    /// `τ(ε)`: the first `t` with `max_x ‖P^t(x,·) − π‖ ≤ ε`, searched up
    /// to `max_horizon`.
    pub fn mixing_time(&self, epsilon: f64, max_horizon: u64) -> Option<u64> {
        let n = self.len();
        let mut dists: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let mut d = vec![0.0; n];
                d[i] = 1.0;
                d
            })
            .collect();
        for t in 1..=max_horizon {
            let mut worst: f64 = 0.0;
            for d in dists.iter_mut() {
                *d = self.step_distribution(d);
                worst = worst.max(self.tv_to_stationary(d));
            }
            if worst <= epsilon {
                return Some(t);
            }
        }
        None
    }

    /// `min Φ(S)` over `π(S) ≤ 1/2`: over every subset for small chains,
    /// otherwise over rank cuts and their complements, which bounds the
    /// true value from above. The flag says which.
    pub fn chain_conductance(&self) -> (f64, bool) {
        let n = self.len();
        if n <= EXHAUSTIVE_CAP {
            let mut best = f64::INFINITY;
            for mask in 1u32..(1u32 << n) - 1 {
                let mut mass = 0.0;
                let mut flow = 0.0;
                for i in 0..n {
                    if mask >> i & 1 == 1 {
                        mass += self.stationary[i];
                        for (j, p) in &self.transitions[i] {
                            if mask >> j & 1 == 0 {
                                flow += self.stationary[i] * p;
                            }
                        }
                    }
                }
                if mass <= 0.5 {
                    best = best.min(flow / mass);
                }
            }
            return (best, true);
        }
        let max_rank = self.ranks.iter().copied().max().unwrap_or(0);
        let mut best = f64::INFINITY;
        for k in 0..max_rank {
            let cut = self.rank_cut(k);
            let complement: Vec<usize> = (0..n).filter(|i| !cut.contains(i)).collect();
            for s in [cut, complement] {
                if self.mass(&s) <= 0.5 {
                    if let Ok(phi) = self.conductance_of_cut(&s) {
                        best = best.min(phi);
                    }
                }
            }
        }
        (best, false)
    }
}

/// Boltzmann laws `Pr_t[σ] ∝ λ_t^{r(σ)}` on a rank profile, evaluated at
/// [`HIGH_PRECISION_BITS`].
pub struct BoltzmannProfile {
    counts: Vec<HighPrecision>,
    c: f64,
    rank_bound: usize,
    log_step: HighPrecision,
    cc: Consts,
}

impl BoltzmannProfile {
    pub fn new(profile: &RankProfile, schedule: &BiasSchedule) -> Self {
        let mut cc = Consts::new().expect("astro-float constants cache");
        let c = schedule.c();
        let log_step = HighPrecision::from_f64(c).ln(&mut cc).div(&HighPrecision::from_u64(schedule.rank_bound() as u64));
        BoltzmannProfile {
            counts: profile.counts.iter().map(HighPrecision::from_big).collect(),
            c,
            rank_bound: schedule.rank_bound(),
            log_step,
            cc,
        }
    }

    /// `λ_t`.
    pub fn lambda(&mut self, t: u64) -> HighPrecision {
        let e = HighPrecision::from_i64(t as i64 - self.rank_bound as i64);
        self.log_step.mul(&e).exp(&mut self.cc)
    }

    /// Rank masses `Pr_t[r = i]`.
    pub fn rank_masses(&mut self, t: u64) -> Vec<HighPrecision> {
        let lambda = self.lambda(t);
        let mut power = HighPrecision::one();
        let mut weights = Vec::with_capacity(self.counts.len());
        for a in &self.counts {
            weights.push(a.mul(&power));
            power = power.mul(&lambda);
        }
        let z = weights.iter().fold(HighPrecision::zero(), |acc, w| acc.add(w));
        weights.iter().map(|w| w.div(&z)).collect()
    }

    /// `(Pr_t[r ≤ k], Pr_t[r > k])`.
    pub fn tails(&mut self, t: u64, k: usize) -> (HighPrecision, HighPrecision) {
        let masses = self.rank_masses(t);
        let lower = masses[..=k.min(masses.len() - 1)].iter().fold(HighPrecision::zero(), |a, m| a.add(m));
        let upper = masses.iter().skip(k + 1).fold(HighPrecision::zero(), |a, m| a.add(m));
        (lower, upper)
    }

    /// Checks `Pr_{t+1}[σ]/Pr_t[σ] ≥ 1/c` for every rank present and every
    /// `t` in `ts`; returns the first failing `(t, rank)`.
    pub fn ratio_bound_failure(&mut self, ts: impl IntoIterator<Item = u64>) -> Option<(u64, usize)> {
        let inv_c = HighPrecision::one().div(&HighPrecision::from_f64(self.c));
        for t in ts {
            let now = self.rank_masses(t);
            let next = self.rank_masses(t + 1);
            for r in 0..now.len() {
                if self.counts[r] == HighPrecision::zero() {
                    continue;
                }
                // Per element, Pr[σ] = mass(r)/a_r, and a_r cancels.
                let ratio = next[r].div(&now[r]);
                if !inv_c.surely_le(&ratio) {
                    return Some((t, r));
                }
            }
        }
        None
    }

    /// `1 ≤ a_i ≤ c^i` for every rank.
    pub fn growth_hypothesis_holds(&self) -> bool {
        let c = HighPrecision::from_f64(self.c);
        let mut power = HighPrecision::one();
        for a in &self.counts {
            if *a < HighPrecision::one() || *a > power {
                return false;
            }
            power = power.mul(&c);
        }
        true
    }
}

/// Outcome of the balanced-bias checks for one rank.
#[derive(Debug, Clone, Serialize)]
pub struct BiasReport {
    pub k: usize,
    pub c: f64,
    pub rank_bound: usize,
    pub states: usize,
    pub rank_profile: Vec<String>,
    /// `1 ≤ a_i ≤ c^i` for all ranks.
    pub growth_hypothesis: bool,
    /// `Pr_{t+1}[σ]/Pr_t[σ] ≥ 1/c` for all `σ` and `t ∈ [0, R²)`.
    pub ratio_bound: bool,
    /// `Pr_t[r > k]` nondecreasing in `t`.
    pub tails_monotone: bool,
    /// Smallest `t` with `Pr_t[r > k] > 1/(c+1)`.
    pub t_star: Option<u64>,
    pub lambda: Option<f64>,
    pub threshold: f64,
    pub lower_tail: Option<f64>,
    pub upper_tail: Option<f64>,
    /// Both tails at `t*` are at least `1/(c+1)`.
    pub balanced_tails: bool,
    /// Some `t ∈ [0, R²]` has both tails at least `1/(c+1)`.
    pub balanced_t_exists: bool,
    pub pi_k: Option<f64>,
    /// `Φ(Ω_{≤k})` at `λ_{t*}`.
    pub cut_conductance: Option<f64>,
    /// `Φ(Ω_{≤k}) ≤ (c+1)π(Ω_k)`.
    pub cut_conductance_bound: bool,
    pub spectral_gap: Option<f64>,
    /// Relaxation bound on `τ(1/e)`.
    pub tau_hat: Option<u64>,
    /// `π(Ω_k) ≥ 1/(2(c+1)(τ̂+1))`.
    pub rank_mass_bound_spectral: bool,
    /// `τ(1/e)` from powers of the kernel, when small enough to compute.
    pub tau_exact: Option<u64>,
    /// `π(Ω_k) ≥ 1/(2(c+1)(τ+1))` with the computed `τ`.
    pub rank_mass_bound_exact: Option<bool>,
    /// Conductance of the chain and whether every subset was searched.
    pub chain_conductance: Option<f64>,
    pub chain_conductance_exhaustive: bool,
    /// `τ(1/e) ≥ (1 − 2Φ)/(2Φ)`.
    pub conductance_mixing_bound: Option<bool>,
    pub passed: bool,
    pub notes: Vec<String>,
}

/// Largest horizon searched for the exact mixing time.
pub const EXACT_TAU_HORIZON: u64 = 200_000;
/// Largest chain for the exact mixing time.
pub const EXACT_TAU_CAP: usize = 500;

/// Runs every balanced-bias check for rank `k` with growth constant `c`.
pub fn verify_bias_inequalities<P: GradedPoset>(model: &P, c: f64, k: usize) -> Result<BiasReport> {
    let all = enumerate(model, DENSE_CAP)?;
    let rank_bound = all.rank_profile.max_rank();
    if k == 0 || k >= rank_bound {
        return Err(Error::out_of_range("rank", k as f64, 1, rank_bound as f64 - 1.0));
    }
    let schedule = BiasSchedule::new(c, rank_bound)?;
    let mut profile = BoltzmannProfile::new(&all.rank_profile, &schedule);
    let t_max = schedule.t_max();
    let threshold = HighPrecision::one().div(&HighPrecision::from_f64(c + 1.0));
    let mut report = BiasReport {
        k,
        c,
        rank_bound,
        states: all.elements.len(),
        rank_profile: all.rank_profile.counts.iter().map(|a| a.to_string()).collect(),
        growth_hypothesis: profile.growth_hypothesis_holds(),
        ratio_bound: false,
        tails_monotone: true,
        t_star: None,
        lambda: None,
        threshold: 1.0 / (c + 1.0),
        lower_tail: None,
        upper_tail: None,
        balanced_tails: false,
        balanced_t_exists: false,
        pi_k: None,
        cut_conductance: None,
        cut_conductance_bound: false,
        spectral_gap: None,
        tau_hat: None,
        rank_mass_bound_spectral: false,
        tau_exact: None,
        rank_mass_bound_exact: None,
        chain_conductance: None,
        chain_conductance_exhaustive: false,
        conductance_mixing_bound: None,
        passed: false,
        notes: Vec::new(),
    };
    if !report.growth_hypothesis {
        report.notes.push(format!("hypothesis violated: some rank count exceeds c^i for c = {c}"));
    }
    report.ratio_bound = profile.ratio_bound_failure(0..t_max).is_none();

    let mut previous_upper: Option<HighPrecision> = None;
    for t in 0..=t_max {
        let (lower, upper) = profile.tails(t, k);
        if let Some(prev) = &previous_upper {
            // A decrease beyond rounding.
            if upper.surely_le(prev) && upper != *prev {
                report.tails_monotone = false;
            }
        }
        if threshold.surely_le(&lower) && threshold.surely_le(&upper) {
            report.balanced_t_exists = true;
        }
        if report.t_star.is_none() && threshold.surely_le(&upper) {
            report.t_star = Some(t);
            report.lower_tail = Some(lower.to_f64());
            report.upper_tail = Some(upper.to_f64());
            report.balanced_tails = threshold.surely_le(&lower);
        }
        previous_upper = Some(upper);
    }

    if let Some(t) = report.t_star {
        let lambda = profile.lambda(t);
        report.lambda = Some(lambda.to_f64());
        let chain = build_chain(model, &lambda, DENSE_CAP)?;
        let pi_k = chain.rank_mass(k);
        report.pi_k = Some(pi_k.to_f64());
        let phi = chain.conductance_of_cut(&chain.rank_cut(k))?;
        report.cut_conductance = Some(phi.to_f64());
        let c_plus_one = HighPrecision::from_f64(c + 1.0);
        report.cut_conductance_bound = phi.surely_le(&c_plus_one.mul(&pi_k));

        let fchain = chain.to_f64();
        let epsilon = (-1f64).exp();
        report.spectral_gap = Some(fchain.spectral_gap()?);
        let tau_hat = fchain.relaxation_mixing_bound(epsilon)?;
        report.tau_hat = Some(tau_hat);
        let needed =
            |tau: u64| HighPrecision::one().div(&HighPrecision::from_u64(2).mul(&c_plus_one).mul(&HighPrecision::from_u64(tau + 1)));
        report.rank_mass_bound_spectral = needed(tau_hat).surely_le(&pi_k);

        let (cond, exhaustive) = fchain.chain_conductance();
        report.chain_conductance = Some(cond);
        report.chain_conductance_exhaustive = exhaustive;
        if fchain.len() <= EXACT_TAU_CAP {
            if let Some(tau) = fchain.mixing_time(epsilon, EXACT_TAU_HORIZON) {
                report.tau_exact = Some(tau);
                report.rank_mass_bound_exact = Some(needed(tau).surely_le(&pi_k));
                let lower_bound = (1.0 - 2.0 * cond) / (2.0 * cond) * (1.0 / epsilon).ln();
                report.conductance_mixing_bound = Some(lower_bound <= tau as f64 * (1.0 + F64_MARGIN));
            } else {
                report.notes.push(format!("mixing time exceeds {EXACT_TAU_HORIZON} steps"));
            }
        }
        if !exhaustive {
            report.notes.push("chain conductance minimized over rank cuts only".into());
        }
    } else {
        report.notes.push("no t in [0, R^2] has upper tail above 1/(c+1)".into());
    }
    report.passed = report.growth_hypothesis
        && report.ratio_bound
        && report.tails_monotone
        && report.balanced_tails
        && report.cut_conductance_bound
        && report.rank_mass_bound_spectral
        && report.rank_mass_bound_exact.unwrap_or(true)
        && report.conductance_mixing_bound.unwrap_or(true);
    Ok(report)
}

/// Exact checks of `1 − 2/√n < λ_n < 1 − 1/√n` and `1/β ≤ 2√n − 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LambdaBounds {
    pub n: usize,
    pub lower: bool,
    pub upper: bool,
    pub inverse_bias: bool,
}

/// With `λ = P/Q`: `λ > 1 − 2/√n ⇔ n(Q−P)² < 4Q²`, `λ < 1 − 1/√n ⇔
/// Q² < n(Q−P)²`, and `(Q+P)/(Q−P) ≤ 2√n − 1 ⇔ Q² ≤ n(Q−P)²`.
pub fn lambda_bounds(table: &[BigCount], n: usize) -> LambdaBounds {
    let p = &table[n - 1];
    let q = &table[n];
    let gap = q - p;
    let lhs = BigUint::from(n) * &gap * &gap;
    let q2 = q * q;
    LambdaBounds { n, lower: lhs < BigUint::from(4u32) * &q2, upper: q2 < lhs, inverse_bias: q2 <= lhs }
}

/// `Z_n = Σ_k a_k λ_n^k` over the hyperbolic region, exactly.
pub fn hyperbolic_partition_function(n: usize) -> Result<BigRational> {
    if n == 0 {
        return Err(Error::out_of_range("n", 0, 1, f64::INFINITY));
    }
    let table = counts::partition_numbers(n);
    let (p, q) = (&table[n - 1], &table[n]);
    let gf = counts::rank_generating_function(&Region::hyperbolic(n));
    // Horner in λ = p/q, scaled by q^area.
    let mut acc = BigUint::zero();
    let mut q_power = BigUint::one();
    for a in gf.iter().rev() {
        acc = acc * p + a * &q_power;
        q_power *= q;
    }
    Ok(BigRational::new(BigInt::from(acc), BigInt::from(q_power / q)))
}

/// Exact test of `Z_n < 40 n^{3/4} λ^n p(n)` as
/// `(Z_n / (λ^n p(n)))^4 < 40^4 n^3`; also returns the ratio.
pub fn z_n_bound(n: usize) -> Result<(bool, f64)> {
    let z = hyperbolic_partition_function(n)?;
    let table = counts::partition_numbers(n);
    let lambda = BigRational::new(BigInt::from(table[n - 1].clone()), BigInt::from(table[n].clone()));
    let scale = num_traits::pow(lambda, n) * BigRational::from_integer(BigInt::from(table[n].clone()));
    let ratio = z / scale;
    let bound = BigRational::from_integer(BigInt::from(40u32).pow(4) * BigInt::from(n).pow(3));
    let holds = num_traits::pow(ratio.clone(), 4) < bound;
    Ok((holds, Scalar::to_f64(&ratio)))
}

/// Stationary probability that a draw has size in `[n, 2n]` and survives
/// the salvage map: `p(n) λ^n Σ_{k=0}^{n} λ^k / Z_n`.
pub fn salvage_probability(n: usize) -> Result<BigRational> {
    let z = hyperbolic_partition_function(n)?;
    let table = counts::partition_numbers(n);
    let lambda = BigRational::new(BigInt::from(table[n - 1].clone()), BigInt::from(table[n].clone()));
    let mut geometric = <BigRational as Zero>::zero();
    let mut power = <BigRational as One>::one();
    for _ in 0..=n {
        geometric += &power;
        power *= &lambda;
    }
    let numerator = BigRational::from_integer(BigInt::from(table[n].clone())) * num_traits::pow(lambda, n) * geometric;
    Ok(numerator / z)
}

/// `prob ≥ 1/(160 n^{1/4})`, tested as `(160·prob)^4 · n ≥ 1`.
pub fn salvage_bound_holds(probability: &BigRational, n: usize) -> bool {
    let scaled = probability * BigRational::from_integer(BigInt::from(160u32));
    num_traits::pow(scaled, 4) * BigRational::from_integer(BigInt::from(n)) >= <BigRational as One>::one()
}

pub fn salvage_bound_value(n: usize) -> f64 {
    1.0 / (160.0 * (n as f64).powf(0.25))
}
