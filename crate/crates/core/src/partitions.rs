//! Young diagrams in a region and the sampler for partitions of `n`.
//!
//! Diagrams are column-height sequences stored as runs `(height, last
//! column)` with strictly decreasing heights, so a diagram under the curve
//! `y = 2n/x` never needs more than `2⌊√(2n)⌋` runs. Columns are numbered
//! from 1 and the parts of the partition are the column heights.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::balance::{self, FixedRankOptions, FixedRankSample};
use crate::cftp::MonotoneLattice;
use crate::counts::{self, BigCount};
use crate::poset::{Bias, Direction, GradedPoset};
use crate::rng::{rng_from_seed, split_seed, uniform_below};
use crate::{Error, Result};

/// A ceiling profile with an optional skew floor, both nonincreasing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Region {
    ceiling: Vec<u32>,
    floor: Vec<u32>,
    area: usize,
    floor_area: usize,
}

impl Region {
    pub fn new(ceiling: Vec<u32>, floor: Option<Vec<u32>>) -> Result<Self> {
        if ceiling.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidRegion("ceiling must be nonincreasing".into()));
        }
        let mut floor = floor.unwrap_or_default();
        if floor.len() > ceiling.len() {
            return Err(Error::InvalidRegion("floor is wider than the ceiling".into()));
        }
        floor.resize(ceiling.len(), 0);
        if floor.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidRegion("floor must be nonincreasing".into()));
        }
        if floor.iter().zip(&ceiling).any(|(f, c)| f > c) {
            return Err(Error::InvalidRegion("floor exceeds ceiling".into()));
        }
        let area = ceiling.iter().zip(&floor).map(|(c, f)| (c - f) as usize).sum();
        let floor_area = floor.iter().map(|&f| f as usize).sum();
        Ok(Region { ceiling, floor, area, floor_area })
    }

    /// `width` columns of height `height`.
    pub fn rectangle(width: usize, height: u32) -> Self {
        Region::new(vec![height; width], None).unwrap()
    }

    /// Ceiling `⌊m/x⌋` for `x = 1..=m`.
    pub fn under_hyperbola(m: u32) -> Self {
        Region::new((1..=m).map(|x| m / x).collect(), None).unwrap()
    }

    /// The region `y ≤ 2n/x` holding every partition of `n`.
    pub fn hyperbolic(n: usize) -> Self {
        Self::under_hyperbola(2 * n as u32)
    }

    pub fn width(&self) -> usize {
        self.ceiling.len()
    }

    /// Ceiling of column `x`, 0-indexed; zero past the last column.
    #[inline]
    pub fn ceiling_at(&self, x: usize) -> u32 {
        self.ceiling.get(x).copied().unwrap_or(0)
    }

    #[inline]
    pub fn floor_at(&self, x: usize) -> u32 {
        self.floor.get(x).copied().unwrap_or(0)
    }

    /// Number of cells between floor and ceiling.
    pub fn area(&self) -> usize {
        self.area
    }

    pub fn floor_area(&self) -> usize {
        self.floor_area
    }

    pub fn has_floor(&self) -> bool {
        self.floor_area > 0
    }

    pub fn ceiling(&self) -> &[u32] {
        &self.ceiling
    }

    pub fn floor(&self) -> &[u32] {
        &self.floor
    }

    /// Columns `from..` (0-indexed) with ceilings capped at `cap`.
    pub fn restrict(&self, from: usize, cap: u32) -> Result<Self> {
        let ceiling = self.ceiling.iter().skip(from).map(|&c| c.min(cap)).collect();
        let floor = self.floor.iter().skip(from).map(|&f| f.min(cap)).collect();
        Region::new(ceiling, Some(floor))
    }

    pub fn to_file(&self) -> RegionFile {
        RegionFile { ceiling: run_length_encode(&self.ceiling), floor: self.has_floor().then(|| run_length_encode(&self.floor)) }
    }

    pub fn from_file(file: &RegionFile) -> Result<Self> {
        let ceiling = run_length_decode(&file.ceiling)?;
        let floor = file.floor.as_ref().map(|f| run_length_decode(f)).transpose()?;
        Region::new(ceiling, floor)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: RegionFile = serde_json::from_str(text).map_err(|e| Error::InvalidRegion(e.to_string()))?;
        Self::from_file(&file)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("region serializes")
    }
}

/// On-disk region: `[height, multiplicity]` pairs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionFile {
    pub ceiling: Vec<[u32; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub floor: Option<Vec<[u32; 2]>>,
}

fn run_length_encode(values: &[u32]) -> Vec<[u32; 2]> {
    let mut out: Vec<[u32; 2]> = Vec::new();
    for &v in values {
        match out.last_mut() {
            Some(last) if last[0] == v => last[1] += 1,
            _ => out.push([v, 1]),
        }
    }
    out
}

fn run_length_decode(runs: &[[u32; 2]]) -> Result<Vec<u32>> {
    let total: u64 = runs.iter().map(|r| r[1] as u64).sum();
    if total > 1 << 28 {
        return Err(Error::InvalidRegion(format!("region too wide: {total} columns")));
    }
    Ok(runs.iter().flat_map(|&[h, m]| std::iter::repeat_n(h, m as usize)).collect())
}

/// A Young diagram as runs of equal column heights.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct YoungDiagram {
    /// `(height, last column)`, heights strictly decreasing and positive,
    /// last columns strictly increasing.
    runs: Vec<(u32, u32)>,
    size: u64,
}

impl YoungDiagram {
    pub fn empty() -> Self {
        YoungDiagram { runs: Vec::new(), size: 0 }
    }

    pub fn from_heights(heights: &[u32]) -> Result<Self> {
        if heights.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidInput("column heights must be nonincreasing".into()));
        }
        let mut runs: Vec<(u32, u32)> = Vec::new();
        for (i, &h) in heights.iter().enumerate() {
            if h == 0 {
                break;
            }
            match runs.last_mut() {
                Some(last) if last.0 == h => last.1 = i as u32 + 1,
                _ => runs.push((h, i as u32 + 1)),
            }
        }
        let size = heights.iter().map(|&h| h as u64).sum();
        Ok(YoungDiagram { runs, size })
    }

    /// Same as [`from_heights`](Self::from_heights): parts are column heights.
    pub fn from_parts(parts: &[u32]) -> Result<Self> {
        Self::from_heights(parts)
    }

    pub fn heights(&self) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.width());
        let mut start = 1;
        for &(h, end) in &self.runs {
            out.extend(std::iter::repeat_n(h, (end + 1 - start) as usize));
            start = end + 1;
        }
        out
    }

    pub fn parts(&self) -> Vec<u32> {
        self.heights()
    }

    pub fn runs(&self) -> &[(u32, u32)] {
        &self.runs
    }

    pub fn stored_runs(&self) -> usize {
        self.runs.len()
    }

    pub fn size(&self) -> u64 {
        self.size
    }

    /// Number of nonzero columns.
    pub fn width(&self) -> usize {
        self.runs.last().map_or(0, |r| r.1 as usize)
    }

    /// Height of column `x` (1-indexed).
    #[inline]
    pub fn height_at(&self, x: u32) -> u32 {
        let i = self.runs.partition_point(|r| r.1 < x);
        self.runs.get(i).map_or(0, |r| r.0)
    }

    /// Length of row `y` (1-indexed): the number of columns of height `≥ y`.
    #[inline]
    pub fn row_length(&self, y: u32) -> u32 {
        let i = self.runs.partition_point(|r| r.0 >= y);
        if i == 0 {
            0
        } else {
            self.runs[i - 1].1
        }
    }

    pub fn first_column_height(&self) -> u32 {
        self.runs.first().map_or(0, |r| r.0)
    }

    /// Pointwise `self ≤ other`.
    pub fn is_contained_in(&self, other: &YoungDiagram) -> bool {
        if self.width() > other.width() || self.first_column_height() > other.first_column_height() {
            return false;
        }
        // Heights of `other` are nonincreasing, so the last column of each run decides.
        self.runs.iter().all(|&(h, end)| other.height_at(end) >= h)
    }

    fn run_start(&self, i: usize) -> u32 {
        if i == 0 {
            1
        } else {
            self.runs[i - 1].1 + 1
        }
    }

    /// Adds the top cell of column `x`; the caller has checked it is addable.
    fn increment(&mut self, x: u32) {
        let i = self.runs.partition_point(|r| r.1 < x);
        self.size += 1;
        if i == self.runs.len() {
            match self.runs.last_mut() {
                Some(last) if last.0 == 1 => last.1 = x,
                _ => self.runs.push((1, x)),
            }
            return;
        }
        let (h, end) = self.runs[i];
        debug_assert_eq!(self.run_start(i), x);
        if i > 0 && self.runs[i - 1].0 == h + 1 {
            self.runs[i - 1].1 = x;
            if end == x {
                self.runs.remove(i);
            }
        } else if end == x {
            self.runs[i].0 = h + 1;
        } else {
            self.runs.insert(i, (h + 1, x));
        }
    }

    /// Removes the top cell of column `x`; the caller has checked it is removable.
    fn decrement(&mut self, x: u32) {
        let i = self.runs.partition_point(|r| r.1 < x);
        let (h, end) = self.runs[i];
        debug_assert_eq!(end, x);
        self.size -= 1;
        let single = self.run_start(i) == x;
        let next_height = self.runs.get(i + 1).map_or(0, |r| r.0);
        if h - 1 == next_height {
            if single {
                self.runs.remove(i);
            } else {
                self.runs[i].1 = x - 1;
            }
        } else if single {
            self.runs[i].0 = h - 1;
        } else {
            self.runs[i].1 = x - 1;
            self.runs.insert(i + 1, (h - 1, x));
        }
    }

    #[cfg(test)]
    fn check(&self) {
        assert!(self.runs.windows(2).all(|w| w[0].0 > w[1].0 && w[0].1 < w[1].1));
        assert!(self.runs.iter().all(|r| r.0 > 0));
        assert_eq!(self.size, self.heights().iter().map(|&h| h as u64).sum::<u64>());
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MoveKind {
    Add,
    Remove,
}

/// A legal single-cell change.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Move {
    pub kind: MoveKind,
    /// 1-indexed column.
    pub column: u32,
    pub new_size: u64,
}

/// Every legal addition and removal, one pass over the runs.
pub fn moves(diagram: &YoungDiagram, region: &Region) -> Vec<Move> {
    let mut out = Vec::new();
    let size = diagram.size;
    let mut start = 1u32;
    for &(h, end) in &diagram.runs {
        if h < region.ceiling_at(start as usize - 1) {
            out.push(Move { kind: MoveKind::Add, column: start, new_size: size + 1 });
        }
        if h > region.floor_at(end as usize - 1) {
            out.push(Move { kind: MoveKind::Remove, column: end, new_size: size - 1 });
        }
        start = end + 1;
    }
    if region.ceiling_at(start as usize - 1) > 0 {
        out.push(Move { kind: MoveKind::Add, column: start, new_size: size + 1 });
    }
    out
}

pub fn apply_move(diagram: &YoungDiagram, mv: Move) -> YoungDiagram {
    let mut next = diagram.clone();
    match mv.kind {
        MoveKind::Add => next.increment(mv.column),
        MoveKind::Remove => next.decrement(mv.column),
    }
    next
}

/// The poset of diagrams in a region ordered by containment, graded by the
/// number of cells above the floor.
///
/// Moves carry state-independent labels: columns `1..=s` have an add and a
/// remove label each, and rows `1..=r` have an add and a remove label for
/// cells right of column `s`, where `r` is the ceiling of column `s + 1`.
/// Every cell of the region gets exactly one add label and one remove label,
/// which is what makes the grand coupling monotone.
#[derive(Debug, Clone)]
pub struct RegionPoset {
    region: Region,
    split: u32,
    rows: u32,
    bottom: YoungDiagram,
    top: YoungDiagram,
}

impl RegionPoset {
    pub fn new(region: Region) -> Self {
        let split = (0..=region.width()).min_by_key(|&s| s + region.ceiling_at(s) as usize).unwrap_or(0);
        let rows = region.ceiling_at(split);
        let bottom = YoungDiagram::from_heights(region.floor()).unwrap();
        let top = YoungDiagram::from_heights(region.ceiling()).unwrap();
        RegionPoset { region, split: split as u32, rows, bottom, top }
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    fn label_count(&self) -> usize {
        2 * (self.split + self.rows) as usize
    }

    #[inline]
    fn can_add(&self, d: &YoungDiagram, x: u32) -> bool {
        let h = d.height_at(x);
        h < self.region.ceiling_at(x as usize - 1) && (x == 1 || d.height_at(x - 1) > h)
    }

    #[inline]
    fn can_remove(&self, d: &YoungDiagram, x: u32) -> bool {
        let h = d.height_at(x);
        h > self.region.floor_at(x as usize - 1) && d.height_at(x + 1) < h
    }
}

impl GradedPoset for RegionPoset {
    type Element = YoungDiagram;

    fn rank(&self, element: &YoungDiagram) -> usize {
        element.size as usize - self.region.floor_area()
    }

    fn up_neighbors(&self, element: &YoungDiagram) -> Vec<YoungDiagram> {
        moves(element, &self.region).into_iter().filter(|m| m.kind == MoveKind::Add).map(|m| apply_move(element, m)).collect()
    }

    fn down_neighbors(&self, element: &YoungDiagram) -> Vec<YoungDiagram> {
        moves(element, &self.region).into_iter().filter(|m| m.kind == MoveKind::Remove).map(|m| apply_move(element, m)).collect()
    }

    fn max_degree(&self) -> usize {
        self.label_count().max(1)
    }

    fn rank_bound(&self) -> usize {
        self.region.area()
    }

    fn minimum(&self) -> YoungDiagram {
        self.bottom.clone()
    }

    fn maximum(&self) -> Option<YoungDiagram> {
        Some(self.top.clone())
    }

    #[inline]
    fn try_slot<F: FnOnce(Direction) -> bool>(&self, d: &mut YoungDiagram, slot: usize, accept: F) -> Option<Direction> {
        let s = self.split as usize;
        let r = self.rows as usize;
        if slot < s {
            let x = slot as u32 + 1;
            if self.can_add(d, x) && accept(Direction::Up) {
                d.increment(x);
                return Some(Direction::Up);
            }
        } else if slot < s + r {
            let y = (slot - s) as u32 + 1;
            let x = d.row_length(y) + 1;
            if x > self.split
                && y <= self.region.ceiling_at(x as usize - 1)
                && (y == 1 || d.row_length(y - 1) >= x)
                && accept(Direction::Up)
            {
                d.increment(x);
                return Some(Direction::Up);
            }
        } else if slot < 2 * s + r {
            let x = (slot - s - r) as u32 + 1;
            if self.can_remove(d, x) && accept(Direction::Down) {
                d.decrement(x);
                return Some(Direction::Down);
            }
        } else if slot < 2 * (s + r) {
            let y = (slot - 2 * s - r) as u32 + 1;
            let x = d.row_length(y);
            if x > self.split && d.row_length(y + 1) < x && y > self.region.floor_at(x as usize - 1) && accept(Direction::Down) {
                d.decrement(x);
                return Some(Direction::Down);
            }
        }
        None
    }
}

impl MonotoneLattice for RegionPoset {
    fn precedes(&self, lower: &YoungDiagram, upper: &YoungDiagram) -> bool {
        lower.is_contained_in(upper)
    }

    fn top(&self) -> YoungDiagram {
        self.top.clone()
    }
}

/// `λ_n = p(n−1)/p(n)` as an exact ratio `(p(n−1), p(n))`.
pub fn lambda_n(n: usize) -> Result<(BigCount, BigCount)> {
    if n == 0 {
        return Err(Error::out_of_range("n", 0, 1, f64::INFINITY));
    }
    let mut table = counts::partition_numbers(n);
    let p_n = table.pop().unwrap();
    let p_prev = table.pop().unwrap();
    Ok((p_prev, p_n))
}

pub fn lambda_n_rational(n: usize) -> Result<BigRational> {
    let (p, q) = lambda_n(n)?;
    Ok(BigRational::new(p.into(), q.into()))
}

/// `p/q` as `f64` without overflowing on huge terms.
pub(crate) fn ratio_to_f64(p: &BigUint, q: &BigUint) -> f64 {
    let shift = q.bits().saturating_sub(p.bits()) + 64;
    let scaled: BigUint = (p << shift) / q;
    let lead_bits = scaled.bits().saturating_sub(64);
    let top = (&scaled >> lead_bits).to_f64().unwrap_or(f64::NAN);
    top * 2f64.powi(lead_bits as i32 - shift as i32)
}

/// The salvage map `g`: shortens the first part by `|ρ| − n` when that keeps
/// the parts nonincreasing.
pub fn salvage(rho: &[u32], n: u64) -> Option<Vec<u32>> {
    let total: u64 = rho.iter().map(|&p| p as u64).sum();
    if total < n {
        return None;
    }
    let k = total - n;
    let first = *rho.first()? as u64;
    let second = rho.get(1).copied().unwrap_or(0) as u64;
    if first < k || first - k < second {
        return None;
    }
    let mut out = rho.to_vec();
    out[0] = (first - k) as u32;
    if out[0] == 0 {
        out.clear();
    }
    Some(out)
}

/// Explicit mixing-time bound of the chain on the hyperbolic region at `λ_n`:
/// `⌈(8√(2n)/β²)(ln(1/ε) + ln(2n(ln 2n + 1)) + 3√n)⌉` with `β = (1−λ)/(1+λ)`.
pub fn mixing_bound(n: usize, epsilon: f64) -> Result<u64> {
    if n < 30 {
        return Err(Error::out_of_range("n", n as f64, 30, f64::INFINITY));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::out_of_range("epsilon", epsilon, 0, 1));
    }
    let (p, q) = lambda_n(n)?;
    Ok(mixing_bound_with_lambda(n, ratio_to_f64(&p, &q), epsilon))
}

pub(crate) fn mixing_bound_with_lambda(n: usize, lambda: f64, epsilon: f64) -> u64 {
    let nf = n as f64;
    let beta = (1.0 - lambda) / (1.0 + lambda);
    let two_n = 2.0 * nf;
    let bound = 8.0 * two_n.sqrt() / (beta * beta) * ((1.0 / epsilon).ln() + (two_n * (two_n.ln() + 1.0)).ln() + 3.0 * nf.sqrt());
    bound.ceil() as u64
}

/// Biased-exclusion parameters for a bias `λ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExclusionParameters {
    Biased {
        /// Up-step probability.
        p: f64,
        bias: f64,
        alpha: f64,
    },
    Unbiased,
}

pub fn exclusion_parameters(lambda: f64) -> Result<ExclusionParameters> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::out_of_range("lambda", lambda, 0, f64::INFINITY));
    }
    if lambda == 1.0 {
        return Ok(ExclusionParameters::Unbiased);
    }
    let l = if lambda < 1.0 { lambda } else { 1.0 / lambda };
    Ok(ExclusionParameters::Biased { p: 1.0 / (1.0 + l), bias: (1.0 - l) / (1.0 + l), alpha: (1.0 / l).sqrt() })
}

/// Uniform diagram of rank `k` by sampling columns left to right against
/// the exact counts of their completions.
pub fn exact_sample_restricted<R: Rng + ?Sized>(region: &Region, k: usize, rng: &mut R) -> Result<YoungDiagram> {
    if k > region.area() {
        return Err(Error::out_of_range("rank", k as f64, 0, region.area() as f64));
    }
    let width = region.width();
    // completions[x][h] = polynomial (truncated at k) counting fillings of
    // columns x.. (0-indexed) whose first height is at most h.
    let cap_height = region.ceiling_at(0) as usize;
    let mut completions: Vec<Vec<Vec<BigCount>>> = vec![Vec::new(); width + 1];
    completions[width] = vec![vec![BigUint::from(1u32)]; cap_height + 1];
    for x in (0..width).rev() {
        let (lo, hi) = (region.floor_at(x) as usize, region.ceiling_at(x) as usize);
        let mut table: Vec<Vec<BigCount>> = vec![Vec::new(); cap_height + 1];
        let mut running: Vec<BigCount> = Vec::new();
        for h in 0..=cap_height {
            if h >= lo && h <= hi {
                let rest = &completions[x + 1][h.min(completions[x + 1].len() - 1)];
                add_shifted(&mut running, rest, h - lo, k);
            }
            table[h] = running.clone();
        }
        completions[x] = table;
    }
    let total = coeff(&completions[0][cap_height], k);
    if total.is_zero() {
        return Err(Error::InvalidInput(format!("no diagram of rank {k}")));
    }
    let mut heights = Vec::with_capacity(width);
    let mut remaining = k;
    let mut prev = cap_height;
    for x in 0..width {
        let (lo, hi) = (region.floor_at(x) as usize, region.ceiling_at(x) as usize);
        let weight_of = |h: usize| -> BigCount {
            if h < lo || h > hi.min(prev) || h - lo > remaining {
                return BigUint::zero();
            }
            let next = &completions[x + 1];
            coeff(&next[h.min(next.len() - 1)], remaining - (h - lo))
        };
        let mut total = BigUint::zero();
        for h in lo..=hi.min(prev) {
            total += weight_of(h);
        }
        let mut pick = uniform_below(rng, &total);
        let mut chosen = lo;
        for h in lo..=hi.min(prev) {
            let w = weight_of(h);
            if pick < w {
                chosen = h;
                break;
            }
            pick -= w;
        }
        heights.push(chosen as u32);
        remaining -= chosen - lo;
        prev = chosen;
    }
    debug_assert_eq!(remaining, 0);
    YoungDiagram::from_heights(&heights)
}

fn coeff(poly: &[BigCount], k: usize) -> BigCount {
    poly.get(k).cloned().unwrap_or_default()
}

fn add_shifted(acc: &mut Vec<BigCount>, poly: &[BigCount], by: usize, max_degree: usize) {
    for (i, c) in poly.iter().enumerate() {
        let d = i + by;
        if d > max_degree {
            break;
        }
        if acc.len() <= d {
            acc.resize(d + 1, BigUint::zero());
        }
        acc[d] += c;
    }
}

/// Options for [`sample_partition`].
#[derive(Debug, Clone)]
pub struct PartitionSamplerConfig {
    /// Draw each σ by coupling from the past instead of a fixed-length chain.
    pub exact: bool,
    /// Chain steps per draw; defaults to `mixing_bound(n, 1/e)`.
    pub steps: Option<u64>,
    /// Draw budget; defaults to `10^4·⌈160 n^{1/4}⌉`.
    pub retry_cap: Option<u64>,
    /// Below this `n` the exact counting sampler is used.
    pub fallback_below: usize,
    /// Step budget for each coupling from the past.
    pub cftp_max_steps: u64,
}

impl Default for PartitionSamplerConfig {
    fn default() -> Self {
        PartitionSamplerConfig {
            exact: false,
            steps: None,
            retry_cap: None,
            fallback_below: 30,
            cftp_max_steps: crate::cftp::DEFAULT_MAX_STEPS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionSample {
    /// Nonincreasing parts summing to `n`.
    pub parts: Vec<u32>,
    /// Chain draws consumed, including the accepted one.
    pub draws: u64,
    /// Total kernel steps across draws; zero for the counting fallback.
    pub steps: u64,
}

pub fn default_retry_cap(n: usize) -> u64 {
    10_000 * (160.0 * (n as f64).powf(0.25)).ceil() as u64
}

/// The partition-of-`n` sampler.
///
/// Holds the hyperbolic-region poset and the exact bias `λ_n` so repeated
/// draws share the precomputation.
pub struct PartitionSampler {
    n: usize,
    config: PartitionSamplerConfig,
    poset: RegionPoset,
    bias: Bias,
    steps: u64,
}

impl PartitionSampler {
    pub fn new(n: usize, config: PartitionSamplerConfig) -> Result<Self> {
        if n == 0 {
            return Err(Error::out_of_range("n", 0, 1, f64::INFINITY));
        }
        let poset = RegionPoset::new(Region::hyperbolic(n));
        let (p, q) = lambda_n(n)?;
        let bias = Bias::from_ratio(&p, &q)?;
        let steps = match config.steps {
            Some(s) => s,
            None if n >= 30 => mixing_bound_with_lambda(n, ratio_to_f64(&p, &q), (-1f64).exp()),
            None => 0,
        };
        Ok(PartitionSampler { n, config, poset, bias, steps })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Chain steps per non-exact draw.
    pub fn steps_per_draw(&self) -> u64 {
        self.steps
    }

    pub fn poset(&self) -> &RegionPoset {
        &self.poset
    }

    pub fn bias(&self) -> &Bias {
        &self.bias
    }

    pub fn sample(&self, seed: u64) -> Result<PartitionSample> {
        let n = self.n;
        if n < self.config.fallback_below {
            let mut rng = rng_from_seed(seed);
            let d = exact_sample_restricted(self.poset.region(), n, &mut rng)?;
            return Ok(PartitionSample { parts: d.parts(), draws: 1, steps: 0 });
        }
        let cap = self.config.retry_cap.unwrap_or_else(|| default_retry_cap(n));
        let mut total_steps = 0u64;
        let mut chain = crate::poset::ChainState::new(self.poset.minimum(), self.bias.clone(), seed);
        for draw in 1..=cap {
            let sigma = if self.config.exact {
                let out = crate::cftp::cftp_sample(&self.poset, &self.bias, split_seed(seed, draw), self.config.cftp_max_steps)?;
                total_steps += out.steps;
                out.element
            } else {
                crate::poset::advance(&self.poset, &mut chain, self.steps);
                total_steps += self.steps;
                chain.element.clone()
            };
            let size = sigma.size();
            if size >= n as u64 && size <= 2 * n as u64 {
                if let Some(parts) = salvage(&sigma.parts(), n as u64) {
                    return Ok(PartitionSample { parts, draws: draw, steps: total_steps });
                }
            }
        }
        Err(Error::RejectionBudgetExhausted { draws: cap })
    }
}

/// A uniformly random partition of `n`.
pub fn sample_partition(n: usize, seed: u64, config: PartitionSamplerConfig) -> Result<PartitionSample> {
    PartitionSampler::new(n, config)?.sample(seed)
}

/// A uniformly random diagram of rank `k` in `region` by the balanced-bias
/// rejection sampler.
pub fn sample_restricted(region: &Region, k: usize, seed: u64, options: &FixedRankOptions) -> Result<FixedRankSample<YoungDiagram>> {
    let poset = RegionPoset::new(region.clone());
    Ok(balance::sample_lattice_rank(&poset, k, 1, options, seed)?.samples.pop().unwrap())
}
