//! Graded posets and the lazy Metropolis kernel on their Hasse diagrams.
//!
//! A step of the chain draws a [`Word`]: a slot in `[0, 2Δ)` and a 64-bit
//! uniform. Each model maps slots to candidate moves through
//! [`GradedPoset::try_slot`]; every Hasse neighbor owns exactly one slot and
//! unused slots are self-loops, so each neighbor is proposed with
//! probability `1/(2Δ)` and the chain holds with probability at least 1/2.
//! Up-moves are accepted with probability `min(1, λ)` and down-moves with
//! `min(1, 1/λ)`, which makes `λ^rank` the reversible weight.
//!
//! The same word drives every trajectory in a coupling, which is what
//! [`crate::cftp`] relies on.

use std::collections::HashMap;
use std::fmt::Debug;
use std::hash::Hash;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, RngExt};

use crate::rng::{rng_from_seed, ChainRng};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Up,
    Down,
}

/// A graded poset whose Hasse diagram carries the chain.
///
/// Implementations must keep `up_neighbors`/`down_neighbors` symmetric and
/// graded, keep every degree at most `max_degree`, and, when overriding
/// [`try_slot`](GradedPoset::try_slot), give each neighbor exactly one slot
/// in `[0, 2 * max_degree)`.
pub trait GradedPoset {
    type Element: Clone + Eq + Hash + Debug;

    fn rank(&self, element: &Self::Element) -> usize;
    fn up_neighbors(&self, element: &Self::Element) -> Vec<Self::Element>;
    fn down_neighbors(&self, element: &Self::Element) -> Vec<Self::Element>;
    /// Δ: a poset-wide bound on Hasse-diagram degree.
    fn max_degree(&self) -> usize;
    /// R: the largest rank of any element.
    fn rank_bound(&self) -> usize;
    fn minimum(&self) -> Self::Element;
    fn maximum(&self) -> Option<Self::Element> {
        None
    }

    fn slot_count(&self) -> usize {
        2 * self.max_degree()
    }

    /// Applies the move labelled `slot` if it exists and `accept` approves
    /// its direction. Returns the direction of the applied move.
    ///
    /// The default labels moves by their position in the up-then-down
    /// neighbor list.
    fn try_slot<F: FnOnce(Direction) -> bool>(&self, element: &mut Self::Element, slot: usize, accept: F) -> Option<Direction> {
        let up = self.up_neighbors(element);
        if slot < up.len() {
            if accept(Direction::Up) {
                *element = up.into_iter().nth(slot).unwrap();
                return Some(Direction::Up);
            }
            return None;
        }
        let down = self.down_neighbors(element);
        let slot = slot - up.len();
        if slot < down.len() && accept(Direction::Down) {
            *element = down.into_iter().nth(slot).unwrap();
            return Some(Direction::Down);
        }
        None
    }
}

const ALWAYS: u128 = 1 << 64;

/// Boltzmann bias `λ = e^β` in the form the kernel consumes: acceptance
/// thresholds on a uniform 64-bit integer.
///
/// A move in direction `d` is accepted iff `u < threshold(d)`, so the
/// acceptance probability is exactly `threshold / 2^64`. For a rational
/// bias the thresholds are `ceil(2^64 · min(1, λ^{±1}))`, computed with
/// integers; the comparison `u < ceil(2^64 p/q)` is equivalent to
/// `u·q < 2^64·p`.
#[derive(Debug, Clone, PartialEq)]
pub struct Bias {
    log_bias: f64,
    up: u128,
    down: u128,
    ratio: Option<(BigUint, BigUint)>,
}

impl Bias {
    pub fn unbiased() -> Self {
        Bias { log_bias: 0.0, up: ALWAYS, down: ALWAYS, ratio: Some((BigUint::one(), BigUint::one())) }
    }

    pub fn from_log_bias(log_bias: f64) -> Self {
        assert!(log_bias.is_finite(), "log bias must be finite");
        let (up, down) = if log_bias >= 0.0 {
            (ALWAYS, threshold_from_probability((-log_bias).exp()))
        } else {
            (threshold_from_probability(log_bias.exp()), ALWAYS)
        };
        Bias { log_bias, up, down, ratio: None }
    }

    pub fn from_lambda(lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidInput(format!("bias must be positive, got {lambda}")));
        }
        Ok(Self::from_log_bias(lambda.ln()))
    }

    /// Exact rational bias `numerator / denominator`.
    pub fn from_ratio(numerator: &BigUint, denominator: &BigUint) -> Result<Self> {
        if numerator.is_zero() || denominator.is_zero() {
            return Err(Error::InvalidInput("bias ratio must have positive terms".into()));
        }
        let scaled = |p: &BigUint, q: &BigUint| -> u128 {
            // ceil(2^64 p / q) ≤ 2^64 for p ≤ q.
            let num: BigUint = p << 64u32;
            let (quot, rem) = (&num / q, &num % q);
            let t = if rem.is_zero() { quot } else { quot + 1u32 };
            t.to_u128().expect("threshold is at most 2^64")
        };
        let (up, down) =
            if numerator >= denominator { (ALWAYS, scaled(denominator, numerator)) } else { (scaled(numerator, denominator), ALWAYS) };
        Ok(Bias { log_bias: big_ln(numerator) - big_ln(denominator), up, down, ratio: Some((numerator.clone(), denominator.clone())) })
    }

    #[inline]
    pub fn accepts(&self, direction: Direction, uniform: u64) -> bool {
        let threshold = match direction {
            Direction::Up => self.up,
            Direction::Down => self.down,
        };
        (uniform as u128) < threshold
    }

    pub fn log_bias(&self) -> f64 {
        self.log_bias
    }

    pub fn lambda(&self) -> f64 {
        self.log_bias.exp()
    }

    /// The exact ratio when the bias was built from one.
    pub fn ratio(&self) -> Option<(&BigUint, &BigUint)> {
        self.ratio.as_ref().map(|(p, q)| (p, q))
    }

    /// Acceptance probability of a move in `direction`, as realized.
    pub fn acceptance_probability(&self, direction: Direction) -> f64 {
        let t = match direction {
            Direction::Up => self.up,
            Direction::Down => self.down,
        };
        t as f64 / ALWAYS as f64
    }
}

fn threshold_from_probability(p: f64) -> u128 {
    if p >= 1.0 {
        ALWAYS
    } else if p <= 0.0 {
        0
    } else {
        (p * ALWAYS as f64).ceil() as u128
    }
}

/// Natural log of a big integer without overflowing `f64`.
pub(crate) fn big_ln(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        let digits = x.to_u64_digits();
        let mut v = 0.0f64;
        for d in digits.iter().rev() {
            v = v * 18446744073709551616.0 + *d as f64;
        }
        return v.ln();
    }
    let shift = bits - 64;
    let top: BigUint = x >> shift;
    let lead = top.to_u64_digits().first().copied().unwrap_or(0) as f64;
    lead.ln() + shift as f64 * std::f64::consts::LN_2
}

/// One unit of randomness for the kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Word {
    pub slot: usize,
    pub uniform: u64,
}

impl Word {
    #[inline]
    pub fn draw<R: Rng + ?Sized>(rng: &mut R, slot_count: usize) -> Self {
        Word { slot: rng.random_range(0..slot_count), uniform: rng.next_u64() }
    }
}

/// Applies one kernel transition driven by `word`.
#[inline]
pub fn apply_word<P: GradedPoset>(model: &P, element: &mut P::Element, bias: &Bias, word: Word) -> Option<Direction> {
    model.try_slot(element, word.slot, |d| bias.accepts(d, word.uniform))
}

#[derive(Debug, Clone)]
pub struct ChainState<E> {
    pub element: E,
    pub bias: Bias,
    pub rng: ChainRng,
}

impl<E> ChainState<E> {
    pub fn new(element: E, bias: Bias, seed: u64) -> Self {
        ChainState { element, bias, rng: rng_from_seed(seed) }
    }
}

/// One lazy Metropolis step; returns the direction moved, if any.
#[inline]
pub fn metropolis_step<P: GradedPoset>(state: &mut ChainState<P::Element>, model: &P) -> Option<Direction> {
    let word = Word::draw(&mut state.rng, model.slot_count());
    apply_word(model, &mut state.element, &state.bias, word)
}

/// Runs `steps` kernel steps from `start`; deterministic given `seed`.
pub fn run_chain<P: GradedPoset>(model: &P, bias: &Bias, steps: u64, seed: u64, start: P::Element) -> P::Element {
    let mut state = ChainState::new(start, bias.clone(), seed);
    advance(model, &mut state, steps);
    state.element
}

pub fn advance<P: GradedPoset>(model: &P, state: &mut ChainState<P::Element>, steps: u64) {
    let slots = model.slot_count();
    for _ in 0..steps {
        let word = Word::draw(&mut state.rng, slots);
        apply_word(model, &mut state.element, &state.bias, word);
    }
}

/// Element counts per rank, `a_i = |Ω_i|`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankProfile {
    pub counts: Vec<BigUint>,
}

impl RankProfile {
    pub fn from_ranks(ranks: impl IntoIterator<Item = usize>) -> Self {
        let mut counts: Vec<BigUint> = Vec::new();
        for r in ranks {
            if counts.len() <= r {
                counts.resize(r + 1, BigUint::zero());
            }
            counts[r] += 1u32;
        }
        RankProfile { counts }
    }

    pub fn max_rank(&self) -> usize {
        self.counts.len().saturating_sub(1)
    }

    pub fn total(&self) -> BigUint {
        self.counts.iter().sum()
    }

    pub fn as_u64(&self) -> Vec<u64> {
        self.counts.iter().map(|c| c.to_u64_digits().first().copied().unwrap_or(0)).collect()
    }
}

#[derive(Debug, Clone)]
pub struct Enumeration<E> {
    pub elements: Vec<E>,
    pub rank_profile: RankProfile,
}

impl<E: Clone + Eq + Hash> Enumeration<E> {
    pub fn index(&self) -> HashMap<E, usize> {
        self.elements.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect()
    }
}

/// Breadth-first closure of the minimum under up-moves, ordered by rank.
pub fn enumerate<P: GradedPoset>(model: &P, cap: usize) -> Result<Enumeration<P::Element>> {
    let start = model.minimum();
    let mut seen: HashMap<P::Element, ()> = HashMap::new();
    seen.insert(start.clone(), ());
    let mut elements = vec![start];
    let mut head = 0;
    while head < elements.len() {
        let current = elements[head].clone();
        head += 1;
        for next in model.up_neighbors(&current) {
            if seen.insert(next.clone(), ()).is_none() {
                if elements.len() >= cap {
                    return Err(Error::TooLarge { cap });
                }
                elements.push(next);
            }
        }
    }
    let rank_profile = RankProfile::from_ranks(elements.iter().map(|e| model.rank(e)));
    Ok(Enumeration { elements, rank_profile })
}

/// A total order `0 < 1 < … < R`: one element per rank.
#[derive(Debug, Clone)]
pub struct RankChain {
    pub length: usize,
}

impl GradedPoset for RankChain {
    type Element = usize;

    fn rank(&self, element: &usize) -> usize {
        *element
    }

    fn up_neighbors(&self, element: &usize) -> Vec<usize> {
        if *element < self.length {
            vec![element + 1]
        } else {
            vec![]
        }
    }

    fn down_neighbors(&self, element: &usize) -> Vec<usize> {
        if *element > 0 {
            vec![element - 1]
        } else {
            vec![]
        }
    }

    fn max_degree(&self) -> usize {
        if self.length == 0 {
            1
        } else {
            2
        }
    }

    fn rank_bound(&self) -> usize {
        self.length
    }

    fn minimum(&self) -> usize {
        0
    }

    fn maximum(&self) -> Option<usize> {
        Some(self.length)
    }
}
