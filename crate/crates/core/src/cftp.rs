//! Monotone coupling from the past.
//!
//! Time `-j` for `j ≥ 1` is the transition from time `-j` to `-j + 1`.
//! Its word comes from segment `b`, where segment 0 holds `j = 1` and
//! segment `b ≥ 1` holds `2^{b-1} < j ≤ 2^b`. Each segment has its own
//! ChaCha stream derived from the seed and is read forward in time, so an
//! epoch of length `T = 2^e` replays exactly the words of earlier epochs
//! for the times they share, and nothing is stored.

use crate::poset::{apply_word, Bias, GradedPoset, Word};
use crate::rng::stream;
use crate::{Error, Result};

pub const DEFAULT_MAX_STEPS: u64 = 1 << 40;

/// A graded lattice whose labelled kernel is a monotone grand coupling.
///
/// For every word `w`, `precedes(x, y)` must imply
/// `precedes(update(x, w), update(y, w))`, where `update` is
/// [`GradedPoset::try_slot`] with acceptance decided by the word's uniform.
pub trait MonotoneLattice: GradedPoset {
    fn precedes(&self, lower: &Self::Element, upper: &Self::Element) -> bool;
    fn top(&self) -> Self::Element;
}

#[derive(Debug, Clone)]
pub struct CftpOutcome<E> {
    pub element: E,
    /// Number of epochs run; zero when the lattice has a single element.
    pub epochs: u32,
    /// Length `T` of the coalescing epoch.
    pub horizon: u64,
    /// Kernel applications over all epochs and both trajectories.
    pub steps: u64,
}

/// One coupled transition, as seen by an observer.
#[derive(Debug)]
pub struct CoupledStep<'a, E> {
    pub epoch: u32,
    /// The transition's time, `-j`.
    pub time: i64,
    pub word: Word,
    pub lower: &'a E,
    pub upper: &'a E,
}

/// An exactly stationary sample at `bias`.
pub fn cftp_sample<L: MonotoneLattice>(lattice: &L, bias: &Bias, seed: u64, max_steps: u64) -> Result<CftpOutcome<L::Element>> {
    cftp_sample_observed(lattice, bias, seed, max_steps, |_| {})
}

/// [`cftp_sample`] reporting every coupled transition after it is applied.
pub fn cftp_sample_observed<L, F>(lattice: &L, bias: &Bias, seed: u64, max_steps: u64, mut observer: F) -> Result<CftpOutcome<L::Element>>
where
    L: MonotoneLattice,
    F: FnMut(&CoupledStep<'_, L::Element>),
{
    let bottom = lattice.minimum();
    let top = lattice.top();
    if bottom == top {
        return Ok(CftpOutcome { element: bottom, epochs: 0, horizon: 0, steps: 0 });
    }
    let slots = lattice.slot_count();
    let mut spent = 0u64;
    for epoch in 0u32..63 {
        let horizon = 1u64 << epoch;
        if spent.saturating_add(2 * horizon) > max_steps {
            return Err(Error::CoalescenceBudgetExhausted { steps: spent });
        }
        let mut lower = bottom.clone();
        let mut upper = top.clone();
        for segment in (0..=epoch).rev() {
            let (first, last) = if segment == 0 { (1u64, 1u64) } else { ((1u64 << (segment - 1)) + 1, 1u64 << segment) };
            let mut rng = stream(seed, segment as u64);
            for j in (first..=last).rev() {
                let word = Word::draw(&mut rng, slots);
                apply_word(lattice, &mut lower, bias, word);
                apply_word(lattice, &mut upper, bias, word);
                observer(&CoupledStep { epoch, time: -(j as i64), word, lower: &lower, upper: &upper });
            }
        }
        spent += 2 * horizon;
        if lower == upper {
            return Ok(CftpOutcome { element: lower, epochs: epoch + 1, horizon, steps: spent });
        }
    }
    Err(Error::CoalescenceBudgetExhausted { steps: spent })
}

/// Draws through [`cftp_sample`]; every draw is exactly stationary.
#[derive(Debug, Clone)]
pub struct PerfectSampler {
    pub max_steps: u64,
    /// Largest coalescing horizon seen so far.
    pub max_horizon: u64,
    pub total_steps: u64,
}

impl PerfectSampler {
    pub fn new(max_steps: u64) -> Self {
        PerfectSampler { max_steps, max_horizon: 0, total_steps: 0 }
    }
}

impl Default for PerfectSampler {
    fn default() -> Self {
        Self::new(DEFAULT_MAX_STEPS)
    }
}

impl<L: MonotoneLattice> crate::balance::Sampler<L> for PerfectSampler {
    fn draw(&mut self, model: &L, bias: &Bias, seed: u64) -> Result<L::Element> {
        let out = cftp_sample(model, bias, seed, self.max_steps)?;
        self.max_horizon = self.max_horizon.max(out.horizon);
        self.total_steps += out.steps;
        Ok(out.element)
    }

    fn is_exact(&self) -> bool {
        true
    }
}

impl MonotoneLattice for crate::poset::RankChain {
    fn precedes(&self, lower: &usize, upper: &usize) -> bool {
        lower <= upper
    }

    fn top(&self) -> usize {
        self.length
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partitions::{Region, RegionPoset};
    use crate::poset::RankChain;
    use std::collections::HashMap;

    #[test]
    fn single_element_needs_no_epochs() {
        let out = cftp_sample(&RankChain { length: 0 }, &Bias::unbiased(), 1, 100).unwrap();
        assert_eq!((out.element, out.epochs, out.steps), (0, 0, 0));
    }

    #[test]
    fn words_are_reused_across_epochs() {
        let poset = RegionPoset::new(Region::rectangle(3, 3));
        let mut log: HashMap<i64, Word> = HashMap::new();
        let mut epochs = 0;
        let out = cftp_sample_observed(&poset, &Bias::from_log_bias(0.3), 77, 1 << 30, |s| {
            epochs = epochs.max(s.epoch);
            let previous = log.insert(s.time, s.word);
            if let Some(w) = previous {
                assert_eq!(w, s.word, "time {}", s.time);
            }
            assert!(s.lower.is_contained_in(s.upper));
        })
        .unwrap();
        assert!(out.epochs >= 2);
        assert_eq!(log.len() as u64, out.horizon);
    }

    #[test]
    fn deterministic_given_seed() {
        let poset = RegionPoset::new(Region::rectangle(4, 4));
        let bias = Bias::from_log_bias(-0.2);
        let a = cftp_sample(&poset, &bias, 5, 1 << 30).unwrap();
        let b = cftp_sample(&poset, &bias, 5, 1 << 30).unwrap();
        assert_eq!(a.element, b.element);
        assert_eq!(a.epochs, b.epochs);
    }

    #[test]
    fn budget_exhaustion_is_an_error() {
        let poset = RegionPoset::new(Region::rectangle(6, 6));
        let r = cftp_sample(&poset, &Bias::unbiased(), 1, 8);
        assert!(matches!(r, Err(Error::CoalescenceBudgetExhausted { .. })));
    }

    #[test]
    fn two_state_lattice_is_fair() {
        let poset = RegionPoset::new(Region::rectangle(1, 1));
        let draws = 100_000;
        let full = (0..draws).filter(|&s| cftp_sample(&poset, &Bias::unbiased(), s, 1 << 30).unwrap().element.size() == 1).count() as f64;
        let sigma = (draws as f64 * 0.25).sqrt();
        assert!((full - draws as f64 / 2.0).abs() < 4.0 * sigma, "{full}");
    }
}
