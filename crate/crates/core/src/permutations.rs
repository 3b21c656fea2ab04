//! Permutations under adjacent transpositions, graded by inversions.
//!
//! Slot `i < n − 1` means "make positions `i, i+1` descending" and slot
//! `n − 1 + i` means "make them ascending", so each label is a fixed
//! sorting decision. These are monotone for the Bruhat order, which the
//! coupling uses; the weak order is not preserved by them.

use std::fmt;
use std::sync::Arc;

use crate::balance::{self, FixedRankOptions, FixedRankSample};
use crate::cftp::MonotoneLattice;
use crate::poset::{Direction, GradedPoset};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    /// One-line notation over `1..=n`.
    mapping: Vec<u32>,
    inversions: u64,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation { mapping: (1..=n as u32).collect(), inversions: 0 }
    }

    pub fn reverse(n: usize) -> Self {
        Permutation { mapping: (1..=n as u32).rev().collect(), inversions: (n * n.saturating_sub(1) / 2) as u64 }
    }

    pub fn new(mapping: Vec<u32>) -> Result<Self> {
        let n = mapping.len();
        let mut seen = vec![false; n + 1];
        for &v in &mapping {
            if v == 0 || v as usize > n || seen[v as usize] {
                return Err(Error::InvalidInput(format!("not a permutation of 1..={n}: {mapping:?}")));
            }
            seen[v as usize] = true;
        }
        let inversions = count_inversions(&mapping);
        Ok(Permutation { mapping, inversions })
    }

    pub fn mapping(&self) -> &[u32] {
        &self.mapping
    }

    pub fn len(&self) -> usize {
        self.mapping.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mapping.is_empty()
    }

    pub fn inversions(&self) -> u64 {
        self.inversions
    }

    /// Swaps positions `i, i+1` (0-indexed).
    #[inline]
    fn swap_adjacent(&mut self, i: usize) {
        if self.mapping[i] < self.mapping[i + 1] {
            self.inversions += 1;
        } else {
            self.inversions -= 1;
        }
        self.mapping.swap(i, i + 1);
    }

    /// Bruhat order: for every prefix and threshold, `self` has at most as
    /// many large values in the prefix as `other`.
    pub fn bruhat_le(&self, other: &Permutation) -> bool {
        let n = self.len();
        if other.len() != n || self.inversions > other.inversions {
            return false;
        }
        // counts[v] = number of prefix values >= v, kept for both.
        let mut a = vec![0u32; n + 2];
        let mut b = vec![0u32; n + 2];
        for j in 0..n {
            for v in 1..=self.mapping[j] as usize {
                a[v] += 1;
            }
            for v in 1..=other.mapping[j] as usize {
                b[v] += 1;
            }
            if (1..=n).any(|v| a[v] > b[v]) {
                return false;
            }
        }
        true
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.mapping.iter().map(|v| v.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

fn count_inversions(mapping: &[u32]) -> u64 {
    let mut count = 0;
    for i in 0..mapping.len() {
        for j in i + 1..mapping.len() {
            if mapping[i] > mapping[j] {
                count += 1;
            }
        }
    }
    count
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AdjacentMove {
    /// 1-indexed: swaps positions `position` and `position + 1`.
    pub position: usize,
    pub delta: i8,
}

pub fn adjacent_moves(perm: &Permutation) -> Vec<AdjacentMove> {
    perm.mapping.windows(2).enumerate().map(|(i, w)| AdjacentMove { position: i + 1, delta: if w[0] < w[1] { 1 } else { -1 } }).collect()
}

/// Cells `(i, j)` with `mapping_i > j` and `j` appearing after position `i`.
pub fn rothe_cells(perm: &Permutation) -> Vec<(u32, u32)> {
    let n = perm.len();
    let mut position = vec![0usize; n + 1];
    for (i, &v) in perm.mapping.iter().enumerate() {
        position[v as usize] = i + 1;
    }
    let mut cells = Vec::with_capacity(perm.inversions as usize);
    for (i, &v) in perm.mapping.iter().enumerate() {
        for j in 1..v {
            if position[j as usize] > i + 1 {
                cells.push((i as u32 + 1, j));
            }
        }
    }
    cells
}

/// Predicate on `(permutation, 0-indexed swap position)`; returning `false`
/// forbids the move. The caller must keep the restricted class connected.
pub type MoveFilter = Arc<dyn Fn(&Permutation, usize) -> bool + Send + Sync>;

/// The weak order on permutations of `n`, graded by inversion count.
#[derive(Clone)]
pub struct PermutationPoset {
    n: usize,
    filter: Option<MoveFilter>,
}

impl fmt::Debug for PermutationPoset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PermutationPoset").field("n", &self.n).field("filtered", &self.filter.is_some()).finish()
    }
}

impl PermutationPoset {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::out_of_range("n", 0, 1, f64::INFINITY));
        }
        Ok(PermutationPoset { n, filter: None })
    }

    /// Restricts the chain to moves the filter allows. The filtered poset
    /// keeps the identity as its minimum but has no known maximum.
    pub fn with_filter(n: usize, filter: MoveFilter) -> Result<Self> {
        let mut p = Self::new(n)?;
        p.filter = Some(filter);
        Ok(p)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    fn allowed(&self, perm: &Permutation, i: usize) -> bool {
        self.filter.as_ref().is_none_or(|f| f(perm, i))
    }

    fn neighbors(&self, perm: &Permutation, ascending_first: bool) -> Vec<Permutation> {
        (0..self.n.saturating_sub(1))
            .filter(|&i| (perm.mapping[i] < perm.mapping[i + 1]) == ascending_first && self.allowed(perm, i))
            .map(|i| {
                let mut next = perm.clone();
                next.swap_adjacent(i);
                next
            })
            .collect()
    }
}

impl GradedPoset for PermutationPoset {
    type Element = Permutation;

    fn rank(&self, element: &Permutation) -> usize {
        element.inversions as usize
    }

    fn up_neighbors(&self, element: &Permutation) -> Vec<Permutation> {
        self.neighbors(element, true)
    }

    fn down_neighbors(&self, element: &Permutation) -> Vec<Permutation> {
        self.neighbors(element, false)
    }

    fn max_degree(&self) -> usize {
        (self.n - 1).max(1)
    }

    fn rank_bound(&self) -> usize {
        self.n * (self.n - 1) / 2
    }

    fn minimum(&self) -> Permutation {
        Permutation::identity(self.n)
    }

    fn maximum(&self) -> Option<Permutation> {
        self.filter.is_none().then(|| Permutation::reverse(self.n))
    }

    #[inline]
    fn try_slot<F: FnOnce(Direction) -> bool>(&self, perm: &mut Permutation, slot: usize, accept: F) -> Option<Direction> {
        let m = self.n - 1;
        let (i, dir) = if slot < m {
            (slot, Direction::Up)
        } else if slot < 2 * m {
            (slot - m, Direction::Down)
        } else {
            return None;
        };
        let ascending = perm.mapping[i] < perm.mapping[i + 1];
        let applies = match dir {
            Direction::Up => ascending,
            Direction::Down => !ascending,
        };
        if applies && self.allowed(perm, i) && accept(dir) {
            perm.swap_adjacent(i);
            return Some(dir);
        }
        None
    }
}

impl MonotoneLattice for PermutationPoset {
    fn precedes(&self, lower: &Permutation, upper: &Permutation) -> bool {
        lower.bruhat_le(upper)
    }

    fn top(&self) -> Permutation {
        Permutation::reverse(self.n)
    }
}

/// A uniformly random permutation of `n` with `k` inversions.
pub fn sample_fixed_inversions(n: usize, k: usize, seed: u64, options: &FixedRankOptions) -> Result<FixedRankSample<Permutation>> {
    let poset = PermutationPoset::new(n)?;
    if k > poset.rank_bound() {
        return Err(Error::out_of_range("inversions", k as f64, 0, poset.rank_bound() as f64));
    }
    Ok(balance::sample_lattice_rank(&poset, k, 1, options, seed)?.samples.pop().unwrap())
}
