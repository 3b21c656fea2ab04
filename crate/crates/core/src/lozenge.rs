//! Plane partitions in an `a × b × c` box, graded by volume.
//!
//! Each cell has an add label and a remove label, so the kernel has
//! `2ab` labels and `Δ = 2ab`: a cell can be addable and removable at once,
//! which puts the degree above `ab`.

use std::fmt;

use crate::balance::{self, FixedRankOptions, FixedRankSample};
use crate::cftp::MonotoneLattice;
use crate::poset::{Direction, GradedPoset};
use crate::{Error, Result};

/// Row-major `a × b` heights, nonincreasing along rows and columns, in `[0, c]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PlanePartition {
    rows: usize,
    cols: usize,
    heights: Vec<u32>,
    volume: u64,
}

impl PlanePartition {
    pub fn empty(rows: usize, cols: usize) -> Self {
        PlanePartition { rows, cols, heights: vec![0; rows * cols], volume: 0 }
    }

    pub fn full(rows: usize, cols: usize, c: u32) -> Self {
        PlanePartition { rows, cols, heights: vec![c; rows * cols], volume: (rows * cols) as u64 * c as u64 }
    }

    pub fn from_rows(matrix: &[Vec<u32>], c: u32) -> Result<Self> {
        let rows = matrix.len();
        let cols = matrix.first().map_or(0, |r| r.len());
        if matrix.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidInput("ragged height matrix".into()));
        }
        let heights: Vec<u32> = matrix.iter().flatten().copied().collect();
        let pp = PlanePartition { rows, cols, volume: heights.iter().map(|&h| h as u64).sum(), heights };
        for i in 0..rows {
            for j in 0..cols {
                let h = pp.get(i, j);
                if h > c || (i > 0 && pp.get(i - 1, j) < h) || (j > 0 && pp.get(i, j - 1) < h) {
                    return Err(Error::InvalidInput(format!("not a plane partition in a box of height {c}")));
                }
            }
        }
        Ok(pp)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn volume(&self) -> u64 {
        self.volume
    }

    /// Height at row `i`, column `j` (0-indexed).
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.heights[i * self.cols + j]
    }

    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        self.heights.chunks(self.cols.max(1)).map(|r| r.to_vec()).collect()
    }

    #[inline]
    fn can_add(&self, i: usize, j: usize, c: u32) -> bool {
        let h = self.get(i, j);
        h < c && (i == 0 || self.get(i - 1, j) > h) && (j == 0 || self.get(i, j - 1) > h)
    }

    #[inline]
    fn can_remove(&self, i: usize, j: usize) -> bool {
        let h = self.get(i, j);
        h > 0 && (i + 1 == self.rows || self.get(i + 1, j) < h) && (j + 1 == self.cols || self.get(i, j + 1) < h)
    }

    #[inline]
    fn bump(&mut self, i: usize, j: usize, up: bool) {
        let cell = &mut self.heights[i * self.cols + j];
        if up {
            *cell += 1;
            self.volume += 1;
        } else {
            *cell -= 1;
            self.volume -= 1;
        }
    }

    pub fn dominated_by(&self, other: &PlanePartition) -> bool {
        self.heights.iter().zip(&other.heights).all(|(a, b)| a <= b)
    }
}

impl fmt::Display for PlanePartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.to_rows() {
            let parts: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            writeln!(f, "{}", parts.join(" "))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum CubeMoveKind {
    Add,
    Remove,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct CubeMove {
    /// 1-indexed `(row, column)`.
    pub cell: (usize, usize),
    pub kind: CubeMoveKind,
}

pub fn cube_moves(pp: &PlanePartition, c: u32) -> Vec<CubeMove> {
    let mut out = Vec::new();
    for i in 0..pp.rows {
        for j in 0..pp.cols {
            if pp.can_add(i, j, c) {
                out.push(CubeMove { cell: (i + 1, j + 1), kind: CubeMoveKind::Add });
            }
            if pp.can_remove(i, j) {
                out.push(CubeMove { cell: (i + 1, j + 1), kind: CubeMoveKind::Remove });
            }
        }
    }
    out
}

/// Plane partitions in the `a × b × c` box ordered componentwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlanePartitionPoset {
    pub a: usize,
    pub b: usize,
    pub c: u32,
}

impl PlanePartitionPoset {
    pub fn new(a: usize, b: usize, c: u32) -> Result<Self> {
        if a == 0 || b == 0 || c == 0 {
            return Err(Error::InvalidInput("box sides must be positive".into()));
        }
        Ok(PlanePartitionPoset { a, b, c })
    }

    fn cells(&self) -> usize {
        self.a * self.b
    }
}

impl GradedPoset for PlanePartitionPoset {
    type Element = PlanePartition;

    fn rank(&self, element: &PlanePartition) -> usize {
        element.volume as usize
    }

    fn up_neighbors(&self, element: &PlanePartition) -> Vec<PlanePartition> {
        cube_moves(element, self.c)
            .into_iter()
            .filter(|m| m.kind == CubeMoveKind::Add)
            .map(|m| {
                let mut next = element.clone();
                next.bump(m.cell.0 - 1, m.cell.1 - 1, true);
                next
            })
            .collect()
    }

    fn down_neighbors(&self, element: &PlanePartition) -> Vec<PlanePartition> {
        cube_moves(element, self.c)
            .into_iter()
            .filter(|m| m.kind == CubeMoveKind::Remove)
            .map(|m| {
                let mut next = element.clone();
                next.bump(m.cell.0 - 1, m.cell.1 - 1, false);
                next
            })
            .collect()
    }

    fn max_degree(&self) -> usize {
        2 * self.cells()
    }

    fn rank_bound(&self) -> usize {
        self.cells() * self.c as usize
    }

    fn minimum(&self) -> PlanePartition {
        PlanePartition::empty(self.a, self.b)
    }

    fn maximum(&self) -> Option<PlanePartition> {
        Some(PlanePartition::full(self.a, self.b, self.c))
    }

    #[inline]
    fn try_slot<F: FnOnce(Direction) -> bool>(&self, pp: &mut PlanePartition, slot: usize, accept: F) -> Option<Direction> {
        let cells = self.cells();
        if slot < cells {
            let (i, j) = (slot / self.b, slot % self.b);
            if pp.can_add(i, j, self.c) && accept(Direction::Up) {
                pp.bump(i, j, true);
                return Some(Direction::Up);
            }
        } else if slot < 2 * cells {
            let s = slot - cells;
            let (i, j) = (s / self.b, s % self.b);
            if pp.can_remove(i, j) && accept(Direction::Down) {
                pp.bump(i, j, false);
                return Some(Direction::Down);
            }
        }
        None
    }
}

impl MonotoneLattice for PlanePartitionPoset {
    fn precedes(&self, lower: &PlanePartition, upper: &PlanePartition) -> bool {
        lower.dominated_by(upper)
    }

    fn top(&self) -> PlanePartition {
        PlanePartition::full(self.a, self.b, self.c)
    }
}

/// A uniformly random plane partition of volume `k` in the `a × b × c` box.
pub fn sample_fixed_volume(
    a: usize,
    b: usize,
    c: u32,
    k: usize,
    seed: u64,
    options: &FixedRankOptions,
) -> Result<FixedRankSample<PlanePartition>> {
    let poset = PlanePartitionPoset::new(a, b, c)?;
    if k > poset.rank_bound() {
        return Err(Error::out_of_range("volume", k as f64, 0, poset.rank_bound() as f64));
    }
    Ok(balance::sample_lattice_rank(&poset, k, 1, options, seed)?.samples.pop().unwrap())
}
