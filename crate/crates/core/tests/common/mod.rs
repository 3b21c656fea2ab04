#![allow(dead_code)]

use std::collections::HashMap;
use std::hash::Hash;

use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Pearson statistic of `observed` against `expected` probabilities.
pub fn chi_square<K: Eq + Hash>(observed: &HashMap<K, u64>, expected: &HashMap<K, f64>) -> f64 {
    let total: u64 = observed.values().sum();
    assert!(observed.keys().all(|k| expected.contains_key(k)), "sample outside the support");
    expected
        .iter()
        .map(|(k, p)| {
            let e = p * total as f64;
            let o = *observed.get(k).unwrap_or(&0) as f64;
            (o - e) * (o - e) / e
        })
        .sum()
}

pub fn chi_square_quantile(df: usize, q: f64) -> f64 {
    ChiSquared::new(df as f64).unwrap().inverse_cdf(q)
}

pub fn uniform<K: Eq + Hash + Clone>(keys: &[K]) -> HashMap<K, f64> {
    keys.iter().map(|k| (k.clone(), 1.0 / keys.len() as f64)).collect()
}

pub fn histogram<K: Eq + Hash>(items: impl IntoIterator<Item = K>) -> HashMap<K, u64> {
    let mut h = HashMap::new();
    for k in items {
        *h.entry(k).or_insert(0) += 1;
    }
    h
}

/// All partitions of `n` with parts at most `max`, by recursion.
pub fn brute_partitions(n: u32, max: u32) -> Vec<Vec<u32>> {
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

/// All permutations of `1..=n` in lexicographic order.
pub fn brute_permutations(n: u32) -> Vec<Vec<u32>> {
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
    out.sort();
    out
}

pub fn count_inversions(p: &[u32]) -> usize {
    (0..p.len()).flat_map(|i| (i + 1..p.len()).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count()
}
