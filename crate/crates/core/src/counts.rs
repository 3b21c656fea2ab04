//! Exact big-integer counting oracles.

use astro_float::{BigFloat, Consts, RoundingMode};
use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::partitions::Region;

pub type BigCount = BigUint;

/// `p(0), …, p(n_max)` by Euler's pentagonal recurrence.
pub fn partition_numbers(n_max: usize) -> Vec<BigCount> {
    let mut table: Vec<BigCount> = Vec::with_capacity(n_max + 1);
    table.push(BigUint::one());
    for n in 1..=n_max {
        let mut plus = BigUint::zero();
        let mut minus = BigUint::zero();
        for k in 1usize.. {
            let g1 = k * (3 * k - 1) / 2;
            if g1 > n {
                break;
            }
            let acc = if k % 2 == 1 { &mut plus } else { &mut minus };
            *acc += &table[n - g1];
            let g2 = k * (3 * k + 1) / 2;
            if g2 <= n {
                *acc += &table[n - g2];
            }
        }
        table.push(plus - minus);
    }
    table
}

pub fn partition_number(n: usize) -> BigCount {
    partition_numbers(n).pop().unwrap()
}

/// Rank generating function of a region: entry `k` counts the diagrams of
/// rank `k`, i.e. `k` squares above the floor.
pub fn rank_generating_function(region: &Region) -> Vec<BigCount> {
    rank_generating_function_truncated(region, region.area())
}

/// [`rank_generating_function`] with coefficients above `max_rank` dropped.
pub fn rank_generating_function_truncated(region: &Region, max_rank: usize) -> Vec<BigCount> {
    let max_rank = max_rank.min(region.area());
    // layer[h - floor] holds the polynomial of diagrams whose current column has height h.
    let mut layer: Vec<Vec<BigCount>> = Vec::new();
    let mut layer_floor = 0usize;
    let mut prev_ceiling = usize::MAX;
    for x in 0..region.width() {
        let (lo, hi) = (region.floor_at(x) as usize, region.ceiling_at(x) as usize);
        let mut next: Vec<Vec<BigCount>> = vec![Vec::new(); hi - lo + 1];
        if x == 0 {
            for h in lo..=hi {
                next[h - lo] = monomial(h - lo, max_rank);
            }
        } else {
            // Suffix sums over previous heights h >= h'.
            let mut suffix: Vec<BigCount> = Vec::new();
            let mut pending = prev_ceiling as isize;
            for h in (lo..=hi).rev() {
                while pending >= h as isize && pending >= layer_floor as isize {
                    add_assign(&mut suffix, &layer[pending as usize - layer_floor]);
                    pending -= 1;
                }
                next[h - lo] = shift(&suffix, h - lo, max_rank);
            }
        }
        layer = next;
        layer_floor = lo;
        prev_ceiling = hi;
    }
    let mut total: Vec<BigCount> = Vec::new();
    if region.width() == 0 {
        total.push(BigUint::one());
    }
    for poly in &layer {
        add_assign(&mut total, poly);
    }
    total.resize(max_rank + 1, BigUint::zero());
    total
}

/// Number of diagrams of rank `k` in `region`; zero when `k` exceeds the area.
pub fn count_restricted(region: &Region, k: usize) -> BigCount {
    if k > region.area() {
        return BigUint::zero();
    }
    rank_generating_function_truncated(region, k).swap_remove(k)
}

fn monomial(degree: usize, max_degree: usize) -> Vec<BigCount> {
    if degree > max_degree {
        return Vec::new();
    }
    let mut v = vec![BigUint::zero(); degree + 1];
    v[degree] = BigUint::one();
    v
}

fn shift(poly: &[BigCount], by: usize, max_degree: usize) -> Vec<BigCount> {
    if poly.is_empty() || by > max_degree {
        return Vec::new();
    }
    let len = (poly.len() + by).min(max_degree + 1);
    let mut v = vec![BigUint::zero(); len];
    for (i, c) in poly.iter().enumerate() {
        if i + by < len {
            v[i + by] = c.clone();
        }
    }
    v
}

fn add_assign(acc: &mut Vec<BigCount>, poly: &[BigCount]) {
    if acc.len() < poly.len() {
        acc.resize(poly.len(), BigUint::zero());
    }
    for (a, c) in acc.iter_mut().zip(poly) {
        *a += c;
    }
}

/// Mahonian numbers: entry `k` counts permutations of `n` with `k` inversions.
pub fn inversion_numbers(n: usize) -> Vec<BigCount> {
    assert!(n >= 1, "inversion_numbers needs n >= 1");
    let mut poly = vec![BigUint::one()];
    for i in 2..=n {
        // Multiply by 1 + q + … + q^{i-1} with a sliding window sum.
        let len = poly.len() + i - 1;
        let mut next = vec![BigUint::zero(); len];
        let mut window = BigUint::zero();
        for (d, slot) in next.iter_mut().enumerate() {
            if d < poly.len() {
                window += &poly[d];
            }
            if d >= i && d - i < poly.len() {
                window -= &poly[d - i];
            }
            *slot = window.clone();
        }
        poly = next;
    }
    poly
}

/// Volume generating function of plane partitions in the `a × b × c` box.
pub fn plane_partition_volumes(a: usize, b: usize, c: usize) -> Vec<BigCount> {
    assert!(a >= 1 && b >= 1 && c >= 1, "box sides must be positive");
    let columns = nonincreasing_vectors(a, c);
    let max_volume = a * b * c;
    let volume = |v: &[usize]| v.iter().sum::<usize>();
    let mut layer: Vec<Vec<BigCount>> = columns.iter().map(|v| monomial(volume(v), max_volume)).collect();
    for _ in 1..b {
        let mut next = vec![Vec::new(); columns.len()];
        for (j, lower) in columns.iter().enumerate() {
            let mut acc = Vec::new();
            for (i, upper) in columns.iter().enumerate() {
                if lower.iter().zip(upper).all(|(l, u)| l <= u) {
                    add_assign(&mut acc, &layer[i]);
                }
            }
            next[j] = shift(&acc, volume(lower), max_volume);
        }
        layer = next;
    }
    let mut total = Vec::new();
    for poly in &layer {
        add_assign(&mut total, poly);
    }
    total.resize(max_volume + 1, BigUint::zero());
    total
}

/// Plane partitions in the `a × b × c` box with volume `k`.
pub fn box_plane_partitions(a: usize, b: usize, c: usize, k: usize) -> BigCount {
    if k > a * b * c {
        return BigUint::zero();
    }
    plane_partition_volumes(a, b, c).swap_remove(k)
}

fn nonincreasing_vectors(len: usize, max: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(len);
    fn rec(len: usize, cap: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == len {
            out.push(current.clone());
            return;
        }
        for v in 0..=cap {
            current.push(v);
            rec(len, v, current, out);
            current.pop();
        }
    }
    rec(len, max, &mut current, &mut out);
    out
}

/// `μ_n`, `ν_n` and the three-term Hardy–Ramanujan value `T(n)` in `f64`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HardyRamanujanTerms {
    pub mu: f64,
    pub nu: f64,
    pub t_value: f64,
}

impl HardyRamanujanTerms {
    pub fn new(n: u64) -> Self {
        assert!(n >= 1, "Hardy-Ramanujan terms need n >= 1");
        let m = 24.0 * n as f64 - 1.0;
        let mu = std::f64::consts::PI * m.sqrt() / 6.0;
        let nu = 12f64.sqrt() / m;
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let t_value = nu * ((1.0 - 1.0 / mu) * mu.exp() + sign * std::f64::consts::FRAC_1_SQRT_2 * (mu / 2.0).exp());
        HardyRamanujanTerms { mu, nu, t_value }
    }
}

/// An interval `[lower, upper]` guaranteed to contain `p(n)`.
#[derive(Debug, Clone)]
pub struct HardyRamanujanBracket {
    pub n: u64,
    lower: BigFloat,
    upper: BigFloat,
    precision: usize,
}

impl HardyRamanujanBracket {
    pub fn contains(&self, value: &BigUint) -> bool {
        let v = biguint_to_bigfloat(value, self.precision.max(value.bits() as usize + 64));
        matches!(self.lower.cmp(&v), Some(c) if c <= 0) && matches!(v.cmp(&self.upper), Some(c) if c <= 0)
    }

    pub fn lower(&self) -> &BigFloat {
        &self.lower
    }

    pub fn upper(&self) -> &BigFloat {
        &self.upper
    }

    pub fn lower_f64(&self) -> f64 {
        bigfloat_to_f64(&self.lower)
    }

    pub fn upper_f64(&self) -> f64 {
        bigfloat_to_f64(&self.upper)
    }
}

/// `ν_n(1 − 1/μ_n)e^{μ_n} ∓ (1 + e^{μ_n/2})`, computed with enough working
/// bits to resolve every integer digit and then widened outward.
pub fn hardy_ramanujan_bracket(n: u64) -> HardyRamanujanBracket {
    assert!(n >= 2, "the bracket needs n >= 2");
    let rm = RoundingMode::ToEven;
    let mu_estimate = HardyRamanujanTerms::new(n).mu;
    let p = (((mu_estimate / std::f64::consts::LN_2) as usize + 256) / 64 + 1) * 64;
    let mut cc = Consts::new().expect("astro-float constants cache");

    let m = BigFloat::from_u64(24 * n - 1, p);
    let sqrt_m = m.sqrt(p, rm);
    let pi = cc.pi(p, rm);
    let mu = pi.mul(&sqrt_m, p, rm).div(&BigFloat::from_u64(6, p), p, rm);
    let nu = BigFloat::from_u64(12, p).sqrt(p, rm).div(&m, p, rm);
    let one = BigFloat::from_u64(1, p);
    let factor = one.sub(&one.div(&mu, p, rm), p, rm);
    let main = nu.mul(&factor, p, rm).mul(&mu.exp(p, rm, &mut cc), p, rm);
    let half = mu.div(&BigFloat::from_u64(2, p), p, rm).exp(p, rm, &mut cc);
    let radius = one.add(&half, p, rm);

    let lower = main.sub(&radius, p, rm);
    let upper = main.add(&radius, p, rm);
    // Relative margin 2^{-(p-64)}, far above the accumulated rounding error.
    let margin = BigFloat::from_u64(1, p).div(&BigFloat::from_u64(2, p).powi(p - 64, p, rm), p, rm);
    let widen = |x: &BigFloat, outward_sign: i32| -> BigFloat {
        let delta = x.abs().mul(&margin, p, rm).add(&one, p, rm);
        if outward_sign < 0 {
            x.sub(&delta, p, rm)
        } else {
            x.add(&delta, p, rm)
        }
    };
    HardyRamanujanBracket { n, lower: widen(&lower, -1), upper: widen(&upper, 1), precision: p }
}

fn biguint_to_bigfloat(value: &BigUint, p: usize) -> BigFloat {
    let rm = RoundingMode::ToEven;
    let base = BigFloat::from_u64(1 << 32, p).mul(&BigFloat::from_u64(1 << 32, p), p, rm);
    let mut acc = BigFloat::from_u64(0, p);
    for limb in value.to_u64_digits().iter().rev() {
        acc = acc.mul(&base, p, rm).add(&BigFloat::from_u64(*limb, p), p, rm);
    }
    acc
}

fn bigfloat_to_f64(x: &BigFloat) -> f64 {
    x.to_string().parse().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn brute_partitions(n: usize) -> u64 {
        fn rec(n: usize, max: usize) -> u64 {
            if n == 0 {
                return 1;
            }
            (1..=max.min(n)).map(|part| rec(n - part, part)).sum()
        }
        rec(n, n)
    }

    #[test]
    fn pentagonal_matches_brute_force() {
        let table = partition_numbers(40);
        assert_eq!(table.len(), 41);
        for (n, p) in table.iter().enumerate() {
            assert_eq!(*p, BigUint::from(brute_partitions(n)), "p({n})");
        }
        assert_eq!(partition_numbers(0), vec![BigUint::one()]);
        assert_eq!(table[5], BigUint::from(7u32));
        assert_eq!(table[8], BigUint::from(22u32));
    }

    #[test]
    fn p_of_100() {
        let p: BigUint = "190569292".parse().unwrap();
        assert_eq!(partition_number(100), p);
    }

    #[test]
    fn small_region_counts() {
        let b22 = Region::rectangle(2, 2);
        assert_eq!(count_restricted(&b22, 2), BigUint::from(2u32));
        assert_eq!(count_restricted(&b22, 0), BigUint::one());
        assert_eq!(count_restricted(&b22, 5), BigUint::zero());
        let b55 = Region::rectangle(5, 5);
        assert_eq!(count_restricted(&b55, 5), BigUint::from(7u32));
        assert_eq!(
            rank_generating_function(&Region::rectangle(2, 2)),
            vec![1u32, 1, 2, 1, 1].into_iter().map(BigUint::from).collect::<Vec<_>>()
        );
    }

    #[test]
    fn box_total_is_binomial() {
        for k in 1..=5usize {
            for l in 1..=5usize {
                let total: BigUint = rank_generating_function(&Region::rectangle(k, l as u32)).iter().sum();
                let binom = num_integer::binomial(BigUint::from(k + l), BigUint::from(l));
                assert_eq!(total, binom, "{k}x{l}");
            }
        }
    }

    #[test]
    fn hyperbolic_region_holds_all_partitions() {
        for n in 1..=20usize {
            let region = Region::hyperbolic(n);
            assert_eq!(count_restricted(&region, n), BigUint::from(brute_partitions(n)));
        }
    }

    #[test]
    fn mahonian_numbers() {
        assert_eq!(inversion_numbers(1), vec![BigUint::one()]);
        assert_eq!(inversion_numbers(4)[2], BigUint::from(5u32));
        let mut factorial = BigUint::one();
        for n in 1..=8usize {
            factorial *= n;
            let row = inversion_numbers(n);
            assert_eq!(row.len(), n * (n - 1) / 2 + 1);
            assert_eq!(row.iter().sum::<BigUint>(), factorial);
            let mut rev = row.clone();
            rev.reverse();
            assert_eq!(row, rev);
        }
    }

    #[test]
    fn plane_partition_counts() {
        assert_eq!(box_plane_partitions(1, 1, 1, 1), BigUint::one());
        assert_eq!(box_plane_partitions(3, 2, 4, 0), BigUint::one());
        assert_eq!(box_plane_partitions(2, 2, 2, 9), BigUint::zero());
        let total: BigUint = plane_partition_volumes(2, 2, 2).iter().sum();
        assert_eq!(total, BigUint::from(20u32));
        for a in 1..=3 {
            for b in 1..=3 {
                for c in 1..=3 {
                    assert_eq!(plane_partition_volumes(a, b, c), plane_partition_volumes(b, a, c));
                }
            }
        }
    }

    #[test]
    fn plane_partition_totals_match_macmahon() {
        for (a, b, c) in [(2, 3, 4), (3, 3, 3), (1, 4, 2), (4, 2, 3)] {
            let total: BigUint = plane_partition_volumes(a, b, c).iter().sum();
            let mut num = BigUint::one();
            let mut den = BigUint::one();
            for i in 1..=a {
                for j in 1..=b {
                    for k in 1..=c {
                        num *= i + j + k - 1;
                        den *= i + j + k - 2;
                    }
                }
            }
            assert_eq!(total, num / den);
        }
    }

    #[test]
    fn hardy_ramanujan_terms_are_positive() {
        for n in 1..200u64 {
            let t = HardyRamanujanTerms::new(n);
            assert!(t.mu > 0.0 && t.nu > 0.0);
            if n >= 2 {
                assert!(t.t_value > 0.0);
            }
        }
        let table = partition_numbers(150);
        for n in [10usize, 50, 100, 150] {
            let t = HardyRamanujanTerms::new(n as u64);
            let exact = table[n].to_f64().unwrap();
            let slack = 1.0 + 16.0 / t.mu.powi(3) * (t.mu / 2.0).exp();
            assert!((t.t_value - exact).abs() < slack, "n={n}");
        }
    }

    #[test]
    fn bracket_contains_small_values() {
        let table = partition_numbers(120);
        for n in [2u64, 3, 10, 30, 100, 120] {
            let b = hardy_ramanujan_bracket(n);
            assert!(b.contains(&table[n as usize]), "n={n}");
            assert!(b.lower_f64() < b.upper_f64());
        }
        let b = hardy_ramanujan_bracket(100);
        assert!(!b.contains(&(&table[100] * 2u32)));
    }
}
