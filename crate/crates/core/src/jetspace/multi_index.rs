use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::One;

use crate::error::{Error, Result};

/// `ζ = (i_1, …, i_n)`: exponent vector of a partial derivative `p_ζ`.
///
/// Ordered by degree first, then lexicographically descending, so that
/// `(2,0) < (1,1) < (0,2)` inside degree 2. [`MultiIndex::rank`] is the
/// position in that order and is what jet storage is keyed by.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct MultiIndex(Vec<u8>);

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: usize = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Number of multi-indices in `n` variables with degree `≤ k`.
pub fn count_up_to(n: usize, k: usize) -> usize {
    binomial(n + k, n)
}

/// Number of multi-indices in `n` variables with degree exactly `t`
/// (`dim S^t V*`).
pub fn count_of_degree(n: usize, t: usize) -> usize {
    if n == 0 {
        return usize::from(t == 0);
    }
    binomial(n + t - 1, t)
}

impl MultiIndex {
    pub fn new(entries: Vec<u8>) -> Self {
        MultiIndex(entries)
    }

    pub fn zero(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        MultiIndex(e)
    }

    /// Multi-index counting how often each slot index occurs, e.g.
    /// slots `[0, 0, 2]` in `n = 3` give `(2, 0, 1)`.
    pub fn from_slots(n: usize, slots: &[usize]) -> Self {
        let mut e = vec![0u8; n];
        for &s in slots {
            e[s] += 1;
        }
        MultiIndex(e)
    }

    /// Inverse of [`MultiIndex::from_slots`]; slots come out sorted.
    pub fn slots(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .flat_map(|(i, &c)| std::iter::repeat_n(i, c as usize))
            .collect()
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[u8] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(|&e| e as usize).sum()
    }

    pub fn add_unit(&self, i: usize) -> Self {
        let mut e = self.0.clone();
        e[i] += 1;
        MultiIndex(e)
    }

    pub fn plus(&self, other: &MultiIndex) -> Self {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn checked_sub(&self, other: &MultiIndex) -> Option<Self> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<u8>>>()
            .map(MultiIndex)
    }

    /// `ζ! = Π ζ_i!`
    pub fn factorial(&self) -> BigInt {
        let mut acc = BigInt::one();
        for &e in &self.0 {
            for k in 2..=e as u64 {
                acc *= k;
            }
        }
        acc
    }

    /// Global position in the graded order over all degrees.
    pub fn rank(&self) -> usize {
        let n = self.n();
        let t = self.degree();
        let offset = if t == 0 { 0 } else { binomial(n + t - 1, n) };
        offset + self.rank_within_degree()
    }

    fn rank_within_degree(&self) -> usize {
        let n = self.n();
        let mut remaining = self.degree();
        let mut rank = 0;
        for i in 0..n.saturating_sub(1) {
            let entry = self.0[i] as usize;
            let tail = n - i - 1;
            for val in (entry + 1)..=remaining {
                rank += binomial(remaining - val + tail - 1, tail - 1);
            }
            remaining -= entry;
        }
        rank
    }

    /// All multi-indices of degree `t` in the canonical order.
    pub fn all_of_degree(n: usize, t: usize) -> Vec<MultiIndex> {
        fn rec(n: usize, pos: usize, remaining: u8, cur: &mut Vec<u8>, out: &mut Vec<MultiIndex>) {
            if pos + 1 == n {
                cur.push(remaining);
                out.push(MultiIndex(cur.clone()));
                cur.pop();
                return;
            }
            for val in (0..=remaining).rev() {
                cur.push(val);
                rec(n, pos + 1, remaining - val, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::with_capacity(count_of_degree(n, t));
        if n == 0 {
            if t == 0 {
                out.push(MultiIndex(Vec::new()));
            }
            return out;
        }
        rec(n, 0, t as u8, &mut Vec::with_capacity(n), &mut out);
        out
    }

    /// All multi-indices with degree `≤ k`, in rank order.
    pub fn all_up_to(n: usize, k: usize) -> Vec<MultiIndex> {
        (0..=k).flat_map(|t| MultiIndex::all_of_degree(n, t)).collect()
    }

    /// JSON key form, e.g. `"2,0"`.
    pub fn key(&self) -> String {
        self.0
            .iter()
            .map(|e| e.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn parse_key(s: &str) -> Result<Self> {
        s.split(',')
            .map(|part| {
                part.trim()
                    .parse::<u8>()
                    .map_err(|_| Error::Parse(format!("bad multi-index key {s:?}")))
            })
            .collect::<Result<Vec<u8>>>()
            .map(MultiIndex)
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.key())
    }
}
