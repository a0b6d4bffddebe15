//! Indexed tuple sets for enumeration.

use crate::error::{Error, Result};

/// Either all of `c^n`, indexed by the base-`|c|` code with the first entry
/// most significant, or an explicit lexicographically sorted tuple list.
/// In both cases index order is lexicographic order.
pub(crate) enum Domain {
    Dense { base: u64, n: usize, len: usize },
    Sorted { n: usize, flat: Vec<u16> },
}

impl Domain {
    pub fn dense(base: usize, n: usize, budget: usize) -> Result<Self> {
        let len = checked_power(base as u64, n)
            .filter(|&l| l <= budget as u64 && l <= u32::MAX as u64)
            .ok_or_else(|| over_budget(base as u128, n, budget))?;
        Ok(Domain::Dense {
            base: base as u64,
            n,
            len: len as usize,
        })
    }

    /// Tuples with exactly `counts[b]` entries from `blocks[b]`.
    pub fn with_multidegree(
        size: usize,
        component_of: &[usize],
        counts: &[usize],
        n: usize,
        budget: usize,
    ) -> Result<Self> {
        let mut block_sizes = vec![0u64; counts.len()];
        for &b in component_of {
            block_sizes[b] += 1;
        }
        let total = multidegree_count(&block_sizes, counts);
        if total > budget as u128 || total > u32::MAX as u128 {
            return Err(Error::budget("admissible tuples", budget, total as u64));
        }
        let mut flat = Vec::with_capacity(total as usize * n);
        let mut remaining = counts.to_vec();
        let mut current = Vec::with_capacity(n);
        fill_sorted(size, component_of, &mut remaining, &mut current, n, &mut flat);
        Ok(Domain::Sorted { n, flat })
    }

    pub fn len(&self) -> usize {
        match self {
            Domain::Dense { len, .. } => *len,
            Domain::Sorted { n, flat } => {
                if *n == 0 {
                    1
                } else {
                    flat.len() / n
                }
            }
        }
    }

    pub fn decode(&self, index: usize, out: &mut [u16]) {
        match self {
            Domain::Dense { base, n, .. } => {
                let mut code = index as u64;
                for k in (0..*n).rev() {
                    out[k] = (code % base) as u16;
                    code /= base;
                }
            }
            Domain::Sorted { n, flat } => out.copy_from_slice(&flat[index * n..(index + 1) * n]),
        }
    }

    pub fn index_of(&self, t: &[u16]) -> Option<usize> {
        match self {
            Domain::Dense { base, .. } => Some(t.iter().fold(0u64, |acc, &x| acc * base + x as u64) as usize),
            Domain::Sorted { n, flat } => {
                let n = *n;
                if n == 0 {
                    return Some(0);
                }
                let (mut lo, mut hi) = (0usize, flat.len() / n);
                while lo < hi {
                    let mid = (lo + hi) / 2;
                    match flat[mid * n..(mid + 1) * n].cmp(t) {
                        std::cmp::Ordering::Less => lo = mid + 1,
                        std::cmp::Ordering::Greater => hi = mid,
                        std::cmp::Ordering::Equal => return Some(mid),
                    }
                }
                None
            }
        }
    }
}

fn fill_sorted(
    size: usize,
    component_of: &[usize],
    remaining: &mut [usize],
    current: &mut Vec<u16>,
    n: usize,
    out: &mut Vec<u16>,
) {
    if current.len() == n {
        out.extend_from_slice(current);
        return;
    }
    for x in 0..size {
        let b = component_of[x];
        if remaining[b] > 0 {
            remaining[b] -= 1;
            current.push(x as u16);
            fill_sorted(size, component_of, remaining, current, n, out);
            current.pop();
            remaining[b] += 1;
        }
    }
}

pub(crate) fn checked_power(base: u64, n: usize) -> Option<u64> {
    (0..n).try_fold(1u64, |acc, _| acc.checked_mul(base))
}

fn over_budget(base: u128, n: usize, budget: usize) -> Error {
    let reached = (0..n).fold(1u128, |acc, _| acc.saturating_mul(base));
    Error::budget("admissible tuples", budget, reached.min(u64::MAX as u128) as u64)
}

/// `n! / prod n_b! * prod |c_b|^{n_b}`, saturating.
pub(crate) fn multidegree_count(block_sizes: &[u64], counts: &[usize]) -> u128 {
    let mut total: u128 = 1;
    let mut placed: u128 = 0;
    for (&s, &k) in block_sizes.iter().zip(counts) {
        for j in 1..=k as u128 {
            placed += 1;
            // running binomial product stays integral at each step
            total = total.saturating_mul(placed) / j;
            total = total.saturating_mul(s as u128);
        }
    }
    total
}
