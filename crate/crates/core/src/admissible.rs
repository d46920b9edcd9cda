//! Schreier-admissible sets: finite `F ⊂ ℕ` with `#F ≤ min F`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which subsets of a window count as admissible.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Admissibility {
    /// `#F ≤ min F`.
    #[default]
    Schreier,
    /// Every subset.
    Full,
}

pub fn is_admissible(set: &[u64]) -> bool {
    match set.iter().min() {
        None => true,
        Some(&m) => set.len() as u64 <= m,
    }
}

/// Binomial coefficient, saturating at `u64::MAX`.
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// Calls `f` on every `k`-subset of `items` in lexicographic order of positions.
/// Stops early when `f` returns `false`.
pub fn for_each_combination<T: Copy>(items: &[T], k: usize, mut f: impl FnMut(&[T]) -> bool) {
    if k > items.len() {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    let mut buf: Vec<T> = idx.iter().map(|&i| items[i]).collect();
    let n = items.len();
    loop {
        if !f(&buf) {
            return;
        }
        let Some(i) = (0..k).rev().find(|&i| idx[i] < n - k + i) else {
            return;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
        for j in i..k {
            buf[j] = items[idx[j]];
        }
    }
}

/// Number of inclusion-maximal admissible subsets of a sorted window.
pub fn count_maximal_admissible(window: &[u64]) -> u64 {
    let mut total: u64 = 0;
    for (pos, &j) in window.iter().enumerate() {
        let avail = (window.len() - pos) as u64;
        let size = j.min(avail);
        if size == avail && size < j && window[..pos].iter().any(|&i| i > size) {
            continue;
        }
        total = total.saturating_add(binomial(avail - 1, size - 1));
    }
    total
}

/// Inclusion-maximal admissible subsets of a sorted, duplicate-free window,
/// in lexicographic order. Every admissible subset of the window lies in one
/// of them.
pub fn maximal_admissible_sets(window: &[u64], cap: usize) -> Result<Vec<Vec<u64>>> {
    let count = count_maximal_admissible(window);
    if count > cap as u64 {
        return Err(Error::CapExceeded {
            what: "maximal admissible sets",
            actual: count.min(usize::MAX as u64) as usize,
            cap,
        });
    }
    let mut out = Vec::with_capacity(count as usize);
    for (pos, &j) in window.iter().enumerate() {
        let rest = &window[pos + 1..];
        let avail = rest.len() as u64 + 1;
        let size = j.min(avail);
        // Taking everything from j on and still having room below j: extendable.
        if size == avail && size < j && window[..pos].iter().any(|&i| i > size) {
            continue;
        }
        for_each_combination(rest, (size - 1) as usize, |tail| {
            let mut f = Vec::with_capacity(size as usize);
            f.push(j);
            f.extend_from_slice(tail);
            out.push(f);
            true
        });
    }
    out.sort();
    Ok(out)
}

/// Inclusion-maximal subsets of a window under `rule`.
pub fn maximal_sets(window: &[u64], rule: Admissibility, cap: usize) -> Result<Vec<Vec<u64>>> {
    match rule {
        Admissibility::Schreier => maximal_admissible_sets(window, cap),
        Admissibility::Full => Ok(vec![window.to_vec()]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force_maximal(window: &[u64]) -> Vec<Vec<u64>> {
        let n = window.len();
        let all: Vec<Vec<u64>> = (1u32..(1 << n))
            .map(|mask| (0..n).filter(|i| mask >> i & 1 == 1).map(|i| window[i]).collect())
            .filter(|s: &Vec<u64>| is_admissible(s))
            .collect();
        let mut maximal: Vec<Vec<u64>> = all
            .iter()
            .filter(|s| {
                !all.iter().any(|t| t.len() > s.len() && s.iter().all(|x| t.contains(x)))
            })
            .cloned()
            .collect();
        maximal.sort();
        maximal
    }

    #[test]
    fn matches_brute_force_on_small_windows() {
        let windows: Vec<Vec<u64>> = vec![
            (1..=10).collect(),
            (1..=6).collect(),
            (3..=9).collect(),
            vec![1, 4, 5, 6, 20],
            vec![2, 3],
            vec![5, 6, 7, 8, 9],
            vec![7],
        ];
        for w in windows {
            let fast = maximal_admissible_sets(&w, 1_000_000).unwrap();
            assert_eq!(fast, brute_force_maximal(&w), "window {w:?}");
            assert_eq!(count_maximal_admissible(&w), fast.len() as u64);
        }
    }

    #[test]
    fn window_one_to_ten_has_fifty_six_maximal_sets() {
        let w: Vec<u64> = (1..=10).collect();
        assert_eq!(maximal_admissible_sets(&w, 1000).unwrap().len(), 56);
    }

    #[test]
    fn cap_is_enforced() {
        let w: Vec<u64> = (1..=50).collect();
        assert!(matches!(maximal_admissible_sets(&w, 1000), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn combinations_in_order() {
        let mut seen = Vec::new();
        for_each_combination(&[1, 2, 3, 4], 2, |c| {
            seen.push(c.to_vec());
            true
        });
        assert_eq!(seen, vec![vec![1, 2], vec![1, 3], vec![1, 4], vec![2, 3], vec![2, 4], vec![3, 4]]);
        let mut empty = 0;
        for_each_combination(&[1, 2], 0, |_| {
            empty += 1;
            true
        });
        assert_eq!(empty, 1);
    }
}
