use crate::error::{Error, Result};
use crate::Limits;

/// Number of subsets of an `n`-set with at most `max` elements, saturating.
pub(crate) fn count_up_to(n: usize, max: usize) -> u128 {
    let mut total: u128 = 0;
    let mut binom: u128 = 1;
    for k in 0..=max.min(n) {
        total = total.saturating_add(binom);
        binom = binom.saturating_mul((n - k) as u128) / (k as u128 + 1);
    }
    total
}

pub(crate) fn check_budget(what: &'static str, n: usize, max: usize, limits: &Limits) -> Result<()> {
    let budget = 1u128 << limits.subsets.min(100);
    if count_up_to(n, max) > budget {
        return Err(Error::size(what, limits.subsets, n));
    }
    Ok(())
}

/// Visits every subset of `items` with at most `max` elements, by size and
/// then lexicographically. Stops as soon as `visit` returns `false`; the
/// return value says whether the enumeration ran to completion.
pub(crate) fn each_subset(items: &[usize], max: usize, mut visit: impl FnMut(&[usize]) -> bool) -> bool {
    fn rec(
        items: &[usize],
        start: usize,
        size: usize,
        current: &mut Vec<usize>,
        visit: &mut dyn FnMut(&[usize]) -> bool,
    ) -> bool {
        if current.len() == size {
            return visit(current);
        }
        let need = size - current.len();
        for i in start..=items.len().saturating_sub(need) {
            if i >= items.len() {
                break;
            }
            current.push(items[i]);
            let go_on = rec(items, i + 1, size, current, visit);
            current.pop();
            if !go_on {
                return false;
            }
        }
        true
    }
    let mut current = Vec::with_capacity(max);
    for size in 0..=max.min(items.len()) {
        if !rec(items, 0, size, &mut current, &mut visit) {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumerates_in_size_order() {
        let mut seen = Vec::new();
        each_subset(&[1, 2, 3], 2, |s| {
            seen.push(s.to_vec());
            true
        });
        assert_eq!(
            seen,
            vec![vec![], vec![1], vec![2], vec![3], vec![1, 2], vec![1, 3], vec![2, 3]]
        );
        assert_eq!(count_up_to(3, 2), 7);
        assert_eq!(count_up_to(4, 10), 16);
    }

    #[test]
    fn early_exit() {
        let mut n = 0;
        let finished = each_subset(&[0, 1, 2, 3], 4, |_| {
            n += 1;
            n < 5
        });
        assert!(!finished);
        assert_eq!(n, 5);
    }
}
