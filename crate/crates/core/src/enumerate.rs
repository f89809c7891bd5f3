//! Deterministic enumeration of value tuples and index subsets.

use crate::model::Value;

/// Cartesian product of finite value lists, last position fastest.
pub(crate) struct Odometer<'a> {
    ranges: Vec<&'a [Value]>,
    pos: Vec<usize>,
    done: bool,
}

impl<'a> Odometer<'a> {
    pub(crate) fn new(ranges: Vec<&'a [Value]>) -> Self {
        let done = ranges.iter().any(|r| r.is_empty());
        let pos = vec![0; ranges.len()];
        Odometer { ranges, pos, done }
    }
}

impl Iterator for Odometer<'_> {
    type Item = Vec<Value>;

    fn next(&mut self) -> Option<Vec<Value>> {
        if self.done {
            return None;
        }
        let out = self
            .pos
            .iter()
            .zip(&self.ranges)
            .map(|(&p, r)| r[p])
            .collect();
        let mut k = self.pos.len();
        loop {
            if k == 0 {
                self.done = true;
                break;
            }
            k -= 1;
            self.pos[k] += 1;
            if self.pos[k] < self.ranges[k].len() {
                break;
            }
            self.pos[k] = 0;
        }
        Some(out)
    }
}

/// `k`-element subsets of `0..n` in lexicographic order.
pub(crate) struct Combinations {
    n: usize,
    cur: Vec<usize>,
    done: bool,
}

impl Combinations {
    pub(crate) fn new(n: usize, k: usize) -> Self {
        Combinations {
            n,
            cur: (0..k).collect(),
            done: k > n,
        }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.cur.clone();
        let k = self.cur.len();
        let mut i = k;
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.cur[i] < self.n - k + i {
                self.cur[i] += 1;
                for j in i + 1..k {
                    self.cur[j] = self.cur[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    }
}

/// Every subset of `0..n`, by size and then lexicographically.
pub(crate) fn subsets(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (0..=n).flat_map(move |k| Combinations::new(n, k))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn odometer_enumerates_product() {
        let a = [0, 1];
        let b = [-1, 0, 1];
        let all: Vec<_> = Odometer::new(vec![&a, &b]).collect();
        assert_eq!(all.len(), 6);
        assert_eq!(all[0], vec![0, -1]);
        assert_eq!(all[1], vec![0, 0]);
        assert_eq!(all[5], vec![1, 1]);
        assert_eq!(Odometer::new(vec![]).count(), 1);
    }

    #[test]
    fn combinations_are_lexicographic() {
        let all: Vec<_> = Combinations::new(4, 2).collect();
        assert_eq!(
            all,
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![0, 3],
                vec![1, 2],
                vec![1, 3],
                vec![2, 3]
            ]
        );
        assert_eq!(
            Combinations::new(3, 0).collect::<Vec<_>>(),
            vec![Vec::<usize>::new()]
        );
        assert_eq!(Combinations::new(2, 3).count(), 0);
    }

    #[test]
    fn subsets_cover_power_set() {
        let all: Vec<_> = subsets(3).collect();
        assert_eq!(all.len(), 8);
        assert!(all[0].is_empty());
        assert_eq!(all[7], vec![0, 1, 2]);
    }
}
