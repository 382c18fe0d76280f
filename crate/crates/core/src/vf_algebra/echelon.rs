//! Incremental exact row reduction over ℚ for sparse keyed vectors.

use std::collections::BTreeMap;

use num_traits::Zero;

use super::polynomial::Rational;

/// Rows in echelon form: each row's pivot is its smallest key and no two
/// rows share a pivot.
#[derive(Debug, Clone)]
pub struct EchelonBasis<K: Ord + Clone> {
    rows: BTreeMap<K, BTreeMap<K, Rational>>,
}

impl<K: Ord + Clone> Default for EchelonBasis<K> {
    fn default() -> Self {
        Self { rows: BTreeMap::new() }
    }
}

impl<K: Ord + Clone> EchelonBasis<K> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduce `v` against the basis; returns the remainder.
    fn reduce(&self, mut v: BTreeMap<K, Rational>) -> BTreeMap<K, Rational> {
        v.retain(|_, c| !c.is_zero());
        // the smallest key strictly increases each round
        let mut floor: Option<K> = None;
        loop {
            let next = match &floor {
                None => v.keys().next().cloned(),
                Some(f) => v
                    .range((std::ops::Bound::Excluded(f.clone()), std::ops::Bound::Unbounded))
                    .next()
                    .map(|(k, _)| k.clone()),
            };
            let Some(key) = next else { break };
            if let Some(row) = self.rows.get(&key) {
                let factor = v[&key].clone() / row[&key].clone();
                for (k, c) in row {
                    let entry = v.entry(k.clone()).or_insert_with(Rational::zero);
                    *entry -= &factor * c;
                    if entry.is_zero() {
                        v.remove(k);
                    }
                }
            }
            floor = Some(key);
        }
        v
    }

    /// Insert `v`; returns `true` when it was independent of the basis.
    ///
    /// Every key left in the remainder is a non-pivot, so its smallest key
    /// becomes the new pivot.
    pub fn insert(&mut self, v: BTreeMap<K, Rational>) -> bool {
        let r = self.reduce(v);
        match r.keys().next().cloned() {
            None => false,
            Some(pivot) => {
                self.rows.insert(pivot, r);
                true
            }
        }
    }

    pub fn contains(&self, v: BTreeMap<K, Rational>) -> bool {
        self.reduce(v).is_empty()
    }
}

/// Rank of a dense matrix over ℚ.
pub fn rank_of(rows: &[Vec<Rational>]) -> usize {
    let mut basis = EchelonBasis::<usize>::new();
    for r in rows {
        let v: BTreeMap<usize, Rational> = r
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, c)| (j, c.clone()))
            .collect();
        basis.insert(v);
    }
    basis.rank()
}

#[cfg(test)]
mod tests {
    use super::super::polynomial::{rat, ratio};
    use super::*;

    #[test]
    fn rank_of_dependent_rows() {
        let rows = vec![
            vec![rat(1), rat(2), rat(3)],
            vec![rat(2), rat(4), rat(6)],
            vec![rat(0), rat(1), ratio(1, 2)],
        ];
        assert_eq!(rank_of(&rows), 2);
    }

    #[test]
    fn rank_full() {
        let rows = vec![vec![rat(0), rat(1)], vec![rat(1), rat(1)]];
        assert_eq!(rank_of(&rows), 2);
    }

    #[test]
    fn zero_rows() {
        assert_eq!(rank_of(&[vec![rat(0), rat(0)]]), 0);
    }
}
