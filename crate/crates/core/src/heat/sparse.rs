use crate::par;

/// Compressed sparse row matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Csr {
    n: usize,
    offsets: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<f64>,
}

impl Csr {
    /// Sums duplicate entries after sorting by `(row, col)`, so the result
    /// does not depend on triplet order.
    pub fn from_triplets(n: usize, mut triplets: Vec<(u32, u32, f64)>) -> Self {
        triplets.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)).then(a.2.total_cmp(&b.2)));
        let mut offsets = vec![0usize; n + 1];
        let mut cols = Vec::with_capacity(triplets.len());
        let mut vals: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(u32, u32)> = None;
        for (r, c, v) in triplets {
            if last == Some((r, c)) {
                *vals.last_mut().expect("entry exists") += v;
            } else {
                cols.push(c);
                vals.push(v);
                offsets[r as usize + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        Self { n, offsets, cols, vals }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.offsets[i]..self.offsets[i + 1];
        self.cols[r.clone()]
            .iter()
            .zip(&self.vals[r])
            .map(|(&c, &v)| (c as usize, v))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.row(i).find(|&(c, _)| c == j).map_or(0.0, |(_, v)| v)
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    fn row_dot(&self, i: usize, x: &[f64]) -> f64 {
        let mut s = 0.0;
        for k in self.offsets[i]..self.offsets[i + 1] {
            s += self.vals[k] * x[self.cols[k] as usize];
        }
        s
    }

    /// `y = A x`, rows split across threads when the `parallel` feature is on.
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        par::fill(y, |i| self.row_dot(i, x));
    }

    pub fn matvec_seq(&self, x: &[f64], y: &mut [f64]) {
        par::fill_seq(y, |i| self.row_dot(i, x));
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (0..self.n).all(|i| self.row(i).all(|(j, v)| (v - self.get(j, i)).abs() <= tol))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicates_are_summed() {
        let a = Csr::from_triplets(2, vec![(1, 0, 2.0), (0, 0, 1.0), (1, 0, 3.0), (0, 1, -1.0)]);
        assert_eq!(a.nnz(), 3);
        assert_eq!(a.get(1, 0), 5.0);
        let mut y = vec![0.0; 2];
        a.matvec(&[1.0, 2.0], &mut y);
        assert_eq!(y, vec![-1.0, 5.0]);
        let mut z = vec![0.0; 2];
        a.matvec_seq(&[1.0, 2.0], &mut z);
        assert_eq!(y, z);
    }

    #[test]
    fn empty_rows() {
        let a = Csr::from_triplets(3, vec![(2, 2, 1.0)]);
        assert_eq!(a.row(0).count(), 0);
        assert_eq!(a.diagonal(), vec![0.0, 0.0, 1.0]);
    }
}
