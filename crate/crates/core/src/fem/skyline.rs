use super::assemble::CsrMatrix;
use crate::error::{Error, Result};

/// Envelope (variable-band) `L D Lᵀ` factorization of a symmetric matrix.
///
/// Row `i` of the strict lower triangle is stored densely from its first
/// nonzero column `first[i]` up to `i - 1`.
#[derive(Debug, Clone)]
pub struct SkylineLdl {
    n: usize,
    first: Vec<usize>,
    start: Vec<usize>,
    l: Vec<f64>,
    d: Vec<f64>,
    negative: usize,
}

impl SkylineLdl {
    /// Factors `a`. Pivots below `tiny * max|a_ii|` are reported as singular.
    pub fn factor(a: &CsrMatrix) -> Result<Self> {
        let n = a.n;
        let mut first = vec![0usize; n];
        let mut start = vec![0usize; n + 1];
        for i in 0..n {
            let (c, _) = a.row(i);
            first[i] = c.first().copied().unwrap_or(i).min(i);
            start[i + 1] = start[i] + (i - first[i]);
        }
        let mut l = vec![0.0; start[n]];
        let mut d = vec![0.0; n];
        let mut diag_scale: f64 = 0.0;
        for i in 0..n {
            let (c, v) = a.row(i);
            for (&j, &x) in c.iter().zip(v) {
                if j < i {
                    l[start[i] + j - first[i]] = x;
                } else if j == i {
                    d[i] = x;
                }
            }
            diag_scale = diag_scale.max(d[i].abs());
        }
        let tiny = 1e-14 * diag_scale.max(f64::MIN_POSITIVE);
        let mut negative = 0;
        for i in 0..n {
            let fi = first[i];
            let (done, rest) = l.split_at_mut(start[i]);
            let row_i = &mut rest[..i - fi];
            // row_i[j - fi] becomes g_ij = a_ij - sum_k g_ik l_jk, with g_ik = l_ik d_k
            for j in fi..i {
                let fj = first[j];
                let k0 = fi.max(fj);
                let row_j = &done[start[j]..start[j] + (j - fj)];
                let s: f64 = row_i[k0 - fi..j - fi]
                    .iter()
                    .zip(&row_j[k0 - fj..j - fj])
                    .map(|(a, b)| a * b)
                    .sum();
                row_i[j - fi] -= s;
            }
            let mut di = d[i];
            for j in fi..i {
                let g = row_i[j - fi];
                let lij = g / d[j];
                di -= g * lij;
                row_i[j - fi] = lij;
            }
            if di.abs() <= tiny || !di.is_finite() {
                return Err(Error::Solver(format!(
                    "singular pivot {di:e} at row {i}; shift is too close to an eigenvalue"
                )));
            }
            if di < 0.0 {
                negative += 1;
            }
            d[i] = di;
        }
        Ok(Self {
            n,
            first,
            start,
            l,
            d,
            negative,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of negative pivots: eigenvalues of the factored matrix below zero.
    pub fn negative_pivots(&self) -> usize {
        self.negative
    }

    pub fn envelope_size(&self) -> usize {
        self.l.len()
    }

    pub fn solve_in_place(&self, x: &mut [f64]) {
        let n = self.n;
        for i in 0..n {
            let fi = self.first[i];
            let row = &self.l[self.start[i]..self.start[i + 1]];
            let s: f64 = row.iter().zip(&x[fi..i]).map(|(a, b)| a * b).sum();
            x[i] -= s;
        }
        for i in 0..n {
            x[i] /= self.d[i];
        }
        for i in (0..n).rev() {
            let fi = self.first[i];
            let xi = x[i];
            let row = &self.l[self.start[i]..self.start[i + 1]];
            for (xk, a) in x[fi..i].iter_mut().zip(row) {
                *xk -= a * xi;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense_to_csr(a: &[Vec<f64>]) -> CsrMatrix {
        let n = a.len();
        let mut row_ptr = vec![0];
        let mut col_idx = vec![];
        let mut vals = vec![];
        for row in a {
            for (j, &x) in row.iter().enumerate() {
                if x != 0.0 {
                    col_idx.push(j);
                    vals.push(x);
                }
            }
            row_ptr.push(col_idx.len());
        }
        CsrMatrix {
            n,
            row_ptr,
            col_idx,
            vals,
        }
    }

    #[test]
    fn solves_banded_system_and_counts_inertia() {
        // tridiagonal (-1, 2, -1) shifted: eigenvalues 2 - 2cos(k pi/(n+1)) - s
        let n = 30;
        let s = 0.7;
        let mut a = vec![vec![0.0; n]; n];
        for i in 0..n {
            a[i][i] = 2.0 - s;
            if i > 0 {
                a[i][i - 1] = -1.0;
                a[i - 1][i] = -1.0;
            }
        }
        let f = SkylineLdl::factor(&dense_to_csr(&a)).unwrap();
        let expected = (1..=n)
            .filter(|k| 2.0 - 2.0 * (*k as f64 * std::f64::consts::PI / (n as f64 + 1.0)).cos() < s)
            .count();
        assert_eq!(f.negative_pivots(), expected);
        let xs: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin()).collect();
        let mut b: Vec<f64> = (0..n).map(|i| (0..n).map(|j| a[i][j] * xs[j]).sum()).collect();
        f.solve_in_place(&mut b);
        for (u, v) in b.iter().zip(&xs) {
            assert!((u - v).abs() < 1e-10);
        }
    }

    #[test]
    fn variable_envelope() {
        // arrow-like matrix with a long first row
        let n = 12;
        let mut a = vec![vec![0.0; n]; n];
        for i in 0..n {
            a[i][i] = 10.0 + i as f64;
            a[i][0] = 1.0;
            a[0][i] = 1.0;
            if i >= 3 {
                a[i][i - 3] = 0.5;
                a[i - 3][i] = 0.5;
            }
        }
        a[0][0] = 10.0;
        let f = SkylineLdl::factor(&dense_to_csr(&a)).unwrap();
        assert_eq!(f.negative_pivots(), 0);
        let xs: Vec<f64> = (0..n).map(|i| 1.0 + i as f64).collect();
        let mut b: Vec<f64> = (0..n).map(|i| (0..n).map(|j| a[i][j] * xs[j]).sum()).collect();
        f.solve_in_place(&mut b);
        for (u, v) in b.iter().zip(&xs) {
            assert!((u - v).abs() < 1e-12);
        }
    }

    #[test]
    fn singular_pivot_is_reported() {
        let a = vec![vec![1.0, 1.0], vec![1.0, 1.0]];
        assert!(SkylineLdl::factor(&dense_to_csr(&a)).is_err());
    }
}
