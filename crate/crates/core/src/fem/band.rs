//! Banded storage and a banded complex LU factorization with partial pivoting.

use num_complex::Complex64;

/// Real symmetric matrix stored as its lower band.
#[derive(Debug, Clone, PartialEq)]
pub struct SymBandMatrix {
    n: usize,
    bandwidth: usize,
    // row i holds columns i - bandwidth ..= i, diagonal last
    data: Vec<f64>,
}

impl SymBandMatrix {
    pub fn zeros(n: usize, bandwidth: usize) -> Self {
        SymBandMatrix {
            n,
            bandwidth,
            data: vec![0.0; n * (bandwidth + 1)],
        }
    }

    /// Builds a symmetric band matrix from a dense, assumed symmetric, square matrix.
    pub fn from_dense(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        let bandwidth = (0..n)
            .flat_map(|i| (0..=i).map(move |j| (i, j)))
            .filter(|&(i, j)| rows[i][j] != 0.0)
            .map(|(i, j)| i - j)
            .max()
            .unwrap_or(0);
        let mut m = Self::zeros(n, bandwidth);
        for i in 0..n {
            for j in i.saturating_sub(bandwidth)..=i {
                m.add(i, j, rows[i][j]);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        let (r, c) = if i >= j { (i, j) } else { (j, i) };
        if r - c > self.bandwidth || r >= self.n {
            None
        } else {
            Some(r * (self.bandwidth + 1) + self.bandwidth - (r - c))
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.slot(i, j).map_or(0.0, |k| self.data[k])
    }

    /// Adds `v` to entry `(i, j)` (and by symmetry `(j, i)`).
    ///
    /// Panics if the entry lies outside the band.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let k = self
            .slot(i, j)
            .unwrap_or_else(|| panic!("entry ({i}, {j}) outside bandwidth {}", self.bandwidth));
        self.data[k] += v;
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j)).collect())
            .collect()
    }

    pub fn mul_vec<T>(&self, x: &[T]) -> Vec<T>
    where
        T: Copy + Default + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T>,
    {
        assert_eq!(x.len(), self.n);
        let mut y = vec![T::default(); self.n];
        let w = self.bandwidth + 1;
        for i in 0..self.n {
            let row = &self.data[i * w..(i + 1) * w];
            let j0 = i.saturating_sub(self.bandwidth);
            for j in j0..i {
                let a = row[self.bandwidth - (i - j)];
                if a != 0.0 {
                    y[i] = y[i] + x[j] * a;
                    y[j] = y[j] + x[i] * a;
                }
            }
            y[i] = y[i] + x[i] * row[self.bandwidth];
        }
        y
    }

    /// `|A| x` for a non-negative `x`; used for componentwise error bounds.
    pub fn abs_mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        let mut y = vec![0.0; self.n];
        let w = self.bandwidth + 1;
        for i in 0..self.n {
            let row = &self.data[i * w..(i + 1) * w];
            let j0 = i.saturating_sub(self.bandwidth);
            for j in j0..i {
                let a = row[self.bandwidth - (i - j)].abs();
                y[i] += a * x[j];
                y[j] += a * x[i];
            }
            y[i] += row[self.bandwidth].abs() * x[i];
        }
        y
    }
}

/// LU factors of a general complex band matrix with `kl = ku = bandwidth`.
///
/// Row interchanges are applied column by column as in LAPACK `zgbtrf`, so the
/// upper factor grows to `2·bandwidth` superdiagonals.
#[derive(Debug, Clone)]
pub struct ComplexBandLu {
    n: usize,
    kl: usize,
    width: usize,
    data: Vec<Complex64>,
    pivots: Vec<usize>,
}

/// Raised when a pivot vanishes; carries the failing column.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SingularPivot(pub usize);

impl ComplexBandLu {
    /// Factors the complex symmetric band matrix whose `(i, j)` entry (for `j ≤ i`,
    /// `i - j ≤ bandwidth`) is given by `entry`.
    pub fn factor_symmetric<F>(n: usize, bandwidth: usize, entry: F) -> Result<Self, SingularPivot>
    where
        F: Fn(usize, usize) -> Complex64,
    {
        let kl = bandwidth;
        let width = 3 * kl + 1;
        let mut data = vec![Complex64::new(0.0, 0.0); n * width];
        let mut scale: f64 = 0.0;
        for i in 0..n {
            for j in i.saturating_sub(kl)..=i {
                let v = entry(i, j);
                scale = scale.max(v.norm());
                data[i * width + (j + kl - i)] = v;
                if j != i {
                    data[j * width + (i + kl - j)] = v;
                }
            }
        }
        let mut lu = ComplexBandLu {
            n,
            kl,
            width,
            data,
            pivots: vec![0; n],
        };
        lu.eliminate(scale)?;
        Ok(lu)
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        i * self.width + (j + self.kl - i)
    }

    fn eliminate(&mut self, scale: f64) -> Result<(), SingularPivot> {
        let (n, kl) = (self.n, self.kl);
        let tiny = scale * f64::EPSILON * 1e-3;
        for k in 0..n {
            let last_row = (k + kl).min(n - 1);
            let last_col = (k + 2 * kl).min(n - 1);
            let mut p = k;
            let mut best = self.data[self.idx(k, k)].l1_norm();
            for i in k + 1..=last_row {
                let v = self.data[self.idx(i, k)].l1_norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if !(best > tiny) {
                return Err(SingularPivot(k));
            }
            self.pivots[k] = p;
            if p != k {
                for j in k..=last_col {
                    let a = self.idx(k, j);
                    let b = self.idx(p, j);
                    self.data.swap(a, b);
                }
            }
            let inv = 1.0 / self.data[self.idx(k, k)];
            for i in k + 1..=last_row {
                let ik = self.idx(i, k);
                let l = self.data[ik] * inv;
                self.data[ik] = l;
                if l == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let krow = self.idx(k, k);
                let irow = self.idx(i, k);
                for off in 1..=(last_col - k) {
                    let u = self.data[krow + off];
                    self.data[irow + off] -= l * u;
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Solves `A x = b` in place.
    pub fn solve_in_place(&self, b: &mut [Complex64]) {
        let (n, kl) = (self.n, self.kl);
        assert_eq!(b.len(), n);
        for k in 0..n {
            let p = self.pivots[k];
            if p != k {
                b.swap(k, p);
            }
            let bk = b[k];
            if bk == Complex64::new(0.0, 0.0) {
                continue;
            }
            for i in k + 1..=(k + kl).min(n - 1) {
                b[i] -= self.data[self.idx(i, k)] * bk;
            }
        }
        for k in (0..n).rev() {
            let mut s = b[k];
            let row = self.idx(k, k);
            for off in 1..=((k + 2 * kl).min(n - 1) - k) {
                s -= self.data[row + off] * b[k + off];
            }
            b[k] = s / self.data[row];
        }
    }

    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn dense_mul(a: &[Vec<Complex64>], x: &[Complex64]) -> Vec<Complex64> {
        a.iter()
            .map(|row| row.iter().zip(x).map(|(a, x)| a * x).sum())
            .collect()
    }

    #[test]
    fn sym_band_roundtrip_and_matvec() {
        let dense = vec![
            vec![4.0, 1.0, 0.0, 0.0],
            vec![1.0, 5.0, 2.0, 0.0],
            vec![0.0, 2.0, 6.0, 3.0],
            vec![0.0, 0.0, 3.0, 7.0],
        ];
        let m = SymBandMatrix::from_dense(&dense);
        assert_eq!(m.bandwidth(), 1);
        assert_eq!(m.to_dense(), dense);
        let y = m.mul_vec(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(y, vec![6.0, 17.0, 34.0, 37.0]);
        assert_eq!(m.diagonal(), vec![4.0, 5.0, 6.0, 7.0]);
    }

    #[test]
    #[should_panic]
    fn add_outside_band_panics() {
        SymBandMatrix::zeros(4, 1).add(3, 0, 1.0);
    }

    #[test]
    fn zero_pivot_needs_interchange() {
        // leading entry zero: only solvable with pivoting
        let a = [[c(0.0, 0.0), c(1.0, 1.0)], [c(1.0, 1.0), c(2.0, 0.0)]];
        let lu = ComplexBandLu::factor_symmetric(2, 1, |i, j| a[i][j]).unwrap();
        let x = lu.solve(&[c(1.0, 0.0), c(0.0, 1.0)]);
        let dense: Vec<Vec<_>> = a.iter().map(|r| r.to_vec()).collect();
        let r = dense_mul(&dense, &x);
        assert!((r[0] - c(1.0, 0.0)).norm() < 1e-14);
        assert!((r[1] - c(0.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn singular_detected() {
        let err = ComplexBandLu::factor_symmetric(2, 1, |_, _| c(1.0, 0.0)).unwrap_err();
        assert_eq!(err, SingularPivot(1));
    }

    proptest! {
        #[test]
        fn solves_random_band_systems(
            n in 1usize..25,
            bw in 0usize..5,
            seed in proptest::collection::vec(-1.0f64..1.0, 600),
        ) {
            let bw = bw.min(n.saturating_sub(1));
            let mut dense = vec![vec![c(0.0, 0.0); n]; n];
            let mut k = 0;
            for i in 0..n {
                for j in i.saturating_sub(bw)..=i {
                    let mut v = c(seed[k % 600], seed[(k + 7) % 600]);
                    k += 2;
                    if i == j { v += c(0.5, 0.0); }
                    dense[i][j] = v;
                    dense[j][i] = v;
                }
            }
            let lu = match ComplexBandLu::factor_symmetric(n, bw, |i, j| dense[i][j]) {
                Ok(lu) => lu,
                Err(_) => return Ok(()),
            };
            let b: Vec<Complex64> = (0..n).map(|i| c(i as f64 + 1.0, -(i as f64))).collect();
            let x = lu.solve(&b);
            let r = dense_mul(&dense, &x);
            let norm_b: f64 = b.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            let norm_x: f64 = x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            let res: f64 = r.iter().zip(&b).map(|(r, b)| (r - b).norm_sqr()).sum::<f64>().sqrt();
            // backward-stable: residual relative to |A||x|
            prop_assert!(res <= 1e-11 * (norm_b + norm_x * (2 * bw + 1) as f64));
        }
    }
}
