//! Symmetric banded matrices: storage, products and an unpivoted `L D Lᵀ` factorisation
//! whose pivot signs give the inertia.

use crate::error::{Error, Result};

/// Lower band of a symmetric matrix, row-major: row `i` holds columns `i - b ..= i`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedSym {
    n: usize,
    b: usize,
    data: Vec<f64>,
}

impl BandedSym {
    pub fn zeros(n: usize, bandwidth: usize) -> Self {
        Self {
            n,
            b: bandwidth,
            data: vec![0.0; n * (bandwidth + 1)],
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Half-bandwidth `b`: `A[i][j] = 0` for `|i - j| > b`.
    pub fn bandwidth(&self) -> usize {
        self.b
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(j <= i && i - j <= self.b);
        i * (self.b + 1) + self.b - (i - j)
    }

    /// Entry `(i, j)` of the full symmetric matrix.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (r, c) = if i >= j { (i, j) } else { (j, i) };
        if r - c > self.b {
            0.0
        } else {
            self.data[self.idx(r, c)]
        }
    }

    /// Adds `v` to the symmetric pair `(i, j)`, `(j, i)`.
    pub fn add(&mut self, i: usize, j: usize, v: f64) -> Result<()> {
        let (r, c) = if i >= j { (i, j) } else { (j, i) };
        if r >= self.n || r - c > self.b {
            return Err(Error::Numerical(format!("entry ({i}, {j}) outside band {}", self.b)));
        }
        let k = self.idx(r, c);
        self.data[k] += v;
        Ok(())
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.data[self.idx(i, i)]).collect()
    }

    /// `D A D` for diagonal `d`.
    pub fn scale_symmetric(&mut self, d: &[f64]) {
        for i in 0..self.n {
            for j in i.saturating_sub(self.b)..=i {
                let k = self.idx(i, j);
                self.data[k] *= d[i] * d[j];
            }
        }
    }

    pub fn shift_diagonal(&mut self, sigma: f64) {
        for i in 0..self.n {
            let k = self.idx(i, i);
            self.data[k] -= sigma;
        }
    }

    /// `A - sigma diag(m)`.
    pub fn shift_by_mass(&mut self, sigma: f64, m: &[f64]) {
        for (i, mi) in m.iter().enumerate() {
            let k = self.idx(i, i);
            self.data[k] -= sigma * mi;
        }
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        y.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..self.n {
            let lo = i.saturating_sub(self.b);
            let row = &self.data[i * (self.b + 1) + self.b - (i - lo)..=i * (self.b + 1) + self.b];
            let mut acc = 0.0;
            for (off, &a) in row.iter().enumerate() {
                let j = lo + off;
                acc += a * x[j];
                if j != i {
                    y[j] += a * x[i];
                }
            }
            y[i] += acc;
        }
    }

    /// Smallest and largest Gershgorin endpoints.
    pub fn gershgorin(&self) -> (f64, f64) {
        let mut radius = vec![0.0; self.n];
        for i in 0..self.n {
            for j in i.saturating_sub(self.b)..i {
                let a = self.data[self.idx(i, j)].abs();
                radius[i] += a;
                radius[j] += a;
            }
        }
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..self.n {
            let d = self.data[self.idx(i, i)];
            lo = lo.min(d - radius[i]);
            hi = hi.max(d + radius[i]);
        }
        (lo, hi)
    }

    /// `A = L D Lᵀ` without pivoting. Fails only on an exactly zero pivot.
    pub fn ldlt(&self) -> Result<BandedLdlt> {
        self.clone().into_ldlt()
    }

    /// As [`BandedSym::ldlt`], reusing the storage.
    pub fn into_ldlt(self) -> Result<BandedLdlt> {
        let n = self.n;
        let b = self.b;
        let w = b + 1;
        let mut l = self.data;
        let mut d = vec![0.0; n];
        let mut tmp = vec![0.0; w];
        for i in 0..n {
            let lo = i.saturating_sub(b);
            let base_i = i * w + b - i;
            // tmp[k - lo] = L[i][k] d[k] for k < j, filled as j advances
            for j in lo..i {
                let base_j = j * w + b - j;
                let klo = lo.max(j.saturating_sub(b));
                let mut s = l[base_i + j];
                for k in klo..j {
                    s -= tmp[k - lo] * l[base_j + k];
                }
                let lij = s / d[j];
                tmp[j - lo] = lij * d[j];
                l[base_i + j] = lij;
            }
            let mut s = l[base_i + i];
            for k in lo..i {
                s -= tmp[k - lo] * l[base_i + k];
            }
            if s == 0.0 || !s.is_finite() {
                return Err(Error::Numerical(format!("zero or non-finite pivot at row {i}")));
            }
            d[i] = s;
        }
        Ok(BandedLdlt { n, b, l, d })
    }
}

/// Factor returned by [`BandedSym::ldlt`]; the unit diagonal of `L` is implicit.
#[derive(Debug, Clone)]
pub struct BandedLdlt {
    n: usize,
    b: usize,
    l: Vec<f64>,
    d: Vec<f64>,
}

impl BandedLdlt {
    /// Number of negative pivots, which by Sylvester's law equals the number of negative
    /// eigenvalues of the factored matrix.
    pub fn negative_count(&self) -> usize {
        self.d.iter().filter(|&&x| x < 0.0).count()
    }

    pub fn solve_in_place(&self, x: &mut [f64]) {
        let n = self.n;
        let b = self.b;
        let w = b + 1;
        for i in 0..n {
            let lo = i.saturating_sub(b);
            let base = i * w + b - i;
            let mut s = x[i];
            for k in lo..i {
                s -= self.l[base + k] * x[k];
            }
            x[i] = s;
        }
        for i in 0..n {
            x[i] /= self.d[i];
        }
        for i in (0..n).rev() {
            let lo = i.saturating_sub(b);
            let base = i * w + b - i;
            let xi = x[i];
            for k in lo..i {
                x[k] -= self.l[base + k] * xi;
            }
        }
    }
}
