//! Symmetric tridiagonal eigenvalues by Sturm-sequence bisection, eigenvectors by inverse
//! iteration.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiag {
    pub diag: Vec<f64>,
    /// Sub/super-diagonal, `off.len() == diag.len() - 1`.
    pub off: Vec<f64>,
}

impl SymTridiag {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        if diag.is_empty() || off.len() + 1 != diag.len() {
            return Err(Error::param(format!(
                "tridiagonal shape mismatch: {} diagonal vs {} off-diagonal entries",
                diag.len(),
                off.len()
            )));
        }
        Ok(Self { diag, off })
    }

    /// Reduces the pencil `(K, diag(m))` to the standard matrix `M^{-1/2} K M^{-1/2}`.
    pub fn from_pencil(k_diag: &[f64], k_off: &[f64], mass: &[f64]) -> Result<Self> {
        if mass.len() != k_diag.len() || mass.iter().any(|&m| !(m > 0.0)) {
            return Err(Error::param("mass must be positive and match the matrix size"));
        }
        let inv: Vec<f64> = mass.iter().map(|m| 1.0 / m.sqrt()).collect();
        let diag = k_diag.iter().zip(&inv).map(|(k, w)| k * w * w).collect();
        let off = k_off.iter().enumerate().map(|(i, e)| e * inv[i] * inv[i + 1]).collect();
        Self::new(diag, off)
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Number of eigenvalues strictly below `x` (negative pivots of `T - x I = L D L^T`).
    pub fn count_below(&self, x: f64) -> usize {
        let tiny = f64::MIN_POSITIVE.sqrt();
        let mut count = 0;
        let mut q = self.diag[0] - x;
        if q < 0.0 {
            count += 1;
        }
        for i in 1..self.diag.len() {
            let qs = if q.abs() < tiny { -tiny } else { q };
            q = self.diag[i] - x - self.off[i - 1] * self.off[i - 1] / qs;
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.diag.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.off[i - 1].abs() } else { 0.0 } + if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// `k`-th smallest eigenvalue (0-based).
    pub fn eigenvalue(&self, k: usize) -> f64 {
        let (mut lo, mut hi) = self.gershgorin();
        let pad = 1e-12 * (lo.abs().max(hi.abs()) + 1.0);
        lo -= pad;
        hi += pad;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 2.0 * f64::EPSILON * lo.abs().max(hi.abs()) {
                break;
            }
        }
        0.5 * (lo + hi)
    }

    /// The `k` lowest eigenvalues in ascending order (fewer if the matrix is smaller).
    pub fn lowest(&self, k: usize) -> Vec<f64> {
        (0..k.min(self.len())).map(|i| self.eigenvalue(i)).collect()
    }

    /// Eigenvalues below `x`, at most `k` of them.
    pub fn lowest_below(&self, k: usize, x: f64) -> Vec<f64> {
        let n = self.count_below(x).min(k);
        (0..n).map(|i| self.eigenvalue(i)).collect()
    }

    /// Unit eigenvector for an (accurate) eigenvalue `lambda` by inverse iteration.
    pub fn eigenvector(&self, lambda: f64) -> Vec<f64> {
        let n = self.len();
        let scale = self.gershgorin();
        let shift = lambda - 1e-10 * (scale.0.abs().max(scale.1.abs()) + 1.0);
        let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * ((i as f64) * 0.7).sin()).collect();
        normalize(&mut v);
        for _ in 0..4 {
            v = self.solve_shifted(shift, &v);
            normalize(&mut v);
        }
        v
    }

    /// Solves `(T - shift I) x = b` by Gaussian elimination with partial pivoting.
    fn solve_shifted(&self, shift: f64, b: &[f64]) -> Vec<f64> {
        let n = self.len();
        if n == 1 {
            let d = self.diag[0] - shift;
            return vec![b[0] / if d == 0.0 { f64::EPSILON } else { d }];
        }
        // Rows hold (sub, diag, sup, sup2) after pivoting.
        let mut dl: Vec<f64> = self.off.clone();
        let mut d: Vec<f64> = self.diag.iter().map(|x| x - shift).collect();
        let mut du: Vec<f64> = self.off.clone();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut x = b.to_vec();
        for i in 0..n - 1 {
            if d[i].abs() >= dl[i].abs() {
                let piv = if d[i] == 0.0 { f64::EPSILON } else { d[i] };
                let m = dl[i] / piv;
                d[i + 1] -= m * du[i];
                x[i + 1] -= m * x[i];
                dl[i] = 0.0;
            } else {
                let m = d[i] / dl[i];
                d[i] = dl[i];
                let tmp = d[i + 1];
                d[i + 1] = du[i] - m * tmp;
                du[i] = tmp;
                if i + 1 < n - 1 {
                    du2[i] = du[i + 1];
                    du[i + 1] *= -m;
                }
                x.swap(i, i + 1);
                x[i + 1] -= m * x[i];
            }
        }
        let last = if d[n - 1] == 0.0 { f64::EPSILON } else { d[n - 1] };
        x[n - 1] /= last;
        x[n - 2] = (x[n - 2] - du[n - 2] * x[n - 1]) / d[n - 2];
        for i in (0..n.saturating_sub(2)).rev() {
            x[i] = (x[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / d[i];
        }
        x
    }

    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * v[i];
                if i > 0 {
                    s += self.off[i - 1] * v[i - 1];
                }
                if i + 1 < n {
                    s += self.off[i] * v[i + 1];
                }
                s
            })
            .collect()
    }
}

fn normalize(v: &mut [f64]) {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn laplacian(n: usize) -> SymTridiag {
        SymTridiag::new(vec![2.0; n], vec![-1.0; n - 1]).unwrap()
    }

    #[test]
    fn discrete_laplacian_spectrum() {
        let n = 50;
        let t = laplacian(n);
        for k in 0..5 {
            let theta = (k + 1) as f64 * std::f64::consts::PI / (n + 1) as f64;
            let exact = 2.0 - 2.0 * theta.cos();
            assert!((t.eigenvalue(k) - exact).abs() < 1e-14);
        }
    }

    #[test]
    fn eigenvector_residual_is_small() {
        let t = SymTridiag::new(
            (0..40).map(|i| (i as f64 * 0.3).cos() + 3.0).collect(),
            (0..39).map(|i| 0.5 + 0.1 * (i as f64).sin()).collect(),
        )
        .unwrap();
        let lam = t.eigenvalue(2);
        let v = t.eigenvector(lam);
        let r: f64 = t.matvec(&v).iter().zip(&v).map(|(a, b)| (a - lam * b).powi(2)).sum::<f64>().sqrt();
        assert!(r < 1e-10, "{r}");
    }

    #[test]
    fn shape_mismatch_is_rejected() {
        assert!(SymTridiag::new(vec![1.0, 2.0], vec![]).is_err());
        assert!(SymTridiag::from_pencil(&[1.0], &[], &[0.0]).is_err());
    }

    proptest! {
        #[test]
        fn sturm_count_is_monotone_and_consistent(
            diag in proptest::collection::vec(-5.0f64..5.0, 2..30),
            seed in 0.0f64..1.0,
        ) {
            let n = diag.len();
            let off: Vec<f64> = (0..n - 1).map(|i| ((i as f64 + seed) * 1.3).sin()).collect();
            let t = SymTridiag::new(diag, off).unwrap();
            let eig = t.lowest(n);
            for w in eig.windows(2) {
                prop_assert!(w[0] <= w[1]);
            }
            let trace: f64 = t.diag.iter().sum();
            let sum: f64 = eig.iter().sum();
            prop_assert!((trace - sum).abs() < 1e-9 * (1.0 + trace.abs()));
            let (lo, hi) = t.gershgorin();
            prop_assert_eq!(t.count_below(lo - 1.0), 0);
            prop_assert_eq!(t.count_below(hi + 1.0), n);
        }
    }
}
