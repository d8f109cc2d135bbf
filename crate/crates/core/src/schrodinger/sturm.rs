//! Symmetric tridiagonal matrices and their eigenvalues by Sturm-sequence bisection.

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};

/// Absolute width at which bisection stops.
pub const BISECTION_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    diag: Vec<f64>,
    off: Vec<f64>,
}

impl Tridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        if diag.is_empty() {
            return Err(invalid("diag", "matrix must have dimension at least 1"));
        }
        if off.len() + 1 != diag.len() {
            return Err(invalid(
                "off",
                format!("expected {} off-diagonal entries, got {}", diag.len() - 1, off.len()),
            ));
        }
        if diag.iter().chain(off.iter()).any(|v| !v.is_finite()) {
            return Err(Error::GridCondition("matrix has non-finite entries".into()));
        }
        Ok(Tridiagonal { diag, off })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn off(&self) -> &[f64] {
        &self.off
    }

    /// Number of eigenvalues strictly below `lambda`, from the signs of the
    /// pivots of `T - lambda I = L D L^T`.
    pub fn count_below(&self, lambda: f64) -> usize {
        let mut count = 0;
        let mut q = self.diag[0] - lambda;
        for i in 0..self.diag.len() {
            if i > 0 {
                let e = self.off[i - 1];
                q = self.diag[i] - lambda - e * e / q;
            }
            if q == 0.0 {
                q = -f64::MIN_POSITIVE;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Interval containing the whole spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.diag.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let left = if i > 0 { self.off[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - left - right);
            hi = hi.max(self.diag[i] + left + right);
        }
        (lo, hi)
    }

    /// The `k`-th eigenvalue (0-based, ascending).
    pub fn kth_eigenvalue(&self, k: usize) -> Result<f64> {
        if k >= self.dim() {
            return Err(Error::TooManyEigenvalues {
                requested: k + 1,
                dimension: self.dim(),
            });
        }
        let (mut lo, mut hi) = self.gershgorin();
        let pad = BISECTION_TOLERANCE.max(1e-14 * (lo.abs() + hi.abs()));
        lo -= pad;
        hi += pad;
        while hi - lo > BISECTION_TOLERANCE {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// The `k` lowest eigenvalues, ascending.
    pub fn lowest(&self, k: usize) -> Result<Vec<f64>> {
        if k == 0 {
            return Err(invalid("k", "must be at least 1"));
        }
        if k > self.dim() {
            return Err(Error::TooManyEigenvalues {
                requested: k,
                dimension: self.dim(),
            });
        }
        (0..k).into_par_iter().map(|i| self.kth_eigenvalue(i)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_matrix() {
        let t = Tridiagonal::new(vec![3.0, -1.0], vec![0.0]).unwrap();
        let ev = t.lowest(2).unwrap();
        assert!((ev[0] + 1.0).abs() < 1e-12 && (ev[1] - 3.0).abs() < 1e-12);
        assert!(matches!(t.lowest(3), Err(Error::TooManyEigenvalues { .. })));
        assert!(t.lowest(0).is_err());
    }

    #[test]
    fn discrete_laplacian_closed_form() {
        // tridiag(-1, 2, -1) has eigenvalues 2 - 2 cos(k pi/(n+1))
        let n = 50;
        let t = Tridiagonal::new(vec![2.0; n], vec![-1.0; n - 1]).unwrap();
        for (k, ev) in t.lowest(n).unwrap().iter().enumerate() {
            let exact = 2.0 - 2.0 * ((k + 1) as f64 * std::f64::consts::PI / (n + 1) as f64).cos();
            assert!((ev - exact).abs() < 1e-11);
        }
    }

    #[test]
    fn sturm_count_at_midpoints() {
        let n = 40;
        let diag: Vec<f64> = (0..n).map(|i| (i as f64 * 0.7).sin() * 3.0).collect();
        let off: Vec<f64> = (0..n - 1).map(|i| 0.5 + (i as f64).cos()).collect();
        let t = Tridiagonal::new(diag, off).unwrap();
        let ev = t.lowest(n).unwrap();
        for w in ev.windows(2) {
            assert!(w[1] >= w[0]);
        }
        for k in 0..n - 1 {
            if ev[k + 1] - ev[k] > 1e-9 {
                assert_eq!(t.count_below(0.5 * (ev[k] + ev[k + 1])), k + 1);
            }
        }
    }

    #[test]
    fn flat_oscillator_ladder() {
        // -f''/2 + alpha^2 x^2 f/2 on [-12, 12] with Dirichlet walls
        let alpha = 1.3;
        let n = 48_000;
        let length = 24.0;
        let h = length / (n + 1) as f64;
        let diag: Vec<f64> = (0..n)
            .map(|i| {
                let x = -12.0 + (i + 1) as f64 * h;
                1.0 / (h * h) + 0.5 * alpha * alpha * x * x
            })
            .collect();
        let off = vec![-0.5 / (h * h); n - 1];
        let t = Tridiagonal::new(diag, off).unwrap();
        for (k, ev) in t.lowest(4).unwrap().iter().enumerate() {
            let exact = alpha * (k as f64 + 0.5);
            assert!((ev - exact).abs() < 1e-6, "{k} {ev} {exact}");
        }
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(Tridiagonal::new(vec![], vec![]).is_err());
        assert!(Tridiagonal::new(vec![1.0, 2.0], vec![]).is_err());
        assert!(matches!(
            Tridiagonal::new(vec![1.0, f64::NAN], vec![0.0]),
            Err(Error::GridCondition(_))
        ));
    }
}
