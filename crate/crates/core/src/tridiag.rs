//! Eigenvalues of the truncated Jacobi matrix by Sturm-sequence bisection.

use crate::lattice::SteplikeLattice;

/// Symmetric tridiagonal matrix with diagonal `d` and off-diagonal `e` (`e.len() == d.len() - 1`).
#[derive(Clone, Debug)]
pub struct SymTridiag {
    pub d: Vec<f64>,
    pub e: Vec<f64>,
}

impl SymTridiag {
    /// Truncation of the Jacobi operator to the lattice window (Dirichlet ends).
    pub fn from_lattice(lat: &SteplikeLattice) -> Self {
        let d = lat.b.clone();
        let e = lat.a[..lat.len() - 1].to_vec();
        Self { d, e }
    }

    pub fn dim(&self) -> usize {
        self.d.len()
    }

    /// Number of eigenvalues strictly below `x`.
    pub fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = 1.0f64;
        for i in 0..self.d.len() {
            let off = if i == 0 { 0.0 } else { self.e[i - 1] * self.e[i - 1] };
            q = self.d[i] - x - if i == 0 { 0.0 } else { off / q };
            if q == 0.0 {
                q = -f64::EPSILON * (self.d[i].abs() + x.abs()).max(1e-300);
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Gershgorin enclosure of the spectrum.
    pub fn bounds(&self) -> (f64, f64) {
        let n = self.d.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.e[i - 1].abs() } else { 0.0 }
                + if i + 1 < n { self.e[i].abs() } else { 0.0 };
            lo = lo.min(self.d[i] - r);
            hi = hi.max(self.d[i] + r);
        }
        (lo, hi)
    }

    /// The k-th smallest eigenvalue (k from 0).
    pub fn kth_eigenvalue(&self, k: usize) -> f64 {
        let (mut lo, mut hi) = self.bounds();
        lo -= 1e-12;
        hi += 1e-12;
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
        }
        0.5 * (lo + hi)
    }

    /// All eigenvalues in the open interval (lo, hi), ascending.
    pub fn eigenvalues_in(&self, lo: f64, hi: f64) -> Vec<f64> {
        let first = self.count_below(lo);
        let last = self.count_below(hi);
        (first..last).map(|k| self.kth_eigenvalue(k)).collect()
    }
}
