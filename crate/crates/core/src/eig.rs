//! Eigenvalues of symmetric tridiagonal matrices by Sturm-sequence bisection.
//!
//! Everything is built on [`sturm_count`], an O(n) count of the eigenvalues
//! below a shift. Extreme eigenvalues cost one bisection; the full spectrum
//! is obtained by recursive multisection of the Gershgorin interval, which is
//! deterministic and reproducible bit for bit.

use crate::sampler::TridiagonalMatrix;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult {
    /// Nondecreasing.
    pub eigenvalues: Vec<f64>,
    pub tol: f64,
    /// Number of Sturm counts performed.
    pub iterations: usize,
}

impl SpectrumResult {
    pub fn max(&self) -> f64 {
        *self.eigenvalues.last().expect("nonempty spectrum")
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }
}

/// Pivot floor for the shifted LDLᵀ recurrence at row i:
/// `ε · (1 + |aᵢ − x| + bᵢ₋₁²)`. Pivots smaller in magnitude are replaced by
/// `−floor` and counted as negative.
#[inline]
fn pivot_floor(shifted: f64, b2: f64) -> f64 {
    f64::EPSILON * (1.0 + shifted.abs() + b2)
}

/// Number of eigenvalues strictly less than `x`.
pub fn sturm_count(t: &TridiagonalMatrix, x: f64) -> usize {
    let a = t.diag();
    let b = t.offdiag();
    let mut count = 0;
    let shifted = a[0] - x;
    let mut d = shifted;
    let floor = pivot_floor(shifted, 0.0);
    if d.abs() < floor {
        d = -floor;
    }
    if d < 0.0 {
        count += 1;
    }
    for i in 1..a.len() {
        let b2 = b[i - 1] * b[i - 1];
        let shifted = a[i] - x;
        d = shifted - b2 / d;
        let floor = pivot_floor(shifted, b2);
        if d.abs() < floor {
            d = -floor;
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// Gershgorin interval `[min(aᵢ − rᵢ), max(aᵢ + rᵢ)]` containing the spectrum.
pub fn gershgorin(t: &TridiagonalMatrix) -> (f64, f64) {
    let a = t.diag();
    let b = t.offdiag();
    let n = a.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let left = if i > 0 { b[i - 1].abs() } else { 0.0 };
        let right = if i + 1 < n { b[i].abs() } else { 0.0 };
        let r = left + right;
        lo = lo.min(a[i] - r);
        hi = hi.max(a[i] + r);
    }
    (lo, hi)
}

/// `1e-10 · max(1, width of the Gershgorin interval)`.
pub fn default_tol(t: &TridiagonalMatrix) -> f64 {
    let (lo, hi) = gershgorin(t);
    1e-10 * (hi - lo).max(1.0)
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid("tol", format!("bisection tolerance must be positive, got {tol}")))
    }
}

/// A bracket `(lo, hi]` guaranteed to hold every eigenvalue, with
/// `sturm_count(lo) == 0` and `sturm_count(hi) == n`.
fn outer_bracket(t: &TridiagonalMatrix, tol: f64) -> (f64, f64) {
    let (lo, hi) = gershgorin(t);
    let pad = tol + f64::EPSILON * (1.0 + lo.abs().max(hi.abs())) * 4.0;
    (lo - pad, hi + pad)
}

/// Bisect for the k-th smallest eigenvalue (0-based).
fn kth_eigenvalue(t: &TridiagonalMatrix, k: usize, tol: f64) -> (f64, usize) {
    let (mut lo, mut hi) = outer_bracket(t, tol);
    let mut iterations = 0;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        iterations += 1;
        if sturm_count(t, mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (0.5 * (lo + hi), iterations)
}

/// Largest eigenvalue to within `tol`.
pub fn lambda_max(t: &TridiagonalMatrix, tol: f64) -> Result<f64> {
    check_tol(tol)?;
    Ok(kth_eigenvalue(t, t.n() - 1, tol).0)
}

/// Smallest eigenvalue to within `tol`.
pub fn lambda_min(t: &TridiagonalMatrix, tol: f64) -> Result<f64> {
    check_tol(tol)?;
    Ok(kth_eigenvalue(t, 0, tol).0)
}

const LANES: usize = 4;

/// [`sturm_count`] at `LANES` shifts in one sweep over the matrix. The
/// per-shift recurrences are independent, so their divisions overlap.
fn sturm_count_lanes(t: &TridiagonalMatrix, x: &[f64; LANES]) -> [usize; LANES] {
    let a = t.diag();
    let b = t.offdiag();
    let mut count = [0usize; LANES];
    let mut d = [0.0f64; LANES];
    for k in 0..LANES {
        let shifted = a[0] - x[k];
        let floor = pivot_floor(shifted, 0.0);
        d[k] = if shifted.abs() < floor { -floor } else { shifted };
        count[k] += (d[k] < 0.0) as usize;
    }
    for i in 1..a.len() {
        let b2 = b[i - 1] * b[i - 1];
        for k in 0..LANES {
            let shifted = a[i] - x[k];
            let v = shifted - b2 / d[k];
            let floor = pivot_floor(shifted, b2);
            d[k] = if v.abs() < floor { -floor } else { v };
            count[k] += (d[k] < 0.0) as usize;
        }
    }
    count
}

/// All eigenvalues, ascending, each within `tol` of a true eigenvalue.
///
/// The Gershgorin bracket is cut into `LANES + 1` equal slices per Sturm
/// sweep; slices holding eigenvalues are refined the same way until their
/// width drops to `tol`. Eigenvalues closer than `tol` share the midpoint of
/// their final slice.
pub fn full_spectrum(t: &TridiagonalMatrix, tol: f64) -> Result<SpectrumResult> {
    check_tol(tol)?;
    let n = t.n();
    let mut eigenvalues = vec![0.0; n];
    let (lo, hi) = outer_bracket(t, tol);
    let mut iterations = 0;
    // (lo, hi, count(lo), count(hi))
    let mut stack = vec![(lo, hi, 0usize, n)];
    while let Some((lo, hi, c_lo, c_hi)) = stack.pop() {
        if c_hi == c_lo {
            continue;
        }
        let width = hi - lo;
        let step = width / (LANES + 1) as f64;
        let mut points = [0.0; LANES];
        for (k, p) in points.iter_mut().enumerate() {
            *p = lo + step * (k + 1) as f64;
        }
        let mid = 0.5 * (lo + hi);
        if width <= tol || !(points[0] > lo && points[LANES - 1] < hi) || mid <= lo || mid >= hi {
            eigenvalues[c_lo..c_hi].fill(mid);
            continue;
        }
        iterations += LANES;
        let raw = sturm_count_lanes(t, &points);
        // Rounding can in principle break monotonicity; clamp into order.
        let mut edges = [(lo, c_lo); LANES + 2];
        let mut prev = c_lo;
        for k in 0..LANES {
            prev = raw[k].clamp(prev, c_hi);
            edges[k + 1] = (points[k], prev);
        }
        edges[LANES + 1] = (hi, c_hi);
        for w in edges.windows(2).rev() {
            if w[1].1 > w[0].1 {
                stack.push((w[0].0, w[1].0, w[0].1, w[1].1));
            }
        }
    }
    Ok(SpectrumResult {
        eigenvalues,
        tol,
        iterations,
    })
}
