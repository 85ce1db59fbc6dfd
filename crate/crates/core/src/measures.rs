//! Empirical spectral measures and their distance to the semicircle law.

use crate::analytic::{integrate, semicircle_cdf, semicircle_cdf_integral, semicircle_quantile, QuadratureSpec};
use crate::eig::SpectrumResult;
use crate::{Error, Result};

/// Equal-weight atoms, kept sorted.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    atoms: Vec<f64>,
}

impl DiscreteMeasure {
    pub fn new(mut atoms: Vec<f64>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::invalid("atoms", "a measure needs at least one atom"));
        }
        if atoms.iter().any(|a| !a.is_finite()) {
            return Err(Error::invalid("atoms", "atoms must be finite"));
        }
        atoms.sort_by(f64::total_cmp);
        Ok(DiscreteMeasure { atoms })
    }

    pub fn from_spectrum(spec: &SpectrumResult) -> Self {
        Self::new(spec.eigenvalues.clone()).expect("spectra are finite and nonempty")
    }

    /// Midpoint quantiles `F_σ⁻¹((j − 1/2)/m)`, j = 1..m.
    pub fn semicircle_quantiles(m: usize) -> Self {
        assert!(m >= 1);
        let atoms = (0..m)
            .map(|j| semicircle_quantile((j as f64 + 0.5) / m as f64))
            .collect();
        DiscreteMeasure { atoms }
    }

    pub fn atoms(&self) -> &[f64] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn moment(&self, k: u32) -> f64 {
        self.atoms.iter().map(|a| a.powi(k as i32)).sum::<f64>() / self.len() as f64
    }

    pub fn shifted(&self, delta: f64) -> Self {
        DiscreteMeasure {
            atoms: self.atoms.iter().map(|a| a + delta).collect(),
        }
    }

    /// One CSV row: the sorted atoms, comma separated, 17 significant digits.
    pub fn to_csv_row(&self) -> String {
        self.atoms
            .iter()
            .map(|a| format!("{a:.16e}"))
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// `∫ |c − F_σ(x)| dx` over `[a, b]` with `F_σ` integrated in closed form.
/// The integrand changes sign at most once, at `F_σ⁻¹(c)`.
fn cell_gap(a: f64, b: f64, c: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let signed = |lo: f64, hi: f64| c * (hi - lo) - (semicircle_cdf_integral(hi) - semicircle_cdf_integral(lo));
    let crossing = if c <= 0.0 {
        f64::NEG_INFINITY
    } else if c >= 1.0 {
        f64::INFINITY
    } else {
        semicircle_quantile(c)
    };
    let v = if crossing > a && crossing < b {
        // F < c left of the crossing, F > c right of it.
        signed(a, crossing) - signed(crossing, b)
    } else if crossing <= a {
        -signed(a, b)
    } else {
        signed(a, b)
    };
    if v.is_finite() && v >= -1e-12 * (b - a) {
        v.max(0.0)
    } else {
        integrate(|x| (c - semicircle_cdf(x)).abs(), &[a, b], &QuadratureSpec::default())
            .map(|r| r.value)
            .unwrap_or(v.abs())
    }
}

/// `W₁(μ, σ) = ∫ |F_μ − F_σ| dx`, exact up to rounding.
pub fn w1_to_semicircle(mu: &DiscreteMeasure) -> f64 {
    let atoms = mu.atoms();
    let m = atoms.len() as f64;
    let first = atoms[0];
    let last = atoms[atoms.len() - 1];
    // Left tail: F_μ = 0 below the first atom.
    let mut total = semicircle_cdf_integral(first);
    for (i, w) in atoms.windows(2).enumerate() {
        total += cell_gap(w[0], w[1], (i + 1) as f64 / m);
    }
    // Right tail: F_μ = 1 from the last atom on.
    if last < 2.0 {
        total += cell_gap(last, 2.0, 1.0);
    }
    total
}

/// Kolmogorov–Smirnov distance `sup |F_μ − F_σ|`, evaluated on both sides of
/// every atom.
pub fn ks_to_semicircle(mu: &DiscreteMeasure) -> f64 {
    let atoms = mu.atoms();
    let m = atoms.len() as f64;
    let mut best: f64 = 0.0;
    let mut i = 0;
    while i < atoms.len() {
        let mut j = i;
        while j + 1 < atoms.len() && atoms[j + 1] == atoms[i] {
            j += 1;
        }
        let f = semicircle_cdf(atoms[i]);
        let below = i as f64 / m;
        let at = (j + 1) as f64 / m;
        best = best.max((f - below).abs()).max((at - f).abs());
        i = j + 1;
    }
    best
}
