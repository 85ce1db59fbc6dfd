//! Semicircle law, logarithmic potentials, the largest-particle rate function
//! and the empirical-measure energy functional.
//!
//! The semicircle density is `σ(x) = √(4 − x²)/(2π)` on `[−2, 2]`.

pub mod quadrature;

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

pub use quadrature::{integrate, QuadEstimate, QuadratureSpec};

use crate::measures::DiscreteMeasure;
use crate::{Error, Extended, Result};

pub fn semicircle_pdf(x: f64) -> f64 {
    if x.abs() >= 2.0 {
        0.0
    } else {
        (4.0 - x * x).sqrt() / (2.0 * PI)
    }
}

pub fn semicircle_cdf(x: f64) -> f64 {
    if x <= -2.0 {
        0.0
    } else if x >= 2.0 {
        1.0
    } else {
        let v = 0.5 + x * (4.0 - x * x).sqrt() / (4.0 * PI) + (x / 2.0).asin() / PI;
        v.clamp(0.0, 1.0)
    }
}

/// `∫_{−∞}^x F_σ(t) dt`, the antiderivative of the semicircle CDF.
///
/// Zero below −2 and `2 + (x − 2)` above 2.
pub fn semicircle_cdf_integral(x: f64) -> f64 {
    if x <= -2.0 {
        0.0
    } else if x >= 2.0 {
        x
    } else {
        let r = (4.0 - x * x).sqrt();
        x / 2.0 - r * r * r / (12.0 * PI) + (x * (x / 2.0).asin() + r) / PI
    }
}

/// Inverse of [`semicircle_cdf`] by monotone bisection, for `p ∈ [0, 1]`.
pub fn semicircle_quantile(p: f64) -> f64 {
    if p <= 0.0 {
        return -2.0;
    }
    if p >= 1.0 {
        return 2.0;
    }
    let (mut lo, mut hi) = (-2.0f64, 2.0f64);
    while hi - lo > 1e-15 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if semicircle_cdf(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Closed form of `∫ log|x − y| dσ(y)`.
pub fn log_potential_semicircle(x: f64) -> f64 {
    let inner = x * x / 4.0 - 0.5;
    let ax = x.abs();
    if ax <= 2.0 {
        inner
    } else {
        let r = (x * x - 4.0).sqrt();
        inner - (ax * r / 4.0 - ((ax + r) / 2.0).ln())
    }
}

/// `∫ log|x − y| dσ(y)` by adaptive quadrature after the substitution
/// `y = 2 sin θ`, which removes the square-root endpoint behaviour. The log
/// singularity at `θ = asin(x/2)` is placed on a breakpoint when
/// `spec.singularity_split` is set.
pub fn log_potential_semicircle_quadrature(x: f64, spec: &QuadratureSpec) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::invalid("x", "must be finite"));
    }
    let integrand = |theta: f64| {
        let c = theta.cos();
        let d = (x - 2.0 * theta.sin()).abs();
        if d == 0.0 {
            0.0
        } else {
            d.ln() * (2.0 / PI) * c * c
        }
    };
    let mut breaks = vec![-FRAC_PI_2, FRAC_PI_2];
    if spec.singularity_split && x.abs() < 2.0 {
        breaks.insert(1, (x / 2.0).asin());
    }
    integrate(integrand, &breaks, spec).map(|r| r.value)
}

/// The measure a potential is taken against.
#[derive(Debug, Clone, Copy)]
pub enum Potential<'a> {
    Semicircle,
    Discrete(&'a DiscreteMeasure),
}

impl Potential<'_> {
    /// `∫ log|z − y| dμ(y)`; `NegInf` when `z` sits on an atom.
    pub fn log_potential(&self, z: f64) -> Extended {
        match self {
            Potential::Semicircle => Extended::Finite(log_potential_semicircle(z)),
            Potential::Discrete(mu) => {
                let atoms = mu.atoms();
                let mut acc = 0.0;
                for &y in atoms {
                    let d = (z - y).abs();
                    if d == 0.0 {
                        return Extended::NegInf;
                    }
                    acc += d.ln();
                }
                Extended::Finite(acc / atoms.len() as f64)
            }
        }
    }
}

/// `φ(z, μ) = ∫ log|z − y| dμ(y) − z²/4`.
pub fn phi(z: f64, mu: Potential<'_>) -> Extended {
    quadratic_shift(mu.log_potential(z), z * z / 4.0)
}

/// `φₙ(z, μ) = ∫ log|z − y| dμ(y) − (n/(n−1)) z²/4`, for n ≥ 2.
pub fn phi_n(z: f64, mu: Potential<'_>, n: usize) -> Result<Extended> {
    if n < 2 {
        return Err(Error::invalid("n", format!("need n >= 2, got {n}")));
    }
    let factor = n as f64 / (n as f64 - 1.0);
    Ok(quadratic_shift(mu.log_potential(z), factor * z * z / 4.0))
}

fn quadratic_shift(lp: Extended, q: f64) -> Extended {
    match lp {
        Extended::Finite(v) => Extended::Finite(v - q),
        other => other,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateMethod {
    ClosedForm,
    Quadrature,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateEvaluation {
    pub x: f64,
    pub j: Extended,
    pub phi: f64,
    pub method: RateMethod,
}

/// Rate function of the largest particle:
/// `J(x) = x√(x²−4)/4 − log((x + √(x²−4))/2)` for x ≥ 2, `+∞` below 2.
pub fn rate_j(x: f64) -> Extended {
    if x.is_nan() || x < 2.0 {
        return Extended::PosInf;
    }
    if x == 2.0 {
        return Extended::Finite(0.0);
    }
    let r = (x * x - 4.0).sqrt();
    // log((x + r)/2) = asinh-type form; ln_1p keeps accuracy near x = 2.
    let log_term = ((x - 2.0 + r) / 2.0).ln_1p();
    Extended::Finite(x * r / 4.0 - log_term)
}

/// Evaluate `J(x)` and `φ(x, σ)` by the chosen route. `J = −φ − 1/2` for
/// x ≥ 2 in both.
pub fn evaluate_rate(x: f64, method: RateMethod, spec: &QuadratureSpec) -> Result<RateEvaluation> {
    let lp = match method {
        RateMethod::ClosedForm => log_potential_semicircle(x),
        RateMethod::Quadrature => log_potential_semicircle_quadrature(x, spec)?,
    };
    let phi = lp - x * x / 4.0;
    let j = if x < 2.0 {
        Extended::PosInf
    } else {
        match method {
            RateMethod::ClosedForm => rate_j(x),
            RateMethod::Quadrature => Extended::Finite(-phi - 0.5),
        }
    };
    Ok(RateEvaluation { x, j, phi, method })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnergyVariant {
    /// Quadratic weight `(x² + y²)/2`, as displayed for the empirical-measure
    /// LDP. Gives 3/4 at the semicircle law.
    Unnormalized,
    /// Quadratic weight `(x² + y²)/8`, which vanishes at the semicircle law.
    Normalized,
}

/// Discrete surrogate of
/// `I(μ) = ∫∫ w·(x² + y²) − ½ log|x − y| dμ(x)dμ(y) − 3/8`
/// over off-diagonal atom pairs, normalised by `m(m − 1)`.
///
/// Returns `PosInf` when two atoms coincide.
pub fn energy_i(mu: &DiscreteMeasure, variant: EnergyVariant) -> Result<Extended> {
    let atoms = mu.atoms();
    let m = atoms.len();
    if m < 2 {
        return Err(Error::invalid("mu", format!("energy needs at least 2 atoms, got {m}")));
    }
    let weight = match variant {
        EnergyVariant::Unnormalized => 0.5,
        EnergyVariant::Normalized => 0.125,
    };
    // Over ordered off-diagonal pairs Σ (x² + y²) = 2(m − 1) Σ x².
    let sum_sq: f64 = atoms.iter().map(|x| x * x).sum();
    let quad = weight * 2.0 * (m as f64 - 1.0) * sum_sq;

    let mut log_sum = 0.0;
    for (i, &x) in atoms.iter().enumerate() {
        let mut row = 0.0;
        for &y in &atoms[i + 1..] {
            let d = y - x;
            if d == 0.0 {
                return Ok(Extended::PosInf);
            }
            row += d.abs().ln();
        }
        log_sum += row;
    }
    // ordered pairs count each unordered pair twice
    let pairs = m as f64 * (m as f64 - 1.0);
    Ok(Extended::Finite((quad - log_sum) / pairs - 0.375))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn pdf_values_and_mass() {
        assert!((semicircle_pdf(0.0) - 1.0 / PI).abs() < 1e-15);
        assert_eq!(semicircle_pdf(2.0), 0.0);
        assert_eq!(semicircle_pdf(-2.0), 0.0);
        assert_eq!(semicircle_pdf(3.0), 0.0);
        let mass = integrate(semicircle_pdf, &[-2.0, 2.0], &q()).unwrap();
        assert!((mass.value - 1.0).abs() < 1e-10, "{mass:?}");
    }

    #[test]
    fn cdf_values() {
        assert!((semicircle_cdf(0.0) - 0.5).abs() < 1e-15);
        assert_eq!(semicircle_cdf(2.0), 1.0);
        assert_eq!(semicircle_cdf(-2.5), 0.0);
        let quad = integrate(semicircle_pdf, &[-2.0, 1.0], &q()).unwrap().value;
        assert!((semicircle_cdf(1.0) - quad).abs() < 1e-10);
    }

    #[test]
    fn cdf_integral_matches_quadrature() {
        for &x in &[-1.5f64, 0.0, 0.7, 1.99, 2.0, 3.0] {
            let lo = -2.0;
            let hi = x.min(2.0);
            let mut v = integrate(semicircle_cdf, &[lo, hi], &q()).unwrap().value;
            if x > 2.0 {
                v += x - 2.0;
            }
            assert!((semicircle_cdf_integral(x) - v).abs() < 1e-10, "x={x}");
        }
    }

    #[test]
    fn quantile_inverts_cdf() {
        for &p in &[1e-6, 0.1, 0.5, 0.77, 0.999] {
            assert!((semicircle_cdf(semicircle_quantile(p)) - p).abs() < 1e-12);
        }
        assert_eq!(semicircle_quantile(0.0), -2.0);
        assert_eq!(semicircle_quantile(1.0), 2.0);
    }

    #[test]
    fn log_potential_special_points() {
        for &(x, expected) in &[(0.0, -0.5), (2.0, 0.5)] {
            let quad = log_potential_semicircle_quadrature(x, &q()).unwrap();
            assert!((quad - expected).abs() < 1e-8, "x={x}: {quad}");
            assert!((log_potential_semicircle(x) - expected).abs() < 1e-15);
        }
        let quad = log_potential_semicircle_quadrature(10.0, &q()).unwrap();
        assert!((log_potential_semicircle(10.0) - quad).abs() < 1e-8);
    }

    #[test]
    fn closed_form_matches_quadrature_on_grid() {
        let mut checked = 0;
        for i in 0..50 {
            let x = -5.0 + 10.0 * (i as f64 + 0.5) / 50.0;
            if (x.abs() - 2.0).abs() < 1e-3 {
                continue;
            }
            let quad = log_potential_semicircle_quadrature(x, &q()).unwrap();
            assert!((log_potential_semicircle(x) - quad).abs() <= 1e-8, "x={x}");
            checked += 1;
        }
        assert_eq!(checked, 50);
    }

    #[test]
    fn phi_on_discrete_and_semicircle() {
        let mu = DiscreteMeasure::new(vec![-1.0, 1.0]).unwrap();
        let v = phi(3.0, Potential::Discrete(&mu)).unwrap_finite();
        assert!((v - (1.5 * 2f64.ln() - 2.25)).abs() < 1e-14);
        assert_eq!(phi(1.0, Potential::Discrete(&mu)), Extended::NegInf);
        let s = phi(2.0, Potential::Semicircle).unwrap_finite();
        assert!((s + 0.5).abs() < 1e-15);
    }

    #[test]
    fn phi_n_below_phi_with_exact_gap() {
        let mu = DiscreteMeasure::new(vec![-0.3, 0.4, 1.1]).unwrap();
        let m_bound = 5.0f64;
        for &n in &[10usize, 100, 1000] {
            for i in 0..=100 {
                let z = -m_bound + 2.0 * m_bound * i as f64 / 100.0;
                for pot in [Potential::Semicircle, Potential::Discrete(&mu)] {
                    let (Extended::Finite(a), Extended::Finite(b)) = (phi(z, pot), phi_n(z, pot, n).unwrap()) else {
                        continue;
                    };
                    assert!(b <= a);
                    // φ − φₙ = z²/(4(n−1)) exactly, so the uniform bound on
                    // [−M, M] is M²/(4(n−1)).
                    assert!(a - b <= m_bound * m_bound / (4.0 * (n as f64 - 1.0)) * (1.0 + 1e-12));
                    assert!((a - b - z * z / (4.0 * (n as f64 - 1.0))).abs() < 1e-12);
                }
            }
        }
        assert!(phi_n(1.0, Potential::Semicircle, 1).is_err());
    }

    #[test]
    fn m_squared_over_4n_bound_is_violated_at_the_edge() {
        // The sharper M²/(4n) bound fails at |z| = M since the exact gap is
        // M²/(4(n−1)); it holds once |z| ≤ M√((n−1)/n).
        let (m, n) = (5.0f64, 10usize);
        let gap = |z: f64| {
            phi(z, Potential::Semicircle).unwrap_finite() - phi_n(z, Potential::Semicircle, n).unwrap().unwrap_finite()
        };
        assert!(gap(m) > m * m / (4.0 * n as f64));
        let inner = m * ((n as f64 - 1.0) / n as f64).sqrt();
        assert!(gap(inner) <= m * m / (4.0 * n as f64) * (1.0 + 1e-12));
    }

    #[test]
    fn phi_n_increases_toward_phi() {
        let vals: Vec<f64> = [10usize, 100, 10_000]
            .iter()
            .map(|&n| phi_n(1.5, Potential::Semicircle, n).unwrap().unwrap_finite())
            .collect();
        let limit = phi(1.5, Potential::Semicircle).unwrap_finite();
        assert!(vals[0] < vals[1] && vals[1] < vals[2] && vals[2] < limit);
    }

    #[test]
    fn rate_function_values() {
        assert_eq!(rate_j(2.0), Extended::Finite(0.0));
        assert_eq!(rate_j(1.9), Extended::PosInf);
        // 3√5/4 − log((3+√5)/2), mpmath
        assert!((rate_j(3.0).unwrap_finite() - 0.71462733300563537731).abs() < 1e-14);
        assert!((rate_j(2.5).unwrap_finite() - 0.24435281944005469058).abs() < 1e-14);
        let quad = evaluate_rate(3.0, RateMethod::Quadrature, &q()).unwrap();
        assert!((quad.j.unwrap_finite() - 0.71462733300563537731).abs() < 1e-8);
        let closed = evaluate_rate(3.0, RateMethod::ClosedForm, &q()).unwrap();
        assert!((closed.j.unwrap_finite() + closed.phi + 0.5).abs() < 1e-14);
        assert_eq!(evaluate_rate(1.0, RateMethod::ClosedForm, &q()).unwrap().j, Extended::PosInf);
    }

    #[test]
    fn rate_function_increasing_and_phi_decreasing() {
        let grid: Vec<f64> = (0..=160).map(|i| 2.0 + i as f64 * 0.05).collect();
        let js: Vec<f64> = grid.iter().map(|&x| rate_j(x).unwrap_finite()).collect();
        assert!(js.iter().all(|&j| j >= 0.0));
        assert!(js.windows(2).all(|w| w[0] < w[1]));
        let phis: Vec<f64> = grid.iter().map(|&x| phi(x, Potential::Semicircle).unwrap_finite()).collect();
        assert!(phis.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn energy_two_atoms() {
        let mu = DiscreteMeasure::new(vec![-1.0, 1.0]).unwrap();
        let v = energy_i(&mu, EnergyVariant::Normalized).unwrap().unwrap_finite();
        assert!((v - (0.25 - 0.5 * 2f64.ln() - 0.375)).abs() < 1e-14);
        assert!((v + 0.4715735902799726).abs() < 1e-12);
        let p = energy_i(&mu, EnergyVariant::Unnormalized).unwrap().unwrap_finite();
        assert!((p - (1.0 - 0.5 * 2f64.ln() - 0.375)).abs() < 1e-14);
    }

    #[test]
    fn energy_errors_and_coincident_atoms() {
        let one = DiscreteMeasure::new(vec![0.0]).unwrap();
        assert!(energy_i(&one, EnergyVariant::Normalized).is_err());
        let dup = DiscreteMeasure::new(vec![0.5, 0.5, 1.0]).unwrap();
        assert_eq!(energy_i(&dup, EnergyVariant::Unnormalized).unwrap(), Extended::PosInf);
    }

    #[test]
    fn energy_at_semicircle_quantiles() {
        let mu = DiscreteMeasure::semicircle_quantiles(2000);
        let norm = energy_i(&mu, EnergyVariant::Normalized).unwrap().unwrap_finite();
        let unnormalized = energy_i(&mu, EnergyVariant::Unnormalized).unwrap().unwrap_finite();
        assert!(norm.abs() < 5e-3, "normalized {norm}");
        assert!((unnormalized - 0.75).abs() < 5e-3, "unnormalized {unnormalized}");
    }

    #[test]
    fn semicircle_log_energy_and_second_moment_by_quadrature() {
        // ∫x²dσ = 1 and ∫∫ log|x−y| dσ dσ = ∫ (x²/4 − 1/2) dσ(x) = −1/4; the
        // latter is integrated with the quadrature potential, not the closed form.
        let spec = q();
        let m2 = integrate(|x| x * x * semicircle_pdf(x), &[-2.0, 2.0], &spec).unwrap().value;
        assert!((m2 - 1.0).abs() < 1e-10);
        let loose = QuadratureSpec {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            ..spec
        };
        let outer = integrate(
            |theta: f64| {
                let x = 2.0 * theta.sin();
                let c = theta.cos();
                log_potential_semicircle_quadrature(x, &spec).unwrap() * (2.0 / PI) * c * c
            },
            &[-FRAC_PI_2, FRAC_PI_2],
            &loose,
        )
        .unwrap()
        .value;
        assert!((outer + 0.25).abs() < 1e-8, "{outer}");
    }
}
