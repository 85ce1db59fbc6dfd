//! Partition functions of the Gaussian β-ensemble, kept in log space.
//!
//! The Selberg (Mehta) integral gives
//!
//! ```text
//! Z(n, α, β) = α^(−n/2 − βn(n−1)/4) · n! · (2π)^(n/2) · Πⱼ₌₁ⁿ Γ(jβ/2)/Γ(β/2)
//! ```
//!
//! Z over- or underflows long before n is interesting, so only `log Z` and
//! differences of it are ever formed.

mod gamma;

use std::f64::consts::{LN_2, PI};

use serde::Serialize;

use crate::model::RegimeSchedule;
use crate::{Error, Extended, Result};

pub use gamma::{chi_cdf, chi_cdf_from_log, log_gamma, reg_incomplete_gamma};
use gamma::log_gamma_unchecked;

fn ln_2pi() -> f64 {
    (2.0 * PI).ln()
}

fn check_positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("must be positive and finite, got {v}")))
    }
}

/// `log Z(n, α, β)`, n ≥ 1.
pub fn log_z(n: usize, alpha: f64, beta: f64) -> Result<f64> {
    if n < 1 {
        return Err(Error::invalid("n", "need n >= 1"));
    }
    check_positive("alpha", alpha)?;
    check_positive("beta", beta)?;
    let nf = n as f64;
    let lg_half_beta = log_gamma_unchecked(beta / 2.0);
    let gamma_sum: f64 = (1..=n)
        .map(|j| log_gamma_unchecked(j as f64 * beta / 2.0) - lg_half_beta)
        .sum();
    Ok((-nf / 2.0 - beta * nf * (nf - 1.0) / 4.0) * alpha.ln()
        + log_gamma_unchecked(nf + 1.0)
        + nf / 2.0 * ln_2pi()
        + gamma_sum)
}

/// `log Z(n−1, α, β) − log Z(n, α, β)` in cancellation-free form.
fn log_ratio_same_alpha(n: usize, alpha: f64, beta: f64) -> f64 {
    let nf = n as f64;
    -nf.ln() - 0.5 * ln_2pi() + log_gamma_unchecked(beta / 2.0) - log_gamma_unchecked(nf * beta / 2.0)
        + (0.5 + beta * (nf - 1.0) / 2.0) * alpha.ln()
}

/// `log Z(n−1, nβ/2, β) − log Z(n, nβ/2, β)`.
pub fn exact_log_ratio_shift(n: usize, beta: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::invalid("n", "need n >= 2"));
    }
    check_positive("beta", beta)?;
    Ok(log_ratio_same_alpha(n, n as f64 * beta / 2.0, beta))
}

/// Leading-order value of [`exact_log_ratio_shift`]: `nβ/2 − log 2π`.
pub fn asymptotic_log_ratio_shift(n: usize, beta: f64) -> f64 {
    n as f64 * beta / 2.0 - ln_2pi()
}

/// `log Z(n−1, α − β/4, β) − log Z(n, α, β)`, requiring α > β/4.
pub fn exact_log_ratio_perturbed(n: usize, alpha: f64, beta: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::invalid("n", "need n >= 2"));
    }
    check_positive("alpha", alpha)?;
    check_positive("beta", beta)?;
    if alpha <= beta / 4.0 {
        return Err(Error::invalid(
            "alpha",
            format!("alpha - beta/4 must be positive (alpha={alpha}, beta={beta})"),
        ));
    }
    let nf = n as f64;
    let exponent = -(nf - 1.0) / 2.0 - beta * (nf - 1.0) * (nf - 2.0) / 4.0;
    Ok(log_ratio_same_alpha(n, alpha, beta) + exponent * (-beta / (4.0 * alpha)).ln_1p())
}

/// Leading-order value of [`exact_log_ratio_perturbed`] at α = nβ/2:
/// `1/4 + 5nβ/8 − log 2π`.
pub fn asymptotic_log_ratio_perturbed(n: usize, beta: f64) -> f64 {
    0.25 + 5.0 * n as f64 * beta / 8.0 - ln_2pi()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RatioLemma {
    /// `Z(n−1, α, β)/Z(n, α, β)`.
    Shift,
    /// `Z(n−1, α − β/4, β)/Z(n, α, β)`.
    Perturbed,
}

impl RatioLemma {
    pub fn name(self) -> &'static str {
        match self {
            RatioLemma::Shift => "shift",
            RatioLemma::Perturbed => "perturbed",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioComparison {
    pub lemma: RatioLemma,
    pub n: usize,
    pub beta: f64,
    pub exact_log_ratio: f64,
    pub asymptotic_log_ratio: f64,
    /// exact − asymptotic
    pub gap: f64,
}

/// Exact vs leading-order log ratio at α = nβ/2.
pub fn compare_ratio(lemma: RatioLemma, n: usize, beta: f64) -> Result<RatioComparison> {
    let (exact, asymptotic) = match lemma {
        RatioLemma::Shift => (exact_log_ratio_shift(n, beta)?, asymptotic_log_ratio_shift(n, beta)),
        RatioLemma::Perturbed => (
            exact_log_ratio_perturbed(n, n as f64 * beta / 2.0, beta)?,
            asymptotic_log_ratio_perturbed(n, beta),
        ),
    };
    Ok(RatioComparison {
        lemma,
        n,
        beta,
        exact_log_ratio: exact,
        asymptotic_log_ratio: asymptotic,
        gap: exact - asymptotic,
    })
}

/// Both lemmas along a schedule: all shift rows, then all perturbed rows.
pub fn ratio_sweep(schedule: &RegimeSchedule, n_values: &[usize]) -> Result<Vec<RatioComparison>> {
    let mut rows = Vec::with_capacity(2 * n_values.len());
    for lemma in [RatioLemma::Shift, RatioLemma::Perturbed] {
        for &n in n_values {
            rows.push(compare_ratio(lemma, n, schedule.beta(n))?);
        }
    }
    Ok(rows)
}

/// Log-space slack in `|a + b|^β ≤ 2^β exp(β(a² + b²)/8)`:
/// `β log 2 + β(a² + b²)/8 − β log|a + b|`. Always ≥ 0; `PosInf` when
/// `a + b = 0`.
pub fn technical_gap(a: f64, b: f64, beta: f64) -> Result<Extended> {
    check_positive("beta", beta)?;
    let s = (a + b).abs();
    if s == 0.0 {
        return Ok(Extended::PosInf);
    }
    Ok(Extended::Finite(beta * (LN_2 + (a * a + b * b) / 8.0 - s.ln())))
}

/// Log of the tail bound
/// `P(|λ₁| ≥ t) ≤ 2^(nβ+3/2) α^(−3/2) t⁻¹ · Z(n−1, α−β/4, β)/Z(n, α, β) · exp(−αt²/4)`.
pub fn log_tail_bound(n: usize, alpha: f64, beta: f64, t: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::invalid("n", "need n >= 2"));
    }
    check_positive("t", t)?;
    let ratio = exact_log_ratio_perturbed(n, alpha, beta)?;
    Ok((n as f64 * beta + 1.5) * LN_2 - 1.5 * alpha.ln() - t.ln() + ratio - alpha * t * t / 4.0)
}

/// `(1/nβ) · log(n · bound(M))` at α = nβ/2: the union-bound estimate of
/// `(1/nβ) log P(λ_max > M)`.
pub fn tightness_surrogate(n: usize, beta: f64, m: f64) -> Result<f64> {
    let nb = n as f64 * beta;
    Ok(((n as f64).ln() + log_tail_bound(n, nb / 2.0, beta, m)?) / nb)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_particle_is_a_gaussian_integral() {
        for &(alpha, beta) in &[(1.0, 1.0), (5.0, 0.1), (0.3, 7.0)] {
            let want = 0.5 * (2.0 * PI / alpha).ln();
            assert!((log_z(1, alpha, beta).unwrap() - want).abs() < 1e-12);
        }
    }

    #[test]
    fn two_particles_closed_form() {
        // ∫∫ exp(−(x² + y²)) |x − y| dx dy = √(2π): rotate to u = (x−y)/√2.
        let want = (2.0 * PI).sqrt().ln();
        assert!((log_z(2, 2.0, 1.0).unwrap() - want).abs() < 1e-13);
    }

    #[test]
    fn gue_three_particles() {
        // β = 2, α = 1: (2π)^{3/2} · 1!·2!·3!
        let want = 1.5 * (2.0 * PI).ln() + 12f64.ln();
        assert!((log_z(3, 1.0, 2.0).unwrap() - want).abs() < 1e-12);
    }

    #[test]
    fn log_z_rejects_bad_input() {
        assert!(log_z(0, 1.0, 1.0).is_err());
        assert!(log_z(2, 0.0, 1.0).is_err());
        assert!(log_z(2, 1.0, -1.0).is_err());
    }

    #[test]
    fn log_z_decreasing_in_alpha() {
        for &(n, beta) in &[(2usize, 0.5), (10, 0.1), (100, 2.0)] {
            let vals: Vec<f64> = [0.1, 0.5, 1.0, 3.0, 50.0]
                .iter()
                .map(|&a| log_z(n, a, beta).unwrap())
                .collect();
            assert!(vals.windows(2).all(|w| w[1] < w[0]));
        }
    }

    #[test]
    fn reduced_ratios_match_naive_differences() {
        for n in [2usize, 3, 10, 50, 100] {
            for beta in [0.05, 0.2, 1.0] {
                let alpha = n as f64 * beta / 2.0;
                let naive = log_z(n - 1, alpha, beta).unwrap() - log_z(n, alpha, beta).unwrap();
                assert!((exact_log_ratio_shift(n, beta).unwrap() - naive).abs() < 1e-8, "n={n} beta={beta}");
            }
        }
        let (n, alpha, beta) = (50usize, 5.0, 0.2);
        let naive = log_z(n - 1, alpha - beta / 4.0, beta).unwrap() - log_z(n, alpha, beta).unwrap();
        assert!((exact_log_ratio_perturbed(n, alpha, beta).unwrap() - naive).abs() < 1e-8);
        assert!(exact_log_ratio_perturbed(10, 0.05, 0.2).is_err());
        assert!(exact_log_ratio_shift(1, 0.2).is_err());
    }

    #[test]
    fn gaps_shrink_along_inverse_log_squared_schedule() {
        let sched = RegimeSchedule::inverse_log_squared(1.0).unwrap();
        let ns = [1_000usize, 10_000, 100_000, 1_000_000];
        let rows = ratio_sweep(&sched, &ns).unwrap();
        assert_eq!(rows.len(), 8);
        for lemma_rows in rows.chunks(4) {
            let gaps: Vec<f64> = lemma_rows.iter().map(|r| r.gap.abs()).collect();
            assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
            assert!(gaps[3] <= 0.05, "{gaps:?}");
        }
    }

    #[test]
    fn technical_gap_examples() {
        assert_eq!(technical_gap(0.0, 0.0, 1.0).unwrap(), Extended::PosInf);
        let g = technical_gap(2.0, 2.0, 1.0).unwrap().unwrap_finite();
        assert!((g - (2.0 * 1f64.exp() / 4.0).ln()).abs() < 1e-14);
        assert!(g > 0.0);
        assert!(technical_gap(1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn technical_gap_nonnegative_on_random_triples() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..100_000 {
            let a = 3.0 * rng.sample::<f64, _>(rand_distr::StandardNormal);
            let b = 3.0 * rng.sample::<f64, _>(rand_distr::StandardNormal);
            let beta = 2.0 * rng.sample::<f64, _>(rand_distr::Open01);
            match technical_gap(a, b, beta).unwrap() {
                Extended::Finite(g) => assert!(g >= 0.0, "a={a} b={b} beta={beta}"),
                Extended::PosInf => {}
                Extended::NegInf => unreachable!(),
            }
        }
    }

    #[test]
    fn tail_bound_decreases_in_t() {
        let vals: Vec<f64> = [2.0, 4.0, 8.0]
            .iter()
            .map(|&t| log_tail_bound(50, 5.0, 0.2, t).unwrap())
            .collect();
        assert!(vals.windows(2).all(|w| w[1] < w[0]));
        assert!(log_tail_bound(50, 5.0, 0.2, 3.0).unwrap().is_finite());
        assert!(log_tail_bound(50, 0.04, 0.2, 3.0).is_err());
        assert!(log_tail_bound(50, 5.0, 0.2, 0.0).is_err());
    }

    #[test]
    fn tightness_surrogate_strictly_decreasing() {
        let vals: Vec<f64> = (3..=20)
            .map(|m| tightness_surrogate(10_000, 0.01, m as f64).unwrap())
            .collect();
        assert!(vals.windows(2).all(|w| w[1] < w[0]));
        // slope is −(M₂² − M₁²)/8 up to the log M/(nβ) term
        let d = vals[0] - vals[1];
        let want = (16.0 - 9.0) / 8.0;
        assert!((d - want).abs() < 0.1 * want);
    }
}
