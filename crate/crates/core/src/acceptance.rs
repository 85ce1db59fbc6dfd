//! The ten acceptance criteria, each with a fixed seed, its tolerances and a
//! wall-clock budget. Shared by the `acceptance` test target and `hitemp check`.
//!
//! Every oracle here is independent of the code path it checks: the 2-D
//! partition-function integral is computed by nested quadrature, and the
//! eigenvalue oracle finds characteristic-polynomial roots through Cauchy
//! interlacing instead of pivoted Sturm counts.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::analytic::quadrature::{integrate, QuadratureSpec};
use crate::analytic::{evaluate_rate, log_potential_semicircle, log_potential_semicircle_quadrature, rate_j, RateMethod};
use crate::eig::{full_spectrum, sturm_count};
use crate::experiments::csv::sweep_csv;
use crate::experiments::{
    run_convergence_check, run_esd_check, run_moment_check, run_tail_sweep, run_tailbound_check, ExperimentConfig,
};
use crate::model::RegimeSchedule;
use crate::partition::{log_z, ratio_sweep, technical_gap, RatioLemma};
use crate::sampler::{SeededStream, TridiagonalMatrix};
use crate::{Extended, Result};

#[derive(Debug, Clone, Serialize)]
pub struct CriterionOutcome {
    pub id: u8,
    pub title: &'static str,
    /// Numerical checks and the runtime budget both hold.
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub limit: Duration,
}

impl CriterionOutcome {
    pub fn line(&self) -> String {
        format!(
            "[{}] criterion {:>2} {:<38} {:>8.2}s / {:>5}s  {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.elapsed.as_secs_f64(),
            self.limit.as_secs(),
            self.detail
        )
    }
}

pub const CRITERIA: [(u8, &str, u64); 10] = [
    (1, "rate-function exactness", 1),
    (2, "partition-function correctness", 10),
    (3, "ratio asymptotics", 1),
    (4, "eigensolver oracle equivalence", 5),
    (5, "trace identity", 120),
    (6, "convergence in probability", 600),
    (7, "empirical rate of the largest particle", 1800),
    (8, "tail-bound validity", 300),
    (9, "spectral-measure convergence", 600),
    (10, "inequality and determinism suite", 60),
];

const SEED_BASE: u64 = 0xacce_97a0_0000;

/// Run criterion `id` (1 to 10) with `workers` threads for the Monte Carlo
/// campaigns. Returns `None` for an unknown id.
pub fn run_criterion(id: u8, workers: usize) -> Option<CriterionOutcome> {
    let &(id, title, limit) = CRITERIA.iter().find(|c| c.0 == id)?;
    let workers = workers.max(1);
    let seed = SEED_BASE + id as u64;
    let start = Instant::now();
    let result = match id {
        1 => rate_exactness(),
        2 => partition_correctness(),
        3 => ratio_asymptotics(),
        4 => eigensolver_oracle(seed),
        5 => trace_identity(seed, workers),
        6 => convergence(seed, workers),
        7 => empirical_rate(seed, workers),
        8 => tail_bound(seed, workers),
        9 => esd_convergence(seed, workers),
        _ => inequality_suite(seed, workers),
    };
    let elapsed = start.elapsed();
    let limit = Duration::from_secs(limit);
    let (ok, mut detail) = result.unwrap_or_else(|e| (false, format!("error: {e}")));
    if elapsed > limit {
        detail.push_str("; over the runtime budget");
    }
    Some(CriterionOutcome {
        id,
        title,
        passed: ok && elapsed <= limit,
        detail,
        elapsed,
        limit,
    })
}

pub fn run_all(workers: usize) -> Vec<CriterionOutcome> {
    CRITERIA.iter().filter_map(|c| run_criterion(c.0, workers)).collect()
}

type Check = Result<(bool, String)>;

fn constant_beta(beta: f64, n_values: Vec<usize>, replicas: usize, seed: u64, workers: usize) -> Result<ExperimentConfig> {
    Ok(ExperimentConfig {
        schedule: RegimeSchedule::from_name("const", beta)?,
        n_values,
        replicas,
        master_seed: seed,
        workers,
        ..Default::default()
    })
}

fn rate_exactness() -> Check {
    let j2 = rate_j(2.0).unwrap_finite().abs();
    let mut ok = j2 <= f64::EPSILON;
    let spec = QuadratureSpec::default();
    let mut worst: f64 = 0.0;
    for &x in &[2.01, 2.5, 3.0, 5.0] {
        let phi = (log_potential_semicircle(x) - log_potential_semicircle_quadrature(x, &spec)?).abs();
        let closed = evaluate_rate(x, RateMethod::ClosedForm, &spec)?.j.unwrap_finite();
        let quad = evaluate_rate(x, RateMethod::Quadrature, &spec)?.j.unwrap_finite();
        worst = worst.max(phi).max((closed - quad).abs());
    }
    ok &= worst <= 1e-8;
    Ok((ok, format!("|J(2)| = {j2:.1e}, max closed-form vs quadrature gap {worst:.1e}")))
}

/// `log ∫∫ exp(−(α/2)(x² + y²)) |x − y|^β dx dy` over [−7, 7]², nested.
fn two_particle_oracle(alpha: f64, beta: f64) -> Result<f64> {
    let spec = QuadratureSpec {
        abs_tol: 1e-12,
        rel_tol: 1e-11,
        ..Default::default()
    };
    let inner = |x: f64| {
        let f = |y: f64| (-0.5 * alpha * (x * x + y * y)).exp() * (x - y).abs().powf(beta);
        integrate(f, &[-7.0, x, 7.0], &spec).map(|q| q.value).unwrap_or(f64::NAN)
    };
    let outer = integrate(inner, &[-7.0, 0.0, 7.0], &spec)?;
    Ok(outer.value.ln())
}

fn partition_correctness() -> Check {
    let mut worst_single: f64 = 0.0;
    for &(alpha, beta) in &[(1.0, 1.0), (5.0, 0.1)] {
        let want = 0.5 * (2.0 * PI / alpha).ln();
        worst_single = worst_single.max((log_z(1, alpha, beta)? - want).abs());
    }
    let oracle = two_particle_oracle(2.0, 1.0)?;
    let two = (log_z(2, 2.0, 1.0)? - oracle).abs();
    Ok((
        worst_single <= 1e-12 && two <= 1e-6,
        format!("n=1 error {worst_single:.1e}, n=2 vs quadrature {two:.1e}"),
    ))
}

fn ratio_asymptotics() -> Check {
    let n_values = [1_000, 10_000, 100_000, 1_000_000];
    let rows = ratio_sweep(&RegimeSchedule::inverse_log_squared(1.0)?, &n_values)?;
    let mut ok = true;
    let mut detail = Vec::new();
    for lemma in [RatioLemma::Shift, RatioLemma::Perturbed] {
        let gaps: Vec<f64> = rows.iter().filter(|r| r.lemma == lemma).map(|r| r.gap.abs()).collect();
        let decreasing = gaps.windows(2).all(|w| w[1] < w[0]);
        let last = *gaps.last().unwrap_or(&f64::NAN);
        ok &= gaps.len() == n_values.len() && decreasing && last <= 0.05;
        detail.push(format!("{} |gap| at 1e6 = {last:.4}", lemma.name()));
    }
    Ok((ok, detail.join(", ")))
}

/// det(T − xI) for the leading `k × k` block, by the continuant recurrence.
fn leading_char_poly(t: &TridiagonalMatrix, k: usize, x: f64) -> f64 {
    let (a, b) = (t.diag(), t.offdiag());
    let (mut prev, mut cur) = (1.0, a[0] - x);
    for i in 1..k {
        let next = (a[i] - x) * cur - b[i - 1] * b[i - 1] * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Roots of det(T − xI) for an unreduced T. The roots of each leading block
/// strictly interlace those of the next, so every root of block k is the
/// unique sign change of its polynomial between consecutive roots of block
/// k − 1.
fn char_poly_roots(t: &TridiagonalMatrix) -> Vec<f64> {
    let bound = t.diag().iter().map(|a| a.abs()).sum::<f64>() + 2.0 * t.offdiag().iter().map(|b| b.abs()).sum::<f64>() + 1.0;
    let mut roots = vec![t.diag()[0]];
    for k in 2..=t.n() {
        let mut edges = vec![-bound];
        edges.extend_from_slice(&roots);
        edges.push(bound);
        roots = edges
            .windows(2)
            .map(|w| {
                let (mut lo, mut hi) = (w[0], w[1]);
                let f_lo = leading_char_poly(t, k, lo);
                loop {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break mid;
                    }
                    let f_mid = leading_char_poly(t, k, mid);
                    if f_mid == 0.0 {
                        break mid;
                    }
                    if (f_mid > 0.0) == (f_lo > 0.0) {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
            })
            .collect();
    }
    roots
}

fn random_tridiagonal(stream: &mut SeededStream, n: usize) -> Result<TridiagonalMatrix> {
    let diag = (0..n).map(|_| 6.0 * stream.uniform() - 3.0).collect();
    let offdiag = (1..n).map(|_| 0.05 + 1.95 * stream.uniform()).collect();
    TridiagonalMatrix::new(diag, offdiag)
}

fn eigensolver_oracle(seed: u64) -> Check {
    let mut worst: f64 = 0.0;
    let mut count_mismatches = 0;
    for m in 0..50 {
        let mut stream = SeededStream::new(seed, m);
        let t = random_tridiagonal(&mut stream, 8)?;
        let oracle = char_poly_roots(&t);
        let spec = full_spectrum(&t, 1e-12)?;
        for (got, want) in spec.eigenvalues.iter().zip(&oracle) {
            worst = worst.max((got - want).abs());
        }
        for _ in 0..20 {
            let x = 10.0 * stream.uniform() - 5.0;
            let brute = oracle.iter().filter(|&&r| r < x).count();
            count_mismatches += (sturm_count(&t, x) != brute) as usize;
        }
    }
    Ok((
        worst <= 1e-9 && count_mismatches == 0,
        format!("max eigenvalue error {worst:.1e}, {count_mismatches} count mismatches in 1000"),
    ))
}

fn trace_identity(seed: u64, workers: usize) -> Check {
    let cfg = constant_beta(0.05, vec![500], 2000, seed, workers)?;
    let report = run_moment_check(&cfg)?;
    let row = &report.rows[0];
    Ok((
        row.z_score.abs() <= 4.0,
        format!(
            "mean {:.6} ± {:.1e} vs {:.6}, z = {:.2}",
            row.second_moment.mean, row.second_moment.stderr, row.exact_second_moment, row.z_score
        ),
    ))
}

fn convergence(seed: u64, workers: usize) -> Check {
    let cfg = constant_beta(0.1, vec![500, 2000], 500, seed, workers)?;
    let report = run_convergence_check(&cfg)?;
    // CONVERGENCE_EPSILONS[1] = 0.15
    let small = report.rows[0].exceed_fraction[1];
    let large = report.rows[1].exceed_fraction[1];
    Ok((
        large <= 0.05 && large <= small,
        format!("P(|λmax − 2| > 0.15): {small:.3} at n=500, {large:.3} at n=2000"),
    ))
}

fn empirical_rate(seed: u64, workers: usize) -> Check {
    let mut cfg = constant_beta(0.05, vec![200, 400], 100_000, seed, workers)?;
    cfg.x_grid = vec![2.5];
    let report = run_tail_sweep(&cfg)?;
    let (r200, r400) = (&report.rows[0], &report.rows[1]);
    let (Some(rel), Some(e200), Some(e400)) = (r200.rel_err, r200.abs_err(), r400.abs_err()) else {
        return Ok((false, "no exceedances observed".into()));
    };
    Ok((
        rel <= 0.5 && e400 < e200,
        format!(
            "ĵ = {} (n=200), {} (n=400) vs J = {:.5}; rel err {rel:.3}",
            r200.j_hat, r400.j_hat, r200.j_theory
        ),
    ))
}

fn tail_bound(seed: u64, workers: usize) -> Check {
    let mut cfg = constant_beta(0.2, vec![50], 100_000, seed, workers)?;
    cfg.t_grid = vec![2.5, 3.0];
    let report = run_tailbound_check(&cfg)?;
    let ok = report.rows.len() == 2 && report.rows.iter().all(|r| r.q_hat <= r.log_bound.exp() + 3.0 * r.stderr);
    let detail = report
        .rows
        .iter()
        .map(|r| format!("t={}: q̂ {:.2e} ≤ {:.2e}", r.t, r.q_hat, r.log_bound.exp()))
        .collect::<Vec<_>>()
        .join(", ");
    Ok((ok, detail))
}

fn esd_convergence(seed: u64, workers: usize) -> Check {
    let cfg = constant_beta(0.1, vec![250, 1000, 4000], 50, seed, workers)?;
    let report = run_esd_check(&cfg)?;
    let w1: Vec<f64> = report.rows.iter().map(|r| r.w1_mean).collect();
    let energy = report.rows[2].energy_norm;
    let ok = w1.len() == 3 && w1.windows(2).all(|w| w[1] < w[0]) && w1[2] <= 0.05 && energy.abs() <= 0.02;
    Ok((
        ok,
        format!(
            "mean W1 {:.4} / {:.4} / {:.4}, normalized energy at 4000 = {energy:.4}",
            w1[0], w1[1], w1[2]
        ),
    ))
}

fn inequality_suite(seed: u64, workers: usize) -> Check {
    let mut stream = SeededStream::new(seed, 0);
    let mut negative_gaps = 0;
    for _ in 0..100_000 {
        let a = 20.0 * stream.uniform() - 10.0;
        let b = 20.0 * stream.uniform() - 10.0;
        let beta = 5.0 * stream.uniform();
        if let Extended::Finite(g) = technical_gap(a, b, beta)? {
            negative_gaps += (g < 0.0) as usize;
        }
    }

    let mut non_monotone = 0;
    for case in 0..1000 {
        let mut s = SeededStream::new(seed, 1 + case);
        let n = 1 + (s.uniform() * 40.0) as usize;
        let diag = (0..n).map(|_| 4.0 * s.gaussian()).collect();
        let offdiag = (1..n).map(|_| 2.0 * s.gaussian()).collect();
        let t = TridiagonalMatrix::new(diag, offdiag)?;
        let x = 30.0 * s.uniform() - 15.0;
        let y = x + 5.0 * s.uniform();
        non_monotone += (sturm_count(&t, x) > sturm_count(&t, y)) as usize;
    }

    let mut cfg = constant_beta(0.1, vec![40, 80], 2000, seed, 1)?;
    cfg.x_grid = vec![2.2, 2.5];
    let serial = sweep_csv(&run_tail_sweep(&cfg)?.rows);
    cfg.workers = workers.max(3);
    let parallel = sweep_csv(&run_tail_sweep(&cfg)?.rows);
    let identical = serial == parallel;

    Ok((
        negative_gaps == 0 && non_monotone == 0 && identical,
        format!(
            "{negative_gaps} negative gaps, {non_monotone} non-monotone counts, sweep CSV identical across workers: {identical}"
        ),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interlacing_oracle_matches_a_known_spectrum() {
        // 1-D Laplacian: 2 − 2cos(kπ/(n+1)).
        let n = 8;
        let t = TridiagonalMatrix::new(vec![2.0; n], vec![-1.0; n - 1]).unwrap();
        let roots = char_poly_roots(&t);
        for (k, r) in roots.iter().enumerate() {
            let want = 2.0 - 2.0 * ((k + 1) as f64 * PI / (n + 1) as f64).cos();
            assert!((r - want).abs() < 1e-12, "{r} vs {want}");
        }
    }

    #[test]
    fn two_particle_oracle_is_the_gaussian_closed_form() {
        // Rotating to (x − y, x + y)/√2 gives √(2π) at α = 2, β = 1.
        let got = two_particle_oracle(2.0, 1.0).unwrap();
        assert!((got - 0.5 * (2.0 * PI).ln()).abs() < 1e-9);
    }

    #[test]
    fn fast_criteria_pass() {
        for id in [1, 2, 3, 4] {
            let out = run_criterion(id, 1).unwrap();
            assert!(out.passed, "{}", out.line());
        }
    }

    #[test]
    fn unknown_criterion() {
        assert!(run_criterion(11, 1).is_none());
    }
}
