//! Kolmogorov–Smirnov checks of the χ sampler against the exact χ CDF,
//! including shapes far below one where the log-space boost is exercised.

use hitemp_core::partition::chi_cdf_from_log;
use hitemp_core::sampler::SeededStream;

/// Two-sided KS statistic of log-samples against the χ(k) CDF.
fn ks_statistic(k: f64, mut log_samples: Vec<f64>) -> f64 {
    log_samples.sort_by(|a, b| a.total_cmp(b));
    let n = log_samples.len() as f64;
    log_samples
        .iter()
        .enumerate()
        .map(|(i, &ly)| {
            let f = chi_cdf_from_log(k, ly).unwrap();
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

#[test]
fn chi_samples_pass_ks_at_the_one_in_a_thousand_level() {
    const N: usize = 20_000;
    // Asymptotic critical value at level 1e-3.
    let critical = 1.9495 / (N as f64).sqrt();
    for (i, &k) in [0.02, 0.5, 1.0, 4.0].iter().enumerate() {
        let mut stream = SeededStream::new(0xc41, i as u64);
        let samples: Vec<f64> = (0..N).map(|_| stream.log_chi(k).unwrap()).collect();
        let d = ks_statistic(k, samples);
        assert!(d < critical, "k = {k}: D = {d:.5} ≥ {critical:.5}");
    }
}

#[test]
fn chi_and_log_chi_agree() {
    let mut a = SeededStream::new(7, 3);
    let mut b = SeededStream::new(7, 3);
    for _ in 0..1000 {
        let x = a.chi(2.5).unwrap();
        let lx = b.log_chi(2.5).unwrap();
        assert!((x.ln() - lx).abs() < 1e-12);
    }
}
