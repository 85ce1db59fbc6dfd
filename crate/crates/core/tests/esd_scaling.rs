//! The empirical spectral measure approaches the semicircle as n grows.

use hitemp_core::eig::full_spectrum;
use hitemp_core::experiments::{map_replicas, median};
use hitemp_core::measures::{w1_to_semicircle, DiscreteMeasure};
use hitemp_core::model::make_params;
use hitemp_core::sampler::sample_matrix;

fn median_w1(n: usize, replicas: usize) -> f64 {
    let params = make_params(n, 0.1).unwrap();
    let w1 = map_replicas(1, 0xe5d, replicas, |s| {
        let t = sample_matrix(&params, s)?;
        let spec = full_spectrum(&t, 1e-9)?;
        Ok(w1_to_semicircle(&DiscreteMeasure::from_spectrum(&spec)))
    })
    .unwrap();
    median(&w1)
}

#[test]
fn median_w1_shrinks_from_250_to_2000() {
    let small = median_w1(250, 50);
    let large = median_w1(2000, 50);
    assert!(large < small, "{large} vs {small}");
    assert!(large < 0.5 * small, "expected roughly 1/n decay: {large} vs {small}");
}
