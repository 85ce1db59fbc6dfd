//! Random generation of the tridiagonal matrix model.
//!
//! The matrix `H` has independent entries up to symmetry:
//! `H[i][i] = gᵢ/√α` with `gᵢ ~ N(0,1)` and
//! `H[i][i+1] = X_{n−1−i}/√(2α)` with `Xⱼ ~ χ(jβ)`.
//! Its eigenvalues are distributed according to the Gaussian β-ensemble
//! with scale α.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Open01, StandardNormal};

use crate::model::EnsembleParams;
use crate::{Error, Result};

/// An independent random stream identified by `(master_seed, stream_index)`.
///
/// Backed by ChaCha8, a counter-based generator: the stream index selects one
/// of 2⁶⁴ disjoint keystreams under the same key, so streams with different
/// indices never overlap.
#[derive(Debug, Clone)]
pub struct SeededStream {
    master_seed: u64,
    stream_index: u64,
    rng: ChaCha8Rng,
}

impl SeededStream {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
        rng.set_stream(stream_index);
        SeededStream {
            master_seed,
            stream_index,
            rng,
        }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_index(&self) -> u64 {
        self.stream_index
    }

    /// Standard normal variate.
    pub fn gaussian(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    /// Uniform variate on the open interval (0, 1).
    pub fn uniform(&mut self) -> f64 {
        self.rng.sample(Open01)
    }

    /// Logarithm of a Gamma(shape, 1) variate.
    ///
    /// Marsaglia–Tsang squeeze/rejection for shape ≥ 1. Smaller shapes use
    /// `G_a = G_{a+1} · U^{1/a}`, carried out in log space so that tiny shapes
    /// (where `U^{1/a}` underflows) stay exact.
    pub fn log_gamma_variate(&mut self, shape: f64) -> Result<f64> {
        if !(shape > 0.0 && shape.is_finite()) {
            return Err(Error::invalid("shape", format!("must be positive, got {shape}")));
        }
        if shape < 1.0 {
            let boosted = self.marsaglia_tsang_log(shape + 1.0);
            let log_u = self.uniform().ln();
            Ok(boosted + log_u / shape)
        } else {
            Ok(self.marsaglia_tsang_log(shape))
        }
    }

    fn marsaglia_tsang_log(&mut self, shape: f64) -> f64 {
        debug_assert!(shape >= 1.0);
        let d = shape - 1.0 / 3.0;
        let c = 1.0 / (9.0 * d).sqrt();
        loop {
            let x = self.gaussian();
            let t = 1.0 + c * x;
            if t <= 0.0 {
                continue;
            }
            let v = t * t * t;
            let u = self.uniform();
            let x2 = x * x;
            // squeeze
            if u < 1.0 - 0.0331 * x2 * x2 {
                return d.ln() + v.ln();
            }
            if u.ln() < 0.5 * x2 + d * (1.0 - v + v.ln()) {
                return d.ln() + v.ln();
            }
        }
    }

    /// Logarithm of a χ(k) variate, i.e. half the log of a χ²(k) variate.
    pub fn log_chi(&mut self, k: f64) -> Result<f64> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::invalid("k", format!("chi degrees of freedom must be positive, got {k}")));
        }
        // χ²(k) = 2 · Gamma(k/2, 1)
        let log_g = self.log_gamma_variate(k / 2.0)?;
        Ok(0.5 * (std::f64::consts::LN_2 + log_g))
    }

    /// χ(k) variate. May underflow to 0 for very small `k`; use
    /// [`log_chi`](Self::log_chi) when the magnitude matters.
    pub fn chi(&mut self, k: f64) -> Result<f64> {
        self.log_chi(k).map(f64::exp)
    }
}

/// A real symmetric tridiagonal matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalMatrix {
    diag: Vec<f64>,
    offdiag: Vec<f64>,
}

impl TridiagonalMatrix {
    /// Requires `offdiag.len() + 1 == diag.len()`, `diag` nonempty and all
    /// entries finite. Off-diagonal signs are arbitrary; sampled matrices
    /// always have nonnegative off-diagonals.
    pub fn new(diag: Vec<f64>, offdiag: Vec<f64>) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::invalid("diag", "matrix must have at least one row"));
        }
        if offdiag.len() + 1 != diag.len() {
            return Err(Error::invalid(
                "offdiag",
                format!("expected {} entries, got {}", diag.len() - 1, offdiag.len()),
            ));
        }
        if diag.iter().chain(&offdiag).any(|v| !v.is_finite()) {
            return Err(Error::invalid("entries", "all entries must be finite"));
        }
        Ok(TridiagonalMatrix { diag, offdiag })
    }

    pub fn n(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn offdiag(&self) -> &[f64] {
        &self.offdiag
    }

    /// The matrix with its index order reversed; same spectrum.
    pub fn reversed(&self) -> Self {
        TridiagonalMatrix {
            diag: self.diag.iter().rev().copied().collect(),
            offdiag: self.offdiag.iter().rev().copied().collect(),
        }
    }

    pub fn trace(&self) -> f64 {
        self.diag.iter().sum()
    }

    /// tr(H²) = Σ diag² + 2 Σ offdiag².
    pub fn trace_of_square(&self) -> f64 {
        let d: f64 = self.diag.iter().map(|a| a * a).sum();
        let o: f64 = self.offdiag.iter().map(|b| b * b).sum();
        d + 2.0 * o
    }

    /// Plain-text dump: `n`, then the diagonal, then the off-diagonal, one
    /// line each, whitespace separated, 17 significant digits.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{}", self.n()).unwrap();
        write_row(&mut out, &self.diag);
        write_row(&mut out, &self.offdiag);
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let n: usize = lines
            .next()
            .ok_or_else(|| Error::Parse("empty matrix dump".into()))?
            .trim()
            .parse()
            .map_err(|e| Error::Parse(format!("bad dimension line: {e}")))?;
        let diag = parse_row(lines.next().unwrap_or(""))?;
        let offdiag = parse_row(lines.next().unwrap_or(""))?;
        if diag.len() != n {
            return Err(Error::Parse(format!("header says n={n} but diagonal has {} entries", diag.len())));
        }
        TridiagonalMatrix::new(diag, offdiag)
    }
}

fn write_row(out: &mut String, row: &[f64]) {
    for (i, v) in row.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        write!(out, "{v:.16e}").unwrap();
    }
    out.push('\n');
}

fn parse_row(line: &str) -> Result<Vec<f64>> {
    line.split_whitespace()
        .map(|tok| {
            tok.parse::<f64>()
                .map_err(|e| Error::Parse(format!("bad number `{tok}`: {e}")))
        })
        .collect()
}

/// Draw one matrix `H_{n,α,β}`.
///
/// Variates are consumed in a fixed order: the n diagonal Gaussians, then the
/// off-diagonals starting from `χ((n−1)β)`.
pub fn sample_matrix(params: &EnsembleParams, stream: &mut SeededStream) -> Result<TridiagonalMatrix> {
    params.validate()?;
    let n = params.n;
    let diag_scale = params.alpha.sqrt().recip();
    let log_off_scale = -0.5 * (2.0 * params.alpha).ln();

    let diag: Vec<f64> = (0..n).map(|_| stream.gaussian() * diag_scale).collect();
    let mut offdiag = Vec::with_capacity(n - 1);
    for i in 0..n - 1 {
        let k = (n - 1 - i) as f64 * params.beta;
        offdiag.push((stream.log_chi(k)? + log_off_scale).exp());
    }
    TridiagonalMatrix::new(diag, offdiag)
}
