//! Stable CSV renderings of campaign results.
//!
//! Reals are written with 17 significant digits in scientific notation, so
//! they round-trip exactly and never depend on locale. Lines end in `\n`.
//! Infinite markers are written `inf`, missing values `NA`.

use std::fmt::Write as _;

use crate::partition::RatioComparison;
use crate::Extended;

use super::{EsdRow, TailBoundRow, TailRow};

pub const SWEEP_HEADER: &str = "n,beta,x,p_hat,stderr,j_hat,j_theory,rel_err";
pub const PARTITION_HEADER: &str = "lemma,n,beta,exact,asymptotic,gap";
pub const TAIL_HEADER: &str = "n,beta,t,q_hat,stderr,log_bound,pass";
pub const ESD_HEADER: &str = "n,beta,w1_mean,ks_mean,energy_norm,energy_paper";
pub const RATE_HEADER: &str = "x,J,phi";

pub fn real(v: f64) -> String {
    if v.is_nan() {
        "NA".to_string()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{v:.16e}")
    }
}

pub fn extended(v: Extended) -> String {
    match v {
        Extended::Finite(x) => real(x),
        Extended::PosInf => "inf".to_string(),
        Extended::NegInf => "-inf".to_string(),
    }
}

fn optional(v: Option<f64>) -> String {
    v.map(real).unwrap_or_else(|| "NA".to_string())
}

fn table<T>(header: &str, rows: &[T], line: impl Fn(&T) -> String) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(header);
    out.push('\n');
    for r in rows {
        out.push_str(&line(r));
        out.push('\n');
    }
    out
}

pub fn sweep_csv(rows: &[TailRow]) -> String {
    table(SWEEP_HEADER, rows, |r| {
        format!(
            "{},{},{},{},{},{},{},{}",
            r.n,
            real(r.beta),
            real(r.x),
            real(r.p_hat),
            real(r.stderr),
            extended(r.j_hat),
            real(r.j_theory),
            optional(r.rel_err)
        )
    })
}

pub fn partition_csv(rows: &[RatioComparison]) -> String {
    table(PARTITION_HEADER, rows, |r| {
        format!(
            "{},{},{},{},{},{}",
            r.lemma.name(),
            r.n,
            real(r.beta),
            real(r.exact_log_ratio),
            real(r.asymptotic_log_ratio),
            real(r.gap)
        )
    })
}

pub fn tail_csv(rows: &[TailBoundRow]) -> String {
    table(TAIL_HEADER, rows, |r| {
        format!(
            "{},{},{},{},{},{},{}",
            r.n,
            real(r.beta),
            real(r.t),
            real(r.q_hat),
            real(r.stderr),
            real(r.log_bound),
            r.pass
        )
    })
}

pub fn esd_csv(rows: &[EsdRow]) -> String {
    table(ESD_HEADER, rows, |r| {
        format!(
            "{},{},{},{},{},{}",
            r.n,
            real(r.beta),
            real(r.w1_mean),
            real(r.ks_mean),
            real(r.energy_norm),
            real(r.energy_paper)
        )
    })
}

/// `(x, J(x), φ(x, σ))` table.
pub fn rate_csv(rows: &[crate::analytic::RateEvaluation]) -> String {
    let mut out = String::new();
    writeln!(out, "{RATE_HEADER}").unwrap();
    for r in rows {
        writeln!(out, "{},{},{}", real(r.x), extended(r.j), real(r.phi)).unwrap();
    }
    out
}
