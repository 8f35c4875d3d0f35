//! CSV and JSON output.
//!
//! `regret.csv` has exactly the columns `round,mean_regret,stderr_regret,bound`
//! with floats in `%.9g` form. `realized.csv` holds the sampled-cost regret
//! curve and `summary.json` the config echo and run totals.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::harness::config::ExperimentConfig;
use crate::harness::run::ExperimentResult;

pub const REGRET_CSV: &str = "regret.csv";
pub const REALIZED_CSV: &str = "realized.csv";
pub const SUMMARY_JSON: &str = "summary.json";

/// Formats like C's `%.9g`.
pub fn format_sig9(x: f64) -> String {
    const PRECISION: i32 = 9;
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    // Rounding to 9 significant digits can bump the exponent (9.99999999996 -> 10).
    let sci = format!("{:.*e}", (PRECISION - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..PRECISION).contains(&exp) {
        let mantissa = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (PRECISION - 1 - exp).max(0) as usize;
        strip_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn regret_csv(result: &ExperimentResult) -> String {
    let mut out = String::from("round,mean_regret,stderr_regret,bound\n");
    for p in &result.curve {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            p.round,
            format_sig9(p.mean_regret),
            format_sig9(p.stderr_regret),
            format_sig9(p.bound)
        );
    }
    out
}

pub fn realized_csv(result: &ExperimentResult) -> String {
    let mut out = String::from("round,mean_realized_regret,stderr_realized_regret\n");
    for p in &result.curve {
        let _ = writeln!(
            out,
            "{},{},{}",
            p.round,
            format_sig9(p.mean_realized_regret),
            format_sig9(p.stderr_realized_regret)
        );
    }
    out
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Summary<'a> {
    pub config: &'a ExperimentConfig,
    pub learner: String,
    pub scale: f64,
    pub in_regime: bool,
    pub num_policies: usize,
    pub reps: usize,
    pub seed: u64,
    pub horizon: usize,
    pub final_mean_regret: f64,
    pub final_stderr_regret: f64,
    pub final_mean_realized_regret: f64,
    pub final_bound: Option<f64>,
    pub oracle_calls_total: u64,
    pub oracle_calls_per_run: Vec<u64>,
    pub min_played_prob: f64,
    pub max_coin_probability: Option<f64>,
    pub wall_time_seconds: f64,
}

pub fn summary(result: &ExperimentResult) -> Summary<'_> {
    let last = result.final_point();
    Summary {
        config: &result.config,
        learner: result.config.learner.to_string(),
        scale: result.scale,
        in_regime: result.in_regime,
        num_policies: result.num_policies,
        reps: result.runs.len(),
        seed: result.config.seed,
        horizon: result.config.horizon,
        final_mean_regret: last.mean_regret,
        final_stderr_regret: last.stderr_regret,
        final_mean_realized_regret: last.mean_realized_regret,
        final_bound: last.bound.is_finite().then_some(last.bound),
        oracle_calls_total: result.total_oracle_calls(),
        oracle_calls_per_run: result.runs.iter().map(|r| r.oracle_calls).collect(),
        min_played_prob: result
            .runs
            .iter()
            .map(|r| r.min_played_prob)
            .fold(f64::INFINITY, f64::min),
        max_coin_probability: result
            .runs
            .iter()
            .filter_map(|r| r.max_coin_probability)
            .reduce(f64::max),
        wall_time_seconds: result.wall_time.as_secs_f64(),
    }
}

/// Paths written by [`emit_outputs`].
#[derive(Debug, Clone)]
pub struct OutputPaths {
    pub regret_csv: PathBuf,
    pub realized_csv: PathBuf,
    pub summary_json: PathBuf,
}

pub fn emit_outputs(result: &ExperimentResult, out_dir: &Path) -> Result<OutputPaths> {
    let io = |path: &Path| {
        let path = path.display().to_string();
        move |source| Error::Io { path, source }
    };
    fs::create_dir_all(out_dir).map_err(io(out_dir))?;
    let paths = OutputPaths {
        regret_csv: out_dir.join(REGRET_CSV),
        realized_csv: out_dir.join(REALIZED_CSV),
        summary_json: out_dir.join(SUMMARY_JSON),
    };
    fs::write(&paths.regret_csv, regret_csv(result)).map_err(io(&paths.regret_csv))?;
    fs::write(&paths.realized_csv, realized_csv(result)).map_err(io(&paths.realized_csv))?;
    let json = serde_json::to_string_pretty(&summary(result))?;
    fs::write(&paths.summary_json, json + "\n").map_err(io(&paths.summary_json))?;
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig9_matches_printf() {
        let cases = [
            (0.0, "0"),
            (1.0, "1"),
            (-2.5, "-2.5"),
            (1.0 / 3.0, "0.333333333"),
            (2.0 / 3.0, "0.666666667"),
            (123456789.0, "123456789"),
            (1234567890.0, "1.23456789e+09"),
            (0.0001, "0.0001"),
            (0.00001234, "1.234e-05"),
            (9.999999999, "10"),
            (2800.123456789, "2800.12346"),
            (f64::NAN, "nan"),
        ];
        for (x, want) in cases {
            assert_eq!(format_sig9(x), want, "formatting {x}");
        }
    }
}
