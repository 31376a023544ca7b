//! Report shapes and file writers shared by the subcommands, including the
//! persisted posterior-sample format.

use std::io::Write;
use std::path::Path;

use serde::Serialize;
use stepstress::posterior::{PosteriorSample, PriorHyper, WeightedDraw};

use crate::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct DatasetSummary {
    pub label: String,
    pub n: usize,
    pub n_star: usize,
    pub n1_star: usize,
    pub n2_star: usize,
    pub tau1: f64,
    pub tau_star: f64,
    pub censored: usize,
    pub digest: String,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct PointEstimates {
    pub alpha: f64,
    pub theta1: f64,
    pub theta2: f64,
    pub beta: f64,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct IntervalOut {
    pub lower: f64,
    pub upper: f64,
}

/// Intervals for one parameter at one credibility level.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct IntervalTriple {
    pub level: f64,
    pub left: IntervalOut,
    pub symmetric: IntervalOut,
    pub hpd: IntervalOut,
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    let mut f = std::fs::File::create(path).map_err(CliError::Io)?;
    f.write_all(text.as_bytes()).map_err(CliError::Io)
}

pub fn prior_echo(prior: &PriorHyper) -> String {
    format!(
        "a0={},b0={},a1={},b1={},a2={},b2={}",
        prior.a0, prior.b0, prior.a1, prior.b1, prior.a2, prior.b2
    )
}

/// Persist a weighted posterior sample as a columnar CSV. Floats print in
/// Rust's shortest round-trip form, so reloading reproduces every bit.
pub fn save_posterior(
    sample: &PosteriorSample,
    seed: u64,
    prior: &PriorHyper,
    digest: &str,
) -> String {
    let mut out = String::new();
    out.push_str("# stepstress posterior sample\n");
    out.push_str(&format!("# seed,{seed}\n"));
    out.push_str(&format!("# n_draws,{}\n", sample.len()));
    out.push_str(&format!("# prior,{}\n", prior_echo(prior)));
    out.push_str(&format!("# data_sha256,{digest}\n"));
    out.push_str(&format!("# ess,{}\n", sample.ess()));
    out.push_str("beta,theta2,alpha,log_weight\n");
    for d in sample.draws() {
        out.push_str(&format!("{},{},{},{}\n", d.beta, d.theta2, d.alpha, d.log_weight));
    }
    out
}

/// Reload a persisted sample; weights are renormalized from the stored log
/// weights with the same deterministic reduction the sampler uses.
pub fn load_posterior(text: &str) -> Result<PosteriorSample, CliError> {
    let mut draws = Vec::new();
    let mut saw_header = false;
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !saw_header {
            if line != "beta,theta2,alpha,log_weight" {
                return Err(CliError::Validation(format!(
                    "line {}: unexpected column header '{line}'",
                    idx + 1
                )));
            }
            saw_header = true;
            continue;
        }
        let mut parts = line.split(',');
        let mut next = |name: &str| -> Result<f64, CliError> {
            parts
                .next()
                .ok_or_else(|| CliError::Validation(format!("line {}: missing {name}", idx + 1)))?
                .parse()
                .map_err(|_| CliError::Validation(format!("line {}: bad {name}", idx + 1)))
        };
        draws.push(WeightedDraw {
            beta: next("beta")?,
            theta2: next("theta2")?,
            alpha: next("alpha")?,
            log_weight: next("log_weight")?,
        });
    }
    if draws.is_empty() {
        return Err(CliError::Validation("no draws in posterior file".into()));
    }
    Ok(PosteriorSample::from_draws(draws))
}
