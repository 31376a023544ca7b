//! Run configuration files (TOML, unknown keys rejected) and the built-in
//! presets reproducing the published table layouts.

use serde::Deserialize;
use stepstress::cem::{CensoringSpec, StepStressParams};
use stepstress::design::DesignConfig;
use stepstress::posterior::PriorHyper;
use stepstress::simulate::ExperimentConfig;

use crate::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PriorSection {
    pub a0: f64,
    pub b0: f64,
    pub a1: f64,
    pub b1: f64,
    pub a2: f64,
    pub b2: f64,
}

impl PriorSection {
    pub fn build(&self) -> Result<PriorHyper, CliError> {
        PriorHyper::new(self.a0, self.b0, self.a1, self.b1, self.a2, self.b2)
            .map_err(CliError::from)
    }
}

fn default_reps() -> usize {
    1000
}
fn default_draws() -> usize {
    15000
}
fn default_gamma() -> f64 {
    0.05
}
fn default_design_reps() -> usize {
    200
}

/// `simulate` configuration: global knobs plus one `[[experiment]]` block per
/// table row.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateFile {
    pub seed: Option<u64>,
    #[serde(default = "default_reps")]
    pub reps: usize,
    #[serde(default = "default_draws")]
    pub n_draws: usize,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    pub prior: Option<PriorSection>,
    #[serde(rename = "experiment")]
    pub experiments: Vec<ExperimentSection>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    pub alpha: f64,
    pub theta1: f64,
    pub theta2: f64,
    pub tau1: f64,
    pub n: usize,
    #[serde(default = "default_scheme")]
    pub scheme: String,
    pub tau2: Option<f64>,
    pub r: Option<usize>,
}

fn default_scheme() -> String {
    "complete".into()
}

pub fn parse_scheme(
    scheme: &str,
    tau2: Option<f64>,
    r: Option<usize>,
) -> Result<CensoringSpec, CliError> {
    let need_tau2 =
        || tau2.ok_or_else(|| CliError::Validation(format!("scheme '{scheme}' needs tau2")));
    let need_r = || r.ok_or_else(|| CliError::Validation(format!("scheme '{scheme}' needs r")));
    Ok(match scheme.to_ascii_lowercase().as_str() {
        "complete" => CensoringSpec::Complete,
        "type-i" | "typei" | "type1" => CensoringSpec::TypeI { tau2: need_tau2()? },
        "type-ii" | "typeii" | "type2" => CensoringSpec::TypeII { r: need_r()? },
        "hybrid-i" | "hybridi" | "hybrid1" => {
            CensoringSpec::HybridI { r: need_r()?, tau2: need_tau2()? }
        }
        "hybrid-ii" | "hybridii" | "hybrid2" => {
            CensoringSpec::HybridII { r: need_r()?, tau2: need_tau2()? }
        }
        other => return Err(CliError::Validation(format!("unknown scheme '{other}'"))),
    })
}

impl SimulateFile {
    pub fn into_configs(self, seed: u64) -> Result<Vec<ExperimentConfig>, CliError> {
        if self.experiments.is_empty() {
            return Err(CliError::Validation("no [[experiment]] blocks".into()));
        }
        if self.reps == 0 {
            return Err(CliError::Validation("reps must be at least 1".into()));
        }
        let prior = match &self.prior {
            Some(p) => p.build()?,
            None => PriorHyper::noninformative(),
        };
        self.experiments
            .iter()
            .map(|e| {
                let truth = StepStressParams::new(e.alpha, e.theta1, e.theta2, e.tau1)?;
                let spec = parse_scheme(&e.scheme, e.tau2, e.r)?;
                Ok(ExperimentConfig {
                    truth,
                    n: e.n,
                    spec,
                    reps: self.reps,
                    n_draws: self.n_draws,
                    prior,
                    gamma: self.gamma,
                    seed,
                })
            })
            .collect()
    }
}

/// `optimize` configuration: one `[[design]]` block per row.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizeFile {
    pub seed: Option<u64>,
    #[serde(default = "default_design_reps")]
    pub reps: usize,
    pub prior: Option<PriorSection>,
    #[serde(rename = "design")]
    pub designs: Vec<DesignSection>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignSection {
    pub alpha: f64,
    pub theta1: f64,
    pub theta2: f64,
    pub n: usize,
    pub tau_min: f64,
    pub tau_max: f64,
    #[serde(default = "default_tau_step")]
    pub tau_step: f64,
}

fn default_tau_step() -> f64 {
    0.2
}

impl OptimizeFile {
    pub fn into_configs(self, seed: u64) -> Result<Vec<DesignConfig>, CliError> {
        if self.designs.is_empty() {
            return Err(CliError::Validation("no [[design]] blocks".into()));
        }
        let prior = match &self.prior {
            Some(p) => p.build()?,
            None => PriorHyper::noninformative(),
        };
        self.designs
            .iter()
            .map(|d| {
                // tau1 param of StepStressParams is a placeholder; the sweep
                // substitutes grid values
                let params = StepStressParams::new(d.alpha, d.theta1, d.theta2, d.tau_max)?;
                #[allow(clippy::neg_cmp_op_on_partial_ord)] // rejects NaN too
                if !(d.tau_step > 0.0) {
                    return Err(CliError::Validation("tau_step must be > 0".into()));
                }
                Ok(DesignConfig {
                    params,
                    n: d.n,
                    tau_grid: DesignConfig::grid(d.tau_min, d.tau_max, d.tau_step),
                    reps: self.reps,
                    prior,
                    seed,
                })
            })
            .collect()
    }
}

/// The published simulation grids: complete samples for three shape values,
/// plus the Type-I and Type-II censored grids.
pub fn simulate_preset(name: &str) -> Result<SimulateFile, CliError> {
    let complete = |alpha: f64| -> Vec<ExperimentSection> {
        let mut rows = Vec::new();
        for n in [10usize, 20, 30, 40, 50] {
            for tau1 in [5.0, 7.0, 9.0] {
                rows.push(ExperimentSection {
                    alpha,
                    theta1: 0.1,
                    theta2: 0.2,
                    tau1,
                    n,
                    scheme: "complete".into(),
                    tau2: None,
                    r: None,
                });
            }
        }
        rows
    };
    let censored_rows = |type_i: bool| -> Vec<ExperimentSection> {
        // (n, tau1, tau2) for Type-I; (n, tau1, r) for Type-II
        let type1: [(usize, f64, f64); 12] = [
            (20, 7.0, 13.0), (20, 9.0, 13.0), (20, 9.0, 15.0),
            (30, 7.0, 13.0), (30, 9.0, 13.0), (30, 9.0, 15.0),
            (40, 7.0, 13.0), (40, 9.0, 13.0), (40, 9.0, 15.0),
            (50, 7.0, 13.0), (50, 9.0, 13.0), (50, 9.0, 15.0),
        ];
        let type2: [(usize, f64, usize); 12] = [
            (20, 7.0, 15), (20, 9.0, 15), (20, 9.0, 17),
            (30, 7.0, 23), (30, 9.0, 23), (30, 9.0, 27),
            (40, 7.0, 32), (40, 9.0, 32), (40, 9.0, 36),
            (50, 7.0, 42), (50, 9.0, 42), (50, 9.0, 45),
        ];
        if type_i {
            type1
                .iter()
                .map(|&(n, tau1, tau2)| ExperimentSection {
                    alpha: 1.5,
                    theta1: 0.1,
                    theta2: 0.2,
                    tau1,
                    n,
                    scheme: "type-i".into(),
                    tau2: Some(tau2),
                    r: None,
                })
                .collect()
        } else {
            type2
                .iter()
                .map(|&(n, tau1, r)| ExperimentSection {
                    alpha: 1.5,
                    theta1: 0.1,
                    theta2: 0.2,
                    tau1,
                    n,
                    scheme: "type-ii".into(),
                    tau2: None,
                    r: Some(r),
                })
                .collect()
        }
    };

    let experiments = match name {
        "table1" => complete(0.6),
        "table2" => complete(1.0),
        "table3" => complete(1.5),
        "table-a4" => censored_rows(true),
        "table-a5" => censored_rows(false),
        "paper-tables" => {
            let mut all = complete(0.6);
            all.extend(complete(1.0));
            all.extend(complete(1.5));
            all.extend(censored_rows(true));
            all.extend(censored_rows(false));
            all
        }
        other => {
            return Err(CliError::Validation(format!(
                "unknown simulate preset '{other}' (try table1, table2, table3, table-a4, table-a5, paper-tables)"
            )))
        }
    };
    Ok(SimulateFile {
        seed: None,
        reps: default_reps(),
        n_draws: default_draws(),
        gamma: default_gamma(),
        prior: None,
        experiments,
    })
}

/// The 12 published optimal-design rows (three shapes by four sample sizes).
pub fn optimize_preset(name: &str, rows: Option<&str>) -> Result<OptimizeFile, CliError> {
    if name != "table11" {
        return Err(CliError::Validation(format!(
            "unknown optimize preset '{name}' (try table11)"
        )));
    }
    let mut designs = Vec::new();
    for alpha in [0.6, 1.0, 1.5] {
        for n in [20usize, 30, 40, 50] {
            designs.push(DesignSection {
                alpha,
                theta1: 0.1,
                theta2: 0.2,
                n,
                tau_min: 0.4,
                tau_max: if alpha < 1.0 { 16.0 } else { 18.0 },
                tau_step: 0.2,
            });
        }
    }
    if let Some(rows) = rows {
        let mut keep = Vec::new();
        for part in rows.split(',') {
            let (a, n) = part.split_once(':').ok_or_else(|| {
                CliError::Validation(format!("row filter '{part}' is not alpha:n"))
            })?;
            let a: f64 = a
                .trim()
                .parse()
                .map_err(|_| CliError::Validation(format!("bad alpha in '{part}'")))?;
            let n: usize = n
                .trim()
                .parse()
                .map_err(|_| CliError::Validation(format!("bad n in '{part}'")))?;
            keep.push((a, n));
        }
        designs.retain(|d| keep.iter().any(|&(a, n)| (d.alpha - a).abs() < 1e-9 && d.n == n));
        if designs.is_empty() {
            return Err(CliError::Validation("row filter matched nothing".into()));
        }
    }
    Ok(OptimizeFile { seed: None, reps: default_design_reps(), prior: None, designs })
}

pub fn load_toml<T: serde::de::DeserializeOwned>(path: &std::path::Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(CliError::Io)?;
    toml::from_str(&text)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}
