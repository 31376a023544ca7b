//! Command-line driver for step-stress life-test inference.

mod config;
mod dataset;
mod output;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use stepstress::cem::{CensoringSpec, StepStressParams};
use stepstress::gof::ks_test;
use stepstress::mle::fit_mle;
use stepstress::posterior::{draw_importance_sample, g, IntervalKind, PriorHyper, WeightedDraw};
use stepstress::rng::RngStream;
use stepstress::simulate::run_table;

use config::{load_toml, optimize_preset, simulate_preset, OptimizeFile, SimulateFile};
use dataset::Dataset;
use output::{
    load_posterior, prior_echo, save_posterior, write_text, DatasetSummary, IntervalOut,
    IntervalTriple, PointEstimates,
};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Degenerate(String),
    #[error("{0}")]
    Numerical(String),
    #[error("{0}")]
    Io(std::io::Error),
}

impl From<stepstress::Error> for CliError {
    fn from(e: stepstress::Error) -> Self {
        use stepstress::Error as E;
        match e {
            E::InvalidParameter(m) | E::InvalidData(m) => CliError::Validation(m),
            E::DegenerateData(m) => CliError::Degenerate(m),
            E::Numerical(m) => CliError::Numerical(m),
            E::LowEss { ess, context } => {
                CliError::Numerical(format!("effective sample size {ess:.2} too low; {context}"))
            }
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Degenerate(_) => 3,
            CliError::Numerical(_) => 4,
            CliError::Io(_) => 5,
        }
    }
}

/// Order-restricted Bayesian inference for simple step-stress life tests.
#[derive(Parser)]
#[command(name = "stepstress", version, about)]
struct Cli {
    /// Worker threads (results are identical for any value).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Bayes estimates, credible intervals, MLE and diagnostics for a dataset.
    Estimate(EstimateArgs),
    /// Monte Carlo tables: average estimates, MSE, coverage, lengths.
    Simulate(SimulateArgs),
    /// Sweep the stress-change time and minimize the summed posterior CVs.
    Optimize(OptimizeArgs),
    /// Kolmogorov-Smirnov goodness of fit against fitted parameters.
    Gof(GofArgs),
    /// Draw and persist a weighted posterior sample.
    SamplePosterior(SamplePosteriorArgs),
}

#[derive(Args)]
struct EstimateArgs {
    /// Dataset file.
    #[arg(long)]
    data: PathBuf,
    /// Importance-sample size.
    #[arg(long, default_value_t = 15000)]
    n_draws: usize,
    /// Master seed (generated and echoed when omitted).
    #[arg(long)]
    seed: Option<u64>,
    /// Credibility levels for the interval table.
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.90, 0.95, 0.99])]
    levels: Vec<f64>,
    /// Prior hyperparameters a0,b0,a1,b1,a2,b2.
    #[arg(long, value_delimiter = ',')]
    prior: Option<Vec<f64>>,
    /// Output format.
    #[arg(long, default_value = "human")]
    format: Format,
    /// Write the report here as well as stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// TOML experiment list.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in grid: table1|table2|table3|table-a4|table-a5|paper-tables.
    #[arg(long)]
    preset: Option<String>,
    /// Override replication count.
    #[arg(long)]
    reps: Option<usize>,
    /// Override importance-sample size.
    #[arg(long)]
    n_draws: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output basename; writes BASE.csv and BASE.json.
    #[arg(long, default_value = "simulate-results")]
    out: PathBuf,
}

#[derive(Args)]
struct OptimizeArgs {
    /// TOML design list.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in preset: table11.
    #[arg(long)]
    preset: Option<String>,
    /// Restrict a preset to rows "alpha:n,alpha:n,...".
    #[arg(long)]
    rows: Option<String>,
    /// Override replications per grid point.
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output basename; writes BASE.csv (curve) and BASE.json (optima).
    #[arg(long, default_value = "optimize-results")]
    out: PathBuf,
}

#[derive(Args)]
struct GofArgs {
    #[arg(long)]
    data: PathBuf,
    /// Explicit fitted parameters alpha,theta1,theta2 (skips estimation).
    #[arg(long, value_delimiter = ',')]
    params: Option<Vec<f64>>,
    /// Parameter source when --params is absent: bayes, mle or both.
    #[arg(long, default_value = "both")]
    source: String,
    #[arg(long, default_value_t = 15000)]
    n_draws: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "human")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SamplePosteriorArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long, default_value_t = 15000)]
    n_draws: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// Destination file for the columnar sample.
    #[arg(long)]
    out: PathBuf,
    /// Prior hyperparameters a0,b0,a1,b1,a2,b2.
    #[arg(long, value_delimiter = ',')]
    prior: Option<Vec<f64>>,
}

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum Format {
    Human,
    Json,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        // build the global pool up front; results do not depend on it
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    let result = match cli.command {
        Command::Estimate(args) => cmd_estimate(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Optimize(args) => cmd_optimize(args),
        Command::Gof(args) => cmd_gof(args),
        Command::SamplePosterior(args) => cmd_sample_posterior(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn resolve_seed(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(rand::random)
}

fn parse_prior(values: &Option<Vec<f64>>) -> Result<PriorHyper, CliError> {
    match values {
        None => Ok(PriorHyper::noninformative()),
        Some(v) if v.len() == 6 => {
            PriorHyper::new(v[0], v[1], v[2], v[3], v[4], v[5]).map_err(CliError::from)
        }
        Some(v) => Err(CliError::Validation(format!(
            "--prior needs six values a0,b0,a1,b1,a2,b2, got {}",
            v.len()
        ))),
    }
}

fn dataset_summary(ds: &Dataset) -> Result<(stepstress::ObservedData, DatasetSummary), CliError> {
    let obs = ds.observed().map_err(CliError::from)?;
    let summary = DatasetSummary {
        label: ds.label.clone(),
        n: obs.n(),
        n_star: obs.n_star(),
        n1_star: obs.n1_star(),
        n2_star: obs.n2_star(),
        tau1: obs.tau1(),
        tau_star: obs.tau_star(),
        censored: obs.censored_count(),
        digest: ds.digest(),
    };
    Ok((obs, summary))
}

// ---------------------------------------------------------------------------
// estimate
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct MleOut {
    alpha: f64,
    theta1: f64,
    theta2: f64,
    beta: f64,
    loglik: f64,
    boundary: bool,
}

fn cmd_estimate(args: EstimateArgs) -> Result<(), CliError> {
    for &level in &args.levels {
        if !(level > 0.0 && level < 1.0) {
            return Err(CliError::Validation(format!("level {level} outside (0,1)")));
        }
    }
    let seed = resolve_seed(args.seed);
    let prior = parse_prior(&args.prior)?;
    let ds = Dataset::load(&args.data)?;
    let (obs, summary) = dataset_summary(&ds)?;

    let sample =
        draw_importance_sample(&obs, &prior, args.n_draws, RngStream::new(seed, 0))?;
    let estimates = PointEstimates {
        alpha: sample.bayes_estimate(g::alpha),
        theta1: sample.bayes_estimate(g::theta1),
        theta2: sample.bayes_estimate(g::theta2),
        beta: sample.bayes_estimate(g::beta),
    };
    let ess = sample.ess();
    let ess_warning = ess / (args.n_draws as f64) < 0.01;

    let mle = fit_mle(&obs).ok().map(|fit| MleOut {
        alpha: fit.alpha_hat,
        theta1: fit.theta1_hat,
        theta2: fit.theta2_hat,
        beta: fit.beta_hat,
        loglik: fit.loglik,
        boundary: fit.boundary,
    });

    type GFn = fn(&WeightedDraw) -> f64;
    let params: [(&str, GFn); 4] = [
        ("alpha", g::alpha),
        ("theta1", g::theta1),
        ("theta2", g::theta2),
        ("beta", g::beta),
    ];
    let mut intervals: BTreeMap<String, Vec<IntervalTriple>> = BTreeMap::new();
    for (name, gf) in params {
        let mut rows = Vec::new();
        for &level in &args.levels {
            let gamma = 1.0 - level;
            let pick = |kind| -> Result<IntervalOut, CliError> {
                let ci = sample.credible_interval(gf, gamma, kind)?;
                Ok(IntervalOut { lower: ci.lower, upper: ci.upper })
            };
            rows.push(IntervalTriple {
                level,
                left: pick(IntervalKind::Left)?,
                symmetric: pick(IntervalKind::Symmetric)?,
                hpd: pick(IntervalKind::Hpd)?,
            });
        }
        intervals.insert(name.to_string(), rows);
    }

    let report = json!({
        "config": {
            "command": "estimate",
            "data": args.data.display().to_string(),
            "n_draws": args.n_draws,
            "seed": seed,
            "levels": args.levels,
            "prior": prior_echo(&prior),
        },
        "dataset": summary,
        "estimates": estimates,
        "ess": ess,
        "ess_warning": ess_warning,
        "mle": mle,
        "intervals": intervals,
    });

    let text = match args.format {
        Format::Json => serde_json::to_string_pretty(&report).expect("serializable"),
        Format::Human => {
            let mut s = String::new();
            s.push_str(&format!(
                "# estimate: data={} n_draws={} seed={} prior={}\n",
                args.data.display(),
                args.n_draws,
                seed,
                prior_echo(&prior)
            ));
            s.push_str(&format!(
                "# dataset: label={} n={} n*={} (n1*={}, n2*={}) tau1={} tau*={} censored={}\n",
                summary.label, summary.n, summary.n_star, summary.n1_star, summary.n2_star,
                summary.tau1, summary.tau_star, summary.censored
            ));
            s.push_str(&format!("ess: {ess:.1} of {}\n", args.n_draws));
            if ess_warning {
                s.push_str("warning: effective sample size below 1% of draws; estimates are noisy\n");
            }
            s.push_str(&format!(
                "bayes estimates: alpha={:.4} theta1={:.4} theta2={:.4} beta={:.4}\n",
                estimates.alpha, estimates.theta1, estimates.theta2, estimates.beta
            ));
            match &mle {
                Some(m) => s.push_str(&format!(
                    "mle: alpha={:.4} theta1={:.4} theta2={:.4} beta={:.4} loglik={:.4}{}\n",
                    m.alpha, m.theta1, m.theta2, m.beta, m.loglik,
                    if m.boundary { " (boundary)" } else { "" }
                )),
                None => s.push_str("mle: unavailable for this dataset\n"),
            }
            s.push_str("intervals (lower, upper):\n");
            for (name, rows) in &intervals {
                for row in rows {
                    s.push_str(&format!(
                        "  {:7} {:>4.0}%  left ({:.4}, {:.4})  symmetric ({:.4}, {:.4})  hpd ({:.4}, {:.4})\n",
                        name, row.level * 100.0,
                        row.left.lower, row.left.upper,
                        row.symmetric.lower, row.symmetric.upper,
                        row.hpd.lower, row.hpd.upper
                    ));
                }
            }
            s
        }
    };
    println!("{text}");
    if let Some(out) = &args.out {
        write_text(out, &text)?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

fn scheme_fields(spec: CensoringSpec) -> (&'static str, String, String) {
    match spec {
        CensoringSpec::Complete => ("complete", String::new(), String::new()),
        CensoringSpec::TypeI { tau2 } => ("type-i", tau2.to_string(), String::new()),
        CensoringSpec::TypeII { r } => ("type-ii", String::new(), r.to_string()),
        CensoringSpec::HybridI { r, tau2 } => ("hybrid-i", tau2.to_string(), r.to_string()),
        CensoringSpec::HybridII { r, tau2 } => ("hybrid-ii", tau2.to_string(), r.to_string()),
    }
}

fn cmd_simulate(args: SimulateArgs) -> Result<(), CliError> {
    let mut file: SimulateFile = match (&args.config, &args.preset) {
        (Some(path), None) => load_toml(path)?,
        (None, Some(name)) => simulate_preset(name)?,
        (None, None) => {
            return Err(CliError::Validation("simulate needs --config or --preset".into()))
        }
        (Some(_), Some(_)) => unreachable!("clap conflicts_with"),
    };
    if let Some(reps) = args.reps {
        file.reps = reps;
    }
    if let Some(n_draws) = args.n_draws {
        file.n_draws = n_draws;
    }
    let seed = resolve_seed(args.seed.or(file.seed));
    let configs = file.into_configs(seed)?;
    println!(
        "# simulate: rows={} reps={} n_draws={} gamma={} seed={} prior={}",
        configs.len(),
        configs[0].reps,
        configs[0].n_draws,
        configs[0].gamma,
        seed,
        prior_echo(&configs[0].prior),
    );

    let results = run_table(&configs);

    let mut csv = String::from(
        "alpha_true,theta1_true,theta2_true,n,tau1,scheme,tau2,r,reps,n_draws,seed,\
         ae_alpha,mse_alpha,ae_theta1,mse_theta1,ae_theta2,mse_theta2,\
         cp_alpha_left,al_alpha_left,cp_alpha_symmetric,al_alpha_symmetric,cp_alpha_hpd,al_alpha_hpd,\
         cp_theta1_left,al_theta1_left,cp_theta1_symmetric,al_theta1_symmetric,cp_theta1_hpd,al_theta1_hpd,\
         cp_theta2_left,al_theta2_left,cp_theta2_symmetric,al_theta2_symmetric,cp_theta2_hpd,al_theta2_hpd,\
         redraws,failures,mean_ess,error\n",
    );
    let mut rows_json = Vec::new();
    for (cfg, res) in &results {
        let (scheme, tau2, r) = scheme_fields(cfg.spec);
        let head = format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            cfg.truth.alpha(), cfg.truth.theta1(), cfg.truth.theta2(),
            cfg.n, cfg.truth.tau1(), scheme, tau2, r, cfg.reps, cfg.n_draws, cfg.seed
        );
        match res {
            Ok(row) => {
                let mut line = head;
                for p in [row.alpha, row.theta1, row.theta2] {
                    line.push_str(&format!(",{},{}", p.ae, p.mse));
                }
                // reorder so the CP/AL block groups by parameter then kind
                for p in [row.alpha, row.theta1, row.theta2] {
                    for s in p.intervals {
                        line.push_str(&format!(",{},{}", s.cp, s.al));
                    }
                }
                line.push_str(&format!(",{},{},{},\n", row.redraws, row.failures, row.mean_ess));
                csv.push_str(&line);
                rows_json.push(json!({
                    "config": {
                        "alpha": cfg.truth.alpha(), "theta1": cfg.truth.theta1(),
                        "theta2": cfg.truth.theta2(), "tau1": cfg.truth.tau1(),
                        "n": cfg.n, "scheme": scheme, "tau2": tau2, "r": r,
                        "reps": cfg.reps, "n_draws": cfg.n_draws, "seed": cfg.seed,
                    },
                    "row": row,
                }));
            }
            Err(e) => {
                // pad the 27 statistic columns, then the error column
                let blanks = ",".repeat(28);
                csv.push_str(&format!("{head}{blanks}{e}\n"));
                rows_json.push(json!({
                    "config": { "n": cfg.n, "scheme": scheme },
                    "error": e.to_string(),
                }));
            }
        }
    }

    let csv_path = args.out.with_extension("csv");
    let json_path = args.out.with_extension("json");
    write_text(&csv_path, &csv)?;
    let doc = json!({
        "config": {
            "command": "simulate",
            "seed": seed,
            "reps": configs[0].reps,
            "n_draws": configs[0].n_draws,
            "gamma": configs[0].gamma,
            "prior": prior_echo(&configs[0].prior),
        },
        "rows": rows_json,
    });
    write_text(&json_path, &serde_json::to_string_pretty(&doc).expect("serializable"))?;
    println!("wrote {} and {}", csv_path.display(), json_path.display());
    Ok(())
}

// ---------------------------------------------------------------------------
// optimize
// ---------------------------------------------------------------------------

fn cmd_optimize(args: OptimizeArgs) -> Result<(), CliError> {
    let mut file: OptimizeFile = match (&args.config, &args.preset) {
        (Some(path), None) => load_toml(path)?,
        (None, Some(name)) => optimize_preset(name, args.rows.as_deref())?,
        (None, None) => {
            return Err(CliError::Validation("optimize needs --config or --preset".into()))
        }
        (Some(_), Some(_)) => unreachable!("clap conflicts_with"),
    };
    if let Some(reps) = args.reps {
        file.reps = reps;
    }
    let seed = resolve_seed(args.seed.or(file.seed));
    let configs = file.into_configs(seed)?;
    println!(
        "# optimize: designs={} reps-per-point={} seed={} prior={}",
        configs.len(),
        configs[0].reps,
        seed,
        prior_echo(&configs[0].prior),
    );

    let mut csv = String::from(
        "design,alpha,theta1,theta2,n,tau1,cv_sum,n_valid,n_excluded,n_fallback,\
         var_alpha,var_theta1,var_theta2,mean_alpha,mean_theta1,mean_theta2\n",
    );
    let mut optima = Vec::new();
    for (idx, cfg) in configs.iter().enumerate() {
        let (tau_opt, curve) = stepstress::design::optimize_tau(cfg)?;
        for p in &curve {
            csv.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                idx,
                cfg.params.alpha(),
                cfg.params.theta1(),
                cfg.params.theta2(),
                cfg.n,
                p.tau1,
                p.cv_sum,
                p.n_valid,
                p.n_excluded,
                p.n_fallback,
                p.variances[0],
                p.variances[1],
                p.variances[2],
                p.means[0],
                p.means[1],
                p.means[2],
            ));
        }
        println!(
            "design {idx}: alpha={} n={} -> tau_opt={tau_opt}",
            cfg.params.alpha(),
            cfg.n
        );
        optima.push(json!({
            "design": idx,
            "alpha": cfg.params.alpha(),
            "theta1": cfg.params.theta1(),
            "theta2": cfg.params.theta2(),
            "n": cfg.n,
            "reps": cfg.reps,
            "tau_opt": tau_opt,
            "grid_points": curve.len(),
        }));
    }

    let csv_path = args.out.with_extension("csv");
    let json_path = args.out.with_extension("json");
    write_text(&csv_path, &csv)?;
    let doc = json!({
        "config": {
            "command": "optimize",
            "seed": seed,
            "reps": configs[0].reps,
            "prior": prior_echo(&configs[0].prior),
        },
        "optima": optima,
    });
    write_text(&json_path, &serde_json::to_string_pretty(&doc).expect("serializable"))?;
    println!("wrote {} and {}", csv_path.display(), json_path.display());
    Ok(())
}

// ---------------------------------------------------------------------------
// gof
// ---------------------------------------------------------------------------

fn cmd_gof(args: GofArgs) -> Result<(), CliError> {
    let ds = Dataset::load(&args.data)?;
    let (obs, summary) = dataset_summary(&ds)?;
    let seed = resolve_seed(args.seed);

    let mut fits: Vec<(String, StepStressParams)> = Vec::new();
    if let Some(p) = &args.params {
        if p.len() != 3 {
            return Err(CliError::Validation(format!(
                "--params needs alpha,theta1,theta2, got {} values",
                p.len()
            )));
        }
        let fitted = StepStressParams::new(p[0], p[1], p[2], obs.tau1())?;
        fits.push(("explicit".into(), fitted));
    } else {
        let source = args.source.to_ascii_lowercase();
        if !["bayes", "mle", "both"].contains(&source.as_str()) {
            return Err(CliError::Validation(format!(
                "unknown --source '{}' (try bayes, mle, both)",
                args.source
            )));
        }
        if source == "bayes" || source == "both" {
            let prior = PriorHyper::noninformative();
            let sample =
                draw_importance_sample(&obs, &prior, args.n_draws, RngStream::new(seed, 0))?;
            let fitted = StepStressParams::new(
                sample.bayes_estimate(g::alpha),
                sample.bayes_estimate(g::theta1),
                sample.bayes_estimate(g::theta2),
                obs.tau1(),
            )?;
            fits.push(("bayes".into(), fitted));
        }
        if source == "mle" || source == "both" {
            let fit = fit_mle(&obs)?;
            let fitted =
                StepStressParams::new(fit.alpha_hat, fit.theta1_hat, fit.theta2_hat, obs.tau1())?;
            fits.push(("mle".into(), fitted));
        }
    }

    let mut reports = Vec::new();
    for (source, fitted) in &fits {
        let report = ks_test(&obs, fitted)?;
        reports.push(json!({
            "source": source,
            "fitted": {
                "alpha": fitted.alpha(),
                "theta1": fitted.theta1(),
                "theta2": fitted.theta2(),
            },
            "statistic": report.statistic,
            "p_value": report.p_value,
            "n_used": report.n_used,
            "approximate_for_censored": obs.censored_count() > 0,
        }));
    }

    let doc = json!({
        "config": {
            "command": "gof",
            "data": args.data.display().to_string(),
            "seed": seed,
            "n_draws": args.n_draws,
        },
        "dataset": summary,
        "reports": reports,
    });
    let text = match args.format {
        Format::Json => serde_json::to_string_pretty(&doc).expect("serializable"),
        Format::Human => {
            let mut s = format!(
                "# gof: data={} seed={seed}\n",
                args.data.display()
            );
            for r in &reports {
                s.push_str(&format!(
                    "{}: D={:.4} p={:.4} (n*={}{})\n",
                    r["source"].as_str().unwrap(),
                    r["statistic"].as_f64().unwrap(),
                    r["p_value"].as_f64().unwrap(),
                    r["n_used"],
                    if obs.censored_count() > 0 { ", censored: approximate" } else { "" },
                ));
            }
            s
        }
    };
    println!("{text}");
    if let Some(out) = &args.out {
        write_text(out, &text)?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// sample-posterior
// ---------------------------------------------------------------------------

fn cmd_sample_posterior(args: SamplePosteriorArgs) -> Result<(), CliError> {
    let ds = Dataset::load(&args.data)?;
    let (obs, _) = dataset_summary(&ds)?;
    let prior = parse_prior(&args.prior)?;
    let seed = resolve_seed(args.seed);
    let sample = draw_importance_sample(&obs, &prior, args.n_draws, RngStream::new(seed, 0))?;
    let text = save_posterior(&sample, seed, &prior, &ds.digest());
    write_text(&args.out, &text)?;
    // integrity check: the persisted file must reconstruct the sample exactly
    let reloaded = load_posterior(&std::fs::read_to_string(&args.out).map_err(CliError::Io)?)?;
    if reloaded != sample {
        return Err(CliError::Io(std::io::Error::other(
            "persisted sample failed the round-trip check",
        )));
    }
    println!(
        "# sample-posterior: data={} n_draws={} seed={} prior={} ess={:.1}",
        args.data.display(),
        args.n_draws,
        seed,
        prior_echo(&prior),
        sample.ess()
    );
    println!("wrote {}", args.out.display());
    Ok(())
}

