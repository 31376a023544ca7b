//! Monte Carlo harness for the coverage/length experiments.
//!
//! Each replication draws a complete sample, censors it, runs the importance
//! sampler and records Bayes estimates plus the three interval kinds for the
//! three parameters. Aggregates are the table metrics: average estimate (AE),
//! mean squared error (MSE), coverage probability (CP, percent) and average
//! length (AL). Replications whose censored sample carries no failures are
//! redrawn from a fresh child stream and counted.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cem::{CensoringSpec, ObservedData, StepStressParams};
use crate::error::{Error, Result};
use crate::posterior::{draw_importance_sample, g, IntervalKind, PriorHyper, WeightedDraw};
use crate::rng::RngStream;
use crate::util::CompensatedSum;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub truth: StepStressParams,
    pub n: usize,
    pub spec: CensoringSpec,
    pub reps: usize,
    /// Importance-sample size per replication.
    pub n_draws: usize,
    pub prior: PriorHyper,
    /// Interval tail probability (0.05 for the 95% tables).
    pub gamma: f64,
    pub seed: u64,
}

impl ExperimentConfig {
    fn validate(&self) -> Result<()> {
        if self.reps == 0 {
            return Err(Error::InvalidParameter("reps must be >= 1".into()));
        }
        if self.n_draws < 2 {
            return Err(Error::InvalidParameter("n_draws must be >= 2".into()));
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "gamma must lie in (0,1), got {}",
                self.gamma
            )));
        }
        if self.n == 0 {
            return Err(Error::InvalidParameter("n must be >= 1".into()));
        }
        Ok(())
    }
}

/// Coverage (percent) and average length for one interval kind.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct IntervalStats {
    pub cp: f64,
    pub al: f64,
}

/// Per-parameter aggregates; interval stats ordered (left, symmetric, hpd).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ParamStats {
    pub ae: f64,
    pub mse: f64,
    pub intervals: [IntervalStats; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub alpha: ParamStats,
    pub theta1: ParamStats,
    pub theta2: ParamStats,
    /// Replications redrawn because censoring left no failures.
    pub redraws: usize,
    /// Replications dropped because posterior summarization failed.
    pub failures: usize,
    pub mean_ess: f64,
}

pub const INTERVAL_KINDS: [IntervalKind; 3] =
    [IntervalKind::Left, IntervalKind::Symmetric, IntervalKind::Hpd];

struct RepOutcome {
    est: [f64; 3],
    // [param][kind] -> (covered, length)
    intervals: [[(bool, f64); 3]; 3],
    redraws: usize,
    ess: f64,
}

fn run_rep(cfg: &ExperimentConfig, rep: u64) -> std::result::Result<RepOutcome, usize> {
    let root = RngStream::new(cfg.seed, 0).child(rep);
    let mut redraws = 0usize;
    // redraw until the censored sample carries at least one failure
    let data: ObservedData = loop {
        let attempt = redraws as u64;
        let times = cfg.truth.sample(cfg.n, root.child(2 * attempt));
        let data = ObservedData::censor(&times, cfg.n, cfg.truth.tau1(), cfg.spec)
            .expect("generated sample is valid");
        if !data.is_degenerate() {
            break data;
        }
        redraws += 1;
        if redraws > 1000 {
            return Err(redraws);
        }
    };
    let stream = root.child(2 * redraws as u64 + 1);
    let sample = match draw_importance_sample(&data, &cfg.prior, cfg.n_draws, stream) {
        Ok(s) => s,
        Err(_) => return Err(redraws),
    };

    let gs: [fn(&WeightedDraw) -> f64; 3] = [g::alpha, g::theta1, g::theta2];
    let truth = [cfg.truth.alpha(), cfg.truth.theta1(), cfg.truth.theta2()];
    let mut est = [0.0; 3];
    let mut intervals = [[(false, 0.0); 3]; 3];
    for (pi, gf) in gs.iter().enumerate() {
        est[pi] = sample.bayes_estimate(gf);
        for (ki, kind) in INTERVAL_KINDS.iter().enumerate() {
            match sample.credible_interval(gf, cfg.gamma, *kind) {
                Ok(ci) => {
                    // closed endpoints: truth exactly on an endpoint counts
                    let covered = ci.lower <= truth[pi] && truth[pi] <= ci.upper;
                    intervals[pi][ki] = (covered, ci.upper - ci.lower);
                }
                Err(_) => return Err(redraws),
            }
        }
    }
    Ok(RepOutcome {
        est,
        intervals,
        redraws,
        ess: sample.ess(),
    })
}

/// Run the full experiment. Identical config and seed give identical rows
/// whatever the rayon thread count.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentRow> {
    cfg.validate()?;
    let outcomes: Vec<std::result::Result<RepOutcome, usize>> = (0..cfg.reps as u64)
        .into_par_iter()
        .map(|rep| run_rep(cfg, rep))
        .collect();

    let truth = [cfg.truth.alpha(), cfg.truth.theta1(), cfg.truth.theta2()];
    let mut est_sum = [CompensatedSum::new(); 3];
    let mut sq_sum = [CompensatedSum::new(); 3];
    let mut cover = [[0usize; 3]; 3];
    let mut len_sum = [[CompensatedSum::new(); 3]; 3];
    let mut ess_sum = CompensatedSum::new();
    let mut redraws = 0usize;
    let mut failures = 0usize;
    let mut used = 0usize;

    for outcome in &outcomes {
        match outcome {
            Ok(o) => {
                used += 1;
                redraws += o.redraws;
                ess_sum.add(o.ess);
                for pi in 0..3 {
                    est_sum[pi].add(o.est[pi]);
                    let d = o.est[pi] - truth[pi];
                    sq_sum[pi].add(d * d);
                    for ki in 0..3 {
                        cover[pi][ki] += o.intervals[pi][ki].0 as usize;
                        len_sum[pi][ki].add(o.intervals[pi][ki].1);
                    }
                }
            }
            Err(r) => {
                failures += 1;
                redraws += r;
            }
        }
    }
    if used == 0 {
        return Err(Error::DegenerateData(
            "every replication failed to produce a usable posterior".into(),
        ));
    }

    let m = used as f64;
    let make = |pi: usize| {
        let mut intervals = [IntervalStats::default(); 3];
        for ki in 0..3 {
            intervals[ki] = IntervalStats {
                cp: 100.0 * cover[pi][ki] as f64 / m,
                al: len_sum[pi][ki].value() / m,
            };
        }
        ParamStats {
            ae: est_sum[pi].value() / m,
            mse: sq_sum[pi].value() / m,
            intervals,
        }
    };
    Ok(ExperimentRow {
        alpha: make(0),
        theta1: make(1),
        theta2: make(2),
        redraws,
        failures,
        mean_ess: ess_sum.value() / m,
    })
}

/// Batch driver: rows in input order, each independent; per-row errors are
/// reported in place without aborting the batch.
pub fn run_table(configs: &[ExperimentConfig]) -> Vec<(ExperimentConfig, Result<ExperimentRow>)> {
    configs
        .iter()
        .map(|cfg| (*cfg, run_experiment(cfg)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick_cfg() -> ExperimentConfig {
        ExperimentConfig {
            truth: StepStressParams::new(0.6, 0.1, 0.2, 5.0).unwrap(),
            n: 20,
            spec: CensoringSpec::Complete,
            reps: 10,
            n_draws: 2_000,
            prior: PriorHyper::noninformative(),
            gamma: 0.05,
            seed: 4,
        }
    }

    #[test]
    fn single_rep_identity() {
        let mut cfg = quick_cfg();
        cfg.reps = 1;
        let row = run_experiment(&cfg).unwrap();
        // with one replication the AE is that replication's estimate and the
        // MSE its exact squared error
        let d = row.alpha.ae - 0.6;
        assert!((row.alpha.mse - d * d).abs() < 1e-15);
        for ki in 0..3 {
            let cp = row.alpha.intervals[ki].cp;
            assert!(cp == 0.0 || cp == 100.0);
        }
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let cfg = quick_cfg();
        let pool1 = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let pool4 = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = pool1.install(|| run_experiment(&cfg).unwrap());
        let b = pool4.install(|| run_experiment(&cfg).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn table_of_one_matches_run_experiment() {
        let cfg = quick_cfg();
        let direct = run_experiment(&cfg).unwrap();
        let table = run_table(&[cfg]);
        assert_eq!(table.len(), 1);
        assert_eq!(*table[0].1.as_ref().unwrap(), direct);
    }

    #[test]
    fn config_validation_rejects_nonsense() {
        let mut cfg = quick_cfg();
        cfg.reps = 0;
        assert!(run_experiment(&cfg).is_err());
        let mut cfg = quick_cfg();
        cfg.gamma = 1.0;
        assert!(run_experiment(&cfg).is_err());
        let mut cfg = quick_cfg();
        cfg.n_draws = 1;
        assert!(run_experiment(&cfg).is_err());
    }

    #[test]
    fn degenerate_censoring_triggers_redraws() {
        // tau2 so small that many samples lose every failure
        let mut cfg = quick_cfg();
        cfg.n = 3;
        cfg.spec = CensoringSpec::TypeI { tau2: 0.05 };
        cfg.reps = 30;
        cfg.n_draws = 500;
        let row = run_experiment(&cfg).unwrap();
        assert!(row.redraws > 0, "expected some redraws");
    }

    #[test]
    fn mse_decreases_with_sample_size() {
        let mut small = quick_cfg();
        small.n = 10;
        small.reps = 150;
        small.n_draws = 4_000;
        small.truth = StepStressParams::new(0.6, 0.1, 0.2, 7.0).unwrap();
        let mut large = small;
        large.n = 50;
        let row_small = run_experiment(&small).unwrap();
        let row_large = run_experiment(&large).unwrap();
        assert!(row_large.alpha.mse < row_small.alpha.mse);
        assert!(row_large.theta1.mse < row_small.theta1.mse);
        assert!(row_large.theta2.mse < row_small.theta2.mse);
    }

    /// Full published grid at replication scale; several minutes of runtime,
    /// so opt-in: `cargo test -p stepstress full_grid -- --ignored`.
    #[test]
    #[ignore]
    fn full_grid_coverage_envelope() {
        for alpha in [0.6, 1.0, 1.5] {
            for n in [10usize, 20, 30, 40, 50] {
                for tau1 in [5.0, 7.0, 9.0] {
                    let cfg = ExperimentConfig {
                        truth: StepStressParams::new(alpha, 0.1, 0.2, tau1).unwrap(),
                        n,
                        spec: CensoringSpec::Complete,
                        reps: 1000,
                        n_draws: 15000,
                        prior: PriorHyper::noninformative(),
                        gamma: 0.05,
                        seed: 17,
                    };
                    let row = run_experiment(&cfg).unwrap();
                    for p in [row.alpha, row.theta1, row.theta2] {
                        for s in p.intervals {
                            assert!(
                                s.cp >= 90.0 && s.cp <= 100.0,
                                "alpha={alpha} n={n} tau1={tau1}: CP {}",
                                s.cp
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn coverage_in_loose_envelope() {
        // reduced-scale sanity band around the nominal 95% level
        let mut cfg = quick_cfg();
        cfg.n = 30;
        cfg.reps = 200;
        cfg.n_draws = 4_000;
        cfg.truth = StepStressParams::new(1.0, 0.1, 0.2, 7.0).unwrap();
        let row = run_experiment(&cfg).unwrap();
        for p in [row.alpha, row.theta1, row.theta2] {
            for s in p.intervals {
                assert!(
                    s.cp >= 85.0 && s.cp <= 100.0,
                    "coverage {} outside envelope",
                    s.cp
                );
                assert!(s.al > 0.0);
            }
        }
    }
}
