//! Cumulative-exposure step-stress lifetime model and censoring schemes.
//!
//! Under the cumulative exposure model a unit's lifetime follows
//! GE(alpha, theta1) up to the stress change at `tau1` and afterwards the
//! stress-2 distribution resumed at the equivalent exposure, giving the CDF
//!
//! ```text
//! F(t) = (1 - e^{-theta1 t})^alpha                              0 < t <= tau1
//!        (1 - e^{-theta2 (t + (theta1/theta2) tau1 - tau1)})^alpha    t > tau1
//! ```
//!
//! Observations at exactly `tau1` count as stress-1 failures and observations
//! at exactly the termination time count as observed, matching the closed
//! branch intervals above (ties carry zero probability under the continuous
//! model, but determinism wants a rule).

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ge::GEParams;
use crate::rng::RngStream;
use crate::util::ln_one_minus_exp_neg;

/// Model triple (alpha, theta1, theta2) plus the stress-change time tau1,
/// carrying the order restriction theta1 < theta2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepStressParams {
    alpha: f64,
    theta1: f64,
    theta2: f64,
    tau1: f64,
}

impl StepStressParams {
    pub fn new(alpha: f64, theta1: f64, theta2: f64, tau1: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidParameter(format!("alpha must be > 0, got {alpha}")));
        }
        if !(theta1 > 0.0 && theta1.is_finite()) || !(theta2.is_finite()) || theta1 >= theta2 {
            return Err(Error::InvalidParameter(format!(
                "rates must satisfy 0 < theta1 < theta2, got theta1={theta1}, theta2={theta2}"
            )));
        }
        if !(tau1 > 0.0 && tau1.is_finite()) {
            return Err(Error::InvalidParameter(format!("tau1 must be > 0, got {tau1}")));
        }
        Ok(Self { alpha, theta1, theta2, tau1 })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn theta1(&self) -> f64 {
        self.theta1
    }
    pub fn theta2(&self) -> f64 {
        self.theta2
    }
    pub fn tau1(&self) -> f64 {
        self.tau1
    }

    /// beta = theta1 / theta2, always in (0, 1).
    pub fn beta(&self) -> f64 {
        self.theta1 / self.theta2
    }

    /// Exposure argument of the second branch: t - tau1 + beta tau1.
    #[inline]
    fn shifted(&self, t: f64) -> f64 {
        t - self.tau1 + self.beta() * self.tau1
    }

    pub fn cdf(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let x = if t <= self.tau1 {
            self.theta1 * t
        } else {
            self.theta2 * self.shifted(t)
        };
        (self.alpha * ln_one_minus_exp_neg(x)).exp().clamp(0.0, 1.0)
    }

    pub fn pdf(&self, t: f64) -> f64 {
        if t <= self.tau1 {
            GEParams::new(self.alpha, self.theta1).expect("validated").pdf(t)
        } else {
            let x = self.theta2 * self.shifted(t);
            (self.alpha.ln() + self.theta2.ln() + (self.alpha - 1.0) * ln_one_minus_exp_neg(x) - x)
                .exp()
        }
    }

    /// One inversion draw: uniforms below F(tau1) map through the stress-1
    /// quantile, the rest through the shifted stress-2 branch.
    pub fn sample_with<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.gen();
        let threshold = self.cdf(self.tau1);
        if u <= threshold {
            GEParams::new(self.alpha, self.theta1)
                .expect("validated")
                .quantile(u)
                .expect("u in [0,1)")
        } else {
            let base = -(-u.powf(1.0 / self.alpha)).ln_1p() / self.theta2;
            self.tau1 - self.beta() * self.tau1 + base
        }
    }

    /// `n` i.i.d. draws, sorted ascending.
    pub fn sample(&self, n: usize, stream: RngStream) -> Vec<f64> {
        let mut rng = stream.rng();
        let mut out: Vec<f64> = (0..n).map(|_| self.sample_with(&mut rng)).collect();
        out.sort_by(|a, b| a.partial_cmp(b).unwrap());
        out
    }
}

/// Experiment termination rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "kebab-case")]
pub enum CensoringSpec {
    /// Run until every unit fails.
    Complete,
    /// Stop at the prefixed time tau2.
    TypeI { tau2: f64 },
    /// Stop at the r-th failure.
    TypeII { r: usize },
    /// Stop at min(t_{r:n}, tau2).
    HybridI { r: usize, tau2: f64 },
    /// Stop at max(t_{r:n}, tau2); guarantees at least r failures.
    HybridII { r: usize, tau2: f64 },
}

impl CensoringSpec {
    fn validate(&self, n: usize) -> Result<()> {
        let check_r = |r: usize| {
            if r == 0 || r > n {
                Err(Error::InvalidParameter(format!(
                    "censoring rank r must be in 1..=n ({n}), got {r}"
                )))
            } else {
                Ok(())
            }
        };
        let check_tau = |tau2: f64| {
            if tau2 > 0.0 && tau2.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("tau2 must be > 0, got {tau2}")))
            }
        };
        match *self {
            CensoringSpec::Complete => Ok(()),
            CensoringSpec::TypeI { tau2 } => check_tau(tau2),
            CensoringSpec::TypeII { r } => check_r(r),
            CensoringSpec::HybridI { r, tau2 } | CensoringSpec::HybridII { r, tau2 } => {
                check_r(r)?;
                check_tau(tau2)
            }
        }
    }
}

/// Chronologically sorted observed failures plus the censoring bookkeeping
/// (n1*, n2*, n*, tau*) the posterior needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservedData {
    times: Vec<f64>,
    n: usize,
    n1_star: usize,
    tau_star: f64,
    tau1: f64,
    spec: CensoringSpec,
}

impl ObservedData {
    /// Apply a censoring scheme to a sorted (possibly already truncated)
    /// sample. `times` may hold fewer than `n` entries as long as every entry
    /// beyond the termination time is absent; this makes re-censoring an
    /// already-censored dataset a no-op and lets callers ingest published
    /// censored data directly.
    pub fn censor(times: &[f64], n: usize, tau1: f64, spec: CensoringSpec) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidData("n must be at least 1".into()));
        }
        if times.len() > n {
            return Err(Error::InvalidData(format!(
                "{} failure times for {} units",
                times.len(),
                n
            )));
        }
        if !(tau1 > 0.0 && tau1.is_finite()) {
            return Err(Error::InvalidParameter(format!("tau1 must be > 0, got {tau1}")));
        }
        spec.validate(n)?;
        for w in times.windows(2) {
            if !(w[0] < w[1]) {
                return Err(Error::InvalidData(format!(
                    "failure times must be strictly increasing ({} then {})",
                    w[0], w[1]
                )));
            }
        }
        if let Some(&first) = times.first() {
            if !(first > 0.0) {
                return Err(Error::InvalidData(format!(
                    "failure times must be strictly positive, got {first}"
                )));
            }
        }

        let order_stat = |r: usize| times.get(r - 1).copied();
        let tau_star = match spec {
            CensoringSpec::Complete => {
                if times.len() != n {
                    return Err(Error::InvalidData(format!(
                        "complete data needs all {n} failures, got {}",
                        times.len()
                    )));
                }
                *times.last().expect("n >= 1")
            }
            CensoringSpec::TypeI { tau2 } => tau2,
            CensoringSpec::TypeII { r } => order_stat(r).ok_or_else(|| {
                Error::InvalidData(format!("type-II censoring needs t_(r), have {} < r = {r}", times.len()))
            })?,
            CensoringSpec::HybridI { r, tau2 } => match order_stat(r) {
                Some(tr) => tr.min(tau2),
                // t_(r) missing means it lies beyond every observed time, which
                // a hybrid-I truncation only allows when t_(r) > tau2
                None => tau2,
            },
            CensoringSpec::HybridII { r, tau2 } => order_stat(r)
                .ok_or_else(|| {
                    Error::InvalidData(format!(
                        "hybrid-II censoring needs t_(r), have {} < r = {r}",
                        times.len()
                    ))
                })?
                .max(tau2),
        };

        let observed: Vec<f64> = times.iter().copied().filter(|&t| t <= tau_star).collect();
        let n1_star = observed.iter().filter(|&&t| t <= tau1).count();
        Ok(Self {
            times: observed,
            n,
            n1_star,
            tau_star,
            tau1,
            spec,
        })
    }

    /// Complete (uncensored) data.
    pub fn complete(times: &[f64], tau1: f64) -> Result<Self> {
        Self::censor(times, times.len(), tau1, CensoringSpec::Complete)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }
    /// Times at or before tau1 (stress level 1).
    pub fn stress1_times(&self) -> &[f64] {
        &self.times[..self.n1_star]
    }
    /// Times after tau1 (stress level 2).
    pub fn stress2_times(&self) -> &[f64] {
        &self.times[self.n1_star..]
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn n1_star(&self) -> usize {
        self.n1_star
    }
    pub fn n2_star(&self) -> usize {
        self.times.len() - self.n1_star
    }
    pub fn n_star(&self) -> usize {
        self.times.len()
    }
    /// Number of units still running at tau*.
    pub fn censored_count(&self) -> usize {
        self.n - self.times.len()
    }
    pub fn tau_star(&self) -> f64 {
        self.tau_star
    }
    pub fn tau1(&self) -> f64 {
        self.tau1
    }
    pub fn spec(&self) -> CensoringSpec {
        self.spec
    }

    /// True when censoring removed every failure; estimation modules reject
    /// such data because the posterior is improper under near-flat priors.
    pub fn is_degenerate(&self) -> bool {
        self.times.is_empty()
    }

    pub(crate) fn require_failures(&self) -> Result<()> {
        if self.is_degenerate() {
            Err(Error::DegenerateData(
                "no observed failures before the termination time".into(),
            ))
        } else {
            Ok(())
        }
    }
}
