//! Order-restricted posterior inference by importance sampling.
//!
//! Writing theta1 = beta theta2 with beta in (0, 1), the prior is
//! alpha ~ Gamma(shape b0, rate a0), theta2 ~ Gamma(shape b1, rate a1),
//! beta ~ Beta(a2, b2), all independent. The posterior factorizes as
//! h(beta, theta2, alpha) times a tractable proposal
//!
//! ```text
//! beta   ~ Uniform(0, 1)
//! theta2 | beta        ~ Gamma(shape n* + b1, rate A1(beta))
//! alpha  | beta,theta2 ~ Gamma(shape n* + b0, rate A2(beta, theta2))
//! ```
//!
//! so Bayes estimates are weighted averages over proposal draws with weights
//! proportional to h. Weights are handled entirely in log space; the reported
//! effective sample size 1/sum(w_i^2) is the degeneracy diagnostic to watch.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cem::ObservedData;
use crate::error::{Error, Result};
use crate::ge::gamma_sample;
use crate::rng::RngStream;
use crate::util::{ln_one_minus_exp_neg, CompensatedSum};

/// Draws generated per RNG sub-stream. Fixed so that results are identical
/// whatever the thread count; changing it changes the stream layout.
pub const DRAW_BLOCK: usize = 4096;

/// Minimum effective sample size below which interval summaries are refused.
pub const MIN_ESS: f64 = 10.0;

/// Hyperparameters of the joint prior: (a0, b0) rate/shape for alpha,
/// (a1, b1) rate/shape for theta2, (a2, b2) for Beta(beta).
///
/// Note the rate-first order: the prior kernel is e^{-a alpha} alpha^{b-1}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PriorHyper {
    pub a0: f64,
    pub b0: f64,
    pub a1: f64,
    pub b1: f64,
    pub a2: f64,
    pub b2: f64,
}

impl PriorHyper {
    pub fn new(a0: f64, b0: f64, a1: f64, b1: f64, a2: f64, b2: f64) -> Result<Self> {
        for (name, v) in [("a0", a0), ("b0", b0), ("a1", a1), ("b1", b1), ("a2", a2), ("b2", b2)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "prior hyperparameter {name} must be > 0, got {v}"
                )));
            }
        }
        Ok(Self { a0, b0, a1, b1, a2, b2 })
    }

    /// The almost non-informative choice used throughout the simulation
    /// studies: a0 = b0 = a1 = b1 = 1e-4, a2 = b2 = 1.
    pub fn noninformative() -> Self {
        Self {
            a0: 1e-4,
            b0: 1e-4,
            a1: 1e-4,
            b1: 1e-4,
            a2: 1.0,
            b2: 1.0,
        }
    }
}

/// One proposal draw with its unnormalized log weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightedDraw {
    pub beta: f64,
    pub theta2: f64,
    pub alpha: f64,
    pub log_weight: f64,
}

impl WeightedDraw {
    /// Implied stress-1 rate; < theta2 for every draw since beta < 1.
    pub fn theta1(&self) -> f64 {
        self.beta * self.theta2
    }
}

/// A weighted posterior sample: draws, normalized weights, and the effective
/// sample size 1/sum(w^2).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosteriorSample {
    draws: Vec<WeightedDraw>,
    weights: Vec<f64>,
    ess: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IntervalKind {
    /// (smallest sampled value, weighted 1-gamma quantile).
    Left,
    /// Weighted gamma/2 and 1-gamma/2 quantiles.
    Symmetric,
    /// Minimal-width window of sorted draws holding mass 1-gamma.
    Hpd,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CredibleInterval {
    pub lower: f64,
    pub upper: f64,
    /// Credibility level 1 - gamma.
    pub level: f64,
    pub kind: IntervalKind,
}

/// A1(beta) = a1 + beta sum_{i<=n1*} t_i + sum_{n1*<i<=n*} (t_i - tau1 + tau1 beta);
/// the rate of the theta2 proposal. Strictly increasing in beta.
pub fn a1_stat(beta: f64, data: &ObservedData, prior: &PriorHyper) -> f64 {
    let tau1 = data.tau1();
    let s1: f64 = data.stress1_times().iter().sum();
    let s2: f64 = data.stress2_times().iter().map(|&t| t - tau1 + tau1 * beta).sum();
    prior.a1 + beta * s1 + s2
}

/// A2(beta, theta2) = a0 - sum log(1 - e^{-beta theta2 t_i})
///                       - sum log(1 - e^{-theta2 (t_i - tau1 + tau1 beta)});
/// the rate of the alpha proposal. Positive whenever a0 > 0.
pub fn a2_stat(beta: f64, theta2: f64, data: &ObservedData, prior: &PriorHyper) -> f64 {
    prior.a0 - log_product_terms(beta, theta2, data)
}

/// sum of ln(1 - e^{-.}) over both stress segments (each term negative).
fn log_product_terms(beta: f64, theta2: f64, data: &ObservedData) -> f64 {
    let tau1 = data.tau1();
    let mut s = 0.0;
    for &t in data.stress1_times() {
        s += ln_one_minus_exp_neg(beta * theta2 * t);
    }
    for &t in data.stress2_times() {
        s += ln_one_minus_exp_neg(theta2 * (t - tau1 + tau1 * beta));
    }
    s
}

/// Survival probability of a censored unit at tau*:
/// 1 - {1 - e^{-theta2 (tau* - tau1 + tau1 beta)}}^alpha for tau* > tau1,
/// and the stress-1 form 1 - (1 - e^{-beta theta2 tau*})^alpha when the
/// experiment ended at or before the stress change.
pub fn a3_stat(beta: f64, theta2: f64, alpha: f64, tau_star: f64, tau1: f64) -> f64 {
    let x = if tau_star > tau1 {
        theta2 * (tau_star - tau1 + tau1 * beta)
    } else {
        beta * theta2 * tau_star
    };
    -(alpha * ln_one_minus_exp_neg(x)).exp_m1()
}

/// log A3, kept separate so the censored weight never round-trips through
/// the linear scale when A3 is tiny.
fn ln_a3(beta: f64, theta2: f64, alpha: f64, tau_star: f64, tau1: f64) -> f64 {
    let x = if tau_star > tau1 {
        theta2 * (tau_star - tau1 + tau1 * beta)
    } else {
        beta * theta2 * tau_star
    };
    let ln_cdf = alpha * ln_one_minus_exp_neg(x);
    // ln(1 - e^{ln_cdf}) with ln_cdf < 0
    if ln_cdf > -std::f64::consts::LN_2 {
        (-ln_cdf.exp_m1()).ln()
    } else {
        (-ln_cdf.exp()).ln_1p()
    }
}

/// Log of the importance weight kernel h (complete data) or h1 (censored):
///
/// (n1* + a2 - 1) ln beta + (b2 - 1) ln(1 - beta)
///   - (n* + b1) ln A1 - (n* + b0) ln A2 + (n - n*) ln A3
///   - sum ln(1 - e^{-beta theta2 t_i}) - sum ln(1 - e^{-theta2 (...)}).
pub fn log_h(
    beta: f64,
    theta2: f64,
    alpha: f64,
    data: &ObservedData,
    prior: &PriorHyper,
) -> f64 {
    let n_star = data.n_star() as f64;
    let n1 = data.n1_star() as f64;
    let products = log_product_terms(beta, theta2, data);
    let a1v = a1_stat(beta, data, prior);
    let a2v = prior.a0 - products;
    let mut lh = (n1 + prior.a2 - 1.0) * beta.ln() + (prior.b2 - 1.0) * (-beta).ln_1p()
        - (n_star + prior.b1) * a1v.ln()
        - (n_star + prior.b0) * a2v.ln()
        - products;
    let censored = data.censored_count();
    if censored > 0 {
        lh += censored as f64 * ln_a3(beta, theta2, alpha, data.tau_star(), data.tau1());
    }
    lh
}

/// Run the importance sampler: N proposal draws, log-space weights,
/// normalization.
///
/// Deterministic for a fixed (stream, n_draws) pair regardless of how rayon
/// schedules the blocks.
pub fn draw_importance_sample(
    data: &ObservedData,
    prior: &PriorHyper,
    n_draws: usize,
    stream: RngStream,
) -> Result<PosteriorSample> {
    if n_draws < 2 {
        return Err(Error::InvalidParameter(format!(
            "need at least 2 draws, got {n_draws}"
        )));
    }
    data.require_failures()?;

    let shape_theta2 = data.n_star() as f64 + prior.b1;
    let shape_alpha = data.n_star() as f64 + prior.b0;
    let n_blocks = n_draws.div_ceil(DRAW_BLOCK);
    let mut draws: Vec<WeightedDraw> = (0..n_blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = stream.child(b as u64).rng();
            let count = DRAW_BLOCK.min(n_draws - b * DRAW_BLOCK);
            let mut block = Vec::with_capacity(count);
            for _ in 0..count {
                let beta: f64 = rng.gen();
                let a1v = a1_stat(beta, data, prior);
                let theta2 = gamma_sample(shape_theta2, a1v, &mut rng).expect("valid rates");
                let a2v = a2_stat(beta, theta2, data, prior);
                let alpha = gamma_sample(shape_alpha, a2v, &mut rng).expect("valid rates");
                let log_weight = log_h(beta, theta2, alpha, data, prior);
                block.push(WeightedDraw { beta, theta2, alpha, log_weight });
            }
            (b, block)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flat_map(|(_, block)| block)
        .collect();
    draws.truncate(n_draws);

    Ok(PosteriorSample::from_draws(draws))
}

impl PosteriorSample {
    /// Normalize weights from the stored log weights (max-shifted).
    pub fn from_draws(draws: Vec<WeightedDraw>) -> Self {
        let max_lw = draws
            .iter()
            .map(|d| d.log_weight)
            .fold(f64::NEG_INFINITY, f64::max);
        let mut total = CompensatedSum::new();
        let raw: Vec<f64> = draws
            .iter()
            .map(|d| {
                let w = (d.log_weight - max_lw).exp();
                total.add(w);
                w
            })
            .collect();
        let total = total.value();
        let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
        let mut sq = CompensatedSum::new();
        for w in &weights {
            sq.add(w * w);
        }
        let ess = 1.0 / sq.value();
        Self { draws, weights, ess }
    }

    pub fn draws(&self) -> &[WeightedDraw] {
        &self.draws
    }

    /// Normalized weights, summing to 1.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.draws.len()
    }

    pub fn is_empty(&self) -> bool {
        self.draws.is_empty()
    }

    /// Effective sample size 1/sum(w^2), in [1, N].
    pub fn ess(&self) -> f64 {
        self.ess
    }

    /// Bayes estimate of g under squared-error loss: sum w_i g(draw_i).
    pub fn bayes_estimate<G: Fn(&WeightedDraw) -> f64>(&self, g: G) -> f64 {
        let mut acc = CompensatedSum::new();
        for (d, w) in self.draws.iter().zip(&self.weights) {
            acc.add(w * g(d));
        }
        acc.value()
    }

    /// Weighted posterior variance of g.
    pub fn posterior_variance<G: Fn(&WeightedDraw) -> f64>(&self, g: G) -> f64 {
        let mean = self.bayes_estimate(&g);
        let mut acc = CompensatedSum::new();
        for (d, w) in self.draws.iter().zip(&self.weights) {
            let diff = g(d) - mean;
            acc.add(w * diff * diff);
        }
        acc.value()
    }

    /// 100(1-gamma)% credible interval for g of the requested kind.
    pub fn credible_interval<G: Fn(&WeightedDraw) -> f64>(
        &self,
        g: G,
        gamma: f64,
        kind: IntervalKind,
    ) -> Result<CredibleInterval> {
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "tail probability gamma must be in (0,1), got {gamma}"
            )));
        }
        if self.ess < MIN_ESS {
            return Err(Error::LowEss {
                ess: self.ess,
                context: "interval endpoints would be dominated by a handful of draws".into(),
            });
        }
        let mut pairs: Vec<(f64, f64)> = self
            .draws
            .iter()
            .zip(&self.weights)
            .map(|(d, &w)| (g(d), w))
            .collect();
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());

        // smallest index whose cumulative weight reaches p
        let quantile = |p: f64| -> f64 {
            let mut acc = 0.0;
            for &(gv, w) in &pairs {
                acc += w;
                if acc >= p {
                    return gv;
                }
            }
            pairs.last().unwrap().0
        };

        let (lower, upper) = match kind {
            IntervalKind::Symmetric => (quantile(gamma / 2.0), quantile(1.0 - gamma / 2.0)),
            IntervalKind::Left => (pairs.first().unwrap().0, quantile(1.0 - gamma)),
            IntervalKind::Hpd => hpd_window(&pairs, 1.0 - gamma),
        };
        Ok(CredibleInterval {
            lower,
            upper,
            level: 1.0 - gamma,
            kind,
        })
    }
}

/// Two-pointer sweep over the sorted (g, w) sequence: for each left index the
/// right pointer advances until the window mass first reaches `target`; the
/// narrowest such window wins.
fn hpd_window(pairs: &[(f64, f64)], target: f64) -> (f64, f64) {
    let n = pairs.len();
    let mut best = (f64::INFINITY, pairs[0].0, pairs[n - 1].0);
    let mut j = 0usize;
    let mut mass = 0.0f64;
    for i in 0..n {
        if i > 0 {
            mass -= pairs[i - 1].1;
        }
        while j < n && mass < target {
            mass += pairs[j].1;
            j += 1;
        }
        if mass < target {
            break;
        }
        let width = pairs[j - 1].0 - pairs[i].0;
        if width < best.0 {
            best = (width, pairs[i].0, pairs[j - 1].0);
        }
    }
    (best.1, best.2)
}

/// Standard parametric functions for reports and tables.
pub mod g {
    use super::WeightedDraw;

    pub fn alpha(d: &WeightedDraw) -> f64 {
        d.alpha
    }
    pub fn theta1(d: &WeightedDraw) -> f64 {
        d.theta1()
    }
    pub fn theta2(d: &WeightedDraw) -> f64 {
        d.theta2
    }
    pub fn beta(d: &WeightedDraw) -> f64 {
        d.beta
    }
}
