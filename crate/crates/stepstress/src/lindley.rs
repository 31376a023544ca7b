//! Three-parameter Lindley approximation of posterior moments.
//!
//! In the coordinate order (lambda1, lambda2, lambda3) = (alpha, theta2, beta)
//! the expansion around the MLE reads
//!
//! ```text
//! E[g] ~ g + 1/2 sum_ij u_ij s_ij + sum_ij u_i rho_j s_ij
//!          + 1/2 sum_ijk L_ijk U_k s_ij,     U_k = sum_i u_i s_ki
//! ```
//!
//! with s = (-L'')^{-1}, L_ijk the third log-likelihood derivatives and rho
//! the prior log-density gradient. All derivative closed forms below are for
//! the observed-failure terms of the log-likelihood (the censored-survival
//! contribution has no closed-form derivatives here); for complete samples,
//! the only place these moments feed the stress-change optimizer, they are
//! exact.

#![allow(clippy::needless_range_loop)] // index loops mirror the tensor algebra

use serde::{Deserialize, Serialize};

use crate::cem::ObservedData;
use crate::error::{Error, Result};
use crate::mle::MleResult;
use crate::posterior::PriorHyper;

/// Second derivatives, third derivatives, inverse curvature and prior
/// gradient, all evaluated at the MLE.
#[derive(Debug, Clone, PartialEq)]
pub struct LindleyWorkspace {
    l2: [[f64; 3]; 3],
    l3: [[[f64; 3]; 3]; 3],
    sigma: [[f64; 3]; 3],
    rho: [f64; 3],
    alpha: f64,
    theta2: f64,
    beta: f64,
}

/// Target functions with ready-made gradients and Hessians.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GSpec {
    Alpha,
    AlphaSq,
    Theta1,
    Theta1Sq,
    Theta2,
    Theta2Sq,
}

impl GSpec {
    /// (value, gradient, hessian) at (alpha, theta2, beta).
    fn parts(self, alpha: f64, theta2: f64, beta: f64) -> (f64, [f64; 3], [[f64; 3]; 3]) {
        let mut h = [[0.0; 3]; 3];
        match self {
            GSpec::Alpha => (alpha, [1.0, 0.0, 0.0], h),
            GSpec::AlphaSq => {
                h[0][0] = 2.0;
                (alpha * alpha, [2.0 * alpha, 0.0, 0.0], h)
            }
            GSpec::Theta2 => (theta2, [0.0, 1.0, 0.0], h),
            GSpec::Theta2Sq => {
                h[1][1] = 2.0;
                (theta2 * theta2, [0.0, 2.0 * theta2, 0.0], h)
            }
            GSpec::Theta1 => {
                h[1][2] = 1.0;
                h[2][1] = 1.0;
                (beta * theta2, [0.0, beta, theta2], h)
            }
            GSpec::Theta1Sq => {
                h[1][1] = 2.0 * beta * beta;
                h[1][2] = 4.0 * beta * theta2;
                h[2][1] = 4.0 * beta * theta2;
                h[2][2] = 2.0 * theta2 * theta2;
                let bt = beta * theta2;
                (
                    bt * bt,
                    [0.0, 2.0 * beta * beta * theta2, 2.0 * beta * theta2 * theta2],
                    h,
                )
            }
        }
    }
}

#[inline]
fn ratios(x: f64) -> (f64, f64, f64) {
    // m = e^{-x}/(1-e^{-x}), m' = -e^{-x}/(1-e^{-x})^2, m'' = e^{-x}(1+e^{-x})/(1-e^{-x})^3
    let e = (-x).exp();
    let d = 1.0 - e;
    (e / d, -e / (d * d), e * (1.0 + e) / (d * d * d))
}

/// Evaluate every closed-form L_ij, L_ijk and rho_i at the MLE and invert
/// the negative curvature.
pub fn build_workspace(
    mle: &MleResult,
    data: &ObservedData,
    prior: &PriorHyper,
) -> Result<LindleyWorkspace> {
    if mle.boundary {
        return Err(Error::InvalidData(
            "Lindley workspace needs an interior (non-boundary) MLE".into(),
        ));
    }
    data.require_failures()?;
    let (alpha, theta2, beta) = (mle.alpha_hat, mle.theta2_hat, mle.beta_hat);
    let tau1 = data.tau1();
    let n_star = data.n_star() as f64;
    let n1 = data.n1_star() as f64;
    let am1 = alpha - 1.0;

    let mut l2 = [[0.0; 3]; 3];
    let mut l3 = [[[0.0; 3]; 3]; 3];
    l2[0][0] = -n_star / (alpha * alpha);
    l2[1][1] = -n_star / (theta2 * theta2);
    l2[2][2] = -n1 / (beta * beta);
    l3[0][0][0] = 2.0 * n_star / (alpha * alpha * alpha);
    l3[1][1][1] = 2.0 * n_star / (theta2 * theta2 * theta2);
    l3[2][2][2] = 2.0 * n1 / (beta * beta * beta);

    // per-observation terms; stress-1 and stress-2 share one shape with
    // (x, c1, c3, tl) = (exposure, dx/dtheta2, dx/dbeta, linear mixed term)
    let mut accumulate = |x: f64, c1: f64, c3: f64, tl: f64| {
        let (m0, m1, m2) = ratios(x);
        l2[0][1] += c1 * m0;
        l2[0][2] += c3 * m0;
        l2[1][1] += am1 * c1 * c1 * m1;
        l2[1][2] += -tl + am1 * (tl * m0 + c1 * c3 * m1);
        l2[2][2] += am1 * c3 * c3 * m1;
        l3[0][1][1] += c1 * c1 * m1;
        l3[0][1][2] += tl * m0 + c1 * c3 * m1;
        l3[0][2][2] += c3 * c3 * m1;
        l3[1][1][1] += am1 * c1 * c1 * c1 * m2;
        l3[1][1][2] += am1 * (2.0 * c1 * tl * m1 + c1 * c1 * c3 * m2);
        l3[1][2][2] += am1 * (2.0 * c3 * tl * m1 + c3 * c3 * c1 * m2);
        l3[2][2][2] += am1 * c3 * c3 * c3 * m2;
    };
    for &t in data.stress1_times() {
        accumulate(beta * theta2 * t, beta * t, theta2 * t, t);
    }
    for &t in data.stress2_times() {
        let s = t - tau1 + tau1 * beta;
        accumulate(theta2 * s, s, theta2 * tau1, tau1);
    }

    // symmetrize (L_ijk does not depend on index order)
    l2[1][0] = l2[0][1];
    l2[2][0] = l2[0][2];
    l2[2][1] = l2[1][2];
    let filled = l3;
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                let mut idx = [i, j, k];
                idx.sort_unstable();
                l3[i][j][k] = filled[idx[0]][idx[1]][idx[2]];
            }
        }
    }

    let rho = [
        (prior.b0 - 1.0) / alpha - prior.a0,
        (prior.b1 - 1.0) / theta2 - prior.a1,
        (prior.a2 - 1.0) / beta - (prior.b2 - 1.0) / (1.0 - beta),
    ];

    let sigma = invert_neg(&l2)?;
    Ok(LindleyWorkspace {
        l2,
        l3,
        sigma,
        rho,
        alpha,
        theta2,
        beta,
    })
}

/// Inverse of -L2, requiring positive definiteness (checked via the leading
/// principal minors).
fn invert_neg(l2: &[[f64; 3]; 3]) -> Result<[[f64; 3]; 3]> {
    let a = [
        [-l2[0][0], -l2[0][1], -l2[0][2]],
        [-l2[1][0], -l2[1][1], -l2[1][2]],
        [-l2[2][0], -l2[2][1], -l2[2][2]],
    ];
    let m1 = a[0][0];
    let m2 = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    let det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
        - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
    if !(m1 > 0.0 && m2 > 0.0 && det > 0.0) || !det.is_finite() {
        return Err(Error::Numerical(format!(
            "observed information is not positive definite (minors {m1:.3e}, {m2:.3e}, {det:.3e})"
        )));
    }
    let mut inv = [[0.0; 3]; 3];
    inv[0][0] = (a[1][1] * a[2][2] - a[1][2] * a[2][1]) / det;
    inv[0][1] = (a[0][2] * a[2][1] - a[0][1] * a[2][2]) / det;
    inv[0][2] = (a[0][1] * a[1][2] - a[0][2] * a[1][1]) / det;
    inv[1][0] = inv[0][1];
    inv[1][1] = (a[0][0] * a[2][2] - a[0][2] * a[2][0]) / det;
    inv[1][2] = (a[0][2] * a[1][0] - a[0][0] * a[1][2]) / det;
    inv[2][0] = inv[0][2];
    inv[2][1] = inv[1][2];
    inv[2][2] = (a[0][0] * a[1][1] - a[0][1] * a[1][0]) / det;
    Ok(inv)
}

impl LindleyWorkspace {
    pub fn mle_point(&self) -> (f64, f64, f64) {
        (self.alpha, self.theta2, self.beta)
    }

    pub fn l2(&self) -> &[[f64; 3]; 3] {
        &self.l2
    }

    pub fn l3(&self) -> &[[[f64; 3]; 3]; 3] {
        &self.l3
    }

    pub fn sigma(&self) -> &[[f64; 3]; 3] {
        &self.sigma
    }

    pub fn rho(&self) -> &[f64; 3] {
        &self.rho
    }

    #[cfg(test)]
    pub(crate) fn set_rho(&mut self, rho: [f64; 3]) {
        self.rho = rho;
    }

    /// The raw four-term expansion for an arbitrary (value, gradient,
    /// Hessian) triple evaluated at the MLE.
    pub fn expectation_raw(&self, value: f64, grad: [f64; 3], hess: [[f64; 3]; 3]) -> f64 {
        let s = &self.sigma;
        let mut term_hess = 0.0;
        let mut term_rho = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                term_hess += hess[i][j] * s[i][j];
                term_rho += grad[i] * self.rho[j] * s[i][j];
            }
        }
        let mut u_cap = [0.0; 3];
        for k in 0..3 {
            for i in 0..3 {
                u_cap[k] += grad[i] * s[k][i];
            }
        }
        let mut term_l3 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    term_l3 += self.l3[i][j][k] * u_cap[k] * s[i][j];
                }
            }
        }
        value + 0.5 * term_hess + term_rho + 0.5 * term_l3
    }

    /// Lindley approximation of E[g | data].
    pub fn expectation(&self, g: GSpec) -> f64 {
        let (v, u, h) = g.parts(self.alpha, self.theta2, self.beta);
        self.expectation_raw(v, u, h)
    }

    /// Posterior variance by the paired expansions E[g^2] - E[g]^2; negative
    /// raw differences (the expansion is asymptotic) are clamped to 0 and
    /// flagged.
    pub fn posterior_variance(&self, which: Parameter) -> (f64, bool) {
        let (mean_spec, sq_spec) = match which {
            Parameter::Alpha => (GSpec::Alpha, GSpec::AlphaSq),
            Parameter::Theta1 => (GSpec::Theta1, GSpec::Theta1Sq),
            Parameter::Theta2 => (GSpec::Theta2, GSpec::Theta2Sq),
        };
        let m = self.expectation(mean_spec);
        let raw = self.expectation(sq_spec) - m * m;
        if raw < 0.0 {
            (0.0, true)
        } else {
            (raw, false)
        }
    }

    /// Plain quadratic-approximation variance u' sigma u; always
    /// non-negative, used as the fallback when the full expansion turns
    /// negative.
    pub fn curvature_variance(&self, which: Parameter) -> f64 {
        let spec = match which {
            Parameter::Alpha => GSpec::Alpha,
            Parameter::Theta1 => GSpec::Theta1,
            Parameter::Theta2 => GSpec::Theta2,
        };
        let (_, u, _) = spec.parts(self.alpha, self.theta2, self.beta);
        let mut v = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                v += u[i] * u[j] * self.sigma[i][j];
            }
        }
        v.max(0.0)
    }

    /// Sum over (alpha, theta1, theta2) of posterior sd / posterior mean.
    pub fn cv_sum(&self) -> Result<f64> {
        let mut total = 0.0;
        for which in [Parameter::Alpha, Parameter::Theta1, Parameter::Theta2] {
            let mean = self.expectation(match which {
                Parameter::Alpha => GSpec::Alpha,
                Parameter::Theta1 => GSpec::Theta1,
                Parameter::Theta2 => GSpec::Theta2,
            });
            if !(mean > 0.0) {
                return Err(Error::Numerical(format!(
                    "non-positive Lindley posterior mean ({mean:.3e}) makes the coefficient of variation undefined"
                )));
            }
            let (var, _) = self.posterior_variance(which);
            total += var.sqrt() / mean;
        }
        Ok(total)
    }
}

/// The three reported parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parameter {
    Alpha,
    Theta1,
    Theta2,
}
