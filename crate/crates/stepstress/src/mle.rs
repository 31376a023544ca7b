//! Order-restricted maximum likelihood estimation.
//!
//! For known beta the score in alpha has the closed-form root
//! alpha_hat(beta, theta2), which turns the theta2 score into a
//! one-dimensional profile root problem. The outer search scans beta over a
//! fine grid in (0, 1) (the order restriction keeps theta1 = beta theta2
//! below theta2 by construction) and refines the winning cell by golden
//! section.

use serde::{Deserialize, Serialize};

use crate::cem::ObservedData;
use crate::error::{Error, Result};
use crate::special::ln_gamma;
use crate::util::ln_one_minus_exp_neg;

/// Grid step for the beta scan.
const BETA_STEP: f64 = 0.001;
/// Golden-section refinement width on beta.
const BETA_REFINE_TOL: f64 = 1e-5;
/// Required magnitude of the profile score at the returned theta2.
const SCORE_TOL: f64 = 1e-9;
/// Bracketing interval for the theta2 root, expanded before failing.
const THETA2_LO: f64 = 1e-8;
const THETA2_HI: f64 = 1e4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MleResult {
    pub alpha_hat: f64,
    pub theta2_hat: f64,
    pub beta_hat: f64,
    pub theta1_hat: f64,
    pub loglik: f64,
    /// Set when a stress segment carries no failures; the fit then drifts to
    /// the beta boundary and downstream curvature machinery should not trust
    /// it.
    pub boundary: bool,
}

/// e^{-x}/(1 - e^{-x}).
#[inline]
fn expit_ratio(x: f64) -> f64 {
    let e = (-x).exp();
    e / (1.0 - e)
}

/// Log-likelihood of the observed data at (alpha, theta2, beta).
///
/// Includes the ordered-sample constant ln n!/(n-n*)! and, for censored data,
/// the survival contribution (n - n*) ln A3 of the units still running at
/// tau*.
pub fn loglik(alpha: f64, theta2: f64, beta: f64, data: &ObservedData) -> f64 {
    let tau1 = data.tau1();
    let n_star = data.n_star() as f64;
    let n1 = data.n1_star() as f64;
    let n = data.n() as f64;
    let constant = ln_gamma(n + 1.0) - ln_gamma(n - n_star + 1.0);

    let mut ll = constant + n_star * alpha.ln() + n1 * beta.ln() + n_star * theta2.ln();
    for &t in data.stress1_times() {
        let x = beta * theta2 * t;
        ll += -x + (alpha - 1.0) * ln_one_minus_exp_neg(x);
    }
    for &t in data.stress2_times() {
        let x = theta2 * (t + beta * tau1 - tau1);
        ll += -x + (alpha - 1.0) * ln_one_minus_exp_neg(x);
    }
    let censored = data.censored_count();
    if censored > 0 {
        ll += censored as f64
            * crate::posterior::a3_stat(beta, theta2, alpha, data.tau_star(), tau1).ln();
    }
    ll
}

/// Sum of ln(1 - e^{-.}) over the observed failures; always negative.
fn log_terms_sum(beta: f64, theta2: f64, data: &ObservedData) -> f64 {
    let tau1 = data.tau1();
    let mut s = 0.0;
    for &t in data.stress1_times() {
        s += ln_one_minus_exp_neg(beta * theta2 * t);
    }
    for &t in data.stress2_times() {
        s += ln_one_minus_exp_neg(theta2 * (t + beta * tau1 - tau1));
    }
    s
}

/// Closed-form stationary point of the alpha score at fixed (beta, theta2):
/// alpha_hat = -n* / sum ln(1 - e^{-.}).
pub fn alpha_hat_closed(beta: f64, theta2: f64, data: &ObservedData) -> f64 {
    -(data.n_star() as f64) / log_terms_sum(beta, theta2, data)
}

/// Profile score d/d theta2 of the log-likelihood with alpha set to its
/// closed form. For censored data this includes the survival term's
/// theta2-derivative (alpha held fixed at the plug-in value).
fn profile_score(beta: f64, theta2: f64, data: &ObservedData) -> f64 {
    let tau1 = data.tau1();
    let alpha = alpha_hat_closed(beta, theta2, data);
    let mut s = data.n_star() as f64 / theta2;
    for &t in data.stress1_times() {
        let coeff = beta * t;
        s += -coeff + (alpha - 1.0) * coeff * expit_ratio(beta * theta2 * t);
    }
    for &t in data.stress2_times() {
        let coeff = t + beta * tau1 - tau1;
        s += -coeff + (alpha - 1.0) * coeff * expit_ratio(theta2 * coeff);
    }
    let censored = data.censored_count();
    if censored > 0 {
        let tau_star = data.tau_star();
        let coeff = if tau_star > tau1 {
            tau_star - tau1 + tau1 * beta
        } else {
            beta * tau_star
        };
        let x = theta2 * coeff;
        // d/d theta2 of ln(1 - (1 - e^{-x})^alpha)
        let ln_base = ln_one_minus_exp_neg(x);
        let cdf = (alpha * ln_base).exp();
        let dcdf = alpha * (alpha * ln_base).exp() * expit_ratio(x) * coeff;
        s -= dcdf / (1.0 - cdf) * censored as f64;
    }
    s
}

/// Root of the profile score in theta2 for fixed beta, bracketed on
/// [1e-8, 1e4] and polished until |score| < 1e-9.
pub fn theta2_given_beta(beta: f64, data: &ObservedData) -> Result<f64> {
    theta2_root(beta, data, None)
}

fn theta2_root(beta: f64, data: &ObservedData, hint: Option<f64>) -> Result<f64> {
    data.require_failures()?;
    let f = |th: f64| profile_score(beta, th, data);

    // establish a sign-changing bracket, preferring a window around the hint
    let (mut lo, mut hi) = match hint {
        Some(h) if h.is_finite() && h > THETA2_LO && h < THETA2_HI => {
            let mut lo = (h / 1.5).max(THETA2_LO);
            let mut hi = (h * 1.5).min(THETA2_HI);
            let mut k = 0;
            while f(lo) <= 0.0 && lo > THETA2_LO && k < 64 {
                lo = (lo / 4.0).max(THETA2_LO);
                k += 1;
            }
            let mut k = 0;
            while f(hi) >= 0.0 && hi < THETA2_HI && k < 64 {
                hi = (hi * 4.0).min(THETA2_HI);
                k += 1;
            }
            (lo, hi)
        }
        _ => (THETA2_LO, THETA2_HI),
    };
    let (mut flo, mut fhi) = (f(lo), f(hi));
    if flo <= 0.0 || fhi >= 0.0 {
        // final attempt on the full interval
        lo = THETA2_LO;
        hi = THETA2_HI;
        flo = f(lo);
        fhi = f(hi);
        if flo <= 0.0 || fhi >= 0.0 {
            return Err(Error::Numerical(format!(
                "no sign change of the profile score on [{THETA2_LO}, {THETA2_HI}] at beta={beta}"
            )));
        }
    }

    // Illinois variant of false position: halving the retained endpoint's
    // function value whenever the same side updates twice prevents the
    // stagnation plain regula falsi suffers from the enormous score values
    // near theta2 = 0
    let mut mid = 0.5 * (lo + hi);
    let mut fm = f(mid);
    let mut side = 0i8;
    for _ in 0..200 {
        let fp = (flo * hi - fhi * lo) / (flo - fhi);
        mid = if fp.is_finite() && fp > lo && fp < hi {
            fp
        } else {
            0.5 * (lo + hi)
        };
        fm = f(mid);
        if fm.abs() < SCORE_TOL {
            return Ok(mid);
        }
        if fm > 0.0 {
            lo = mid;
            flo = fm;
            if side == 1 {
                fhi *= 0.5;
            }
            side = 1;
        } else {
            hi = mid;
            fhi = fm;
            if side == -1 {
                flo *= 0.5;
            }
            side = -1;
        }
        if (hi - lo) < 1e-16 * hi {
            break;
        }
    }
    if fm.abs() < 1e-6 {
        // score curvature is enormous near tiny theta2; accept a slightly
        // looser stop once the bracket has collapsed to machine width
        return Ok(mid);
    }
    Err(Error::Numerical(format!(
        "profile score did not converge at beta={beta} (|score|={:.3e})",
        fm.abs()
    )))
}

/// Profile log-likelihood at a given beta, reusing `hint` to warm-start the
/// inner root; returns (loglik, theta2, alpha).
fn profile_at(beta: f64, data: &ObservedData, hint: Option<f64>) -> Result<(f64, f64, f64)> {
    let theta2 = theta2_root(beta, data, hint)?;
    let alpha = alpha_hat_closed(beta, theta2, data);
    Ok((loglik(alpha, theta2, beta, data), theta2, alpha))
}

/// Grid-plus-refinement MLE over beta in (0, 1).
///
/// Data with an empty stress segment is fitted anyway but flagged as boundary;
/// ties on the grid break toward smaller beta.
pub fn fit_mle(data: &ObservedData) -> Result<MleResult> {
    data.require_failures()?;
    if data.n_star() < 2 {
        return Err(Error::DegenerateData(
            "maximum likelihood needs at least two observed failures".into(),
        ));
    }
    let boundary = data.n1_star() == 0 || data.n2_star() == 0;

    let mut best: Option<(f64, f64, f64, f64)> = None; // (ll, beta, theta2, alpha)
    let mut hint = None;
    let steps = (1.0 / BETA_STEP) as usize - 1;
    for i in 1..=steps {
        let beta = i as f64 * BETA_STEP;
        let (ll, theta2, alpha) = match profile_at(beta, data, hint) {
            Ok(v) => v,
            Err(_) => continue,
        };
        hint = Some(theta2);
        let better = match best {
            Some((bll, ..)) => ll > bll,
            None => true,
        };
        if better {
            best = Some((ll, beta, theta2, alpha));
        }
    }
    let (_, beta_grid, theta2_grid, _) =
        best.ok_or_else(|| Error::Numerical("profile likelihood failed on the whole beta grid".into()))?;

    // golden-section pass on the bracketing cells around the winner
    let mut a = (beta_grid - BETA_STEP).max(BETA_STEP / 2.0);
    let mut b = (beta_grid + BETA_STEP).min(1.0 - BETA_STEP / 2.0);
    let phi = 0.5 * (5.0_f64.sqrt() - 1.0);
    let eval = |beta: f64, hint: Option<f64>| profile_at(beta, data, hint).map(|(ll, ..)| ll);
    let mut x1 = b - phi * (b - a);
    let mut x2 = a + phi * (b - a);
    let mut f1 = eval(x1, Some(theta2_grid)).unwrap_or(f64::NEG_INFINITY);
    let mut f2 = eval(x2, Some(theta2_grid)).unwrap_or(f64::NEG_INFINITY);
    while b - a > BETA_REFINE_TOL {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = eval(x1, Some(theta2_grid)).unwrap_or(f64::NEG_INFINITY);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = eval(x2, Some(theta2_grid)).unwrap_or(f64::NEG_INFINITY);
        }
    }
    let beta_hat = 0.5 * (a + b);
    let (ll, theta2_hat, alpha_hat) = profile_at(beta_hat, data, Some(theta2_grid))?;

    // keep whichever of grid point and refined point won
    let (ll, beta_hat, theta2_hat, alpha_hat) = {
        let (gll, gb, gt, ga) = best.unwrap();
        if gll > ll {
            (gll, gb, gt, ga)
        } else {
            (ll, beta_hat, theta2_hat, alpha_hat)
        }
    };

    Ok(MleResult {
        alpha_hat,
        theta2_hat,
        beta_hat,
        theta1_hat: beta_hat * theta2_hat,
        loglik: ll,
        boundary,
    })
}
