//! Kolmogorov-Smirnov goodness of fit for a fitted step-stress model.
//!
//! The statistic compares the empirical CDF of the observed failures against
//! the fitted model CDF; the p-value comes from the exact finite-sample null
//! distribution of D_n. The fitted parameters are treated as fixed (no
//! estimation correction), and for censored data only the observed failures
//! enter with denominator n*, so the result is approximate there.

use serde::{Deserialize, Serialize};

use crate::cem::{ObservedData, StepStressParams};
use crate::error::Result;
use crate::special::kolmogorov_sf;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsReport {
    /// sup |empirical - fitted| over the observed order statistics.
    pub statistic: f64,
    pub p_value: f64,
    pub n_used: usize,
}

/// D = max_i max(i/n* - F(t_(i)), F(t_(i)) - (i-1)/n*) with F the fitted
/// step-stress CDF.
pub fn ks_test(data: &ObservedData, fitted: &StepStressParams) -> Result<KsReport> {
    data.require_failures()?;
    let n = data.n_star();
    let nf = n as f64;
    let mut d = 0.0_f64;
    for (i, &t) in data.times().iter().enumerate() {
        let f = fitted.cdf(t);
        d = d.max((i as f64 + 1.0) / nf - f).max(f - i as f64 / nf);
    }
    Ok(KsReport {
        statistic: d,
        p_value: kolmogorov_sf(d, n),
        n_used: n,
    })
}
