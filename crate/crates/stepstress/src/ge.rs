//! Generalized exponential distribution primitives.
//!
//! GE(alpha, lambda) has CDF (1 - e^{-lambda t})^alpha on t >= 0. The shape
//! alpha is dimensionless, the rate lambda has units 1/time. All sampling is
//! by inversion so a fixed [`RngStream`] replays exactly.

use rand::Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::special::digamma;
use crate::util::ln_one_minus_exp_neg;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GEParams {
    alpha: f64,
    lambda: f64,
}

impl GEParams {
    pub fn new(alpha: f64, lambda: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) || !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "GE parameters must be positive and finite, got alpha={alpha}, lambda={lambda}"
            )));
        }
        Ok(Self { alpha, lambda })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Density alpha lambda (1 - e^{-lambda t})^{alpha-1} e^{-lambda t} on
    /// t >= 0, zero for t < 0.
    pub fn pdf(&self, t: f64) -> f64 {
        if t < 0.0 {
            return 0.0;
        }
        if t == 0.0 {
            // limit: lambda for alpha = 1, 0 for alpha > 1, +inf for alpha < 1
            return if self.alpha == 1.0 {
                self.lambda
            } else if self.alpha > 1.0 {
                0.0
            } else {
                f64::INFINITY
            };
        }
        let x = self.lambda * t;
        let ln_base = ln_one_minus_exp_neg(x);
        (self.alpha.ln() + self.lambda.ln() + (self.alpha - 1.0) * ln_base - x).exp()
    }

    /// CDF (1 - e^{-lambda t})^alpha, computed as exp(alpha ln(1 - e^{-x}))
    /// so small-t values underflow gracefully instead of cancelling.
    pub fn cdf(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        (self.alpha * ln_one_minus_exp_neg(self.lambda * t))
            .exp()
            .clamp(0.0, 1.0)
    }

    /// Inverse CDF: -ln(1 - u^{1/alpha}) / lambda for u in [0, 1).
    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&u) {
            return Err(Error::InvalidParameter(format!(
                "quantile requires 0 <= u < 1, got {u}"
            )));
        }
        Ok(-(-u.powf(1.0 / self.alpha)).ln_1p() / self.lambda)
    }

    /// Mean lifetime [psi(alpha + 1) - psi(1)] / lambda.
    pub fn mean(&self) -> f64 {
        let d = digamma(self.alpha + 1.0).expect("alpha + 1 > 0") - digamma(1.0).unwrap();
        d / self.lambda
    }

    /// One inversion draw.
    pub fn sample_with<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.gen();
        self.quantile(u).expect("u in [0,1)")
    }

    /// `n` inversion draws from a fresh generator for `stream`.
    pub fn sample(&self, n: usize, stream: RngStream) -> Vec<f64> {
        let mut rng = stream.rng();
        (0..n).map(|_| self.sample_with(&mut rng)).collect()
    }
}

/// Draw from the Gamma density proportional to x^{shape-1} e^{-rate x}.
///
/// The prior hyperparameters elsewhere in this crate follow the rate-first
/// kernel convention e^{-a x} x^{b-1}; sampling APIs take an explicit
/// (shape, rate) pair instead to keep that straight.
pub fn gamma_sample<R: Rng + ?Sized>(shape: f64, rate: f64, rng: &mut R) -> Result<f64> {
    if !(shape > 0.0) || !(rate > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "gamma_sample requires shape > 0 and rate > 0, got shape={shape}, rate={rate}"
        )));
    }
    let dist = Gamma::new(shape, 1.0 / rate)
        .map_err(|e| Error::InvalidParameter(format!("gamma_sample: {e}")))?;
    Ok(dist.sample(rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::reg_gamma_lower;
    use approx::assert_relative_eq;

    fn ge(alpha: f64, lambda: f64) -> GEParams {
        GEParams::new(alpha, lambda).unwrap()
    }

    #[test]
    fn constructor_rejects_bad_params() {
        assert!(GEParams::new(0.0, 1.0).is_err());
        assert!(GEParams::new(1.0, -2.0).is_err());
        assert!(GEParams::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn pdf_exponential_special_case() {
        // alpha = 1 collapses to Exp(lambda)
        assert_relative_eq!(ge(1.0, 0.5).pdf(2.0), 0.5 * (-1.0_f64).exp(), epsilon = 1e-12);
    }

    #[test]
    fn pdf_zero_at_origin_for_alpha_above_one() {
        assert_eq!(ge(2.0, 1.0).pdf(0.0), 0.0);
        assert_eq!(ge(2.0, 1.0).pdf(-1.0), 0.0);
    }

    #[test]
    fn pdf_matches_cdf_derivative() {
        // central finite difference of the CDF at t = 5
        let p = ge(0.6, 0.1);
        let h = 1e-6;
        let fd = (p.cdf(5.0 + h) - p.cdf(5.0 - h)) / (2.0 * h);
        assert_relative_eq!(p.pdf(5.0), fd, max_relative = 1e-6);
    }

    #[test]
    fn cdf_known_values() {
        assert_relative_eq!(ge(1.0, 0.5).cdf(2.0), 1.0 - (-1.0_f64).exp(), epsilon = 1e-12);
        assert_eq!(ge(3.3, 0.7).cdf(0.0), 0.0);
        assert_relative_eq!(ge(2.0, 1.0).cdf(2.0_f64.ln()), 0.25, epsilon = 1e-12);
    }

    #[test]
    fn quantile_known_values_and_roundtrip() {
        let p = ge(1.0, 1.0);
        let u = 1.0 - (-1.0_f64).exp();
        assert_relative_eq!(p.quantile(u).unwrap(), 1.0, epsilon = 1e-12);
        assert_eq!(ge(2.5, 0.3).quantile(0.0).unwrap(), 0.0);
        assert!(ge(1.0, 1.0).quantile(1.0).is_err());
        assert!(ge(1.0, 1.0).quantile(-0.1).is_err());

        let p = ge(0.6, 0.1);
        let mut t = 0.1;
        while t <= 50.0 {
            let u = p.cdf(t);
            assert_relative_eq!(p.quantile(u).unwrap(), t, max_relative = 1e-8);
            t += 0.7;
        }
    }

    #[test]
    fn mean_known_values() {
        // psi(2) - psi(1) = 1, psi(3) - psi(1) = 1.5
        assert_relative_eq!(ge(1.0, 0.5).mean(), 2.0, epsilon = 1e-10);
        assert_relative_eq!(ge(2.0, 1.0).mean(), 1.5, epsilon = 1e-10);
    }

    #[test]
    fn mean_matches_monte_carlo() {
        let p = ge(0.6, 0.1);
        let n = 1_000_000usize;
        let draws = p.sample(n, RngStream::new(31337, 0));
        let m = draws.iter().sum::<f64>() / n as f64;
        let var = draws.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1) as f64;
        let se = (var / n as f64).sqrt();
        assert!(
            (m - p.mean()).abs() < 3.0 * se,
            "mc mean {m} vs analytic {} (se {se})",
            p.mean()
        );
    }

    #[test]
    fn sample_is_deterministic_per_stream() {
        let p = ge(1.7, 0.4);
        let a = p.sample(64, RngStream::new(5, 9));
        let b = p.sample(64, RngStream::new(5, 9));
        assert_eq!(a, b);
    }

    #[test]
    fn sample_alpha_one_matches_exponential_inversion() {
        let p = ge(1.0, 0.8);
        let stream = RngStream::new(77, 0);
        let draws = p.sample(100, stream);
        let mut rng = stream.rng();
        for d in draws {
            let u: f64 = rng.gen();
            assert_eq!(d, -(-u).ln_1p() / 0.8);
        }
    }

    #[test]
    fn sample_empirical_cdf_ks() {
        // K-S distance below the 99% critical value 1.63/sqrt(n)
        let p = ge(0.6, 0.1);
        let n = 100_000usize;
        let mut draws = p.sample(n, RngStream::new(2024, 3));
        draws.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut d = 0.0_f64;
        for (i, t) in draws.iter().enumerate() {
            let f = p.cdf(*t);
            d = d.max((i as f64 + 1.0) / n as f64 - f).max(f - i as f64 / n as f64);
        }
        assert!(d < 1.63 / (n as f64).sqrt(), "ks = {d}");
    }

    #[test]
    fn gamma_sample_moments() {
        let mut rng = RngStream::new(11, 0).rng();
        let n = 1_000_000usize;
        // shape 1, rate 2: mean 1/2
        let draws: Vec<f64> = (0..n).map(|_| gamma_sample(1.0, 2.0, &mut rng).unwrap()).collect();
        let m = draws.iter().sum::<f64>() / n as f64;
        let se = (0.25 / n as f64).sqrt(); // var = shape/rate^2
        assert!((m - 0.5).abs() < 3.0 * se, "mean {m}");

        // shape 5, rate 1: variance 5
        let draws: Vec<f64> = (0..n).map(|_| gamma_sample(5.0, 1.0, &mut rng).unwrap()).collect();
        let m = draws.iter().sum::<f64>() / n as f64;
        let v = draws.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1) as f64;
        // se of the sample variance ~ var * sqrt(2/n + kurtosis-term); 3 se with margin
        let se_v = 5.0 * (2.0 / n as f64 + 6.0 / (5.0 * n as f64)).sqrt();
        assert!((v - 5.0).abs() < 3.0 * se_v, "var {v}");
    }

    #[test]
    fn gamma_sample_ks_against_incomplete_gamma() {
        let (shape, rate) = (23.7, 4.2);
        let mut rng = RngStream::new(8, 1).rng();
        let n = 100_000usize;
        let mut draws: Vec<f64> = (0..n)
            .map(|_| gamma_sample(shape, rate, &mut rng).unwrap())
            .collect();
        draws.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut d = 0.0_f64;
        for (i, x) in draws.iter().enumerate() {
            let f = reg_gamma_lower(shape, rate * x).unwrap();
            d = d.max((i as f64 + 1.0) / n as f64 - f).max(f - i as f64 / n as f64);
        }
        assert!(d < 0.006, "ks = {d}");
    }

    #[test]
    fn gamma_sample_rejects_bad_args() {
        let mut rng = RngStream::new(0, 0).rng();
        assert!(gamma_sample(0.0, 1.0, &mut rng).is_err());
        assert!(gamma_sample(1.0, 0.0, &mut rng).is_err());
    }

    #[test]
    fn gamma_sample_rate_rescaling_matches_in_distribution() {
        // rate-r draws rescaled by r vs rate-1 draws on matched streams
        let (shape, rate) = (3.4, 7.0);
        let n = 100_000usize;
        let mut r1 = RngStream::new(400, 0).rng();
        let mut r2 = RngStream::new(400, 0).rng();
        let mut a: Vec<f64> = (0..n)
            .map(|_| rate * gamma_sample(shape, rate, &mut r1).unwrap())
            .collect();
        let mut b: Vec<f64> = (0..n).map(|_| gamma_sample(shape, 1.0, &mut r2).unwrap()).collect();
        a.sort_by(|x, y| x.partial_cmp(y).unwrap());
        b.sort_by(|x, y| x.partial_cmp(y).unwrap());
        // two-sample K-S on sorted vectors
        let mut d = 0.0_f64;
        let (mut i, mut j) = (0usize, 0usize);
        while i < n && j < n {
            if a[i] <= b[j] {
                i += 1;
            } else {
                j += 1;
            }
            d = d.max(((i as f64 - j as f64) / n as f64).abs());
        }
        assert!(d < 0.01, "two-sample ks = {d}");
    }

    #[test]
    fn pdf_integrates_to_one() {
        // adaptive Simpson over [0, upper] with the tail bounded analytically
        #[allow(clippy::too_many_arguments)]
        fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fb: f64, fm: f64, eps: f64, depth: u32) -> f64 {
            let m = 0.5 * (a + b);
            let lm = 0.5 * (a + m);
            let rm = 0.5 * (m + b);
            let flm = f(lm);
            let frm = f(rm);
            let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
            let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            if depth == 0 || (left + right - whole).abs() < 15.0 * eps {
                left + right + (left + right - whole) / 15.0
            } else {
                simpson(f, a, m, fa, fm, flm, eps / 2.0, depth - 1)
                    + simpson(f, m, b, fm, fb, frm, eps / 2.0, depth - 1)
            }
        }
        for &alpha in &[0.5, 1.0, 2.0, 5.0] {
            for &lambda in &[0.1, 1.0, 10.0] {
                let p = ge(alpha, lambda);
                // integrate to the 1 - 1e-12 quantile; remaining tail mass is 1e-12
                let upper: f64 = p.quantile(1.0 - 1e-12).unwrap();
                let integral = if alpha < 1.0 {
                    // substitute t = y^{1/alpha} to remove the t^{alpha-1}
                    // singularity at the origin; the transformed integrand
                    // tends to lambda^alpha there
                    let g = |y: f64| {
                        if y == 0.0 {
                            lambda.powf(alpha)
                        } else {
                            let t = y.powf(1.0 / alpha);
                            p.pdf(t) * t / (alpha * y)
                        }
                    };
                    let b = upper.powf(alpha);
                    simpson(&g, 0.0, b, g(0.0), g(b), g(0.5 * b), 1e-11, 45)
                } else {
                    let f = |t: f64| p.pdf(t);
                    simpson(&f, 0.0, upper, f(0.0), f(upper), f(0.5 * upper), 1e-11, 45)
                };
                assert!(
                    (integral - 1.0).abs() < 1e-8,
                    "alpha={alpha} lambda={lambda}: integral={integral}"
                );
            }
        }
    }

    #[test]
    fn cdf_monotone_and_mean_monotonicity() {
        let p = ge(1.3, 0.9);
        let mut prev = 0.0;
        for i in 0..500 {
            let t = i as f64 * 0.05;
            let c = p.cdf(t);
            assert!(c >= prev);
            prev = c;
        }
        // mean decreases in lambda at fixed alpha, increases in alpha at fixed lambda
        let alphas = [0.5, 1.0, 2.0, 4.0];
        let lambdas = [0.1, 0.5, 1.0, 5.0];
        for &a in &alphas {
            for w in lambdas.windows(2) {
                assert!(ge(a, w[0]).mean() > ge(a, w[1]).mean());
            }
        }
        for &l in &lambdas {
            for w in alphas.windows(2) {
                assert!(ge(w[0], l).mean() < ge(w[1], l).mean());
            }
        }
    }
}
