//! Small numeric helpers shared across modules.

/// ln(1 - e^{-x}) for x > 0, switching between `expm1` and `ln_1p` forms to
/// avoid cancellation at either end.
#[inline]
pub fn ln_one_minus_exp_neg(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x < std::f64::consts::LN_2 {
        (-(-x).exp_m1()).ln()
    } else {
        (-(-x).exp()).ln_1p()
    }
}

/// Neumaier compensated summation. Accumulation order is fixed by the caller,
/// so identical inputs give identical sums regardless of how work was
/// partitioned upstream.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}
