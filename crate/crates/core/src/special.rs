//! Log-factorials and binomial weights on the integer lattice.

/// Table of `ln n!` for `n = 0..=n_max`.
#[derive(Debug, Clone)]
pub(crate) struct LnFactorial(Vec<f64>);

impl LnFactorial {
    pub(crate) fn new(n_max: usize) -> Self {
        let mut t = Vec::with_capacity(n_max + 1);
        let mut acc = 0.0;
        t.push(0.0);
        for n in 1..=n_max {
            acc += (n as f64).ln();
            t.push(acc);
        }
        LnFactorial(t)
    }

    #[inline]
    pub(crate) fn get(&self, n: usize) -> f64 {
        self.0[n]
    }

    #[inline]
    pub(crate) fn ln_binomial(&self, n: usize, k: usize) -> f64 {
        self.0[n] - self.0[k] - self.0[n - k]
    }
}

/// `k · ln x` with the convention `0 · ln 0 = 0`.
#[inline]
pub(crate) fn ln_pow(x: f64, k: usize) -> f64 {
    if k == 0 {
        0.0
    } else {
        k as f64 * x.ln()
    }
}

/// `x^k` for non-negative `x`, exact at `k = 0`.
#[inline]
pub(crate) fn powi(x: f64, k: usize) -> f64 {
    if k == 0 {
        1.0
    } else {
        x.powi(k as i32)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_factorials() {
        let t = LnFactorial::new(10);
        assert_eq!(t.get(0), 0.0);
        assert!((t.get(5).exp() - 120.0).abs() < 1e-10);
        assert!((t.ln_binomial(10, 3).exp() - 120.0).abs() < 1e-9);
    }

    #[test]
    fn zero_power_conventions() {
        assert_eq!(ln_pow(0.0, 0), 0.0);
        assert_eq!(ln_pow(0.0, 2), f64::NEG_INFINITY);
        assert_eq!(powi(0.0, 0), 1.0);
    }
}
