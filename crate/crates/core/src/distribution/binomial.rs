//! Log-space binomial sums.
//!
//! Binomial coefficients overflow `f64` around n ≈ 1030, and the expected-AUC
//! tables go to n = 10 000, so everything here works on logarithms and sums
//! with Neumaier compensation.

/// Compensated (Kahan–Babuška–Neumaier) running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = NeumaierSum::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// ln Σ exp(x_i). Returns `-inf` for an empty input (the empty sum is 0).
pub fn log_sum_exp(terms: &[f64]) -> f64 {
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let s: NeumaierSum = terms.iter().map(|&t| (t - max).exp()).collect();
    max + s.total().ln()
}

/// Table of ln(i!) for i = 0..=max.
#[derive(Debug, Clone)]
pub struct LnFactorials {
    table: Vec<f64>,
}

impl LnFactorials {
    pub fn new(max: usize) -> Self {
        let mut table = Vec::with_capacity(max + 1);
        let mut acc = NeumaierSum::new();
        table.push(0.0);
        for i in 1..=max {
            acc.add((i as f64).ln());
            table.push(acc.total());
        }
        LnFactorials { table }
    }

    pub fn max(&self) -> usize {
        self.table.len() - 1
    }

    pub fn ln_factorial(&self, i: usize) -> f64 {
        self.table[i]
    }

    /// ln C(n, k); `-inf` when k > n.
    pub fn ln_choose(&self, n: usize, k: usize) -> f64 {
        if k > n {
            return f64::NEG_INFINITY;
        }
        self.table[n] - self.table[k] - self.table[n - k]
    }
}

/// Σ_{ℓ=0}^{e−1} C(n, ℓ) / Σ_{ℓ=0}^{e} C(n+1, ℓ), the binomial ratio in the
/// closed-form expected AUC. Zero when e = 0. `facts` must cover n + 1.
pub fn binomial_sum_ratio(facts: &LnFactorials, n: usize, e: usize) -> f64 {
    assert!(facts.max() > n, "factorial table too small for n = {n}");
    if e == 0 {
        return 0.0;
    }
    let num: Vec<f64> = (0..e).map(|l| facts.ln_choose(n, l)).collect();
    let den: Vec<f64> = (0..=e).map(|l| facts.ln_choose(n + 1, l)).collect();
    (log_sum_exp(&num) - log_sum_exp(&den)).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn choose_u128(n: u128, k: u128) -> u128 {
        let mut c = 1u128;
        for i in 0..k {
            c = c * (n - i) / (i + 1);
        }
        c
    }

    #[test]
    fn ratio_matches_integer_arithmetic() {
        let facts = LnFactorials::new(102);
        for n in 1..=100usize {
            for e in 0..=n {
                let num: u128 = (0..e as u128).map(|l| choose_u128(n as u128, l)).sum();
                let den: u128 = (0..=e as u128)
                    .map(|l| choose_u128(n as u128 + 1, l))
                    .sum();
                let exact = num as f64 / den as f64;
                let got = binomial_sum_ratio(&facts, n, e);
                let rel = if exact == 0.0 {
                    got.abs()
                } else {
                    ((got - exact) / exact).abs()
                };
                assert!(rel < 1e-12, "n={n} e={e} got={got} exact={exact}");
            }
        }
    }

    #[test]
    fn known_ratio() {
        // n = 50, e = 5
        let facts = LnFactorials::new(60);
        let r = binomial_sum_ratio(&facts, 50, 5);
        assert!((r - 251176.0 / 2621112.0).abs() < 1e-15);
    }

    #[test]
    fn large_n_is_finite() {
        let facts = LnFactorials::new(10_002);
        let r = binomial_sum_ratio(&facts, 10_000, 2_500);
        assert!(r.is_finite() && r > 0.0 && r < 1.0);
    }

    #[test]
    fn compensated_sum() {
        let s: NeumaierSum = [1.0, 1e100, 1.0, -1e100].into_iter().collect();
        assert_eq!(s.total(), 2.0);
        assert_eq!(log_sum_exp(&[]), f64::NEG_INFINITY);
        assert!((log_sum_exp(&[0.0, 0.0]) - 2f64.ln()).abs() < 1e-15);
    }
}
