//! Exact rational evaluation of the expected-AUC expression.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// Prefix sums Σ_{ℓ<=j} C(m, ℓ) for j = 0..=m.
pub fn binomial_prefix(m: usize) -> Vec<BigInt> {
    let mut out = Vec::with_capacity(m + 1);
    let mut c = BigInt::one();
    let mut acc = BigInt::zero();
    for l in 0..=m {
        acc += &c;
        out.push(acc.clone());
        c = c * BigInt::from(m - l) / BigInt::from(l + 1);
    }
    out
}

/// ε − Σ_{ℓ=0}^{e−1} C(n,ℓ) / Σ_{ℓ=0}^{e} C(n+1,ℓ) as an unreduced fraction.
pub struct Bracket {
    num: BigInt,
    den: BigInt,
}

impl Bracket {
    pub fn new(prefix_n: &[BigInt], prefix_n1: &[BigInt], n: usize, e: usize) -> Self {
        let s_n = if e == 0 { BigInt::zero() } else { prefix_n[e - 1].clone() };
        let s_n1 = &prefix_n1[e];
        // e/n − s_n/s_n1
        Bracket {
            num: BigInt::from(e) * s_n1 - BigInt::from(n) * s_n,
            den: BigInt::from(n) * s_n1,
        }
    }
}

/// 1 − ε − (n_no − n_yes)²(n+1)/(4 n_no n_yes) · bracket, rounded once to f64.
pub fn expected_auc_exact(n_yes: usize, n_no: usize, n_err: usize, bracket: &Bracket) -> f64 {
    let n = n_yes + n_no;
    if n_err == 0 {
        return 1.0;
    }
    let d = n_no as i64 - n_yes as i64;
    let c_num = BigInt::from(d * d * (n as i64 + 1));
    let c_den = BigInt::from(4 * n_no as i64 * n_yes as i64);
    // ((n − e)/n) − (c_num·b_num)/(c_den·b_den)
    let den_right = &c_den * &bracket.den;
    let num = BigInt::from(n - n_err) * &den_right - BigInt::from(n) * (&c_num * &bracket.num);
    let den = BigInt::from(n) * den_right;
    BigRational::new_raw(num, den).to_f64().expect("finite rational")
}

pub fn expected_auc_exact_single(n_yes: usize, n_no: usize, n_err: usize) -> f64 {
    let n = n_yes + n_no;
    let b = Bracket::new(&binomial_prefix(n), &binomial_prefix(n + 1), n, n_err);
    expected_auc_exact(n_yes, n_no, n_err, &b)
}
