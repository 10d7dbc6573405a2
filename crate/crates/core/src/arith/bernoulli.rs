//! Bernoulli numbers (with `B_1 = -1/2`), Bernoulli polynomials and
//! zeta values at negative integers.

use std::sync::{OnceLock, RwLock};

use num_traits::{One, Zero};

use super::rational::{binomial_int, int, Rational};

fn table() -> &'static RwLock<Vec<Rational>> {
    static TABLE: OnceLock<RwLock<Vec<Rational>>> = OnceLock::new();
    TABLE.get_or_init(|| RwLock::new(vec![Rational::one()]))
}

/// `B_n` from the recurrence `sum_{k=0}^{n} C(n+1, k) B_k = 0`.
pub fn bernoulli_number(n: usize) -> Rational {
    if let Some(b) = table().read().expect("bernoulli table poisoned").get(n) {
        return b.clone();
    }
    let mut t = table().write().expect("bernoulli table poisoned");
    while t.len() <= n {
        let m = t.len();
        let mut acc = Rational::zero();
        for (k, b) in t.iter().enumerate() {
            acc += Rational::from_integer(binomial_int(m as u64 + 1, k as u64)) * b;
        }
        t.push(-acc / int(m as i64 + 1));
    }
    t[n].clone()
}

/// `B_n(x) = sum_k C(n, k) B_k x^{n-k}`.
pub fn bernoulli_poly(n: usize, x: &Rational) -> Rational {
    // Horner over descending powers of x.
    let mut acc = Rational::zero();
    for k in 0..=n {
        acc = acc * x + Rational::from_integer(binomial_int(n as u64, k as u64)) * bernoulli_number(k);
    }
    acc
}

/// `zeta(-m) = -B_{m+1} / (m + 1)` for `m >= 1`.
pub fn zeta_negative(m: usize) -> Rational {
    assert!(m >= 1, "zeta_negative needs m >= 1");
    -bernoulli_number(m + 1) / int(m as i64 + 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::rat;

    #[test]
    fn bernoulli_values() {
        assert_eq!(bernoulli_number(0), int(1));
        assert_eq!(bernoulli_number(1), rat(-1, 2));
        assert_eq!(bernoulli_number(2), rat(1, 6));
        assert_eq!(bernoulli_number(3), int(0));
        assert_eq!(bernoulli_number(12), rat(-691, 2730));
    }

    #[test]
    fn von_staudt_clausen_denominator_of_b12() {
        // Denominator is the product of primes q with (q - 1) | 12.
        let b = bernoulli_number(12);
        assert_eq!(*b.denom(), num_bigint::BigInt::from(2 * 3 * 5 * 7 * 13));
    }

    #[test]
    fn polynomial_values() {
        for n in 0..10 {
            assert_eq!(bernoulli_poly(n, &int(0)), bernoulli_number(n));
        }
        assert_eq!(bernoulli_poly(2, &rat(1, 2)), rat(-1, 12));
        assert_eq!(bernoulli_poly(4, &rat(1, 2)), rat(7, 240));
    }

    #[test]
    fn zeta_values() {
        assert_eq!(zeta_negative(1), rat(-1, 12));
        assert_eq!(zeta_negative(2), int(0));
        assert_eq!(zeta_negative(3), rat(1, 120));
        assert_eq!(zeta_negative(5), rat(-1, 252));
        assert_eq!(zeta_negative(7), rat(1, 240));
    }

    #[test]
    fn reflection_and_periodicity() {
        for n in 2..=12 {
            assert_eq!(bernoulli_poly(n, &int(1)), bernoulli_poly(n, &int(0)));
        }
        for n in 0..=12 {
            for x in [int(0), rat(1, 2), rat(1, 3), rat(1, 4)] {
                let sign = if n % 2 == 0 { int(1) } else { int(-1) };
                assert_eq!(bernoulli_poly(n, &(int(1) - &x)), sign * bernoulli_poly(n, &x));
            }
        }
    }
}
