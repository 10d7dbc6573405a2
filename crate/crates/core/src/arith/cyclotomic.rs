//! Exact arithmetic in the cyclotomic field `Q(w_p)`, represented as
//! `Q[z] / Phi_p(z)` so that every element has a unique reduced form.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use super::rational::{to_fraction_string, Rational};

/// Integer coefficients of `Phi_p`, lowest degree first.
pub fn cyclotomic_polynomial(p: u32) -> Vec<BigInt> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Vec<BigInt>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(c) = cache.lock().expect("cyclotomic cache poisoned").get(&p) {
        return c.clone();
    }
    assert!(p >= 1, "cyclotomic order must be positive");
    // z^p - 1 divided by Phi_d for every proper divisor d.
    let mut num = vec![BigInt::zero(); p as usize + 1];
    num[0] = BigInt::from(-1);
    num[p as usize] = BigInt::one();
    for d in (1..p).filter(|d| p.is_multiple_of(*d)) {
        num = exact_int_division(&num, &cyclotomic_polynomial(d));
    }
    cache.lock().expect("cyclotomic cache poisoned").insert(p, num.clone());
    num
}

fn exact_int_division(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let lead = &den[dd];
    let mut quot = vec![BigInt::zero(); rem.len() - dd];
    for i in (0..quot.len()).rev() {
        let c = &rem[i + dd] / lead;
        for (j, dj) in den.iter().enumerate() {
            rem[i + j] -= &c * dj;
        }
        quot[i] = c;
    }
    debug_assert!(rem.iter().all(|c| c.is_zero()));
    quot
}

pub fn euler_phi(p: u32) -> usize {
    cyclotomic_polynomial(p).len() - 1
}

#[derive(Clone)]
pub struct Cyclotomic {
    order: u32,
    coeffs: Vec<Rational>,
}

impl Cyclotomic {
    pub fn rational(q: Rational) -> Self {
        Cyclotomic { order: 1, coeffs: vec![q] }
    }

    pub fn zero() -> Self {
        Self::rational(Rational::zero())
    }

    pub fn one() -> Self {
        Self::rational(Rational::one())
    }

    /// `w_p^s`.
    pub fn root_power(p: u32, s: i64) -> Self {
        let e = s.rem_euclid(p as i64) as usize;
        let mut poly = vec![Rational::zero(); e + 1];
        poly[e] = Rational::one();
        Self::from_poly(p, poly)
    }

    pub fn from_poly(p: u32, poly: Vec<Rational>) -> Self {
        let phi = cyclotomic_polynomial(p);
        let coeffs = reduce(poly, &phi);
        let mut c = Cyclotomic { order: p, coeffs };
        c.normalize_order();
        c
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(Zero::is_zero)
    }

    /// The value as a rational, if it lies in `Q`.
    pub fn as_rational(&self) -> Option<Rational> {
        if self.coeffs[1..].iter().all(Zero::is_zero) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    fn is_rational_order(&self) -> bool {
        self.coeffs.len() == 1
    }

    // Orders 1 and 2 both give Q; fold them to order 1 so they mix freely.
    fn normalize_order(&mut self) {
        if self.coeffs.len() == 1 {
            self.order = 1;
        }
    }

    fn lift(&self, p: u32) -> Vec<Rational> {
        let n = euler_phi(p);
        let mut v = self.coeffs.clone();
        v.resize(n, Rational::zero());
        v
    }

    fn common(&self, other: &Self) -> u32 {
        if self.order == other.order || other.is_rational_order() {
            self.order
        } else if self.is_rational_order() {
            other.order
        } else {
            panic!("mixed cyclotomic orders {} and {} in one computation", self.order, other.order)
        }
    }

    pub fn scale(&self, q: &Rational) -> Self {
        Cyclotomic { order: self.order, coeffs: self.coeffs.iter().map(|c| c * q).collect() }
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Cyclotomic::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse by the extended Euclidean algorithm in `Q[z]`.
    pub fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let p = self.order;
        let phi: Vec<Rational> = cyclotomic_polynomial(p).into_iter().map(Rational::from_integer).collect();
        // Invariant: s * a == r (mod phi).
        let (mut r0, mut r1) = (phi, trim(self.coeffs.clone()));
        let (mut s0, mut s1) = (vec![], vec![Rational::one()]);
        while !(r1.len() == 1 && !r1[0].is_zero()) {
            let (q, r) = poly_divmod(&r0, &r1);
            let s2 = poly_sub(&s0, &poly_mul(&q, &s1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s2);
        }
        let c = r1[0].recip();
        Some(Cyclotomic::from_poly(p, s1.into_iter().map(|x| x * &c).collect()))
    }
}

fn trim(mut v: Vec<Rational>) -> Vec<Rational> {
    while v.len() > 1 && v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
    if v.is_empty() {
        v.push(Rational::zero());
    }
    v
}

fn poly_mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let n = a.len().max(b.len());
    (0..n).map(|i| a.get(i).cloned().unwrap_or_else(Rational::zero) - b.get(i).cloned().unwrap_or_else(Rational::zero)).collect()
}

fn poly_divmod(a: &[Rational], b: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
    let b = trim(b.to_vec());
    let mut rem = trim(a.to_vec());
    let db = b.len() - 1;
    if rem.len() < b.len() {
        return (vec![Rational::zero()], rem);
    }
    let mut quot = vec![Rational::zero(); rem.len() - db];
    for i in (0..quot.len()).rev() {
        let c = &rem[i + db] / &b[db];
        if !c.is_zero() {
            for (j, bj) in b.iter().enumerate() {
                rem[i + j] -= &c * bj;
            }
        }
        quot[i] = c;
    }
    rem.truncate(db.max(1));
    (quot, trim(rem))
}

fn reduce(mut poly: Vec<Rational>, phi: &[BigInt]) -> Vec<Rational> {
    let n = phi.len() - 1;
    // phi is monic.
    for i in (n..poly.len()).rev() {
        let c = std::mem::replace(&mut poly[i], Rational::zero());
        if c.is_zero() {
            continue;
        }
        for (j, pj) in phi.iter().enumerate().take(n) {
            poly[i - n + j] -= &c * Rational::from_integer(pj.clone());
        }
    }
    poly.resize(n, Rational::zero());
    poly
}

impl PartialEq for Cyclotomic {
    fn eq(&self, other: &Self) -> bool {
        let p = self.common(other);
        self.lift(p) == other.lift(p)
    }
}

impl Eq for Cyclotomic {}

impl<'a> Add<&'a Cyclotomic> for &'a Cyclotomic {
    type Output = Cyclotomic;
    fn add(self, rhs: &Cyclotomic) -> Cyclotomic {
        let p = self.common(rhs);
        let coeffs = self.lift(p).into_iter().zip(rhs.lift(p)).map(|(a, b)| a + b).collect();
        Cyclotomic { order: p, coeffs }
    }
}

impl<'a> Sub<&'a Cyclotomic> for &'a Cyclotomic {
    type Output = Cyclotomic;
    fn sub(self, rhs: &Cyclotomic) -> Cyclotomic {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a Cyclotomic> for &'a Cyclotomic {
    type Output = Cyclotomic;
    fn mul(self, rhs: &Cyclotomic) -> Cyclotomic {
        if rhs.is_rational_order() {
            return self.scale(&rhs.coeffs[0]);
        }
        if self.is_rational_order() {
            return rhs.scale(&self.coeffs[0]);
        }
        let p = self.common(rhs);
        Cyclotomic::from_poly(p, poly_mul(&self.coeffs, &rhs.coeffs))
    }
}

impl Neg for &Cyclotomic {
    type Output = Cyclotomic;
    fn neg(self) -> Cyclotomic {
        Cyclotomic { order: self.order, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl fmt::Debug for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(q) = self.as_rational() {
            return f.write_str(&to_fraction_string(&q));
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{}", to_fraction_string(c))?,
                1 => write!(f, "({})w{}", to_fraction_string(c), self.order)?,
                _ => write!(f, "({})w{}^{}", to_fraction_string(c), self.order, i)?,
            }
        }
        Ok(())
    }
}

impl Serialize for Cyclotomic {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<String> = self.coeffs.iter().map(to_fraction_string).collect();
        v.serialize(s)
    }
}
