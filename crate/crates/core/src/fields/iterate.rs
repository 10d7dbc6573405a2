//! The modified weak associativity limit, used constructively.

use num_traits::Zero;

use super::FieldEngine;
use crate::arith::rational::{binomial, binomial_int, rat};
use crate::arith::{Coefficient, Cyclotomic, Rational};
use crate::fock::{FockVector, ModeLabel, Monomial};

/// Parameters of an iterate: the `nu`-power `s` and the prefactor exponent `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MwaOptions {
    pub s: i64,
    pub k: u32,
}

/// `lim_{x1^{1/p} -> w^s (x2+x0)^{1/p}} (x1-x2)^k Y_M(u,x1) Y_M(v,x2)` for
/// `u` in `{1, beta(-1)1}` and `v` in `{1, gamma(-b)1}`.
pub struct IterateLimit<'a> {
    engine: &'a FieldEngine,
    u: Option<(u32, u32)>,
    v: Option<(u32, u32, i64)>,
    opts: MwaOptions,
}

impl<'a> IterateLimit<'a> {
    pub fn new(engine: &'a FieldEngine, u: (u32, u32), v: (u32, u32, i64), s: i64, k: u32) -> Self {
        Self::general(engine, Some(u), Some(v), MwaOptions { s, k })
    }

    pub fn general(engine: &'a FieldEngine, u: Option<(u32, u32)>, v: Option<(u32, u32, i64)>, opts: MwaOptions) -> Self {
        IterateLimit { engine, u, v, opts }
    }

    pub fn weight_u(&self) -> i64 {
        i64::from(self.u.is_some())
    }

    pub fn weight_v(&self) -> i64 {
        self.v.map_or(0, |v| v.2)
    }

    pub fn options(&self) -> MwaOptions {
        self.opts
    }

    fn u_class(&self) -> i64 {
        self.u.map_or(0, |(k, _)| (-(k as i64)).rem_euclid(self.engine.p()))
    }

    fn apply_u(&self, e: i64, w: &FockVector) -> FockVector {
        match self.u {
            None => {
                if e == 0 {
                    w.clone()
                } else {
                    FockVector::zero()
                }
            }
            Some((k, a)) => self.engine.y_coeff(&FockVector::basis(vec![ModeLabel::new(k, a, -1)]), e, w),
        }
    }

    fn apply_v(&self, f: i64, w: &Monomial) -> FockVector {
        match self.v {
            None => {
                if f == 0 {
                    FockVector::basis(w.clone())
                } else {
                    FockVector::zero()
                }
            }
            Some((k, a, b)) => (*self.engine.y_coeff_monomial(&vec![ModeLabel::new(k, a, -b)], f, w)).clone(),
        }
    }

    /// `[x1^{e/p} x2^{f/p}] Y_M(u,x1) Y_M(v,x2) w`.
    pub fn product(&self, e: i64, f: i64, w: &Monomial) -> FockVector {
        let inner = self.apply_v(f, w);
        if inner.terms().is_empty() {
            return inner;
        }
        self.apply_u(e, &inner)
    }

    /// `[x1^{e/p} x2^{f/p}] (x1-x2)^k Y_M(u,x1) Y_M(v,x2) w`.
    pub fn prefactored(&self, e: i64, f: i64, w: &Monomial) -> FockVector {
        let p = self.engine.p();
        let k = self.opts.k as i64;
        let mut out = FockVector::zero();
        for l in 0..=k {
            let c = binomial_int(k as u64, l as u64);
            let sign = if l % 2 == 0 { 1 } else { -1 };
            let term = self.product(e - (k - l) * p, f - l * p, w);
            out.add_scaled(&term, &Cyclotomic::rational(Rational::from_integer(c * sign)));
        }
        out
    }

    /// Lowest `x1` numerator carried by the prefactored product on `w`.
    pub fn e_lower(&self, w: &Monomial) -> i64 {
        let p = self.engine.p();
        let lo = -self.engine.degree_num(w) - 2 * p;
        lo + (self.u_class() - lo).rem_euclid(p)
    }

    /// Lowest `x2` numerator carried by the product on `w`.
    pub fn f_lower(&self, w: &Monomial) -> i64 {
        -self.engine.degree_num(w) - self.weight_v() * self.engine.p()
    }

    /// `[x0^i x2^{g/p}]` of the limit, applied to `w`.
    pub fn coefficient(&self, i: i64, g: i64, w: &Monomial) -> FockVector {
        let p = self.engine.p();
        let mut out = FockVector::zero();
        if i < 0 {
            return out;
        }
        let e_lo = self.e_lower(w);
        let e_hi = g + i * p - self.f_lower(w);
        let mut e = e_lo;
        while e <= e_hi {
            let b = binomial(&rat(e, p), i as u64);
            if !Zero::is_zero(&b) {
                let q = self.prefactored(e, g + i * p - e, w);
                if !q.terms().is_empty() {
                    let phase = Cyclotomic::root_power(p as u32, self.opts.s * e);
                    out.add_scaled(&q, &phase.scale(&b));
                }
            }
            e += p;
        }
        out
    }

    /// `[x0^{-j-1} x2^{g/p}] Y_M(Y(nu^{-s} u, x0) v, x2) w`, i.e. the limit at
    /// `x0^{k-1-j}`.
    pub fn iterate_coeff(&self, j: i64, g: i64, w: &Monomial) -> FockVector {
        self.coefficient(self.opts.k as i64 - 1 - j, g, w)
    }

    /// Nonzero prefactored coefficients just below the assumed `x1` truncation,
    /// for the `x2` exponents that feed `[x0^i x2^g]`.
    pub fn truncation_leak(&self, i: i64, g: i64, w: &Monomial) -> Option<(i64, i64)> {
        let p = self.engine.p();
        let e_lo = self.e_lower(w);
        let depth = (self.opts.k as i64 + 2) * p;
        let mut e = e_lo - p;
        while e >= e_lo - depth {
            let f = g + i * p - e;
            if !Coefficient::is_zero(&self.prefactored(e, f, w)) {
                return Some((e, f));
            }
            e -= p;
        }
        None
    }
}
