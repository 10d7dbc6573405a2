//! Truncated multivariate formal series with fractional exponents.
//!
//! Every series carries a per-variable window. Inside the window the stored
//! coefficients are exact; a side flagged `closed` additionally asserts that
//! the series has no support beyond it, so coefficients past a closed side
//! are exact zeros. Asking for a coefficient anywhere else is an error.
//!
//! x-type variables take exponents in `(1/p)Z`, y-type variables integer
//! exponents. Exponents are stored as integer numerators: over `p` for
//! x-type variables, over 1 for y-type.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::cyclotomic::Cyclotomic;
use super::rational::{binomial, int, rat, Rational};
use super::{Coefficient, Scalar};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarKind {
    /// Exponents in `(1/p)Z`.
    X,
    /// Integer exponents.
    Y,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Var {
    pub name: String,
    pub kind: VarKind,
}

impl Var {
    pub fn x(name: &str) -> Self {
        Var { name: name.into(), kind: VarKind::X }
    }
    pub fn y(name: &str) -> Self {
        Var { name: name.into(), kind: VarKind::Y }
    }
}

/// Window of one variable, in exponent numerators.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bound {
    pub lo: i64,
    pub hi: i64,
    pub closed_below: bool,
    pub closed_above: bool,
}

impl Bound {
    pub fn open(lo: i64, hi: i64) -> Self {
        Bound { lo, hi, closed_below: false, closed_above: false }
    }

    /// Lower-bounded (Laurent-type) series known exactly up to `hi`.
    pub fn laurent(lo: i64, hi: i64) -> Self {
        Bound { lo, hi, closed_below: true, closed_above: false }
    }

    /// Finite support inside `[lo, hi]`.
    pub fn polynomial(lo: i64, hi: i64) -> Self {
        Bound { lo, hi, closed_below: true, closed_above: true }
    }

    fn support_lo(&self) -> Option<i64> {
        self.closed_below.then_some(self.lo)
    }

    fn support_hi(&self) -> Option<i64> {
        self.closed_above.then_some(self.hi)
    }

    pub fn is_authoritative(&self, e: i64) -> bool {
        (e >= self.lo || self.closed_below) && (e <= self.hi || self.closed_above)
    }

    fn in_box(&self, e: i64) -> bool {
        e >= self.lo && e <= self.hi
    }

    /// Window of a sum.
    fn add(&self, o: &Bound) -> Bound {
        let closed_below = self.closed_below && o.closed_below;
        let closed_above = self.closed_above && o.closed_above;
        let lo = if closed_below {
            self.lo.min(o.lo)
        } else {
            match (self.closed_below, o.closed_below) {
                (true, false) => o.lo,
                (false, true) => self.lo,
                _ => self.lo.max(o.lo),
            }
        };
        let hi = if closed_above {
            self.hi.max(o.hi)
        } else {
            match (self.closed_above, o.closed_above) {
                (true, false) => o.hi,
                (false, true) => self.hi,
                _ => self.hi.min(o.hi),
            }
        };
        Bound { lo, hi, closed_below, closed_above }
    }

    /// Window of a product: an exponent is certified only if every pair of
    /// exponents that can contribute lies inside both factors' windows.
    fn mul(&self, o: &Bound) -> Option<Bound> {
        let (l1, u1, l2, u2) = (self.support_lo(), self.support_hi(), o.support_lo(), o.support_hi());
        let mut auth_lo: Option<i64> = None;
        let mut auth_hi: Option<i64> = None;
        let raise = |acc: &mut Option<i64>, v: i64| *acc = Some(acc.map_or(v, |a| a.max(v)));
        let lower = |acc: &mut Option<i64>, v: i64| *acc = Some(acc.map_or(v, |a| a.min(v)));
        if !self.closed_below {
            raise(&mut auth_lo, self.lo + u2?);
        }
        if !o.closed_below {
            raise(&mut auth_lo, o.lo + u1?);
        }
        if !self.closed_above {
            lower(&mut auth_hi, self.hi + l2?);
        }
        if !o.closed_above {
            lower(&mut auth_hi, o.hi + l1?);
        }
        let closed_below = self.closed_below && o.closed_below;
        let closed_above = self.closed_above && o.closed_above;
        let lo = if closed_below { l1? + l2? } else { auth_lo? };
        let hi = if closed_above { u1? + u2? } else { auth_hi? };
        if lo > hi && !(closed_below || closed_above) {
            return None;
        }
        Some(Bound { lo, hi, closed_below, closed_above })
    }
}

pub type Exponents = Vec<i64>;

#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedSeries<C> {
    p: u32,
    vars: Vec<Var>,
    window: Vec<Bound>,
    terms: BTreeMap<Exponents, C>,
}

impl<C: Coefficient> TruncatedSeries<C> {
    pub fn new(p: u32, vars: Vec<Var>, window: Vec<Bound>) -> Self {
        assert_eq!(vars.len(), window.len(), "one bound per variable");
        assert!(p >= 1);
        TruncatedSeries { p, vars, window, terms: BTreeMap::new() }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    pub fn window(&self) -> &[Bound] {
        &self.window
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &C)> {
        self.terms.iter()
    }

    pub fn var_index(&self, name: &str) -> Result<usize> {
        self.vars
            .iter()
            .position(|v| v.name == name)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown series variable {name}")))
    }

    /// Denominator of exponents of variable `i`.
    pub fn denom(&self, i: usize) -> i64 {
        match self.vars[i].kind {
            VarKind::X => self.p as i64,
            VarKind::Y => 1,
        }
    }

    pub fn exponent_value(&self, i: usize, num: i64) -> Rational {
        rat(num, self.denom(i))
    }

    /// Adds `c` at the given exponent numerators; the exponent must lie in the window box.
    pub fn insert(&mut self, exps: Exponents, c: C) -> Result<()> {
        self.check_box(&exps)?;
        if c.is_zero() {
            return Ok(());
        }
        match self.terms.get_mut(&exps) {
            Some(old) => {
                let s = old.add(&c);
                if s.is_zero() {
                    self.terms.remove(&exps);
                } else {
                    *old = s;
                }
            }
            None => {
                self.terms.insert(exps, c);
            }
        }
        Ok(())
    }

    fn check_box(&self, exps: &[i64]) -> Result<()> {
        if exps.len() != self.vars.len() {
            return Err(Error::InvalidArgument("exponent arity mismatch".into()));
        }
        for (i, (e, b)) in exps.iter().zip(&self.window).enumerate() {
            if !b.in_box(*e) {
                return Err(Error::WindowInsufficient(format!(
                    "exponent {} of {} outside stored window [{}, {}]",
                    self.exponent_value(i, *e),
                    self.vars[i].name,
                    self.exponent_value(i, b.lo),
                    self.exponent_value(i, b.hi)
                )));
            }
        }
        Ok(())
    }

    /// Exact coefficient, or an error if the exponent is not certified.
    pub fn coeff(&self, exps: &[i64]) -> Result<C> {
        for (i, (e, b)) in exps.iter().zip(&self.window).enumerate() {
            if !b.is_authoritative(*e) {
                return Err(Error::WindowInsufficient(format!(
                    "coefficient at {}^{} is outside the certified window",
                    self.vars[i].name,
                    self.exponent_value(i, *e)
                )));
            }
        }
        Ok(self.terms.get(exps).cloned().unwrap_or_else(C::zero))
    }

    fn same_shape(&self, o: &Self) -> Result<()> {
        if self.p != o.p {
            return Err(Error::MixedOrder(format!("series over p={} and p={}", self.p, o.p)));
        }
        if self.vars != o.vars {
            return Err(Error::InvalidArgument("series variables differ".into()));
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.same_shape(o)?;
        let window: Vec<Bound> = self.window.iter().zip(&o.window).map(|(a, b)| a.add(b)).collect();
        let mut out = TruncatedSeries::new(self.p, self.vars.clone(), window);
        for (e, c) in self.terms.iter().chain(o.terms.iter()) {
            if out.check_box(e).is_ok() {
                out.insert(e.clone(), c.clone())?;
            }
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        self.map(|c| c.neg())
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.neg())
    }

    pub fn scale(&self, s: &C::Scalar) -> Self {
        self.map(|c| c.scale(s))
    }

    pub fn map<D: Coefficient>(&self, f: impl Fn(&C) -> D) -> TruncatedSeries<D> {
        let mut out = TruncatedSeries::new(self.p, self.vars.clone(), self.window.clone());
        for (e, c) in &self.terms {
            let d = f(c);
            if !d.is_zero() {
                out.terms.insert(e.clone(), d);
            }
        }
        out
    }

    /// Restricts the stored box of one variable (keeps closedness only where the side is unchanged).
    pub fn restrict(&self, var: usize, lo: i64, hi: i64) -> Self {
        let mut out = self.clone();
        let b = &mut out.window[var];
        if lo > b.lo {
            b.lo = lo;
            b.closed_below = false;
        }
        if hi < b.hi {
            b.hi = hi;
            b.closed_above = false;
        }
        let b = *b;
        out.terms.retain(|e, _| b.in_box(e[var]));
        out
    }

    /// Product with a scalar series over the same variables.
    pub fn mul_scalar_series(&self, s: &TruncatedSeries<C::Scalar>) -> Result<Self> {
        if self.p != s.p {
            return Err(Error::MixedOrder(format!("series over p={} and p={}", self.p, s.p)));
        }
        if self.vars != s.vars {
            return Err(Error::InvalidArgument("series variables differ".into()));
        }
        let mut window = Vec::with_capacity(self.vars.len());
        for (i, (a, b)) in s.window.iter().zip(&self.window).enumerate() {
            window.push(
                a.mul(b).ok_or_else(|| {
                    Error::WindowInsufficient(format!("product has no certified region in {}", self.vars[i].name))
                })?,
            );
        }
        let mut out = TruncatedSeries::new(self.p, self.vars.clone(), window);
        for (ea, a) in &s.terms {
            for (eb, b) in &self.terms {
                let e: Exponents = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                if out.check_box(&e).is_ok() {
                    out.insert(e, b.scale(a))?;
                }
            }
        }
        Ok(out)
    }

    /// Formal partial derivative in variable `i`.
    pub fn derivative(&self, i: usize) -> Self {
        let mut out = self.clone();
        out.terms.clear();
        for (e, c) in &self.terms {
            let factor = self.exponent_value(i, e[i]);
            if Zero::is_zero(&factor) {
                continue;
            }
            let mut e2 = e.clone();
            e2[i] -= self.denom(i);
            let s = <C::Scalar as Scalar>::from_rational(&factor);
            out.terms.insert(e2, c.scale(&s));
        }
        let d = self.denom(i);
        let b = &mut out.window[i];
        b.lo -= d;
        b.hi -= d;
        out
    }

    /// `lim_{x^{1/p} -> w_p^s (x_base + x_shift)^{1/p}}`, expanding in nonnegative
    /// powers of the new y-type variable `x_shift`.
    ///
    /// The output has variables `[x_shift, rest...]` (with `var` removed) and is
    /// certified on `x_shift in [0, shift_max]`, `x_base in [base_lo, base_hi]`
    /// (numerators). Fails if some requested coefficient would need terms the
    /// input does not certify.
    #[allow(clippy::too_many_arguments)]
    pub fn substitute_root(
        &self,
        var: &str,
        s: i64,
        base: &str,
        shift: &str,
        shift_max: i64,
        base_lo: i64,
        base_hi: i64,
    ) -> Result<Self>
    where
        C: Coefficient<Scalar = Cyclotomic>,
    {
        let vi = self.var_index(var)?;
        let bi = self.var_index(base)?;
        if self.vars[vi].kind != VarKind::X || self.vars[bi].kind != VarKind::X {
            return Err(Error::InvalidArgument("substitution needs x-type variables".into()));
        }
        if shift_max < 0 || base_lo > base_hi {
            return Err(Error::InvalidArgument("empty substitution window".into()));
        }
        let p = self.p as i64;
        let (b1, b2) = (self.window[vi], self.window[bi]);
        // Total numerator S = t + p*i ranges over [base_lo, base_hi + p*shift_max].
        let (s_lo, s_hi) = (base_lo, base_hi + p * shift_max);
        certify_line(&b1, &b2, s_lo, s_hi).map_err(|why| {
            Error::WindowInsufficient(format!("cannot certify substitution of {var} on requested window: {why}"))
        })?;

        let mut vars = vec![Var::y(shift)];
        let mut window = vec![Bound::laurent(0, shift_max)];
        for (i, v) in self.vars.iter().enumerate() {
            if i == vi {
                continue;
            }
            vars.push(v.clone());
            window.push(if i == bi { Bound::open(base_lo, base_hi) } else { self.window[i] });
        }
        let mut out = TruncatedSeries::new(self.p, vars, window);
        let bo = 1 + bi - usize::from(bi > vi);
        for (e, c) in &self.terms {
            let ev = rat(e[vi], p);
            let phase = Cyclotomic::root_power(self.p, s * e[vi]);
            for i in 0..=shift_max {
                let t = e[vi] + e[bi] - p * i;
                if t < base_lo || t > base_hi {
                    continue;
                }
                let b = binomial(&ev, i as u64);
                if Zero::is_zero(&b) {
                    continue;
                }
                let mut oe = Vec::with_capacity(e.len());
                oe.push(i);
                for (j, x) in e.iter().enumerate() {
                    if j != vi {
                        oe.push(*x);
                    }
                }
                oe[bo] = t;
                out.insert(oe, c.scale(&phase.scale(&b)))?;
            }
        }
        Ok(out)
    }
}

/// Checks that every line `e1 + e2 = S` with `S` in `[s_lo, s_hi]` meets the
/// supports of the two variables only inside their windows.
fn certify_line(b1: &Bound, b2: &Bound, s_lo: i64, s_hi: i64) -> std::result::Result<(), String> {
    let (l1, u1, l2, u2) = (b1.support_lo(), b1.support_hi(), b2.support_lo(), b2.support_hi());
    if !b1.closed_below {
        let u2 = u2.ok_or("both directions unbounded")?;
        if s_lo < b1.lo + u2 {
            return Err("source window too small below".into());
        }
    }
    if !b2.closed_below {
        let u1 = u1.ok_or("both directions unbounded")?;
        if s_lo < b2.lo + u1 {
            return Err("base window too small below".into());
        }
    }
    if !b1.closed_above {
        let l2 = l2.ok_or("both directions unbounded")?;
        if s_hi > b1.hi + l2 {
            return Err("source window too small above".into());
        }
    }
    if !b2.closed_above {
        let l1 = l1.ok_or("both directions unbounded")?;
        if s_hi > b2.hi + l1 {
            return Err("base window too small above".into());
        }
    }
    Ok(())
}

impl<S: Scalar + Coefficient<Scalar = S>> TruncatedSeries<S> {
    /// `sum_k c_k y^k` in a single y-type variable, certified up to `hi`.
    pub fn univariate(var: &str, lo: i64, hi: i64, coeffs: impl IntoIterator<Item = (i64, S)>) -> Self {
        let mut out = TruncatedSeries::new(1, vec![Var::y(var)], vec![Bound::laurent(lo, hi)]);
        for (k, c) in coeffs {
            if k <= hi {
                out.insert(vec![k], c).expect("exponent inside window");
            }
        }
        out
    }

    pub fn constant(vars: Vec<Var>, p: u32, c: S) -> Self {
        let n = vars.len();
        let mut out = TruncatedSeries::new(p, vars, vec![Bound::polynomial(0, 0); n]);
        out.insert(vec![0; n], c).expect("origin is in window");
        out
    }

    /// `e^{c y}` up to `y^order`.
    pub fn exp(var: &str, c: &Rational, order: i64) -> Self {
        let mut term: Rational = One::one();
        let mut coeffs = Vec::new();
        for k in 0..=order {
            coeffs.push((k, S::from_rational(&term)));
            term = term * c / int(k + 1);
        }
        Self::univariate(var, 0, order, coeffs)
    }

    /// `(e^y - 1)^n` for any integer `n`, certified up to `y^order`.
    pub fn exp_minus_one_pow(var: &str, n: i64, order: i64) -> Result<Self> {
        // e^y - 1 = y * u(y) with u a unit; (e^y - 1)^n = y^n u^n.
        let need = order - n;
        if need < 0 {
            return Ok(Self::univariate(var, n, order, []));
        }
        let mut fact: Rational = One::one();
        let mut coeffs = Vec::new();
        for k in 0..=need {
            fact *= int(k + 1);
            coeffs.push((k, S::from_rational(&fact.recip())));
        }
        let u = Self::univariate(var, 0, need, coeffs);
        let un = u.powi(n)?;
        let mut out = TruncatedSeries::new(1, un.vars.clone(), vec![Bound::laurent(n, order)]);
        for (e, c) in &un.terms {
            if e[0] + n <= order {
                out.insert(vec![e[0] + n], c.clone())?;
            }
        }
        Ok(out)
    }

    /// `log(1 + y)` up to `y^order`.
    pub fn log1p(var: &str, order: i64) -> Self {
        let coeffs = (1..=order).map(|k| {
            let sign = if k % 2 == 1 { 1 } else { -1 };
            (k, S::from_rational(&rat(sign, k)))
        });
        Self::univariate(var, 0, order, coeffs)
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        o.mul_scalar_series(self)
    }

    /// Lowest stored exponent of a univariate lower-bounded series.
    pub fn valuation(&self) -> Option<i64> {
        self.terms.keys().next().map(|e| e[0])
    }

    /// Multiplicative inverse of a univariate lower-bounded series.
    pub fn inverse(&self) -> Result<Self> {
        if self.vars.len() != 1 || !self.window[0].closed_below {
            return Err(Error::InvalidArgument("inverse needs a univariate Laurent series".into()));
        }
        let v = self.valuation().ok_or_else(|| Error::InvalidArgument("inverse of zero series".into()))?;
        let hi = self.window[0].hi;
        let lead_inv = self.terms[&vec![v]].inv().expect("nonzero leading coefficient");
        let len = hi - v;
        if len < 0 {
            return Err(Error::WindowInsufficient("no certified terms to invert".into()));
        }
        // b_0 = 1/a_0, b_k = -(1/a_0) sum_{j=1}^k a_j b_{k-j}, with a_j at exponent v + j.
        let a = |j: i64| self.terms.get(&vec![v + j]).cloned().unwrap_or_else(<S as Scalar>::zero);
        let mut b: Vec<S> = vec![lead_inv.clone()];
        for k in 1..=len {
            let mut acc = <S as Scalar>::zero();
            for j in 1..=k {
                acc = Scalar::add(&acc, &Scalar::mul(&a(j), &b[(k - j) as usize]));
            }
            b.push(Scalar::neg(&Scalar::mul(&acc, &lead_inv)));
        }
        let mut out = TruncatedSeries::new(self.p, self.vars.clone(), vec![Bound::laurent(-v, -v + len)]);
        for (k, c) in b.into_iter().enumerate() {
            out.insert(vec![-v + k as i64], c)?;
        }
        Ok(out)
    }

    pub fn powi(&self, n: i64) -> Result<Self> {
        let base = if n < 0 { self.inverse()? } else { self.clone() };
        let mut acc = Self::constant(self.vars.clone(), self.p, S::one());
        for _ in 0..n.unsigned_abs() {
            acc = acc.mul(&base)?;
        }
        Ok(acc)
    }

    /// Composition `h(F(y))` for a univariate Laurent `h` in `x` and a
    /// univariate `F` with zero constant term and invertible linear term.
    pub fn compose(&self, f: &Self) -> Result<Self> {
        let v = f.valuation();
        if v != Some(1) || !f.window[0].closed_below || f.window[0].lo < 0 {
            return Err(Error::InvalidArgument("F must lie in y*A[[y]] with invertible y coefficient".into()));
        }
        if !self.window[0].closed_below {
            return Err(Error::InvalidArgument("h must be lower-bounded".into()));
        }
        // h(F) is certified up to y^m where every unknown term of h (x^k, k > hi_h)
        // starts at y^k, so m = hi_h; F's truncation limits each power F^n.
        let hi_h = self.window[0].hi;
        let mut total: Option<Self> = None;
        for (e, c) in &self.terms {
            let term = f.powi(e[0])?.scale(c);
            total = Some(match total {
                None => term,
                Some(t) => t.add(&term)?,
            });
        }
        let mut out = total.unwrap_or_else(|| Self::univariate(&f.vars[0].name, 0, hi_h, []));
        // Unknown tail of h contributes from y^{hi_h + 1} on.
        let b = &mut out.window[0];
        if b.hi > hi_h {
            b.hi = hi_h;
            b.closed_above = false;
        }
        let b = out.window[0];
        out.terms.retain(|e, _| e[0] <= b.hi);
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::bernoulli::bernoulli_poly;
    use crate::arith::rational::factorial;

    type S = TruncatedSeries<Rational>;

    #[test]
    fn exp_minus_one_inverse_square_times_exp() {
        // e^y (e^y - 1)^{-2} = y^{-2} - 1/12 + O(y^2)
        let e = S::exp("y", &int(1), 4);
        let d = S::exp_minus_one_pow("y", -2, 2).unwrap();
        let prod = e.mul(&d).unwrap();
        assert_eq!(prod.coeff(&[-2]).unwrap(), int(1));
        assert_eq!(prod.coeff(&[-1]).unwrap(), int(0));
        assert_eq!(prod.coeff(&[0]).unwrap(), rat(-1, 12));
        assert_eq!(prod.coeff(&[1]).unwrap(), int(0));
        assert!(prod.coeff(&[10]).is_err());
    }

    #[test]
    fn bernoulli_generating_function() {
        // t e^{xt} / (e^t - 1) = sum B_n(x) t^n / n!
        let n_max = 16;
        for x in [int(0), rat(1, 2), rat(1, 3), rat(-2, 5), rat(7, 4)] {
            let num = S::exp("t", &x, n_max + 1);
            let den = S::exp_minus_one_pow("t", -1, n_max).unwrap();
            let t = S::univariate("t", 1, n_max + 2, [(1, int(1))]);
            let f = num.mul(&den).unwrap().mul(&t).unwrap();
            for n in 0..=n_max {
                let expect = bernoulli_poly(n as usize, &x) / Rational::from_integer(factorial(n as u64));
                assert_eq!(f.coeff(&[n]).unwrap(), expect, "n={n}, x={x}");
            }
        }
    }

    #[test]
    fn window_rules_for_products() {
        let a = S::univariate("y", -1, 3, [(-1, int(1)), (0, int(2))]);
        let b = S::univariate("y", 0, 5, [(0, int(1)), (1, int(1))]);
        let c = a.mul(&b).unwrap();
        // certified up to min(3 + 0, 5 - 1) = 3
        assert_eq!(c.window()[0].hi, 3);
        assert!(c.coeff(&[4]).is_err());
        assert_eq!(c.coeff(&[-2]).unwrap(), int(0));
    }

    #[test]
    fn open_window_product_with_polynomial() {
        // Open on both sides times a polynomial.
        let mut a = TruncatedSeries::<Rational>::new(1, vec![Var::y("y")], vec![Bound::open(-5, 5)]);
        for k in -5..=5 {
            a.insert(vec![k], int(k)).unwrap();
        }
        let mut poly = TruncatedSeries::<Rational>::new(1, vec![Var::y("y")], vec![Bound::polynomial(0, 2)]);
        poly.insert(vec![0], int(1)).unwrap();
        poly.insert(vec![2], int(-1)).unwrap();
        let c = a.mul(&poly).unwrap();
        assert_eq!(c.window()[0], Bound::open(-3, 5));
        assert_eq!(c.coeff(&[0]).unwrap(), int(0 - (-2)));
        assert!(c.coeff(&[-4]).is_err());
    }

    #[test]
    fn inverse_roundtrip() {
        let f = S::univariate("y", 1, 8, (1..=8).map(|k| (k, rat(1, k))));
        let g = f.inverse().unwrap();
        let one = f.mul(&g).unwrap();
        assert_eq!(one.coeff(&[0]).unwrap(), int(1));
        for k in 1..=one.window()[0].hi {
            assert_eq!(one.coeff(&[k]).unwrap(), int(0));
        }
    }

    #[test]
    fn log_of_exp_is_identity() {
        let f = S::exp_minus_one_pow("y", 1, 8).unwrap();
        let l = S::log1p("x", 8);
        let c = l.compose(&f).unwrap();
        assert_eq!(c.coeff(&[1]).unwrap(), int(1));
        for k in 2..=8 {
            assert_eq!(c.coeff(&[k]).unwrap(), int(0), "k={k}");
        }
    }

    #[test]
    fn substitution_examples() {
        let vars = vec![Var::x("x1"), Var::x("x2")];
        // x1 with p = 1 -> x2 + x0
        let mut s = TruncatedSeries::<Cyclotomic>::new(1, vars.clone(), vec![Bound::polynomial(1, 1), Bound::polynomial(0, 0)]);
        s.insert(vec![1, 0], Cyclotomic::one()).unwrap();
        let out = s.substitute_root("x1", 0, "x2", "x0", 3, -2, 2).unwrap();
        assert_eq!(out.coeff(&[0, 1]).unwrap(), Cyclotomic::one());
        assert_eq!(out.coeff(&[1, 0]).unwrap(), Cyclotomic::one());
        assert!(out.coeff(&[2, -1]).unwrap().is_zero());

        // x1^{1/2}, p = 2, s = 1 -> -(x2 + x0)^{1/2}
        let mut s = TruncatedSeries::<Cyclotomic>::new(2, vars.clone(), vec![Bound::polynomial(1, 1), Bound::polynomial(0, 0)]);
        s.insert(vec![1, 0], Cyclotomic::one()).unwrap();
        let out = s.substitute_root("x1", 1, "x2", "x0", 3, -10, 2).unwrap();
        assert_eq!(out.coeff(&[0, 1]).unwrap(), Cyclotomic::rational(int(-1)));
        assert_eq!(out.coeff(&[1, -1]).unwrap(), Cyclotomic::rational(rat(-1, 2)));
        assert_eq!(out.coeff(&[2, -3]).unwrap(), Cyclotomic::rational(rat(1, 8)));

        // x1^{-1}, p = 1 -> sum (-1)^i x2^{-1-i} x0^i
        let mut s = TruncatedSeries::<Cyclotomic>::new(1, vars, vec![Bound::polynomial(-1, -1), Bound::polynomial(0, 0)]);
        s.insert(vec![-1, 0], Cyclotomic::one()).unwrap();
        let out = s.substitute_root("x1", 0, "x2", "x0", 4, -5, 0).unwrap();
        for i in 0..=4 {
            let sign = if i % 2 == 0 { 1 } else { -1 };
            assert_eq!(out.coeff(&[i, -1 - i]).unwrap(), Cyclotomic::rational(int(sign)));
        }
    }

    #[test]
    fn substitution_refuses_uncertifiable_window() {
        let vars = vec![Var::x("x1"), Var::x("x2")];
        let s = TruncatedSeries::<Cyclotomic>::new(1, vars, vec![Bound::open(-3, 3), Bound::open(-3, 3)]);
        assert!(matches!(s.substitute_root("x1", 0, "x2", "x0", 1, 0, 0), Err(Error::WindowInsufficient(_))));
    }
}
