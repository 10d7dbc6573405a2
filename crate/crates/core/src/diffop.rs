//! The Lie algebra `D^ = Cc + D` of differential operators `t^m f(D)` on the
//! circle, `D = t d/dt`, with bracket
//! `[t^m f(D), t^n g(D)] = t^{m+n}(f(D+n)g(D) - g(D+m)f(D)) - (1/2)Psi c`,
//! and the generators `L_n^(r) = (-1)^{r+1} D^r (t^n D) D^r` of `D^+`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::arith::rational::{factorial, int, pow, rat, to_fraction_string, Rational};
use crate::arith::zeta_negative;
use crate::report::{CheckRecord, Report};

/// Polynomial in `D` with rational coefficients, lowest degree first, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Poly(Vec<Rational>);

impl Poly {
    pub fn new(mut c: Vec<Rational>) -> Self {
        while c.last().is_some_and(Zero::is_zero) {
            c.pop();
        }
        Poly(c)
    }

    pub fn monomial(k: usize, c: Rational) -> Self {
        let mut v = vec![Rational::zero(); k + 1];
        v[k] = c;
        Poly::new(v)
    }

    pub fn constant(c: Rational) -> Self {
        Poly::new(vec![c])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.0.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let n = self.0.len().max(o.0.len());
        Poly::new(
            (0..n)
                .map(|i| {
                    self.0.get(i).cloned().unwrap_or_else(Rational::zero) + o.0.get(i).cloned().unwrap_or_else(Rational::zero)
                })
                .collect(),
        )
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        Poly::new(self.0.iter().map(|x| x * c).collect())
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.scale(&int(-1)))
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::default();
        }
        let mut out = vec![Rational::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    /// `f(D + n)`.
    pub fn shift(&self, n: i64) -> Poly {
        let lin = Poly::new(vec![int(n), int(1)]);
        self.0.iter().rev().fold(Poly::default(), |acc, c| acc.mul(&lin).add(&Poly::constant(c.clone())))
    }

    pub fn pow(&self, k: u32) -> Poly {
        (0..k).fold(Poly::constant(int(1)), |acc, _| acc.mul(self))
    }
}

/// An element `sum_m t^m f_m(D) + z c` of `D^`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct DiffOpElement {
    terms: BTreeMap<i64, Poly>,
    central: Rational,
}

impl DiffOpElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn term(m: i64, f: Poly) -> Self {
        let mut e = Self::zero();
        e.add_term(m, f);
        e
    }

    pub fn central_element(z: Rational) -> Self {
        DiffOpElement { terms: BTreeMap::new(), central: z }
    }

    pub fn terms(&self) -> &BTreeMap<i64, Poly> {
        &self.terms
    }

    pub fn central(&self) -> &Rational {
        &self.central
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty() && self.central.is_zero()
    }

    fn add_term(&mut self, m: i64, f: Poly) {
        let sum = match self.terms.remove(&m) {
            Some(g) => g.add(&f),
            None => f,
        };
        if !sum.is_zero() {
            self.terms.insert(m, sum);
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (m, f) in &o.terms {
            out.add_term(*m, f.clone());
        }
        out.central += &o.central;
        out
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = Self::central_element(&self.central * c);
        for (m, f) in &self.terms {
            out.add_term(*m, f.scale(c));
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&int(-1)))
    }

    pub fn to_records(&self) -> DiffOpRecords {
        DiffOpRecords {
            terms: self
                .terms
                .iter()
                .map(|(m, f)| TermRecord { m: *m, coeffs: f.coeffs().iter().map(to_fraction_string).collect() })
                .collect(),
            central: to_fraction_string(&self.central),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TermRecord {
    pub m: i64,
    pub coeffs: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DiffOpRecords {
    pub terms: Vec<TermRecord>,
    pub central: String,
}

/// `Psi(t^m f, t^n g)`, extended bilinearly; the central parts are ignored.
pub fn cocycle_psi(a: &DiffOpElement, b: &DiffOpElement) -> Rational {
    let mut acc = Rational::zero();
    for (m, f) in &a.terms {
        if let Some(g) = b.terms.get(&-m) {
            acc += psi_monomial(*m, f, g);
        }
    }
    acc
}

fn psi_monomial(m: i64, f: &Poly, g: &Poly) -> Rational {
    match m.cmp(&0) {
        std::cmp::Ordering::Equal => Rational::zero(),
        std::cmp::Ordering::Greater => (1..=m).map(|i| f.eval(&int(-i)) * g.eval(&int(m - i))).sum(),
        std::cmp::Ordering::Less => -psi_monomial(-m, g, f),
    }
}

/// Bracket in `D^` with the normalized cocycle `-(1/2) Psi`.
pub fn bracket(a: &DiffOpElement, b: &DiffOpElement) -> DiffOpElement {
    let mut out = DiffOpElement::zero();
    for (m, f) in &a.terms {
        for (n, g) in &b.terms {
            let p = f.shift(*n).mul(g).sub(&g.shift(*m).mul(f));
            out.add_term(m + n, p);
        }
    }
    out.central = -cocycle_psi(a, b) / int(2);
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Basis {
    Plain,
    Bar,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct GeneratorIndex {
    pub n: i64,
    pub r: u32,
    pub basis: Basis,
}

impl GeneratorIndex {
    pub fn plain(n: i64, r: u32) -> Self {
        GeneratorIndex { n, r, basis: Basis::Plain }
    }
    pub fn bar(n: i64, r: u32) -> Self {
        GeneratorIndex { n, r, basis: Basis::Bar }
    }
}

/// The differential-operator part of `L_n^(r)`: `(-1)^{r+1} (D+n)^r D^{r+1}`.
pub fn generator_poly(n: i64, r: u32) -> Poly {
    let sign = if r.is_multiple_of(2) { int(-1) } else { int(1) };
    let shifted = Poly::new(vec![int(n), int(1)]).pow(r);
    shifted.mul(&Poly::monomial(r as usize + 1, sign))
}

/// Central shift `(-1)^r zeta(-1-2r) / 2` of the Bloch generator `Lbar_0^(r)`.
pub fn bar_shift(r: u32) -> Rational {
    let sign = if r.is_multiple_of(2) { int(1) } else { int(-1) };
    sign * zeta_negative(1 + 2 * r as usize) / int(2)
}

pub fn generator(idx: GeneratorIndex) -> DiffOpElement {
    let mut e = DiffOpElement::term(idx.n, generator_poly(idx.n, idx.r));
    if idx.basis == Basis::Bar && idx.n == 0 {
        e.central = bar_shift(idx.r);
    }
    e
}

/// `a_i` coefficients, central part and residual of an element at one degree.
#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition {
    pub degree: i64,
    pub coefficients: BTreeMap<u32, Rational>,
    pub central: Rational,
    pub residual: DiffOpElement,
}

impl Decomposition {
    pub fn reconstruct(&self) -> DiffOpElement {
        let mut out = self.residual.add(&DiffOpElement::central_element(self.central.clone()));
        for (i, c) in &self.coefficients {
            out = out.add(&generator(GeneratorIndex::plain(self.degree, *i)).scale(c));
        }
        out
    }

    pub fn support(&self) -> Option<(u32, u32)> {
        Some((*self.coefficients.keys().next()?, *self.coefficients.keys().next_back()?))
    }
}

/// Triangular solve of `E` against the plain generators at fixed degree.
/// The leading term of `L_degree^(i)` is `(-1)^{i+1} D^{2i+1}`, so odd leading
/// degrees are eliminated and even ones are moved to the residual.
pub fn decompose(e: &DiffOpElement, degree: i64) -> Decomposition {
    let mut residual = DiffOpElement::zero();
    for (m, f) in &e.terms {
        if *m != degree {
            residual.add_term(*m, f.clone());
        }
    }
    let mut coefficients = BTreeMap::new();
    let mut f = e.terms.get(&degree).cloned().unwrap_or_default();
    let mut rest = Poly::default();
    while let Some(d) = f.degree() {
        let lead = f.coeffs()[d].clone();
        if d % 2 == 1 {
            let i = ((d - 1) / 2) as u32;
            let c = if i.is_multiple_of(2) { -lead } else { lead };
            f = f.sub(&generator_poly(degree, i).scale(&c));
            coefficients.insert(i, c);
        } else {
            let mono = Poly::monomial(d, lead);
            f = f.sub(&mono);
            rest = rest.add(&mono);
        }
    }
    residual.add_term(degree, rest);
    Decomposition { degree, coefficients, central: e.central.clone(), residual }
}

/// `[Lbar_m^(r), Lbar_n^(s)]` decomposed in the Bloch basis: the `a_i` are the
/// plain structure constants and `central` is the coefficient of `c`.
pub fn bar_bracket(r: u32, s: u32, m: i64, n: i64) -> Decomposition {
    let br = bracket(&generator(GeneratorIndex::bar(m, r)), &generator(GeneratorIndex::bar(n, s)));
    let mut dec = decompose(&br, m + n);
    if m + n == 0 {
        for (i, a) in &dec.coefficients {
            dec.central -= a * bar_shift(*i);
        }
    }
    dec
}

/// Central coefficient of `[Lbar_m^(r), Lbar_{-m}^(s)]` via the change of basis.
pub fn bar_central_term(r: u32, s: u32, m: i64) -> Rational {
    bar_bracket(r, s, m, -m).central
}

/// `(r+s+1)!^2 / (2 (2(r+s)+3)!) m^{2(r+s)+3}`.
pub fn pure_monomial_central(r: u32, s: u32, m: i64) -> Rational {
    let k = (r + s) as u64;
    let num = factorial(k + 1);
    let c = Rational::new(&num * &num, factorial(2 * k + 3) * 2);
    c * pow(&int(m), 2 * k as u32 + 3)
}

/// Virasoro central term `(m^3 - m)/12`.
pub fn virasoro_central(m: i64) -> Rational {
    rat(m * m * m - m, 12)
}

/// Pure-monomial central terms for `r, s <= r_max`, `1 <= m <= m_max`, and
/// closure with support in `[min(r,s), r+s]` for `|m|, |n| <= m_max`.
pub fn abstract_check(r_max: u32, m_max: i64) -> Report {
    let mut records = Vec::new();
    for r in 0..=r_max {
        for s in 0..=r_max {
            for m in 1..=m_max {
                let lhs = bar_central_term(r, s, m);
                let rhs = pure_monomial_central(r, s, m);
                let ok = lhs == rhs;
                records.push(
                    CheckRecord::new("abstract", "pure_monomial_central")
                        .param("r", r)
                        .param("s", s)
                        .param("m", m)
                        .values(to_fraction_string(&lhs), to_fraction_string(&rhs))
                        .outcome(ok),
                );
            }
            for m in -m_max..=m_max {
                for n in -m_max..=m_max {
                    let br = bracket(&generator(GeneratorIndex::plain(m, r)), &generator(GeneratorIndex::plain(n, s)));
                    let dec = decompose(&br, m + n);
                    let coeffs: BTreeMap<String, String> =
                        dec.coefficients.iter().map(|(i, a)| (i.to_string(), to_fraction_string(a))).collect();
                    let in_range = dec.support().is_none_or(|(lo, hi)| lo >= r.min(s) && hi <= r + s);
                    let rec = CheckRecord::new("abstract", "closure")
                        .param("r", r)
                        .param("s", s)
                        .param("m", m)
                        .param("n", n)
                        .values(&coeffs, format!("support in [{}, {}]", r.min(s), r + s));
                    records.push(if !dec.residual.is_zero() {
                        rec.fail_with(serde_json::json!({ "residual": dec.residual.to_records() }))
                    } else {
                        rec.outcome(in_range)
                    });
                }
            }
        }
    }
    Report::new(records)
}

pub fn is_one(q: &Rational) -> bool {
    q.is_one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn l(n: i64, r: u32) -> DiffOpElement {
        generator(GeneratorIndex::plain(n, r))
    }

    #[test]
    fn generator_examples() {
        assert_eq!(l(5, 0), DiffOpElement::term(5, Poly::monomial(1, int(-1))));
        assert_eq!(l(0, 1), DiffOpElement::term(0, Poly::monomial(3, int(1))));
        let bar = generator(GeneratorIndex::bar(0, 0));
        assert_eq!(bar, DiffOpElement::term(0, Poly::monomial(1, int(-1))).add(&DiffOpElement::central_element(rat(-1, 24))));
    }

    #[test]
    fn generator_matches_operator_product() {
        // D^r (t^n D) D^r as an operator: commute D^r past t^n by D t^n = t^n (D + n).
        for n in -3..=3 {
            for r in 0..4u32 {
                let d = Poly::monomial(1, int(1));
                let expected = d.shift(n).pow(r).mul(&d).mul(&d.pow(r));
                let sign = if r % 2 == 0 { int(-1) } else { int(1) };
                assert_eq!(generator_poly(n, r), expected.scale(&sign));
            }
        }
    }

    #[test]
    fn cocycle_examples() {
        let one = Poly::constant(int(1));
        let d = Poly::monomial(1, int(1));
        assert_eq!(cocycle_psi(&DiffOpElement::term(1, one.clone()), &DiffOpElement::term(-1, one.clone())), int(1));
        assert_eq!(cocycle_psi(&DiffOpElement::term(2, d.clone()), &DiffOpElement::term(-2, d.clone())), int(-1));
        assert_eq!(cocycle_psi(&DiffOpElement::term(3, d.clone()), &DiffOpElement::term(-2, one)), int(0));
    }

    #[test]
    fn bracket_examples() {
        let b = bracket(&l(2, 0), &l(-2, 0));
        assert_eq!(b, l(0, 0).scale(&int(4)).add(&DiffOpElement::central_element(rat(1, 2))));
        assert!(bracket(&l(3, 2), &l(3, 2)).is_zero());
        assert_eq!(bracket(&l(1, 0), &l(-1, 0)), l(0, 0).scale(&int(2)));
        // brackets with c vanish
        assert!(bracket(&DiffOpElement::central_element(int(1)), &l(2, 1)).is_zero());
    }

    #[test]
    fn decompose_examples() {
        let dec = decompose(&l(3, 2), 3);
        assert_eq!(dec.coefficients, BTreeMap::from([(2, int(1))]));
        assert!(dec.residual.is_zero());
        for m in -3..=3 {
            for n in -3..=3 {
                let dec = decompose(&bracket(&l(m, 0), &l(n, 0)), m + n);
                assert!(dec.residual.is_zero());
                let expect: BTreeMap<u32, Rational> = if m == n { BTreeMap::new() } else { BTreeMap::from([(0, int(m - n))]) };
                assert_eq!(dec.coefficients, expect);
            }
        }
        let d2 = DiffOpElement::term(0, Poly::monomial(2, int(1)));
        let dec = decompose(&d2, 0);
        assert_eq!(dec.residual, d2);
        assert!(dec.coefficients.is_empty());
    }

    #[test]
    fn bar_central_examples() {
        assert_eq!(bar_central_term(0, 0, 1), rat(1, 12));
        assert_eq!(bar_central_term(0, 0, 2), rat(2, 3));
        assert_eq!(bar_central_term(0, 0, 3), rat(27, 12));
        assert_eq!(pure_monomial_central(0, 0, 2), rat(8, 12));
        assert!(bar_bracket(1, 2, 2, 1).central.is_zero());
    }

    #[test]
    fn virasoro_specialization() {
        for m in -5..=5 {
            for n in -5..=5 {
                let mut expect = l(m + n, 0).scale(&int(m - n));
                if m + n == 0 {
                    expect = expect.add(&DiffOpElement::central_element(virasoro_central(m)));
                }
                assert_eq!(bracket(&l(m, 0), &l(n, 0)), expect);
            }
        }
    }

    #[test]
    fn decomposition_reconstructs() {
        for (m, n, r, s) in [(2, -3, 1, 2), (1, -1, 3, 3), (0, 4, 0, 2)] {
            let br = bracket(&l(m, r), &l(n, s));
            let dec = decompose(&br, m + n);
            assert_eq!(dec.reconstruct(), br);
        }
    }

    fn arb_generator() -> impl Strategy<Value = DiffOpElement> {
        (-4i64..=4, 0u32..=3, any::<bool>())
            .prop_map(|(n, r, bar)| generator(if bar { GeneratorIndex::bar(n, r) } else { GeneratorIndex::plain(n, r) }))
    }

    proptest! {
        #[test]
        fn antisymmetry(a in arb_generator(), b in arb_generator()) {
            prop_assert!(bracket(&a, &b).add(&bracket(&b, &a)).is_zero());
        }

        #[test]
        fn jacobi(a in arb_generator(), b in arb_generator(), c in arb_generator()) {
            let j = bracket(&bracket(&a, &b), &c)
                .add(&bracket(&bracket(&b, &c), &a))
                .add(&bracket(&bracket(&c, &a), &b));
            prop_assert!(j.is_zero());
        }
    }
}
