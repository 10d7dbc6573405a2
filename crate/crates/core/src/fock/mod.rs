//! Heisenberg Fock modules: the twisted module `S[nu]` and, with integral
//! levels, the untwisted space `S(h^-)` over the same `h`.
//!
//! `h` is fixed in an eigenbasis `beta_{k,a}` (`nu beta_{k,a} = w^k beta_{k,a}`)
//! with `<beta_{k,a}, beta_{k',a'}> = 1` iff `k + k' = 0 mod p` and `a = a'`.

mod checks;
mod quad;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::arith::rational::{rat, to_fraction_string};
use crate::arith::{Coefficient, Cyclotomic, Rational, Scalar};
use crate::error::{Error, Result};

pub use checks::{
    delta_closed_form, delta_eigenvalues, delta_genfun, graded_dimension_check, graded_dimensions, rep_check, rep_sweep,
    vacuum_eigenvalue,
};
pub use quad::{apply_operator, correction, quad_operator, Kernel, QuadOperator, Variant};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawSetup")]
pub struct TwistSetup {
    p: u32,
    dims: Vec<u32>,
}

#[derive(Deserialize)]
struct RawSetup {
    p: u32,
    dims: Vec<u32>,
}

impl TryFrom<RawSetup> for TwistSetup {
    type Error = Error;
    fn try_from(r: RawSetup) -> Result<Self> {
        TwistSetup::new(r.p, r.dims)
    }
}

impl TwistSetup {
    pub fn new(p: u32, dims: Vec<u32>) -> Result<Self> {
        if p == 0 {
            return Err(Error::InvalidSetup("period p must be positive".into()));
        }
        if dims.len() != p as usize {
            return Err(Error::InvalidSetup(format!("expected {p} dimensions, got {}", dims.len())));
        }
        if dims.iter().sum::<u32>() == 0 {
            return Err(Error::InvalidSetup("total dimension must be positive".into()));
        }
        for k in 0..p as usize {
            let dual = (p as usize - k) % p as usize;
            if dims[k] != dims[dual] {
                return Err(Error::InvalidSetup(format!(
                    "invariant d_k = d_(p-k) violated: d_{k} = {} but d_{dual} = {}",
                    dims[k], dims[dual]
                )));
            }
        }
        Ok(TwistSetup { p, dims })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn dims(&self) -> &[u32] {
        &self.dims
    }

    pub fn dim(&self, k: u32) -> u32 {
        self.dims[k as usize]
    }

    pub fn d(&self) -> u32 {
        self.dims.iter().sum()
    }

    pub fn dual(&self, k: u32) -> u32 {
        (self.p - k % self.p) % self.p
    }

    /// All basis labels `(k, a)` of `h`.
    pub fn labels(&self) -> Vec<(u32, u32)> {
        (0..self.p).flat_map(|k| (1..=self.dim(k)).map(move |a| (k, a))).collect()
    }

    pub fn pairing(&self, k: u32, a: u32, k2: u32, a2: u32) -> bool {
        (k + k2).is_multiple_of(self.p) && a == a2
    }
}

/// `beta_{k,a}(num / den)` where `den` is set by the space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModeLabel {
    pub k: u32,
    pub a: u32,
    pub num: i64,
}

impl ModeLabel {
    pub fn new(k: u32, a: u32, num: i64) -> Self {
        ModeLabel { k, a, num }
    }
}

pub type Monomial = Vec<ModeLabel>;

/// Which Fock space a vector lives in.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FockSpace {
    setup: TwistSetup,
    twisted: bool,
}

impl FockSpace {
    pub fn twisted(setup: &TwistSetup) -> Self {
        FockSpace { setup: setup.clone(), twisted: true }
    }

    pub fn untwisted(setup: &TwistSetup) -> Self {
        FockSpace { setup: setup.clone(), twisted: false }
    }

    pub fn setup(&self) -> &TwistSetup {
        &self.setup
    }

    pub fn is_twisted(&self) -> bool {
        self.twisted
    }

    /// Denominator of levels.
    pub fn den(&self) -> i64 {
        if self.twisted {
            self.setup.p as i64
        } else {
            1
        }
    }

    pub fn level(&self, m: &ModeLabel) -> Rational {
        rat(m.num, self.den())
    }

    pub fn is_valid(&self, m: &ModeLabel) -> bool {
        m.k < self.setup.p
            && m.a >= 1
            && m.a <= self.setup.dim(m.k)
            && (!self.twisted || m.num.rem_euclid(self.setup.p as i64) == m.k as i64)
    }

    /// Degree numerator (over `den`) of a monomial.
    pub fn degree_num(&self, mono: &Monomial) -> i64 {
        -mono.iter().map(|m| m.num).sum::<i64>()
    }

    pub fn degree(&self, mono: &Monomial) -> Rational {
        rat(self.degree_num(mono), self.den())
    }

    /// Labels allowed at level `-q/den` for `q > 0`.
    fn creation_labels(&self, q: i64) -> Vec<ModeLabel> {
        let p = self.setup.p;
        let ks: Vec<u32> = if self.twisted { vec![((-q).rem_euclid(p as i64)) as u32] } else { (0..p).collect() };
        ks.into_iter().flat_map(|k| (1..=self.setup.dim(k)).map(move |a| ModeLabel::new(k, a, -q))).collect()
    }

    /// All monomials of degree `<= max_degree`, grouped by degree numerator.
    pub fn enumerate_basis(&self, max_degree: &Rational) -> BTreeMap<i64, Vec<Monomial>> {
        let max_num = crate::arith::rational::floor_i64(&(max_degree * Rational::from_integer(self.den().into())));
        let mut parts: Vec<ModeLabel> = Vec::new();
        for q in 1..=max_num.max(0) {
            parts.extend(self.creation_labels(q));
        }
        parts.sort_by_key(|m| (-m.num, m.k, m.a));
        let mut out: BTreeMap<i64, Vec<Monomial>> = BTreeMap::new();
        let mut cur = Vec::new();
        fn rec(
            parts: &[ModeLabel],
            start: usize,
            left: i64,
            cur: &mut Vec<ModeLabel>,
            out: &mut BTreeMap<i64, Vec<Monomial>>,
            total: i64,
        ) {
            let mut mono = cur.clone();
            mono.sort();
            out.entry(total - left).or_default().push(mono);
            for i in start..parts.len() {
                let q = -parts[i].num;
                if q > left {
                    break;
                }
                cur.push(parts[i]);
                rec(parts, i, left - q, cur, out, total);
                cur.pop();
            }
        }
        if max_num >= 0 {
            rec(&parts, 0, max_num, &mut cur, &mut out, max_num);
        }
        for v in out.values_mut() {
            v.sort();
        }
        out
    }

    pub fn basis_up_to(&self, max_degree: &Rational) -> Vec<Monomial> {
        self.enumerate_basis(max_degree).into_values().flatten().collect()
    }

    /// `beta(n)` applied to a vector; `C` acts as 1 and zero modes as 0.
    pub fn apply_mode(&self, mode: &ModeLabel, v: &FockVector) -> FockVector {
        let mut out = FockVector::zero();
        if mode.num == 0 {
            return out;
        }
        for (mono, c) in &v.terms {
            if mode.num < 0 {
                let mut m = mono.clone();
                let pos = m.partition_point(|x| x < mode);
                m.insert(pos, *mode);
                out.add_term(m, c.clone());
            } else {
                let target = ModeLabel::new(self.setup.dual(mode.k), mode.a, -mode.num);
                let mult = mono.iter().filter(|x| **x == target).count() as i64;
                if mult == 0 {
                    continue;
                }
                let mut m = mono.clone();
                let pos = m.iter().position(|x| *x == target).expect("present");
                m.remove(pos);
                out.add_term(m, c.scale(&(self.level(mode) * Rational::from_integer(mult.into()))));
            }
        }
        out
    }

    pub fn vector_json(&self, v: &FockVector) -> Value {
        Value::Array(
            v.terms
                .iter()
                .map(|(mono, c)| {
                    let labels: Vec<Value> = mono.iter().map(|m| json!([m.k, m.a, to_fraction_string(&self.level(m))])).collect();
                    json!({ "monomial": labels, "coeff": c })
                })
                .collect(),
        )
    }

    pub fn monomial_json(&self, mono: &Monomial) -> Value {
        self.vector_json(&FockVector::basis(mono.clone()))
    }
}

/// Finite linear combination of creation monomials.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct FockVector {
    terms: BTreeMap<Monomial, Cyclotomic>,
}

impl FockVector {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn vacuum() -> Self {
        Self::basis(Vec::new())
    }

    pub fn basis(mono: Monomial) -> Self {
        let mut v = Self::zero();
        v.add_term(mono, Cyclotomic::one());
        v
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, Cyclotomic> {
        &self.terms
    }

    pub fn coeff(&self, mono: &Monomial) -> Cyclotomic {
        self.terms.get(mono).cloned().unwrap_or_else(Cyclotomic::zero)
    }

    pub fn add_term(&mut self, mono: Monomial, c: Cyclotomic) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&mono) {
            Some(x) => {
                let s = &*x + &c;
                if s.is_zero() {
                    self.terms.remove(&mono);
                } else {
                    *x = s;
                }
            }
            None => {
                self.terms.insert(mono, c);
            }
        }
    }

    pub fn add_scaled(&mut self, o: &FockVector, s: &Cyclotomic) {
        for (m, c) in &o.terms {
            self.add_term(m.clone(), c * s);
        }
    }

    /// A monomial where the two vectors differ, with both coefficients.
    pub fn first_difference(&self, o: &FockVector) -> Option<(Monomial, Cyclotomic, Cyclotomic)> {
        let d = Coefficient::sub(self, o);
        d.terms.keys().next().map(|m| (m.clone(), self.coeff(m), o.coeff(m)))
    }

    pub fn scale_rational(&self, q: &Rational) -> Self {
        self.scale(&Cyclotomic::rational(q.clone()))
    }

    /// The vector as a rational multiple of `mono`, if it is one.
    pub fn eigenvalue_on(&self, mono: &Monomial) -> Option<Rational> {
        if self.terms.keys().any(|m| m != mono) {
            return None;
        }
        self.coeff(mono).as_rational()
    }
}

impl Coefficient for FockVector {
    type Scalar = Cyclotomic;

    fn zero() -> Self {
        FockVector::default()
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    fn scale(&self, s: &Cyclotomic) -> Self {
        if Scalar::is_zero(s) {
            return FockVector::default();
        }
        FockVector { terms: self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::{int, rat};

    fn half() -> FockSpace {
        FockSpace::twisted(&TwistSetup::new(2, vec![0, 1]).unwrap())
    }

    #[test]
    fn setup_invariants() {
        assert!(TwistSetup::new(2, vec![2, 1]).is_ok());
        assert!(TwistSetup::new(3, vec![1, 2, 1]).is_err());
        assert!(TwistSetup::new(0, vec![]).is_err());
        assert!(TwistSetup::new(2, vec![0, 0]).is_err());
        let s: TwistSetup = serde_json::from_str(r#"{"p":3,"dims":[0,1,1]}"#).unwrap();
        assert_eq!(s.d(), 2);
        assert!(serde_json::from_str::<TwistSetup>(r#"{"p":3,"dims":[1,2,1]}"#).is_err());
        assert_eq!(serde_json::to_string(&s).unwrap(), r#"{"p":3,"dims":[0,1,1]}"#);
    }

    #[test]
    fn enumerate_examples() {
        let b = half().enumerate_basis(&rat(3, 2));
        assert_eq!(b[&3].len(), 2);
        assert_eq!(b[&3], vec![vec![ModeLabel::new(1, 1, -3)], vec![ModeLabel::new(1, 1, -1); 3]]);
        let one = FockSpace::twisted(&TwistSetup::new(1, vec![1]).unwrap());
        assert_eq!(one.enumerate_basis(&int(3))[&3].len(), 3);
        let z = half().enumerate_basis(&int(0));
        assert_eq!(z.len(), 1);
        assert_eq!(z[&0], vec![Vec::<ModeLabel>::new()]);
    }

    #[test]
    fn mode_examples() {
        let s = half();
        let v = s.apply_mode(&ModeLabel::new(1, 1, -1), &FockVector::vacuum());
        let back = s.apply_mode(&ModeLabel::new(1, 1, 1), &v);
        assert_eq!(back, FockVector::vacuum().scale_rational(&rat(1, 2)));
        assert!(s.apply_mode(&ModeLabel::new(1, 1, 3), &FockVector::vacuum()).terms.is_empty());
        let p1 = FockSpace::twisted(&TwistSetup::new(1, vec![1]).unwrap());
        let w = p1.apply_mode(&ModeLabel::new(0, 1, -2), &FockVector::vacuum());
        assert!(p1.apply_mode(&ModeLabel::new(0, 1, 0), &w).terms.is_empty());
    }

    #[test]
    fn commutator_relation() {
        // [beta(m), beta'(n)] = <beta, beta'> m delta_{m+n,0} on a sample vector
        let s = FockSpace::twisted(&TwistSetup::new(3, vec![0, 1, 1]).unwrap());
        let w = s.apply_mode(&ModeLabel::new(2, 1, -1), &s.apply_mode(&ModeLabel::new(1, 1, -2), &FockVector::vacuum()));
        for (a, b) in [((1, 4), (2, -4)), ((1, 1), (2, -1)), ((2, 2), (1, -2)), ((1, 1), (1, -2))] {
            let x = ModeLabel::new(a.0, 1, a.1);
            let y = ModeLabel::new(b.0, 1, b.1);
            let lhs = Coefficient::sub(&s.apply_mode(&x, &s.apply_mode(&y, &w)), &s.apply_mode(&y, &s.apply_mode(&x, &w)));
            let expect = if s.setup().pairing(x.k, x.a, y.k, y.a) && x.num + y.num == 0 {
                w.scale_rational(&s.level(&x))
            } else {
                FockVector::zero()
            };
            assert_eq!(lhs, expect);
        }
    }

    #[test]
    fn json_shape() {
        let v = half().apply_mode(&ModeLabel::new(1, 1, -1), &FockVector::vacuum());
        assert_eq!(half().vector_json(&v).to_string(), r#"[{"coeff":["1"],"monomial":[[1,1,"-1/2"]]}]"#);
    }
}
