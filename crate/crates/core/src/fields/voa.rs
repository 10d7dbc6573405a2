//! The quadratic sector of the free-boson vertex operator algebra `S(h^-)`.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::arith::rational::{binomial, int, rat};
use crate::arith::series::TruncatedSeries;
use crate::arith::{Coefficient, Cyclotomic, Rational};
use crate::error::{Error, Result};
use crate::fock::{FockSpace, FockVector, ModeLabel, Monomial, TwistSetup};

/// Elements of `S(h^-)` are Fock vectors over the untwisted space.
pub type VoaVector = FockVector;

/// The vertex algebra operations on the quadratic sector.
#[derive(Clone, Debug)]
pub struct Voa {
    space: FockSpace,
}

impl Voa {
    pub fn new(setup: &TwistSetup) -> Self {
        Voa { space: FockSpace::untwisted(setup) }
    }

    pub fn space(&self) -> &FockSpace {
        &self.space
    }

    pub fn setup(&self) -> &TwistSetup {
        self.space.setup()
    }

    /// `beta_{k,a}(-n) 1`.
    pub fn linear(&self, k: u32, a: u32, n: i64) -> VoaVector {
        FockVector::basis(vec![ModeLabel::new(k, a, -n)])
    }

    /// `beta_{k,a}(-n) beta_{k',a'}(-n') 1`.
    pub fn quadratic(&self, (k, a, n): (u32, u32, i64), (k2, a2, n2): (u32, u32, i64)) -> VoaVector {
        let mut m = vec![ModeLabel::new(k, a, -n), ModeLabel::new(k2, a2, -n2)];
        m.sort();
        FockVector::basis(m)
    }

    /// The conformal vector `(1/2) sum beta_{k,a}(-1) beta_{k*,a}(-1) 1`.
    pub fn omega(&self) -> VoaVector {
        self.square_sum(1)
    }

    /// `sum_{dual pairs} beta(-n) beta'(-n) 1`.
    pub fn square_sum(&self, n: i64) -> VoaVector {
        let setup = self.setup();
        let mut out = FockVector::zero();
        let scale = if n == 1 { rat(1, 2) } else { int(1) };
        for (k, a) in setup.labels() {
            let v = self.quadratic((k, a, n), (setup.dual(k), a, n));
            out.add_scaled(&v, &Cyclotomic::rational(scale.clone()));
        }
        out
    }

    pub fn weight(&self, mono: &Monomial) -> i64 {
        self.space.degree_num(mono)
    }

    /// Splits a vector into weight-homogeneous parts.
    pub fn homogeneous_parts(&self, v: &VoaVector) -> BTreeMap<i64, VoaVector> {
        let mut out: BTreeMap<i64, VoaVector> = BTreeMap::new();
        for (m, c) in v.terms() {
            out.entry(self.weight(m)).or_default().add_term(m.clone(), c.clone());
        }
        out
    }

    /// Eigencomponent index `sum k mod p` of a monomial (`nu` acts by `w^index`).
    pub fn eigen_index(&self, mono: &Monomial) -> u32 {
        let p = self.setup().p();
        (mono.iter().map(|m| m.k).sum::<u32>()) % p
    }

    /// `nu^s v`.
    pub fn nu_power(&self, v: &VoaVector, s: i64) -> VoaVector {
        let p = self.setup().p();
        let mut out = FockVector::zero();
        for (m, c) in v.terms() {
            let phase = Cyclotomic::root_power(p, s * self.eigen_index(m) as i64);
            out.add_term(m.clone(), c * &phase);
        }
        out
    }

    /// `u_n v` for a basis monomial `u` with at most two modes.
    pub fn monomial_product(&self, u: &Monomial, n: i64, v: &VoaVector) -> Result<VoaVector> {
        let out = match u.as_slice() {
            [] => {
                if n == -1 {
                    v.clone()
                } else {
                    FockVector::zero()
                }
            }
            [b] => {
                let a = -b.num;
                let c = binomial(&int(a - n - 2), (a - 1) as u64);
                let mode = ModeLabel::new(b.k, b.a, n + 1 - a);
                self.space.apply_mode(&mode, v).scale_rational(&c)
            }
            [b1, b2] => {
                // :Y(b1, x) Y(b2, x): at x^{-n-1}
                let (a1, a2) = (-b1.num, -b2.num);
                let total = n + 1 - a1 - a2;
                let mut out = FockVector::zero();
                for (mono, coeff) in v.terms() {
                    let deg = self.space.degree_num(mono);
                    let w = FockVector::basis(mono.clone());
                    for m1 in (total - deg)..=deg {
                        let m2 = total - m1;
                        let c = binomial(&int(-m1 - 1), (a1 - 1) as u64) * binomial(&int(-m2 - 1), (a2 - 1) as u64);
                        if Zero::is_zero(&c) {
                            continue;
                        }
                        let x = ModeLabel::new(b1.k, b1.a, m1);
                        let y = ModeLabel::new(b2.k, b2.a, m2);
                        let (hi, lo) = if m1 >= m2 { (x, y) } else { (y, x) };
                        let r = self.space.apply_mode(&lo, &self.space.apply_mode(&hi, &w));
                        out.add_scaled(&r, &(coeff * &Cyclotomic::rational(c)));
                    }
                }
                out
            }
            _ => return Err(Error::OutOfSector(format!("source with {} modes", u.len()))),
        };
        if let Some(m) = out.terms().keys().find(|m| m.len() > 2) {
            return Err(Error::OutOfSector(format!("product produced a term with {} modes", m.len())));
        }
        Ok(out)
    }

    /// `u_n v`.
    pub fn untwisted_product(&self, u: &VoaVector, n: i64, v: &VoaVector) -> Result<VoaVector> {
        let mut out = FockVector::zero();
        for (m, c) in u.terms() {
            out.add_scaled(&self.monomial_product(m, n, v)?, c);
        }
        Ok(out)
    }

    fn max_weight(&self, v: &VoaVector) -> i64 {
        v.terms().keys().map(|m| self.weight(m)).max().unwrap_or(0)
    }

    /// Coefficient of `y^j` in `Y[u, y] v = sum_n e^{y wt u} (e^y - 1)^{-n-1} u_n v`.
    pub fn square_bracket_coeff(&self, u: &VoaVector, v: &VoaVector, j: i64) -> Result<VoaVector> {
        let mut out = FockVector::zero();
        let wv = self.max_weight(v);
        for (wu, part) in self.homogeneous_parts(u) {
            for n in (-j - 1)..=(wu + wv - 1) {
                let c = square_kernel(wu, -n - 1, j);
                if Zero::is_zero(&c) {
                    continue;
                }
                let prod = self.untwisted_product(&part, n, v)?;
                out.add_scaled(&prod, &Cyclotomic::rational(c));
            }
        }
        Ok(out)
    }

    /// All coefficients of `Y[u, y] v` from the leading pole up to `y^j_max`.
    pub fn square_bracket(&self, u: &VoaVector, v: &VoaVector, j_max: i64) -> Result<BTreeMap<i64, VoaVector>> {
        let lo = -(self.max_weight(u) + self.max_weight(v));
        let mut out = BTreeMap::new();
        for j in lo..=j_max {
            let c = self.square_bracket_coeff(u, v, j)?;
            if !Coefficient::is_zero(&c) {
                out.insert(j, c);
            }
        }
        Ok(out)
    }
}

/// `[y^j] e^{c y} (e^y - 1)^m`.
pub fn square_kernel(c: i64, m: i64, j: i64) -> Rational {
    if j < m {
        return <Rational as Zero>::zero();
    }
    type S = TruncatedSeries<Rational>;
    let order = j - m.min(0);
    let e = S::exp("y", &int(c), order.max(0));
    let pw = S::exp_minus_one_pow("y", m, j).expect("unit series");
    e.mul(&pw).expect("same variable").coeff(&[j]).expect("certified")
}
