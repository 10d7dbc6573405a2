//! Quadratic operators `L^(r1,r2)(n) = (1/2) sum (-j)^r1 (-(n-j))^r2 :beta(j) beta'(n-j):`
//! with the Bernoulli vacuum corrections.

use num_traits::Zero;
use serde::Serialize;

use super::{FockSpace, FockVector, ModeLabel, TwistSetup};
use crate::arith::rational::{int, pow, rat};
use crate::arith::{bernoulli_number, bernoulli_poly, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Plain,
    Bar,
}

/// `j -> (-j)^r1 (-(n-j))^r2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Kernel {
    pub r1: u32,
    pub r2: u32,
}

impl Kernel {
    pub fn eval(&self, n: &Rational, j: &Rational) -> Rational {
        pow(&-j, self.r1) * pow(&(j - n), self.r2)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuadOperator {
    pub space: FockSpace,
    pub n: i64,
    pub kernel: Kernel,
    pub variant: Variant,
    pub scalar: Rational,
}

/// Vacuum correction of the diagonal operator at `n = 0`:
/// `-(-1)^r / (4(r+1)) sum_k d_k (B_{2r+2}(k/p) - B_{2r+2})` for the plain
/// variant, without the `- B_{2r+2}` for the bar one.
pub fn correction(setup: &TwistSetup, r: u32, variant: Variant) -> Rational {
    let p = setup.p() as i64;
    let deg = 2 * r as usize + 2;
    let b = bernoulli_number(deg);
    let mut sum = Rational::zero();
    for k in 0..setup.p() {
        let mut t = bernoulli_poly(deg, &rat(k as i64, p));
        if variant == Variant::Plain {
            t -= &b;
        }
        sum += t * int(setup.dim(k) as i64);
    }
    let sign = if r.is_multiple_of(2) { int(-1) } else { int(1) };
    sign * sum / int(4 * (r as i64 + 1))
}

pub fn quad_operator(setup: &TwistSetup, r1: u32, r2: u32, n: i64, variant: Variant) -> QuadOperator {
    let scalar = if n == 0 && r1 == r2 { correction(setup, r1, variant) } else { Rational::zero() };
    QuadOperator { space: FockSpace::twisted(setup), n, kernel: Kernel { r1, r2 }, variant, scalar }
}

impl QuadOperator {
    pub fn diagonal(setup: &TwistSetup, r: u32, n: i64, variant: Variant) -> Self {
        quad_operator(setup, r, r, n, variant)
    }

    /// Image of a single basis monomial.
    pub fn apply_monomial(&self, mono: &super::Monomial) -> FockVector {
        let sp = &self.space;
        let setup = sp.setup();
        let den = sp.den();
        let deg = sp.degree_num(mono);
        let n_num = self.n * den;
        let n = int(self.n);
        let w = FockVector::basis(mono.clone());
        let mut out = w.scale_rational(&self.scalar);
        let half = rat(1, 2);
        for (k, a) in setup.labels() {
            let kd = setup.dual(k);
            for jn in (n_num - deg)..=deg {
                let first = ModeLabel::new(k, a, jn);
                if !sp.is_valid(&first) {
                    continue;
                }
                let second = ModeLabel::new(kd, a, n_num - jn);
                let c = self.kernel.eval(&n, &sp.level(&first)) * &half;
                if c.is_zero() {
                    continue;
                }
                let (hi, lo) = if first.num >= second.num { (first, second) } else { (second, first) };
                let v = sp.apply_mode(&lo, &sp.apply_mode(&hi, &w));
                out.add_scaled(&v, &crate::arith::Cyclotomic::rational(c));
            }
        }
        out
    }
}

pub fn apply_operator(op: &QuadOperator, v: &FockVector) -> FockVector {
    let mut out = FockVector::zero();
    for (mono, c) in v.terms() {
        out.add_scaled(&op.apply_monomial(mono), c);
    }
    out
}
