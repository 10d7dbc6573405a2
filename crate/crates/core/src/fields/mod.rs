//! Twisted vertex operators on `S[nu]` for the quadratic sector of `S(h^-)`.
//!
//! Linear fields are explicit mode sums. Quadratic fields are built from
//! products of linear ones through the modified weak associativity limit
//! ```text
//! lim_{x1^{1/p} -> w^s (x2+x0)^{1/p}} (x1-x2)^k Y(u,x1) Y(v,x2) = x0^k Y(Y(nu^{-s} u, x0) v, x2)
//! ```
//! and every identity check then tests that construction.
//!
//! Exponents of `x`, `x0`, `x1`, `x2` are carried as numerators over `p`.

mod checks;
mod genfun;
mod iterate;
mod theorem;
mod voa;

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use num_traits::Zero;

use crate::arith::rational::{binomial, int, rat};
use crate::fock::{FockSpace, FockVector, ModeLabel, Monomial, TwistSetup};

pub use checks::{
    assemble_consistency_check, commutator_sweep, homogeneous_commutator_check, jacobi_check, jacobi_sweep, jacobi_sweep_with,
    mwa_check, virasoro_axiom_check, weight_one_pairs, Source,
};
pub use genfun::{
    generating_l_check, generators_corollary_check, iterate_identity_check, lbar_bracket_check, solve_combination, GeneratingL,
};
pub use iterate::{IterateLimit, MwaOptions};
pub use theorem::{iterate_commutator_check, iterate_commutator_sweep};
pub use voa::{square_kernel, Voa, VoaVector};

/// Which generating convention a field's coefficients refer to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Convention {
    /// `Y_M(v, x) = sum v_n x^{-n-1}`.
    Y,
    /// `X_M(v, x) = x^{wt v} Y_M(v, x)`.
    X,
}

type Key = (Monomial, i64, Monomial);

/// Twisted vertex operators of one setup, with memoized coefficients.
pub struct FieldEngine {
    voa: Voa,
    space: FockSpace,
    cache: RwLock<HashMap<Key, Arc<FockVector>>>,
}

impl FieldEngine {
    pub fn new(setup: &TwistSetup) -> Self {
        FieldEngine { voa: Voa::new(setup), space: FockSpace::twisted(setup), cache: RwLock::new(HashMap::new()) }
    }

    pub fn setup(&self) -> &TwistSetup {
        self.space.setup()
    }

    pub fn p(&self) -> i64 {
        self.setup().p() as i64
    }

    pub fn voa(&self) -> &Voa {
        &self.voa
    }

    pub fn space(&self) -> &FockSpace {
        &self.space
    }

    /// `[x^{g/p}] Y_M(z, x) w` for a source monomial `z` and a basis monomial `w`.
    pub fn y_coeff_monomial(&self, z: &Monomial, g: i64, w: &Monomial) -> Arc<FockVector> {
        let key = (z.clone(), g, w.clone());
        if let Some(v) = self.cache.read().expect("lock").get(&key) {
            return v.clone();
        }
        let v = Arc::new(self.compute_y_coeff(z, g, w));
        self.cache.write().expect("lock").insert(key, v.clone());
        v
    }

    fn compute_y_coeff(&self, z: &Monomial, g: i64, w: &Monomial) -> FockVector {
        let p = self.p();
        match z.as_slice() {
            [] => {
                if g == 0 {
                    FockVector::basis(w.clone())
                } else {
                    FockVector::zero()
                }
            }
            [b] => self.linear_coeff(b.k, b.a, -b.num, g, &FockVector::basis(w.clone())),
            [b1, b2] => {
                // beta(-a) gamma(-b) 1 is (beta(-1)1)_{-a} gamma(-b)1: read it off at x0^{a+b}
                let lim = IterateLimit::new(self, (b1.k, b1.a), (b2.k, b2.a, -b2.num), 0, 1 + (-b2.num) as u32);
                lim.coefficient(-b1.num - b2.num, g, w)
            }
            _ => panic!("source outside the quadratic sector: {} modes (p = {p})", z.len()),
        }
    }

    /// `[x^{g/p}] Y_M(beta_{k,a}(-n) 1, x) w = C(g + n - 1, n - 1) beta(-g - n) w`.
    pub fn linear_coeff(&self, k: u32, a: u32, n: i64, g: i64, w: &FockVector) -> FockVector {
        let p = self.p();
        let level = -g - n * p;
        let mode = ModeLabel::new(k, a, level);
        if !self.space.is_valid(&mode) {
            return FockVector::zero();
        }
        let c = binomial(&(rat(g, p) + int(n - 1)), (n - 1) as u64);
        if c.is_zero() {
            return FockVector::zero();
        }
        self.space.apply_mode(&mode, w).scale_rational(&c)
    }

    /// `[x^{g/p}] Y_M(z, x) w`.
    pub fn y_coeff(&self, z: &VoaVector, g: i64, w: &FockVector) -> FockVector {
        let mut out = FockVector::zero();
        for (zm, zc) in z.terms() {
            for (wm, wc) in w.terms() {
                out.add_scaled(&self.y_coeff_monomial(zm, g, wm), &(zc * wc));
            }
        }
        out
    }

    /// Mode `z<n/p>` of `X_M(z, x) = sum z<n> x^{-n}`; it lowers degree by `n/p`.
    pub fn x_mode(&self, z: &VoaVector, n: i64, w: &FockVector) -> FockVector {
        let p = self.p();
        let mut out = FockVector::zero();
        for (zm, zc) in z.terms() {
            let g = -n - self.voa.weight(zm) * p;
            for (wm, wc) in w.terms() {
                out.add_scaled(&self.y_coeff_monomial(zm, g, wm), &(zc * wc));
            }
        }
        out
    }

    /// Coefficient of a field in either convention.
    pub fn coeff(&self, conv: Convention, z: &VoaVector, exponent: i64, w: &FockVector) -> FockVector {
        match conv {
            Convention::Y => self.y_coeff(z, exponent, w),
            Convention::X => self.x_mode(z, -exponent, w),
        }
    }

    /// `L_M(n)` from the field of the conformal vector.
    pub fn virasoro_mode(&self, n: i64, w: &FockVector) -> FockVector {
        self.x_mode(&self.voa.omega(), n * self.p(), w)
    }

    pub fn degree_num(&self, w: &Monomial) -> i64 {
        self.space.degree_num(w)
    }

    pub fn cached_entries(&self) -> usize {
        self.cache.read().expect("lock").len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{apply_operator, QuadOperator, Variant};

    #[test]
    fn linear_field_is_mode_sum() {
        let s = TwistSetup::new(2, vec![0, 1]).unwrap();
        let e = FieldEngine::new(&s);
        let b = e.voa().linear(1, 1, 1);
        // X_M(beta(-1)1, x) = sum beta(n) x^{-n}
        let w = e.space().apply_mode(&ModeLabel::new(1, 1, -1), &FockVector::vacuum());
        assert_eq!(e.x_mode(&b, 1, &w), FockVector::vacuum().scale_rational(&rat(1, 2)));
        assert!(e.x_mode(&b, 2, &w).terms().is_empty());
    }

    #[test]
    fn conformal_field_matches_quadratic_operator() {
        for (p, dims) in [(1, vec![1]), (2, vec![0, 1]), (3, vec![0, 1, 1])] {
            let s = TwistSetup::new(p, dims).unwrap();
            let e = FieldEngine::new(&s);
            for w in e.space().basis_up_to(&int(2)) {
                let wv = FockVector::basis(w.clone());
                for n in -2..=2 {
                    let op = QuadOperator::diagonal(&s, 0, n, Variant::Plain);
                    assert_eq!(e.virasoro_mode(n, &wv), apply_operator(&op, &wv), "p={p} n={n} w={w:?}");
                }
            }
        }
    }
}
