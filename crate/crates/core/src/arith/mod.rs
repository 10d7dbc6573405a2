//! Exact scalars, Bernoulli machinery and the truncated formal-series kernel.

pub mod bernoulli;
pub mod cyclotomic;
pub mod rational;
pub mod residue;
pub mod series;

use std::fmt::Debug;

use num_traits::{One, Zero};

pub use bernoulli::{bernoulli_number, bernoulli_poly, zeta_negative};
pub use cyclotomic::Cyclotomic;
pub use rational::{int, rat, Rational};

/// A commutative field of exact scalars.
pub trait Scalar: Clone + PartialEq + Debug + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn inv(&self) -> Option<Self>;
    fn from_rational(q: &Rational) -> Self;

    fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }
}

impl Scalar for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Option<Self> {
        (!Zero::is_zero(self)).then(|| self.recip())
    }
    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }
}

impl Scalar for Cyclotomic {
    fn zero() -> Self {
        Cyclotomic::zero()
    }
    fn one() -> Self {
        Cyclotomic::one()
    }
    fn is_zero(&self) -> bool {
        Cyclotomic::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Option<Self> {
        self.inverse()
    }
    fn from_rational(q: &Rational) -> Self {
        Cyclotomic::rational(q.clone())
    }
}

/// Anything that can sit in a series or vector slot: closed under addition
/// and under scaling by its scalar field.
pub trait Coefficient: Clone + PartialEq + Debug + Send + Sync {
    type Scalar: Scalar;

    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn scale(&self, s: &Self::Scalar) -> Self;

    fn neg(&self) -> Self {
        self.scale(&<Self::Scalar as Scalar>::one().neg())
    }

    fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }
}

macro_rules! scalar_coefficient {
    ($t:ty) => {
        impl Coefficient for $t {
            type Scalar = $t;
            fn zero() -> Self {
                <$t as Scalar>::zero()
            }
            fn is_zero(&self) -> bool {
                <$t as Scalar>::is_zero(self)
            }
            fn add(&self, other: &Self) -> Self {
                <$t as Scalar>::add(self, other)
            }
            fn scale(&self, s: &$t) -> Self {
                <$t as Scalar>::mul(self, s)
            }
        }
    };
}

scalar_coefficient!(Rational);
scalar_coefficient!(Cyclotomic);
