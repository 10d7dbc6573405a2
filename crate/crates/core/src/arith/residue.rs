//! The change-of-variable rule for formal residues:
//! `Res_x h(x) = Res_y h(F(y)) F'(y)` for `F` in `y A[[y]]` with invertible
//! linear coefficient.

use super::series::TruncatedSeries;
use super::Rational;
use crate::error::{Error, Result};

/// Compares both residues at the given truncation.
pub fn residue_change_of_variable_check(h: &TruncatedSeries<Rational>, f: &TruncatedSeries<Rational>) -> Result<bool> {
    if h.vars().len() != 1 || f.vars().len() != 1 {
        return Err(Error::InvalidArgument("univariate series expected".into()));
    }
    let lhs = h.coeff(&[-1])?;
    let composed = h.compose(f)?;
    let integrand = composed.mul(&f.derivative(0))?;
    let rhs = integrand.coeff(&[-1]).map_err(|e| match e {
        Error::WindowInsufficient(m) => Error::WindowInsufficient(format!("truncation insufficient: {m}")),
        other => other,
    })?;
    Ok(lhs == rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::{int, rat};

    type S = TruncatedSeries<Rational>;

    fn e_y_minus_one() -> S {
        S::exp_minus_one_pow("y", 1, 10).unwrap()
    }

    #[test]
    fn logarithmic_derivative() {
        let h = S::univariate("x", -1, 6, [(-1, int(1))]);
        assert!(residue_change_of_variable_check(&h, &e_y_minus_one()).unwrap());
    }

    #[test]
    fn double_pole() {
        let h = S::univariate("x", -2, 6, [(-2, int(1))]);
        assert!(residue_change_of_variable_check(&h, &e_y_minus_one()).unwrap());
        // Res_y e^y (e^y - 1)^{-2} is zero, independently of the kernel route.
        let direct = S::exp("y", &int(1), 6).mul(&S::exp_minus_one_pow("y", -2, 4).unwrap()).unwrap();
        assert_eq!(direct.coeff(&[-1]).unwrap(), int(0));
    }

    #[test]
    fn no_pole() {
        for n in 0..4 {
            let h = S::univariate("x", 0, 6, [(n, rat(3, 7))]);
            assert!(residue_change_of_variable_check(&h, &e_y_minus_one()).unwrap());
        }
    }

    #[test]
    fn mixed_laurent_and_other_substitution() {
        let h = S::univariate("x", -3, 5, [(-3, int(2)), (-2, rat(1, 3)), (-1, int(5)), (2, int(1))]);
        let f = S::univariate("y", 1, 10, [(1, int(2)), (2, int(-1)), (4, rat(1, 2))]);
        assert!(residue_change_of_variable_check(&h, &f).unwrap());
    }

    #[test]
    fn truncation_too_short_is_an_error() {
        let h = S::univariate("x", -3, 5, [(-3, int(1))]);
        let f = S::univariate("y", 1, 1, [(1, int(1))]);
        assert!(residue_change_of_variable_check(&h, &f).is_err());
    }
}
