use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tf::poly::Polynomial;

/// Ratio of two real polynomials. No common-factor cancellation is ever
/// attempted: near-common factors are numerically fragile, and the stability
/// routines are built so that uncancelled factors are harmless.
#[derive(Debug, Clone, PartialEq)]
pub struct Rational<T> {
    num: Polynomial<T>,
    den: Polynomial<T>,
}

impl<T: Scalar> Rational<T> {
    pub fn new(num: Polynomial<T>, den: Polynomial<T>) -> Result<Self> {
        den.ensure_nonzero()?;
        Ok(Rational { num, den })
    }

    pub fn constant(c: T) -> Self {
        Rational {
            num: Polynomial::constant(c),
            den: Polynomial::one(),
        }
    }

    pub fn one() -> Self {
        Rational::constant(T::one())
    }

    /// `p(s) / 1`.
    pub fn from_poly(num: Polynomial<T>) -> Self {
        Rational { num, den: Polynomial::one() }
    }

    pub fn num(&self) -> &Polynomial<T> {
        &self.num
    }

    pub fn den(&self) -> &Polynomial<T> {
        &self.den
    }

    pub fn is_finite(&self) -> bool {
        self.num.is_finite() && self.den.is_finite()
    }

    /// Evaluate at a complex point. Errs only if the denominator evaluates to
    /// exactly zero.
    pub fn eval(&self, s: Complex<T>) -> Result<Complex<T>> {
        let d = self.den.eval(s);
        if d.norm_sqr() == T::zero() {
            return Err(Error::SingularEvaluation {
                omega: s.im.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(self.num.eval(s) / d)
    }

    /// Evaluate on the imaginary axis at `s = j*omega`.
    pub fn eval_jw(&self, omega: T) -> Result<Complex<T>> {
        self.eval(Complex::new(T::zero(), omega))
    }

    pub fn add(&self, other: &Self) -> Self {
        Rational {
            num: self
                .num
                .mul(&other.den)
                .add(&other.num.mul(&self.den)),
            den: self.den.mul(&other.den),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        Rational {
            num: self.num.mul(&other.num),
            den: self.den.mul(&other.den),
        }
    }

    pub fn scale(&self, k: T) -> Self {
        Rational {
            num: self.num.scale(k),
            den: self.den.clone(),
        }
    }

    /// `g / (1 + g*h)`, the negative-feedback interconnection.
    pub fn feedback(g: &Self, h: &Self) -> Result<Self> {
        let num = g.num.mul(&h.den);
        let den = g.den.mul(&h.den).add(&g.num.mul(&h.num));
        Rational::new(num, den)
    }

    /// Characteristic polynomial of the unity-feedback closure `1 + self`.
    pub fn closed_loop_char_poly(&self) -> Polynomial<T> {
        self.den.add(&self.num)
    }
}

/// Second-order Pade approximant of the transport delay `exp(-tau*s)`:
///
/// `(12 - 6*tau*s + (tau*s)^2) / (12 + 6*tau*s + (tau*s)^2)`
///
/// For `tau = 0` this is the constant 1. Numerator and denominator are
/// complex conjugates on the imaginary axis, so the approximant is all-pass.
pub fn pade2<T: Scalar>(tau: T) -> Result<Rational<T>> {
    if tau < T::zero() {
        return Err(Error::NegativeDelay(tau.to_f64().unwrap_or(f64::NAN)));
    }
    if tau == T::zero() {
        return Ok(Rational::one());
    }
    let (num, den) = pade2_polys(tau);
    Rational::new(num, den)
}

/// The unnormalized Pade-2 polynomial pair `(12 - 6*tau*s + tau^2 s^2,
/// 12 + 6*tau*s + tau^2 s^2)`, kept unnormalized in the 12-scaled form so
/// characteristic-polynomial coefficients stay integer-weighted.
pub fn pade2_polys<T: Scalar>(tau: T) -> (Polynomial<T>, Polynomial<T>) {
    let twelve = T::of(12.0);
    let six = T::of(6.0);
    let num = Polynomial::new(vec![twelve, -six * tau, tau * tau]);
    let den = Polynomial::new(vec![twelve, six * tau, tau * tau]);
    (num, den)
}
