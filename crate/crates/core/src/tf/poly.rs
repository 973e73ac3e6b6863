use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Real polynomial in `s`, coefficients stored in ascending powers.
///
/// The coefficient list is normalized on construction: trailing zeros are
/// trimmed so the leading (highest-power) coefficient is nonzero, except for
/// the zero polynomial which is kept as a single zero coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial<T> {
    coeffs: Vec<T>,
}

impl<T: Scalar> Polynomial<T> {
    /// Build a polynomial from ascending-power coefficients.
    pub fn new(coeffs: Vec<T>) -> Self {
        let mut coeffs = coeffs;
        while coeffs.len() > 1 && coeffs.last().map_or(false, |c| *c == T::zero()) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(T::zero());
        }
        Polynomial { coeffs }
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: vec![T::zero()] }
    }

    pub fn constant(c: T) -> Self {
        Polynomial::new(vec![c])
    }

    pub fn one() -> Self {
        Polynomial::constant(T::one())
    }

    /// The monomial `s`.
    pub fn s() -> Self {
        Polynomial::new(vec![T::zero(), T::one()])
    }

    /// `c1*s + c0`.
    pub fn linear(c0: T, c1: T) -> Self {
        Polynomial::new(vec![c0, c1])
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> T {
        *self.coeffs.last().expect("coefficient list never empty")
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == T::zero()
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }

    /// Horner evaluation at a complex point.
    pub fn eval(&self, s: Complex<T>) -> Complex<T> {
        let mut acc = Complex::new(T::zero(), T::zero());
        for &c in self.coeffs.iter().rev() {
            acc = acc * s + Complex::new(c, T::zero());
        }
        acc
    }

    pub fn eval_real(&self, x: T) -> T {
        let mut acc = T::zero();
        for &c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![T::zero(); n];
        for (i, slot) in out.iter_mut().enumerate() {
            let a = self.coeffs.get(i).copied().unwrap_or_else(T::zero);
            let b = other.coeffs.get(i).copied().unwrap_or_else(T::zero);
            *slot = a + b;
        }
        Polynomial::new(out)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-T::one()))
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![T::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j] + a * b;
            }
        }
        Polynomial::new(out)
    }

    pub fn scale(&self, k: T) -> Self {
        Polynomial::new(self.coeffs.iter().map(|&c| c * k).collect())
    }

    /// Multiply by `s^n`.
    pub fn shift_up(&self, n: usize) -> Self {
        if self.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![T::zero(); n];
        out.extend_from_slice(&self.coeffs);
        Polynomial::new(out)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Polynomial::zero();
        }
        let out = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| c * T::of(i as f64))
            .collect();
        Polynomial::new(out)
    }

    pub fn max_coeff_magnitude(&self) -> T {
        self.coeffs
            .iter()
            .fold(T::zero(), |m, c| m.max(c.abs()))
    }

    /// Build a polynomial from its (real) roots: `prod (s - r_i)`.
    pub fn from_real_roots(roots: &[T]) -> Self {
        let mut p = Polynomial::one();
        for &r in roots {
            p = p.mul(&Polynomial::linear(-r, T::one()));
        }
        p
    }

    pub(crate) fn ensure_nonzero(&self) -> Result<()> {
        if self.is_zero() {
            Err(Error::ZeroPolynomial)
        } else {
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    type P = Polynomial<f64>;

    #[test]
    fn trims_trailing_zeros() {
        let p = P::new(vec![1.0, 2.0, 0.0, 0.0]);
        assert_eq!(p.degree(), 1);
        assert_eq!(p.leading(), 2.0);
    }

    #[test]
    fn zero_polynomial_has_degree_zero() {
        let p = P::new(vec![0.0, 0.0]);
        assert!(p.is_zero());
        assert_eq!(p.degree(), 0);
    }

    #[test]
    fn horner_matches_direct_eval() {
        // p(s) = 3 + 2s + s^2 at s = 1 + 2j
        let p = P::new(vec![3.0, 2.0, 1.0]);
        let s = Complex64::new(1.0, 2.0);
        let direct = Complex64::new(3.0, 0.0) + 2.0 * s + s * s;
        let got = p.eval(s);
        assert!((got - direct).norm() < 1e-14);
    }

    #[test]
    fn product_and_sum() {
        let a = P::new(vec![1.0, 1.0]); // 1 + s
        let b = P::new(vec![-1.0, 1.0]); // -1 + s
        let prod = a.mul(&b); // s^2 - 1
        assert_eq!(prod.coeffs(), &[-1.0, 0.0, 1.0]);
        let sum = a.add(&b); // 2s
        assert_eq!(sum.coeffs(), &[0.0, 2.0]);
    }

    #[test]
    fn from_roots_expands() {
        let p = P::from_real_roots(&[-1.0, -2.0]); // (s+1)(s+2) = s^2 + 3s + 2
        assert_eq!(p.coeffs(), &[2.0, 3.0, 1.0]);
    }

    #[test]
    fn derivative_drops_degree() {
        let p = P::new(vec![1.0, 2.0, 3.0]); // 1 + 2s + 3s^2
        assert_eq!(p.derivative().coeffs(), &[2.0, 6.0]);
    }
}
