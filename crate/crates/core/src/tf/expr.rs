use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tf::rational::{pade2, Rational};

/// Composable transfer-function expression.
///
/// Frequency evaluation is exact: `Delay(tau)` nodes evaluate to
/// `exp(-j*omega*tau)` with no approximation. Where a rational form is
/// needed (root-based stability analysis), [`TfExpr::rationalize`] replaces
/// every delay by its second-order Pade approximant and collapses the tree
/// with polynomial arithmetic.
#[derive(Debug, Clone)]
pub enum TfExpr<T> {
    /// Rational atom `n(s)/d(s)`.
    Atom(Rational<T>),
    /// Pure transport delay `exp(-tau*s)`, `tau >= 0`.
    Delay(T),
    /// Real constant gain.
    Scale(T),
    /// Sum of the children.
    Sum(Vec<TfExpr<T>>),
    /// Product of the children.
    Product(Vec<TfExpr<T>>),
    /// Negative-feedback interconnection `forward / (1 + forward*loop)`.
    Feedback {
        forward: Box<TfExpr<T>>,
        feedback: Box<TfExpr<T>>,
    },
}

impl<T: Scalar> TfExpr<T> {
    pub fn atom(r: Rational<T>) -> Self {
        TfExpr::Atom(r)
    }

    pub fn one() -> Self {
        TfExpr::Scale(T::one())
    }

    pub fn scale(k: T) -> Self {
        TfExpr::Scale(k)
    }

    /// `exp(-tau*s)`. Errs on negative `tau`.
    pub fn delay(tau: T) -> Result<Self> {
        if tau < T::zero() {
            return Err(Error::NegativeDelay(tau.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(TfExpr::Delay(tau))
    }

    pub fn sum(terms: Vec<TfExpr<T>>) -> Self {
        TfExpr::Sum(terms)
    }

    pub fn product(factors: Vec<TfExpr<T>>) -> Self {
        TfExpr::Product(factors)
    }

    pub fn feedback(forward: TfExpr<T>, feedback: TfExpr<T>) -> Self {
        TfExpr::Feedback {
            forward: Box::new(forward),
            feedback: Box::new(feedback),
        }
    }

    /// `self * other`, flattening nested products.
    pub fn times(self, other: TfExpr<T>) -> Self {
        match self {
            TfExpr::Product(mut v) => {
                v.push(other);
                TfExpr::Product(v)
            }
            me => TfExpr::Product(vec![me, other]),
        }
    }

    pub fn plus(self, other: TfExpr<T>) -> Self {
        match self {
            TfExpr::Sum(mut v) => {
                v.push(other);
                TfExpr::Sum(v)
            }
            me => TfExpr::Sum(vec![me, other]),
        }
    }

    pub fn neg(self) -> Self {
        TfExpr::Scale(-T::one()).times(self)
    }

    pub fn has_delay(&self) -> bool {
        match self {
            TfExpr::Delay(tau) => *tau > T::zero(),
            TfExpr::Atom(_) | TfExpr::Scale(_) => false,
            TfExpr::Sum(v) | TfExpr::Product(v) => v.iter().any(|e| e.has_delay()),
            TfExpr::Feedback { forward, feedback } => {
                forward.has_delay() || feedback.has_delay()
            }
        }
    }

    /// Exact evaluation at an arbitrary complex point.
    pub fn eval_s(&self, s: Complex<T>) -> Result<Complex<T>> {
        match self {
            TfExpr::Atom(r) => r.eval(s),
            TfExpr::Delay(tau) => Ok((-s * *tau).exp()),
            TfExpr::Scale(k) => Ok(Complex::new(*k, T::zero())),
            TfExpr::Sum(terms) => {
                let mut acc = Complex::new(T::zero(), T::zero());
                for t in terms {
                    acc = acc + t.eval_s(s)?;
                }
                Ok(acc)
            }
            TfExpr::Product(factors) => {
                let mut acc = Complex::new(T::one(), T::zero());
                for t in factors {
                    acc = acc * t.eval_s(s)?;
                }
                Ok(acc)
            }
            TfExpr::Feedback { forward, feedback } => {
                let g = forward.eval_s(s)?;
                let h = feedback.eval_s(s)?;
                let den = Complex::new(T::one(), T::zero()) + g * h;
                if den.norm_sqr() == T::zero() {
                    return Err(Error::SingularEvaluation {
                        omega: s.im.to_f64().unwrap_or(f64::NAN),
                    });
                }
                Ok(g / den)
            }
        }
    }

    /// Exact frequency evaluation at `s = j*omega`; delays contribute
    /// `exp(-j*omega*tau)` with unit magnitude.
    pub fn eval_exact(&self, omega: T) -> Result<Complex<T>> {
        self.eval_s(Complex::new(T::zero(), omega))
    }

    /// Replace every delay by its Pade-2 approximant and collapse the tree
    /// into a single rational by polynomial arithmetic. No common-factor
    /// cancellation is performed.
    pub fn rationalize(&self) -> Result<Rational<T>> {
        let r = self.rationalize_inner()?;
        if !r.is_finite() {
            return Err(Error::NonFinite("rationalize"));
        }
        Ok(r)
    }

    fn rationalize_inner(&self) -> Result<Rational<T>> {
        match self {
            TfExpr::Atom(r) => Ok(r.clone()),
            TfExpr::Delay(tau) => pade2(*tau),
            TfExpr::Scale(k) => Ok(Rational::constant(*k)),
            TfExpr::Sum(terms) => {
                let mut acc = Rational::constant(T::zero());
                for t in terms {
                    acc = acc.add(&t.rationalize_inner()?);
                }
                Ok(acc)
            }
            TfExpr::Product(factors) => {
                let mut acc = Rational::one();
                for t in factors {
                    acc = acc.mul(&t.rationalize_inner()?);
                }
                Ok(acc)
            }
            TfExpr::Feedback { forward, feedback } => {
                let g = forward.rationalize_inner()?;
                let h = feedback.rationalize_inner()?;
                Rational::feedback(&g, &h)
            }
        }
    }
}
