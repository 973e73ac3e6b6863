use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tf::expr::TfExpr;

/// Frequency response samples on a strictly increasing positive grid.
#[derive(Debug, Clone)]
pub struct FrequencyResponse<T> {
    omegas: Vec<T>,
    values: Vec<Complex<T>>,
}

impl<T: Scalar> FrequencyResponse<T> {
    pub fn new(omegas: Vec<T>, values: Vec<Complex<T>>) -> Result<Self> {
        if omegas.len() != values.len() {
            return Err(Error::InvalidParameter(
                "frequency and value lists must have equal length".into(),
            ));
        }
        validate_grid(&omegas)?;
        Ok(FrequencyResponse { omegas, values })
    }

    pub fn len(&self) -> usize {
        self.omegas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omegas.is_empty()
    }

    pub fn omegas(&self) -> &[T] {
        &self.omegas
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    pub fn magnitudes(&self) -> Vec<T> {
        self.values.iter().map(|v| v.norm()).collect()
    }

    pub fn magnitudes_db(&self) -> Vec<T> {
        let twenty = T::of(20.0);
        self.values
            .iter()
            .map(|v| twenty * v.norm().log10())
            .collect()
    }

    /// Phase in radians, unwrapped sequentially along the grid so that the
    /// track is continuous (no +-2*pi jumps between adjacent samples).
    pub fn phases_rad_unwrapped(&self) -> Vec<T> {
        let mut out = Vec::with_capacity(self.values.len());
        let mut prev = T::zero();
        for (i, v) in self.values.iter().enumerate() {
            let raw = v.arg();
            let phase = if i == 0 {
                raw
            } else {
                prev + principal_angle(raw - prev)
            };
            out.push(phase);
            prev = phase;
        }
        out
    }

    pub fn phases_deg_unwrapped(&self) -> Vec<T> {
        let factor = T::of(180.0) / T::PI();
        self.phases_rad_unwrapped()
            .into_iter()
            .map(|p| p * factor)
            .collect()
    }
}

/// Map an angle difference into `(-pi, pi]`.
pub fn principal_angle<T: Scalar>(mut d: T) -> T {
    let two_pi = T::of(2.0) * T::PI();
    while d > T::PI() {
        d = d - two_pi;
    }
    while d <= -T::PI() {
        d = d + two_pi;
    }
    d
}

/// Element-wise exact evaluation of `expr` over the grid.
pub fn freq_response<T: Scalar>(
    expr: &TfExpr<T>,
    omegas: &[T],
) -> Result<FrequencyResponse<T>> {
    validate_grid(omegas)?;
    let mut values = Vec::with_capacity(omegas.len());
    for &w in omegas {
        values.push(expr.eval_exact(w)?);
    }
    FrequencyResponse::new(omegas.to_vec(), values)
}

/// `n` logarithmically spaced points over `[lo, hi]`, inclusive.
pub fn log_space<T: Scalar>(lo: T, hi: T, n: usize) -> Vec<T> {
    assert!(n >= 2, "log_space needs at least two points");
    assert!(lo > T::zero() && hi > lo, "log_space needs 0 < lo < hi");
    let llo = lo.log10();
    let lhi = hi.log10();
    let step = (lhi - llo) / T::of((n - 1) as f64);
    (0..n)
        .map(|i| {
            if i == n - 1 {
                hi
            } else {
                T::of(10.0).powf(llo + step * T::of(i as f64))
            }
        })
        .collect()
}

fn validate_grid<T: Scalar>(omegas: &[T]) -> Result<()> {
    for (i, &w) in omegas.iter().enumerate() {
        if w <= T::zero() || !w.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "frequency grid entries must be positive and finite (index {i})"
            )));
        }
        if i > 0 && w <= omegas[i - 1] {
            return Err(Error::InvalidParameter(format!(
                "frequency grid must be strictly increasing (index {i})"
            )));
        }
    }
    Ok(())
}
