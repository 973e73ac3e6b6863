use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tf::poly::Polynomial;

/// Outcome of the Routh test.
#[derive(Debug, Clone, PartialEq)]
pub struct RouthReport<T> {
    /// All first-column entries strictly positive.
    pub stable: bool,
    /// First column of the Routh array, top to bottom, for diagnostics.
    pub first_column: Vec<T>,
    /// True when a zero first-column entry was replaced by a small epsilon;
    /// the verdict is then boundary-suspect and should not be trusted near
    /// marginal parameter sets.
    pub epsilon_used: bool,
}

/// Routh stability criterion for a real polynomial of degree >= 1.
///
/// The sign of the polynomial is normalized so the leading coefficient is
/// positive before the array is built. A zero in the first column is
/// replaced by `1e-12 * (largest first-column magnitude so far)` and the
/// report is flagged, following the usual epsilon workaround.
pub fn routh_stable<T: Scalar>(p: &Polynomial<T>) -> Result<RouthReport<T>> {
    p.ensure_nonzero()?;
    let degree = p.degree();
    if degree == 0 {
        return Err(Error::InvalidParameter(
            "routh_stable requires degree >= 1".into(),
        ));
    }

    let sign = if p.leading() < T::zero() { -T::one() } else { T::one() };
    // Descending powers: a_n, a_(n-1), ..., a_0.
    let desc: Vec<T> = p.coeffs().iter().rev().map(|&c| c * sign).collect();

    let row_len = degree / 2 + 1;
    let mut prev_prev: Vec<T> = (0..row_len)
        .map(|j| desc.get(2 * j).copied().unwrap_or_else(T::zero))
        .collect();
    let mut prev: Vec<T> = (0..row_len)
        .map(|j| desc.get(2 * j + 1).copied().unwrap_or_else(T::zero))
        .collect();

    let mut first_column = vec![prev_prev[0]];
    let mut epsilon_used = false;
    let mut max_mag = prev_prev[0].abs();

    if degree >= 1 {
        if prev[0] == T::zero() {
            prev[0] = epsilon_for(max_mag);
            epsilon_used = true;
        }
        first_column.push(prev[0]);
        max_mag = max_mag.max(prev[0].abs());
    }

    for _ in 2..=degree {
        let pivot = prev[0];
        let mut next: Vec<T> = (0..row_len)
            .map(|j| {
                let a = prev_prev.get(j + 1).copied().unwrap_or_else(T::zero);
                let b = prev.get(j + 1).copied().unwrap_or_else(T::zero);
                (pivot * a - prev_prev[0] * b) / pivot
            })
            .collect();
        if next[0] == T::zero() {
            next[0] = epsilon_for(max_mag);
            epsilon_used = true;
        }
        first_column.push(next[0]);
        max_mag = max_mag.max(next[0].abs());
        prev_prev = prev;
        prev = next;
    }

    let stable = first_column.iter().all(|&c| c > T::zero());
    Ok(RouthReport {
        stable,
        first_column,
        epsilon_used,
    })
}

fn epsilon_for<T: Scalar>(max_mag: T) -> T {
    let base = if max_mag > T::zero() { max_mag } else { T::one() };
    base * T::of(1e-12)
}
