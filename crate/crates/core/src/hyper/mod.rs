//! Gauss and confluent hypergeometric functions, the Tricomi function and
//! the Hermite function on real arguments.

pub mod confluent;
pub mod gamma;
pub mod gauss;

use num_complex::Complex64;

use crate::error::HyperError;

pub use confluent::{
    hermite_fn, hyp1f1, hyp1f1_regularized, hyp_u, wronskian, wronskian_closed_form, wronskian_defect,
    WronskianPair,
};
pub use gamma::{gamma, gamma_real, lgamma, pochhammer, rgamma};
pub use gauss::{hyp2f1, hyp2f1_at_complement, hyp2f1_regularized, limit_2f1_at_1, Limit2F1};

/// Default relative truncation tolerance for series.
pub const TOL: f64 = 1e-13;
/// Hard cap on series terms.
pub const MAX_TERMS: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesResult {
    pub value: Complex64,
    pub terms_used: usize,
    pub truncation_estimate: f64,
}

impl SeriesResult {
    pub fn exact(value: Complex64) -> Self {
        SeriesResult {
            value,
            terms_used: 0,
            truncation_estimate: 0.0,
        }
    }

    fn scaled(self, s: Complex64) -> Self {
        SeriesResult {
            value: self.value * s,
            ..self
        }
    }
}

/// Sums `first * prod ratio(k)` for `k < n` over `n = 0, 1, ...`.
///
/// Stops when a ratio is exactly zero (terminating series) or after three
/// consecutive terms below `tol` times the running sum while the terms
/// are shrinking.
pub(crate) fn sum_series(
    first: Complex64,
    mut ratio: impl FnMut(usize) -> Complex64,
    tol: f64,
) -> Result<SeriesResult, HyperError> {
    let mut sum = first;
    let mut term = first;
    let mut small = 0;
    if first == Complex64::new(0.0, 0.0) {
        return Ok(SeriesResult::exact(sum));
    }
    for n in 0..MAX_TERMS {
        let r = ratio(n);
        if r == Complex64::new(0.0, 0.0) {
            return Ok(SeriesResult {
                value: sum,
                terms_used: n + 1,
                truncation_estimate: 0.0,
            });
        }
        term *= r;
        sum += term;
        if !(sum.re.is_finite() && sum.im.is_finite()) {
            return Err(HyperError::Domain(format!("series overflow after {} terms", n + 2)));
        }
        if term.norm() <= tol * sum.norm() && r.norm() < 1.0 {
            small += 1;
            if small >= 3 {
                return Ok(SeriesResult {
                    value: sum,
                    terms_used: n + 2,
                    truncation_estimate: term.norm() / sum.norm().max(f64::MIN_POSITIVE),
                });
            }
        } else {
            small = 0;
        }
    }
    Err(HyperError::MaxTermsExceeded { terms: MAX_TERMS })
}

/// Distance from an integer below which connection formulas with a
/// `1/sin(pi x)` factor are replaced by extrapolation.
pub(crate) const NEAR_INTEGER: f64 = 2e-4;
const RICHARDSON_STEP: f64 = 1e-3;

/// Limit at `delta = 0` of `f(delta)` from symmetric evaluations at
/// `+-h, +-2h, +-4h`, eliminating the `h^2` and `h^4` terms.
pub(crate) fn richardson_in_parameter(
    mut f: impl FnMut(f64) -> Result<SeriesResult, HyperError>,
) -> Result<SeriesResult, HyperError> {
    let mut terms_used = 0;
    let mut truncation_estimate = 0.0_f64;
    let mut g = |h: f64| -> Result<Complex64, HyperError> {
        let p = f(h)?;
        let m = f(-h)?;
        terms_used += p.terms_used + m.terms_used;
        truncation_estimate = truncation_estimate.max(p.truncation_estimate).max(m.truncation_estimate);
        Ok((p.value + m.value) * 0.5)
    };
    let g1 = g(RICHARDSON_STEP)?;
    let g2 = g(2.0 * RICHARDSON_STEP)?;
    let g4 = g(4.0 * RICHARDSON_STEP)?;
    let r1 = (4.0 * g1 - g2) / 3.0;
    let r2 = (4.0 * g2 - g4) / 3.0;
    Ok(SeriesResult {
        value: (16.0 * r1 - r2) / 15.0,
        terms_used,
        truncation_estimate,
    })
}

/// Digits lost when `value` is formed from parts of magnitude `scale`.
pub(crate) fn digits_lost(scale: f64, value: Complex64) -> f64 {
    let v = value.norm();
    if v == 0.0 {
        if scale == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (scale / v).log10().max(0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_series() {
        let r = sum_series(Complex64::new(1.0, 0.0), |_| Complex64::new(0.5, 0.0), TOL).unwrap();
        assert!((r.value.re - 2.0).abs() < 1e-13);
        assert!(r.truncation_estimate <= TOL);
    }

    #[test]
    fn divergent_series_hits_cap() {
        let err = sum_series(Complex64::new(1.0, 0.0), |_| Complex64::new(1.0, 0.0), TOL).unwrap_err();
        assert_eq!(err, HyperError::MaxTermsExceeded { terms: MAX_TERMS });
    }
}
