//! Gauss hypergeometric function `2F1(a, b; c; z)` for real `z < 1`.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::gamma::{gamma, is_nonpositive_integer, near_integer, pochhammer, rgamma, sin_pi};
use super::{richardson_in_parameter, sum_series, SeriesResult, NEAR_INTEGER, TOL};
use crate::error::HyperError;

type C = Complex64;

const DIRECT_MAX_Z: f64 = 0.9;

fn terminating_degree(a: C) -> Option<usize> {
    if is_nonpositive_integer(a) {
        Some((-a.re) as usize)
    } else {
        None
    }
}

fn plain_series(a: C, b: C, c: C, z: f64) -> Result<SeriesResult, HyperError> {
    sum_series(
        C::new(1.0, 0.0),
        |n| {
            let n = n as f64;
            (a + n) * (b + n) / ((c + n) * (n + 1.0)) * z
        },
        TOL,
    )
}

/// Direct series, regularized or plain.
fn direct(a: C, b: C, c: C, z: f64, regularized: bool) -> Result<SeriesResult, HyperError> {
    if is_nonpositive_integer(c) {
        if !regularized {
            return Err(HyperError::PoleAtNonPositiveInteger(c.re));
        }
        let m = (-c.re) as usize;
        let pre = pochhammer(a, m + 1) * pochhammer(b, m + 1) * C::new(z, 0.0).powi(m as i32 + 1)
            * rgamma(C::new(m as f64 + 2.0, 0.0));
        if pre == C::new(0.0, 0.0) {
            return Ok(SeriesResult::exact(pre));
        }
        let s = plain_series(a + (m + 1) as f64, b + (m + 1) as f64, C::new(m as f64 + 2.0, 0.0), z)?;
        return Ok(s.scaled(pre));
    }
    let s = plain_series(a, b, c, z)?;
    Ok(if regularized { s.scaled(rgamma(c)) } else { s })
}

/// Regularized function at `z = 1 - omz` with `omz` in `(0, 1 - DIRECT_MAX_Z)`
/// by the connection formula around `z = 1`.
fn connection(a: C, b: C, c: C, z: f64, omz: f64) -> Result<SeriesResult, HyperError> {
    let d = c - a - b;
    if near_integer(d, NEAR_INTEGER).is_some() {
        return richardson_in_parameter(|delta| connection_raw(a, b, c + delta, z, omz));
    }
    connection_raw(a, b, c, z, omz)
}

fn connection_raw(a: C, b: C, c: C, _z: f64, omz: f64) -> Result<SeriesResult, HyperError> {
    let d = c - a - b;
    let s1 = direct(a, b, 1.0 - d, omz, true)?;
    let s2 = direct(c - a, c - b, d + 1.0, omz, true)?;
    let t1 = s1.value * rgamma(c - a) * rgamma(c - b);
    let t2 = (d * omz.ln()).exp() * s2.value * rgamma(a) * rgamma(b);
    let value = (t1 - t2) * PI / sin_pi(d);
    Ok(SeriesResult {
        value,
        terms_used: s1.terms_used + s2.terms_used,
        truncation_estimate: s1.truncation_estimate.max(s2.truncation_estimate),
    })
}

fn eval(a: C, b: C, c: C, z: f64, omz: f64, regularized: bool) -> Result<SeriesResult, HyperError> {
    if !(z < 1.0) || !(omz > 0.0) || z.is_nan() {
        return Err(HyperError::Domain(format!("2F1 needs real z < 1, got {z}")));
    }
    if !regularized && is_nonpositive_integer(c) {
        return Err(HyperError::PoleAtNonPositiveInteger(c.re));
    }
    if z == 0.0 {
        return Ok(SeriesResult::exact(if regularized { rgamma(c) } else { C::new(1.0, 0.0) }));
    }
    let finite = terminating_degree(a).or(terminating_degree(b)).is_some();
    if finite || (0.0..=DIRECT_MAX_Z).contains(&z) {
        return direct(a, b, c, z, regularized);
    }
    if z < 0.0 {
        // Pfaff: F(a,b;c;z) = (1-z)^{-a} F(a, c-b; c; z/(z-1))
        let w = z / (z - 1.0);
        let s = eval(a, c - b, c, w, 1.0 / omz, regularized)?;
        return Ok(s.scaled((-a * omz.ln()).exp()));
    }
    let s = connection(a, b, c, z, omz)?;
    Ok(if regularized { s } else { s.scaled(gamma(c)?) })
}

/// `2F1(a, b; c; z)` for real `z < 1`.
pub fn hyp2f1(a: C, b: C, c: C, z: f64) -> Result<SeriesResult, HyperError> {
    eval(a, b, c, z, 1.0 - z, false)
}

/// `2F1(a, b; c; z) / Gamma(c)`, entire in `c`.
pub fn hyp2f1_regularized(a: C, b: C, c: C, z: f64) -> Result<SeriesResult, HyperError> {
    eval(a, b, c, z, 1.0 - z, true)
}

/// Same function at `z = 1 - omz` with the complement supplied directly, for
/// arguments so close to 1 that `1 - z` is not representable accurately.
pub fn hyp2f1_at_complement(a: C, b: C, c: C, omz: f64, regularized: bool) -> Result<SeriesResult, HyperError> {
    eval(a, b, c, 1.0 - omz, omz, regularized)
}

/// Behaviour of `2F1(a, b; c; z)` as `z -> 1-`, by `d = c - a - b`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Limit2F1 {
    /// Converges to the value.
    Finite(C),
    /// `d = 0`: grows like `coefficient * (-log(1 - z))`.
    Log { coefficient: C },
    /// `Re d = 0`, `d != 0`: `finite_part + oscillating_coeff (1 - z)^d + o(1)`.
    BoundedOscillatory { finite_part: C, oscillating_coeff: C },
    /// `Re d < 0`: grows like `constant * (1 - z)^exponent`.
    PowerDivergent { exponent: C, constant: C },
}

const REGIME_TOL: f64 = 1e-12;

fn gamma_ratio(num: &[C], den: &[C]) -> C {
    let mut v = C::new(1.0, 0.0);
    for &z in num {
        v *= gamma(z).unwrap_or(C::new(f64::INFINITY, 0.0));
    }
    for &z in den {
        v *= rgamma(z);
    }
    v
}

pub fn limit_2f1_at_1(a: C, b: C, c: C) -> Limit2F1 {
    let d = c - a - b;
    let term = terminating_degree(a).or(terminating_degree(b));
    if let Some(n) = term {
        let other = if terminating_degree(a) == Some(n) { b } else { a };
        // Chu-Vandermonde
        return Limit2F1::Finite(pochhammer(c - other, n) / pochhammer(c, n));
    }
    if d.re > REGIME_TOL {
        return Limit2F1::Finite(gamma_ratio(&[c, d], &[c - a, c - b]));
    }
    if d.norm() <= REGIME_TOL {
        return Limit2F1::Log {
            coefficient: gamma_ratio(&[a + b], &[a, b]),
        };
    }
    if d.re.abs() <= REGIME_TOL {
        return Limit2F1::BoundedOscillatory {
            finite_part: gamma_ratio(&[c, d], &[c - a, c - b]),
            oscillating_coeff: gamma_ratio(&[c, -d], &[a, b]),
        };
    }
    Limit2F1::PowerDivergent {
        exponent: d,
        constant: gamma_ratio(&[c, -d], &[a, b]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(x: f64) -> C {
        C::new(x, 0.0)
    }

    fn close(a: C, b: C, tol: f64) -> bool {
        (a - b).norm() <= tol * b.norm().max(1e-300)
    }

    fn f(a: f64, b: f64, c: f64, z: f64) -> C {
        hyp2f1(r(a), r(b), r(c), z).unwrap().value
    }

    #[test]
    fn trivial_and_elementary_values() {
        assert_eq!(f(0.3, 0.7, 1.9, 0.0), r(1.0));
        for z in [-40.0, -3.0, -0.5, 0.25, 0.5, 0.9, 0.95, 0.999, 0.999_999] {
            // 2F1(1,1;2;z) = -log(1-z)/z; c - a - b = 0 exercises the Richardson path
            let want = -(1.0 - z as f64).ln() / z;
            assert!(close(f(1.0, 1.0, 2.0, z), r(want), 1e-12), "z={z}");
            // 2F1(a,b;b;z) = (1-z)^{-a}
            let got = hyp2f1(C::new(0.4, 1.3), r(2.5), r(2.5), z).unwrap().value;
            let want = (-C::new(0.4, 1.3) * (1.0 - z).ln()).exp();
            assert!(close(got, want, 1e-12), "z={z}");
        }
        for x in [0.3_f64, 0.8, 0.99] {
            // 2F1(1/2,1/2;3/2;x^2) = asin(x)/x
            assert!(close(f(0.5, 0.5, 1.5, x * x), r(x.asin() / x), 1e-12));
        }
    }

    #[test]
    fn half_point_series_oracle() {
        // 200-term direct summation
        let mut term = 1.0;
        let mut sum = 1.0;
        for n in 0..200 {
            let n = n as f64;
            term *= (1.0 + n) * (1.0 + n) / ((2.0 + n) * (n + 1.0)) * 0.5;
            sum += term;
        }
        assert!(close(f(1.0, 1.0, 2.0, 0.5), r(sum), 1e-13));
        assert!((sum - 1.386_294_361_119_890_6).abs() < 1e-13);
    }

    #[test]
    fn regularized_consistency_and_poles() {
        let plain = f(1.0, 2.0, 4.0, 0.5);
        let reg = hyp2f1_regularized(r(1.0), r(2.0), r(4.0), 0.5).unwrap().value;
        assert!(close(reg * 6.0, plain, 1e-14));
        assert_eq!(hyp2f1_regularized(r(1.0), r(1.0), r(-1.0), 0.0).unwrap().value, r(0.0));
        assert!(matches!(
            hyp2f1(r(1.0), r(1.0), r(-1.0), 0.3),
            Err(HyperError::PoleAtNonPositiveInteger(_))
        ));
        // term-by-term series with 1/Gamma(c+n) coefficients
        let (a, b, c, z) = (0.5, 0.5, -0.5, 0.25);
        let mut want = r(0.0);
        let mut coef = 1.0;
        for n in 0..80 {
            let nf = n as f64;
            want += coef * rgamma(r(c + nf));
            coef *= (a + nf) * (b + nf) / (nf + 1.0) * z;
        }
        let got = hyp2f1_regularized(r(a), r(b), r(c), z).unwrap().value;
        assert!(close(got, want, 1e-13));
        // at c = -2 the regularized series uses the shifted form
        let mut want = r(0.0);
        let mut coef = 1.0;
        for n in 0..120 {
            let nf = n as f64;
            want += coef * rgamma(r(-2.0 + nf));
            coef *= (0.3 + nf) * (1.7 + nf) / (nf + 1.0) * 0.6;
        }
        let got = hyp2f1_regularized(r(0.3), r(1.7), r(-2.0), 0.6).unwrap().value;
        assert!(close(got, want, 1e-12), "{got} vs {want}");
    }

    #[test]
    fn connection_agrees_with_direct_series_on_overlap() {
        let cases = [
            (C::new(0.3, 0.2), C::new(1.1, -0.4), C::new(2.05, 0.1)),
            (r(-0.7), r(2.3), r(0.4)),
            (C::new(1.5, 2.0), C::new(1.5, -2.0), r(3.0)),
        ];
        for (a, b, c) in cases {
            for z in [0.91, 0.95] {
                let omz = 1.0 - z;
                let conn = connection(a, b, c, z, omz).unwrap().value * gamma(c).unwrap();
                let ser = plain_series(a, b, c, z).unwrap().value;
                assert!(close(conn, ser, 1e-11), "{a} {b} {c} {z}: {conn} vs {ser}");
            }
        }
    }

    #[test]
    fn terminating_polynomial() {
        // 2F1(-2, b; c; z) = 1 - 2 b z / c + b (b+1) z^2 / (c (c+1))
        let (b, c) = (1.5, 0.7);
        for z in [-5.0, 0.3, 0.97] {
            let want = 1.0 - 2.0 * b * z / c + b * (b + 1.0) * z * z / (c * (c + 1.0));
            assert!(close(f(-2.0, b, c, z), r(want), 1e-13));
        }
    }

    #[test]
    fn complement_argument_near_one() {
        // (1-z)^{-a} with 1 - z = 1e-12
        let a = C::new(0.0, 0.8);
        let got = hyp2f1_at_complement(a, r(0.6), r(0.6), 1e-12, false).unwrap().value;
        let want = (-a * (1e-12_f64).ln()).exp();
        assert!(close(got, want, 1e-12));
    }

    #[test]
    fn limiting_forms() {
        assert!(matches!(limit_2f1_at_1(r(1.0), r(2.0), r(4.0)), Limit2F1::Finite(v) if close(v, r(3.0), 1e-14)));
        match limit_2f1_at_1(r(0.5), r(1.5), r(2.0)) {
            Limit2F1::Log { coefficient } => {
                let want = gamma(r(2.0)).unwrap() / (gamma(r(0.5)).unwrap() * gamma(r(1.5)).unwrap());
                assert!(close(coefficient, want, 1e-14));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            limit_2f1_at_1(r(0.5), r(0.5), C::new(1.0, 0.7)),
            Limit2F1::BoundedOscillatory { .. }
        ));
        assert!(matches!(limit_2f1_at_1(r(1.5), r(1.0), r(1.0)), Limit2F1::PowerDivergent { .. }));
        assert!(matches!(limit_2f1_at_1(r(-3.0), r(1.0), r(1.0)), Limit2F1::Finite(_)));
    }
}
