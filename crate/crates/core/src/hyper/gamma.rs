//! Complex gamma function via a Lanczos sum in log form, with reflection
//! for `Re z < 1/2`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::HyperError;

type C = Complex64;

const LANCZOS_G_HALF: f64 = 5.242_187_5;
const LANCZOS: [f64; 14] = [
    57.156_235_665_862_92,
    -59.597_960_355_475_49,
    14.136_097_974_741_746,
    -0.491_913_816_097_620_2,
    0.339_946_499_848_118_9e-4,
    0.465_236_289_270_485_8e-4,
    -0.983_744_753_048_795_6e-4,
    0.158_088_703_224_912_5e-3,
    -0.210_264_441_724_104_9e-3,
    0.217_439_618_115_212_6e-3,
    -0.164_318_106_536_763_9e-3,
    0.844_182_239_838_527_4e-4,
    -0.261_908_384_015_814_1e-4,
    0.368_991_826_595_316_2e-5,
];
const SQRT_2PI: f64 = 2.506_628_274_631_000_5;

/// True when `z` is exactly `0, -1, -2, ...`.
pub fn is_nonpositive_integer(z: C) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

/// Nearest integer to `z` when within `tol`.
pub fn near_integer(z: C, tol: f64) -> Option<i64> {
    let r = z.re.round();
    if (z - C::new(r, 0.0)).norm() <= tol {
        Some(r as i64)
    } else {
        None
    }
}

/// `sin(pi z)` with the real part reduced first, exact zeros at integers.
pub fn sin_pi(z: C) -> C {
    let n = z.re.round();
    let f = z.re - n;
    let sign = if (n as i64) % 2 == 0 { 1.0 } else { -1.0 };
    let (s, c) = (PI * f).sin_cos();
    let y = PI * z.im;
    C::new(sign * s * y.cosh(), sign * c * y.sinh())
}

fn lgamma_right(z: C) -> C {
    // valid for Re z >= 1/2
    let mut ser = C::new(0.999_999_999_999_997_1, 0.0);
    let mut y = z;
    for c in LANCZOS {
        y += 1.0;
        ser += c / y;
    }
    let t = z + LANCZOS_G_HALF;
    (z + 0.5) * t.ln() - t + (ser * SQRT_2PI / z).ln()
}

/// A logarithm of `Gamma(z)`; the imaginary part is not reduced to the
/// principal branch. `z` must not be a pole.
pub fn lgamma(z: C) -> C {
    if z.re >= 0.5 {
        lgamma_right(z)
    } else {
        C::new(PI.ln(), 0.0) - sin_pi(z).ln() - lgamma_right(1.0 - z)
    }
}

pub fn gamma(z: C) -> Result<C, HyperError> {
    if is_nonpositive_integer(z) {
        return Err(HyperError::PoleAtNonPositiveInteger(z.re));
    }
    if z.im == 0.0 && z.re > 0.0 && z.re == z.re.round() && z.re <= 171.0 {
        let mut f = 1.0;
        for k in 2..(z.re as u64) {
            f *= k as f64;
        }
        return Ok(C::new(f, 0.0));
    }
    Ok(lgamma(z).exp())
}

/// `1/Gamma(z)`, entire; exactly zero at the poles of `Gamma`.
pub fn rgamma(z: C) -> C {
    if is_nonpositive_integer(z) {
        return C::new(0.0, 0.0);
    }
    if z.re >= 0.5 {
        match gamma(z) {
            Ok(g) if z.im == 0.0 && z.re == z.re.round() => 1.0 / g,
            _ => (-lgamma_right(z)).exp(),
        }
    } else {
        sin_pi(z) * (lgamma_right(1.0 - z)).exp() / PI
    }
}

pub fn gamma_real(x: f64) -> Result<f64, HyperError> {
    gamma(C::new(x, 0.0)).map(|g| g.re)
}

/// `(a)_k = a (a+1) ... (a+k-1)`.
pub fn pochhammer(a: C, k: usize) -> C {
    let mut p = C::new(1.0, 0.0);
    for j in 0..k {
        p *= a + j as f64;
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: C, b: C, tol: f64) -> bool {
        (a - b).norm() <= tol * b.norm().max(1e-300)
    }

    #[test]
    fn factorials_and_half_integers() {
        assert_eq!(gamma(C::new(4.0, 0.0)).unwrap(), C::new(6.0, 0.0));
        assert!(close(gamma(C::new(0.5, 0.0)).unwrap(), C::new(PI.sqrt(), 0.0), 1e-14));
        assert!(close(gamma(C::new(-0.5, 0.0)).unwrap(), C::new(-2.0 * PI.sqrt(), 0.0), 1e-14));
        assert_eq!(rgamma(C::new(-2.0, 0.0)), C::new(0.0, 0.0));
        assert!(matches!(gamma(C::new(-3.0, 0.0)), Err(HyperError::PoleAtNonPositiveInteger(_))));
    }

    #[test]
    fn recurrence_and_reflection_on_strip() {
        // Gamma(z+1) = z Gamma(z); Gamma(z) Gamma(1-z) = pi / sin(pi z)
        for &(x, y) in &[(0.3, 0.0), (2.7, 1.5), (-3.4, 0.8), (12.2, -7.0), (-20.5, 3.0), (25.0, 10.0)] {
            let z = C::new(x, y);
            let g = gamma(z).unwrap();
            assert!(close(gamma(z + 1.0).unwrap(), z * g, 1e-13), "{z}");
            let refl = g * gamma(1.0 - z).unwrap();
            assert!(close(refl, PI / sin_pi(z), 1e-13), "{z}");
        }
    }

    #[test]
    fn modulus_on_imaginary_axis() {
        // |Gamma(iy)|^2 = pi / (y sinh(pi y))
        for y in [0.5, 2.0, 7.5] {
            let g = gamma(C::new(0.0, y)).unwrap();
            let want = PI / (y * (PI * y).sinh());
            assert!((g.norm_sqr() - want).abs() <= 1e-13 * want);
        }
    }

    #[test]
    fn rgamma_near_poles_is_small_and_smooth() {
        let d = 1e-7;
        let r = rgamma(C::new(-3.0 + d, 0.0));
        // 1/Gamma(-3 + d) ~ -6 d
        assert!((r.re + 6.0 * d).abs() < 1e-12);
    }

    #[test]
    fn pochhammer_values() {
        assert_eq!(pochhammer(C::new(7.0, 1.0), 0), C::new(1.0, 0.0));
        assert_eq!(pochhammer(C::new(-2.0, 0.0), 3), C::new(0.0, 0.0));
        assert_eq!(pochhammer(C::new(1.0, 0.0), 5), C::new(120.0, 0.0));
    }
}
