//! Adaptive Gauss-Kronrod (7/15) and double-exponential quadrature.

use std::collections::BinaryHeap;
use std::cmp::Ordering;
use std::f64::consts::FRAC_PI_2;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::OracleError;

/// Values that can be integrated: reals and complex numbers.
pub trait QuadValue: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
    fn is_finite_value(&self) -> bool;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn is_finite_value(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadResult<T> {
    pub value: T,
    pub error: f64,
    pub evals: usize,
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<T: QuadValue>(f: &mut impl FnMut(f64) -> T, a: f64, b: f64) -> (T, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kron = kron + s * WGK[j];
        if j % 2 == 1 {
            gauss = gauss + s * WG[j / 2];
        }
    }
    let kron = kron * h;
    let gauss = gauss * h;
    (kron, (kron - gauss).magnitude())
}

struct Segment<T> {
    a: f64,
    b: f64,
    value: T,
    error: f64,
}

impl<T> PartialEq for Segment<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<T> Eq for Segment<T> {}
impl<T> PartialOrd for Segment<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Segment<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

const MAX_SEGMENTS: usize = 4000;

fn gk_finite<T: QuadValue>(
    mut f: impl FnMut(f64) -> T,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<QuadResult<T>, OracleError> {
    let mut guarded = |x: f64| {
        let v = f(x);
        if v.is_finite_value() {
            v
        } else {
            T::zero()
        }
    };
    let (v0, e0) = gk15(&mut guarded, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value: v0, error: e0 });
    let mut total = v0;
    let mut err = e0;
    let mut evals = 15;
    while err > tol.max(1e-15 * total.magnitude()) {
        if heap.len() >= MAX_SEGMENTS {
            return Err(OracleError::NoConvergence { estimate: err });
        }
        let seg = heap.pop().expect("nonempty heap");
        let m = 0.5 * (seg.a + seg.b);
        if m <= seg.a || m >= seg.b {
            // cannot split further; accept what we have
            heap.push(seg);
            break;
        }
        let (vl, el) = gk15(&mut guarded, seg.a, m);
        let (vr, er) = gk15(&mut guarded, m, seg.b);
        evals += 30;
        total = total - seg.value + vl + vr;
        err = err - seg.error + el + er;
        heap.push(Segment { a: seg.a, b: m, value: vl, error: el });
        heap.push(Segment { a: m, b: seg.b, value: vr, error: er });
    }
    // resum to shed accumulated rounding from incremental updates
    let mut value = T::zero();
    let mut error = 0.0;
    for s in heap.iter() {
        value = value + s.value;
        error += s.error;
    }
    Ok(QuadResult { value, error, evals })
}

/// Adaptive Gauss-Kronrod on `(lo, hi)`; either end may be infinite.
///
/// `tol` is an absolute error target.
pub fn gauss_kronrod<T: QuadValue>(
    mut f: impl FnMut(f64) -> T,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<QuadResult<T>, OracleError> {
    if lo.is_nan() || hi.is_nan() {
        return Err(OracleError::NoConvergence { estimate: f64::NAN });
    }
    if lo == hi {
        return Ok(QuadResult { value: T::zero(), error: 0.0, evals: 0 });
    }
    if lo > hi {
        let r = gauss_kronrod(f, hi, lo, tol)?;
        return Ok(QuadResult { value: r.value * -1.0, ..r });
    }
    match (lo.is_finite(), hi.is_finite()) {
        (true, true) => gk_finite(f, lo, hi, tol),
        (false, false) => gk_finite(
            |t| {
                let d = 1.0 - t * t;
                f(t / d) * ((1.0 + t * t) / (d * d))
            },
            -1.0,
            1.0,
            tol,
        ),
        (true, false) => gk_finite(
            |t| {
                let d = 1.0 - t;
                f(lo + t / d) * (1.0 / (d * d))
            },
            0.0,
            1.0,
            tol,
        ),
        (false, true) => gk_finite(
            |t| {
                let d = 1.0 - t;
                f(hi - t / d) * (1.0 / (d * d))
            },
            0.0,
            1.0,
            tol,
        ),
    }
}

/// Real adaptive quadrature returning only the value.
pub fn quad_adaptive(f: impl FnMut(f64) -> f64, lo: f64, hi: f64, tol: f64) -> Result<f64, OracleError> {
    gauss_kronrod(f, lo, hi, tol).map(|r| r.value)
}

/// Tanh-sinh quadrature on a finite `(a, b)` for integrands with algebraic
/// endpoint singularities.
///
/// The integrand receives `(x, x - a, b - x)` with both distances computed
/// without cancellation, so factors like `(1 - x)^alpha` stay accurate
/// arbitrarily close to the ends.
pub fn tanh_sinh<T: QuadValue>(
    mut f: impl FnMut(f64, f64, f64) -> T,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<QuadResult<T>, OracleError> {
    let half = 0.5 * (b - a);
    let mut point = |t: f64| -> T {
        let u = FRAC_PI_2 * t.sinh();
        let w = FRAC_PI_2 * t.cosh() / (u.cosh() * u.cosh());
        // distances to the ends: (b-a)/(1+e^{2u}) and (b-a)/(1+e^{-2u})
        let dhi = (b - a) / (1.0 + (2.0 * u).exp());
        let dlo = (b - a) / (1.0 + (-2.0 * u).exp());
        if dhi <= 0.0 || dlo <= 0.0 || !w.is_finite() || w == 0.0 {
            return T::zero();
        }
        let x = if dlo < dhi { a + dlo } else { b - dhi };
        let v = f(x, dlo, dhi);
        if v.is_finite_value() {
            v * (w * half)
        } else {
            T::zero()
        }
    };
    double_exponential(&mut point, 6.5, tol)
}

/// Exp-sinh quadrature on `(0, inf)` for integrands that decay at infinity
/// and may be singular at zero.
pub fn exp_sinh<T: QuadValue>(mut f: impl FnMut(f64) -> T, tol: f64) -> Result<QuadResult<T>, OracleError> {
    let mut point = |t: f64| -> T {
        let u = FRAC_PI_2 * t.sinh();
        let x = u.exp();
        let w = FRAC_PI_2 * t.cosh() * x;
        if x == 0.0 || !x.is_finite() || !w.is_finite() {
            return T::zero();
        }
        let v = f(x);
        if v.is_finite_value() {
            v * w
        } else {
            T::zero()
        }
    };
    double_exponential(&mut point, 6.5, tol)
}

/// Trapezoid sums of a transformed integrand with step halving.
fn double_exponential<T: QuadValue>(
    point: &mut impl FnMut(f64) -> T,
    tmax: f64,
    tol: f64,
) -> Result<QuadResult<T>, OracleError> {
    let mut h = 1.0;
    let mut evals = 1;
    // level 0: integer multiples of h
    let mut sum = point(0.0);
    let mut k = 1.0;
    while k * h <= tmax {
        sum = sum + point(k * h) + point(-k * h);
        evals += 2;
        k += 1.0;
    }
    let mut estimate = sum * h;
    for _ in 0..12 {
        h *= 0.5;
        // add odd multiples of the new step
        let mut k = 1.0;
        while k * h <= tmax {
            sum = sum + point(k * h) + point(-k * h);
            evals += 2;
            k += 2.0;
        }
        let next = sum * h;
        let change = (next - estimate).magnitude();
        estimate = next;
        if change <= tol.max(1e-14 * next.magnitude()) && h < 0.25 {
            return Ok(QuadResult { value: next, error: change, evals });
        }
    }
    Err(OracleError::NoConvergence { estimate: f64::NAN })
}
