//! Univariate polynomials over exact or floating scalars, plus the low-degree
//! primitives used by the reduction (discriminant, quadratic roots).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::PolyError;
use crate::surd::Surd;

/// Exact rational scalar.
pub type Q = BigRational;

/// Coefficient field for [`Poly`].
pub trait Scalar:
    Clone
    + PartialEq
    + fmt::Debug
    + Zero
    + One
    + Neg<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
{
    fn from_int(n: i64) -> Self;

    /// `self / rhs`, or `None` when the quotient leaves the scalar kind.
    fn checked_div(&self, rhs: &Self) -> Option<Self>;
}

impl Scalar for Q {
    fn from_int(n: i64) -> Self {
        Q::from_integer(BigInt::from(n))
    }

    fn checked_div(&self, rhs: &Self) -> Option<Self> {
        if rhs.is_zero() {
            None
        } else {
            Some(self / rhs)
        }
    }
}

impl Scalar for f64 {
    fn from_int(n: i64) -> Self {
        n as f64
    }

    fn checked_div(&self, rhs: &Self) -> Option<Self> {
        if *rhs == 0.0 {
            None
        } else {
            Some(self / rhs)
        }
    }
}

/// Shorthand for an integer-valued rational.
pub fn q(n: i64) -> Q {
    Q::from_int(n)
}

/// Shorthand for `num/den`.
pub fn qf(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

/// Exact rational image of a finite float.
pub fn q_from_f64(x: f64) -> Q {
    Q::from_float(x).expect("finite float")
}

pub fn q_to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Formats a rational exactly when it is short, otherwise as a 17-digit decimal.
pub fn fmt_q(x: &Q) -> String {
    if x.is_integer() && x.numer().bits() <= 64 {
        return x.numer().to_string();
    }
    if x.denom().bits() <= 20 && x.numer().bits() <= 64 {
        return format!("{}/{}", x.numer(), x.denom());
    }
    fmt_f64(q_to_f64(x))
}

/// 17 significant digits, locale independent.
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    format!("{:.16e}", x)
}

/// Dense polynomial, coefficients in ascending powers, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Poly<T> {
    coeffs: Vec<T>,
}

impl<T: Scalar> Poly<T> {
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: T) -> Self {
        Poly::new(vec![c])
    }

    /// The monomial `x`.
    pub fn x() -> Self {
        Poly::new(vec![T::zero(), T::one()])
    }

    /// `c0 + c1 x`.
    pub fn linear(c0: T, c1: T) -> Self {
        Poly::new(vec![c0, c1])
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of `x^i` (zero past the degree).
    pub fn coeff(&self, i: usize) -> T {
        self.coeffs.get(i).cloned().unwrap_or_else(T::zero)
    }

    pub fn lead(&self) -> T {
        self.coeffs.last().cloned().unwrap_or_else(T::zero)
    }

    pub fn eval(&self, x: &T) -> T {
        let mut acc = T::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x.clone() + c.clone();
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c.clone() * T::from_int(i as i64))
            .collect();
        Poly::new(coeffs)
    }

    pub fn scale(&self, s: &T) -> Self {
        Poly::new(self.coeffs.iter().map(|c| c.clone() * s.clone()).collect())
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Poly<U> {
        Poly::new(self.coeffs.iter().map(f).collect())
    }

    /// Substitutes `x -> scale * t + shift`.
    pub fn compose_affine(&self, scale: &T, shift: &T) -> Self {
        let inner = Poly::linear(shift.clone(), scale.clone());
        let mut acc = Poly::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * &inner) + &Poly::constant(c.clone());
        }
        acc
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Poly::constant(T::one());
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }
}

impl<T: Scalar> Add for &Poly<T> {
    type Output = Poly<T>;
    fn add(self, rhs: &Poly<T>) -> Poly<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl<T: Scalar> Sub for &Poly<T> {
    type Output = Poly<T>;
    fn sub(self, rhs: &Poly<T>) -> Poly<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl<T: Scalar> Mul for &Poly<T> {
    type Output = Poly<T>;
    fn mul(self, rhs: &Poly<T>) -> Poly<T> {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![T::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Poly::new(out)
    }
}

impl<T: Scalar> Neg for &Poly<T> {
    type Output = Poly<T>;
    fn neg(self) -> Poly<T> {
        Poly::new(self.coeffs.iter().map(|c| -c.clone()).collect())
    }
}

macro_rules! owned_binop {
    ($tr:ident, $m:ident) => {
        impl<T: Scalar> $tr for Poly<T> {
            type Output = Poly<T>;
            fn $m(self, rhs: Poly<T>) -> Poly<T> {
                (&self).$m(&rhs)
            }
        }
    };
}
owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

impl<T: Scalar> Neg for Poly<T> {
    type Output = Poly<T>;
    fn neg(self) -> Poly<T> {
        -&self
    }
}

impl<T: Scalar> Zero for Poly<T> {
    fn zero() -> Self {
        Poly::zero()
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl<T: Scalar> Poly<T> {
    /// Writes the polynomial with `var` as the indeterminate and `fmt_c` for
    /// coefficients. Coefficients that render as sums (` + ` or ` - `) are
    /// parenthesised.
    pub fn render(&self, var: &str, fmt_c: impl Fn(&T) -> String) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mut s = fmt_c(c);
            let compound = s.contains(" + ") || s.contains(" - ");
            let negative = s.starts_with('-') && !compound;
            if negative {
                s.remove(0);
            }
            let mono = match i {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{i}"),
            };
            let body = if i == 0 {
                if compound {
                    format!("({s})")
                } else {
                    s
                }
            } else if s == "1" {
                mono
            } else if compound {
                format!("({s})*{mono}")
            } else {
                format!("{s}*{mono}")
            };
            if out.is_empty() {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            out.push_str(&body);
        }
        out
    }
}

impl fmt::Display for Poly<Q> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render("x", fmt_q))
    }
}

impl fmt::Display for Poly<f64> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render("x", |c| fmt_f64(*c)))
    }
}

impl Poly<Q> {
    pub fn to_f64(&self) -> Poly<f64> {
        self.map(q_to_f64)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + q_to_f64(c))
    }

    /// Exact square root when `self` is the square of a rational polynomial
    /// (root chosen with positive leading coefficient).
    pub fn exact_sqrt(&self) -> Option<Poly<Q>> {
        let deg = match self.degree() {
            None => return Some(Poly::zero()),
            Some(d) => d,
        };
        if deg % 2 == 1 {
            return None;
        }
        let m = deg / 2;
        let lead = rational_sqrt(&self.lead())?;
        // match coefficients from the top down
        let mut root = vec![Q::zero(); m + 1];
        root[m] = lead.clone();
        let two_lead = &lead * q(2);
        for k in (0..m).rev() {
            // coefficient of x^{m+k} in root^2
            let mut acc = self.coeff(m + k);
            for i in (k + 1)..=m {
                let j = m + k - i;
                if j > k && j <= m {
                    acc -= &root[i] * &root[j];
                }
            }
            root[k] = acc / &two_lead;
        }
        let cand = Poly::new(root);
        if &(&cand * &cand) == self {
            Some(cand)
        } else {
            None
        }
    }
}

/// Exact square root of a nonnegative rational, when it is rational.
pub fn rational_sqrt(x: &Q) -> Option<Q> {
    if x.is_negative() {
        return None;
    }
    let n = x.numer();
    let d = x.denom();
    let rn = n.sqrt();
    let rd = d.sqrt();
    if &(&rn * &rn) == n && &(&rd * &rd) == d {
        Some(Q::new(rn, rd))
    } else {
        None
    }
}

/// Open interval with possibly infinite ends.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self, PolyError> {
        if lo.is_nan() || hi.is_nan() || lo >= hi {
            return Err(PolyError::EmptyInterval { lo, hi });
        }
        Ok(Interval { lo, hi })
    }

    pub fn real_line() -> Self {
        Interval {
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        x > self.lo && x < self.hi
    }

    /// `n` points strictly inside, clustered away from the ends.
    pub fn interior_samples(&self, n: usize) -> Vec<f64> {
        let (a, b) = match (self.lo.is_finite(), self.hi.is_finite()) {
            (true, true) => (self.lo, self.hi),
            (true, false) => (self.lo, self.lo + 8.0),
            (false, true) => (self.hi - 8.0, self.hi),
            (false, false) => (-4.0, 4.0),
        };
        (0..n)
            .map(|i| a + (b - a) * (i as f64 + 0.5) / n as f64)
            .collect()
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let end = |x: f64| {
            if x == f64::INFINITY {
                "inf".to_string()
            } else if x == f64::NEG_INFINITY {
                "-inf".to_string()
            } else {
                format!("{x}")
            }
        };
        write!(f, "({}, {})", end(self.lo), end(self.hi))
    }
}

/// `b^2 - 4ac` for `p = a x^2 + b x + c`; for degree <= 1 this is `b^2`.
pub fn quad_discriminant<T: Scalar>(p: &Poly<T>) -> Result<T, PolyError> {
    if p.degree().unwrap_or(0) > 2 {
        return Err(PolyError::DegreeTooHigh {
            degree: p.degree().unwrap_or(0),
        });
    }
    let (a, b, c) = (p.coeff(2), p.coeff(1), p.coeff(0));
    Ok(b.clone() * b - T::from_int(4) * a * c)
}

/// A root with its multiplicity.
#[derive(Clone, Debug, PartialEq)]
pub struct Root {
    pub value: Surd,
    pub multiplicity: u32,
}

/// Roots of a polynomial of degree 1 or 2 with surd coefficients. Irrational
/// roots stay symbolic.
pub fn quad_roots(p: &Poly<Surd>) -> Result<Vec<Root>, PolyError> {
    match p.degree() {
        None | Some(0) => Err(PolyError::NotPolynomialRoot),
        Some(1) => {
            let r = (-p.coeff(0))
                .checked_div(&p.coeff(1))
                .ok_or(PolyError::NotRepresentable)?;
            Ok(vec![Root {
                value: r,
                multiplicity: 1,
            }])
        }
        Some(2) => {
            let disc = quad_discriminant(p)?;
            let two_a = p.coeff(2) * Surd::from_int(2);
            let minus_b = -p.coeff(1);
            if disc.is_zero() {
                let r = minus_b
                    .checked_div(&two_a)
                    .ok_or(PolyError::NotRepresentable)?;
                return Ok(vec![Root {
                    value: r,
                    multiplicity: 2,
                }]);
            }
            let sq = disc.sqrt().ok_or(PolyError::NotRepresentable)?;
            let r1 = (minus_b.clone() + sq.clone())
                .checked_div(&two_a)
                .ok_or(PolyError::NotRepresentable)?;
            let r2 = (minus_b - sq)
                .checked_div(&two_a)
                .ok_or(PolyError::NotRepresentable)?;
            Ok(vec![
                Root {
                    value: r1,
                    multiplicity: 1,
                },
                Root {
                    value: r2,
                    multiplicity: 1,
                },
            ])
        }
        Some(d) => Err(PolyError::DegreeTooHigh { degree: d }),
    }
}

/// Lifts a rational polynomial to surd coefficients.
pub fn lift(p: &Poly<Q>) -> Poly<Surd> {
    p.map(|c| Surd::from_q(c.clone()))
}
