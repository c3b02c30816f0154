//! Scalars of the reduction: polynomials in the energy symbol `eps` with
//! rational coefficients, extended by square roots of such polynomials.
//!
//! An element is a finite sum `sum_m c_m(eps) * prod_{r in m} sqrt(r(eps))`
//! over monomials `m` of distinct normalised radicands. Each radicand is
//! evaluated with the principal square root, so products of radicals are
//! never merged under a single root sign.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::poly::{fmt_q, q, rational_sqrt, Poly, Scalar, Q};

/// Polynomial in `eps` under a square root.
///
/// Nonconstant radicands have leading coefficient `+1` or `-1`. Constant
/// radicands are `-1` or an integer greater than one with small square
/// factors removed.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Radicand(Poly<Q>);

impl Radicand {
    pub fn poly(&self) -> &Poly<Q> {
        &self.0
    }

    fn eval(&self, eps: f64) -> Complex64 {
        let v = self.0.eval_f64(eps);
        if v >= 0.0 {
            Complex64::new(v.sqrt(), 0.0)
        } else {
            Complex64::new(0.0, (-v).sqrt())
        }
    }
}

type Monomial = Vec<Radicand>;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Surd {
    terms: BTreeMap<Monomial, Poly<Q>>,
}

fn mul_monomials(a: &Monomial, b: &Monomial) -> (Monomial, Poly<Q>) {
    let sa: BTreeSet<&Radicand> = a.iter().collect();
    let sb: BTreeSet<&Radicand> = b.iter().collect();
    let mut factor = Poly::constant(q(1));
    for r in sa.intersection(&sb) {
        factor = &factor * &r.0;
    }
    let mono: Monomial = sa.symmetric_difference(&sb).map(|r| (*r).clone()).collect();
    (mono, factor)
}

/// `sqrt(x) = f * sqrt(k)` for `x > 0` rational, `k` an integer with small
/// square factors stripped.
fn sqrt_const(x: &Q) -> (Q, Option<BigInt>) {
    if let Some(r) = rational_sqrt(x) {
        return (r, None);
    }
    let mut m = x.numer() * x.denom();
    let mut f = BigInt::one();
    for p in 2u32..1000 {
        let pp = BigInt::from(p * p);
        while (&m).is_multiple_of(&pp) {
            m /= &pp;
            f *= p;
        }
    }
    let r = m.sqrt();
    if &r * &r == m {
        f *= r;
        m = BigInt::one();
    }
    let factor = Q::new(f, x.denom().clone());
    if m.is_one() {
        (factor, None)
    } else {
        (factor, Some(m))
    }
}

impl Surd {
    pub fn from_poly(p: Poly<Q>) -> Self {
        let mut s = Surd::default();
        if !p.is_zero() {
            s.terms.insert(Vec::new(), p);
        }
        s
    }

    pub fn from_q(x: Q) -> Self {
        Surd::from_poly(Poly::constant(x))
    }

    pub fn from_f64(x: f64) -> Self {
        Surd::from_q(crate::poly::q_from_f64(x))
    }

    /// The energy symbol.
    pub fn eps() -> Self {
        Surd::from_poly(Poly::x())
    }

    fn add_term(&mut self, mono: Monomial, coef: Poly<Q>) {
        if coef.is_zero() {
            return;
        }
        let entry = self.terms.entry(mono.clone()).or_insert_with(Poly::zero);
        *entry = &*entry + &coef;
        if entry.is_zero() {
            self.terms.remove(&mono);
        }
    }

    /// Terms as (radicands, coefficient polynomial in `eps`).
    pub fn terms(&self) -> impl Iterator<Item = (&[Radicand], &Poly<Q>)> {
        self.terms.iter().map(|(m, c)| (m.as_slice(), c))
    }

    /// The polynomial part when no radicals are present.
    pub fn as_poly(&self) -> Option<Poly<Q>> {
        match self.terms.len() {
            0 => Some(Poly::zero()),
            1 => self.terms.get(&Vec::new()).cloned(),
            _ => None,
        }
    }

    /// The rational value when `self` is free of `eps` and radicals.
    pub fn as_q(&self) -> Option<Q> {
        let p = self.as_poly()?;
        match p.degree() {
            None => Some(Q::zero()),
            Some(0) => Some(p.coeff(0)),
            _ => None,
        }
    }

    /// True when the value does not depend on `eps`.
    pub fn is_eps_free(&self) -> bool {
        self.terms.iter().all(|(m, c)| {
            c.degree().unwrap_or(0) == 0 && m.iter().all(|r| r.0.degree().unwrap_or(0) == 0)
        })
    }

    pub fn radicands(&self) -> BTreeSet<Radicand> {
        self.terms.keys().flatten().cloned().collect()
    }

    /// Square root of a polynomial in `eps`, normalised into radicands.
    pub fn sqrt_of_poly(r: &Poly<Q>) -> Self {
        if r.is_zero() {
            return Surd::zero();
        }
        if let Some(s) = r.exact_sqrt() {
            return Surd::from_poly(s);
        }
        let lead = r.lead();
        let negative = lead.is_negative();
        let monic = r.scale(&(Q::one() / &lead));
        let (cf, catom) = sqrt_const(&lead.abs());
        let mut mono: Monomial = Vec::new();
        let mut coef = Poly::constant(cf);
        if let Some(k) = catom {
            mono.push(Radicand(Poly::constant(Q::from_integer(k))));
        }
        let signed = |p: &Poly<Q>, neg: bool| if neg { -p } else { p.clone() };
        match monic.degree() {
            Some(0) => {
                if negative {
                    mono.push(Radicand(Poly::constant(q(-1))));
                }
            }
            Some(1) => mono.push(Radicand(signed(&monic, negative))),
            Some(2) => {
                let b = monic.coeff(1);
                let c = monic.coeff(0);
                let disc = &b * &b - q(4) * &c;
                if disc.is_zero() {
                    let r0 = -b / q(2);
                    coef = &coef * &Poly::linear(-r0, q(1));
                    if negative {
                        mono.push(Radicand(Poly::constant(q(-1))));
                    }
                } else if let Some(d) = rational_sqrt(&disc) {
                    let r1 = (-&b - &d) / q(2);
                    let r2 = (-&b + &d) / q(2);
                    let below = |r: &Q| Poly::linear(r.clone(), q(-1));
                    let above = |r: &Q| Poly::linear(-r.clone(), q(1));
                    if negative {
                        mono.push(Radicand(above(&r1)));
                        mono.push(Radicand(below(&r2)));
                    } else {
                        mono.push(Radicand(below(&r1)));
                        mono.push(Radicand(below(&r2)));
                    }
                } else {
                    mono.push(Radicand(signed(&monic, negative)));
                }
            }
            _ => mono.push(Radicand(signed(&monic, negative))),
        }
        mono.sort();
        let mut s = Surd::default();
        s.add_term(mono, coef);
        s
    }

    pub fn sqrt_of_q(x: &Q) -> Self {
        Surd::sqrt_of_poly(&Poly::constant(x.clone()))
    }

    /// Square root inside the field, when one exists.
    ///
    /// Handles polynomials and two-term elements `a + b*m` that denest as
    /// `sqrt(x) +- sqrt(y)`. The returned sign is not normalised.
    pub fn sqrt(&self) -> Option<Surd> {
        if let Some(p) = self.as_poly() {
            return Some(Surd::sqrt_of_poly(&p));
        }
        if self.terms.len() != 2 {
            return None;
        }
        let a = self.terms.get(&Vec::new())?.clone();
        let (m, b) = self.terms.iter().find(|(m, _)| !m.is_empty())?;
        let big_m = m.iter().fold(Poly::constant(q(1)), |acc, r| &acc * &r.0);
        let disc = &(&a * &a) - &(&(b * b) * &big_m);
        let n = disc.exact_sqrt()?;
        let half = Q::new(1.into(), 2.into());
        let x = (&a + &n).scale(&half);
        let y = (&a - &n).scale(&half);
        let sx = Surd::sqrt_of_poly(&x);
        let sy = Surd::sqrt_of_poly(&y);
        for cand in [&sx + &sy, &sx - &sy] {
            if &(&cand * &cand) == self {
                return Some(cand);
            }
        }
        None
    }

    /// Negates every term that contains `r`.
    fn flip(&self, r: &Radicand) -> Surd {
        let mut out = Surd::default();
        for (m, c) in &self.terms {
            let c = if m.contains(r) { -c } else { c.clone() };
            out.add_term(m.clone(), c);
        }
        out
    }

    /// Division by conjugate elimination; succeeds when the rationalised
    /// denominator is a nonzero constant.
    pub fn try_div(&self, den: &Surd) -> Option<Surd> {
        if den.is_zero() {
            return None;
        }
        let mut num = self.clone();
        let mut den = den.clone();
        while let Some(r) = den.radicands().into_iter().next() {
            let conj = den.flip(&r);
            num = &num * &conj;
            den = &den * &conj;
            if den.is_zero() {
                return None;
            }
        }
        let d = den.as_q()?;
        let inv = Q::one() / d;
        let mut out = Surd::default();
        for (m, c) in num.terms {
            out.add_term(m, c.scale(&inv));
        }
        Some(out)
    }

    /// Principal-branch value at a numeric energy.
    pub fn eval(&self, eps: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, c) in &self.terms {
            let mut t = Complex64::new(c.eval_f64(eps), 0.0);
            for r in m {
                t *= r.eval(eps);
            }
            acc += t;
        }
        acc
    }

    /// Value for an `eps`-free element.
    pub fn value(&self) -> Complex64 {
        self.eval(0.0)
    }

    /// Real value when the imaginary part is negligible.
    pub fn eval_real(&self, eps: f64) -> Option<f64> {
        let v = self.eval(eps);
        if v.im.abs() <= 1e-12 * v.re.abs().max(1.0) {
            Some(v.re)
        } else {
            None
        }
    }

    /// Exact substitution of a rational energy.
    pub fn subs_eps(&self, eps: &Q) -> Surd {
        let mut out = Surd::zero();
        for (m, c) in &self.terms {
            let mut t = Surd::from_q(c.eval(eps));
            for r in m {
                t = &t * &Surd::sqrt_of_q(&r.0.eval(eps));
            }
            out = &out + &t;
        }
        out
    }

    /// Renders with `eps` as the energy symbol.
    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (m, c) in &self.terms {
            let cs = c.render("eps", fmt_q);
            let compound = cs.chars().skip(1).any(|ch| ch == '+' || ch == '-') && !cs.contains('e')
                || cs.contains(" - ")
                || cs.contains(" + ");
            let (neg, body) = if m.is_empty() {
                if compound {
                    (false, cs)
                } else if let Some(rest) = cs.strip_prefix('-') {
                    (true, rest.to_string())
                } else {
                    (false, cs)
                }
            } else {
                let rads: Vec<String> = m
                    .iter()
                    .map(|r| format!("sqrt({})", r.0.render("eps", fmt_q)))
                    .collect();
                let rads = rads.join("*");
                if compound {
                    (false, format!("({cs})*{rads}"))
                } else {
                    let (neg, mag) = match cs.strip_prefix('-') {
                        Some(rest) => (true, rest.to_string()),
                        None => (false, cs),
                    };
                    if mag == "1" {
                        (neg, rads)
                    } else {
                        (neg, format!("{mag}*{rads}"))
                    }
                }
            };
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            out.push_str(&body);
        }
        out
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl Add for &Surd {
    type Output = Surd;
    fn add(self, rhs: &Surd) -> Surd {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Surd {
    type Output = Surd;
    fn sub(self, rhs: &Surd) -> Surd {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl Mul for &Surd {
    type Output = Surd;
    fn mul(self, rhs: &Surd) -> Surd {
        let mut out = Surd::default();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                let (m, f) = mul_monomials(ma, mb);
                out.add_term(m, &(ca * cb) * &f);
            }
        }
        out
    }
}

impl Neg for &Surd {
    type Output = Surd;
    fn neg(self) -> Surd {
        Surd {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

macro_rules! owned_ops {
    ($tr:ident, $m:ident) => {
        impl $tr for Surd {
            type Output = Surd;
            fn $m(self, rhs: Surd) -> Surd {
                (&self).$m(&rhs)
            }
        }
    };
}
owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);

impl Neg for Surd {
    type Output = Surd;
    fn neg(self) -> Surd {
        -&self
    }
}

impl Zero for Surd {
    fn zero() -> Self {
        Surd::default()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for Surd {
    fn one() -> Self {
        Surd::from_q(Q::one())
    }
}

impl Scalar for Surd {
    fn from_int(n: i64) -> Self {
        Surd::from_q(q(n))
    }

    fn checked_div(&self, rhs: &Self) -> Option<Self> {
        self.try_div(rhs)
    }
}

impl From<Q> for Surd {
    fn from(x: Q) -> Self {
        Surd::from_q(x)
    }
}

/// Evaluates a polynomial with surd coefficients at numeric `(x, eps)`.
pub fn eval_poly(p: &Poly<Surd>, x: f64, eps: f64) -> Complex64 {
    p.coeffs()
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, c| acc * x + c.eval(eps))
}

/// Numeric image of a surd polynomial at a fixed energy.
pub fn poly_at(p: &Poly<Surd>, eps: f64) -> Poly<Complex64Wrap> {
    p.map(|c| Complex64Wrap(c.eval(eps)))
}

/// Renders a surd polynomial in the variable `var`.
pub fn render_poly(p: &Poly<Surd>, var: &str) -> String {
    p.render(var, |c| c.render())
}

/// Complex scalar usable as a [`Poly`] coefficient.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Complex64Wrap(pub Complex64);

impl Add for Complex64Wrap {
    type Output = Self;
    fn add(self, r: Self) -> Self {
        Complex64Wrap(self.0 + r.0)
    }
}
impl Sub for Complex64Wrap {
    type Output = Self;
    fn sub(self, r: Self) -> Self {
        Complex64Wrap(self.0 - r.0)
    }
}
impl Mul for Complex64Wrap {
    type Output = Self;
    fn mul(self, r: Self) -> Self {
        Complex64Wrap(self.0 * r.0)
    }
}
impl Neg for Complex64Wrap {
    type Output = Self;
    fn neg(self) -> Self {
        Complex64Wrap(-self.0)
    }
}
impl Zero for Complex64Wrap {
    fn zero() -> Self {
        Complex64Wrap(Complex64::new(0.0, 0.0))
    }
    fn is_zero(&self) -> bool {
        self.0 == Complex64::new(0.0, 0.0)
    }
}
impl One for Complex64Wrap {
    fn one() -> Self {
        Complex64Wrap(Complex64::new(1.0, 0.0))
    }
}
impl Scalar for Complex64Wrap {
    fn from_int(n: i64) -> Self {
        Complex64Wrap(Complex64::new(n as f64, 0.0))
    }
    fn checked_div(&self, rhs: &Self) -> Option<Self> {
        if rhs.is_zero() {
            None
        } else {
            Some(Complex64Wrap(self.0 / rhs.0))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::qf;

    fn lin(c0: i64, c1: i64) -> Poly<Q> {
        Poly::linear(q(c0), q(c1))
    }

    #[test]
    fn radical_squares_back() {
        let r = Surd::sqrt_of_poly(&lin(25, -1));
        assert_eq!(&r * &r, Surd::from_poly(lin(25, -1)));
        assert_eq!(r.render(), "sqrt(25 - eps)");
    }

    #[test]
    fn constant_radicals_are_normalised() {
        let s8 = Surd::sqrt_of_q(&q(8));
        let s2 = Surd::sqrt_of_q(&q(2));
        assert_eq!(s8, &Surd::from_int(2) * &s2);
        let s_half = Surd::sqrt_of_q(&qf(1, 2));
        assert_eq!(&s_half * &Surd::from_int(2), s2);
        assert_eq!(Surd::sqrt_of_q(&qf(9, 4)), Surd::from_q(qf(3, 2)));
    }

    #[test]
    fn quadratic_radicand_splits_into_linear_atoms() {
        // (3 - eps)(1 - eps) = eps^2 - 4 eps + 3
        let p = Poly::new(vec![q(3), q(-4), q(1)]);
        let s = Surd::sqrt_of_poly(&p);
        assert_eq!(s.radicands().len(), 2);
        assert_eq!(&s * &s, Surd::from_poly(p));
        for eps in [-2.0, 0.5] {
            let v = s.eval(eps);
            let want = ((3.0 - eps) * (1.0 - eps)).sqrt();
            assert!((v.re - want).abs() < 1e-12 && v.im.abs() < 1e-12);
        }
    }

    #[test]
    fn denesting_recovers_sum_of_roots() {
        // 3 + 2 sqrt2 = (1 + sqrt2)^2
        let s2 = Surd::sqrt_of_q(&q(2));
        let x = &Surd::from_int(3) + &(&Surd::from_int(2) * &s2);
        let r = x.sqrt().unwrap();
        assert_eq!(&r * &r, x);

        // (v+ + v- - 2 eps + 2 sqrt(v+ - eps) sqrt(v- - eps)) / 4 = B^2
        let a = Surd::sqrt_of_poly(&lin(9, -1));
        let b = Surd::sqrt_of_poly(&lin(1, -1));
        let half = Surd::from_q(qf(1, 2));
        let big_b = &half * &(&a + &b);
        let sq = &big_b * &big_b;
        let back = sq.sqrt().unwrap();
        assert!(back == big_b || back == -&big_b);
    }

    #[test]
    fn division_rationalises_denominators() {
        let s2 = Surd::sqrt_of_q(&q(2));
        let den = &Surd::from_int(1) + &s2;
        let quo = Surd::from_int(1).try_div(&den).unwrap();
        assert_eq!(&quo * &den, Surd::from_int(1));
        assert!(Surd::from_int(1).try_div(&Surd::eps()).is_none());
    }

    #[test]
    fn substitution_is_exact() {
        let r = Surd::sqrt_of_poly(&lin(25, -1));
        assert_eq!(r.subs_eps(&q(16)), Surd::from_int(3));
        assert_eq!(r.subs_eps(&q(23)), Surd::sqrt_of_q(&q(2)));
    }

    #[test]
    fn negative_radicand_evaluates_on_the_principal_branch() {
        let r = Surd::sqrt_of_poly(&lin(1, -1));
        let v = r.eval(5.0);
        assert!(v.re.abs() < 1e-15 && (v.im - 2.0).abs() < 1e-15);
    }
}
