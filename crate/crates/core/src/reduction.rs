//! Reduction of a generalized hypergeometric equation (GHE)
//!
//! `u'' + (psi~/phi) u' + (phi~/phi^2) u = 0`
//!
//! to hypergeometric form `phi y'' + psi y' + lambda y = 0` through
//! `u = chi y`, `chi'/chi = pi/phi`, with `pi` chosen so that
//! `P2(x;k) = (phi' - psi~)^2/4 - phi~ + k phi` is a perfect square.

use std::fmt;

use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::error::ReductionError;
use crate::poly::{fmt_q, lift, q, quad_roots, Interval, Poly, Scalar, Q};
use crate::surd::{eval_poly, render_poly, Surd};

/// A GHE on an open interval. `phi~` may depend affinely on `eps`.
#[derive(Clone, Debug, PartialEq)]
pub struct GheProblem {
    pub phi: Poly<Q>,
    pub psi_tilde: Poly<Q>,
    pub phi_tilde: Poly<Surd>,
    pub interval: Interval,
}

impl GheProblem {
    pub fn new(
        phi: Poly<Q>,
        psi_tilde: Poly<Q>,
        phi_tilde: Poly<Surd>,
        interval: Interval,
    ) -> Result<Self, ReductionError> {
        if phi.is_zero() {
            return Err(ReductionError::DegreeBound("phi is identically zero".into()));
        }
        if phi.degree().unwrap_or(0) > 2 {
            return Err(ReductionError::DegreeBound("deg phi > 2".into()));
        }
        if psi_tilde.degree().unwrap_or(0) > 1 {
            return Err(ReductionError::DegreeBound("deg psi_tilde > 1".into()));
        }
        if phi_tilde.degree().unwrap_or(0) > 2 {
            return Err(ReductionError::DegreeBound("deg phi_tilde > 2".into()));
        }
        for c in phi_tilde.coeffs() {
            let affine = c.as_poly().is_some_and(|p| p.degree().unwrap_or(0) <= 1);
            if !affine {
                return Err(ReductionError::DegreeBound(
                    "phi_tilde coefficients must be affine in eps".into(),
                ));
            }
        }
        if phi.degree().unwrap_or(0) >= 1 {
            for r in quad_roots(&lift(&phi))? {
                let v = r.value.value();
                if v.im.abs() < 1e-14 && interval.contains(v.re) {
                    return Err(ReductionError::PhiRootInside(v.re));
                }
            }
        }
        Ok(GheProblem {
            phi,
            psi_tilde,
            phi_tilde,
            interval,
        })
    }

    pub fn depends_on_eps(&self) -> bool {
        self.phi_tilde.coeffs().iter().any(|c| !c.is_eps_free())
    }

    /// Parses `phi=1 psi_tilde=0 phi_tilde=eps,0,-1 interval=-inf,inf`.
    ///
    /// Coefficients are ascending, comma separated, and may be affine
    /// expressions in `eps` (only inside `phi_tilde`). Numbers may be
    /// integers, decimals, fractions or scientific literals; decimals are
    /// read exactly.
    pub fn parse(text: &str) -> Result<Self, ReductionError> {
        let mut phi = None;
        let mut psi_tilde = None;
        let mut phi_tilde = None;
        let mut interval = None;
        for (start, field) in split_fields(text) {
            let eq = field.find('=').ok_or_else(|| ReductionError::Parse {
                position: start,
                message: format!("expected key=value, found '{field}'"),
            })?;
            let key = &field[..eq];
            let value = &field[eq + 1..];
            let vstart = start + eq + 1;
            match key {
                "phi" => phi = Some(parse_coeffs(value, vstart, false)?),
                "psi_tilde" => psi_tilde = Some(parse_coeffs(value, vstart, false)?),
                "phi_tilde" => phi_tilde = Some(parse_coeffs(value, vstart, true)?),
                "interval" => interval = Some(parse_interval(value, vstart)?),
                _ => {
                    return Err(ReductionError::Parse {
                        position: start,
                        message: format!("unknown key '{key}'"),
                    })
                }
            }
        }
        let missing = |name: &str| ReductionError::Parse {
            position: text.len(),
            message: format!("missing '{name}'"),
        };
        let to_q = |p: Poly<Surd>| p.map(|c| c.as_q().expect("eps-free coefficient"));
        GheProblem::new(
            to_q(phi.ok_or_else(|| missing("phi"))?),
            to_q(psi_tilde.ok_or_else(|| missing("psi_tilde"))?),
            phi_tilde.ok_or_else(|| missing("phi_tilde"))?,
            interval.unwrap_or_else(Interval::real_line),
        )
    }

    /// Canonical text form accepted by [`GheProblem::parse`].
    pub fn to_text(&self) -> String {
        let join_q = |p: &Poly<Q>| {
            if p.is_zero() {
                "0".to_string()
            } else {
                p.coeffs().iter().map(exact_q).collect::<Vec<_>>().join(",")
            }
        };
        let tilde = if self.phi_tilde.is_zero() {
            "0".to_string()
        } else {
            self.phi_tilde
                .coeffs()
                .iter()
                .map(|c| {
                    let p = c.as_poly().unwrap_or_default();
                    let c0 = exact_q(&p.coeff(0));
                    let c1 = p.coeff(1);
                    if c1.is_zero() {
                        c0
                    } else {
                        format!("{c0}+{}*eps", exact_q(&c1))
                    }
                })
                .collect::<Vec<_>>()
                .join(",")
        };
        let end = |x: f64| {
            if x.is_infinite() {
                if x > 0.0 { "inf" } else { "-inf" }.to_string()
            } else {
                exact_q(&crate::poly::q_from_f64(x))
            }
        };
        format!(
            "phi={} psi_tilde={} phi_tilde={} interval={},{}",
            join_q(&self.phi),
            join_q(&self.psi_tilde),
            tilde,
            end(self.interval.lo),
            end(self.interval.hi)
        )
    }
}

fn exact_q(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

impl Default for Poly<Q> {
    fn default() -> Self {
        Poly::zero()
    }
}

fn split_fields(text: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in text.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s, &text[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s, &text[s..]));
    }
    out
}

fn parse_interval(value: &str, start: usize) -> Result<Interval, ReductionError> {
    let parts: Vec<&str> = value.split(',').collect();
    if parts.len() != 2 {
        return Err(ReductionError::Parse {
            position: start,
            message: "interval needs two comma-separated ends".into(),
        });
    }
    let end = |s: &str, pos: usize| -> Result<f64, ReductionError> {
        match s {
            "inf" | "+inf" => Ok(f64::INFINITY),
            "-inf" => Ok(f64::NEG_INFINITY),
            _ => {
                let (c, e) = parse_affine(s, pos)?;
                if !e.is_zero() {
                    return Err(ReductionError::Parse {
                        position: pos,
                        message: "interval ends cannot depend on eps".into(),
                    });
                }
                Ok(crate::poly::q_to_f64(&c))
            }
        }
    };
    let lo = end(parts[0], start)?;
    let hi = end(parts[1], start + parts[0].len() + 1)?;
    Interval::new(lo, hi).map_err(|_| ReductionError::Parse {
        position: start,
        message: "interval must satisfy lo < hi".into(),
    })
}

fn parse_coeffs(value: &str, start: usize, allow_eps: bool) -> Result<Poly<Surd>, ReductionError> {
    let mut coeffs = Vec::new();
    let mut pos = start;
    for part in value.split(',') {
        let (c, e) = parse_affine(part, pos)?;
        if !allow_eps && !e.is_zero() {
            return Err(ReductionError::Parse {
                position: pos,
                message: "eps may only appear in phi_tilde".into(),
            });
        }
        coeffs.push(Surd::from_poly(Poly::linear(c, e)));
        pos += part.len() + 1;
    }
    Ok(Poly::new(coeffs))
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Q),
    Eps,
    Op(char),
}

fn tokenize(s: &str, start: usize) -> Result<Vec<(usize, Tok)>, ReductionError> {
    let bytes = s.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let ch = bytes[i] as char;
        if ch.is_ascii_digit() || ch == '.' {
            let j0 = i;
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut k = i + 1;
                if k < bytes.len() && (bytes[k] == b'+' || bytes[k] == b'-') {
                    k += 1;
                }
                if k < bytes.len() && bytes[k].is_ascii_digit() {
                    while k < bytes.len() && bytes[k].is_ascii_digit() {
                        k += 1;
                    }
                    i = k;
                }
            }
            let lit = &s[j0..i];
            let v = parse_decimal(lit).ok_or_else(|| ReductionError::Parse {
                position: start + j0,
                message: format!("bad number '{lit}'"),
            })?;
            out.push((start + j0, Tok::Num(v)));
        } else if s[i..].starts_with("eps") {
            out.push((start + i, Tok::Eps));
            i += 3;
        } else if "+-*/()".contains(ch) {
            out.push((start + i, Tok::Op(ch)));
            i += 1;
        } else {
            return Err(ReductionError::Parse {
                position: start + i,
                message: format!("unexpected character '{ch}'"),
            });
        }
    }
    Ok(out)
}

/// Exact value of a decimal or scientific literal.
pub fn parse_decimal(lit: &str) -> Option<Q> {
    let (mant, exp) = match lit.find(['e', 'E']) {
        Some(k) => (&lit[..k], lit[k + 1..].parse::<i32>().ok()?),
        None => (lit, 0),
    };
    let (int, frac) = match mant.find('.') {
        Some(k) => (&mant[..k], &mant[k + 1..]),
        None => (mant, ""),
    };
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    let digits = format!("{int}{frac}");
    let n: num_bigint::BigInt = digits.parse().ok()?;
    let mut v = Q::from_integer(n);
    let scale = exp - frac.len() as i32;
    let ten = q(10);
    for _ in 0..scale.unsigned_abs() {
        if scale > 0 {
            v *= &ten;
        } else {
            v /= &ten;
        }
    }
    Some(v)
}

/// Affine value `c + e * eps`.
type Affine = (Q, Q);

struct AffineParser {
    toks: Vec<(usize, Tok)>,
    i: usize,
    end: usize,
}

impl AffineParser {
    fn err(&self, msg: &str) -> ReductionError {
        let position = self.toks.get(self.i).map(|t| t.0).unwrap_or(self.end);
        ReductionError::Parse {
            position,
            message: msg.to_string(),
        }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i).map(|t| &t.1)
    }

    fn expr(&mut self) -> Result<Affine, ReductionError> {
        let mut acc = self.term()?;
        while let Some(Tok::Op(op @ ('+' | '-'))) = self.peek().cloned() {
            self.i += 1;
            let t = self.term()?;
            acc = if op == '+' {
                (acc.0 + t.0, acc.1 + t.1)
            } else {
                (acc.0 - t.0, acc.1 - t.1)
            };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Affine, ReductionError> {
        let mut acc = self.unary()?;
        while let Some(Tok::Op(op @ ('*' | '/'))) = self.peek().cloned() {
            self.i += 1;
            let f = self.unary()?;
            acc = if op == '*' {
                if acc.1.is_zero() {
                    (&acc.0 * &f.0, &acc.0 * &f.1)
                } else if f.1.is_zero() {
                    (&acc.0 * &f.0, &acc.1 * &f.0)
                } else {
                    return Err(self.err("expression is not affine in eps"));
                }
            } else {
                if !f.1.is_zero() || f.0.is_zero() {
                    return Err(self.err("division by eps or zero"));
                }
                (&acc.0 / &f.0, &acc.1 / &f.0)
            };
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Affine, ReductionError> {
        match self.peek().cloned() {
            Some(Tok::Op('-')) => {
                self.i += 1;
                let (c, e) = self.unary()?;
                Ok((-c, -e))
            }
            Some(Tok::Op('+')) => {
                self.i += 1;
                self.unary()
            }
            Some(Tok::Num(v)) => {
                self.i += 1;
                // implicit product: 2eps
                if let Some(Tok::Eps) = self.peek() {
                    self.i += 1;
                    return Ok((Q::zero(), v));
                }
                Ok((v, Q::zero()))
            }
            Some(Tok::Eps) => {
                self.i += 1;
                Ok((Q::zero(), Q::one()))
            }
            Some(Tok::Op('(')) => {
                self.i += 1;
                let v = self.expr()?;
                if self.peek() != Some(&Tok::Op(')')) {
                    return Err(self.err("expected ')'"));
                }
                self.i += 1;
                Ok(v)
            }
            _ => Err(self.err("expected a number, eps or '('")),
        }
    }
}

fn parse_affine(s: &str, start: usize) -> Result<Affine, ReductionError> {
    let toks = tokenize(s, start)?;
    if toks.is_empty() {
        return Err(ReductionError::Parse {
            position: start,
            message: "empty coefficient".into(),
        });
    }
    let mut p = AffineParser {
        toks,
        i: 0,
        end: start + s.len(),
    };
    let v = p.expr()?;
    if p.i != p.toks.len() {
        return Err(p.err("trailing input"));
    }
    Ok(v)
}

/// `P2(x;k) = base(x) + k phi(x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct P2 {
    pub base: Poly<Surd>,
    pub phi: Poly<Q>,
}

impl P2 {
    pub fn at(&self, k: &Surd) -> Poly<Surd> {
        &self.base + &lift(&self.phi).scale(k)
    }
}

/// `P2(x;k) = (phi' - psi~)^2/4 - phi~ + k phi`.
pub fn build_p2(ghe: &GheProblem) -> P2 {
    let d = &ghe.phi.derivative() - &ghe.psi_tilde;
    let quarter = crate::poly::qf(1, 4);
    let sq = lift(&(&d * &d).scale(&quarter));
    P2 {
        base: &sq - &ghe.phi_tilde,
        phi: ghe.phi.clone(),
    }
}

/// All `k0` with vanishing discriminant of `P2(x;k0)`, the `+` root
/// (principal square root) first. A double root is listed twice.
pub fn solve_k0(ghe: &GheProblem) -> Result<Vec<Surd>, ReductionError> {
    let p2 = build_p2(ghe);
    let b: Vec<Surd> = (0..3).map(|i| p2.base.coeff(i)).collect();
    let f: Vec<Q> = (0..3).map(|i| ghe.phi.coeff(i)).collect();
    let fs: Vec<Surd> = f.iter().map(|c| Surd::from_q(c.clone())).collect();
    let four = Surd::from_int(4);
    // disc(k) = (b1 + k f1)^2 - 4 (b2 + k f2)(b0 + k f0) = A k^2 + B k + C
    let a_coef = &f[1] * &f[1] - q(4) * &f[2] * &f[0];
    let b_coef = &(&Surd::from_int(2) * &(&b[1] * &fs[1]))
        - &(&four * &(&(&b[2] * &fs[0]) + &(&b[0] * &fs[2])));
    let c_coef = &(&b[1] * &b[1]) - &(&four * &(&b[2] * &b[0]));
    if !a_coef.is_zero() {
        let a = Surd::from_q(a_coef.clone());
        let d = &(&b_coef * &b_coef) - &(&(&four * &a) * &c_coef);
        let sq = d.sqrt().ok_or(ReductionError::NoPerfectSquare)?;
        let two_a = Surd::from_q(q(2) * a_coef);
        let k1 = (&(-&b_coef) + &sq)
            .try_div(&two_a)
            .ok_or(ReductionError::NoPerfectSquare)?;
        let k2 = (&(-&b_coef) - &sq)
            .try_div(&two_a)
            .ok_or(ReductionError::NoPerfectSquare)?;
        return Ok(vec![k1, k2]);
    }
    if !b_coef.is_zero() {
        let k = (-&c_coef)
            .try_div(&b_coef)
            .ok_or(ReductionError::NoPerfectSquare)?;
        return Ok(vec![k]);
    }
    if !c_coef.is_zero() {
        return Err(ReductionError::NoPerfectSquare);
    }
    // P2 is free of x for every k: take the k that makes it vanish.
    if ghe.phi.degree() == Some(0) && b[1].is_zero() && b[2].is_zero() {
        let k = (-&b[0])
            .try_div(&fs[0])
            .ok_or(ReductionError::NoPerfectSquare)?;
        return Ok(vec![k]);
    }
    Err(ReductionError::Degenerate(
        "discriminant of P2 vanishes identically in k".into(),
    ))
}

/// `(x - root)^exponent`, evaluated as `|x - root|^exponent` for real roots.
#[derive(Clone, Debug, PartialEq)]
pub struct PowerTerm {
    pub root: Surd,
    pub exponent: Surd,
}

/// `exp(coefficient / (x - root))`.
#[derive(Clone, Debug, PartialEq)]
pub struct InvExpTerm {
    pub root: Surd,
    pub coefficient: Surd,
}

/// `prod |x - r_i|^{e_i} * exp(p(x)) * prod exp(c_j / (x - r_j))`, up to a
/// constant factor.
#[derive(Clone, Debug, PartialEq)]
pub struct FactorizedFunction {
    pub power_terms: Vec<PowerTerm>,
    pub exp_poly: Poly<Surd>,
    pub inv_exp_terms: Vec<InvExpTerm>,
}

impl FactorizedFunction {
    pub fn one() -> Self {
        FactorizedFunction {
            power_terms: Vec::new(),
            exp_poly: Poly::zero(),
            inv_exp_terms: Vec::new(),
        }
    }

    pub fn is_constant(&self) -> bool {
        self.power_terms.is_empty()
            && self.inv_exp_terms.is_empty()
            && self.exp_poly.degree().unwrap_or(0) == 0
    }

    /// Exponent attached to `root`, zero when absent.
    pub fn exponent_at(&self, root: &Surd) -> Surd {
        self.power_terms
            .iter()
            .find(|t| &t.root == root)
            .map(|t| t.exponent.clone())
            .unwrap_or_else(Surd::zero)
    }

    pub fn pow_int(&self, n: i64) -> Self {
        let k = Surd::from_int(n);
        FactorizedFunction {
            power_terms: self
                .power_terms
                .iter()
                .map(|t| PowerTerm {
                    root: t.root.clone(),
                    exponent: &t.exponent * &k,
                })
                .collect(),
            exp_poly: self.exp_poly.scale(&k),
            inv_exp_terms: self
                .inv_exp_terms
                .iter()
                .map(|t| InvExpTerm {
                    root: t.root.clone(),
                    coefficient: &t.coefficient * &k,
                })
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut power_terms = self.power_terms.clone();
        for t in &other.power_terms {
            match power_terms.iter_mut().find(|u| u.root == t.root) {
                Some(u) => u.exponent = &u.exponent + &t.exponent,
                None => power_terms.push(t.clone()),
            }
        }
        power_terms.retain(|t| !t.exponent.is_zero());
        let mut inv_exp_terms = self.inv_exp_terms.clone();
        for t in &other.inv_exp_terms {
            match inv_exp_terms.iter_mut().find(|u| u.root == t.root) {
                Some(u) => u.coefficient = &u.coefficient + &t.coefficient,
                None => inv_exp_terms.push(t.clone()),
            }
        }
        inv_exp_terms.retain(|t| !t.coefficient.is_zero());
        FactorizedFunction {
            power_terms,
            exp_poly: &self.exp_poly + &other.exp_poly,
            inv_exp_terms,
        }
    }

    /// Logarithm of the value (complex in general).
    pub fn log_eval(&self, x: f64, eps: f64) -> Complex64 {
        let mut acc = eval_poly(&self.exp_poly, x, eps);
        for t in &self.power_terms {
            let r = t.root.eval(eps);
            let e = t.exponent.eval(eps);
            let base = Complex64::new(x, 0.0) - r;
            let ln = if r.im.abs() < 1e-14 {
                Complex64::new(base.re.abs().ln(), 0.0)
            } else {
                base.ln()
            };
            acc += e * ln;
        }
        for t in &self.inv_exp_terms {
            let r = t.root.eval(eps);
            acc += t.coefficient.eval(eps) / (Complex64::new(x, 0.0) - r);
        }
        acc
    }

    pub fn eval(&self, x: f64, eps: f64) -> Complex64 {
        self.log_eval(x, eps).exp()
    }

    /// `f'/f` at `(x, eps)`.
    pub fn log_derivative(&self, x: f64, eps: f64) -> Complex64 {
        let mut acc = eval_poly(&self.exp_poly.derivative(), x, eps);
        for t in &self.power_terms {
            acc += t.exponent.eval(eps) / (Complex64::new(x, 0.0) - t.root.eval(eps));
        }
        for t in &self.inv_exp_terms {
            let d = Complex64::new(x, 0.0) - t.root.eval(eps);
            acc -= t.coefficient.eval(eps) / (d * d);
        }
        acc
    }

    /// Human-readable form in the variable `var`.
    pub fn render(&self, var: &str) -> String {
        let mut parts = Vec::new();
        for t in &self.power_terms {
            let base = render_base(&t.root, var);
            let e = t.exponent.render();
            let e = if e.chars().all(|c| c.is_ascii_digit()) {
                e
            } else {
                format!("({e})")
            };
            parts.push(format!("{base}^{e}"));
        }
        if !self.exp_poly.is_zero() {
            parts.push(format!("exp({})", render_poly(&self.exp_poly, var)));
        }
        for t in &self.inv_exp_terms {
            parts.push(format!(
                "exp(({})/({var} - ({})))",
                t.coefficient.render(),
                t.root.render()
            ));
        }
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join(" * ")
        }
    }
}

fn render_base(root: &Surd, var: &str) -> String {
    if root.is_zero() {
        return var.to_string();
    }
    let v = root.value();
    let r = root.render();
    if v.re > 0.0 {
        format!("({r} - {var})")
    } else if let Some(q) = root.as_q() {
        format!("({var} + {})", fmt_q(&-q))
    } else {
        format!("({var} - ({r}))")
    }
}

impl fmt::Display for FactorizedFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render("x"))
    }
}

fn div(a: &Surd, b: &Surd) -> Result<Surd, ReductionError> {
    a.try_div(b).ok_or(ReductionError::NoPerfectSquare)
}

/// Closed-form `f` with `f'/f = num/phi` by partial fractions.
pub fn integrate_log_derivative(
    num: &Poly<Surd>,
    phi: &Poly<Q>,
) -> Result<FactorizedFunction, ReductionError> {
    let mut out = FactorizedFunction::one();
    let n0 = num.coeff(0);
    let n1 = num.coeff(1);
    match phi.degree() {
        None => return Err(ReductionError::DegreeBound("phi is zero".into())),
        Some(0) => {
            let c = Surd::from_q(phi.coeff(0));
            let two_c = &c * &Surd::from_int(2);
            out.exp_poly = Poly::new(vec![Surd::zero(), div(&n0, &c)?, div(&n1, &two_c)?]);
        }
        Some(1) => {
            let f1 = Surd::from_q(phi.coeff(1));
            let root = Surd::from_q(-phi.coeff(0) / phi.coeff(1));
            out.exp_poly = Poly::new(vec![Surd::zero(), div(&n1, &f1)?]);
            let e = div(&num.eval(&root), &f1)?;
            if !e.is_zero() {
                out.power_terms.push(PowerTerm { root, exponent: e });
            }
        }
        Some(_) => {
            let f2 = Surd::from_q(phi.coeff(2));
            let roots = quad_roots(&lift(phi))?;
            if roots.len() == 1 {
                let r = roots[0].value.clone();
                let e = div(&n1, &f2)?;
                if !e.is_zero() {
                    out.power_terms.push(PowerTerm {
                        root: r.clone(),
                        exponent: e,
                    });
                }
                let c = -&div(&num.eval(&r), &f2)?;
                if !c.is_zero() {
                    out.inv_exp_terms.push(InvExpTerm {
                        root: r,
                        coefficient: c,
                    });
                }
            } else {
                let (r1, r2) = (roots[0].value.clone(), roots[1].value.clone());
                for (ri, rj) in [(&r1, &r2), (&r2, &r1)] {
                    let den = &f2 * &(ri - rj);
                    let e = div(&num.eval(ri), &den)?;
                    if !e.is_zero() {
                        out.power_terms.push(PowerTerm {
                            root: ri.clone(),
                            exponent: e,
                        });
                    }
                }
            }
        }
    }
    Ok(out)
}

/// `chi` with `chi'/chi = pi/phi`.
pub fn chi_from_pi(pi: &Poly<Surd>, phi: &Poly<Q>) -> Result<FactorizedFunction, ReductionError> {
    integrate_log_derivative(pi, phi)
}

/// Weight `omega` solving the Pearson equation `(phi omega)' = psi omega`.
pub fn pearson_weight(phi: &Poly<Q>, psi: &Poly<Surd>) -> Result<FactorizedFunction, ReductionError> {
    let num = psi - &lift(&phi.derivative());
    integrate_log_derivative(&num, phi)
}

/// `omega~` with `(phi omega~)' = psi~ omega~`; constant when `psi~ = phi'`.
pub fn weight_tilde(ghe: &GheProblem) -> Result<FactorizedFunction, ReductionError> {
    pearson_weight(&ghe.phi, &lift(&ghe.psi_tilde))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

/// One HDE produced by the reduction.
#[derive(Clone, Debug, PartialEq)]
pub struct NuBranch {
    /// `A`, `B`, ... in the order (k0 first, +), (k0 first, -), ...
    pub label: String,
    pub k0: Surd,
    pub sign: Sign,
    pub pi: Poly<Surd>,
    pub psi: Poly<Surd>,
    pub lambda: Surd,
    pub chi: FactorizedFunction,
    pub weight: FactorizedFunction,
    pub weight_tilde: FactorizedFunction,
    pub admissible: bool,
}

/// `lambda phi - (pi^2 + pi (psi~ - phi') + pi' phi + phi~)`.
pub fn key_identity_residual(ghe: &GheProblem, pi: &Poly<Surd>, lambda: &Surd) -> Poly<Surd> {
    let phi = lift(&ghe.phi);
    let dphi = lift(&ghe.phi.derivative());
    let psi_t = lift(&ghe.psi_tilde);
    let lhs = phi.scale(lambda);
    let rhs = &(&(&(pi * pi) + &(pi * &(&psi_t - &dphi))) + &phi.scale(&pi.coeff(1)))
        + &ghe.phi_tilde;
    &lhs - &rhs
}

/// `sqrt(P2)` as a polynomial of degree <= 1.
fn sqrt_p2(p: &Poly<Surd>) -> Result<Poly<Surd>, ReductionError> {
    let (p2, p1, p0) = (p.coeff(2), p.coeff(1), p.coeff(0));
    let root = if p2.is_zero() {
        if !p1.is_zero() {
            return Err(ReductionError::NoPerfectSquare);
        }
        Poly::constant(p0.sqrt().ok_or(ReductionError::NoPerfectSquare)?)
    } else {
        let alpha = p2.sqrt().ok_or(ReductionError::NoPerfectSquare)?;
        let beta = if p1.is_zero() {
            p0.sqrt().ok_or(ReductionError::NoPerfectSquare)?
        } else {
            match p1.try_div(&(&alpha * &Surd::from_int(2))) {
                Some(b) => b,
                None => {
                    let b = p0.sqrt().ok_or(ReductionError::NoPerfectSquare)?;
                    let two_ab = &(&alpha * &b) * &Surd::from_int(2);
                    if two_ab == p1 {
                        b
                    } else {
                        -b
                    }
                }
            }
        };
        Poly::linear(beta, alpha)
    };
    if &(&root * &root) != p {
        return Err(ReductionError::NoPerfectSquare);
    }
    Ok(root)
}

/// All HDE candidates, with the key identity verified exactly.
pub fn branch_candidates(ghe: &GheProblem) -> Result<Vec<NuBranch>, ReductionError> {
    let ks = solve_k0(ghe)?;
    let p2 = build_p2(ghe);
    let half = Surd::from_q(crate::poly::qf(1, 2));
    let shift = lift(&(&ghe.phi.derivative() - &ghe.psi_tilde)).scale(&half);
    let psi_t = lift(&ghe.psi_tilde);
    let w_tilde = weight_tilde(ghe)?;
    let mut out: Vec<NuBranch> = Vec::new();
    for (i, k) in ks.iter().enumerate() {
        if ks[..i].contains(k) {
            continue;
        }
        let root = sqrt_p2(&p2.at(k))?;
        for sign in [Sign::Plus, Sign::Minus] {
            let pi = match sign {
                Sign::Plus => &shift + &root,
                Sign::Minus => &shift - &root,
            };
            let psi = &psi_t + &pi.scale(&Surd::from_int(2));
            let lambda = k + &pi.coeff(1);
            let label = ((b'A' + out.len() as u8) as char).to_string();
            if !key_identity_residual(ghe, &pi, &lambda).is_zero() {
                return Err(ReductionError::IdentityFailed(label));
            }
            let chi = chi_from_pi(&pi, &ghe.phi)?;
            let weight = pearson_weight(&ghe.phi, &psi)?;
            out.push(NuBranch {
                label,
                k0: k.clone(),
                sign,
                pi,
                psi,
                lambda,
                chi,
                weight,
                weight_tilde: w_tilde.clone(),
                admissible: false,
            });
        }
    }
    Ok(out)
}

/// Result of testing one branch against the selection criterion.
#[derive(Clone, Debug, PartialEq)]
pub struct BranchVerdict {
    pub label: String,
    pub admissible: bool,
    pub reason: String,
}

/// Tests `psi' < 0` and `psi(x*) = 0` for some `x*` inside the interval at
/// every probe energy where the coefficients of `psi` are real.
pub fn branch_verdict(branch: &NuBranch, interval: &Interval, probes: &[f64]) -> BranchVerdict {
    let mut checked = 0;
    for &eps in probes {
        let p1 = branch.psi.coeff(1).eval(eps);
        let p0 = branch.psi.coeff(0).eval(eps);
        let real = p1.im.abs() <= 1e-12 * p1.re.abs().max(1.0)
            && p0.im.abs() <= 1e-12 * p0.re.abs().max(1.0);
        if !real {
            continue;
        }
        checked += 1;
        if p1.re >= 0.0 {
            return BranchVerdict {
                label: branch.label.clone(),
                admissible: false,
                reason: format!("psi' = {} >= 0 at eps = {eps}", p1.re),
            };
        }
        let root = -p0.re / p1.re;
        if !interval.contains(root) {
            return BranchVerdict {
                label: branch.label.clone(),
                admissible: false,
                reason: format!("psi root {root} outside {interval} at eps = {eps}"),
            };
        }
    }
    if checked == 0 {
        return BranchVerdict {
            label: branch.label.clone(),
            admissible: false,
            reason: "psi not real at any probe energy".into(),
        };
    }
    BranchVerdict {
        label: branch.label.clone(),
        admissible: true,
        reason: format!("psi' < 0 and psi root inside {interval} at {checked} probe energies"),
    }
}

/// The unique admissible branch, with `admissible` set.
pub fn select_branch(
    branches: &[NuBranch],
    interval: &Interval,
    probes: &[f64],
) -> Result<NuBranch, ReductionError> {
    let winners: Vec<&NuBranch> = branches
        .iter()
        .filter(|b| branch_verdict(b, interval, probes).admissible)
        .collect();
    match winners.as_slice() {
        [] => Err(ReductionError::NoAdmissibleBranch),
        [one] => {
            let mut b = (*one).clone();
            b.admissible = true;
            Ok(b)
        }
        many => Err(ReductionError::AmbiguousBranch(
            many.iter().map(|b| b.label.clone()).collect(),
        )),
    }
}

/// Whether the finiteness estimate applies: `omega~` constant and `tau'`
/// bounded (declared per potential).
pub fn corollary_applicable(branch: &NuBranch, tau_prime_bounded: bool) -> bool {
    branch.weight_tilde.is_constant() && tau_prime_bounded
}

/// Default probe energies for text input: a spread of real values.
pub const DEFAULT_PROBES: [f64; 8] = [-4.0, -1.0, -0.25, 0.25, 1.0, 2.0, 4.0, 8.0];

/// Full reduction report: every branch and the selected one.
#[derive(Clone, Debug)]
pub struct Reduction {
    pub ghe: GheProblem,
    pub k0: Vec<Surd>,
    pub branches: Vec<NuBranch>,
    pub verdicts: Vec<BranchVerdict>,
    pub selected: Result<NuBranch, ReductionError>,
}

pub fn reduce(ghe: &GheProblem, probes: &[f64]) -> Result<Reduction, ReductionError> {
    let k0 = solve_k0(ghe)?;
    let branches = branch_candidates(ghe)?;
    let verdicts = branches
        .iter()
        .map(|b| branch_verdict(b, &ghe.interval, probes))
        .collect();
    let selected = select_branch(&branches, &ghe.interval, probes);
    Ok(Reduction {
        ghe: ghe.clone(),
        k0,
        branches,
        verdicts,
        selected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::qf;

    fn harmonic() -> GheProblem {
        GheProblem::parse("phi=1 psi_tilde=0 phi_tilde=eps,0,-1 interval=-inf,inf").unwrap()
    }

    fn morse(lambda: i64) -> GheProblem {
        let l2 = lambda * lambda;
        GheProblem::parse(&format!(
            "phi=0,1 psi_tilde=1 phi_tilde=eps-{l2},{lambda},-1/4 interval=0,inf"
        ))
        .unwrap()
    }

    fn kappa(c: i64) -> Surd {
        Surd::sqrt_of_poly(&Poly::linear(q(c), q(-1)))
    }

    #[test]
    fn parser_reads_affine_coefficients() {
        let g = GheProblem::parse("phi=1 psi_tilde=0 phi_tilde=2*eps-1/2,0.25,(eps+1)*3").unwrap();
        assert_eq!(
            g.phi_tilde.coeff(0),
            Surd::from_poly(Poly::linear(qf(-1, 2), q(2)))
        );
        assert_eq!(g.phi_tilde.coeff(1), Surd::from_q(qf(1, 4)));
        assert_eq!(g.phi_tilde.coeff(2), Surd::from_poly(Poly::linear(q(3), q(3))));
        assert_eq!(g.interval, Interval::real_line());
    }

    #[test]
    fn parser_reports_positions() {
        let err = GheProblem::parse("phi=1 psi_tilde=eps phi_tilde=0").unwrap_err();
        assert!(matches!(err, ReductionError::Parse { position: 16, .. }), "{err:?}");
        let err = GheProblem::parse("phi=1 psi_tilde=0 phi_tilde=3#").unwrap_err();
        assert!(matches!(err, ReductionError::Parse { position: 29, .. }), "{err:?}");
        assert!(GheProblem::parse("phi=1 psi_tilde=0").is_err());
        assert!(GheProblem::parse("phi=1 psi_tilde=0 phi_tilde=eps*eps").is_err());
    }

    #[test]
    fn text_round_trip() {
        let g = morse(5);
        assert_eq!(GheProblem::parse(&g.to_text()).unwrap(), g);
    }

    #[test]
    fn p2_examples() {
        let p = build_p2(&harmonic());
        let k = Surd::eps() + Surd::from_int(3);
        // s^2 - eps + k
        assert_eq!(p.at(&k), Poly::new(vec![Surd::from_int(3), Surd::zero(), Surd::one()]));

        let p = build_p2(&morse(5));
        let k = Surd::from_int(1);
        let want = Poly::new(vec![
            Surd::from_poly(Poly::linear(q(25), q(-1))),
            Surd::from_int(-4),
            Surd::from_q(qf(1, 4)),
        ]);
        assert_eq!(p.at(&k), want);
    }

    #[test]
    fn self_consistent_hde_gives_zero_p2() {
        // phi = 1 - x^2, psi~ = phi', phi~ = k phi with k = 3
        let g = GheProblem::parse("phi=1,0,-1 psi_tilde=0,-2 phi_tilde=3,0,-3 interval=-1,1").unwrap();
        let p = build_p2(&g);
        assert!(p.at(&Surd::from_int(3)).is_zero());
    }

    #[test]
    fn k0_examples() {
        assert_eq!(solve_k0(&harmonic()).unwrap(), vec![Surd::eps()]);
        let ks = solve_k0(&morse(5)).unwrap();
        assert_eq!(ks[0], &Surd::from_int(5) + &kappa(25));
        assert_eq!(ks[1], &Surd::from_int(5) - &kappa(25));
    }

    #[test]
    fn harmonic_branches_and_selection() {
        let g = harmonic();
        let bs = branch_candidates(&g).unwrap();
        assert_eq!(bs.len(), 2);
        let s = Poly::x();
        assert_eq!(bs[0].pi, s);
        assert_eq!(bs[1].pi, -&s);
        assert_eq!(bs[1].lambda, &Surd::eps() - &Surd::one());
        let sel = select_branch(&bs, &g.interval, &DEFAULT_PROBES).unwrap();
        assert_eq!(sel.label, "B");
        assert!(sel.admissible);
        assert_eq!(sel.chi.exp_poly, Poly::new(vec![Surd::zero(), Surd::zero(), Surd::from_q(qf(-1, 2))]));
        assert_eq!(sel.weight.render("s"), "exp(-s^2)");
        assert!(corollary_applicable(&sel, true));
    }

    #[test]
    fn morse_case_d() {
        let g = morse(5);
        let bs = branch_candidates(&g).unwrap();
        assert_eq!(bs.len(), 4);
        let sel = select_branch(&bs, &g.interval, &[1.0, 10.0, 20.0, 24.0]).unwrap();
        assert_eq!(sel.label, "D");
        let k = kappa(25);
        let want_psi = Poly::new(vec![&Surd::one() + &(&Surd::from_int(2) * &k), Surd::from_int(-1)]);
        assert_eq!(sel.psi, want_psi);
        assert_eq!(sel.chi.exponent_at(&Surd::zero()), k);
        assert_eq!(sel.chi.render("s"), "s^(sqrt(25 - eps)) * exp(-1/2*s)");
        assert!(sel.weight_tilde.is_constant());
        assert!(!corollary_applicable(&sel, false));
    }

    #[test]
    fn rosen_morse_case_d() {
        // C = 4, T = 1/4: v- = 9/4, v+ = 25/4
        let g = GheProblem::parse("phi=1,0,-1 psi_tilde=0,-2 phi_tilde=eps-1/4,2,-4 interval=-1,1").unwrap();
        let bs = branch_candidates(&g).unwrap();
        assert_eq!(bs.len(), 4);
        // the interchange branch B also passes once kappa- < 1
        assert_eq!(
            select_branch(&bs, &g.interval, &[1.5, 2.0]).unwrap_err(),
            ReductionError::AmbiguousBranch(vec!["B".into(), "D".into()])
        );
        let sel = select_branch(&bs, &g.interval, &[0.2, 1.0, 2.0]).unwrap();
        assert_eq!(sel.label, "D");
        let kq = |c: Q| Surd::sqrt_of_poly(&Poly::linear(c, q(-1)));
        let (kp, km) = (kq(qf(25, 4)), kq(qf(9, 4)));
        let half = Surd::from_q(qf(1, 2));
        let a = &half * &(&kp - &km);
        let b = &half * &(&kp + &km);
        assert_eq!(sel.pi, Poly::linear(a.clone(), -&b));
        let two = Surd::from_int(2);
        assert_eq!(sel.psi, Poly::linear(&two * &a, -&(&two * &(&b + &Surd::one()))));
        // v0 = C(1 - T^2) = 15/4
        let k = &half * &(&(&Surd::eps() + &Surd::from_q(qf(15, 4))) - &(&kp * &km));
        assert_eq!(sel.k0, k);
        assert_eq!(sel.weight, sel.chi.pow_int(2));
        assert_eq!(sel.weight.exponent_at(&Surd::one()), km);
        assert_eq!(sel.weight.exponent_at(&Surd::from_int(-1)), kp);
        assert!(sel.weight_tilde.is_constant());
    }

    #[test]
    fn no_admissible_branch() {
        let g = harmonic();
        let mut bs = branch_candidates(&g).unwrap();
        bs.truncate(1);
        assert_eq!(
            select_branch(&bs, &g.interval, &DEFAULT_PROBES).unwrap_err(),
            ReductionError::NoAdmissibleBranch
        );
    }

    #[test]
    fn chi_and_weight_satisfy_their_equations() {
        let g = morse(5);
        for b in branch_candidates(&g).unwrap() {
            for &eps in &[3.0, 11.0] {
                for i in 1..=20 {
                    let x = 0.3 * i as f64;
                    let lhs = b.chi.log_derivative(x, eps);
                    let rhs = eval_poly(&b.pi, x, eps) / x;
                    assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm().max(1.0));
                    // (phi w)'/(phi w) = psi/phi
                    let lw = b.weight.log_derivative(x, eps) + 1.0 / x;
                    let rw = eval_poly(&b.psi, x, eps) / x;
                    assert!((lw - rw).norm() <= 1e-12 * rw.norm().max(1.0));
                    // omega = omega~ chi^2 with matching constants
                    let w = b.weight.eval(x, eps);
                    let c2 = b.chi.eval(x, eps).powi(2) * b.weight_tilde.eval(x, eps);
                    assert!((w - c2).norm() <= 1e-12 * w.norm());
                }
            }
        }
    }

    #[test]
    fn double_root_phi_gives_inverse_exponential() {
        let pi = Poly::linear(Surd::from_int(1), Surd::from_int(2));
        let phi = Poly::new(vec![q(0), q(0), q(1)]);
        let chi = chi_from_pi(&pi, &phi).unwrap();
        assert_eq!(chi.inv_exp_terms.len(), 1);
        for x in [0.5, 1.5, 3.0] {
            let lhs = chi.log_derivative(x, 0.0);
            let rhs = (1.0 + 2.0 * x) / (x * x);
            assert!((lhs.re - rhs).abs() < 1e-12);
        }
    }

    #[test]
    fn no_perfect_square_is_reported() {
        // P2 = k - x is never a square
        let g = GheProblem::parse("phi=1 psi_tilde=0 phi_tilde=0,1").unwrap();
        assert_eq!(solve_k0(&g).unwrap_err(), ReductionError::NoPerfectSquare);
        // phi = x: k = eps leaves P2 = 1/4
        let g = GheProblem::parse("phi=0,1 psi_tilde=0 phi_tilde=0,eps interval=0,inf").unwrap();
        assert_eq!(solve_k0(&g).unwrap(), vec![Surd::eps(), Surd::eps()]);
        assert_eq!(branch_candidates(&g).unwrap().len(), 2);
    }
}
