//! Canonical Jacobi, Laguerre and Hermite equations: classification of a
//! hypergeometric-type equation, Rodrigues polynomials, eigenvalues, weights
//! and norms.
//!
//! Polynomials use the standard normalizations: `H_n` has leading
//! coefficient `2^n`, `L_n^a` has `(-1)^n / n!`, and `P_n^(a,b)` has
//! `(n+a+b+1)_n / (2^n n!)`.

use std::fmt;

use num_traits::Zero;

use crate::error::{ClassicalError, OracleError};
use crate::hyper::gamma::lgamma;
use crate::oracle::{exp_sinh, tanh_sinh};
use crate::poly::{lift, quad_discriminant, quad_roots, Interval, Poly, Scalar, Q};
use crate::surd::Surd;

use num_complex::Complex64;

/// Largest degree generated by default.
pub const MAX_DEGREE: usize = 30;

#[derive(Clone, Debug, PartialEq)]
pub enum Family<T> {
    Jacobi { alpha: T, beta: T },
    Laguerre { alpha: T },
    Hermite,
}

impl<T> Family<T> {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Jacobi { .. } => "jacobi",
            Family::Laguerre { .. } => "laguerre",
            Family::Hermite => "hermite",
        }
    }

    pub fn interval(&self) -> Interval {
        match self {
            Family::Jacobi { .. } => Interval { lo: -1.0, hi: 1.0 },
            Family::Laguerre { .. } => Interval {
                lo: 0.0,
                hi: f64::INFINITY,
            },
            Family::Hermite => Interval::real_line(),
        }
    }

    pub fn map<U>(&self, f: impl Fn(&T) -> U) -> Family<U> {
        match self {
            Family::Jacobi { alpha, beta } => Family::Jacobi {
                alpha: f(alpha),
                beta: f(beta),
            },
            Family::Laguerre { alpha } => Family::Laguerre { alpha: f(alpha) },
            Family::Hermite => Family::Hermite,
        }
    }
}

impl<T: Scalar> Family<T> {
    /// Canonical `phi`.
    pub fn phi(&self) -> Poly<T> {
        let i = T::from_int;
        match self {
            Family::Jacobi { .. } => Poly::new(vec![i(1), i(0), i(-1)]),
            Family::Laguerre { .. } => Poly::x(),
            Family::Hermite => Poly::constant(i(1)),
        }
    }

    /// Canonical `psi`.
    pub fn psi(&self) -> Poly<T> {
        let i = T::from_int;
        match self {
            Family::Jacobi { alpha, beta } => Poly::linear(
                beta.clone() - alpha.clone(),
                -(alpha.clone() + beta.clone() + i(2)),
            ),
            Family::Laguerre { alpha } => Poly::linear(alpha.clone() + i(1), i(-1)),
            Family::Hermite => Poly::linear(i(0), i(-2)),
        }
    }
}

impl<T: fmt::Display> fmt::Display for Family<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Jacobi { alpha, beta } => write!(f, "Jacobi(alpha = {alpha}, beta = {beta})"),
            Family::Laguerre { alpha } => write!(f, "Laguerre(alpha = {alpha})"),
            Family::Hermite => write!(f, "Hermite"),
        }
    }
}

impl Family<Surd> {
    /// Numeric parameters at an energy, checked against `> -1`.
    pub fn at(&self, eps: f64) -> Result<Family<f64>, ClassicalError> {
        let real = |name: &'static str, s: &Surd| -> Result<f64, ClassicalError> {
            let v = s
                .eval_real(eps)
                .ok_or(ClassicalError::NotRepresentable("complex family parameter"))?;
            if !(v > -1.0) {
                return Err(ClassicalError::ParameterOutOfRange { name, value: v });
            }
            Ok(v)
        };
        Ok(match self {
            Family::Jacobi { alpha, beta } => Family::Jacobi {
                alpha: real("alpha", alpha)?,
                beta: real("beta", beta)?,
            },
            Family::Laguerre { alpha } => Family::Laguerre {
                alpha: real("alpha", alpha)?,
            },
            Family::Hermite => Family::Hermite,
        })
    }

    /// Rational parameters, when every parameter is rational.
    pub fn exact(&self) -> Option<Family<Q>> {
        Some(match self {
            Family::Jacobi { alpha, beta } => Family::Jacobi {
                alpha: alpha.as_q()?,
                beta: beta.as_q()?,
            },
            Family::Laguerre { alpha } => Family::Laguerre { alpha: alpha.as_q()? },
            Family::Hermite => Family::Hermite,
        })
    }
}

/// A hypergeometric-type equation matched to a row of the classical table.
#[derive(Clone, Debug, PartialEq)]
pub struct CanonicalHde {
    pub family: Family<Surd>,
    /// The canonical variable is `x = scale * s + shift`.
    pub scale: Surd,
    pub shift: Surd,
    pub interval: Interval,
    pub working_interval: Interval,
    pub phi: Poly<Q>,
    pub psi: Poly<Surd>,
}

impl CanonicalHde {
    /// `-n (psi' + (n-1)/2 phi'')` for the working equation.
    pub fn lambda_working(&self, n: usize) -> Surd {
        general_lambda(&lift(&self.phi), &self.psi, n)
    }

    pub fn to_canonical(&self, s: f64, eps: f64) -> Option<f64> {
        Some(self.scale.eval_real(eps)? * s + self.shift.eval_real(eps)?)
    }

    /// Checks parameter ranges and that the working interval maps onto the
    /// canonical one at `eps`.
    pub fn validate(&self, eps: f64) -> Result<Family<f64>, ClassicalError> {
        let fam = self.family.at(eps)?;
        let a = self
            .scale
            .eval_real(eps)
            .ok_or(ClassicalError::NotRepresentable("complex scale"))?;
        let b = self
            .shift
            .eval_real(eps)
            .ok_or(ClassicalError::NotRepresentable("complex shift"))?;
        let (x1, x2) = (a * self.working_interval.lo + b, a * self.working_interval.hi + b);
        let (lo, hi) = if x1 < x2 { (x1, x2) } else { (x2, x1) };
        let same = |u: f64, v: f64| u == v || (u - v).abs() <= 1e-9 * u.abs().max(1.0);
        if !(same(lo, self.interval.lo) && same(hi, self.interval.hi)) {
            return Err(ClassicalError::IntervalMismatch {
                expected: self.interval.to_string(),
                got: format!("{}", Interval { lo, hi }),
            });
        }
        Ok(fam)
    }

    fn eps_free(&self) -> bool {
        let params = match &self.family {
            Family::Jacobi { alpha, beta } => alpha.is_eps_free() && beta.is_eps_free(),
            Family::Laguerre { alpha } => alpha.is_eps_free(),
            Family::Hermite => true,
        };
        params && self.scale.is_eps_free() && self.shift.is_eps_free()
    }
}

/// `-n (psi' + (n-1)/2 phi'')`.
pub fn general_lambda<T: Scalar>(phi: &Poly<T>, psi: &Poly<T>, n: usize) -> T {
    let n_t = T::from_int(n as i64);
    let nm1 = T::from_int(n as i64 - 1);
    -(n_t * (psi.coeff(1) + nm1 * phi.coeff(2)))
}

fn div<T: Scalar>(a: &T, b: &T, what: &'static str) -> Result<T, ClassicalError> {
    a.checked_div(b).ok_or(ClassicalError::NotRepresentable(what))
}

/// Matches `(phi, psi)` on `interval` to a classical family by an affine
/// change of variable.
///
/// Range checks run immediately when nothing depends on the energy;
/// otherwise they are deferred to [`CanonicalHde::validate`].
pub fn classify_canonical(phi: &Poly<Q>, psi: &Poly<Surd>, interval: Interval) -> Result<CanonicalHde, ClassicalError> {
    if psi.degree() != Some(1) {
        return Err(ClassicalError::DegeneratePsi);
    }
    let two = Surd::from_int(2);
    let psi1 = psi.coeff(1);
    let phi_s = lift(phi);
    let (family, scale, shift) = match phi.degree() {
        None => return Err(ClassicalError::NotRepresentable("phi is identically zero")),
        Some(0) => {
            // x = a s + b with a^2 = -psi1 / (2 phi0)
            let phi0 = phi_s.coeff(0);
            let a2 = div(&-psi1.clone(), &(two.clone() * phi0.clone()), "Hermite scale")?;
            if a2.is_eps_free() && !(a2.value().re > 0.0) {
                return Err(ClassicalError::NotPositiveDefinite(format!(
                    "psi' / phi = {} must be negative",
                    -2.0 * a2.value().re
                )));
            }
            let mut a = a2.sqrt().ok_or(ClassicalError::NotRepresentable("Hermite scale"))?;
            if a.is_eps_free() && a.value().re < 0.0 {
                a = -a;
            }
            let b = div(&-psi.coeff(0), &(two.clone() * phi0 * a.clone()), "Hermite shift")?;
            (Family::Hermite, a, b)
        }
        Some(1) => {
            let (phi0, phi1) = (phi_s.coeff(0), phi_s.coeff(1));
            let s0 = div(&-phi0, &phi1, "phi root")?;
            let a = div(&-psi1, &phi1, "Laguerre scale")?;
            let alpha = div(&psi.eval(&s0), &phi1, "Laguerre alpha")? - Surd::from_int(1);
            let shift = -(a.clone() * s0);
            (Family::Laguerre { alpha }, a, shift)
        }
        Some(2) => {
            let disc = quad_discriminant(phi).map_err(|_| ClassicalError::NotRepresentable("phi"))?;
            if disc.is_zero() {
                return Err(ClassicalError::DoubleRootUnsupported);
            }
            if disc < Q::zero() {
                return Err(ClassicalError::ComplexRoots);
            }
            let mut roots = quad_roots(&phi_s).map_err(|_| ClassicalError::NotRepresentable("phi roots"))?;
            roots.sort_by(|u, v| u.value.value().re.total_cmp(&v.value.value().re));
            let (r1, r2) = (roots[0].value.clone(), roots[1].value.clone());
            let phi2 = phi_s.coeff(2);
            let width = r2.clone() - r1.clone();
            let mid = div(&(r1 + r2), &two, "phi midpoint")?;
            // alpha + beta + 2 = psi1 / phi2, beta - alpha = -2 psi(mid) / (phi2 width)
            let sum = div(&psi1, &phi2, "Jacobi alpha + beta")? - two.clone();
            let diff = div(
                &-(two.clone() * psi.eval(&mid)),
                &(phi2 * width.clone()),
                "Jacobi beta - alpha",
            )?;
            let alpha = div(&(sum.clone() - diff.clone()), &two, "Jacobi alpha")?;
            let beta = div(&(sum + diff), &two, "Jacobi beta")?;
            let a = div(&two, &width, "Jacobi scale")?;
            let shift = -(a.clone() * mid);
            (Family::Jacobi { alpha, beta }, a, shift)
        }
        Some(_) => return Err(ClassicalError::NotRepresentable("phi of degree above 2")),
    };
    let hde = CanonicalHde {
        interval: family.interval(),
        family,
        scale,
        shift,
        working_interval: interval,
        phi: phi.clone(),
        psi: psi.clone(),
    };
    if hde.eps_free() {
        hde.validate(0.0)?;
    }
    Ok(hde)
}

/// Canonical eigenvalue `lambda_n` of the table row.
pub fn lambda_n<T: Scalar>(family: &Family<T>, n: usize) -> T {
    let n_t = T::from_int(n as i64);
    match family {
        Family::Jacobi { alpha, beta } => n_t.clone() * (n_t + alpha.clone() + beta.clone() + T::from_int(1)),
        Family::Laguerre { .. } => n_t,
        Family::Hermite => T::from_int(2) * n_t,
    }
}

/// `c_n`, the constant `n`-th derivative of `P_n`.
pub fn c_n<T: Scalar>(family: &Family<T>, n: usize) -> Result<T, ClassicalError> {
    Ok(match family {
        Family::Jacobi { alpha, beta } => {
            // (n + a + b + 1)_n / 2^n
            let base = T::from_int(n as i64 + 1) + alpha.clone() + beta.clone();
            let mut p = T::from_int(1);
            for k in 0..n {
                p = p * (base.clone() + T::from_int(k as i64)) * div(&T::from_int(1), &T::from_int(2), "c_n")?;
            }
            p
        }
        Family::Laguerre { .. } => T::from_int(if n % 2 == 0 { 1 } else { -1 }),
        Family::Hermite => (1..=n as i64).fold(T::from_int(1), |acc, k| acc * T::from_int(2 * k)),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrthoPoly<T> {
    pub family: Family<T>,
    pub n: usize,
    pub coeffs: Poly<T>,
}

impl OrthoPoly<f64> {
    /// Value at `x` from the three-term recurrence, rescaled to this
    /// polynomial's leading coefficient. Stable where Horner on the
    /// monomial coefficients cancels (high degree, large `|x|`).
    pub fn eval(&self, x: f64) -> f64 {
        let (v, lead) = recurrence_value(&self.family, self.n, x);
        v * (self.coeffs.coeff(self.n) / lead)
    }
}

/// `p_n(x)` in the standard normalization (`H_n`, `L_n^(alpha)`,
/// `P_n^(alpha, beta)`) by the three-term recurrence, with no degree cap.
pub fn eval_standard(family: &Family<f64>, n: usize, x: f64) -> f64 {
    recurrence_value(family, n, x).0
}

/// `(p_n(x), leading coefficient of p_n)` for the standard normalization.
fn recurrence_value(family: &Family<f64>, n: usize, x: f64) -> (f64, f64) {
    let (p1, k1) = match *family {
        Family::Hermite => (2.0 * x, 2.0),
        Family::Laguerre { alpha } => (alpha + 1.0 - x, -1.0),
        Family::Jacobi { alpha, beta } => {
            let slope = 0.5 * (alpha + beta + 2.0);
            (alpha + 1.0 + slope * (x - 1.0), slope)
        }
    };
    if n == 0 {
        return (1.0, 1.0);
    }
    let (mut prev, mut cur, mut lead) = (1.0, p1, k1);
    for m in 1..n {
        let mf = m as f64;
        // p_(m+1) = (a x + b) p_m - c p_(m-1)
        let (a, b, c) = match *family {
            Family::Hermite => (2.0, 0.0, 2.0 * mf),
            Family::Laguerre { alpha } => {
                let d = mf + 1.0;
                (-1.0 / d, (2.0 * mf + 1.0 + alpha) / d, (mf + alpha) / d)
            }
            Family::Jacobi { alpha, beta } => {
                let t = 2.0 * mf + alpha + beta;
                let den = 2.0 * (mf + 1.0) * (mf + alpha + beta + 1.0) * t;
                let c1 = (t + 1.0) / den;
                (
                    c1 * (t + 2.0) * t,
                    c1 * (alpha * alpha - beta * beta),
                    2.0 * (mf + alpha) * (mf + beta) * (t + 2.0) / den,
                )
            }
        };
        let next = (a * x + b) * cur - c * prev;
        prev = cur;
        cur = next;
        lead *= a;
    }
    (cur, lead)
}

/// Rodrigues polynomial with the default degree cap.
pub fn rodrigues_poly<T: Scalar>(family: &Family<T>, n: usize) -> Result<OrthoPoly<T>, ClassicalError> {
    rodrigues_poly_max(family, n, MAX_DEGREE)
}

/// `P_n = (B_n / omega) d^n (phi^n omega) / dx^n`.
///
/// `d^k (phi^n omega) = phi^(n-k) omega Q_k` with `Q_0 = 1` and, using the
/// Pearson equation, `Q_(k+1) = ((n-k-1) phi' + psi) Q_k + phi Q_k'`; the
/// weight itself is never expanded. `B_n = c_n / A_nn` with
/// `A_nn = (-1)^n prod_(k<n) (lambda_n - lambda_k)`.
pub fn rodrigues_poly_max<T: Scalar>(family: &Family<T>, n: usize, max: usize) -> Result<OrthoPoly<T>, ClassicalError> {
    if n > max {
        return Err(ClassicalError::DegreeTooLarge { n, max });
    }
    let (phi, psi) = (family.phi(), family.psi());
    let dphi = phi.derivative();
    let mut qk = Poly::constant(T::from_int(1));
    for k in 0..n {
        let factor = &dphi.scale(&T::from_int((n - k) as i64 - 1)) + &psi;
        qk = &(&factor * &qk) + &(&phi * &qk.derivative());
    }
    let b_n = div(&c_n(family, n)?, &a_nn(&phi, &psi, n), "B_n")?;
    Ok(OrthoPoly {
        family: family.clone(),
        n,
        coeffs: qk.scale(&b_n),
    })
}

/// `A_nn = (-1)^n prod_(k<n) mu_nk`, `mu_nk = lambda_n - lambda_k`.
pub fn a_nn<T: Scalar>(phi: &Poly<T>, psi: &Poly<T>, n: usize) -> T {
    let ln = general_lambda(phi, psi, n);
    let mut a = T::from_int(1);
    for k in 0..n {
        a = -(a * (ln.clone() - general_lambda(phi, psi, k)));
    }
    a
}

/// Standard three-term recurrences; an oracle independent of the Rodrigues
/// construction.
pub fn recurrence_poly<T: Scalar>(family: &Family<T>, n: usize) -> Result<OrthoPoly<T>, ClassicalError> {
    let i = T::from_int;
    let x = Poly::<T>::x();
    let p0 = Poly::constant(i(1));
    let p1 = match family {
        Family::Hermite => x.scale(&i(2)),
        Family::Laguerre { alpha } => Poly::linear(alpha.clone() + i(1), i(-1)),
        Family::Jacobi { alpha, beta } => {
            // (a + 1) + (a + b + 2)(x - 1)/2
            let half = div(&i(1), &i(2), "recurrence")?;
            let slope = (alpha.clone() + beta.clone() + i(2)) * half;
            Poly::linear(alpha.clone() + i(1) - slope.clone(), slope)
        }
    };
    let (mut prev, mut cur) = (p0, p1);
    if n == 0 {
        cur = prev.clone();
    }
    for m in 1..n.max(1) {
        let mt = i(m as i64);
        let next = match family {
            Family::Hermite => &(&x * &cur).scale(&i(2)) - &prev.scale(&(i(2) * mt)),
            Family::Laguerre { alpha } => {
                // (m+1) L_(m+1) = (2m+1+a-x) L_m - (m+a) L_(m-1)
                let lin = Poly::linear(i(2 * m as i64 + 1) + alpha.clone(), i(-1));
                let num = &(&lin * &cur) - &prev.scale(&(mt + alpha.clone()));
                num.scale(&div(&i(1), &i(m as i64 + 1), "recurrence")?)
            }
            Family::Jacobi { alpha, beta } => {
                let (a, b) = (alpha.clone(), beta.clone());
                let s = a.clone() + b.clone();
                let two_m_s = i(2 * m as i64) + s.clone();
                let den = i(2 * (m as i64 + 1)) * (mt.clone() + s.clone() + i(1)) * two_m_s.clone();
                let c1 = two_m_s.clone() + i(1);
                let lin = Poly::linear(
                    a.clone() * a.clone() - b.clone() * b.clone(),
                    (two_m_s.clone() + i(2)) * two_m_s.clone(),
                );
                let c2 = i(2) * (mt.clone() + a) * (mt + b) * (two_m_s + i(2));
                let num = &(&lin * &cur).scale(&c1) - &prev.scale(&c2);
                num.scale(&div(&i(1), &den, "recurrence")?)
            }
        };
        prev = cur;
        cur = next;
    }
    Ok(OrthoPoly {
        family: family.clone(),
        n,
        coeffs: cur,
    })
}

/// Table weight `omega(x)`.
pub fn weight(family: &Family<f64>, x: f64) -> f64 {
    match family {
        Family::Jacobi { alpha, beta } => (1.0 - x).powf(*alpha) * (1.0 + x).powf(*beta),
        Family::Laguerre { alpha } => x.powf(*alpha) * (-x).exp(),
        Family::Hermite => (-x * x).exp(),
    }
}

fn lgamma_real(x: f64) -> f64 {
    lgamma(Complex64::new(x, 0.0)).re
}

/// Closed-form `d_n^2 = int P_n^2 omega`.
pub fn norm_sq(family: &Family<f64>, n: usize) -> f64 {
    let nf = n as f64;
    let ln_fact = lgamma_real(nf + 1.0);
    match family {
        Family::Jacobi { alpha, beta } => {
            let s = alpha + beta;
            // (2n+s+1) Gamma(n+s+1), rewritten at n = 0 to avoid 0 * inf
            let ln_den = if n == 0 {
                lgamma_real(s + 2.0)
            } else {
                (2.0 * nf + s + 1.0).ln() + lgamma_real(nf + s + 1.0)
            };
            ((s + 1.0) * 2f64.ln() + lgamma_real(nf + alpha + 1.0) + lgamma_real(nf + beta + 1.0) - ln_fact - ln_den).exp()
        }
        Family::Laguerre { alpha } => (lgamma_real(nf + alpha + 1.0) - ln_fact).exp(),
        Family::Hermite => (nf * 2f64.ln() + ln_fact).exp() * std::f64::consts::PI.sqrt(),
    }
}

/// `int_0^1 d^e g(d) dd` for `e > -1` and smooth `g`, as
/// `int d^e (g(d) - g(0)) + g(0)/(e+1)`; without the subtraction the
/// integrand decays too slowly for double-exponential rules when `e` is
/// close to -1.
fn endpoint_integral(g: impl Fn(f64) -> f64, e: f64, tol: f64) -> Result<f64, OracleError> {
    let g0 = g(0.0);
    let rest = tanh_sinh(|_, d, _| d.powf(e) * (g(d) - g0), 0.0, 1.0, tol)?.value;
    Ok(rest + g0 / (e + 1.0))
}

/// `int f omega` over the canonical interval by double-exponential
/// quadrature; `tol` is absolute.
pub fn weighted_integral(family: &Family<f64>, f: impl Fn(f64) -> f64, tol: f64) -> Result<f64, OracleError> {
    match *family {
        Family::Jacobi { alpha, beta } => {
            // halves at 0, each in the distance d to its singular end
            let left = endpoint_integral(|d| f(d - 1.0) * (2.0 - d).powf(alpha), beta, 0.5 * tol)?;
            let right = endpoint_integral(|d| f(1.0 - d) * (2.0 - d).powf(beta), alpha, 0.5 * tol)?;
            Ok(left + right)
        }
        Family::Laguerre { alpha } => {
            let head = endpoint_integral(|x| f(x) * (-x).exp(), alpha, 0.5 * tol)?;
            let tail = exp_sinh(|y| f(1.0 + y) * (1.0 + y).powf(alpha) * (-1.0 - y).exp(), 0.5 * tol)?.value;
            Ok(head + tail)
        }
        Family::Hermite => exp_sinh(|x| (f(x) + f(-x)) * (-x * x).exp(), tol).map(|r| r.value),
    }
}

/// `|int P_k P_k2 omega|` by quadrature.
pub fn orthogonality_defect(family: &Family<f64>, k: usize, k2: usize) -> Result<f64, ClassicalError> {
    let pk = rodrigues_poly(family, k)?.coeffs;
    let pk2 = rodrigues_poly(family, k2)?.coeffs;
    let tol = 1e-13 * (norm_sq(family, k) * norm_sq(family, k2)).sqrt();
    weighted_integral(family, |x| pk.eval(&x) * pk2.eval(&x), tol)
        .map(f64::abs)
        .map_err(|_| ClassicalError::NotRepresentable("orthogonality quadrature did not converge"))
}
