//! The harmonic oscillator, the Morse potential and the Rosen–Morse II
//! potential, solved end to end through the reduction.
//!
//! Every potential works in a reduced coordinate `xb` in which the
//! Schrödinger equation reads `Psi'' + (eps - v(xb)) Psi = 0`, and in a
//! declared variable `s = tau(xb)` in which it becomes a GHE.

use std::collections::BTreeMap;
use std::f64::consts::{LN_2, PI};
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64 as C;
use num_traits::{ToPrimitive, Zero};

use crate::classical::{norm_sq, rodrigues_poly, CanonicalHde, Family, OrthoPoly};
use crate::error::PotentialError;
use crate::hyper::{gamma, hyp1f1_regularized, hyp2f1, hyp2f1_at_complement, hyp_u, lgamma, limit_2f1_at_1, rgamma, Limit2F1};
use crate::oracle::{gauss_kronrod, tanh_sinh};
use crate::poly::{q, q_from_f64, qf, Interval, Poly, Q};
use crate::reduction::{corollary_applicable, reduce, FactorizedFunction, GheProblem, NuBranch, Reduction, DEFAULT_PROBES};
use crate::surd::{eval_poly, Surd};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PotentialKind {
    Harmonic,
    Morse,
    RosenMorse2,
}

impl PotentialKind {
    pub fn parse(name: &str) -> Result<Self, PotentialError> {
        match name {
            "harmonic" => Ok(PotentialKind::Harmonic),
            "morse" => Ok(PotentialKind::Morse),
            "rosen-morse2" | "rosen_morse2" | "rm2" => Ok(PotentialKind::RosenMorse2),
            other => Err(PotentialError::UnknownPotential(other.to_string())),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            PotentialKind::Harmonic => "harmonic",
            PotentialKind::Morse => "morse",
            PotentialKind::RosenMorse2 => "rosen-morse2",
        }
    }
}

impl fmt::Display for PotentialKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Physical constants of a potential.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Model {
    Harmonic { m: f64, omega: f64, hbar: f64 },
    Morse { d_e: f64, a: f64, x_e: f64, m: f64, hbar: f64 },
    RosenMorse2 { v0: f64, mu: f64 },
}

/// The declared change of variable `s = tau(xb)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Tau {
    /// `s = xb`.
    Identity,
    /// `s = scale * exp(-xb)`.
    Exponential { scale: f64 },
    /// `s = -tanh(xb)`.
    NegTanh,
}

impl Tau {
    pub fn tau(&self, xb: f64) -> f64 {
        match *self {
            Tau::Identity => xb,
            Tau::Exponential { scale } => scale * (-xb).exp(),
            Tau::NegTanh => -xb.tanh(),
        }
    }

    pub fn d_tau(&self, xb: f64) -> f64 {
        match *self {
            Tau::Identity => 1.0,
            Tau::Exponential { .. } => -self.tau(xb),
            Tau::NegTanh => -sech(xb).powi(2),
        }
    }

    pub fn d2_tau(&self, xb: f64) -> f64 {
        match *self {
            Tau::Identity => 0.0,
            Tau::Exponential { .. } => self.tau(xb),
            Tau::NegTanh => 2.0 * sech(xb).powi(2) * xb.tanh(),
        }
    }

    /// `xb = xi(s)`.
    pub fn inverse(&self, s: f64) -> f64 {
        match *self {
            Tau::Identity => s,
            Tau::Exponential { scale } => (scale / s).ln(),
            Tau::NegTanh => (-s).atanh(),
        }
    }

    pub fn derivative_bounded(&self) -> bool {
        !matches!(self, Tau::Exponential { .. })
    }

    pub fn formula(&self) -> String {
        match *self {
            Tau::Identity => "s = xb".into(),
            Tau::Exponential { scale } => format!("s = {scale} exp(-xb)"),
            Tau::NegTanh => "s = -tanh(xb)".into(),
        }
    }
}

fn sech(x: f64) -> f64 {
    let e = (-x.abs()).exp();
    2.0 * e / (1.0 + e * e)
}

/// `log(1 + exp(y))` without overflow.
fn softplus(y: f64) -> f64 {
    y.max(0.0) + (-y.abs()).exp().ln_1p()
}

#[derive(Clone, Debug, PartialEq)]
pub struct PotentialSpec {
    pub kind: PotentialKind,
    pub model: Model,
    /// Parameters as supplied, with defaults filled in.
    pub params: BTreeMap<String, f64>,
    pub tau: Tau,
}

const HARMONIC_KEYS: [&str; 3] = ["m", "Omega", "hbar"];
const MORSE_KEYS: [&str; 6] = ["Lambda", "D_e", "a", "x_e", "m", "hbar"];
const RM2_KEYS: [&str; 2] = ["v0", "mu"];

fn parse_pairs(text: &str, allowed: &[&str]) -> Result<BTreeMap<String, f64>, PotentialError> {
    let mut out = BTreeMap::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| PotentialError::BadParameter(format!("expected key=value, got '{item}'")))?;
        let k = k.trim();
        if !allowed.contains(&k) {
            return Err(PotentialError::UnknownParameter(k.to_string()));
        }
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| PotentialError::BadParameter(format!("'{}' is not a number", v.trim())))?;
        if !v.is_finite() {
            return Err(PotentialError::BadParameter(format!("{k} is not finite")));
        }
        if out.insert(k.to_string(), v).is_some() {
            return Err(PotentialError::BadParameter(format!("{k} given twice")));
        }
    }
    Ok(out)
}

fn positive(name: &str, value: f64) -> Result<f64, PotentialError> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(PotentialError::NonPositiveParameter {
            name: name.to_string(),
            value,
        })
    }
}

impl PotentialSpec {
    pub fn harmonic(m: f64, omega: f64, hbar: f64) -> Result<Self, PotentialError> {
        let model = Model::Harmonic {
            m: positive("m", m)?,
            omega: positive("Omega", omega)?,
            hbar: positive("hbar", hbar)?,
        };
        let params = BTreeMap::from([("m".into(), m), ("Omega".into(), omega), ("hbar".into(), hbar)]);
        Ok(PotentialSpec {
            kind: PotentialKind::Harmonic,
            model,
            params,
            tau: Tau::Identity,
        })
    }

    /// `x_e` is a position and may take any finite value.
    pub fn morse(d_e: f64, a: f64, x_e: f64, m: f64, hbar: f64) -> Result<Self, PotentialError> {
        if !x_e.is_finite() {
            return Err(PotentialError::BadParameter("x_e is not finite".into()));
        }
        let model = Model::Morse {
            d_e: positive("D_e", d_e)?,
            a: positive("a", a)?,
            x_e,
            m: positive("m", m)?,
            hbar: positive("hbar", hbar)?,
        };
        let params = BTreeMap::from([
            ("D_e".into(), d_e),
            ("a".into(), a),
            ("x_e".into(), x_e),
            ("m".into(), m),
            ("hbar".into(), hbar),
        ]);
        let mut spec = PotentialSpec {
            kind: PotentialKind::Morse,
            model,
            params,
            tau: Tau::Identity,
        };
        let lam = spec.lam();
        spec.params.insert("Lambda".into(), lam);
        spec.tau = Tau::Exponential {
            scale: 2.0 * lam * (a * x_e).exp(),
        };
        Ok(spec)
    }

    /// Morse potential in reduced units: `a = hbar = 1`, `m = 1/2`,
    /// `x_e = 0`, so `D_e = Lambda^2` and `E = eps`.
    pub fn morse_lambda(lambda: f64) -> Result<Self, PotentialError> {
        let lambda = positive("Lambda", lambda)?;
        Self::morse(lambda * lambda, 1.0, 0.0, 0.5, 1.0)
    }

    pub fn rosen_morse2(v0: f64, mu: f64) -> Result<Self, PotentialError> {
        let model = Model::RosenMorse2 {
            v0: positive("v0", v0)?,
            mu: positive("mu", mu)?,
        };
        Ok(PotentialSpec {
            kind: PotentialKind::RosenMorse2,
            model,
            params: BTreeMap::from([("v0".into(), v0), ("mu".into(), mu)]),
            tau: Tau::NegTanh,
        })
    }

    /// Builds a spec from a name and a `key=value,...` string.
    ///
    /// harmonic: `m`, `Omega`, `hbar` (default 1). morse: either `Lambda`
    /// alone with optional `a`, `x_e`, `hbar` (then `m = 1/2` and
    /// `D_e = Lambda^2 a^2 hbar^2 / (2m)`), or `D_e` with optional `a`,
    /// `x_e`, `m`, `hbar` (defaults 1, 0, 1, 1). rosen-morse2: `v0`, `mu`
    /// (required).
    pub fn from_params(name: &str, params: &str) -> Result<Self, PotentialError> {
        let kind = PotentialKind::parse(name)?;
        let get = |p: &BTreeMap<String, f64>, k: &str, d: Option<f64>| -> Result<f64, PotentialError> {
            p.get(k)
                .copied()
                .or(d)
                .ok_or_else(|| PotentialError::MissingParameter(k.to_string()))
        };
        match kind {
            PotentialKind::Harmonic => {
                let p = parse_pairs(params, &HARMONIC_KEYS)?;
                Self::harmonic(get(&p, "m", Some(1.0))?, get(&p, "Omega", Some(1.0))?, get(&p, "hbar", Some(1.0))?)
            }
            PotentialKind::Morse => {
                let p = parse_pairs(params, &MORSE_KEYS)?;
                let a = get(&p, "a", Some(1.0))?;
                let x_e = get(&p, "x_e", Some(0.0))?;
                let hbar = get(&p, "hbar", Some(1.0))?;
                match (p.get("Lambda"), p.get("D_e")) {
                    (Some(_), Some(_)) => Err(PotentialError::BadParameter("give either Lambda or D_e, not both".into())),
                    (Some(&lam), None) => {
                        if p.contains_key("m") {
                            return Err(PotentialError::BadParameter("m is fixed to 1/2 when Lambda is given".into()));
                        }
                        let lam = positive("Lambda", lam)?;
                        let (a, hbar) = (positive("a", a)?, positive("hbar", hbar)?);
                        let mut spec = Self::morse(lam * lam * a * a * hbar * hbar, a, x_e, 0.5, hbar)?;
                        // keep the requested value rather than its round trip
                        spec.params.insert("Lambda".into(), lam);
                        spec.tau = Tau::Exponential {
                            scale: 2.0 * lam * (a * x_e).exp(),
                        };
                        Ok(spec)
                    }
                    (None, Some(&d_e)) => Self::morse(d_e, a, x_e, get(&p, "m", Some(1.0))?, hbar),
                    (None, None) => Err(PotentialError::MissingParameter("Lambda or D_e".into())),
                }
            }
            PotentialKind::RosenMorse2 => {
                let p = parse_pairs(params, &RM2_KEYS)?;
                Self::rosen_morse2(get(&p, "v0", None)?, get(&p, "mu", None)?)
            }
        }
    }

    fn lam(&self) -> f64 {
        match self.model {
            Model::Morse { d_e, a, m, hbar, .. } => self
                .params
                .get("Lambda")
                .copied()
                .unwrap_or_else(|| (2.0 * m * d_e).sqrt() / (a * hbar)),
            _ => f64::NAN,
        }
    }

    /// `Lambda` for Morse.
    pub fn lambda(&self) -> Option<f64> {
        (self.kind == PotentialKind::Morse).then(|| self.lam())
    }

    /// `(v0 cosh^2 mu, tanh mu)` for Rosen–Morse II.
    pub fn rm2_ct(&self) -> Option<(f64, f64)> {
        match self.model {
            Model::RosenMorse2 { v0, mu } => Some((v0 * mu.cosh().powi(2), mu.tanh())),
            _ => None,
        }
    }

    /// `(v1, v2) = (v0 sinh(2 mu) / 2, v0 cosh^2 mu + 1/4)`.
    pub fn rm2_v12(&self) -> Option<(f64, f64)> {
        self.rm2_ct().map(|(c, t)| (c * t, c + 0.25))
    }

    /// Reduced potential `v(xb)`.
    pub fn v(&self, xb: f64) -> f64 {
        match self.kind {
            PotentialKind::Harmonic => xb * xb,
            PotentialKind::Morse => {
                let lam = self.lam();
                let s = self.tau.tau(xb);
                let w = 1.0 - s / (2.0 * lam);
                lam * lam * w * w
            }
            PotentialKind::RosenMorse2 => {
                let (c, t) = self.rm2_ct().unwrap();
                let w = xb.tanh() + t;
                c * w * w
            }
        }
    }

    /// `(v_min, v_-, v_+)` in reduced energy; infinite limits are `inf`.
    pub fn regions(&self) -> (f64, f64, f64) {
        match self.kind {
            PotentialKind::Harmonic => (0.0, f64::INFINITY, f64::INFINITY),
            PotentialKind::Morse => {
                let lam = self.lam();
                (0.0, f64::INFINITY, lam * lam)
            }
            PotentialKind::RosenMorse2 => {
                let (c, t) = self.rm2_ct().unwrap();
                (0.0, c * (1.0 - t) * (1.0 - t), c * (1.0 + t) * (1.0 + t))
            }
        }
    }

    /// Upper end of the bound region, `min(v_-, v_+)`.
    pub fn ceiling(&self) -> f64 {
        let (_, vm, vp) = self.regions();
        vm.min(vp)
    }

    /// Bound states are the `n` with `n < N`; `None` when unlimited.
    pub fn cutoff(&self) -> Option<f64> {
        match self.kind {
            PotentialKind::Harmonic => None,
            PotentialKind::Morse => Some(self.lam() - 0.5),
            PotentialKind::RosenMorse2 => {
                let (v1, v2) = self.rm2_v12().unwrap();
                Some(v2.sqrt() - v1.sqrt() - 0.5)
            }
        }
    }

    pub fn to_reduced(&self, x: f64) -> f64 {
        match self.model {
            Model::Harmonic { m, omega, hbar } => x / (hbar / (m * omega)).sqrt(),
            Model::Morse { a, .. } => a * x,
            Model::RosenMorse2 { .. } => x,
        }
    }

    pub fn from_reduced(&self, xb: f64) -> f64 {
        match self.model {
            Model::Harmonic { m, omega, hbar } => xb * (hbar / (m * omega)).sqrt(),
            Model::Morse { a, .. } => xb / a,
            Model::RosenMorse2 { .. } => xb,
        }
    }

    /// `dxb/dx`.
    pub fn jacobian(&self) -> f64 {
        self.to_reduced(1.0) - self.to_reduced(0.0)
    }

    pub fn energy(&self, eps: f64) -> f64 {
        match self.model {
            Model::Harmonic { omega, hbar, .. } => hbar * omega * eps / 2.0,
            Model::Morse { d_e, .. } => {
                let lam = self.lam();
                d_e * eps / (lam * lam)
            }
            Model::RosenMorse2 { .. } => eps,
        }
    }

    pub fn reduced_energy(&self, e: f64) -> f64 {
        match self.model {
            Model::Harmonic { omega, hbar, .. } => 2.0 * e / (hbar * omega),
            Model::Morse { d_e, .. } => {
                let lam = self.lam();
                lam * lam * e / d_e
            }
            Model::RosenMorse2 { .. } => e,
        }
    }

    /// Probe energies for branch selection: a spread over the bound
    /// region plus two below the well, where shallow wells still separate
    /// the admissible branch from its interchange partner.
    pub fn probes(&self) -> Vec<f64> {
        let (vmin, _, _) = self.regions();
        let top = self.ceiling();
        if top.is_finite() {
            let mut p: Vec<f64> = (0..10).map(|i| vmin + (top - vmin) * (0.05 + 0.1 * i as f64)).collect();
            p.extend([vmin - 1.0, vmin - 4.0]);
            p
        } else {
            DEFAULT_PROBES.to_vec()
        }
    }
}

fn sq(c: Q) -> Surd {
    Surd::from_q(c)
}

/// The GHE of the table row, with a declarative check that the change of
/// variable really produces it.
pub fn build_ghe(spec: &PotentialSpec) -> Result<GheProblem, PotentialError> {
    let e = Surd::eps();
    let ghe = match spec.kind {
        PotentialKind::Harmonic => GheProblem::new(
            Poly::constant(q(1)),
            Poly::zero(),
            Poly::new(vec![e, Surd::zero(), sq(q(-1))]),
            Interval::real_line(),
        )?,
        PotentialKind::Morse => {
            // eps - Lambda^2 (1 - s/(2 Lambda))^2 = (eps - Lambda^2) + Lambda s - s^2/4
            let lam = q_from_f64(spec.lam());
            GheProblem::new(
                Poly::x(),
                Poly::constant(q(1)),
                Poly::new(vec![&e - &sq(&lam * &lam), sq(lam), sq(qf(-1, 4))]),
                Interval { lo: 0.0, hi: f64::INFINITY },
            )?
        }
        PotentialKind::RosenMorse2 => {
            // eps - C (s - T)^2 = (eps - C T^2) + 2 C T s - C s^2
            let (c, t) = spec.rm2_ct().unwrap();
            let (c, t) = (q_from_f64(c), q_from_f64(t));
            GheProblem::new(
                Poly::new(vec![q(1), q(0), q(-1)]),
                Poly::linear(q(0), q(-2)),
                Poly::new(vec![
                    &e - &sq(&c * &(&t * &t)),
                    sq(&(&c * &t) * &q(2)),
                    sq(-c),
                ]),
                Interval { lo: -1.0, hi: 1.0 },
            )?
        }
    };
    check_table(spec, &ghe)?;
    Ok(ghe)
}

/// Compares `tau''/tau'^2` with `psi~/phi` and `(eps - v)/tau'^2` with
/// `phi~/phi^2` at sample points and two energies.
pub fn check_table(spec: &PotentialSpec, ghe: &GheProblem) -> Result<(), PotentialError> {
    let xs = [-1.7, -0.6, -0.1, 0.35, 0.9, 2.2];
    for &xb in &xs {
        let s = spec.tau.tau(xb);
        let (d1, d2) = (spec.tau.d_tau(xb), spec.tau.d2_tau(xb));
        let phi = ghe.phi.eval_f64(s);
        let lhs = d2 / (d1 * d1);
        let rhs = ghe.psi_tilde.eval_f64(s) / phi;
        if (lhs - rhs).abs() > 1e-9 * rhs.abs().max(1.0) {
            return Err(PotentialError::TableMismatch(format!(
                "psi~/phi = {rhs} but tau''/tau'^2 = {lhs} at xb = {xb}"
            )));
        }
        for eps in [0.37, 2.9] {
            let lhs = (eps - spec.v(xb)) / (d1 * d1);
            let rhs = eval_poly(&ghe.phi_tilde, s, eps).re / (phi * phi);
            if (lhs - rhs).abs() > 1e-9 * rhs.abs().max(1.0) {
                return Err(PotentialError::TableMismatch(format!(
                    "phi~/phi^2 = {rhs} but (eps - v)/tau'^2 = {lhs} at xb = {xb}, eps = {eps}"
                )));
            }
        }
    }
    Ok(())
}

/// The reduction of a potential's GHE with its classical identification.
#[derive(Clone, Debug)]
pub struct PotentialReduction {
    pub ghe: GheProblem,
    pub reduction: Reduction,
    pub branch: NuBranch,
    pub canonical: CanonicalHde,
    pub corollary_applies: bool,
}

pub fn reduce_potential(spec: &PotentialSpec) -> Result<PotentialReduction, PotentialError> {
    let ghe = build_ghe(spec)?;
    let reduction = reduce(&ghe, &spec.probes())?;
    let branch = reduction.selected.clone()?;
    let canonical = crate::classical::classify_canonical(&ghe.phi, &branch.psi, ghe.interval)?;
    let corollary_applies = corollary_applicable(&branch, spec.tau.derivative_bounded());
    Ok(PotentialReduction {
        ghe,
        reduction,
        branch,
        canonical,
        corollary_applies,
    })
}

/// A shareable function of one real variable.
pub struct Sampler<T>(Arc<dyn Fn(f64) -> T + Send + Sync>);

impl<T> Sampler<T> {
    pub fn new(f: impl Fn(f64) -> T + Send + Sync + 'static) -> Self {
        Sampler(Arc::new(f))
    }

    pub fn call(&self, x: f64) -> T {
        (self.0)(x)
    }
}

impl<T> Clone for Sampler<T> {
    fn clone(&self) -> Self {
        Sampler(Arc::clone(&self.0))
    }
}

impl<T> fmt::Debug for Sampler<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Sampler")
    }
}

#[derive(Clone, Debug)]
pub struct BoundState {
    pub n: usize,
    pub eps_n: f64,
    /// Exact energy when `lambda(eps) = lambda_n` is linear with rational
    /// coefficients.
    pub eps_exact: Option<Q>,
    pub energy: f64,
    pub poly: OrthoPoly<f64>,
    pub chi: FactorizedFunction,
    /// `N_n^2` for normalization in the physical coordinate.
    pub norm_const_sq: f64,
    /// `|lambda(eps_n) - lambda_n(eps_n)|`.
    pub lambda_residual: f64,
    /// Normalized `Psi_n(x)` in the physical coordinate.
    pub sampler: Sampler<f64>,
}

/// `log chi` at `xb`, with distances to the roots of `phi` computed from
/// `xb` directly so that they keep full relative accuracy.
fn log_chi(spec: &PotentialSpec, chi: &FactorizedFunction, eps: f64, xb: f64) -> f64 {
    let s = spec.tau.tau(xb);
    let mut acc = eval_poly(&chi.exp_poly, s, eps).re;
    for t in &chi.power_terms {
        let r = t.root.eval(eps).re;
        let e = t.exponent.eval(eps).re;
        let ln_d = match (spec.tau, r) {
            (Tau::Exponential { scale }, r) if r == 0.0 => scale.ln() - xb,
            (Tau::NegTanh, r) if r == 1.0 => LN_2 - softplus(-2.0 * xb),
            (Tau::NegTanh, r) if r == -1.0 => LN_2 - softplus(2.0 * xb),
            _ => (s - r).abs().ln(),
        };
        acc += e * ln_d;
    }
    for t in &chi.inv_exp_terms {
        acc += t.coefficient.eval(eps).re / (s - t.root.eval(eps).re);
    }
    acc
}

/// `ln chi(s) + ln |P(x(s))|` with the sign of `P`.
fn log_profile(spec: &PotentialSpec, chi: &FactorizedFunction, poly: &OrthoPoly<f64>, scale: f64, shift: f64, eps: f64, xb: f64) -> (f64, f64) {
    let s = spec.tau.tau(xb);
    let p = poly.eval(scale * s + shift);
    (log_chi(spec, chi, eps, xb) + p.abs().ln(), p.signum())
}

fn solve_exact(branch: &NuBranch, canonical: &CanonicalHde, n: usize) -> Option<Q> {
    let diff = &branch.lambda - &canonical.lambda_working(n);
    let p = diff.as_poly()?;
    if p.degree() != Some(1) {
        return None;
    }
    Some(-(p.coeff(0) / p.coeff(1)))
}

fn closed_form_eps(spec: &PotentialSpec, n: usize) -> f64 {
    let nf = n as f64;
    match spec.kind {
        PotentialKind::Harmonic => 2.0 * nf + 1.0,
        PotentialKind::Morse => {
            let lam = spec.lam();
            let w = 0.5 + nf - lam;
            lam * lam - w * w
        }
        PotentialKind::RosenMorse2 => {
            let (v1, v2) = spec.rm2_v12().unwrap();
            let (_, vm, _) = spec.regions();
            let b = v2.sqrt() - (nf + 0.5);
            let a = v1 / b;
            vm - (b - a) * (b - a)
        }
    }
}

/// `N_n^2` from the closed forms (harmonic, Morse) or by quadrature
/// (Rosen–Morse II).
fn norm_const_sq(spec: &PotentialSpec, n: usize, family: &Family<f64>, poly: &Poly<f64>) -> Result<f64, PotentialError> {
    let nf = n as f64;
    let ln_fact = lgamma(C::new(nf + 1.0, 0.0)).re;
    match (spec.kind, spec.model) {
        (PotentialKind::Harmonic, _) => {
            // 1/(2^n n! sqrt(pi)) / x0
            Ok(spec.jacobian() / ((nf * LN_2 + ln_fact).exp() * PI.sqrt()))
        }
        (PotentialKind::Morse, Model::Morse { a, .. }) => {
            let lam = spec.lam();
            let alpha = 2.0 * lam - 2.0 * nf - 1.0;
            Ok((ln_fact + (alpha * a).ln() - lgamma(C::new(2.0 * lam - nf, 0.0)).re).exp())
        }
        _ => {
            // int Psi^2 dxb = int (1-s)^(alpha-1) (1+s)^(beta-1) P^2 ds
            let (alpha, beta) = match family {
                Family::Jacobi { alpha, beta } => (*alpha, *beta),
                _ => unreachable!("Rosen-Morse II reduces to Jacobi"),
            };
            let integrand = |s: f64, dlo: f64, dhi: f64| {
                let p = poly.eval(&s);
                dhi.powf(alpha - 1.0) * dlo.powf(beta - 1.0) * p * p
            };
            let rough = tanh_sinh(integrand, -1.0, 1.0, 1e-8 * norm_sq(family, n))?.value;
            let value = tanh_sinh(integrand, -1.0, 1.0, 1e-13 * rough)?.value;
            Ok(1.0 / value)
        }
    }
}

/// Bound states with `n <= n_max` allowed by the cutoff.
pub fn bound_spectrum(spec: &PotentialSpec, n_max: usize) -> Result<Vec<BoundState>, PotentialError> {
    let (vmin, _, _) = spec.regions();
    let top = spec.ceiling();
    let count = match spec.cutoff() {
        None => n_max + 1,
        Some(big_n) if big_n <= 0.0 => 0,
        Some(big_n) => (big_n.ceil() as usize).min(n_max + 1),
    };
    if count == 0 {
        return Err(PotentialError::EmptySpectrum);
    }
    let red = reduce_potential(spec)?;
    let mut out = Vec::with_capacity(count);
    for n in 0..count {
        let eps_exact = solve_exact(&red.branch, &red.canonical, n);
        let eps_n = match &eps_exact {
            Some(e) => e.to_f64().unwrap_or(f64::NAN),
            None => closed_form_eps(spec, n),
        };
        let lam = red.branch.lambda.eval(eps_n);
        let lam_n = red.canonical.lambda_working(n).eval(eps_n);
        let lambda_residual = (lam - lam_n).norm();
        if lambda_residual > 1e-9 * lam_n.norm().max(1.0) {
            return Err(PotentialError::TableMismatch(format!(
                "closed-form eps_{n} = {eps_n} leaves lambda - lambda_n = {lambda_residual:e}"
            )));
        }
        if !(eps_n > vmin && eps_n < top) {
            return Err(PotentialError::TableMismatch(format!(
                "eps_{n} = {eps_n} outside the bound region ({vmin}, {top})"
            )));
        }
        let family = red.canonical.validate(eps_n)?;
        let poly = match red.canonical.family.exact() {
            Some(exact) => {
                let p = rodrigues_poly(&exact, n)?;
                OrthoPoly {
                    family: family.clone(),
                    n,
                    coeffs: p.coeffs.to_f64(),
                }
            }
            None => rodrigues_poly(&family, n)?,
        };
        let nsq = norm_const_sq(spec, n, &family, &poly.coeffs)?;
        let scale = red.canonical.scale.eval_real(eps_n).unwrap_or(f64::NAN);
        let shift = red.canonical.shift.eval_real(eps_n).unwrap_or(f64::NAN);
        let sampler = {
            let spec = spec.clone();
            let chi = red.branch.chi.clone();
            let p = poly.clone();
            let ln_n = 0.5 * nsq.ln();
            Sampler::new(move |x| {
                let xb = spec.to_reduced(x);
                let (l, sign) = log_profile(&spec, &chi, &p, scale, shift, eps_n, xb);
                if sign == 0.0 || l == f64::NEG_INFINITY {
                    0.0
                } else {
                    sign * (l + ln_n).exp()
                }
            })
        };
        out.push(BoundState {
            n,
            eps_n,
            eps_exact,
            energy: spec.energy(eps_n),
            poly,
            chi: red.branch.chi.clone(),
            norm_const_sq: nsq,
            lambda_residual,
            sampler,
        });
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct ScatteringSolution {
    pub label: String,
    /// Un-normalized `Psi(x)` in the physical coordinate.
    pub sampler: Sampler<C>,
    pub bounded_at_minus_inf: bool,
    pub bounded_at_plus_inf: bool,
    /// How each verdict was reached.
    pub reason: String,
}

impl ScatteringSolution {
    pub fn bounded(&self) -> bool {
        self.bounded_at_minus_inf && self.bounded_at_plus_inf
    }
}

#[derive(Clone, Debug)]
pub struct ScatteringState {
    pub eps: f64,
    pub solutions: Vec<ScatteringSolution>,
    pub degeneracy: usize,
}

const BOUNDED_TOL: f64 = 1e-12;

/// Whether `z^p F(z)` stays bounded as `z -> 0+` (for `F` a function of `z`
/// with value `F(0) = 1`) or as the argument of `F` tends to 1 (regime
/// given).
fn bounded_with(p: C, regime: &Limit2F1) -> bool {
    match regime {
        Limit2F1::Finite(_) | Limit2F1::BoundedOscillatory { .. } => p.re >= -BOUNDED_TOL,
        Limit2F1::Log { .. } => p.re > BOUNDED_TOL,
        Limit2F1::PowerDivergent { exponent, .. } => p.re + exponent.re >= -BOUNDED_TOL,
    }
}

fn regime_name(r: &Limit2F1) -> &'static str {
    match r {
        Limit2F1::Finite(_) => "finite",
        Limit2F1::Log { .. } => "logarithmic",
        Limit2F1::BoundedOscillatory { .. } => "bounded oscillatory",
        Limit2F1::PowerDivergent { .. } => "power divergent",
    }
}

fn csqrt(x: f64) -> C {
    C::new(x, 0.0).sqrt()
}

/// Scattering solutions at `eps` above the bound region.
pub fn scattering_states(spec: &PotentialSpec, eps: f64) -> Result<ScatteringState, PotentialError> {
    let top = spec.ceiling();
    if !top.is_finite() {
        return Err(PotentialError::NoScatteringRegion);
    }
    if !(eps > top) {
        return Err(PotentialError::EnergyBelowRegion { eps, threshold: top });
    }
    let solutions = match spec.kind {
        PotentialKind::Morse => morse_scattering(spec, eps),
        PotentialKind::RosenMorse2 => rm2_scattering(spec, eps)?,
        PotentialKind::Harmonic => unreachable!(),
    };
    let degeneracy = solutions.iter().filter(|s| s.bounded()).count();
    Ok(ScatteringState { eps, solutions, degeneracy })
}

fn morse_scattering(spec: &PotentialSpec, eps: f64) -> Vec<ScatteringSolution> {
    let lam = spec.lam();
    let kappa = csqrt(lam * lam - eps);
    let a = kappa + 0.5 - lam;
    let c = 1.0 + 2.0 * kappa;
    let ln_scale = match spec.tau {
        Tau::Exponential { scale } => scale.ln(),
        _ => unreachable!(),
    };
    // (label, power of s, a, c)
    let parts = [("Psi1", kappa, a, c), ("Psi2", -kappa, a - 2.0 * kappa, 2.0 - c)];
    parts
        .iter()
        .map(|&(label, power, a, c)| {
            // F(a,c,s) ~ e^s s^(a-c) / Gamma(a) as s -> inf (xb -> -inf)
            let minus = rgamma(a) == C::zero();
            let plus = power.re >= -BOUNDED_TOL;
            let spec2 = spec.clone();
            let sampler = Sampler::new(move |x| {
                let xb = spec2.to_reduced(x);
                let ln_s = ln_scale - xb;
                let s = ln_s.exp();
                match hyp1f1_regularized(a, c, s) {
                    Ok(m) => (power * ln_s - s / 2.0).exp() * m.value,
                    Err(_) => C::new(f64::NAN, f64::NAN),
                }
            });
            ScatteringSolution {
                label: label.into(),
                sampler,
                bounded_at_minus_inf: minus,
                bounded_at_plus_inf: plus,
                reason: format!(
                    "xb -> -inf: grows like e^(s/2) s^(-1/2-Lambda) / Gamma({a:.6}); xb -> +inf: |s^({power:.6})| with Re = {:.3e}",
                    power.re
                ),
            }
        })
        .collect()
}

/// Parameters of the Gauss equation in `t = (1 + s)/2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rm2Gauss {
    pub kappa_minus: C,
    pub kappa_plus: C,
    pub a: C,
    pub b: C,
    pub c: C,
}

pub fn rm2_gauss(spec: &PotentialSpec, eps: f64) -> Option<Rm2Gauss> {
    let (_, vm, vp) = spec.regions();
    let (_, v2) = spec.rm2_v12()?;
    let km = csqrt(vm - eps);
    let kp = csqrt(vp - eps);
    let big_b = (kp + km) / 2.0;
    Some(Rm2Gauss {
        kappa_minus: km,
        kappa_plus: kp,
        a: big_b + 0.5 - v2.sqrt(),
        b: big_b + 0.5 + v2.sqrt(),
        c: 1.0 + kp,
    })
}

/// `2F1(a, b; c; z)` with `z` and `1 - z` both supplied accurately.
fn gauss(a: C, b: C, c: C, z: f64, omz: f64) -> C {
    let r = if z <= 0.5 {
        hyp2f1(a, b, c, z)
    } else {
        hyp2f1_at_complement(a, b, c, omz, false)
    };
    r.map(|v| v.value).unwrap_or(C::new(f64::NAN, f64::NAN))
}

const INTEGER_KAPPA_TOL: f64 = 1e-9;

fn rm2_scattering(spec: &PotentialSpec, eps: f64) -> Result<Vec<ScatteringSolution>, PotentialError> {
    let g = rm2_gauss(spec, eps).unwrap();
    let (km, kp) = (g.kappa_minus, g.kappa_plus);
    let integer_m = (kp.im.abs() <= INTEGER_KAPPA_TOL && (kp.re - kp.re.round()).abs() <= INTEGER_KAPPA_TOL)
        .then(|| kp.re.round() as i64);
    let one = Limit2F1::Finite(C::new(1.0, 0.0));
    // t = 1/(1 + e^(2 xb)): xb -> +inf is t -> 0+, xb -> -inf is t -> 1-
    let make = |label: &str, pt: C, a: C, b: C, c: C, complement: bool| -> ScatteringSolution {
        let pm = km / 2.0;
        let (at_zero, at_one) = if complement {
            (limit_2f1_at_1(a, b, c), one)
        } else {
            (one, limit_2f1_at_1(a, b, c))
        };
        let plus = bounded_with(pt, &at_zero);
        let minus = bounded_with(pm, &at_one);
        let spec2 = spec.clone();
        let sampler = Sampler::new(move |x| {
            let xb = spec2.to_reduced(x);
            let ln_t = -softplus(2.0 * xb);
            let ln_omt = -softplus(-2.0 * xb);
            let (t, omt) = (ln_t.exp(), ln_omt.exp());
            let f = if complement { gauss(a, b, c, omt, t) } else { gauss(a, b, c, t, omt) };
            (pm * ln_omt + pt * ln_t).exp() * f
        });
        ScatteringSolution {
            label: label.into(),
            sampler,
            bounded_at_minus_inf: minus,
            bounded_at_plus_inf: plus,
            reason: format!(
                "t -> 1-: (1-t)^({pm:.6}) times a {} limit; t -> 0+: t^({pt:.6}) times a {} limit",
                regime_name(&at_one),
                regime_name(&at_zero)
            ),
        }
    };
    let mut sols = vec![make("Psi1", kp / 2.0, g.a, g.b, g.c, false)];
    match integer_m {
        Some(m) => {
            // second solution around t = 1 when c = 1 + m is an integer
            sols.push(make("PsiA", kp / 2.0, g.a, g.b, g.a + g.b - m as f64, true));
        }
        None => {
            let (a2, b2, c2) = (g.a - g.c + 1.0, g.b - g.c + 1.0, 2.0 - g.c);
            sols.push(make("Psi2", -kp / 2.0, a2, b2, c2, false));
        }
    }
    Ok(sols)
}

/// Sampled boundedness: `|Psi(far)| <= 10 max |Psi(reference)|`.
pub fn sampled_bounded(f: impl Fn(f64) -> C, far: f64, reference: &[f64]) -> bool {
    let scale = reference.iter().map(|&x| f(x).norm()).fold(0.0, f64::max);
    let v = f(far).norm();
    v.is_finite() && v <= 10.0 * scale
}

/// `max |Psi'' + (eps - v) Psi| / max(1, |Psi| |eps - v|)` over `xs`, with
/// derivatives in the reduced coordinate by five-point differences. The step
/// shrinks with the local wavenumber `sqrt(eps - v_min)` of deep wells.
pub fn wavefunction_residual<T: Into<C>>(spec: &PotentialSpec, psi: impl Fn(f64) -> T, eps: f64, xs: &[f64]) -> f64 {
    let (vmin, _, _) = spec.regions();
    let h = 2e-3 * (5.0 / (eps - vmin).abs().max(1.0).sqrt()).min(1.0);
    let f = |xb: f64| -> C { psi(spec.from_reduced(xb)).into() };
    xs.iter()
        .map(|&x| {
            let xb = spec.to_reduced(x);
            let (m2, m1, f0, p1, p2) = (f(xb - 2.0 * h), f(xb - h), f(xb), f(xb + h), f(xb + 2.0 * h));
            let d2 = (-m2 + 16.0 * m1 - 30.0 * f0 + 16.0 * p1 - p2) / (12.0 * h * h);
            let w = eps - spec.v(xb);
            (d2 + w * f0).norm() / (f0.norm() * w.abs()).max(1.0)
        })
        .fold(0.0, f64::max)
}

/// `int Psi_a Psi_b dx` by Gauss–Kronrod over the whole line, computed in
/// the reduced coordinate.
pub fn overlap(spec: &PotentialSpec, a: &BoundState, b: &BoundState) -> Result<f64, PotentialError> {
    let f = |xb: f64| {
        let x = spec.from_reduced(xb);
        a.sampler.call(x) * b.sampler.call(x)
    };
    Ok(gauss_kronrod(f, f64::NEG_INFINITY, f64::INFINITY, 1e-10)?.value / spec.jacobian())
}

/// `|int Psi_n^2 dx - 1|`.
pub fn norm_defect(spec: &PotentialSpec, st: &BoundState) -> Result<f64, PotentialError> {
    Ok((overlap(spec, st, st)? - 1.0).abs())
}

/// Finite-difference oracle setup in the reduced coordinate.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleSetup {
    pub lo: f64,
    pub hi: f64,
    pub n_points: usize,
    /// Only eigenvalues below this are trusted.
    pub threshold: f64,
    pub k_max: usize,
}

/// Default box per potential: harmonic `[-10, 10]` with 4001 points and
/// threshold 20 (a fifth of the wall height); Morse `[-2, 12]` at spacing
/// 0.00175, stretched to `30/kappa` for a slowly decaying top state and to
/// `s = 60` on the left for shallow wells;
/// Rosen–Morse II `[-15, 15]` at spacing 0.005, stretched to `25/kappa`
/// on each side.
pub fn default_oracle(spec: &PotentialSpec, states: &[BoundState]) -> OracleSetup {
    let count = states.len();
    match spec.kind {
        PotentialKind::Harmonic => {
            let threshold = 20.0;
            OracleSetup {
                lo: -10.0,
                hi: 10.0,
                n_points: 4001,
                threshold,
                k_max: states.iter().filter(|s| s.eps_n < threshold).count(),
            }
        }
        PotentialKind::Morse => {
            let lam = spec.lam();
            let top = states.last().map_or(1.0, |s| (lam * lam - s.eps_n).sqrt());
            let hi = 12.0f64.max(30.0 / top);
            // shallow wells need the wall pushed out to s = 60
            let lo = (-2.0f64).min((lam / 30.0).ln());
            let h = 0.00175f64.min(0.02 / lam);
            OracleSetup {
                lo,
                hi,
                n_points: ((hi - lo) / h).round() as usize + 1,
                threshold: lam * lam,
                k_max: count,
            }
        }
        PotentialKind::RosenMorse2 => {
            let (_, vm, vp) = spec.regions();
            let top = states.last().map_or(vm, |s| s.eps_n);
            let lo = -(15.0f64.max(25.0 / (vm - top).sqrt()));
            let hi = 15.0f64.max(25.0 / (vp - top).sqrt());
            OracleSetup {
                lo,
                hi,
                n_points: ((hi - lo) / 0.005).round() as usize + 1,
                threshold: vm.min(vp),
                k_max: count,
            }
        }
    }
}

/// Outcome of checking the second Morse solution at `2 kappa_+ = k`.
#[derive(Clone, Debug, PartialEq)]
pub struct IntegerKCheck {
    pub k: u32,
    pub eps_k: f64,
    pub a: f64,
    /// `U(a, 1+k, s)` directly, or reduction of order from the Laguerre
    /// solution when `a` is a nonpositive integer.
    pub method: &'static str,
    /// Predicted exponent of `Psi_2^2 / s` as `s -> 0+`, namely `-k-1`.
    pub predicted_exponent: f64,
    pub measured_exponent: f64,
    /// Numerical `s^k U(a, 1+k, s)` over the small-argument leading
    /// coefficient, when `U` is evaluated directly.
    pub leading_ratio: Option<f64>,
    /// `int Psi_2^2 dx` converges at `s = 0+` iff the exponent exceeds -1.
    pub square_integrable: bool,
}

const K_S1: f64 = 1e-5;
const K_S2: f64 = 1e-6;

/// For each integer `k < 2 Lambda` the bound-state formula breaks down at
/// `eps_k = Lambda^2 - k^2/4`; the second solution there is checked for
/// square integrability at `s -> 0+`. Logs throughout, since `Psi_2 ~ s^(-k/2)`.
pub fn morse_integer_k_checks(spec: &PotentialSpec) -> Result<Vec<IntegerKCheck>, PotentialError> {
    let lam = spec.lambda().ok_or(PotentialError::UnknownPotential(format!("{} is not Morse", spec.kind)))?;
    let mut out = Vec::new();
    let mut k = 1u32;
    while (k as f64) < 2.0 * lam {
        let kf = k as f64;
        let eps_k = lam * lam - kf * kf / 4.0;
        let a = (kf + 1.0) / 2.0 - lam;
        let kprime = (-a).round();
        let polynomial = kprime >= 0.0 && (a + kprime).abs() <= 1e-12;
        let ln_gamma_k = lgamma(C::new(kf, 0.0)).re;
        let ac = C::new(a, 0.0);
        let (s1, s2, method, ln_psi2, leading_ratio): (f64, f64, &'static str, Box<dyn Fn(f64) -> f64>, Option<f64>) =
            if polynomial {
                // Psi_2 = Psi_1 int_s^s0 ds'/(s' Psi_1^2), Psi_1 = e^(-s/2) s^(k/2) L_k'^(k)(s),
                // with the integral scaled by s^k to stay finite
                let fam = Family::Laguerre { alpha: kf };
                let n = kprime as usize;
                let lag = move |s: f64| crate::classical::eval_standard(&fam, n, s);
                let s0 = 1e-3;
                let f = move |s: f64| {
                    let ln_psi1 = -s / 2.0 + kf / 2.0 * s.ln() + lag(s).abs().ln();
                    // w = (s/u)^k turns the steep s^k/u^(k+1) into dw / k
                    let j = gauss_kronrod(
                        |w: f64| {
                            let u = s * w.powf(-1.0 / kf);
                            let l = lag(u);
                            u.exp() / (l * l)
                        },
                        (s / s0).powf(kf),
                        1.0,
                        1e-12,
                    )
                    .map(|r| r.value / kf)
                    .unwrap_or(f64::NAN);
                    ln_psi1 - kf * s.ln() + j.ln()
                };
                (K_S1, K_S2, "reduction of order", Box::new(f), None)
            } else {
                // keep |U| ~ Gamma(k)/|Gamma(a)| s^-k below f64 overflow
                let ln_scale = ln_gamma_k + rgamma(ac).norm().ln();
                let s2 = K_S2.max((-(650.0 - ln_scale) / kf).exp());
                let s1 = s2 * (K_S1 / K_S2);
                let cc = C::new(1.0 + kf, 0.0);
                let u = move |s: f64| hyp_u(ac, cc, s).map(|r| r.value.re).unwrap_or(f64::NAN);
                // leading small-s coefficient: Gamma(k)/Gamma(a)
                let lead = gamma(C::new(kf, 0.0)).map(|g| (g * rgamma(ac)).re).unwrap_or(f64::NAN);
                let ratio = u(s2) * s2.powf(kf) / lead;
                let f = move |s: f64| -s / 2.0 + kf / 2.0 * s.ln() + u(s).abs().ln();
                (s1, s2, "U(a, 1+k, s)", Box::new(f), Some(ratio))
            };
        // exponent of Psi_2^2 / s (the measure is dx = ds / (a s))
        let ln_g = |s: f64| 2.0 * ln_psi2(s) - s.ln();
        let secant = |lo: f64, hi: f64| (ln_g(lo) - ln_g(hi)) / (lo / hi).ln();
        let mut measured = secant(s2, s1);
        if s2 > K_S2 {
            // s was raised to avoid overflow: remove the O(s) drift using the
            // secant one decade up
            measured -= (secant(s1, 10.0 * s1) - measured) / 9.0;
        }
        out.push(IntegerKCheck {
            k,
            eps_k,
            a,
            method,
            predicted_exponent: -kf - 1.0,
            measured_exponent: measured,
            leading_ratio,
            square_integrable: measured > -1.0 + 0.05,
        });
        k += 1;
    }
    Ok(out)
}
