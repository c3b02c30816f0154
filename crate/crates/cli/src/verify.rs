use std::collections::BTreeMap;

use nu_core::oracle::{fd_eigenvalues, rel_err, FdGrid};
use nu_core::potentials::{
    default_oracle, morse_integer_k_checks, norm_defect, overlap, sampled_bounded, scattering_states,
};
use nu_core::{bound_spectrum, wavefunction_residual, BoundState, PotentialKind, PotentialSpec};
use serde::Serialize;

use crate::output::{emit, format_or, parse_range, to_json, tolerance, CliError};
use crate::solve::{default_spectrum_tol, run_oracle};
use crate::{Format, VerifyArgs};

pub const NORM_TOL: f64 = 1e-8;
pub const RESIDUAL_TOL: f64 = 1e-6;
pub const LAMBDA_TOL: f64 = 1e-9;
/// Accepted range for the ratio of FD errors on successive grids.
pub const ORDER_RANGE: (f64, f64) = (3.5, 4.5);

#[derive(Serialize)]
struct Check {
    name: &'static str,
    pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    tolerance: Option<f64>,
    detail: String,
}

impl Check {
    fn bound(name: &'static str, value: f64, tol: f64, detail: String) -> Self {
        Check {
            name,
            pass: value <= tol,
            value: Some(value),
            tolerance: Some(tol),
            detail,
        }
    }

    fn flag(name: &'static str, pass: bool, detail: String) -> Self {
        Check {
            name,
            pass,
            value: None,
            tolerance: None,
            detail,
        }
    }
}

#[derive(Serialize, Default)]
struct Spectra {
    analytic: Vec<f64>,
    oracle: Vec<f64>,
    rel_err: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    grid: Option<[f64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

#[derive(Serialize)]
struct VerifyReport {
    schema_version: u32,
    command: &'static str,
    potential: &'static str,
    params: BTreeMap<String, f64>,
    tolerances: BTreeMap<&'static str, f64>,
    spectra: Spectra,
    normalization_defects: Vec<f64>,
    residuals: Vec<f64>,
    checks: Vec<Check>,
    pass: bool,
}

fn max_of(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, f64::max)
}

fn grid_override(args: &VerifyArgs, spec: &PotentialSpec, states: &[BoundState]) -> Result<Option<FdGrid>, CliError> {
    let base = match &args.grid {
        Some(g) => Some(parse_range(g, "--grid")?),
        None => None,
    };
    if base.is_none() && args.grid_points.is_none() {
        return Ok(None);
    }
    let d = default_oracle(spec, states);
    let (lo, hi, n) = base.unwrap_or((d.lo, d.hi, d.n_points));
    Ok(Some(FdGrid::new(lo, hi, args.grid_points.unwrap_or(n))?))
}

/// `(e(h) - exact) / (e(h/2) - exact)` for the ground state.
fn convergence_ratio(spec: &PotentialSpec, grid: FdGrid, exact: f64) -> f64 {
    let v = |xb: f64| spec.v(xb);
    let e = |g: &FdGrid| fd_eigenvalues(&v, g, f64::INFINITY, 1).first().copied().unwrap_or(f64::NAN);
    (e(&grid) - exact) / (e(&grid.refined()) - exact)
}

fn scattering_checks(spec: &PotentialSpec, checks: &mut Vec<Check>) -> Result<(), CliError> {
    match spec.kind {
        PotentialKind::Harmonic => {}
        PotentialKind::Morse => {
            let lam = spec.lambda().unwrap_or(f64::NAN);
            // sample where e^(s/2) s^(-1/2-Lambda) has grown well past its minimum
            let mut s_far = 40.0f64;
            while s_far / 2.0 - (lam + 0.5) * s_far.ln() < 25.0 {
                s_far *= 1.5;
            }
            let far = spec.from_reduced(spec.tau.inverse(s_far));
            let reference: Vec<f64> = (1..=8).map(|i| spec.from_reduced(spec.tau.inverse(0.5 * i as f64))).collect();
            let mut pass = true;
            let mut notes = Vec::new();
            for f in [1.5, 3.0] {
                let eps = f * lam * lam;
                let st = scattering_states(spec, eps)?;
                pass &= st.degeneracy == 0;
                for sol in &st.solutions {
                    let sampled = sampled_bounded(|x| sol.sampler.call(x), far, &reference);
                    pass &= !sol.bounded() && sampled == sol.bounded_at_minus_inf;
                    notes.push(format!("eps={eps}: {} bounded={} sampled(s={s_far:.0})={sampled}", sol.label, sol.bounded()));
                }
            }
            checks.push(Check::flag("no_scattering_states", pass, notes.join("; ")));

            let ks = morse_integer_k_checks(spec)?;
            let pass = ks
                .iter()
                .all(|c| !c.square_integrable && (c.measured_exponent - c.predicted_exponent).abs() <= 0.05);
            let detail = if ks.is_empty() {
                "no integer k below 2 Lambda".into()
            } else {
                ks.iter()
                    .map(|c| format!("k={} {}: exponent {:.4} vs {:.4}", c.k, c.method, c.measured_exponent, c.predicted_exponent))
                    .collect::<Vec<_>>()
                    .join("; ")
            };
            checks.push(Check::flag("integer_k_second_solution", pass, detail));
        }
        PotentialKind::RosenMorse2 => {
            let (_, vm, vp) = spec.regions();
            let reference: Vec<f64> = (0..=16).map(|i| spec.from_reduced(-4.0 + 0.5 * i as f64)).collect();
            let (left, right) = (spec.from_reduced(-12.0), spec.from_reduced(12.0));
            let mut pass = true;
            let mut notes = Vec::new();
            for (eps, want) in [(0.5 * (vm + vp), 1), (vp + 1.0, 2)] {
                let st = scattering_states(spec, eps)?;
                pass &= st.degeneracy == want;
                for sol in &st.solutions {
                    let f = |x: f64| sol.sampler.call(x);
                    pass &= sampled_bounded(f, left, &reference) == sol.bounded_at_minus_inf
                        && sampled_bounded(f, right, &reference) == sol.bounded_at_plus_inf;
                }
                notes.push(format!("eps={eps}: degeneracy {} (expected {want})", st.degeneracy));
            }
            checks.push(Check::flag("scattering_degeneracy", pass, notes.join("; ")));
        }
    }
    Ok(())
}

pub fn run(args: &VerifyArgs) -> Result<(), CliError> {
    format_or(args.io.format, Format::Json, &[Format::Json])?;
    let spec = PotentialSpec::from_params(&args.potential.potential, &args.potential.params)?;
    let tol = tolerance(args.tol, default_spectrum_tol(spec.kind))?;
    let states = bound_spectrum(&spec, args.n_max)?;
    let grid = grid_override(args, &spec, &states)?;
    let mut checks = Vec::new();

    let mut spectra = Spectra::default();
    match run_oracle(&spec, &states, grid) {
        Ok((o, k_max)) => {
            spectra.analytic = states.iter().take(k_max).map(|s| s.eps_n).collect();
            spectra.oracle = o.eigenvalues.clone();
            spectra.rel_err = spectra.analytic.iter().zip(&o.eigenvalues).map(|(&a, &b)| rel_err(a, b)).collect();
            spectra.grid = Some([o.grid.lo, o.grid.hi, o.grid.n_points as f64]);
            let count_ok = o.eigenvalues.len() == k_max;
            let worst = max_of(spectra.rel_err.iter().copied());
            checks.push(Check {
                name: "spectrum_vs_oracle",
                pass: count_ok && worst <= tol,
                value: Some(worst),
                tolerance: Some(tol),
                detail: format!("count analytic={k_max} oracle={}", o.eigenvalues.len()),
            });
            let exact = states[0].eps_n;
            let ratio = convergence_ratio(&spec, o.grid, exact);
            checks.push(Check {
                name: "fd_convergence_order",
                pass: (ORDER_RANGE.0..=ORDER_RANGE.1).contains(&ratio),
                value: Some(ratio),
                tolerance: None,
                detail: format!("ground-state error ratio between h and h/2, accepted {ORDER_RANGE:?}"),
            });
        }
        Err(e) => {
            spectra.analytic = states.iter().map(|s| s.eps_n).collect();
            spectra.error = Some(e.to_string());
            checks.push(Check::flag("spectrum_vs_oracle", false, e.to_string()));
        }
    }

    let defects: Vec<f64> = states.iter().map(|s| norm_defect(&spec, s)).collect::<Result<_, _>>()?;
    checks.push(Check::bound("normalization", max_of(defects.iter().copied()), NORM_TOL, format!("{} states", states.len())));

    let mut worst = 0.0f64;
    for (i, a) in states.iter().enumerate() {
        for b in &states[..i] {
            worst = worst.max(overlap(&spec, a, b)?.abs());
        }
    }
    checks.push(Check::bound("orthogonality", worst, NORM_TOL, "max |<m|n>| over m < n".into()));

    let xs: Vec<f64> = (0..25).map(|i| spec.from_reduced(-3.0 + 0.25 * i as f64)).collect();
    let residuals: Vec<f64> = states
        .iter()
        .map(|s| wavefunction_residual(&spec, |x| s.sampler.call(x), s.eps_n, &xs))
        .collect();
    checks.push(Check::bound(
        "wavefunction_residual",
        max_of(residuals.iter().copied()),
        RESIDUAL_TOL,
        "5-point residual on 25 points".into(),
    ));

    let lam = max_of(states.iter().map(|s| s.lambda_residual));
    checks.push(Check::bound("lambda_equation", lam, LAMBDA_TOL, "|lambda(eps_n) - lambda_n|".into()));

    let (vmin, _, _) = spec.regions();
    let inside = states.iter().all(|s| s.eps_n > vmin && s.eps_n < spec.ceiling())
        && states.windows(2).all(|w| w[0].eps_n < w[1].eps_n);
    checks.push(Check::flag(
        "energies_in_region",
        inside,
        format!("increasing and inside ({vmin}, {})", spec.ceiling()),
    ));

    scattering_checks(&spec, &mut checks)?;

    let pass = checks.iter().all(|c| c.pass);
    let tolerances = BTreeMap::from([
        ("spectrum", tol),
        ("normalization", NORM_TOL),
        ("orthogonality", NORM_TOL),
        ("residual", RESIDUAL_TOL),
        ("lambda_equation", LAMBDA_TOL),
    ]);
    let report = VerifyReport {
        schema_version: 1,
        command: "verify",
        potential: spec.kind.name(),
        params: spec.params.clone(),
        tolerances,
        spectra,
        normalization_defects: defects,
        residuals,
        checks,
        pass,
    };
    emit(args.io.output.as_deref(), &to_json(&report))?;
    if pass {
        Ok(())
    } else {
        let failed: Vec<&str> = report.checks.iter().filter(|c| !c.pass).map(|c| c.name).collect();
        Err(CliError::Verification(format!("failed checks: {}", failed.join(", "))))
    }
}
