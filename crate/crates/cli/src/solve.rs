use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;

use nu_core::oracle::{fd_bound_states, rel_err, FdGrid, OracleSpectrum, DEFAULT_GRID_TOL};
use nu_core::poly::fmt_q;
use nu_core::potentials::{default_oracle, norm_defect};
use nu_core::{bound_spectrum, BoundState, PotentialKind, PotentialSpec};
use serde::Serialize;

use crate::output::{emit, format_or, num, parse_range, to_json, tolerance, CliError};
use crate::{Format, SolveArgs};

/// Default relative tolerance for agreement with the oracle.
pub fn default_spectrum_tol(kind: PotentialKind) -> f64 {
    match kind {
        PotentialKind::Harmonic => 1e-5,
        _ => 1e-4,
    }
}

/// Oracle eigenvalues on the default box, or on `grid` when given.
pub fn run_oracle(
    spec: &PotentialSpec,
    states: &[BoundState],
    grid: Option<FdGrid>,
) -> Result<(OracleSpectrum, usize), CliError> {
    let setup = default_oracle(spec, states);
    let grid = match grid {
        Some(g) => g,
        None => FdGrid::new(setup.lo, setup.hi, setup.n_points)?,
    };
    let v = |xb: f64| spec.v(xb);
    let spectrum = fd_bound_states(v, grid, setup.threshold, setup.k_max, DEFAULT_GRID_TOL)?;
    Ok((spectrum, setup.k_max))
}

#[derive(Serialize)]
struct Row {
    n: usize,
    eps_n: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    eps_exact: Option<String>,
    #[serde(rename = "E_n")]
    energy: f64,
    norm_defect: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle_eps_n: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rel_err: Option<f64>,
}

#[derive(Serialize)]
struct OracleOut {
    lo: f64,
    hi: f64,
    n_points: usize,
    threshold: f64,
    compared: usize,
    max_rel_err: f64,
    tolerance: f64,
    pass: bool,
}

#[derive(Serialize)]
struct SolveReport {
    schema_version: u32,
    command: &'static str,
    potential: &'static str,
    params: BTreeMap<String, f64>,
    ceiling: f64,
    states: Vec<Row>,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle: Option<OracleOut>,
}

fn default_sample_range(spec: &PotentialSpec) -> (f64, f64, usize) {
    let (lo, hi) = match spec.kind {
        PotentialKind::Harmonic => (-6.0, 6.0),
        PotentialKind::Morse => (-1.5, 8.0),
        PotentialKind::RosenMorse2 => (-10.0, 10.0),
    };
    (spec.from_reduced(lo), spec.from_reduced(hi), 201)
}

fn write_samples(args: &SolveArgs, spec: &PotentialSpec, states: &[BoundState]) -> Result<(), CliError> {
    let Some(dir) = &args.samples else { return Ok(()) };
    let (lo, hi, count) = match &args.sample_range {
        Some(r) => parse_range(r, "--sample-range")?,
        None => default_sample_range(spec),
    };
    fs::create_dir_all(dir).map_err(|e| CliError::Usage(format!("cannot create {}: {e}", dir.display())))?;
    for st in states {
        let mut s = String::from("x,psi_n(x)\n");
        for i in 0..count {
            let x = lo + (hi - lo) * i as f64 / (count - 1) as f64;
            let _ = writeln!(s, "{},{}", num(x), num(st.sampler.call(x)));
        }
        let path = dir.join(format!("psi_{}.csv", st.n));
        emit(Some(&path), &s)?;
    }
    Ok(())
}

fn write_poly_dump(args: &SolveArgs, states: &[BoundState]) -> Result<(), CliError> {
    let Some(path) = &args.poly_dump else { return Ok(()) };
    let mut s = String::from("n,coefficients\n");
    for st in states {
        let cs: Vec<String> = st.poly.coeffs.coeffs().iter().map(|&c| num(c)).collect();
        let _ = writeln!(s, "{},{}", st.n, cs.join(","));
    }
    emit(Some(path), &s)
}

pub fn run(args: &SolveArgs) -> Result<(), CliError> {
    let format = format_or(args.io.format, Format::Csv, &[Format::Csv, Format::Json])?;
    let spec = PotentialSpec::from_params(&args.potential.potential, &args.potential.params)?;
    let tol = tolerance(args.tol, default_spectrum_tol(spec.kind))?;
    let states = bound_spectrum(&spec, args.n_max)?;

    let mut rows = Vec::with_capacity(states.len());
    for st in &states {
        rows.push(Row {
            n: st.n,
            eps_n: st.eps_n,
            eps_exact: st.eps_exact.as_ref().map(fmt_q),
            energy: st.energy,
            norm_defect: norm_defect(&spec, st)?,
            oracle_eps_n: None,
            rel_err: None,
        });
    }

    let mut failure = None;
    let oracle = if args.with_oracle {
        let (spectrum, k_max) = run_oracle(&spec, &states, None)?;
        if spectrum.eigenvalues.len() != k_max {
            failure = Some(format!(
                "oracle found {} levels below {}, expected {k_max}",
                spectrum.eigenvalues.len(),
                spectrum.below_threshold
            ));
        }
        let mut max_rel_err = 0.0f64;
        for (row, &o) in rows.iter_mut().zip(&spectrum.eigenvalues) {
            let e = rel_err(row.eps_n, o);
            max_rel_err = max_rel_err.max(e);
            row.oracle_eps_n = Some(o);
            row.rel_err = Some(e);
        }
        if max_rel_err > tol && failure.is_none() {
            failure = Some(format!("oracle relative error {max_rel_err:e} exceeds {tol:e}"));
        }
        let g = spectrum.grid;
        Some(OracleOut {
            lo: g.lo,
            hi: g.hi,
            n_points: g.n_points,
            threshold: spectrum.below_threshold,
            compared: spectrum.eigenvalues.len(),
            max_rel_err,
            tolerance: tol,
            pass: failure.is_none(),
        })
    } else {
        None
    };

    let out = match format {
        Format::Json => to_json(&SolveReport {
            schema_version: 1,
            command: "solve",
            potential: spec.kind.name(),
            params: spec.params.clone(),
            ceiling: spec.ceiling(),
            states: rows,
            oracle,
        }),
        _ => {
            let mut s = String::from("n,eps_n,E_n,norm_defect");
            if args.with_oracle {
                s.push_str(",oracle_eps_n,rel_err");
            }
            s.push('\n');
            for r in &rows {
                let _ = write!(s, "{},{},{},{}", r.n, num(r.eps_n), num(r.energy), num(r.norm_defect));
                if args.with_oracle {
                    let opt = |v: Option<f64>| v.map(num).unwrap_or_default();
                    let _ = write!(s, ",{},{}", opt(r.oracle_eps_n), opt(r.rel_err));
                }
                s.push('\n');
            }
            s
        }
    };
    emit(args.io.output.as_deref(), &out)?;
    write_samples(args, &spec, &states)?;
    write_poly_dump(args, &states)?;
    match failure {
        Some(m) => Err(CliError::Verification(m)),
        None => Ok(()),
    }
}
