use std::fmt::Write as _;
use std::fs;

use nu_core::classify_canonical;
use nu_core::potentials::build_ghe;
use nu_core::reduction::{key_identity_residual, reduce, GheProblem, Reduction, DEFAULT_PROBES};
use nu_core::surd::render_poly;
use nu_core::PotentialSpec;
use serde::Serialize;

use crate::output::{emit, format_or, parse_list, to_json, CliError};
use crate::{Format, ReduceArgs};

#[derive(Serialize)]
struct BranchOut {
    label: String,
    k0: String,
    sign: String,
    pi: String,
    psi: String,
    lambda: String,
    chi: String,
    omega: String,
    omega_tilde: String,
    key_identity_exact: bool,
    admissible: bool,
    reason: String,
}

#[derive(Serialize)]
struct ClassicalOut {
    family: String,
    /// Canonical variable `x = scale * s + shift`.
    scale: String,
    shift: String,
    lambda_n: Vec<String>,
}

#[derive(Serialize)]
struct ReduceReport {
    schema_version: u32,
    command: &'static str,
    ghe: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    tau: Option<String>,
    probes: Vec<f64>,
    k0: Vec<String>,
    branches: Vec<BranchOut>,
    selected: Option<String>,
    selection: String,
    classical: Option<ClassicalOut>,
}

fn report(red: &Reduction, probes: Vec<f64>, tau: Option<String>) -> ReduceReport {
    let ghe = &red.ghe;
    let branches = red
        .branches
        .iter()
        .zip(&red.verdicts)
        .map(|(b, v)| BranchOut {
            label: b.label.clone(),
            k0: b.k0.render(),
            sign: b.sign.to_string(),
            pi: render_poly(&b.pi, "s"),
            psi: render_poly(&b.psi, "s"),
            lambda: b.lambda.render(),
            chi: b.chi.render("s"),
            omega: b.weight.render("s"),
            omega_tilde: b.weight_tilde.render("s"),
            key_identity_exact: key_identity_residual(ghe, &b.pi, &b.lambda).is_zero(),
            admissible: v.admissible,
            reason: v.reason.clone(),
        })
        .collect();
    let (selected, selection, classical) = match &red.selected {
        Ok(b) => {
            let reason = red
                .verdicts
                .iter()
                .find(|v| v.label == b.label)
                .map(|v| v.reason.clone())
                .unwrap_or_default();
            let classical = classify_canonical(&ghe.phi, &b.psi, ghe.interval).ok().map(|c| ClassicalOut {
                family: c.family.to_string(),
                scale: c.scale.render(),
                shift: c.shift.render(),
                lambda_n: (0..4).map(|n| c.lambda_working(n).render()).collect(),
            });
            (Some(b.label.clone()), reason, classical)
        }
        Err(e) => (None, e.to_string(), None),
    };
    ReduceReport {
        schema_version: 1,
        command: "reduce",
        ghe: ghe.to_text(),
        tau,
        probes,
        k0: red.k0.iter().map(|k| k.render()).collect(),
        branches,
        selected,
        selection,
        classical,
    }
}

fn text(r: &ReduceReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "ghe: {}", r.ghe);
    if let Some(t) = &r.tau {
        let _ = writeln!(s, "tau: {t}");
    }
    let _ = writeln!(s, "k0: {}", r.k0.join(", "));
    for b in &r.branches {
        let _ = writeln!(s, "branch {} (k0 = {}, sign {})", b.label, b.k0, b.sign);
        let _ = writeln!(s, "  pi      = {}", b.pi);
        let _ = writeln!(s, "  psi     = {}", b.psi);
        let _ = writeln!(s, "  lambda  = {}", b.lambda);
        let _ = writeln!(s, "  chi     = {}", b.chi);
        let _ = writeln!(s, "  omega   = {}", b.omega);
        let _ = writeln!(s, "  omega~  = {}", b.omega_tilde);
        let id = if b.key_identity_exact { "exact" } else { "FAILED" };
        let _ = writeln!(s, "  identity: {id}");
        let verdict = if b.admissible { "admissible" } else { "rejected" };
        let _ = writeln!(s, "  {verdict}: {}", b.reason);
    }
    match &r.selected {
        Some(l) => {
            let _ = writeln!(s, "selected: {l} ({})", r.selection);
        }
        None => {
            let _ = writeln!(s, "selected: none ({})", r.selection);
        }
    }
    if let Some(c) = &r.classical {
        let _ = writeln!(s, "classical: {} with x = ({})*s + ({})", c.family, c.scale, c.shift);
        let _ = writeln!(s, "lambda_n (n = 0..3): {}", c.lambda_n.join("; "));
    }
    s
}

pub fn run(args: &ReduceArgs) -> Result<(), CliError> {
    let format = format_or(args.io.format, Format::Text, &[Format::Text, Format::Json])?;
    let (ghe, mut probes, tau) = match (&args.ghe, &args.ghe_file, &args.potential) {
        (Some(t), None, None) => (GheProblem::parse(t)?, DEFAULT_PROBES.to_vec(), None),
        (None, Some(p), None) => {
            let t = fs::read_to_string(p).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", p.display())))?;
            (GheProblem::parse(&t)?, DEFAULT_PROBES.to_vec(), None)
        }
        (None, None, Some(name)) => {
            let spec = PotentialSpec::from_params(name, args.params.as_deref().unwrap_or(""))?;
            (build_ghe(&spec)?, spec.probes(), Some(spec.tau.formula()))
        }
        _ => return Err(CliError::Usage("give exactly one of --ghe, --ghe-file or --potential".into())),
    };
    if let Some(p) = &args.probes {
        probes = parse_list(p, "probe")?;
    }
    let red = reduce(&ghe, &probes)?;
    let rep = report(&red, probes, tau);
    let out = match format {
        Format::Json => to_json(&rep),
        _ => text(&rep),
    };
    emit(args.io.output.as_deref(), &out)?;
    match &red.selected {
        Ok(_) => Ok(()),
        Err(e) => Err(CliError::Domain(e.to_string())),
    }
}
