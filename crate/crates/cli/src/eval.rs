use std::fmt::Write as _;

use nu_core::hyper::{
    hermite_fn, hyp1f1, hyp1f1_regularized, hyp2f1, hyp2f1_regularized, hyp_u, limit_2f1_at_1, Limit2F1,
    SeriesResult,
};
use nu_core::HyperError;
use num_complex::Complex64 as C;
use serde::Serialize;

use crate::output::{emit, format_or, num, to_json, CliError};
use crate::{EvalArgs, Format, Function};

/// Parses `1.5`, `-2`, `2i`, `0.5+2i`, `1e-3-4.5e2i`.
pub fn parse_complex(s: &str) -> Option<C> {
    let s = s.trim();
    let Some(body) = s.strip_suffix('i') else {
        return s.parse().ok().map(|re| C::new(re, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let coeff = |t: &str| -> Option<f64> {
        match t {
            "" | "+" => Some(1.0),
            "-" => Some(-1.0),
            _ => t.parse().ok(),
        }
    };
    match split {
        Some(i) => Some(C::new(body[..i].parse().ok()?, coeff(&body[i..])?)),
        None => Some(C::new(0.0, coeff(body)?)),
    }
}

fn param(name: &str, v: &Option<String>) -> Result<C, CliError> {
    let s = v
        .as_deref()
        .ok_or_else(|| CliError::Usage(format!("--{name} is required for this function")))?;
    parse_complex(s).ok_or_else(|| CliError::Usage(format!("--{name}: cannot parse '{s}'")))
}

fn z_arg(args: &EvalArgs) -> Result<f64, CliError> {
    args.z.ok_or_else(|| CliError::Usage("--z is required for this function".into()))
}

fn reject(name: &str, v: &Option<impl Sized>) -> Result<(), CliError> {
    match v {
        Some(_) => Err(CliError::Usage(format!("--{name} is not used by this function"))),
        None => Ok(()),
    }
}

#[derive(Serialize)]
struct Complex {
    re: f64,
    im: f64,
}

impl From<C> for Complex {
    fn from(c: C) -> Self {
        Complex { re: c.re, im: c.im }
    }
}

#[derive(Serialize)]
struct EvalReport {
    schema_version: u32,
    command: &'static str,
    function: String,
    value: Complex,
    terms_used: usize,
    truncation_estimate: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    regime: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    exponent: Option<Complex>,
}

fn limit_report(l: Limit2F1) -> (String, C, Option<C>) {
    match l {
        Limit2F1::Finite(v) => ("finite".into(), v, None),
        Limit2F1::Log { coefficient } => ("log".into(), coefficient, None),
        Limit2F1::BoundedOscillatory { finite_part, .. } => ("bounded-oscillatory".into(), finite_part, None),
        Limit2F1::PowerDivergent { exponent, constant } => ("power-divergent".into(), constant, Some(exponent)),
    }
}

fn series(r: Result<SeriesResult, HyperError>) -> Result<SeriesResult, CliError> {
    Ok(r?)
}

pub fn run(args: &EvalArgs) -> Result<(), CliError> {
    let format = format_or(args.io.format, Format::Text, &[Format::Text, Format::Json])?;
    let name = match args.function {
        Function::Hyp2f1 => "2f1",
        Function::Hyp2f1Regularized => "2f1r",
        Function::Hyp2f1Limit => "2f1-limit",
        Function::Hyp1f1 => "1f1",
        Function::Hyp1f1Regularized => "1f1r",
        Function::TricomiU => "u",
        Function::Hermite => "hermite",
    };
    let (mut regime, mut exponent) = (None, None);
    let r = match args.function {
        Function::Hyp2f1 | Function::Hyp2f1Regularized | Function::Hyp2f1Limit => {
            reject("nu", &args.nu)?;
            let (a, b, c) = (param("a", &args.a)?, param("b", &args.b)?, param("c", &args.c)?);
            match args.function {
                Function::Hyp2f1 => series(hyp2f1(a, b, c, z_arg(args)?))?,
                Function::Hyp2f1Regularized => series(hyp2f1_regularized(a, b, c, z_arg(args)?))?,
                _ => {
                    reject("z", &args.z)?;
                    let (kind, v, e) = limit_report(limit_2f1_at_1(a, b, c));
                    regime = Some(kind);
                    exponent = e.map(Complex::from);
                    SeriesResult::exact(v)
                }
            }
        }
        Function::Hyp1f1 | Function::Hyp1f1Regularized | Function::TricomiU => {
            reject("b", &args.b)?;
            reject("nu", &args.nu)?;
            let (a, c, z) = (param("a", &args.a)?, param("c", &args.c)?, z_arg(args)?);
            match args.function {
                Function::Hyp1f1 => series(hyp1f1(a, c, z))?,
                Function::Hyp1f1Regularized => series(hyp1f1_regularized(a, c, z))?,
                _ => series(hyp_u(a, c, z))?,
            }
        }
        Function::Hermite => {
            reject("a", &args.a)?;
            reject("b", &args.b)?;
            reject("c", &args.c)?;
            series(hermite_fn(param("nu", &args.nu)?, z_arg(args)?))?
        }
    };
    let out = match format {
        Format::Json => to_json(&EvalReport {
            schema_version: 1,
            command: "eval",
            function: name.into(),
            value: r.value.into(),
            terms_used: r.terms_used,
            truncation_estimate: r.truncation_estimate,
            regime,
            exponent,
        }),
        _ => {
            let mut s = String::new();
            let _ = writeln!(s, "function = {name}");
            if let Some(k) = &regime {
                let _ = writeln!(s, "regime = {k}");
            }
            if let Some(e) = &exponent {
                let _ = writeln!(s, "exponent = {},{}", num(e.re), num(e.im));
            }
            let _ = writeln!(s, "value_re = {}", num(r.value.re));
            let _ = writeln!(s, "value_im = {}", num(r.value.im));
            let _ = writeln!(s, "terms_used = {}", r.terms_used);
            let _ = writeln!(s, "truncation_estimate = {}", num(r.truncation_estimate));
            s
        }
    };
    emit(args.io.output.as_deref(), &out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_literals() {
        assert_eq!(parse_complex("1.5"), Some(C::new(1.5, 0.0)));
        assert_eq!(parse_complex("-2"), Some(C::new(-2.0, 0.0)));
        assert_eq!(parse_complex("2i"), Some(C::new(0.0, 2.0)));
        assert_eq!(parse_complex("-i"), Some(C::new(0.0, -1.0)));
        assert_eq!(parse_complex("0.5+2i"), Some(C::new(0.5, 2.0)));
        assert_eq!(parse_complex("1e-3-4.5e2i"), Some(C::new(1e-3, -450.0)));
        assert_eq!(parse_complex("-1e+2+1e-1i"), Some(C::new(-100.0, 0.1)));
        assert_eq!(parse_complex("x"), None);
        assert_eq!(parse_complex("1+xi"), None);
    }
}
