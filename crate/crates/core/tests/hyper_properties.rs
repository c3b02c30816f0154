use nu_core::hyper::{gamma, hermite_fn, hyp1f1, hyp1f1_regularized, hyp2f1, hyp2f1_regularized, hyp_u};
use num_complex::Complex64 as C;
use proptest::prelude::*;

fn r(x: f64) -> C {
    C::new(x, 0.0)
}

fn rel(a: C, b: C) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

/// Five-point first and second derivatives with step `h * max(1, |z|)`.
fn derivs(f: impl Fn(f64) -> C, z: f64, h: f64) -> (C, C, C) {
    let h = h * z.abs().max(1.0);
    let (m2, m1, f0, p1, p2) = (f(z - 2.0 * h), f(z - h), f(z), f(z + h), f(z + 2.0 * h));
    let d1 = (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h);
    let d2 = (-m2 + 16.0 * m1 - 30.0 * f0 + 16.0 * p1 - p2) / (12.0 * h * h);
    (f0, d1, d2)
}

/// `|sum terms| / max(|f|, max |term|)`; `|f|` keeps the ratio finite when
/// every term vanishes, as for a constant solution.
fn residual(f: C, terms: &[C]) -> f64 {
    let scale = terms.iter().map(|t| t.norm()).fold(f.norm(), f64::max);
    terms.iter().sum::<C>().norm() / scale.max(1e-300)
}

fn cplx(re: std::ops::Range<f64>, im: std::ops::Range<f64>) -> impl Strategy<Value = C> {
    (re, im).prop_map(|(x, y)| C::new(x, y))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn gauss_ode_residual(a in cplx(-2.0..2.0, -1.0..1.0), b in cplx(-2.0..2.0, -1.0..1.0),
                          c in 0.3f64..3.0, z in -3.0f64..0.85) {
        let c = r(c);
        let (f, d1, d2) = derivs(|t| hyp2f1(a, b, c, t).unwrap().value, z, 2e-3);
        let res = residual(f, &[z * (1.0 - z) * d2, (c - (a + b + 1.0) * z) * d1, -a * b * f]);
        prop_assert!(res <= 1e-6, "residual {res}");
    }

    #[test]
    fn kummer_ode_residual(a in cplx(-3.0..3.0, -1.0..1.0), c in 0.2f64..4.0, z in -10.0f64..10.0) {
        let c = r(c);
        let (f, d1, d2) = derivs(|t| hyp1f1(a, c, t).unwrap().value, z, 2e-3);
        let res = residual(f, &[z * d2, (c - z) * d1, -a * f]);
        prop_assert!(res <= 1e-6, "residual {res}");
    }

    #[test]
    fn tricomi_ode_residual(a in 0.1f64..3.0, c in -1.0f64..3.0, z in 0.3f64..15.0) {
        let (a, c) = (r(a), r(c));
        let (f, d1, d2) = derivs(|t| hyp_u(a, c, t).unwrap().value, z, 2e-3);
        let res = residual(f, &[z * d2, (c - z) * d1, -a * f]);
        prop_assert!(res <= 1e-6, "residual {res}");
    }

    #[test]
    fn hermite_ode_residual(nu in -5.0f64..5.0, z in -3.0f64..5.0) {
        let nu = r(nu);
        let (f, d1, d2) = derivs(|t| hermite_fn(nu, t).unwrap().value, z, 2e-3);
        let res = residual(f, &[d2, -2.0 * z * d1, 2.0 * nu * f]);
        prop_assert!(res <= 1e-6, "residual {res}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn gauss_derivative_relation(a in -2.0f64..2.0, b in -2.0f64..2.0, c in 0.3f64..3.0, z in -2.0f64..0.8) {
        let (a, b, c) = (r(a), r(b), r(c));
        let (_, fd, _) = derivs(|t| hyp2f1(a, b, c, t).unwrap().value, z, 1e-3);
        let want = a * b / c * hyp2f1(a + 1.0, b + 1.0, c + 1.0, z).unwrap().value;
        prop_assert!((fd - want).norm() <= 1e-7 * want.norm().max(1.0), "{fd} vs {want}");
    }

    #[test]
    fn gauss_contiguous_relation(a in cplx(-2.0..2.0, -0.5..0.5), b in -2.0f64..2.0,
                                 c in -2.5f64..3.0, z in -1.5f64..0.8) {
        let (b, c) = (r(b), r(c));
        let reg = |a: C, b: C, c: C| hyp2f1_regularized(a, b, c, z).unwrap().value;
        let lhs = reg(a, b, c);
        let rhs = (a + 1.0) * (b + 1.0) * z * (1.0 - z) * reg(a + 2.0, b + 2.0, c + 2.0)
            + (c - (a + b + 1.0) * z) * reg(a + 1.0, b + 1.0, c + 1.0);
        let scale = lhs.norm().max(rhs.norm()).max(1.0);
        prop_assert!((lhs - rhs).norm() <= 1e-10 * scale, "{lhs} vs {rhs}");
    }

    #[test]
    fn kummer_transformation(a in cplx(-3.0..3.0, -1.0..1.0), c in 0.2f64..4.0, z in -8.0f64..8.0) {
        let c = r(c);
        let lhs = hyp1f1(a, c, z).unwrap().value;
        let rhs = z.exp() * hyp1f1(c - a, c, -z).unwrap().value;
        let scale = lhs.norm().max(1.0);
        prop_assert!((lhs - rhs).norm() <= 1e-11 * scale, "{lhs} vs {rhs}");
    }

    #[test]
    fn tricomi_functional_equation(a in 0.1f64..3.0, c in -1.5f64..3.0, z in 0.2f64..20.0) {
        let (a, c) = (r(a), r(c));
        let lhs = hyp_u(a, c, z).unwrap().value;
        let rhs = ((1.0 - c) * z.ln()).exp() * hyp_u(a - c + 1.0, 2.0 - c, z).unwrap().value;
        prop_assert!(rel(lhs, rhs) <= 1e-9, "{lhs} vs {rhs}");
    }

    #[test]
    fn plain_is_regularized_times_gamma(a in -2.0f64..2.0, b in -2.0f64..2.0, c in 0.2f64..3.5, z in -2.0f64..0.9) {
        let (a, b, c) = (r(a), r(b), r(c));
        let g = gamma(c).unwrap();
        let p = hyp2f1(a, b, c, z).unwrap().value;
        let q = hyp2f1_regularized(a, b, c, z).unwrap().value * g;
        prop_assert!((p - q).norm() <= 1e-12 * p.norm().max(1.0));
        let p = hyp1f1(a, c, 3.0 * z).unwrap().value;
        let q = hyp1f1_regularized(a, c, 3.0 * z).unwrap().value * g;
        prop_assert!((p - q).norm() <= 1e-12 * p.norm().max(1.0));
    }
}

#[test]
fn hermite_recurrence_at_negative_integers() {
    for z in [-2.0, -0.4, 0.0, 0.7, 1.9, 3.4, 5.0] {
        for n in 0..6 {
            let nu = -(n as f64);
            let h = |v: f64| hermite_fn(r(v), z).unwrap().value;
            let lhs = h(nu);
            let rhs = 2.0 * z * h(nu - 1.0) - (2.0 * nu - 2.0) * h(nu - 2.0);
            let scale = lhs.norm().max((2.0 * z * h(nu - 1.0)).norm());
            assert!((lhs - rhs).norm() <= 1e-10 * scale, "nu={nu} z={z}: {lhs} vs {rhs}");
        }
    }
}
