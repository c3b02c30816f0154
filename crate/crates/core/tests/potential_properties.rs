use nu_core::hyper::rgamma;
use nu_core::oracle::{fd_eigenvalues, gauss_kronrod, FdGrid};
use nu_core::potentials::{
    bound_spectrum, morse_integer_k_checks, reduce_potential, sampled_bounded, scattering_states, wavefunction_residual,
    BoundState, PotentialSpec,
};
use nu_core::surd::eval_poly;
use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn overlap(spec: &PotentialSpec, a: &BoundState, b: &BoundState) -> f64 {
    // integrate in the reduced coordinate and convert back
    let f = |xb: f64| {
        let x = spec.from_reduced(xb);
        a.sampler.call(x) * b.sampler.call(x)
    };
    gauss_kronrod(f, f64::NEG_INFINITY, f64::INFINITY, 1e-13).unwrap().value / spec.jacobian()
}

fn specs() -> Vec<PotentialSpec> {
    vec![
        PotentialSpec::harmonic(1.0, 1.0, 1.0).unwrap(),
        PotentialSpec::harmonic(2.0, 0.7, 1.3).unwrap(),
        PotentialSpec::morse_lambda(5.0).unwrap(),
        PotentialSpec::morse(10.0, 1.3, 0.4, 2.0, 1.0).unwrap(),
        PotentialSpec::rosen_morse2(4.0, 0.5).unwrap(),
        PotentialSpec::rosen_morse2(30.0, 0.4).unwrap(),
    ]
}

#[test]
fn states_are_normalized_and_orthogonal() {
    for spec in specs() {
        let states = bound_spectrum(&spec, 8).unwrap();
        for (i, a) in states.iter().enumerate() {
            let norm = overlap(&spec, a, a);
            assert!((norm - 1.0).abs() <= 1e-8, "{} n={}: {norm}", spec.kind, a.n);
            for b in &states[..i] {
                let o = overlap(&spec, a, b);
                assert!(o.abs() <= 1e-8, "{} <{}|{}> = {o}", spec.kind, a.n, b.n);
            }
        }
    }
}

#[test]
fn energies_inside_the_bound_region_and_increasing() {
    for spec in specs() {
        let (vmin, _, _) = spec.regions();
        let states = bound_spectrum(&spec, 30).unwrap();
        for w in states.windows(2) {
            assert!(w[0].eps_n < w[1].eps_n);
        }
        for st in &states {
            assert!(st.eps_n > vmin && st.eps_n < spec.ceiling(), "{} {}", spec.kind, st.eps_n);
        }
    }
}

#[test]
fn dimensionless_maps_round_trip() {
    for spec in specs() {
        for st in bound_spectrum(&spec, 6).unwrap() {
            let back = spec.reduced_energy(st.energy);
            assert!((back - st.eps_n).abs() <= 1e-13 * st.eps_n.abs().max(1.0));
        }
        for x in [-1.5, 0.2, 3.0] {
            assert!((spec.from_reduced(spec.to_reduced(x)) - x).abs() <= 1e-14 * x.abs().max(1.0));
        }
    }
    // E_n = hbar Omega (n + 1/2)
    let h = PotentialSpec::harmonic(1.7, 3.0, 2.0).unwrap();
    for st in bound_spectrum(&h, 5).unwrap() {
        let want = 2.0 * 3.0 * (st.n as f64 + 0.5);
        assert!((st.energy - want).abs() <= 1e-13 * want);
    }
}

#[test]
fn morse_physical_energies_match_the_anharmonic_formula() {
    // E_n = hbar w (n + 1/2) - (hbar w (n + 1/2))^2 / (4 D_e), w = a sqrt(2 D_e / m)
    let (d_e, a, m, hbar) = (10.0, 1.3, 2.0, 1.1);
    let spec = PotentialSpec::morse(d_e, a, 0.4, m, hbar).unwrap();
    let w = a * (2.0 * d_e / m).sqrt();
    let states = bound_spectrum(&spec, 50).unwrap();
    let lam = spec.lambda().unwrap();
    assert_eq!(states.len(), (lam - 0.5).floor() as usize + 1);
    for st in states {
        let e0 = hbar * w * (st.n as f64 + 0.5);
        let want = e0 - e0 * e0 / (4.0 * d_e);
        assert!((st.energy - want).abs() <= 1e-12 * want.abs(), "{} vs {want}", st.energy);
    }
}

#[test]
fn morse_count_matches_fd_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let lam: f64 = rng.gen_range(0.6..20.0);
        let spec = PotentialSpec::morse_lambda(lam).unwrap();
        let states = bound_spectrum(&spec, 100).unwrap();
        assert_eq!(states.len(), (lam - 0.5).floor() as usize + 1, "Lambda = {lam}");
        // the top state decays like e^(-kappa xb); extend the box accordingly
        let kappa = (lam * lam - states.last().unwrap().eps_n).sqrt();
        let hi = 12.0f64.max(30.0 / kappa);
        let h = 0.02 / lam.max(1.0);
        let grid = FdGrid::new(-2.0, hi, ((hi + 2.0) / h) as usize).unwrap();
        let fd = fd_eigenvalues(&|xb| spec.v(xb), &grid, lam * lam, 200);
        assert_eq!(fd.len(), states.len(), "Lambda = {lam}, oracle {fd:?}");
    }
}

#[test]
fn rosen_morse_ab_relations() {
    for (v0, mu) in [(4.0, 0.5), (30.0, 0.4), (60.0, 1.1)] {
        let spec = PotentialSpec::rosen_morse2(v0, mu).unwrap();
        let (v1, v2) = spec.rm2_v12().unwrap();
        // v1 = v0 sinh(2 mu) / 2 and v2 = v0 cosh^2 mu + 1/4 from the parameters directly
        assert!((v1 - 0.5 * v0 * (2.0 * mu).sinh()).abs() <= 1e-12 * v1);
        assert!((v2 - (v0 * mu.cosh().powi(2) + 0.25)).abs() <= 1e-12 * v2);
        let red = reduce_potential(&spec).unwrap();
        for st in bound_spectrum(&spec, 50).unwrap() {
            // psi = 2A - 2(B+1) s from the selected branch
            let p0 = eval_poly(&red.branch.psi, 0.0, st.eps_n).re;
            let p1 = eval_poly(&red.branch.psi, 1.0, st.eps_n).re - p0;
            let (a, b) = (p0 / 2.0, -p1 / 2.0 - 1.0);
            assert!((a * b - v1).abs() <= 1e-12 * v1, "B A = {} vs {v1}", a * b);
            let want = v2.sqrt() - (st.n as f64 + 0.5);
            assert!((b - want).abs() <= 1e-12 * want.abs().max(1.0), "B = {b} vs {want}");
        }
    }
}

#[test]
fn wavefunction_residuals() {
    let h = PotentialSpec::harmonic(1.0, 1.0, 1.0).unwrap();
    let g = &bound_spectrum(&h, 0).unwrap()[0];
    let xs: Vec<f64> = (0..=60).map(|i| -3.0 + 0.1 * i as f64).collect();
    let r = wavefunction_residual(&h, |x| g.sampler.call(x), g.eps_n, &xs);
    assert!(r <= 1e-6, "harmonic {r}");

    let m = PotentialSpec::morse_lambda(5.0).unwrap();
    let st = &bound_spectrum(&m, 4).unwrap()[1];
    let xs: Vec<f64> = (0..40).map(|i| 0.01 * 10f64.powf(i as f64 / 13.0)).collect();
    let r = wavefunction_residual(&m, |x| st.sampler.call(x), st.eps_n, &xs);
    assert!(r <= 1e-6, "morse {r}");

    for spec in specs() {
        for st in bound_spectrum(&spec, 5).unwrap() {
            let xs: Vec<f64> = (0..25).map(|i| spec.from_reduced(-3.0 + 0.25 * i as f64)).collect();
            let r = wavefunction_residual(&spec, |x| st.sampler.call(x), st.eps_n, &xs);
            assert!(r <= 1e-6, "{} n={} residual {r}", spec.kind, st.n);
        }
    }
}

#[test]
fn morse_scattering_grows_like_the_envelope() {
    // the leading form has O(Lambda^2 / s) corrections: s = 40 is asymptotic for
    // Lambda = 2, while Lambda = 5 needs a larger s
    for (lam, s) in [(2.0, 40.0f64), (5.0, 200.0)] {
        let spec = PotentialSpec::morse_lambda(lam).unwrap();
        for f in [1.1, 1.5, 2.0, 3.0, 5.0] {
            let eps = f * lam * lam;
            let st = scattering_states(&spec, eps).unwrap();
            assert_eq!(st.degeneracy, 0);
            let kappa = C::new(lam * lam - eps, 0.0).sqrt();
            let xb = spec.tau.inverse(s);
            for (sol, a) in st.solutions.iter().zip([kappa + 0.5 - lam, 0.5 - kappa - lam]) {
                assert!(!sol.bounded_at_minus_inf && sol.bounded_at_plus_inf);
                let got = sol.sampler.call(spec.from_reduced(xb)).norm();
                let env = (s / 2.0).exp() * s.powf(-0.5 - lam) * rgamma(a).norm();
                let ratio = got / env;
                assert!((0.5..=2.0).contains(&ratio), "Lambda={lam} eps={eps} {}: ratio {ratio}", sol.label);
            }
        }
    }
}

#[test]
fn rosen_morse_sampled_boundedness_matches_verdicts() {
    let spec = PotentialSpec::rosen_morse2(4.0, 0.5).unwrap();
    let (_, vm, vp) = spec.regions();
    let reference: Vec<f64> = (0..=16).map(|i| -4.0 + 0.5 * i as f64).collect();
    for eps in [vm + 0.3, 2.0, 6.0, vp - 4.0, vp + 0.5, 15.0, 40.0] {
        let st = scattering_states(&spec, eps).unwrap();
        let want = if eps < vp { 1 } else { 2 };
        assert_eq!(st.degeneracy, want, "eps = {eps}");
        for sol in &st.solutions {
            let f = |x: f64| sol.sampler.call(x);
            assert_eq!(sampled_bounded(f, -12.0, &reference), sol.bounded_at_minus_inf, "eps={eps} {}", sol.label);
            assert_eq!(sampled_bounded(f, 12.0, &reference), sol.bounded_at_plus_inf, "eps={eps} {}", sol.label);
            let xs: Vec<f64> = (0..9).map(|i| -3.0 + 0.75 * i as f64).collect();
            let r = wavefunction_residual(&spec, f, eps, &xs);
            assert!(r <= 1e-6, "eps={eps} {} residual {r}", sol.label);
        }
    }
}

#[test]
fn morse_integer_k_second_solution_is_not_square_integrable() {
    for lam in [5.0, 3.3, 1.2] {
        let spec = PotentialSpec::morse_lambda(lam).unwrap();
        let checks = morse_integer_k_checks(&spec).unwrap();
        assert_eq!(checks.len(), (2.0 * lam).ceil() as usize - 1);
        for c in checks {
            assert!(!c.square_integrable, "{c:?}");
            assert!((c.measured_exponent - c.predicted_exponent).abs() <= 0.05, "{c:?}");
            if let Some(r) = c.leading_ratio {
                assert!((r - 1.0).abs() <= 1e-2, "{c:?}");
            }
        }
    }
}
