use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use nu_core::hyper::{hyp1f1, hyp2f1, hyp_u};
use nu_core::oracle::{fd_eigenvalues, FdGrid};
use nu_core::reduction::{reduce, GheProblem};
use nu_core::{bound_spectrum, PotentialSpec};
use num_complex::Complex64 as C;

const RM2_GHE: &str = "phi=1,0,-1 psi_tilde=0,-2 phi_tilde=-1/4+eps,2,-4 interval=-1,1";

fn reduction(c: &mut Criterion) {
    let ghe = GheProblem::parse(RM2_GHE).unwrap();
    c.bench_function("reduce_rosen_morse2", |b| b.iter(|| reduce(black_box(&ghe), &[]).unwrap()));
}

fn spectra(c: &mut Criterion) {
    let morse = PotentialSpec::from_params("morse", "Lambda=5").unwrap();
    let rm2 = PotentialSpec::from_params("rosen-morse2", "v0=50,mu=1.5").unwrap();
    c.bench_function("bound_spectrum_morse", |b| b.iter(|| bound_spectrum(black_box(&morse), 20).unwrap()));
    c.bench_function("bound_spectrum_rm2", |b| b.iter(|| bound_spectrum(black_box(&rm2), 20).unwrap()));
}

fn oracle(c: &mut Criterion) {
    let grid = FdGrid::new(-10.0, 10.0, 2001).unwrap();
    let v = |x: f64| x * x;
    c.bench_function("fd_harmonic_2001", |b| b.iter(|| fd_eigenvalues(&v, black_box(&grid), 40.0, 10)));
}

fn special(c: &mut Criterion) {
    let (a, b2, cc) = (C::new(0.3, 0.2), C::new(0.7, 0.0), C::new(1.9, 0.0));
    c.bench_function("hyp2f1_z0.95", |b| b.iter(|| hyp2f1(a, b2, cc, black_box(0.95)).unwrap()));
    c.bench_function("hyp1f1_z20", |b| b.iter(|| hyp1f1(a, cc, black_box(20.0)).unwrap()));
    c.bench_function("hyp_u_z3", |b| b.iter(|| hyp_u(C::new(-2.4, 0.0), cc, black_box(3.0)).unwrap()));
}

criterion_group!(benches, reduction, spectra, oracle, special);
criterion_main!(benches);
