//! Central-difference discretization of `-u'' + v u = eps u` with Dirichlet
//! ends, solved for the lowest eigenvalues by Sturm-sequence bisection.

use crate::error::OracleError;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FdGrid {
    pub lo: f64,
    pub hi: f64,
    pub n_points: usize,
}

impl FdGrid {
    pub fn new(lo: f64, hi: f64, n_points: usize) -> Result<Self, OracleError> {
        if n_points < 100 || !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
            return Err(OracleError::BadGrid);
        }
        Ok(FdGrid { lo, hi, n_points })
    }

    pub fn h(&self) -> f64 {
        (self.hi - self.lo) / (self.n_points - 1) as f64
    }

    /// Same interval with the spacing halved.
    pub fn refined(&self) -> Self {
        FdGrid {
            n_points: 2 * self.n_points - 1,
            ..*self
        }
    }

    pub fn interior(&self) -> impl Iterator<Item = f64> + '_ {
        let h = self.h();
        (1..self.n_points - 1).map(move |i| self.lo + h * i as f64)
    }
}

/// Symmetric tridiagonal matrix with constant off-diagonal.
struct Tridiag {
    diag: Vec<f64>,
    off: f64,
}

impl Tridiag {
    fn assemble(v: &impl Fn(f64) -> f64, grid: &FdGrid) -> Self {
        let h = grid.h();
        let inv = 1.0 / (h * h);
        Tridiag {
            diag: grid.interior().map(|x| 2.0 * inv + v(x)).collect(),
            off: -inv,
        }
    }

    /// Number of eigenvalues strictly below `x`.
    fn count_below(&self, x: f64) -> usize {
        let off2 = self.off * self.off;
        let mut count = 0;
        let mut d = 1.0;
        for (i, &a) in self.diag.iter().enumerate() {
            d = if i == 0 { a - x } else { a - x - off2 / d };
            if d == 0.0 {
                d = -f64::EPSILON * (a.abs() + x.abs()).max(1.0);
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn bounds(&self) -> (f64, f64) {
        let r = 2.0 * self.off.abs();
        let lo = self.diag.iter().fold(f64::INFINITY, |m, &a| m.min(a)) - r;
        let hi = self.diag.iter().fold(f64::NEG_INFINITY, |m, &a| m.max(a)) + r;
        (lo, hi)
    }

    /// The `k`-th smallest eigenvalue (0-based).
    fn eigenvalue(&self, k: usize) -> f64 {
        let (mut lo, mut hi) = self.bounds();
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 4.0 * f64::EPSILON * hi.abs().max(lo.abs()).max(1e-300) {
                break;
            }
        }
        0.5 * (lo + hi)
    }
}

/// Raw FD eigenvalues below `threshold` (at most `k_max`) on one grid.
pub fn fd_eigenvalues(v: &impl Fn(f64) -> f64, grid: &FdGrid, threshold: f64, k_max: usize) -> Vec<f64> {
    let t = Tridiag::assemble(v, grid);
    let n = t.count_below(threshold).min(k_max);
    (0..n).map(|k| t.eigenvalue(k)).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleSpectrum {
    /// Richardson-extrapolated eigenvalues, ascending.
    pub eigenvalues: Vec<f64>,
    /// Eigenvalues on the finer of the two grids.
    pub fine: Vec<f64>,
    pub grid: FdGrid,
    pub below_threshold: f64,
}

/// Default relative tolerance for agreement between the two grids.
pub const DEFAULT_GRID_TOL: f64 = 1e-4;

/// Lowest eigenvalues below `threshold` from the grid and its refinement,
/// extrapolated as `(4 e_fine - e_coarse)/3`.
///
/// Fails with `GridTooCoarse` when the two grids differ by more than
/// `grid_tol` (relative, floor 1 in the denominator) or disagree on the
/// count.
pub fn fd_bound_states(
    v: impl Fn(f64) -> f64,
    grid: FdGrid,
    threshold: f64,
    k_max: usize,
    grid_tol: f64,
) -> Result<OracleSpectrum, OracleError> {
    let coarse = fd_eigenvalues(&v, &grid, threshold, k_max);
    let fine_grid = grid.refined();
    let fine = fd_eigenvalues(&v, &fine_grid, threshold, k_max);
    if coarse.len() != fine.len() {
        let index = coarse.len().min(fine.len());
        return Err(OracleError::GridTooCoarse {
            index,
            change: f64::INFINITY,
            tol: grid_tol,
        });
    }
    let mut eigenvalues = Vec::with_capacity(fine.len());
    for (i, (&c, &f)) in coarse.iter().zip(&fine).enumerate() {
        let change = (f - c).abs() / f.abs().max(1.0);
        if change > grid_tol {
            return Err(OracleError::GridTooCoarse {
                index: i,
                change,
                tol: grid_tol,
            });
        }
        eigenvalues.push((4.0 * f - c) / 3.0);
    }
    Ok(OracleSpectrum {
        eigenvalues,
        fine,
        grid,
        below_threshold: threshold,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectraComparison {
    /// `(analytic, oracle, relative error)` per level.
    pub pairs: Vec<(f64, f64, f64)>,
    pub max_rel_err: f64,
    pub pass: bool,
}

pub fn compare_spectra(
    analytic: &[f64],
    oracle: &OracleSpectrum,
    rel_tol: f64,
) -> Result<SpectraComparison, OracleError> {
    if analytic.len() != oracle.eigenvalues.len() {
        return Err(OracleError::CountMismatch {
            analytic: analytic.len(),
            oracle: oracle.eigenvalues.len(),
        });
    }
    let pairs: Vec<(f64, f64, f64)> = analytic
        .iter()
        .zip(&oracle.eigenvalues)
        .map(|(&a, &o)| (a, o, rel_err(a, o)))
        .collect();
    let max_rel_err = pairs.iter().fold(0.0_f64, |m, p| m.max(p.2));
    Ok(SpectraComparison {
        pairs,
        max_rel_err,
        pass: max_rel_err <= rel_tol,
    })
}

/// `|a - b| / |a|`, falling back to absolute error when `a = 0`.
pub fn rel_err(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        (a - b).abs()
    } else {
        ((a - b) / a).abs()
    }
}
