//! Linear stability of stationary radial configurations: analytic Jacobian of
//! the rescaled-flow vector field, its spectrum, Morse index, and the
//! monotonicity checks backing the spectral estimates.
//!
//! The Jacobian of g_i = -ε_i H_i + r_i has entries
//!
//! ```text
//! ∂g_i/∂r_j = 2 ε_i ε_j K(r_i, r_j)                          (j ≠ i)
//! ∂g_i/∂r_i = s + 1 - (s/r_i) g_i - (2/r_i) Σ_{j≠i} ε_i ε_j r_j K(r_i, r_j)
//! ```
//!
//! where the diagonal follows from Euler's relation for the (-s)-homogeneous
//! curvature; at a stationary point the g_i term drops and the radius vector
//! is an exact eigenvector with eigenvalue s + 1.  Conjugating by
//! diag(r_i^{(n-1)/2}) symmetrizes the matrix because K(r, t) = t^{n-1} J(r, t)
//! with J symmetric, so the spectrum is real and a Jacobi eigensolver applies.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::sphere_kernel_integral;
use crate::linalg::{dot, jacobi_eigen, norm2, SquareMatrix};
use crate::params::{KernelParams, QuadratureConfig, RadialSet};
use crate::shrinker::{residual_system, ShrinkerSolution};

/// Spectrum report for a stationary configuration.
#[derive(Debug, Clone, Serialize)]
pub struct StabilityReport {
    /// Jacobian Dg at the stationary radii (row-major).
    pub jacobian: Vec<Vec<f64>>,
    /// Real eigenvalues, descending.
    pub eigenvalues: Vec<f64>,
    /// Matching unit eigenvectors of Dg (mapped back through the similarity).
    pub eigenvectors: Vec<Vec<f64>>,
    /// Number of strictly positive eigenvalues.
    pub morse_index: usize,
    /// ‖Dg·r̄ - (s+1)·r̄‖ / ‖r̄‖.
    pub radial_eigen_defect: f64,
    /// Relative asymmetry of the diagonally conjugated matrix.
    pub symmetrization_defect: f64,
    /// Unit vector orthogonal to r̄ spanning, together with r̄, the top-2
    /// eigenspace; `None` for the ball (single radius).
    pub unstable_direction: Option<Vec<f64>>,
}

const SYMMETRIZATION_TOL: f64 = 1e-6;

/// Jacobian of the residual system at arbitrary radii.
///
/// With `residuals` the exact non-stationary diagonal is used (Newton);
/// without, the stationary form with diagonal s + 1 - 2 Σ (r_j/r_i) ε_i ε_j K.
pub(crate) fn assemble_jacobian(
    p: &KernelParams,
    set: &RadialSet,
    residuals: Option<&[f64]>,
    q: &QuadratureConfig,
) -> Result<SquareMatrix> {
    let radii = set.radii();
    let m = radii.len();
    let s = p.s;
    // K(r_i, r_j) for every ordered pair; diagonal unused.  Each entry is an
    // independent quadrature so the symmetrization defect stays a meaningful
    // consistency diagnostic.
    let mut kernel = SquareMatrix::zeros(m);
    for i in 0..m {
        for j in 0..m {
            if i != j {
                kernel.set(i, j, sphere_kernel_integral(p, radii[i], radii[j], q)?.value);
            }
        }
    }
    let mut jac = SquareMatrix::zeros(m);
    for i in 0..m {
        let eps_i = set.orientation(i)?;
        let mut diag = s + 1.0;
        if let Some(g) = residuals {
            diag -= s / radii[i] * g[i];
        }
        for j in 0..m {
            if i == j {
                continue;
            }
            let eps_j = set.orientation(j)?;
            let kij = kernel.get(i, j);
            jac.set(i, j, 2.0 * eps_i * eps_j * kij);
            diag -= 2.0 / radii[i] * eps_i * eps_j * radii[j] * kij;
        }
        jac.set(i, i, diag);
    }
    Ok(jac)
}

/// Analytic Jacobian Dg at a stationary solution.
///
/// The diagonal formula substitutes g(r̄) = 0, so the solution's residual is
/// re-checked first and a stationarity violation is refused.
pub fn jacobian(
    p: &KernelParams,
    sol: &ShrinkerSolution,
    q: &QuadratureConfig,
) -> Result<SquareMatrix> {
    let g = residual_system(p, &sol.set, q)?;
    let res = g.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let allowance = 10.0 * sol.tol;
    if res > allowance {
        return Err(Error::StationarityViolated {
            residual: res,
            tol: allowance,
        });
    }
    assemble_jacobian(p, &sol.set, None, q)
}

/// Eigen-decomposition of the Jacobian through the diagonal similarity
/// S = D·Dg·D^{-1}, D = diag(r_i^{(n-1)/2}), which is symmetric up to
/// quadrature error; its defect is a first-class diagnostic and any value
/// beyond 1e-6 relative aborts the analysis.
pub fn spectrum(p: &KernelParams, jac: &SquareMatrix, radii: &[f64]) -> Result<StabilityReport> {
    let m = jac.dim();
    assert_eq!(m, radii.len());
    let s = p.s;
    let expo = 0.5 * (f64::from(p.n) - 1.0);
    let d: Vec<f64> = radii.iter().map(|r| r.powf(expo)).collect();

    let conj = SquareMatrix::from_fn(m, |i, j| jac.get(i, j) * d[i] / d[j]);
    let scale = conj.max_abs().max(f64::MIN_POSITIVE);
    let mut defect = 0.0f64;
    for i in 0..m {
        for j in i + 1..m {
            defect = defect.max((conj.get(i, j) - conj.get(j, i)).abs());
        }
    }
    let symmetrization_defect = defect / scale;
    if symmetrization_defect > SYMMETRIZATION_TOL {
        return Err(Error::SymmetrizationDefect {
            defect: symmetrization_defect,
            tol: SYMMETRIZATION_TOL,
        });
    }
    let sym = SquareMatrix::from_fn(m, |i, j| 0.5 * (conj.get(i, j) + conj.get(j, i)));
    let (eigenvalues, sym_vectors) = jacobi_eigen(&sym)?;

    // Map eigenvectors back through D^{-1} and normalize.
    let eigenvectors: Vec<Vec<f64>> = sym_vectors
        .iter()
        .map(|v| {
            let mut w: Vec<f64> = v.iter().zip(&d).map(|(x, di)| x / di).collect();
            let nrm = norm2(&w);
            for x in &mut w {
                *x /= nrm;
            }
            // Deterministic sign.
            let lead = w
                .iter()
                .cloned()
                .max_by(|a, b| a.abs().total_cmp(&b.abs()))
                .unwrap();
            if lead < 0.0 {
                for x in &mut w {
                    *x = -*x;
                }
            }
            w
        })
        .collect();

    let morse_index = eigenvalues.iter().filter(|&&l| l > 0.0).count();

    let r_norm = norm2(radii);
    let jr = jac.mul_vec(radii);
    let radial_defect: Vec<f64> = jr
        .iter()
        .zip(radii)
        .map(|(x, r)| x - (s + 1.0) * r)
        .collect();
    let radial_eigen_defect = norm2(&radial_defect) / r_norm;

    // Orthogonalize the top eigenvector against r̄ inside the top-2
    // eigenspace; perturbations along r̄ are pure rescalings.
    let unstable_direction = if m == 1 {
        None
    } else {
        let r_hat: Vec<f64> = radii.iter().map(|r| r / r_norm).collect();
        let mut best: Option<Vec<f64>> = None;
        for cand in eigenvectors.iter().take(2) {
            let proj = dot(cand, &r_hat);
            let mut u: Vec<f64> = cand
                .iter()
                .zip(&r_hat)
                .map(|(c, rh)| c - proj * rh)
                .collect();
            let nrm = norm2(&u);
            if nrm > 1e-8 {
                for x in &mut u {
                    *x /= nrm;
                }
                let lead = u
                    .iter()
                    .cloned()
                    .max_by(|a, b| a.abs().total_cmp(&b.abs()))
                    .unwrap();
                if lead < 0.0 {
                    for x in &mut u {
                        *x = -*x;
                    }
                }
                best = Some(u);
                break;
            }
        }
        best
    };

    Ok(StabilityReport {
        jacobian: jac.rows(),
        eigenvalues,
        eigenvectors,
        morse_index,
        radial_eigen_defect,
        symmetrization_defect,
        unstable_direction,
    })
}

/// Convenience: Jacobian plus spectrum in one call.
pub fn analyze(
    p: &KernelParams,
    sol: &ShrinkerSolution,
    q: &QuadratureConfig,
) -> Result<StabilityReport> {
    let jac = jacobian(p, sol, q)?;
    spectrum(p, &jac, sol.set.radii())
}

/// Returns (∂g_m/∂r_m at the outermost radius, s + 1); the first strictly
/// exceeds the second at every stationary solution with m ≥ 2.
pub fn corner_derivative_check(
    p: &KernelParams,
    sol: &ShrinkerSolution,
    q: &QuadratureConfig,
) -> Result<(f64, f64)> {
    if sol.set.len() < 2 {
        return Err(Error::InvalidInput(
            "corner derivative check needs at least two radii".into(),
        ));
    }
    let jac = jacobian(p, sol, q)?;
    let m = jac.dim();
    Ok((jac.get(m - 1, m - 1), p.s + 1.0))
}

/// Result of sampling h(r) = K(r_max, r) on a grid of (0, r_max).
#[derive(Debug, Clone, Serialize)]
pub struct ShellMonotonicity {
    /// Strictly increasing along the whole grid?
    pub increasing: bool,
    /// Smallest forward difference found (negative when not increasing).
    pub worst_margin: f64,
    /// Ordering r_i·h(r_i) < r_j·h(r_j) for i < j over the solution's inner
    /// radii.
    pub weighted_ordering_ok: bool,
}

/// Samples the shell kernel mass seen from the outermost stationary radius
/// and checks it is strictly increasing, plus the weighted ordering that the
/// outer-corner estimate rests on.
pub fn shell_monotonicity_check(
    p: &KernelParams,
    sol: &ShrinkerSolution,
    grid_size: u32,
    q: &QuadratureConfig,
) -> Result<ShellMonotonicity> {
    if grid_size < 2 {
        return Err(Error::InvalidInput("grid_size must be >= 2".into()));
    }
    let radii = sol.set.radii();
    let r_max = *radii.last().unwrap();
    let mut prev = 0.0;
    let mut worst = f64::INFINITY;
    let mut increasing = true;
    for k in 1..=grid_size {
        let r = r_max * f64::from(k) / f64::from(grid_size + 1);
        let h = sphere_kernel_integral(p, r_max, r, q)?.value;
        if k > 1 {
            let diff = h - prev;
            worst = worst.min(diff);
            if diff <= 0.0 {
                increasing = false;
            }
        }
        prev = h;
    }
    let mut weighted_ordering_ok = true;
    let mut prev_weighted = f64::NEG_INFINITY;
    for &r in &radii[..radii.len() - 1] {
        let w = r * sphere_kernel_integral(p, r_max, r, q)?.value;
        if w <= prev_weighted {
            weighted_ordering_ok = false;
        }
        prev_weighted = w;
    }
    Ok(ShellMonotonicity {
        increasing,
        worst_margin: worst,
        weighted_ordering_ok,
    })
}
