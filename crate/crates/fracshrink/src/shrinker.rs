//! Stationary radii of the rescaled flow: the unique self-shrinking annulus
//! ratio, the multi-annulus families (with or without a central ball), and
//! cylindrical shrinkers.
//!
//! Stationarity is expressed through the residual
//!
//! ```text
//! g_i(r) = -ε_i H_s(x_{r_i}, E(r)) + r_i ,
//! ```
//!
//! whose zeros are exactly the homothetically shrinking profiles at natural
//! scale (the rescaled flow is ṙ = g(r)).  Solving g = 0 rather than the
//! fixed-outer-radius system keeps one residual shared between the solver,
//! the stability analysis, and the flow integrator; the two formulations are
//! equivalent through the scaling g(λr)_i = -ε_i λ^{-s} H_i + λ r_i.

use rayon::prelude::*;
use serde::Serialize;

use crate::curvature::{annulus_defect_parts, ball_curvature_constant, fractional_curvature};
use crate::error::{Error, Result};
use crate::linalg::{norm_inf, solve_lu};
use crate::params::{KernelParams, QuadratureConfig, RadialSet, DEGENERACY_GUARD};
use crate::stability::assemble_jacobian;

/// Which construction family a solution belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Family {
    /// E = ⋃ (B_{r_{2k}} ∖ B_{r_{2k-1}}): N annuli, even radius count.
    AnnuliOnly,
    /// Ẽ = B_{r_0} ∪ ⋃ (B_{r_{2k}} ∖ B_{r_{2k-1}}): central ball plus N
    /// annuli, odd radius count.
    BallPlusAnnuli,
}

impl Family {
    pub fn as_str(&self) -> &'static str {
        match self {
            Family::AnnuliOnly => "annuli-only",
            Family::BallPlusAnnuli => "ball-plus-annuli",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "annuli-only" => Ok(Family::AnnuliOnly),
            "ball-plus-annuli" => Ok(Family::BallPlusAnnuli),
            other => Err(Error::InvalidInput(format!(
                "unknown family '{other}' (expected 'annuli-only' or 'ball-plus-annuli')"
            ))),
        }
    }

    fn contains_origin(&self) -> bool {
        matches!(self, Family::BallPlusAnnuli)
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A stationary point of the rescaled flow with solve provenance.
#[derive(Debug, Clone, Serialize)]
pub struct ShrinkerSolution {
    pub params: KernelParams,
    /// Stationary radii at natural scale (g vanishes without rescaling).
    pub set: RadialSet,
    /// ∞-norm of the residual, re-evaluated with fresh tighter quadrature.
    pub residual_norm: f64,
    pub family: Family,
    /// Number of annuli N (0 for the plain ball).
    pub n_annuli: u32,
    /// Solver tolerance this solution satisfies.
    pub tol: f64,
    /// Bisection/Newton/continuation provenance, one entry per stage.
    pub solver_path: Vec<String>,
    /// For cylindrical shrinkers: the ambient dimension the cross-section
    /// lives in (params.n is then the cross-section dimension).
    pub ambient_dim: Option<u32>,
}

impl ShrinkerSolution {
    /// Radii divided by the outermost radius; scale-free shape description.
    pub fn ratios(&self) -> Vec<f64> {
        let radii = self.set.radii();
        let outer = *radii.last().unwrap();
        radii.iter().map(|r| r / outer).collect()
    }
}

/// Residual of the rescaled-flow stationarity system, one component per
/// boundary sphere: g_i = -ε_i H_s(x_i, set) + r_i.
pub fn residual_system(
    p: &KernelParams,
    set: &RadialSet,
    q: &QuadratureConfig,
) -> Result<Vec<f64>> {
    let radii = set.radii();
    let mut g = Vec::with_capacity(radii.len());
    for (i, &r_i) in radii.iter().enumerate() {
        let h = fractional_curvature(p, set, i, q)?;
        let eps = set.orientation(i)?;
        g.push(-eps * h.value + r_i);
    }
    Ok(g)
}

/// Defect function f_s(r) = H_s(x_r, A) + r·H_s(x_1, A) of the annulus
/// A = B_1 ∖ B_r; strictly increasing on (0, 1) with a unique zero.
pub fn annulus_defect(p: &KernelParams, r: f64, q: &QuadratureConfig) -> Result<f64> {
    let (inner, outer) = annulus_defect_parts(p, r, q)?;
    Ok(inner + r * outer)
}

/// Quadrature tolerance used inside a solve targeting residual `tol`: the
/// curvature noise floor has to sit well below the residual target.
fn solver_quad(q: &QuadratureConfig, tol: f64) -> QuadratureConfig {
    let rel = q.rel_tol.min(tol * 1e-2).max(1e-13);
    let abs = q.abs_tol.min(tol * 1e-3).max(1e-14);
    q.with_tols(rel, abs)
}

fn validate_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(Error::InvalidInput(format!(
            "solver tolerance {tol} must be strictly positive"
        )));
    }
    Ok(())
}

/// Damped Newton iteration on g with the analytic Jacobian.  Away from
/// stationarity the diagonal keeps the exact -(s/r_i)·g_i Euler term, so the
/// Jacobian is exact everywhere, not only at roots.
fn newton(
    p: &KernelParams,
    radii: &mut Vec<f64>,
    contains_origin: bool,
    q: &QuadratureConfig,
    tol: f64,
    max_iter: usize,
    path: &mut Vec<String>,
) -> Result<f64> {
    const DAMPING_FLOOR: f64 = 9.5367431640625e-7; // 2^-20
    let eval = |radii: &[f64]| -> Result<Vec<f64>> {
        let set = RadialSet::new(radii.to_vec(), contains_origin)?;
        set.check_degeneracy()?;
        residual_system(p, &set, q)
    };

    let mut g = eval(radii)?;
    for iter in 0..max_iter {
        let res = norm_inf(&g);
        if res <= tol {
            path.push(format!("newton: {iter} iters, residual={res:.2e}"));
            return Ok(res);
        }
        let set = RadialSet::new(radii.clone(), contains_origin)?;
        let jac = assemble_jacobian(p, &set, Some(&g), q)?;
        let rhs: Vec<f64> = g.iter().map(|x| -x).collect();
        let delta = solve_lu(&jac, &rhs)?;

        let phi0: f64 = g.iter().map(|x| x * x).sum();
        let mut alpha = 1.0f64;
        loop {
            let trial: Vec<f64> = radii
                .iter()
                .zip(&delta)
                .map(|(r, d)| r + alpha * d)
                .collect();
            match eval(&trial) {
                Ok(g_trial) => {
                    let phi: f64 = g_trial.iter().map(|x| x * x).sum();
                    if phi <= phi0 * (1.0 - 1e-4 * alpha) || phi < tol * tol {
                        *radii = trial;
                        g = g_trial;
                        break;
                    }
                }
                Err(Error::DegenerateConfiguration { .. }) | Err(Error::InvalidInput(_)) => {
                    // Radii collided or left the feasible cone; shrink the step.
                }
                Err(e) => return Err(e),
            }
            alpha *= 0.5;
            if alpha < DAMPING_FLOOR {
                let res = norm_inf(&g);
                if res <= 2.0 * tol {
                    // At the quadrature noise floor but close to target; the
                    // fresh verification pass has the final word.
                    path.push(format!(
                        "newton: {iter} iters, damping floor at residual={res:.2e}"
                    ));
                    return Ok(res);
                }
                return Err(Error::NonConvergence {
                    iterations: iter,
                    residual: res,
                    best: radii.clone(),
                });
            }
        }
    }
    let res = norm_inf(&g);
    if res <= tol {
        path.push(format!("newton: {max_iter} iters, residual={res:.2e}"));
        return Ok(res);
    }
    Err(Error::NonConvergence {
        iterations: max_iter,
        residual: res,
        best: radii.clone(),
    })
}

/// Coordinate-wise nested bisection fallback: sweep the radii from the inside
/// out, solving g_i = 0 in r_i alone (the existence argument guarantees a
/// sign change between the neighboring spheres), until Newton can take over.
fn gauss_seidel(
    p: &KernelParams,
    radii: &mut [f64],
    contains_origin: bool,
    q: &QuadratureConfig,
    target: f64,
    max_sweeps: usize,
    path: &mut Vec<String>,
) -> Result<f64> {
    let m = radii.len();
    let component = |radii: &[f64], i: usize| -> Result<f64> {
        let set = RadialSet::new(radii.to_vec(), contains_origin)?;
        set.check_degeneracy()?;
        let h = fractional_curvature(p, &set, i, q)?;
        Ok(-set.orientation(i)? * h.value + radii[i])
    };
    let eval_at = |radii: &mut [f64], x: f64, i: usize| -> Result<f64> {
        let old = radii[i];
        radii[i] = x;
        let v = component(radii, i);
        radii[i] = old;
        v
    };

    for sweep in 0..max_sweeps {
        for i in 0..m {
            let margin = 4.0 * DEGENERACY_GUARD;
            let mut lo = if i == 0 {
                radii[0] * 1e-3
            } else {
                radii[i - 1] * (1.0 + margin)
            };
            let mut hi = if i + 1 == m {
                radii[i] * 50.0
            } else {
                radii[i + 1] * (1.0 - margin)
            };
            if lo >= hi {
                return Err(Error::BracketFailure(format!(
                    "no room to bisect component {i}"
                )));
            }
            let mut f_lo = eval_at(radii, lo, i)?;
            let mut f_hi = eval_at(radii, hi, i)?;
            // g_i -> -∞ at the lower wall and +∞ at the upper wall; tighten
            // toward the walls if the coarse bounds missed the sign change.
            let mut expand = 0;
            while f_lo > 0.0 && expand < 30 {
                lo = if i == 0 {
                    lo * 0.25
                } else {
                    radii[i - 1] + (lo - radii[i - 1]) * 0.25
                };
                f_lo = eval_at(radii, lo, i)?;
                expand += 1;
            }
            expand = 0;
            while f_hi < 0.0 && expand < 30 {
                hi = if i + 1 == m {
                    hi * 4.0
                } else {
                    radii[i + 1] - (radii[i + 1] - hi) * 0.25
                };
                f_hi = eval_at(radii, hi, i)?;
                expand += 1;
            }
            if f_lo > 0.0 || f_hi < 0.0 {
                return Err(Error::BracketFailure(format!(
                    "component {i}: no sign change in ({lo:.6e}, {hi:.6e})"
                )));
            }
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if eval_at(radii, mid, i)? < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo < 1e-12 * hi {
                    break;
                }
            }
            radii[i] = 0.5 * (lo + hi);
        }
        let set = RadialSet::new(radii.to_vec(), contains_origin)?;
        let res = norm_inf(&residual_system(p, &set, q)?);
        if res <= target {
            path.push(format!(
                "nested-bisection: {} sweeps, residual={res:.2e}",
                sweep + 1
            ));
            return Ok(res);
        }
    }
    let set = RadialSet::new(radii.to_vec(), contains_origin)?;
    let res = norm_inf(&residual_system(p, &set, q)?);
    path.push(format!(
        "nested-bisection: {max_sweeps} sweeps, residual={res:.2e}"
    ));
    Ok(res)
}

/// Newton with the nested-bisection fallback re-seeding it on failure.
fn solve_stage(
    p: &KernelParams,
    radii: &mut Vec<f64>,
    contains_origin: bool,
    q: &QuadratureConfig,
    tol: f64,
    path: &mut Vec<String>,
) -> Result<()> {
    match newton(p, radii, contains_origin, q, tol, 60, path) {
        Ok(_) => Ok(()),
        Err(Error::NonConvergence { best, .. }) => {
            *radii = best;
            path.push("newton stalled; falling back to nested bisection".into());
            gauss_seidel(p, radii, contains_origin, q, tol * 1e3, 8, path)?;
            newton(p, radii, contains_origin, q, tol, 60, path).map(|_| ())
        }
        Err(e) => Err(e),
    }
}

/// Independent residual verification with fresh, tighter quadrature.
fn finalize(
    p: &KernelParams,
    radii: Vec<f64>,
    family: Family,
    n_annuli: u32,
    q: &QuadratureConfig,
    tol: f64,
    mut path: Vec<String>,
) -> Result<ShrinkerSolution> {
    let set = RadialSet::new(radii, family.contains_origin())?;
    let q_verify = q.with_tols((q.rel_tol * 1e-2).max(1e-13), (q.abs_tol * 1e-2).max(1e-14));
    let g = residual_system(p, &set, &q_verify)?;
    let residual_norm = norm_inf(&g);
    if residual_norm > tol {
        return Err(Error::NonConvergence {
            iterations: 0,
            residual: residual_norm,
            best: set.radii().to_vec(),
        });
    }
    path.push(format!(
        "verified: fresh quadrature residual={residual_norm:.2e}"
    ));
    Ok(ShrinkerSolution {
        params: *p,
        set,
        residual_norm,
        family,
        n_annuli,
        tol,
        solver_path: path,
        ambient_dim: None,
    })
}

/// The ball stationary radius r* = k(n,s)^{1/(1+s)} (g(r*) = 0 in closed
/// form given the computed constant).
pub fn ball_shrinker(p: &KernelParams, q: &QuadratureConfig, tol: f64) -> Result<ShrinkerSolution> {
    validate_tol(tol)?;
    let qs = solver_quad(q, tol);
    let k = ball_curvature_constant(p, &qs)?.value;
    let r_star = k.powf(1.0 / (1.0 + p.s));
    finalize(
        p,
        vec![r_star],
        Family::BallPlusAnnuli,
        0,
        &qs,
        tol,
        vec![format!("ball: closed form r*=k^(1/(1+s))={r_star:.12}")],
    )
}

/// Unique self-shrinking annulus: bisection on the defect function, rescaled
/// so the stationarity residual vanishes at natural scale, then polished by a
/// couple of Newton steps.
pub fn find_annulus_shrinker(
    p: &KernelParams,
    q: &QuadratureConfig,
    tol: f64,
) -> Result<ShrinkerSolution> {
    validate_tol(tol)?;
    let qs = solver_quad(q, tol);
    let mut path = Vec::new();

    // Bracket the unique sign change of the increasing defect function.
    let mut lo = 0.25;
    let mut f_lo = annulus_defect(p, lo, &qs)?;
    let mut tries = 0;
    while f_lo >= 0.0 {
        lo *= 0.5;
        f_lo = annulus_defect(p, lo, &qs)?;
        tries += 1;
        if tries > 40 {
            return Err(Error::BracketFailure(
                "annulus defect never negative toward r = 0 (quadrature fault)".into(),
            ));
        }
    }
    let mut hi = 0.75;
    let mut f_hi = annulus_defect(p, hi, &qs)?;
    while f_hi <= 0.0 {
        hi = 1.0 - (1.0 - hi) * 0.5;
        if 1.0 - hi < 4.0 * DEGENERACY_GUARD {
            return Err(Error::BracketFailure(
                "annulus defect never positive toward r = 1 (quadrature fault)".into(),
            ));
        }
        f_hi = annulus_defect(p, hi, &qs)?;
    }

    let width_target = (tol * 1e-3).max(1e-13);
    let mut iters = 0;
    while hi - lo > width_target {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if annulus_defect(p, mid, &qs)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        iters += 1;
    }
    let root = 0.5 * (lo + hi);
    path.push(format!("annulus-bisection: {iters} iters, ratio={root:.12}"));

    // Scale so g vanishes: multiply by H_s(x_1, A)^{1/(1+s)}.
    let (_, outer_curv) = annulus_defect_parts(p, root, &qs)?;
    if !(outer_curv > 0.0) {
        return Err(Error::BracketFailure(
            "outer annulus curvature not positive (quadrature fault)".into(),
        ));
    }
    let lambda = outer_curv.powf(1.0 / (1.0 + p.s));
    path.push(format!("rescale: lambda={lambda:.12}"));
    let mut radii = vec![root * lambda, lambda];
    newton(p, &mut radii, false, &qs, tol * 0.5, 20, &mut path)?;
    finalize(p, radii, Family::AnnuliOnly, 1, &qs, tol, path)
}

/// Stationary radii for the requested family: 2N radii (annuli-only) or
/// 2N + 1 (ball-plus-annuli), found by a continuation ladder that inserts a
/// new innermost annulus (or the central ball) into the previous solution and
/// re-solves by damped Newton, with nested bisection as fallback.
pub fn find_shrinker(
    p: &KernelParams,
    n_annuli: u32,
    family: Family,
    q: &QuadratureConfig,
    tol: f64,
) -> Result<ShrinkerSolution> {
    validate_tol(tol)?;
    if n_annuli == 0 {
        return match family {
            Family::BallPlusAnnuli => ball_shrinker(p, q, tol),
            Family::AnnuliOnly => Err(Error::InvalidInput(
                "annuli-only family requires N >= 1".into(),
            )),
        };
    }
    let qs = solver_quad(q, tol);
    let annulus = find_annulus_shrinker(p, q, tol)?;
    let mut path = annulus.solver_path.clone();
    let mut radii = annulus.set.radii().to_vec();

    for stage in 2..=n_annuli {
        let r_min = radii[0];
        let pair = (0.15 * r_min, 0.45 * r_min);
        path.push(format!(
            "insert-pair (stage N={stage}): ({:.6e}, {:.6e})",
            pair.0, pair.1
        ));
        radii.insert(0, pair.1);
        radii.insert(0, pair.0);
        solve_stage(p, &mut radii, false, &qs, tol * 0.5, &mut path)?;
    }

    if family == Family::BallPlusAnnuli {
        let r_ball = 0.3 * radii[0];
        path.push(format!("insert-central-ball: {r_ball:.6e}"));
        radii.insert(0, r_ball);
        solve_stage(p, &mut radii, true, &qs, tol * 0.5, &mut path)?;
    }

    finalize(p, radii, family, n_annuli, &qs, tol, path)
}

/// Cylindrical shrinker R^{n-k} × (cross-section in R^k): the cross-sectional
/// radii solve the dimension-k problem with the same s (the fiber integration
/// rescales the curvature by a positive constant that the g = 0 normalization
/// absorbs), annotated with the ambient dimension.
pub fn cylinder_shrinker(
    ambient: &KernelParams,
    cross_dim: u32,
    n_annuli: u32,
    family: Family,
    q: &QuadratureConfig,
    tol: f64,
) -> Result<ShrinkerSolution> {
    if !(1..ambient.n).contains(&cross_dim) {
        return Err(Error::InvalidInput(format!(
            "cylinder cross-section dimension k = {cross_dim} must satisfy 1 <= k < n = {}",
            ambient.n
        )));
    }
    let cross = KernelParams::new(cross_dim, ambient.s)?;
    let mut sol = find_shrinker(&cross, n_annuli, family, q, tol)?;
    sol.ambient_dim = Some(ambient.n);
    sol.solver_path.push(format!(
        "cylinder: ambient n={}, cross-section k={cross_dim}",
        ambient.n
    ));
    Ok(sol)
}

/// One row of the s -> 1 limit study.
#[derive(Debug, Clone, Serialize)]
pub struct LimitRow {
    pub s: f64,
    /// Annulus ratio r(n, s) (inner/outer of the self-shrinking annulus).
    pub annulus_ratio: Option<f64>,
    /// (1-s)·k(n, s).
    pub scaled_ball_constant: Option<f64>,
    /// (1-s)·f_s(1/2) on the natural scale R = 1.
    pub scaled_defect_at_half: Option<f64>,
    pub error: Option<String>,
}

/// Limit study toward s -> 1: the annulus ratio tends to 1, (1-s)·k(n,s) to
/// (n-1)·ω_{n-1}, and (1-s)·f_s(r) to ω_{n-1}·(n-1)·(r - 1/r).  Failed rows
/// are marked and the run continues.
pub fn limit_study(p_dim: u32, s_grid: &[f64], q: &QuadratureConfig) -> Result<Vec<LimitRow>> {
    if s_grid.is_empty() || s_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput(
            "s grid must be non-empty and strictly increasing".into(),
        ));
    }
    if s_grid.iter().any(|&s| !(s > 0.0 && s < 1.0)) {
        return Err(Error::InvalidInput("s grid must lie inside (0, 1)".into()));
    }
    let rows: Vec<LimitRow> = s_grid
        .par_iter()
        .map(|&s| {
            let row = (|| -> Result<LimitRow> {
                let p = KernelParams::new(p_dim, s)?;
                let sol = find_annulus_shrinker(&p, q, 1e-8)?;
                let ratios = sol.ratios();
                let k = ball_curvature_constant(&p, q)?.value;
                let defect = annulus_defect(&p, 0.5, q)?;
                Ok(LimitRow {
                    s,
                    annulus_ratio: Some(ratios[0]),
                    scaled_ball_constant: Some((1.0 - s) * k),
                    scaled_defect_at_half: Some((1.0 - s) * defect),
                    error: None,
                })
            })();
            row.unwrap_or_else(|e| LimitRow {
                s,
                annulus_ratio: None,
                scaled_ball_constant: None,
                scaled_defect_at_half: None,
                error: Some(e.to_string()),
            })
        })
        .collect();
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn qcfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn defect_is_increasing_and_changes_sign() {
        let q = qcfg();
        let p = KernelParams::new(2, 0.5).unwrap();
        let f03 = annulus_defect(&p, 0.3, &q).unwrap();
        let f06 = annulus_defect(&p, 0.6, &q).unwrap();
        assert!(f03 < f06);
        // Deep into the endpoints the guaranteed signs show up.
        assert!(annulus_defect(&p, 1e-3, &q).unwrap() < 0.0);
        assert!(annulus_defect(&p, 1.0 - 1e-3, &q).unwrap() > 0.0);
    }

    #[test]
    fn annulus_shrinker_zeroes_the_residual() {
        let q = qcfg();
        for &(n, s) in &[(1u32, 0.5), (2, 0.5), (3, 0.25)] {
            let p = KernelParams::new(n, s).unwrap();
            let sol = find_annulus_shrinker(&p, &q, 1e-9).unwrap();
            assert!(
                sol.residual_norm <= 1e-9,
                "n={n}, s={s}: {}",
                sol.residual_norm
            );
            let g = residual_system(&p, &sol.set, &q).unwrap();
            assert!(norm_inf(&g) <= 1e-8);
            let ratios = sol.ratios();
            assert!(ratios[0] > 0.0 && ratios[0] < 1.0);
        }
    }

    #[test]
    fn annulus_ratio_grows_with_s() {
        let q = qcfg();
        let p_half = KernelParams::new(2, 0.5).unwrap();
        let p_nine = KernelParams::new(2, 0.9).unwrap();
        let r_half = find_annulus_shrinker(&p_half, &q, 1e-9).unwrap().ratios()[0];
        let r_nine = find_annulus_shrinker(&p_nine, &q, 1e-9).unwrap().ratios()[0];
        assert!(r_nine > r_half);
    }

    #[test]
    fn ball_residual_closed_form() {
        let q = qcfg();
        for &(n, s) in &[(1u32, 0.5), (2, 0.75), (3, 0.3)] {
            let p = KernelParams::new(n, s).unwrap();
            let sol = ball_shrinker(&p, &q, 1e-9).unwrap();
            let k = ball_curvature_constant(&p, &q).unwrap().value;
            assert_relative_eq!(
                sol.set.radii()[0],
                k.powf(1.0 / (1.0 + s)),
                max_relative = 1e-10
            );
            assert!(sol.residual_norm <= 1e-9);
        }
    }

    #[test]
    fn residual_scaling_law() {
        // g_i(λr) = -ε_i λ^{-s} H_i(r) + λ r_i.
        let q = qcfg();
        let p = KernelParams::new(2, 0.5).unwrap();
        let set = RadialSet::annulus(0.5, 1.2).unwrap();
        let g1 = residual_system(&p, &set, &q).unwrap();
        // ε_i H_i = r_i - g_i
        let eps_h: Vec<f64> = (0..set.len()).map(|i| set.radii()[i] - g1[i]).collect();
        for &lam in &[0.5, 2.0] {
            let scaled = set.scaled(lam).unwrap();
            let g_lam = residual_system(&p, &scaled, &q).unwrap();
            for i in 0..set.len() {
                let expected = -lam.powf(-p.s) * eps_h[i] + lam * set.radii()[i];
                assert_relative_eq!(g_lam[i], expected, max_relative = 1e-8, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn multi_annulus_and_ball_families() {
        let q = qcfg();
        let p = KernelParams::new(2, 0.5).unwrap();

        let one = find_shrinker(&p, 1, Family::AnnuliOnly, &q, 1e-8).unwrap();
        let direct = find_annulus_shrinker(&p, &q, 1e-8).unwrap();
        for (a, b) in one.set.radii().iter().zip(direct.set.radii()) {
            assert_relative_eq!(a, b, max_relative = 1e-8);
        }

        let tilde = find_shrinker(&p, 1, Family::BallPlusAnnuli, &q, 1e-8).unwrap();
        assert_eq!(tilde.set.len(), 3);
        assert!(tilde.set.contains_origin());
        assert!(tilde.residual_norm <= 1e-8);
        let r = tilde.set.radii();
        assert!(r[0] < r[1] && r[1] < r[2]);

        let two = find_shrinker(&p, 2, Family::AnnuliOnly, &q, 1e-8).unwrap();
        assert_eq!(two.set.len(), 4);
        assert!(two.residual_norm <= 1e-8);

        // Nesting sanity: the N=1 ratio does not reappear among the N=2
        // adjacent ratios.
        let ratio1 = direct.ratios()[0];
        let two_radii = two.set.radii();
        for w in two_radii.windows(2) {
            assert!((w[0] / w[1] - ratio1).abs() > 1e-4);
        }
    }

    #[test]
    fn cylinder_reduces_to_cross_section() {
        let q = qcfg();
        let ambient = KernelParams::new(3, 0.5).unwrap();
        let cyl = cylinder_shrinker(&ambient, 2, 1, Family::AnnuliOnly, &q, 1e-8).unwrap();
        assert_eq!(cyl.ambient_dim, Some(3));
        assert_eq!(cyl.params.n, 2);
        let planar = find_annulus_shrinker(&KernelParams::new(2, 0.5).unwrap(), &q, 1e-8).unwrap();
        for (a, b) in cyl.ratios().into_iter().zip(planar.ratios()) {
            assert_relative_eq!(a, b, max_relative = 1e-8);
        }
        // The k = 1 cross-section is the 1-D double interval.
        let flat = cylinder_shrinker(
            &KernelParams::new(2, 0.5).unwrap(),
            1,
            1,
            Family::AnnuliOnly,
            &q,
            1e-8,
        )
        .unwrap();
        assert_eq!(flat.params.n, 1);
        assert!(cylinder_shrinker(&ambient, 3, 1, Family::AnnuliOnly, &q, 1e-8).is_err());
    }

    #[test]
    fn family_argument_validation() {
        let q = qcfg();
        let p = KernelParams::new(2, 0.5).unwrap();
        assert!(find_shrinker(&p, 0, Family::AnnuliOnly, &q, 1e-8).is_err());
        assert!(find_shrinker(&p, 0, Family::BallPlusAnnuli, &q, 1e-8).is_ok());
        assert!(Family::parse("annuli-only").is_ok());
        assert!(Family::parse("ball").is_err());
    }

    #[test]
    fn limit_rows_move_toward_the_classical_limits() {
        let q = qcfg();
        let rows = limit_study(2, &[0.3, 0.6, 0.9], &q).unwrap();
        assert_eq!(rows.len(), 3);
        let ratios: Vec<f64> = rows.iter().map(|r| r.annulus_ratio.unwrap()).collect();
        assert!(ratios[0] < ratios[1] && ratios[1] < ratios[2]);
        assert!(limit_study(2, &[0.5, 0.4], &q).is_err());
        assert!(limit_study(2, &[0.5, 1.2], &q).is_err());
    }
}
