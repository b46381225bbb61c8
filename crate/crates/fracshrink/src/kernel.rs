//! Reduction of the n-dimensional kernel integrals over spheres, balls,
//! shells, and complements to one-dimensional quadratures.
//!
//! Everything is driven by the sphere-to-point kernel mass
//!
//! ```text
//! K(r, t) = ∫_{∂B_t} |x_r - y|^{-(n+s)} dy,   |x_r| = r,
//! ```
//!
//! which reduces for n >= 2 to an angular integral with the squared distance
//! written as (r-t)² + 4rt·sin²(θ/2) (no cancellation near θ = 0).  In one
//! dimension ∂B_t is the two-point set {±t} and every integral here has an
//! elementary antiderivative; the 1-D paths are exact.

use std::cell::Cell;

use crate::error::{Error, Result};
use crate::params::{KernelParams, QuadratureConfig};
use crate::quad::{adaptive_gk, tanh_sinh, QuadValue};
use crate::special::{beta, unit_ball_volume, unit_sphere_area};

/// (n-1)·ω_{n-1}: surface measure of the unit sphere in R^{n-1}, the angular
/// prefactor of the reduced kernel for n >= 2.
fn angular_prefactor(n: u32) -> f64 {
    f64::from(n - 1) * unit_ball_volume(n - 1)
}

/// Constant c(n, s) of the |δ|^-(1+s) blow-up of K(r, r±δ), in closed form:
/// c = (n-1)·ω_{n-1}·½·B((n-1)/2, (s+1)/2).  Valid for n >= 2.
pub(crate) fn blowup_constant_beta(p: &KernelParams) -> f64 {
    angular_prefactor(p.n) * 0.5 * beta(0.5 * f64::from(p.n - 1), 0.5 * (p.s + 1.0))
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::InvalidInput(format!(
            "{name} = {v} must be strictly positive and finite"
        )));
    }
    Ok(())
}

/// Kernel mass of the sphere ∂B_t seen from radius r, K(r, t).
///
/// For n >= 2 the angular integral is evaluated by tanh-sinh quadrature,
/// which keeps uniform accuracy as t -> r where the integrand concentrates at
/// θ = 0.  For n = 1 the two boundary points give the exact value
/// |r-t|^-(1+s) + (r+t)^-(1+s).
pub fn sphere_kernel_integral(
    p: &KernelParams,
    r: f64,
    t: f64,
    q: &QuadratureConfig,
) -> Result<QuadValue> {
    q.validate()?;
    check_positive("r", r)?;
    check_positive("t", t)?;
    if r == t {
        return Err(Error::SingularArgument { r, t });
    }
    let s = p.s;
    if p.n == 1 {
        return Ok(QuadValue::exact(
            (r - t).abs().powf(-(1.0 + s)) + (r + t).powf(-(1.0 + s)),
        ));
    }
    let n = p.n as i32;
    let p_exp = 0.5 * (f64::from(p.n) + s);
    let delta_sq = (r - t) * (r - t);
    let four_rt = 4.0 * r * t;
    let quad = tanh_sinh(
        |from_left, d| {
            // sin θ = sin d on both arms; sin²(θ/2) is sin²(d/2) on the left
            // arm and cos²(d/2) on the right arm (θ = π - d).
            let half = 0.5 * d;
            let h = if from_left {
                half.sin().powi(2)
            } else {
                half.cos().powi(2)
            };
            d.sin().powi(n - 2) * (delta_sq + four_rt * h).powf(-p_exp)
        },
        0.0,
        std::f64::consts::PI,
        q.rel_tol,
        // The integrand is strictly positive; relative control alone is
        // well-defined and an absolute floor would be scale-dependent here.
        f64::MIN_POSITIVE,
    )?;
    let pre = angular_prefactor(p.n) * t.powi(n - 1);
    Ok(QuadValue {
        value: pre * quad.value,
        error: pre * quad.error,
    })
}

/// Paired sphere difference K(r, r-δ) - K(r, r+δ) evaluated as a single
/// quadrature with the per-node difference factored through expm1/ln_1p.
///
/// The two kernel masses agree to O(δ/r) relative as δ -> 0, so subtracting
/// separately computed values loses ~δ^-(1+s)·rel_tol absolutely; the factored
/// form is exact to rounding in the difference itself.
fn paired_sphere_diff(
    p: &KernelParams,
    r: f64,
    delta: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<QuadValue> {
    debug_assert!(p.n >= 2);
    let s = p.s;
    let n = p.n as i32;
    let p_exp = 0.5 * (f64::from(p.n) + s);
    let t_minus = r - delta;
    let t_plus = r + delta;
    // t_-^{n-1} - t_+^{n-1} = -2δ · Σ t_-^k t_+^{n-2-k}, exact to rounding.
    let mut power_sum = 0.0;
    for k in 0..=(n - 2) {
        power_sum += t_minus.powi(k) * t_plus.powi(n - 2 - k);
    }
    let lead = -2.0 * delta * power_sum;
    let t_plus_pow = t_plus.powi(n - 1);
    let delta_sq = delta * delta;
    let quad = tanh_sinh(
        |from_left, d| {
            let half = 0.5 * d;
            let h = if from_left {
                half.sin().powi(2)
            } else {
                half.cos().powi(2)
            };
            let a_minus = delta_sq + 4.0 * r * t_minus * h;
            let a_plus = delta_sq + 4.0 * r * t_plus * h;
            // (A_- - A_+)/A_+ from the factored product, no cancellation.
            let ratio_dev = -8.0 * r * delta * h / a_plus;
            let diff_pow = a_plus.powf(-p_exp) * (-p_exp * ratio_dev.ln_1p()).exp_m1();
            d.sin().powi(n - 2) * (lead * a_minus.powf(-p_exp) + t_plus_pow * diff_pow)
        },
        0.0,
        std::f64::consts::PI,
        rel_tol,
        abs_tol / angular_prefactor(p.n),
    )?;
    let pre = angular_prefactor(p.n);
    Ok(QuadValue {
        value: pre * quad.value,
        error: pre * quad.error,
    })
}

/// Kernel mass of the ball B_ρ seen from radius r > ρ, ∫_0^ρ K(r, t) dt.
pub fn ball_kernel_integral(
    p: &KernelParams,
    r: f64,
    rho: f64,
    q: &QuadratureConfig,
) -> Result<QuadValue> {
    q.validate()?;
    check_positive("r", r)?;
    check_positive("rho", rho)?;
    if rho >= r {
        return Err(Error::InvalidInput(format!(
            "ball_kernel_integral requires rho < r (got rho = {rho}, r = {r})"
        )));
    }
    let s = p.s;
    if p.n == 1 {
        return Ok(QuadValue::exact(
            ((r - rho).powf(-s) - (r + rho).powf(-s)) / s,
        ));
    }
    let inner = q.tightened(0.1);
    let inner_issue: Cell<Option<Error>> = Cell::new(None);
    let quad = adaptive_gk(
        |t| {
            if t <= 0.0 {
                return 0.0;
            }
            match sphere_kernel_integral(p, r, t, &inner) {
                Ok(v) => v.value,
                Err(e) => {
                    if inner_issue.take().is_none() {
                        inner_issue.set(Some(e));
                    }
                    0.0
                }
            }
        },
        0.0,
        rho,
        q.rel_tol,
        q.abs_tol,
        q.max_subdivisions,
    )?;
    if let Some(e) = inner_issue.take() {
        return Err(e);
    }
    Ok(QuadValue {
        value: quad.value,
        error: quad.error + inner.rel_tol * quad.value.abs(),
    })
}

/// Kernel mass of the complement of B_ρ seen from radius r < ρ,
/// ∫_ρ^∞ K(r, t) dt.
///
/// The range [ρ, T] is integrated numerically on a logarithmic axis; beyond
/// the cutoff T the expansion K(r, t) = n·ω_n·t^{-1-s}(1 + α₂(r/t)² + …)
/// is integrated term by term and the truncation enters the error estimate.
pub fn complement_kernel_integral(
    p: &KernelParams,
    r: f64,
    rho: f64,
    q: &QuadratureConfig,
) -> Result<QuadValue> {
    q.validate()?;
    check_positive("r", r)?;
    check_positive("rho", rho)?;
    if rho <= r {
        return Err(Error::InvalidInput(format!(
            "complement_kernel_integral requires rho > r (got rho = {rho}, r = {r})"
        )));
    }
    let s = p.s;
    if p.n == 1 {
        return Ok(QuadValue::exact(
            ((rho - r).powf(-s) + (rho + r).powf(-s)) / s,
        ));
    }
    let cutoff = (10.0 * rho)
        .max(rho * q.rel_tol.powf(-1.0 / s))
        .min(1e6 * rho);
    let log_span = (cutoff / rho).ln();
    let inner = q.tightened(0.1);
    let inner_issue: Cell<Option<Error>> = Cell::new(None);
    let quad = adaptive_gk(
        |tau| {
            let t = rho * tau.exp();
            match sphere_kernel_integral(p, r, t, &inner) {
                Ok(v) => v.value * t,
                Err(e) => {
                    if inner_issue.take().is_none() {
                        inner_issue.set(Some(e));
                    }
                    0.0
                }
            }
        },
        0.0,
        log_span,
        q.rel_tol,
        q.abs_tol,
        q.max_subdivisions,
    )?;
    if let Some(e) = inner_issue.take() {
        return Err(e);
    }
    // Tail: ∫_T^∞ n ω_n t^{-1-s} (1 + α₂ (r/t)²) dt with
    // α₂ = p(2(1+p)/n - 1), p = (n+s)/2 (Gegenbauer coefficient of the
    // reduced angular integral).
    let p_exp = 0.5 * (f64::from(p.n) + s);
    let alpha2 = p_exp * (2.0 * (1.0 + p_exp) / f64::from(p.n) - 1.0);
    let area = unit_sphere_area(p.n);
    let tail1 = area * cutoff.powf(-s) / s;
    let tail2 = area * alpha2 * r * r * cutoff.powf(-(s + 2.0)) / (s + 2.0);
    let ratio_sq = (r / cutoff) * (r / cutoff);
    let tail_err = (tail2 * ratio_sq).abs() * 8.0;
    Ok(QuadValue {
        value: quad.value + tail1 + tail2,
        error: quad.error + inner.rel_tol * quad.value.abs() + tail_err,
    })
}

// Below this fraction of r the paired integrand is replaced by its exact
// leading term; the remainder there is O(δ), so the induced error is O(δ_lo²).
const PAIRED_ANALYTIC_FRACTION: f64 = 1e-12;

/// Principal-value shell pairing: ∫_a^b [K(r, r-δ) - K(r, r+δ)] dδ.
///
/// The integrand behaves like δ^{-s} near δ = 0 (the |δ|^-(1+s) parts
/// cancel), so the radial variable is substituted δ = u^{1/(1-s)}, which makes
/// the integrand bounded for a plain adaptive scheme.  The substitution also
/// squashes δ below ~1e-12·r outside f64 range when s -> 1; that sliver is
/// integrated with the exact leading asymptotic -c(n,s)(n-1)/r·δ^{-s}.
pub fn paired_shell_integral(
    p: &KernelParams,
    r: f64,
    a: f64,
    b: f64,
    q: &QuadratureConfig,
) -> Result<QuadValue> {
    q.validate()?;
    check_positive("r", r)?;
    if !(0.0..=b).contains(&a) || b > r || !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidInput(format!(
            "paired_shell_integral requires 0 <= a <= b <= r (got a = {a}, b = {b}, r = {r})"
        )));
    }
    if a == b {
        return Ok(QuadValue::exact(0.0));
    }
    let s = p.s;
    if p.n == 1 {
        // ∫ [(2r-δ)^-(1+s) - (2r+δ)^-(1+s)] dδ = [(2r-δ)^-s + (2r+δ)^-s]/s.
        let anti = |d: f64| ((2.0 * r - d).powf(-s) + (2.0 * r + d).powf(-s)) / s;
        return Ok(QuadValue::exact(anti(b) - anti(a)));
    }

    let one_m_s = 1.0 - s;
    let delta_lo = PAIRED_ANALYTIC_FRACTION * r;
    let lead_coeff = -blowup_constant_beta(p) * f64::from(p.n - 1) / r;

    let mut value = 0.0;
    let mut error = 0.0;
    let split = delta_lo.min(b);
    if a < split {
        value += lead_coeff * (split.powf(one_m_s) - a.powf(one_m_s)) / one_m_s;
        error += lead_coeff.abs() * split * split / (2.0 * r);
    }
    let lo = a.max(split.min(b));
    if lo < b {
        let u_lo = lo.powf(one_m_s);
        let u_hi = b.powf(one_m_s);
        let inner_rel = q.rel_tol * 0.2;
        let inner_issue: Cell<Option<Error>> = Cell::new(None);
        let quad = adaptive_gk(
            |u| {
                let delta = u.powf(1.0 / one_m_s);
                if delta <= 0.0 {
                    return 0.0;
                }
                // Absolute floor at the scale of the leading behavior keeps
                // the inner quadrature from spinning where D crosses zero.
                let inner_abs = 0.05 * q.rel_tol * lead_coeff.abs() * delta.powf(-s);
                let d = match paired_sphere_diff(p, r, delta.min(r), inner_rel, inner_abs) {
                    Ok(v) => v.value,
                    Err(e) => {
                        if inner_issue.take().is_none() {
                            inner_issue.set(Some(e));
                        }
                        return 0.0;
                    }
                };
                d * u.powf(s / one_m_s) / one_m_s
            },
            u_lo,
            u_hi,
            q.rel_tol,
            q.abs_tol,
            q.max_subdivisions,
        )?;
        if let Some(e) = inner_issue.take() {
            return Err(e);
        }
        value += quad.value;
        error += quad.error + 0.3 * q.rel_tol * quad.value.abs();
    }
    Ok(QuadValue { value, error })
}
