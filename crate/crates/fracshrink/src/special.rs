//! Small special-function helpers built on `statrs`.

use statrs::function::gamma::ln_gamma;

/// Volume of the unit ball in k dimensions, ω_k = π^{k/2} / Γ(k/2 + 1).
///
/// ω_0 = 1 by convention, matching the degenerate 0-dimensional measure.
pub fn unit_ball_volume(k: u32) -> f64 {
    let k = f64::from(k);
    (0.5 * k * std::f64::consts::PI.ln() - ln_gamma(0.5 * k + 1.0)).exp()
}

/// Surface area of the unit sphere ∂B_1 in n dimensions, n·ω_n.
pub fn unit_sphere_area(n: u32) -> f64 {
    f64::from(n) * unit_ball_volume(n)
}

/// Euler Beta function B(a, b) for positive arguments.
pub fn beta(a: f64, b: f64) -> f64 {
    (ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)).exp()
}
