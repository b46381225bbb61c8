//! Radial ODE integration for the original flow ṙ_i = -ε_i H_s(x_i, E) and
//! the rescaled flow ṙ_i = g_i(r), with event detection for extinction,
//! collision, origin contact, and divergence.
//!
//! The integrator is an adaptive embedded Dormand-Prince 5(4) pair.  For the
//! original flow, once the radius ratios freeze (self-similar regime) the
//! final approach to extinction is completed with the separable closed form
//! μ^{1+s} = 1 - (1+s)·κ·(t - t₀), avoiding the λ^{-s} stiffness at λ -> 0.

use serde::Serialize;

use crate::curvature::fractional_curvature;
use crate::error::{Error, Result};
use crate::linalg::norm_inf;
use crate::params::{KernelParams, QuadratureConfig, RadialSet, DEGENERACY_GUARD};
use crate::shrinker::residual_system;

/// Which radial ODE system to integrate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FlowKind {
    /// ∂_t x·ν = -H_s: boundaries move by minus the fractional curvature.
    Original,
    /// ∂_t x·ν = -H_s + x·ν: stationary points are exactly the shrinkers.
    Rescaled,
}

impl FlowKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "original" => Ok(FlowKind::Original),
            "rescaled" => Ok(FlowKind::Rescaled),
            other => Err(Error::InvalidInput(format!(
                "unknown flow '{other}' (expected 'original' or 'rescaled')"
            ))),
        }
    }
}

/// Snapshot of the evolving radii.
#[derive(Debug, Clone, Serialize)]
pub struct FlowState {
    pub time: f64,
    pub radii: Vec<f64>,
    pub contains_origin: bool,
}

impl FlowState {
    pub fn new(time: f64, set: &RadialSet) -> Self {
        Self {
            time,
            radii: set.radii().to_vec(),
            contains_origin: set.contains_origin(),
        }
    }

    fn as_set(&self) -> Result<RadialSet> {
        RadialSet::new(self.radii.clone(), self.contains_origin)
    }
}

/// Why an integration stopped.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind")]
pub enum Termination {
    /// Outermost radius fell below the extinction threshold (original flow).
    Extinction,
    /// Adjacent radii i and i+1 reached the degeneracy guard (the radial
    /// analogue of a neck-pinch); the flow is not continued past it.
    Collision { inner: usize, outer: usize },
    /// The innermost radius reached the origin (a component or hole vanished).
    OriginContact { index: usize },
    /// The horizon (or step budget) was reached with the state still alive.
    TimeBudget,
    /// Some radius exceeded the divergence threshold.
    Divergence { threshold: f64 },
}

/// Time-ordered trace of an integration with its termination cause.
#[derive(Debug, Clone, Serialize)]
pub struct FlowTrace {
    pub states: Vec<FlowState>,
    pub termination: Termination,
    pub termination_time: f64,
}

impl FlowTrace {
    /// Radius ratios r_i/r_m per recorded state.
    pub fn ratio_history(&self) -> Vec<Vec<f64>> {
        self.states
            .iter()
            .map(|st| {
                let outer = *st.radii.last().unwrap();
                st.radii.iter().map(|r| r / outer).collect()
            })
            .collect()
    }
}

/// Velocity of the original flow: ṙ_i = -ε_i H_s(x_{r_i}, E).
/// The outer boundary of a ball moves inward since k(n,s) > 0.
pub fn original_rhs(p: &KernelParams, state: &FlowState, q: &QuadratureConfig) -> Result<Vec<f64>> {
    let set = state.as_set()?;
    let mut v = Vec::with_capacity(set.len());
    for i in 0..set.len() {
        let h = fractional_curvature(p, &set, i, q)?;
        v.push(-set.orientation(i)? * h.value);
    }
    Ok(v)
}

/// Velocity of the rescaled flow: exactly the stationarity residual g.
pub fn rescaled_rhs(p: &KernelParams, state: &FlowState, q: &QuadratureConfig) -> Result<Vec<f64>> {
    residual_system(p, &state.as_set()?, q)
}

const EXTINCTION_FRACTION: f64 = 1e-4;
const DIVERGENCE_FACTOR: f64 = 1e6;
const MAX_STEPS: usize = 200_000;
/// Ratio drift per accepted step below which the state counts as
/// self-similar.
const RATIO_FREEZE_DRIFT: f64 = 1e-6;
/// The closed-form completion only engages once the profile has visibly
/// shrunk, so exactly self-similar data still exercises the integrator.
const COMPLETION_LAMBDA: f64 = 0.5;

// Dormand-Prince 5(4) coefficients.
const DP_C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const DP_A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const DP_B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const DP_B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Classify a dead-end state when the step size underflows near a singular
/// event: tightest adjacent pair within (a multiple of) the guard means
/// collision, a vanished innermost radius means origin contact.
fn classify_singular(state: &FlowState, initial_outer: f64) -> Option<Termination> {
    let radii = &state.radii;
    if let Some((i, gap)) = RadialSet::new(radii.clone(), state.contains_origin)
        .ok()
        .and_then(|s| s.tightest_gap())
    {
        if gap < 10.0 * DEGENERACY_GUARD {
            return Some(Termination::Collision {
                inner: i,
                outer: i + 1,
            });
        }
    }
    if radii[0] < 1e-3 * initial_outer {
        return Some(Termination::OriginContact { index: 0 });
    }
    None
}

/// Integrate the chosen flow from `initial` until the horizon or a terminal
/// event.  Step-size underflow near an expected singularity is reported
/// through the termination tag, never as an error.
pub fn integrate(
    p: &KernelParams,
    initial: &FlowState,
    which: FlowKind,
    horizon: f64,
    q: &QuadratureConfig,
    ode_tol: f64,
) -> Result<FlowTrace> {
    if !(horizon > initial.time) || !horizon.is_finite() {
        return Err(Error::InvalidInput(format!(
            "horizon {horizon} must exceed the initial time {}",
            initial.time
        )));
    }
    if !(ode_tol > 0.0) {
        return Err(Error::InvalidInput("ode_tol must be positive".into()));
    }
    initial.as_set()?.check_degeneracy()?;
    // Quadrature noise must sit below the ODE error control.
    let q_rhs = q.with_tols(q.rel_tol.min(1e-10).min(ode_tol * 1e-2), q.abs_tol.min(1e-12));

    let rhs = |state: &FlowState| -> Result<Vec<f64>> {
        match which {
            FlowKind::Original => original_rhs(p, state, &q_rhs),
            FlowKind::Rescaled => rescaled_rhs(p, state, &q_rhs),
        }
    };

    let m = initial.radii.len();
    let initial_outer = *initial.radii.last().unwrap();
    let mut t = initial.time;
    let mut y = initial.radii.clone();
    let mut states = vec![initial.clone()];
    let mut prev_ratios: Vec<f64> = y.iter().map(|r| r / y[m - 1]).collect();

    let mut f_now = rhs(&FlowState {
        time: t,
        radii: y.clone(),
        contains_origin: initial.contains_origin,
    })?;
    let scale0 = norm_inf(&f_now).max(1e-12);
    let mut h = (0.01 * initial_outer / scale0).min(horizon - t).max(1e-8);

    let sc = |y: &[f64], i: usize| ode_tol * (0.01 * initial_outer + y[i].abs());

    for _step in 0..MAX_STEPS {
        if t >= horizon {
            return Ok(FlowTrace {
                termination: Termination::TimeBudget,
                termination_time: states.last().unwrap().time,
                states,
            });
        }
        h = h.min(horizon - t);

        // One DOPRI5 trial step (FSAL: stage 0 reuses the stored derivative).
        let mut stages: Vec<Vec<f64>> = Vec::with_capacity(7);
        stages.push(f_now.clone());
        let mut failed: Option<Error> = None;
        for stage in 1..7 {
            let mut y_stage = y.clone();
            for (i, ys) in y_stage.iter_mut().enumerate() {
                let mut acc = 0.0;
                for (k, sk) in stages.iter().enumerate() {
                    acc += DP_A[stage][k] * sk[i];
                }
                *ys += h * acc;
            }
            let state = FlowState {
                time: t + DP_C[stage] * h,
                radii: y_stage,
                contains_origin: initial.contains_origin,
            };
            match rhs(&state) {
                Ok(f) => stages.push(f),
                Err(
                    e @ (Error::DegenerateConfiguration { .. }
                    | Error::InvalidInput(_)
                    | Error::ToleranceNotMet { .. }),
                ) => {
                    failed = Some(e);
                    break;
                }
                Err(e) => return Err(e),
            }
        }

        let time_scale = t.abs().max(1.0);
        if failed.is_some() {
            // RHS failed on a trial stage (near-collision etc): halve and
            // retry; classify the singular event on underflow.
            h *= 0.5;
            if h < 1e-14 * time_scale {
                let state = states.last().unwrap();
                if let Some(term) = classify_singular(state, initial_outer) {
                    return Ok(FlowTrace {
                        termination: term,
                        termination_time: state.time,
                        states,
                    });
                }
                return Err(Error::StepSizeUnderflow { t });
            }
            continue;
        }

        let mut err: f64 = 0.0;
        let mut y_next = y.clone();
        for i in 0..m {
            let mut v5 = 0.0;
            let mut v4 = 0.0;
            for k in 0..7 {
                v5 += DP_B5[k] * stages[k][i];
                v4 += DP_B4[k] * stages[k][i];
            }
            y_next[i] += h * v5;
            let e = h * (v5 - v4);
            err = err.max((e / sc(&y, i)).abs());
        }
        let ordered = y_next.windows(2).all(|w| w[0] < w[1]) && y_next[0] > 0.0;

        if err > 1.0 || !ordered {
            // Rejected: shrink from the error estimate (hard shrink when the
            // ordering broke, which the estimate cannot see).
            let e = if ordered { err } else { err.max(100.0) };
            h *= (0.9 * e.powf(-0.2)).clamp(0.1, 0.9);
            if h < 1e-14 * time_scale {
                let state = states.last().unwrap();
                if let Some(term) = classify_singular(state, initial_outer) {
                    return Ok(FlowTrace {
                        termination: term,
                        termination_time: state.time,
                        states,
                    });
                }
                return Err(Error::StepSizeUnderflow { t });
            }
            continue;
        }

        // Accepted.
        t += h;
        y = y_next;
        f_now = stages[6].clone(); // FSAL
        states.push(FlowState {
            time: t,
            radii: y.clone(),
            contains_origin: initial.contains_origin,
        });
        let outer = y[m - 1];
        if let Some((i, gap)) = RadialSet::new(y.clone(), initial.contains_origin)
            .ok()
            .and_then(|s| s.tightest_gap())
        {
            if gap < DEGENERACY_GUARD {
                return Ok(FlowTrace {
                    termination: Termination::Collision {
                        inner: i,
                        outer: i + 1,
                    },
                    termination_time: t,
                    states,
                });
            }
        }
        if which == FlowKind::Original && outer < EXTINCTION_FRACTION * initial_outer {
            return Ok(FlowTrace {
                termination: Termination::Extinction,
                termination_time: t,
                states,
            });
        }
        if outer > DIVERGENCE_FACTOR * initial_outer {
            return Ok(FlowTrace {
                termination: Termination::Divergence {
                    threshold: DIVERGENCE_FACTOR * initial_outer,
                },
                termination_time: t,
                states,
            });
        }
        if which == FlowKind::Original {
            let ratios: Vec<f64> = y.iter().map(|r| r / outer).collect();
            let drift = ratios
                .iter()
                .zip(&prev_ratios)
                .fold(0.0f64, |mx, (a, b)| mx.max((a - b).abs()));
            prev_ratios = ratios;
            if drift < RATIO_FREEZE_DRIFT && outer < COMPLETION_LAMBDA * initial_outer {
                return complete_self_similar(
                    p,
                    states,
                    initial.contains_origin,
                    initial_outer,
                    &q_rhs,
                );
            }
        }
        h *= (0.9 * err.max(1e-10).powf(-0.2)).clamp(0.2, 5.0);
    }
    Ok(FlowTrace {
        termination: Termination::TimeBudget,
        termination_time: states.last().unwrap().time,
        states,
    })
}

/// Append the closed-form self-similar tail: with κ = ε_m H_m / r_m at the
/// switch state, μ(t)^{1+s} = 1 - (1+s)·κ·(t - t₀) down to the extinction
/// threshold.
fn complete_self_similar(
    p: &KernelParams,
    mut states: Vec<FlowState>,
    contains_origin: bool,
    initial_outer: f64,
    q: &QuadratureConfig,
) -> Result<FlowTrace> {
    let switch = states.last().unwrap().clone();
    let set = RadialSet::new(switch.radii.clone(), contains_origin)?;
    let m = set.len();
    let h_m = fractional_curvature(p, &set, m - 1, q)?.value;
    let kappa = set.orientation(m - 1)? * h_m / switch.radii[m - 1];
    if !(kappa > 0.0) {
        // Not actually shrinking; keep the trace as a budget stop.
        return Ok(FlowTrace {
            termination: Termination::TimeBudget,
            termination_time: switch.time,
            states,
        });
    }
    let s = p.s;
    let t_ext = switch.time + 1.0 / ((1.0 + s) * kappa);
    let mu_floor = EXTINCTION_FRACTION * initial_outer / switch.radii[m - 1];
    // Geometric ladder of scales down to the extinction threshold.
    let n_steps = 40;
    for k in 1..=n_steps {
        let mu = (mu_floor.ln() * f64::from(k) / f64::from(n_steps)).exp();
        let time = switch.time + (1.0 - mu.powf(1.0 + s)) / ((1.0 + s) * kappa);
        states.push(FlowState {
            time,
            radii: switch.radii.iter().map(|r| r * mu).collect(),
            contains_origin,
        });
    }
    // Record the extinction time itself through the final state's time being
    // within μ^{1+s}/((1+s)κ) of it.
    let termination_time = states.last().unwrap().time;
    debug_assert!((termination_time - t_ext).abs() < 1e-3 * t_ext.abs() + 1e-12);
    Ok(FlowTrace {
        states,
        termination: Termination::Extinction,
        termination_time,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::ball_curvature_constant;
    use crate::shrinker::{find_annulus_shrinker, Family};
    use approx::assert_relative_eq;

    fn qcfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn ball_velocity_matches_the_constant() {
        let q = qcfg();
        let p = KernelParams::new(2, 0.5).unwrap();
        let k = ball_curvature_constant(&p, &q).unwrap().value;
        for &r in &[0.5, 1.0, 2.0] {
            let state = FlowState::new(0.0, &RadialSet::ball(r).unwrap());
            let v = original_rhs(&p, &state, &q).unwrap();
            assert_relative_eq!(v[0], -k / r.powf(0.5), max_relative = 1e-9);
        }
    }

    #[test]
    fn rhs_scaling_law() {
        // rhs(λ·radii) = λ^{-s}·rhs(radii) for the original flow.
        let q = qcfg();
        let p = KernelParams::new(2, 0.5).unwrap();
        let base = FlowState::new(0.0, &RadialSet::annulus(0.5, 1.0).unwrap());
        let v = original_rhs(&p, &base, &q).unwrap();
        let scaled = FlowState::new(0.0, &RadialSet::annulus(1.0, 2.0).unwrap());
        let vs = original_rhs(&p, &scaled, &q).unwrap();
        for (a, b) in v.iter().zip(&vs) {
            assert_relative_eq!(*b, 2.0f64.powf(-0.5) * a, max_relative = 1e-8);
        }
    }

    #[test]
    fn stationary_point_velocities() {
        let q = qcfg();
        let p = KernelParams::new(2, 0.5).unwrap();
        let sol = find_annulus_shrinker(&p, &q, 1e-9).unwrap();
        let state = FlowState::new(0.0, &sol.set);
        // Rescaled flow: zero velocity.
        let g = rescaled_rhs(&p, &state, &q).unwrap();
        assert!(norm_inf(&g) < 1e-8);
        // Original flow: rhs(r̄) = -r̄ (the profile shrinks by pure scaling).
        let v = original_rhs(&p, &state, &q).unwrap();
        for (vi, ri) in v.iter().zip(sol.set.radii()) {
            assert_relative_eq!(*vi, -ri, max_relative = 1e-7);
        }
        // Scaled profiles: componentwise positive above scale 1, negative
        // below (g_i(λr̄) = λ r̄_i (1 - λ^{-(1+s)})).
        for &(lam, positive) in &[(1.1, true), (0.9, false)] {
            let scaled = FlowState::new(0.0, &sol.set.scaled(lam).unwrap());
            let g = rescaled_rhs(&p, &scaled, &q).unwrap();
            for (i, gi) in g.iter().enumerate() {
                assert!(
                    (*gi > 0.0) == positive,
                    "λ={lam}, component {i}: {gi}"
                );
                let expected = lam * sol.set.radii()[i] * (1.0 - lam.powf(-1.5));
                assert_relative_eq!(*gi, expected, max_relative = 1e-6);
            }
        }
    }

    #[test]
    fn integrator_matches_separable_ball_oracle() {
        // ṙ = -k/r^s has r(t) = (r0^{1+s} - (1+s)·k·t)^{1/(1+s)}.
        let q = qcfg();
        let p = KernelParams::new(1, 0.5).unwrap();
        let k = ball_curvature_constant(&p, &q).unwrap().value;
        let r0: f64 = 2.0;
        let ode_tol = 1e-8;
        // Stay above the completion scale so the whole window is integrated.
        let horizon = 0.3 * r0.powf(1.5) / (1.5 * k);
        let state = FlowState::new(0.0, &RadialSet::ball(r0).unwrap());
        let trace = integrate(&p, &state, FlowKind::Original, horizon, &q, ode_tol).unwrap();
        assert_eq!(trace.termination, Termination::TimeBudget);
        for st in &trace.states {
            let exact = (r0.powf(1.5) - 1.5 * k * st.time).powf(1.0 / 1.5);
            assert!(
                (st.radii[0] - exact).abs() <= 10.0 * ode_tol * r0,
                "t={}: {} vs {}",
                st.time,
                st.radii[0],
                exact
            );
        }
    }

    #[test]
    fn ball_extinction_time_closed_form() {
        let q = qcfg();
        let p = KernelParams::new(2, 0.5).unwrap();
        let k = ball_curvature_constant(&p, &q).unwrap().value;
        let r0: f64 = 1.0;
        let t_exact = r0.powf(1.5) / (1.5 * k);
        let state = FlowState::new(0.0, &RadialSet::ball(r0).unwrap());
        let trace = integrate(&p, &state, FlowKind::Original, 10.0 * t_exact, &q, 1e-8).unwrap();
        assert_eq!(trace.termination, Termination::Extinction);
        assert_relative_eq!(trace.termination_time, t_exact, max_relative = 1e-3);
    }

    #[test]
    fn thin_annulus_collides() {
        let q = qcfg();
        let p = KernelParams::new(2, 0.5).unwrap();
        let state = FlowState::new(0.0, &RadialSet::annulus(0.9, 1.0).unwrap());
        let trace = integrate(&p, &state, FlowKind::Original, 10.0, &q, 1e-7).unwrap();
        assert!(matches!(
            trace.termination,
            Termination::Collision { inner: 0, outer: 1 }
        ));
    }

    #[test]
    fn rescaled_flow_diverges_above_scale() {
        let q = qcfg();
        let p = KernelParams::new(1, 0.5).unwrap();
        let sol = find_annulus_shrinker(&p, &q, 1e-9).unwrap();
        let state = FlowState::new(0.0, &sol.set.scaled(2.0).unwrap());
        let trace = integrate(&p, &state, FlowKind::Rescaled, 40.0, &q, 1e-7).unwrap();
        assert!(matches!(trace.termination, Termination::Divergence { .. }));
    }

    #[test]
    fn hole_reaches_the_origin() {
        // A thick annulus's inner boundary has strongly negative curvature:
        // the hole fills in and the innermost radius reaches 0.
        let q = qcfg();
        let p = KernelParams::new(2, 0.5).unwrap();
        let state = FlowState::new(0.0, &RadialSet::annulus(0.05, 1.0).unwrap());
        let trace = integrate(&p, &state, FlowKind::Original, 10.0, &q, 1e-7).unwrap();
        assert!(matches!(
            trace.termination,
            Termination::OriginContact { index: 0 }
        ));
    }

    #[test]
    fn radial_perturbation_grows_at_rate_splus1() {
        // From λ·r̄ with λ = 1 ± 1e-3 the deviation along r̄ grows like
        // e^{(s+1)t} under the rescaled flow.
        let q = qcfg();
        let p = KernelParams::new(1, 0.5).unwrap();
        let sol = find_annulus_shrinker(&p, &q, 1e-9).unwrap();
        for &lam in &[1.001, 0.999] {
            let state = FlowState::new(0.0, &sol.set.scaled(lam).unwrap());
            let trace = integrate(&p, &state, FlowKind::Rescaled, 1.0, &q, 1e-9).unwrap();
            assert_eq!(trace.termination, Termination::TimeBudget);
            let dev = |st: &FlowState| {
                let d: Vec<f64> = st
                    .radii
                    .iter()
                    .zip(sol.set.radii())
                    .map(|(a, b)| a - b)
                    .collect();
                crate::linalg::norm2(&d)
            };
            let first = trace.states.first().unwrap();
            let last = trace.states.last().unwrap();
            let rate = (dev(last) / dev(first)).ln() / (last.time - first.time);
            assert_relative_eq!(rate, 1.5, max_relative = 0.05);
        }
    }

    #[test]
    fn self_similar_trace_from_stationary_profile() {
        let q = qcfg();
        let p = KernelParams::new(1, 0.5).unwrap();
        let sol = find_annulus_shrinker(&p, &q, 1e-9).unwrap();
        let state = FlowState::new(0.0, &sol.set);
        let trace = integrate(&p, &state, FlowKind::Original, 2.0, &q, 1e-8).unwrap();
        assert_eq!(trace.termination, Termination::Extinction);
        // Extinction at 1/(1+s) for the natural-scale profile.
        assert_relative_eq!(trace.termination_time, 1.0 / 1.5, max_relative = 1e-2);
        // Ratios stay frozen along the whole trace.
        let ratios = trace.ratio_history();
        let first = &ratios[0];
        for row in &ratios {
            for (a, b) in row.iter().zip(first) {
                assert_relative_eq!(a, b, max_relative = 1e-3);
            }
        }
        // The extinction law: r_m^{1+s} decays linearly in t.
        let states = &trace.states;
        let r0 = states[0].radii.last().unwrap().powf(1.5);
        let t_end = trace.termination_time;
        for st in states {
            let expected = r0 * (1.0 - st.time / t_end);
            let actual = st.radii.last().unwrap().powf(1.5);
            assert!(
                (actual - expected).abs() <= 1e-3 * r0,
                "t={}: {actual} vs {expected}",
                st.time
            );
        }
    }

    #[test]
    fn invalid_integration_arguments() {
        let q = qcfg();
        let p = KernelParams::new(2, 0.5).unwrap();
        let state = FlowState::new(1.0, &RadialSet::ball(1.0).unwrap());
        assert!(integrate(&p, &state, FlowKind::Original, 0.5, &q, 1e-8).is_err());
        assert!(integrate(&p, &state, FlowKind::Original, 2.0, &q, -1.0).is_err());
        assert!(FlowKind::parse("original").is_ok());
        assert!(FlowKind::parse("both").is_err());
    }
}
