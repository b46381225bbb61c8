//! One-dimensional quadrature engines.
//!
//! Two schemes cover everything the kernel reductions need:
//!
//! * tanh-sinh (double exponential): uniform accuracy for integrands that are
//!   analytic inside the interval but singular or sharply peaked at an
//!   endpoint;
//! * adaptive Gauss-Kronrod (G7K15): general-purpose error-controlled
//!   integration with interval bisection, used for the radial integrals.

use crate::error::{Error, Result};

/// A quadrature value together with its error estimate.
#[derive(Debug, Clone, Copy)]
pub struct QuadValue {
    pub value: f64,
    pub error: f64,
}

impl QuadValue {
    pub fn exact(value: f64) -> Self {
        Self {
            value,
            error: f64::EPSILON * value.abs(),
        }
    }
}

const TS_MAX_LEVEL: usize = 12;
// Minimum |t| before the per-level scan may stop on negligible terms; keeps
// the scan from quitting before the contribution hump of endpoint-singular
// integrands.
const TS_T_MIN_SCAN: f64 = 3.0;

/// Tanh-sinh quadrature of `f` over [a, b].
///
/// Nodes are passed to `f` as a signed offset from the nearer endpoint:
/// `f(from_left, d)` must evaluate the integrand at `a + d` when `from_left`
/// and at `b - d` otherwise.  Passing the endpoint distance instead of the
/// absolute coordinate keeps full precision for integrands with endpoint
/// singularities, where `d` can be far below the rounding scale of `a + d`.
pub fn tanh_sinh<F>(mut f: F, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> Result<QuadValue>
where
    F: FnMut(bool, f64) -> f64,
{
    assert!(b > a, "tanh_sinh requires b > a");
    let half = 0.5 * (b - a);
    let mut bad_value = false;

    // Contribution of the node pair at parameter t > 0 (t == 0 gives the one
    // central node).  `None` once the endpoint distance or the weight
    // underflows; nothing measurable lies beyond.
    let mut node_sum = |t: f64, bad: &mut bool| -> Option<f64> {
        if t == 0.0 {
            return Some(half * std::f64::consts::FRAC_PI_2 * f(true, half));
        }
        let y = std::f64::consts::FRAC_PI_2 * t.sinh();
        // Distance from the endpoint: half*(1 - tanh(y)) = half * 2/(1+e^{2y}).
        let d = half * 2.0 / (1.0 + (2.0 * y).exp());
        if d == 0.0 {
            return None;
        }
        let w = half * std::f64::consts::FRAC_PI_2 * t.cosh() / y.cosh().powi(2);
        if w == 0.0 || !w.is_finite() {
            return None;
        }
        // Right arm approaches b, left arm approaches a.
        let term = w * (f(false, d) + f(true, d));
        if !term.is_finite() {
            *bad = true;
            return None;
        }
        Some(term)
    };

    // Scan one level: nodes j = start, start+step, ... until terms stay
    // negligible (or underflow).  Returns the accumulated contribution.
    let mut scan = |h: f64, start: u64, step: u64, running: f64, bad: &mut bool| -> f64 {
        let mut acc = 0.0;
        let mut quiet = 0u32;
        let mut j = start;
        loop {
            let t = j as f64 * h;
            match node_sum(t, bad) {
                None => break,
                Some(term) => {
                    acc += term;
                    let scale = (running.abs() + acc.abs()) * 0.25 * f64::EPSILON;
                    if term.abs() <= scale + f64::MIN_POSITIVE {
                        quiet += 1;
                        if quiet >= 3 && t >= TS_T_MIN_SCAN {
                            break;
                        }
                    } else {
                        quiet = 0;
                    }
                }
            }
            j += step;
        }
        acc
    };

    // Level 0: step 1 in t, including the central node.
    let mut h = 1.0;
    let mut sum = scan(h, 0, 1, 0.0, &mut bad_value);
    let mut value = h * sum;
    let mut prev;

    for level in 1..=TS_MAX_LEVEL {
        h *= 0.5;
        // Only the new (odd-multiple) nodes.
        sum += scan(h, 1, 2, sum, &mut bad_value);
        prev = value;
        value = h * sum;
        if bad_value || !value.is_finite() {
            return Err(Error::InvalidInput(
                "non-finite integrand value in tanh-sinh quadrature".into(),
            ));
        }
        let err = (value - prev).abs();
        if level >= 2 && err <= abs_tol.max(rel_tol * value.abs()) {
            return Ok(QuadValue { value, error: err });
        }
        if level == TS_MAX_LEVEL {
            return Err(Error::ToleranceNotMet {
                achieved: err,
                requested: abs_tol.max(rel_tol * value.abs()),
            });
        }
    }
    unreachable!()
}

/// Convenience wrapper for integrands that only need the absolute coordinate.
pub fn tanh_sinh_plain<F>(mut f: F, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> Result<QuadValue>
where
    F: FnMut(f64) -> f64,
{
    tanh_sinh(
        |from_left, d| {
            let x = if from_left { a + d } else { b - d };
            f(x)
        },
        a,
        b,
        rel_tol,
        abs_tol,
    )
}

// 15-point Kronrod abscissae/weights with the embedded 7-point Gauss rule
// (positive half; QUADPACK dqk15 constants).
const XGK: [f64; 8] = [
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
];
const WG: [f64; 4] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
];

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut res_abs = kronrod.abs();
    for k in 0..7 {
        let x = half * XGK[k];
        let f1 = f(center - x);
        let f2 = f(center + x);
        kronrod += WGK[k] * (f1 + f2);
        res_abs += WGK[k] * (f1.abs() + f2.abs());
        if k % 2 == 1 {
            gauss += WG[k / 2] * (f1 + f2);
        }
    }
    let value = kronrod * half;
    let raw = ((kronrod - gauss) * half).abs();
    // QUADPACK-style error rescaling keeps the estimate conservative without
    // drowning in roundoff for nearly exact intervals.
    let res_abs = res_abs * half.abs();
    let mut err = raw;
    if raw != 0.0 && res_abs != 0.0 {
        let scale = (200.0 * raw / res_abs).powf(1.5);
        err = if scale < 1.0 { res_abs * scale } else { res_abs };
    }
    err = err.max(50.0 * f64::EPSILON * res_abs);
    (value, err)
}

struct Interval {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

/// Adaptive Gauss-Kronrod integration of `f` over [a, b].
///
/// Bisects the interval with the largest error estimate until the total
/// estimate satisfies `max(abs_tol, rel_tol * |value|)` or `max_subdivisions`
/// bisections have been spent, in which case a `ToleranceNotMet` error carries
/// the achieved estimate.
pub fn adaptive_gk<F>(
    mut f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
    max_subdivisions: u32,
) -> Result<QuadValue>
where
    F: FnMut(f64) -> f64,
{
    if a == b {
        return Ok(QuadValue::exact(0.0));
    }
    assert!(b > a, "adaptive_gk requires b >= a");
    let (v, e) = gk15(&mut f, a, b);
    let mut intervals = vec![Interval {
        a,
        b,
        value: v,
        error: e,
    }];

    for _ in 0..max_subdivisions {
        let value: f64 = intervals.iter().map(|i| i.value).sum();
        let error: f64 = intervals.iter().map(|i| i.error).sum();
        if !value.is_finite() {
            return Err(Error::ToleranceNotMet {
                achieved: f64::INFINITY,
                requested: abs_tol.max(rel_tol),
            });
        }
        if error <= abs_tol.max(rel_tol * value.abs()) {
            return Ok(QuadValue { value, error });
        }
        // Split the worst interval.
        let worst = intervals
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(k, _)| k)
            .expect("non-empty interval list");
        let Interval { a, b, .. } = intervals.swap_remove(worst);
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            // Interval at rounding resolution; keep its estimate and stop
            // refining it.
            let (v, e) = gk15(&mut f, a, b);
            intervals.push(Interval {
                a,
                b,
                value: v,
                error: e * f64::EPSILON.sqrt(),
            });
            continue;
        }
        let (v1, e1) = gk15(&mut f, a, mid);
        let (v2, e2) = gk15(&mut f, mid, b);
        intervals.push(Interval {
            a,
            b: mid,
            value: v1,
            error: e1,
        });
        intervals.push(Interval {
            a: mid,
            b,
            value: v2,
            error: e2,
        });
    }

    let value: f64 = intervals.iter().map(|i| i.value).sum();
    let error: f64 = intervals.iter().map(|i| i.error).sum();
    if error <= abs_tol.max(rel_tol * value.abs()) {
        Ok(QuadValue { value, error })
    } else {
        Err(Error::ToleranceNotMet {
            achieved: error,
            requested: abs_tol.max(rel_tol * value.abs()),
        })
    }
}
