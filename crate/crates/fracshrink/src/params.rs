//! Domain types: kernel parameters, radial sets, quadrature configuration.

use serde::Serialize;

use crate::error::{Error, Result};

/// Relative gap below which two adjacent radii are considered degenerate and
/// curvature evaluation is refused.
pub const DEGENERACY_GUARD: f64 = 1e-6;

/// The pair (n, s) defining the interaction kernel |x - y|^-(n+s).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelParams {
    pub n: u32,
    pub s: f64,
}

impl KernelParams {
    pub fn new(n: u32, s: f64) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidInput(format!("dimension n = {n} must be >= 1")));
        }
        if !(s > 0.0 && s < 1.0) || !s.is_finite() {
            return Err(Error::InvalidInput(format!(
                "fractional order s = {s} must lie strictly in (0, 1)"
            )));
        }
        Ok(Self { n, s })
    }
}

/// A rotationally symmetric set described by its sorted boundary radii.
///
/// With `contains_origin` the set is B_{r_0} ∪ (B_{r_2}∖B_{r_1}) ∪ …,
/// otherwise (B_{r_1}∖B_{r_0}) ∪ (B_{r_3}∖B_{r_2}) ∪ …  The outermost
/// component is always bounded, which forces the parity of the radius count:
/// odd when the origin is inside, even when it is not.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialSet {
    radii: Vec<f64>,
    contains_origin: bool,
}

impl RadialSet {
    pub fn new(radii: Vec<f64>, contains_origin: bool) -> Result<Self> {
        if radii.is_empty() {
            return Err(Error::InvalidInput("radius list must be non-empty".into()));
        }
        for (k, &r) in radii.iter().enumerate() {
            if !(r > 0.0) || !r.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "radius #{k} = {r} must be strictly positive and finite"
                )));
            }
        }
        if radii.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput(
                "radii must be strictly increasing".into(),
            ));
        }
        let odd = radii.len() % 2 == 1;
        if odd != contains_origin {
            return Err(Error::InvalidInput(format!(
                "a set with {} radii must have contains_origin = {} so the outermost component is bounded",
                radii.len(),
                odd
            )));
        }
        Ok(Self {
            radii,
            contains_origin,
        })
    }

    /// A ball of the given radius.
    pub fn ball(r: f64) -> Result<Self> {
        Self::new(vec![r], true)
    }

    /// The annulus B_outer ∖ B_inner.
    pub fn annulus(inner: f64, outer: f64) -> Result<Self> {
        Self::new(vec![inner, outer], false)
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn contains_origin(&self) -> bool {
        self.contains_origin
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        false // the radius list is never empty by construction
    }

    /// Orientation of boundary sphere `i`: +1 when the set lies locally inside
    /// the sphere (outer boundary of a component), -1 when the set lies
    /// locally outside (inner boundary).  The outermost sphere is always +1
    /// and orientations alternate going inward.
    pub fn orientation(&self, i: usize) -> Result<f64> {
        if i >= self.radii.len() {
            return Err(Error::IndexOutOfRange {
                index: i,
                len: self.radii.len(),
            });
        }
        Ok(if (self.radii.len() - 1 - i) % 2 == 0 {
            1.0
        } else {
            -1.0
        })
    }

    /// Sign function σ(t) of the indicator difference χ_{E^c} - χ_E at radius
    /// t: +1 outside the set, -1 inside.  Errors when t hits a boundary radius.
    pub fn sign_at(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(Error::InvalidInput(format!("radius t = {t} must be >= 0")));
        }
        if self.radii.contains(&t) {
            return Err(Error::InvalidInput(format!(
                "sign function undefined on the boundary radius t = {t}"
            )));
        }
        // Number of boundary spheres outside t; the outermost region is
        // outside the set and each crossing flips membership.
        let crossings = self.radii.iter().filter(|&&r| r > t).count();
        Ok(if crossings % 2 == 0 { 1.0 } else { -1.0 })
    }

    /// The set scaled by λ > 0.
    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidInput(format!(
                "scale factor {lambda} must be strictly positive and finite"
            )));
        }
        Self::new(
            self.radii.iter().map(|r| r * lambda).collect(),
            self.contains_origin,
        )
    }

    /// Smallest relative gap between adjacent radii together with the index of
    /// the inner radius of the tightest pair.  Returns `None` for a single
    /// sphere.
    pub fn tightest_gap(&self) -> Option<(usize, f64)> {
        self.radii
            .windows(2)
            .enumerate()
            .map(|(i, w)| (i, (w[1] - w[0]) / w[1]))
            .min_by(|a, b| a.1.total_cmp(&b.1))
    }

    /// Errors with `DegenerateConfiguration` when any adjacent pair is within
    /// the degeneracy guard.
    pub fn check_degeneracy(&self) -> Result<()> {
        if let Some((i, gap)) = self.tightest_gap() {
            if gap < DEGENERACY_GUARD {
                return Err(Error::DegenerateConfiguration {
                    i,
                    j: i + 1,
                    gap_rel: gap,
                    guard: DEGENERACY_GUARD,
                });
            }
        }
        Ok(())
    }
}

/// Tolerances and budgets for all singular and improper integrals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: u32,
    /// Fraction of the shell integral near the singular radius handled by
    /// paired quadrature when assembling the ball curvature constant.
    pub pairing_cutoff: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_subdivisions: 60,
            pairing_cutoff: 0.5,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) || !(self.abs_tol > 0.0) {
            return Err(Error::InvalidInput(
                "rel_tol and abs_tol must be strictly positive".into(),
            ));
        }
        if self.max_subdivisions < 1 {
            return Err(Error::InvalidInput("max_subdivisions must be >= 1".into()));
        }
        if !(self.pairing_cutoff > 0.0 && self.pairing_cutoff < 1.0) {
            return Err(Error::InvalidInput(
                "pairing_cutoff must lie strictly in (0, 1)".into(),
            ));
        }
        Ok(())
    }

    /// Same budgets with both tolerances tightened by `factor`.
    pub fn tightened(&self, factor: f64) -> Self {
        Self {
            rel_tol: self.rel_tol * factor,
            abs_tol: self.abs_tol * factor,
            ..*self
        }
    }

    /// Config with both tolerances set to the given values.
    pub fn with_tols(&self, rel: f64, abs: f64) -> Self {
        Self {
            rel_tol: rel,
            abs_tol: abs,
            ..*self
        }
    }
}
