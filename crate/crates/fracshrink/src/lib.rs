//! Fractional mean curvature of rotationally symmetric sets, homothetically
//! shrinking annular solutions, their linear stability, and simulation of the
//! original and rescaled flows.
//!
//! The geometric flow moves each boundary point with normal velocity equal to
//! minus the fractional mean curvature
//!
//! ```text
//! H_s(x, E) = p.v. ∫ (χ_{E^c}(y) - χ_E(y)) |x - y|^{-(n+s)} dy,   s ∈ (0, 1).
//! ```
//!
//! For finite unions of concentric annuli (optionally with a central ball)
//! everything reduces to the boundary radii: curvature evaluation becomes a
//! family of 1-D kernel quadratures, self-similar shrinking profiles become a
//! finite nonlinear system in the radii, stability becomes the spectrum of an
//! analytic Jacobian, and both flows become small ODE systems.

pub mod curvature;
pub mod error;
pub mod flow;
pub mod kernel;
pub mod linalg;
pub mod output;
pub mod params;
pub mod quad;
pub mod shrinker;
pub mod special;
pub mod stability;

pub use error::{Error, Result};
pub use params::{KernelParams, QuadratureConfig, RadialSet, DEGENERACY_GUARD};
pub use quad::QuadValue;
