//! Branches of the complex logarithm selected by an explicit window.
//!
//! A branch with window center `θ` returns values with imaginary part in
//! `(θ − π, θ + π)`. Branches are never chosen by "nearest value"; the
//! window is always stated, so chains of branches are reproducible.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::{exp_map, ComplexPoint};

/// Angular distance to the excluded ray below which [`windowed_log`] refuses to answer.
pub const CUT_TOLERANCE: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum BranchError {
    #[error("logarithm of zero")]
    ZeroArgument,
    #[error("point lies on the cut of the branch centered at {window_center}")]
    OnCut { window_center: f64 },
    #[error("closed disc of radius {radius} around {center} contains the origin")]
    DiscContainsOrigin { center: ComplexPoint, radius: f64 },
    #[error("e^anchor lies outside the disc")]
    AnchorMismatch,
    #[error("point {0} lies outside the branch's disc")]
    OutsideDisc(ComplexPoint),
}

/// Selects the branch whose values have imaginary part within `π` of `window_center`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchSpec {
    pub window_center: f64,
}

impl BranchSpec {
    pub fn new(window_center: f64) -> Self {
        BranchSpec { window_center }
    }

    /// The branch `θ₀ + 2πk`.
    pub fn from_index(base: f64, index: i64) -> Self {
        BranchSpec::new(base + TAU * index as f64)
    }
}

/// `log|w| + i·(θ + Arg(w·e^{−iθ}))`.
///
/// The imaginary part is computed as `Arg w + 2πk` with integer `k`, so two
/// branches evaluated at the same point differ by an exact multiple of `2πi`
/// up to the rounding of `2πk`.
pub fn windowed_log(w: ComplexPoint, spec: BranchSpec) -> Result<ComplexPoint, BranchError> {
    if w.re == 0.0 && w.im == 0.0 {
        return Err(BranchError::ZeroArgument);
    }
    let theta = spec.window_center;
    let principal = w.im.atan2(w.re);
    let turns = ((theta - principal) / TAU).round();
    let lifted = principal + TAU * turns;
    if PI - (lifted - theta).abs() <= CUT_TOLERANCE * theta.abs().max(1.0) {
        return Err(BranchError::OnCut { window_center: theta });
    }
    Ok(ComplexPoint::new(w.norm().ln(), lifted))
}

/// A logarithm branch on a round disc omitting the origin, pinned by an anchor
/// `ζ₀` with `L(e^{ζ₀}) = ζ₀`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscBranch {
    pub center: ComplexPoint,
    pub radius: f64,
    pub spec: BranchSpec,
}

/// Builds the branch on `D_radius(center)` that takes `e^{anchor}` to `anchor`.
pub fn disc_branch(center: ComplexPoint, radius: f64, anchor: ComplexPoint) -> Result<DiscBranch, BranchError> {
    if center.norm() <= radius {
        return Err(BranchError::DiscContainsOrigin { center, radius });
    }
    let image = exp_map(anchor).map_err(|_| BranchError::AnchorMismatch)?;
    if (image - center).norm() >= radius {
        return Err(BranchError::AnchorMismatch);
    }
    Ok(DiscBranch { center, radius, spec: BranchSpec::new(anchor.im) })
}

impl DiscBranch {
    pub fn contains(&self, w: ComplexPoint) -> bool {
        (w - self.center).norm() < self.radius
    }

    pub fn eval(&self, w: ComplexPoint) -> Result<ComplexPoint, BranchError> {
        if !self.contains(w) {
            return Err(BranchError::OutsideDisc(w));
        }
        windowed_log(w, self.spec)
    }

    /// `L'(w) = 1/w`.
    pub fn derivative(&self, w: ComplexPoint) -> ComplexPoint {
        w.inv()
    }
}
