//! Constructive witnesses for escape, transitivity, periodic points and
//! sensitive dependence.
//!
//! Every search here is deterministic given its [`SearchConfig`], and every
//! result comes with a [`WitnessReport`] that can be replayed by [`verify`].
//! A search may fail with [`WitnessError::NotFound`]; it never returns a
//! point that did not pass its own checks.

mod escaping;
mod periodic;
mod report;
mod sensitivity;
mod transitivity;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::branches::{windowed_log, BranchSpec};
use crate::dynamics::{exp_map, ComplexPoint};

pub use escaping::{find_escaping_point, level_crossings, scan_landings, slide_to_height, EscapingWitness, Landing};
pub use periodic::{find_periodic, PeriodicMethod, PeriodicPointResult, PeriodicWitness, PERIODIC_TOLERANCE};
pub use report::{verify, Check, Payload, VerifyOutcome, WitnessReport, SCHEMA_VERSION};
pub use sensitivity::{
    escaped_log_modulus, sensitivity_witness, sensitivity_witness_for, SensitivityWitness, MIN_ESCAPE_HEIGHT,
};
pub use transitivity::{transitivity_witness, TransitivityMethod, TransitivityWitness, TRANSITIVITY_TOLERANCE};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WitnessError {
    #[error("disc radius must be positive and finite, got {0}")]
    InvalidDisc(f64),
    #[error("target is 0, which has no preimage")]
    TargetZero,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("no witness found (deepest stage tried: {deepest})")]
    NotFound { deepest: usize },
}

/// An open disc.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Disc {
    pub center: ComplexPoint,
    pub radius: f64,
}

impl Disc {
    pub fn new(center: ComplexPoint, radius: f64) -> Result<Self, WitnessError> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(WitnessError::InvalidDisc(radius));
        }
        Ok(Disc { center, radius })
    }

    pub fn contains(&self, z: ComplexPoint) -> bool {
        (z - self.center).norm() < self.radius
    }

    /// Distance from `z` to the boundary circle, negative outside.
    pub fn margin(&self, z: ComplexPoint) -> f64 {
        self.radius - (z - self.center).norm()
    }

    pub fn shrunk(&self, factor: f64) -> Disc {
        Disc { center: self.center, radius: self.radius * factor }
    }
}

/// Knobs shared by all searches.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub seed: u64,
    /// Height on the positive real axis that landings are steered to.
    pub t_star: f64,
    /// Deepest stage for axis landings.
    pub m_max: usize,
    /// Samples per diameter when scanning for sign changes.
    pub samples: usize,
    /// A point `w` is on `[0, ∞)` when `|Im w| ≤ axis_tol·max(1, Re w)`.
    pub axis_tol: f64,
    /// Allowed error `|Re f^m(z) − t_star|` after steering.
    pub height_tol: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { seed: 0, t_star: 50.0, m_max: 12, samples: 1024, axis_tol: 1e-10, height_tol: 1e-8 }
    }
}

impl SearchConfig {
    pub fn with_seed(seed: u64) -> Self {
        SearchConfig { seed, ..SearchConfig::default() }
    }

    fn check(&self) -> Result<(), WitnessError> {
        let lo = std::f64::consts::TAU + 2.0;
        if !(lo..=700.0).contains(&self.t_star) {
            return Err(WitnessError::InvalidParameter(format!("t_star must lie in [2π+2, 700], got {}", self.t_star)));
        }
        if self.samples < 2 {
            return Err(WitnessError::InvalidParameter("samples must be at least 2".into()));
        }
        Ok(())
    }
}

/// `[z, f(z), …, f^m(z)]`, or `None` once a step would overflow.
pub fn forward(z: ComplexPoint, m: usize) -> Option<Vec<ComplexPoint>> {
    let mut out = Vec::with_capacity(m + 1);
    out.push(z);
    for _ in 0..m {
        out.push(exp_map(*out.last()?).ok()?);
    }
    Some(out)
}

/// `(f^m)'(z) = f(z)·f²(z)⋯f^m(z)` from an orbit prefix.
pub(crate) fn derivative_along(orbit: &[ComplexPoint]) -> ComplexPoint {
    orbit[1..].iter().product()
}

pub(crate) fn on_axis(w: ComplexPoint, tol: f64) -> bool {
    w.re > 0.0 && w.im.abs() <= tol * w.re.max(1.0)
}

/// Pulls `w` back along `orbit`, using the window `Im orbit[j-1]` for the
/// `j`-th logarithm. Returns the backward values in forward order, ending at `w`.
pub(crate) fn pull_back_pointwise(orbit: &[ComplexPoint], w: ComplexPoint) -> Option<Vec<ComplexPoint>> {
    let mut trace = vec![w];
    let mut current = w;
    for anchor in orbit[..orbit.len() - 1].iter().rev() {
        current = windowed_log(current, BranchSpec::new(anchor.im)).ok()?;
        trace.push(current);
    }
    trace.reverse();
    Some(trace)
}

/// The 8 diameters of a disc at angles `jπ/8`, as `(start, end)` pairs.
pub(crate) fn diameters(disc: &Disc, shrink: f64) -> impl Iterator<Item = (ComplexPoint, ComplexPoint)> {
    let r = disc.radius * shrink;
    let c = disc.center;
    (0..8).map(move |j| {
        let angle = j as f64 * std::f64::consts::PI / 8.0;
        let d = ComplexPoint::from_polar(r, angle);
        (c - d, c + d)
    })
}

pub(crate) const NOTE: &str = "Search-based witness. The search itself proves nothing; the claims below are \
accepted because the recorded checks pass within the stated tolerances, so certification is tolerance-qualified.";
