//! Inverse branches of iterates of `e^z`.
//!
//! Two constructions live here. A [`PullbackChain`] composes logarithm
//! branches anchored along a forward orbit `z_0, …, z_n`, giving a branch of
//! `f^{-n}` near `z_n` that maps back near `z_0`. An [`F2Branch`] is a branch of
//! `f^{-2}` on `D_{|v|/2}(v)` with values in a disc of radius `2π` around a
//! chosen point far to the right.
//!
//! Inverse branches are verified one step at a time: `exp` applied to each
//! backward value must return the value it came from. Forward re-iteration
//! is useless here, since the moduli involved are often far beyond anything
//! that survives rounding of the imaginary part.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::branches::{windowed_log, BranchError, BranchSpec};
use crate::dynamics::{exp_map, ComplexPoint, DynamicsError, LogPolarPoint};

/// Largest real part allowed for the center of an [`F2Branch`] target disc.
pub const MAX_CENTER_RE: f64 = 700.0;

/// Relative tolerance for `L_k(z_k) = z_{k-1}` when a chain is built.
pub const ORBIT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum InverseError {
    #[error("disc of radius {radius} around orbit point {index} (modulus {modulus}) reaches the origin")]
    DiscTouchesOrigin { index: usize, modulus: f64, radius: f64 },
    #[error("orbit point {index} is not the image of its predecessor")]
    OrbitMismatch { index: usize },
    #[error("a chain of length {n} needs {needed} orbit points, got {got}")]
    OrbitTooShort { n: usize, needed: usize, got: usize },
    #[error("point {0} lies outside the branch domain")]
    OutsideDisc(ComplexPoint),
    #[error(transparent)]
    Branch(#[from] BranchError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error("compact set is empty")]
    EmptyK,
    #[error("compact set contains 0")]
    ZeroInK,
    #[error("target is 0, which has no preimage")]
    TargetZero,
    #[error("disc center real part {re} is below the admissible bound {rho}")]
    CenterTooFarLeft { re: f64, rho: f64 },
    #[error("disc center real part {re} exceeds {MAX_CENTER_RE}")]
    CenterTooFarRight { re: f64 },
}

/// `re + i·(im + 2π·turns)` with `turns` an integer stored as `f64`.
///
/// Keeping the multiple of `2π` apart lets `exp` be evaluated exactly at
/// points whose imaginary part is too large for its residue mod `2π` to
/// survive in a single `f64`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LiftedPoint {
    pub re: f64,
    pub im: f64,
    pub turns: f64,
}

impl LiftedPoint {
    pub fn plain(z: ComplexPoint) -> Self {
        LiftedPoint { re: z.re, im: z.im, turns: 0.0 }
    }

    /// The nearest `f64` point; loses the residue once `|turns|` is large.
    pub fn to_point(self) -> ComplexPoint {
        ComplexPoint::new(self.re, self.im + TAU * self.turns)
    }

    pub fn exp(self) -> Result<ComplexPoint, DynamicsError> {
        exp_map(ComplexPoint::new(self.re, self.im))
    }
}

/// `|e^{from} − to| / |to|`.
pub fn step_residual(from: LiftedPoint, to: ComplexPoint) -> f64 {
    match from.exp() {
        Ok(image) => (image - to).norm() / to.norm().max(f64::MIN_POSITIVE),
        Err(_) => f64::INFINITY,
    }
}

/// Residuals of the forward steps `points[j] ↦ points[j+1]`.
pub fn stepwise_residuals(points: &[LiftedPoint]) -> Vec<f64> {
    points.windows(2).map(|pair| step_residual(pair[0], pair[1].to_point())).collect()
}

/// `log(1 + u)` for `|u| < 1`, accurate when `u` is tiny.
pub fn log1p(u: ComplexPoint) -> ComplexPoint {
    let re = 0.5 * (2.0 * u.re + u.norm_sqr()).ln_1p();
    ComplexPoint::new(re, u.im.atan2(1.0 + u.re))
}

/// A branch `φ_n = L_1 ∘ … ∘ L_n` of `f^{-n}` anchored along an orbit.
///
/// `L_k` is the logarithm with window center `Im z_{k-1}`, defined on
/// `D_k = D_{radii[k]}(z_k)`. The radii shrink backwards,
/// `radii[k-1] = radii[k] / (|z_k| − radii[k])`, so `L_k(D_k) ⊂ D_{k-1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PullbackChain {
    pub base_orbit: Vec<ComplexPoint>,
    /// `branch_specs[k-1]` selects `L_k`.
    pub branch_specs: Vec<BranchSpec>,
    pub radii: Vec<f64>,
    /// `∏ 1/(|z_k| − radii[k])`, an upper bound for `|φ_n'|` on `D_n`.
    pub deriv_bound: f64,
    pub disc_radius: f64,
}

/// [`build_pullback_with_radius`] with the standard radius `2π`.
pub fn build_pullback(orbit: &[ComplexPoint], n: usize) -> Result<PullbackChain, InverseError> {
    build_pullback_with_radius(orbit, n, TAU)
}

/// Builds the chain along `orbit[0..=n]` on a disc of radius `radius` around `orbit[n]`.
///
/// The orbit is checked, not recomputed.
pub fn build_pullback_with_radius(
    orbit: &[ComplexPoint],
    n: usize,
    radius: f64,
) -> Result<PullbackChain, InverseError> {
    if n == 0 || orbit.len() < n + 1 {
        return Err(InverseError::OrbitTooShort { n, needed: n + 1, got: orbit.len() });
    }
    let base_orbit = orbit[..=n].to_vec();
    let mut branch_specs = Vec::with_capacity(n);
    for k in 1..=n {
        let spec = BranchSpec::new(base_orbit[k - 1].im);
        let back = windowed_log(base_orbit[k], spec).map_err(|_| InverseError::OrbitMismatch { index: k })?;
        let scale = base_orbit[k - 1].norm().max(1.0);
        if (back - base_orbit[k - 1]).norm() > ORBIT_TOLERANCE * scale {
            return Err(InverseError::OrbitMismatch { index: k });
        }
        branch_specs.push(spec);
    }

    let mut radii = vec![0.0; n + 1];
    radii[n] = radius;
    let mut deriv_bound = 1.0;
    for k in (1..=n).rev() {
        let modulus = base_orbit[k].norm();
        if modulus <= radii[k] {
            return Err(InverseError::DiscTouchesOrigin { index: k, modulus, radius: radii[k] });
        }
        let factor = 1.0 / (modulus - radii[k]);
        radii[k - 1] = radii[k] * factor;
        deriv_bound *= factor;
    }

    Ok(PullbackChain { base_orbit, branch_specs, radii, deriv_bound, disc_radius: radius })
}

impl PullbackChain {
    pub fn len(&self) -> usize {
        self.branch_specs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.branch_specs.is_empty()
    }

    pub fn tip(&self) -> ComplexPoint {
        self.base_orbit[self.len()]
    }

    pub fn contains(&self, w: ComplexPoint) -> bool {
        (w - self.tip()).norm() < self.disc_radius
    }

    /// `[φ_n(w), …, L_n(w), w]`, a forward orbit ending at `w`.
    pub fn pull_back(&self, w: ComplexPoint) -> Result<Vec<ComplexPoint>, InverseError> {
        if !self.contains(w) {
            return Err(InverseError::OutsideDisc(w));
        }
        let mut trace = vec![w];
        let mut current = w;
        for spec in self.branch_specs.iter().rev() {
            current = windowed_log(current, *spec)?;
            trace.push(current);
        }
        trace.reverse();
        Ok(trace)
    }

    pub fn eval(&self, w: ComplexPoint) -> Result<ComplexPoint, InverseError> {
        Ok(self.pull_back(w)?[0])
    }

    /// `φ_n(z_n + δ)`, evaluated without forming `z_n + δ`.
    ///
    /// The first branch is `z_{n-1} + log(1 + δ/z_n)`, which keeps full
    /// relative precision in `δ` even when `|z_n|` dwarfs it.
    pub fn eval_offset(&self, delta: ComplexPoint) -> Result<ComplexPoint, InverseError> {
        if delta.norm() >= self.disc_radius {
            return Err(InverseError::OutsideDisc(self.tip() + delta));
        }
        let n = self.len();
        let mut current = self.base_orbit[n - 1] + log1p(delta / self.tip());
        for spec in self.branch_specs[..n - 1].iter().rev() {
            current = windowed_log(current, *spec)?;
        }
        Ok(current)
    }

    /// `φ_n` at a point given in log-polar form, for tips beyond `f64` range.
    ///
    /// Membership in `D_n` is not checked; the caller vouches for it.
    pub fn eval_log_polar(&self, w: LogPolarPoint) -> Result<ComplexPoint, InverseError> {
        let n = self.len();
        let theta = self.branch_specs[n - 1].window_center;
        let turns = ((theta - w.arg) / TAU).round();
        let lifted = w.arg + TAU * turns;
        if PI - (lifted - theta).abs() <= crate::branches::CUT_TOLERANCE * theta.abs().max(1.0) {
            return Err(BranchError::OnCut { window_center: theta }.into());
        }
        let mut current = ComplexPoint::new(w.log_mod, lifted);
        for spec in self.branch_specs[..n - 1].iter().rev() {
            current = windowed_log(current, *spec)?;
        }
        Ok(current)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("chain serializes")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}

/// The annulus `e^a < |w| < e^{a+2π}`, the image of a square of side `2π`
/// whose left edge sits at `Re z = a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnulusSpec {
    pub r_minus: f64,
    pub r_plus: f64,
}

impl AnnulusSpec {
    pub fn contains(&self, w: ComplexPoint) -> bool {
        let m = w.norm();
        self.r_minus < m && m < self.r_plus
    }
}

pub fn annulus_of_square(a: f64) -> Result<AnnulusSpec, InverseError> {
    if !a.is_finite() || a > MAX_CENTER_RE - TAU {
        return Err(DynamicsError::Overflow { re: a + TAU }.into());
    }
    Ok(AnnulusSpec { r_minus: a.exp(), r_plus: (a + TAU).exp() })
}

/// `3π + max |log|z||` over `k`.
pub fn rho_for_compact(k: &[ComplexPoint]) -> Result<f64, InverseError> {
    if k.is_empty() {
        return Err(InverseError::EmptyK);
    }
    let mut worst: f64 = 0.0;
    for z in k {
        if z.norm() == 0.0 {
            return Err(InverseError::ZeroInK);
        }
        worst = worst.max(z.norm().ln().abs());
    }
    Ok(3.0 * PI + worst)
}

/// `max(|Log v| + 3, log 4 − log|v|)`.
pub fn rho_for_target(v: ComplexPoint) -> Result<f64, InverseError> {
    if v.norm() == 0.0 {
        return Err(InverseError::TargetZero);
    }
    let w0 = Complex64::new(v.norm().ln(), v.arg());
    Ok((w0.norm() + 3.0).max(4f64.ln() - v.norm().ln()))
}

/// A branch `ψ` of `f^{-2}` on `Δ = D_{|v|/2}(v)` with values in `D_{2π}(ζ)`.
///
/// `ψ = L_out ∘ L_in`: `L_in` is the logarithm near `Arg v` shifted by
/// `turns` sheets, chosen so that `|L_in(v)| ≈ |e^ζ|`; `L_out` is the
/// logarithm whose window puts the imaginary part next to `Im ζ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct F2Branch {
    pub target: ComplexPoint,
    pub disc_center: ComplexPoint,
    pub turns: f64,
    pub outer_window: f64,
}

/// Both stages of `ψ(z)`: `inner = L_in(z)` and `point = L_out(inner)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct F2Value {
    pub inner: LiftedPoint,
    pub point: ComplexPoint,
}

impl F2Value {
    /// `[ψ(z), L_in(z), z]` as a forward orbit.
    pub fn trace(&self, z: ComplexPoint) -> [LiftedPoint; 3] {
        [LiftedPoint::plain(self.point), self.inner, LiftedPoint::plain(z)]
    }
}

pub fn inverse_f2_branch(v: ComplexPoint, disc_center: ComplexPoint) -> Result<F2Branch, InverseError> {
    let rho = rho_for_target(v)?;
    if disc_center.re < rho {
        return Err(InverseError::CenterTooFarLeft { re: disc_center.re, rho });
    }
    if disc_center.re > MAX_CENTER_RE {
        return Err(InverseError::CenterTooFarRight { re: disc_center.re });
    }
    // |w| = e^{Re ζ} on the line Re w = log|v| happens at |Im w| = y.
    let log_v = v.norm().ln();
    let big_e = disc_center.re.exp();
    let y = big_e * (1.0 - (log_v / big_e).powi(2)).sqrt();

    // L_in(v) points up (s = 1) or down (s = −1); its logarithm then has
    // imaginary part near s·π/2 + 2πm. Pick the sheet closest to Im ζ.
    let sheet = |s: f64| {
        let m = ((disc_center.im - s * PI / 2.0) / TAU).round();
        (s, m, (disc_center.im - s * PI / 2.0 - TAU * m).abs())
    };
    let (up, down) = (sheet(1.0), sheet(-1.0));
    let (s, m, _) = if down.2 < up.2 { down } else { up };

    Ok(F2Branch {
        target: v,
        disc_center,
        turns: ((s * y - v.arg()) / TAU).round(),
        outer_window: s * PI / 2.0 + TAU * m,
    })
}

impl F2Branch {
    pub fn domain_radius(&self) -> f64 {
        self.target.norm() / 2.0
    }

    pub fn in_domain(&self, z: ComplexPoint) -> bool {
        (z - self.target).norm() < self.domain_radius()
    }

    pub fn lands_in_disc(&self, value: &F2Value) -> bool {
        (value.point - self.disc_center).norm() < TAU
    }

    pub fn eval(&self, z: ComplexPoint) -> Result<F2Value, InverseError> {
        if !self.in_domain(z) {
            return Err(InverseError::OutsideDisc(z));
        }
        let first = windowed_log(z, BranchSpec::new(self.target.arg()))?;
        let inner = LiftedPoint { re: first.re, im: first.im, turns: self.turns };
        let point = windowed_log(inner.to_point(), BranchSpec::new(self.outer_window))?;
        Ok(F2Value { inner, point })
    }

    /// `ψ'(z) = 1 / (L_in(z)·z)`.
    pub fn derivative(&self, z: ComplexPoint) -> Result<ComplexPoint, InverseError> {
        let value = self.eval(z)?;
        Ok((value.inner.to_point() * z).inv())
    }
}
