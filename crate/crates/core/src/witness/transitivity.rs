//! Points of a disc that hit a prescribed target exactly.

use serde::{Deserialize, Serialize};

use super::{
    forward, level_crossings, pull_back_pointwise, scan_landings, slide_to_height, Disc, SearchConfig, WitnessError,
};
use crate::branches::{windowed_log, BranchSpec};
use crate::dynamics::ComplexPoint;
use crate::inverse::{build_pullback_with_radius, inverse_f2_branch, stepwise_residuals, LiftedPoint, PullbackChain};

/// Bound on the sum of the stepwise residuals of a transitivity trace.
pub const TRANSITIVITY_TOLERANCE: f64 = 1e-8;

/// Landings, and separately level crossings, tried per stage.
const ANCHORS_PER_STAGE: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TransitivityMethod {
    /// Pulled back along the orbit of the disc center.
    Shortcut,
    /// The pullback chain maps a disc around the pulled-back point into the target disc.
    Chain,
    /// Only the pulled-back point itself was checked for membership.
    Pointwise,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitivityWitness {
    pub point: ComplexPoint,
    pub n: usize,
    pub target: ComplexPoint,
    /// `z, f(z), …, f^n(z) = v`. One entry may carry whole turns of `2πi`.
    pub trace: Vec<LiftedPoint>,
    pub residuals: Vec<f64>,
    pub method: TransitivityMethod,
    /// Moved to the top level of a [`super::WitnessReport`].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chain: Option<PullbackChain>,
}

impl TransitivityWitness {
    pub fn total_residual(&self) -> f64 {
        self.residuals.iter().sum()
    }
}

/// Finds `z ∈ disc` and `n ≥ max(n_min, 1)` with `f^n(z) = v`, verified stepwise.
///
/// After two shortcut attempts along the orbit of the center, the search
/// takes axis landings `z_0, …, z_m` in the disc, maps `v` into
/// `D_{2π}(z_m)` with a branch of `f^{-2}`, and pulls the result back along
/// the landing orbit. Points where `Re f^m` crosses `t_star` serve as
/// further anchors; they reach the thin regions where `f^m` has not yet
/// overflowed. When the pullback misses the disc, `v` is first replaced by
/// one of its iterated principal logarithms, which also raises `n`.
pub fn transitivity_witness(
    disc: &Disc,
    v: ComplexPoint,
    n_min: usize,
    cfg: &SearchConfig,
) -> Result<TransitivityWitness, WitnessError> {
    if v.norm() == 0.0 {
        return Err(WitnessError::TargetZero);
    }
    cfg.check()?;

    for n in 1..=2usize {
        if n < n_min {
            continue;
        }
        if let Some(mut windows) = forward(disc.center, n - 1) {
            windows.push(v);
            if let Some(back) = pull_back_pointwise(&windows, v) {
                if disc.contains(back[0]) {
                    let trace = back.into_iter().map(LiftedPoint::plain).collect();
                    if let Some(w) = finish(trace, v, TransitivityMethod::Shortcut, None) {
                        return Ok(w);
                    }
                }
            }
        }
    }

    // targets[j] = Log^j(v), so f^j(targets[j]) = v.
    let depth = 3.max(n_min.saturating_sub(2));
    let mut targets = vec![v];
    while targets.len() <= depth {
        let u = *targets.last().unwrap();
        match windowed_log(u, BranchSpec::new(u.arg())) {
            Ok(l) if l.norm() > 0.0 => targets.push(l),
            _ => break,
        }
    }

    for m in 0..=cfg.m_max {
        let landings = scan_landings(disc, m, cfg)
            .into_iter()
            .take(ANCHORS_PER_STAGE)
            .map(|l| slide_to_height(disc, &l, cfg.t_star, cfg).unwrap_or(l).point);
        let crossings = if m == 0 { Vec::new() } else { level_crossings(disc, m, cfg.t_star, cfg) };
        for z0 in landings.chain(crossings.into_iter().take(ANCHORS_PER_STAGE)) {
            let Some(orbit) = forward(z0, m) else { continue };
            for (j, vj) in targets.iter().enumerate() {
                if m + 2 + j < n_min {
                    continue;
                }
                if let Some(w) = attempt(disc, &orbit, &targets[..=j], *vj) {
                    return Ok(w);
                }
            }
        }
    }
    Err(WitnessError::NotFound { deepest: cfg.m_max })
}

fn attempt(
    disc: &Disc,
    orbit: &[ComplexPoint],
    pre_pulls: &[ComplexPoint],
    vj: ComplexPoint,
) -> Option<TransitivityWitness> {
    let k = orbit.len() - 1;
    let zeta = orbit[k];
    let psi = inverse_f2_branch(vj, zeta).ok()?;
    let value = psi.eval(vj).ok()?;
    if !psi.lands_in_disc(&value) {
        return None;
    }
    let back = pull_back_pointwise(orbit, value.point)?;
    if !disc.contains(back[0]) {
        return None;
    }

    let offset = (value.point - zeta).norm();
    let chain = if k == 0 {
        None
    } else {
        [std::f64::consts::TAU, offset * (1.0 + 1e-9) + 1e-12].into_iter().filter(|r| *r > offset).find_map(|r| {
            build_pullback_with_radius(orbit, k, r).ok().filter(|ch| ch.radii[0] <= disc.margin(orbit[0]))
        })
    };
    let method = if chain.is_some() { TransitivityMethod::Chain } else { TransitivityMethod::Pointwise };

    let mut trace: Vec<LiftedPoint> = back.into_iter().map(LiftedPoint::plain).collect();
    trace.push(value.inner);
    trace.extend(pre_pulls.iter().rev().map(|u| LiftedPoint::plain(*u)));
    finish(trace, pre_pulls[0], method, chain)
}

fn finish(
    trace: Vec<LiftedPoint>,
    target: ComplexPoint,
    method: TransitivityMethod,
    chain: Option<PullbackChain>,
) -> Option<TransitivityWitness> {
    let residuals = stepwise_residuals(&trace);
    let total: f64 = residuals.iter().sum();
    (total <= TRANSITIVITY_TOLERANCE).then(|| TransitivityWitness {
        point: trace[0].to_point(),
        n: trace.len() - 1,
        target,
        trace,
        residuals,
        method,
        chain,
    })
}
