//! Repelling periodic points as fixed points of contracting inverse branches.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{forward, level_crossings, pull_back_pointwise, scan_landings, Disc, SearchConfig, WitnessError};
use crate::dynamics::{multiplier_along, ComplexPoint};
use crate::inverse::{inverse_f2_branch, rho_for_target, F2Branch};

/// Largest allowed `|f^period(p) − p|`.
pub const PERIODIC_TOLERANCE: f64 = 1e-9;

/// Successive contraction iterates closer than this count as converged.
const STEP_TOLERANCE: f64 = 1e-12;
const MAX_CONTRACTION_STEPS: usize = 200;
const RANDOM_ANCHORS: usize = 16;
/// Deepest forward stage considered for an anchor orbit.
const MAX_DEPTH: usize = 12;
/// Candidates whose estimated `log` multiplier exceeds this cannot meet the
/// residual tolerance in double precision.
const MAX_LOG_MULTIPLIER: f64 = 23.0;
const MAX_CANDIDATES: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeriodicPointResult {
    pub point: ComplexPoint,
    /// Length of the verified cycle: the minimal period, repeated until the
    /// multiplier reaches 2.
    pub period: usize,
    pub minimal_period: usize,
    pub multiplier_modulus: f64,
    pub residual: f64,
    pub contraction_steps: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PeriodicMethod {
    /// The anchor orbit returns near its start; iterate the pullback along it.
    ReturnLoop,
    /// Map into a disc far to the right with a branch of `f^{-2}`, then pull back.
    F2Branch,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodicWitness {
    pub result: PeriodicPointResult,
    /// `p, f(p), …, f^period(p)`.
    pub cycle: Vec<ComplexPoint>,
    pub method: PeriodicMethod,
    pub anchor: ComplexPoint,
    /// Stage of the anchor orbit at which the contraction was built.
    pub depth: usize,
}

struct Candidate {
    orbit: Vec<ComplexPoint>,
    method: PeriodicMethod,
    log_multiplier: f64,
}

/// Finds a repelling periodic point in `disc`.
///
/// Anchors are drawn from the inner half of the disc: its center, seeded
/// random points, axis landings, and points where `Re f^k` crosses a height
/// just above the bound needed for the `f^{-2}` branch. Each anchor orbit
/// `z_0, …, z_k` yields a map `g` near `z_0` that inverts `f^k` (when the
/// orbit returns near `z_0`) or `f^{k+2}`; its fixed point, reached by
/// iteration, is periodic. Candidates are tried in order of their estimated
/// multiplier, smallest first, since the residual `|f^P(p) − p|` of a
/// double-precision point grows with the multiplier.
pub fn find_periodic(disc: &Disc, cfg: &SearchConfig) -> Result<PeriodicWitness, WitnessError> {
    cfg.check()?;
    let inner = disc.shrunk(0.5);
    let mut candidates = Vec::new();
    for anchor in anchors(&inner, cfg) {
        collect_candidates(&inner, anchor, &mut candidates);
    }
    candidates.sort_by(|a, b| a.log_multiplier.total_cmp(&b.log_multiplier));

    for cand in candidates.iter().take(MAX_CANDIDATES) {
        if let Some(w) = try_candidate(disc, cand) {
            return Ok(w);
        }
    }
    Err(WitnessError::NotFound { deepest: MAX_DEPTH })
}

fn anchors(inner: &Disc, cfg: &SearchConfig) -> Vec<ComplexPoint> {
    let mut out = vec![inner.center];
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for _ in 0..RANDOM_ANCHORS {
        let r = inner.radius * rng.gen::<f64>().sqrt();
        let t = rng.gen::<f64>() * std::f64::consts::TAU;
        out.push(inner.center + ComplexPoint::from_polar(r, t));
    }
    for m in 0..=cfg.m_max.min(MAX_DEPTH) {
        out.extend(scan_landings(inner, m, cfg).iter().take(4).map(|l| l.point));
    }
    if let Ok(rho) = rho_for_target(inner.center) {
        for k in 1..=MAX_DEPTH {
            out.extend(level_crossings(inner, k, rho + 0.5, cfg).into_iter().take(8));
        }
    }
    out
}

fn collect_candidates(inner: &Disc, z0: ComplexPoint, out: &mut Vec<Candidate>) {
    let mut orbit = vec![z0];
    let Ok(rho) = rho_for_target(z0) else { return };
    let mut log_m = 0.0;
    for k in 1..=MAX_DEPTH {
        let Some(next) = forward(orbit[k - 1], 1) else { break };
        let zk = next[1];
        orbit.push(zk);
        log_m += zk.norm().ln();
        if log_m > MAX_LOG_MULTIPLIER {
            break;
        }
        if inner.contains(zk) {
            out.push(Candidate { orbit: orbit.clone(), method: PeriodicMethod::ReturnLoop, log_multiplier: log_m });
        }
        if zk.re >= rho && zk.re <= crate::inverse::MAX_CENTER_RE {
            // f^{k+1} lands near |e^{z_k}|, and the cycle then returns to z_0.
            let estimate = log_m + zk.re + z0.norm().ln();
            if estimate <= MAX_LOG_MULTIPLIER {
                out.push(Candidate {
                    orbit: orbit.clone(),
                    method: PeriodicMethod::F2Branch,
                    log_multiplier: estimate,
                });
            }
        }
    }
}

fn try_candidate(disc: &Disc, cand: &Candidate) -> Option<PeriodicWitness> {
    let k = cand.orbit.len() - 1;
    let z0 = cand.orbit[0];
    let psi: Option<F2Branch> = match cand.method {
        PeriodicMethod::ReturnLoop => None,
        PeriodicMethod::F2Branch => Some(inverse_f2_branch(z0, cand.orbit[k]).ok()?),
    };
    let g = |z: ComplexPoint| -> Option<ComplexPoint> {
        let tip = match &psi {
            None => z,
            Some(psi) => psi.eval(z).ok()?.point,
        };
        Some(pull_back_pointwise(&cand.orbit, tip)?[0])
    };

    let mut z = z0;
    let mut steps = None;
    for step in 1..=MAX_CONTRACTION_STEPS {
        let next = g(z)?;
        let moved = (next - z).norm();
        z = next;
        if moved <= STEP_TOLERANCE {
            steps = Some(step);
            break;
        }
    }
    let steps = steps?;
    if !disc.contains(z) {
        return None;
    }

    let period = match cand.method {
        PeriodicMethod::ReturnLoop => k,
        PeriodicMethod::F2Branch => k + 2,
    };
    let orbit = forward(z, period)?;
    if (orbit[period] - z).norm() > PERIODIC_TOLERANCE {
        return None;
    }
    let minimal =
        (1..=period).find(|d| period % d == 0 && (orbit[*d] - z).norm() <= PERIODIC_TOLERANCE).unwrap_or(period);
    let m_min = multiplier_along(&orbit[..=minimal]).modulus();
    if m_min <= 1.0 {
        return None;
    }
    let laps = (2f64.ln() / m_min.ln()).ceil().max(1.0) as usize;
    let reported = minimal * laps;
    let cycle = forward(z, reported)?;
    let residual = (cycle[reported] - z).norm();
    let multiplier = multiplier_along(&cycle).modulus();
    if residual > PERIODIC_TOLERANCE || multiplier < 2.0 {
        return None;
    }

    Some(PeriodicWitness {
        result: PeriodicPointResult {
            point: z,
            period: reported,
            minimal_period: minimal,
            multiplier_modulus: multiplier,
            residual,
            contraction_steps: steps,
        },
        cycle,
        method: cand.method,
        anchor: z0,
        depth: k,
    })
}
