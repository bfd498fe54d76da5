//! Points of a disc whose orbit lands on the positive real axis.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::{derivative_along, diameters, forward, on_axis, Disc, SearchConfig, WitnessError};
use crate::dynamics::ComplexPoint;

/// `f^stage(point) = value` lies on `[0, ∞)` up to the axis tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Landing {
    pub point: ComplexPoint,
    pub stage: usize,
    pub value: ComplexPoint,
}

impl Landing {
    pub fn height(&self) -> f64 {
        self.value.re
    }

    pub fn orbit(&self) -> Vec<ComplexPoint> {
        forward(self.point, self.stage).expect("landing orbit is representable")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EscapingWitness {
    pub landing: Landing,
    pub target_height: f64,
    /// Whether the landing was steered to `target_height`; otherwise it keeps its own height.
    pub on_target: bool,
}

fn sign(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

/// Axis landings at stage `m` found along the 8 diameters of `disc`, in scan order.
///
/// The center is tried first. Along each diameter, sign changes of
/// `Im f^m` between samples with `Re f^m > 0` are bisected.
pub fn scan_landings(disc: &Disc, m: usize, cfg: &SearchConfig) -> Vec<Landing> {
    let value_at = |z: ComplexPoint| forward(z, m).map(|o| o[m]);
    let mut out: Vec<Landing> = Vec::new();
    let push = |l: Landing, out: &mut Vec<Landing>| {
        let dup = out.iter().any(|o| (o.point - l.point).norm() <= 1e-12 * (1.0 + l.point.norm()));
        if !dup {
            out.push(l);
        }
    };

    if let Some(w) = value_at(disc.center) {
        if on_axis(w, cfg.axis_tol) {
            push(Landing { point: disc.center, stage: m, value: w }, &mut out);
        }
    }

    let n = cfg.samples;
    for (a, b) in diameters(disc, 0.999) {
        let at = |s: f64| a + (b - a) * s;
        let mut prev: Option<(f64, ComplexPoint)> = None;
        for i in 0..n {
            let s = i as f64 / (n - 1) as f64;
            let cur = value_at(at(s));
            if let Some(wc) = cur {
                if wc.re > 0.0 {
                    let sc = sign(wc.im);
                    let sp = prev.filter(|(_, wp)| wp.re > 0.0).map(|(_, wp)| sign(wp.im));
                    if sc == 0 && sp != Some(0) {
                        if on_axis(wc, cfg.axis_tol) {
                            push(Landing { point: at(s), stage: m, value: wc }, &mut out);
                        }
                    } else if let (Some(sp), Some((s_prev, _))) = (sp, prev) {
                        if sp != 0 && sp != sc {
                            if let Some(l) = bisect(&at, s_prev, s, sp, m, cfg) {
                                push(l, &mut out);
                            }
                        }
                    }
                }
            }
            prev = cur.map(|w| (s, w));
        }
    }
    out
}

fn bisect(
    at: &dyn Fn(f64) -> ComplexPoint,
    mut lo: f64,
    mut hi: f64,
    sign_lo: i8,
    m: usize,
    cfg: &SearchConfig,
) -> Option<Landing> {
    let value = |s: f64| forward(at(s), m).map(|o| o[m]);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let w = value(mid)?;
        if w.re <= 0.0 {
            return None;
        }
        match sign(w.im) {
            0 => {
                lo = mid;
                hi = mid;
                break;
            }
            s if s == sign_lo => lo = mid,
            _ => hi = mid,
        }
    }
    let (wl, wh) = (value(lo)?, value(hi)?);
    let (s, w) = if wl.im.abs() <= wh.im.abs() { (lo, wl) } else { (hi, wh) };
    on_axis(w, cfg.axis_tol).then(|| Landing { point: at(s), stage: m, value: w })
}

/// Moves a landing inside `disc` so that it lands at height `t`.
///
/// For stage `m ≥ 1` this solves `f^{m-1}(z) = log t + 2πij`, keeping the
/// sheet `j` of the original landing, by damped Newton steps while the
/// target height is moved gradually from the current one to `t`.
pub fn slide_to_height(disc: &Disc, landing: &Landing, t: f64, cfg: &SearchConfig) -> Option<Landing> {
    if t.is_nan() || t <= 0.0 {
        return None;
    }
    if landing.stage == 0 {
        let z = ComplexPoint::new(t, 0.0);
        return disc.contains(z).then_some(Landing { point: z, stage: 0, value: z });
    }
    let m = landing.stage;
    let orbit = forward(landing.point, m - 1)?;
    let sheet = TAU * (orbit[m - 1].im / TAU).round();
    let from = landing.height().ln();
    let to = t.ln();
    let legs = ((to - from).abs() / 0.5).ceil().max(1.0) as usize;

    let mut z = landing.point;
    for leg in 1..=legs {
        let goal = ComplexPoint::new(from + (to - from) * leg as f64 / legs as f64, sheet);
        z = newton_towards(disc, z, m - 1, goal)?;
    }
    let value = forward(z, m)?[m];
    (on_axis(value, cfg.axis_tol) && (value.re - t).abs() <= cfg.height_tol).then_some(Landing {
        point: z,
        stage: m,
        value,
    })
}

// Damped Newton for f^k(z) = goal, confined to the disc.
fn newton_towards(disc: &Disc, mut z: ComplexPoint, k: usize, goal: ComplexPoint) -> Option<ComplexPoint> {
    let residual = |z: ComplexPoint| forward(z, k).map(|o| (o[k] - goal, o));
    let (mut g, mut orbit) = residual(z)?;
    for _ in 0..80 {
        let step = -g / derivative_along(&orbit);
        if !step.norm().is_finite() {
            return None;
        }
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let trial = z + step * lambda;
            if disc.contains(trial) {
                if let Some((g_new, o_new)) = residual(trial) {
                    if g_new.norm() < g.norm() {
                        z = trial;
                        g = g_new;
                        orbit = o_new;
                        accepted = true;
                        break;
                    }
                }
            }
            lambda *= 0.5;
        }
        if !accepted || step.norm() <= 4.0 * f64::EPSILON * z.norm().max(1e-300) {
            break;
        }
    }
    (g.norm() <= 1e-6 * goal.norm().max(1.0)).then_some(z)
}

/// Points of `disc` where `Re f^k` crosses `t`, along the 8 diameters.
pub fn level_crossings(disc: &Disc, k: usize, t: f64, cfg: &SearchConfig) -> Vec<ComplexPoint> {
    let level = |z: ComplexPoint| forward(z, k).map(|o| o[k].re - t);
    let mut out = Vec::new();
    let n = cfg.samples;
    for (a, b) in diameters(disc, 0.999) {
        let at = |s: f64| a + (b - a) * s;
        let mut prev: Option<(f64, f64)> = None;
        for i in 0..n {
            let s = i as f64 / (n - 1) as f64;
            let cur = level(at(s));
            if let (Some((sp, lp)), Some(lc)) = (prev, cur) {
                if (lp < 0.0) != (lc < 0.0) {
                    let (mut lo, mut hi) = (sp, s);
                    let mut ok = true;
                    for _ in 0..200 {
                        let mid = 0.5 * (lo + hi);
                        if mid <= lo || mid >= hi {
                            break;
                        }
                        match level(at(mid)) {
                            Some(lm) if (lm < 0.0) == (lp < 0.0) => lo = mid,
                            Some(_) => hi = mid,
                            None => {
                                ok = false;
                                break;
                            }
                        }
                    }
                    if ok {
                        out.push(at(0.5 * (lo + hi)));
                    }
                }
            }
            prev = cur.map(|l| (s, l));
        }
    }
    out
}

/// Searches `disc` for a point whose orbit lands on the positive real axis.
///
/// Stages `m = 0, 1, …, m_max` are scanned in order, and landings are steered
/// to `cfg.t_star`. If no landing can be steered, the first landing found is
/// returned with its own height.
pub fn find_escaping_point(disc: &Disc, cfg: &SearchConfig) -> Result<EscapingWitness, WitnessError> {
    cfg.check()?;
    let mut fallback = None;
    for m in 0..=cfg.m_max {
        let landings = scan_landings(disc, m, cfg);
        for landing in landings.iter().take(64) {
            if let Some(steered) = slide_to_height(disc, landing, cfg.t_star, cfg) {
                return Ok(EscapingWitness { landing: steered, target_height: cfg.t_star, on_target: true });
            }
        }
        if fallback.is_none() {
            fallback = landings.first().copied();
        }
    }
    fallback
        .map(|landing| EscapingWitness { landing, target_height: cfg.t_star, on_target: false })
        .ok_or(WitnessError::NotFound { deepest: cfg.m_max })
}
