//! Forward iteration of `z ↦ e^z`.
//!
//! Orbits of the exponential map grow tower-exponentially, so a plain
//! `Complex64` orbit runs out of range after a handful of steps. Every
//! [`OrbitRecord`] therefore carries a log-polar shadow of each point:
//! `log|z_{k+1}| = Re z_k` and `arg z_{k+1} = Im z_k` hold exactly, without
//! evaluating any exponential, which lets the record survive one step past
//! the overflow boundary.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A point of the complex plane.
pub type ComplexPoint = Complex64;

/// Largest real part accepted by [`exp_map`].
pub const OVERFLOW_RE: f64 = 709.0;

/// Below this real part `e^z` is subnormal or zero and has lost its argument.
pub const UNDERFLOW_RE: f64 = -708.0;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum DynamicsError {
    #[error("e^z overflows double precision (Re z = {re} > {OVERFLOW_RE})")]
    Overflow { re: f64 },
}

/// `e^z = e^{Re z}·(cos Im z + i sin Im z)`.
pub fn exp_map(z: ComplexPoint) -> Result<ComplexPoint, DynamicsError> {
    if z.re > OVERFLOW_RE {
        return Err(DynamicsError::Overflow { re: z.re });
    }
    let modulus = z.re.exp();
    let (s, c) = z.im.sin_cos();
    Ok(ComplexPoint::new(modulus * c, modulus * s))
}

/// A complex number stored as `exp(log_mod)·e^{i·arg}`.
///
/// `arg` is lifted to the real line; it is never reduced modulo 2π.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogPolarPoint {
    pub log_mod: f64,
    pub arg: f64,
}

impl LogPolarPoint {
    pub fn from_point(z: ComplexPoint) -> Self {
        LogPolarPoint { log_mod: z.norm().ln(), arg: z.im.atan2(z.re) }
    }

    /// The log-polar form of `e^z`, computed without exponentiating.
    pub fn exp_of(z: ComplexPoint) -> Self {
        LogPolarPoint { log_mod: z.re, arg: z.im }
    }

    pub fn to_point(self) -> Result<ComplexPoint, DynamicsError> {
        exp_map(ComplexPoint::new(self.log_mod, self.arg))
    }
}

/// Outcome of [`classify_orbit`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "tag")]
pub enum Classification {
    /// Some orbit point lies on `[0, ∞)`, which is contained in the escaping set.
    EscapingCertified,
    /// Real parts stayed large, but nothing was proved.
    EscapingHeuristic,
    PeriodicDetected {
        period: usize,
    },
    Unresolved,
    Overflowed {
        at_step: usize,
    },
}

/// Thresholds used by [`classify_orbit`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassifyParams {
    pub escape_re_threshold: f64,
    /// Consecutive steps above `escape_re_threshold` required for a heuristic escape.
    pub k_consec: usize,
    /// Absolute tolerance on `|Im z|` for an axis hit.
    pub tol_axis: f64,
    pub period_tol: f64,
    pub period_scan_limit: usize,
}

impl Default for ClassifyParams {
    fn default() -> Self {
        ClassifyParams {
            escape_re_threshold: 50.0,
            k_consec: 3,
            tol_axis: 1e-10,
            period_tol: 1e-9,
            period_scan_limit: 64,
        }
    }
}

/// A finite orbit prefix `z_0, …, z_length` with log-polar shadows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitRecord {
    pub start: ComplexPoint,
    pub points: Vec<ComplexPoint>,
    pub shadows: Vec<LogPolarPoint>,
    /// Number of steps taken; `points.len() == length + 1`.
    pub length: usize,
    pub classification: Classification,
}

impl OrbitRecord {
    /// Index of the step whose point could not be represented, if any.
    pub fn overflow_step(&self) -> Option<usize> {
        self.points.iter().position(|p| !(p.re.is_finite() && p.im.is_finite()))
    }

    /// The representable prefix of the orbit.
    pub fn finite_points(&self) -> &[ComplexPoint] {
        match self.overflow_step() {
            Some(k) => &self.points[..k],
            None => &self.points,
        }
    }

    /// CSV dump with columns `step,re,im,log_mod,arg`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("step,re,im,log_mod,arg\n");
        for (k, (p, s)) in self.points.iter().zip(&self.shadows).enumerate() {
            let _ = writeln!(out, "{k},{:e},{:e},{:e},{:e}", p.re, p.im, s.log_mod, s.arg);
        }
        out
    }

    /// JSON document; non-finite components (overflowed step, `log 0`) become `null`.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("orbit record serializes")
    }
}

/// Iterates with default classification parameters apart from the two given.
pub fn iterate(z0: ComplexPoint, max_steps: usize, escape_re_threshold: f64, period_scan_limit: usize) -> OrbitRecord {
    let params = ClassifyParams {
        escape_re_threshold,
        period_scan_limit: period_scan_limit.max(1),
        ..ClassifyParams::default()
    };
    iterate_with(z0, max_steps, &params)
}

/// Forward orbit of `z0`, stopped at `max_steps`, on overflow, or when a
/// cycle is detected.
pub fn iterate_with(z0: ComplexPoint, max_steps: usize, params: &ClassifyParams) -> OrbitRecord {
    let mut points = Vec::with_capacity(max_steps.min(1024) + 1);
    let mut shadows = Vec::with_capacity(max_steps.min(1024) + 1);
    points.push(z0);
    shadows.push(LogPolarPoint::from_point(z0));

    for _ in 0..max_steps {
        let last = *points.last().unwrap();
        shadows.push(LogPolarPoint::exp_of(last));
        match exp_map(last) {
            Ok(next) => {
                points.push(next);
                if last.re < UNDERFLOW_RE {
                    break;
                }
            }
            Err(_) => {
                points.push(overflowed_value(last));
                break;
            }
        }
        if detect_period(&points, params.period_scan_limit, params.period_tol).is_some() {
            break;
        }
    }

    let mut record = OrbitRecord {
        start: z0,
        length: points.len() - 1,
        points,
        shadows,
        classification: Classification::Unresolved,
    };
    record.classification = classify_orbit(&record, params);
    record
}

// Signs follow cos/sin of the lifted argument; magnitudes are infinite.
fn overflowed_value(z: ComplexPoint) -> ComplexPoint {
    let (s, c) = z.im.sin_cos();
    let inf = |t: f64| if t == 0.0 { 0.0 } else { f64::INFINITY.copysign(t) };
    ComplexPoint::new(inf(c), inf(s))
}

/// Smallest `p ≤ limit` with `|z_last − z_{last−p}| ≤ tol`.
fn detect_period(points: &[ComplexPoint], limit: usize, tol: f64) -> Option<usize> {
    let last_idx = points.len() - 1;
    let last = points[last_idx];
    if !(last.re.is_finite() && last.im.is_finite()) {
        return None;
    }
    (1..=limit.min(last_idx)).find(|&p| (last - points[last_idx - p]).norm() <= tol)
}

/// Classifies an orbit prefix. Precedence: axis hit, cycle, large real
/// parts or overflow, unresolved.
///
/// Points produced by an underflowing step do not count as axis hits: their
/// argument is lost, so `0` there says nothing about the true orbit.
pub fn classify_orbit(record: &OrbitRecord, params: &ClassifyParams) -> Classification {
    let finite = record.finite_points();
    let underflowed = |k: usize| k > 0 && record.shadows.get(k).is_some_and(|s| s.log_mod < UNDERFLOW_RE);
    if finite.iter().enumerate().any(|(k, p)| p.re >= 0.0 && p.im.abs() <= params.tol_axis && !underflowed(k)) {
        return Classification::EscapingCertified;
    }
    if !finite.is_empty() {
        if let Some(period) = detect_period(finite, params.period_scan_limit, params.period_tol) {
            return Classification::PeriodicDetected { period };
        }
    }

    let mut run = 0usize;
    for p in finite {
        if p.re > params.escape_re_threshold {
            run += 1;
            if run >= params.k_consec {
                return Classification::EscapingHeuristic;
            }
        } else {
            run = 0;
        }
    }

    if let Some(k) = record.overflow_step() {
        let increasing = k >= 2 && finite[k - 1].re > finite[k - 2].re;
        return if increasing { Classification::EscapingHeuristic } else { Classification::Overflowed { at_step: k } };
    }
    Classification::Unresolved
}

/// Derivative of `f^n` along an orbit prefix, by the chain rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Multiplier {
    /// `Σ log|z_{k+1}|`, always available.
    pub log_modulus: f64,
    /// The complex product, when its modulus is at most `1e300`.
    pub value: Option<ComplexPoint>,
}

impl Multiplier {
    pub fn modulus(&self) -> f64 {
        self.log_modulus.exp()
    }
}

/// `(f^n)'(z_0) = ∏_{k<n} f'(z_k) = ∏_{k<n} z_{k+1}` for `points = [z_0, …, z_n]`.
///
/// # Panics
///
/// If fewer than two points are given.
pub fn multiplier_along(points: &[ComplexPoint]) -> Multiplier {
    assert!(points.len() >= 2, "multiplier needs an orbit prefix of length >= 2");
    let log_modulus: f64 = points[1..].iter().map(|z| z.norm().ln()).sum();
    let value = if log_modulus <= 1e300f64.ln() { Some(points[1..].iter().product()) } else { None };
    Multiplier { log_modulus, value }
}
