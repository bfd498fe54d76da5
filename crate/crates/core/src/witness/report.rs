//! Self-verifying JSON reports.

use serde::{Deserialize, Serialize};

use super::periodic::PERIODIC_TOLERANCE;
use super::sensitivity::MIN_ESCAPE_HEIGHT;
use super::{
    forward, Disc, EscapingWitness, Landing, PeriodicWitness, SearchConfig, SensitivityWitness, TransitivityWitness,
    NOTE, TRANSITIVITY_TOLERANCE,
};
use crate::dynamics::{multiplier_along, ComplexPoint};
use crate::inverse::{build_pullback_with_radius, stepwise_residuals, LiftedPoint, PullbackChain};

pub const SCHEMA_VERSION: u32 = 1;

/// Replayed quantities may exceed their claimed tolerance by this factor.
const SLACK: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Payload {
    Escaping(EscapingWitness),
    Transitivity(TransitivityWitness),
    Periodic(PeriodicWitness),
    Sensitivity(SensitivityWitness),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub schema: u32,
    pub note: String,
    pub seed: u64,
    pub config: SearchConfig,
    pub disc: Disc,
    pub payload: Payload,
    pub chain: Option<PullbackChain>,
}

impl WitnessReport {
    fn new(disc: &Disc, cfg: &SearchConfig, payload: Payload, chain: Option<PullbackChain>) -> Self {
        WitnessReport {
            schema: SCHEMA_VERSION,
            note: NOTE.to_string(),
            seed: cfg.seed,
            config: *cfg,
            disc: *disc,
            payload,
            chain,
        }
    }

    pub fn escaping(disc: &Disc, cfg: &SearchConfig, w: EscapingWitness) -> Self {
        Self::new(disc, cfg, Payload::Escaping(w), None)
    }

    pub fn transitivity(disc: &Disc, cfg: &SearchConfig, mut w: TransitivityWitness) -> Self {
        let chain = w.chain.take();
        Self::new(disc, cfg, Payload::Transitivity(w), chain)
    }

    pub fn periodic(disc: &Disc, cfg: &SearchConfig, w: PeriodicWitness) -> Self {
        Self::new(disc, cfg, Payload::Periodic(w), None)
    }

    pub fn sensitivity(disc: &Disc, cfg: &SearchConfig, mut w: SensitivityWitness) -> Self {
        let chain = w.z_witness.chain.take();
        Self::new(disc, cfg, Payload::Sensitivity(w), chain)
    }

    pub fn kind(&self) -> &'static str {
        match self.payload {
            Payload::Escaping(_) => "Escaping",
            Payload::Transitivity(_) => "Transitivity",
            Payload::Periodic(_) => "Periodic",
            Payload::Sensitivity(_) => "Sensitivity",
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}

/// One replayed quantity; it passes when `value ≤ bound`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyOutcome {
    pub kind: String,
    pub checks: Vec<Check>,
}

impl VerifyOutcome {
    pub fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.passed)
    }

    fn check(&mut self, name: &str, value: f64, bound: f64) {
        self.checks.push(Check { name: name.to_string(), value, bound, passed: value <= bound });
    }

    fn flag(&mut self, name: &str, ok: bool) {
        self.check(name, if ok { 0.0 } else { 1.0 }, 0.0);
    }
}

/// Replays a report: representable forward steps and stepwise inversions only.
pub fn verify(report: &WitnessReport) -> VerifyOutcome {
    let mut out = VerifyOutcome { kind: report.kind().to_string(), checks: Vec::new() };
    out.flag("schema version", report.schema == SCHEMA_VERSION);
    let disc = &report.disc;
    let cfg = &report.config;
    match &report.payload {
        Payload::Escaping(w) => {
            verify_landing(&mut out, disc, cfg, &w.landing);
            if w.on_target {
                let value = forward(w.landing.point, w.landing.stage).map(|o| o[w.landing.stage]);
                let miss = value.map_or(f64::INFINITY, |v| (v.re - w.target_height).abs());
                out.check("height error", miss, SLACK * cfg.height_tol);
            }
        }
        Payload::Transitivity(w) => {
            verify_trace(&mut out, disc, &w.trace, w.point, w.target, w.n);
            if let Some(chain) = &report.chain {
                verify_chain(&mut out, disc, chain, &w.trace);
            }
        }
        Payload::Periodic(w) => {
            let r = &w.result;
            out.check("distance to disc center", (r.point - disc.center).norm(), disc.radius);
            out.flag(
                "period is a multiple of the minimal period",
                r.minimal_period > 0 && r.period % r.minimal_period == 0,
            );
            match forward(r.point, r.period) {
                Some(cycle) => {
                    let residual = (cycle[r.period] - r.point).norm();
                    out.check("periodic residual", residual, SLACK * PERIODIC_TOLERANCE);
                    let m = multiplier_along(&cycle).modulus();
                    out.check("multiplier mismatch (relative)", (m - r.multiplier_modulus).abs() / m, 1e-9);
                    out.check("2 − multiplier", 2.0 - m, 0.0);
                }
                None => out.flag("cycle is representable", false),
            }
        }
        Payload::Sensitivity(w) => {
            let zw = &w.z_witness;
            verify_trace(&mut out, disc, &zw.trace, w.z, zw.target, w.n - 1);
            if let Some(chain) = &report.chain {
                verify_chain(&mut out, disc, chain, &zw.trace);
            }
            verify_landing(&mut out, disc, cfg, &w.w_landing);
            out.check("2 − landing height of w", MIN_ESCAPE_HEIGHT - w.w_landing.value.re, 0.0);
            out.flag("n is past the landing of w", w.n >= w.w_landing.stage);
            let fz = zw.trace.last().and_then(|p| p.exp().ok()).map_or(f64::INFINITY, |p| p.norm());
            out.check("|f^n(z)|", fz, 1.0);
            out.check("1 − separation", 1.0 - (w.w_landing.value.re - fz), 0.0);
        }
    }
    out
}

fn verify_landing(out: &mut VerifyOutcome, disc: &Disc, cfg: &SearchConfig, landing: &Landing) {
    out.check("distance to disc center", (landing.point - disc.center).norm(), disc.radius);
    match forward(landing.point, landing.stage) {
        Some(orbit) => {
            let v = orbit[landing.stage];
            out.check("|Im f^m| / max(1, Re f^m)", v.im.abs() / v.re.max(1.0), SLACK * cfg.axis_tol);
            out.check("−Re f^m", -v.re, 0.0);
            out.check("replayed landing value", (v - landing.value).norm(), SLACK * cfg.axis_tol * v.norm().max(1.0));
        }
        None => out.flag("landing orbit is representable", false),
    }
}

fn verify_trace(
    out: &mut VerifyOutcome,
    disc: &Disc,
    trace: &[LiftedPoint],
    point: ComplexPoint,
    target: ComplexPoint,
    n: usize,
) {
    let (Some(first), Some(last)) = (trace.first(), trace.last()) else {
        out.flag("trace is nonempty", false);
        return;
    };
    out.flag("trace starts at the witness point", first.to_point() == point);
    out.flag("trace ends at the target", last.to_point() == target);
    out.flag("trace length matches n", trace.len() == n + 1);
    out.check("distance to disc center", (point - disc.center).norm(), disc.radius);
    let total: f64 = stepwise_residuals(trace).iter().sum();
    out.check("summed stepwise residual", total, SLACK * TRANSITIVITY_TOLERANCE);
}

fn verify_chain(out: &mut VerifyOutcome, disc: &Disc, chain: &PullbackChain, trace: &[LiftedPoint]) {
    let k = chain.len();
    match build_pullback_with_radius(&chain.base_orbit, k, chain.disc_radius) {
        Ok(rebuilt) => {
            out.check(
                "chain radius at the start minus disc margin",
                rebuilt.radii[0] - disc.margin(rebuilt.base_orbit[0]),
                0.0,
            );
            let tip = trace.get(k).map_or(ComplexPoint::new(f64::NAN, f64::NAN), |p| p.to_point());
            out.check("trace point distance to chain tip", (tip - rebuilt.tip()).norm(), rebuilt.disc_radius);
            let back = rebuilt.eval(tip).map_or(f64::INFINITY, |z| (z - trace[0].to_point()).norm());
            out.check("chain evaluation versus trace start", back, 1e-12 * trace[0].to_point().norm().max(1.0));
        }
        Err(_) => out.flag("chain rebuilds from its orbit", false),
    }
}
