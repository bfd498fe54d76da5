//! Pairs of nearby points whose orbits separate.

use serde::{Deserialize, Serialize};

use super::{
    find_escaping_point, scan_landings, slide_to_height, transitivity_witness, Disc, Landing, SearchConfig,
    TransitivityWitness, WitnessError,
};
use crate::dynamics::ComplexPoint;

/// Smallest landing height accepted for the escaping partner.
pub const MIN_ESCAPE_HEIGHT: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityWitness {
    pub z: ComplexPoint,
    pub w: ComplexPoint,
    pub n: usize,
    /// `f^{n-1}(z) = target`, hence `|f^n(z)| = e^{Re target}`.
    pub z_witness: TransitivityWitness,
    /// `f^m(w)` is real and at least 2, so `|f^k(w)| ≥ 2` for all `k ≥ m`.
    pub w_landing: Landing,
    pub fz_modulus: f64,
    /// Lower bound for `log|f^n(w)|`, saturating at `f64::MAX`.
    pub fw_log_modulus: f64,
    /// `height(w) − |f^n(z)|`.
    pub separation_lower_bound: f64,
}

/// [`sensitivity_witness_for`] with target `−1`, so `|f^n(z)| = 1/e`.
pub fn sensitivity_witness(disc: &Disc, cfg: &SearchConfig) -> Result<SensitivityWitness, WitnessError> {
    sensitivity_witness_for(disc, ComplexPoint::new(-1.0, 0.0), cfg)
}

/// Finds `z, w` in `disc` and `n` with `|f^n(z)| = e^{Re v} ≤ 1` and `|f^n(w)| ≥ 2`.
///
/// `w` lands on the real axis at height at least 2 by stage `m`; `z` hits `v`
/// at stage `n − 1 ≥ m − 1`.
pub fn sensitivity_witness_for(
    disc: &Disc,
    v: ComplexPoint,
    cfg: &SearchConfig,
) -> Result<SensitivityWitness, WitnessError> {
    if v.re.is_nan() || v.re > 0.0 {
        return Err(WitnessError::InvalidParameter(format!("target must have Re ≤ 0, got {v}")));
    }
    let landing = escaping_partner(disc, cfg)?;
    let m = landing.stage;
    let zw = transitivity_witness(disc, v, m.saturating_sub(1), cfg)?;
    let n = zw.n + 1;
    let fz_modulus = v.re.exp();
    let separation_lower_bound = landing.height() - fz_modulus;
    if separation_lower_bound < 1.0 {
        return Err(WitnessError::NotFound { deepest: n });
    }
    Ok(SensitivityWitness {
        z: zw.point,
        w: landing.point,
        n,
        z_witness: zw,
        w_landing: landing,
        fz_modulus,
        fw_log_modulus: escaped_log_modulus(landing.height(), n - m),
        separation_lower_bound,
    })
}

/// `log|f^{m+i}(w)|` when `f^m(w) = h` is real: `log h` for `i = 0`, else
/// `exp^{i-1}(h)`.
pub fn escaped_log_modulus(h: f64, i: usize) -> f64 {
    if i == 0 {
        return h.ln();
    }
    let mut x = h;
    for _ in 1..i {
        x = x.exp().min(f64::MAX);
    }
    x
}

fn escaping_partner(disc: &Disc, cfg: &SearchConfig) -> Result<Landing, WitnessError> {
    let first = find_escaping_point(disc, cfg)?;
    if first.landing.height() >= MIN_ESCAPE_HEIGHT {
        return Ok(first.landing);
    }
    for m in 0..=cfg.m_max {
        for landing in scan_landings(disc, m, cfg) {
            if landing.height() >= MIN_ESCAPE_HEIGHT {
                return Ok(landing);
            }
            if let Some(steered) = slide_to_height(disc, &landing, cfg.t_star, cfg) {
                return Ok(steered);
            }
        }
    }
    Err(WitnessError::NotFound { deepest: cfg.m_max })
}
