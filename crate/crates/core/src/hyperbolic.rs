//! Hyperbolic densities on the model domains, disc automorphisms, the
//! standard conformal isomorphisms between the models, and the expansion
//! factors of `e^z` with respect to the slit planes.
//!
//! Densities carry the curvature normalization factor 2 throughout
//! (`ρ_D(0) = 2`). Membership is strict: a point on the boundary of a domain
//! is an error, never a large finite number.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::ComplexPoint;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum HyperbolicError {
    #[error("{z} is not in {domain:?}")]
    OutsideDomain { domain: HyperbolicDomain, z: ComplexPoint },
    #[error("Möbius parameter or argument outside the unit disc")]
    ParameterOutsideDisc,
    #[error("{0} is not in the preimage of the slit plane")]
    NotInPreimage(ComplexPoint),
}

/// The simply-connected model domains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum HyperbolicDomain {
    /// `|z| < 1`
    UnitDisc,
    /// `Re z > 0`
    RightHalfPlane,
    /// `|Im z| < π`
    StripPi,
    /// `C ∖ [0, ∞)`
    SlitPlanePos,
    /// `C ∖ (−∞, 0]`
    SlitPlaneNeg,
}

impl HyperbolicDomain {
    pub const ALL: [HyperbolicDomain; 5] = [
        HyperbolicDomain::UnitDisc,
        HyperbolicDomain::RightHalfPlane,
        HyperbolicDomain::StripPi,
        HyperbolicDomain::SlitPlanePos,
        HyperbolicDomain::SlitPlaneNeg,
    ];

    pub fn contains(self, z: ComplexPoint) -> bool {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return false;
        }
        match self {
            HyperbolicDomain::UnitDisc => z.norm_sqr() < 1.0,
            HyperbolicDomain::RightHalfPlane => z.re > 0.0,
            HyperbolicDomain::StripPi => z.im.abs() < PI,
            HyperbolicDomain::SlitPlanePos => !(z.im == 0.0 && z.re >= 0.0),
            HyperbolicDomain::SlitPlaneNeg => !(z.im == 0.0 && z.re <= 0.0),
        }
    }

    fn check(self, z: ComplexPoint) -> Result<(), HyperbolicError> {
        if self.contains(z) {
            Ok(())
        } else {
            Err(HyperbolicError::OutsideDomain { domain: self, z })
        }
    }
}

/// Argument in `(0, 2π)`, the convention for `C ∖ [0, ∞)`.
pub fn arg_0_2pi(z: ComplexPoint) -> f64 {
    let a = z.im.atan2(z.re);
    if a < 0.0 {
        a + TAU
    } else {
        a
    }
}

/// Density of the hyperbolic metric of `domain` at `z`.
pub fn density(domain: HyperbolicDomain, z: ComplexPoint) -> Result<f64, HyperbolicError> {
    domain.check(z)?;
    let rho = match domain {
        HyperbolicDomain::UnitDisc => 2.0 / (1.0 - z.norm_sqr()),
        HyperbolicDomain::RightHalfPlane => 1.0 / z.re,
        HyperbolicDomain::StripPi => 1.0 / (2.0 * (z.im / 2.0).cos()),
        HyperbolicDomain::SlitPlanePos => 1.0 / (2.0 * z.norm() * (arg_0_2pi(z) / 2.0).sin()),
        HyperbolicDomain::SlitPlaneNeg => 1.0 / (2.0 * z.norm() * (z.im.atan2(z.re) / 2.0).cos()),
    };
    Ok(rho)
}

/// `e^{iθ}(z − a)/(1 − āz)`.
pub fn mobius(a: ComplexPoint, theta: f64, z: ComplexPoint) -> Result<ComplexPoint, HyperbolicError> {
    if a.norm_sqr() >= 1.0 || z.norm_sqr() >= 1.0 {
        return Err(HyperbolicError::ParameterOutsideDisc);
    }
    Ok(ComplexPoint::from_polar(1.0, theta) * (z - a) / (1.0 - a.conj() * z))
}

/// Derivative of [`mobius`] in `z`: `e^{iθ}(1 − |a|²)/(1 − āz)²`.
pub fn mobius_deriv(a: ComplexPoint, theta: f64, z: ComplexPoint) -> Result<ComplexPoint, HyperbolicError> {
    if a.norm_sqr() >= 1.0 || z.norm_sqr() >= 1.0 {
        return Err(HyperbolicError::ParameterOutsideDisc);
    }
    let d = 1.0 - a.conj() * z;
    Ok(ComplexPoint::from_polar(1.0, theta) * (1.0 - a.norm_sqr()) / (d * d))
}

/// The conformal isomorphisms linking the model domains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Iso {
    /// `H → D`, `z ↦ (1 − z)/(1 + z)`
    Phi1,
    /// `S → H`, `z ↦ e^{z/2}`
    Phi2,
    /// `H → C ∖ [0, ∞)`, `z ↦ −z²`
    Phi3,
    /// `C ∖ [0, ∞) → C ∖ (−∞, 0]`, `z ↦ −z`
    Phi4,
}

impl Iso {
    pub const ALL: [Iso; 4] = [Iso::Phi1, Iso::Phi2, Iso::Phi3, Iso::Phi4];

    pub fn source(self) -> HyperbolicDomain {
        match self {
            Iso::Phi1 | Iso::Phi3 => HyperbolicDomain::RightHalfPlane,
            Iso::Phi2 => HyperbolicDomain::StripPi,
            Iso::Phi4 => HyperbolicDomain::SlitPlanePos,
        }
    }

    pub fn target(self) -> HyperbolicDomain {
        match self {
            Iso::Phi1 => HyperbolicDomain::UnitDisc,
            Iso::Phi2 => HyperbolicDomain::RightHalfPlane,
            Iso::Phi3 => HyperbolicDomain::SlitPlanePos,
            Iso::Phi4 => HyperbolicDomain::SlitPlaneNeg,
        }
    }
}

pub fn iso(which: Iso, z: ComplexPoint) -> Result<ComplexPoint, HyperbolicError> {
    which.source().check(z)?;
    Ok(match which {
        Iso::Phi1 => (1.0 - z) / (1.0 + z),
        Iso::Phi2 => (z / 2.0).exp(),
        Iso::Phi3 => -(z * z),
        Iso::Phi4 => -z,
    })
}

pub fn iso_deriv(which: Iso, z: ComplexPoint) -> Result<ComplexPoint, HyperbolicError> {
    which.source().check(z)?;
    Ok(match which {
        Iso::Phi1 => -2.0 / ((1.0 + z) * (1.0 + z)),
        Iso::Phi2 => (z / 2.0).exp() / 2.0,
        Iso::Phi3 => -2.0 * z,
        Iso::Phi4 => ComplexPoint::new(-1.0, 0.0),
    })
}

/// Hyperbolic derivative `‖Df(z)‖ = |f'(z)|·ρ_dst(f(z))/ρ_src(z)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct HypDerivative(pub f64);

impl HypDerivative {
    pub fn value(self) -> f64 {
        self.0
    }
}

pub fn hyp_derivative(
    fz: ComplexPoint,
    dfz: ComplexPoint,
    src: HyperbolicDomain,
    z: ComplexPoint,
    dst: HyperbolicDomain,
) -> Result<HypDerivative, HyperbolicError> {
    let num = density(dst, fz)?;
    let den = density(src, z)?;
    Ok(HypDerivative(dfz.norm() * num / den))
}

/// `‖De^ζ‖` with respect to `U = C ∖ [0, ∞)`, in closed form
/// `r·sin(θ/2)/|sin((r/2)·sin θ)|` with `ζ = r·e^{iθ}`, `θ ∈ (0, 2π)`.
pub fn expansion_u(zeta: ComplexPoint) -> Result<f64, HyperbolicError> {
    if !in_preimage_of_u(zeta) {
        return Err(HyperbolicError::NotInPreimage(zeta));
    }
    let r = zeta.norm();
    let theta = arg_0_2pi(zeta);
    // r·sin θ is Im ζ; using it directly avoids re-rounding through θ.
    let half_height = zeta.im / 2.0;
    Ok(r * (theta / 2.0).sin() / half_height.sin().abs())
}

/// The lower bound `1/|cos(θ/2)|` that [`expansion_u`] always exceeds.
pub fn expansion_u_lower_bound(zeta: ComplexPoint) -> f64 {
    1.0 / (arg_0_2pi(zeta) / 2.0).cos().abs()
}

/// `e^ζ ∈ U` exactly when `Im ζ` is not a multiple of `2π`.
fn in_preimage_of_u(zeta: ComplexPoint) -> bool {
    zeta.re.is_finite() && zeta.im.is_finite() && (zeta.im / TAU).fract() != 0.0
}

/// `‖De^ζ‖` with respect to `Ũ = C ∖ (−∞, 0]`:
/// `r·cos(θ/2)/|cos(Arg(e^ζ)/2)|` with `θ = Arg ζ`.
pub fn expansion_slitneg(zeta: ComplexPoint) -> Result<f64, HyperbolicError> {
    if !HyperbolicDomain::SlitPlaneNeg.contains(zeta) {
        return Err(HyperbolicError::OutsideDomain { domain: HyperbolicDomain::SlitPlaneNeg, z: zeta });
    }
    // Arg(e^ζ) is Im ζ reduced into (−π, π].
    let mut image_arg = zeta.im.rem_euclid(TAU);
    if image_arg > PI {
        image_arg -= TAU;
    }
    if image_arg == PI || image_arg == -PI {
        return Err(HyperbolicError::NotInPreimage(zeta));
    }
    let r = zeta.norm();
    let theta = zeta.im.atan2(zeta.re);
    Ok(r * (theta / 2.0).cos() / (image_arg / 2.0).cos().abs())
}
