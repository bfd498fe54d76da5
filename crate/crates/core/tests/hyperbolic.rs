use std::f64::consts::{PI, SQRT_2, TAU};

use expchaos::branches::{windowed_log, BranchSpec};
use expchaos::dynamics::{exp_map, ComplexPoint};
use expchaos::hyperbolic::HyperbolicDomain::*;
use expchaos::hyperbolic::*;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> ComplexPoint {
    ComplexPoint::new(re, im)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// A point of `domain`, from two uniforms in `[0, 1)`.
fn sample(domain: HyperbolicDomain, s: f64, t: f64) -> ComplexPoint {
    match domain {
        UnitDisc => ComplexPoint::from_polar(0.98 * s.sqrt(), TAU * t),
        RightHalfPlane => c(0.01 + 10.0 * s, 20.0 * t - 10.0),
        StripPi => c(10.0 * s - 5.0, (2.0 * t - 1.0) * (PI - 0.01)),
        SlitPlanePos => ComplexPoint::from_polar((4.0 * s - 2.0).exp(), 0.01 + t * (TAU - 0.02)),
        SlitPlaneNeg => ComplexPoint::from_polar((4.0 * s - 2.0).exp(), (2.0 * t - 1.0) * (PI - 0.01)),
    }
}

fn unit() -> impl Strategy<Value = f64> {
    0.0f64..1.0
}

/// A holomorphic map between model domains, with its derivative.
struct Map {
    name: &'static str,
    src: HyperbolicDomain,
    dst: HyperbolicDomain,
    isometry: bool,
    f: fn(ComplexPoint) -> (ComplexPoint, ComplexPoint),
}

fn catalog() -> Vec<Map> {
    vec![
        Map {
            name: "Möbius",
            src: UnitDisc,
            dst: UnitDisc,
            isometry: true,
            f: |z| {
                let a = c(0.3, -0.4);
                (mobius(a, 1.1, z).unwrap(), mobius_deriv(a, 1.1, z).unwrap())
            },
        },
        Map { name: "z²", src: UnitDisc, dst: UnitDisc, isometry: false, f: |z| (z * z, 2.0 * z) },
        Map {
            name: "H ⊂ C∖(−∞,0]", src: RightHalfPlane, dst: SlitPlaneNeg, isometry: false, f: |z| (z, c(1.0, 0.0))
        },
        Map { name: "D ⊂ S", src: UnitDisc, dst: StripPi, isometry: false, f: |z| (z, c(1.0, 0.0)) },
        Map {
            name: "log with window π",
            src: SlitPlanePos,
            dst: SlitPlanePos,
            isometry: false,
            f: |z| (windowed_log(z, BranchSpec::new(PI)).unwrap(), z.inv()),
        },
        Map { name: "principal log", src: SlitPlaneNeg, dst: StripPi, isometry: true, f: |z| (z.ln(), z.inv()) },
        Map {
            name: "φ1(z + 1)",
            src: RightHalfPlane,
            dst: UnitDisc,
            isometry: false,
            f: |z| (iso(Iso::Phi1, z + 1.0).unwrap(), iso_deriv(Iso::Phi1, z + 1.0).unwrap()),
        },
        Map {
            name: "φ3 ∘ φ2",
            src: StripPi,
            dst: SlitPlanePos,
            isometry: true,
            f: |z| {
                let w = iso(Iso::Phi2, z).unwrap();
                (iso(Iso::Phi3, w).unwrap(), iso_deriv(Iso::Phi3, w).unwrap() * iso_deriv(Iso::Phi2, z).unwrap())
            },
        },
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn densities_transform_under_isomorphisms(which in prop::sample::select(Iso::ALL.to_vec()), s in unit(), t in unit()) {
        let z = sample(which.source(), s, t);
        let w = iso(which, z).unwrap();
        let lhs = density(which.source(), z).unwrap();
        let rhs = density(which.target(), w).unwrap() * iso_deriv(which, z).unwrap().norm();
        prop_assert!(rel(rhs, lhs) <= 1e-9, "{:?} at {}: {} vs {}", which, z, lhs, rhs);
    }

    #[test]
    fn iso_derivatives_match_differences(which in prop::sample::select(Iso::ALL.to_vec()), s in unit(), t in unit()) {
        let z = sample(which.source(), s, t);
        let h = 1e-6 * z.norm().max(1e-2);
        if [z + h, z - h].iter().all(|p| which.source().contains(*p)) {
            let fd = (iso(which, z + h).unwrap() - iso(which, z - h).unwrap()) / (2.0 * h);
            let d = iso_deriv(which, z).unwrap();
            prop_assert!((fd - d).norm() <= 1e-6 * d.norm());
        }
    }

    #[test]
    fn holomorphic_maps_do_not_expand(k in 0usize..8, s in unit(), t in unit()) {
        let map = &catalog()[k];
        let z = sample(map.src, s, t);
        let (fz, dfz) = (map.f)(z);
        let d = hyp_derivative(fz, dfz, map.src, z, map.dst).unwrap().value();
        prop_assert!(d <= 1.0 + 1e-9, "{} at {}: {}", map.name, z, d);
        if map.isometry {
            prop_assert!((d - 1.0).abs() <= 1e-9, "{} at {}: {}", map.name, z, d);
        }
    }

    #[test]
    fn exp_expands_the_slit_plane(r in 0.01f64..30.0, theta in 0.0f64..TAU) {
        let zeta = ComplexPoint::from_polar(r, theta);
        if let Ok(e) = expansion_u(zeta) {
            prop_assert!(e > 1.0);
            prop_assert!(e >= expansion_u_lower_bound(zeta) - 1e-9);
            if SlitPlanePos.contains(zeta) {
                let w = exp_map(zeta).unwrap();
                let d = hyp_derivative(w, w, SlitPlanePos, zeta, SlitPlanePos).unwrap().value();
                prop_assert!(rel(e, d) <= 1e-9, "{}: {} vs {}", zeta, e, d);
            }
        }
    }

    #[test]
    fn right_of_two_expands_by_root_two(re in 2.0f64..40.0, im in -40.0f64..40.0) {
        let zeta = c(re, im);
        if let Ok(e) = expansion_slitneg(zeta) {
            prop_assert!(e >= SQRT_2 - 1e-9);
        }
    }
}

#[test]
fn expansion_grows_along_the_real_axis() {
    let values: Vec<f64> = [2.0, 4.0, 8.0, 16.0].iter().map(|x| expansion_slitneg(c(*x, 0.0)).unwrap()).collect();
    assert!(values.windows(2).all(|w| w[0] < w[1]), "{values:?}");
}

#[test]
fn catalog_maps_respect_domains() {
    for map in catalog() {
        for i in 0..20 {
            let z = sample(map.src, (i as f64 + 0.5) / 20.0, ((7 * i) % 20) as f64 / 20.0);
            assert!(map.src.contains(z));
            assert!(map.dst.contains((map.f)(z).0), "{} at {z}", map.name);
        }
    }
}
