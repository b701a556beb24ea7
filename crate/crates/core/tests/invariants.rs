use std::f64::consts::FRAC_PI_2;

use proptest::prelude::*;

use warpfield::curvature::{curvature_certificate, scalar_curvature};
use warpfield::radial::{linear_blend, RadialProfile};
use warpfield::retract::classify;
use warpfield::surgery::{surgery_j, surgery_j_inv, Exterior, Side, StdMetricDescriptor};
use warpfield::torpedo::{is_torpedo_near_origin, torpedo_min_curvature, torpedo_profile, TorpedoSpec};

fn descriptor() -> impl Strategy<Value = StdMetricDescriptor> {
    (2usize..8, 2usize..8, 0.005f64..1.0, 1.0f64..5.0, "[a-z]{1,8}").prop_map(|(p, q, delta, k, tag)| {
        let rho = delta * FRAC_PI_2;
        StdMetricDescriptor {
            side: Side::X,
            p,
            q,
            rho_bar: rho * k,
            rho,
            delta,
            exterior: Exterior { tag, collar_profile_csv: String::new() },
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn surgery_is_a_bijection(d in descriptor()) {
        let y = surgery_j(&d).unwrap();
        prop_assert_eq!((y.p, y.q), (d.q, d.p));
        prop_assert_eq!(&surgery_j_inv(&y).unwrap(), &d);
        prop_assert_eq!(&StdMetricDescriptor::from_json(&y.to_json()).unwrap(), &y);
    }

    // R scales like 1/δ² under f ↦ λf(·/λ)
    #[test]
    fn torpedo_curvature_scales(delta in 0.02f64..1.0, n in 3usize..7) {
        let a = torpedo_min_curvature(&TorpedoSpec::infinitesimal(delta), n).unwrap() * delta * delta;
        let b = torpedo_min_curvature(&TorpedoSpec::infinitesimal(1.0), n).unwrap();
        prop_assert!((a - b).abs() <= 1e-6 * b.abs(), "{} vs {}", a, b);
    }

    #[test]
    fn torpedo_is_standard_and_positive(delta in 0.02f64..0.5, extra in 0.0f64..2.0, n in 3usize..6) {
        let spec = TorpedoSpec::new(delta, delta * FRAC_PI_2 * (1.0 + extra));
        let t = torpedo_profile(&spec).unwrap();
        let (d, rho) = is_torpedo_near_origin(&t, 1e-7).unwrap();
        prop_assert!((d - delta).abs() < 1e-9 * delta);
        prop_assert!(rho >= delta * FRAC_PI_2 * (1.0 - 1e-9));
        prop_assert!(curvature_certificate(&t, n, 512, 0.0).unwrap().pass);
    }

    // positivity is convex in f only along the neck; blends of two necks stay positive
    #[test]
    fn blend_of_necks_is_positive(d0 in 0.05f64..0.3, d1 in 0.05f64..0.3, s in 0.0f64..=1.0) {
        let b = 0.3 * FRAC_PI_2 * 1.5;
        let a = torpedo_profile(&TorpedoSpec::new(d0, b)).unwrap();
        let c = torpedo_profile(&TorpedoSpec::new(d1, b)).unwrap();
        let m = linear_blend(&a, &c, s).unwrap();
        let r = b * 0.99;
        let want = 2.0 / (d0 + s * (d1 - d0)).powi(2);
        prop_assert!((scalar_curvature(&m, 3, r).unwrap() - want).abs() < 1e-8 * want);
    }

    #[test]
    fn sine_caps_classify_as_case_two_or_four(delta in 0.1f64..1.0, frac in 0.3f64..=1.0) {
        let w = RadialProfile::sine(delta, delta * FRAC_PI_2 * frac).unwrap();
        let c = classify(&w, w.r_max(), 1e-9).unwrap();
        if frac < 1.0 - 1e-6 {
            prop_assert_eq!(c.case_id, 4);
        } else {
            prop_assert!(c.case_id == 2 || c.case_id == 4);
        }
    }
}
