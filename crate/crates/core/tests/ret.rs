use std::f64::consts::PI;

use proptest::prelude::*;
use warpconv_core::ret::{ret_branches, ret_distance, ret_distance_bruteforce, ret_value, RETParams};
use warpconv_core::space::SurfacePoint;

fn point() -> impl Strategy<Value = SurfacePoint> {
    (-PI..PI, 0.0..2.0 * PI).prop_map(|(r, t)| SurfacePoint::new(r, t))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn triangle_inequality(r in 1.0001f64..=10.0, x in point(), y in point(), z in point()) {
        let p = RETParams::standard_interval(r).unwrap();
        let d = |a, b| ret_distance(&p, a, b).unwrap();
        prop_assert!(d(x, z) <= d(x, y) + d(y, z) + 1e-10);
        prop_assert_eq!(d(x, y), d(y, x));
    }

    #[test]
    fn closed_form_matches_the_minimization(r in 1.0001f64..=10.0, x in point(), y in point()) {
        let p = RETParams::standard_interval(r).unwrap();
        let closed = ret_distance(&p, x, y).unwrap();
        let brute = ret_distance_bruteforce(&p, x, y, 1000).unwrap();
        prop_assert!((closed - brute).abs() <= 1e-9, "{} vs {}", closed, brute);
    }

    #[test]
    fn branches_meet_at_theta0(r in 1.0001f64..=10.0, ds in 0.0f64..7.0) {
        let t0 = ret_branches(r, ds, 0.0).theta0;
        let b = ret_branches(r, ds, t0);
        prop_assert!((b.euclidean - b.taxi).abs() <= 1e-12 * (1.0 + b.taxi));
    }

    #[test]
    fn homogeneous_and_bracketed(r in 1.0001f64..=10.0, ds in 0.0f64..7.0, dsig in 0.0f64..4.0, k in 0.0f64..5.0) {
        let d = ret_value(r, ds, dsig);
        prop_assert!((ret_value(r, k * ds, k * dsig) - k * d).abs() <= 1e-12 * (1.0 + k * d));
        prop_assert!(d <= ds + dsig + 1e-12);
        prop_assert!(d >= dsig.max(ds * (r * r - 1.0).sqrt() / r) - 1e-12);
    }
}

#[test]
fn quoted_example() {
    assert!((ret_value(5.0, PI, PI) - PI * (24f64.sqrt() / 5.0 + 1.0)).abs() < 1e-12);
    assert!((ret_value(5.0, PI, PI) - 6.2197).abs() < 1e-4);
    assert_eq!(ret_value(3.0, 2.0, 0.0), 2.0);
}
