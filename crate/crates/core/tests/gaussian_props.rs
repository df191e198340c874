use proptest::prelude::*;
use wiretap_core::gaussian::{
    nonsecret_rate_pair, region_boundary, secret_rate_pair, sweep, GaussianBceParams, GaussianSplit,
};

fn params() -> impl Strategy<Value = GaussianBceParams> {
    (0.01f64..100.0, 0.01f64..10.0, 0.0f64..10.0, 0.0f64..10.0)
        .prop_map(|(p, s1, d2, d3)| GaussianBceParams::new(p, s1, s1 + d2, s1 + d2 + d3).unwrap())
}

proptest! {
    #[test]
    fn secret_inside_nonsecret(p in params(), a in 0.0f64..=1.0) {
        let s = GaussianSplit::new(a).unwrap();
        let sec = secret_rate_pair(&p, s).unwrap();
        let non = nonsecret_rate_pair(&p, s).unwrap();
        prop_assert!(sec.r1 >= 0.0 && sec.r2 >= 0.0);
        prop_assert!(non.dominates(&sec));
    }

    #[test]
    fn sweep_is_monotone_in_alpha(p in params()) {
        let rows = sweep(&p, 41).unwrap();
        for w in rows.windows(2) {
            prop_assert!(w[1].secret.r1 >= w[0].secret.r1 - 1e-15);
            prop_assert!(w[1].secret.r2 <= w[0].secret.r2 + 1e-15);
        }
    }

    #[test]
    fn equal_eavesdropper_noise_kills_outer_layer(p in 0.1f64..50.0, s1 in 0.1f64..5.0, d in 0.0f64..5.0, a in 0.0f64..=1.0) {
        let g = GaussianBceParams::new(p, s1, s1 + d, s1 + d).unwrap();
        prop_assert_eq!(secret_rate_pair(&g, GaussianSplit::new(a).unwrap()).unwrap().r2, 0.0);
    }
}

#[test]
fn far_eavesdropper_approaches_nonsecret_region() {
    let g = GaussianBceParams::new(20.0, 0.9, 1.5, 1e12).unwrap();
    for row in sweep(&g, 101).unwrap() {
        assert!((row.secret.r1 - row.nonsecret.r1).abs() < 1e-9);
        assert!((row.secret.r2 - row.nonsecret.r2).abs() < 1e-9);
    }
}

#[test]
fn boundary_is_a_monotone_frontier() {
    let g = GaussianBceParams::new(20.0, 0.9, 1.5, 4.0).unwrap();
    let r = region_boundary(&g, 101).unwrap();
    assert!(r.is_monotone());
    assert_eq!(r.points.first().unwrap().source, 1.0);
    assert_eq!(r.points.last().unwrap().source, 0.0);
}

#[test]
fn invalid_parameters() {
    assert!(GaussianBceParams::new(0.0, 1.0, 1.0, 1.0).is_err());
    assert!(GaussianBceParams::new(1.0, 2.0, 1.0, 3.0).is_err());
    assert!(GaussianSplit::new(1.5).is_err());
    assert!(sweep(&GaussianBceParams::new(1.0, 1.0, 1.0, 1.0).unwrap(), 1).is_err());
}
