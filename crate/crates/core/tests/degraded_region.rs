use wiretap_core::channel::{binary_entropy, BceChannel, DiscreteChannel, JointKernel, Pmf};
use wiretap_core::degraded::{evaluate_degraded_pair, search_degraded_region, AuxiliaryDecomposition, SearchConfig};
use wiretap_core::region::RatePoint;

fn cascade() -> BceChannel {
    BceChannel::cascade(
        &DiscreteChannel::bsc(0.1).unwrap(),
        &DiscreteChannel::bsc(0.05).unwrap(),
        &DiscreteChannel::bsc(0.1).unwrap(),
    )
    .unwrap()
}

fn small() -> SearchConfig {
    SearchConfig {
        grid_resolution: 8,
        random_samples: 300,
        refine_iters: 30,
        ..SearchConfig::default()
    }
}

/// Same marginals, outputs correlated through a shared flip.
fn correlated_cascade() -> BceChannel {
    let base = cascade();
    let (a, b, c) = (base.y1().clone(), base.y2().clone(), base.z().clone());
    let mut joint = JointKernel::product(&a, &b, &c);
    // move mass between (0,0,0)/(1,1,1) and (0,1,0)/(1,0,1) without changing any marginal
    for row in joint.rows.iter_mut() {
        let eps = 0.01;
        row[0] += eps;
        row[7] += eps;
        row[2] -= eps;
        row[5] -= eps;
        assert!(row.iter().all(|&p| p >= 0.0));
    }
    base.with_joint(joint).unwrap()
}

#[test]
fn joints_with_equal_marginals_give_identical_regions() {
    let a = search_degraded_region(&cascade(), &small()).unwrap();
    let b = search_degraded_region(&correlated_cascade(), &small()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn certificates_reproduce_their_points() {
    let bce = cascade();
    let region = search_degraded_region(&bce, &small()).unwrap();
    assert!(region.degradedness.degraded);
    for p in &region.frontier.points {
        let cert = region.certificate(p.source).unwrap();
        let again = evaluate_degraded_pair(&bce, &cert.decomposition).unwrap();
        assert!((again.r1 - p.rate.r1).abs() <= 1e-10 && (again.r2 - p.rate.r2).abs() <= 1e-10);
    }
    assert!(region.frontier.is_monotone());
    assert!(region.frontier.is_concave(1e-12));
}

#[test]
fn endpoints_match_binary_formulas() {
    let region = search_degraded_region(&cascade(), &small()).unwrap();
    let r1 = binary_entropy(0.212) - binary_entropy(0.1);
    let r2 = binary_entropy(0.212) - binary_entropy(0.14);
    assert!(region.frontier.max_r1() >= r1 - 5e-3 && region.frontier.max_r1() <= r1 + 1e-9);
    assert!(region.frontier.max_r2() >= r2 - 5e-3 && region.frontier.max_r2() <= r2 + 1e-9);
}

#[test]
fn larger_search_never_loses_points() {
    let bce = cascade();
    let base = search_degraded_region(&bce, &small()).unwrap();
    let finer = SearchConfig {
        grid_resolution: 16,
        ..small()
    };
    let more = SearchConfig {
        random_samples: 900,
        ..small()
    };
    for cfg in [finer, more] {
        let big = search_degraded_region(&bce, &cfg).unwrap();
        for p in base.frontier.rates() {
            assert!(big.frontier.hull_contains(p, 1e-9), "{p:?} lost with {cfg:?}");
        }
    }
}

#[test]
fn eavesdropper_as_strong_as_receiver_one() {
    let y1 = DiscreteChannel::bsc(0.1).unwrap();
    let bce = BceChannel::new(y1.clone(), y1.clone(), y1).unwrap();
    let region = search_degraded_region(&bce, &small()).unwrap();
    assert_eq!(region.frontier.rates(), vec![RatePoint::ORIGIN]);
}

#[test]
fn pure_noise_eavesdropper_reaches_main_capacity() {
    let bce = BceChannel::new(
        DiscreteChannel::bsc(0.1).unwrap(),
        DiscreteChannel::bsc(0.2).unwrap(),
        DiscreteChannel::uniform_noise(2, 2),
    )
    .unwrap();
    let x = AuxiliaryDecomposition::constant(&Pmf::uniform(2).unwrap());
    let p = evaluate_degraded_pair(&bce, &x).unwrap();
    assert!((p.r1 - (1.0 - binary_entropy(0.1))).abs() < 1e-12);
    let region = search_degraded_region(&bce, &small()).unwrap();
    assert!((region.frontier.max_r1() - (1.0 - binary_entropy(0.1))).abs() < 1e-9);
}

#[test]
fn non_degraded_channel_is_flagged() {
    let bce = BceChannel::new(
        DiscreteChannel::bsc(0.3).unwrap(),
        DiscreteChannel::bsc(0.1).unwrap(),
        DiscreteChannel::bsc(0.4).unwrap(),
    )
    .unwrap();
    let region = search_degraded_region(&bce, &small()).unwrap();
    assert!(!region.degradedness.degraded);
    assert!(region.degradedness.warning.is_some());
}
