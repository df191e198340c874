use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wiretap_core::channel::{BceChannel, DiscreteChannel, JointKernel, Pmf};
use wiretap_core::coding::{
    exact_equivocation, exact_error_probability, generate_codebook, plan_binning, secrecy_trend, uniform_prior,
    CodingDistribution, MessageSpace, PairSelection, RateTargets, WiretapCodebook,
};
use wiretap_core::degraded::AuxiliaryDecomposition;
use wiretap_core::inner_bound::{random_decomposition, AuxCaps};

const CAPACITY_R1: f64 = 0.2762927209737831;

fn cascade() -> BceChannel {
    BceChannel::cascade(
        &DiscreteChannel::bsc(0.1).unwrap(),
        &DiscreteChannel::bsc(0.05).unwrap(),
        &DiscreteChannel::bsc(0.1).unwrap(),
    )
    .unwrap()
}

fn wiretap_dist() -> CodingDistribution {
    CodingDistribution::Degraded(AuxiliaryDecomposition::constant(&Pmf::uniform(2).unwrap()))
}

fn code(n: usize, r1: f64, r2: f64, dist: &CodingDistribution, seed: u64) -> WiretapCodebook {
    let plan = plan_binning(&cascade(), dist, n, RateTargets::degraded(r1, r2)).unwrap();
    generate_codebook(&plan, seed).unwrap()
}

#[test]
fn pinned_six_symbol_code() {
    let bce = cascade();
    let c = code(6, 0.7 * CAPACITY_R1, 0.0, &wiretap_dist(), 7);
    let prior = uniform_prior(&c.messages);
    let eq = exact_equivocation(&c, bce.z(), &prior).unwrap();
    let err = exact_error_probability(&c, bce.y1(), bce.y2(), &prior).unwrap();
    assert!((eq.r_e12 - 0.132_290_493_293_336_78).abs() <= 1e-12, "{}", eq.r_e12);
    assert!((err.pe - 0.18808).abs() <= 1e-12, "{}", err.pe);
    assert_eq!(eq.outputs, 64);
}

#[test]
fn pure_noise_tap_sees_nothing() {
    let noise = DiscreteChannel::uniform_noise(2, 2);
    for n in [4, 6, 8] {
        for dist in [
            wiretap_dist(),
            CodingDistribution::Degraded(AuxiliaryDecomposition::copy(&Pmf::uniform(2).unwrap())),
        ] {
            let (r1, r2) = match dist {
                CodingDistribution::Degraded(ref a) if a.u_size() == 1 => (0.25, 0.0),
                _ => (0.0, 0.25),
            };
            let c = code(n, r1, r2, &dist, 1);
            let eq = exact_equivocation(&c, &noise, &uniform_prior(&c.messages)).unwrap();
            let (_, a, b) = c.rates();
            assert!((eq.r_e12 - (a + b)).abs() <= 1e-12, "n={n}: {} vs {}", eq.r_e12, a + b);
            assert!(eq.max_posterior_error <= 1e-12);
        }
    }
}

#[test]
fn noiseless_tap_sees_everything() {
    for n in [4, 6, 8] {
        let words: Vec<Vec<u16>> = (0..4u16).map(|w| (0..n).map(|i| (w >> (i % 2)) & 1).collect()).collect();
        let c = WiretapCodebook::deterministic(n, MessageSpace::pair(2, 2), 2, words).unwrap();
        let eq = exact_equivocation(&c, &DiscreteChannel::identity(2), &uniform_prior(&c.messages)).unwrap();
        assert_eq!(eq.r_e12, 0.0);
        let id = DiscreteChannel::identity(2);
        let err = exact_error_probability(&c, &id, &id, &uniform_prior(&c.messages)).unwrap();
        assert_eq!(err.pe, 0.0);
    }
}

#[test]
fn equivocation_identities_on_generated_codes() {
    let bce = cascade();
    for n in [4, 6, 8] {
        for seed in 0..5 {
            let c = code(n, 0.2, 0.0, &wiretap_dist(), seed);
            let eq = exact_equivocation(&c, bce.z(), &uniform_prior(&c.messages)).unwrap();
            assert!(eq.max_posterior_error <= 1e-12);
            assert!(eq.chain_defect() <= 1e-10);
            assert!(eq.r_e1 <= eq.r_e12 + 1e-12 && eq.r_e2 <= eq.r_e12 + 1e-12);
            assert!(eq.r_e12 <= eq.h_w12 + 1e-12 && eq.r_e12 >= -1e-12);
        }
    }
}

#[test]
fn two_message_codes_satisfy_identities() {
    // both receivers carry a message: W1 on the satellites, W2 on the cloud
    let bce = cascade();
    let dist = CodingDistribution::Degraded(
        AuxiliaryDecomposition::new(
            Pmf::uniform(2).unwrap(),
            DiscreteChannel::new(vec![vec![0.8, 0.2], vec![0.2, 0.8]]).unwrap(),
        )
        .unwrap(),
    );
    let c = code(6, 0.17, 0.17, &dist, 2);
    assert!(c.messages.w1_count() > 1 && c.messages.w2_count() > 1);
    let prior = uniform_prior(&c.messages);
    let eq = exact_equivocation(&c, bce.z(), &prior).unwrap();
    assert!(eq.chain_defect() <= 1e-10);
    assert!(eq.r_e1 <= eq.r_e12 + 1e-12 && eq.r_e2 <= eq.r_e12 + 1e-12);
    let err = exact_error_probability(&c, bce.y1(), bce.y2(), &prior).unwrap();
    assert!(err.pe >= err.pe1.max(err.pe2) - 1e-15 && err.pe <= (err.pe1 + err.pe2).min(1.0) + 1e-15);
}

#[test]
fn reports_use_only_marginals() {
    let base = cascade();
    let mut joint = JointKernel::product(base.y1(), base.y2(), base.z());
    for row in joint.rows.iter_mut() {
        row[0] += 0.01;
        row[7] += 0.01;
        row[2] -= 0.01;
        row[5] -= 0.01;
    }
    let other = base.clone().with_joint(joint).unwrap();
    let run = |bce: &BceChannel| {
        let plan = plan_binning(bce, &wiretap_dist(), 6, RateTargets::degraded(0.2, 0.0)).unwrap();
        let c = generate_codebook(&plan, 4).unwrap();
        let prior = uniform_prior(&c.messages);
        (
            exact_equivocation(&c, bce.z(), &prior).unwrap(),
            exact_error_probability(&c, bce.y1(), bce.y2(), &prior).unwrap(),
        )
    };
    assert_eq!(run(&base), run(&other));
}

#[test]
fn reports_do_not_depend_on_thread_count() {
    let bce = cascade();
    let c = code(8, 0.2, 0.0, &wiretap_dist(), 11);
    let prior = uniform_prior(&c.messages);
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| {
                (
                    exact_equivocation(&c, bce.z(), &prior).unwrap(),
                    exact_error_probability(&c, bce.y1(), bce.y2(), &prior).unwrap(),
                )
            })
    };
    assert_eq!(run(1), run(4));
}

#[test]
fn dependent_auxiliaries_use_joint_pair_selection() {
    let bce = BceChannel::new(
        DiscreteChannel::bsc(0.05).unwrap(),
        DiscreteChannel::bsc(0.1).unwrap(),
        DiscreteChannel::bsc(0.3).unwrap(),
    )
    .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let dec = random_decomposition(&mut rng, AuxCaps::default(), 2);
    let targets = RateTargets {
        r11: 0.25,
        r22: 0.25,
        ..Default::default()
    };
    let plan = plan_binning(&bce, &CodingDistribution::General(dec), 4, targets).unwrap();
    let c = generate_codebook(&plan, 0).unwrap();
    assert_eq!(c.pair_selection, Some(PairSelection::MaxJointProbability));
    let prior = uniform_prior(&c.messages);
    let eq = exact_equivocation(&c, bce.z(), &prior).unwrap();
    assert!(eq.max_posterior_error <= 1e-12 && eq.chain_defect() <= 1e-10);
    let err = exact_error_probability(&c, bce.y1(), bce.y2(), &prior).unwrap();
    assert!((0.0..=1.0).contains(&err.pe));
}

#[test]
fn trend_rows_agree_with_direct_calls() {
    let bce = cascade();
    let t = RateTargets::degraded(0.2, 0.0);
    let rows = secrecy_trend(&bce, &wiretap_dist(), t, &[4], &[3]).unwrap();
    assert_eq!(rows.len(), 1);
    let c = code(4, 0.2, 0.0, &wiretap_dist(), 3);
    let prior = uniform_prior(&c.messages);
    let eq = exact_equivocation(&c, bce.z(), &prior).unwrap();
    let err = exact_error_probability(&c, bce.y1(), bce.y2(), &prior).unwrap();
    assert_eq!(rows[0].mean_gap, eq.h_w12 - eq.r_e12);
    assert_eq!(rows[0].mean_pe, err.pe);

    let zero = secrecy_trend(&bce, &wiretap_dist(), RateTargets::default(), &[4, 6], &[0, 1]).unwrap();
    for r in zero {
        assert_eq!(r.mean_gap, 0.0);
        assert_eq!(r.mean_pe, 0.0);
    }
}

#[test]
fn oversized_enumeration_is_refused() {
    let bce = cascade();
    let c = code(25, 0.04, 0.0, &wiretap_dist(), 0);
    let err = exact_equivocation(&c, bce.z(), &uniform_prior(&c.messages)).unwrap_err();
    assert!(err.is_budget());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn generated_codes_are_reproducible(seed in any::<u64>(), n in 3usize..7) {
        let a = code(n, 0.2, 0.0, &wiretap_dist(), seed);
        prop_assert_eq!(&a, &code(n, 0.2, 0.0, &wiretap_dist(), seed));
        let bce = cascade();
        let prior = uniform_prior(&a.messages);
        let err = exact_error_probability(&a, bce.y1(), bce.y2(), &prior).unwrap();
        prop_assert!((0.0..=1.0).contains(&err.pe));
        let eq = exact_equivocation(&a, bce.z(), &prior).unwrap();
        prop_assert!(eq.max_posterior_error <= 1e-12);
    }
}
