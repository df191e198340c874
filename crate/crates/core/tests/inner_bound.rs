use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wiretap_core::channel::{binary_entropy, BceChannel, DiscreteChannel, Pmf};
use wiretap_core::degraded::{search_degraded_region, SearchConfig};
use wiretap_core::inner_bound::{
    evaluate_inner_bound, membership, random_decomposition, sample_inner_region, vertex_triples, AuxCaps,
    InnerBoundDecomposition, InnerBounds, RateTriple,
};
use wiretap_core::region::RatePoint;

#[path = "support/marton.rs"]
mod marton;
use marton::{oracle_bounds, Tensor, V1, Y1, Z};

fn max_diff(a: &InnerBounds, b: &InnerBounds) -> f64 {
    [(a.b0 - b.b0), (a.b1 - b.b1), (a.b2 - b.b2), (a.b12 - b.b12)]
        .iter()
        .map(|d| d.abs())
        .fold(0.0, f64::max)
}

fn random_bce(rng: &mut ChaCha8Rng) -> BceChannel {
    use rand::Rng;
    let mut k = || {
        let p: f64 = rng.random_range(0.0..1.0);
        let q: f64 = rng.random_range(0.0..1.0);
        DiscreteChannel::new(vec![vec![p, 1.0 - p], vec![q, 1.0 - q]]).unwrap()
    };
    BceChannel::new(k(), k(), k()).unwrap()
}

#[test]
fn matches_full_tensor_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        let bce = random_bce(&mut rng);
        let d = random_decomposition(&mut rng, AuxCaps::default(), 2);
        let got = evaluate_inner_bound(&bce, &d).unwrap().bounds;
        let want = oracle_bounds(&Tensor::build(&bce, &d), true);
        assert!(max_diff(&got, &want) <= 1e-12, "{got:?} vs {want:?}");
    }
}

#[test]
fn constant_tap_reduces_to_marton() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let mut bce = random_bce(&mut rng);
        bce = BceChannel::new(bce.y1().clone(), bce.y2().clone(), DiscreteChannel::uniform_noise(2, 3)).unwrap();
        let d = random_decomposition(&mut rng, AuxCaps::default(), 2);
        let got = evaluate_inner_bound(&bce, &d).unwrap().bounds;
        worst = worst.max(max_diff(&got, &oracle_bounds(&Tensor::build(&bce, &d), false)));
    }
    assert!(worst <= 1e-12, "max deviation {worst}");
}

fn relabel_v1(d: &InnerBoundDecomposition, perm: &[usize]) -> InnerBoundDecomposition {
    let (a, b) = (d.v1_size, d.v2_size);
    let mut vu = vec![vec![0.0; a * b]; d.u_size()];
    let mut xv = vec![vec![]; a * b];
    for i in 0..a {
        for j in 0..b {
            for (u, row) in vu.iter_mut().enumerate() {
                row[perm[i] * b + j] = d.p_v1v2_given_u.prob(u, i * b + j);
            }
            xv[perm[i] * b + j] = d.p_x_given_v1v2.row(i * b + j).to_vec();
        }
    }
    InnerBoundDecomposition::new(
        d.p_u.clone(),
        DiscreteChannel::new(vu).unwrap(),
        DiscreteChannel::new(xv).unwrap(),
        a,
        b,
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn relabeling_v1_changes_nothing(seed in any::<u64>(), v1 in 2usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bce = random_bce(&mut rng);
        let d = random_decomposition(&mut rng, AuxCaps { u: 2, v1, v2: 2 }, 2);
        let perm: Vec<usize> = (0..v1).rev().collect();
        let a = evaluate_inner_bound(&bce, &d).unwrap().bounds;
        let b = evaluate_inner_bound(&bce, &relabel_v1(&d, &perm)).unwrap().bounds;
        prop_assert!(max_diff(&a, &b) <= 1e-12);
    }

    #[test]
    fn vertices_are_members(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bce = random_bce(&mut rng);
        let d = random_decomposition(&mut rng, AuxCaps::default(), 2);
        let bounds = evaluate_inner_bound(&bce, &d).unwrap().bounds;
        prop_assert!(bounds.b0.is_finite() && bounds.b12.is_finite());
        for t in vertex_triples(&bounds) {
            let slack = RateTriple { r0: t.r0 * (1.0 - 1e-12), r1: t.r1 * (1.0 - 1e-12), r2: t.r2 * (1.0 - 1e-12) };
            prop_assert!(membership(&bce, &d, &slack).unwrap());
        }
        prop_assert!(membership(&bce, &d, &RateTriple::new(0.0, 0.0, 0.0).unwrap()).unwrap());
    }
}

#[test]
fn boundary_triple_and_inflation() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let bce = BceChannel::new(
        DiscreteChannel::bsc(0.05).unwrap(),
        DiscreteChannel::bsc(0.1).unwrap(),
        DiscreteChannel::bsc(0.3).unwrap(),
    )
    .unwrap();
    loop {
        let d = random_decomposition(&mut rng, AuxCaps::default(), 2);
        let b = evaluate_inner_bound(&bce, &d).unwrap().bounds;
        let r1 = b.b1 - b.b0;
        let r2 = b.b12 - b.b0 - r1;
        if b.b0 <= 0.0 || r2 <= 1e-6 || r2 > b.b2 - b.b0 {
            continue;
        }
        let t = RateTriple::new(b.b0, r1, r2).unwrap();
        assert!(membership(&bce, &d, &t).unwrap());
        let over = RateTriple::new(b.b0, r1, r2 + 1e-9).unwrap();
        assert!(!membership(&bce, &d, &over).unwrap());
        break;
    }
}

#[test]
fn degenerate_decompositions() {
    let bce = BceChannel::new(
        DiscreteChannel::bsc(0.05).unwrap(),
        DiscreteChannel::bsc(0.1).unwrap(),
        DiscreteChannel::bsc(0.3).unwrap(),
    )
    .unwrap();
    let e = evaluate_inner_bound(&bce, &InnerBoundDecomposition::trivial(&Pmf::uniform(2).unwrap())).unwrap();
    assert_eq!(e.bounds, InnerBounds { b0: 0.0, b1: 0.0, b2: 0.0, b12: 0.0 });
    assert!(sample_inner_region(&bce, AuxCaps::default(), 0, 1).unwrap().is_empty());
    assert!(sample_inner_region(&bce, AuxCaps { u: 4, v1: 4, v2: 8 }, 1, 1).unwrap_err().is_budget());
}

#[test]
fn sampling_is_deterministic() {
    let bce = BceChannel::cascade(
        &DiscreteChannel::bsc(0.1).unwrap(),
        &DiscreteChannel::bsc(0.05).unwrap(),
        &DiscreteChannel::bsc(0.1).unwrap(),
    )
    .unwrap();
    assert_eq!(
        sample_inner_region(&bce, AuxCaps::default(), 200, 3).unwrap(),
        sample_inner_region(&bce, AuxCaps::default(), 200, 3).unwrap()
    );
}

#[test]
fn inner_points_lie_in_the_degraded_region() {
    let bce = BceChannel::cascade(
        &DiscreteChannel::bsc(0.1).unwrap(),
        &DiscreteChannel::bsc(0.05).unwrap(),
        &DiscreteChannel::bsc(0.1).unwrap(),
    )
    .unwrap();
    let region = search_degraded_region(&bce, &SearchConfig::default()).unwrap();
    for s in sample_inner_region(&bce, AuxCaps::default(), 2000, 9).unwrap() {
        let t = s.triple;
        // the common message can always be re-labelled as receiver 2's
        assert!(region.frontier.hull_contains(RatePoint::new(t.r1, t.r2 + t.r0), 5e-3), "{t:?}");
    }
}

#[test]
fn single_user_gives_wiretap_secrecy_rate() {
    let bce = BceChannel::cascade(
        &DiscreteChannel::bsc(0.1).unwrap(),
        &DiscreteChannel::bsc(0.05).unwrap(),
        &DiscreteChannel::bsc(0.1).unwrap(),
    )
    .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut best = 0.0f64;
    for _ in 0..500 {
        let full = random_decomposition(&mut rng, AuxCaps { u: 2, v1: 2, v2: 2 }, 2);
        // U and V2 constant: keep one row of P(v1, v2 | u) and fold out v2
        let row = full.p_v1v2_given_u.row(0);
        let pv1 = vec![row[0] + row[1], row[2] + row[3]];
        let x_rows = vec![full.p_x_given_v1v2.row(0).to_vec(), full.p_x_given_v1v2.row(2).to_vec()];
        let d = InnerBoundDecomposition::new(
            Pmf::new(vec![1.0]).unwrap(),
            DiscreteChannel::new(vec![pv1.clone()]).unwrap(),
            DiscreteChannel::new(x_rows.clone()).unwrap(),
            2,
            1,
        )
        .unwrap();
        let b = evaluate_inner_bound(&bce, &d).unwrap().bounds;
        let t = Tensor::build(&bce, &d);
        let ck = (t.cmi(&[V1], &[Y1], &[]) - t.cmi(&[V1], &[Z], &[])).max(0.0);
        assert!((b.b1 - ck).abs() <= 1e-12);
        assert!(b.b0.abs() <= 1e-12);
        best = best.max(b.b1);
    }
    let cap = binary_entropy(0.212) - binary_entropy(0.1);
    assert!(best <= cap + 1e-12, "best {best}, capacity {cap}");
    let copy = InnerBoundDecomposition::new(
        Pmf::new(vec![1.0]).unwrap(),
        DiscreteChannel::new(vec![vec![0.5, 0.5]]).unwrap(),
        DiscreteChannel::identity(2),
        2,
        1,
    )
    .unwrap();
    assert!((evaluate_inner_bound(&bce, &copy).unwrap().bounds.b1 - cap).abs() <= 1e-12);
}
