use proptest::prelude::*;
use wiretap_core::fading::quadrature::integrate;
use wiretap_core::fading::{
    average_rate, discretize, integrated_density, layer_rate, layered_objective, optimal_interference,
    optimize_profile_numerical, rayleigh_endpoints, rayleigh_power_density, ClosedFormProfile, FadingFamily,
    FadingSpec, InterferenceLaw, InterferenceProfile, LayerGrid, OptimizerConfig, PowerProfile,
};
use wiretap_core::simplex::project_to_simplex;

fn spec() -> FadingSpec {
    FadingSpec::rayleigh(0.5, 1.0).unwrap()
}

fn interior(lo: f64, hi: f64, k: usize, n: usize) -> f64 {
    lo + (hi - lo) * (k as f64 + 0.5) / n as f64
}

#[test]
fn density_is_minus_interference_slope() {
    for law in [InterferenceLaw::Closed, InterferenceLaw::Stationary] {
        let prof = ClosedFormProfile::new(law, spec()).unwrap();
        let (lo, hi) = prof.support();
        for k in 0..100 {
            let s = interior(lo, hi, k, 100);
            let h = 1e-5;
            let fd = (prof.interference(s - h) - prof.interference(s + h)) / (2.0 * h);
            let rho = prof.density(s);
            assert!((fd - rho).abs() <= 1e-6 * rho.abs(), "{law:?} s={s}: {fd} vs {rho}");
        }
    }
}

#[test]
fn densities_spend_the_budget() {
    for law in [InterferenceLaw::Closed, InterferenceLaw::Stationary] {
        let prof = ClosedFormProfile::new(law, spec()).unwrap();
        assert!((integrated_density(&prof).unwrap() - 1.0).abs() <= 1e-6, "{law:?}");
    }
}

#[test]
fn endpoints_are_consistent() {
    let (s0, s1) = rayleigh_endpoints(&spec()).unwrap();
    assert!((optimal_interference(s0, &spec()).unwrap() - 1.0).abs() <= 1e-9);
    assert!(optimal_interference(s1, &spec()).unwrap().abs() <= 1e-9);
    let at_s1 = rayleigh_power_density(s1, &spec()).unwrap();
    let sp: f64 = 0.5;
    assert!((at_s1 - (1.0 + 2.0 * sp) / (s1 * s1 - sp * s1 + sp).powi(2)).abs() <= 1e-15);
}

#[test]
fn average_rate_is_expected_layer_rate() {
    let s = spec();
    let prof = ClosedFormProfile::new(InterferenceLaw::Closed, s).unwrap();
    let (lo, hi) = prof.support();
    let body = integrate(|x| s.pdf(x) * layer_rate(x, &s, &prof).unwrap(), lo, hi, 1e-10).unwrap();
    let tail = s.survival(hi) * layer_rate(hi, &s, &prof).unwrap();
    let avg = average_rate(&s, &prof).unwrap();
    assert!((body + tail - avg).abs() <= 1e-6, "{} vs {avg}", body + tail);
}

#[test]
fn power_below_the_eavesdropper_gain_is_wasted() {
    let s = FadingSpec::rayleigh(3.0, 1.0).unwrap();
    let prof = PowerProfile::from_layers(&[0.5, 1.0, 2.0], &[0.2, 0.3, 0.5]).unwrap();
    assert_eq!(average_rate(&s, &prof).unwrap(), 0.0);
    let zero = PowerProfile::from_layers(&[1.0, 2.0], &[0.0, 0.0]).unwrap();
    assert_eq!(average_rate(&spec(), &zero).unwrap(), 0.0);
}

#[test]
fn vanishing_power() {
    let s = FadingSpec::rayleigh(0.5, 1e-9).unwrap();
    let sol = optimize_profile_numerical(&s, &LayerGrid::Uniform { n: 50 }, &OptimizerConfig::default()).unwrap();
    assert!(sol.objective <= 1e-8);
}

#[test]
fn nakagami_profile_is_usable() {
    let s = FadingSpec::new(FadingFamily::Nakagami { m: 2.0 }, 0.3, 1.0).unwrap();
    let prof = ClosedFormProfile::new(InterferenceLaw::Closed, s).unwrap();
    assert!(average_rate(&s, &prof).unwrap() > 0.0);
    let (lo, hi) = prof.support();
    for k in 0..20 {
        let x = interior(lo, hi, k, 20);
        assert!(prof.density(x) >= -1e-9);
    }
}

/// Largest objective gain from scaling one layer of the discretised profile by
/// `1 +/- 1%` and projecting back onto the budget.
fn best_single_layer_gain(law: InterferenceLaw) -> f64 {
    let s = spec();
    let prof = ClosedFormProfile::new(law, s).unwrap();
    let gains = LayerGrid::Uniform { n: 400 }.gains(&s).unwrap();
    let mut p = discretize(&prof, &gains);
    project_to_simplex(&mut p, s.power);
    let base = layered_objective(&s, &gains, &p);
    let mut best = f64::NEG_INFINITY;
    for k in 0..p.len() {
        if p[k] == 0.0 {
            continue;
        }
        for f in [0.99, 1.01] {
            let mut q = p.clone();
            q[k] *= f;
            project_to_simplex(&mut q, s.power);
            best = best.max(layered_objective(&s, &gains, &q) - base);
        }
    }
    best
}

#[test]
fn closed_form_is_locally_optimal() {
    let gain = best_single_layer_gain(InterferenceLaw::Closed);
    let reference = best_single_layer_gain(InterferenceLaw::Stationary);
    assert!(
        gain <= 1e-9,
        "a 1% single-layer change improves the objective by {gain:.3e} \
         (stationary profile on the same grid: {reference:.3e})"
    );
}

fn layers() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (2usize..12).prop_flat_map(|n| {
        (prop::collection::vec(0.01f64..1.0, n), prop::collection::vec(0.0f64..1.0, n)).prop_map(|(steps, raw)| {
            let mut g = Vec::with_capacity(steps.len());
            let mut s = 0.0;
            for d in steps {
                s += d;
                g.push(s);
            }
            let total: f64 = raw.iter().sum::<f64>().max(1e-12);
            (g, raw.into_iter().map(|x| x / total).collect())
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn layer_rate_is_monotone(a in 0.0f64..3.0, b in 0.0f64..3.0) {
        let prof = ClosedFormProfile::new(InterferenceLaw::Closed, spec()).unwrap();
        let (lo, hi) = (a.min(b), a.max(b));
        prop_assert!(layer_rate(lo, &spec(), &prof).unwrap() <= layer_rate(hi, &spec(), &prof).unwrap() + 1e-12);
    }

    #[test]
    fn rates_of_layered_profiles_are_non_negative((g, p) in layers(), sp in 0.0f64..1.0) {
        let s = FadingSpec::rayleigh(sp, 1.0).unwrap();
        let prof = PowerProfile::from_layers(&g, &p).unwrap();
        let avg = average_rate(&s, &prof).unwrap();
        prop_assert!(avg >= 0.0);
        prop_assert!(layer_rate(0.5, &s, &prof).unwrap() <= layer_rate(2.0, &s, &prof).unwrap() + 1e-12);
    }
}
