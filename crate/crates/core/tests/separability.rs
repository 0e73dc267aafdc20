use hermitia::fixtures::{example_6_2, separable};
use hermitia::quantum::{
    separability_analyze, separability_analyze_ensemble, Certificate, MixedStateEnsemble,
    SeparabilityConfig, SeparabilityVerdict, Verdict,
};
use hermitia::random::{random_unitary, seeded_rng};
use hermitia::{CMatrix, ComplexTensor, C64};

fn local_unitaries(seed: u64, dims: &[usize]) -> Vec<CMatrix> {
    let mut rng = seeded_rng(seed, 0);
    dims.iter().map(|&n| random_unitary(&mut rng, n)).collect()
}

fn assert_sound(v: &SeparabilityVerdict, e: &MixedStateEnsemble, config: &SeparabilityConfig) {
    let h = hermitia::quantum::density_tensor(e);
    let re = v.reverify(&h, config).unwrap();
    assert!(re.holds, "{}", re.detail);
    if let Certificate::PositiveHermitianDecomposition { decomposition, reconstruction_error } = &v.certificate {
        assert!(decomposition.positive);
        assert!(*reconstruction_error <= 1e-8);
        for t in &decomposition.terms {
            assert!(t.weight > 0.0);
            for n in t.factors.norms() {
                assert!((n - 1.0).abs() <= 1e-10);
            }
        }
    }
}

#[test]
fn entangled_mixture_stays_entangled_under_local_unitaries() {
    let config = SeparabilityConfig::default();
    let e = example_6_2(0.5, 0.5).unwrap();
    assert_eq!(separability_analyze_ensemble(&e, &config).verdict, Verdict::Entangled);
    for seed in 0..20 {
        let t = e.transformed(&local_unitaries(seed, &[2, 2])).unwrap();
        let v = separability_analyze_ensemble(&t, &config);
        assert_eq!(v.verdict, Verdict::Entangled, "seed {seed}: {:?}", v.certificate);
        assert!(matches!(v.certificate, Certificate::SpanObstruction { .. }));
        assert_sound(&v, &t, &config);
    }
}

#[test]
fn separable_mixtures_stay_separable_under_local_unitaries() {
    let config = SeparabilityConfig::default();
    for state_seed in 0..5 {
        let e = separable(&[2, 2], 2, state_seed).unwrap();
        assert_eq!(separability_analyze_ensemble(&e, &config).verdict, Verdict::Separable);
        for seed in 0..20 {
            let t = e.transformed(&local_unitaries(100 + seed, &[2, 2])).unwrap();
            let v = separability_analyze_ensemble(&t, &config);
            assert_eq!(v.verdict, Verdict::Separable, "state {state_seed} seed {seed}: {:?}", v.certificate);
            assert_sound(&v, &t, &config);
        }
    }
}

#[test]
fn single_product_state_is_separable() {
    let e = separable(&[2, 2], 1, 7).unwrap();
    let v = separability_analyze_ensemble(&e, &SeparabilityConfig::default());
    assert_eq!(v.verdict, Verdict::Separable);
    assert_eq!(v.eigen_rank, 1);
}

#[test]
fn unequal_weights_are_still_entangled() {
    let config = SeparabilityConfig::default();
    for (a, b) in [(0.3, 0.7), (0.9, 0.1)] {
        let v = separability_analyze_ensemble(&example_6_2(a, b).unwrap(), &config);
        assert_eq!(v.verdict, Verdict::Entangled, "{a}/{b}");
    }
}

#[test]
fn out_of_scope_shapes_are_inconclusive() {
    let e = separable(&[2, 3], 3, 1).unwrap();
    let v = separability_analyze_ensemble(&e, &SeparabilityConfig::default());
    assert_eq!(v.verdict, Verdict::Inconclusive);
}

#[test]
fn trace_normalization_rescales_input() {
    let e = separable(&[2, 2], 2, 4).unwrap();
    let h = hermitia::quantum::density_tensor(&e).scale(3.0);
    let config = SeparabilityConfig { normalize_trace: true, ..SeparabilityConfig::default() };
    let v = separability_analyze(&h, &config);
    assert!(v.trace_normalized);
    assert_eq!(v.verdict, Verdict::Separable);
}

#[test]
fn bell_pair_is_entangled() {
    let s = 0.5f64.sqrt();
    let bell = ComplexTensor::new(vec![2, 2], vec![C64::new(s, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(s, 0.0)]).unwrap();
    let e = MixedStateEnsemble::new(vec![1.0], vec![bell]).unwrap();
    let v = separability_analyze_ensemble(&e, &SeparabilityConfig::default());
    assert_eq!(v.verdict, Verdict::Entangled);
}
