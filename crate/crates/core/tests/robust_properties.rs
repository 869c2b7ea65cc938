use noisy_oracle_core::checks::{composition_trial, f_superposition_trial, g_bound_trial};
use noisy_oracle_core::circuit::{Gate, QueryAlgorithm, Target};
use noisy_oracle_core::layout::RegisterLayout;
use noisy_oracle_core::oracle::{FaultTrace, FaultyOracleConfig, TruthTable};
use noisy_oracle_core::robust::{compute_t, robustify, Level, RobustOracle};
use noisy_oracle_core::state::{QubitRef, StateVector};
use noisy_oracle_core::stats::Frequency;
use proptest::prelude::*;

fn fair() -> FaultyOracleConfig {
    FaultyOracleConfig::new(0.5).unwrap()
}

#[test]
fn f_bound_holds_on_superpositions() {
    let t = compute_t(Level::F, 0.3, 0.1, 1, 1).unwrap();
    let mut freq = Frequency::default();
    for i in 0..100 {
        freq.record(f_superposition_trial(3, t, 21, i).unwrap() <= 0.3);
    }
    assert!(freq.value() >= 0.9 - 3.0 * freq.sigma_at(0.9), "{freq:?}");
}

#[test]
fn g_bound_small_batch() {
    let t = compute_t(Level::G, 0.5, 0.2, 1, 1).unwrap();
    let mut freq = Frequency::default();
    for i in 0..200 {
        freq.record(g_bound_trial(3, t, 5, i).unwrap() <= 0.5);
    }
    assert!(freq.value() >= 0.8 - 3.0 * freq.sigma_at(0.8), "{freq:?}");
}

fn two_query_toy() -> QueryAlgorithm {
    let z = || Target::Register("Z".into());
    let segments = vec![
        vec![Gate::H(z()), Gate::Rot { theta: 0.7, target: Target::Register("B".into()) }],
        vec![
            Gate::Diffusion("Z".into()),
            Gate::Cnot { control: QubitRef::new("Z", 0), target: QubitRef::new("B", 0) },
        ],
        vec![Gate::H(Target::Qubit(QubitRef::new("Z", 2))), Gate::Diffusion("Z".into())],
    ];
    QueryAlgorithm::new(3, 1, 0, segments, "Z").unwrap()
}

#[test]
fn algorithm_level_composition() {
    let algo = two_query_toy();
    let (gamma, delta) = (1.0, 0.2);
    let ralgo = robustify(&algo, gamma, delta).unwrap();
    assert_eq!(ralgo.params().t, compute_t(Level::Algorithm, gamma, delta, 1, 2).unwrap());
    let f = TruthTable::from_fn(3, 1, |z| u64::from(z == 3 || z == 6)).unwrap();
    let mut freq = Frequency::default();
    for i in 0..150 {
        freq.record(composition_trial(&ralgo, &f, 77, i).unwrap() <= gamma);
    }
    let target = 1.0 - delta;
    assert!(freq.value() >= target - 3.0 * freq.sigma_at(target), "{freq:?}");
}

#[test]
fn modify_only_output() {
    let f = TruthTable::from_fn(3, 1, |z| u64::from(z == 2 || z == 5)).unwrap();
    let layout = RegisterLayout::new([("Z", 3), ("S", 1)]).unwrap();
    let oracle = RobustOracle::new(&layout, &f, 25, "Z", "S").unwrap();
    for seed in 0..20u64 {
        let mut a = StateVector::basis_index(layout.clone(), 2 << 1);
        let mut b = StateVector::basis_index(layout.clone(), 5 << 1);
        let mut ta = FaultTrace::seeded(seed);
        oracle.apply_f(&mut a, &fair(), &mut ta).unwrap();
        oracle.apply_f(&mut b, &fair(), &mut FaultTrace::replay(ta.draws().to_vec())).unwrap();
        for s in 0..2 {
            assert!((a.amplitude(2 << 1 | s) - b.amplitude(5 << 1 | s)).norm() <= 1e-12);
        }
        let outside: f64 = a
            .amplitudes()
            .iter()
            .enumerate()
            .filter(|(i, _)| i >> 1 != 2)
            .map(|(_, x)| x.norm_sqr())
            .sum();
        assert!(outside <= 1e-24);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn g_consumes_two_t_draws(t in 1u64..40, seed in any::<u64>()) {
        let f = TruthTable::single_marked(2, 1).unwrap();
        let layout = RegisterLayout::new([("Z", 2), ("B", 1), ("S", 1)]).unwrap();
        let g = RobustOracle::with_target(&layout, &f, t, "Z", "S", "B").unwrap();
        let mut s = StateVector::basis_index(layout, 0b0100);
        let mut trace = FaultTrace::seeded(seed);
        g.apply_g(&mut s, &fair(), &mut trace).unwrap();
        prop_assert_eq!(trace.invocations() as u64, 2 * t);
        prop_assert!((s.norm() - 1.0).abs() < 1e-12);
    }
}
