//! Single-trial kernels for the robustness checks. Each takes a master
//! seed and a trial index and derives its own stream, so trials can be run
//! in any order or in parallel.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;

use crate::circuit::{Gate, QueryAlgorithm, Target, INPUT, OUTPUT, SCRATCH};
use crate::error::Result;
use crate::layout::RegisterLayout;
use crate::metrics::l2_distance;
use crate::oracle::{apply_standard_oracle, FaultTrace, FaultyOracleConfig, TruthTable};
use crate::rng::{splitmix64, substream, substream_seed};
use crate::robust::{evolve_query, OracleMode, RobustAlgorithm, RobustOracle};
use crate::state::{QubitRef, StateVector};

fn fair() -> FaultyOracleConfig {
    FaultyOracleConfig::new(0.5).expect("1/2 is a valid rate")
}

/// Normalised state whose amplitudes start as independent uniform draws
/// from `[−1/2, 1/2)` (real and, when `complex`, imaginary parts).
pub fn random_state<R: Rng + ?Sized>(layout: RegisterLayout, complex: bool, rng: &mut R) -> StateVector {
    loop {
        let amps: Vec<Complex64> = (0..layout.dimension())
            .map(|_| {
                let re = rng.random::<f64>() - 0.5;
                let im = if complex { rng.random::<f64>() - 0.5 } else { 0.0 };
                Complex64::new(re, im)
            })
            .collect();
        let mut s = StateVector::from_amplitudes(layout.clone(), amps).expect("dimension matches");
        if s.norm() > 1e-6 {
            s.normalize();
            return s;
        }
    }
}

/// `‖(F_f^t − O_f)|z,0⟩‖` for a uniformly random marked `z ∈ {0,1}^n`.
pub fn f_concentration_trial(n: usize, t: u64, master: u64, trial: u64) -> Result<f64> {
    let mut rng = substream(master, trial);
    let z = rng.random_range(0..1u64 << n);
    let f = TruthTable::single_marked(n, z)?;
    let layout = RegisterLayout::new([(INPUT, n), (SCRATCH, 1)])?;
    let start = StateVector::basis_index(layout.clone(), (z as usize) << 1);
    let mut ideal = start.clone();
    apply_standard_oracle(&mut ideal, &f, INPUT, SCRATCH)?;
    let mut state = start;
    let oracle = RobustOracle::new(&layout, &f, t, INPUT, SCRATCH)?;
    oracle.apply_f(&mut state, &fair(), &mut FaultTrace::seeded(rng.random()))?;
    l2_distance(&state, &ideal)
}

/// `‖(F_f^t − O_f)|φ,0⟩‖` for a random real `|φ⟩` on `Z` and a random
/// Boolean `f`.
pub fn f_superposition_trial(n: usize, t: u64, master: u64, trial: u64) -> Result<f64> {
    let mut rng = substream(master, trial);
    let f = TruthTable::random(n, 1, &mut rng)?;
    let phi = random_state(RegisterLayout::new([(INPUT, n)])?, false, &mut rng);
    let zero = StateVector::basis_index(RegisterLayout::new([(SCRATCH, 1)])?, 0);
    let start = phi.tensor(&zero)?;
    let mut ideal = start.clone();
    apply_standard_oracle(&mut ideal, &f, INPUT, SCRATCH)?;
    let mut state = start;
    let oracle = RobustOracle::new(state.layout(), &f, t, INPUT, SCRATCH)?;
    oracle.apply_f(&mut state, &fair(), &mut FaultTrace::seeded(rng.random()))?;
    l2_distance(&state, &ideal)
}

/// `‖(G_f^t − O_f ⊗ I_S)|φ,0⟩‖` for a random Boolean `f` on `n` bits and a
/// random real `|φ⟩` on `Z,B`.
pub fn g_bound_trial(n: usize, t: u64, master: u64, trial: u64) -> Result<f64> {
    let mut rng = substream(master, trial);
    let f = TruthTable::random(n, 1, &mut rng)?;
    let phi = random_state(RegisterLayout::new([(INPUT, n), (OUTPUT, 1)])?, false, &mut rng);
    let zero = StateVector::basis_index(RegisterLayout::new([(SCRATCH, 1)])?, 0);
    let start = phi.tensor(&zero)?;
    let mut ideal = start.clone();
    apply_standard_oracle(&mut ideal, &f, INPUT, OUTPUT)?;
    let mut state = start;
    let oracle = RobustOracle::with_target(state.layout(), &f, t, INPUT, SCRATCH, OUTPUT)?;
    oracle.apply_g(&mut state, &fair(), &mut FaultTrace::seeded(rng.random()))?;
    l2_distance(&state, &ideal)
}

/// Runs `F_f^t` with two output bits computing the same function on
/// `|z,00⟩` and returns the largest difference between the two scratch
/// qubits: asymmetry of the amplitudes and distance between the reduced
/// single-qubit states.
pub fn multibit_correlation_trial(n: usize, t: u64, master: u64, trial: u64) -> Result<f64> {
    let mut rng = substream(master, trial);
    let base = TruthTable::random(n, 1, &mut rng)?;
    let f = TruthTable::from_fn(n, 2, |z| base.eval(z) * 0b11)?;
    let z = if base.entries().contains(&1) {
        let marked: Vec<u64> = (0..1u64 << n).filter(|&z| base.eval(z) == 1).collect();
        marked[rng.random_range(0..marked.len())]
    } else {
        0
    };
    let layout = RegisterLayout::new([(INPUT, n), (SCRATCH, 2)])?;
    let mut state = StateVector::basis_index(layout.clone(), (z as usize) << 2);
    let oracle = RobustOracle::new(&layout, &f, t, INPUT, SCRATCH)?;
    oracle.apply_f(&mut state, &fair(), &mut FaultTrace::seeded(rng.random()))?;
    let at = |s: usize| state.amplitude(((z as usize) << 2) | s);
    let a = [at(0b00), at(0b01), at(0b10), at(0b11)];
    let mut worst = (a[0b01] - a[0b10]).norm();
    // ρ_first[i][j] = Σ_s a[i s] a*[j s]; ρ_second[i][j] = Σ_s a[s i] a*[s j]
    for i in 0..2 {
        for j in 0..2 {
            let first: Complex64 = (0..2).map(|s| a[i << 1 | s] * a[j << 1 | s].conj()).sum();
            let second: Complex64 = (0..2).map(|s| a[s << 1 | i] * a[s << 1 | j].conj()).sum();
            worst = worst.max((first - second).norm());
        }
    }
    Ok(worst)
}

/// For one random truth table, the largest deviation from the identity of
/// `F_f^t` (random `S` states) and `G_f^t` (random `B` states, `S = |0⟩`)
/// over every input with `f(z) = 0`, `states` states per input.
pub fn zero_input_identity_trial(n: usize, m: usize, t: u64, states: usize, master: u64, trial: u64) -> Result<f64> {
    let mut rng = substream(master, trial);
    let f = TruthTable::random(n, m, &mut rng)?;
    let fl = RegisterLayout::new([(INPUT, n), (SCRATCH, m)])?;
    let gl = RegisterLayout::new([(INPUT, n), (OUTPUT, m), (SCRATCH, m)])?;
    let fo = RobustOracle::new(&fl, &f, t, INPUT, SCRATCH)?;
    let go = RobustOracle::with_target(&gl, &f, t, INPUT, SCRATCH, OUTPUT)?;
    let s_layout = RegisterLayout::new([(SCRATCH, m)])?;
    let b_layout = RegisterLayout::new([(OUTPUT, m)])?;
    let zero_s = StateVector::basis_index(s_layout.clone(), 0);
    let mut worst = 0.0f64;
    for z in (0..1u64 << n).filter(|&z| f.eval(z) == 0) {
        let zl = RegisterLayout::new([(INPUT, n)])?;
        let zs = StateVector::basis_index(zl, z as usize);
        for _ in 0..states {
            let before = zs.tensor(&random_state(s_layout.clone(), true, &mut rng))?;
            let mut after = before.clone();
            fo.apply_f(&mut after, &fair(), &mut FaultTrace::seeded(rng.random()))?;
            worst = worst.max(l2_distance(&after, &before)?);

            let before = zs
                .tensor(&random_state(b_layout.clone(), true, &mut rng))?
                .tensor(&zero_s)?;
            let mut after = before.clone();
            go.apply_g(&mut after, &fair(), &mut FaultTrace::seeded(rng.random()))?;
            worst = worst.max(l2_distance(&after, &before)?);
        }
    }
    Ok(worst)
}

/// `‖(V ⊗ I_S)|φ,0⟩ − V'|φ,0⟩‖` for a random real `|φ⟩` on `Z,B,T`.
pub fn composition_trial(ralgo: &RobustAlgorithm, f: &TruthTable, master: u64, trial: u64) -> Result<f64> {
    let mut rng = substream(master, trial);
    let base = ralgo.base();
    let phi = random_state(base.layout().clone(), false, &mut rng);
    let zero = StateVector::basis_index(RegisterLayout::new([(SCRATCH, base.output_width())])?, 0);
    let mut ideal = phi.clone();
    evolve_query(base, f, &mut ideal, OracleMode::Exact, &mut FaultTrace::replay(Vec::new()))?;
    let ideal = ideal.tensor(&zero)?;
    let mut state = phi.tensor(&zero)?;
    ralgo.evolve(f, &mut state, &fair(), &mut FaultTrace::seeded(rng.random()))?;
    l2_distance(&state, &ideal)
}

/// One-query algorithm on `Z = 2`, `B = 1`, `T = 1` used for the
/// trace-distance estimate: `U_0` spreads `Z`, puts `B` in `|−⟩` and
/// tilts `T`; `U_1` diffuses `Z` and entangles `T` with `Z`.
pub fn trace_distance_toy_algorithm() -> Result<QueryAlgorithm> {
    let u0 = alloc::vec![
        Gate::H(Target::Register(INPUT.into())),
        Gate::X(Target::Register(OUTPUT.into())),
        Gate::H(Target::Register(OUTPUT.into())),
        Gate::Rot {
            theta: 0.4,
            target: Target::Register("T".into()),
        },
    ];
    let u1 = alloc::vec![
        Gate::Diffusion(INPUT.into()),
        Gate::Cnot {
            control: QubitRef::new(INPUT, 1),
            target: QubitRef::new("T", 0),
        },
    ];
    QueryAlgorithm::new(2, 1, 1, alloc::vec![u0, u1], INPUT)
}

/// Final state of one robust trajectory from `|0…0⟩`.
pub fn robust_trajectory(ralgo: &RobustAlgorithm, f: &TruthTable, master: u64, trial: u64) -> Result<StateVector> {
    let seed = substream_seed(master, trial);
    let mut state = StateVector::basis_index(ralgo.layout().clone(), 0);
    ralgo.evolve(f, &mut state, &fair(), &mut FaultTrace::seeded(splitmix64(seed)))?;
    Ok(state)
}
