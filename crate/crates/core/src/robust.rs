//! The robust oracle circuits `F_f^t` and `G_f^t`, the choice of `t`, and
//! the rewrite of a whole query algorithm into its robust form.
//!
//! `F_f^t` rotates every scratch qubit by `R_{−π/4}`, then runs `t` rounds
//! of (faulty oracle into the scratch register, `R_{π/(2t)}` on every
//! scratch qubit), then rotates by `R_{−π/4}` again. `G_f^t` computes
//! `F`, copies the scratch register into the target with CNOTs, and
//! uncomputes with `X · F · X` on the scratch register. Each `G` consumes
//! `2t` independent faulty-oracle draws.

use alloc::format;
use alloc::vec::Vec;

use core::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
#[allow(unused_imports)]
use num_traits::Float;

use crate::bits::BitString;
use crate::circuit::{apply_all, Gate, QueryAlgorithm, INPUT, OUTPUT, SCRATCH};
use crate::error::{out_of_range, Error, Result};
use crate::layout::RegisterLayout;
use crate::measure::measure_register;
use crate::oracle::{FaultTrace, FaultyOracleConfig, OraclePlan, TruthTable};
use crate::rng::{from_seed, splitmix64};
use crate::state::{apply_cnot_at, apply_real_at, apply_x_at, StateVector};

/// Which guarantee `t` is chosen for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    /// `F` on `|z,+⟩`: `t ≥ (3/2)π² ln(2/δ) / γ²`.
    F,
    /// `G` for Boolean `f`: `t ≥ 6π² ln(4/δ) / γ²`.
    G,
    /// `G` for `m` output bits: `t ≥ 6π² m² ln(4/δ) / γ²`.
    Multi,
    /// Every oracle call of a `q`-query algorithm:
    /// `t ≥ 6π² q² m² ln(4q/δ) / γ²`.
    Algorithm,
}

fn check_budget(gamma: f64, delta: f64) -> Result<()> {
    if !(gamma > 0.0 && gamma < FRAC_PI_2) {
        return Err(out_of_range("gamma", format!("{gamma} is not in (0, π/2)")));
    }
    if !(delta > 0.0 && delta <= 0.2) {
        return Err(out_of_range("delta", format!("{delta} is not in (0, 1/5]")));
    }
    Ok(())
}

/// Smallest integer `t` meeting the level's lower bound.
pub fn compute_t(level: Level, gamma: f64, delta: f64, m: usize, q: usize) -> Result<u64> {
    check_budget(gamma, delta)?;
    let pi2 = PI * PI;
    let g2 = gamma * gamma;
    let bound = match level {
        Level::F => 1.5 * pi2 * (2.0 / delta).ln() / g2,
        Level::G => 6.0 * pi2 * (4.0 / delta).ln() / g2,
        Level::Multi => {
            if m == 0 {
                return Err(out_of_range("m", "must be at least 1"));
            }
            let m = m as f64;
            6.0 * pi2 * m * m * (4.0 / delta).ln() / g2
        }
        Level::Algorithm => {
            if m == 0 {
                return Err(out_of_range("m", "must be at least 1"));
            }
            if q == 0 {
                return Err(out_of_range("q", "must be at least 1"));
            }
            let (m, q) = (m as f64, q as f64);
            6.0 * pi2 * q * q * m * m * (4.0 * q / delta).ln() / g2
        }
    };
    Ok((bound.ceil() as u64).max(1))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobustParams {
    pub gamma: f64,
    pub delta: f64,
    pub m: usize,
    pub q: usize,
    pub t: u64,
}

impl RobustParams {
    /// Parameters for a `q`-query algorithm with `m` output bits.
    pub fn for_algorithm(gamma: f64, delta: f64, m: usize, q: usize) -> Result<Self> {
        let t = compute_t(Level::Algorithm, gamma, delta, m, q)?;
        Ok(Self { gamma, delta, m, q, t })
    }
}

fn rotation(theta: f64) -> [f64; 4] {
    let (s, c) = theta.sin_cos();
    [c, s, -s, c]
}

/// `F_f^t` and `G_f^t` compiled for one layout.
#[derive(Debug, Clone)]
pub struct RobustOracle {
    plan: OraclePlan,
    t: u64,
    scratch_bits: Vec<usize>,
    target_bits: Vec<usize>,
    quarter: [f64; 4],
    step: [f64; 4],
}

impl RobustOracle {
    /// `F_f^t` writing into `scratch`.
    pub fn new(layout: &RegisterLayout, f: &TruthTable, t: u64, input: &str, scratch: &str) -> Result<Self> {
        if t == 0 {
            return Err(out_of_range("t", "must be at least 1"));
        }
        let plan = OraclePlan::new(layout, f, input, scratch)?;
        let sreg = layout.register(scratch)?;
        Ok(Self {
            plan,
            t,
            scratch_bits: (0..sreg.width()).map(|q| sreg.bit(q)).collect(),
            target_bits: Vec::new(),
            quarter: rotation(-FRAC_PI_4),
            step: rotation(PI / (2.0 * t as f64)),
        })
    }

    /// `G_f^t` with scratch register `scratch` and oracle target `target`.
    pub fn with_target(
        layout: &RegisterLayout,
        f: &TruthTable,
        t: u64,
        input: &str,
        scratch: &str,
        target: &str,
    ) -> Result<Self> {
        let mut oracle = Self::new(layout, f, t, input, scratch)?;
        let breg = layout.register(target)?;
        if breg.width() != oracle.scratch_bits.len() {
            return Err(Error::WidthMismatch {
                register: target.into(),
                expected: oracle.scratch_bits.len(),
                actual: breg.width(),
            });
        }
        oracle.target_bits = (0..breg.width()).map(|q| breg.bit(q)).collect();
        Ok(oracle)
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    fn rotate_scratch(&self, state: &mut StateVector, m: [f64; 4]) {
        let amps = state.amplitudes_mut();
        for &b in &self.scratch_bits {
            apply_real_at(amps, b, m);
        }
    }

    /// The `t` rounds of (faulty oracle, `R_{π/(2t)}`) without the outer
    /// `R_{−π/4}` pair.
    pub fn apply_inner(&self, state: &mut StateVector, config: &FaultyOracleConfig, trace: &mut FaultTrace) -> Result<()> {
        for _ in 0..self.t {
            self.plan.apply_faulty(state, config, trace)?;
            self.rotate_scratch(state, self.step);
        }
        Ok(())
    }

    pub fn apply_f(&self, state: &mut StateVector, config: &FaultyOracleConfig, trace: &mut FaultTrace) -> Result<()> {
        self.rotate_scratch(state, self.quarter);
        self.apply_inner(state, config, trace)?;
        self.rotate_scratch(state, self.quarter);
        Ok(())
    }

    /// Expects the scratch register in `|0^m⟩`.
    pub fn apply_g(&self, state: &mut StateVector, config: &FaultyOracleConfig, trace: &mut FaultTrace) -> Result<()> {
        if self.target_bits.is_empty() {
            return Err(Error::Algorithm("G needs an oracle target register".into()));
        }
        self.apply_f(state, config, trace)?;
        for (&s, &b) in self.scratch_bits.iter().zip(&self.target_bits) {
            apply_cnot_at(state.amplitudes_mut(), s, b);
        }
        self.flip_scratch(state);
        self.apply_f(state, config, trace)?;
        self.flip_scratch(state);
        Ok(())
    }

    /// Probability weight outside `|0^m⟩` on the scratch register.
    pub fn scratch_weight(&self, state: &StateVector) -> f64 {
        let mask: usize = self.scratch_bits.iter().map(|b| 1usize << b).sum();
        state
            .amplitudes()
            .iter()
            .enumerate()
            .filter(|(i, _)| i & mask != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    /// [`Self::apply_g`] that first rejects states whose scratch register
    /// carries more than `tol` weight outside `|0^m⟩`.
    pub fn apply_g_checked(
        &self,
        state: &mut StateVector,
        config: &FaultyOracleConfig,
        trace: &mut FaultTrace,
        tol: f64,
    ) -> Result<()> {
        let weight = self.scratch_weight(state);
        if weight > tol {
            return Err(Error::Algorithm(format!("scratch register not in |0^m⟩ (weight {weight:e})")));
        }
        self.apply_g(state, config, trace)
    }

    fn flip_scratch(&self, state: &mut StateVector) {
        for &s in &self.scratch_bits {
            apply_x_at(state.amplitudes_mut(), s);
        }
    }
}

/// `F_f^t` on registers `input` and `scratch`.
pub fn apply_f(
    state: &mut StateVector,
    f: &TruthTable,
    t: u64,
    input: &str,
    scratch: &str,
    config: &FaultyOracleConfig,
    trace: &mut FaultTrace,
) -> Result<()> {
    RobustOracle::new(state.layout(), f, t, input, scratch)?.apply_f(state, config, trace)
}

/// `G_f^t` on registers `input`, `scratch` and `target`.
#[allow(clippy::too_many_arguments)]
pub fn apply_g(
    state: &mut StateVector,
    f: &TruthTable,
    t: u64,
    input: &str,
    scratch: &str,
    target: &str,
    config: &FaultyOracleConfig,
    trace: &mut FaultTrace,
) -> Result<()> {
    RobustOracle::with_target(state.layout(), f, t, input, scratch, target)?.apply_g(state, config, trace)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Block {
    Unitary(Vec<Gate>),
    /// A `G_f^t` block standing in for one oracle call.
    Robust,
}

/// A query algorithm whose oracle calls are replaced by `G_f^t` blocks,
/// on the layout extended with the scratch register `S` (placed after `T`).
#[derive(Debug, Clone, PartialEq)]
pub struct RobustAlgorithm {
    base: QueryAlgorithm,
    params: RobustParams,
    layout: RegisterLayout,
    blocks: Vec<Block>,
}

impl RobustAlgorithm {
    pub fn base(&self) -> &QueryAlgorithm {
        &self.base
    }

    pub fn params(&self) -> &RobustParams {
        &self.params
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn robust_blocks(&self) -> usize {
        self.blocks.iter().filter(|b| matches!(b, Block::Robust)).count()
    }

    /// Faulty-oracle invocations consumed by one run.
    pub fn oracle_invocations(&self) -> u64 {
        self.robust_blocks() as u64 * 2 * self.params.t
    }

    /// Runs the block sequence on `state` (over [`Self::layout`]).
    pub fn evolve(
        &self,
        f: &TruthTable,
        state: &mut StateVector,
        config: &FaultyOracleConfig,
        trace: &mut FaultTrace,
    ) -> Result<()> {
        self.base.check_function(f)?;
        if state.layout() != &self.layout {
            return Err(Error::LayoutMismatch);
        }
        let oracle = if self.robust_blocks() > 0 {
            Some(RobustOracle::with_target(&self.layout, f, self.params.t, INPUT, SCRATCH, OUTPUT)?)
        } else {
            None
        };
        for block in &self.blocks {
            match block {
                Block::Unitary(gates) => apply_all(gates, state)?,
                Block::Robust => oracle
                    .as_ref()
                    .expect("robust block without oracle")
                    .apply_g(state, config, trace)?,
            }
        }
        Ok(())
    }
}

/// Replaces every oracle call of `algo` by `G_f^t` with `t` chosen for the
/// whole-algorithm budget `(γ, δ)`.
pub fn robustify(algo: &QueryAlgorithm, gamma: f64, delta: f64) -> Result<RobustAlgorithm> {
    let q = algo.queries();
    let m = algo.output_width();
    if q == 0 {
        check_budget(gamma, delta)?;
        return robustify_with(algo, RobustParams { gamma, delta, m, q, t: 0 });
    }
    robustify_with(algo, RobustParams::for_algorithm(gamma, delta, m, q)?)
}

/// As [`robustify`] with explicit parameters.
pub fn robustify_with(algo: &QueryAlgorithm, params: RobustParams) -> Result<RobustAlgorithm> {
    let q = algo.queries();
    if q == 0 {
        return Ok(RobustAlgorithm {
            base: algo.clone(),
            params,
            layout: algo.layout().clone(),
            blocks: alloc::vec![Block::Unitary(algo.segments()[0].clone())],
        });
    }
    if params.t == 0 {
        return Err(out_of_range("t", "must be at least 1"));
    }
    if params.m != algo.output_width() {
        return Err(out_of_range("m", format!("{} does not match B width {}", params.m, algo.output_width())));
    }
    let layout = algo.layout().extended(SCRATCH, algo.output_width())?;
    let mut blocks = Vec::with_capacity(2 * q + 1);
    for (i, seg) in algo.segments().iter().enumerate() {
        if i > 0 {
            blocks.push(Block::Robust);
        }
        blocks.push(Block::Unitary(seg.clone()));
    }
    Ok(RobustAlgorithm {
        base: algo.clone(),
        params,
        layout,
        blocks,
    })
}

/// How the oracle calls of a plain query algorithm are served.
#[derive(Debug, Clone, Copy)]
pub enum OracleMode {
    Exact,
    Faulty(FaultyOracleConfig),
}

/// Runs `V` on `state` (over the algorithm's own layout).
pub fn evolve_query(
    algo: &QueryAlgorithm,
    f: &TruthTable,
    state: &mut StateVector,
    mode: OracleMode,
    trace: &mut FaultTrace,
) -> Result<()> {
    algo.check_function(f)?;
    if state.layout() != algo.layout() {
        return Err(Error::LayoutMismatch);
    }
    let plan = OraclePlan::new(algo.layout(), f, INPUT, OUTPUT)?;
    for (i, seg) in algo.segments().iter().enumerate() {
        if i > 0 {
            match &mode {
                OracleMode::Exact => plan.apply(state)?,
                OracleMode::Faulty(config) => {
                    plan.apply_faulty(state, config, trace)?;
                }
            }
        }
        apply_all(seg, state)?;
    }
    Ok(())
}

/// What to execute in [`run`].
#[derive(Debug, Clone, Copy)]
pub enum Program<'a> {
    FaultFree(&'a QueryAlgorithm),
    /// Plain algorithm calling the raw faulty oracle.
    Faulty(&'a QueryAlgorithm),
    Robust(&'a RobustAlgorithm),
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub state: StateVector,
    pub trace: FaultTrace,
    pub outcome: BitString,
}

/// Executes `program` from the basis state given by `inputs` and measures
/// the algorithm's designated register. Fault draws and the measurement use
/// separate streams derived from `seed`.
pub fn run(
    program: Program<'_>,
    f: &TruthTable,
    inputs: &[(&str, BitString)],
    config: &FaultyOracleConfig,
    seed: u64,
) -> Result<RunOutcome> {
    let mut trace = FaultTrace::seeded(splitmix64(seed));
    let mut measure_rng = from_seed(splitmix64(seed ^ 0x6d65_6173_7572_6521));
    let (state, measured) = match program {
        Program::FaultFree(algo) | Program::Faulty(algo) => {
            let mut state = StateVector::new_basis_state(algo.layout().clone(), inputs)?;
            let mode = match program {
                Program::FaultFree(_) => OracleMode::Exact,
                _ => OracleMode::Faulty(*config),
            };
            evolve_query(algo, f, &mut state, mode, &mut trace)?;
            (state, algo.measured_register())
        }
        Program::Robust(ralgo) => {
            let mut state = StateVector::new_basis_state(ralgo.layout().clone(), inputs)?;
            ralgo.evolve(f, &mut state, config, &mut trace)?;
            (state, ralgo.base().measured_register())
        }
    };
    let (outcome, _) = measure_register(&state, measured, &mut measure_rng)?;
    Ok(RunOutcome { state, trace, outcome })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Target;
    use crate::metrics::l2_distance;
    use crate::oracle::apply_standard_oracle;
    use num_complex::Complex64;
    use rand::Rng;

    fn max_diff(a: &StateVector, b: &StateVector) -> f64 {
        a.amplitudes()
            .iter()
            .zip(b.amplitudes())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    fn zs(n: usize, m: usize) -> RegisterLayout {
        RegisterLayout::new([("Z", n), ("S", m)]).unwrap()
    }

    fn half() -> FaultyOracleConfig {
        FaultyOracleConfig::new(0.5).unwrap()
    }

    #[test]
    fn t_formula_examples() {
        assert_eq!(compute_t(Level::F, 0.3, 0.1, 1, 1).unwrap(), 493);
        assert_eq!(compute_t(Level::G, 0.5, 0.2, 1, 1).unwrap(), 710);
        // 6π²·9·ln 120 / 0.01 = 255153.51 (40-digit evaluation)
        assert_eq!(compute_t(Level::Algorithm, 0.1, 0.1, 1, 3).unwrap(), 255_154);
        assert_eq!(compute_t(Level::Multi, 0.5, 0.2, 1, 1).unwrap(), 710);
        assert!(compute_t(Level::F, 2.0, 0.1, 1, 1).is_err());
        assert!(compute_t(Level::F, 0.3, 0.5, 1, 1).is_err());
        assert!(compute_t(Level::F, 0.0, 0.1, 1, 1).is_err());
    }

    #[test]
    fn f_is_identity_on_unmarked_inputs() {
        let f = TruthTable::single_marked(2, 3).unwrap();
        let mut rng = from_seed(3);
        for _ in 0..20 {
            let (a, b) = (rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
            let n = (a * a + b * b).sqrt();
            let mut amps = alloc::vec![Complex64::new(0.0, 0.0); 8];
            amps[2] = Complex64::new(a / n, 0.1);
            amps[3] = Complex64::new(b / n, -0.2);
            let mut s = StateVector::from_amplitudes(zs(2, 1), amps).unwrap();
            s.normalize();
            let before = s.clone();
            let mut trace = FaultTrace::seeded(rng.random());
            apply_f(&mut s, &f, 7, "Z", "S", &half(), &mut trace).unwrap();
            assert!(max_diff(&s, &before) <= 1e-12);
            assert_eq!(trace.invocations(), 7);
        }
    }

    #[test]
    fn f_two_rounds_by_hand() {
        let f = TruthTable::single_marked(1, 1).unwrap();
        // apply, apply: |1,0⟩ → |1,1⟩
        let mut s = StateVector::basis_index(zs(1, 1), 0b10);
        apply_f(&mut s, &f, 2, "Z", "S", &half(), &mut FaultTrace::replay(alloc::vec![true, true])).unwrap();
        assert!(max_diff(&s, &StateVector::basis_index(zs(1, 1), 0b11)) <= 1e-12);

        // skip, skip: |1,0⟩ → |1,0⟩, at distance √2 from O_f|1,0⟩
        let mut s = StateVector::basis_index(zs(1, 1), 0b10);
        apply_f(&mut s, &f, 2, "Z", "S", &half(), &mut FaultTrace::replay(alloc::vec![false, false])).unwrap();
        assert!(max_diff(&s, &StateVector::basis_index(zs(1, 1), 0b10)) <= 1e-12);
        let ideal = StateVector::basis_index(zs(1, 1), 0b11);
        assert!((l2_distance(&s, &ideal).unwrap() - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn f_errors_when_replay_runs_out() {
        let f = TruthTable::single_marked(1, 1).unwrap();
        let mut s = StateVector::basis_index(zs(1, 1), 0b10);
        let err = apply_f(&mut s, &f, 3, "Z", "S", &half(), &mut FaultTrace::replay(alloc::vec![true])).unwrap_err();
        assert_eq!(err, Error::TraceExhausted(1));
    }

    fn zbs(n: usize) -> RegisterLayout {
        RegisterLayout::new([("Z", n), ("B", 1), ("S", 1)]).unwrap()
    }

    #[test]
    fn g_examples() {
        let f = TruthTable::single_marked(2, 1).unwrap();
        for b in 0..2usize {
            // f(z)=0 leaves |z,b⟩|0⟩ alone.
            let idx = (2 << 2) | (b << 1);
            let mut s = StateVector::basis_index(zbs(2), idx);
            let mut trace = FaultTrace::seeded(b as u64);
            apply_g(&mut s, &f, 5, "Z", "S", "B", &half(), &mut trace).unwrap();
            assert!(max_diff(&s, &StateVector::basis_index(zbs(2), idx)) <= 1e-12);
            assert_eq!(trace.invocations(), 10);

            // f(z)=1 with every draw applied flips b.
            let idx = (1 << 2) | (b << 1);
            let mut s = StateVector::basis_index(zbs(2), idx);
            let mut trace = FaultTrace::replay(alloc::vec![true; 4]);
            apply_g(&mut s, &f, 2, "Z", "S", "B", &half(), &mut trace).unwrap();
            let expected = (1 << 2) | ((b ^ 1) << 1);
            assert!(max_diff(&s, &StateVector::basis_index(zbs(2), expected)) <= 1e-12);
        }
    }

    #[test]
    fn checked_g_rejects_dirty_scratch() {
        let f = TruthTable::single_marked(1, 1).unwrap();
        let layout = zbs(1);
        let g = RobustOracle::with_target(&layout, &f, 3, "Z", "S", "B").unwrap();
        let mut dirty = StateVector::basis_index(layout.clone(), 0b101);
        assert!(g.apply_g_checked(&mut dirty, &half(), &mut FaultTrace::seeded(1), 1e-12).is_err());
        let mut clean = StateVector::basis_index(layout, 0b100);
        g.apply_g_checked(&mut clean, &half(), &mut FaultTrace::seeded(1), 1e-12).unwrap();
    }

    #[test]
    fn second_f_uses_fresh_draws() {
        let f = TruthTable::single_marked(1, 1).unwrap();
        let mut s = StateVector::basis_index(zbs(1), 0b100);
        let mut trace = FaultTrace::seeded(42);
        apply_g(&mut s, &f, 64, "Z", "S", "B", &half(), &mut trace).unwrap();
        assert_eq!(trace.invocations(), 128);
        assert_ne!(trace.draws()[..64], trace.draws()[64..]);
    }

    fn grover_like(q: usize) -> QueryAlgorithm {
        let mut segs = alloc::vec![alloc::vec![Gate::H(Target::Register("Z".into()))]];
        for _ in 0..q {
            segs.push(alloc::vec![Gate::Diffusion("Z".into())]);
        }
        QueryAlgorithm::new(2, 1, 1, segs, "Z").unwrap()
    }

    #[test]
    fn robustify_structure() {
        let a0 = grover_like(0);
        let r0 = robustify(&a0, 0.1, 0.1).unwrap();
        assert_eq!(r0.layout(), a0.layout());
        assert_eq!(r0.blocks(), &[Block::Unitary(a0.segments()[0].clone())]);

        let a2 = grover_like(2);
        let r2 = robustify(&a2, 0.1, 0.1).unwrap();
        assert_eq!(r2.robust_blocks(), 2);
        assert_eq!(r2.params().t, compute_t(Level::Algorithm, 0.1, 0.1, 1, 2).unwrap());
        assert_eq!(r2.oracle_invocations(), 4 * r2.params().t);
        assert_eq!(r2.layout().bit_position("S", 0).unwrap(), 0);

        let f = TruthTable::single_marked(2, 1).unwrap();
        let mut s = StateVector::basis_index(r2.layout().clone(), 0);
        let small = robustify_with(&a2, RobustParams { t: 3, ..*r2.params() }).unwrap();
        let mut trace = FaultTrace::seeded(1);
        small.evolve(&f, &mut s, &half(), &mut trace).unwrap();
        assert_eq!(trace.invocations(), 12);
    }

    #[test]
    fn all_apply_trace_matches_fault_free_for_identity_algorithm() {
        // One-query algorithm with U_0 = U_1 = I; input |z=1,b=0,T=0⟩.
        let algo = QueryAlgorithm::new(2, 1, 1, alloc::vec![alloc::vec![], alloc::vec![]], "B").unwrap();
        let f = TruthTable::single_marked(2, 1).unwrap();
        let ralgo = robustify_with(&algo, RobustParams { gamma: 0.1, delta: 0.1, m: 1, q: 1, t: 2 }).unwrap();
        let mut robust = StateVector::basis_index(ralgo.layout().clone(), 0b0100 << 1 >> 1);
        let z1 = ralgo.layout().register("Z").unwrap().place(1);
        robust = StateVector::basis_index(robust.layout().clone(), z1);
        ralgo
            .evolve(&f, &mut robust, &half(), &mut FaultTrace::replay(alloc::vec![true; 4]))
            .unwrap();
        let zb = algo.layout().register("Z").unwrap().place(1);
        let mut plain = StateVector::basis_index(algo.layout().clone(), zb);
        evolve_query(&algo, &f, &mut plain, OracleMode::Exact, &mut FaultTrace::replay(alloc::vec![])).unwrap();
        let lifted = plain.tensor(&StateVector::basis_index(RegisterLayout::new([("S", 1)]).unwrap(), 0)).unwrap();
        assert!(l2_distance(&robust, &lifted).unwrap() <= 1e-9);
    }

    #[test]
    fn run_is_deterministic() {
        let algo = grover_like(1);
        let f = TruthTable::single_marked(2, 2).unwrap();
        let ralgo = robustify_with(&algo, RobustParams { gamma: 0.1, delta: 0.1, m: 1, q: 1, t: 50 }).unwrap();
        let inputs = [];
        let a = run(Program::Robust(&ralgo), &f, &inputs, &half(), 9).unwrap();
        let b = run(Program::Robust(&ralgo), &f, &inputs, &half(), 9).unwrap();
        assert_eq!(a.outcome, b.outcome);
        assert_eq!(a.trace.draws(), b.trace.draws());
        assert_eq!(a.state, b.state);
    }

    #[test]
    fn exact_mode_matches_standard_oracle() {
        let algo = QueryAlgorithm::new(2, 1, 0, alloc::vec![alloc::vec![], alloc::vec![]], "B").unwrap();
        let f = TruthTable::single_marked(2, 3).unwrap();
        let mut s = StateVector::basis_index(algo.layout().clone(), 0b110);
        let mut expected = s.clone();
        apply_standard_oracle(&mut expected, &f, "Z", "B").unwrap();
        evolve_query(&algo, &f, &mut s, OracleMode::Exact, &mut FaultTrace::replay(alloc::vec![])).unwrap();
        assert_eq!(s, expected);
    }
}
