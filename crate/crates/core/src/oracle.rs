//! Oracle models: the fault-free bit oracle, the faulty oracle as a seeded
//! random process, the addition and phase oracles, and the classical
//! one-sided noisy bit query.

use alloc::boxed::Box;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;

use crate::error::{out_of_range, Error, Result};
use crate::layout::RegisterLayout;
use crate::rng::{from_seed, TrialRng};
use crate::state::StateVector;

/// An explicit function `f: {0,1}^n → {0,1}^m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruthTable {
    n: usize,
    m: usize,
    table: Vec<u64>,
}

impl TruthTable {
    pub fn new(n: usize, m: usize, table: Vec<u64>) -> Result<Self> {
        if n > 24 || m > 63 {
            return Err(Error::TruthTable(format!("widths n={n}, m={m} are too large")));
        }
        if table.len() != 1usize << n {
            return Err(Error::TruthTable(format!(
                "expected {} entries, got {}",
                1usize << n,
                table.len()
            )));
        }
        if let Some((z, v)) = table.iter().enumerate().find(|(_, v)| **v >> m != 0) {
            return Err(Error::TruthTable(format!("entry {z} = {v} exceeds {m} output bits")));
        }
        Ok(Self { n, m, table })
    }

    pub fn from_fn(n: usize, m: usize, f: impl Fn(u64) -> u64) -> Result<Self> {
        Self::new(n, m, (0..1u64 << n).map(f).collect())
    }

    /// Boolean function marking exactly `k`.
    pub fn single_marked(n: usize, k: u64) -> Result<Self> {
        if k >> n != 0 {
            return Err(out_of_range("k", format!("{k} is not an {n}-bit index")));
        }
        Self::from_fn(n, 1, |z| u64::from(z == k))
    }

    pub fn random<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Result<Self> {
        let mask = (1u64 << m) - 1;
        Self::new(n, m, (0..1usize << n).map(|_| rng.random::<u64>() & mask).collect())
    }

    pub fn input_width(&self) -> usize {
        self.n
    }

    pub fn output_width(&self) -> usize {
        self.m
    }

    pub fn entries(&self) -> &[u64] {
        &self.table
    }

    pub fn eval(&self, z: u64) -> u64 {
        self.table[z as usize]
    }

    /// The `i`-th output bit, most significant first.
    pub fn component(&self, i: usize) -> TruthTable {
        let shift = self.m - 1 - i;
        TruthTable {
            n: self.n,
            m: 1,
            table: self.table.iter().map(|v| (v >> shift) & 1).collect(),
        }
    }
}

/// Precomputed permutation `|z, b, rest⟩ → |z, b ⊕ f(z), rest⟩` on one
/// layout, stored as disjoint swap pairs.
#[derive(Debug, Clone)]
pub struct OraclePlan {
    dim: usize,
    pairs: Vec<(usize, usize)>,
}

impl OraclePlan {
    pub fn new(layout: &RegisterLayout, f: &TruthTable, input: &str, output: &str) -> Result<Self> {
        let zreg = layout.register(input)?;
        let breg = layout.register(output)?;
        if zreg.width() != f.input_width() {
            return Err(Error::WidthMismatch {
                register: input.into(),
                expected: zreg.width(),
                actual: f.input_width(),
            });
        }
        if breg.width() != f.output_width() {
            return Err(Error::WidthMismatch {
                register: output.into(),
                expected: breg.width(),
                actual: f.output_width(),
            });
        }
        if input == output {
            return Err(Error::OverlappingTargets);
        }
        let mut pairs = Vec::new();
        for i in 0..layout.dimension() {
            let fz = f.eval(zreg.extract(i) as u64) as usize;
            let j = i ^ breg.place(fz);
            if j > i {
                pairs.push((i, j));
            }
        }
        Ok(Self {
            dim: layout.dimension(),
            pairs,
        })
    }

    #[inline]
    pub fn apply(&self, state: &mut StateVector) -> Result<()> {
        if state.amplitudes().len() != self.dim {
            return Err(Error::LayoutMismatch);
        }
        let amps = state.amplitudes_mut();
        for &(i, j) in &self.pairs {
            amps.swap(i, j);
        }
        Ok(())
    }

    /// One faulty invocation; returns whether the oracle was applied.
    #[inline]
    pub fn apply_faulty(
        &self,
        state: &mut StateVector,
        config: &FaultyOracleConfig,
        trace: &mut FaultTrace,
    ) -> Result<bool> {
        let applied = sample_fault(config, trace)?;
        if applied {
            self.apply(state)?;
        }
        Ok(applied)
    }
}

/// `O_f`: `|z⟩|b⟩ → |z⟩|b ⊕ f(z)⟩` on registers `input` and `output`.
pub fn apply_standard_oracle(state: &mut StateVector, f: &TruthTable, input: &str, output: &str) -> Result<()> {
    OraclePlan::new(state.layout(), f, input, output)?.apply(state)
}

/// Skip probability `1 − 1/(2(1−p))` that lifts an error rate `p ≤ 1/2`
/// to exactly one half.
pub fn reduce_error_rate(p: f64) -> Result<f64> {
    if !(0.0..=0.5).contains(&p) {
        return Err(out_of_range("p", format!("{p} is not in [0, 1/2]")));
    }
    Ok(1.0 - 1.0 / (2.0 * (1.0 - p)))
}

/// Error rate of the faulty oracle, optionally lifted to 1/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaultyOracleConfig {
    p: f64,
    skip: f64,
}

impl FaultyOracleConfig {
    /// Configuration used by the robust circuits: rates `p ≤ 1/2` are lifted
    /// to exactly 1/2 by skipping the oracle with probability
    /// [`reduce_error_rate`]; rates above 1/2 are used as they are.
    pub fn new(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(out_of_range("p", format!("{p} is not in [0, 1]")));
        }
        let skip = if p <= 0.5 { reduce_error_rate(p)? } else { 0.0 };
        Ok(Self { p, skip })
    }

    /// The raw faulty oracle without the reduction.
    pub fn unreduced(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(out_of_range("p", format!("{p} is not in [0, 1]")));
        }
        Ok(Self { p, skip: 0.0 })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn skip_probability(&self) -> f64 {
        self.skip
    }

    /// Probability that an invocation acts as the identity.
    pub fn effective_rate(&self) -> f64 {
        1.0 - (1.0 - self.skip) * (1.0 - self.p)
    }
}

#[derive(Debug, Clone)]
enum DrawSource {
    Sampled(Box<TrialRng>),
    Replay(Vec<bool>),
}

/// The recorded apply/skip draws of a faulty oracle. Either sampled from a
/// seeded stream or replayed from a fixed pattern.
#[derive(Debug, Clone)]
pub struct FaultTrace {
    seed: Option<u64>,
    source: DrawSource,
    draws: Vec<bool>,
}

impl FaultTrace {
    pub fn seeded(seed: u64) -> Self {
        Self {
            seed: Some(seed),
            source: DrawSource::Sampled(Box::new(from_seed(seed))),
            draws: Vec::new(),
        }
    }

    /// Replays `pattern` (true = applied); running past its end is an error.
    pub fn replay(pattern: Vec<bool>) -> Self {
        Self {
            seed: None,
            source: DrawSource::Replay(pattern),
            draws: Vec::new(),
        }
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn draws(&self) -> &[bool] {
        &self.draws
    }

    pub fn invocations(&self) -> usize {
        self.draws.len()
    }
}

/// Draws whether the next invocation applies the oracle, recording it.
/// The reduction skip is drawn first, then the fault itself.
pub fn sample_fault(config: &FaultyOracleConfig, trace: &mut FaultTrace) -> Result<bool> {
    let applied = match &mut trace.source {
        DrawSource::Sampled(rng) => {
            let kept = config.skip <= 0.0 || rng.random::<f64>() >= config.skip;
            let ok = rng.random::<f64>() >= config.p;
            kept && ok
        }
        DrawSource::Replay(pattern) => *pattern
            .get(trace.draws.len())
            .ok_or(Error::TraceExhausted(trace.draws.len()))?,
    };
    trace.draws.push(applied);
    Ok(applied)
}

/// `O_f` under a faulty draw; returns whether it was applied.
pub fn apply_faulty_oracle(
    state: &mut StateVector,
    f: &TruthTable,
    input: &str,
    output: &str,
    config: &FaultyOracleConfig,
    trace: &mut FaultTrace,
) -> Result<bool> {
    OraclePlan::new(state.layout(), f, input, output)?.apply_faulty(state, config, trace)
}

/// `|k⟩|b⟩ → |k⟩|b + 1 mod modulus⟩`, other index values untouched, when
/// `applied`; identity otherwise.
pub fn apply_addition_oracle(
    state: &mut StateVector,
    index_register: &str,
    k: u64,
    ancilla: &str,
    modulus: u64,
    applied: bool,
) -> Result<()> {
    let layout = state.layout();
    let zreg = layout.register(index_register)?.clone();
    let areg = layout.register(ancilla)?.clone();
    if modulus == 0 || modulus > 1u64 << areg.width() {
        return Err(out_of_range(
            "modulus",
            format!("{modulus} does not fit a {}-qubit register", areg.width()),
        ));
    }
    for (i, a) in state.amplitudes().iter().enumerate() {
        if areg.extract(i) as u64 >= modulus && a.norm_sqr() > 0.0 {
            return Err(Error::AncillaOutOfRange(modulus));
        }
    }
    if !applied {
        return Ok(());
    }
    let amps = state.amplitudes();
    let mut out = vec![Complex64::new(0.0, 0.0); amps.len()];
    for (i, a) in amps.iter().enumerate() {
        let b = areg.extract(i) as u64;
        let j = if zreg.extract(i) as u64 == k && b < modulus {
            (i & !areg.mask()) | areg.place(((b + 1) % modulus) as usize)
        } else {
            i
        };
        out[j] = *a;
    }
    state.amplitudes_mut().copy_from_slice(&out);
    Ok(())
}

/// `O^{k,1/r}`: multiplies the `|k⟩` component by `e^{iπ/r}` when `applied`.
pub fn apply_phase_oracle(state: &mut StateVector, index_register: &str, k: u64, r: u64, applied: bool) -> Result<()> {
    if r == 0 {
        return Err(out_of_range("r", "must be at least 1"));
    }
    let zreg = state.layout().register(index_register)?.clone();
    if !applied {
        return Ok(());
    }
    let phase = Complex64::from_polar(1.0, core::f64::consts::PI / r as f64);
    for (i, a) in state.amplitudes_mut().iter_mut().enumerate() {
        if zreg.extract(i) as u64 == k {
            *a *= phase;
        }
    }
    Ok(())
}

/// Name of the temporary ancilla used by [`phase_from_addition`].
pub const PHASE_ANCILLA: &str = "__phase_ancilla";
const DISENTANGLE_TOL: f64 = 1e-10;

/// Realises `O^{k,1/r}` with one addition-oracle call modulo `2r` on the
/// phased ancilla `(1/√(2r)) Σ_j e^{−iπj/r}|j⟩`, then discards the ancilla.
pub fn phase_from_addition(state: &StateVector, index_register: &str, k: u64, r: u64, applied: bool) -> Result<StateVector> {
    if r == 0 {
        return Err(out_of_range("r", "must be at least 1"));
    }
    let modulus = 2 * r;
    let width = (64 - (modulus - 1).leading_zeros()) as usize;
    let anc_layout = RegisterLayout::new([(PHASE_ANCILLA, width)])?;
    let norm = 1.0 / (modulus as f64).sqrt();
    let psi: Vec<Complex64> = (0..1u64 << width)
        .map(|j| {
            if j < modulus {
                Complex64::from_polar(norm, -core::f64::consts::PI * j as f64 / r as f64)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    let ancilla = StateVector::from_amplitudes(anc_layout, psi.clone())?;
    let mut joint = state.tensor(&ancilla)?;
    apply_addition_oracle(&mut joint, index_register, k, PHASE_ANCILLA, modulus, applied)?;

    let a = psi.len();
    let joint_amps = joint.amplitudes();
    let main: Vec<Complex64> = (0..state.amplitudes().len())
        .map(|i| (0..a).map(|j| psi[j].conj() * joint_amps[i * a + j]).sum())
        .collect();
    let residual = main
        .iter()
        .enumerate()
        .flat_map(|(i, m)| psi.iter().enumerate().map(move |(j, p)| (i * a + j, m * p)))
        .map(|(idx, v)| (joint_amps[idx] - v).norm_sqr())
        .sum::<f64>()
        .sqrt();
    if residual > DISENTANGLE_TOL {
        return Err(Error::AncillaEntangled(residual));
    }
    StateVector::from_amplitudes(state.layout().clone(), main)
}

/// One query of the classical one-sided noisy oracle: a 1 is reported
/// with probability `alpha`, a 0 always reads 0.
pub fn classical_noisy_query<R: Rng + ?Sized>(x: &[bool], i: usize, alpha: f64, rng: &mut R) -> Result<bool> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(out_of_range("alpha", format!("{alpha} is not in (0, 1]")));
    }
    let bit = *x.get(i).ok_or(Error::IndexOutOfRange { index: i, len: x.len() })?;
    Ok(bit && rng.random::<f64>() < alpha)
}
