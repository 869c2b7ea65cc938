//! The random-walk picture of the `F_f^t` inner loop for a marked input.
//!
//! On the plane `span{|z,0⟩, |z,1⟩}` the state is tracked by its signed
//! angle `φ` from `|z,+⟩`, positive toward `|1⟩`, as an integer multiple of
//! `π/(2t)`. A successful oracle call reflects about `|z,+⟩` (`φ → −φ`) and
//! every round then rotates clockwise by one unit.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use core::f64::consts::PI;
use num_rational::Ratio;
#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;

use crate::error::{out_of_range, Error, Result};
use crate::layout::RegisterLayout;
use crate::metrics::{angle_difference, Plane};
use crate::oracle::{FaultTrace, FaultyOracleConfig, TruthTable};
use crate::rng::substream;
use crate::robust::RobustOracle;
use crate::state::StateVector;

/// Largest `t` for which all `2^t` fault patterns are enumerated.
pub const MAX_ENUMERATION_T: u32 = 12;

/// Oracle outcome combined with the side of `|z,+⟩` the state sits on
/// before the step. `|z,+⟩` itself counts as the right side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StepLabel {
    /// Right side, oracle fails.
    Rf,
    /// Right side, oracle succeeds.
    Rs,
    /// Left side, oracle fails.
    Lf,
    /// Left side, oracle succeeds.
    Ls,
}

impl StepLabel {
    /// `+1` for steps that move away from `|z,+⟩` when read off the labels
    /// alone, `−1` otherwise.
    pub fn sign(self) -> i64 {
        match self {
            StepLabel::Rf | StepLabel::Ls => 1,
            StepLabel::Rs | StepLabel::Lf => -1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct WalkState {
    /// Signed angle in units of `π/(2t)`.
    pub phi: i64,
    pub steps: u64,
}

impl WalkState {
    pub fn is_right(&self) -> bool {
        self.phi <= 0
    }

    pub fn radians(&self, t: u64) -> f64 {
        self.phi as f64 * PI / (2.0 * t as f64)
    }
}

/// One round: reflect about `|z,+⟩` on success, then rotate by `−π/(2t)`.
pub fn geometric_step(walk: WalkState, success: bool) -> WalkState {
    let phi = if success { -walk.phi } else { walk.phi };
    WalkState {
        phi: phi - 1,
        steps: walk.steps + 1,
    }
}

/// Runs [`geometric_step`] over a whole pattern from `|z,+⟩`.
pub fn geometric_walk(pattern: &[bool]) -> WalkState {
    pattern.iter().fold(WalkState::default(), |w, &s| geometric_step(w, s))
}

/// Labels of the steps taken along `pattern`.
pub fn label_sequence(pattern: &[bool]) -> Vec<StepLabel> {
    let mut walk = WalkState::default();
    pattern
        .iter()
        .map(|&success| {
            let label = match (walk.is_right(), success) {
                (true, false) => StepLabel::Rf,
                (true, true) => StepLabel::Rs,
                (false, false) => StepLabel::Lf,
                (false, true) => StepLabel::Ls,
            };
            walk = geometric_step(walk, success);
            label
        })
        .collect()
}

/// `(π/(2t))·|Σ xs|` for a sequence of `±1` steps.
pub fn walk_phi_from_x(xs: &[i8], t: u64) -> Result<f64> {
    if xs.len() as u64 != t {
        return Err(Error::StepCountMismatch {
            expected: t as usize,
            actual: xs.len(),
        });
    }
    if t == 0 {
        return Ok(0.0);
    }
    let mut sum = 0i64;
    for &x in xs {
        if x != 1 && x != -1 {
            return Err(out_of_range("xs", "entries must be +1 or -1"));
        }
        sum += i64::from(x);
    }
    Ok(sum.unsigned_abs() as f64 * PI / (2.0 * t as f64))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnumerationMode {
    /// `|φ|` from the reflection/rotation recurrence.
    Geometric,
    /// `|Σ X_i|` with `X_i = ±1` read directly off the pattern bits.
    Walk,
}

/// Exact distribution of the final `|φ|` (in units of `π/(2t)`) over all
/// `2^t` equally likely patterns.
pub fn enumerate_distribution(t: u32, mode: EnumerationMode) -> Result<BTreeMap<u32, Ratio<u64>>> {
    if t > MAX_ENUMERATION_T {
        return Err(Error::EnumerationTooLarge {
            t,
            limit: MAX_ENUMERATION_T,
        });
    }
    let total = 1u64 << t;
    let mut counts: BTreeMap<u32, u64> = BTreeMap::new();
    let mut pattern = vec![false; t as usize];
    for bits in 0..total {
        for (i, p) in pattern.iter_mut().enumerate() {
            *p = bits >> i & 1 == 1;
        }
        let value = match mode {
            EnumerationMode::Geometric => geometric_walk(&pattern).phi.unsigned_abs() as u32,
            EnumerationMode::Walk => {
                let ones = bits.count_ones() as i64;
                (2 * ones - t as i64).unsigned_abs() as u32
            }
        };
        *counts.entry(value).or_insert(0) += 1;
    }
    Ok(counts.into_iter().map(|(k, c)| (k, Ratio::new(c, total))).collect())
}

/// `√(6 t ln(2/δ))`.
pub fn chernoff_threshold(t: u64, delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta <= 2.0) {
        return Err(out_of_range("delta", alloc::format!("{delta} is not in (0, 2]")));
    }
    Ok((6.0 * t as f64 * (2.0 / delta).ln()).max(0.0).sqrt())
}

/// `Σ X_i` for `t` independent uniform `±1` steps.
pub fn sample_partial_sum<R: Rng + ?Sized>(t: u64, rng: &mut R) -> i64 {
    let mut ones = 0u64;
    let mut left = t;
    while left >= 64 {
        ones += u64::from(rng.random::<u64>().count_ones());
        left -= 64;
    }
    if left > 0 {
        ones += u64::from((rng.random::<u64>() & ((1u64 << left) - 1)).count_ones());
    }
    2 * ones as i64 - t as i64
}

/// Final `|φ|` (units of `π/(2t)`) of one geometric walk with fair draws.
pub fn sample_geometric_walk<R: Rng + ?Sized>(t: u64, rng: &mut R) -> u64 {
    let mut walk = WalkState::default();
    let mut left = t;
    while left > 0 {
        let chunk = left.min(64);
        let bits = rng.random::<u64>();
        for i in 0..chunk {
            walk = geometric_step(walk, bits >> i & 1 == 1);
        }
        left -= chunk;
    }
    walk.phi.unsigned_abs()
}

/// Whether one walk of `t` steps ends strictly beyond `gamma` radians.
pub fn tail_trial(t: u64, gamma: f64, master: u64, trial: u64) -> bool {
    let mut rng = substream(master, trial);
    let phi = sample_geometric_walk(t, &mut rng);
    phi as f64 * PI / (2.0 * t as f64) > gamma
}

/// Empirical `Pr[|φ| > γ]` over `trials` seeded geometric walks.
pub fn montecarlo_tail(t: u64, gamma: f64, trials: u64, seed: u64) -> Result<f64> {
    if trials == 0 {
        return Err(Error::EmptySamples);
    }
    if t == 0 {
        return Err(out_of_range("t", "must be at least 1"));
    }
    let hits = (0..trials).filter(|&i| tail_trial(t, gamma, seed, i)).count();
    Ok(hits as f64 / trials as f64)
}

/// Whether `|Σ X_i| ≥ √(6t ln(2/δ))` for one seeded trial.
pub fn chernoff_trial(t: u64, threshold: f64, master: u64, trial: u64) -> bool {
    let mut rng = substream(master, trial);
    sample_partial_sum(t, &mut rng).unsigned_abs() as f64 >= threshold
}

/// Empirical `Pr[|Σ X_i| ≥ √(6t ln(2/δ))]`.
pub fn chernoff_tail(t: u64, delta: f64, trials: u64, seed: u64) -> Result<f64> {
    if trials == 0 {
        return Err(Error::EmptySamples);
    }
    let threshold = chernoff_threshold(t, delta)?;
    let hits = (0..trials).filter(|&i| chernoff_trial(t, threshold, seed, i)).count();
    Ok(hits as f64 / trials as f64)
}

/// Runs the `F_f^t` inner loop on `|z,+⟩` for every fault pattern and
/// returns the largest gap between the measured angle to `|z,+⟩` and the
/// geometric `|φ|`.
pub fn circuit_vs_walk_check(t: u32, f: &TruthTable, z: u64) -> Result<f64> {
    if t > MAX_ENUMERATION_T {
        return Err(Error::EnumerationTooLarge {
            t,
            limit: MAX_ENUMERATION_T,
        });
    }
    if t == 0 {
        return Err(out_of_range("t", "must be at least 1"));
    }
    if f.output_width() != 1 {
        return Err(out_of_range("f", "needs a single output bit"));
    }
    if z >> f.input_width() != 0 || f.eval(z) != 1 {
        return Err(out_of_range("z", "must be a marked input"));
    }
    let n = f.input_width();
    let layout = RegisterLayout::new([("Z", n), ("S", 1)])?;
    let oracle = RobustOracle::new(&layout, f, u64::from(t), "Z", "S")?;
    let plus = {
        let mut s = StateVector::basis_index(layout.clone(), (z as usize) << 1);
        let h = crate::state::Mat2::hadamard();
        s.apply_gate(&crate::state::Gate2x2::new(h, crate::state::QubitRef::new("S", 0))?)?;
        s
    };
    let plane = Plane {
        index_register: "Z",
        index: z,
        target: "S",
    };
    let config = FaultyOracleConfig::new(0.5)?;
    let unit = PI / (2.0 * f64::from(t));
    let mut worst = 0.0f64;
    let mut pattern = vec![false; t as usize];
    for bits in 0..1u64 << t {
        for (i, p) in pattern.iter_mut().enumerate() {
            *p = bits >> i & 1 == 1;
        }
        let mut state = plus.clone();
        let mut trace = FaultTrace::replay(pattern.clone());
        oracle.apply_inner(&mut state, &config, &mut trace)?;
        let measured = angle_difference(&state, &plus, &plane)?;
        let expected = geometric_walk(&pattern).phi.unsigned_abs() as f64 * unit;
        worst = worst.max((measured - expected).abs());
    }
    Ok(worst)
}
