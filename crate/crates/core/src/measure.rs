//! Born-rule measurement of a register.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::state::StateVector;

/// Outcome probabilities of measuring `register`, indexed by value.
pub fn register_probabilities(state: &StateVector, register: &str) -> Result<Vec<f64>> {
    let reg = state.layout().register(register)?;
    let mut probs = vec![0.0; 1usize << reg.width()];
    for (i, a) in state.amplitudes().iter().enumerate() {
        probs[reg.extract(i)] += a.norm_sqr();
    }
    Ok(probs)
}

/// Samples a measurement outcome of `register` without building the
/// post-measurement state.
pub fn sample_register<R: Rng + ?Sized>(state: &StateVector, register: &str, rng: &mut R) -> Result<u64> {
    let probs = register_probabilities(state, register)?;
    sample_index(&probs, rng).map(|v| v as u64)
}

fn sample_index<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> Result<usize> {
    let total: f64 = probs.iter().sum();
    let u = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut outcome = probs.len() - 1;
    for (v, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            outcome = v;
            break;
        }
    }
    if probs[outcome] <= 0.0 {
        return Err(Error::ZeroNormBranch);
    }
    Ok(outcome)
}

/// Samples an outcome and returns it with the renormalised post-measurement
/// state.
pub fn measure_register<R: Rng + ?Sized>(
    state: &StateVector,
    register: &str,
    rng: &mut R,
) -> Result<(BitString, StateVector)> {
    let reg = state.layout().register(register)?.clone();
    let probs = register_probabilities(state, register)?;
    let outcome = sample_index(&probs, rng)?;
    let scale = probs[outcome].sqrt();
    let amps = state
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(i, a)| {
            if reg.extract(i) == outcome {
                a / scale
            } else {
                num_complex::Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    let collapsed = StateVector::from_amplitudes(state.layout().clone(), amps)?;
    Ok((BitString::new(outcome as u64, reg.width())?, collapsed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layout::RegisterLayout;
    use crate::rng::from_seed;
    use num_complex::Complex64;

    fn zb(b0: f64, b1: f64) -> StateVector {
        let l = RegisterLayout::new([("Z", 1), ("B", 1)]).unwrap();
        let c = |x| Complex64::new(x, 0.0);
        StateVector::from_amplitudes(l, vec![c(0.0), c(0.0), c(b0), c(b1)]).unwrap()
    }

    #[test]
    fn certain_outcome() {
        let mut rng = from_seed(1);
        let (b, post) = measure_register(&zb(0.0, 1.0), "B", &mut rng).unwrap();
        assert_eq!(b.value(), 1);
        assert_eq!(post, zb(0.0, 1.0));
    }

    #[test]
    fn born_frequencies() {
        let h = core::f64::consts::FRAC_1_SQRT_2;
        let s = zb(h, h);
        let mut rng = from_seed(2);
        let n = 10_000;
        let ones = (0..n)
            .filter(|_| measure_register(&s, "B", &mut rng).unwrap().0.value() == 1)
            .count();
        let sigma = (0.25f64 / n as f64).sqrt();
        assert!(((ones as f64 / n as f64) - 0.5).abs() <= 3.0 * sigma);
    }

    #[test]
    fn collapse_renormalises() {
        let s = zb(0.6, 0.8);
        let mut rng = from_seed(3);
        let (b, post) = measure_register(&s, "B", &mut rng).unwrap();
        assert!((post.norm() - 1.0).abs() < 1e-12);
        assert_eq!(register_probabilities(&post, "B").unwrap()[b.value() as usize], 1.0);
    }

    #[test]
    fn seeded_sequences_repeat() {
        let h = core::f64::consts::FRAC_1_SQRT_2;
        let s = zb(h, h);
        let run = |seed| {
            let mut rng = from_seed(seed);
            (0..64)
                .map(|_| measure_register(&s, "B", &mut rng).unwrap().0.value())
                .collect::<Vec<_>>()
        };
        assert_eq!(run(9), run(9));
    }
}
