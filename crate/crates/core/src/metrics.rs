//! Distances and angles between states.

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::state::StateVector;

/// Tolerance on imaginary parts for the real-coefficient angle measure.
pub const REAL_TOL: f64 = 1e-9;
const SUPPORT_TOL: f64 = 1e-9;

/// The plane `span{|z,0⟩, |z,1⟩}`: register `index_register` fixed to
/// `index`, single-qubit register `target` free, every other register
/// fixed to a common basis value.
#[derive(Debug, Clone, Copy)]
pub struct Plane<'a> {
    pub index_register: &'a str,
    pub index: u64,
    pub target: &'a str,
}

fn plane_coordinates(state: &StateVector, plane: &Plane<'_>, rest: Option<usize>) -> Result<(usize, [f64; 2])> {
    let layout = state.layout();
    let zreg = layout.register(plane.index_register)?;
    let treg = layout.register(plane.target)?;
    if treg.width() != 1 {
        return Err(Error::WidthMismatch {
            register: plane.target.into(),
            expected: 1,
            actual: treg.width(),
        });
    }
    let tbit = 1usize << treg.shift();
    let free = zreg.mask() | tbit;
    let mut rest = rest;
    let mut coords = [0.0; 2];
    for (i, a) in state.amplitudes().iter().enumerate() {
        if a.norm() <= SUPPORT_TOL {
            continue;
        }
        if zreg.extract(i) as u64 != plane.index {
            return Err(Error::OutsideSubspace);
        }
        match rest {
            None => rest = Some(i & !free),
            Some(r) if r != i & !free => return Err(Error::OutsideSubspace),
            _ => {}
        }
        if a.im.abs() > REAL_TOL {
            return Err(Error::ComplexCoefficients(a.im.abs()));
        }
        coords[usize::from(i & tbit != 0)] = a.re;
    }
    Ok((rest.unwrap_or(0), coords))
}

/// Absolute angle difference `|acos⟨φ|ψ⟩|` of two real-coefficient states
/// living on the same plane; result in `[0, π]`.
pub fn angle_difference(a: &StateVector, b: &StateVector, plane: &Plane<'_>) -> Result<f64> {
    if a.layout() != b.layout() {
        return Err(Error::LayoutMismatch);
    }
    let (rest, ca) = plane_coordinates(a, plane, None)?;
    let (_, cb) = plane_coordinates(b, plane, Some(rest))?;
    let dot = ca[0] * cb[0] + ca[1] * cb[1];
    let cross = ca[0] * cb[1] - ca[1] * cb[0];
    // atan2 keeps full precision near 0 and π, where acos loses half the digits.
    Ok(cross.abs().atan2(dot))
}

/// Euclidean norm of the amplitude difference.
pub fn l2_distance(a: &StateVector, b: &StateVector) -> Result<f64> {
    if a.layout() != b.layout() {
        return Err(Error::LayoutMismatch);
    }
    Ok(a.amplitudes()
        .iter()
        .zip(b.amplitudes())
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt())
}

/// `√(1 − |⟨a|b⟩|²)` for normalised pure states.
pub fn trace_distance_pure(a: &StateVector, b: &StateVector) -> Result<f64> {
    let overlap = a.inner(b)?.norm_sqr();
    Ok((1.0 - overlap).max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layout::RegisterLayout;
    use alloc::vec;
    use core::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn zb(z: usize, b0: f64, b1: f64) -> StateVector {
        let l = RegisterLayout::new([("Z", 2), ("B", 1)]).unwrap();
        let mut amps = vec![Complex64::new(0.0, 0.0); 8];
        amps[z << 1] = Complex64::new(b0, 0.0);
        amps[(z << 1) | 1] = Complex64::new(b1, 0.0);
        StateVector::from_amplitudes(l, amps).unwrap()
    }

    const PLANE: Plane<'static> = Plane {
        index_register: "Z",
        index: 2,
        target: "B",
    };

    #[test]
    fn angle_examples() {
        let plus = zb(2, FRAC_1_SQRT_2, FRAC_1_SQRT_2);
        let zero = zb(2, 1.0, 0.0);
        let one = zb(2, 0.0, 1.0);
        assert_eq!(angle_difference(&plus, &plus, &PLANE).unwrap(), 0.0);
        assert!((angle_difference(&zero, &one, &PLANE).unwrap() - FRAC_PI_2).abs() < 1e-15);
        assert!((angle_difference(&plus, &one, &PLANE).unwrap() - FRAC_PI_4).abs() < 1e-15);
    }

    #[test]
    fn angle_rejects_bad_inputs() {
        let plus = zb(2, FRAC_1_SQRT_2, FRAC_1_SQRT_2);
        let other = zb(1, 1.0, 0.0);
        assert_eq!(angle_difference(&plus, &other, &PLANE), Err(Error::OutsideSubspace));
        let mut c = plus.clone();
        c.amplitudes_mut()[4] = Complex64::new(0.0, FRAC_1_SQRT_2);
        assert!(matches!(angle_difference(&c, &plus, &PLANE), Err(Error::ComplexCoefficients(_))));
    }

    #[test]
    fn distance_examples() {
        let plus = zb(2, FRAC_1_SQRT_2, FRAC_1_SQRT_2);
        let zero = zb(2, 1.0, 0.0);
        let one = zb(2, 0.0, 1.0);
        assert_eq!(l2_distance(&plus, &plus).unwrap(), 0.0);
        assert!((l2_distance(&zero, &one).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert!((l2_distance(&plus, &one).unwrap() - 0.765_366_864_730_179_5).abs() < 1e-12);

        assert_eq!(trace_distance_pure(&zero, &zero).unwrap(), 0.0);
        assert!((trace_distance_pure(&zero, &one).unwrap() - 1.0).abs() < 1e-15);
        assert!((trace_distance_pure(&zero, &plus).unwrap() - FRAC_1_SQRT_2).abs() < 1e-12);
    }

    fn unit(v: &[f64]) -> alloc::vec::Vec<f64> {
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter().map(|x| x / n).collect()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn trace_distance_below_l2(
            a in proptest::collection::vec(-1.0f64..1.0, 8),
            b in proptest::collection::vec(-1.0f64..1.0, 8),
        ) {
            prop_assume!(a.iter().any(|x| x.abs() > 1e-3) && b.iter().any(|x| x.abs() > 1e-3));
            let l = RegisterLayout::new([("Q", 2)]).unwrap();
            let mk = |v: &[f64]| {
                let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                let amps = v.chunks(2).map(|c| Complex64::new(c[0] / n, c[1] / n)).collect();
                StateVector::from_amplitudes(l.clone(), amps).unwrap()
            };
            let (x, y) = (mk(&a), mk(&b));
            prop_assert!(trace_distance_pure(&x, &y).unwrap() <= l2_distance(&x, &y).unwrap() + 1e-12);
        }

        #[test]
        fn l2_below_angle(a in proptest::collection::vec(-1.0f64..1.0, 2), b in proptest::collection::vec(-1.0f64..1.0, 2)) {
            prop_assume!(a.iter().any(|x| x.abs() > 1e-3) && b.iter().any(|x| x.abs() > 1e-3));
            let (ua, ub) = (unit(&a), unit(&b));
            let x = zb(2, ua[0], ua[1]);
            let y = zb(2, ub[0], ub[1]);
            prop_assert!(l2_distance(&x, &y).unwrap() <= angle_difference(&x, &y, &PLANE).unwrap() + 1e-12);
        }
    }
}
