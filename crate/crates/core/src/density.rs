//! Small density matrices, built as Monte Carlo mixtures of trajectories.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::layout::RegisterLayout;
use crate::state::StateVector;

/// Density-matrix mode is limited to this many qubits.
pub const MAX_DENSITY_QUBITS: usize = 10;
/// Hermiticity and trace tolerance.
pub const DENSITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    layout: RegisterLayout,
    dim: usize,
    /// Row-major `dim × dim`.
    data: Vec<Complex64>,
}

fn check_cap(layout: &RegisterLayout) -> Result<()> {
    if layout.total_qubits() > MAX_DENSITY_QUBITS {
        return Err(Error::DensityTooLarge {
            actual: layout.total_qubits(),
            cap: MAX_DENSITY_QUBITS,
        });
    }
    Ok(())
}

impl DensityMatrix {
    /// `|ψ⟩⟨ψ|`.
    pub fn from_pure(state: &StateVector) -> Result<Self> {
        let mut acc = DensityAccumulator::new(state.layout().clone())?;
        acc.add(state)?;
        acc.finish()
    }

    /// Validates Hermiticity and unit trace.
    pub fn from_matrix(layout: RegisterLayout, data: Vec<Complex64>) -> Result<Self> {
        check_cap(&layout)?;
        let dim = layout.dimension();
        if data.len() != dim * dim {
            return Err(Error::LayoutMismatch);
        }
        let rho = Self { layout, dim, data };
        let h = rho.hermiticity_defect();
        if h > DENSITY_TOL {
            return Err(Error::NotHermitian(h));
        }
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > DENSITY_TOL || tr.im.abs() > DENSITY_TOL {
            return Err(Error::OutOfRange {
                name: "trace",
                reason: alloc::format!("trace {tr} differs from 1"),
            });
        }
        Ok(rho)
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    /// Traces out `register`.
    pub fn partial_trace(&self, register: &str) -> Result<DensityMatrix> {
        let reg = self.layout.register(register)?.clone();
        let layout = self.layout.without(register)?;
        let dim = layout.dimension();
        let low = reg.shift();
        let low_mask = (1usize << low) - 1;
        // Reduced index r maps to full index with the register's bits zeroed.
        let embed = |r: usize| ((r & !low_mask) << reg.width()) | (r & low_mask);
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            let fi = embed(i);
            for j in 0..dim {
                let fj = embed(j);
                let mut acc = Complex64::new(0.0, 0.0);
                for v in 0..(1usize << reg.width()) {
                    acc += self.get(fi | reg.place(v), fj | reg.place(v));
                }
                data[i * dim + j] = acc;
            }
        }
        Ok(DensityMatrix { layout, dim, data })
    }

    fn to_nalgebra(&self) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(self.dim, self.dim, &self.data)
    }
}

/// Streaming `(1/K) Σ_k |ψ_k⟩⟨ψ_k|` so trajectories need not be kept.
#[derive(Debug, Clone)]
pub struct DensityAccumulator {
    layout: RegisterLayout,
    dim: usize,
    sum: Vec<Complex64>,
    count: usize,
}

impl DensityAccumulator {
    pub fn new(layout: RegisterLayout) -> Result<Self> {
        check_cap(&layout)?;
        let dim = layout.dimension();
        Ok(Self {
            layout,
            dim,
            sum: vec![Complex64::new(0.0, 0.0); dim * dim],
            count: 0,
        })
    }

    pub fn add(&mut self, state: &StateVector) -> Result<()> {
        if state.layout() != &self.layout {
            return Err(Error::LayoutMismatch);
        }
        let a = state.amplitudes();
        for (i, ai) in a.iter().enumerate() {
            if ai.norm_sqr() == 0.0 {
                continue;
            }
            let row = &mut self.sum[i * self.dim..(i + 1) * self.dim];
            for (cell, aj) in row.iter_mut().zip(a) {
                *cell += ai * aj.conj();
            }
        }
        self.count += 1;
        Ok(())
    }

    /// Adds another accumulator's samples.
    pub fn merge(&mut self, other: &DensityAccumulator) -> Result<()> {
        if other.layout != self.layout {
            return Err(Error::LayoutMismatch);
        }
        for (a, b) in self.sum.iter_mut().zip(&other.sum) {
            *a += b;
        }
        self.count += other.count;
        Ok(())
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn finish(self) -> Result<DensityMatrix> {
        if self.count == 0 {
            return Err(Error::EmptySamples);
        }
        let k = self.count as f64;
        Ok(DensityMatrix {
            layout: self.layout,
            dim: self.dim,
            data: self.sum.into_iter().map(|x| x / k).collect(),
        })
    }
}

/// Uniform mixture of the sampled pure states.
pub fn density_from_trajectories(samples: &[StateVector]) -> Result<DensityMatrix> {
    let first = samples.first().ok_or(Error::EmptySamples)?;
    let mut acc = DensityAccumulator::new(first.layout().clone())?;
    for s in samples {
        acc.add(s)?;
    }
    acc.finish()
}

/// Half the sum of absolute eigenvalues of `ρ − σ`.
pub fn trace_distance_density(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.layout != sigma.layout {
        return Err(Error::LayoutMismatch);
    }
    for m in [rho, sigma] {
        let h = m.hermiticity_defect();
        if h > DENSITY_TOL {
            return Err(Error::NotHermitian(h));
        }
    }
    let diff = rho.to_nalgebra() - sigma.to_nalgebra();
    // Symmetrise away rounding so the eigensolver sees an exact Hermitian input.
    let herm = (&diff + diff.adjoint()).map(|x| x * 0.5);
    let eig = herm.symmetric_eigenvalues();
    Ok(0.5 * eig.iter().map(|l| l.abs()).sum::<f64>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::trace_distance_pure;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn qubit() -> RegisterLayout {
        RegisterLayout::new([("Q", 1)]).unwrap()
    }

    #[test]
    fn mixtures() {
        let zero = StateVector::basis_index(qubit(), 0);
        let one = StateVector::basis_index(qubit(), 1);
        let rho = density_from_trajectories(core::slice::from_ref(&zero)).unwrap();
        assert_eq!(rho.get(0, 0), Complex64::new(1.0, 0.0));
        assert_eq!(rho.get(1, 1), Complex64::new(0.0, 0.0));
        let mixed = density_from_trajectories(&[zero.clone(), one.clone()]).unwrap();
        assert_eq!(mixed.get(0, 0).re, 0.5);
        assert_eq!(mixed.get(1, 1).re, 0.5);
        assert_eq!(mixed.get(0, 1).norm(), 0.0);
        assert_eq!(density_from_trajectories(&[]), Err(Error::EmptySamples));
    }

    #[test]
    fn repeated_sample_is_pure() {
        let h = core::f64::consts::FRAC_1_SQRT_2;
        let s = StateVector::from_amplitudes(qubit(), vec![Complex64::new(h, 0.0), Complex64::new(0.0, h)]).unwrap();
        let mut acc = DensityAccumulator::new(qubit()).unwrap();
        for _ in 0..10_000 {
            acc.add(&s).unwrap();
        }
        let rho = acc.finish().unwrap();
        let pure = DensityMatrix::from_pure(&s).unwrap();
        assert!(trace_distance_density(&rho, &pure).unwrap() <= 1e-12);
    }

    #[test]
    fn distance_examples() {
        let zero = DensityMatrix::from_pure(&StateVector::basis_index(qubit(), 0)).unwrap();
        let one = DensityMatrix::from_pure(&StateVector::basis_index(qubit(), 1)).unwrap();
        assert!(trace_distance_density(&zero, &zero).unwrap().abs() < 1e-15);
        assert!((trace_distance_density(&zero, &one).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn size_cap() {
        let l = RegisterLayout::new([("Q", 11)]).unwrap();
        assert!(matches!(DensityAccumulator::new(l), Err(Error::DensityTooLarge { .. })));
    }

    #[test]
    fn rejects_non_hermitian() {
        let data = vec![
            Complex64::new(0.5, 0.0),
            Complex64::new(0.3, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.5, 0.0),
        ];
        assert!(matches!(DensityMatrix::from_matrix(qubit(), data), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn agrees_with_pure_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let l = RegisterLayout::new([("Q", 3)]).unwrap();
        for _ in 0..100 {
            let mut draw = || {
                let amps = (0..8)
                    .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
                    .collect();
                let mut s = StateVector::from_amplitudes(l.clone(), amps).unwrap();
                s.normalize();
                s
            };
            let (a, b) = (draw(), draw());
            let mixed = trace_distance_density(
                &DensityMatrix::from_pure(&a).unwrap(),
                &DensityMatrix::from_pure(&b).unwrap(),
            )
            .unwrap();
            assert!((mixed - trace_distance_pure(&a, &b).unwrap()).abs() < 1e-10);
        }
    }

    #[test]
    fn partial_trace_of_product() {
        let l = RegisterLayout::new([("A", 1), ("S", 1), ("C", 1)]).unwrap();
        // |1⟩_A |1⟩_S |0⟩_C
        let s = StateVector::basis_index(l, 0b110);
        let rho = DensityMatrix::from_pure(&s).unwrap().partial_trace("S").unwrap();
        assert_eq!(rho.layout().total_qubits(), 2);
        assert_eq!(rho.get(0b10, 0b10).re, 1.0);
        assert!((rho.trace().re - 1.0).abs() < 1e-15);
    }
}
