//! Dense state vectors and the gates that act on them.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::layout::RegisterLayout;

/// Per-operation unitarity and normalisation tolerance.
pub const UNITARY_TOL: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A qubit addressed by register name and local index.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QubitRef {
    pub register: String,
    pub index: usize,
}

impl QubitRef {
    pub fn new(register: &str, index: usize) -> Self {
        Self {
            register: register.to_string(),
            index,
        }
    }
}

/// A 2×2 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[Complex64; 2]; 2]);

impl Mat2 {
    pub fn real(a: f64, b: f64, c: f64, d: f64) -> Self {
        Mat2([
            [Complex64::new(a, 0.0), Complex64::new(b, 0.0)],
            [Complex64::new(c, 0.0), Complex64::new(d, 0.0)],
        ])
    }

    pub fn identity() -> Self {
        Self::real(1.0, 0.0, 0.0, 1.0)
    }

    pub fn x() -> Self {
        Self::real(0.0, 1.0, 1.0, 0.0)
    }

    pub fn z() -> Self {
        Self::real(1.0, 0.0, 0.0, -1.0)
    }

    pub fn hadamard() -> Self {
        let h = core::f64::consts::FRAC_1_SQRT_2;
        Self::real(h, h, h, -h)
    }

    /// Clockwise rotation `[[cos θ, sin θ], [−sin θ, cos θ]]`.
    pub fn rotation(theta: f64) -> Result<Self> {
        if !theta.is_finite() {
            return Err(Error::NonFiniteAngle);
        }
        let (s, c) = theta.sin_cos();
        Ok(Self::real(c, s, -s, c))
    }

    pub fn mul(&self, rhs: &Mat2) -> Mat2 {
        let a = &self.0;
        let b = &rhs.0;
        let mut out = [[ZERO; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Mat2(out)
    }

    pub fn adjoint(&self) -> Mat2 {
        let a = &self.0;
        Mat2([[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]])
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Mat2) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                worst = worst.max((self.0[i][j] - other.0[i][j]).norm());
            }
        }
        worst
    }

    /// Entrywise deviation of `M†M` from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        self.adjoint().mul(self).max_abs_diff(&Mat2::identity())
    }

    pub fn apply(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        [
            self.0[0][0] * v[0] + self.0[0][1] * v[1],
            self.0[1][0] * v[0] + self.0[1][1] * v[1],
        ]
    }
}

/// A validated single-qubit unitary bound to a target qubit.
#[derive(Debug, Clone, PartialEq)]
pub struct Gate2x2 {
    matrix: Mat2,
    target: QubitRef,
}

impl Gate2x2 {
    pub fn new(matrix: Mat2, target: QubitRef) -> Result<Self> {
        let defect = matrix.unitarity_defect();
        if defect > UNITARY_TOL {
            return Err(Error::NotUnitary(defect));
        }
        Ok(Self { matrix, target })
    }

    pub fn rotation(theta: f64, target: QubitRef) -> Result<Self> {
        Self::new(Mat2::rotation(theta)?, target)
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.matrix
    }

    pub fn target(&self) -> &QubitRef {
        &self.target
    }
}

/// Applies `m` to the qubit at global bit position `bit`.
#[inline]
pub(crate) fn apply_mat2_at(amps: &mut [Complex64], bit: usize, m: &Mat2) {
    let step = 1usize << bit;
    let [[a, b], [c, d]] = m.0;
    let mut base = 0;
    while base < amps.len() {
        for i in base..base + step {
            let j = i + step;
            let x0 = amps[i];
            let x1 = amps[j];
            amps[i] = a * x0 + b * x1;
            amps[j] = c * x0 + d * x1;
        }
        base += step << 1;
    }
}

/// Real 2×2 matrix `[[a, b], [c, d]]` at global bit position `bit`.
#[inline]
pub(crate) fn apply_real_at(amps: &mut [Complex64], bit: usize, [a, b, c, d]: [f64; 4]) {
    let step = 1usize << bit;
    let mut base = 0;
    while base < amps.len() {
        let (lo, hi) = amps[base..base + (step << 1)].split_at_mut(step);
        for (x0, x1) in lo.iter_mut().zip(hi.iter_mut()) {
            let (u, v) = (*x0, *x1);
            *x0 = Complex64::new(a * u.re + b * v.re, a * u.im + b * v.im);
            *x1 = Complex64::new(c * u.re + d * v.re, c * u.im + d * v.im);
        }
        base += step << 1;
    }
}

#[inline]
pub(crate) fn apply_x_at(amps: &mut [Complex64], bit: usize) {
    let step = 1usize << bit;
    let mut base = 0;
    while base < amps.len() {
        let (lo, hi) = amps[base..base + (step << 1)].split_at_mut(step);
        lo.swap_with_slice(hi);
        base += step << 1;
    }
}

#[inline]
pub(crate) fn apply_cnot_at(amps: &mut [Complex64], control: usize, target: usize) {
    let c = 1usize << control;
    let t = 1usize << target;
    for i in 0..amps.len() {
        if i & c != 0 && i & t == 0 {
            amps.swap(i, i | t);
        }
    }
}

/// Complex amplitudes over a [`RegisterLayout`].
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    layout: RegisterLayout,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// Basis state with the given register values; registers not
    /// mentioned start at zero.
    pub fn new_basis_state(layout: RegisterLayout, assignments: &[(&str, BitString)]) -> Result<Self> {
        let mut index = 0usize;
        for (name, bits) in assignments {
            let reg = layout.register(name)?;
            if reg.width() != bits.width() {
                return Err(Error::WidthMismatch {
                    register: name.to_string(),
                    expected: reg.width(),
                    actual: bits.width(),
                });
            }
            index |= reg.place(bits.value() as usize);
        }
        Ok(Self::basis_index(layout, index))
    }

    /// Basis state `|index⟩` in the raw global encoding.
    pub fn basis_index(layout: RegisterLayout, index: usize) -> Self {
        let mut amps = vec![ZERO; layout.dimension()];
        amps[index] = ONE;
        Self { layout, amps }
    }

    /// Wraps raw amplitudes. Normalisation is the caller's business.
    pub fn from_amplitudes(layout: RegisterLayout, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != layout.dimension() {
            return Err(Error::LayoutMismatch);
        }
        Ok(Self { layout, amps })
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amps[index]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(Complex64::norm_sqr).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            for a in &mut self.amps {
                *a /= n;
            }
        }
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.layout != other.layout {
            return Err(Error::LayoutMismatch);
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `self ⊗ other`, with `other`'s registers appended after ours.
    pub fn tensor(&self, other: &StateVector) -> Result<StateVector> {
        let regs = self
            .layout
            .registers()
            .iter()
            .chain(other.layout.registers())
            .map(|r| (r.name().to_string(), r.width()));
        let layout = RegisterLayout::new(regs)?;
        let mut amps = Vec::with_capacity(layout.dimension());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Ok(Self { layout, amps })
    }

    pub fn apply_gate(&mut self, gate: &Gate2x2) -> Result<()> {
        let bit = self
            .layout
            .bit_position(&gate.target.register, gate.target.index)?;
        apply_mat2_at(&mut self.amps, bit, &gate.matrix);
        Ok(())
    }

    pub fn apply_x(&mut self, q: &QubitRef) -> Result<()> {
        let bit = self.layout.bit_position(&q.register, q.index)?;
        apply_x_at(&mut self.amps, bit);
        Ok(())
    }

    pub fn apply_cnot(&mut self, control: &QubitRef, target: &QubitRef) -> Result<()> {
        let c = self.layout.bit_position(&control.register, control.index)?;
        let t = self.layout.bit_position(&target.register, target.index)?;
        if c == t {
            return Err(Error::OverlappingTargets);
        }
        apply_cnot_at(&mut self.amps, c, t);
        Ok(())
    }

    /// Applies a `d×d` unitary (row-major) to the concatenation of the
    /// named registers, the first name being most significant.
    pub fn apply_unitary(&mut self, registers: &[&str], matrix: &[Complex64]) -> Result<()> {
        let mut bits: Vec<usize> = Vec::new();
        for name in registers {
            let reg = self.layout.register(name)?;
            for q in 0..reg.width() {
                bits.push(reg.bit(q));
            }
        }
        for (i, b) in bits.iter().enumerate() {
            if bits[..i].contains(b) {
                return Err(Error::OverlappingTargets);
            }
        }
        let d = 1usize << bits.len();
        if matrix.len() != d * d {
            return Err(Error::LayoutMismatch);
        }
        let defect = unitarity_defect(matrix, d);
        if defect > UNITARY_TOL * d as f64 {
            return Err(Error::NotUnitary(defect));
        }
        let sub_mask: usize = bits.iter().map(|b| 1usize << b).sum();
        let offsets: Vec<usize> = (0..d)
            .map(|local| {
                bits.iter()
                    .enumerate()
                    .filter(|(k, _)| (local >> (bits.len() - 1 - k)) & 1 == 1)
                    .map(|(_, b)| 1usize << b)
                    .sum()
            })
            .collect();
        let mut gathered = vec![ZERO; d];
        for base in 0..self.amps.len() {
            if base & sub_mask != 0 {
                continue;
            }
            for (g, off) in gathered.iter_mut().zip(&offsets) {
                *g = self.amps[base | off];
            }
            for (row, off) in offsets.iter().enumerate() {
                let r = &matrix[row * d..(row + 1) * d];
                self.amps[base | off] = r.iter().zip(&gathered).map(|(m, x)| m * x).sum();
            }
        }
        Ok(())
    }
}

fn unitarity_defect(m: &[Complex64], d: usize) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..d {
        for j in 0..d {
            let mut acc = ZERO;
            for k in 0..d {
                acc += m[k * d + i].conj() * m[k * d + j];
            }
            let target = if i == j { ONE } else { ZERO };
            worst = worst.max((acc - target).norm());
        }
    }
    worst
}

/// `R_θ` as a stand-alone matrix.
pub fn rotation_gate(theta: f64) -> Result<Mat2> {
    Mat2::rotation(theta)
}
