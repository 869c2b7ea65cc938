//! Gate lists and query algorithms `V = U_q O_f U_{q−1} … O_f U_0`.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::layout::RegisterLayout;
use crate::state::{apply_mat2_at, apply_real_at, apply_x_at, Mat2, QubitRef, StateVector};

/// Register names used by query algorithms.
pub const INPUT: &str = "Z";
pub const OUTPUT: &str = "B";
pub const WORKSPACE: &str = "T";
pub const SCRATCH: &str = "S";

/// A single qubit or every qubit of a register.
#[derive(Debug, Clone, PartialEq)]
pub enum Target {
    Qubit(QubitRef),
    Register(String),
}

impl Target {
    fn bits(&self, layout: &RegisterLayout) -> Result<Vec<usize>> {
        match self {
            Target::Qubit(q) => Ok(alloc::vec![layout.bit_position(&q.register, q.index)?]),
            Target::Register(name) => {
                let reg = layout.register(name)?;
                Ok((0..reg.width()).map(|q| reg.bit(q)).collect())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    H(Target),
    X(Target),
    Z(Target),
    /// Clockwise rotation `R_θ`.
    Rot { theta: f64, target: Target },
    Cnot { control: QubitRef, target: QubitRef },
    /// Reflection `2|η⟩⟨η| − I` about the uniform state of a register.
    Diffusion(String),
}

impl Gate {
    pub fn apply(&self, state: &mut StateVector) -> Result<()> {
        let layout = state.layout().clone();
        match self {
            Gate::H(t) => {
                let h = Mat2::hadamard();
                for b in t.bits(&layout)? {
                    apply_mat2_at(state.amplitudes_mut(), b, &h);
                }
            }
            Gate::X(t) => {
                for b in t.bits(&layout)? {
                    apply_x_at(state.amplitudes_mut(), b);
                }
            }
            Gate::Z(t) => {
                for b in t.bits(&layout)? {
                    apply_real_at(state.amplitudes_mut(), b, [1.0, 0.0, 0.0, -1.0]);
                }
            }
            Gate::Rot { theta, target } => {
                let m = Mat2::rotation(*theta)?;
                let (c, s) = (m.0[0][0].re, m.0[0][1].re);
                for b in target.bits(&layout)? {
                    apply_real_at(state.amplitudes_mut(), b, [c, s, -s, c]);
                }
            }
            Gate::Cnot { control, target } => state.apply_cnot(control, target)?,
            Gate::Diffusion(name) => diffusion(state, name)?,
        }
        Ok(())
    }

    /// Checks that every addressed qubit exists and that a CNOT's control
    /// and target differ.
    pub fn validate(&self, layout: &RegisterLayout) -> Result<()> {
        match self {
            Gate::H(t) | Gate::X(t) | Gate::Z(t) => t.bits(layout).map(|_| ()),
            Gate::Rot { theta, target } => {
                if !theta.is_finite() {
                    return Err(Error::NonFiniteAngle);
                }
                target.bits(layout).map(|_| ())
            }
            Gate::Cnot { control, target } => {
                let c = layout.bit_position(&control.register, control.index)?;
                let t = layout.bit_position(&target.register, target.index)?;
                if c == t {
                    return Err(Error::OverlappingTargets);
                }
                Ok(())
            }
            Gate::Diffusion(r) => layout.register(r).map(|_| ()),
        }
    }

    /// Registers referenced by this gate.
    pub fn registers(&self) -> Vec<&str> {
        fn target(t: &Target) -> &str {
            match t {
                Target::Qubit(q) => &q.register,
                Target::Register(r) => r,
            }
        }
        match self {
            Gate::H(t) | Gate::X(t) | Gate::Z(t) | Gate::Rot { target: t, .. } => alloc::vec![target(t)],
            Gate::Cnot { control, target } => alloc::vec![control.register.as_str(), target.register.as_str()],
            Gate::Diffusion(r) => alloc::vec![r.as_str()],
        }
    }
}

/// `U_η = 2|η⟩⟨η| − I` on `register`, acting independently on every
/// configuration of the other registers.
pub fn diffusion(state: &mut StateVector, register: &str) -> Result<()> {
    let reg = state.layout().register(register)?.clone();
    let size = 1usize << reg.width();
    let mask = reg.mask();
    let amps = state.amplitudes_mut();
    for base in 0..amps.len() {
        if base & mask != 0 {
            continue;
        }
        let mean: Complex64 = (0..size).map(|v| amps[base | reg.place(v)]).sum::<Complex64>() / size as f64;
        for v in 0..size {
            let a = &mut amps[base | reg.place(v)];
            *a = mean * 2.0 - *a;
        }
    }
    Ok(())
}

pub fn apply_all(gates: &[Gate], state: &mut StateVector) -> Result<()> {
    gates.iter().try_for_each(|g| g.apply(state))
}

/// A query algorithm on registers `Z` (input), `B` (oracle target) and
/// `T` (workspace): unitaries `U_0 … U_q` separated by `q` oracle calls.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryAlgorithm {
    layout: RegisterLayout,
    segments: Vec<Vec<Gate>>,
    measure: String,
}

impl QueryAlgorithm {
    /// `segments` holds `U_0 … U_q`; an oracle call sits between each
    /// consecutive pair.
    pub fn new(z: usize, b: usize, t: usize, segments: Vec<Vec<Gate>>, measure: &str) -> Result<Self> {
        let layout = RegisterLayout::new([(INPUT, z), (OUTPUT, b), (WORKSPACE, t)])?;
        if segments.is_empty() {
            return Err(Error::Algorithm("needs at least the unitary U_0".into()));
        }
        for gate in segments.iter().flatten() {
            gate.validate(&layout)?;
        }
        layout.register(measure)?;
        Ok(Self {
            layout,
            segments,
            measure: measure.to_string(),
        })
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn segments(&self) -> &[Vec<Gate>] {
        &self.segments
    }

    pub fn measured_register(&self) -> &str {
        &self.measure
    }

    /// Number of oracle calls.
    pub fn queries(&self) -> usize {
        self.segments.len() - 1
    }

    pub fn input_width(&self) -> usize {
        self.layout.registers()[0].width()
    }

    pub fn output_width(&self) -> usize {
        self.layout.registers()[1].width()
    }

    pub fn workspace_width(&self) -> usize {
        self.layout.registers()[2].width()
    }

    pub fn check_function(&self, f: &crate::oracle::TruthTable) -> Result<()> {
        if f.input_width() != self.input_width() || f.output_width() != self.output_width() {
            return Err(Error::Algorithm(format!(
                "function {}→{} bits does not match registers Z={} B={}",
                f.input_width(),
                f.output_width(),
                self.input_width(),
                self.output_width()
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::BitString;

    fn layout() -> RegisterLayout {
        RegisterLayout::new([("Z", 3), ("B", 1)]).unwrap()
    }

    #[test]
    fn diffusion_fixes_uniform_and_negates_orthogonal() {
        let mut eta = StateVector::basis_index(layout(), 0);
        Gate::H(Target::Register("Z".into())).apply(&mut eta).unwrap();
        let before = eta.clone();
        diffusion(&mut eta, "Z").unwrap();
        for (a, b) in eta.amplitudes().iter().zip(before.amplitudes()) {
            assert!((a - b).norm() < 1e-12);
        }

        // |0⟩ − |1⟩ on Z is orthogonal to |η⟩.
        let h = core::f64::consts::FRAC_1_SQRT_2;
        let mut amps = alloc::vec![Complex64::new(0.0, 0.0); 16];
        amps[0] = Complex64::new(h, 0.0);
        amps[2] = Complex64::new(-h, 0.0);
        let mut s = StateVector::from_amplitudes(layout(), amps).unwrap();
        let before = s.clone();
        diffusion(&mut s, "Z").unwrap();
        for (a, b) in s.amplitudes().iter().zip(before.amplitudes()) {
            assert!((a + b).norm() < 1e-12);
        }
    }

    #[test]
    fn diffusion_is_an_involution() {
        let mut rng = crate::rng::from_seed(1);
        use rand::Rng;
        let amps = (0..16)
            .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        let mut s = StateVector::from_amplitudes(layout(), amps).unwrap();
        s.normalize();
        let before = s.clone();
        diffusion(&mut s, "Z").unwrap();
        diffusion(&mut s, "Z").unwrap();
        for (a, b) in s.amplitudes().iter().zip(before.amplitudes()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn algorithm_validation() {
        let ok = QueryAlgorithm::new(2, 1, 0, alloc::vec![alloc::vec![Gate::H(Target::Register("Z".into()))], alloc::vec![]], "Z").unwrap();
        assert_eq!(ok.queries(), 1);
        assert!(QueryAlgorithm::new(2, 1, 0, alloc::vec![alloc::vec![Gate::X(Target::Register("Q".into()))]], "Z").is_err());
        assert!(QueryAlgorithm::new(2, 1, 0, alloc::vec![alloc::vec![]], "S").is_err());
        let bad_index = Gate::X(Target::Qubit(QubitRef::new("Z", 5)));
        assert!(QueryAlgorithm::new(2, 1, 0, alloc::vec![alloc::vec![bad_index]], "Z").is_err());
        assert!(QueryAlgorithm::new(2, 1, 0, alloc::vec![], "Z").is_err());
        let _ = BitString::zeros(1);
    }
}
