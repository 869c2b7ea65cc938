//! Named registers and their placement in the basis index.
//!
//! The first-listed register occupies the most significant bits of the
//! basis index, and inside a register local qubit 0 is the most
//! significant bit. A layout `[Z(2), B(1)]` therefore encodes `|z1 z0, b⟩`
//! as index `z << 1 | b`.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Maximum qubit count for state-vector simulation.
pub const MAX_STATE_QUBITS: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Register {
    name: String,
    width: usize,
    shift: usize,
}

impl Register {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Bit position of the register's least significant qubit.
    pub fn shift(&self) -> usize {
        self.shift
    }

    pub fn mask(&self) -> usize {
        ((1usize << self.width) - 1) << self.shift
    }

    /// Value stored in this register for basis index `index`.
    #[inline]
    pub fn extract(&self, index: usize) -> usize {
        (index >> self.shift) & ((1usize << self.width) - 1)
    }

    /// Basis-index contribution of `value` placed in this register.
    #[inline]
    pub fn place(&self, value: usize) -> usize {
        value << self.shift
    }

    /// Global bit position of local qubit `local`.
    #[inline]
    pub fn bit(&self, local: usize) -> usize {
        self.shift + self.width - 1 - local
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegisterLayout {
    registers: Vec<Register>,
    total: usize,
}

impl RegisterLayout {
    pub fn new<I, S>(registers: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, usize)>,
        S: Into<String>,
    {
        Self::with_cap(registers, MAX_STATE_QUBITS)
    }

    pub fn with_cap<I, S>(registers: I, cap: usize) -> Result<Self>
    where
        I: IntoIterator<Item = (S, usize)>,
        S: Into<String>,
    {
        let named: Vec<(String, usize)> = registers
            .into_iter()
            .map(|(n, w)| (n.into(), w))
            .collect();
        for (i, (name, _)) in named.iter().enumerate() {
            if named[..i].iter().any(|(other, _)| other == name) {
                return Err(Error::DuplicateRegister(name.clone()));
            }
        }
        let total: usize = named.iter().map(|(_, w)| *w).sum();
        if total > cap {
            return Err(Error::TooManyQubits { actual: total, cap });
        }
        let mut shift = total;
        let registers = named
            .into_iter()
            .map(|(name, width)| {
                shift -= width;
                Register { name, width, shift }
            })
            .collect();
        Ok(Self { registers, total })
    }

    /// Layout with no qubits; its state space is one-dimensional.
    pub fn empty() -> Self {
        Self {
            registers: Vec::new(),
            total: 0,
        }
    }

    pub fn total_qubits(&self) -> usize {
        self.total
    }

    pub fn dimension(&self) -> usize {
        1usize << self.total
    }

    pub fn registers(&self) -> &[Register] {
        &self.registers
    }

    pub fn contains(&self, name: &str) -> bool {
        self.registers.iter().any(|r| r.name == name)
    }

    pub fn register(&self, name: &str) -> Result<&Register> {
        self.registers
            .iter()
            .find(|r| r.name == name)
            .ok_or_else(|| Error::UnknownRegister(name.to_string()))
    }

    pub fn width(&self, name: &str) -> Result<usize> {
        self.register(name).map(Register::width)
    }

    /// Global bit position of `(register, local qubit)`.
    pub fn bit_position(&self, name: &str, local: usize) -> Result<usize> {
        let reg = self.register(name)?;
        if local >= reg.width {
            return Err(Error::QubitOutOfRange {
                register: name.to_string(),
                index: local,
            });
        }
        Ok(reg.bit(local))
    }

    /// A copy of this layout with one more register appended last.
    pub fn extended(&self, name: &str, width: usize) -> Result<Self> {
        let mut regs: Vec<(String, usize)> = self
            .registers
            .iter()
            .map(|r| (r.name.clone(), r.width))
            .collect();
        regs.push((name.to_string(), width));
        Self::new(regs)
    }

    /// A copy of this layout with `name` removed.
    pub fn without(&self, name: &str) -> Result<Self> {
        self.register(name)?;
        Self::new(
            self.registers
                .iter()
                .filter(|r| r.name != name)
                .map(|r| (r.name.clone(), r.width)),
        )
    }
}
