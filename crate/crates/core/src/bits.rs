//! Fixed-width bitstrings, most significant bit first.

use alloc::string::String;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};

/// A bitstring of up to 64 bits. Character 0 of the textual form is the
/// most significant bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString {
    value: u64,
    width: usize,
}

impl BitString {
    pub fn new(value: u64, width: usize) -> Result<Self> {
        if width > 64 || (width < 64 && value >> width != 0) {
            return Err(Error::BitString(alloc::format!("{value} does not fit in {width} bits")));
        }
        Ok(Self { value, width })
    }

    pub fn zeros(width: usize) -> Self {
        Self { value: 0, width }
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Bit `i`, counted from the most significant end.
    pub fn bit(&self, i: usize) -> bool {
        debug_assert!(i < self.width);
        (self.value >> (self.width - 1 - i)) & 1 == 1
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.len() > 64 {
            return Err(Error::BitString(String::from(s)));
        }
        let mut value = 0u64;
        for c in s.chars() {
            value = (value << 1)
                | match c {
                    '0' => 0,
                    '1' => 1,
                    _ => return Err(Error::BitString(String::from(s))),
                };
        }
        Ok(Self {
            value,
            width: s.len(),
        })
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.width {
            f.write_str(if self.bit(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}
