use std::fmt::Write;

use noisy_oracle_core::bits::BitString;
use noisy_oracle_core::oracle::TruthTable;

use super::{content_lines, ParseError};

/// One `zbits -> fbits` line per input, every input exactly once.
pub fn parse_truth_table(text: &str) -> Result<TruthTable, ParseError> {
    let mut widths: Option<(usize, usize)> = None;
    let mut entries: Vec<Option<u64>> = Vec::new();
    let mut last_line = 0;
    for (line, content) in content_lines(text) {
        last_line = line;
        let (lhs, rhs) = content
            .split_once("->")
            .ok_or_else(|| ParseError::new(line, "expected `input -> output`"))?;
        let z: BitString = lhs.trim().parse().map_err(|e| ParseError::new(line, format!("{e}")))?;
        let f: BitString = rhs.trim().parse().map_err(|e| ParseError::new(line, format!("{e}")))?;
        let (n, m) = *widths.get_or_insert((z.width(), f.width()));
        if z.width() != n || f.width() != m {
            return Err(ParseError::new(
                line,
                format!("widths {}->{} differ from {n}->{m}", z.width(), f.width()),
            ));
        }
        if n > 20 {
            return Err(ParseError::new(line, "input width above 20"));
        }
        if entries.is_empty() {
            entries = vec![None; 1 << n];
        }
        let slot = &mut entries[z.value() as usize];
        if slot.is_some() {
            return Err(ParseError::new(line, format!("input {z} listed twice")));
        }
        *slot = Some(f.value());
    }
    let (n, m) = widths.ok_or_else(|| ParseError::new(0, "no entries"))?;
    let table = entries
        .iter()
        .enumerate()
        .map(|(z, e)| {
            e.ok_or_else(|| {
                ParseError::new(
                    last_line,
                    format!("input {} missing", BitString::new(z as u64, n).expect("fits")),
                )
            })
        })
        .collect::<Result<Vec<u64>, _>>()?;
    TruthTable::new(n, m, table).map_err(|e| ParseError::new(last_line, e.to_string()))
}

/// Lines in increasing input order.
pub fn write_truth_table(f: &TruthTable) -> String {
    let (n, m) = (f.input_width(), f.output_width());
    let mut out = String::new();
    for (z, &v) in f.entries().iter().enumerate() {
        let z = BitString::new(z as u64, n).expect("fits");
        let v = BitString::new(v, m).expect("fits");
        writeln!(out, "{z} -> {v}").expect("writing to a String");
    }
    out
}
