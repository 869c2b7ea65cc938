//! ```text
//! registers Z=2 B=1 T=0; measure Z
//! gate H Z
//! gate ROT 0.25 B[0]
//! oracle
//! gate DIFF Z
//! gate CNOT Z[0] B[0]
//! ```

use std::fmt::Write;

use noisy_oracle_core::circuit::{Gate, QueryAlgorithm, Target};
use noisy_oracle_core::layout::RegisterLayout;
use noisy_oracle_core::state::QubitRef;

use super::{content_lines, ParseError};

fn parse_qubit(line: usize, s: &str) -> Result<QubitRef, ParseError> {
    let (reg, rest) = s
        .split_once('[')
        .ok_or_else(|| ParseError::new(line, format!("expected `R[i]`, got `{s}`")))?;
    let index = rest
        .strip_suffix(']')
        .and_then(|i| i.parse::<usize>().ok())
        .ok_or_else(|| ParseError::new(line, format!("bad qubit index in `{s}`")))?;
    Ok(QubitRef::new(reg, index))
}

fn parse_target(line: usize, s: &str) -> Result<Target, ParseError> {
    if s.contains('[') {
        parse_qubit(line, s).map(Target::Qubit)
    } else {
        Ok(Target::Register(s.to_string()))
    }
}

fn format_target(t: &Target) -> String {
    match t {
        Target::Qubit(q) => format!("{}[{}]", q.register, q.index),
        Target::Register(r) => r.clone(),
    }
}

fn parse_header(line: usize, s: &str) -> Result<([usize; 3], String), ParseError> {
    let bad = || ParseError::new(line, "expected `registers Z=<w> B=<w> T=<w>; measure <reg>`");
    let (regs, measure) = s.split_once(';').ok_or_else(bad)?;
    let mut words = regs.split_whitespace();
    if words.next() != Some("registers") {
        return Err(bad());
    }
    let mut widths = [0usize; 3];
    for (slot, name) in widths.iter_mut().zip(["Z", "B", "T"]) {
        let word = words.next().ok_or_else(bad)?;
        let value = word
            .strip_prefix(name)
            .and_then(|w| w.strip_prefix('='))
            .ok_or_else(bad)?;
        *slot = value
            .parse()
            .map_err(|_| ParseError::new(line, format!("bad width `{value}` for {name}")))?;
    }
    if words.next().is_some() {
        return Err(bad());
    }
    let mut words = measure.split_whitespace();
    match (words.next(), words.next(), words.next()) {
        (Some("measure"), Some(reg), None) => Ok((widths, reg.to_string())),
        _ => Err(bad()),
    }
}

fn parse_gate(line: usize, args: &[&str]) -> Result<Gate, ParseError> {
    let arity = |n: usize| {
        if args.len() == n + 1 {
            Ok(())
        } else {
            Err(ParseError::new(line, format!("gate {} takes {n} arguments", args[0])))
        }
    };
    match args[0] {
        "H" | "X" | "Z" => {
            arity(1)?;
            let t = parse_target(line, args[1])?;
            Ok(match args[0] {
                "H" => Gate::H(t),
                "X" => Gate::X(t),
                _ => Gate::Z(t),
            })
        }
        "ROT" => {
            arity(2)?;
            let theta: f64 = args[1]
                .parse()
                .map_err(|_| ParseError::new(line, format!("bad angle `{}`", args[1])))?;
            Ok(Gate::Rot {
                theta,
                target: parse_target(line, args[2])?,
            })
        }
        "CNOT" => {
            arity(2)?;
            Ok(Gate::Cnot {
                control: parse_qubit(line, args[1])?,
                target: parse_qubit(line, args[2])?,
            })
        }
        "DIFF" => {
            arity(1)?;
            if args[1].contains('[') {
                return Err(ParseError::new(line, "DIFF acts on a whole register"));
            }
            Ok(Gate::Diffusion(args[1].to_string()))
        }
        other => Err(ParseError::new(line, format!("unknown gate `{other}`"))),
    }
}

pub fn parse_algorithm(text: &str) -> Result<QueryAlgorithm, ParseError> {
    let mut lines = content_lines(text);
    let (header_line, header) = lines.next().ok_or_else(|| ParseError::new(0, "empty algorithm"))?;
    let (widths, measure) = parse_header(header_line, header)?;
    let layout = RegisterLayout::new([("Z", widths[0]), ("B", widths[1]), ("T", widths[2])])
        .map_err(|e| ParseError::new(header_line, e.to_string()))?;
    let mut segments = vec![Vec::new()];
    let mut last = header_line;
    for (line, content) in lines {
        last = line;
        let words: Vec<&str> = content.split_whitespace().collect();
        match words[0] {
            "oracle" if words.len() == 1 => segments.push(Vec::new()),
            "gate" if words.len() >= 2 => {
                let gate = parse_gate(line, &words[1..])?;
                gate.validate(&layout).map_err(|e| ParseError::new(line, e.to_string()))?;
                segments.last_mut().expect("non-empty").push(gate);
            }
            _ => return Err(ParseError::new(line, format!("expected `gate …` or `oracle`, got `{content}`"))),
        }
    }
    QueryAlgorithm::new(widths[0], widths[1], widths[2], segments, &measure).map_err(|e| ParseError::new(last, e.to_string()))
}

pub fn write_algorithm(algo: &QueryAlgorithm) -> String {
    let mut out = format!(
        "registers Z={} B={} T={}; measure {}\n",
        algo.input_width(),
        algo.output_width(),
        algo.workspace_width(),
        algo.measured_register()
    );
    for (i, seg) in algo.segments().iter().enumerate() {
        if i > 0 {
            out.push_str("oracle\n");
        }
        for gate in seg {
            let body = match gate {
                Gate::H(t) => format!("H {}", format_target(t)),
                Gate::X(t) => format!("X {}", format_target(t)),
                Gate::Z(t) => format!("Z {}", format_target(t)),
                Gate::Rot { theta, target } => format!("ROT {theta:?} {}", format_target(target)),
                Gate::Cnot { control, target } => format!(
                    "CNOT {}[{}] {}[{}]",
                    control.register, control.index, target.register, target.index
                ),
                Gate::Diffusion(r) => format!("DIFF {r}"),
            };
            writeln!(out, "gate {body}").expect("writing to a String");
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const GROVER: &str = "\
registers Z=2 B=1 T=0; measure Z
gate H Z
gate X B
gate H B
oracle
gate DIFF Z
";

    #[test]
    fn parse_and_write() {
        let algo = parse_algorithm(GROVER).unwrap();
        assert_eq!(algo.queries(), 1);
        assert_eq!(algo.segments()[0].len(), 3);
        assert_eq!(write_algorithm(&algo), GROVER);
    }

    #[test]
    fn matches_library_grover() {
        let algo = parse_algorithm(GROVER).unwrap();
        assert_eq!(algo, noisy_oracle_core::grover::grover_algorithm(2, 1).unwrap());
    }

    #[test]
    fn rotation_angles_round_trip_exactly() {
        for theta in [0.1, -1e-300, std::f64::consts::PI / 7.0, 12345.678901234567] {
            let text = format!("registers Z=1 B=1 T=1; measure T\ngate ROT {theta:?} T[0]\n");
            let algo = parse_algorithm(&text).unwrap();
            match &algo.segments()[0][0] {
                Gate::Rot { theta: t, .. } => assert_eq!(t.to_bits(), theta.to_bits()),
                _ => unreachable!(),
            }
            assert_eq!(write_algorithm(&algo), text);
        }
    }

    #[test]
    fn errors_name_the_line() {
        let e = parse_algorithm("registers Z=2 B=1 T=0; measure Z\ngate H Q\n").unwrap_err();
        assert_eq!(e.line, 2);
        let e = parse_algorithm("registers Z=2 B=1 T=0; measure Z\n\ngate FOO Z\n").unwrap_err();
        assert_eq!(e.line, 3);
        let e = parse_algorithm("registers Z=2 B=1; measure Z\n").unwrap_err();
        assert_eq!(e.line, 1);
        let e = parse_algorithm("registers Z=2 B=1 T=0; measure Z\ngate CNOT Z[0] Z[0]\n").unwrap_err();
        assert_eq!(e.line, 2);
        let e = parse_algorithm("registers Z=2 B=1 T=0; measure Z\ngate H Z[5]\n").unwrap_err();
        assert_eq!(e.line, 2);
    }
}
