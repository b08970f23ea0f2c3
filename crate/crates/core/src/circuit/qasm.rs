//! OPENQASM 2.0 emission and a structural reader for the emitted subset.
//!
//! One quantum register `q` and one classical register `c` sized to the shot
//! layout. PREP_Z is `reset`; PREP_X and MEAS_X expand to two statements, so
//! only circuits without them round-trip instruction for instruction.

use std::fmt::Write as _;

use super::{Circuit, Gate, Instruction};
use crate::error::{Error, Result};

pub fn emit_qasm(circuit: &Circuit) -> String {
    let mut out = String::new();
    out.push_str("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    if let Some(kind) = circuit.kind {
        let _ = writeln!(out, "// experiment: {kind}, reuse: {}", circuit.reuse);
    }
    for seg in circuit.layout.segments() {
        let _ = writeln!(out, "// c[{}..{}] {}", seg.start, seg.start + seg.len(), seg.name);
    }
    let _ = writeln!(out, "qreg q[{}];", circuit.num_qubits());
    let _ = writeln!(out, "creg c[{}];", circuit.num_cbits());

    let mut live = vec![false; circuit.num_qubits()];
    for ins in &circuit.instructions {
        let q = |k: usize| ins.qubits[k];
        match ins.kind {
            Gate::PrepZ => {
                live[q(0)] = true;
                let _ = writeln!(out, "reset q[{}];", q(0));
            }
            Gate::PrepX => {
                live[q(0)] = true;
                let _ = writeln!(out, "reset q[{0}];\nh q[{0}];", q(0));
            }
            Gate::Cnot => {
                let _ = writeln!(out, "cx q[{}],q[{}];", q(0), q(1));
            }
            Gate::MeasZ | Gate::MeasX => {
                live[q(0)] = false;
                if ins.kind == Gate::MeasX {
                    let _ = writeln!(out, "h q[{}];", q(0));
                }
                let _ = writeln!(out, "measure q[{}] -> c[{}];", q(0), ins.cbit.expect("measurement has a cbit"));
            }
            Gate::Tick => {
                let active: Vec<String> =
                    live.iter().enumerate().filter(|(_, l)| **l).map(|(i, _)| format!("q[{i}]")).collect();
                if active.is_empty() {
                    out.push_str("barrier q;\n");
                } else {
                    let _ = writeln!(out, "barrier {};", active.join(","));
                }
            }
            g => {
                let _ = writeln!(out, "{} q[{}];", qasm_name(g), q(0));
            }
        }
    }
    out
}

fn qasm_name(g: Gate) -> &'static str {
    match g {
        Gate::H => "h",
        Gate::S => "s",
        Gate::Sdg => "sdg",
        Gate::T => "t",
        Gate::Tdg => "tdg",
        Gate::X => "x",
        Gate::Z => "z",
        _ => unreachable!("{g:?} has no single-statement QASM form"),
    }
}

/// Result of reading emitted QASM back.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QasmProgram {
    pub num_qubits: usize,
    pub num_cbits: usize,
    pub instructions: Vec<Instruction>,
}

fn index(arg: &str, reg: &str, size: usize, line: usize) -> Result<usize> {
    let inner = arg
        .trim()
        .strip_prefix(reg)
        .and_then(|s| s.strip_prefix('['))
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| Error::Parse(format!("line {line}: expected {reg}[i], got `{arg}`")))?;
    let i: usize = inner.parse().map_err(|_| Error::Parse(format!("line {line}: bad index `{inner}`")))?;
    if i >= size {
        return Err(Error::Parse(format!("line {line}: {reg}[{i}] outside register of {size}")));
    }
    Ok(i)
}

fn declared_size(rest: &str, reg: &str, line: usize) -> Result<usize> {
    let r = rest.trim();
    let inner = r
        .strip_prefix(reg)
        .and_then(|s| s.strip_prefix('['))
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| Error::Parse(format!("line {line}: malformed register declaration")))?;
    inner.parse().map_err(|_| Error::Parse(format!("line {line}: bad register size")))
}

/// Reads the subset produced by [`emit_qasm`]. Each `barrier` becomes a TICK.
pub fn parse_qasm(text: &str) -> Result<QasmProgram> {
    let mut nq = None;
    let mut nc = None;
    let mut instructions = Vec::new();
    let mut saw_header = false;
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let stmt = raw.split("//").next().unwrap_or("").trim();
        if stmt.is_empty() {
            continue;
        }
        let stmt = stmt
            .strip_suffix(';')
            .ok_or_else(|| Error::Parse(format!("line {line}: missing `;`")))?
            .trim();
        if !saw_header {
            if stmt != "OPENQASM 2.0" {
                return Err(Error::Parse(format!("line {line}: expected `OPENQASM 2.0;`")));
            }
            saw_header = true;
            continue;
        }
        let (op, rest) = stmt.split_once(char::is_whitespace).unwrap_or((stmt, ""));
        let need = |v: Option<usize>, what: &str| {
            v.ok_or_else(|| Error::Parse(format!("line {line}: {what} used before declaration")))
        };
        match op {
            "include" => {}
            "qreg" => nq = Some(declared_size(rest, "q", line)?),
            "creg" => nc = Some(declared_size(rest, "c", line)?),
            "reset" => instructions.push(Instruction::single(Gate::PrepZ, index(rest, "q", need(nq, "q")?, line)?)),
            "cx" => {
                let (a, b) = rest
                    .split_once(',')
                    .ok_or_else(|| Error::Parse(format!("line {line}: cx needs two operands")))?;
                let n = need(nq, "q")?;
                let ins = Instruction::new(Gate::Cnot, vec![index(a, "q", n, line)?, index(b, "q", n, line)?], None)
                    .map_err(|e| Error::Parse(format!("line {line}: {e}")))?;
                instructions.push(ins);
            }
            "measure" => {
                let (a, b) = rest
                    .split_once("->")
                    .ok_or_else(|| Error::Parse(format!("line {line}: measure needs `->`")))?;
                let q = index(a, "q", need(nq, "q")?, line)?;
                let c = index(b, "c", need(nc, "c")?, line)?;
                instructions.push(Instruction::meas_z(q, c));
            }
            "barrier" => {
                let n = need(nq, "q")?;
                if rest.trim() != "q" {
                    for a in rest.split(',') {
                        index(a, "q", n, line)?;
                    }
                }
                instructions.push(Instruction::tick());
            }
            g => {
                let kind = match g {
                    "h" => Gate::H,
                    "s" => Gate::S,
                    "sdg" => Gate::Sdg,
                    "t" => Gate::T,
                    "tdg" => Gate::Tdg,
                    "x" => Gate::X,
                    "z" => Gate::Z,
                    other => return Err(Error::Parse(format!("line {line}: unsupported statement `{other}`"))),
                };
                instructions.push(Instruction::single(kind, index(rest, "q", need(nq, "q")?, line)?));
            }
        }
    }
    if !saw_header {
        return Err(Error::Parse("empty program".into()));
    }
    Ok(QasmProgram {
        num_qubits: nq.ok_or_else(|| Error::Parse("no qreg".into()))?,
        num_cbits: nc.ok_or_else(|| Error::Parse("no creg".into()))?,
        instructions,
    })
}
