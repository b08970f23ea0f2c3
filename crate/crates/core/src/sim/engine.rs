//! Trajectory compilation and execution.
//!
//! A shot is first compiled into a flat list of operations with every random
//! choice drawn up front, in program order: noise Paulis, readout-flip
//! decisions and the uniforms that pick Born outcomes. Execution then only
//! consumes that list, so the result does not depend on the order in which
//! commuting operations are executed. The default executor exploits this by
//! running operations in a dependency order that keeps blocks small.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::fault::{FaultKind, FaultPosition, FaultSpec};
use super::noise::NoiseModel;
use super::state::RegisterState;
use crate::circuit::{Circuit, Gate};
use crate::error::Result;
use crate::layout::ShotRecord;
use crate::pauli::Pauli;

const LETTERS: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

/// A compiled operation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Op {
    /// Reset to |0>; `u` resolves the discarded outcome if the qubit is live.
    Prep { q: usize, u: f64 },
    Gate1 { gate: Gate, q: usize },
    Cnot { control: usize, target: usize },
    Pauli { q: usize, p: Pauli },
    /// Z measurement. The recorded bit is the outcome XOR the flip for that outcome.
    Measure { q: usize, cbit: usize, u: f64, flip_if_one: bool, flip_if_zero: bool },
}

impl Op {
    fn qubits(&self) -> ([usize; 2], usize) {
        match *self {
            Op::Cnot { control, target } => ([control, target], 2),
            Op::Prep { q, .. } | Op::Gate1 { q, .. } | Op::Pauli { q, .. } | Op::Measure { q, .. } => ([q, 0], 1),
        }
    }
}

/// Where a noise Pauli came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NoiseSource {
    Gate1,
    Gate2,
    Idle,
    Crosstalk,
    Fault,
}

/// A Pauli inserted by the noise model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Injection {
    /// Index of the instruction the noise is attached to.
    pub instruction: usize,
    pub source: NoiseSource,
    pub paulis: Vec<(usize, Pauli)>,
}

/// One sampled trajectory: what to execute and which noise was drawn.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub ops: Vec<Op>,
    pub injections: Vec<Injection>,
    pub num_qubits: usize,
    pub num_cbits: usize,
}

/// RNG for shot `index` of a batch seeded with `base`: ChaCha8 keyed by
/// `base` (via `seed_from_u64`) on stream `index`.
pub fn shot_rng(base: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(base);
    rng.set_stream(index);
    rng
}

fn push_noise(ops: &mut Vec<Op>, inj: &mut Vec<Injection>, instruction: usize, source: NoiseSource, paulis: Vec<(usize, Pauli)>) {
    for &(q, p) in &paulis {
        if p != Pauli::I {
            ops.push(Op::Pauli { q, p });
        }
    }
    inj.push(Injection { instruction, source, paulis });
}

fn fault_paulis(fault: &FaultSpec, operands: &[usize]) -> Vec<(usize, Pauli)> {
    match &fault.kind {
        FaultKind::Pauli(op) => operands.iter().enumerate().map(|(k, &q)| (q, op.letter(k + 1))).collect(),
        FaultKind::BitFlip => Vec::new(),
    }
}

/// Samples a trajectory. `fault` adds one deterministic fault on top of the noise.
pub fn sample_trajectory<R: Rng + ?Sized>(
    circuit: &Circuit,
    noise: &NoiseModel,
    rng: &mut R,
    fault: Option<&FaultSpec>,
) -> Trajectory {
    let n = circuit.num_qubits();
    let mut live = vec![false; n];
    let mut touched = vec![false; n];
    let mut ops = Vec::with_capacity(circuit.instructions.len() * 2);
    let mut inj = Vec::new();
    let (p1, p2, pi, pc) = (noise.gate1(), noise.gate2(), noise.idle(), noise.crosstalk());
    let (pm1, pm0) = (noise.readout1(), noise.readout0());

    for (idx, ins) in circuit.instructions.iter().enumerate() {
        let here = fault.filter(|f| f.instruction == idx);
        if let Some(f) = here.filter(|f| f.position == FaultPosition::Before) {
            push_noise(&mut ops, &mut inj, idx, NoiseSource::Fault, fault_paulis(f, &ins.qubits));
        }
        for &q in &ins.qubits {
            touched[q] = true;
        }
        let mut forced_flip = false;
        match ins.kind {
            Gate::Tick => {
                if pi > 0.0 {
                    for q in 0..n {
                        if live[q] && !touched[q] && rng.gen::<f64>() < pi {
                            let p = LETTERS[rng.gen_range(1..4)];
                            push_noise(&mut ops, &mut inj, idx, NoiseSource::Idle, vec![(q, p)]);
                        }
                    }
                }
                touched.iter_mut().for_each(|t| *t = false);
            }
            Gate::PrepZ | Gate::PrepX => {
                let q = ins.qubits[0];
                let u = if live[q] { rng.gen() } else { 0.0 };
                ops.push(Op::Prep { q, u });
                if ins.kind == Gate::PrepX {
                    ops.push(Op::Gate1 { gate: Gate::H, q });
                }
                live[q] = true;
            }
            Gate::MeasZ | Gate::MeasX => {
                let q = ins.qubits[0];
                if ins.kind == Gate::MeasX {
                    ops.push(Op::Gate1 { gate: Gate::H, q });
                }
                let u: f64 = rng.gen();
                let r: f64 = if pm1 > 0.0 || pm0 > 0.0 { rng.gen() } else { 1.0 };
                forced_flip = here.is_some_and(|f| f.kind == FaultKind::BitFlip);
                ops.push(Op::Measure {
                    q,
                    cbit: ins.cbit.expect("measurement has a cbit"),
                    u,
                    flip_if_one: (r < pm1) ^ forced_flip,
                    flip_if_zero: (r < pm0) ^ forced_flip,
                });
                live[q] = false;
                if pc > 0.0 {
                    for s in 0..n {
                        if live[s] && rng.gen::<f64>() < pc {
                            let p = LETTERS[rng.gen_range(1..4)];
                            push_noise(&mut ops, &mut inj, idx, NoiseSource::Crosstalk, vec![(s, p)]);
                        }
                    }
                }
            }
            Gate::Cnot => {
                let (c, t) = (ins.qubits[0], ins.qubits[1]);
                ops.push(Op::Cnot { control: c, target: t });
                if p2 > 0.0 && rng.gen::<f64>() < p2 {
                    let k = rng.gen_range(1..16);
                    push_noise(&mut ops, &mut inj, idx, NoiseSource::Gate2, vec![(c, LETTERS[k & 3]), (t, LETTERS[k >> 2])]);
                }
            }
            g => {
                let q = ins.qubits[0];
                ops.push(Op::Gate1 { gate: g, q });
                if p1 > 0.0 && rng.gen::<f64>() < p1 {
                    let p = LETTERS[rng.gen_range(1..4)];
                    push_noise(&mut ops, &mut inj, idx, NoiseSource::Gate1, vec![(q, p)]);
                }
            }
        }
        if let Some(f) = here.filter(|f| f.position == FaultPosition::After) {
            if !forced_flip {
                push_noise(&mut ops, &mut inj, idx, NoiseSource::Fault, fault_paulis(f, &ins.qubits));
            } else {
                inj.push(Injection { instruction: idx, source: NoiseSource::Fault, paulis: Vec::new() });
            }
        }
    }
    Trajectory { ops, injections: inj, num_qubits: n, num_cbits: circuit.num_cbits() }
}

/// Execution order of a compiled trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Schedule {
    /// Exactly the compiled order.
    Program,
    /// Any order consistent with per-qubit order, preferring operations that
    /// do not enlarge a block and otherwise the smallest merge.
    Compact,
}

/// Result of executing a trajectory.
#[derive(Debug, Clone)]
pub struct Execution {
    pub record: ShotRecord,
    pub state: RegisterState,
    /// True if the stop predicate fired; the record is then partial.
    pub stopped: bool,
}

fn run_op(state: &mut RegisterState, op: &Op, record: &mut ShotRecord) -> Result<Option<(usize, bool)>> {
    match *op {
        Op::Prep { q, u } => state.prepare(q, u).map(|_| None),
        Op::Gate1 { gate, q } => state.apply_gate(gate, &[q]).map(|_| None),
        Op::Cnot { control, target } => state.cnot(control, target).map(|_| None),
        Op::Pauli { q, p } => state.apply_pauli(q, p).map(|_| None),
        Op::Measure { q, cbit, u, flip_if_one, flip_if_zero } => {
            let outcome = state.measure(q, u)?;
            let bit = outcome ^ if outcome { flip_if_one } else { flip_if_zero };
            record.set(cbit, bit);
            Ok(Some((cbit, bit)))
        }
    }
}

/// Executes `traj`. `stop(cbit, bit)` returning true ends the run early.
pub fn execute(
    traj: &Trajectory,
    state: RegisterState,
    schedule: Schedule,
    stop: Option<&dyn Fn(usize, bool) -> bool>,
) -> Result<Execution> {
    let mut state = state;
    let mut record = ShotRecord::zeros(traj.num_cbits);
    let halt = |m: Option<(usize, bool)>| matches!((stop, m), (Some(f), Some((c, b))) if f(c, b));
    match schedule {
        Schedule::Program => {
            for op in &traj.ops {
                let m = run_op(&mut state, op, &mut record)?;
                if halt(m) {
                    return Ok(Execution { record, state, stopped: true });
                }
            }
        }
        Schedule::Compact => {
            let n = traj.num_qubits;
            let mut queues: Vec<Vec<usize>> = vec![Vec::new(); n];
            for (i, op) in traj.ops.iter().enumerate() {
                let (qs, k) = op.qubits();
                for &q in &qs[..k] {
                    queues[q].push(i);
                }
            }
            let mut head = vec![0usize; n];
            let is_ready = |i: usize, head: &[usize], queues: &[Vec<usize>]| {
                let (qs, k) = traj.ops[i].qubits();
                qs[..k].iter().all(|&q| queues[q].get(head[q]) == Some(&i))
            };
            let mut ready: BTreeSet<usize> = BTreeSet::new();
            for q in 0..n {
                if let Some(&i) = queues[q].first() {
                    if is_ready(i, &head, &queues) {
                        ready.insert(i);
                    }
                }
            }
            while !ready.is_empty() {
                let mut pick = None;
                let mut best: Option<(usize, usize)> = None;
                for &i in &ready {
                    match traj.ops[i] {
                        Op::Cnot { control, target } if !state.same_block(control, target) => {
                            let w = state.merged_width(control, target);
                            if best.is_none_or(|(bw, _)| w < bw) {
                                best = Some((w, i));
                            }
                        }
                        _ => {
                            pick = Some(i);
                            break;
                        }
                    }
                }
                let i = pick.or(best.map(|(_, i)| i)).expect("ready set is nonempty");
                ready.remove(&i);
                let m = run_op(&mut state, &traj.ops[i], &mut record)?;
                if halt(m) {
                    return Ok(Execution { record, state, stopped: true });
                }
                let (qs, k) = traj.ops[i].qubits();
                for &q in &qs[..k] {
                    head[q] += 1;
                    if let Some(&j) = queues[q].get(head[q]) {
                        if is_ready(j, &head, &queues) {
                            ready.insert(j);
                        }
                    }
                }
            }
        }
    }
    Ok(Execution { record, state, stopped: false })
}

/// Runs shot `index` of the batch seeded by `base`, returning the final state too.
pub fn run_shot_full(circuit: &Circuit, noise: &NoiseModel, base: u64, index: u64) -> Result<Execution> {
    let mut rng = shot_rng(base, index);
    let traj = sample_trajectory(circuit, noise, &mut rng, None);
    execute(&traj, RegisterState::new(circuit.num_qubits()), Schedule::Compact, None)
}

pub fn run_shot_indexed(circuit: &Circuit, noise: &NoiseModel, base: u64, index: u64) -> Result<ShotRecord> {
    run_shot_full(circuit, noise, base, index).map(|e| e.record)
}

/// One trajectory; identical to shot 0 of `run_batch(.., seed)`.
pub fn run_shot(circuit: &Circuit, noise: &NoiseModel, seed: u64) -> Result<ShotRecord> {
    circuit.validate()?;
    noise.validate()?;
    run_shot_indexed(circuit, noise, seed, 0)
}

/// Shot `i` uses `shot_rng(base_seed, i)`; output is in shot order.
pub fn run_batch(circuit: &Circuit, noise: &NoiseModel, n_shots: usize, base_seed: u64) -> Result<Vec<ShotRecord>> {
    circuit.validate()?;
    noise.validate()?;
    (0..n_shots as u64).into_par_iter().map(|i| run_shot_indexed(circuit, noise, base_seed, i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{Fragment, Gate};

    fn bell() -> Circuit {
        let mut f = Fragment::new();
        f.gate(Gate::PrepZ, 0);
        f.gate(Gate::PrepZ, 1);
        f.gate(Gate::H, 0);
        f.cnot(0, 1);
        f.measure(0, "m/a");
        f.measure(1, "m/b");
        f.into_circuit()
    }

    #[test]
    fn bell_outcomes_agree_without_noise() {
        let c = bell();
        for s in 0..50 {
            let r = run_shot(&c, &NoiseModel::noiseless(), s).unwrap();
            assert_eq!(r.bit(0), r.bit(1));
        }
    }

    #[test]
    fn same_seed_same_record() {
        let c = bell();
        let n = NoiseModel { p2: 0.3, p_meas0: 0.2, ..NoiseModel::default() };
        for s in 0..20 {
            assert_eq!(run_shot(&c, &n, s).unwrap(), run_shot(&c, &n, s).unwrap());
        }
        let batch = run_batch(&c, &n, 20, 9).unwrap();
        assert_eq!(batch[0], run_shot(&c, &n, 9).unwrap());
        assert_eq!(batch[7], run_shot_indexed(&c, &n, 9, 7).unwrap());
    }

    #[test]
    fn schedules_agree() {
        let c = bell();
        let n = NoiseModel { p1: 0.2, p2: 0.3, p_meas1: 0.1, ..NoiseModel::default() };
        for s in 0..50 {
            let traj = sample_trajectory(&c, &n, &mut shot_rng(s, 0), None);
            let a = execute(&traj, RegisterState::new(2), Schedule::Program, None).unwrap();
            let b = execute(&traj, RegisterState::new(2), Schedule::Compact, None).unwrap();
            assert_eq!(a.record, b.record);
        }
    }

    #[test]
    fn readout_flips_track_true_value() {
        let mut f = Fragment::new();
        f.gate(Gate::PrepZ, 0);
        f.measure(0, "m/a");
        let c = f.into_circuit();
        let only_one = NoiseModel { p_meas1: 1.0, p_meas0: 0.0, ..NoiseModel::noiseless() };
        let n = NoiseModel { enabled: crate::sim::Channels { readout: true, ..crate::sim::Channels::NONE }, ..only_one };
        assert!(!run_shot(&c, &n, 1).unwrap().bit(0));
        let n0 = NoiseModel { p_meas0: 1.0, ..n };
        assert!(run_shot(&c, &n0, 1).unwrap().bit(0));
    }

    #[test]
    fn stop_predicate_halts() {
        let c = bell();
        let traj = sample_trajectory(&c, &NoiseModel::noiseless(), &mut shot_rng(0, 0), None);
        let e = execute(&traj, RegisterState::new(2), Schedule::Program, Some(&|_, _| true)).unwrap();
        assert!(e.stopped);
    }
}
