//! Single-fault injection and the exhaustive fault-tolerance check.

use std::fmt;

use rayon::prelude::*;

use super::engine::{execute, sample_trajectory, shot_rng, Execution, Schedule};
use super::logical::{apply_operator, corrected_fidelity, t_state};
use super::noise::NoiseModel;
use super::state::RegisterState;
use crate::circuit::{build_experiment, Circuit, CodeKind, ExperimentKind, Gate};
use crate::codes::steane_code;
use crate::decode::{decode_magic_prep, RejectReason};
use crate::error::{Error, Result};
use crate::layout::{FLAGS, Z_STABILIZERS};
use crate::pauli::{Pauli, PauliOperator};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FaultPosition {
    Before,
    After,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FaultKind {
    /// Pauli over the instruction's operands: letter `k + 1` acts on `qubits[k]`.
    Pauli(PauliOperator),
    /// Flips the recorded bit of a measurement.
    BitFlip,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FaultSpec {
    pub instruction: usize,
    pub position: FaultPosition,
    pub kind: FaultKind,
}

impl fmt::Display for FaultSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pos = match self.position {
            FaultPosition::Before => "before",
            FaultPosition::After => "after",
        };
        match &self.kind {
            FaultKind::Pauli(p) => write!(f, "{p} {pos} instruction {}", self.instruction),
            FaultKind::BitFlip => write!(f, "bit flip on instruction {}", self.instruction),
        }
    }
}

impl FaultSpec {
    pub fn pauli(instruction: usize, position: FaultPosition, letters: &[Pauli]) -> Self {
        Self {
            instruction,
            position,
            kind: FaultKind::Pauli(PauliOperator::new(letters.to_vec(), crate::pauli::Phase::ONE)),
        }
    }

    pub fn validate(&self, circuit: &Circuit) -> Result<()> {
        let ins = circuit
            .instructions
            .get(self.instruction)
            .ok_or_else(|| Error::InvalidFault(format!("no instruction {}", self.instruction)))?;
        match (&self.kind, ins.kind) {
            (_, Gate::Tick) => Err(Error::InvalidFault("TICK is not a fault location".into())),
            (FaultKind::BitFlip, k) if k.is_measurement() => Ok(()),
            (FaultKind::BitFlip, k) => Err(Error::InvalidFault(format!("bit flip on non-measurement {k:?}"))),
            (FaultKind::Pauli(p), k) => {
                if p.num_qubits() != ins.qubits.len() {
                    return Err(Error::InvalidFault(format!(
                        "{}-qubit Pauli on a {}-qubit instruction",
                        p.num_qubits(),
                        ins.qubits.len()
                    )));
                }
                if p.is_identity() {
                    return Err(Error::InvalidFault("identity Pauli is not a fault".into()));
                }
                if k.is_measurement() && self.position == FaultPosition::After {
                    return Err(Error::InvalidFault("Pauli after a measurement acts on a dead qubit".into()));
                }
                if k.is_preparation() && self.position == FaultPosition::Before {
                    return Err(Error::InvalidFault("Pauli before a preparation is erased".into()));
                }
                Ok(())
            }
        }
    }
}

/// One fault per (gate, nontrivial Pauli on its support), one per preparation
/// (X after |0>, Z after |+>) and one bit flip per measurement.
pub fn enumerate_fault_locations(circuit: &Circuit) -> Vec<FaultSpec> {
    use Pauli::*;
    let letters = [I, X, Y, Z];
    let mut out = Vec::new();
    for (i, ins) in circuit.instructions.iter().enumerate() {
        match ins.kind {
            Gate::Tick => {}
            Gate::PrepZ => out.push(FaultSpec::pauli(i, FaultPosition::After, &[X])),
            Gate::PrepX => out.push(FaultSpec::pauli(i, FaultPosition::After, &[Z])),
            Gate::MeasZ | Gate::MeasX => {
                out.push(FaultSpec { instruction: i, position: FaultPosition::After, kind: FaultKind::BitFlip })
            }
            Gate::Cnot => {
                for k in 1..16 {
                    out.push(FaultSpec::pauli(i, FaultPosition::After, &[letters[k & 3], letters[k >> 2]]));
                }
            }
            _ => {
                for p in Pauli::NONTRIVIAL {
                    out.push(FaultSpec::pauli(i, FaultPosition::After, &[p]));
                }
            }
        }
    }
    out
}

/// Noiseless run with `fault` inserted; Born outcomes drawn from `seed`.
pub fn run_with_fault(circuit: &Circuit, fault: &FaultSpec, seed: u64) -> Result<Execution> {
    fault.validate(circuit)?;
    run_faulted(circuit, Some(fault), seed, None)
}

fn run_faulted(
    circuit: &Circuit,
    fault: Option<&FaultSpec>,
    seed: u64,
    stop: Option<&dyn Fn(usize, bool) -> bool>,
) -> Result<Execution> {
    let mut rng = shot_rng(seed, 0);
    let traj = sample_trajectory(circuit, &NoiseModel::noiseless(), &mut rng, fault);
    execute(&traj, RegisterState::new(circuit.num_qubits()), Schedule::Compact, stop)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FtOptions {
    /// Upper bound on branch samples per fault.
    pub max_samples: usize,
    /// Samples taken before giving up on a fault that was always rejected.
    pub min_samples: usize,
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for FtOptions {
    fn default() -> Self {
        Self { max_samples: 40, min_samples: 2, tolerance: 1e-9, seed: 0x5eed }
    }
}

/// Dispositions of the branch samples of one fault (or of the fault-free control).
#[derive(Debug, Clone, PartialEq)]
pub struct FaultOutcome {
    pub fault: Option<FaultSpec>,
    pub samples: usize,
    pub rejected: usize,
    pub accepted_correct: usize,
    pub accepted_wrong: usize,
    /// Whether an accepted sample with frame a = 0 / a = 1 was seen.
    pub frames_seen: [bool; 2],
    pub min_fidelity: f64,
    pub reject_reason: Option<RejectReason>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FtReport {
    pub kind: Option<ExperimentKind>,
    pub control: FaultOutcome,
    pub outcomes: Vec<FaultOutcome>,
}

impl FtReport {
    pub fn total_faults(&self) -> usize {
        self.outcomes.len()
    }

    pub fn accepted_wrong(&self) -> usize {
        self.outcomes.iter().map(|o| o.accepted_wrong).sum::<usize>() + self.control.accepted_wrong
    }

    pub fn counterexamples(&self) -> impl Iterator<Item = &FaultOutcome> {
        self.outcomes.iter().filter(|o| o.accepted_wrong > 0)
    }

    /// Faults that were accepted at least once but never showed both frames.
    pub fn incomplete(&self) -> usize {
        self.outcomes
            .iter()
            .filter(|o| o.rejected < o.samples && !(o.frames_seen[0] && o.frames_seen[1]))
            .count()
    }

    pub fn passed(&self) -> bool {
        self.accepted_wrong() == 0
    }

    /// Fault counts with at least one sample in each disposition.
    pub fn disposition_counts(&self) -> (usize, usize, usize) {
        let mut c = (0, 0, 0);
        for o in &self.outcomes {
            c.0 += (o.rejected > 0) as usize;
            c.1 += (o.accepted_correct > 0) as usize;
            c.2 += (o.accepted_wrong > 0) as usize;
        }
        c
    }
}

/// Runs [`ft_check_circuit`] on the preparation circuit of `kind`.
pub fn ft_check(kind: ExperimentKind, opts: &FtOptions) -> Result<FtReport> {
    if kind != ExperimentKind::MagicPrep {
        return Err(Error::InvalidCircuit(format!("fault-tolerance check runs on magic-prep, not {kind}")));
    }
    ft_check_circuit(&build_experiment(kind, false), opts)
}

/// For every enumerated fault, samples measurement branches until both
/// frames were accepted (or the sample budget runs out) and checks that every
/// accepted Steane state, after the frame correction and an ideal weight-1
/// correction, equals the encoded T state.
pub fn ft_check_circuit(circuit: &Circuit, opts: &FtOptions) -> Result<FtReport> {
    if circuit.layout.segment(crate::layout::STEANE_DATA).is_some() {
        return Err(Error::InvalidCircuit("the Steane block must stay unmeasured".into()));
    }
    let steane = circuit
        .block(0, CodeKind::Steane)
        .ok_or_else(|| Error::InvalidCircuit("circuit has no Steane block".into()))?
        .qubits();
    let code = steane_code();
    let target = t_state(&code);
    let layout = &circuit.layout;
    let abortable: Vec<bool> = (0..layout.len())
        .map(|i| {
            let p = layout.path_of(i).unwrap_or_default();
            p.starts_with(&format!("{FLAGS}/")) || p.starts_with(&format!("{Z_STABILIZERS}/"))
        })
        .collect();
    let stop = |c: usize, b: bool| b && abortable[c];

    let evaluate = |fault: Option<&FaultSpec>, salt: u64| -> Result<FaultOutcome> {
        let mut o = FaultOutcome {
            fault: fault.cloned(),
            samples: 0,
            rejected: 0,
            accepted_correct: 0,
            accepted_wrong: 0,
            frames_seen: [false; 2],
            min_fidelity: 1.0,
            reject_reason: None,
        };
        while o.samples < opts.max_samples {
            let seed = opts.seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ (o.samples as u64) << 48;
            let run = run_faulted(circuit, fault, seed, Some(&stop))?;
            o.samples += 1;
            let decoded = if run.stopped { Err(RejectReason::Flag) } else { decode_magic_prep(&run.record, layout)? };
            match decoded {
                Err(r) => {
                    o.rejected += 1;
                    o.reject_reason.get_or_insert(if run.stopped {
                        if preselect_reason_is_flag(&run.record, layout) { RejectReason::Flag } else { RejectReason::ZStabilizer }
                    } else {
                        r
                    });
                }
                Ok(a) => {
                    let mut psi = run.state.amplitudes_of(&steane)?;
                    if a {
                        psi = apply_operator(&psi, &code.logical_z);
                    }
                    let fid = corrected_fidelity(&psi, &target, code.n);
                    o.min_fidelity = o.min_fidelity.min(fid);
                    if (fid - 1.0).abs() <= opts.tolerance {
                        o.accepted_correct += 1;
                    } else {
                        o.accepted_wrong += 1;
                    }
                    o.frames_seen[a as usize] = true;
                }
            }
            let both = o.frames_seen[0] && o.frames_seen[1];
            let hopeless = o.samples >= opts.min_samples && o.rejected == o.samples;
            if both || hopeless || o.accepted_wrong > 0 {
                break;
            }
        }
        Ok(o)
    };

    let control = evaluate(None, u64::MAX)?;
    let faults = enumerate_fault_locations(circuit);
    let outcomes = faults
        .par_iter()
        .enumerate()
        .map(|(i, f)| evaluate(Some(f), i as u64))
        .collect::<Result<Vec<_>>>()?;
    Ok(FtReport { kind: circuit.kind, control, outcomes })
}

fn preselect_reason_is_flag(record: &crate::layout::ShotRecord, layout: &crate::layout::ShotLayout) -> bool {
    record.segment(layout, FLAGS).is_some_and(|s| s.iter().any(|&b| b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{Fragment, Gate};

    #[test]
    fn enumeration_counts() {
        let mut f = Fragment::new();
        f.gate(Gate::PrepZ, 0);
        f.gate(Gate::PrepZ, 1);
        f.cnot(0, 1);
        f.measure(0, "m/a");
        let faults = enumerate_fault_locations(&f.into_circuit());
        assert_eq!(faults.len(), 2 + 15 + 1);

        let mut g = Fragment::new();
        g.gate(Gate::PrepZ, 0);
        g.measure(0, "m/a");
        assert_eq!(enumerate_fault_locations(&g.into_circuit()).len(), 2);
    }

    #[test]
    fn invalid_faults() {
        let mut f = Fragment::new();
        f.gate(Gate::PrepZ, 0);
        f.gate(Gate::H, 0);
        f.measure(0, "m/a");
        let c = f.into_circuit();
        let h = c.instructions.iter().position(|i| i.kind == Gate::H).unwrap();
        assert!(run_with_fault(&c, &FaultSpec::pauli(h, FaultPosition::After, &[Pauli::I]), 0).is_err());
        assert!(run_with_fault(&c, &FaultSpec::pauli(h, FaultPosition::After, &[Pauli::X, Pauli::X]), 0).is_err());
        assert!(run_with_fault(&c, &FaultSpec { instruction: h, position: FaultPosition::After, kind: FaultKind::BitFlip }, 0).is_err());
        assert!(run_with_fault(&c, &FaultSpec::pauli(99, FaultPosition::After, &[Pauli::X]), 0).is_err());
    }

    #[test]
    fn bit_flip_fault_flips_record() {
        let mut f = Fragment::new();
        f.gate(Gate::PrepZ, 0);
        f.measure(0, "m/a");
        let c = f.into_circuit();
        let m = c.instructions.iter().position(|i| i.kind == Gate::MeasZ).unwrap();
        let e = run_with_fault(&c, &FaultSpec { instruction: m, position: FaultPosition::After, kind: FaultKind::BitFlip }, 3).unwrap();
        assert!(e.record.bit(0));
    }
}
