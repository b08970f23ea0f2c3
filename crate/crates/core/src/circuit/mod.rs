//! Gate-level circuit IR, protocol fragments and OPENQASM 2.0 emission.

mod protocol;
pub mod qasm;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::layout::ShotLayout;

pub use protocol::{
    build_experiment, build_experiment_with, destructive_measurement, prep_qrm_plus, prep_steane_zero,
    qrm_z_stabilizer_round, round_subrounds, steane_pair_cnot, switch_cnot, transversal_t, BuildOptions,
    RoundAncillas, QRM_ENCODER_CNOTS, QRM_ENCODER_PIVOTS, QRM_FLAG_SUPPORT, STEANE_ENCODER_CNOTS,
    STEANE_ENCODER_PIVOTS, STEANE_FLAG_SUPPORT,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Gate {
    PrepZ,
    PrepX,
    H,
    S,
    Sdg,
    T,
    Tdg,
    X,
    Z,
    Cnot,
    MeasZ,
    MeasX,
    Tick,
}

impl Gate {
    pub fn arity(self) -> usize {
        match self {
            Gate::Tick => 0,
            Gate::Cnot => 2,
            _ => 1,
        }
    }

    pub fn is_measurement(self) -> bool {
        matches!(self, Gate::MeasZ | Gate::MeasX)
    }

    pub fn is_preparation(self) -> bool {
        matches!(self, Gate::PrepZ | Gate::PrepX)
    }

    /// Unitary gates, i.e. the locations that receive gate noise.
    pub fn is_unitary(self) -> bool {
        !(self.is_measurement() || self.is_preparation() || self == Gate::Tick)
    }
}

/// One circuit operation. Qubit indices are 0-based register positions.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Instruction {
    pub kind: Gate,
    /// Operands; `[control, target]` for CNOT.
    pub qubits: Vec<usize>,
    /// Classical destination, measurements only.
    pub cbit: Option<usize>,
}

impl Instruction {
    pub fn new(kind: Gate, qubits: Vec<usize>, cbit: Option<usize>) -> Result<Self> {
        if qubits.len() != kind.arity() {
            return Err(Error::InvalidInstruction(format!(
                "{kind:?} takes {} operand(s), got {}",
                kind.arity(),
                qubits.len()
            )));
        }
        if kind == Gate::Cnot && qubits[0] == qubits[1] {
            return Err(Error::InvalidInstruction("CNOT control equals target".into()));
        }
        if kind.is_measurement() != cbit.is_some() {
            return Err(Error::InvalidInstruction(format!(
                "{kind:?} {} a classical bit",
                if kind.is_measurement() { "needs" } else { "cannot take" }
            )));
        }
        Ok(Self { kind, qubits, cbit })
    }

    pub fn single(kind: Gate, q: usize) -> Self {
        Self::new(kind, vec![q], None).expect("single-qubit gate")
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Self::new(Gate::Cnot, vec![control, target], None).expect("valid CNOT")
    }

    pub fn meas_z(q: usize, cbit: usize) -> Self {
        Self { kind: Gate::MeasZ, qubits: vec![q], cbit: Some(cbit) }
    }

    pub fn tick() -> Self {
        Self { kind: Gate::Tick, qubits: Vec::new(), cbit: None }
    }
}

/// What a physical qubit is used for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QubitRole {
    SteaneData,
    QrmData,
    AncillaSyndrome,
    AncillaFlag,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CodeKind {
    Steane,
    Qrm,
}

impl CodeKind {
    pub fn size(self) -> usize {
        match self {
            CodeKind::Steane => 7,
            CodeKind::Qrm => 15,
        }
    }

    pub fn data_segment(self) -> &'static str {
        match self {
            CodeKind::Steane => crate::layout::STEANE_DATA,
            CodeKind::Qrm => crate::layout::QRM_DATA,
        }
    }

    fn role(self) -> QubitRole {
        match self {
            CodeKind::Steane => QubitRole::SteaneData,
            CodeKind::Qrm => QubitRole::QrmData,
        }
    }
}

/// A code block occupying `size` consecutive qubits from `base`.
///
/// Code labels are 1-based: label `j` lives on register qubit `base + j - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CodeBlock {
    pub code: CodeKind,
    pub base: usize,
}

impl CodeBlock {
    pub fn steane(base: usize) -> Self {
        Self { code: CodeKind::Steane, base }
    }

    pub fn qrm(base: usize) -> Self {
        Self { code: CodeKind::Qrm, base }
    }

    pub fn qubit(&self, label: usize) -> usize {
        assert!(label >= 1 && label <= self.code.size(), "label {label} outside block");
        self.base + label - 1
    }

    pub fn qubits(&self) -> Vec<usize> {
        (self.base..self.base + self.code.size()).collect()
    }
}

/// Measurement basis of logical readout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Basis {
    X,
    Y,
    Z,
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Basis::X => "x",
            Basis::Y => "y",
            Basis::Z => "z",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExperimentKind {
    MagicPrep,
    SingleCopy(Basis),
    TwoCopy,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 5] = [
        ExperimentKind::MagicPrep,
        ExperimentKind::SingleCopy(Basis::X),
        ExperimentKind::SingleCopy(Basis::Y),
        ExperimentKind::SingleCopy(Basis::Z),
        ExperimentKind::TwoCopy,
    ];

    pub fn layout(self) -> ShotLayout {
        match self {
            ExperimentKind::MagicPrep => ShotLayout::magic_prep(),
            ExperimentKind::SingleCopy(_) => ShotLayout::single_copy(),
            ExperimentKind::TwoCopy => ShotLayout::two_copy(),
        }
    }

    pub fn copies(self) -> usize {
        match self {
            ExperimentKind::TwoCopy => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExperimentKind::MagicPrep => f.write_str("magic-prep"),
            ExperimentKind::SingleCopy(b) => write!(f, "single-copy-{b}"),
            ExperimentKind::TwoCopy => f.write_str("two-copy"),
        }
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim().to_ascii_lowercase().as_str() {
            "magic-prep" => ExperimentKind::MagicPrep,
            "single-copy-x" => ExperimentKind::SingleCopy(Basis::X),
            "single-copy-y" => ExperimentKind::SingleCopy(Basis::Y),
            "single-copy-z" => ExperimentKind::SingleCopy(Basis::Z),
            "two-copy" => ExperimentKind::TwoCopy,
            other => return Err(Error::UnknownKind(other.to_string())),
        })
    }
}

/// A reusable piece of circuit arranged in parallel layers.
///
/// Measurement `cbit`s index into `cbit_labels`, which hold `segment/label`
/// paths relative to the copy prefix (e.g. `flags/init-steane`).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Fragment {
    layers: Vec<Vec<Instruction>>,
    cbit_labels: Vec<String>,
    roles: BTreeMap<usize, QubitRole>,
    depth: BTreeMap<usize, usize>,
}

impl Fragment {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends `instr` in the earliest layer after every earlier use of its qubits.
    pub fn push(&mut self, instr: Instruction) {
        let layer = instr.qubits.iter().filter_map(|q| self.depth.get(q)).max().map_or(0, |d| d + 1);
        if self.layers.len() <= layer {
            self.layers.resize_with(layer + 1, Vec::new);
        }
        for &q in &instr.qubits {
            self.depth.insert(q, layer);
        }
        self.layers[layer].push(instr);
    }

    pub fn gate(&mut self, kind: Gate, q: usize) {
        self.push(Instruction::single(kind, q));
    }

    pub fn cnot(&mut self, control: usize, target: usize) {
        self.push(Instruction::cnot(control, target));
    }

    /// Z-basis measurement into the bit named `label`.
    pub fn measure(&mut self, q: usize, label: impl Into<String>) {
        let cbit = self.cbit_labels.len();
        self.cbit_labels.push(label.into());
        self.push(Instruction::meas_z(q, cbit));
    }

    pub fn set_role(&mut self, q: usize, role: QubitRole) {
        self.roles.insert(q, role);
    }

    pub fn set_block_roles(&mut self, block: CodeBlock) {
        for q in block.qubits() {
            self.roles.insert(q, block.code.role());
        }
    }

    pub fn layers(&self) -> &[Vec<Instruction>] {
        &self.layers
    }

    pub fn cbit_labels(&self) -> &[String] {
        &self.cbit_labels
    }

    pub fn roles(&self) -> &BTreeMap<usize, QubitRole> {
        &self.roles
    }

    pub fn instructions(&self) -> impl Iterator<Item = &Instruction> {
        self.layers.iter().flatten()
    }

    pub fn count(&self, kind: Gate) -> usize {
        self.instructions().filter(|i| i.kind == kind).count()
    }

    /// Label of the bit written by a measurement instruction.
    pub fn cbit_label(&self, instr: &Instruction) -> Option<&str> {
        instr.cbit.map(|c| self.cbit_labels[c].as_str())
    }

    /// Moves every qubit's leading preparation (and a directly following H)
    /// as late as its first entangling use allows.
    pub fn defer_preparations(mut self) -> Self {
        let qubits: BTreeSet<usize> = self.instructions().flat_map(|i| i.qubits.clone()).collect();
        for q in qubits {
            let mut timeline: Vec<(usize, usize)> = Vec::new();
            for (l, layer) in self.layers.iter().enumerate() {
                for (k, ins) in layer.iter().enumerate() {
                    if ins.qubits.contains(&q) {
                        timeline.push((l, k));
                    }
                }
            }
            let lead = timeline
                .iter()
                .take_while(|&&(l, k)| {
                    let ins = &self.layers[l][k];
                    ins.qubits.len() == 1 && matches!(ins.kind, Gate::PrepZ | Gate::PrepX | Gate::H)
                })
                .count();
            let starts_with_prep = timeline
                .first()
                .is_some_and(|&(l, k)| self.layers[l][k].kind.is_preparation());
            if !starts_with_prep || lead == 0 || lead == timeline.len() {
                continue;
            }
            let first_use = timeline[lead].0;
            let moved: Vec<(usize, usize)> = timeline[..lead].to_vec();
            // move from the last leading op backwards so indices in earlier layers stay valid
            let mut target = first_use;
            let mut extracted = Vec::new();
            for &(l, k) in moved.iter().rev() {
                target -= 1;
                if target <= l {
                    break;
                }
                extracted.push((l, k, target));
            }
            let mut taken: Vec<(usize, Instruction)> = Vec::new();
            let mut by_layer: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
            for &(l, k, t) in &extracted {
                by_layer.entry(l).or_default().push(k);
                taken.push((t, self.layers[l][k].clone()));
            }
            for (l, mut ks) in by_layer {
                ks.sort_unstable_by(|a, b| b.cmp(a));
                for k in ks {
                    self.layers[l].remove(k);
                }
            }
            taken.sort_by_key(|(t, _)| *t);
            for (t, ins) in taken {
                self.layers[t].push(ins);
            }
        }
        self.layers.retain(|l| !l.is_empty());
        self
    }

    /// Runs two fragments side by side, layer by layer. Their qubits must be disjoint.
    pub fn parallel(mut self, other: Fragment) -> Fragment {
        let offset = self.cbit_labels.len();
        if self.layers.len() < other.layers.len() {
            self.layers.resize_with(other.layers.len(), Vec::new);
        }
        for (l, layer) in other.layers.into_iter().enumerate() {
            for mut ins in layer {
                if let Some(c) = ins.cbit.as_mut() {
                    *c += offset;
                }
                self.layers[l].push(ins);
            }
        }
        self.cbit_labels.extend(other.cbit_labels);
        self.roles.extend(other.roles);
        let depth = self.layers.len();
        for q in other.depth.keys() {
            self.depth.insert(*q, depth.saturating_sub(1));
        }
        self
    }

    /// Appends `other` after every layer of `self`.
    pub fn then(mut self, other: Fragment) -> Fragment {
        let offset = self.cbit_labels.len();
        for layer in other.layers {
            let mut shifted = Vec::with_capacity(layer.len());
            for mut ins in layer {
                if let Some(c) = ins.cbit.as_mut() {
                    *c += offset;
                }
                shifted.push(ins);
            }
            self.layers.push(shifted);
        }
        self.cbit_labels.extend(other.cbit_labels);
        self.roles.extend(other.roles);
        let depth = self.layers.len();
        for q in other.depth.keys() {
            self.depth.insert(*q, depth.saturating_sub(1));
        }
        self
    }

    /// Standalone circuit over `0..=max qubit`, with a TICK between layers.
    pub fn into_circuit(self) -> Circuit {
        let mut groups: Vec<(String, Vec<String>)> = Vec::new();
        for label in &self.cbit_labels {
            let (seg, bit) = label.rsplit_once('/').unwrap_or(("bits", label.as_str()));
            match groups.iter_mut().find(|(n, _)| n == seg) {
                Some((_, labels)) => labels.push(bit.to_string()),
                None => groups.push((seg.to_string(), vec![bit.to_string()])),
            }
        }
        let layout = ShotLayout::new(groups).expect("fragment labels are unique per segment");
        let n = self.instructions().flat_map(|i| i.qubits.iter().copied()).max().map_or(0, |m| m + 1);
        let mut builder = CircuitBuilder::new(None, layout, n, false);
        builder.push_fragment(&self, "").expect("fragment labels resolve");
        builder.finish()
    }
}

/// Which copy and code a block of data qubits belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DataBlock {
    /// 0 for the first (or only) copy.
    pub copy: usize,
    pub block: CodeBlock,
}

/// An assembled circuit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    pub kind: Option<ExperimentKind>,
    pub qubit_roles: Vec<Option<QubitRole>>,
    pub instructions: Vec<Instruction>,
    pub layout: ShotLayout,
    pub reuse: bool,
    pub blocks: Vec<DataBlock>,
}

impl Circuit {
    pub fn num_qubits(&self) -> usize {
        self.qubit_roles.len()
    }

    pub fn num_cbits(&self) -> usize {
        self.layout.len()
    }

    pub fn count(&self, kind: Gate) -> usize {
        self.instructions.iter().filter(|i| i.kind == kind).count()
    }

    pub fn block(&self, copy: usize, code: CodeKind) -> Option<CodeBlock> {
        self.blocks.iter().find(|b| b.copy == copy && b.block.code == code).map(|b| b.block)
    }

    pub fn role_count(&self, role: QubitRole) -> usize {
        self.qubit_roles.iter().filter(|r| **r == Some(role)).count()
    }

    /// Checks operand arity and range, that measured qubits are re-prepared
    /// before reuse, and that each measurement writes a distinct layout bit.
    pub fn validate(&self) -> Result<()> {
        let n = self.num_qubits();
        let mut live = vec![false; n];
        let mut written = vec![false; self.num_cbits()];
        for (i, ins) in self.instructions.iter().enumerate() {
            Instruction::new(ins.kind, ins.qubits.clone(), ins.cbit)
                .map_err(|e| Error::InvalidCircuit(format!("instruction {i}: {e}")))?;
            for &q in &ins.qubits {
                if q >= n {
                    return Err(Error::QubitOutOfRange { q, n });
                }
            }
            match ins.kind {
                Gate::PrepZ | Gate::PrepX => live[ins.qubits[0]] = true,
                Gate::Tick => {}
                _ => {
                    if let Some(&q) = ins.qubits.iter().find(|&&q| !live[q]) {
                        return Err(Error::InvalidCircuit(format!(
                            "instruction {i} ({:?}) acts on qubit {q} which is not prepared",
                            ins.kind
                        )));
                    }
                    if ins.kind.is_measurement() {
                        let c = ins.cbit.expect("checked above");
                        if c >= written.len() || written[c] {
                            return Err(Error::InvalidCircuit(format!(
                                "instruction {i} writes bit {c} which is out of layout or already written"
                            )));
                        }
                        written[c] = true;
                        live[ins.qubits[0]] = false;
                    }
                }
            }
        }
        Ok(())
    }
}

/// Assembles fragments into a [`Circuit`] with a fixed layout.
#[derive(Debug)]
pub struct CircuitBuilder {
    circuit: Circuit,
}

impl CircuitBuilder {
    pub fn new(kind: Option<ExperimentKind>, layout: ShotLayout, num_qubits: usize, reuse: bool) -> Self {
        Self {
            circuit: Circuit {
                kind,
                qubit_roles: vec![None; num_qubits],
                instructions: Vec::new(),
                layout,
                reuse,
                blocks: Vec::new(),
            },
        }
    }

    pub fn add_block(&mut self, copy: usize, block: CodeBlock) {
        self.circuit.blocks.push(DataBlock { copy, block });
    }

    /// Appends the layers of `frag` separated by TICKs, resolving cbit labels
    /// under `prefix` (e.g. `copy2/`).
    pub fn push_fragment(&mut self, frag: &Fragment, prefix: &str) -> Result<()> {
        for (q, role) in &frag.roles {
            if *q >= self.circuit.qubit_roles.len() {
                self.circuit.qubit_roles.resize(q + 1, None);
            }
            self.circuit.qubit_roles[*q] = Some(*role);
        }
        for layer in &frag.layers {
            if !self.circuit.instructions.is_empty()
                && self.circuit.instructions.last().map(|i| i.kind) != Some(Gate::Tick)
            {
                self.circuit.instructions.push(Instruction::tick());
            }
            for ins in layer {
                let mut ins = ins.clone();
                if let Some(c) = ins.cbit {
                    let path = format!("{prefix}{}", frag.cbit_labels[c]);
                    let idx = self
                        .circuit
                        .layout
                        .index_of(&path)
                        .ok_or_else(|| Error::InvalidCircuit(format!("no layout bit for `{path}`")))?;
                    ins.cbit = Some(idx);
                }
                for &q in &ins.qubits {
                    if q >= self.circuit.qubit_roles.len() {
                        self.circuit.qubit_roles.resize(q + 1, None);
                    }
                }
                self.circuit.instructions.push(ins);
            }
        }
        Ok(())
    }

    pub fn finish(self) -> Circuit {
        self.circuit
    }
}
