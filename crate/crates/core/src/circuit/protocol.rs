//! Protocol fragments and experiment assembly.
//!
//! Encoders are listed as gate sequences over 1-based code labels. The flag
//! of each encoder measures a logical representative whose parity is fixed on
//! the prepared state, so any single fault that leaves a weight-2 or higher
//! error of the dangerous type (modulo stabilizers of the prepared state)
//! trips it. X errors left behind by the qRM encoder are caught by the
//! Z-stabilizer round instead.

use super::{
    Basis, CircuitBuilder, CodeBlock, CodeKind, ExperimentKind, Fragment, Gate, QubitRole,
};
use crate::circuit::Circuit;
use crate::layout::{FLAGS, QRM_DATA, STEANE_DATA, Z_STABILIZERS};

/// Qubits put in |+> before the Steane |0> encoder CNOTs.
pub const STEANE_ENCODER_PIVOTS: [usize; 3] = [1, 3, 5];
pub const STEANE_ENCODER_CNOTS: [(usize, usize); 9] =
    [(3, 7), (5, 4), (5, 6), (3, 4), (3, 2), (1, 2), (5, 7), (1, 6), (1, 7)];
/// Support of the Z-logical representative checked by the Steane flag.
pub const STEANE_FLAG_SUPPORT: [usize; 3] = [3, 6, 7];

pub const QRM_ENCODER_PIVOTS: [usize; 5] = [1, 2, 8, 13, 15];
pub const QRM_ENCODER_CNOTS: [(usize, usize); 32] = [
    (15, 4),
    (1, 6),
    (1, 9),
    (15, 3),
    (2, 3),
    (2, 11),
    (1, 14),
    (2, 9),
    (13, 7),
    (13, 6),
    (2, 14),
    (8, 7),
    (13, 14),
    (1, 5),
    (8, 6),
    (1, 10),
    (13, 5),
    (13, 12),
    (2, 10),
    (8, 12),
    (8, 11),
    (15, 11),
    (1, 11),
    (15, 10),
    (8, 9),
    (15, 12),
    (2, 4),
    (13, 11),
    (2, 7),
    (15, 5),
    (13, 4),
    (8, 3),
];
/// Support of the X-logical representative checked by the qRM flag, in CNOT order.
pub const QRM_FLAG_SUPPORT: [usize; 7] = [8, 4, 11, 14, 1, 7, 15];

/// Encoder for Steane |0> on labels `base..base+7`, verified by a flag on `flag`.
pub fn prep_steane_zero(base: usize, flag: usize) -> Fragment {
    let b = CodeBlock::steane(base);
    let mut f = Fragment::new();
    f.set_block_roles(b);
    f.set_role(flag, QubitRole::AncillaFlag);
    for q in b.qubits() {
        f.gate(Gate::PrepZ, q);
    }
    for p in STEANE_ENCODER_PIVOTS {
        f.gate(Gate::H, b.qubit(p));
    }
    for (c, t) in STEANE_ENCODER_CNOTS {
        f.cnot(b.qubit(c), b.qubit(t));
    }
    f.gate(Gate::PrepZ, flag);
    for q in STEANE_FLAG_SUPPORT {
        f.cnot(b.qubit(q), flag);
    }
    f.measure(flag, format!("{FLAGS}/init-steane"));
    f.defer_preparations()
}

/// Encoder for qRM |+> on labels `base..base+15`, verified by a flag on `flag`.
pub fn prep_qrm_plus(base: usize, flag: usize) -> Fragment {
    let b = CodeBlock::qrm(base);
    let mut f = Fragment::new();
    f.set_block_roles(b);
    f.set_role(flag, QubitRole::AncillaFlag);
    for q in b.qubits() {
        f.gate(Gate::PrepZ, q);
    }
    for p in QRM_ENCODER_PIVOTS {
        f.gate(Gate::H, b.qubit(p));
    }
    for (c, t) in QRM_ENCODER_CNOTS {
        f.cnot(b.qubit(c), b.qubit(t));
    }
    f.gate(Gate::PrepZ, flag);
    f.gate(Gate::H, flag);
    for q in QRM_FLAG_SUPPORT {
        f.cnot(flag, b.qubit(q));
    }
    f.gate(Gate::H, flag);
    f.measure(flag, format!("{FLAGS}/init-qrm"));
    f.defer_preparations()
}

/// Ancilla assignment for the three sub-rounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RoundAncillas {
    /// (syndrome, flag) for p13.
    pub p13: (usize, usize),
    /// (syndrome, flag) for p8.
    pub p8: (usize, usize),
    /// (syndrome p2, syndrome p3, shared flag).
    pub parallel: (usize, usize, usize),
}

impl RoundAncillas {
    /// Seven fresh ancillas from `first`.
    pub fn fresh(first: usize) -> Self {
        Self { p13: (first, first + 1), p8: (first + 2, first + 3), parallel: (first + 4, first + 5, first + 6) }
    }

    /// Four ancillas from `first`; the parallel sub-round resets and reuses three of them.
    pub fn reused(first: usize) -> Self {
        Self { p13: (first, first + 1), p8: (first + 2, first + 3), parallel: (first, first + 1, first + 2) }
    }

    pub fn count(&self) -> usize {
        let mut all = vec![self.p13.0, self.p13.1, self.p8.0, self.p8.1, self.parallel.0, self.parallel.1, self.parallel.2];
        all.sort_unstable();
        all.dedup();
        all.len()
    }
}

fn ancilla_pair(f: &mut Fragment, s: usize, fl: usize) {
    f.set_role(s, QubitRole::AncillaSyndrome);
    f.set_role(fl, QubitRole::AncillaFlag);
    f.gate(Gate::PrepZ, s);
    f.gate(Gate::PrepZ, fl);
    f.gate(Gate::H, fl);
}

/// Flagged weight-4 Z check with the flag coupled after the first and third data CNOT.
fn single_check(b: CodeBlock, support: [usize; 4], s: usize, fl: usize, name: &str) -> Fragment {
    let mut f = Fragment::new();
    ancilla_pair(&mut f, s, fl);
    f.cnot(b.qubit(support[0]), s);
    f.cnot(fl, s);
    f.cnot(b.qubit(support[1]), s);
    f.cnot(b.qubit(support[2]), s);
    f.cnot(fl, s);
    f.cnot(b.qubit(support[3]), s);
    f.gate(Gate::H, fl);
    f.measure(s, format!("{Z_STABILIZERS}/{name}"));
    f.measure(fl, format!("{FLAGS}/flag-{name}"));
    f.defer_preparations()
}

/// The three sub-rounds p13, p8 and {p2, p3} on the qRM block at `base`.
pub fn round_subrounds(base: usize, anc: RoundAncillas) -> [Fragment; 3] {
    let b = CodeBlock::qrm(base);
    let p13 = single_check(b, [8, 12, 13, 15], anc.p13.0, anc.p13.1, "p13");
    let p8 = single_check(b, [4, 5, 11, 12], anc.p8.0, anc.p8.1, "p8");

    let (s2, s3, fl) = anc.parallel;
    let mut par = Fragment::new();
    par.set_role(s2, QubitRole::AncillaSyndrome);
    par.set_role(s3, QubitRole::AncillaSyndrome);
    par.set_role(fl, QubitRole::AncillaFlag);
    par.gate(Gate::PrepZ, s2);
    par.gate(Gate::PrepZ, s3);
    par.gate(Gate::PrepZ, fl);
    par.gate(Gate::H, fl);
    par.cnot(b.qubit(2), s2);
    par.cnot(b.qubit(5), s3);
    par.cnot(fl, s2);
    par.cnot(fl, s3);
    par.cnot(b.qubit(3), s2);
    par.cnot(b.qubit(6), s3);
    par.cnot(b.qubit(4), s2);
    par.cnot(b.qubit(4), s3);
    par.cnot(fl, s2);
    par.cnot(fl, s3);
    par.cnot(b.qubit(7), s2);
    par.cnot(b.qubit(7), s3);
    par.gate(Gate::H, fl);
    par.measure(s2, format!("{Z_STABILIZERS}/p2"));
    par.measure(s3, format!("{Z_STABILIZERS}/p3"));
    par.measure(fl, format!("{FLAGS}/flag-parallel"));
    [p13, p8, par.defer_preparations()]
}

/// Measures p13, p8, then p2 and p3 jointly, with flags.
pub fn qrm_z_stabilizer_round(base: usize, anc: RoundAncillas) -> Fragment {
    let [a, b, c] = round_subrounds(base, anc);
    a.then(b).then(c)
}

/// T on odd labels, T-dagger on even labels of the qRM block.
pub fn transversal_t(base: usize) -> Fragment {
    let b = CodeBlock::qrm(base);
    let mut f = Fragment::new();
    for label in 1..=15 {
        f.gate(if label % 2 == 1 { Gate::T } else { Gate::Tdg }, b.qubit(label));
    }
    f
}

/// CNOT from qRM label i (control) to Steane label i, i = 1..7.
pub fn switch_cnot(qrm_base: usize, steane_base: usize) -> Fragment {
    let (q, s) = (CodeBlock::qrm(qrm_base), CodeBlock::steane(steane_base));
    let mut f = Fragment::new();
    for i in 1..=7 {
        f.cnot(q.qubit(i), s.qubit(i));
    }
    f
}

/// Transversal CNOT from the first Steane block onto the second.
pub fn steane_pair_cnot(first_base: usize, second_base: usize) -> Fragment {
    let (a, b) = (CodeBlock::steane(first_base), CodeBlock::steane(second_base));
    let mut f = Fragment::new();
    for i in 1..=7 {
        f.cnot(a.qubit(i), b.qubit(i));
    }
    f
}

/// Measures every qubit of `block` in `basis`; bits go to the block's data segment.
pub fn destructive_measurement(block: CodeBlock, basis: Basis) -> Fragment {
    let mut f = Fragment::new();
    let segment = match block.code {
        CodeKind::Steane => STEANE_DATA,
        CodeKind::Qrm => QRM_DATA,
    };
    for label in 1..=block.code.size() {
        let q = block.qubit(label);
        match basis {
            Basis::X => f.gate(Gate::H, q),
            Basis::Y => {
                f.gate(Gate::Sdg, q);
                f.gate(Gate::H, q);
            }
            Basis::Z => {}
        }
        f.measure(q, format!("{segment}/{label}"));
    }
    f
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BuildOptions {
    /// Recycle round ancillas through reset.
    pub reuse: bool,
    /// Include the flagged Z-stabilizer round; off only for ablation studies.
    pub stabilizer_round: bool,
}

impl Default for BuildOptions {
    fn default() -> Self {
        Self { reuse: false, stabilizer_round: true }
    }
}

/// Per-copy qubit map.
#[derive(Debug, Clone, Copy)]
struct CopyAlloc {
    steane: usize,
    qrm: usize,
    steane_flag: usize,
    qrm_flag: usize,
    round: RoundAncillas,
}

impl CopyAlloc {
    fn at(base: usize, reuse: bool) -> (Self, usize) {
        let first = base + 24;
        let round = if reuse { RoundAncillas::reused(first) } else { RoundAncillas::fresh(first) };
        let size = 24 + round.count();
        (Self { steane: base, qrm: base + 7, steane_flag: base + 22, qrm_flag: base + 23, round }, size)
    }
}

pub fn build_experiment(kind: ExperimentKind, reuse: bool) -> Circuit {
    build_experiment_with(kind, BuildOptions { reuse, ..BuildOptions::default() })
}

/// Assembles the protocol. Stages run copy-parallel with a TICK after every layer.
pub fn build_experiment_with(kind: ExperimentKind, opts: BuildOptions) -> Circuit {
    let copies = kind.copies();
    let mut allocs = Vec::with_capacity(copies);
    let mut next = 0;
    for _ in 0..copies {
        let (a, size) = CopyAlloc::at(next, opts.reuse);
        allocs.push(a);
        next += size;
    }
    let prefixes: Vec<&str> = if copies == 2 { vec!["copy1/", "copy2/"] } else { vec![""] };
    let mut builder = CircuitBuilder::new(Some(kind), kind.layout(), next, opts.reuse);
    for (c, a) in allocs.iter().enumerate() {
        builder.add_block(c, CodeBlock::steane(a.steane));
        builder.add_block(c, CodeBlock::qrm(a.qrm));
    }

    let mut stages: Vec<Vec<Fragment>> = Vec::new();
    let per_copy = |f: &dyn Fn(&CopyAlloc) -> Fragment| allocs.iter().map(f).collect::<Vec<_>>();
    stages.push(per_copy(&|a| prep_steane_zero(a.steane, a.steane_flag).parallel(prep_qrm_plus(a.qrm, a.qrm_flag))));
    if opts.stabilizer_round {
        for i in 0..3 {
            stages.push(per_copy(&|a| round_subrounds(a.qrm, a.round)[i].clone()));
        }
    } else {
        // keep ancilla roles so both variants share one register map
        stages.push(per_copy(&|a| {
            let mut f = Fragment::new();
            for q in [a.round.p13.0, a.round.p8.0, a.round.parallel.0, a.round.parallel.1] {
                f.set_role(q, QubitRole::AncillaSyndrome);
            }
            for q in [a.round.p13.1, a.round.p8.1, a.round.parallel.2] {
                f.set_role(q, QubitRole::AncillaFlag);
            }
            f
        }));
    }
    stages.push(per_copy(&|a| transversal_t(a.qrm)));
    stages.push(per_copy(&|a| switch_cnot(a.qrm, a.steane)));
    stages.push(per_copy(&|a| destructive_measurement(CodeBlock::qrm(a.qrm), Basis::X)));
    match kind {
        ExperimentKind::MagicPrep => {}
        ExperimentKind::SingleCopy(basis) => {
            stages.push(per_copy(&|a| destructive_measurement(CodeBlock::steane(a.steane), basis)));
        }
        ExperimentKind::TwoCopy => {
            stages.push(vec![steane_pair_cnot(allocs[0].steane, allocs[1].steane)]);
            stages.push(vec![
                destructive_measurement(CodeBlock::steane(allocs[0].steane), Basis::X),
                destructive_measurement(CodeBlock::steane(allocs[1].steane), Basis::Z),
            ]);
        }
    }

    for stage in stages {
        let prefixed = if stage.len() == copies {
            stage.into_iter().zip(prefixes.iter().copied()).collect::<Vec<_>>()
        } else {
            stage.into_iter().map(|f| (f, prefixes[0])).collect()
        };
        push_parallel(&mut builder, prefixed);
    }
    let circuit = builder.finish();
    debug_assert!(circuit.validate().is_ok());
    circuit
}

/// Pushes fragments with possibly different cbit prefixes as one parallel stage.
fn push_parallel(builder: &mut CircuitBuilder, frags: Vec<(Fragment, &str)>) {
    // Relabel each fragment's cbits with its prefix, then merge layer-wise.
    let mut merged = Fragment::new();
    for (frag, prefix) in frags {
        let mut relabeled = frag;
        for l in relabeled.cbit_labels.iter_mut() {
            *l = format!("{prefix}{l}");
        }
        merged = merged.parallel(relabeled);
    }
    builder.push_fragment(&merged, "").expect("protocol bits exist in the layout");
}
