use codeswitch::circuit::{build_experiment, Basis, ExperimentKind, Fragment, Gate};
use codeswitch::decode::{decode_shot, DecodeMode};
use codeswitch::pauli::Pauli;
use codeswitch::sim::{
    execute, overlap, run_batch, run_shot, run_shot_indexed, sample_trajectory, shot_rng, Channels, NoiseModel,
    NoiseSource, RegisterState, Schedule,
};
use num_complex::Complex64;
use proptest::prelude::*;

const N: usize = 10;

#[derive(Debug, Clone)]
enum TestOp {
    Gate(Gate, usize),
    Cnot(usize, usize),
    Pauli(usize, Pauli),
    /// Measure with uniform `u`, then reset to |0>.
    MeasureReset(usize, f64),
}

fn op_strategy() -> impl Strategy<Value = TestOp> {
    let gates = [Gate::H, Gate::S, Gate::Sdg, Gate::T, Gate::Tdg, Gate::X, Gate::Z];
    prop_oneof![
        4 => (0..gates.len(), 0..N).prop_map(move |(g, q)| TestOp::Gate(gates[g], q)),
        4 => (0..N, 1..N).prop_map(|(a, d)| TestOp::Cnot(a, (a + d) % N)),
        1 => (0..N, 1..4usize).prop_map(|(q, p)| TestOp::Pauli(q, Pauli::NONTRIVIAL[p - 1])),
        1 => (0..N, 0.0..1.0f64).prop_map(|(q, u)| TestOp::MeasureReset(q, u)),
    ]
}

/// Reference dense simulator with qubit q on index bit q.
struct Dense(Vec<Complex64>);

impl Dense {
    fn new() -> Self {
        let mut v = vec![Complex64::new(0.0, 0.0); 1 << N];
        v[0] = Complex64::new(1.0, 0.0);
        Dense(v)
    }

    fn matrix(&mut self, q: usize, m: [[Complex64; 2]; 2]) {
        for i in 0..self.0.len() {
            if i >> q & 1 == 0 {
                let j = i | 1 << q;
                let (a, b) = (self.0[i], self.0[j]);
                self.0[i] = m[0][0] * a + m[0][1] * b;
                self.0[j] = m[1][0] * a + m[1][1] * b;
            }
        }
    }

    fn apply(&mut self, op: &TestOp) {
        let c = Complex64::new;
        let o = c(0.0, 0.0);
        let l = c(1.0, 0.0);
        let diag = |d: Complex64| [[l, o], [o, d]];
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let t = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
        match *op {
            TestOp::Gate(g, q) => {
                let m = match g {
                    Gate::H => [[c(h, 0.0), c(h, 0.0)], [c(h, 0.0), c(-h, 0.0)]],
                    Gate::S => diag(c(0.0, 1.0)),
                    Gate::Sdg => diag(c(0.0, -1.0)),
                    Gate::T => diag(t),
                    Gate::Tdg => diag(t.conj()),
                    Gate::X => [[o, l], [l, o]],
                    Gate::Z => diag(-l),
                    _ => unreachable!(),
                };
                self.matrix(q, m);
            }
            TestOp::Pauli(q, p) => {
                let m = match p {
                    Pauli::X => [[o, l], [l, o]],
                    Pauli::Y => [[o, c(0.0, -1.0)], [c(0.0, 1.0), o]],
                    _ => diag(-l),
                };
                self.matrix(q, m);
            }
            TestOp::Cnot(a, b) => {
                for i in 0..self.0.len() {
                    if i >> a & 1 == 1 && i >> b & 1 == 0 {
                        self.0.swap(i, i | 1 << b);
                    }
                }
            }
            TestOp::MeasureReset(q, u) => {
                let p1: f64 = self.0.iter().enumerate().filter(|(i, _)| i >> q & 1 == 1).map(|(_, a)| a.norm_sqr()).sum();
                let one = u < p1;
                let keep = if one { p1 } else { 1.0 - p1 };
                let scale = 1.0 / keep.sqrt();
                let mut next = vec![c(0.0, 0.0); self.0.len()];
                for (i, a) in self.0.iter().enumerate() {
                    if (i >> q & 1 == 1) == one {
                        next[i & !(1 << q)] = a * scale;
                    }
                }
                self.0 = next;
            }
        }
    }
}

fn apply(state: &mut RegisterState, op: &TestOp) {
    match *op {
        TestOp::Gate(g, q) => state.apply_gate(g, &[q]).unwrap(),
        TestOp::Cnot(a, b) => state.cnot(a, b).unwrap(),
        TestOp::Pauli(q, p) => state.apply_pauli(q, p).unwrap(),
        TestOp::MeasureReset(q, u) => {
            state.measure(q, u).unwrap();
            state.prepare(q, 0.0).unwrap();
        }
    }
}

fn prepared(mut s: RegisterState) -> RegisterState {
    for q in 0..N {
        s.prepare(q, 0.0).unwrap();
    }
    s
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn factorized_equals_monolithic_and_dense(ops in prop::collection::vec(op_strategy(), 1..80)) {
        let mut split = prepared(RegisterState::new(N));
        let mut mono = prepared(RegisterState::monolithic(N));
        let mut dense = Dense::new();
        let all: Vec<usize> = (0..N).collect();
        for op in &ops {
            apply(&mut split, op);
            apply(&mut mono, op);
            dense.apply(op);
            for norm in split.block_norms().into_iter().chain(mono.block_norms()) {
                prop_assert!((norm - 1.0).abs() < 1e-10);
            }
        }
        prop_assert_eq!(mono.block_sizes(), vec![N]);
        let a = split.amplitudes_of(&all).unwrap();
        let b = mono.amplitudes_of(&all).unwrap();
        prop_assert!((overlap(&a, &b) - 1.0).abs() < 1e-10);
        prop_assert!((overlap(&a, &dense.0) - 1.0).abs() < 1e-10);
    }
}

#[test]
fn program_order_merges_22_qubits_compact_order_does_not() {
    let circuit = build_experiment(ExperimentKind::SingleCopy(Basis::X), false);
    let traj = sample_trajectory(&circuit, &NoiseModel::noiseless(), &mut shot_rng(3, 0), None);
    let program = execute(&traj, RegisterState::new(circuit.num_qubits()), Schedule::Program, None).unwrap();
    let compact = execute(&traj, RegisterState::new(circuit.num_qubits()), Schedule::Compact, None).unwrap();
    assert_eq!(program.state.peak_block_qubits(), 22);
    assert!(compact.state.peak_block_qubits() <= 16, "{}", compact.state.peak_block_qubits());
    for e in [&program, &compact] {
        let d = decode_shot(circuit.kind.unwrap(), &e.record, &circuit.layout, DecodeMode::Ps).unwrap();
        assert!(d.is_accepted());
    }
}

#[test]
fn batch_shots_match_single_shots() {
    let circuit = build_experiment(ExperimentKind::TwoCopy, true);
    let noise = NoiseModel { p2: 0.01, ..NoiseModel::default() };
    let batch = run_batch(&circuit, &noise, 6, 41).unwrap();
    assert_eq!(batch[0], run_shot(&circuit, &noise, 41).unwrap());
    for (i, r) in batch.iter().enumerate() {
        assert_eq!(r, &run_shot_indexed(&circuit, &noise, 41, i as u64).unwrap());
    }
    assert_ne!(batch[1], batch[2]);
}

#[test]
fn invalid_noise_is_rejected() {
    let circuit = build_experiment(ExperimentKind::MagicPrep, false);
    let noise = NoiseModel { p1: 1.5, ..NoiseModel::default() };
    assert!(run_shot(&circuit, &noise, 0).is_err());
}

fn within_5_sigma(count: usize, trials: usize, p: f64) -> bool {
    let mean = trials as f64 * p;
    let sd = (trials as f64 * p * (1.0 - p)).sqrt();
    (count as f64 - mean).abs() <= 5.0 * sd.max(1e-9)
}

#[test]
fn born_probabilities_and_readout_flips() {
    let mut f = Fragment::new();
    f.gate(Gate::PrepZ, 0);
    f.gate(Gate::PrepZ, 1);
    f.gate(Gate::H, 0);
    f.gate(Gate::T, 0);
    f.gate(Gate::H, 0);
    f.measure(0, "m/a");
    f.gate(Gate::X, 1);
    f.measure(1, "m/b");
    let circuit = f.into_circuit();
    let noise = NoiseModel {
        p_meas1: 0.05,
        p_meas0: 0.0,
        enabled: Channels { readout: true, ..Channels::NONE },
        ..NoiseModel::default()
    };
    let shots = 20_000;
    let records = run_batch(&circuit, &noise, shots, 5).unwrap();
    // H T H |0> gives 1 with probability sin^2(pi/8)
    let p_a = (std::f64::consts::PI / 8.0).sin().powi(2) * 0.95;
    let ones_a = records.iter().filter(|r| r.bit(0)).count();
    assert!(within_5_sigma(ones_a, shots, p_a), "{ones_a}");
    let zeros_b = records.iter().filter(|r| !r.bit(1)).count();
    assert!(within_5_sigma(zeros_b, shots, 0.05), "{zeros_b}");
}

#[test]
fn gate_noise_frequencies() {
    let mut f = Fragment::new();
    for q in 0..3 {
        f.gate(Gate::PrepZ, q);
    }
    f.gate(Gate::H, 0);
    f.cnot(0, 1);
    f.measure(0, "m/a");
    f.measure(1, "m/b");
    f.measure(2, "m/c");
    let circuit = f.into_circuit();
    let noise = NoiseModel { p1: 0.03, p2: 0.06, p_idle: 0.02, ..NoiseModel::default() };
    let trials = 20_000;
    let (mut g1, mut g2, mut idle) = (0, 0, 0);
    let mut two_letters = [0usize; 16];
    for i in 0..trials {
        let t = sample_trajectory(&circuit, &noise, &mut shot_rng(17, i), None);
        for inj in &t.injections {
            match inj.source {
                NoiseSource::Gate1 => g1 += 1,
                NoiseSource::Gate2 => {
                    g2 += 1;
                    let code = |p: Pauli| [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z].iter().position(|&x| x == p).unwrap();
                    two_letters[code(inj.paulis[0].1) + 4 * code(inj.paulis[1].1)] += 1;
                }
                NoiseSource::Idle => idle += 1,
                _ => {}
            }
        }
    }
    let idle_slots = circuit
        .instructions
        .iter()
        .filter(|i| i.kind == Gate::Tick)
        .count();
    assert!(idle_slots > 0);
    assert!(within_5_sigma(g1, trials as usize, 0.03), "{g1}");
    assert!(within_5_sigma(g2, trials as usize, 0.06), "{g2}");
    assert!(idle > 0);
    assert_eq!(two_letters[0], 0);
    for (k, &n) in two_letters.iter().enumerate().skip(1) {
        assert!(within_5_sigma(n, g2, 1.0 / 15.0), "pair {k}: {n} of {g2}");
    }
}
