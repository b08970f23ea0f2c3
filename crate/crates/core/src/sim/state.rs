//! Product-of-blocks dense state vector.
//!
//! Each live qubit sits in exactly one block; a block's amplitude index uses
//! bit `k` for the block's `k`-th qubit. Blocks merge when a CNOT spans two
//! of them and shrink when a qubit is measured.

use num_complex::Complex64;
use rand::Rng;

use crate::circuit::{Gate, Instruction};
use crate::error::{Error, Result};
use crate::pauli::Pauli;

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

#[derive(Debug, Clone, PartialEq)]
struct Block {
    qubits: Vec<usize>,
    amps: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegisterState {
    blocks: Vec<Block>,
    /// (block, bit position) of each live qubit.
    loc: Vec<Option<(usize, usize)>>,
    monolithic: bool,
    peak: usize,
}

#[inline]
fn insert_zero(k: usize, bit: usize) -> usize {
    ((k >> bit) << (bit + 1)) | (k & ((1 << bit) - 1))
}

fn kron(a: &Block, b: &Block) -> Block {
    let mut amps = Vec::with_capacity(a.amps.len() * b.amps.len());
    for &y in &b.amps {
        amps.extend(a.amps.iter().map(|&x| x * y));
    }
    let mut qubits = a.qubits.clone();
    qubits.extend_from_slice(&b.qubits);
    Block { qubits, amps }
}

impl RegisterState {
    /// `n` unprepared qubits, factorized into blocks as gates require.
    pub fn new(n: usize) -> Self {
        Self { blocks: Vec::new(), loc: vec![None; n], monolithic: false, peak: 0 }
    }

    /// Like [`RegisterState::new`] but every live qubit shares one dense block.
    pub fn monolithic(n: usize) -> Self {
        Self { monolithic: true, ..Self::new(n) }
    }

    pub fn num_qubits(&self) -> usize {
        self.loc.len()
    }

    pub fn is_live(&self, q: usize) -> bool {
        self.loc.get(q).is_some_and(Option::is_some)
    }

    pub fn live_qubits(&self) -> Vec<usize> {
        (0..self.loc.len()).filter(|&q| self.is_live(q)).collect()
    }

    /// Qubit counts of the current blocks.
    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.qubits.len()).collect()
    }

    /// Largest block width reached so far.
    pub fn peak_block_qubits(&self) -> usize {
        self.peak
    }

    pub fn block_norms(&self) -> Vec<f64> {
        self.blocks.iter().map(|b| b.amps.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt()).collect()
    }

    /// Width of the block that would result from merging the blocks of `a` and `b`.
    pub fn merged_width(&self, a: usize, b: usize) -> usize {
        match (self.loc[a], self.loc[b]) {
            (Some((ba, _)), Some((bb, _))) if ba == bb => self.blocks[ba].qubits.len(),
            (Some((ba, _)), Some((bb, _))) => self.blocks[ba].qubits.len() + self.blocks[bb].qubits.len(),
            _ => 0,
        }
    }

    pub fn same_block(&self, a: usize, b: usize) -> bool {
        matches!((self.loc[a], self.loc[b]), (Some((x, _)), Some((y, _))) if x == y)
    }

    fn live(&self, q: usize) -> Result<(usize, usize)> {
        match self.loc.get(q) {
            None => Err(Error::QubitOutOfRange { q, n: self.loc.len() }),
            Some(None) => Err(Error::DeadQubit(q)),
            Some(Some(l)) => Ok(*l),
        }
    }

    fn reindex(&mut self, block: usize) {
        for (k, &q) in self.blocks[block].qubits.iter().enumerate() {
            self.loc[q] = Some((block, k));
        }
        self.peak = self.peak.max(self.blocks[block].qubits.len());
    }

    fn remove_block(&mut self, block: usize) {
        self.blocks.swap_remove(block);
        if block < self.blocks.len() {
            self.reindex(block);
        }
    }

    /// Merges the blocks holding `a` and `b`; returns the common block index.
    fn merge(&mut self, a: usize, b: usize) -> Result<usize> {
        let (ba, _) = self.live(a)?;
        let (bb, _) = self.live(b)?;
        if ba == bb {
            return Ok(ba);
        }
        let (lo, hi) = if ba < bb { (ba, bb) } else { (bb, ba) };
        let merged = kron(&self.blocks[lo], &self.blocks[hi]);
        self.blocks[lo] = merged;
        self.remove_block(hi);
        self.reindex(lo);
        Ok(lo)
    }

    /// Resets `q` to |0>. A live qubit is first measured out with uniform `u`.
    pub fn prepare(&mut self, q: usize, u: f64) -> Result<()> {
        if q >= self.loc.len() {
            return Err(Error::QubitOutOfRange { q, n: self.loc.len() });
        }
        if self.is_live(q) {
            self.measure(q, u)?;
        }
        let fresh = Block { qubits: vec![q], amps: vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)] };
        if self.monolithic && !self.blocks.is_empty() {
            self.blocks[0] = kron(&self.blocks[0], &fresh);
            self.reindex(0);
        } else {
            self.blocks.push(fresh);
            let i = self.blocks.len() - 1;
            self.reindex(i);
        }
        Ok(())
    }

    fn apply_phase(&mut self, q: usize, phase: Complex64) -> Result<()> {
        let (b, k) = self.live(q)?;
        let s = 1 << k;
        for chunk in self.blocks[b].amps.chunks_exact_mut(2 * s) {
            for y in &mut chunk[s..] {
                *y *= phase;
            }
        }
        Ok(())
    }

    fn apply_h(&mut self, q: usize) -> Result<()> {
        let (b, k) = self.live(q)?;
        let s = 1 << k;
        for chunk in self.blocks[b].amps.chunks_exact_mut(2 * s) {
            let (lo, hi) = chunk.split_at_mut(s);
            for (x, y) in lo.iter_mut().zip(hi.iter_mut()) {
                let (u, v) = (*x, *y);
                *x = (u + v) * FRAC_1_SQRT_2;
                *y = (u - v) * FRAC_1_SQRT_2;
            }
        }
        Ok(())
    }

    fn apply_x(&mut self, q: usize) -> Result<()> {
        let (b, k) = self.live(q)?;
        let s = 1 << k;
        for chunk in self.blocks[b].amps.chunks_exact_mut(2 * s) {
            let (lo, hi) = chunk.split_at_mut(s);
            lo.swap_with_slice(hi);
        }
        Ok(())
    }

    pub fn apply_pauli(&mut self, q: usize, p: Pauli) -> Result<()> {
        let i = Complex64::new(0.0, 1.0);
        match p {
            Pauli::I => self.live(q).map(|_| ()),
            Pauli::X => self.apply_x(q),
            Pauli::Z => self.apply_phase(q, Complex64::new(-1.0, 0.0)),
            Pauli::Y => {
                // Y = i X Z
                self.apply_phase(q, Complex64::new(-1.0, 0.0))?;
                self.apply_x(q)?;
                let (b, _) = self.live(q)?;
                for a in &mut self.blocks[b].amps {
                    *a *= i;
                }
                Ok(())
            }
        }
    }

    pub fn cnot(&mut self, control: usize, target: usize) -> Result<()> {
        if control == target {
            return Err(Error::InvalidInstruction("CNOT control equals target".into()));
        }
        let b = self.merge(control, target)?;
        let (_, kc) = self.live(control)?;
        let (_, kt) = self.live(target)?;
        let (lo, hi) = if kc < kt { (kc, kt) } else { (kt, kc) };
        let (cm, tm) = (1usize << kc, 1usize << kt);
        let amps = &mut self.blocks[b].amps;
        for k in 0..amps.len() >> 2 {
            let i = insert_zero(insert_zero(k, lo), hi) | cm;
            amps.swap(i, i | tm);
        }
        Ok(())
    }

    /// Applies a unitary gate kind to its operands.
    pub fn apply_gate(&mut self, kind: Gate, qubits: &[usize]) -> Result<()> {
        let phase = |deg: f64| Complex64::from_polar(1.0, deg.to_radians());
        match kind {
            Gate::H => self.apply_h(qubits[0]),
            Gate::S => self.apply_phase(qubits[0], phase(90.0)),
            Gate::Sdg => self.apply_phase(qubits[0], phase(-90.0)),
            Gate::T => self.apply_phase(qubits[0], phase(45.0)),
            Gate::Tdg => self.apply_phase(qubits[0], phase(-45.0)),
            Gate::X => self.apply_x(qubits[0]),
            Gate::Z => self.apply_phase(qubits[0], Complex64::new(-1.0, 0.0)),
            Gate::Cnot => self.cnot(qubits[0], qubits[1]),
            other => Err(Error::InvalidInstruction(format!("{other:?} is not unitary"))),
        }
    }

    /// Probability that measuring `q` in the Z basis yields 1.
    pub fn probability_one(&self, q: usize) -> Result<f64> {
        let (b, k) = self.live(q)?;
        let s = 1 << k;
        Ok(self.blocks[b].amps.chunks_exact(2 * s).flat_map(|c| &c[s..]).map(Complex64::norm_sqr).sum())
    }

    /// Z measurement: outcome 1 iff `u < P(1)`. Collapses and removes `q`.
    pub fn measure(&mut self, q: usize, u: f64) -> Result<bool> {
        let (b, k) = self.live(q)?;
        let p1 = self.probability_one(q)?;
        let mut outcome = u < p1;
        let mut p = if outcome { p1 } else { 1.0 - p1 };
        if p < 1e-300 {
            outcome = !outcome;
            p = 1.0 - p;
        }
        let scale = 1.0 / p.sqrt();
        let s = 1 << k;
        let block = &mut self.blocks[b];
        let offset = if outcome { s } else { 0 };
        let mut next = Vec::with_capacity(block.amps.len() / 2);
        for chunk in block.amps.chunks_exact(2 * s) {
            next.extend(chunk[offset..offset + s].iter().map(|a| a * scale));
        }
        block.amps = next;
        block.qubits.remove(k);
        self.loc[q] = None;
        if self.blocks[b].qubits.is_empty() {
            self.remove_block(b);
        } else {
            self.reindex(b);
        }
        Ok(outcome)
    }

    /// Executes one instruction, drawing Born samples from `rng`.
    /// Returns `(cbit, outcome)` for measurements.
    pub fn apply<R: Rng + ?Sized>(&mut self, ins: &Instruction, rng: &mut R) -> Result<Option<(usize, bool)>> {
        match ins.kind {
            Gate::Tick => Ok(None),
            Gate::PrepZ => self.prepare(ins.qubits[0], rng.gen()).map(|_| None),
            Gate::PrepX => {
                self.prepare(ins.qubits[0], rng.gen())?;
                self.apply_h(ins.qubits[0]).map(|_| None)
            }
            Gate::MeasZ => {
                let bit = self.measure(ins.qubits[0], rng.gen())?;
                Ok(Some((ins.cbit.expect("measurement has a cbit"), bit)))
            }
            Gate::MeasX => {
                self.apply_h(ins.qubits[0])?;
                let bit = self.measure(ins.qubits[0], rng.gen())?;
                Ok(Some((ins.cbit.expect("measurement has a cbit"), bit)))
            }
            g => self.apply_gate(g, &ins.qubits).map(|_| None),
        }
    }

    /// Joint state of `qubits`, with `qubits[k]` on index bit `k`.
    ///
    /// The listed qubits must be exactly a union of whole blocks.
    pub fn amplitudes_of(&self, qubits: &[usize]) -> Result<Vec<Complex64>> {
        let mut ids: Vec<usize> = Vec::new();
        for &q in qubits {
            let (b, _) = self.live(q)?;
            if !ids.contains(&b) {
                ids.push(b);
            }
        }
        let covered: usize = ids.iter().map(|&b| self.blocks[b].qubits.len()).sum();
        if covered != qubits.len() {
            return Err(Error::InvalidCircuit(format!(
                "requested qubits are entangled with {} others",
                covered.saturating_sub(qubits.len())
            )));
        }
        let mut joint = Block { qubits: Vec::new(), amps: vec![Complex64::new(1.0, 0.0)] };
        for b in ids {
            joint = kron(&joint, &self.blocks[b]);
        }
        // permute from joint order to requested order
        let pos: Vec<usize> =
            qubits.iter().map(|q| joint.qubits.iter().position(|x| x == q).expect("covered")).collect();
        let mut out = vec![Complex64::new(0.0, 0.0); joint.amps.len()];
        for (i, o) in out.iter_mut().enumerate() {
            let mut src = 0;
            for (k, &p) in pos.iter().enumerate() {
                if i >> k & 1 == 1 {
                    src |= 1 << p;
                }
            }
            *o = joint.amps[src];
        }
        Ok(out)
    }
}

/// |<a|b>|.
pub fn overlap(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<Complex64>().norm()
}
