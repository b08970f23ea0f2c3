//! Signed Pauli words over `n` qubits.
//!
//! Qubit labels are 1-based everywhere in this module, matching the usual
//! labelling of code qubits. Phases are tracked exactly as powers of `i`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Single-qubit Pauli letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub enum Pauli {
    #[default]
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const NONTRIVIAL: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn has_x(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }

    pub fn has_z(self) -> bool {
        matches!(self, Pauli::Z | Pauli::Y)
    }

    /// Product `self * other` as `(i^k, letter)`.
    pub fn mul(self, other: Pauli) -> (Phase, Pauli) {
        use Pauli::*;
        let k = match (self, other) {
            (X, Y) | (Y, Z) | (Z, X) => 1,
            (Y, X) | (Z, Y) | (X, Z) => 3,
            _ => 0,
        };
        let letter = Pauli::from_bits(self.has_x() ^ other.has_x(), self.has_z() ^ other.has_z());
        (Phase(k), letter)
    }

    pub fn anticommutes(self, other: Pauli) -> bool {
        self != Pauli::I && other != Pauli::I && self != other
    }

    fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// A phase `i^k` with `k` in `0..4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_power(k: u32) -> Self {
        Phase((k % 4) as u8)
    }

    pub fn power(self) -> u8 {
        self.0
    }

    pub fn is_real(self) -> bool {
        self.0 % 2 == 0
    }

    /// `+1` or `-1` for real phases.
    pub fn sign(self) -> Option<i8> {
        match self.0 {
            0 => Some(1),
            2 => Some(-1),
            _ => None,
        }
    }
}

impl std::ops::Mul for Phase {
    type Output = Phase;
    fn mul(self, rhs: Phase) -> Phase {
        Phase((self.0 + rhs.0) % 4)
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self.0 {
            0 => "+",
            1 => "+i",
            2 => "-",
            _ => "-i",
        })
    }
}

/// A signed `n`-qubit Pauli word.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliOperator {
    letters: Vec<Pauli>,
    phase: Phase,
}

impl PauliOperator {
    pub fn identity(n: usize) -> Self {
        Self { letters: vec![Pauli::I; n], phase: Phase::ONE }
    }

    pub fn new(letters: Vec<Pauli>, phase: Phase) -> Self {
        Self { letters, phase }
    }

    /// Builds an operator from `(label, letter)` pairs with 1-based labels.
    ///
    /// Panics if a label is 0 or exceeds `n`.
    pub fn from_sparse(n: usize, terms: &[(usize, Pauli)]) -> Self {
        let mut op = Self::identity(n);
        for &(q, p) in terms {
            assert!(q >= 1 && q <= n, "qubit label {q} outside 1..={n}");
            op.letters[q - 1] = p;
        }
        op
    }

    /// The same letter on every listed (1-based) qubit.
    pub fn uniform(n: usize, letter: Pauli, support: &[usize]) -> Self {
        let terms: Vec<_> = support.iter().map(|&q| (q, letter)).collect();
        Self::from_sparse(n, &terms)
    }

    pub fn with_phase(mut self, phase: Phase) -> Self {
        self.phase = phase;
        self
    }

    pub fn num_qubits(&self) -> usize {
        self.letters.len()
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.letters
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    /// Letter on the 1-based qubit `q`.
    pub fn letter(&self, q: usize) -> Pauli {
        self.letters[q - 1]
    }

    pub fn set_letter(&mut self, q: usize, p: Pauli) {
        self.letters[q - 1] = p;
    }

    pub fn weight(&self) -> usize {
        self.letters.iter().filter(|&&p| p != Pauli::I).count()
    }

    pub fn is_identity(&self) -> bool {
        self.weight() == 0
    }

    /// 1-based labels of the non-identity positions.
    pub fn support(&self) -> Vec<usize> {
        self.letters
            .iter()
            .enumerate()
            .filter(|(_, &p)| p != Pauli::I)
            .map(|(i, _)| i + 1)
            .collect()
    }

    /// Bit `q - 1` set iff the letter on `q` has an X component.
    pub fn x_mask(&self) -> u64 {
        self.mask(Pauli::has_x)
    }

    pub fn z_mask(&self) -> u64 {
        self.mask(Pauli::has_z)
    }

    fn mask(&self, pred: fn(Pauli) -> bool) -> u64 {
        assert!(self.letters.len() <= 64, "bit masks need at most 64 qubits");
        self.letters
            .iter()
            .enumerate()
            .filter(|(_, &p)| pred(p))
            .fold(0, |m, (i, _)| m | (1 << i))
    }

    fn check_size(&self, other: &Self) -> Result<()> {
        if self.letters.len() != other.letters.len() {
            return Err(Error::SizeMismatch { left: self.letters.len(), right: other.letters.len() });
        }
        Ok(())
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        pauli_product(self, other)
    }

    pub fn commutes_with(&self, other: &Self) -> Result<bool> {
        commutes(self, other)
    }
}

/// The product `a · b` including its phase.
pub fn pauli_product(a: &PauliOperator, b: &PauliOperator) -> Result<PauliOperator> {
    a.check_size(b)?;
    let mut phase = a.phase * b.phase;
    let letters = a
        .letters
        .iter()
        .zip(&b.letters)
        .map(|(&p, &q)| {
            let (k, r) = p.mul(q);
            phase = phase * k;
            r
        })
        .collect();
    Ok(PauliOperator { letters, phase })
}

/// Whether `a` and `b` commute.
pub fn commutes(a: &PauliOperator, b: &PauliOperator) -> Result<bool> {
    a.check_size(b)?;
    let odd = a
        .letters
        .iter()
        .zip(&b.letters)
        .filter(|(p, q)| p.anticommutes(**q))
        .count()
        % 2;
    Ok(odd == 0)
}

impl fmt::Display for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.phase)?;
        for p in &self.letters {
            write!(f, "{}", p.symbol())?;
        }
        Ok(())
    }
}

impl FromStr for PauliOperator {
    type Err = Error;

    /// Parses dense words such as `XIZ`, `-YYY` or `+iXZ`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (phase, body) = if let Some(rest) = s.strip_prefix("+i") {
            (Phase::I, rest)
        } else if let Some(rest) = s.strip_prefix("-i") {
            (Phase::MINUS_I, rest)
        } else if let Some(rest) = s.strip_prefix('-') {
            (Phase::MINUS_ONE, rest)
        } else if let Some(rest) = s.strip_prefix('+') {
            (Phase::ONE, rest)
        } else {
            (Phase::ONE, s)
        };
        let letters = body
            .chars()
            .map(|c| match c {
                'I' | '_' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                other => Err(Error::Parse(format!("invalid Pauli letter `{other}`"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PauliOperator { letters, phase })
    }
}
