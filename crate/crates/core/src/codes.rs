//! Concrete definitions of the Steane [[7,1,3]] and quantum Reed-Muller
//! [[15,1,3]] codes, syndrome maps and the weight-1 lookup-table decoder.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::pauli::{commutes, pauli_product, Pauli, PauliOperator, Phase};

/// Which generator family is used to compute a syndrome.
///
/// Z-type generators detect the X component of an error and vice versa.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sector {
    ZDetecting,
    XDetecting,
}

impl Sector {
    /// Letter of the single-qubit errors this sector detects.
    pub fn detected_letter(self) -> Pauli {
        match self {
            Sector::ZDetecting => Pauli::X,
            Sector::XDetecting => Pauli::Z,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledGenerator {
    pub label: String,
    pub op: PauliOperator,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilizerCode {
    pub name: &'static str,
    pub n: usize,
    pub k: usize,
    pub d: usize,
    pub z_generators: Vec<LabeledGenerator>,
    pub x_generators: Vec<LabeledGenerator>,
    /// Labels of an independent subset of `z_generators`.
    pub independent_z: Vec<String>,
    pub logical_x: PauliOperator,
    pub logical_y: PauliOperator,
    pub logical_z: PauliOperator,
}

fn labeled(n: usize, letter: Pauli, prefix: &str, supports: &[&[usize]]) -> Vec<LabeledGenerator> {
    supports
        .iter()
        .enumerate()
        .map(|(i, s)| LabeledGenerator {
            label: format!("{prefix}{}", i + 1),
            op: PauliOperator::uniform(n, letter, s),
        })
        .collect()
}

/// Plaquette supports shared by the Steane code and the base face of the qRM code.
pub const STEANE_PLAQUETTES: [[usize; 4]; 3] = [[1, 2, 6, 7], [2, 3, 4, 7], [4, 5, 6, 7]];

/// The 18 weight-4 Z plaquettes `p1..p18` of the qRM code.
pub const QRM_PLAQUETTES: [[usize; 4]; 18] = [
    [1, 2, 6, 7],
    [2, 3, 4, 7],
    [4, 5, 6, 7],
    [1, 6, 8, 13],
    [1, 2, 8, 9],
    [2, 3, 9, 10],
    [3, 4, 10, 11],
    [4, 5, 11, 12],
    [5, 6, 12, 13],
    [6, 7, 13, 14],
    [2, 7, 9, 14],
    [4, 7, 11, 14],
    [8, 12, 13, 15],
    [8, 9, 10, 15],
    [10, 11, 12, 15],
    [8, 9, 13, 14],
    [9, 10, 11, 14],
    [11, 12, 13, 14],
];

/// The four weight-8 X cells `c1..c4` of the qRM code.
pub const QRM_CELLS: [[usize; 8]; 4] = [
    [1, 2, 6, 7, 8, 9, 13, 14],
    [4, 5, 6, 7, 11, 12, 13, 14],
    [2, 3, 4, 7, 9, 10, 11, 14],
    [8, 9, 10, 11, 12, 13, 14, 15],
];

pub fn steane_code() -> StabilizerCode {
    let n = 7;
    let supports: Vec<&[usize]> = STEANE_PLAQUETTES.iter().map(|s| s.as_slice()).collect();
    let z_generators = labeled(n, Pauli::Z, "p", &supports);
    StabilizerCode {
        name: "steane",
        n,
        k: 1,
        d: 3,
        independent_z: z_generators.iter().map(|g| g.label.clone()).collect(),
        z_generators,
        x_generators: labeled(n, Pauli::X, "p", &supports),
        logical_x: PauliOperator::uniform(n, Pauli::X, &[1, 2, 3]),
        logical_y: PauliOperator::uniform(n, Pauli::Y, &[1, 2, 3]).with_phase(Phase::MINUS_ONE),
        logical_z: PauliOperator::uniform(n, Pauli::Z, &[1, 2, 3]),
    }
}

pub fn qrm_code() -> StabilizerCode {
    let n = 15;
    let plaquettes: Vec<&[usize]> = QRM_PLAQUETTES.iter().map(|s| s.as_slice()).collect();
    let cells: Vec<&[usize]> = QRM_CELLS.iter().map(|s| s.as_slice()).collect();
    let logical_x = PauliOperator::uniform(n, Pauli::X, &[1, 2, 3, 4, 5, 6, 7]);
    let logical_z = PauliOperator::uniform(n, Pauli::Z, &[1, 2, 3]);
    // Ybar = i Xbar Zbar
    let xz = pauli_product(&logical_x, &logical_z).expect("same size");
    let logical_y = xz.clone().with_phase(xz.phase() * Phase::I);
    StabilizerCode {
        name: "qrm",
        n,
        k: 1,
        d: 3,
        z_generators: labeled(n, Pauli::Z, "p", &plaquettes),
        x_generators: labeled(n, Pauli::X, "c", &cells),
        independent_z: ["p1", "p2", "p3", "p7", "p8", "p9", "p13", "p16", "p17", "p18"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
        logical_x,
        logical_y,
        logical_z,
    }
}

impl StabilizerCode {
    pub fn generators(&self, sector: Sector) -> &[LabeledGenerator] {
        match sector {
            Sector::ZDetecting => &self.z_generators,
            Sector::XDetecting => &self.x_generators,
        }
    }

    pub fn generator(&self, label: &str) -> Option<&PauliOperator> {
        self.z_generators
            .iter()
            .chain(&self.x_generators)
            .find(|g| g.label == label)
            .map(|g| &g.op)
    }

    /// Z-type generator by label.
    pub fn z_generator(&self, label: &str) -> Option<&PauliOperator> {
        self.z_generators.iter().find(|g| g.label == label).map(|g| &g.op)
    }

    pub fn syndrome(&self, error: &PauliOperator, sector: Sector) -> Result<Syndrome> {
        syndrome(self, error, sector)
    }
}

/// Bit pattern of violated generators, in generator order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Syndrome(pub Vec<bool>);

impl Syndrome {
    pub fn zeros(len: usize) -> Self {
        Syndrome(vec![false; len])
    }

    pub fn from_bits(bits: &[u8]) -> Self {
        Syndrome(bits.iter().map(|&b| b != 0).collect())
    }

    pub fn is_trivial(&self) -> bool {
        self.0.iter().all(|b| !b)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for Syndrome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

pub fn syndrome(code: &StabilizerCode, error: &PauliOperator, sector: Sector) -> Result<Syndrome> {
    if error.num_qubits() != code.n {
        return Err(Error::SizeMismatch { left: code.n, right: error.num_qubits() });
    }
    code.generators(sector)
        .iter()
        .map(|g| commutes(&g.op, error).map(|c| !c))
        .collect::<Result<Vec<_>>>()
        .map(Syndrome)
}

/// Lookup table from syndromes to weight-≤1 corrections.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyndromeTable {
    pub sector: Sector,
    pub entries: BTreeMap<Syndrome, PauliOperator>,
}

impl SyndromeTable {
    pub fn correction(&self, s: &Syndrome) -> Option<&PauliOperator> {
        self.entries.get(s)
    }

    /// 1-based qubit flipped by the correction for `s`; `Some(None)` for the identity.
    pub fn flipped_qubit(&self, s: &Syndrome) -> Option<Option<usize>> {
        self.correction(s).map(|c| c.support().first().copied())
    }
}

pub fn build_lookup_table(code: &StabilizerCode, sector: Sector) -> Result<SyndromeTable> {
    let len = code.generators(sector).len();
    let mut entries = BTreeMap::new();
    entries.insert(Syndrome::zeros(len), PauliOperator::identity(code.n));
    let letter = sector.detected_letter();
    for q in 1..=code.n {
        let err = PauliOperator::from_sparse(code.n, &[(q, letter)]);
        let s = syndrome(code, &err, sector)?;
        if let Some(existing) = entries.get(&s) {
            let prod = pauli_product(existing, &err)?;
            if !in_stabilizer_group(code, &prod)? {
                return Err(Error::CodeDefinition(format!(
                    "{}: syndrome {s} shared by {existing} and {err}",
                    code.name
                )));
            }
            continue;
        }
        entries.insert(s, err);
    }
    Ok(SyndromeTable { sector, entries })
}

/// Checks membership of a Pauli (ignoring phase) in the stabilizer group by
/// Gaussian elimination over GF(2) on the symplectic representation.
pub fn in_stabilizer_group(code: &StabilizerCode, op: &PauliOperator) -> Result<bool> {
    if op.num_qubits() != code.n {
        return Err(Error::SizeMismatch { left: code.n, right: op.num_qubits() });
    }
    let n = code.n;
    let to_vec = |p: &PauliOperator| -> u128 { (p.x_mask() as u128) | ((p.z_mask() as u128) << n) };
    let mut basis: Vec<u128> = Vec::new();
    for g in code.z_generators.iter().chain(&code.x_generators) {
        let mut v = to_vec(&g.op);
        for &b in &basis {
            v = v.min(v ^ b);
        }
        if v != 0 {
            basis.push(v);
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    let mut v = to_vec(op);
    for &b in &basis {
        v = v.min(v ^ b);
    }
    Ok(v == 0)
}

/// Outcome of [`verify_code`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeReport {
    pub code: &'static str,
    pub checked_low_weight: usize,
    pub failures: Vec<String>,
}

impl CodeReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn first_failure(&self) -> Option<&str> {
        self.failures.first().map(String::as_str)
    }
}

/// Checks generator commutation, logical (anti)commutation, the stored sign of
/// `Ybar = i Xbar Zbar`, and distance by enumerating every Pauli of weight `< d`.
pub fn verify_code(code: &StabilizerCode) -> CodeReport {
    let mut failures = Vec::new();
    let gens: Vec<&LabeledGenerator> = code.z_generators.iter().chain(&code.x_generators).collect();

    for (i, a) in gens.iter().enumerate() {
        for b in &gens[i + 1..] {
            if !commutes(&a.op, &b.op).unwrap_or(false) {
                failures.push(format!("commutation: {} and {} anticommute", a.label, b.label));
            }
        }
    }

    let logicals = [("X", &code.logical_x), ("Y", &code.logical_y), ("Z", &code.logical_z)];
    for (name, l) in logicals {
        for g in &gens {
            if !commutes(l, &g.op).unwrap_or(false) {
                failures.push(format!("logical {name} anticommutes with {}", g.label));
            }
        }
    }
    if commutes(&code.logical_x, &code.logical_z).unwrap_or(true) {
        failures.push("logical X and Z commute".into());
    }
    match pauli_product(&code.logical_x, &code.logical_z) {
        Ok(xz) => {
            let expected = xz.clone().with_phase(xz.phase() * Phase::I);
            let same_letters = expected.letters() == code.logical_y.letters();
            if !same_letters || expected.phase() != code.logical_y.phase() {
                failures.push(format!(
                    "logical Y {} differs from i*X*Z = {}",
                    code.logical_y, expected
                ));
            }
        }
        Err(e) => failures.push(e.to_string()),
    }

    let mut checked = 0;
    let mut distance_violation = None;
    for_each_low_weight(code.n, code.d.saturating_sub(1), |p| {
        if distance_violation.is_some() {
            return;
        }
        checked += 1;
        let in_normalizer = gens.iter().all(|g| commutes(&g.op, p).unwrap_or(false));
        if !in_normalizer {
            return;
        }
        let acts = logicals.iter().any(|(_, l)| !commutes(l, p).unwrap_or(true));
        if acts {
            distance_violation = Some(format!("distance: {p} is a logical operator of weight {}", p.weight()));
        }
    });
    failures.extend(distance_violation);

    CodeReport { code: code.name, checked_low_weight: checked, failures }
}

/// Calls `f` on every Pauli of weight `1..=max_weight` on `n` qubits.
pub fn for_each_low_weight(n: usize, max_weight: usize, mut f: impl FnMut(&PauliOperator)) {
    fn rec(
        n: usize,
        start: usize,
        left: usize,
        cur: &mut PauliOperator,
        f: &mut dyn FnMut(&PauliOperator),
    ) {
        if left == 0 {
            return;
        }
        for q in start..=n {
            for p in Pauli::NONTRIVIAL {
                cur.set_letter(q, p);
                f(cur);
                rec(n, q + 1, left - 1, cur, f);
            }
            cur.set_letter(q, Pauli::I);
        }
    }
    let mut cur = PauliOperator::identity(n);
    rec(n, 1, max_weight, &mut cur, &mut f);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn steane_parameters_and_logicals() {
        let c = steane_code();
        assert_eq!((c.n, c.k, c.d), (7, 1, 3));
        assert_eq!(c.z_generators.len(), 3);
        assert_eq!(c.x_generators.len(), 3);
        assert_eq!(c.logical_y.to_string(), "-YYYIIII");
        assert_eq!(c.z_generators[0].op.support(), vec![1, 2, 6, 7]);
    }

    #[test]
    fn qrm_stores_all_plaquettes() {
        let c = qrm_code();
        assert_eq!(c.z_generators.len(), 18);
        assert_eq!(c.independent_z.len(), 10);
        assert_eq!(c.x_generators[3].op.support(), (8..=15).collect::<Vec<_>>());
        assert_eq!(c.z_generator("p13").unwrap().support(), vec![8, 12, 13, 15]);
        let mut pairs = 0;
        for p in &c.z_generators {
            for x in &c.x_generators {
                assert!(commutes(&p.op, &x.op).unwrap(), "{} vs {}", p.label, x.label);
                pairs += 1;
            }
        }
        assert_eq!(pairs, 72);
    }

    #[test]
    fn qrm_independent_subset_spans_all_plaquettes() {
        let c = qrm_code();
        let mut basis: Vec<u64> = Vec::new();
        for l in &c.independent_z {
            let mut v = c.z_generator(l).unwrap().z_mask();
            for &b in &basis {
                v = v.min(v ^ b);
            }
            assert_ne!(v, 0, "{l} is dependent");
            basis.push(v);
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
        for g in &c.z_generators {
            let mut v = g.op.z_mask();
            for &b in &basis {
                v = v.min(v ^ b);
            }
            assert_eq!(v, 0, "{} outside the span", g.label);
        }
    }

    #[test]
    fn steane_syndromes() {
        let c = steane_code();
        let x7 = PauliOperator::from_sparse(7, &[(7, Pauli::X)]);
        assert_eq!(c.syndrome(&x7, Sector::ZDetecting).unwrap(), Syndrome::from_bits(&[1, 1, 1]));
        let z3 = PauliOperator::from_sparse(7, &[(3, Pauli::Z)]);
        assert_eq!(c.syndrome(&z3, Sector::XDetecting).unwrap(), Syndrome::from_bits(&[0, 1, 0]));
        let id = PauliOperator::identity(7);
        assert!(c.syndrome(&id, Sector::ZDetecting).unwrap().is_trivial());
        assert!(qrm_code().syndrome(&PauliOperator::identity(15), Sector::XDetecting).unwrap().is_trivial());
        assert!(c.syndrome(&PauliOperator::identity(6), Sector::ZDetecting).is_err());
    }

    #[test]
    fn steane_lookup_table() {
        let c = steane_code();
        let t = build_lookup_table(&c, Sector::ZDetecting).unwrap();
        assert_eq!(t.entries.len(), 8);
        assert_eq!(t.flipped_qubit(&Syndrome::from_bits(&[1, 0, 0])), Some(Some(1)));
        assert_eq!(t.flipped_qubit(&Syndrome::from_bits(&[1, 1, 1])), Some(Some(7)));
        assert!(t.correction(&Syndrome::from_bits(&[0, 0, 0])).unwrap().is_identity());
        assert_eq!(
            t.correction(&Syndrome::from_bits(&[1, 0, 0])).unwrap(),
            &PauliOperator::from_sparse(7, &[(1, Pauli::X)])
        );
    }

    #[test]
    fn qrm_lookup_tables_cover_weight_one() {
        let c = qrm_code();
        let x = build_lookup_table(&c, Sector::XDetecting).unwrap();
        assert_eq!(x.entries.len(), 16);
        let z = build_lookup_table(&c, Sector::ZDetecting).unwrap();
        assert_eq!(z.entries.len(), 16);
    }

    #[test]
    fn syndrome_collision_is_reported() {
        let mut c = steane_code();
        // q1 and q3 become indistinguishable to the Z-detecting sector
        c.z_generators = vec![LabeledGenerator {
            label: "p1".into(),
            op: PauliOperator::uniform(7, Pauli::Z, &[2, 4, 5, 6, 7]),
        }];
        assert!(matches!(build_lookup_table(&c, Sector::ZDetecting), Err(Error::CodeDefinition(_))));
    }

    #[test]
    fn both_codes_verify() {
        let r = verify_code(&steane_code());
        assert!(r.passed(), "{:?}", r.failures);
        assert_eq!(r.checked_low_weight, 3 * 7 + 9 * 21);
        let r = verify_code(&qrm_code());
        assert!(r.passed(), "{:?}", r.failures);
        assert_eq!(r.checked_low_weight, 3 * 15 + 9 * 105);
    }

    #[test]
    fn mutated_plaquette_fails_commutation() {
        let mut c = steane_code();
        c.z_generators[0].op = PauliOperator::uniform(7, Pauli::Z, &[1, 2, 6]);
        let r = verify_code(&c);
        assert!(!r.passed());
        assert!(r.first_failure().unwrap().starts_with("commutation"));
    }

    #[test]
    fn flipped_logical_y_sign_is_caught() {
        let mut c = steane_code();
        c.logical_y = c.logical_y.clone().with_phase(Phase::ONE);
        assert!(!verify_code(&c).passed());
    }

    #[test]
    fn stabilizer_membership() {
        let c = steane_code();
        let p = pauli_product(&c.x_generators[0].op, &c.z_generators[1].op).unwrap();
        assert!(in_stabilizer_group(&c, &p).unwrap());
        assert!(!in_stabilizer_group(&c, &c.logical_x).unwrap());
    }
}
