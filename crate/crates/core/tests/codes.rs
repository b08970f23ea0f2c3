use codeswitch::codes::{
    build_lookup_table, in_stabilizer_group, qrm_code, steane_code, syndrome, verify_code, Sector, StabilizerCode,
    Syndrome,
};
use codeswitch::pauli::{commutes, pauli_product, Pauli, PauliOperator, Phase};
use proptest::prelude::*;

fn codes() -> [StabilizerCode; 2] {
    [steane_code(), qrm_code()]
}

fn logicals(code: &StabilizerCode) -> [&PauliOperator; 3] {
    [&code.logical_x, &code.logical_y, &code.logical_z]
}

#[test]
fn both_codes_verify() {
    for code in codes() {
        let report = verify_code(&code);
        assert!(report.passed(), "{}: {:?}", code.name, report.first_failure());
    }
}

#[test]
fn weight_one_errors_are_corrected_trivially() {
    for code in codes() {
        let tz = build_lookup_table(&code, Sector::ZDetecting).unwrap();
        let tx = build_lookup_table(&code, Sector::XDetecting).unwrap();
        let mut checked = 0;
        for q in 1..=code.n {
            for p in Pauli::NONTRIVIAL {
                let e = PauliOperator::from_sparse(code.n, &[(q, p)]);
                let cz = tz.correction(&syndrome(&code, &e, Sector::ZDetecting).unwrap()).expect("x part correctable");
                let cx = tx.correction(&syndrome(&code, &e, Sector::XDetecting).unwrap()).expect("z part correctable");
                let residual = pauli_product(&pauli_product(cz, cx).unwrap(), &e).unwrap();
                assert!(in_stabilizer_group(&code, &residual).unwrap(), "{}: {e} leaves {residual}", code.name);
                for l in logicals(&code) {
                    assert!(commutes(&residual, l).unwrap());
                }
                checked += 1;
            }
        }
        assert_eq!(checked, 3 * code.n);
    }
}

/// Minimum-weight error of the detected letter for every syndrome, found by
/// enumerating all 2^n patterns.
fn brute_force(code: &StabilizerCode, sector: Sector) -> std::collections::BTreeMap<Syndrome, (usize, Vec<u64>)> {
    let mut best: std::collections::BTreeMap<Syndrome, (usize, Vec<u64>)> = Default::default();
    let letter = sector.detected_letter();
    for mask in 0u64..(1 << code.n) {
        let support: Vec<usize> = (0..code.n).filter(|b| mask >> b & 1 == 1).map(|b| b + 1).collect();
        let e = PauliOperator::uniform(code.n, letter, &support);
        let s = syndrome(code, &e, sector).unwrap();
        let w = support.len();
        let entry = best.entry(s).or_insert((w, Vec::new()));
        if w < entry.0 {
            *entry = (w, Vec::new());
        }
        if w == entry.0 {
            entry.1.push(mask);
        }
    }
    best
}

#[test]
fn steane_table_matches_minimum_weight_decoding() {
    let code = steane_code();
    for sector in [Sector::ZDetecting, Sector::XDetecting] {
        let table = build_lookup_table(&code, sector).unwrap();
        let oracle = brute_force(&code, sector);
        assert_eq!(oracle.len(), 8);
        assert_eq!(table.entries.len(), 8);
        for (s, (w, masks)) in &oracle {
            assert!(*w <= 1);
            assert_eq!(masks.len(), 1, "minimum-weight decoding is unique for distance 3");
            let c = table.correction(s).unwrap();
            let mask = c.support().iter().fold(0u64, |m, q| m | 1 << (q - 1));
            assert_eq!(mask, masks[0], "syndrome {s}");
        }
    }
}

#[test]
fn qrm_table_matches_minimum_weight_decoding() {
    let code = qrm_code();
    for sector in [Sector::ZDetecting, Sector::XDetecting] {
        let table = build_lookup_table(&code, sector).unwrap();
        let oracle = brute_force(&code, sector);
        for (s, (w, masks)) in &oracle {
            match table.correction(s) {
                Some(c) => {
                    assert_eq!(c.weight(), *w, "syndrome {s}");
                    let mask = c.support().iter().fold(0u64, |m, q| m | 1 << (q - 1));
                    assert!(masks.contains(&mask));
                }
                None => assert!(*w >= 2, "syndrome {s} has weight {w} but no table entry"),
            }
        }
        assert_eq!(table.entries.len(), oracle.values().filter(|(w, _)| *w <= 1).count());
    }
}

fn pauli_strategy(n: usize) -> impl Strategy<Value = PauliOperator> {
    (prop::collection::vec(0u8..4, n), 0u32..4).prop_map(|(letters, k)| {
        let letters = letters.into_iter().map(|l| [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][l as usize]).collect();
        PauliOperator::new(letters, Phase::from_power(k))
    })
}

proptest! {
    #[test]
    fn product_is_associative(a in pauli_strategy(9), b in pauli_strategy(9), c in pauli_strategy(9)) {
        let left = pauli_product(&pauli_product(&a, &b).unwrap(), &c).unwrap();
        let right = pauli_product(&a, &pauli_product(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn swapped_products_differ_by_the_commutation_sign(a in pauli_strategy(7), b in pauli_strategy(7)) {
        let ab = pauli_product(&a, &b).unwrap();
        let ba = pauli_product(&b, &a).unwrap();
        prop_assert_eq!(ab.letters(), ba.letters());
        let diff = (ab.phase().power() + 4 - ba.phase().power()) % 4;
        prop_assert_eq!(diff, if commutes(&a, &b).unwrap() { 0 } else { 2 });
    }

    #[test]
    fn syndrome_is_linear(a in pauli_strategy(15), b in pauli_strategy(15)) {
        let code = qrm_code();
        for sector in [Sector::ZDetecting, Sector::XDetecting] {
            let sa = syndrome(&code, &a, sector).unwrap();
            let sb = syndrome(&code, &b, sector).unwrap();
            let sab = syndrome(&code, &pauli_product(&a, &b).unwrap(), sector).unwrap();
            let xor: Vec<bool> = sa.0.iter().zip(&sb.0).map(|(x, y)| x ^ y).collect();
            prop_assert_eq!(sab.0, xor);
        }
    }
}
