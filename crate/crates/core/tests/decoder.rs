use codeswitch::circuit::{build_experiment, Basis, ExperimentKind};
use codeswitch::codes::{steane_code, STEANE_PLAQUETTES};
use codeswitch::decode::{
    decode_shot, decode_single_copy, qrm_destructive_postprocess, steane_logical_readout, DecodeMode, DecodedShot,
    RejectReason,
};
use codeswitch::layout::{ShotLayout, ShotRecord, QRM_DATA, STEANE_DATA};
use codeswitch::sim::{run_batch, NoiseModel};
use proptest::prelude::*;

/// Classical code of a transversal Steane readout: the plaquettes plus the all-ones word.
fn codewords() -> Vec<u8> {
    let mut gens: Vec<u8> = STEANE_PLAQUETTES.iter().map(|p| p.iter().fold(0u8, |m, q| m | 1 << (q - 1))).collect();
    gens.push(0x7f);
    (0u8..16).map(|k| gens.iter().enumerate().filter(|(i, _)| k >> i & 1 == 1).fold(0, |w, (_, g)| w ^ g)).collect()
}

/// Expected decoded value by nearest-codeword decoding and the code's logical operators.
fn oracle(word: u8, basis: Basis) -> (u32, i8) {
    let code = steane_code();
    let (op, letter_sign) = match basis {
        Basis::X => (&code.logical_x, 1),
        Basis::Y => (&code.logical_y, code.logical_y.phase().sign().expect("real phase")),
        Basis::Z => (&code.logical_z, 1),
    };
    let support = op.support().iter().fold(0u8, |m, q| m | 1 << (q - 1));
    let (dist, nearest) = codewords().into_iter().map(|c| ((c ^ word).count_ones(), c)).min().unwrap();
    let parity = (nearest & support).count_ones() % 2;
    (dist, letter_sign * if parity == 1 { -1 } else { 1 })
}

fn bits_of(word: u8) -> Vec<bool> {
    (0..7).map(|b| word >> b & 1 == 1).collect()
}

#[test]
fn steane_readout_matches_nearest_codeword_oracle() {
    assert_eq!(codewords().iter().collect::<std::collections::BTreeSet<_>>().len(), 16);
    for basis in [Basis::X, Basis::Y, Basis::Z] {
        for word in 0u8..128 {
            let (dist, expected) = oracle(word, basis);
            assert!(dist <= 1);
            let ec = steane_logical_readout(&bits_of(word), basis, DecodeMode::Ec).unwrap();
            assert_eq!(ec, Ok(expected), "{basis} word {word:07b}");
            let ps = steane_logical_readout(&bits_of(word), basis, DecodeMode::Ps).unwrap();
            if dist == 0 {
                assert_eq!(ps, Ok(expected));
            } else {
                assert_eq!(ps, Err(RejectReason::SteaneSyndrome));
            }
        }
    }
}

fn with_segment(layout: &ShotLayout, mut rec: ShotRecord, segment: &str, bits: &[bool]) -> ShotRecord {
    let start = layout.segment(segment).unwrap().start;
    for (k, &b) in bits.iter().enumerate() {
        rec.set(start + k, b);
    }
    rec
}

#[test]
fn qrm_frame_flips_x_and_y_only() {
    let layout = ShotLayout::single_copy();
    let ones = vec![true; 15];
    let r = qrm_destructive_postprocess(&ones).unwrap();
    assert!(r.syndrome_trivial() && r.frame());
    for basis in [Basis::X, Basis::Y, Basis::Z] {
        let plain = ShotRecord::zeros(31);
        let framed = with_segment(&layout, plain.clone(), QRM_DATA, &ones);
        let a = decode_single_copy(&plain, &layout, basis, DecodeMode::Ec).unwrap().logical(0).unwrap();
        let b = decode_single_copy(&framed, &layout, basis, DecodeMode::Ec).unwrap().logical(0).unwrap();
        assert_eq!(a == b, basis == Basis::Z, "{basis}");
    }
    let mut broken = ones.clone();
    broken[14] = false;
    let rec = with_segment(&layout, ShotRecord::zeros(31), QRM_DATA, &broken);
    assert_eq!(decode_single_copy(&rec, &layout, Basis::X, DecodeMode::Ec).unwrap(), DecodedShot::Rejected(RejectReason::XSyndrome));
}

fn noisy_records(kind: ExperimentKind, n: usize, seed: u64, scale: f64) -> Vec<ShotRecord> {
    let d = NoiseModel::default();
    let noise = NoiseModel { p2: d.p2 * scale, p_meas1: d.p_meas1 * scale, p_meas0: d.p_meas0 * scale, p_idle: d.p_idle * scale, ..d };
    run_batch(&build_experiment(kind, false), &noise, n, seed).unwrap()
}

#[test]
fn correction_survives_any_single_extra_flip() {
    for (i, basis) in [Basis::X, Basis::Y, Basis::Z].into_iter().enumerate() {
        let kind = ExperimentKind::SingleCopy(basis);
        let layout = kind.layout();
        let data = layout.segment(STEANE_DATA).unwrap().range();
        let mut checked = 0;
        for rec in noisy_records(kind, 300, 60 + i as u64, 1.0) {
            // only records whose Steane readout is a codeword stay decodable after a flip
            let d = decode_shot(kind, &rec, &layout, DecodeMode::Ps).unwrap();
            let Some(v) = d.logical(0) else { continue };
            for b in data.clone() {
                let mut flipped = rec.clone();
                flipped.set(b, !rec.bit(b));
                let e = decode_shot(kind, &flipped, &layout, DecodeMode::Ec).unwrap();
                assert_eq!(e.logical(0), Some(v), "{basis} bit {b}");
            }
            checked += 1;
        }
        assert!(checked > 100, "{basis}: {checked}");
    }
}

#[test]
fn every_record_is_counted_once() {
    let kind = ExperimentKind::TwoCopy;
    let layout = kind.layout();
    let recs = noisy_records(kind, 400, 5, 4.0);
    for mode in [DecodeMode::Ec, DecodeMode::Ps] {
        let decoded: Vec<DecodedShot> = recs.iter().map(|r| decode_shot(kind, r, &layout, mode).unwrap()).collect();
        let accepted = decoded.iter().filter(|d| d.is_accepted()).count();
        let by_reason: usize = RejectReason::ALL.iter().map(|&r| decoded.iter().filter(|d| d.reject_reason() == Some(r)).count()).sum();
        assert_eq!(accepted + by_reason, recs.len());
        assert!(accepted > 0 && by_reason > 0);
    }
}

fn record_strategy(len: usize) -> impl Strategy<Value = Vec<bool>> {
    // sparse ones so that a fair share of records passes pre-selection
    prop::collection::vec(prop::bool::weighted(0.04), len)
}

proptest! {
    #[test]
    fn post_selection_is_a_subset_of_correction(bits in record_strategy(31), basis in 0usize..3) {
        let basis = [Basis::X, Basis::Y, Basis::Z][basis];
        let kind = ExperimentKind::SingleCopy(basis);
        let layout = kind.layout();
        let rec = ShotRecord::new(bits);
        let ec = decode_shot(kind, &rec, &layout, DecodeMode::Ec).unwrap();
        let ps = decode_shot(kind, &rec, &layout, DecodeMode::Ps).unwrap();
        if ps.is_accepted() {
            prop_assert_eq!(&ec, &ps);
        }
        prop_assert_eq!(decode_shot(kind, &rec, &layout, DecodeMode::Ec).unwrap(), ec);
    }

    #[test]
    fn two_copy_post_selection_is_a_subset(bits in record_strategy(62)) {
        let kind = ExperimentKind::TwoCopy;
        let layout = kind.layout();
        let rec = ShotRecord::new(bits);
        let ec = decode_shot(kind, &rec, &layout, DecodeMode::Ec).unwrap();
        let ps = decode_shot(kind, &rec, &layout, DecodeMode::Ps).unwrap();
        if ps.is_accepted() {
            prop_assert_eq!(ec, ps);
        }
    }
}
