//! Shot decoding: pre-selection, destructive-measurement syndromes, Steane
//! readout in error-correction or post-selection mode, and the software
//! Z-frame of the switching teleportation.
//!
//! A record bit of 1 means eigenvalue -1.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use crate::circuit::{Basis, ExperimentKind};
use crate::codes::{build_lookup_table, steane_code, Sector, Syndrome, SyndromeTable, QRM_CELLS, STEANE_PLAQUETTES};
use crate::error::{Error, Result};
use crate::layout::{ShotLayout, ShotRecord, FLAGS, QRM_DATA, STEANE_DATA, Z_STABILIZERS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DecodeMode {
    /// Apply the lookup-table correction.
    Ec,
    /// Discard any nontrivial Steane syndrome.
    Ps,
}

impl fmt::Display for DecodeMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DecodeMode::Ec => "ec",
            DecodeMode::Ps => "ps",
        })
    }
}

impl FromStr for DecodeMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ec" => Ok(DecodeMode::Ec),
            "ps" => Ok(DecodeMode::Ps),
            other => Err(Error::Parse(format!("unknown decode mode `{other}` (expected ec or ps)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RejectReason {
    Flag,
    ZStabilizer,
    XSyndrome,
    SteaneSyndrome,
}

impl RejectReason {
    pub const ALL: [RejectReason; 4] =
        [RejectReason::Flag, RejectReason::ZStabilizer, RejectReason::XSyndrome, RejectReason::SteaneSyndrome];
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RejectReason::Flag => "flag",
            RejectReason::ZStabilizer => "z-stabilizer",
            RejectReason::XSyndrome => "x-syndrome",
            RejectReason::SteaneSyndrome => "steane-syndrome",
        })
    }
}

impl FromStr for RejectReason {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        RejectReason::ALL
            .into_iter()
            .find(|r| r.to_string() == s)
            .ok_or_else(|| Error::Parse(format!("unknown reject reason `{s}`")))
    }
}

/// A decoded logical measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LogicalValue {
    /// 0-based copy index.
    pub copy: usize,
    pub basis: Basis,
    /// +1 or -1, after the frame correction.
    pub value: i8,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AcceptedShot {
    /// Frame bit `a` per copy; true iff the qRM X-logical read -1.
    pub frames: Vec<bool>,
    pub logicals: Vec<LogicalValue>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DecodedShot {
    Accepted(AcceptedShot),
    Rejected(RejectReason),
}

impl DecodedShot {
    pub fn is_accepted(&self) -> bool {
        matches!(self, DecodedShot::Accepted(_))
    }

    pub fn reject_reason(&self) -> Option<RejectReason> {
        match self {
            DecodedShot::Rejected(r) => Some(*r),
            DecodedShot::Accepted(_) => None,
        }
    }

    /// Value of the logical measured on `copy`, if accepted.
    pub fn logical(&self, copy: usize) -> Option<i8> {
        match self {
            DecodedShot::Accepted(a) => a.logicals.iter().find(|l| l.copy == copy).map(|l| l.value),
            DecodedShot::Rejected(_) => None,
        }
    }

    pub fn frames(&self) -> Option<&[bool]> {
        match self {
            DecodedShot::Accepted(a) => Some(&a.frames),
            DecodedShot::Rejected(_) => None,
        }
    }

    /// Two-copy singlet event: (X1, Z2) = (-1, -1).
    pub fn is_singlet(&self) -> bool {
        self.logical(0) == Some(-1) && self.logical(1) == Some(-1)
    }
}

/// Parses a line of `0`/`1` characters against `layout`.
pub fn parse_shot(line: &str, layout: &ShotLayout) -> Result<ShotRecord> {
    let line = line.trim_end_matches(['\r', '\n']);
    if line.len() != layout.len() {
        return Err(Error::Parse(format!("record has {} bits, layout needs {}", line.len(), layout.len())));
    }
    line.chars()
        .enumerate()
        .map(|(i, ch)| match ch {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(Error::Parse(format!("invalid character `{other}` at position {i}"))),
        })
        .collect::<Result<Vec<_>>>()
        .map(ShotRecord::new)
}

fn segment<'a>(shot: &'a ShotRecord, layout: &ShotLayout, prefix: &str, name: &str) -> Result<&'a [bool]> {
    let full = format!("{prefix}{name}");
    if shot.len() != layout.len() {
        return Err(Error::Parse(format!("record has {} bits, layout needs {}", shot.len(), layout.len())));
    }
    shot.segment(layout, &full).ok_or_else(|| Error::MissingInput(format!("segment `{full}`")))
}

/// Flags first, then the four measured Z stabilizers, of the copy at `prefix`.
pub fn preselect(shot: &ShotRecord, layout: &ShotLayout, prefix: &str) -> Result<std::result::Result<(), RejectReason>> {
    if segment(shot, layout, prefix, FLAGS)?.iter().any(|&b| b) {
        return Ok(Err(RejectReason::Flag));
    }
    if segment(shot, layout, prefix, Z_STABILIZERS)?.iter().any(|&b| b) {
        return Ok(Err(RejectReason::ZStabilizer));
    }
    Ok(Ok(()))
}

/// Syndrome and logical value of an X-basis readout of the qRM block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QrmReadout {
    /// Parities over the cells c1..c4.
    pub x_syndrome: [bool; 4],
    /// (-1)^(parity of bits 1..7).
    pub x_logical: i8,
}

impl QrmReadout {
    pub fn syndrome_trivial(&self) -> bool {
        !self.x_syndrome.iter().any(|&b| b)
    }

    /// Frame bit a = (1 - X)/2.
    pub fn frame(&self) -> bool {
        self.x_logical == -1
    }
}

fn parity(bits: &[bool], support: &[usize]) -> bool {
    support.iter().fold(false, |acc, &q| acc ^ bits[q - 1])
}

pub fn qrm_destructive_postprocess(bits: &[bool]) -> Result<QrmReadout> {
    if bits.len() != 15 {
        return Err(Error::SizeMismatch { left: 15, right: bits.len() });
    }
    let mut x_syndrome = [false; 4];
    for (s, cell) in x_syndrome.iter_mut().zip(QRM_CELLS.iter()) {
        *s = parity(bits, cell);
    }
    let odd = parity(bits, &[1, 2, 3, 4, 5, 6, 7]);
    Ok(QrmReadout { x_syndrome, x_logical: if odd { -1 } else { 1 } })
}

fn steane_table() -> &'static SyndromeTable {
    static TABLE: OnceLock<SyndromeTable> = OnceLock::new();
    TABLE.get_or_init(|| build_lookup_table(&steane_code(), Sector::ZDetecting).expect("Steane table is collision free"))
}

/// Plaquette parities of a transversal readout. The X, Y and Z plaquettes
/// share supports, so the rule is the same in every basis.
pub fn steane_syndrome(bits: &[bool]) -> Syndrome {
    Syndrome(STEANE_PLAQUETTES.iter().map(|p| parity(bits, p)).collect())
}

/// Logical value of a transversal Steane readout in `basis`.
pub fn steane_logical_readout(bits: &[bool], basis: Basis, mode: DecodeMode) -> Result<std::result::Result<i8, RejectReason>> {
    if bits.len() != 7 {
        return Err(Error::SizeMismatch { left: 7, right: bits.len() });
    }
    let s = steane_syndrome(bits);
    let mut corrected = bits.to_vec();
    if !s.is_trivial() {
        match mode {
            DecodeMode::Ps => return Ok(Err(RejectReason::SteaneSyndrome)),
            DecodeMode::Ec => {
                if let Some(Some(q)) = steane_table().flipped_qubit(&s) {
                    corrected[q - 1] ^= true;
                }
            }
        }
    }
    let mut value: i8 = if parity(&corrected, &[1, 2, 3]) { -1 } else { 1 };
    if basis == Basis::Y {
        value = -value;
    }
    Ok(Ok(value))
}

fn qrm_stage(shot: &ShotRecord, layout: &ShotLayout, prefix: &str) -> Result<std::result::Result<bool, RejectReason>> {
    let r = qrm_destructive_postprocess(segment(shot, layout, prefix, QRM_DATA)?)?;
    Ok(if r.syndrome_trivial() { Ok(r.frame()) } else { Err(RejectReason::XSyndrome) })
}

/// Frame bit of a bare preparation record (no Steane readout).
pub fn decode_magic_prep(shot: &ShotRecord, layout: &ShotLayout) -> Result<std::result::Result<bool, RejectReason>> {
    if let Err(r) = preselect(shot, layout, "")? {
        return Ok(Err(r));
    }
    qrm_stage(shot, layout, "")
}

pub fn decode_single_copy(shot: &ShotRecord, layout: &ShotLayout, basis: Basis, mode: DecodeMode) -> Result<DecodedShot> {
    if let Err(r) = preselect(shot, layout, "")? {
        return Ok(DecodedShot::Rejected(r));
    }
    let a = match qrm_stage(shot, layout, "")? {
        Ok(a) => a,
        Err(r) => return Ok(DecodedShot::Rejected(r)),
    };
    let mut value = match steane_logical_readout(segment(shot, layout, "", STEANE_DATA)?, basis, mode)? {
        Ok(v) => v,
        Err(r) => return Ok(DecodedShot::Rejected(r)),
    };
    if a && basis != Basis::Z {
        value = -value;
    }
    Ok(DecodedShot::Accepted(AcceptedShot { frames: vec![a], logicals: vec![LogicalValue { copy: 0, basis, value }] }))
}

/// Copy 1 read in X, copy 2 in Z; X1 flips when a1 + a2 is odd.
pub fn decode_two_copy(shot: &ShotRecord, layout: &ShotLayout, mode: DecodeMode) -> Result<DecodedShot> {
    let prefixes = ["copy1/", "copy2/"];
    for p in prefixes {
        if let Err(r) = preselect(shot, layout, p)? {
            return Ok(DecodedShot::Rejected(r));
        }
    }
    let mut frames = Vec::with_capacity(2);
    for p in prefixes {
        match qrm_stage(shot, layout, p)? {
            Ok(a) => frames.push(a),
            Err(r) => return Ok(DecodedShot::Rejected(r)),
        }
    }
    let mut logicals = Vec::with_capacity(2);
    for (copy, (p, basis)) in prefixes.iter().zip([Basis::X, Basis::Z]).enumerate() {
        match steane_logical_readout(segment(shot, layout, p, STEANE_DATA)?, basis, mode)? {
            Ok(value) => logicals.push(LogicalValue { copy, basis, value }),
            Err(r) => return Ok(DecodedShot::Rejected(r)),
        }
    }
    if frames[0] ^ frames[1] {
        logicals[0].value = -logicals[0].value;
    }
    Ok(DecodedShot::Accepted(AcceptedShot { frames, logicals }))
}

/// Dispatches on the experiment kind.
pub fn decode_shot(kind: ExperimentKind, shot: &ShotRecord, layout: &ShotLayout, mode: DecodeMode) -> Result<DecodedShot> {
    match kind {
        ExperimentKind::SingleCopy(b) => decode_single_copy(shot, layout, b, mode),
        ExperimentKind::TwoCopy => decode_two_copy(shot, layout, mode),
        ExperimentKind::MagicPrep => Ok(match decode_magic_prep(shot, layout)? {
            Ok(a) => DecodedShot::Accepted(AcceptedShot { frames: vec![a], logicals: Vec::new() }),
            Err(r) => DecodedShot::Rejected(r),
        }),
    }
}
