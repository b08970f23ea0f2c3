//! Classical-bit layout of a shot record.
//!
//! This is the only 0-based ordering in the crate: bit `i` of a record is
//! character `i` of a shot-file line and creg index `c[i]` in emitted QASM.

use crate::error::{Error, Result};

pub const STEANE_DATA: &str = "steane-data";
pub const QRM_DATA: &str = "qrm-data";
pub const Z_STABILIZERS: &str = "z-stabilizers";
pub const FLAGS: &str = "flags";

/// Measured qRM plaquettes, in record order.
pub const ROUND_PLAQUETTES: [&str; 4] = ["p13", "p8", "p2", "p3"];
pub const FLAG_LABELS: [&str; 5] = ["init-steane", "init-qrm", "flag-p13", "flag-p8", "flag-parallel"];

/// A named contiguous run of record bits with per-bit labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub name: String,
    pub start: usize,
    pub labels: Vec<String>,
}

impl Segment {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn range(&self) -> std::ops::Range<usize> {
        self.start..self.start + self.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShotLayout {
    segments: Vec<Segment>,
}

fn group(name: &str) -> Vec<String> {
    match name {
        STEANE_DATA => (1..=7).map(|q| q.to_string()).collect(),
        QRM_DATA => (1..=15).map(|q| q.to_string()).collect(),
        Z_STABILIZERS => ROUND_PLAQUETTES.iter().map(|s| s.to_string()).collect(),
        FLAGS => FLAG_LABELS.iter().map(|s| s.to_string()).collect(),
        _ => unreachable!("unknown segment group {name}"),
    }
}

impl ShotLayout {
    /// Builds a layout from `(name, labels)` pairs laid out back to back.
    pub fn new(groups: Vec<(String, Vec<String>)>) -> Result<Self> {
        let mut segments = Vec::with_capacity(groups.len());
        let mut start = 0;
        for (name, labels) in groups {
            if segments.iter().any(|s: &Segment| s.name == name) {
                return Err(Error::InvalidCircuit(format!("duplicate segment `{name}`")));
            }
            let len = labels.len();
            segments.push(Segment { name, start, labels });
            start += len;
        }
        Ok(Self { segments })
    }

    fn from_groups(prefixes: &[&str], names: &[&str]) -> Self {
        let groups = prefixes
            .iter()
            .flat_map(|p| names.iter().map(move |n| (format!("{p}{n}"), group(n))))
            .collect();
        Self::new(groups).expect("canonical names are unique")
    }

    /// 31-bit single-copy layout: steane-data, qrm-data, z-stabilizers, flags.
    pub fn single_copy() -> Self {
        Self::from_groups(&[""], &[STEANE_DATA, QRM_DATA, Z_STABILIZERS, FLAGS])
    }

    /// 62-bit two-copy layout: copy 1 segments then copy 2 segments.
    pub fn two_copy() -> Self {
        Self::from_groups(&["copy1/", "copy2/"], &[STEANE_DATA, QRM_DATA, Z_STABILIZERS, FLAGS])
    }

    /// 24-bit layout of the bare preparation, whose Steane block stays unmeasured.
    pub fn magic_prep() -> Self {
        Self::from_groups(&[""], &[QRM_DATA, Z_STABILIZERS, FLAGS])
    }

    pub fn len(&self) -> usize {
        self.segments.iter().map(Segment::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn segment(&self, name: &str) -> Option<&Segment> {
        self.segments.iter().find(|s| s.name == name)
    }

    /// Resolves `segment/label` (e.g. `copy2/flags/init-qrm`) to a bit index.
    pub fn index_of(&self, path: &str) -> Option<usize> {
        let (seg, label) = path.rsplit_once('/')?;
        let s = self.segment(seg)?;
        s.labels.iter().position(|l| l == label).map(|i| s.start + i)
    }

    /// Full `segment/label` path of bit `i`.
    pub fn path_of(&self, i: usize) -> Option<String> {
        self.segments
            .iter()
            .find(|s| s.range().contains(&i))
            .map(|s| format!("{}/{}", s.name, s.labels[i - s.start]))
    }

    /// Prefixes present in the layout (`""` for single copy, `copy1/`, `copy2/`).
    pub fn copies(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for s in &self.segments {
            let prefix = match s.name.rsplit_once('/') {
                Some((p, _)) => format!("{p}/"),
                None => String::new(),
            };
            if !out.contains(&prefix) {
                out.push(prefix);
            }
        }
        out
    }
}

/// One shot: bit `i` is the outcome written to `c[i]`; `true` means eigenvalue -1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ShotRecord {
    bits: Vec<bool>,
}

impl ShotRecord {
    pub fn new(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    pub fn zeros(len: usize) -> Self {
        Self { bits: vec![false; len] }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn bit(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn set(&mut self, i: usize, v: bool) {
        self.bits[i] = v;
    }

    /// Bits of segment `name`, or `None` if the layout has no such segment.
    pub fn segment<'a>(&'a self, layout: &ShotLayout, name: &str) -> Option<&'a [bool]> {
        layout.segment(name).map(|s| &self.bits[s.range()])
    }
}

impl std::fmt::Display for ShotRecord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}
