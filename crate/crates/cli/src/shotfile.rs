//! On-disk formats.
//!
//! Shot file: `# key=value` header lines, then one record per line, exactly
//! as many `0`/`1` characters as the layout has bits.
//!
//! Decoded file: `# key=value` header lines, then CSV with columns
//! `shot,status,reason,frames,logicals,record`. Multi-copy fields are joined
//! with `;`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use codeswitch::circuit::{Basis, ExperimentKind};
use codeswitch::decode::{parse_shot, AcceptedShot, DecodeMode, DecodedShot, LogicalValue, RejectReason};
use codeswitch::layout::ShotRecord;

use crate::error::CliError;

pub const LAYOUT_VERSION: &str = "canonical-v1";
pub const DECODED_COLUMNS: &str = "shot,status,reason,frames,logicals,record";

#[derive(Debug, Clone, PartialEq)]
pub struct ShotFile {
    pub header: BTreeMap<String, String>,
    pub kind: ExperimentKind,
    pub records: Vec<ShotRecord>,
}

pub fn render_shot_file(header: &[(String, String)], records: &[ShotRecord]) -> String {
    let width = records.first().map_or(0, |r| r.len() + 1);
    let mut out = String::with_capacity(256 + records.len() * width);
    for (k, v) in header {
        let _ = writeln!(out, "# {k}={v}");
    }
    for r in records {
        let _ = writeln!(out, "{r}");
    }
    out
}

fn header_line(line: &str) -> Option<(String, String)> {
    let body = line.strip_prefix('#')?.trim();
    let (k, v) = body.split_once('=')?;
    Some((k.trim().to_string(), v.trim().to_string()))
}

fn kind_of(header: &BTreeMap<String, String>) -> Result<ExperimentKind, CliError> {
    let k = header.get("experiment").ok_or_else(|| CliError::Data("header has no `experiment` key".into()))?;
    k.parse().map_err(|e: codeswitch::Error| CliError::Data(e.to_string()))
}

pub fn parse_shot_file(text: &str) -> Result<ShotFile, CliError> {
    let mut header = BTreeMap::new();
    let mut lines = text.lines().enumerate().peekable();
    while let Some((_, line)) = lines.peek() {
        if !line.starts_with('#') {
            break;
        }
        if let Some((k, v)) = header_line(line) {
            header.insert(k, v);
        }
        lines.next();
    }
    let kind = kind_of(&header)?;
    if let Some(v) = header.get("layout") {
        if v != LAYOUT_VERSION {
            return Err(CliError::Data(format!("unsupported layout `{v}` (expected {LAYOUT_VERSION})")));
        }
    }
    let layout = kind.layout();
    let mut records = Vec::new();
    for (n, line) in lines {
        if line.starts_with('#') {
            return Err(CliError::Data(format!("line {}: header line after records", n + 1)));
        }
        let r = parse_shot(line, &layout).map_err(|e| CliError::Data(format!("line {}: {e}", n + 1)))?;
        records.push(r);
    }
    if let Some(s) = header.get("shots") {
        if s.parse::<usize>().ok() != Some(records.len()) {
            return Err(CliError::Data(format!("header announces {s} shots, file has {}", records.len())));
        }
    }
    Ok(ShotFile { header, kind, records })
}

fn sign(v: i8) -> &'static str {
    if v > 0 {
        "+1"
    } else {
        "-1"
    }
}

pub fn render_decoded(kind: ExperimentKind, mode: DecodeMode, records: &[ShotRecord], decoded: &[DecodedShot]) -> String {
    let accepted = decoded.iter().filter(|d| d.is_accepted()).count();
    let mut out = String::new();
    let _ = writeln!(out, "# experiment={kind}");
    let _ = writeln!(out, "# mode={mode}");
    let _ = writeln!(out, "# shots={}", decoded.len());
    let _ = writeln!(out, "# accepted={accepted}");
    let rate = if decoded.is_empty() { 0.0 } else { accepted as f64 / decoded.len() as f64 };
    let _ = writeln!(out, "# acceptance_rate={rate:.6}");
    for reason in RejectReason::ALL {
        let n = decoded.iter().filter(|d| d.reject_reason() == Some(reason)).count();
        let _ = writeln!(out, "# rejected_{reason}={n}");
    }
    out.push_str(DECODED_COLUMNS);
    out.push('\n');
    for (i, (r, d)) in records.iter().zip(decoded).enumerate() {
        match d {
            DecodedShot::Accepted(a) => {
                let frames: Vec<&str> = a.frames.iter().map(|&f| if f { "1" } else { "0" }).collect();
                let logicals: Vec<&str> = a.logicals.iter().map(|l| sign(l.value)).collect();
                let _ = writeln!(out, "{i},accepted,,{},{},{r}", frames.join(";"), logicals.join(";"));
            }
            DecodedShot::Rejected(reason) => {
                let _ = writeln!(out, "{i},rejected,{reason},,,{r}");
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodedFile {
    pub kind: ExperimentKind,
    pub mode: DecodeMode,
    pub records: Vec<ShotRecord>,
    pub decoded: Vec<DecodedShot>,
}

fn bases(kind: ExperimentKind) -> Vec<Basis> {
    match kind {
        ExperimentKind::SingleCopy(b) => vec![b],
        ExperimentKind::TwoCopy => vec![Basis::X, Basis::Z],
        ExperimentKind::MagicPrep => vec![],
    }
}

pub fn parse_decoded(text: &str) -> Result<DecodedFile, CliError> {
    let mut header = BTreeMap::new();
    let mut body = Vec::new();
    let mut saw_columns = false;
    for (n, line) in text.lines().enumerate() {
        if !saw_columns {
            if let Some((k, v)) = header_line(line) {
                header.insert(k, v);
                continue;
            }
            if line.trim() == DECODED_COLUMNS {
                saw_columns = true;
                continue;
            }
            return Err(CliError::Data(format!("line {}: expected header or `{DECODED_COLUMNS}`", n + 1)));
        }
        body.push((n + 1, line));
    }
    if !saw_columns {
        return Err(CliError::Data("decoded file has no column line".into()));
    }
    let kind = kind_of(&header)?;
    let mode: DecodeMode = header
        .get("mode")
        .ok_or_else(|| CliError::Data("header has no `mode` key".into()))?
        .parse()
        .map_err(|e: codeswitch::Error| CliError::Data(e.to_string()))?;
    let layout = kind.layout();
    let basis_list = bases(kind);
    let mut records = Vec::with_capacity(body.len());
    let mut decoded = Vec::with_capacity(body.len());
    for (line_no, line) in body {
        let bad = |what: &str| CliError::Data(format!("line {line_no}: {what}"));
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 6 {
            return Err(bad(&format!("expected 6 columns, found {}", cols.len())));
        }
        records.push(parse_shot(cols[5], &layout).map_err(|e| bad(&e.to_string()))?);
        match cols[1] {
            "rejected" => decoded.push(DecodedShot::Rejected(cols[2].parse().map_err(|_| bad("unknown reason"))?)),
            "accepted" => {
                let frames = cols[3]
                    .split(';')
                    .map(|f| match f {
                        "0" => Ok(false),
                        "1" => Ok(true),
                        _ => Err(bad("frame must be 0 or 1")),
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                let values: Vec<&str> = if cols[4].is_empty() { Vec::new() } else { cols[4].split(';').collect() };
                if values.len() != basis_list.len() {
                    return Err(bad("wrong number of logical values"));
                }
                let logicals = values
                    .iter()
                    .zip(&basis_list)
                    .enumerate()
                    .map(|(copy, (v, &basis))| match *v {
                        "+1" => Ok(LogicalValue { copy, basis, value: 1 }),
                        "-1" => Ok(LogicalValue { copy, basis, value: -1 }),
                        _ => Err(bad("logical value must be +1 or -1")),
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                decoded.push(DecodedShot::Accepted(AcceptedShot { frames, logicals }));
            }
            other => return Err(bad(&format!("unknown status `{other}`"))),
        }
    }
    Ok(DecodedFile { kind, mode, records, decoded })
}
