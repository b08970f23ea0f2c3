use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use codeswitch::circuit::qasm::emit_qasm;
use codeswitch::circuit::{build_experiment, build_experiment_with, Basis, BuildOptions, ExperimentKind};
use codeswitch::decode::{decode_shot, DecodeMode, RejectReason};
use codeswitch::sim::{enumerate_fault_locations, ft_check_circuit, run_batch, FtOptions};
use codeswitch::stats::{summarize, BasisData, TwoCopyData};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::shotfile::{parse_decoded, parse_shot_file, render_decoded, render_shot_file, DecodedFile};

#[derive(Debug, Parser)]
#[command(name = "codeswitch", version, about = "Magic-state preparation by code switching: circuits, simulation, decoding, certification")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the OpenQASM 2.0 circuit of an experiment.
    Emit(EmitArgs),
    /// Simulate an experiment and write a shot file.
    Run(RunArgs),
    /// Decode a shot file into per-shot dispositions.
    Decode(DecodeArgs),
    /// Build the certification table from four decoded files.
    Analyze(AnalyzeArgs),
    /// Exhaustive single-fault check of the preparation circuit.
    Ftcheck(FtcheckArgs),
}

fn parse_kind(s: &str) -> Result<ExperimentKind, String> {
    s.parse().map_err(|e: codeswitch::Error| e.to_string())
}

fn parse_mode(s: &str) -> Result<DecodeMode, String> {
    s.parse().map_err(|e: codeswitch::Error| e.to_string())
}

#[derive(Debug, Args)]
pub struct EmitArgs {
    /// magic-prep, single-copy-x, single-copy-y, single-copy-z or two-copy
    #[arg(value_parser = parse_kind)]
    pub kind: ExperimentKind,
    /// Recycle round ancillas through reset.
    #[arg(long, overrides_with = "no_reuse")]
    pub reuse: bool,
    #[arg(long)]
    pub no_reuse: bool,
    /// Output file (stdout if absent).
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Experiment kind; overrides `experiment` from the config file.
    #[arg(value_parser = parse_kind)]
    pub kind: Option<ExperimentKind>,
    /// Flat key=value config file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub shots: Option<String>,
    #[arg(long)]
    pub seed: Option<String>,
    #[arg(long, overrides_with = "no_reuse")]
    pub reuse: bool,
    #[arg(long)]
    pub no_reuse: bool,
    /// on or off
    #[arg(long)]
    pub noise: Option<String>,
    /// on or off
    #[arg(long)]
    pub crosstalk: Option<String>,
    #[arg(long)]
    pub p1: Option<String>,
    #[arg(long)]
    pub p2: Option<String>,
    #[arg(long = "p-meas1")]
    pub p_meas1: Option<String>,
    #[arg(long = "p-meas0")]
    pub p_meas0: Option<String>,
    #[arg(long = "p-idle")]
    pub p_idle: Option<String>,
    #[arg(long = "p-crosstalk")]
    pub p_crosstalk: Option<String>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DecodeArgs {
    pub file: PathBuf,
    /// ec (lookup-table correction) or ps (post-selection)
    #[arg(long, value_parser = parse_mode, default_value = "ec")]
    pub mode: DecodeMode,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub x: Option<PathBuf>,
    #[arg(long)]
    pub y: Option<PathBuf>,
    #[arg(long)]
    pub z: Option<PathBuf>,
    #[arg(long = "two-copy")]
    pub two_copy: Option<PathBuf>,
    /// Expected decode mode; every input must match it.
    #[arg(long, value_parser = parse_mode)]
    pub mode: Option<DecodeMode>,
    /// Text report (stdout if absent).
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// CSV report.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FtcheckArgs {
    /// Remove a protocol component before checking; only `stabilizer-round` exists.
    #[arg(long)]
    pub ablate: Option<String>,
    /// Branch samples per fault.
    #[arg(long, default_value_t = FtOptions::default().max_samples)]
    pub samples: usize,
    #[arg(long, default_value_t = FtOptions::default().seed)]
    pub seed: u64,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::io(p, e)),
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|e| CliError::io(Path::new("<stdout>"), e))
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

pub fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Emit(a) => emit(a),
        Command::Run(a) => run(a),
        Command::Decode(a) => decode(a),
        Command::Analyze(a) => analyze(a),
        Command::Ftcheck(a) => ftcheck(a),
    }
}

fn emit(a: EmitArgs) -> Result<(), CliError> {
    let circuit = build_experiment(a.kind, a.reuse && !a.no_reuse);
    write_output(a.output.as_deref(), &emit_qasm(&circuit))
}

fn run(a: RunArgs) -> Result<(), CliError> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &a.config {
        cfg.load(path)?;
    }
    let overrides = [
        ("shots", &a.shots),
        ("seed", &a.seed),
        ("noise", &a.noise),
        ("crosstalk", &a.crosstalk),
        ("p1", &a.p1),
        ("p2", &a.p2),
        ("p-meas1", &a.p_meas1),
        ("p-meas0", &a.p_meas0),
        ("p-idle", &a.p_idle),
        ("p-crosstalk", &a.p_crosstalk),
    ];
    for (key, value) in overrides {
        if let Some(v) = value {
            cfg.set(key, v).map_err(CliError::Usage)?;
        }
    }
    if a.reuse || a.no_reuse {
        cfg.reuse = a.reuse && !a.no_reuse;
    }
    if a.kind.is_some() {
        cfg.kind = a.kind;
    }
    let kind = cfg.kind.ok_or_else(|| CliError::Usage("no experiment kind given (argument or `experiment` key)".into()))?;
    let circuit = build_experiment(kind, cfg.reuse);
    let records = run_batch(&circuit, &cfg.noise, cfg.shots, cfg.seed)?;
    write_output(a.output.as_deref(), &render_shot_file(&cfg.header(), &records))
}

fn decode(a: DecodeArgs) -> Result<(), CliError> {
    let file = parse_shot_file(&read(&a.file)?)?;
    let layout = file.kind.layout();
    let decoded = file
        .records
        .iter()
        .map(|r| decode_shot(file.kind, r, &layout, a.mode))
        .collect::<Result<Vec<_>, _>>()?;
    write_output(a.output.as_deref(), &render_decoded(file.kind, a.mode, &file.records, &decoded))
}

fn load_decoded(flag: &str, path: &Option<PathBuf>, expected: ExperimentKind) -> Result<DecodedFile, CliError> {
    let path = path.as_ref().ok_or_else(|| CliError::Usage(format!("missing input --{flag} ({expected} decode output)")))?;
    let file = parse_decoded(&read(path)?).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    if file.kind != expected {
        return Err(CliError::Data(format!("{}: holds {}, expected {expected}", path.display(), file.kind)));
    }
    Ok(file)
}

fn analyze(a: AnalyzeArgs) -> Result<(), CliError> {
    let inputs = [
        load_decoded("x", &a.x, ExperimentKind::SingleCopy(Basis::X))?,
        load_decoded("y", &a.y, ExperimentKind::SingleCopy(Basis::Y))?,
        load_decoded("z", &a.z, ExperimentKind::SingleCopy(Basis::Z))?,
        load_decoded("two-copy", &a.two_copy, ExperimentKind::TwoCopy)?,
    ];
    let mode = a.mode.unwrap_or(inputs[0].mode);
    if let Some(bad) = inputs.iter().find(|f| f.mode != mode) {
        return Err(CliError::Data(format!("mode mismatch: {} input decoded with {}, expected {mode}", bad.kind, bad.mode)));
    }
    let single: Vec<BasisData> = [Basis::X, Basis::Y, Basis::Z]
        .into_iter()
        .zip(&inputs)
        .map(|(b, f)| BasisData::from_decoded(b, &f.decoded))
        .collect();
    let two = TwoCopyData::from_decoded(&inputs[3].decoded);
    let report = summarize(&single, &two, mode)?;
    if let Some(csv) = &a.csv {
        std::fs::write(csv, report.to_csv()).map_err(|e| CliError::io(csv, e))?;
    }
    write_output(a.output.as_deref(), &report.to_string())
}

fn ftcheck(a: FtcheckArgs) -> Result<(), CliError> {
    let options = match a.ablate.as_deref() {
        None => BuildOptions::default(),
        Some("stabilizer-round") => BuildOptions { stabilizer_round: false, ..BuildOptions::default() },
        Some(other) => return Err(CliError::Usage(format!("unknown ablation `{other}` (known: stabilizer-round)"))),
    };
    if a.samples == 0 {
        return Err(CliError::Usage("--samples must be at least 1".into()));
    }
    let circuit = build_experiment_with(ExperimentKind::MagicPrep, options);
    let opts = FtOptions { max_samples: a.samples, min_samples: FtOptions::default().min_samples.min(a.samples), seed: a.seed, ..FtOptions::default() };
    let report = ft_check_circuit(&circuit, &opts)?;

    let (rejected, correct, wrong) = report.disposition_counts();
    let mut text = String::new();
    text.push_str(&format!("circuit: magic-prep{}\n", a.ablate.as_deref().map(|x| format!(" (ablated: {x})")).unwrap_or_default()));
    text.push_str(&format!("fault locations: {}\n", enumerate_fault_locations(&circuit).len()));
    text.push_str(&format!("faults checked: {}\n", report.total_faults()));
    text.push_str(&format!("faults with a rejected sample: {rejected}\n"));
    text.push_str(&format!("faults with an accepted-correct sample: {correct}\n"));
    text.push_str(&format!("faults with an accepted-wrong sample: {wrong}\n"));
    text.push_str(&format!("faults without both frames accepted: {}\n", report.incomplete()));
    for reason in RejectReason::ALL {
        let n = report.outcomes.iter().filter(|o| o.reject_reason == Some(reason)).count();
        if n > 0 {
            text.push_str(&format!("first rejection by {reason}: {n}\n"));
        }
    }
    text.push_str(&format!("accepted-and-wrong samples: {}\n", report.accepted_wrong()));
    for o in report.counterexamples() {
        let fault = o.fault.as_ref().map(|f| f.to_string()).unwrap_or_else(|| "no fault".into());
        text.push_str(&format!(
            "counterexample: {fault} ({} of {} samples wrong, min fidelity {:.6})\n",
            o.accepted_wrong, o.samples, o.min_fidelity
        ));
    }
    text.push_str(&format!("result: {}\n", if report.passed() { "PASS" } else { "FAIL" }));
    write_output(a.output.as_deref(), &text)?;
    if report.passed() {
        Ok(())
    } else {
        Err(CliError::Violation(format!("{} accepted-and-wrong samples", report.accepted_wrong())))
    }
}
