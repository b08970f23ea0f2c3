//! Run configuration: a flat `key=value` file whose keys double as flag names.

use std::path::Path;

use codeswitch::circuit::ExperimentKind;
use codeswitch::sim::{Channels, NoiseModel};

use crate::error::CliError;

pub const KEYS: [&str; 12] = [
    "experiment",
    "shots",
    "seed",
    "reuse",
    "noise",
    "crosstalk",
    "p1",
    "p2",
    "p-meas1",
    "p-meas0",
    "p-idle",
    "p-crosstalk",
];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub kind: Option<ExperimentKind>,
    pub shots: usize,
    pub seed: u64,
    pub reuse: bool,
    pub noise: NoiseModel,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self { kind: None, shots: 10_000, seed: 1, reuse: false, noise: NoiseModel::default() }
    }
}

fn switch(key: &str, value: &str) -> Result<bool, String> {
    match value.trim().to_ascii_lowercase().as_str() {
        "on" | "true" | "yes" | "1" => Ok(true),
        "off" | "false" | "no" | "0" => Ok(false),
        other => Err(format!("{key}: expected on/off, got `{other}`")),
    }
}

fn number<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, String> {
    value.trim().parse().map_err(|_| format!("{key}: cannot parse `{}`", value.trim()))
}

impl RunConfig {
    /// Sets one key. Errors are plain messages; callers choose the exit class.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let rate = |v: &str| -> Result<f64, String> {
            let p: f64 = number(key, v)?;
            if !(0.0..=1.0).contains(&p) {
                return Err(format!("{key}: {p} is not in [0, 1]"));
            }
            Ok(p)
        };
        match key {
            "experiment" => self.kind = Some(value.trim().parse().map_err(|e| format!("{e}"))?),
            "shots" => {
                let n: usize = number(key, value)?;
                if n == 0 {
                    return Err("shots must be at least 1".into());
                }
                self.shots = n;
            }
            "seed" => self.seed = number(key, value)?,
            "reuse" => self.reuse = switch(key, value)?,
            "noise" => {
                let on = switch(key, value)?;
                let crosstalk = self.noise.enabled.crosstalk;
                self.noise.enabled = if on { Channels { crosstalk, ..Channels::ALL } } else { Channels::NONE };
            }
            "crosstalk" => self.noise.enabled.crosstalk = switch(key, value)?,
            "p1" => self.noise.p1 = rate(value)?,
            "p2" => self.noise.p2 = rate(value)?,
            "p-meas1" => self.noise.p_meas1 = rate(value)?,
            "p-meas0" => self.noise.p_meas0 = rate(value)?,
            "p-idle" => self.noise.p_idle = rate(value)?,
            "p-crosstalk" => self.noise.p_crosstalk = rate(value)?,
            other => return Err(format!("unknown key `{other}`")),
        }
        Ok(())
    }

    /// Applies every `key=value` line of `text`; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<(), String> {
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| format!("line {}: expected key=value", n + 1))?;
            self.set(k.trim(), v).map_err(|e| format!("line {}: {e}", n + 1))?;
        }
        Ok(())
    }

    pub fn load(&mut self, path: &Path) -> Result<(), CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        self.apply_text(&text).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
    }

    /// Header lines written at the top of a shot file.
    pub fn header(&self) -> Vec<(String, String)> {
        let on = |b: bool| if b { "on" } else { "off" }.to_string();
        let n = &self.noise;
        let noise_on = n.enabled.gate1 || n.enabled.gate2 || n.enabled.readout || n.enabled.idle;
        vec![
            ("experiment".into(), self.kind.map(|k| k.to_string()).unwrap_or_default()),
            ("layout".into(), crate::shotfile::LAYOUT_VERSION.into()),
            ("shots".into(), self.shots.to_string()),
            ("seed".into(), self.seed.to_string()),
            ("reuse".into(), on(self.reuse)),
            ("noise".into(), on(noise_on)),
            ("crosstalk".into(), on(n.enabled.crosstalk)),
            ("p1".into(), n.p1.to_string()),
            ("p2".into(), n.p2.to_string()),
            ("p-meas1".into(), n.p_meas1.to_string()),
            ("p-meas0".into(), n.p_meas0.to_string()),
            ("p-idle".into(), n.p_idle.to_string()),
            ("p-crosstalk".into(), n.p_crosstalk.to_string()),
        ]
    }
}
