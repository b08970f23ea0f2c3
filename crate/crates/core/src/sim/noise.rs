use crate::error::{Error, Result};

/// Per-channel switches; a disabled channel behaves as rate 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Channels {
    pub gate1: bool,
    pub gate2: bool,
    pub readout: bool,
    pub idle: bool,
    pub crosstalk: bool,
}

impl Channels {
    pub const ALL: Channels = Channels { gate1: true, gate2: true, readout: true, idle: true, crosstalk: true };
    pub const NONE: Channels = Channels { gate1: false, gate2: false, readout: false, idle: false, crosstalk: false };
}

/// Pauli and readout error rates.
///
/// Defaults are the trapped-ion averages: p1 = 1.9e-5, p2 = 1.05e-3,
/// readout flips 1.38e-3 (true 1) and 6.0e-4 (true 0), 2.0e-4 idle error per
/// layer, crosstalk 6.6e-6 per mid-circuit measurement (off by default).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    pub p1: f64,
    pub p2: f64,
    pub p_meas1: f64,
    pub p_meas0: f64,
    pub p_idle: f64,
    pub p_crosstalk: f64,
    pub enabled: Channels,
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self {
            p1: 1.9e-5,
            p2: 1.05e-3,
            p_meas1: 1.38e-3,
            p_meas0: 6.0e-4,
            p_idle: 2.0e-4,
            p_crosstalk: 6.6e-6,
            enabled: Channels { crosstalk: false, ..Channels::ALL },
        }
    }
}

impl NoiseModel {
    pub fn noiseless() -> Self {
        Self { enabled: Channels::NONE, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, p) in self.rates() {
            if !(0.0..=1.0).contains(&p) || p.is_nan() {
                return Err(Error::Domain(format!("{name} = {p} is not a probability")));
            }
        }
        Ok(())
    }

    pub fn rates(&self) -> [(&'static str, f64); 6] {
        [
            ("p1", self.p1),
            ("p2", self.p2),
            ("p_meas1", self.p_meas1),
            ("p_meas0", self.p_meas0),
            ("p_idle", self.p_idle),
            ("p_crosstalk", self.p_crosstalk),
        ]
    }

    pub fn is_noiseless(&self) -> bool {
        [self.gate1(), self.gate2(), self.readout1(), self.readout0(), self.idle(), self.crosstalk()]
            .iter()
            .all(|&p| p == 0.0)
    }

    pub(crate) fn gate1(&self) -> f64 {
        if self.enabled.gate1 { self.p1 } else { 0.0 }
    }

    pub(crate) fn gate2(&self) -> f64 {
        if self.enabled.gate2 { self.p2 } else { 0.0 }
    }

    pub(crate) fn readout1(&self) -> f64 {
        if self.enabled.readout { self.p_meas1 } else { 0.0 }
    }

    pub(crate) fn readout0(&self) -> f64 {
        if self.enabled.readout { self.p_meas0 } else { 0.0 }
    }

    pub(crate) fn idle(&self) -> f64 {
        if self.enabled.idle { self.p_idle } else { 0.0 }
    }

    pub(crate) fn crosstalk(&self) -> f64 {
        if self.enabled.crosstalk { self.p_crosstalk } else { 0.0 }
    }
}
