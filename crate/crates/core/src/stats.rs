//! Certification statistics: logical expectation values with standard
//! errors, the singlet overlap of two copies, the direct fidelity estimate
//! and the purity-based fidelity lower bound.

use std::fmt;

use num_complex::Complex64;

use crate::circuit::Basis;
use crate::decode::{DecodeMode, DecodedShot};
use crate::error::{Error, Result};

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Upper end of the 1σ binomial interval for zero events is 1.147 / N.
pub const ZERO_EVENT_CONSTANT: f64 = 1.147;

/// A value with its 1σ standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub sem: f64,
}

/// Sample mean and sqrt(sample variance / N) of ±1 outcomes.
pub fn mean_with_sem(values: &[i8]) -> Result<Estimate> {
    let n = values.len();
    if n == 0 {
        return Err(Error::Domain("no values to average".into()));
    }
    let mean = values.iter().map(|&v| v as f64).sum::<f64>() / n as f64;
    if n == 1 {
        return Ok(Estimate { value: mean, sem: 0.0 });
    }
    let var = values.iter().map(|&v| (v as f64 - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    Ok(Estimate { value: mean, sem: (var / n as f64).sqrt() })
}

/// Same as [`mean_with_sem`] from the count of +1 outcomes.
pub fn mean_with_sem_counts(n: usize, n_plus: usize) -> Result<Estimate> {
    if n == 0 || n_plus > n {
        return Err(Error::Domain(format!("{n_plus} positive outcomes out of {n}")));
    }
    let (nf, p) = (n as f64, n_plus as f64);
    let mean = (2.0 * p - nf) / nf;
    if n == 1 {
        return Ok(Estimate { value: mean, sem: 0.0 });
    }
    // sum of (v - mean)^2 = n (1 - mean^2)
    let var = nf * (1.0 - mean * mean) / (nf - 1.0);
    Ok(Estimate { value: mean, sem: (var.max(0.0) / nf).sqrt() })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsilonEstimate {
    pub n_post: usize,
    pub n_singlet: usize,
    pub p_f: f64,
    pub sem: f64,
    /// True when no singlet event was seen and the zero-event rule applied.
    pub zero_event: bool,
}

/// Singlet fraction with a binomial error; zero events give p_f = sem = 1.147/(2 N).
pub fn epsilon_estimate(n_post: usize, n_singlet: usize) -> Result<EpsilonEstimate> {
    if n_post == 0 || n_singlet > n_post {
        return Err(Error::Domain(format!("{n_singlet} singlet events out of {n_post} accepted shots")));
    }
    let n = n_post as f64;
    if n_singlet == 0 {
        let p = ZERO_EVENT_CONSTANT / (2.0 * n);
        return Ok(EpsilonEstimate { n_post, n_singlet, p_f: p, sem: p, zero_event: true });
    }
    let p = n_singlet as f64 / n;
    Ok(EpsilonEstimate { n_post, n_singlet, p_f: p, sem: (p * (1.0 - p) / n).sqrt(), zero_event: false })
}

/// Measured Bloch vector `v` with errors, target `u` and `delta = v - u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVectors {
    pub v: [f64; 3],
    pub sem: [f64; 3],
    pub u: [f64; 3],
}

impl BlochVectors {
    /// Bloch vector of the T state, (1/√2, 1/√2, 0).
    pub const T_TARGET: [f64; 3] = [FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0];

    pub fn new(v: [f64; 3], sem: [f64; 3]) -> Self {
        Self { v, sem, u: Self::T_TARGET }
    }

    pub fn with_target(v: [f64; 3], sem: [f64; 3], u: [f64; 3]) -> Result<Self> {
        let norm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::Domain(format!("target Bloch vector has norm {norm}")));
        }
        Ok(Self { v, sem, u })
    }

    pub fn delta(&self) -> [f64; 3] {
        [self.v[0] - self.u[0], self.v[1] - self.u[1], self.v[2] - self.u[2]]
    }

    pub fn delta_norm_sq(&self) -> f64 {
        self.delta().iter().map(|d| d * d).sum()
    }
}

/// F = 1/2 + (v_X + v_Y)/(2√2), unclamped.
pub fn fidelity_direct(v: &BlochVectors) -> f64 {
    0.5 + (v.v[0] + v.v[1]) / (2.0 * std::f64::consts::SQRT_2)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FidelityBound {
    pub bound: f64,
    pub sem: f64,
    /// |δ|²/4 and its propagated error.
    pub delta_term: Estimate,
    pub epsilon: EpsilonEstimate,
}

/// F ≥ 1 - (ε + |δ|²/4), errors propagated as uncorrelated.
pub fn fidelity_lower_bound(v: &BlochVectors, eps: &EpsilonEstimate) -> FidelityBound {
    let d = v.delta();
    let term = v.delta_norm_sq() / 4.0;
    let term_sem = d.iter().zip(&v.sem).map(|(di, si)| (di * si / 2.0).powi(2)).sum::<f64>().sqrt();
    FidelityBound {
        bound: 1.0 - (eps.p_f + term),
        sem: (eps.sem * eps.sem + term_sem * term_sem).sqrt(),
        delta_term: Estimate { value: term, sem: term_sem },
        epsilon: *eps,
    }
}

/// Expected output infidelity of 15-to-1 distillation, 35 p³.
pub fn distillation_projection(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("infidelity {p} outside [0, 1]")));
    }
    Ok(35.0 * p.powi(3))
}

/// Single-qubit density operator.
pub type Density = [[Complex64; 2]; 2];

/// ρ = (I + v·σ)/2.
pub fn density_from_bloch(v: [f64; 3]) -> Density {
    let c = Complex64::new;
    [[c((1.0 + v[2]) / 2.0, 0.0), c(v[0] / 2.0, -v[1] / 2.0)], [c(v[0] / 2.0, v[1] / 2.0), c((1.0 - v[2]) / 2.0, 0.0)]]
}

pub fn bloch_of(rho: &Density) -> [f64; 3] {
    [2.0 * rho[1][0].re, 2.0 * rho[1][0].im, (rho[0][0] - rho[1][1]).re]
}

fn check_density(rho: &Density, tol: f64) -> Result<()> {
    let tr = rho[0][0] + rho[1][1];
    if (tr - 1.0).norm() > tol {
        return Err(Error::InvalidDensity(format!("trace {tr}")));
    }
    if (rho[0][1] - rho[1][0].conj()).norm() > tol || rho[0][0].im.abs() > tol || rho[1][1].im.abs() > tol {
        return Err(Error::InvalidDensity("not Hermitian".into()));
    }
    let det = (rho[0][0] * rho[1][1] - rho[0][1] * rho[1][0]).re;
    if det < -tol || rho[0][0].re < -tol || rho[1][1].re < -tol {
        return Err(Error::InvalidDensity("not positive semidefinite".into()));
    }
    Ok(())
}

fn trace_sq(rho: &Density) -> f64 {
    (0..2).flat_map(|i| (0..2).map(move |j| (i, j))).map(|(i, j)| (rho[i][j] * rho[j][i]).re).sum()
}

/// <Φ|ρ1⊗ρ2|Φ> for the singlet Φ = (|01> - |10>)/√2.
pub fn singlet_overlap(rho1: &Density, rho2: &Density) -> f64 {
    let phi = [0.0, FRAC_1_SQRT_2, -FRAC_1_SQRT_2, 0.0];
    let mut total = Complex64::new(0.0, 0.0);
    for (r, &pr) in phi.iter().enumerate() {
        for (c, &pc) in phi.iter().enumerate() {
            let elem = rho1[r >> 1][c >> 1] * rho2[r & 1][c & 1];
            total += elem * pr * pc;
        }
    }
    total.re
}

/// Exact values and residuals of the purity-bound relations for one pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleReport {
    pub epsilon: f64,
    pub purity: [f64; 2],
    pub fidelity: [f64; 2],
    /// Tr ρ² - (1 + |δ|²/2 + 2(F - 1)) per copy.
    pub identity_residual: [f64; 2],
    /// max Tr ρᵢ² - (1 - 2ε).
    pub purity_margin: f64,
    /// F - (1 - (ε + |δ|²/4)) when the copies are identical.
    pub bound_margin: Option<f64>,
    pub passed: bool,
}

/// Checks, at tolerance `tol`: the purity identity for each copy, the
/// purity bound from ε, and the fidelity bound when ρ1 = ρ2.
pub fn purity_bound_oracle_check(rho1: &Density, rho2: &Density, sigma_t: &Density, tol: f64) -> Result<OracleReport> {
    for rho in [rho1, rho2, sigma_t] {
        check_density(rho, 1e-9)?;
    }
    let u = bloch_of(sigma_t);
    if (u.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidDensity("target is not pure".into()));
    }
    let epsilon = singlet_overlap(rho1, rho2);
    let mut purity = [0.0; 2];
    let mut fidelity = [0.0; 2];
    let mut identity_residual = [0.0; 2];
    let mut delta_sq = [0.0; 2];
    for (k, rho) in [rho1, rho2].into_iter().enumerate() {
        let v = bloch_of(rho);
        purity[k] = trace_sq(rho);
        fidelity[k] = (0..2)
            .flat_map(|i| (0..2).map(move |j| (i, j)))
            .map(|(i, j)| (sigma_t[j][i] * rho[i][j]).re)
            .sum();
        delta_sq[k] = v.iter().zip(&u).map(|(a, b)| (a - b).powi(2)).sum();
        identity_residual[k] = purity[k] - (1.0 + delta_sq[k] / 2.0 + 2.0 * (fidelity[k] - 1.0));
    }
    let purity_margin = purity[0].max(purity[1]) - (1.0 - 2.0 * epsilon);
    let same = (0..2).all(|i| (0..2).all(|j| (rho1[i][j] - rho2[i][j]).norm() <= tol));
    let bound_margin = same.then(|| fidelity[0] - (1.0 - (epsilon + delta_sq[0] / 4.0)));
    let passed = identity_residual.iter().all(|r| r.abs() <= tol)
        && purity_margin >= -tol
        && bound_margin.is_none_or(|m| m >= -tol);
    Ok(OracleReport { epsilon, purity, fidelity, identity_residual, purity_margin, bound_margin, passed })
}

/// Accepted single-copy outcomes in one basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisData {
    pub basis: Basis,
    pub shots: usize,
    pub values: Vec<i8>,
}

impl BasisData {
    pub fn from_decoded(basis: Basis, decoded: &[DecodedShot]) -> Self {
        Self { basis, shots: decoded.len(), values: decoded.iter().filter_map(|d| d.logical(0)).collect() }
    }

    /// `n_post` accepted shots of which `n_plus` read +1.
    pub fn from_counts(basis: Basis, shots: usize, n_post: usize, n_plus: usize) -> Self {
        let mut values = vec![1i8; n_plus];
        values.resize(n_post, -1);
        Self { basis, shots, values }
    }

    pub fn acceptance(&self) -> f64 {
        self.values.len() as f64 / self.shots as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TwoCopyData {
    pub shots: usize,
    pub n_post: usize,
    pub n_singlet: usize,
}

impl TwoCopyData {
    pub fn from_decoded(decoded: &[DecodedShot]) -> Self {
        Self {
            shots: decoded.len(),
            n_post: decoded.iter().filter(|d| d.is_accepted()).count(),
            n_singlet: decoded.iter().filter(|d| d.is_singlet()).count(),
        }
    }

    pub fn acceptance(&self) -> f64 {
        self.n_post as f64 / self.shots as f64
    }
}

/// One line of the certification table.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub quantity: &'static str,
    pub value: f64,
    pub sem: f64,
    pub acceptance_rate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertificationReport {
    pub mode: DecodeMode,
    pub bloch: BlochVectors,
    pub bound: FidelityBound,
    pub fidelity_direct: f64,
    /// Mean of the three single-copy acceptance rates.
    pub single_copy_acceptance: f64,
    pub basis_acceptance: [f64; 3],
    pub two_copy_acceptance: f64,
}

impl CertificationReport {
    pub fn rows(&self) -> Vec<ReportRow> {
        let row = |quantity, value, sem, acceptance_rate| ReportRow { quantity, value, sem, acceptance_rate };
        vec![
            row("fidelity_bound", self.bound.bound, self.bound.sem, self.single_copy_acceptance),
            row("epsilon", self.bound.epsilon.p_f, self.bound.epsilon.sem, self.two_copy_acceptance),
            row("delta_term", self.bound.delta_term.value, self.bound.delta_term.sem, self.single_copy_acceptance),
            row("x", self.bloch.v[0], self.bloch.sem[0], self.basis_acceptance[0]),
            row("y", self.bloch.v[1], self.bloch.sem[1], self.basis_acceptance[1]),
            row("z", self.bloch.v[2], self.bloch.sem[2], self.basis_acceptance[2]),
            row("fidelity_direct", self.fidelity_direct, f64::NAN, self.single_copy_acceptance),
        ]
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("quantity,value,sem,acceptance_rate\n");
        for r in self.rows() {
            let sem = if r.sem.is_nan() { String::new() } else { format!("{:.6e}", r.sem) };
            out.push_str(&format!("{},{:.8},{},{:.6}\n", r.quantity, r.value, sem, r.acceptance_rate));
        }
        out
    }
}

impl fmt::Display for CertificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pct = |x: f64| format!("{:.2}%", 100.0 * x);
        writeln!(f, "certification ({} mode)", self.mode)?;
        writeln!(f, "  F lower bound   {:.5} ({:.1e})   acceptance {}", self.bound.bound, self.bound.sem, pct(self.single_copy_acceptance))?;
        writeln!(
            f,
            "  epsilon         {:.3e} ({:.3e}){}   acceptance {}",
            self.bound.epsilon.p_f,
            self.bound.epsilon.sem,
            if self.bound.epsilon.zero_event { " [no singlet events]" } else { "" },
            pct(self.two_copy_acceptance)
        )?;
        writeln!(f, "  |delta|^2/4     {:.3e} ({:.3e})", self.bound.delta_term.value, self.bound.delta_term.sem)?;
        for (k, name) in ["<X>", "<Y>", "<Z>"].iter().enumerate() {
            writeln!(f, "  {name:<15} {:.4} ({:.4})   acceptance {}", self.bloch.v[k], self.bloch.sem[k], pct(self.basis_acceptance[k]))?;
        }
        writeln!(f, "  direct F        {:.5} (unclamped)", self.fidelity_direct)
    }
}

/// Builds the certification table from the three single-copy bases and the two-copy run.
pub fn summarize(single: &[BasisData], two: &TwoCopyData, mode: DecodeMode) -> Result<CertificationReport> {
    let mut v = [0.0; 3];
    let mut sem = [0.0; 3];
    let mut acc = [0.0; 3];
    for (k, b) in [Basis::X, Basis::Y, Basis::Z].into_iter().enumerate() {
        let data = single
            .iter()
            .find(|d| d.basis == b)
            .ok_or_else(|| Error::MissingInput(format!("single-copy {b} basis data")))?;
        if data.shots == 0 {
            return Err(Error::MissingInput(format!("single-copy {b} basis has no shots")));
        }
        let e = mean_with_sem(&data.values)?;
        v[k] = e.value;
        sem[k] = e.sem;
        acc[k] = data.acceptance();
    }
    if two.shots == 0 {
        return Err(Error::MissingInput("two-copy data has no shots".into()));
    }
    let bloch = BlochVectors::new(v, sem);
    let eps = epsilon_estimate(two.n_post, two.n_singlet)?;
    Ok(CertificationReport {
        mode,
        bloch,
        bound: fidelity_lower_bound(&bloch, &eps),
        fidelity_direct: fidelity_direct(&bloch),
        single_copy_acceptance: acc.iter().sum::<f64>() / 3.0,
        basis_acceptance: acc,
        two_copy_acceptance: two.acceptance(),
    })
}
