//! Dense encoded states and logical expectation values.
//!
//! Vectors here are indexed with code label `j` on bit `j - 1`.

use num_complex::Complex64;

use crate::codes::StabilizerCode;
use crate::pauli::{Pauli, PauliOperator};

fn phase_factor(op: &PauliOperator) -> Complex64 {
    [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0), Complex64::new(-1.0, 0.0), Complex64::new(0.0, -1.0)]
        [op.phase().power() as usize]
}

/// `op · psi`, including the operator's phase.
pub fn apply_operator(psi: &[Complex64], op: &PauliOperator) -> Vec<Complex64> {
    let (xm, zm) = (op.x_mask() as usize, op.z_mask() as usize);
    // each Y contributes i = i·X·Z applied as X after Z
    let ys = op.letters().iter().filter(|&&p| p == Pauli::Y).count();
    let global = phase_factor(op) * Complex64::new(0.0, 1.0).powu(ys as u32);
    let mut out = vec![Complex64::new(0.0, 0.0); psi.len()];
    for (i, &a) in psi.iter().enumerate() {
        let sign = if (i & zm).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
        out[i ^ xm] = a * sign * global;
    }
    out
}

pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn normalize(psi: &mut [Complex64]) {
    let n = psi.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt();
    psi.iter_mut().for_each(|a| *a /= n);
}

/// <psi|op|psi>.
pub fn expectation(psi: &[Complex64], op: &PauliOperator) -> Complex64 {
    inner(psi, &apply_operator(psi, op))
}

/// Projects onto the +1 eigenspace of `op` (unnormalized).
pub fn project(psi: &[Complex64], op: &PauliOperator) -> Vec<Complex64> {
    let s = apply_operator(psi, op);
    psi.iter().zip(&s).map(|(a, b)| (a + b) * 0.5).collect()
}

/// alpha|0̄> + beta|1̄>, with |0̄> the +1 eigenstate of Z̄ and |1̄> = X̄|0̄>.
pub fn encoded_state(code: &StabilizerCode, alpha: Complex64, beta: Complex64) -> Vec<Complex64> {
    let mut zero = vec![Complex64::new(0.0, 0.0); 1 << code.n];
    zero[0] = Complex64::new(1.0, 0.0);
    for g in code.z_generators.iter().chain(&code.x_generators) {
        zero = project(&zero, &g.op);
    }
    zero = project(&zero, &code.logical_z);
    normalize(&mut zero);
    let one = apply_operator(&zero, &code.logical_x);
    zero.iter().zip(&one).map(|(z, o)| alpha * z + beta * o).collect()
}

/// (|0̄> + e^{iπ/4}|1̄>)/√2.
pub fn t_state(code: &StabilizerCode) -> Vec<Complex64> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    encoded_state(code, Complex64::new(h, 0.0), Complex64::from_polar(h, std::f64::consts::FRAC_PI_4))
}

/// Fidelity with `target` after an ideal weight-1 correction round:
/// the sum over X and Z corrections `C` (identity or one qubit each) of |<C target|psi>|^2.
pub fn corrected_fidelity(psi: &[Complex64], target: &[Complex64], n: usize) -> f64 {
    let mut total = 0.0;
    for xq in 0..=n {
        for zq in 0..=n {
            let mut c = PauliOperator::identity(n);
            if xq > 0 {
                c.set_letter(xq, Pauli::X);
            }
            if zq > 0 {
                let (_, l) = c.letter(zq).mul(Pauli::Z);
                c.set_letter(zq, l);
            }
            total += inner(&apply_operator(target, &c), psi).norm_sqr();
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{qrm_code, steane_code};

    #[test]
    fn t_state_bloch_vector() {
        for code in [steane_code(), qrm_code()] {
            let t = t_state(&code);
            let h = std::f64::consts::FRAC_1_SQRT_2;
            assert!((expectation(&t, &code.logical_x).re - h).abs() < 1e-12);
            assert!((expectation(&t, &code.logical_y).re - h).abs() < 1e-12);
            assert!(expectation(&t, &code.logical_z).re.abs() < 1e-12);
            for g in code.z_generators.iter().chain(&code.x_generators) {
                assert!((expectation(&t, &g.op).re - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn corrected_fidelity_absorbs_single_errors() {
        let code = steane_code();
        let t = t_state(&code);
        assert!((corrected_fidelity(&t, &t, 7) - 1.0).abs() < 1e-12);
        let e = PauliOperator::from_sparse(7, &[(4, Pauli::Y)]);
        assert!((corrected_fidelity(&apply_operator(&t, &e), &t, 7) - 1.0).abs() < 1e-12);
        let bad = PauliOperator::from_sparse(7, &[(1, Pauli::X), (2, Pauli::X)]);
        assert!(corrected_fidelity(&apply_operator(&t, &bad), &t, 7) < 0.9);
    }
}
