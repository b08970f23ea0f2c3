use codeswitch::circuit::Basis;
use codeswitch::decode::DecodeMode;
use codeswitch::stats::{
    epsilon_estimate, fidelity_lower_bound, mean_with_sem, mean_with_sem_counts, purity_bound_oracle_check, summarize,
    BasisData, BlochVectors, Density, TwoCopyData, ZERO_EVENT_CONSTANT,
};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;

fn pm_values() -> impl Strategy<Value = Vec<i8>> {
    prop::collection::vec(prop::bool::ANY.prop_map(|b| if b { 1i8 } else { -1 }), 1..400)
}

proptest! {
    #[test]
    fn mean_is_bounded_and_sem_is_small(values in pm_values()) {
        let e = mean_with_sem(&values).unwrap();
        let n = values.len() as f64;
        prop_assert!(e.value.abs() <= 1.0);
        // sample variance uses N - 1, so the worst case is 1/sqrt(N - 1)
        prop_assert!(e.sem <= 1.0 / (n - 1.0).max(1.0).sqrt() + 1e-15);
        prop_assert!(e.sem * ((n - 1.0) / n).sqrt() <= 1.0 / n.sqrt() + 1e-15);
        let plus = values.iter().filter(|&&v| v == 1).count();
        let c = mean_with_sem_counts(values.len(), plus).unwrap();
        prop_assert!((c.value - e.value).abs() < 1e-12 && (c.sem - e.sem).abs() < 1e-12);
    }

    #[test]
    fn bound_decreases_with_epsilon_and_deviation(
        v in prop::array::uniform3(-1.0..1.0f64),
        sem in prop::array::uniform3(0.0..0.05f64),
        n_post in 10usize..5000,
        k in 0usize..10,
        axis in 0usize..3,
        grow in 0.0..0.5f64,
    ) {
        let b = BlochVectors::new(v, sem);
        let k = k.min(n_post - 1);
        let e1 = epsilon_estimate(n_post, k).unwrap();
        let e2 = epsilon_estimate(n_post, k + 1).unwrap();
        prop_assert!(e2.p_f >= e1.p_f);
        prop_assert!(fidelity_lower_bound(&b, &e2).bound <= fidelity_lower_bound(&b, &e1).bound);

        let mut far = v;
        let d = v[axis] - BlochVectors::T_TARGET[axis];
        far[axis] += if d >= 0.0 { grow } else { -grow };
        let bf = BlochVectors::new(far, sem);
        prop_assert!(fidelity_lower_bound(&bf, &e1).bound <= fidelity_lower_bound(&b, &e1).bound + 1e-15);
    }

    #[test]
    fn summary_ignores_shot_order(seed in any::<u64>(), nx in 50usize..300, ny in 50usize..300, nz in 50usize..300) {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let data = |basis, n: usize, plus: usize| BasisData::from_counts(basis, n + 20, n, plus.min(n));
        let single = vec![data(Basis::X, nx, nx * 4 / 5), data(Basis::Y, ny, ny * 3 / 4), data(Basis::Z, nz, nz / 2)];
        let two = TwoCopyData { shots: 500, n_post: 380, n_singlet: 2 };
        let base = summarize(&single, &two, DecodeMode::Ec).unwrap();
        let mut shuffled = single.clone();
        for d in &mut shuffled {
            d.values.shuffle(&mut rng);
        }
        shuffled.reverse();
        let again = summarize(&shuffled, &two, DecodeMode::Ec).unwrap();
        prop_assert!((again.bound.bound - base.bound.bound).abs() < 1e-12);
        prop_assert!((again.bound.sem - base.bound.sem).abs() < 1e-12);
        prop_assert_eq!(again.basis_acceptance, base.basis_acceptance);
    }
}

#[test]
fn zero_singlets_use_the_binomial_interval() {
    let e = epsilon_estimate(6183, 0).unwrap();
    assert!(e.zero_event);
    assert!((e.p_f - ZERO_EVENT_CONSTANT / (2.0 * 6183.0)).abs() < 1e-18);
    assert_eq!(e.p_f, e.sem);
    assert!(epsilon_estimate(0, 0).is_err());
    assert!(epsilon_estimate(3, 4).is_err());
}

#[test]
fn summary_requires_every_basis() {
    let x = BasisData::from_counts(Basis::X, 10, 9, 8);
    let z = BasisData::from_counts(Basis::Z, 10, 9, 5);
    let two = TwoCopyData { shots: 10, n_post: 8, n_singlet: 0 };
    assert!(summarize(&[x, z], &two, DecodeMode::Ec).is_err());
}

/// ρ = A A† / Tr(A A†) for a complex 2x2 matrix A.
fn density_from(a: [[Complex64; 2]; 2]) -> Density {
    let mut rho = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            rho[i][j] = a[i][0] * a[j][0].conj() + a[i][1] * a[j][1].conj();
        }
    }
    let tr = (rho[0][0] + rho[1][1]).re;
    rho.iter_mut().flatten().for_each(|x| *x /= tr);
    rho
}

fn pure_from(a: Complex64, b: Complex64) -> Density {
    let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
    let (a, b) = (a / n, b / n);
    [[a * a.conj(), a * b.conj()], [b * a.conj(), b * b.conj()]]
}

fn complex() -> impl Strategy<Value = Complex64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(r, i)| Complex64::new(r, i))
}

proptest! {
    #[test]
    fn purity_relations_hold_for_random_states(
        a in prop::array::uniform4(complex()),
        b in prop::array::uniform4(complex()),
        t in prop::array::uniform2(complex()),
        identical in any::<bool>(),
    ) {
        prop_assume!(t[0].norm() + t[1].norm() > 1e-3);
        let r1 = density_from([[a[0], a[1]], [a[2], a[3]]]);
        let r2 = if identical { r1 } else { density_from([[b[0], b[1]], [b[2], b[3]]]) };
        let target = pure_from(t[0], t[1]);
        let report = purity_bound_oracle_check(&r1, &r2, &target, 1e-12).unwrap();
        prop_assert!(report.passed, "{:?}", report);
        prop_assert_eq!(report.bound_margin.is_some(), identical);
    }
}
