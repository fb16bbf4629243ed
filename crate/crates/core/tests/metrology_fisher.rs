use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spin_ibr::metrology::{
    cfi, covariance, encode_phase, hellinger, measurement_distribution, optimal_phase_axis, qfi, qfi_mixed,
    qfi_pure, PhaseAxis, ProbDist,
};
use spin_ibr::prep::{prepare_state, qnd_state, PrepScheme, SchemeKind};
use spin_ibr::spin::{expm_generator, PureState, QuantumState, SpinOps, Unitary};
use spin_ibr::{CMatrix, CVector, Error, C64};

fn random_unitary(rng: &mut ChaCha8Rng, dim: usize) -> Unitary {
    let a = CMatrix::from_fn(dim, dim, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    let h = (&a + a.adjoint()) * C64::new(0.5, 0.0);
    expm_generator(&h, 1.0).unwrap()
}

fn random_pure(rng: &mut ChaCha8Rng, dim: usize) -> PureState {
    let v = CVector::from_fn(dim, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    PureState::normalized(v).unwrap()
}

fn unit_vector(rng: &mut ChaCha8Rng) -> [f64; 3] {
    loop {
        let v: [f64; 3] = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
        let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if r > 0.1 && r <= 1.0 {
            return [v[0] / r, v[1] / r, v[2] / r];
        }
    }
}

#[test]
fn derivative_matches_central_difference_for_twisted_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let n = rng.random_range(2..=40usize);
        let ops = SpinOps::new(n).unwrap();
        let scheme = PrepScheme::new(SchemeKind::Oat, n).with_r(rng.random_range(0.05..0.5));
        let s = prepare_state(&scheme, &ops).unwrap();
        let axis = optimal_phase_axis(&s, &ops).unwrap();
        let u2 = random_unitary(&mut rng, n + 1);
        let phi = rng.random_range(0.0..1.5);
        let d = measurement_distribution(&encode_phase(&s, &axis, phi).unwrap(), &u2, &axis).unwrap();
        let h = 1e-5;
        let plus = u2.apply(&encode_phase(&s, &axis, phi + h).unwrap()).unwrap().populations();
        let minus = u2.apply(&encode_phase(&s, &axis, phi - h).unwrap()).unwrap().populations();
        for k in 0..=n {
            let fd = (plus[k] - minus[k]) / (2.0 * h);
            assert!((d.dp()[k] - fd).abs() < 1e-6);
        }
        assert!((d.p().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(d.dp().iter().sum::<f64>().abs() < 1e-10);
    }
}

#[test]
fn optimal_axis_maximises_variance() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for trial in 0..10 {
        let n = 6 + 2 * trial;
        let ops = SpinOps::new(n).unwrap();
        let psi = random_pure(&mut rng, n + 1);
        let s = QuantumState::Pure(psi.clone());
        let best = qfi_pure(&psi, &optimal_phase_axis(&s, &ops).unwrap());
        let cov = covariance(&psi, &ops);
        for _ in 0..100 {
            let u = unit_vector(&mut rng);
            let f = qfi_pure(&psi, &PhaseAxis::new(u, &ops).unwrap());
            let quad: f64 = (0..3).flat_map(|i| (0..3).map(move |j| (i, j))).map(|(i, j)| u[i] * cov[i][j] * u[j]).sum();
            assert!(f <= best + 1e-9, "{f} > {best}");
            assert!((f - 4.0 * quad).abs() < 1e-9);
        }
    }
}

#[test]
fn optimal_axis_of_mixed_state_requires_explicit_axis() {
    let ops = SpinOps::new(10).unwrap();
    let s: QuantumState = qnd_state(10, 1.0, &ops).unwrap().into();
    assert!(matches!(optimal_phase_axis(&s, &ops), Err(Error::AxisRequired)));
}

/// `Σ_{m,m'} 2|⟨m|Ĵy|m'⟩|²(w_m − w_m')²/(w_m + w_m')` for a state diagonal in
/// the Ĵz basis, with the ladder matrix elements written out directly.
fn diagonal_state_qfi_y(n: usize, weights: &[f64]) -> f64 {
    let j = n as f64 / 2.0;
    let mut total = 0.0;
    for a in 0..=n {
        for b in 0..=n {
            let (ma, mb) = (a as f64 - j, b as f64 - j);
            let elem = if a == b + 1 {
                0.5 * (j * (j + 1.0) - mb * (mb + 1.0)).sqrt()
            } else if b == a + 1 {
                0.5 * (j * (j + 1.0) - ma * (ma + 1.0)).sqrt()
            } else {
                0.0
            };
            let s = weights[a] + weights[b];
            if s > 0.0 {
                let d = weights[a] - weights[b];
                total += 2.0 * elem * elem * d * d / s;
            }
        }
    }
    total
}

#[test]
fn qnd_qfi_against_ladder_oracle() {
    for n in [10usize, 40] {
        let ops = SpinOps::new(n).unwrap();
        let rho = qnd_state(n, 1.0, &ops).unwrap();
        let j = n as f64 / 2.0;
        let raw: Vec<f64> = (0..=n).map(|i| (-(i as f64 - j).powi(2)).exp()).collect();
        let z: f64 = raw.iter().sum();
        let weights: Vec<f64> = raw.iter().map(|w| w / z).collect();
        let oracle = diagonal_state_qfi_y(n, &weights);
        let got = qfi_mixed(&rho, &PhaseAxis::y(&ops)).unwrap();
        assert!((got - oracle).abs() < 1e-9 * oracle, "{got} vs {oracle}");
    }
}

#[test]
fn guard_flags_ill_conditioned_outcomes() {
    let clean = ProbDist::new(vec![0.5, 0.5, 0.0], vec![0.1, -0.1, 0.0]).unwrap();
    assert!((cfi(&clean).unwrap() - 0.04).abs() < 1e-15);
    let bad = ProbDist::new(vec![1.0 - 1e-13, 1e-13], vec![-1e-3, 1e-3]).unwrap();
    assert!(matches!(cfi(&bad), Err(Error::IllConditioned { index: 1, .. })));
}

#[test]
fn distribution_csv_roundtrip() {
    let d = ProbDist::new(vec![0.25, 0.5, 0.25], vec![0.125, 0.0, -0.125]).unwrap();
    let mut out = Vec::new();
    d.write_csv(&mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    assert!(text.starts_with("m,p,dp\n-1.0000000000000000e0,"));
    assert_eq!(ProbDist::from_csv(&text).unwrap(), d);
    assert!(ProbDist::from_csv("m,p,dp\n0,1,0\n").is_err());
    assert!(ProbDist::from_csv("m,q,dp\n-0.5,0.5,0\n0.5,0.5,0\n").is_err());
}

fn dist_from(raw: &[f64]) -> ProbDist {
    let total: f64 = raw.iter().sum();
    ProbDist::new(raw.iter().map(|x| x / total).collect(), vec![0.0; raw.len()]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn hellinger_is_a_metric(
        a in prop::collection::vec(0.001f64..1.0, 6),
        b in prop::collection::vec(0.001f64..1.0, 6),
        c in prop::collection::vec(0.001f64..1.0, 6),
    ) {
        let (p, q, r) = (dist_from(&a), dist_from(&b), dist_from(&c));
        let pq = hellinger(&p, &q).unwrap();
        prop_assert!((pq - hellinger(&q, &p).unwrap()).abs() < 1e-15);
        prop_assert!((0.0..=1.0).contains(&pq));
        prop_assert!(hellinger(&p, &p).unwrap() < 1e-7);
        prop_assert!(pq <= hellinger(&p, &r).unwrap() + hellinger(&r, &q).unwrap() + 1e-12);
    }

    #[test]
    fn qfi_invariant_under_phase_and_joint_rotation(
        seed in any::<u64>(),
        n in 2usize..14,
        theta in -3.0f64..3.0,
        gphase in -3.0f64..3.0,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ops = SpinOps::new(n).unwrap();
        let psi = random_pure(&mut rng, n + 1);
        let dir = unit_vector(&mut rng);
        let base = qfi_pure(&psi, &PhaseAxis::new(dir, &ops).unwrap());

        let shifted = PureState::new(psi.amplitudes() * C64::from_polar(1.0, gphase)).unwrap();
        prop_assert!((qfi_pure(&shifted, &PhaseAxis::new(dir, &ops).unwrap()) - base).abs() < 1e-9);

        let rotated = ops.rotation_y(theta).apply_pure(&psi).unwrap();
        let (s, c) = theta.sin_cos();
        let moved = [dir[0] * c - dir[2] * s, dir[1], dir[2] * c + dir[0] * s];
        let after = qfi_pure(&rotated, &PhaseAxis::new(moved, &ops).unwrap());
        prop_assert!((after - base).abs() < 1e-9 * base.max(1.0));

        let mixed = qfi(&QuantumState::Mixed(psi.to_density()), &PhaseAxis::new(dir, &ops).unwrap()).unwrap();
        prop_assert!((mixed - base).abs() < 1e-8 * base.max(1.0));
    }
}
