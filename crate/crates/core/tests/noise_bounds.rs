use std::time::Instant;

use proptest::prelude::*;
use spin_ibr::metrology::{cfi, ProbDist};
use spin_ibr::noise::{
    apply_noise, default_sigma_over_n_grid, make_popt, noise_kernel, nqcrb, nqcrb_analytic, nqcrb_curve,
    nqcrb_numeric, parse_nqcrb_csv, two_point_cfi, write_nqcrb_csv,
};
use spin_ibr::Error;

/// Maclaurin series of erf, adequate for |x| ≤ 3.
fn erf_series(x: f64) -> f64 {
    let mut term = x;
    let mut sum = x;
    for k in 1..200 {
        term *= -x * x / k as f64;
        sum += term / (2 * k + 1) as f64;
    }
    sum * 2.0 / std::f64::consts::PI.sqrt()
}

#[test]
fn regression_value_for_ten_particles() {
    // frozen from nqcrb_numeric(10, 1, 4)
    let v = nqcrb_numeric(10, 1.0, 4.0).unwrap();
    assert!((v - 0.468455620785702).abs() < 1e-12, "{v:.15}");
    let full = cfi(&apply_noise(&make_popt(10, 1.0).unwrap(), &noise_kernel(10, 4.0).unwrap()).unwrap()).unwrap();
    assert!((v - full).abs() < 1e-14);
}

#[test]
fn numeric_bound_decreases_towards_zero() {
    let n = 100;
    let fq = (n * n) as f64;
    let grid = default_sigma_over_n_grid();
    let values: Vec<f64> = grid.iter().map(|s| nqcrb_numeric(n, fq, s * n as f64).unwrap()).collect();
    // outcomes below the cfi ε cutoff are dropped, so the plateau near F_Q
    // wobbles at the 1e-12 level
    for w in values.windows(2) {
        assert!(w[1] <= w[0] + 1e-11 * fq);
    }
    assert_eq!(nqcrb_numeric(n, fq, 0.0).unwrap(), fq);
    assert!(values[0] > 0.99 * fq);
    assert!(*values.last().unwrap() < 0.05 * fq, "{}", values.last().unwrap() / fq);
}

#[test]
fn analytic_underestimates_numeric() {
    let n = 100;
    let fq = (n * n) as f64;
    for s in default_sigma_over_n_grid() {
        let sigma = s * n as f64;
        let (num, ana) = (nqcrb_numeric(n, fq, sigma).unwrap(), nqcrb_analytic(n, fq, sigma).unwrap());
        assert!(ana <= num + 1e-9 * fq, "sigma/N={s}: {ana} > {num}");
        assert!((0.0..=fq).contains(&ana) && (0.0..=fq).contains(&num));
    }
}

#[test]
fn analytic_limits() {
    assert_eq!(nqcrb_analytic(100, 5.0, 0.0).unwrap(), 5.0);
    assert!((nqcrb_analytic(100, 1.0, 1e-3).unwrap() - 1.0).abs() < 1e-15);
    assert!(nqcrb_analytic(1, 1.0, 1e6).unwrap() < 1e-12);
}

#[test]
fn two_point_against_series_oracle() {
    let oracle = erf_series(1.0 / 2f64.sqrt()).powi(2);
    let v = two_point_cfi(1.0, -5.0, 5.0, 5.0).unwrap();
    assert!((v - oracle).abs() < 1e-13, "{v} vs {oracle}");
    assert!((v - 0.46606).abs() < 1e-5);
    assert_eq!(two_point_cfi(2.0, 0.0, 1.0, 0.0).unwrap(), 2.0);
    assert!(two_point_cfi(1.0, 1.0, 1.0, 1.0).is_err());
}

#[test]
fn two_point_beats_truncated_bound() {
    let n = 100;
    let fq = 1.0;
    let sigma = 25.0;
    let two = two_point_cfi(fq, -50.0, 50.0, sigma).unwrap();
    let ana = nqcrb_analytic(n, fq, sigma).unwrap();
    assert!(two >= ana, "{two} < {ana}");
}

#[test]
fn thousand_particles_without_dense_kernel() {
    let start = Instant::now();
    let n = 1000;
    let fq = 1e6;
    let rows = nqcrb_curve(n, fq, &default_sigma_over_n_grid()).unwrap();
    assert!(start.elapsed().as_secs_f64() < 5.0);
    for r in &rows {
        assert!(r.f_analytic <= r.f_numeric + 1e-9 * fq);
    }
}

#[test]
fn kernel_shape_and_limits() {
    let k = noise_kernel(20, 3.0).unwrap();
    for j in 0..21 {
        let col_sum: f64 = k.gamma().column(j).sum();
        assert!((col_sum - 1.0).abs() < 1e-12);
    }
    let flat = noise_kernel(10, 1e6).unwrap();
    assert!(flat.gamma().iter().all(|g| (g - 1.0 / 11.0).abs() < 1e-6));
    let id = noise_kernel(5, 0.0).unwrap();
    assert_eq!(id.gamma(), &nalgebra::DMatrix::identity(6, 6));
    assert!(matches!(noise_kernel(5, -1.0), Err(Error::NegativeSigma(_))));
}

#[test]
fn nqcrb_csv_roundtrip() {
    let rows: Vec<_> = [0.01, 0.1, 1.0].iter().map(|s| nqcrb(10, 100.0, s * 10.0).unwrap()).collect();
    let mut out = Vec::new();
    write_nqcrb_csv(&mut out, &rows).unwrap();
    let text = String::from_utf8(out).unwrap();
    assert!(text.starts_with("sigma_over_n,f_numeric,f_analytic,f_q\n"));
    let back = parse_nqcrb_csv(&text).unwrap();
    assert_eq!(back.len(), 3);
    for (r, b) in rows.iter().zip(&back) {
        assert_eq!(b[1], r.f_numeric);
        assert_eq!(b[2], r.f_analytic);
    }
}

fn normalised(raw: &[f64], slopes: &[f64]) -> ProbDist {
    let total: f64 = raw.iter().sum();
    let p: Vec<f64> = raw.iter().map(|x| x / total).collect();
    let mean: f64 = p.iter().zip(slopes).map(|(a, b)| a * b).sum();
    let dp = p.iter().zip(slopes).map(|(a, b)| a * (b - mean)).collect();
    ProbDist::new(p, dp).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn noise_is_stochastic_and_contracts_fisher_information(
        raw in prop::collection::vec(1e-6f64..1.0, 11),
        slopes in prop::collection::vec(-3.0f64..3.0, 11),
        sigma in 0.0f64..6.0,
    ) {
        let d = normalised(&raw, &slopes);
        let noisy = apply_noise(&d, &noise_kernel(10, sigma).unwrap()).unwrap();
        prop_assert!((noisy.p().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(noisy.dp().iter().sum::<f64>().abs() < 1e-12);
        prop_assert!(noisy.p().iter().all(|&x| x >= 0.0));
        prop_assert!(cfi(&noisy).unwrap() <= cfi(&d).unwrap() * (1.0 + 1e-12));
    }

    #[test]
    fn bound_is_linear_in_fq(n in 1usize..60, sigma in 0.0f64..30.0, fq in 0.1f64..1e4) {
        let unit = nqcrb_numeric(n, 1.0, sigma).unwrap();
        let scaled = nqcrb_numeric(n, fq, sigma).unwrap();
        prop_assert!((scaled - fq * unit).abs() <= 1e-12 * fq);
        prop_assert!(scaled <= fq * (1.0 + 1e-12));
    }
}
