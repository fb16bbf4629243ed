use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use spin_ibr::metrology::{cfi, ProbDist};
use spin_ibr::noise::{make_popt, nqcrb_numeric};
use spin_ibr::optimizer::{
    certify_bound, haar_orthogonal, hill_climb, pair_from_dist, parse_cert_csv, parse_trace_csv,
    random_constrained_dist, random_plane_rotation, start_pair, start_uniform, write_cert_csv, write_trace_csv,
    AmplitudePair, PlaneRotation,
};

#[test]
fn popt_amplitudes() {
    let pair = pair_from_dist(&make_popt(10, 2.0).unwrap()).unwrap();
    // v̇ = dp/(2v) with dp = √F₀/2 and v = √½
    let h = (2f64.sqrt() / 2.0) / (2.0 * 0.5f64.sqrt());
    assert!((pair.vdot()[0] + h).abs() < 1e-12);
    assert!((pair.vdot()[10] - h).abs() < 1e-12);
    assert!((pair.f_zero() - 2.0).abs() < 1e-12);
}

#[test]
fn pair_roundtrip_reproduces_distribution() {
    for seed in 0..20 {
        let d = random_constrained_dist(10, 1.5, seed).unwrap();
        let pair = pair_from_dist(&d).unwrap();
        let back = pair.to_dist();
        for k in 0..d.len() {
            assert!((back.p()[k] - d.p()[k]).abs() < 1e-12);
            assert!((back.dp()[k] - d.dp()[k]).abs() < 1e-12);
        }
        assert!((pair.f_zero() - cfi(&d).unwrap()).abs() < 1e-10);
    }
}

#[test]
fn zero_angle_rotation_is_identity() {
    let pair = pair_from_dist(&start_uniform(10, 1.0).unwrap()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let rot = PlaneRotation::sample(11, 0.1, &mut rng).unwrap().with_angle(0.0);
    assert_eq!(rot.rotate(&pair), pair);
}

#[test]
fn haar_matrices_are_orthogonal() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for dim in [2usize, 5, 11, 30] {
        let q = haar_orthogonal(dim, &mut rng);
        let residual = (q.transpose() * &q - nalgebra::DMatrix::<f64>::identity(dim, dim)).amax();
        assert!(residual < 1e-12);
    }
}

#[test]
fn random_distributions_keep_their_information() {
    for seed in 0..100 {
        let d = random_constrained_dist(10, 1.0, seed).unwrap();
        assert!((cfi(&d).unwrap() - 1.0).abs() < 1e-8);
        assert!((d.p().iter().sum::<f64>() - 1.0).abs() < 1e-10);
    }
}

#[test]
fn certification_holds_at_two_noise_levels() {
    for sigma in [1.0, 4.0] {
        let bound = nqcrb_numeric(10, 1.0, sigma).unwrap();
        let rows = certify_bound(10, 1.0, sigma, 1000, 10_000).unwrap();
        assert_eq!(rows.len(), 10_000);
        assert!(rows.iter().all(|r| r.bound == bound));
        let worst = rows.iter().map(|r| r.f_sigma).fold(0.0, f64::max);
        assert!(rows.iter().all(|r| !r.violates(1e-9)), "sigma={sigma}: {worst} vs {bound}");
    }
}

#[test]
fn hill_climb_trace_invariants() {
    let start = start_pair(10, 1.0, 2, 9).unwrap();
    let (best, trace) = hill_climb(&start, 2.0, 2000, 0.1, 99).unwrap();
    assert_eq!(trace.len(), 2001);
    assert_eq!(trace[0].iteration, 0);
    for w in trace.windows(2) {
        assert!(w[1].f_sigma >= w[0].f_sigma);
        if w[1].accepted {
            assert!(w[1].f_sigma > w[0].f_sigma);
        } else {
            assert_eq!(w[1].f_sigma, w[0].f_sigma);
        }
    }
    assert!(trace.iter().all(|t| (t.f_zero - 1.0).abs() < 1e-8));
    assert!(trace.last().unwrap().f_sigma <= nqcrb_numeric(10, 1.0, 2.0).unwrap() + 1e-9);
    assert!((cfi(&best).unwrap() - 1.0).abs() < 1e-8);
}

#[test]
fn hill_climb_is_reproducible() {
    let start = start_uniform(10, 1.0).unwrap();
    let (a, ta) = hill_climb(&start, 4.0, 500, 0.1, 7).unwrap();
    let (b, tb) = hill_climb(&start, 4.0, 500, 0.1, 7).unwrap();
    assert_eq!(a, b);
    assert_eq!(ta, tb);
    let (_, tc) = hill_climb(&start, 4.0, 500, 0.1, 8).unwrap();
    assert_ne!(ta, tc);
}

#[test]
fn single_tiny_step_keeps_the_start() {
    let start = start_uniform(10, 1.0).unwrap();
    let (out, _) = hill_climb(&start, 4.0, 1, 1e-300, 3).unwrap();
    for (a, b) in out.p().iter().zip(start.p()) {
        assert!((a - b).abs() < 1e-15);
    }
}

#[test]
fn trace_and_certificate_csv_roundtrip() {
    let start = start_uniform(10, 1.0).unwrap();
    let (_, trace) = hill_climb(&start, 4.0, 100, 0.1, 5).unwrap();
    let mut out = Vec::new();
    write_trace_csv(&mut out, &trace, 10).unwrap();
    let text = String::from_utf8(out).unwrap();
    assert!(text.starts_with("iteration,f_sigma,f_zero,d_h\n0,"));
    let back = parse_trace_csv(&text).unwrap();
    assert_eq!(back.len(), 11);
    assert_eq!(back[10].iteration, 100);
    assert_eq!(back[10].f_sigma, trace[100].f_sigma);

    let rows = certify_bound(10, 1.0, 4.0, 0, 5).unwrap();
    let mut out = Vec::new();
    write_cert_csv(&mut out, &rows).unwrap();
    let back = parse_cert_csv(&String::from_utf8(out).unwrap()).unwrap();
    assert_eq!(back, rows);
}

#[test]
fn start_distributions_carry_requested_information() {
    for d in [start_uniform(10, 1.0).unwrap(), start_pair(10, 1.0, 5, 6).unwrap(), start_pair(10, 1.0, 3, 7).unwrap()] {
        assert!((cfi(&d).unwrap() - 1.0).abs() < 1e-12);
    }
    assert!(start_pair(10, 1.0, 4, 4).is_err());
    assert!(start_pair(10, 1.0, 0, 11).is_err());
}

fn any_dist(raw: &[f64], slopes: &[f64]) -> ProbDist {
    let total: f64 = raw.iter().sum();
    let p: Vec<f64> = raw.iter().map(|x| x / total).collect();
    let mean: f64 = p.iter().zip(slopes).map(|(a, b)| a * b).sum();
    let dp = p.iter().zip(slopes).map(|(a, b)| a * (b - mean)).collect();
    ProbDist::new(p, dp).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn plane_rotation_conserves_noise_free_information(
        raw in prop::collection::vec(1e-4f64..1.0, 11),
        slopes in prop::collection::vec(-2.0f64..2.0, 11),
        seed in any::<u64>(),
        max_angle in 1e-3f64..1.0,
    ) {
        let pair: AmplitudePair = pair_from_dist(&any_dist(&raw, &slopes)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let moved = random_plane_rotation(&pair, max_angle, &mut rng).unwrap();
        prop_assert!((moved.f_zero() - pair.f_zero()).abs() < 1e-10 * pair.f_zero().max(1.0));
        let norm: f64 = moved.v().iter().map(|x| x * x).sum();
        prop_assert!((norm - 1.0).abs() < 1e-12);
        let dsum: f64 = moved.to_dist().dp().iter().sum();
        prop_assert!(dsum.abs() < 1e-10);
    }
}
