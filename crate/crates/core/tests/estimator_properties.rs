use koopman_core::edmd::*;
use koopman_core::quadrature::gauss5;
use koopman_core::rng::TrialRng;
use koopman_core::sampling::*;
use koopman_core::transfer::system_registry;
use proptest::prelude::*;
use rand::Rng;

fn sample_set() -> impl Strategy<Value = SampleSet> {
    (1usize..=64).prop_flat_map(|m| {
        (prop::collection::vec(0.0f64..=1.0, m), prop::collection::vec(0.0f64..=1.0, m))
            .prop_map(|(x, y)| SampleSet::from_pairs(&x.into_iter().zip(y).collect::<Vec<_>>()))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ac_is_one_then_strictly_decreasing(pbar in 0.05f64..3.0, j in 1usize..16, m in 1usize..5000, t in 0.0f64..1.0, d in 1e-3f64..1.0) {
        let ac = AccuracyConfidence::new(pbar).unwrap();
        let th = ac.threshold(j, m);
        prop_assert_eq!(accuracy_confidence(&ac, t * th, j, m), 1.0);
        let a = accuracy_confidence(&ac, th * (1.0 + d), j, m);
        let b = accuracy_confidence(&ac, th * (1.0 + 2.0 * d), j, m);
        prop_assert!(b < a && a < 1.0);
        prop_assert!((accuracy_confidence(&ac, th * (1.0 + 1e-12), j, m) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn sample_path_is_the_orbit(x0 in 0.0f64..1.0, a in 0.2f64..3.0, m in 1usize..40, seed in any::<u64>()) {
        let sys = system_registry(&format!("x_alpha({a})")).unwrap();
        let z = draw_samples(&sys, SamplingMode::SamplePath, |_: &mut TrialRng| vec![x0], m, seed).unwrap();
        let mut x = x0;
        for i in 0..m {
            prop_assert_eq!(z.x(i)[0], x);
            x = x.powf(a);
            prop_assert_eq!(z.y(i)[0], x);
        }
    }

    #[test]
    fn edmd_equals_erm_on_the_dyadic_space(z in sample_set(), level in 0u32..=4, c in prop::collection::vec(-3.0f64..3.0, 16)) {
        let d = Dictionary::indicators(level);
        let n = d.len();
        let c = &c[..n];
        let model = fit_edmd(&d, &z).unwrap();
        let closed = piecewise_constant_matrix(&z, level);
        prop_assert!((&model.koopman - &closed).abs().max() < 1e-10);
        let f = |y: f64| c[d.cell_of(y).unwrap()];
        let erm = erm_estimate(&z, f, level);
        let pc = edmd_piecewise_constant(&z, level, c).unwrap();
        for i in 0..=256 {
            let x = i as f64 / 256.0;
            let e = edmd_apply(&model, &d, c, x).unwrap();
            prop_assert!((e - erm.eval(x)).abs() < 1e-10);
            prop_assert!((pc.eval(x) - erm.eval(x)).abs() < 1e-12);
        }
        let scale = 1.0 + (&model.phi_y * model.phi_x.transpose()).norm();
        prop_assert!(model.normal_residual() <= 1e-8 * scale);
    }

    #[test]
    fn edmd_erm_gap_bounded_by_detail(z in sample_set(), level in 0u32..=4, w in 1.0f64..12.0) {
        let f = |y: f64| (w * y).sin() + y * y;
        let d = Dictionary::indicators(level);
        let n = d.len();
        let h = 1.0 / n as f64;
        let avg: Vec<f64> = (0..n).map(|k| gauss5(f, k as f64 * h, (k + 1) as f64 * h) / h).collect();
        let model = fit_edmd(&d, &z).unwrap();
        let erm = erm_estimate(&z, f, level);
        let detail = z.ys.iter().map(|&y| (f(y) - avg[d.cell_of(y).unwrap()]).abs()).fold(0.0, f64::max);
        for i in 0..=128 {
            let x = i as f64 / 128.0;
            let gap = (edmd_apply(&model, &d, &avg, x).unwrap() - erm.eval(x)).abs();
            prop_assert!(gap <= detail + 1e-10);
        }
    }

    #[test]
    fn effective_samples_never_exceed_m(m in 1u64..100_000, b in 0.5f64..64.0, c in 0.2f64..4.0) {
        let e = effective_samples(m, b, c).unwrap();
        prop_assert!(e <= m);
    }
}

#[test]
fn draws_are_reproducible() {
    let sys = system_registry("heat(0.1)").unwrap();
    let init = |r: &mut TrialRng| vec![r.gen_range(0.0..std::f64::consts::TAU)];
    let a = draw_samples(&sys, SamplingMode::IidInitial, init, 500, 42).unwrap();
    let b = draw_samples(&sys, SamplingMode::IidInitial, init, 500, 42).unwrap();
    let c = draw_samples(&sys, SamplingMode::IidInitial, init, 500, 43).unwrap();
    assert_eq!(a, b);
    assert_ne!(a.xs, c.xs);
}

#[test]
fn hs_deviation_shrinks_like_inverse_root() {
    // E||P_n (G - I)||_F^2 scales like 1/m, so quadrupling m halves the RMS
    let op = koopman_core::spectral::heat_kernel_operator(0.1, 4).unwrap();
    let omega = (0.0, std::f64::consts::TAU);
    let rms = |m: usize| {
        let d = hs_deviations(&op, 8, m, 400, 9, omega).unwrap();
        (d.iter().map(|v| v * v).sum::<f64>() / d.len() as f64).sqrt()
    };
    let ratio = rms(200) / rms(800);
    assert!((ratio - 2.0).abs() < 0.15, "ratio {ratio}");
}

// Fewer samples than cells leaves most indicator columns empty; the fitted
// matrix must still vanish on those columns and match the closed form.
#[test]
fn sparse_indicator_fits_match_closed_form() {
    use rand::SeedableRng;
    for seed in 0..500u64 {
        let mut rng = TrialRng::seed_from_u64(seed);
        let m = rng.gen_range(1..=64);
        let level = rng.gen_range(3..=5);
        let pairs: Vec<(f64, f64)> = (0..m).map(|_| (rng.gen(), rng.gen())).collect();
        let z = SampleSet::from_pairs(&pairs);
        let model = fit_edmd(&Dictionary::indicators(level), &z).unwrap();
        let gap = (&model.koopman - piecewise_constant_matrix(&z, level)).abs().max();
        assert!(gap <= 1e-10, "seed {seed}: gap {gap:e}");
    }
}
