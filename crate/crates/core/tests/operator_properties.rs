use koopman_core::basis::*;
use koopman_core::measures::*;
use koopman_core::transfer::*;
use nalgebra::DMatrix;
use proptest::prelude::*;

fn planar_measure(coords: &[f64], raw_w: &[f64]) -> DiscreteMeasure {
    let total: f64 = raw_w.iter().sum();
    DiscreteMeasure::atoms(2, coords.to_vec(), raw_w.iter().map(|w| w / total).collect()).unwrap()
}

#[test]
fn kernel_galerkin_duality() {
    // a skewed, non-symmetric density on [0, 1]: p(y, x) = 1 + a(x)(2y - 1)
    let sys = DynamicalSystem::kernel("skew", |y, x| 1.0 + (0.8 * x - 0.3) * (2.0 * y - 1.0), Domain::interval(0.0, 1.0), Some(9));
    let b = MultiscaleBasis::haar1d();
    let u = koopman_matrix(&sys, &b, 3, 9).unwrap();
    let p = perron_frobenius_matrix(&sys, &b, 3, 9).unwrap();
    assert!((&p.matrix - u.matrix.transpose()).norm() < 1e-10);
    assert!((&u.matrix - u.matrix.transpose()).norm() > 1e-3);
}

#[test]
fn symmetric_kernel_gives_symmetric_matrix() {
    let sys = heat_system(0.1).unwrap();
    let m = koopman_matrix(&sys, &MultiscaleBasis::haar1d(), 3, 9).unwrap();
    assert!((&m.matrix - m.matrix.transpose()).norm() < 1e-10);
}

#[test]
fn square_map_galerkin_against_fine_grid() {
    let sys = system_registry("x_alpha(2)").unwrap();
    let b = MultiscaleBasis::haar1d();
    let m = koopman_matrix(&sys, &b, 1, 10).unwrap();
    // independent oracle: dense midpoint sums at level 14 using only eval
    let n = 1usize << 14;
    for (a, ia) in m.indices.iter().enumerate() {
        for (c, ic) in m.indices.iter().enumerate() {
            let s: f64 = (0..n)
                .map(|i| {
                    let x = (i as f64 + 0.5) / n as f64;
                    b.eval(ic, &[x * x]).unwrap() * b.eval(ia, &[x]).unwrap()
                })
                .sum::<f64>()
                / n as f64;
            assert!((m.matrix[(a, c)] - s).abs() < 2e-3, "({a},{c}) {} vs {s}", m.matrix[(a, c)]);
        }
    }
    let id = koopman_matrix(&system_registry("identity").unwrap(), &b, 3, 8).unwrap();
    assert!((id.matrix - DMatrix::identity(8, 8)).norm() < 1e-10);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn output_truncation_rate(raw in prop::collection::vec(-1.0f64..1.0, 32 * 32), c in prop::collection::vec(-1.0f64..1.0, 32), j in 0u32..5, s in 0.5f64..2.0) {
        let b = MultiscaleBasis::haar1d();
        let idx = b.multiscale_indices(5).unwrap();
        let level = |i: usize| idx[i].level.max(0) as f64;
        let p = DMatrix::from_fn(32, 32, |a, k| raw[32 * a + k] * 2f64.powf(-s * level(a)));
        let out = &p * nalgebra::DVector::from_column_slice(&c);
        let pf = CoefficientField::from_entries(b.family, idx.iter().cloned().zip(out.iter().copied()));
        let err = pf.sub(&pf.truncate(j)).norm();
        for r in [0.5, 1.0] {
            let bound = 2f64.powf(-r * j as f64) * arq_seminorm(&pf, &b, r, 2.0).unwrap().value;
            prop_assert!(err <= bound * (1.0 + 1e-12));
        }
    }

    #[test]
    fn ifs_contracts_w1(
        a in prop::collection::vec(0.0f64..1.0, 12),
        wa in prop::collection::vec(0.1f64..1.0, 6),
        b in prop::collection::vec(0.0f64..1.0, 8),
        wb in prop::collection::vec(0.1f64..1.0, 4),
    ) {
        let sys = sierpinski();
        let mu = planar_measure(&a, &wa);
        let nu = planar_measure(&b, &wb);
        let before = wasserstein1(&mu, &nu).unwrap();
        let after = wasserstein1(&pf_pushforward_measure(&sys, &mu).unwrap(), &pf_pushforward_measure(&sys, &nu).unwrap()).unwrap();
        prop_assert!(after <= sys.contraction_factor().unwrap() * before + 1e-9);
    }

    #[test]
    fn w1_is_a_metric(
        a in prop::collection::vec(0.0f64..1.0, 10),
        b in prop::collection::vec(0.0f64..1.0, 8),
        c in prop::collection::vec(0.0f64..1.0, 6),
        wa in prop::collection::vec(0.1f64..1.0, 5),
        wb in prop::collection::vec(0.1f64..1.0, 4),
        wc in prop::collection::vec(0.1f64..1.0, 3),
    ) {
        let (x, y, z) = (planar_measure(&a, &wa), planar_measure(&b, &wb), planar_measure(&c, &wc));
        let xy = wasserstein1(&x, &y).unwrap();
        prop_assert_eq!(xy, wasserstein1(&y, &x).unwrap());
        prop_assert!(xy <= wasserstein1(&x, &z).unwrap() + wasserstein1(&z, &y).unwrap() + 1e-9);
        prop_assert!(wasserstein1(&x, &x).unwrap().abs() < 1e-12);
    }

    #[test]
    fn probability_projection_is_positive(
        amps in prop::collection::vec(-1.0f64..1.0, 4),
        floor in 0.05f64..1.0,
        level in 1u32..6,
        tilt in 0.0f64..2.0,
    ) {
        let h = move |x: f64| floor + amps.iter().enumerate().map(|(k, a)| a * ((k + 1) as f64 * 6.0 * x).sin()).sum::<f64>().powi(2);
        let mu = move |x: f64| 1.0 + tilt * x;
        let p = probability_project(&h, mu, level, level + 8).unwrap();
        prop_assert!(p.values.iter().all(|v| *v >= 0.0));
        let direct = koopman_core::quadrature::composite_gauss5(|x| h(x) * mu(x), 0.0, 1.0, 1 << (level + 8));
        prop_assert!((p.total_mass() - direct).abs() <= 1e-10 * direct.max(1.0));
    }

    #[test]
    fn dual_projection_of_cell_density(vals in prop::collection::vec(0.0f64..2.0, 8)) {
        let b = MultiscaleBasis::haar1d();
        let v = vals.clone();
        let m = move |x: f64| v[((x * 8.0) as usize).min(7)];
        let nu = DiscreteMeasure::with_density(m.clone(), (0.0, 1.0));
        let DualCoefficients::Multiscale { coeffs, .. } = dual_project(&nu, &b, 3).unwrap() else { unreachable!() };
        let want = fwt(&project(|x: &[f64]| m(x[0]), &b, 4, 10).unwrap(), &b).unwrap();
        for (idx, w) in want.iter() {
            prop_assert!((coeffs.get(idx) - w).abs() < 1e-12, "{:?}", idx);
        }
    }
}
