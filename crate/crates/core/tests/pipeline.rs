use proptest::prelude::*;
use ucsk::colorimetry::{mix_chromaticity, solve_fluxes, xy_distance, GamutPolygon};
use ucsk::constellation::{BlueTarget, ConstellationDoc};
use ucsk::linksim::{
    build_hypotheses, rate_curve, sigma_for_snr, simulate_ser, union_bound, CurveKind, LinkConfig,
    SnrCurve,
};
use ucsk::optimizer::{design_constellation, OptimizerConfig};

fn triangle() -> GamutPolygon {
    let [a, b, c] = LinkConfig::default().primary_points();
    GamutPolygon::triangle(a, b, c).unwrap()
}

fn quick() -> OptimizerConfig {
    OptimizerConfig {
        multistart_count: 8,
        ..OptimizerConfig::default()
    }
}

#[test]
fn design_document_link_round_trip() {
    let target = BlueTarget::preset(2).unwrap();
    let res = design_constellation(&target, &quick(), &triangle()).unwrap();
    let doc = ConstellationDoc::from_constellation(&res.constellation, &target, "test");
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.json");
    doc.write(&path).unwrap();
    let back = ConstellationDoc::read(&path)
        .unwrap()
        .to_constellation(GamutPolygon::spectral_locus())
        .unwrap();
    assert_eq!(back, res.constellation);

    // Every symbol is producible and mixes back to its own chromaticity.
    let cfg = LinkConfig::default();
    let prims = cfg.primary_points();
    for (_, p) in back.points() {
        let y = solve_fluxes(&prims, p, cfg.total_luminous_flux).unwrap();
        assert!(y.iter().all(|v| *v >= 0.0));
        assert!(xy_distance(mix_chromaticity(&prims, &y).unwrap(), p) < 1e-12);
    }

    let grid = [0.0, 10.0, 20.0];
    let ser = simulate_ser(&back, &cfg, &grid, 20_000, 4).unwrap();
    let csv_path = dir.path().join("s.csv");
    ser.write(&csv_path).unwrap();
    let parsed = SnrCurve::read(&csv_path, CurveKind::Ser, None).unwrap();
    assert_eq!(parsed.config_sha, ser.config_sha);
    for (a, b) in parsed.points.iter().zip(&ser.points) {
        assert!((a.value - b.value).abs() <= 1e-9 * b.value.max(1e-300));
    }

    let h = build_hypotheses(&back, &cfg).unwrap();
    let rate = rate_curve(&h, &cfg, &grid, 20_000, 4).unwrap();
    assert!(rate.values().iter().all(|v| (0.0..=2e8).contains(v)));
}

#[test]
fn curves_are_reproducible() {
    let c = design_constellation(&BlueTarget::preset(1).unwrap(), &quick(), &triangle())
        .unwrap()
        .constellation;
    let cfg = LinkConfig::default();
    let a = simulate_ser(&c, &cfg, &[5.0, 15.0], 10_000, 9).unwrap();
    let b = simulate_ser(&c, &cfg, &[5.0, 15.0], 10_000, 9).unwrap();
    assert_eq!(a.to_csv(), b.to_csv());
    let other = simulate_ser(&c, &cfg, &[5.0, 15.0], 10_000, 10).unwrap();
    assert_ne!(a.values(), other.values());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn ser_nonincreasing_and_bounded(preset in 1u8..=3, seed in 0u64..10_000, lo in 0.0f64..20.0) {
        let c = design_constellation(&BlueTarget::preset(preset).unwrap(), &quick(), &triangle()).unwrap().constellation;
        let cfg = LinkConfig::default();
        let h = build_hypotheses(&c, &cfg).unwrap();
        let grid = [lo, lo + 3.0, lo + 6.0];
        let curve = simulate_ser(&c, &cfg, &grid, 20_000, seed).unwrap();
        for w in curve.points.windows(2) {
            let se = (w[0].std_err.powi(2) + w[1].std_err.powi(2)).sqrt();
            prop_assert!(w[1].value <= w[0].value + 3.0 * se);
        }
        for p in &curve.points {
            let ub = union_bound(&h, sigma_for_snr(&h, p.snr_db));
            prop_assert!(p.value <= ub + 3.0 * p.std_err.max(1e-4));
        }
    }
}
