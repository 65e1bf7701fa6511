use fso_channel::{AtmosphereModel, Cn2Profile, LinkGeometry, OverlapModel, QuadratureSpec};
use proptest::prelude::*;

proptest! {
    #[test]
    fn pointing_coefficient_non_increasing(
        z in 1e3f64..5e4,
        ra in 0.01f64..0.2,
        ratio in 2.0f64..80.0,
        a in 0.0f64..1.0,
        b in 0.0f64..1.0,
    ) {
        let theta = 2.0 * ratio * ra / z;
        let g = LinkGeometry::new(z, ra, theta).unwrap();
        let reach = 1.5 * (g.beam_radius() + ra);
        let (s1, s2) = (a.min(b) * reach, a.max(b) * reach);
        for model in [OverlapModel::Exact, OverlapModel::Approximate] {
            prop_assert!(g.pointing_coefficient(s2, model) <= g.pointing_coefficient(s1, model));
        }
    }

    #[test]
    fn exact_area_within_disk(ratio in 1.5f64..80.0, t in 0.0f64..1.0) {
        let g = LinkGeometry::new(20e3, 0.05, 2.0 * ratio * 0.05 / 20e3).unwrap();
        let (lo, hi) = g.overlap_band();
        let s = lo + t * (hi - lo);
        let area = g.overlap_area_exact(s).unwrap();
        prop_assert!((0.0..=g.aperture_area()).contains(&area));
    }

    #[test]
    fn attenuation_is_multiplicative(db in 0.0f64..10.0, z1 in 0.0f64..5e4, z2 in 0.0f64..5e4) {
        let xi = fso_channel::atmosphere::db_per_km_to_per_m(db);
        let m = AtmosphereModel::new(Cn2Profile::hv57(), xi, 1.0, None).unwrap();
        let joint = m.attenuation_loss(z1 + z2);
        let split = m.attenuation_loss(z1) * m.attenuation_loss(z2);
        // exp(-x) inherits the rounding of x, a relative error of about x·ε
        let tol = 4.0 * f64::EPSILON * (1.0 + xi * (z1 + z2));
        prop_assert!((joint - split).abs() <= tol * joint);
    }
}

#[test]
fn wander_grows_with_profile_strength() {
    let q = QuadratureSpec::default();
    let g = LinkGeometry::new(20e3, 0.05, 1e-4).unwrap();
    let mut prev = 0.0;
    for ground in [1e-15, 1.7e-14, 1e-13] {
        let profile = Cn2Profile::HufnagelValley {
            wind_rms: 21.0,
            ground_cn2: ground,
        };
        let v = AtmosphereModel::new(profile, 0.0, 1.0, None)
            .unwrap()
            .beam_wander_variance(&g, &q)
            .unwrap();
        assert!(v > prev);
        prev = v;
    }
}

#[test]
fn table_profile_from_file() {
    let dir = std::env::temp_dir().join(format!("fso-channel-table-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("cn2.txt");
    std::fs::write(&path, "# altitude_m cn2\n0 1e-14\n1000, 1e-16\n20000 1e-18\n").unwrap();
    let p = Cn2Profile::load_table(&path).unwrap();
    assert_eq!(p.at(500.0), 0.5 * (1e-14 + 1e-16));
    assert_eq!(p.at(30000.0), 1e-18);
    std::fs::write(&path, "0 1e-14\n1000 abc\n").unwrap();
    match Cn2Profile::load_table(&path) {
        Err(fso_channel::Error::Parse { line, .. }) => assert_eq!(line, 2),
        other => panic!("{other:?}"),
    }
    std::fs::remove_dir_all(&dir).unwrap();
}
