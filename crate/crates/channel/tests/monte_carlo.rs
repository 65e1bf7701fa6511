use fso_channel::{
    ks_against_model, run_simulation, AtmosphereModel, ChannelModel, GammaGammaParams, LinkGeometry, OverlapModel,
    PointingStats, QuadratureSpec, SimulationPlan, Turbulence,
};

fn channel(theta: f64) -> ChannelModel {
    let q = QuadratureSpec::default();
    let g = LinkGeometry::new(20e3, 0.05, theta).unwrap();
    let atm = AtmosphereModel::default();
    let sb = atm.beam_wander_variance(&g, &q).unwrap().sqrt();
    ChannelModel::new(
        g,
        PointingStats::new(0.4, sb).unwrap(),
        Turbulence::GammaGamma(GammaGammaParams::new(4.0, 1.7).unwrap()),
        atm.attenuation_loss(20e3),
    )
    .unwrap()
}

fn plan(m: &ChannelModel, n: u64, seed: u64) -> SimulationPlan {
    let s = m.full_capture_gain();
    SimulationPlan::new(n, seed, 4, 200, (0.0, 4.0 * s))
        .unwrap()
        .with_overlap(OverlapModel::Approximate)
}

fn dkw(n: u64) -> f64 {
    ((2.0f64 / 0.001).ln() / (2.0 * n as f64)).sqrt()
}

#[test]
fn self_consistency_within_dkw_bound() {
    let q = QuadratureSpec::default();
    let m = channel(1e-4);
    let n = 200_000;
    for seed in 0..20 {
        let r = run_simulation(&plan(&m, n, seed), &m).unwrap();
        let ks = ks_against_model(&r, &m, &q).unwrap();
        assert!(ks <= dkw(n), "seed {seed}: {ks} > {}", dkw(n));
    }
}

#[test]
fn ks_shrinks_like_root_n() {
    let q = QuadratureSpec::default();
    let m = channel(1e-4);
    let mean_ks = |n: u64| {
        (0..6)
            .map(|seed| ks_against_model(&run_simulation(&plan(&m, n, 100 + seed), &m).unwrap(), &m, &q).unwrap())
            .sum::<f64>()
            / 6.0
    };
    let ratio = mean_ks(100_000) / mean_ks(1_000_000);
    assert!((2.0..=5.0).contains(&ratio), "{ratio}");
}

#[test]
fn footprints_are_distinguishable() {
    let q = QuadratureSpec::default();
    let narrow = channel(1e-4);
    let wide = channel(2e-4);
    let s = narrow.full_capture_gain();
    let p = SimulationPlan::new(1_000_000, 9, 4, 200, (0.0, 4.0 * s)).unwrap();
    let r = run_simulation(&p, &narrow).unwrap();
    assert!(ks_against_model(&r, &wide, &q).unwrap() > 0.05);
}

#[test]
fn atom_fractions_match_weights() {
    let m = channel(1e-4);
    let s = m.full_capture_gain();
    let p = SimulationPlan::new(1_000_000, 77, 4, 10, (0.0, 4.0 * s)).unwrap();
    let r = run_simulation(&p, &m).unwrap();
    let n = r.n_samples as f64;
    let (full, zero) = r.atom_fractions();
    for (hat, w) in [(full, m.mixture().full_weight), (zero, m.mixture().zero_weight)] {
        let sd = (w * (1.0 - w) / n).sqrt();
        assert!((hat - w).abs() <= 3.0 * sd, "{hat} vs {w} ± {sd}");
    }
    assert_eq!(r.zero_count, r.zero_pointing_count);
}

#[test]
fn identical_plans_identical_results() {
    let m = channel(2e-4);
    let s = m.full_capture_gain();
    let base = SimulationPlan::new(250_000, 5, 1, 64, (0.0, 3.0 * s)).unwrap();
    let first = run_simulation(&base, &m).unwrap();
    for workers in [1, 2, 7] {
        let mut p = base.clone();
        p.n_workers = workers;
        assert_eq!(run_simulation(&p, &m).unwrap(), first);
    }
}
