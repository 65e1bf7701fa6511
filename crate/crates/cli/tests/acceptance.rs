//! Acceptance criteria. Runs every criterion, prints one line each, and exits
//! non-zero if any failed.

use std::f64::consts::PI;
use std::process::Command;
use std::time::{Duration, Instant};

use fso_cli::commands::max_overlap_error;
use fso_channel::special::{bessel_k, bessel_k_series, integrate};
use fso_channel::statistics::gamma_gamma_pdf;
use fso_channel::{
    ks_against_model, outage_numerical, outage_series, run_simulation, AtmosphereModel, ChannelModel, Cn2Profile,
    GammaGammaParams, LinkGeometry, PointingStats, QuadratureSpec, SeriesSpec, SimulationPlan, SnrConfig, Turbulence,
};

struct Verdict {
    pass: bool,
    detail: String,
}

fn quad() -> QuadratureSpec {
    QuadratureSpec::default()
}

fn gg() -> GammaGammaParams {
    GammaGammaParams::new(4.0, 1.7).unwrap()
}

/// Channel with σ_l = 0.4 m, σ_b from the default HV5/7 profile, 0.1 dB/km.
fn channel(z: f64, ra: f64, theta: f64) -> ChannelModel {
    let g = LinkGeometry::new(z, ra, theta).unwrap();
    let atm = AtmosphereModel::default();
    let sb2 = atm.beam_wander_variance(&g, &quad()).unwrap();
    let stats = PointingStats::new(0.4, sb2.sqrt()).unwrap();
    ChannelModel::new(g, stats, Turbulence::GammaGamma(gg()), atm.attenuation_loss(z)).unwrap()
}

fn within(elapsed: Duration, limit_s: f64) -> bool {
    elapsed.as_secs_f64() < limit_s
}

fn normalization() -> Verdict {
    let t = Instant::now();
    let q = quad();
    let p = gg();
    let f = |x: f64| gamma_gamma_pdf(&p, x).unwrap();
    let mass = integrate(f, 0.0, 200.0, &q).unwrap();
    let mean = integrate(|x| x * f(x), 0.0, 200.0, &q).unwrap();
    let mut worst_sum: f64 = 0.0;
    let mut worst_total: f64 = 0.0;
    for theta in [1e-4, 2e-4] {
        let m = channel(20e3, 0.05, theta);
        let mix = m.mixture();
        worst_sum = worst_sum.max((mix.full_weight + mix.zero_weight + mix.continuous_weight - 1.0).abs());
        worst_total = worst_total.max((m.total_mass(&q).unwrap() - 1.0).abs());
    }
    let el = t.elapsed();
    Verdict {
        pass: (mass - 1.0).abs() <= 1e-6
            && (mean - 1.0).abs() <= 1e-6
            && worst_sum <= 1e-15
            && worst_total <= 1e-4
            && within(el, 10.0),
        detail: format!(
            "gg_mass_err={:.2e} gg_mean_err={:.2e} weight_sum_err={:.2e} total_mass_err={:.2e} time={:.2}s",
            (mass - 1.0).abs(),
            (mean - 1.0).abs(),
            worst_sum,
            worst_total,
            el.as_secs_f64()
        ),
    }
}

fn pointing_law() -> Verdict {
    let t = Instant::now();
    let mut ks = Vec::new();
    for theta in [1e-4, 2e-4] {
        let m = channel(20e3, 0.05, theta);
        let s = m.full_capture_gain();
        let plan = SimulationPlan::new(1_000_000, 2024, 4, 400, (0.0, 4.0 * s)).unwrap();
        let r = run_simulation(&plan, &m).unwrap();
        ks.push(ks_against_model(&r, &m, &quad()).unwrap());
    }
    let el = t.elapsed();
    Verdict {
        pass: ks[0] <= 0.005 && ks[1] <= 0.005 && ks[1] <= ks[0] && within(el, 120.0),
        detail: format!("ks_ratio20={:.5} ks_ratio40={:.5} time={:.2}s", ks[0], ks[1], el.as_secs_f64()),
    }
}

fn overlap_bound() -> Verdict {
    let t = Instant::now();
    let e20 = max_overlap_error(&LinkGeometry::new(20e3, 0.05, 1e-4).unwrap()).unwrap();
    let e40 = max_overlap_error(&LinkGeometry::new(20e3, 0.05, 2e-4).unwrap()).unwrap();
    let el = t.elapsed();
    Verdict {
        pass: e20 <= 0.02 && e40 <= 0.01 && within(el, 1.0),
        detail: format!(
            "max_err_ratio20={:.4} (limit 0.02) max_err_ratio40={:.4} (limit 0.01) time={:.3}s",
            e20,
            e40,
            el.as_secs_f64()
        ),
    }
}

fn outage_cross_validation() -> Verdict {
    let t = Instant::now();
    let q = quad();
    let powers: Vec<f64> = (0..33).map(|i| 10f64.powf(-5.0 + 0.125 * i as f64)).collect();
    let configs: Vec<SnrConfig> = powers.iter().map(|&p| SnrConfig::new(0.9, p, 1e-14, 10.0).unwrap()).collect();
    let mut curves = Vec::new();
    let (mut worst_z, mut worst_rel, mut points) = (0.0_f64, 0.0_f64, 0usize);
    let mut series_ok = true;
    for (k, z) in [18e3, 20e3, 22e3].into_iter().enumerate() {
        let m = channel(z, 0.1, 2e-4);
        let num: Vec<f64> = configs.iter().map(|c| outage_numerical(&m, c, &q).unwrap()).collect();
        let keep: Vec<usize> = (0..num.len()).filter(|&i| (1e-4..=0.5).contains(&num[i])).collect();
        let thresholds = keep.iter().map(|&i| configs[i].h_threshold()).collect();
        let plan = SimulationPlan::new(10_000_000, 7 + k as u64, 4, 2, (0.0, 1.0))
            .unwrap()
            .with_thresholds(thresholds)
            .unwrap();
        let r = run_simulation(&plan, &m).unwrap();
        for (j, &i) in keep.iter().enumerate() {
            let o = r.outage[j];
            worst_z = worst_z.max((o.probability - num[i]).abs() / o.std);
            match outage_series(&m, &configs[i], &SeriesSpec::default()) {
                Ok(s) => worst_rel = worst_rel.max(((s - num[i]) / num[i]).abs()),
                Err(_) => series_ok = false,
            }
            points += 1;
        }
        curves.push(num);
    }
    let increasing = (0..powers.len()).all(|i| curves[0][i] < curves[1][i] && curves[1][i] < curves[2][i]);
    let el = t.elapsed();
    Verdict {
        pass: worst_z <= 3.0 && series_ok && worst_rel <= 0.05 && increasing && within(el, 600.0),
        detail: format!(
            "points={points} max_mc_z={worst_z:.2} max_series_rel={worst_rel:.2e} series_ok={series_ok} increasing_in_z={increasing} time={:.1}s",
            el.as_secs_f64()
        ),
    }
}

fn beam_wander() -> Verdict {
    let t = Instant::now();
    let q = quad();
    let (c, theta, z) = (1e-15, 1e-4, 20e3_f64);
    let g = LinkGeometry::new(z, 0.05, theta).unwrap();
    let flat = AtmosphereModel::new(Cn2Profile::constant(c).unwrap(), 0.0, 0.0, None).unwrap();
    let v = flat.beam_wander_variance(&g, &q).unwrap();
    // ∫₀^Z (Z-h)² h^(-1/3) dh = Z^(8/3) B(2/3, 3), B(2/3, 3) = Γ(2/3)Γ(3)/Γ(11/3)
    let beta = 2.0 / ((2.0 / 3.0) * (5.0 / 3.0) * (8.0 / 3.0));
    let closed = 2.07 * c * (2.0 / theta).powf(1.0 / 3.0) * z.powf(8.0 / 3.0) * beta;
    let rel = ((v - closed) / closed).abs();
    let hv = AtmosphereModel::default();
    let wide = LinkGeometry::new(z, 0.05, 8.0 * theta).unwrap();
    let ratio = hv.beam_wander_variance(&g, &q).unwrap() / hv.beam_wander_variance(&wide, &q).unwrap();
    let scale_err = (ratio - 2.0).abs() / 2.0;
    let el = t.elapsed();
    Verdict {
        pass: rel <= 1e-6 && scale_err <= 1e-6 && within(el, 1.0),
        detail: format!(
            "closed_form_rel={rel:.2e} theta_scaling_rel={scale_err:.2e} time={:.3}s",
            el.as_secs_f64()
        ),
    }
}

fn determinism() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let run = |workers: &str, name: &str| {
        let out = dir.path().join(name);
        let o = Command::new(env!("CARGO_BIN_EXE_fso"))
            .args(["validate", "--seed", "42", "--workers", workers, "--output"])
            .arg(&out)
            .output()
            .unwrap();
        (std::fs::read(&out).unwrap(), o.stdout, o.stderr, o.status.code())
    };
    let a = run("1", "a.csv");
    let b = run("4", "b.csv");
    let same = a == b && !a.0.is_empty() && !a.2.is_empty();
    Verdict {
        pass: same,
        detail: format!(
            "csv_bytes={} summary_identical={} exit_codes={:?}/{:?}",
            a.0.len(),
            a.2 == b.2,
            a.3,
            b.3
        ),
    }
}

fn special_functions() -> Verdict {
    let mut half: f64 = 0.0;
    for i in 0..200 {
        let x = 10f64.powf(-3.0 + 5.0 * i as f64 / 199.0);
        let exact = (PI / (2.0 * x)).sqrt() * (-x).exp();
        if exact > 0.0 {
            half = half.max(((bessel_k(0.5, x).unwrap() - exact) / exact).abs());
        }
    }
    let mut series: f64 = 0.0;
    for x in [0.1, 0.5, 1.0] {
        let direct = bessel_k(2.3, x).unwrap();
        series = series.max(((bessel_k_series(2.3, x, 40).unwrap() - direct) / direct).abs());
    }
    Verdict {
        pass: half <= 1e-12 && series <= 1e-8,
        detail: format!("k_half_rel={half:.2e} series_rel_40_terms={series:.2e}"),
    }
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 7] = [
        ("1 normalization", normalization),
        ("2 pointing-law KS", pointing_law),
        ("3 overlap approximation bound", overlap_bound),
        ("4 outage cross-validation", outage_cross_validation),
        ("5 beam-wander quadrature", beam_wander),
        ("6 determinism", determinism),
        ("7 special functions", special_functions),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let v = f();
        println!("criterion {name}: {} {}", if v.pass { "PASS" } else { "FAIL" }, v.detail);
        if !v.pass {
            failed += 1;
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
