//! Outage probability: SNR mapping, the numerical CDF route, and the truncated
//! Bessel-series closed form.
//!
//! The series integrates the full-capture part of the composite density term
//! by term after expanding `K_{α-β}` in its ascending series. With
//! `x = αβ h_th / (2πC₁h_a)` and `δ = α - β`,
//!
//! ```text
//! P_out ≈ w₀ + w₁ π / (Γ(α)Γ(β) sin πδ) · Σ_n [ x^{n+β} / ((n+β)Γ(n-δ+1)n!)
//!                                              - x^{n+α} / ((n+α)Γ(n+δ+1)n!) ]
//! ```
//!
//! where `w₀` and `w₁` are the zero and full-capture weights. The partial-overlap
//! part is not represented, so the series is an approximation to
//! [`outage_numerical`].

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{ln_gamma, ln_gamma_signed, QuadratureSpec};
use crate::statistics::{ChannelModel, Turbulence};

/// Receiver and threshold parameters; all strictly positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SnrConfig {
    /// Photo-detector responsivity η (A/W).
    pub responsivity: f64,
    /// Average transmitted optical power P_t (W).
    pub transmit_power: f64,
    /// Noise variance σ_n² (A²).
    pub noise_variance: f64,
    /// SNR threshold γ_th (linear).
    pub gamma_threshold: f64,
}

impl SnrConfig {
    pub fn new(responsivity: f64, transmit_power: f64, noise_variance: f64, gamma_threshold: f64) -> Result<Self> {
        let c = SnrConfig {
            responsivity,
            transmit_power,
            noise_variance,
            gamma_threshold,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("responsivity", self.responsivity),
            ("transmit_power", self.transmit_power),
            ("noise_variance", self.noise_variance),
            ("gamma_threshold", self.gamma_threshold),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::invalid(name, format!("must be finite and > 0, got {v}")));
            }
        }
        Ok(())
    }

    pub fn with_transmit_power(&self, transmit_power: f64) -> Result<Self> {
        SnrConfig::new(self.responsivity, transmit_power, self.noise_variance, self.gamma_threshold)
    }

    /// Instantaneous electrical SNR η²P_t²h²/σ_n².
    pub fn snr(&self, h: f64) -> f64 {
        let a = self.responsivity * self.transmit_power * h;
        a * a / self.noise_variance
    }

    /// Channel gain at which the SNR equals γ_th: √(γ_th σ_n²)/(ηP_t).
    pub fn h_threshold(&self) -> f64 {
        (self.gamma_threshold * self.noise_variance).sqrt() / (self.responsivity * self.transmit_power)
    }
}

/// Truncation control for [`outage_series`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesSpec {
    pub max_terms: usize,
    pub tail_tol: f64,
}

impl Default for SeriesSpec {
    fn default() -> Self {
        SeriesSpec {
            max_terms: 60,
            tail_tol: 1e-12,
        }
    }
}

impl SeriesSpec {
    pub fn validate(&self) -> Result<()> {
        if self.max_terms == 0 {
            return Err(Error::invalid("max_terms", "must be ≥ 1"));
        }
        if !(self.tail_tol > 0.0) {
            return Err(Error::invalid("tail_tol", format!("must be > 0, got {}", self.tail_tol)));
        }
        Ok(())
    }
}

/// P(γ < γ_th) = P(h ≤ h_th), including the h = 0 atom.
pub fn outage_numerical(model: &ChannelModel, config: &SnrConfig, quad: &QuadratureSpec) -> Result<f64> {
    config.validate()?;
    model.cdf(config.h_threshold(), quad)
}

/// Weighted summands of the series, one per n, before adding the zero atom.
pub fn outage_series_terms(model: &ChannelModel, config: &SnrConfig, series: &SeriesSpec) -> Result<Vec<f64>> {
    config.validate()?;
    series.validate()?;
    let params = match model.turbulence() {
        Turbulence::GammaGamma(p) => p,
        Turbulence::None => {
            return Err(Error::invalid("turbulence", "the outage series needs Gamma-Gamma turbulence"));
        }
    };
    let (a, b) = (params.alpha(), params.beta());
    let delta = a - b;
    let sin = (PI * delta).sin();
    if sin.abs() < 1e-9 {
        return Err(Error::SeriesSingular { order: delta });
    }
    let x = a * b * config.h_threshold() / model.full_capture_gain();
    if x == 0.0 {
        return Ok(vec![0.0]);
    }
    let lx = x.ln();
    let ln_scale = (model.mixture().full_weight * PI).ln() - ln_gamma(a)? - ln_gamma(b)?;
    let sign_scale = sin.signum();
    let ln_sin = sin.abs().ln();

    let mut terms = Vec::with_capacity(series.max_terms);
    let mut ln_fact = 0.0;
    for n in 0..series.max_terms {
        let nf = n as f64;
        if n > 0 {
            ln_fact += nf.ln();
        }
        let (lg1, s1) = ln_gamma_signed(nf - delta + 1.0)?;
        let first = s1 * (ln_scale - ln_sin + (nf + b) * lx - (nf + b).ln() - lg1 - ln_fact).exp();
        let lg2 = ln_gamma(nf + delta + 1.0)?;
        let second = (ln_scale - ln_sin + (nf + a) * lx - (nf + a).ln() - lg2 - ln_fact).exp();
        let t = sign_scale * (first - second);
        terms.push(t);
        if t.abs() < series.tail_tol && nf * nf > x {
            break;
        }
    }
    Ok(terms)
}

/// Truncated series outage with the zero atom added back, clamped to [0, 1].
pub fn outage_series(model: &ChannelModel, config: &SnrConfig, series: &SeriesSpec) -> Result<f64> {
    let terms = outage_series_terms(model, config, series)?;
    let last = terms[terms.len() - 1].abs();
    if terms.len() == series.max_terms && last >= series.tail_tol {
        let before = if terms.len() > 1 { terms[terms.len() - 2].abs() } else { 0.0 };
        if last > before {
            return Err(Error::SeriesDivergent {
                reason: format!(
                    "terms still growing after {} terms (|t| = {last:e})",
                    terms.len()
                ),
            });
        }
    }
    let sum: f64 = terms.iter().sum();
    let peak = terms.iter().fold(0.0_f64, |m, t| m.max(t.abs()));
    if peak > 1e8 * sum.abs().max(f64::MIN_POSITIVE) {
        return Err(Error::SeriesDivergent {
            reason: format!(
                "cancellation between terms of size {peak:e} leaves no significant digits"
            ),
        });
    }
    Ok((model.outage_floor() + sum).clamp(0.0, 1.0))
}

/// Transmit power at which the numerical outage equals `target`, by bisection
/// in log P_t. `bracket` is (low, high) in watts.
pub fn required_power(
    model: &ChannelModel,
    config: &SnrConfig,
    target: f64,
    bracket: (f64, f64),
    quad: &QuadratureSpec,
) -> Result<f64> {
    let floor = model.outage_floor();
    if !(target < 1.0) {
        return Err(Error::invalid("target_outage", format!("must be < 1, got {target}")));
    }
    if target <= floor {
        return Err(Error::BelowOutageFloor { target, floor });
    }
    let (low, high) = bracket;
    if !(low > 0.0 && high > low && high.is_finite()) {
        return Err(Error::invalid("bracket", format!("need 0 < low < high, got ({low}, {high})")));
    }
    let p_at = |pt: f64| -> Result<f64> { outage_numerical(model, &config.with_transmit_power(pt)?, quad) };
    let (p_low, p_high) = (p_at(low)?, p_at(high)?);
    if !(p_low >= target && p_high <= target) {
        return Err(Error::BracketMismatch {
            low,
            high,
            outage_low: p_low,
            outage_high: p_high,
            target,
        });
    }
    let (mut lo, mut hi) = (low.ln(), high.ln());
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let p = p_at(mid.exp())?;
        if ((p - target) / target).abs() < 1e-4 || hi - lo < 1e-14 {
            return Ok(mid.exp());
        }
        if p > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((0.5 * (lo + hi)).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atmosphere::GammaGammaParams;
    use crate::geometry::LinkGeometry;
    use crate::statistics::PointingStats;

    fn config(pt: f64) -> SnrConfig {
        SnrConfig::new(0.9, pt, 1e-14, 10.0).unwrap()
    }

    fn model(z: f64) -> ChannelModel {
        let g = LinkGeometry::new(z, 0.1, 2e-4).unwrap();
        ChannelModel::new(
            g,
            PointingStats::new(0.4, 0.0955).unwrap(),
            Turbulence::GammaGamma(GammaGammaParams::new(4.0, 1.7).unwrap()),
            0.63,
        )
        .unwrap()
    }

    #[test]
    fn snr_mapping() {
        let c = config(1.0);
        assert_eq!(c.snr(0.0), 0.0);
        assert!((c.snr(2e-6) / c.snr(1e-6) - 4.0).abs() < 1e-15);
        // 0.81 · 1e-12 / 1e-14
        assert!((c.snr(1e-6) - 81.0).abs() < 1e-12);
        assert!((c.snr(c.h_threshold()) - 10.0).abs() < 1e-12);
        assert!(SnrConfig::new(0.0, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn outage_limits() {
        let m = model(20e3);
        let q = QuadratureSpec::default();
        let high = outage_numerical(&m, &config(1e6), &q).unwrap();
        assert!((high - m.outage_floor()).abs() < 1e-9);
        let low = outage_numerical(&m, &config(1e-12), &q).unwrap();
        assert!((low - 1.0).abs() < 1e-9);
    }

    #[test]
    fn series_vanishes_at_zero_threshold() {
        let m = model(20e3);
        let v = outage_series(&m, &config(1e9), &SeriesSpec::default()).unwrap();
        assert!((v - m.outage_floor()).abs() < 1e-9);
    }

    #[test]
    fn series_singular_for_integer_order() {
        let g = LinkGeometry::new(20e3, 0.1, 2e-4).unwrap();
        let m = ChannelModel::new(
            g,
            PointingStats::new(0.4, 0.1).unwrap(),
            Turbulence::GammaGamma(GammaGammaParams::new(4.0, 2.0).unwrap()),
            0.63,
        )
        .unwrap();
        assert!(matches!(
            outage_series(&m, &config(1.0), &SeriesSpec::default()),
            Err(Error::SeriesSingular { .. })
        ));
    }

    #[test]
    fn series_reports_divergence_at_large_argument() {
        let m = model(20e3);
        let r = outage_series(&m, &config(1e-9), &SeriesSpec::default());
        assert!(matches!(r, Err(Error::SeriesDivergent { .. })), "{r:?}");
    }

    #[test]
    fn power_and_threshold_scaling_are_equivalent() {
        let m = model(20e3);
        let q = QuadratureSpec::default();
        let k = 3.0;
        let a = outage_numerical(&m, &SnrConfig::new(0.9, 0.01 / k, 1e-14, 10.0).unwrap(), &q).unwrap();
        let b = outage_numerical(&m, &SnrConfig::new(0.9, 0.01, 1e-14, 10.0 * k * k).unwrap(), &q).unwrap();
        assert!((a - b).abs() <= 1e-14 * a, "{a} {b}");
    }

    #[test]
    fn required_power_errors() {
        let m = model(20e3);
        let q = QuadratureSpec::default();
        let floor = m.outage_floor();
        assert!(matches!(
            required_power(&m, &config(1.0), floor * 0.5, (1e-6, 1.0), &q),
            Err(Error::BelowOutageFloor { .. })
        ));
        assert!(matches!(
            required_power(&m, &config(1.0), 0.5, (10.0, 100.0), &q),
            Err(Error::BracketMismatch { .. })
        ));
    }
}
