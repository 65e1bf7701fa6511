//! Probability laws of the channel gain.
//!
//! The pointing loss h_p is a mixture of a point mass at full capture, a point
//! mass at zero, and an exponential-type density on `(h_pg1, h_pg2)` obtained
//! from the linearised overlap area under a Rayleigh-distributed beam offset.
//! Turbulence multiplies by a unit-mean Gamma-Gamma variate and attenuation by
//! a constant, giving the composite law of `h = h_a h_t h_p`.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Gamma, Normal};
use serde::{Deserialize, Serialize};

use crate::atmosphere::GammaGammaParams;
use crate::error::{Error, Result};
use crate::geometry::{LinkGeometry, OverlapModel};
use crate::special::{integrate, integrate_to_infinity, ln_bessel_k, ln_gamma, QuadratureSpec};

/// Per-axis Gaussian spreads of the receiver wobble and the beam wander.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointingStats {
    sigma_l: f64,
    sigma_b: f64,
}

impl PointingStats {
    /// Standard deviations in metres; at least one must be positive.
    pub fn new(sigma_l: f64, sigma_b: f64) -> Result<Self> {
        for (name, v) in [("sigma_l", sigma_l), ("sigma_b", sigma_b)] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::invalid(name, format!("must be finite and ≥ 0, got {v}")));
            }
        }
        if sigma_l == 0.0 && sigma_b == 0.0 {
            return Err(Error::invalid("sigma_r", "combined pointing spread must be > 0"));
        }
        Ok(PointingStats { sigma_l, sigma_b })
    }

    pub fn sigma_l(&self) -> f64 {
        self.sigma_l
    }

    pub fn sigma_b(&self) -> f64 {
        self.sigma_b
    }

    /// σ_r² = σ_l² + σ_b².
    pub fn sigma_r_squared(&self) -> f64 {
        self.sigma_l * self.sigma_l + self.sigma_b * self.sigma_b
    }

    pub fn sigma_r(&self) -> f64 {
        self.sigma_r_squared().sqrt()
    }

    /// Rayleigh density of the radial offset s_d.
    pub fn rayleigh_pdf(&self, offset: f64) -> f64 {
        if offset < 0.0 {
            return 0.0;
        }
        let v = self.sigma_r_squared();
        offset / v * (-offset * offset / (2.0 * v)).exp()
    }
}

/// Law of the pointing coefficient h_p.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointingMixture {
    /// Location 2πC₁ of the full-capture atom.
    pub full_value: f64,
    pub full_weight: f64,
    pub zero_weight: f64,
    pub continuous_weight: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    /// Lower edge h_pg1 of the continuous part.
    pub lower: f64,
    /// Upper edge h_pg2 of the continuous part.
    pub upper: f64,
    sigma_r_squared: f64,
}

impl PointingMixture {
    pub fn new(geometry: &LinkGeometry, stats: &PointingStats) -> Result<Self> {
        let r = geometry.aperture_radius();
        let w = geometry.beam_radius();
        let var = stats.sigma_r_squared();
        if !(var > 0.0) {
            return Err(Error::invalid("sigma_r", "must be > 0"));
        }
        // C₁ = r_a² / (4π(1 - cos(θ/2)) Z²) = collected fraction / 2π
        let fraction = geometry.collected_power_fraction();
        let c1 = fraction / (2.0 * PI);
        let c2 = c1 / (w * r);
        let c3 = c2 * (PI * w * r - r * r + w * w);
        let lower = c1 * (PI - (2.0 * r * r + 2.0 * r * w) / (w * r));
        let upper = c1 * (PI - (2.0 * r * r - 2.0 * r * w) / (w * r));
        if !(lower > 0.0) {
            return Err(Error::invalid(
                "divergence_angle",
                format!(
                    "w_z / r_a = {} leaves the partial-overlap density without positive support (h_pg1 = {lower:e})",
                    w / r
                ),
            ));
        }
        let inner = (w - r) * (w - r) / (2.0 * var);
        let outer = (w + r) * (w + r) / (2.0 * var);
        Ok(PointingMixture {
            full_value: fraction,
            full_weight: -(-inner).exp_m1(),
            zero_weight: (-outer).exp(),
            continuous_weight: (-inner).exp() - (-outer).exp(),
            c1,
            c2,
            c3,
            lower,
            upper,
            sigma_r_squared: var,
        })
    }

    fn scale(&self) -> f64 {
        2.0 * self.c2 * self.sigma_r_squared
    }

    /// (1 / (2C₂σ_r²)) exp((h_p - C₃) / (2C₂σ_r²)) on `(h_pg1, h_pg2)`, zero elsewhere.
    pub fn continuous_density(&self, hp: f64) -> f64 {
        if hp <= self.lower || hp >= self.upper {
            return 0.0;
        }
        let k = self.scale();
        ((hp - self.c3) / k).exp() / k
    }

    /// Mass of the continuous part below `hp`.
    fn continuous_cdf(&self, hp: f64) -> f64 {
        if hp <= self.lower {
            return 0.0;
        }
        let k = self.scale();
        let top = hp.min(self.upper);
        ((top - self.c3) / k).exp() - ((self.lower - self.c3) / k).exp()
    }

    /// P(h_p ≤ hp).
    pub fn cdf(&self, hp: f64) -> f64 {
        if hp < 0.0 {
            return 0.0;
        }
        let mut f = self.zero_weight + self.continuous_cdf(hp);
        if hp >= self.full_value {
            f += self.full_weight;
        }
        f.min(1.0)
    }
}

/// Turbulence model multiplying the pointing loss.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Turbulence {
    GammaGamma(GammaGammaParams),
    /// h_t ≡ 1.
    None,
}

/// Gamma-Gamma density of unit mean, with its normalisation cached.
#[derive(Debug, Clone, Copy)]
struct GammaGammaLaw {
    params: GammaGammaParams,
    ln_norm: f64,
}

impl GammaGammaLaw {
    fn new(params: GammaGammaParams) -> Result<Self> {
        let (a, b) = (params.alpha(), params.beta());
        let ln_norm = std::f64::consts::LN_2 + 0.5 * (a + b) * (a * b).ln() - ln_gamma(a)? - ln_gamma(b)?;
        Ok(GammaGammaLaw { params, ln_norm })
    }

    fn pdf(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::domain("gamma_gamma_pdf", format!("requires h_t > 0, got {t}")));
        }
        if t.is_infinite() {
            return Ok(0.0);
        }
        let (a, b) = (self.params.alpha(), self.params.beta());
        let arg = 2.0 * (a * b * t).sqrt();
        let ln_k = ln_bessel_k(a - b, arg)?;
        Ok((self.ln_norm + (0.5 * (a + b) - 1.0) * t.ln() + ln_k).exp())
    }

    /// h_t → 0⁺ limit of the density.
    fn pdf_at_zero(&self) -> f64 {
        let (a, b) = (self.params.alpha(), self.params.beta());
        if b > 1.0 {
            0.0
        } else if b < 1.0 || a <= 1.0 {
            f64::INFINITY
        } else {
            a / (a - 1.0)
        }
    }

    fn cdf(&self, x: f64, quad: &QuadratureSpec) -> Result<f64> {
        if x <= 0.0 {
            return Ok(0.0);
        }
        if x.is_infinite() {
            return Ok(1.0);
        }
        let f = |t: f64| self.pdf(t).unwrap_or(0.0);
        let v = if x <= 1.0 {
            integrate(f, 0.0, x, quad)?
        } else {
            1.0 - integrate_to_infinity(f, x, quad)?
        };
        Ok(v.clamp(0.0, 1.0))
    }
}

/// Gamma-Gamma density of the unit-mean turbulence factor.
pub fn gamma_gamma_pdf(params: &GammaGammaParams, h_t: f64) -> Result<f64> {
    GammaGammaLaw::new(*params)?.pdf(h_t)
}

/// P(h_t ≤ x) by quadrature of [`gamma_gamma_pdf`].
pub fn gamma_gamma_cdf(params: &GammaGammaParams, x: f64, quad: &QuadratureSpec) -> Result<f64> {
    GammaGammaLaw::new(*params)?.cdf(x, quad)
}

/// Value of the composite law at a point: a point mass (non-zero only at an
/// atom location) and a density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelDensity {
    pub point_mass: f64,
    pub density: f64,
}

/// One Monte-Carlo draw of the channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelSample {
    pub attenuation: f64,
    pub turbulence: f64,
    pub pointing: f64,
    pub gain: f64,
    /// Radial offset between beam and aperture centres (m).
    pub offset: f64,
}

/// Composite channel h = h_a h_t h_p.
#[derive(Debug, Clone)]
pub struct ChannelModel {
    geometry: LinkGeometry,
    stats: PointingStats,
    turbulence: Turbulence,
    attenuation: f64,
    mixture: PointingMixture,
    law: Option<GammaGammaLaw>,
}

impl ChannelModel {
    /// `attenuation` is the Beer–Lambert factor h_a ∈ (0, 1].
    pub fn new(
        geometry: LinkGeometry,
        stats: PointingStats,
        turbulence: Turbulence,
        attenuation: f64,
    ) -> Result<Self> {
        if !(attenuation > 0.0 && attenuation <= 1.0) {
            return Err(Error::invalid(
                "attenuation",
                format!("h_a must lie in (0, 1], got {attenuation}"),
            ));
        }
        let mixture = PointingMixture::new(&geometry, &stats)?;
        let law = match turbulence {
            Turbulence::GammaGamma(p) => Some(GammaGammaLaw::new(p)?),
            Turbulence::None => None,
        };
        Ok(ChannelModel {
            geometry,
            stats,
            turbulence,
            attenuation,
            mixture,
            law,
        })
    }

    pub fn geometry(&self) -> &LinkGeometry {
        &self.geometry
    }

    pub fn pointing_stats(&self) -> &PointingStats {
        &self.stats
    }

    pub fn turbulence(&self) -> Turbulence {
        self.turbulence
    }

    pub fn attenuation(&self) -> f64 {
        self.attenuation
    }

    pub fn mixture(&self) -> &PointingMixture {
        &self.mixture
    }

    /// h_a · 2πC₁, the gain of a fully captured beam at unit turbulence.
    pub fn full_capture_gain(&self) -> f64 {
        self.attenuation * self.mixture.full_value
    }

    /// Weight of the h = 0 atom; a lower bound on any outage probability.
    pub fn outage_floor(&self) -> f64 {
        self.mixture.zero_weight
    }

    /// Density of the composite law at `h ≥ 0`, with point masses reported
    /// separately. At h = 0 the density is the h → 0⁺ limit (+∞ when it diverges).
    pub fn pdf(&self, h: f64, quad: &QuadratureSpec) -> Result<ChannelDensity> {
        if !(h >= 0.0) {
            return Err(Error::domain("channel_pdf", format!("requires h ≥ 0, got {h}")));
        }
        let m = &self.mixture;
        let ha = self.attenuation;
        let point_mass = if h == 0.0 { m.zero_weight } else { 0.0 };
        let law = match &self.law {
            None => {
                let full = if h == self.full_capture_gain() { m.full_weight } else { 0.0 };
                return Ok(ChannelDensity {
                    point_mass: point_mass + full,
                    density: m.continuous_density(h / ha) / ha,
                });
            }
            Some(law) => law,
        };
        let s = self.full_capture_gain();
        if h == 0.0 {
            let limit = law.pdf_at_zero();
            let density = if limit == 0.0 || limit.is_infinite() {
                limit
            } else {
                let smeared = integrate(|u: f64| m.continuous_density(u) / (ha * u), m.lower, m.upper, quad)?;
                limit * (m.full_weight / s + smeared)
            };
            return Ok(ChannelDensity { point_mass, density });
        }
        let full_term = m.full_weight / s * law.pdf(h / s)?;
        let partial_term = if m.continuous_weight > 0.0 {
            let lo = h / (ha * m.upper);
            let hi = h / (ha * m.lower);
            let f = |t: f64| {
                let hp = h / (ha * t);
                m.continuous_density(hp) / (ha * t) * law.pdf(t).unwrap_or(0.0)
            };
            integrate(f, lo, hi, quad)?
        } else {
            0.0
        };
        Ok(ChannelDensity {
            point_mass,
            density: full_term + partial_term,
        })
    }

    /// P(h ≤ x).
    pub fn cdf(&self, x: f64, quad: &QuadratureSpec) -> Result<f64> {
        if x < 0.0 {
            return Ok(0.0);
        }
        let m = &self.mixture;
        let ha = self.attenuation;
        let law = match &self.law {
            None => return Ok(m.cdf(x / ha)),
            Some(law) => law,
        };
        let s = self.full_capture_gain();
        let mut f = m.zero_weight + m.full_weight * law.cdf(x / s, quad)?;
        if m.continuous_weight > 0.0 && x > 0.0 {
            let g = |u: f64| m.continuous_density(u) * law.cdf(x / (ha * u), quad).unwrap_or(f64::NAN);
            f += integrate(g, m.lower, m.upper, quad)?;
        }
        Ok(f.clamp(0.0, 1.0))
    }

    /// Zero-atom weight plus ∫₀^∞ of the density (nested quadrature).
    pub fn total_mass(&self, quad: &QuadratureSpec) -> Result<f64> {
        let m = &self.mixture;
        let s = self.full_capture_gain();
        let dens = |h: f64| self.pdf(h, quad).map(|d| d.density).unwrap_or(f64::NAN);
        match self.law {
            None => {
                let cont = integrate(dens, self.attenuation * m.lower, self.attenuation * m.upper, quad)?;
                Ok(m.zero_weight + m.full_weight + cont)
            }
            Some(_) => {
                let edges = [0.0, 0.25 * s, 0.5 * s, s, 2.0 * s, 4.0 * s];
                let mut total = m.zero_weight;
                for w in edges.windows(2) {
                    total += integrate(dens, w[0], w[1], quad)?;
                }
                total += integrate_to_infinity(dens, edges[edges.len() - 1], quad)?;
                Ok(total)
            }
        }
    }

    pub fn sampler(&self, overlap: OverlapModel) -> ChannelSampler<'_> {
        ChannelSampler::new(self, overlap)
    }

    /// One exact-geometry draw; build a [`ChannelSampler`] for repeated draws.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> ChannelSample {
        self.sampler(OverlapModel::Exact).sample(rng)
    }
}

/// Pre-built distributions for repeated channel draws.
pub struct ChannelSampler<'a> {
    model: &'a ChannelModel,
    overlap: OverlapModel,
    wobble: Normal<f64>,
    wander: Normal<f64>,
    large_scale: Option<Gamma<f64>>,
    small_scale: Option<Gamma<f64>>,
}

impl<'a> ChannelSampler<'a> {
    /// With [`OverlapModel::Approximate`] the draws follow the analytic
    /// mixture law exactly; [`OverlapModel::Exact`] uses the true overlap area.
    pub fn new(model: &'a ChannelModel, overlap: OverlapModel) -> Self {
        let normal = |sd: f64| Normal::new(0.0, sd).expect("validated non-negative spread");
        let (large_scale, small_scale) = match model.turbulence {
            Turbulence::GammaGamma(p) => (
                Some(Gamma::new(p.alpha(), 1.0 / p.alpha()).expect("validated shape")),
                Some(Gamma::new(p.beta(), 1.0 / p.beta()).expect("validated shape")),
            ),
            Turbulence::None => (None, None),
        };
        ChannelSampler {
            model,
            overlap,
            wobble: normal(model.stats.sigma_l),
            wander: normal(model.stats.sigma_b),
            large_scale,
            small_scale,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> ChannelSample {
        let lx = self.wobble.sample(rng);
        let ly = self.wobble.sample(rng);
        let bx = self.wander.sample(rng);
        let by = self.wander.sample(rng);
        let offset = (lx + bx).hypot(ly + by);
        let pointing = self.model.geometry.pointing_coefficient(offset, self.overlap);
        let turbulence = match (&self.large_scale, &self.small_scale) {
            (Some(x), Some(y)) => x.sample(rng) * y.sample(rng),
            _ => 1.0,
        };
        let attenuation = self.model.attenuation;
        ChannelSample {
            attenuation,
            turbulence,
            pointing,
            gain: attenuation * turbulence * pointing,
            offset,
        }
    }
}
