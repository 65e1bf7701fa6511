//! Scenario files: TOML with one table per model component. Every key has a
//! built-in default, so an empty file describes the 20 km / 0.2 mrad link.

use std::path::{Path, PathBuf};

use fso_channel::atmosphere::db_per_km_to_per_m;
use fso_channel::{
    AtmosphereModel, ChannelModel, Cn2Profile, Error, GammaGammaParams, LinkGeometry, PointingStats,
    QuadratureSpec, Result, SnrConfig, Turbulence,
};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    pub geometry: GeometryConfig,
    pub pointing: PointingConfig,
    pub turbulence: TurbulenceConfig,
    pub atmosphere: AtmosphereConfig,
    pub snr: SnrSection,
    pub quadrature: QuadratureConfig,
    pub metadata: Metadata,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GeometryConfig {
    pub link_length_m: f64,
    pub aperture_radius_m: f64,
    /// Full divergence angle.
    pub divergence_rad: f64,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        GeometryConfig {
            link_length_m: 20e3,
            aperture_radius_m: 0.05,
            divergence_rad: 2e-4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PointingConfig {
    /// Per-axis receiver wobble.
    pub sigma_l_m: f64,
    /// Per-axis beam wander; computed from the Cn² profile when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma_b_m: Option<f64>,
}

impl Default for PointingConfig {
    fn default() -> Self {
        PointingConfig {
            sigma_l_m: 0.4,
            sigma_b_m: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TurbulenceKind {
    GammaGamma,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TurbulenceConfig {
    pub model: TurbulenceKind,
    pub alpha: f64,
    pub beta: f64,
}

impl Default for TurbulenceConfig {
    fn default() -> Self {
        TurbulenceConfig {
            model: TurbulenceKind::GammaGamma,
            alpha: 4.0,
            beta: 1.7,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Cn2Config {
    HufnagelValley { wind_rms_m_per_s: f64, ground_cn2: f64 },
    Constant { value: f64 },
    /// Inline `altitudes_m`/`values`, or a two-column file at `path`
    /// (relative to the scenario file).
    Table {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        path: Option<PathBuf>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        altitudes_m: Vec<f64>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        values: Vec<f64>,
    },
}

impl Default for Cn2Config {
    fn default() -> Self {
        Cn2Config::HufnagelValley {
            wind_rms_m_per_s: 21.0,
            ground_cn2: 1.7e-14,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AtmosphereConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub attenuation_db_per_km: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub attenuation_per_m: Option<f64>,
    pub transmitter_altitude_m: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub receiver_altitude_m: Option<f64>,
    pub cn2: Cn2Config,
}

impl Default for AtmosphereConfig {
    fn default() -> Self {
        AtmosphereConfig {
            attenuation_db_per_km: None,
            attenuation_per_m: None,
            transmitter_altitude_m: 1.0,
            receiver_altitude_m: None,
            cn2: Cn2Config::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SnrSection {
    pub responsivity_a_per_w: f64,
    pub transmit_power_w: f64,
    pub noise_variance_a2: f64,
    pub gamma_threshold: f64,
}

impl Default for SnrSection {
    fn default() -> Self {
        SnrSection {
            responsivity_a_per_w: 0.9,
            transmit_power_w: 1e-3,
            noise_variance_a2: 1e-14,
            gamma_threshold: 10.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        let q = QuadratureSpec::default();
        QuadratureConfig {
            abs_tol: q.abs_tol,
            rel_tol: q.rel_tol,
            max_subdivisions: q.max_subdivisions,
        }
    }
}

/// Carried through to outputs; no model equation reads these.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Metadata {
    pub wavelength_m: f64,
    pub bit_rate_bps: f64,
}

impl Default for Metadata {
    fn default() -> Self {
        Metadata {
            wavelength_m: 1550e-9,
            bit_rate_bps: 1e9,
        }
    }
}

/// Built-in scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Preset {
    /// r_a = 5 cm, Z = 20 km, θ = 0.1 mrad (w_z / r_a = 20).
    Beam20,
    /// r_a = 5 cm, Z = 20 km, θ = 0.2 mrad (w_z / r_a = 40).
    Beam40,
    /// r_a = 10 cm, Z = 20 km, θ = 0.2 mrad.
    Outage,
}

impl ScenarioConfig {
    pub fn preset(preset: Preset) -> Self {
        let mut c = ScenarioConfig::default();
        match preset {
            Preset::Beam20 => c.geometry.divergence_rad = 1e-4,
            Preset::Beam40 => {}
            Preset::Outage => {
                c.geometry.aperture_radius_m = 0.1;
                c.geometry.divergence_rad = 2e-4;
            }
        }
        c
    }

    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let line = e
                .span()
                .map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1)
                .unwrap_or(0);
            Error::Parse {
                line,
                message: e.message().to_string(),
            }
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario serialises")
    }

    /// Validates every field through the core constructors. Relative table
    /// paths resolve against `base_dir`.
    pub fn build(&self, base_dir: Option<&Path>) -> Result<Scenario> {
        let g = &self.geometry;
        let geometry = LinkGeometry::new(g.link_length_m, g.aperture_radius_m, g.divergence_rad)?;
        let q = &self.quadrature;
        let quad = QuadratureSpec::new(q.abs_tol, q.rel_tol, q.max_subdivisions)?;

        let a = &self.atmosphere;
        let xi = match (a.attenuation_db_per_km, a.attenuation_per_m) {
            (Some(_), Some(_)) => {
                return Err(Error::InvalidParameter {
                    name: "attenuation",
                    reason: "give attenuation_db_per_km or attenuation_per_m, not both".into(),
                })
            }
            (Some(db), None) => db_per_km_to_per_m(db),
            (None, Some(xi)) => xi,
            (None, None) => db_per_km_to_per_m(0.1),
        };
        let profile = match &a.cn2 {
            Cn2Config::HufnagelValley {
                wind_rms_m_per_s,
                ground_cn2,
            } => Cn2Profile::HufnagelValley {
                wind_rms: *wind_rms_m_per_s,
                ground_cn2: *ground_cn2,
            },
            Cn2Config::Constant { value } => Cn2Profile::constant(*value)?,
            Cn2Config::Table {
                path: Some(p),
                altitudes_m,
                values,
            } => {
                if !altitudes_m.is_empty() || !values.is_empty() {
                    return Err(Error::InvalidParameter {
                        name: "cn2",
                        reason: "a table takes either path or inline rows, not both".into(),
                    });
                }
                let full = match base_dir {
                    Some(d) if p.is_relative() => d.join(p),
                    _ => p.clone(),
                };
                Cn2Profile::load_table(full)?
            }
            Cn2Config::Table {
                path: None,
                altitudes_m,
                values,
            } => Cn2Profile::table(altitudes_m.clone(), values.clone())?,
        };
        let atmosphere = AtmosphereModel::new(profile, xi, a.transmitter_altitude_m, a.receiver_altitude_m)?;

        let (sigma_b, sigma_b_computed) = match self.pointing.sigma_b_m {
            Some(s) => (s, false),
            None => (atmosphere.beam_wander_variance(&geometry, &quad)?.sqrt(), true),
        };
        let stats = PointingStats::new(self.pointing.sigma_l_m, sigma_b)?;
        let t = &self.turbulence;
        let turbulence = match t.model {
            TurbulenceKind::GammaGamma => Turbulence::GammaGamma(GammaGammaParams::new(t.alpha, t.beta)?),
            TurbulenceKind::None => Turbulence::None,
        };
        let s = &self.snr;
        let snr = SnrConfig::new(s.responsivity_a_per_w, s.transmit_power_w, s.noise_variance_a2, s.gamma_threshold)?;
        let model = ChannelModel::new(geometry, stats, turbulence, atmosphere.attenuation_loss(g.link_length_m))?;
        Ok(Scenario {
            config: self.clone(),
            atmosphere,
            sigma_b_computed,
            snr,
            quad,
            model,
        })
    }
}

/// A validated scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub atmosphere: AtmosphereModel,
    /// True when σ_b came from the Cn² profile.
    pub sigma_b_computed: bool,
    pub snr: SnrConfig,
    pub quad: QuadratureSpec,
    pub model: ChannelModel,
}

/// Reads and validates a scenario file.
pub fn load(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path)?;
    ScenarioConfig::parse(&text)?.build(path.parent())
}
