//! Turbulence profile, beam-wander variance and Beer–Lambert attenuation.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::LinkGeometry;
use crate::special::{integrate, QuadratureSpec};

/// Refractive-index structure parameter C_n²(h) in m^(-2/3) versus altitude.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Cn2Profile {
    /// Hufnagel–Valley model with rms upper-altitude wind speed (m/s) and
    /// ground-level C_n².
    HufnagelValley { wind_rms: f64, ground_cn2: f64 },
    /// Piecewise-linear table; held constant beyond the first and last rows.
    Table { altitudes: Vec<f64>, values: Vec<f64> },
    Constant { value: f64 },
}

impl Default for Cn2Profile {
    fn default() -> Self {
        Cn2Profile::hv57()
    }
}

impl Cn2Profile {
    /// HV5/7: 21 m/s rms wind, 1.7e-14 m^(-2/3) at the ground.
    pub fn hv57() -> Self {
        Cn2Profile::HufnagelValley {
            wind_rms: 21.0,
            ground_cn2: 1.7e-14,
        }
    }

    pub fn constant(value: f64) -> Result<Self> {
        let p = Cn2Profile::Constant { value };
        p.validate()?;
        Ok(p)
    }

    pub fn table(altitudes: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let p = Cn2Profile::Table { altitudes, values };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let nonneg = |name: &'static str, v: f64| {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(Error::invalid(name, format!("must be finite and ≥ 0, got {v}")))
            }
        };
        match self {
            Cn2Profile::HufnagelValley {
                wind_rms,
                ground_cn2,
            } => {
                nonneg("wind_rms", *wind_rms)?;
                nonneg("ground_cn2", *ground_cn2)
            }
            Cn2Profile::Constant { value } => nonneg("cn2", *value),
            Cn2Profile::Table { altitudes, values } => {
                if altitudes.is_empty() || altitudes.len() != values.len() {
                    return Err(Error::invalid(
                        "cn2_table",
                        format!(
                            "needs matching non-empty columns ({} altitudes, {} values)",
                            altitudes.len(),
                            values.len()
                        ),
                    ));
                }
                for &v in values {
                    nonneg("cn2_table", v)?;
                }
                for &h in altitudes {
                    if !h.is_finite() {
                        return Err(Error::invalid("cn2_table", "altitudes must be finite"));
                    }
                }
                if altitudes.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::invalid("cn2_table", "altitudes must be strictly increasing"));
                }
                Ok(())
            }
        }
    }

    /// C_n² at altitude `h` metres.
    pub fn at(&self, h: f64) -> f64 {
        match self {
            Cn2Profile::HufnagelValley {
                wind_rms,
                ground_cn2,
            } => {
                let v = wind_rms / 27.0;
                0.00594 * v * v * (1e-5 * h).powi(10) * (-h / 1000.0).exp()
                    + 2.7e-16 * (-h / 1500.0).exp()
                    + ground_cn2 * (-h / 100.0).exp()
            }
            Cn2Profile::Constant { value } => *value,
            Cn2Profile::Table { altitudes, values } => {
                let i = altitudes.partition_point(|&a| a <= h);
                if i == 0 {
                    values[0]
                } else if i == altitudes.len() {
                    values[values.len() - 1]
                } else {
                    let (h0, h1) = (altitudes[i - 1], altitudes[i]);
                    let t = (h - h0) / (h1 - h0);
                    values[i - 1] + t * (values[i] - values[i - 1])
                }
            }
        }
    }

    /// Altitudes where the profile changes character; integration is split there.
    fn breakpoints(&self) -> Vec<f64> {
        match self {
            Cn2Profile::HufnagelValley { .. } => vec![10.0, 100.0, 1_000.0, 3_000.0, 10_000.0, 20_000.0],
            Cn2Profile::Constant { .. } => Vec::new(),
            Cn2Profile::Table { altitudes, .. } => altitudes.clone(),
        }
    }

    /// Parses a two-column `altitude_m cn2` table. Blank lines and lines
    /// starting with `#` are skipped; columns may be separated by whitespace
    /// or a comma.
    pub fn parse_table(text: &str) -> Result<Self> {
        let mut altitudes = Vec::new();
        let mut values = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = trimmed
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|c| !c.is_empty())
                .collect();
            if cols.len() != 2 {
                return Err(Error::Parse {
                    line,
                    message: format!("expected 2 columns, found {}", cols.len()),
                });
            }
            let parse = |s: &str| -> Result<f64> {
                let v: f64 = s.parse().map_err(|_| Error::Parse {
                    line,
                    message: format!("`{s}` is not a number"),
                })?;
                if !v.is_finite() {
                    return Err(Error::Parse {
                        line,
                        message: format!("`{s}` is not finite"),
                    });
                }
                Ok(v)
            };
            let h = parse(cols[0])?;
            let c = parse(cols[1])?;
            if c < 0.0 {
                return Err(Error::Parse {
                    line,
                    message: format!("negative C_n² {c}"),
                });
            }
            if let Some(&last) = altitudes.last() {
                if h <= last {
                    return Err(Error::Parse {
                        line,
                        message: format!("altitude {h} does not increase (previous {last})"),
                    });
                }
            }
            altitudes.push(h);
            values.push(c);
        }
        if altitudes.is_empty() {
            return Err(Error::Parse {
                line: 0,
                message: "table has no data rows".into(),
            });
        }
        Ok(Cn2Profile::Table { altitudes, values })
    }

    pub fn load_table(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse_table(&text)
    }
}

/// Converts an attenuation in dB/km to a natural-log coefficient in 1/m.
pub fn db_per_km_to_per_m(db_per_km: f64) -> f64 {
    db_per_km * std::f64::consts::LN_10 / 10.0 / 1000.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtmosphereModel {
    pub cn2: Cn2Profile,
    /// Beer–Lambert coefficient ξ in 1/m.
    pub attenuation_coefficient: f64,
    /// Transmitter altitude h₀ (m).
    pub transmitter_altitude: f64,
    /// Upper limit H of the beam-wander integral; `None` means the link length.
    pub receiver_altitude: Option<f64>,
}

impl Default for AtmosphereModel {
    fn default() -> Self {
        AtmosphereModel {
            cn2: Cn2Profile::hv57(),
            attenuation_coefficient: db_per_km_to_per_m(0.1),
            transmitter_altitude: 1.0,
            receiver_altitude: None,
        }
    }
}

impl AtmosphereModel {
    pub fn new(
        cn2: Cn2Profile,
        attenuation_coefficient: f64,
        transmitter_altitude: f64,
        receiver_altitude: Option<f64>,
    ) -> Result<Self> {
        let m = AtmosphereModel {
            cn2,
            attenuation_coefficient,
            transmitter_altitude,
            receiver_altitude,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        self.cn2.validate()?;
        if !(self.attenuation_coefficient >= 0.0) || !self.attenuation_coefficient.is_finite() {
            return Err(Error::invalid(
                "attenuation_coefficient",
                format!("must be finite and ≥ 0, got {}", self.attenuation_coefficient),
            ));
        }
        if !(self.transmitter_altitude >= 0.0) || !self.transmitter_altitude.is_finite() {
            return Err(Error::invalid("transmitter_altitude", "must be finite and ≥ 0"));
        }
        if let Some(h) = self.receiver_altitude {
            if !(h > self.transmitter_altitude) || !h.is_finite() {
                return Err(Error::invalid(
                    "receiver_altitude",
                    format!("must exceed the transmitter altitude {}", self.transmitter_altitude),
                ));
            }
        }
        Ok(())
    }

    /// h_a = exp(-Z ξ).
    pub fn attenuation_loss(&self, link_length: f64) -> f64 {
        (-link_length * self.attenuation_coefficient).exp()
    }

    /// σ_b² = 2.07 ∫_{h₀}^{H} C_n²(h) (Z - h)² (h θ_div / 2)^(-1/3) dh, in m².
    pub fn beam_wander_variance(&self, geometry: &LinkGeometry, quad: &QuadratureSpec) -> Result<f64> {
        self.validate()?;
        let z = geometry.link_length();
        let theta = geometry.divergence_angle();
        let h0 = self.transmitter_altitude;
        let top = self.receiver_altitude.unwrap_or(z);
        if top > z {
            return Err(Error::invalid(
                "receiver_altitude",
                format!("upper limit {top} m exceeds the link length {z} m"),
            ));
        }
        if h0 >= top {
            return Err(Error::invalid(
                "transmitter_altitude",
                format!("{h0} m is not below the upper limit {top} m"),
            ));
        }
        let integrand = |h: f64| {
            let beam = h * theta / 2.0;
            self.cn2.at(h) * (z - h) * (z - h) * beam.powf(-1.0 / 3.0)
        };
        let mut edges = vec![h0];
        edges.extend(self.cn2.breakpoints().into_iter().filter(|&b| b > h0 && b < top));
        edges.push(top);
        let mut total = 0.0;
        for pair in edges.windows(2) {
            total += integrate(integrand, pair[0], pair[1], quad)?;
        }
        Ok(2.07 * total)
    }
}

/// Gamma-Gamma shape parameters: α (large-scale) and β (small-scale) eddies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaGammaParams {
    alpha: f64,
    beta: f64,
}

impl GammaGammaParams {
    /// Requires α ≥ β > 0.
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(Error::invalid("beta", format!("must be finite and > 0, got {beta}")));
        }
        if !(alpha >= beta) || !alpha.is_finite() {
            return Err(Error::invalid(
                "alpha",
                format!("must be finite and ≥ beta = {beta}, got {alpha}"),
            ));
        }
        Ok(GammaGammaParams { alpha, beta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Bessel order α - β of the density.
    pub fn order(&self) -> f64 {
        self.alpha - self.beta
    }

    /// Var[h_t] = 1/α + 1/β + 1/(αβ).
    pub fn scintillation_index(&self) -> f64 {
        1.0 / self.alpha + 1.0 / self.beta + 1.0 / (self.alpha * self.beta)
    }
}
