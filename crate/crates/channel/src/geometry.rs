//! Beam footprint at the receiver and the geometric pointing loss.
//!
//! The received beam is modelled as a uniform disk of radius `w_z = θ_div Z / 2`
//! (plane-wave regime); the receiver is a disk of radius `r_a` with `r_a < w_z`.
//! Incidence is taken as orthogonal.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which overlap-area formula feeds the partial-capture branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OverlapModel {
    /// Circle–circle intersection area.
    Exact,
    /// Large-footprint linearisation, clamped to `[0, π r_a²]`.
    Approximate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkGeometry {
    link_length: f64,
    aperture_radius: f64,
    divergence_angle: f64,
    beam_radius: f64,
}

impl LinkGeometry {
    /// `link_length` and `aperture_radius` in metres, `divergence_angle` the
    /// full cone angle in radians.
    pub fn new(link_length: f64, aperture_radius: f64, divergence_angle: f64) -> Result<Self> {
        if !(link_length > 0.0) || !link_length.is_finite() {
            return Err(Error::invalid("link_length", format!("must be > 0, got {link_length}")));
        }
        if !(aperture_radius > 0.0) || !aperture_radius.is_finite() {
            return Err(Error::invalid(
                "aperture_radius",
                format!("must be > 0, got {aperture_radius}"),
            ));
        }
        if !(divergence_angle > 0.0 && divergence_angle < PI) {
            return Err(Error::invalid(
                "divergence_angle",
                format!("must lie in (0, π), got {divergence_angle}"),
            ));
        }
        if link_length <= 100.0 * aperture_radius {
            return Err(Error::invalid(
                "link_length",
                format!("far-field model needs Z > 100 r_a (Z = {link_length}, r_a = {aperture_radius})"),
            ));
        }
        let beam_radius = divergence_angle * link_length / 2.0;
        if beam_radius <= aperture_radius {
            return Err(Error::invalid(
                "divergence_angle",
                format!("footprint radius {beam_radius} m must exceed the aperture radius {aperture_radius} m"),
            ));
        }
        let g = LinkGeometry {
            link_length,
            aperture_radius,
            divergence_angle,
            beam_radius,
        };
        let fraction = g.collected_power_fraction();
        if fraction > 1.0 {
            return Err(Error::invalid(
                "aperture_radius",
                format!("collected power fraction {fraction} exceeds 1"),
            ));
        }
        Ok(g)
    }

    pub fn link_length(&self) -> f64 {
        self.link_length
    }

    pub fn aperture_radius(&self) -> f64 {
        self.aperture_radius
    }

    pub fn divergence_angle(&self) -> f64 {
        self.divergence_angle
    }

    /// Footprint radius `w_z`.
    pub fn beam_radius(&self) -> f64 {
        self.beam_radius
    }

    pub fn aperture_area(&self) -> f64 {
        PI * self.aperture_radius * self.aperture_radius
    }

    /// 1 - cos(θ_div/2), written as 2 sin²(θ_div/4) to avoid cancellation at
    /// milliradian angles.
    fn one_minus_cos_half_angle(&self) -> f64 {
        let s = (self.divergence_angle / 4.0).sin();
        2.0 * s * s
    }

    /// Ω_s = 2π(1 - cos(θ_div/2)), in steradians.
    pub fn solid_angle(&self) -> f64 {
        2.0 * PI * self.one_minus_cos_half_angle()
    }

    /// `Ω_s Z²`: converts a collecting area into a fraction of transmitted power.
    fn area_normaliser(&self) -> f64 {
        self.solid_angle() * self.link_length * self.link_length
    }

    /// P_r / P_t for a centred aperture: r_a² / (2(1 - cos(θ_div/2)) Z²).
    pub fn collected_power_fraction(&self) -> f64 {
        self.aperture_area() / self.area_normaliser()
    }

    /// Lower and upper edge of the partial-overlap band `[w_z - r_a, w_z + r_a]`.
    pub fn overlap_band(&self) -> (f64, f64) {
        (
            self.beam_radius - self.aperture_radius,
            self.beam_radius + self.aperture_radius,
        )
    }

    fn check_band(&self, function: &'static str, offset: f64) -> Result<()> {
        let (lo, hi) = self.overlap_band();
        let slack = 1e-12 * hi;
        if !(offset > 0.0) || offset < lo - slack || offset > hi + slack {
            return Err(Error::domain(
                function,
                format!("offset {offset} m outside the overlap band [{lo}, {hi}]"),
            ));
        }
        Ok(())
    }

    /// Circle–circle intersection area for centre separation `offset`.
    pub fn overlap_area_exact(&self, offset: f64) -> Result<f64> {
        self.check_band("overlap_area_exact", offset)?;
        Ok(self.intersection_area(offset))
    }

    fn intersection_area(&self, s: f64) -> f64 {
        let r = self.aperture_radius;
        let w = self.beam_radius;
        let kite = ((-s + r + w) * (s + r - w) * (s - r + w) * (s + r + w)).max(0.0).sqrt();
        // half-angles subtended at each centre
        let alpha_r = kite.atan2(s * s + r * r - w * w);
        let alpha_w = kite.atan2(s * s + w * w - r * r);
        let area = r * r * alpha_r + w * w * alpha_w - 0.5 * kite;
        area.clamp(0.0, PI * r * r)
    }

    /// r_a² (π/2 - (s² + r_a² - w_z²) / (2 w_z r_a)), clamped to `[0, π r_a²]`.
    pub fn overlap_area_approx(&self, offset: f64) -> Result<f64> {
        self.check_band("overlap_area_approx", offset)?;
        Ok(self.approx_area(offset))
    }

    fn approx_area(&self, s: f64) -> f64 {
        let r = self.aperture_radius;
        let w = self.beam_radius;
        let a = r * r * (PI / 2.0 - (s * s + r * r - w * w) / (2.0 * w * r));
        a.clamp(0.0, PI * r * r)
    }

    /// Effective pointing coefficient h_p at centre offset `offset` (metres).
    pub fn pointing_coefficient(&self, offset: f64, model: OverlapModel) -> f64 {
        let (lo, hi) = self.overlap_band();
        if offset <= lo {
            self.collected_power_fraction()
        } else if offset >= hi {
            0.0
        } else {
            let area = match model {
                OverlapModel::Exact => self.intersection_area(offset),
                OverlapModel::Approximate => self.approx_area(offset),
            };
            area / self.area_normaliser()
        }
    }
}
