//! JSON run configuration: a flat object of named fields, all optional,
//! defaulting to the typical blue-LED link values. Unknown fields are
//! rejected so typos fail loudly.

use serde::Deserialize;
use std::path::Path;
use thiserror::Error;
use vlceq::circuits::LedParams;
use vlceq::linkmodel::{GainConvention, IntegrationControl, LinkConfig};
use vlceq::optimizer::GridSpec;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("cannot parse config {path}: {source}")]
    Parse {
        path: String,
        source: serde_json::Error,
    },
    #[error("invalid configuration: {}", violations.join("; "))]
    Invalid { violations: Vec<String> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GainConventionField {
    Power,
    Amplitude,
}

impl From<GainConventionField> for GainConvention {
    fn from(value: GainConventionField) -> Self {
        match value {
            GainConventionField::Power => GainConvention::Power,
            GainConventionField::Amplitude => GainConvention::Amplitude,
        }
    }
}

impl std::fmt::Display for GainConventionField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            GainConventionField::Power => "power",
            GainConventionField::Amplitude => "amplitude",
        })
    }
}

/// Flat run configuration. SI units throughout except the dB/dBm fields.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// Standard port impedance (Ω).
    pub r_g: f64,
    /// LED series resistance (Ω).
    pub r_s: f64,
    /// LED internal resistance (Ω).
    pub r_l: f64,
    /// Junction capacitance (F).
    pub c_w: f64,
    /// Bonding inductance (H).
    pub l_b: f64,
    /// Power amplifier gain (dB).
    pub k_pa_db: f64,
    /// Low-noise amplifier gain (dB).
    pub k_lna_db: f64,
    /// dB-to-linear convention for the amplifier gains.
    pub gain_convention: GainConventionField,
    /// LED electro-optical responsivity.
    pub resp_led: f64,
    /// Photodiode responsivity.
    pub resp_pd: f64,
    /// Channel attenuation, 0 < h <= 1.
    pub h: f64,
    /// Noise power spectral density (dBm/Hz).
    pub n0_dbm_per_hz: f64,
    /// Optical intensity constraint scale.
    pub mu: f64,
    /// Sweep lower bound on h.
    pub h_min: f64,
    /// Sweep upper bound on h.
    pub h_max: f64,
    /// Number of sweep points.
    pub steps: usize,
    /// Log-spaced sweep points when true, linear otherwise.
    pub log_spacing: bool,
    /// Relative tolerance of the bandwidth quadrature.
    pub tolerance: f64,
    /// Recursion depth limit of the bandwidth quadrature.
    pub depth_limit: u32,
    /// Coarse grid resolution per axis of the grid-search oracle.
    pub grid_coarse: usize,
    /// Relative tolerance of the grid-search refinement.
    pub grid_refine_tol: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            r_g: 50.0,
            r_s: 1.0,
            r_l: 0.5,
            c_w: 10.8e-9,
            l_b: 28.6e-9,
            k_pa_db: 30.0,
            k_lna_db: 30.0,
            gain_convention: GainConventionField::Power,
            resp_led: 1.0,
            resp_pd: 1.0,
            h: 0.5,
            n0_dbm_per_hz: -50.0,
            mu: 1.0,
            h_min: 0.001,
            h_max: 1.0,
            steps: 30,
            log_spacing: true,
            tolerance: 1e-6,
            depth_limit: 40,
            grid_coarse: 200,
            grid_refine_tol: 1e-6,
        }
    }
}

impl RunConfig {
    /// Checks every invariant, reporting all violations at once.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let mut violations = Vec::new();
        let positives = [
            ("r_g", self.r_g),
            ("r_s", self.r_s),
            ("r_l", self.r_l),
            ("c_w", self.c_w),
            ("l_b", self.l_b),
            ("resp_led", self.resp_led),
            ("resp_pd", self.resp_pd),
            ("mu", self.mu),
            ("h_min", self.h_min),
            ("tolerance", self.tolerance),
            ("grid_refine_tol", self.grid_refine_tol),
        ];
        for (name, value) in positives {
            if !(value > 0.0 && value.is_finite()) {
                violations.push(format!("{name} must be positive, got {value}"));
            }
        }
        if !(self.h > 0.0 && self.h <= 1.0) {
            violations.push(format!("h must satisfy 0 < h <= 1, got {}", self.h));
        }
        if self.h_min >= self.h_max {
            violations.push(format!(
                "h_min must be below h_max, got {} >= {}",
                self.h_min, self.h_max
            ));
        }
        if self.h_max > 1.0 {
            violations.push(format!("h_max must not exceed 1, got {}", self.h_max));
        }
        if self.steps < 2 {
            violations.push(format!("steps must be at least 2, got {}", self.steps));
        }
        if self.depth_limit == 0 {
            violations.push("depth_limit must be at least 1".to_string());
        }
        if self.grid_coarse < 2 {
            violations.push(format!(
                "grid_coarse must be at least 2, got {}",
                self.grid_coarse
            ));
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(ConfigError::Invalid { violations })
        }
    }

    pub fn led_params(&self) -> LedParams {
        LedParams {
            r_s: self.r_s,
            r_l: self.r_l,
            c_w: self.c_w,
            l_b: self.l_b,
        }
    }

    pub fn link_config(&self) -> LinkConfig {
        LinkConfig {
            r_g: self.r_g,
            k_pa_db: self.k_pa_db,
            k_lna_db: self.k_lna_db,
            gain_convention: self.gain_convention.into(),
            resp_led: self.resp_led,
            resp_pd: self.resp_pd,
            h: self.h,
            n0_dbm_per_hz: self.n0_dbm_per_hz,
            mu: self.mu,
        }
    }

    pub fn integration(&self) -> IntegrationControl {
        IntegrationControl {
            rel_tol: self.tolerance,
            max_depth: self.depth_limit,
        }
    }

    pub fn grid_spec(&self) -> GridSpec {
        GridSpec {
            coarse: self.grid_coarse,
            refine_tol: self.grid_refine_tol,
        }
    }

    /// Sweep attenuation values, ascending.
    pub fn h_values(&self) -> Vec<f64> {
        let n = self.steps;
        if self.log_spacing {
            let step = (self.h_max / self.h_min).ln() / (n - 1) as f64;
            (0..n).map(|i| self.h_min * (step * i as f64).exp()).collect()
        } else {
            let step = (self.h_max - self.h_min) / (n - 1) as f64;
            (0..n).map(|i| self.h_min + step * i as f64).collect()
        }
    }
}

/// Loads and validates a config file; `None` yields the built-in defaults.
pub fn load_config(path: Option<&Path>) -> Result<RunConfig, ConfigError> {
    let config = match path {
        None => RunConfig::default(),
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
                path: path.display().to_string(),
                source,
            })?;
            serde_json::from_str(&text).map_err(|source| ConfigError::Parse {
                path: path.display().to_string(),
                source,
            })?
        }
    };
    config.validate()?;
    Ok(config)
}
