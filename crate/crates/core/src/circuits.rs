//! Equivalent-circuit models: the second-order LED, the general second-order
//! pre-equalizer, zero-pole matching and component synthesis.
//!
//! The LED model has two poles; the equalizer contributes up to two zeros and
//! two poles, each zero/pole pair coming from one circuit stage (R1 ∥ Le and
//! R2 ∥ Ce). Placing the equalizer zeros exactly on the LED poles leaves only
//! the equalizer poles in the cascaded response, which is the whole design
//! lever of the artifact.
//!
//! Note on units: the LED internal resistance r_L appears inside expressions
//! like (r_L + 1), mixing ohms with a unit constant. These are implemented
//! literally as the circuit analysis writes them (the 1 is 1 Ω-normalized);
//! Table-II-based values reproduce only under this reading.

use num_complex::Complex64;
use std::f64::consts::PI;
use thiserror::Error;

/// Relative slack when deciding whether a requested pole sits exactly on the
/// corresponding LED pole (degenerating the stage to a pass-through).
const POLE_EQUALITY_SLACK: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CircuitError {
    #[error("parameter {name} must be strictly positive, got {value}")]
    NonPositiveParameter { name: &'static str, value: f64 },
    #[error("target pole {name} = {value:.6e} Hz lies below its matched zero {zero:.6e} Hz")]
    PoleBelowZero {
        name: &'static str,
        value: f64,
        zero: f64,
    },
}

/// Physical parameters of the second-order LED equivalent circuit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LedParams {
    /// Series resistance R_s (Ω).
    pub r_s: f64,
    /// Internal (cladding + quantum-well) resistance r_L (Ω).
    pub r_l: f64,
    /// Junction capacitance C_w (F).
    pub c_w: f64,
    /// Bonding inductance L_b (H).
    pub l_b: f64,
}

impl Default for LedParams {
    /// Typical blue-LED values: R_s = 1 Ω, r_L = 0.5 Ω, C_w = 10.8 nF,
    /// L_b = 28.6 nH.
    fn default() -> Self {
        Self {
            r_s: 1.0,
            r_l: 0.5,
            c_w: 10.8e-9,
            l_b: 28.6e-9,
        }
    }
}

/// Derived LED frequency response: two poles and a DC gain,
/// S21(f) = gain / ((1 + jf/f_p1)(1 + jf/f_p2)).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LedModel {
    pub params: LedParams,
    /// Lower pole (Hz), from the junction capacitance branch.
    pub f_p1: f64,
    /// Upper pole (Hz), from the bonding inductance.
    pub f_p2: f64,
    /// DC forward transmission gain.
    pub gain: f64,
    /// True when the raw formulas produced f_p1 > f_p2 and the poles were
    /// swapped to keep the ordering invariant.
    pub poles_swapped: bool,
}

fn check_positive(name: &'static str, value: f64) -> Result<(), CircuitError> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(CircuitError::NonPositiveParameter { name, value })
    }
}

impl LedModel {
    /// Derives pole frequencies and gain from circuit values:
    /// f_p1 = (r_L + 1)/(2π C_w r_L), f_p2 = (R_s + R_g)/(2π L_b),
    /// gain = 2 r_L / ((R_s + R_g)(r_L + 1)).
    pub fn new(params: LedParams, r_g: f64) -> Result<Self, CircuitError> {
        check_positive("r_s", params.r_s)?;
        check_positive("r_l", params.r_l)?;
        check_positive("c_w", params.c_w)?;
        check_positive("l_b", params.l_b)?;
        check_positive("r_g", r_g)?;

        let f_p1 = (params.r_l + 1.0) / (2.0 * PI * params.c_w * params.r_l);
        let f_p2 = (params.r_s + r_g) / (2.0 * PI * params.l_b);
        let gain = 2.0 * params.r_l / ((params.r_s + r_g) * (params.r_l + 1.0));

        let (f_p1, f_p2, poles_swapped) = if f_p1 > f_p2 {
            (f_p2, f_p1, true)
        } else {
            (f_p1, f_p2, false)
        };
        Ok(Self {
            params,
            f_p1,
            f_p2,
            gain,
            poles_swapped,
        })
    }

    /// Forward transmission coefficient at frequency `f` (Hz).
    pub fn s21(&self, f: f64) -> Complex64 {
        let one = Complex64::new(1.0, 0.0);
        let d1 = one + Complex64::new(0.0, f / self.f_p1);
        let d2 = one + Complex64::new(0.0, f / self.f_p2);
        Complex64::new(self.gain, 0.0) / (d1 * d2)
    }
}

/// First equalizer stage: R1 in parallel with Le.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RlStage {
    pub r1: f64,
    pub l_e: f64,
}

/// Second equalizer stage: R2 in parallel with Ce. R2 = 0 short-circuits the
/// capacitor and removes the stage, which is why the absent case is a
/// separate variant rather than a zero value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RcStage {
    pub r2: f64,
    pub c_e: f64,
}

/// Equalizer circuit values. `None` stages are exact pass-throughs:
/// stage 1 absent means R1 → ∞ (source wired straight through), stage 2
/// absent means R2 = 0 (Ce shorted).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EqualizerParams {
    pub stage1: Option<RlStage>,
    pub stage2: Option<RcStage>,
}

impl EqualizerParams {
    /// Full bypass: both stages absent, S21 = 1 at all frequencies.
    pub fn bypass() -> Self {
        Self::default()
    }
}

/// Derived equalizer response. Present stages contribute
/// (1 + jf/f_z)/(1 + jf/f_p) factors; the DC gain is the product of the
/// z/p ratios of present stages (1 for an absent stage).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EqualizerModel {
    pub params: EqualizerParams,
    pub f_z1: Option<f64>,
    pub f_p1: Option<f64>,
    pub f_z2: Option<f64>,
    pub f_p2: Option<f64>,
    pub gain: f64,
}

impl EqualizerModel {
    /// Derives zeros/poles/gain from circuit values:
    /// f_z1 = R1/(2π Le), f_p1 = (2 R1 + R_g)/(4π Le),
    /// f_z2 = 1/(2π Ce R2), f_p2 = (2 R_g + R2)/(4π R_g Ce R2).
    pub fn new(params: EqualizerParams, r_g: f64) -> Result<Self, CircuitError> {
        check_positive("r_g", r_g)?;
        let mut gain = 1.0;
        let (f_z1, f_p1) = match params.stage1 {
            Some(s) => {
                check_positive("r1", s.r1)?;
                check_positive("l_e", s.l_e)?;
                let f_z = s.r1 / (2.0 * PI * s.l_e);
                let f_p = (2.0 * s.r1 + r_g) / (4.0 * PI * s.l_e);
                gain *= f_z / f_p;
                (Some(f_z), Some(f_p))
            }
            None => (None, None),
        };
        let (f_z2, f_p2) = match params.stage2 {
            Some(s) => {
                check_positive("r2", s.r2)?;
                check_positive("c_e", s.c_e)?;
                let f_z = 1.0 / (2.0 * PI * s.c_e * s.r2);
                let f_p = (2.0 * r_g + s.r2) / (4.0 * PI * r_g * s.c_e * s.r2);
                gain *= f_z / f_p;
                (Some(f_z), Some(f_p))
            }
            None => (None, None),
        };
        Ok(Self {
            params,
            f_z1,
            f_p1,
            f_z2,
            f_p2,
            gain,
        })
    }

    pub fn stage1_present(&self) -> bool {
        self.params.stage1.is_some()
    }

    pub fn stage2_present(&self) -> bool {
        self.params.stage2.is_some()
    }

    /// Forward transmission coefficient at frequency `f` (Hz). Absent stages
    /// contribute unity factors.
    pub fn s21(&self, f: f64) -> Complex64 {
        let one = Complex64::new(1.0, 0.0);
        let mut value = Complex64::new(self.gain, 0.0);
        if let (Some(fz), Some(fp)) = (self.f_z1, self.f_p1) {
            value *= (one + Complex64::new(0.0, f / fz)) / (one + Complex64::new(0.0, f / fp));
        }
        if let (Some(fz), Some(fp)) = (self.f_z2, self.f_p2) {
            value *= (one + Complex64::new(0.0, f / fz)) / (one + Complex64::new(0.0, f / fp));
        }
        value
    }
}

/// Chooses Le and Ce so the equalizer zeros land exactly on the LED poles:
/// Le = R1 C_w r_L/(r_L + 1) and Ce = L_b/(R2 (R_s + R_g)).
///
/// `r1 = None` bypasses stage 1; `r2 = 0` removes stage 2.
pub fn match_zeros_to_led(
    led: &LedModel,
    r1: Option<f64>,
    r2: f64,
    r_g: f64,
) -> Result<EqualizerParams, CircuitError> {
    let p = led.params;
    let stage1 = match r1 {
        Some(r1) => {
            check_positive("r1", r1)?;
            Some(RlStage {
                r1,
                l_e: r1 * p.c_w * p.r_l / (p.r_l + 1.0),
            })
        }
        None => None,
    };
    if r2 < 0.0 {
        return Err(CircuitError::NonPositiveParameter {
            name: "r2",
            value: r2,
        });
    }
    let stage2 = if r2 == 0.0 {
        None
    } else {
        Some(RcStage {
            r2,
            c_e: p.l_b / (r2 * (p.r_s + r_g)),
        })
    };
    Ok(EqualizerParams { stage1, stage2 })
}

/// Synthesizes matched equalizer components that place the link poles at
/// (x, y): R1 = R_g/(2 (x/f_p1 - 1)) and R2 = 2 R_g (y/f_p2 - 1), with Le/Ce
/// from [`match_zeros_to_led`]. A target pole equal to the LED pole
/// degenerates the corresponding stage (stage 1 bypassed / stage 2 removed).
pub fn synthesize_from_poles(
    x: f64,
    y: f64,
    led: &LedModel,
    r_g: f64,
) -> Result<EqualizerParams, CircuitError> {
    let slack1 = led.f_p1 * POLE_EQUALITY_SLACK;
    let slack2 = led.f_p2 * POLE_EQUALITY_SLACK;
    if x < led.f_p1 - slack1 {
        return Err(CircuitError::PoleBelowZero {
            name: "f_p1_eq",
            value: x,
            zero: led.f_p1,
        });
    }
    if y < led.f_p2 - slack2 {
        return Err(CircuitError::PoleBelowZero {
            name: "f_p2_eq",
            value: y,
            zero: led.f_p2,
        });
    }
    let r1 = if x <= led.f_p1 + slack1 {
        None
    } else {
        Some(r_g / (2.0 * (x / led.f_p1 - 1.0)))
    };
    let r2 = if y <= led.f_p2 + slack2 {
        0.0
    } else {
        2.0 * r_g * (y / led.f_p2 - 1.0)
    };
    match_zeros_to_led(led, r1, r2, r_g)
}
