//! End-to-end link response, noise-equivalent bandwidth, channel coefficient
//! and IMDD channel capacity.
//!
//! Once the equalizer zeros are matched to the LED poles, the whole chain
//! collapses to a two-pole response with DC value K^C. Bandwidth and gain
//! then pull against each other through the pole pair (x, y): the
//! noise-equivalent bandwidth grows with the poles while K^C shrinks as
//! 1/(x·y). Capacity combines both and is computed along two algebraically
//! equivalent routes (bandwidth+gain vs the reduced pole form), which the
//! tests hold to 1e-9 of each other.

use crate::circuits::{EqualizerModel, LedModel};
use crate::twoport::{self, ScatteringMatrix, TwoPortError};
use num_complex::Complex64;
use std::f64::consts::{E, LN_2, PI};
use thiserror::Error;

/// Maximum relative deviation between an equalizer zero and the LED pole it
/// is supposed to cancel before the closed-form response is refused.
pub const MATCH_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinkError {
    #[error("equalizer zero {zero:.6e} Hz does not match LED pole {pole:.6e} Hz (relative deviation {deviation:.3e})")]
    ZeroPoleMismatch {
        zero: f64,
        pole: f64,
        deviation: f64,
    },
    #[error("adaptive quadrature did not converge within depth limit {max_depth}")]
    NonConvergence { max_depth: u32 },
    #[error(transparent)]
    TwoPort(#[from] TwoPortError),
}

/// How dB gain figures translate to linear factors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GainConvention {
    /// 10^(dB/10); 30 dB → 1000.
    Power,
    /// 10^(dB/20); 30 dB → 31.62.
    Amplitude,
}

impl GainConvention {
    pub fn db_to_linear(self, db: f64) -> f64 {
        match self {
            GainConvention::Power => 10f64.powf(db / 10.0),
            GainConvention::Amplitude => 10f64.powf(db / 20.0),
        }
    }
}

/// Link-level parameters: amplifier gains, responsivities, port impedance,
/// channel attenuation, noise density and the optical intensity scale μ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkConfig {
    /// Standard port impedance R_g (Ω).
    pub r_g: f64,
    /// Power amplifier gain (dB).
    pub k_pa_db: f64,
    /// Low-noise amplifier gain (dB).
    pub k_lna_db: f64,
    pub gain_convention: GainConvention,
    /// Electro-optical responsivity of the LED (dimensionless).
    pub resp_led: f64,
    /// Photodiode responsivity (dimensionless).
    pub resp_pd: f64,
    /// Channel attenuation, 0 < h ≤ 1.
    pub h: f64,
    /// Noise power spectral density (dBm/Hz).
    pub n0_dbm_per_hz: f64,
    /// Optical intensity constraint scale (dimensionless, opaque).
    pub mu: f64,
}

impl Default for LinkConfig {
    fn default() -> Self {
        Self {
            r_g: 50.0,
            k_pa_db: 30.0,
            k_lna_db: 30.0,
            gain_convention: GainConvention::Power,
            resp_led: 1.0,
            resp_pd: 1.0,
            h: 0.5,
            n0_dbm_per_hz: -50.0,
            mu: 1.0,
        }
    }
}

impl LinkConfig {
    pub fn k_pa(&self) -> f64 {
        self.gain_convention.db_to_linear(self.k_pa_db)
    }

    pub fn k_lna(&self) -> f64 {
        self.gain_convention.db_to_linear(self.k_lna_db)
    }

    /// Linearized noise density in W/Hz.
    pub fn n0(&self) -> f64 {
        10f64.powf(self.n0_dbm_per_hz / 10.0) * 1e-3
    }

    /// Product of the attenuation-free gain factors K^PA·ℛ_L·ℛ_P·K^LNA.
    pub fn gain_product(&self) -> f64 {
        self.k_pa() * self.resp_led * self.resp_pd * self.k_lna()
    }
}

/// The surviving pole pair of the equalized link (Hz). Where an equalizer
/// stage is present its pole replaces the LED pole; otherwise the LED pole
/// survives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkPoles {
    pub x: f64,
    pub y: f64,
}

impl LinkPoles {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

/// Adaptive quadrature control.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationControl {
    pub rel_tol: f64,
    pub max_depth: u32,
}

impl Default for IntegrationControl {
    fn default() -> Self {
        Self {
            rel_tol: 1e-6,
            max_depth: 40,
        }
    }
}

fn check_match(zero: f64, pole: f64) -> Result<(), LinkError> {
    let deviation = (zero - pole).abs() / pole;
    if deviation > MATCH_TOLERANCE {
        Err(LinkError::ZeroPoleMismatch {
            zero,
            pole,
            deviation,
        })
    } else {
        Ok(())
    }
}

/// Extracts the link pole pair from a matched LED/equalizer chain, verifying
/// the zero-pole matching for every present stage.
pub fn link_poles(led: &LedModel, eq: &EqualizerModel) -> Result<LinkPoles, LinkError> {
    let x = match (eq.f_z1, eq.f_p1) {
        (Some(fz), Some(fp)) => {
            check_match(fz, led.f_p1)?;
            fp
        }
        _ => led.f_p1,
    };
    let y = match (eq.f_z2, eq.f_p2) {
        (Some(fz), Some(fp)) => {
            check_match(fz, led.f_p2)?;
            fp
        }
        _ => led.f_p2,
    };
    Ok(LinkPoles::new(x, y))
}

fn two_pole_response(k_c: f64, poles: &LinkPoles, f: f64) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    let d1 = Complex64::new(0.0, f / poles.x) + one;
    let d2 = Complex64::new(0.0, f / poles.y) + one;
    Complex64::new(k_c, 0.0) / (d1 * d2)
}

/// Overall frequency response of the matched chain:
/// H(f) = ℛ_L·h·ℛ_P·K^LNA·K^Eq·K^PA·K^LED / ((jf/x + 1)(jf/y + 1)).
pub fn link_response(
    f: f64,
    cfg: &LinkConfig,
    led: &LedModel,
    eq: &EqualizerModel,
) -> Result<Complex64, LinkError> {
    let poles = link_poles(led, eq)?;
    let k_c = cfg.resp_led * cfg.h * cfg.resp_pd * cfg.k_lna() * eq.gain * cfg.k_pa() * led.gain;
    Ok(two_pole_response(k_c, &poles, f))
}

/// Same response computed through the full transfer-matrix cascade
/// T^Eq·T^PA·T^LED instead of the matched closed form. Works for unmatched
/// chains too. Reflections are irrelevant to the forward gain here because
/// the ideal PA isolates the stages, so matched S-parameter blocks are built
/// from the transmission coefficients alone.
pub fn link_response_cascade(
    f: f64,
    cfg: &LinkConfig,
    led: &LedModel,
    eq: &EqualizerModel,
) -> Result<Complex64, LinkError> {
    let zero = Complex64::new(0.0, 0.0);
    let s_eq = ScatteringMatrix::new(zero, eq.s21(f), eq.s21(f), zero);
    let s_pa = ScatteringMatrix::ideal_amplifier(cfg.k_pa());
    let s_led = ScatteringMatrix::new(zero, led.s21(f), led.s21(f), zero);

    let chain = [
        twoport::scattering_to_transfer(&s_eq)?,
        twoport::scattering_to_transfer(&s_pa)?,
        twoport::scattering_to_transfer(&s_led)?,
    ];
    let s21_c = twoport::forward_gain(&twoport::cascade(&chain)?)?;
    Ok(s21_c * (cfg.resp_led * cfg.h * cfg.resp_pd * cfg.k_lna()))
}

/// Closed-form noise-equivalent bandwidth of a two-pole response:
/// (π/2)·x·y/(x + y).
pub fn analytic_bandwidth(poles: &LinkPoles) -> f64 {
    (PI / 2.0) * poles.x * poles.y / (poles.x + poles.y)
}

fn simpson_estimate(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adaptive_simpson(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    fa: f64,
    m: f64,
    fm: f64,
    b: f64,
    fb: f64,
    whole: f64,
    eps: f64,
    depth: u32,
    max_depth: u32,
) -> Result<f64, LinkError> {
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson_estimate(fa, flm, fm, a, m);
    let right = simpson_estimate(fm, frm, fb, m, b);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * eps {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(LinkError::NonConvergence { max_depth });
    }
    let l = adaptive_simpson(f, a, fa, lm, flm, m, fm, left, eps / 2.0, depth - 1, max_depth)?;
    let r = adaptive_simpson(f, m, fm, rm, frm, b, fb, right, eps / 2.0, depth - 1, max_depth)?;
    Ok(l + r)
}

fn integrate_segment(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    eps: f64,
    ctrl: &IntegrationControl,
) -> Result<f64, LinkError> {
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = simpson_estimate(fa, fm, fb, a, b);
    adaptive_simpson(f, a, fa, m, fm, b, fb, whole, eps, ctrl.max_depth, ctrl.max_depth)
}

/// Integrates a normalized |H|² magnitude over [0, 10³·max(x, y)] by adaptive
/// Simpson quadrature and adds the analytic f⁻⁴ tail beyond the truncation.
fn noise_bandwidth_quadrature(
    magnitude_sq: &dyn Fn(f64) -> f64,
    poles: &LinkPoles,
    ctrl: &IntegrationControl,
) -> Result<f64, LinkError> {
    let p_min = poles.x.min(poles.y);
    let p_max = poles.x.max(poles.y);
    let f_max = 1e3 * p_max;

    // Pre-split at the pole knees so the recursion spends its depth where the
    // integrand actually bends.
    let cuts = [0.0, p_min, (10.0 * p_max).min(f_max), f_max];
    let mut coarse = 0.0;
    for w in cuts.windows(2) {
        if w[1] > w[0] {
            let m = 0.5 * (w[0] + w[1]);
            coarse += simpson_estimate(magnitude_sq(w[0]), magnitude_sq(m), magnitude_sq(w[1]), w[0], w[1]);
        }
    }
    let eps_total = ctrl.rel_tol * coarse.abs().max(f64::MIN_POSITIVE);

    let mut total = 0.0;
    for w in cuts.windows(2) {
        if w[1] > w[0] {
            total += integrate_segment(magnitude_sq, w[0], w[1], eps_total / 3.0, ctrl)?;
        }
    }
    // |H|²/|H(0)|² → x²y²/f⁴ for f ≫ max(x, y).
    let tail = poles.x * poles.x * poles.y * poles.y / (3.0 * f_max * f_max * f_max);
    Ok(total + tail)
}

/// Noise-equivalent bandwidth of the canonical two-pole magnitude, by
/// quadrature. Independent numerical route for [`analytic_bandwidth`].
pub fn numeric_bandwidth_from_poles(
    poles: &LinkPoles,
    ctrl: &IntegrationControl,
) -> Result<f64, LinkError> {
    let (x, y) = (poles.x, poles.y);
    let g = move |f: f64| 1.0 / ((1.0 + (f / x).powi(2)) * (1.0 + (f / y).powi(2)));
    noise_bandwidth_quadrature(&g, poles, ctrl)
}

/// Noise-equivalent bandwidth of the full matched chain,
/// (1/|H|²_max)·∫₀^∞ |H(f)|² df, evaluating the actual link response.
pub fn numeric_bandwidth(
    cfg: &LinkConfig,
    led: &LedModel,
    eq: &EqualizerModel,
    ctrl: &IntegrationControl,
) -> Result<f64, LinkError> {
    let poles = link_poles(led, eq)?;
    let k_c = cfg.resp_led * cfg.h * cfg.resp_pd * cfg.k_lna() * eq.gain * cfg.k_pa() * led.gain;
    let h0 = two_pole_response(k_c, &poles, 0.0).norm_sqr();
    let g = move |f: f64| two_pole_response(k_c, &poles, f).norm_sqr() / h0;
    noise_bandwidth_quadrature(&g, &poles, ctrl)
}

/// End-to-end DC channel coefficient of the matched link:
/// K^C = ℛ_L·h·ℛ_P·K^LNA·K^PA / (2π²·C_w·L_b·x·y).
pub fn end_to_end_gain(cfg: &LinkConfig, led: &LedModel, poles: &LinkPoles) -> f64 {
    cfg.gain_product() * cfg.h
        / (2.0 * PI * PI * led.params.c_w * led.params.l_b * poles.x * poles.y)
}

/// Aggregate SNR scale entering the reduced capacity objective:
/// α = (K^PA·ℛ_L·h·ℛ_P·K^LNA)²·μ² / (4π²·e·N₀·(2π²·C_w·L_b)²).
/// Scales as h² and μ²; units Hz⁵.
pub fn alpha(cfg: &LinkConfig, led: &LedModel) -> f64 {
    let g = cfg.gain_product() * cfg.h;
    let reactance = 2.0 * PI * PI * led.params.c_w * led.params.l_b;
    (g * g * cfg.mu * cfg.mu) / (4.0 * PI * PI * E * cfg.n0() * reactance * reactance)
}

/// IMDD channel capacity from bandwidth and channel coefficient:
/// C = (B/2)·log₂((K^C)²·μ² / (8π·e·B·N₀) + 1), in bit/s.
pub fn capacity_from_bk(bandwidth: f64, k_c: f64, cfg: &LinkConfig) -> f64 {
    let snr = k_c * k_c * cfg.mu * cfg.mu / (8.0 * PI * E * bandwidth * cfg.n0());
    0.5 * bandwidth * snr.ln_1p() / LN_2
}

/// IMDD channel capacity in the reduced pole form:
/// C = (π/4)·xy/(x+y)·log₂(α·(x+y)/(x³y³) + 1), in bit/s. Symmetric in
/// (x, y); zero when α = 0.
pub fn capacity_from_poles(poles: &LinkPoles, alpha_val: f64) -> f64 {
    let (x, y) = (poles.x, poles.y);
    let z = alpha_val * (x + y) / (x.powi(3) * y.powi(3));
    (PI / 4.0) * (x * y / (x + y)) * z.ln_1p() / LN_2
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::{match_zeros_to_led, synthesize_from_poles, EqualizerParams, LedParams};
    use approx::assert_relative_eq;

    fn setup() -> (LinkConfig, LedModel) {
        let cfg = LinkConfig::default();
        let led = LedModel::new(LedParams::default(), cfg.r_g).unwrap();
        (cfg, led)
    }

    #[test]
    fn db_conventions() {
        assert_relative_eq!(GainConvention::Power.db_to_linear(30.0), 1000.0);
        assert_relative_eq!(
            GainConvention::Amplitude.db_to_linear(30.0),
            31.6227766016838,
            max_relative = 1e-12
        );
        assert_relative_eq!(LinkConfig::default().n0(), 1e-8, max_relative = 1e-12);
    }

    #[test]
    fn bypass_dc_response_is_product_of_factors() {
        let (cfg, led) = setup();
        let eq = EqualizerModel::new(EqualizerParams::bypass(), cfg.r_g).unwrap();
        let dc = link_response(0.0, &cfg, &led, &eq).unwrap();
        // 1000 · 0.5 · 1000 · (1/76.5)
        assert_relative_eq!(dc.re, 6535.9477124183, max_relative = 1e-9);
        assert_eq!(dc.im, 0.0);
    }

    #[test]
    fn closed_form_matches_cascade_route() {
        let (cfg, led) = setup();
        let params = synthesize_from_poles(3.0 * led.f_p1, 2.0 * led.f_p2, &led, cfg.r_g).unwrap();
        let eq = EqualizerModel::new(params, cfg.r_g).unwrap();
        for i in 0..20 {
            let f = 1e6 * 10f64.powf(4.0 * i as f64 / 19.0);
            let closed = link_response(f, &cfg, &led, &eq).unwrap();
            let cascaded = link_response_cascade(f, &cfg, &led, &eq).unwrap();
            assert!(
                (closed - cascaded).norm() <= 1e-9 * closed.norm(),
                "f = {f}: {closed} vs {cascaded}"
            );
        }
    }

    #[test]
    fn mismatched_zeros_are_refused() {
        let (cfg, led) = setup();
        // Detune the stage-1 zero by 1% by scaling l_e.
        let mut params = match_zeros_to_led(&led, Some(100.0), 20.0, cfg.r_g).unwrap();
        params.stage1.as_mut().unwrap().l_e *= 1.01;
        let eq = EqualizerModel::new(params, cfg.r_g).unwrap();
        assert!(matches!(
            link_response(1e6, &cfg, &led, &eq),
            Err(LinkError::ZeroPoleMismatch { .. })
        ));
    }

    #[test]
    fn analytic_bandwidth_formula() {
        let b0 = 1e8;
        assert_relative_eq!(
            analytic_bandwidth(&LinkPoles::new(b0, b0)),
            PI / 4.0 * b0,
            max_relative = 1e-15
        );
        let (_, led) = setup();
        let unequalized = LinkPoles::new(led.f_p1, led.f_p2);
        assert_relative_eq!(
            analytic_bandwidth(&unequalized),
            60_084_825.636192285,
            max_relative = 1e-9
        );
        let bce = LinkPoles::new(led.f_p2, led.f_p2);
        assert_relative_eq!(analytic_bandwidth(&bce), 222_902_097.9020979, max_relative = 1e-9);
    }

    #[test]
    fn quadrature_single_pole_limit() {
        let ctrl = IntegrationControl::default();
        let x = 44.2e6;
        let poles = LinkPoles::new(x, 1e6 * x);
        let b = numeric_bandwidth_from_poles(&poles, &ctrl).unwrap();
        assert_relative_eq!(b, PI / 2.0 * x, max_relative = 1e-4);
    }

    #[test]
    fn quadrature_matches_analytic_for_table_cases() {
        let (cfg, led) = setup();
        let ctrl = IntegrationControl::default();

        let eq = EqualizerModel::new(EqualizerParams::bypass(), cfg.r_g).unwrap();
        let b_numeric = numeric_bandwidth(&cfg, &led, &eq, &ctrl).unwrap();
        let b_analytic = analytic_bandwidth(&LinkPoles::new(led.f_p1, led.f_p2));
        assert_relative_eq!(b_numeric, b_analytic, max_relative = 5e-3);

        let sym = LinkPoles::new(610.4e6, 610.4e6);
        let b_sym = numeric_bandwidth_from_poles(&sym, &ctrl).unwrap();
        assert_relative_eq!(b_sym, analytic_bandwidth(&sym), max_relative = 5e-3);
    }

    #[test]
    fn quadrature_depth_exhaustion_reports_nonconvergence() {
        let ctrl = IntegrationControl {
            rel_tol: 1e-12,
            max_depth: 2,
        };
        let poles = LinkPoles::new(1e6, 1e9);
        assert!(matches!(
            numeric_bandwidth_from_poles(&poles, &ctrl),
            Err(LinkError::NonConvergence { max_depth: 2 })
        ));
    }

    #[test]
    fn end_to_end_gain_scaling_and_dc_consistency() {
        let (cfg, led) = setup();
        let poles = LinkPoles::new(led.f_p1, led.f_p2);
        let k1 = end_to_end_gain(&cfg, &led, &poles);
        let halved = LinkPoles::new(poles.x / 2.0, poles.y / 2.0);
        assert_relative_eq!(end_to_end_gain(&cfg, &led, &halved), 4.0 * k1, max_relative = 1e-12);

        let eq = EqualizerModel::new(EqualizerParams::bypass(), cfg.r_g).unwrap();
        let dc = link_response(0.0, &cfg, &led, &eq).unwrap().re;
        assert_relative_eq!(k1, dc, max_relative = 1e-6);

        let no_channel = LinkConfig { h: 0.0, ..cfg };
        assert_eq!(end_to_end_gain(&no_channel, &led, &poles), 0.0);
    }

    #[test]
    fn alpha_value_and_scaling() {
        let (cfg, led) = setup();
        assert_relative_eq!(alpha(&cfg, &led), 6.266812928605186e45, max_relative = 1e-9);

        let doubled_h = LinkConfig { h: 1.0, ..cfg };
        assert_relative_eq!(
            alpha(&doubled_h, &led),
            4.0 * alpha(&cfg, &led),
            max_relative = 1e-12
        );

        let zero_mu = LinkConfig { mu: 0.0, ..cfg };
        assert_eq!(alpha(&zero_mu, &led), 0.0);
        assert_eq!(
            capacity_from_poles(&LinkPoles::new(led.f_p1, led.f_p2), 0.0),
            0.0
        );
    }

    #[test]
    fn capacity_route_consistency_and_trivia() {
        let (cfg, led) = setup();
        assert_eq!(capacity_from_bk(1e8, 0.0, &cfg), 0.0);

        // Unit SNR argument makes capacity exactly B/2.
        let b = 1e8;
        let k_c = (8.0 * PI * E * b * cfg.n0()).sqrt() / cfg.mu;
        assert_relative_eq!(capacity_from_bk(b, k_c, &cfg), b / 2.0, max_relative = 1e-12);

        let poles = LinkPoles::new(2.0 * led.f_p1, 3.0 * led.f_p2);
        let via_bk = capacity_from_bk(
            analytic_bandwidth(&poles),
            end_to_end_gain(&cfg, &led, &poles),
            &cfg,
        );
        let via_poles = capacity_from_poles(&poles, alpha(&cfg, &led));
        assert_relative_eq!(via_bk, via_poles, max_relative = 1e-9);
    }

    #[test]
    fn capacity_is_symmetric_in_poles() {
        let a = 6.27e45;
        let c1 = capacity_from_poles(&LinkPoles::new(2e8, 7e8), a);
        let c2 = capacity_from_poles(&LinkPoles::new(7e8, 2e8), a);
        assert_eq!(c1, c2);
    }

    #[test]
    fn symmetric_optimum_capacity_cross_check() {
        // x = y near 610 MHz at the default α: the reduced form agrees with
        // the closed-form maximum value 5π(2α)^(1/5)/(8e·ln2) to the accuracy
        // of the paper's e-divisor approximation (~0.13%).
        let (cfg, led) = setup();
        let a = alpha(&cfg, &led);
        let x = (2.0 * a).powf(0.2) / E;
        let c = capacity_from_poles(&LinkPoles::new(x, x), a);
        let closed_form = 5.0 * PI * (2.0 * a).powf(0.2) / (8.0 * E * LN_2);
        assert_relative_eq!(c, 1.73e9, max_relative = 5e-3);
        assert_relative_eq!(c, closed_form, max_relative = 2e-3);
    }
}
