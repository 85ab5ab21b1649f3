//! Capacity-optimal equalizer design: attenuation thresholds, regime
//! classification, the transcendental root behind the closed forms,
//! closed-form pole placement with numerical refinement, and a brute-force
//! grid-search oracle.
//!
//! The reduced capacity objective C(x, y) = (π/4)·xy/(x+y)·log₂(α(x+y)/(x³y³)+1)
//! admits three regimes, switched by the channel attenuation h:
//!
//! - h ≥ h₁: symmetric placement x = y = (2α)^(1/5)/e,
//! - h₂ < h < h₁: first-order design, y pinned to the LED's upper pole and
//!   x = α^(1/3)/(e·f_p2^(2/3)) clipped into [f_p1, f_p2],
//! - h ≤ h₂: no equalizer at all, the link keeps the raw LED poles.
//!
//! The closed forms carry the approximations of their derivation (the
//! e-divisor stands in for the exact root of ln u = k(u−1)/u); refinement
//! maximizes the exact objective and the grid oracle cross-checks both.

use crate::circuits::{synthesize_from_poles, CircuitError, EqualizerParams, LedModel};
use crate::linkmodel::{alpha, capacity_from_poles, LinkConfig, LinkPoles};
use std::f64::consts::{E, LN_2, PI};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DesignError {
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NmseError {
    #[error("series length mismatch: reference {reference}, candidate {candidate}")]
    LengthMismatch { reference: usize, candidate: usize },
    #[error("empty series")]
    Empty,
    #[error("reference series is identically zero")]
    ZeroReference,
}

/// Operating regime of the optimal design, selected by channel attenuation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    NoEqualizer,
    FirstOrder,
    Symmetric,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Regime::NoEqualizer => "NoEqualizer",
            Regime::FirstOrder => "FirstOrder",
            Regime::Symmetric => "Symmetric",
        })
    }
}

/// Attenuation thresholds separating the design regimes, with h2 < h1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    pub h1: f64,
    pub h2: f64,
}

/// Exact and paper-approximate root of ln u = k·(u−1)/u for u > 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogEquationRoot {
    /// Bisection + Newton root, residual below 1e-12.
    pub exact: f64,
    /// The closed-form stand-in exp(k − k/e^k).
    pub paper_approx: f64,
    /// |ln u − k(u−1)/u| at `exact`.
    pub residual: f64,
}

/// A complete design: closed-form and refined pole placements, synthesized
/// components and the capacities along the way.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignResult {
    pub regime: Regime,
    pub thresholds: Thresholds,
    /// Aggregate SNR scale α at the configured h.
    pub alpha: f64,
    /// Closed-form pole placement (clipped into the feasible region).
    pub poles_closed: LinkPoles,
    /// Poles after exact-objective refinement; equals `poles_closed` until
    /// [`refine_design`] runs, and stays there in the NoEqualizer regime.
    pub poles_refined: LinkPoles,
    /// Components synthesized for `poles_closed`.
    pub params: EqualizerParams,
    /// Exact reduced-form capacity at `poles_closed`.
    pub capacity_closed: f64,
    /// The literal piecewise closed-form capacity value. An approximation of
    /// `capacity_closed` away from the regime seams; near h1 it can exceed
    /// the true maximum because its derivation assumes x well below f_p2.
    pub capacity_formula: f64,
    /// Exact reduced-form capacity at `poles_refined`.
    pub capacity_refined: f64,
}

/// Grid-search oracle control: coarse log-grid resolution per axis and the
/// relative tolerance of the local refinement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub coarse: usize,
    pub refine_tol: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            coarse: 200,
            refine_tol: 1e-6,
        }
    }
}

/// Attenuation above which the symmetric optimum clears the LED's upper
/// pole: h1 = 2·√(2N₀)·π³e³·C_w·L_b·f_p2^(5/2) / (K^PA·ℛ_L·ℛ_P·K^LNA·μ).
pub fn threshold_h1(cfg: &LinkConfig, led: &LedModel) -> f64 {
    2.0 * (2.0 * cfg.n0()).sqrt() * PI.powi(3) * E.powi(3) * led.params.c_w * led.params.l_b
        * led.f_p2.powf(2.5)
        / (cfg.gain_product() * cfg.mu)
}

/// Attenuation below which even the first-order design collapses onto the
/// LED's lower pole: h2 = 4π³e²·√N₀·C_w·L_b·f_p1^(3/2)·f_p2 / (K^PA·ℛ_L·ℛ_P·K^LNA·μ).
pub fn threshold_h2(cfg: &LinkConfig, led: &LedModel) -> f64 {
    4.0 * PI.powi(3) * E.powi(2) * cfg.n0().sqrt() * led.params.c_w * led.params.l_b
        * led.f_p1.powf(1.5)
        * led.f_p2
        / (cfg.gain_product() * cfg.mu)
}

/// Piecewise regime selection: h ≤ h2 → NoEqualizer, h2 < h < h1 →
/// FirstOrder, h ≥ h1 → Symmetric. The lower boundary is inclusive.
pub fn classify_regime(h: f64, h1: f64, h2: f64) -> Regime {
    debug_assert!(h > 0.0 && h2 < h1);
    if h <= h2 {
        Regime::NoEqualizer
    } else if h < h1 {
        Regime::FirstOrder
    } else {
        Regime::Symmetric
    }
}

/// Solves ln u = k·(u−1)/u for the unique root u > 1 (k > 1) by bisection on
/// [k, e^k] followed by Newton polish, and reports the paper's exponential
/// approximation alongside.
pub fn solve_log_equation(k: f64) -> LogEquationRoot {
    assert!(k > 1.0, "log equation requires k > 1, got {k}");
    // f(u) = ln u − k + k/u; f(k) = ln k − k + 1 < 0, f(e^k) = k/e^k > 0.
    let f = |u: f64| u.ln() - k + k / u;
    let mut lo = k;
    let mut hi = k.exp();
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    let mut u = 0.5 * (lo + hi);
    for _ in 0..8 {
        // f'(u) = (u − k)/u²
        let slope = (u - k) / (u * u);
        if slope <= 0.0 {
            break;
        }
        let next = u - f(u) / slope;
        if !(next.is_finite() && next > 1.0) {
            break;
        }
        u = next;
    }
    LogEquationRoot {
        exact: u,
        paper_approx: (k - k / k.exp()).exp(),
        residual: f(u).abs(),
    }
}

/// Closed-form design per regime. Pole placements are clipped into the
/// feasible region (x ≥ f_p1, y ≥ f_p2); `capacity_formula` keeps the
/// literal piecewise value while `capacity_closed` evaluates the exact
/// objective at the clipped poles.
pub fn closed_form_design(cfg: &LinkConfig, led: &LedModel) -> Result<DesignResult, DesignError> {
    let a = alpha(cfg, led);
    let thresholds = Thresholds {
        h1: threshold_h1(cfg, led),
        h2: threshold_h2(cfg, led),
    };
    let regime = classify_regime(cfg.h, thresholds.h1, thresholds.h2);

    let (poles, capacity_formula) = match regime {
        Regime::NoEqualizer => {
            let p = LinkPoles::new(led.f_p1, led.f_p2);
            let c = capacity_from_poles(&p, a);
            (p, c)
        }
        Regime::FirstOrder => {
            let raw = a.powf(1.0 / 3.0) / (E * led.f_p2.powf(2.0 / 3.0));
            let x = raw.clamp(led.f_p1, led.f_p2);
            let c = 3.0 * PI / (4.0 * LN_2) * raw;
            (LinkPoles::new(x, led.f_p2), c)
        }
        Regime::Symmetric => {
            // The clamp only absorbs rounding jitter exactly at h = h1.
            let x = ((2.0 * a).powf(0.2) / E).max(led.f_p2);
            let c = 5.0 * PI * (2.0 * a).powf(0.2) / (8.0 * E * LN_2);
            (LinkPoles::new(x, x), c)
        }
    };

    let params = synthesize_from_poles(poles.x, poles.y, led, cfg.r_g)?;
    let capacity_closed = capacity_from_poles(&poles, a);
    Ok(DesignResult {
        regime,
        thresholds,
        alpha: a,
        poles_closed: poles,
        poles_refined: poles,
        params,
        capacity_closed,
        capacity_formula,
        capacity_refined: capacity_closed,
    })
}

/// Golden-section maximization on [a, b], relative tolerance on the
/// abscissa. The returned point is the best of the interior probe and both
/// original endpoints, so boundary maxima are hit exactly; ties resolve to
/// the lowest abscissa.
fn golden_max(f: &dyn Fn(f64) -> f64, a0: f64, b0: f64, rel_tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let scale = a0.abs().max(b0.abs()).max(f64::MIN_POSITIVE);
    let (mut a, mut b) = (a0, b0);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut iterations = 0;
    while (b - a) > rel_tol * scale && iterations < 300 {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        iterations += 1;
    }
    let interior = if fc >= fd { (c, fc) } else { (d, fd) };
    let mut best = (a0, f(a0));
    for (x, fx) in [interior, (b0, f(b0))] {
        if fx > best.1 {
            best = (x, fx);
        }
    }
    best
}

/// Numerically polishes the closed-form design by maximizing the exact
/// reduced objective: over the symmetric diagonal for h ≥ h1, over
/// x ∈ [f_p1, f_p2] with y pinned at f_p2 in the first-order regime, and
/// leaving the no-equalizer corner untouched. Never loses capacity relative
/// to the closed-form poles.
pub fn refine_design(cfg: &LinkConfig, led: &LedModel, closed: &DesignResult) -> DesignResult {
    let a = alpha(cfg, led);
    debug_assert_eq!(a, closed.alpha, "refine must use the design's configuration");
    let mut out = closed.clone();
    let (poles, capacity) = match closed.regime {
        Regime::NoEqualizer => (closed.poles_closed, closed.capacity_closed),
        Regime::FirstOrder => {
            let y = led.f_p2;
            let (x, c) = golden_max(
                &|t| capacity_from_poles(&LinkPoles::new(t, y), a),
                led.f_p1,
                led.f_p2,
                1e-8,
            );
            (LinkPoles::new(x, y), c)
        }
        Regime::Symmetric => {
            let (x, c) = golden_max(
                &|t| capacity_from_poles(&LinkPoles::new(t, t), a),
                led.f_p2,
                100.0 * closed.poles_closed.x,
                1e-8,
            );
            (LinkPoles::new(x, x), c)
        }
    };
    if capacity >= closed.capacity_closed {
        out.poles_refined = poles;
        out.capacity_refined = capacity;
    }
    out
}

fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let step = (hi / lo).ln() / (n - 1) as f64;
    (0..n).map(|i| lo * (step * i as f64).exp()).collect()
}

/// Brute-force maximization of the reduced capacity objective over the
/// feasible pole region x ∈ [f_p1, X_max], y ∈ [f_p2, X_max] with
/// X_max = max(10·(2α)^(1/5)/e, 10·f_p2): coarse log-spaced grid, then
/// coordinate-wise golden-section refinement plus a diagonal pass (the
/// symmetric ridge defeats pure coordinate steps). Deterministic; ties on
/// the coarse grid resolve to the lowest x, then lowest y.
pub fn grid_search_optimum(
    cfg: &LinkConfig,
    led: &LedModel,
    spec: &GridSpec,
) -> (LinkPoles, f64) {
    let a = alpha(cfg, led);
    if a <= 0.0 {
        return (LinkPoles::new(led.f_p1, led.f_p2), 0.0);
    }
    let hi = (10.0 * (2.0 * a).powf(0.2) / E).max(10.0 * led.f_p2);
    let n = spec.coarse.max(2);
    let xs = log_spaced(led.f_p1, hi, n);
    let ys = log_spaced(led.f_p2, hi, n);

    let mut best = (f64::NEG_INFINITY, 0usize, 0usize);
    for (i, &x) in xs.iter().enumerate() {
        for (j, &y) in ys.iter().enumerate() {
            let c = capacity_from_poles(&LinkPoles::new(x, y), a);
            if c > best.0 {
                best = (c, i, j);
            }
        }
    }

    let ratio_x = (hi / led.f_p1).powf(1.0 / (n - 1) as f64);
    let ratio_y = (hi / led.f_p2).powf(1.0 / (n - 1) as f64);
    let mut x = xs[best.1];
    let mut y = ys[best.2];
    let tol = spec.refine_tol;
    for _ in 0..100 {
        let (x_prev, y_prev) = (x, y);
        let (ax, bx) = ((x / ratio_x).max(led.f_p1), (x * ratio_x).min(hi));
        x = golden_max(&|t| capacity_from_poles(&LinkPoles::new(t, y), a), ax, bx, tol * 1e-2).0;
        let (ay, by) = ((y / ratio_y).max(led.f_p2), (y * ratio_y).min(hi));
        y = golden_max(&|t| capacity_from_poles(&LinkPoles::new(x, t), a), ay, by, tol * 1e-2).0;
        if (x - x_prev).abs() <= tol * x_prev && (y - y_prev).abs() <= tol * y_prev {
            break;
        }
    }

    let mut capacity = capacity_from_poles(&LinkPoles::new(x, y), a);
    let lo_diag = led.f_p2.max(0.5 * x.min(y));
    let hi_diag = (2.0 * x.max(y)).min(hi);
    if hi_diag > lo_diag {
        let (t, ct) = golden_max(
            &|t| capacity_from_poles(&LinkPoles::new(t, t), a),
            lo_diag,
            hi_diag,
            tol * 1e-2,
        );
        if ct > capacity {
            x = t;
            y = t;
            capacity = ct;
        }
    }
    (LinkPoles::new(x, y), capacity)
}

/// Normalized mean square error Σ(cᵢ − rᵢ)² / Σ rᵢ².
pub fn nmse(reference: &[f64], candidate: &[f64]) -> Result<f64, NmseError> {
    if reference.len() != candidate.len() {
        return Err(NmseError::LengthMismatch {
            reference: reference.len(),
            candidate: candidate.len(),
        });
    }
    if reference.is_empty() {
        return Err(NmseError::Empty);
    }
    let denom: f64 = reference.iter().map(|r| r * r).sum();
    if denom == 0.0 {
        return Err(NmseError::ZeroReference);
    }
    let num: f64 = reference
        .iter()
        .zip(candidate)
        .map(|(r, c)| (c - r) * (c - r))
        .sum();
    Ok(num / denom)
}
