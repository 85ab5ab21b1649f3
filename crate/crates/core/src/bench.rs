//! Benchmark schemes and attenuation sweeps: the capacity-centric design
//! against a bandwidth-centric equalizer and the bare (unequalized) link.

use crate::circuits::LedModel;
use crate::linkmodel::{alpha, analytic_bandwidth, capacity_from_poles, LinkConfig, LinkPoles};
use crate::optimizer::{
    closed_form_design, grid_search_optimum, nmse, refine_design, DesignError, GridSpec, Regime,
};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BenchError {
    #[error("attenuation values must be positive and sorted ascending (offender at index {index})")]
    BadSweepValues { index: usize },
    #[error(transparent)]
    Design(#[from] DesignError),
}

/// Equalizer scheme under comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Capacity-centric equalizer: regime-adaptive refined optimum.
    Cce,
    /// Bandwidth-centric equalizer: both link poles pushed to f_p2.
    Bce,
    /// No equalizer: the raw LED poles.
    NoEqualizer,
}

/// Link poles a scheme produces for the given configuration.
pub fn scheme_poles(
    scheme: Scheme,
    cfg: &LinkConfig,
    led: &LedModel,
) -> Result<LinkPoles, BenchError> {
    match scheme {
        Scheme::Bce => Ok(LinkPoles::new(led.f_p2, led.f_p2)),
        Scheme::NoEqualizer => Ok(LinkPoles::new(led.f_p1, led.f_p2)),
        Scheme::Cce => {
            let closed = closed_form_design(cfg, led)?;
            Ok(refine_design(cfg, led, &closed).poles_refined)
        }
    }
}

/// One attenuation point of a sweep: closed-form and oracle pole placements
/// and the capacities of every scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub h: f64,
    pub regime: Regime,
    pub x_closed: f64,
    pub y_closed: f64,
    pub x_oracle: f64,
    pub y_oracle: f64,
    /// Exact capacity at the closed-form poles.
    pub c_closed: f64,
    /// Literal piecewise closed-form capacity value.
    pub c_formula: f64,
    /// Exact capacity at the refined poles.
    pub c_refined: f64,
    /// Grid-search maximum.
    pub c_oracle: f64,
    pub c_bce: f64,
    pub c_noeq: f64,
    /// Analytic bandwidth at the refined (CCE) poles.
    pub bandwidth_opt: f64,
}

/// NMSE of the closed forms against the grid oracle over a sweep. Pole NMSE
/// pools the x and y series into one error sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSummary {
    pub pole_nmse: f64,
    /// Closed-form capacity expressions vs oracle.
    pub capacity_nmse_formula: f64,
    /// Exact capacity at closed-form poles vs oracle.
    pub capacity_nmse_at_poles: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub rows: Vec<SweepRow>,
    pub summary: SweepSummary,
}

/// Runs the full comparison at each attenuation in `h_values` (positive,
/// ascending). Rows are independent; output order follows input order.
pub fn sweep_attenuation(
    cfg: &LinkConfig,
    led: &LedModel,
    h_values: &[f64],
    grid: &GridSpec,
) -> Result<Sweep, BenchError> {
    for (index, w) in h_values.windows(2).enumerate() {
        if w[0] >= w[1] {
            return Err(BenchError::BadSweepValues { index: index + 1 });
        }
    }
    if let Some(&first) = h_values.first() {
        if first <= 0.0 {
            return Err(BenchError::BadSweepValues { index: 0 });
        }
    }

    let mut rows = Vec::with_capacity(h_values.len());
    for &h in h_values {
        let at_h = LinkConfig { h, ..*cfg };
        let design = refine_design(&at_h, led, &closed_form_design(&at_h, led)?);
        let (oracle_poles, c_oracle) = grid_search_optimum(&at_h, led, grid);
        let a = design.alpha;
        rows.push(SweepRow {
            h,
            regime: design.regime,
            x_closed: design.poles_closed.x,
            y_closed: design.poles_closed.y,
            x_oracle: oracle_poles.x,
            y_oracle: oracle_poles.y,
            c_closed: design.capacity_closed,
            c_formula: design.capacity_formula,
            c_refined: design.capacity_refined,
            c_oracle,
            c_bce: capacity_from_poles(&LinkPoles::new(led.f_p2, led.f_p2), a),
            c_noeq: capacity_from_poles(&LinkPoles::new(led.f_p1, led.f_p2), a),
            bandwidth_opt: analytic_bandwidth(&design.poles_refined),
        });
    }

    let pole_ref: Vec<f64> = rows
        .iter()
        .map(|r| r.x_oracle)
        .chain(rows.iter().map(|r| r.y_oracle))
        .collect();
    let pole_cand: Vec<f64> = rows
        .iter()
        .map(|r| r.x_closed)
        .chain(rows.iter().map(|r| r.y_closed))
        .collect();
    let cap_ref: Vec<f64> = rows.iter().map(|r| r.c_oracle).collect();
    let cap_formula: Vec<f64> = rows.iter().map(|r| r.c_formula).collect();
    let cap_at_poles: Vec<f64> = rows.iter().map(|r| r.c_closed).collect();

    let summary = SweepSummary {
        pole_nmse: nmse(&pole_ref, &pole_cand).expect("non-empty pole series"),
        capacity_nmse_formula: nmse(&cap_ref, &cap_formula).expect("non-empty capacity series"),
        capacity_nmse_at_poles: nmse(&cap_ref, &cap_at_poles).expect("non-empty capacity series"),
    };
    Ok(Sweep { rows, summary })
}

/// Symmetric pole path x = y, log-spaced from f_p2 to 20·f_p2. The default
/// path for the capacity-vs-bandwidth curve.
pub fn symmetric_pole_path(led: &LedModel, points: usize) -> Vec<LinkPoles> {
    let n = points.max(2);
    let step = 20f64.ln() / (n - 1) as f64;
    (0..n)
        .map(|i| {
            let x = led.f_p2 * (step * i as f64).exp();
            LinkPoles::new(x, x)
        })
        .collect()
}

/// (bandwidth, capacity) pairs along a pole path at the configured
/// attenuation.
pub fn capacity_bandwidth_curve(
    cfg: &LinkConfig,
    led: &LedModel,
    pole_path: &[LinkPoles],
) -> Vec<(f64, f64)> {
    let a = alpha(cfg, led);
    pole_path
        .iter()
        .map(|p| (analytic_bandwidth(p), capacity_from_poles(p, a)))
        .collect()
}
