//! Command implementations: structured reports for `design` and `validate`,
//! CSV tables for `response`, `sweep` and `compare`.
//!
//! CSVs are deterministic: comma-separated, header row, every float printed
//! as scientific notation with 12 significant digits.

use crate::config::RunConfig;
use serde::Serialize;
use thiserror::Error;
use vlceq::bench::{sweep_attenuation, BenchError, Sweep};
use vlceq::circuits::{CircuitError, EqualizerModel, LedModel};
use vlceq::linkmodel::{
    analytic_bandwidth, end_to_end_gain, link_response, numeric_bandwidth, LinkConfig, LinkError,
};
use vlceq::optimizer::{closed_form_design, refine_design, DesignError, DesignResult};

#[derive(Debug, Error)]
pub enum CommandError {
    #[error("response table needs at least 2 points, got {0}")]
    TooFewPoints(usize),
    #[error("fmax must be positive, got {0}")]
    BadFmax(f64),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Link(#[from] LinkError),
    #[error(transparent)]
    Design(#[from] DesignError),
    #[error(transparent)]
    Bench(#[from] BenchError),
}

/// Scientific notation with 12 significant digits; the fixed CSV float
/// format.
fn sci(value: f64) -> String {
    format!("{value:.11e}")
}

/// A component value or its degenerate sentinel ("bypass" for R1 → ∞,
/// "short" for R2 = 0).
#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum ComponentValue {
    Ohms(f64),
    Sentinel(&'static str),
}

#[derive(Debug, Clone, Serialize)]
pub struct PolePair {
    pub x_hz: f64,
    pub y_hz: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Components {
    pub r1_ohms: ComponentValue,
    pub l_e_henry: Option<f64>,
    pub r2_ohms: ComponentValue,
    pub c_e_farad: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Conventions {
    pub gain_convention: String,
    pub k_pa_linear: f64,
    pub k_lna_linear: f64,
    pub n0_w_per_hz: f64,
    pub mu: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DesignReport {
    pub regime: String,
    pub h: f64,
    pub alpha: f64,
    pub threshold_h1: f64,
    pub threshold_h2: f64,
    pub poles_closed: PolePair,
    pub poles_refined: PolePair,
    pub components: Components,
    pub bandwidth_closed_hz: f64,
    pub bandwidth_refined_hz: f64,
    pub bandwidth_numeric_hz: f64,
    pub k_c_closed: f64,
    pub capacity_closed_bps: f64,
    pub capacity_formula_bps: f64,
    pub capacity_refined_bps: f64,
    pub conventions: Conventions,
}

fn components_of(design: &DesignResult) -> Components {
    match design.params.stage1 {
        Some(s) => Components {
            r1_ohms: ComponentValue::Ohms(s.r1),
            l_e_henry: Some(s.l_e),
            r2_ohms: ComponentValue::Sentinel("short"),
            c_e_farad: None,
        },
        None => Components {
            r1_ohms: ComponentValue::Sentinel("bypass"),
            l_e_henry: None,
            r2_ohms: ComponentValue::Sentinel("short"),
            c_e_farad: None,
        },
    }
    .with_stage2(design)
}

impl Components {
    fn with_stage2(mut self, design: &DesignResult) -> Self {
        if let Some(s) = design.params.stage2 {
            self.r2_ohms = ComponentValue::Ohms(s.r2);
            self.c_e_farad = Some(s.c_e);
        }
        self
    }
}

fn models(run: &RunConfig) -> Result<(LinkConfig, LedModel), CommandError> {
    let cfg = run.link_config();
    let led = LedModel::new(run.led_params(), cfg.r_g)?;
    Ok((cfg, led))
}

/// Full design report at the configured attenuation.
pub fn cmd_design(run: &RunConfig) -> Result<DesignReport, CommandError> {
    let (cfg, led) = models(run)?;
    let design = refine_design(&cfg, &led, &closed_form_design(&cfg, &led)?);
    let eq = EqualizerModel::new(design.params, cfg.r_g)?;
    let bandwidth_numeric = numeric_bandwidth(&cfg, &led, &eq, &run.integration())?;
    Ok(DesignReport {
        regime: design.regime.to_string(),
        h: cfg.h,
        alpha: design.alpha,
        threshold_h1: design.thresholds.h1,
        threshold_h2: design.thresholds.h2,
        poles_closed: PolePair {
            x_hz: design.poles_closed.x,
            y_hz: design.poles_closed.y,
        },
        poles_refined: PolePair {
            x_hz: design.poles_refined.x,
            y_hz: design.poles_refined.y,
        },
        components: components_of(&design),
        bandwidth_closed_hz: analytic_bandwidth(&design.poles_closed),
        bandwidth_refined_hz: analytic_bandwidth(&design.poles_refined),
        bandwidth_numeric_hz: bandwidth_numeric,
        k_c_closed: end_to_end_gain(&cfg, &led, &design.poles_closed),
        capacity_closed_bps: design.capacity_closed,
        capacity_formula_bps: design.capacity_formula,
        capacity_refined_bps: design.capacity_refined,
        conventions: Conventions {
            gain_convention: run.gain_convention.to_string(),
            k_pa_linear: cfg.k_pa(),
            k_lna_linear: cfg.k_lna(),
            n0_w_per_hz: cfg.n0(),
            mu: cfg.mu,
        },
    })
}

/// CSV frequency-response table of the LED, the designed equalizer and the
/// whole link, 20·log10 magnitudes, log-spaced over four decades up to
/// `fmax`.
pub fn cmd_response(run: &RunConfig, points: usize, fmax: f64) -> Result<String, CommandError> {
    if points < 2 {
        return Err(CommandError::TooFewPoints(points));
    }
    if !(fmax > 0.0 && fmax.is_finite()) {
        return Err(CommandError::BadFmax(fmax));
    }
    let (cfg, led) = models(run)?;
    let design = closed_form_design(&cfg, &led)?;
    let eq = EqualizerModel::new(design.params, cfg.r_g)?;

    let fmin = fmax * 1e-4;
    let step = (fmax / fmin).ln() / (points - 1) as f64;
    let mut out = String::from("f_hz,led_db,eq_db,link_db\n");
    for i in 0..points {
        let f = fmin * (step * i as f64).exp();
        let led_db = 20.0 * led.s21(f).norm().log10();
        let eq_db = 20.0 * eq.s21(f).norm().log10();
        let link_db = 20.0 * link_response(f, &cfg, &led, &eq)?.norm().log10();
        out.push_str(&format!(
            "{},{},{},{}\n",
            sci(f),
            sci(led_db),
            sci(eq_db),
            sci(link_db)
        ));
    }
    Ok(out)
}

fn run_sweep(run: &RunConfig) -> Result<Sweep, CommandError> {
    let (cfg, led) = models(run)?;
    Ok(sweep_attenuation(&cfg, &led, &run.h_values(), &run.grid_spec())?)
}

/// CSV attenuation-sweep table (one row per h).
pub fn cmd_sweep(run: &RunConfig) -> Result<String, CommandError> {
    let sweep = run_sweep(run)?;
    let mut out = String::from(
        "h,regime,x_closed,y_closed,x_oracle,y_oracle,c_closed,c_formula,c_refined,c_oracle,c_bce,c_noeq,bandwidth_opt\n",
    );
    for r in &sweep.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            sci(r.h),
            r.regime,
            sci(r.x_closed),
            sci(r.y_closed),
            sci(r.x_oracle),
            sci(r.y_oracle),
            sci(r.c_closed),
            sci(r.c_formula),
            sci(r.c_refined),
            sci(r.c_oracle),
            sci(r.c_bce),
            sci(r.c_noeq),
            sci(r.bandwidth_opt),
        ));
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidateReport {
    pub h_min: f64,
    pub h_max: f64,
    pub steps: usize,
    pub pole_nmse: f64,
    pub pole_nmse_limit: f64,
    pub pole_check: bool,
    /// NMSE of the closed-form capacity expressions against the grid oracle.
    pub capacity_nmse: f64,
    pub capacity_nmse_limit: f64,
    pub capacity_check: bool,
    /// NMSE of the exact capacity at the closed-form poles (diagnostic).
    pub capacity_nmse_at_poles: f64,
    pub pass: bool,
}

/// Runs the sweep and grades the closed forms against the grid oracle.
pub fn cmd_validate(run: &RunConfig) -> Result<ValidateReport, CommandError> {
    let sweep = run_sweep(run)?;
    let pole_nmse = sweep.summary.pole_nmse;
    let capacity_nmse = sweep.summary.capacity_nmse_formula;
    let pole_check = pole_nmse <= 0.03;
    let capacity_check = capacity_nmse <= 0.05;
    Ok(ValidateReport {
        h_min: run.h_min,
        h_max: run.h_max,
        steps: run.steps,
        pole_nmse,
        pole_nmse_limit: 0.03,
        pole_check,
        capacity_nmse,
        capacity_nmse_limit: 0.05,
        capacity_check,
        capacity_nmse_at_poles: sweep.summary.capacity_nmse_at_poles,
        pass: pole_check && capacity_check,
    })
}

/// CSV scheme-comparison table: the capacity-centric design against the
/// bandwidth-centric equalizer and the bare link.
pub fn cmd_compare(run: &RunConfig) -> Result<String, CommandError> {
    let sweep = run_sweep(run)?;
    let mut out = String::from("h,regime,c_cce,c_bce,c_noeq,c_oracle,bandwidth_cce_hz\n");
    for r in &sweep.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            sci(r.h),
            r.regime,
            sci(r.c_refined),
            sci(r.c_bce),
            sci(r.c_noeq),
            sci(r.c_oracle),
            sci(r.bandwidth_opt),
        ));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_run() -> RunConfig {
        // Keep command-level tests quick: few sweep points, coarser grid.
        serde_json::from_str(r#"{"steps": 6, "grid_coarse": 80}"#).unwrap()
    }

    #[test]
    fn design_report_at_defaults_is_symmetric() {
        let report = cmd_design(&RunConfig::default()).unwrap();
        assert_eq!(report.regime, "Symmetric");
        assert!((report.poles_closed.x_hz - 6.0999e8).abs() / 6.0999e8 < 1e-3);
        assert!((report.capacity_refined_bps - 1.7303e9).abs() / 1.7303e9 < 1e-3);
        assert!(matches!(report.components.r1_ohms, ComponentValue::Ohms(_)));
        assert!(matches!(report.components.r2_ohms, ComponentValue::Ohms(_)));
        assert_eq!(report.conventions.k_pa_linear, 1000.0);
        // Quadrature agrees with the analytic bandwidth at the closed poles.
        let rel = (report.bandwidth_numeric_hz - report.bandwidth_closed_hz).abs()
            / report.bandwidth_closed_hz;
        assert!(rel < 5e-3, "numeric vs analytic bandwidth: {rel}");
    }

    #[test]
    fn design_report_sentinels_in_no_equalizer_regime() {
        let run: RunConfig = serde_json::from_str(r#"{"h": 0.002}"#).unwrap();
        let report = cmd_design(&run).unwrap();
        assert_eq!(report.regime, "NoEqualizer");
        assert!(matches!(
            report.components.r1_ohms,
            ComponentValue::Sentinel("bypass")
        ));
        assert!(matches!(
            report.components.r2_ohms,
            ComponentValue::Sentinel("short")
        ));
        let json = serde_json::to_string(&report).unwrap();
        assert!(json.contains("\"r1_ohms\":\"bypass\""));
        assert!(json.contains("\"r2_ohms\":\"short\""));
    }

    #[test]
    fn design_report_first_order_has_finite_r1_and_short_r2() {
        let run: RunConfig = serde_json::from_str(r#"{"h": 0.01}"#).unwrap();
        let report = cmd_design(&run).unwrap();
        assert_eq!(report.regime, "FirstOrder");
        assert!(matches!(report.components.r1_ohms, ComponentValue::Ohms(v) if v > 0.0));
        assert!(matches!(
            report.components.r2_ohms,
            ComponentValue::Sentinel("short")
        ));
    }

    #[test]
    fn response_rows_are_additive_in_db() {
        let run = RunConfig::default();
        let csv = cmd_response(&run, 50, 1e10).unwrap();
        let cfg = run.link_config();
        let offset_db =
            20.0 * (cfg.resp_led * cfg.h * cfg.resp_pd * cfg.k_lna() * cfg.k_pa()).log10();
        let mut rows = 0;
        for line in csv.lines().skip(1) {
            let cols: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
            let (led_db, eq_db, link_db) = (cols[1], cols[2], cols[3]);
            assert!(
                (led_db + eq_db + offset_db - link_db).abs() < 1e-6,
                "row {line}"
            );
            rows += 1;
        }
        assert_eq!(rows, 50);
    }

    #[test]
    fn response_equalizer_shelf_shape() {
        // The equalizer magnitude rises from its DC floor and flattens out
        // near 0 dB beyond both poles.
        let run = RunConfig::default();
        let csv = cmd_response(&run, 120, 1e10).unwrap();
        let eq_db: Vec<f64> = csv
            .lines()
            .skip(1)
            .map(|l| l.split(',').nth(2).unwrap().parse().unwrap())
            .collect();
        assert!(eq_db.first().unwrap() < &-20.0);
        assert!(eq_db.last().unwrap().abs() < 0.5);
        let max = eq_db.iter().cloned().fold(f64::MIN, f64::max);
        assert!(max <= 0.5, "shelving response should not overshoot, max {max} dB");
    }

    #[test]
    fn response_rejects_degenerate_requests() {
        let run = RunConfig::default();
        assert!(matches!(
            cmd_response(&run, 1, 1e10),
            Err(CommandError::TooFewPoints(1))
        ));
        assert!(matches!(
            cmd_response(&run, 10, -5.0),
            Err(CommandError::BadFmax(_))
        ));
    }

    #[test]
    fn sweep_csv_shape_and_header() {
        let run = small_run();
        let csv = cmd_sweep(&run).unwrap();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "h,regime,x_closed,y_closed,x_oracle,y_oracle,c_closed,c_formula,c_refined,c_oracle,c_bce,c_noeq,bandwidth_opt"
        );
        assert_eq!(lines.count(), 6);
    }

    #[test]
    fn compare_rows_preserve_dominance() {
        let run = small_run();
        let csv = cmd_compare(&run).unwrap();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "h,regime,c_cce,c_bce,c_noeq,c_oracle,bandwidth_cce_hz"
        );
        for line in lines {
            let cols: Vec<&str> = line.split(',').collect();
            let c_cce: f64 = cols[2].parse().unwrap();
            let c_bce: f64 = cols[3].parse().unwrap();
            let c_noeq: f64 = cols[4].parse().unwrap();
            assert!(c_cce >= c_bce * (1.0 - 1e-9), "{line}");
            assert!(c_cce >= c_noeq * (1.0 - 1e-9), "{line}");
        }
    }

    #[test]
    fn compare_default_row_near_h_half() {
        let run: RunConfig =
            serde_json::from_str(r#"{"h_min": 0.5, "h_max": 1.0, "steps": 2}"#).unwrap();
        let csv = cmd_compare(&run).unwrap();
        let row = csv.lines().nth(1).unwrap();
        let c_cce: f64 = row.split(',').nth(2).unwrap().parse().unwrap();
        assert!((c_cce - 1.7303e9).abs() / 1.7303e9 < 1e-3, "{row}");
    }

    #[test]
    fn validate_passes_at_defaults() {
        let run = small_run();
        let report = cmd_validate(&run).unwrap();
        assert!(report.pole_check && report.capacity_check && report.pass);
        assert!(report.pole_nmse <= 0.03);
        assert!(report.capacity_nmse <= 0.05);
    }
}
