//! Modeling and capacity-optimal pre-equalizer design for IMDD visible-light
//! communication links.
//!
//! The library views the optical link (signal source → equalizer → power
//! amplifier → LED → free-space channel → photodiode → LNA) as a cascade of
//! two-port networks and exposes:
//!
//! - [`twoport`]: complex 2×2 scattering/transfer matrix algebra and cascading,
//! - [`circuits`]: the second-order LED equivalent circuit, the general
//!   second-order equalizer, zero-pole matching and component synthesis,
//! - [`linkmodel`]: end-to-end frequency response, noise-equivalent bandwidth
//!   (closed form and adaptive quadrature), channel coefficient and IMDD
//!   channel capacity,
//! - [`optimizer`]: attenuation thresholds, regime classification, closed-form
//!   pole placement, numerical refinement and a brute-force grid oracle,
//! - [`bench`]: benchmark equalizer schemes and attenuation sweeps.
//!
//! All frequencies are in Hz; angular-frequency expressions from the circuit
//! analysis are divided by 2π exactly once, at model-derivation time.

pub mod bench;
pub mod circuits;
pub mod linkmodel;
pub mod optimizer;
pub mod twoport;

pub use circuits::{EqualizerModel, EqualizerParams, LedModel, LedParams, RcStage, RlStage};
pub use linkmodel::{GainConvention, IntegrationControl, LinkConfig, LinkPoles};
pub use optimizer::{DesignResult, GridSpec, Regime, Thresholds};
