//! Two-port network algebra: scattering/transfer matrix conversion and
//! cascade composition.
//!
//! A scattering matrix describes a two-port at a single frequency through its
//! reflection (S11, S22) and transmission (S21, S12) coefficients. The
//! transfer-matrix form turns cascading into ordinary matrix multiplication.
//! Frequency sweeping lives in callers; everything here is stateless algebra
//! on immutable values.

use num_complex::Complex64;
use thiserror::Error;

/// Degeneracy threshold, relative to the largest entry magnitude of the
/// matrix being converted. A network whose forward transmission falls below
/// it has no usable forward path and conversion fails loudly instead of
/// producing infinities.
pub const DEGENERACY_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TwoPortError {
    #[error("degenerate network: |s21| = {magnitude:.3e} (threshold {threshold:.3e}), no forward transmission")]
    DegenerateScattering { magnitude: f64, threshold: f64 },
    #[error("degenerate network: |t11| = {magnitude:.3e} (threshold {threshold:.3e}), forward gain undefined")]
    DegenerateTransfer { magnitude: f64, threshold: f64 },
    #[error("cascade of zero stages")]
    EmptyCascade,
}

/// Per-frequency 2×2 scattering description of a two-port network.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringMatrix {
    /// Input reflection coefficient.
    pub s11: Complex64,
    /// Reverse transmission coefficient.
    pub s12: Complex64,
    /// Forward transmission coefficient.
    pub s21: Complex64,
    /// Output reflection coefficient.
    pub s22: Complex64,
}

impl ScatteringMatrix {
    pub fn new(s11: Complex64, s12: Complex64, s21: Complex64, s22: Complex64) -> Self {
        Self { s11, s12, s21, s22 }
    }

    /// Ideal matched through connection: S = [[0, 1], [1, 0]].
    pub fn ideal_through() -> Self {
        Self::new(
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
        )
    }

    /// Ideal unilateral amplifier with gain `k`: S = [[0, 0], [k, 0]].
    pub fn ideal_amplifier(k: f64) -> Self {
        Self::new(
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(k, 0.0),
            Complex64::new(0.0, 0.0),
        )
    }

    fn max_entry_magnitude(&self) -> f64 {
        self.s11
            .norm()
            .max(self.s12.norm())
            .max(self.s21.norm())
            .max(self.s22.norm())
    }
}

/// Per-frequency 2×2 transfer (chain) description of a two-port network.
/// Cascading two-ports multiplies their transfer matrices in signal order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferMatrix {
    pub t11: Complex64,
    pub t12: Complex64,
    pub t21: Complex64,
    pub t22: Complex64,
}

impl TransferMatrix {
    pub fn new(t11: Complex64, t12: Complex64, t21: Complex64, t22: Complex64) -> Self {
        Self { t11, t12, t21, t22 }
    }

    pub fn identity() -> Self {
        Self::new(
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
        )
    }

    fn max_entry_magnitude(&self) -> f64 {
        self.t11
            .norm()
            .max(self.t12.norm())
            .max(self.t21.norm())
            .max(self.t22.norm())
    }

    fn mul(&self, rhs: &TransferMatrix) -> TransferMatrix {
        TransferMatrix {
            t11: self.t11 * rhs.t11 + self.t12 * rhs.t21,
            t12: self.t11 * rhs.t12 + self.t12 * rhs.t22,
            t21: self.t21 * rhs.t11 + self.t22 * rhs.t21,
            t22: self.t21 * rhs.t12 + self.t22 * rhs.t22,
        }
    }
}

/// Converts a scattering matrix to its transfer form:
/// T = [[1/s21, -s22/s21], [s11/s21, (s12·s21 - s11·s22)/s21]].
pub fn scattering_to_transfer(s: &ScatteringMatrix) -> Result<TransferMatrix, TwoPortError> {
    let threshold = DEGENERACY_THRESHOLD * s.max_entry_magnitude();
    if s.s21.norm() <= threshold {
        return Err(TwoPortError::DegenerateScattering {
            magnitude: s.s21.norm(),
            threshold,
        });
    }
    Ok(TransferMatrix {
        t11: Complex64::new(1.0, 0.0) / s.s21,
        t12: -s.s22 / s.s21,
        t21: s.s11 / s.s21,
        t22: (s.s12 * s.s21 - s.s11 * s.s22) / s.s21,
    })
}

/// Inverse of [`scattering_to_transfer`]: s21 = 1/t11, s11 = t21/t11,
/// s22 = -t12/t11, s12 = det(T)/t11.
pub fn transfer_to_scattering(t: &TransferMatrix) -> Result<ScatteringMatrix, TwoPortError> {
    let threshold = DEGENERACY_THRESHOLD * t.max_entry_magnitude();
    if t.t11.norm() <= threshold {
        return Err(TwoPortError::DegenerateTransfer {
            magnitude: t.t11.norm(),
            threshold,
        });
    }
    let det = t.t11 * t.t22 - t.t12 * t.t21;
    Ok(ScatteringMatrix {
        s11: t.t21 / t.t11,
        s12: det / t.t11,
        s21: Complex64::new(1.0, 0.0) / t.t11,
        s22: -t.t12 / t.t11,
    })
}

/// Matrix product of the stages in list order. A single-element list returns
/// that element.
pub fn cascade(stages: &[TransferMatrix]) -> Result<TransferMatrix, TwoPortError> {
    let (first, rest) = stages.split_first().ok_or(TwoPortError::EmptyCascade)?;
    Ok(rest.iter().fold(*first, |acc, t| acc.mul(t)))
}

/// Forward transmission coefficient of a (possibly cascaded) transfer matrix,
/// S21 = 1/T11.
pub fn forward_gain(t: &TransferMatrix) -> Result<Complex64, TwoPortError> {
    let threshold = DEGENERACY_THRESHOLD * t.max_entry_magnitude();
    if t.t11.norm() <= threshold {
        return Err(TwoPortError::DegenerateTransfer {
            magnitude: t.t11.norm(),
            threshold,
        });
    }
    Ok(Complex64::new(1.0, 0.0) / t.t11)
}
