//! Universal inequalities for the eigenvalues `0 < σ₁ ≤ σ₂ ≤ …` of the
//! Dirichlet problem `Δu + α grad(div u) = −σu` on a bounded domain in `Rⁿ`.
//!
//! Everything here is a pure function of a [`Spectrum`] (and, for the
//! Levine–Protter bound, a [`DomainGeometry`]). [`evaluate_all`] turns the
//! individual formulas into [`BoundRecord`]s with verdicts.

mod coefficients;
mod evaluate;
mod inequalities;
mod record;

use alloc::string::String;
use alloc::vec::Vec;

pub use coefficients::{
    alpha_threshold, big_a, big_l, coefficient_c, levitin_parnovski_coefficient, unit_sphere_measure,
};
pub use evaluate::{evaluate_all, ErrorBudget};
pub use inequalities::{
    average_upper, chebyshev_sum_check, cheng_yang_sides, gap_upper, hook_sum_ratio, index_growth_upper,
    levine_protter_lower, levitin_parnovski_gap, low_order_check, low_order_sides, quadratic_form_sides,
    yang_type_next_upper, INDEX_GROWTH_CONSTANT,
};
pub use record::{BoundKind, BoundRecord, Side, Verdict};

/// Relative verification tolerance used for exact (synthetic) spectra.
pub const SYNTHETIC_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BoundsError {
    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),
    #[error("index k = {k} needs {needed} eigenvalues but only {available} are available")]
    NotEnoughValues { k: usize, needed: usize, available: usize },
    #[error("alpha = {alpha} is at or above the threshold {threshold} for n = {n}; L is only used below it")]
    AlphaAboveThreshold { n: usize, alpha: f64, threshold: f64 },
    #[error("negative discriminant {discriminant:e} in the quadratic bound at k = {k}")]
    NegativeDiscriminant { k: usize, discriminant: f64 },
    #[error("degenerate gap: sigma_{} equals sigma_{k}", k + 1)]
    DegenerateGap { k: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("invalid geometry: {0}")]
    InvalidGeometry(&'static str),
}

/// Where a spectrum came from.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case", tag = "kind"))]
pub enum SpectrumSource {
    Synthetic,
    Computed {
        mesh: Option<String>,
        residuals: Vec<f64>,
        tolerance: f64,
    },
}

/// Ordered eigenvalues of one problem instance together with `n` and `α`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Spectrum {
    dim: usize,
    alpha: f64,
    values: Vec<f64>,
    source: SpectrumSource,
}

impl Spectrum {
    /// Exact or hand-made eigenvalues.
    pub fn synthetic(dim: usize, alpha: f64, values: Vec<f64>) -> Result<Self, BoundsError> {
        Self::new(dim, alpha, values, SpectrumSource::Synthetic)
    }

    /// Eigenvalues from a solver; every residual must be within `tolerance`.
    pub fn computed(
        dim: usize,
        alpha: f64,
        values: Vec<f64>,
        mesh: Option<String>,
        residuals: Vec<f64>,
        tolerance: f64,
    ) -> Result<Self, BoundsError> {
        if residuals.len() != values.len() {
            return Err(BoundsError::InvalidSpectrum(alloc::format!(
                "{} residuals for {} values",
                residuals.len(),
                values.len()
            )));
        }
        if let Some(i) = residuals.iter().position(|r| !(*r <= tolerance)) {
            return Err(BoundsError::InvalidSpectrum(alloc::format!(
                "residual {:e} of value {} exceeds the solver tolerance {:e}",
                residuals[i],
                i + 1,
                tolerance
            )));
        }
        Self::new(
            dim,
            alpha,
            values,
            SpectrumSource::Computed {
                mesh,
                residuals,
                tolerance,
            },
        )
    }

    pub fn new(dim: usize, alpha: f64, values: Vec<f64>, source: SpectrumSource) -> Result<Self, BoundsError> {
        if dim == 0 {
            return Err(BoundsError::InvalidSpectrum("dimension must be at least 1".into()));
        }
        if !(alpha >= 0.0) || !alpha.is_finite() {
            return Err(BoundsError::InvalidSpectrum(alloc::format!(
                "alpha must be finite and non-negative, got {alpha}"
            )));
        }
        if values.is_empty() {
            return Err(BoundsError::InvalidSpectrum("no eigenvalues".into()));
        }
        if let Some(i) = values.iter().position(|v| !(*v > 0.0) || !v.is_finite()) {
            return Err(BoundsError::InvalidSpectrum(alloc::format!(
                "value {} = {} is not positive and finite",
                i + 1,
                values[i]
            )));
        }
        if let Some(i) = values.windows(2).position(|w| w[1] < w[0]) {
            return Err(BoundsError::InvalidSpectrum(alloc::format!(
                "values are not sorted: sigma_{} = {} > sigma_{} = {}",
                i + 1,
                values[i],
                i + 2,
                values[i + 1]
            )));
        }
        Ok(Self {
            dim,
            alpha,
            values,
            source,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn source(&self) -> &SpectrumSource {
        &self.source
    }

    /// `σ_i`, 1-based.
    pub fn sigma(&self, i: usize) -> f64 {
        self.values[i - 1]
    }
}

/// Axis-aligned box; only its dimension and volume enter the bounds.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DomainGeometry {
    edges: Vec<f64>,
}

impl DomainGeometry {
    pub fn from_edges(edges: Vec<f64>) -> Result<Self, BoundsError> {
        if edges.is_empty() {
            return Err(BoundsError::InvalidGeometry("at least one edge is required"));
        }
        if edges.iter().any(|e| !(*e > 0.0) || !e.is_finite()) {
            return Err(BoundsError::InvalidGeometry("edge lengths must be positive and finite"));
        }
        Ok(Self { edges })
    }

    pub fn dim(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn volume(&self) -> f64 {
        self.edges.iter().product()
    }
}
