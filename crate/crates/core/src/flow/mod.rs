//! Fractional Ricci flow: a Caputo-in-`chi` predictor-corrector, the Levi-Civita and
//! canonical right sides, the coupled potential, per-step diagnostics and a restricted
//! breather detector.

mod breather;
mod evolve;
mod ivp;
mod rhs;

pub use breather::{breather_classify, BREATHER_MARGIN, BREATHER_TOL, STEADY_TOL, BlockBreather, Breather, BreatherKind};
pub use evolve::{evolve, FlowHistory, FlowRun, HistoryEntry, StepRecord};
pub use ivp::{caputo_l1_latest, FractionalIvp, Rhs};
pub use rhs::{coupled_potential_rhs, hamilton_rhs_canonical, hamilton_rhs_lc, normalization_lambda, HamiltonRhs};

use crate::error::{Error, Result};
use crate::fraccalc::FractionalOrder;
use crate::geometry::{DMetric, GridChart, NConnectionField};
use crate::perelman::WForm;

/// Which Ricci tensor drives the metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ConnectionMode {
    /// Levi-Civita Ricci in coordinate components, optionally evolving `N`.
    LeviCivita,
    /// Canonical d-connection Ricci blocks pushed to coordinates.
    #[default]
    Canonical,
}

/// Normalizing factor `lambda`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Normalization {
    #[default]
    None,
    /// `lambda = r/5`.
    ROverFive,
    /// `lambda = r/(n+m)`.
    Dimension,
}

/// How the potential `f` and `tau` move with the metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Coupling {
    /// `f` and `tau` frozen.
    #[default]
    Off,
    /// `D f = -Lap f + |Df|^2 - R - S`, `tau` frozen.
    F,
    /// Adds `(n+m)/(2 tau)` to the potential equation and evolves `D tau = -1`.
    W,
}

/// Longest flow span accepted by [`FlowConfig::validate`].
pub const MAX_SPAN: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowConfig {
    pub order: FractionalOrder,
    pub step: f64,
    pub steps: usize,
    pub mode: ConnectionMode,
    pub normalization: Normalization,
    pub coupling: Coupling,
    /// Evolve `N` through `N_j^e g_ae` (Levi-Civita mode only).
    pub evolve_n: bool,
    /// Gradient term of the recorded `W`.
    pub w_form: WForm,
}

impl FlowConfig {
    pub fn new(order: FractionalOrder, step: f64, steps: usize) -> Self {
        Self {
            order,
            step,
            steps,
            mode: ConnectionMode::default(),
            normalization: Normalization::default(),
            coupling: Coupling::default(),
            evolve_n: false,
            w_form: WForm::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::InvalidConfig(format!("step must be positive, got {}", self.step)));
        }
        if self.steps == 0 {
            return Err(Error::InvalidConfig("steps must be at least 1".into()));
        }
        if self.step * self.steps as f64 > MAX_SPAN {
            return Err(Error::InvalidConfig(format!("flow span {} exceeds {MAX_SPAN}", self.step * self.steps as f64)));
        }
        if self.evolve_n && self.mode != ConnectionMode::LeviCivita {
            return Err(Error::InvalidConfig("N evolution needs the Levi-Civita mode".into()));
        }
        Ok(())
    }

    pub fn span(&self) -> f64 {
        self.step * self.steps as f64
    }
}

/// One point of the flow.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowState {
    pub g: DMetric,
    pub n_conn: NConnectionField,
    pub f: Vec<f64>,
    pub tau: f64,
    pub chi: f64,
}

impl FlowState {
    pub fn new(g: DMetric, n_conn: NConnectionField, f: Vec<f64>, tau: f64) -> Result<Self> {
        if g.chart != n_conn.chart {
            return Err(Error::ChartMismatch);
        }
        g.chart.check_len(f.len())?;
        if let Some(p) = f.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidSamples(p));
        }
        if !(tau > 0.0) {
            return Err(Error::NonPositiveTau(tau));
        }
        Ok(Self { g, n_conn, f, tau, chi: 0.0 })
    }

    pub fn chart(&self) -> &GridChart {
        &self.g.chart
    }
}

#[cfg(test)]
mod tests;
