use serde::{Deserialize, Serialize};

use crate::series::Snapshot;
use crate::spectral::{lebesgue_norm, spatial_derivative, GridFunction};

use super::config::SolverConfig;

/// Per-step scalars, in the column order of `diagnostics.csv`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticRow {
    pub t: f64,
    pub sup_norm: f64,
    pub grad_sup: f64,
    pub l2_norm: f64,
    pub mean: f64,
    /// Trapezoidal `∫₀^t ‖∂ₓu‖_∞`.
    pub blowup_cumulative: f64,
    /// Step that produced this row; 0 for the initial row.
    pub dt: f64,
}

impl DiagnosticRow {
    pub const COLUMNS: [&'static str; 7] = [
        "t",
        "sup_norm",
        "grad_sup",
        "l2_norm",
        "mean",
        "blowup_cumulative",
        "dt",
    ];

    pub fn values(&self) -> [f64; 7] {
        [
            self.t,
            self.sup_norm,
            self.grad_sup,
            self.l2_norm,
            self.mean,
            self.blowup_cumulative,
            self.dt,
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RunStatus {
    Completed,
    NumericalBlowUp { t: f64 },
}

/// Snapshots and diagnostics of one solve.
#[derive(Debug, Clone)]
pub struct RunRecord {
    pub config: SolverConfig,
    pub snapshots: Vec<Snapshot>,
    pub diagnostics: Vec<DiagnosticRow>,
    pub status: RunStatus,
    pub warnings: Vec<String>,
}

impl RunRecord {
    pub(crate) fn start(config: &SolverConfig, u0: &GridFunction) -> Self {
        let grad = spatial_derivative(u0).sup_norm();
        Self {
            config: config.clone(),
            snapshots: vec![Snapshot::new(0.0, u0.clone())],
            diagnostics: vec![DiagnosticRow {
                t: 0.0,
                sup_norm: u0.sup_norm(),
                grad_sup: grad,
                l2_norm: lebesgue_norm(u0, 2.0).expect("p = 2"),
                mean: u0.mean(),
                blowup_cumulative: 0.0,
                dt: 0.0,
            }],
            status: RunStatus::Completed,
            warnings: Vec::new(),
        }
    }

    pub(crate) fn record_step(&mut self, t: f64, dt: f64, u: &GridFunction) {
        let prev = *self.diagnostics.last().expect("initial row");
        let grad = spatial_derivative(u).sup_norm();
        self.diagnostics.push(DiagnosticRow {
            t,
            sup_norm: u.sup_norm(),
            grad_sup: grad,
            l2_norm: lebesgue_norm(u, 2.0).expect("p = 2"),
            mean: u.mean(),
            blowup_cumulative: prev.blowup_cumulative + 0.5 * dt * (grad + prev.grad_sup),
            dt,
        });
    }

    pub fn is_complete(&self) -> bool {
        self.status == RunStatus::Completed
    }

    pub fn final_snapshot(&self) -> &Snapshot {
        self.snapshots.last().expect("records hold the initial snapshot")
    }

    pub fn times(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.t).collect()
    }

    pub fn steps(&self) -> usize {
        self.diagnostics.len() - 1
    }

    /// Snapshots with the (conserved) mean removed, ready for homogeneous analysis.
    pub fn mean_free_snapshots(&self) -> Vec<Snapshot> {
        self.snapshots
            .iter()
            .map(|s| Snapshot::new(s.t, s.u.subtract_mean()))
            .collect()
    }
}
