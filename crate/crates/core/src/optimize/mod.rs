//! Numerical maximization of the capacity expressions and empirical checks
//! of the bounds relating them.

mod bounds;
mod ce;
mod holevo;

use serde::Serialize;

use crate::measures::Ensemble;
use crate::state::DensityMatrix;

pub use bounds::{
    check_additivity, check_cqfb_bound, check_cqfb_bound_with, AdditivityReport, BoundCheckOptions, BoundCheckReport,
    VIOLATION_MARGIN,
};
pub use ce::{ce_gradient, ce_objective, compute_ce, CeOptions};
pub use holevo::{compute_holevo, HolevoOptions};

/// Consecutive small relative changes required before declaring convergence.
pub const STALL_WINDOW: usize = 5;

/// Where the optimum was found.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Argmax {
    State(DensityMatrix),
    Ensemble(Ensemble),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TracePoint {
    pub restart: usize,
    pub iteration: usize,
    pub value: f64,
}

/// Outcome of a multi-restart ascent. `value` is in bits and is the
/// objective re-evaluated at `argmax`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OptimizerReport {
    pub value: f64,
    pub argmax: Argmax,
    /// Iterations taken by the winning restart.
    pub iterations: usize,
    /// Objective after every accepted step, all restarts.
    pub trace: Vec<TracePoint>,
    /// Convergence flag of the winning restart.
    pub converged: bool,
    pub restarts_used: usize,
    pub best_restart: usize,
    pub restart_values: Vec<f64>,
    pub seed: u64,
}

impl OptimizerReport {
    /// Trace points belonging to one restart, in order.
    pub fn restart_trace(&self, restart: usize) -> impl Iterator<Item = &TracePoint> {
        self.trace.iter().filter(move |t| t.restart == restart)
    }

    /// Largest drop between consecutive trace values of any restart.
    pub fn max_trace_decrease(&self) -> f64 {
        (0..self.restarts_used)
            .flat_map(|r| {
                let values: Vec<f64> = self.restart_trace(r).map(|t| t.value).collect();
                values.windows(2).map(|w| w[0] - w[1]).collect::<Vec<_>>()
            })
            .fold(0.0, f64::max)
    }
}

/// Result of one restart before selection.
struct RestartOutcome<A> {
    value: f64,
    argmax: A,
    iterations: usize,
    converged: bool,
    trace: Vec<TracePoint>,
}

/// Relative-change stopping rule shared by both ascents.
struct StallCounter {
    tol: f64,
    small: usize,
}

impl StallCounter {
    fn new(tol: f64) -> Self {
        Self { tol, small: 0 }
    }

    /// Records a step from `old` to `new`; true once the change has been
    /// below tolerance for `STALL_WINDOW` consecutive steps.
    fn step(&mut self, old: f64, new: f64) -> bool {
        let rel = (new - old).abs() / new.abs().max(1.0);
        if rel < self.tol {
            self.small += 1;
        } else {
            self.small = 0;
        }
        self.small >= STALL_WINDOW
    }
}

/// Picks the highest-valued restart; ties go to the lowest index so the
/// choice does not depend on execution order.
fn select_best<A>(outcomes: Vec<RestartOutcome<A>>) -> (usize, RestartOutcome<A>, Vec<TracePoint>, Vec<f64>) {
    let restart_values: Vec<f64> = outcomes.iter().map(|o| o.value).collect();
    let mut best = 0;
    for (i, v) in restart_values.iter().enumerate() {
        if *v > restart_values[best] {
            best = i;
        }
    }
    let mut trace = Vec::new();
    let mut chosen = None;
    for (i, mut o) in outcomes.into_iter().enumerate() {
        trace.append(&mut o.trace);
        if i == best {
            chosen = Some(o);
        }
    }
    (best, chosen.expect("at least one restart"), trace, restart_values)
}
