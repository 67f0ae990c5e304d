//! One-shot Holevo quantity `max χ` over pure-state ensembles.
//!
//! Each iteration alternates a Blahut–Arimoto reweighting of the
//! probabilities, `pᵢ ← pᵢ 2^{D(Λρᵢ‖Λρ̄)} / Z`, with a projected gradient
//! step on the unit sphere for every state vector. The landscape is not
//! concave in the states, so the result is a feasible witness and hence a
//! lower bound on the maximum, never a certificate of optimality.

use rayon::prelude::*;
use serde::Serialize;

use super::{select_best, Argmax, OptimizerReport, RestartOutcome, StallCounter, TracePoint};
use crate::channels::QuantumChannel;
use crate::error::Result;
use crate::matrix::{eigh_unchecked, ComplexMatrix};
use crate::measures::{holevo_chi, Ensemble};
use crate::sampling::{random_pure_ket, SeededRng, STREAM_HOLEVO};
use crate::state::{clamped_spectrum, shannon_entropy, DensityMatrix};

const LOG_FLOOR: f64 = 1e-12;
const MIN_STEP: f64 = 1e-14;
const MAX_STEP: f64 = 64.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HolevoOptions {
    /// Number of ensemble members; `None` means `dim_in²`.
    pub ensemble_size: Option<usize>,
    pub tol: f64,
    pub max_iter: usize,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for HolevoOptions {
    fn default() -> Self {
        Self {
            ensemble_size: None,
            tol: 1e-6,
            max_iter: 5000,
            restarts: 5,
            seed: 0,
        }
    }
}

/// Working ensemble: unit kets with weights, plus the channel outputs.
struct Candidate {
    kets: Vec<ComplexMatrix>,
    probs: Vec<f64>,
    outputs: Vec<ComplexMatrix>,
    output_entropies: Vec<f64>,
    average: ComplexMatrix,
    chi: f64,
}

impl Candidate {
    fn new(ch: &QuantumChannel, kets: Vec<ComplexMatrix>, probs: Vec<f64>) -> Result<Self> {
        let outputs: Vec<ComplexMatrix> = kets.iter().map(|k| ch.apply_matrix(&ComplexMatrix::outer(k))).collect();
        let output_entropies = outputs
            .iter()
            .map(|o| Ok(shannon_entropy(&clamped_spectrum(o)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::assemble(ch, kets, probs, outputs, output_entropies)
    }

    fn reweighted(&self, ch: &QuantumChannel, probs: Vec<f64>) -> Result<Self> {
        Self::assemble(
            ch,
            self.kets.clone(),
            probs,
            self.outputs.clone(),
            self.output_entropies.clone(),
        )
    }

    fn assemble(
        ch: &QuantumChannel,
        kets: Vec<ComplexMatrix>,
        probs: Vec<f64>,
        outputs: Vec<ComplexMatrix>,
        output_entropies: Vec<f64>,
    ) -> Result<Self> {
        let d = ch.dim_out();
        let mut average = ComplexMatrix::zeros(d, d);
        for (p, o) in probs.iter().zip(&outputs) {
            average = &average + &o.scale_real(*p);
        }
        let conditional: f64 = probs.iter().zip(&output_entropies).map(|(p, s)| p * s).sum();
        let chi = shannon_entropy(&clamped_spectrum(&average)?) - conditional;
        Ok(Self {
            kets,
            probs,
            outputs,
            output_entropies,
            average,
            chi,
        })
    }
}

fn log2_floor(m: &ComplexMatrix) -> ComplexMatrix {
    eigh_unchecked(m).map(|x| x.max(LOG_FLOOR).log2())
}

/// Blahut–Arimoto update of the weights for fixed states.
fn reweight(ch: &QuantumChannel, cand: &Candidate) -> Result<Candidate> {
    let log_avg = log2_floor(&cand.average);
    // D(σᵢ‖σ̄) = −S(σᵢ) − Tr σᵢ log σ̄
    let divergences: Vec<f64> = cand
        .outputs
        .iter()
        .zip(&cand.output_entropies)
        .map(|(o, s)| -s - o.inner(&log_avg).re)
        .collect();
    let top = divergences.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let raw: Vec<f64> = cand
        .probs
        .iter()
        .zip(&divergences)
        .map(|(p, d)| p * (d - top).exp2())
        .collect();
    let z: f64 = raw.iter().sum();
    cand.reweighted(ch, raw.into_iter().map(|x| x / z).collect())
}

/// Ascent directions `pᵢ (Mᵢψᵢ − ⟨ψᵢ|Mᵢ|ψᵢ⟩ψᵢ)` with
/// `Mᵢ = Λ†(log₂Λρᵢ) − Λ†(log₂Λρ̄)`.
fn state_directions(ch: &QuantumChannel, cand: &Candidate) -> Vec<ComplexMatrix> {
    let avg_term = ch.adjoint_apply(&log2_floor(&cand.average));
    cand.kets
        .iter()
        .zip(&cand.outputs)
        .zip(&cand.probs)
        .map(|((ket, out), p)| {
            let m = &ch.adjoint_apply(&log2_floor(out)) - &avg_term;
            let mk = &m * ket;
            let along = ket.inner(&mk);
            (&mk - &ket.scale(along)).scale_real(*p)
        })
        .collect()
}

fn step_states(kets: &[ComplexMatrix], dirs: &[ComplexMatrix], eta: f64) -> Vec<ComplexMatrix> {
    kets.iter()
        .zip(dirs)
        .map(|(k, g)| {
            let moved = k + &g.scale_real(eta);
            let n = moved.frobenius_norm();
            moved.scale_real(1.0 / n)
        })
        .collect()
}

fn run_restart(ch: &QuantumChannel, opts: &HolevoOptions, restart: usize) -> Result<RestartOutcome<Candidate>> {
    let d = ch.dim_in();
    let size = opts.ensemble_size.unwrap_or(d * d).max(1);
    let mut rng = SeededRng::new(opts.seed, STREAM_HOLEVO + restart as u64);
    let kets = (0..size).map(|_| random_pure_ket(&mut rng, d)).collect();
    let mut cand = Candidate::new(ch, kets, vec![1.0 / size as f64; size])?;
    let mut trace = vec![TracePoint {
        restart,
        iteration: 0,
        value: cand.chi,
    }];
    let mut stall = StallCounter::new(opts.tol);
    let mut eta = 1.0;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < opts.max_iter {
        iterations += 1;
        let before = cand.chi;

        let reweighted = reweight(ch, &cand)?;
        if reweighted.chi >= cand.chi {
            cand = reweighted;
        }

        let dirs = state_directions(ch, &cand);
        let mut moved = false;
        while eta >= MIN_STEP {
            let trial = Candidate::new(ch, step_states(&cand.kets, &dirs, eta), cand.probs.clone())?;
            if trial.chi >= cand.chi {
                cand = trial;
                moved = true;
                break;
            }
            eta *= 0.5;
        }
        if moved {
            eta = (eta * 2.0).min(MAX_STEP);
        } else {
            eta = 1.0;
        }

        trace.push(TracePoint {
            restart,
            iteration: iterations,
            value: cand.chi,
        });
        if stall.step(before, cand.chi) {
            converged = true;
            break;
        }
    }

    Ok(RestartOutcome {
        value: cand.chi,
        argmax: cand,
        iterations,
        converged,
        trace,
    })
}

/// Best pure-state ensemble found for `χ`. The value is a lower bound on
/// the one-shot maximum.
pub fn compute_holevo(ch: &QuantumChannel, opts: &HolevoOptions) -> Result<OptimizerReport> {
    let restarts = opts.restarts.max(1);
    let outcomes = (0..restarts)
        .into_par_iter()
        .map(|r| run_restart(ch, opts, r))
        .collect::<Result<Vec<_>>>()?;
    let (best_restart, best, trace, restart_values) = select_best(outcomes);
    let d = ch.dim_in();
    let states = best
        .argmax
        .kets
        .iter()
        .map(|k| DensityMatrix::from_raw(ComplexMatrix::outer(k), vec![d]))
        .collect();
    let ensemble = Ensemble::new(best.argmax.probs.clone(), states)?;
    let value = holevo_chi(&ensemble, ch)?;
    Ok(OptimizerReport {
        value,
        argmax: Argmax::Ensemble(ensemble),
        iterations: best.iterations,
        trace,
        converged: best.converged,
        restarts_used: restarts,
        best_restart,
        restart_values,
        seed: opts.seed,
    })
}
