//! Entanglement-assisted capacity `max_ρ S(R:ΛQ)` by entropic mirror ascent.
//!
//! With `|ψ_ρ⟩` the purification of the input, the joint output on `R B E`
//! is pure, so the objective collapses to
//! `I(ρ) = S(ρ) + S(Λ(ρ)) − S(Λ_c(ρ))` with `Λ_c` the complementary channel.
//! It is concave in `ρ`; its Euclidean gradient is
//! `G = −log₂ρ − Λ†(log₂Λ(ρ)) + Λ_c†(log₂Λ_c(ρ)) − I/ln 2`.
//!
//! Iterates are kept in log form, `ρ = exp(H)` with `Tr exp(H) = 1`, and
//! updated as `H ← H + ηG` followed by renormalization. The step starts at
//! `η = 1`, is halved until the objective does not decrease, and doubled
//! after each accepted step.

use rayon::prelude::*;
use serde::Serialize;

use super::{select_best, Argmax, OptimizerReport, RestartOutcome, StallCounter, TracePoint};
use crate::channels::QuantumChannel;
use crate::error::{Error, Result};
use crate::matrix::{eigh_unchecked, ComplexMatrix};
use crate::measures::channel_mutual_information;
use crate::sampling::{random_density, SeededRng, STREAM_CE};
use crate::state::{clamped_spectrum, shannon_entropy, DensityMatrix};

/// Eigenvalue floor inside logarithms of the gradient.
const LOG_FLOOR: f64 = 1e-12;
const MIN_STEP: f64 = 1e-14;
const MAX_STEP: f64 = 64.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CeOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for CeOptions {
    fn default() -> Self {
        Self {
            tol: 1e-6,
            max_iter: 5000,
            restarts: 5,
            seed: 0,
        }
    }
}

fn entropy_raw(m: &ComplexMatrix) -> Result<f64> {
    Ok(shannon_entropy(&clamped_spectrum(m)?))
}

/// `S(ρ) + S(Λρ) − S(Λ_c ρ)` on a raw input state.
pub fn ce_objective(ch: &QuantumChannel, rho: &ComplexMatrix) -> Result<f64> {
    if rho.rows() != ch.dim_in() {
        return Err(Error::DimensionMismatch {
            expected: ch.dim_in(),
            got: rho.rows(),
        });
    }
    let comp = ch.complementary();
    objective_with(ch, &comp, rho)
}

fn objective_with(ch: &QuantumChannel, comp: &QuantumChannel, rho: &ComplexMatrix) -> Result<f64> {
    Ok(entropy_raw(rho)? + entropy_raw(&ch.apply_matrix(rho))? - entropy_raw(&comp.apply_matrix(rho))?)
}

fn log2_floor(m: &ComplexMatrix) -> ComplexMatrix {
    eigh_unchecked(m).map(|x| x.max(LOG_FLOOR).log2())
}

/// Gradient of [`ce_objective`] with respect to the input state.
pub fn ce_gradient(ch: &QuantumChannel, rho: &DensityMatrix) -> Result<ComplexMatrix> {
    if rho.dim() != ch.dim_in() {
        return Err(Error::DimensionMismatch {
            expected: ch.dim_in(),
            got: rho.dim(),
        });
    }
    Ok(gradient_with(ch, &ch.complementary(), rho.matrix()))
}

fn gradient_with(ch: &QuantumChannel, comp: &QuantumChannel, rho: &ComplexMatrix) -> ComplexMatrix {
    let d = rho.rows();
    let own = log2_floor(rho);
    let out = ch.adjoint_apply(&log2_floor(&ch.apply_matrix(rho)));
    let env = comp.adjoint_apply(&log2_floor(&comp.apply_matrix(rho)));
    let shift = ComplexMatrix::identity(d).scale_real(std::f64::consts::LOG2_E);
    let g = &(&(&env - &own) - &out) - &shift;
    g.hermitian_part()
}

/// `exp(H)` normalized to unit trace, together with the shifted `H`.
fn normalized_exp(h: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let e = eigh_unchecked(h);
    let top = e.values[0];
    let log_z = top + e.values.iter().map(|v| (v - top).exp()).sum::<f64>().ln();
    let rho = e.map(|v| (v - log_z).exp());
    let shifted = &e.reconstruct() - &ComplexMatrix::identity(h.rows()).scale_real(log_z);
    (rho.hermitian_part(), shifted.hermitian_part())
}

fn run_restart(
    ch: &QuantumChannel,
    comp: &QuantumChannel,
    opts: &CeOptions,
    restart: usize,
) -> Result<RestartOutcome<ComplexMatrix>> {
    let mut rng = SeededRng::new(opts.seed, STREAM_CE + restart as u64);
    let start = random_density(&mut rng, ch.dim_in());
    let (mut rho, mut h) = normalized_exp(&eigh_unchecked(start.matrix()).map(|x| x.max(LOG_FLOOR).ln()));
    let mut value = objective_with(ch, comp, &rho)?;
    let mut trace = vec![TracePoint {
        restart,
        iteration: 0,
        value,
    }];
    let mut stall = StallCounter::new(opts.tol);
    let mut eta = 1.0;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < opts.max_iter {
        iterations += 1;
        let g = gradient_with(ch, comp, &rho);
        let mut accepted = None;
        while eta >= MIN_STEP {
            let (cand_rho, cand_h) = normalized_exp(&(&h + &g.scale_real(eta)));
            let cand_value = objective_with(ch, comp, &cand_rho)?;
            if cand_value >= value {
                accepted = Some((cand_rho, cand_h, cand_value));
                break;
            }
            eta *= 0.5;
        }
        let Some((new_rho, new_h, new_value)) = accepted else {
            // No step of any size improves: stationary at working precision.
            converged = true;
            break;
        };
        let done = stall.step(value, new_value);
        rho = new_rho;
        h = new_h;
        value = new_value;
        trace.push(TracePoint {
            restart,
            iteration: iterations,
            value,
        });
        if done {
            converged = true;
            break;
        }
        eta = (eta * 2.0).min(MAX_STEP);
    }

    Ok(RestartOutcome {
        value,
        argmax: rho,
        iterations,
        converged,
        trace,
    })
}

/// Maximizes `S(R:ΛQ)` over input states; the report's value is
/// re-evaluated on the purification route at the returned argmax.
/// Non-convergence is reported through `converged`, not as an error.
pub fn compute_ce(ch: &QuantumChannel, opts: &CeOptions) -> Result<OptimizerReport> {
    let comp = ch.complementary();
    let restarts = opts.restarts.max(1);
    let outcomes = (0..restarts)
        .into_par_iter()
        .map(|r| run_restart(ch, &comp, opts, r))
        .collect::<Result<Vec<_>>>()?;
    let (best_restart, best, trace, restart_values) = select_best(outcomes);
    let argmax = DensityMatrix::from_raw(best.argmax, vec![ch.dim_in()]);
    let value = channel_mutual_information(ch, &argmax)?;
    Ok(OptimizerReport {
        value,
        argmax: Argmax::State(argmax),
        iterations: best.iterations,
        trace,
        converged: best.converged,
        restarts_used: restarts,
        best_restart,
        restart_values,
        seed: opts.seed,
    })
}
