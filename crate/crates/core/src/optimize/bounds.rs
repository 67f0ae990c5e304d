//! Empirical checks: the conditional-QMI feedback bound against the
//! entanglement-assisted capacity, and additivity of that capacity.

use serde::Serialize;

use super::{compute_ce, CeOptions};
use crate::channels::QuantumChannel;
use crate::error::{Error, Result};
use crate::measures::conditional_mutual_information;
use crate::sampling::{random_separable_tripartite, SeededRng, STREAM_BOUND};

/// A sample counts as a violation when it exceeds the reference by more
/// than this many bits.
pub const VIOLATION_MARGIN: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundCheckOptions {
    pub samples: usize,
    /// Dimension of the conditioning system `R′`.
    pub conditioner_dim: usize,
    /// Number of product terms in each separable sample.
    pub terms: usize,
    pub seed: u64,
    /// Settings for the capacity the samples are compared against.
    pub ce: CeOptions,
}

impl Default for BoundCheckOptions {
    fn default() -> Self {
        Self {
            samples: 1000,
            conditioner_dim: 2,
            terms: 8,
            seed: 0,
            ce: CeOptions::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundCheckReport {
    pub samples: usize,
    pub max_conditional_qmi: f64,
    pub ce_reference: f64,
    pub violations: usize,
    /// Largest `S(R:ΛQ|R′) − C_E` seen; negative when every sample is below.
    pub worst_margin: f64,
    pub seed: u64,
}

/// Bound check with default conditioner size, term count and optimizer
/// settings.
pub fn check_cqfb_bound(
    ch: &QuantumChannel,
    n_samples: usize,
    conditioner_dim: usize,
    seed: u64,
) -> Result<BoundCheckReport> {
    check_cqfb_bound_with(
        ch,
        &BoundCheckOptions {
            samples: n_samples,
            conditioner_dim,
            seed,
            ce: CeOptions {
                seed,
                ..CeOptions::default()
            },
            ..BoundCheckOptions::default()
        },
    )
}

/// Samples states separable across `R : QR′` (with `d_R = dim_in`) and
/// compares `S(R:ΛQ|R′)` on each with the optimized `C_E`.
pub fn check_cqfb_bound_with(ch: &QuantumChannel, opts: &BoundCheckOptions) -> Result<BoundCheckReport> {
    if opts.samples == 0 {
        return Err(Error::Shape("bound check needs at least one sample".into()));
    }
    let ce = compute_ce(ch, &opts.ce)?;
    if !ce.converged {
        return Err(Error::NotConverged { value: ce.value });
    }
    let mut rng = SeededRng::new(opts.seed, STREAM_BOUND);
    let d = ch.dim_in();
    let mut max_cqmi = f64::NEG_INFINITY;
    let mut violations = 0;
    for _ in 0..opts.samples {
        let rho = random_separable_tripartite(&mut rng, d, d, opts.conditioner_dim.max(1), opts.terms);
        let cqmi = conditional_mutual_information(&rho, ch)?;
        if cqmi > ce.value + VIOLATION_MARGIN {
            violations += 1;
        }
        max_cqmi = max_cqmi.max(cqmi);
    }
    Ok(BoundCheckReport {
        samples: opts.samples,
        max_conditional_qmi: max_cqmi,
        ce_reference: ce.value,
        violations,
        worst_margin: max_cqmi - ce.value,
        seed: opts.seed,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AdditivityReport {
    pub ce_single: f64,
    pub ce_double: f64,
    /// `|C_E(Λ⊗Λ) − 2 C_E(Λ)|`.
    pub gap: f64,
    pub converged: bool,
}

/// Largest single-use input dimension accepted by [`check_additivity`].
pub const MAX_ADDITIVITY_DIM: usize = 3;

pub fn check_additivity(ch: &QuantumChannel, opts: &CeOptions) -> Result<AdditivityReport> {
    if ch.dim_in() > MAX_ADDITIVITY_DIM {
        return Err(Error::Unsupported(format!(
            "additivity check limited to input dimension {MAX_ADDITIVITY_DIM}, got {}",
            ch.dim_in()
        )));
    }
    let single = compute_ce(ch, opts)?;
    let double = compute_ce(&ch.tensor(ch), opts)?;
    Ok(AdditivityReport {
        ce_single: single.value,
        ce_double: double.value,
        gap: (double.value - 2.0 * single.value).abs(),
        converged: single.converged && double.converged,
    })
}
