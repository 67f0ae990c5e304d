//! Correlation measures: quantum mutual information, its conditional form,
//! and the Holevo quantity of an ensemble sent through a channel.

use serde::{Deserialize, Serialize};

use crate::channels::QuantumChannel;
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::state::{entropy_of, partial_trace, purify, von_neumann_entropy, DensityMatrix};

/// Probabilities must sum to one within this tolerance.
pub const PROB_TOL: f64 = 1e-9;

/// Weighted list of input states; stands in for a classical–quantum
/// (separable) input `Σ pᵢ |i⟩⟨i|_R ⊗ ρᵢ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ensemble {
    probs: Vec<f64>,
    states: Vec<DensityMatrix>,
}

impl Ensemble {
    pub fn new(probs: Vec<f64>, states: Vec<DensityMatrix>) -> Result<Self> {
        if probs.is_empty() || probs.len() != states.len() {
            return Err(Error::Ensemble(format!(
                "{} probabilities for {} states",
                probs.len(),
                states.len()
            )));
        }
        if let Some(p) = probs.iter().find(|p| p.is_nan() || **p < 0.0) {
            return Err(Error::Ensemble(format!("negative probability {p}")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > PROB_TOL {
            return Err(Error::Ensemble(format!("probabilities sum to {total}")));
        }
        let d = states[0].dim();
        if let Some(bad) = states.iter().find(|s| s.dim() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: bad.dim(),
            });
        }
        Ok(Self { probs, states })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn states(&self) -> &[DensityMatrix] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    /// Average state `Σ pᵢ ρᵢ`.
    pub fn average(&self) -> DensityMatrix {
        let d = self.dim();
        let mut acc = ComplexMatrix::zeros(d, d);
        for (p, s) in self.probs.iter().zip(&self.states) {
            acc = &acc + &s.matrix().scale_real(*p);
        }
        DensityMatrix::from_raw(acc, vec![d])
    }
}

/// `S(A:B) = S(ρ_A) + S(ρ_B) − S(ρ_AB)` for a state with dims `[d_A, d_B]`.
pub fn mutual_information(rho: &DensityMatrix) -> Result<f64> {
    if rho.dims().len() != 2 {
        return Err(Error::Shape(format!(
            "mutual information needs a bipartite state, got dims {:?}",
            rho.dims()
        )));
    }
    let s_a = von_neumann_entropy(&partial_trace(rho, &[0])?)?;
    let s_b = von_neumann_entropy(&partial_trace(rho, &[1])?)?;
    let s_ab = von_neumann_entropy(rho)?;
    Ok(s_a + s_b - s_ab)
}

/// `S(R:ΛQ)` evaluated on the canonical purification of `rho_q`.
pub fn channel_mutual_information(ch: &QuantumChannel, rho_q: &DensityMatrix) -> Result<f64> {
    if rho_q.dim() != ch.dim_in() {
        return Err(Error::DimensionMismatch {
            expected: ch.dim_in(),
            got: rho_q.dim(),
        });
    }
    let psi = purify(rho_q)?;
    let joint = ch.apply_extended(&psi, 1)?;
    mutual_information(&joint)
}

/// `S(R:ΛQ|R′) = S(ρ_RR′) + S(Λ(ρ_QR′)) − S(ρ_R′) − S(Λ(ρ_RQR′))` for a
/// state with dims `[d_R, d_Q, d_R′]`, channel acting on `Q`.
pub fn conditional_mutual_information(rho: &DensityMatrix, ch: &QuantumChannel) -> Result<f64> {
    let dims = rho.dims();
    if dims.len() != 3 {
        return Err(Error::Shape(format!(
            "conditional mutual information needs dims [R, Q, R'], got {:?}",
            dims
        )));
    }
    if dims[1] != ch.dim_in() {
        return Err(Error::DimensionMismatch {
            expected: ch.dim_in(),
            got: dims[1],
        });
    }
    let out = ch.apply_extended(rho, 1)?;
    let s_rr = von_neumann_entropy(&partial_trace(rho, &[0, 2])?)?;
    let s_qr = von_neumann_entropy(&partial_trace(&out, &[1, 2])?)?;
    let s_r = von_neumann_entropy(&partial_trace(rho, &[2])?)?;
    let s_all = von_neumann_entropy(&out)?;
    Ok(s_rr + s_qr - s_r - s_all)
}

/// `χ = S(Λρ̄) − Σ pᵢ S(Λρᵢ)`.
pub fn holevo_chi(ens: &Ensemble, ch: &QuantumChannel) -> Result<f64> {
    if ens.dim() != ch.dim_in() {
        return Err(Error::DimensionMismatch {
            expected: ch.dim_in(),
            got: ens.dim(),
        });
    }
    let avg = entropy_of(&ch.apply_matrix(ens.average().matrix()))?;
    let mut conditional = 0.0;
    for (p, s) in ens.probs().iter().zip(ens.states()) {
        if *p > 0.0 {
            conditional += p * entropy_of(&ch.apply_matrix(s.matrix()))?;
        }
    }
    Ok(avg - conditional)
}
