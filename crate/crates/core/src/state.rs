//! Density matrices over tensor-product spaces and the entropy primitives
//! built on them.
//!
//! Subsystems are positional: index 0 of `dims` is the leftmost tensor
//! factor. All entropies are in bits.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{eigh, eigh_unchecked, ComplexMatrix, HERMITIAN_TOL, ZERO};

pub const TRACE_TOL: f64 = 1e-9;
/// Eigenvalues below `-POSITIVITY_TOL` make a matrix an invalid state.
pub const POSITIVITY_TOL: f64 = 1e-9;

/// Trace-one positive semidefinite operator with a subsystem layout.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    dims: Vec<usize>,
}

impl DensityMatrix {
    /// Validated constructor: square, Hermitian, unit trace, PSD, and
    /// `dims` multiplying out to the matrix dimension.
    pub fn new(matrix: ComplexMatrix, dims: Vec<usize>) -> Result<Self> {
        check_dims(&matrix, &dims)?;
        let rho = Self { matrix, dims };
        rho.validate()?;
        Ok(rho)
    }

    /// Single-subsystem state.
    pub fn from_matrix(matrix: ComplexMatrix) -> Result<Self> {
        let d = matrix.rows();
        Self::new(matrix, vec![d])
    }

    /// Skips validation; symmetrizes so downstream eigensolvers see an
    /// exactly Hermitian matrix. Callers guarantee the state is physical.
    pub(crate) fn from_raw(matrix: ComplexMatrix, dims: Vec<usize>) -> Self {
        debug_assert_eq!(dims.iter().product::<usize>(), matrix.rows());
        Self {
            matrix: matrix.hermitian_part(),
            dims,
        }
    }

    /// `|ψ⟩⟨ψ|` for a ket, normalized.
    pub fn pure(ket: &ComplexMatrix) -> Result<Self> {
        let d = ket.rows();
        Self::pure_with_dims(ket, vec![d])
    }

    pub fn pure_with_dims(ket: &ComplexMatrix, dims: Vec<usize>) -> Result<Self> {
        if ket.cols() != 1 {
            return Err(Error::Shape("ket must be a column vector".into()));
        }
        let norm = ket.frobenius_norm();
        if norm == 0.0 {
            return Err(Error::Shape("zero vector".into()));
        }
        let v = ket.scale_real(1.0 / norm);
        let m = ComplexMatrix::outer(&v);
        check_dims(&m, &dims)?;
        Ok(Self::from_raw(m, dims))
    }

    /// Computational basis state `|index⟩⟨index|`.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut m = ComplexMatrix::zeros(dim, dim);
        m[(index, index)] = Complex64::new(1.0, 0.0);
        Self::from_raw(m, vec![dim])
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self::from_raw(ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64), vec![dim])
    }

    /// Checks every state invariant against the crate tolerances.
    pub fn validate(&self) -> Result<()> {
        let residual = self.matrix.hermitian_residual();
        if residual > HERMITIAN_TOL {
            return Err(Error::NotHermitian(residual));
        }
        let tr = self.matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidTrace(tr.re));
        }
        let min = self.min_eigenvalue();
        if min < -POSITIVITY_TOL {
            return Err(Error::NotPositive(min));
        }
        Ok(())
    }

    pub fn min_eigenvalue(&self) -> f64 {
        eigh_unchecked(&self.matrix).values.last().copied().unwrap_or(0.0)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    /// Same matrix with a different subsystem layout.
    pub fn with_dims(&self, dims: Vec<usize>) -> Result<Self> {
        check_dims(&self.matrix, &dims)?;
        Ok(Self {
            matrix: self.matrix.clone(),
            dims,
        })
    }

    /// `self ⊗ other`, concatenating subsystem lists.
    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self::from_raw(self.matrix.kron(&other.matrix), dims)
    }

    /// Convex combination `Σ wᵢ ρᵢ`; weights must sum to one.
    pub fn mixture(weights: &[f64], states: &[DensityMatrix]) -> Result<Self> {
        let first = states.first().ok_or_else(|| Error::Shape("empty mixture".into()))?;
        if weights.len() != states.len() {
            return Err(Error::Shape("weights and states differ in length".into()));
        }
        let mut acc = ComplexMatrix::zeros(first.dim(), first.dim());
        for (w, s) in weights.iter().zip(states) {
            if s.dims != first.dims {
                return Err(Error::Shape("mixture components differ in layout".into()));
            }
            acc = &acc + &s.matrix.scale_real(*w);
        }
        Self::new(acc, first.dims.clone())
    }
}

fn check_dims(matrix: &ComplexMatrix, dims: &[usize]) -> Result<()> {
    if !matrix.is_square() {
        return Err(Error::Shape(format!(
            "density matrix must be square, got {}x{}",
            matrix.rows(),
            matrix.cols()
        )));
    }
    let product: usize = dims.iter().product();
    if dims.is_empty() || product != matrix.rows() {
        return Err(Error::Shape(format!(
            "subsystem dims {:?} do not multiply to {}",
            dims,
            matrix.rows()
        )));
    }
    Ok(())
}

/// Row-major strides for a subsystem layout.
fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * dims[i + 1];
    }
    s
}

/// Offsets contributed by every multi-index over `subsystems`.
fn offsets(dims: &[usize], strides: &[usize], subsystems: &[usize]) -> Vec<usize> {
    let mut out = vec![0usize];
    for &k in subsystems {
        let mut next = Vec::with_capacity(out.len() * dims[k]);
        for &base in &out {
            for digit in 0..dims[k] {
                next.push(base + digit * strides[k]);
            }
        }
        out = next;
    }
    out
}

/// Partial trace of a raw operator with layout `dims`, keeping `keep`
/// (ascending, validated by the caller).
pub(crate) fn partial_trace_matrix(m: &ComplexMatrix, dims: &[usize], keep: &[usize]) -> ComplexMatrix {
    let st = strides(dims);
    let traced: Vec<usize> = (0..dims.len()).filter(|i| !keep.contains(i)).collect();
    let kept_off = offsets(dims, &st, keep);
    let traced_off = offsets(dims, &st, &traced);
    let n = kept_off.len();
    let mut out = ComplexMatrix::zeros(n, n);
    for (r, &kr) in kept_off.iter().enumerate() {
        for (c, &kc) in kept_off.iter().enumerate() {
            let mut acc = ZERO;
            for &t in &traced_off {
                acc += m[(kr + t, kc + t)];
            }
            out[(r, c)] = acc;
        }
    }
    out
}

fn normalize_keep(dims: &[usize], keep: &[usize]) -> Result<Vec<usize>> {
    let mut keep = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if let Some(&bad) = keep.iter().find(|&&k| k >= dims.len()) {
        return Err(Error::SubsystemIndex {
            index: bad,
            count: dims.len(),
        });
    }
    Ok(keep)
}

/// Marginal on the subsystems in `keep`, in their original order.
/// An empty `keep` yields the 1×1 state `[1]`.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let keep = normalize_keep(&rho.dims, keep)?;
    let m = partial_trace_matrix(&rho.matrix, &rho.dims, &keep);
    let dims = if keep.is_empty() {
        vec![1]
    } else {
        keep.iter().map(|&k| rho.dims[k]).collect()
    };
    Ok(DensityMatrix::from_raw(m, dims))
}

/// Reorders subsystems: new factor `j` is old factor `order[j]`.
pub fn permute_subsystems(rho: &DensityMatrix, order: &[usize]) -> Result<DensityMatrix> {
    let n = rho.dims.len();
    let mut seen = vec![false; n];
    if order.len() != n {
        return Err(Error::Shape(format!(
            "permutation of length {} for {} subsystems",
            order.len(),
            n
        )));
    }
    for &o in order {
        if o >= n {
            return Err(Error::SubsystemIndex { index: o, count: n });
        }
        if std::mem::replace(&mut seen[o], true) {
            return Err(Error::Shape(format!("index {o} repeated in permutation")));
        }
    }
    let old_st = strides(&rho.dims);
    let new_dims: Vec<usize> = order.iter().map(|&o| rho.dims[o]).collect();
    // Walking the new layout's subsystems in order and recording old offsets
    // enumerates new indices in row-major order.
    let permuted_strides: Vec<usize> = order.iter().map(|&o| old_st[o]).collect();
    let map = offsets(&new_dims, &permuted_strides, &(0..n).collect::<Vec<_>>());
    let d = rho.dim();
    let m = ComplexMatrix::from_fn(d, d, |r, c| rho.matrix[(map[r], map[c])]);
    Ok(DensityMatrix::from_raw(m, new_dims))
}

/// `Σ pᵢ log₂(1/pᵢ)` with `0 log 0 = 0`.
pub fn shannon_entropy(probs: &[f64]) -> f64 {
    probs.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum()
}

/// Eigenvalues of a state, clamped into `[0, 1]`; anything below
/// `-POSITIVITY_TOL` is rejected.
pub(crate) fn clamped_spectrum(m: &ComplexMatrix) -> Result<Vec<f64>> {
    let values = eigh_unchecked(m).values;
    if let Some(&min) = values.last() {
        if min < -POSITIVITY_TOL {
            return Err(Error::NotPositive(min));
        }
    }
    Ok(values.into_iter().map(|v| v.clamp(0.0, 1.0)).collect())
}

/// Von Neumann entropy in bits of a raw (trusted) state matrix.
pub(crate) fn entropy_of(m: &ComplexMatrix) -> Result<f64> {
    Ok(shannon_entropy(&clamped_spectrum(m)?))
}

/// `S(ρ) = -Tr ρ log₂ ρ`.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    entropy_of(&rho.matrix)
}

/// Canonical purification vector `Σᵢ √λᵢ |i⟩_R |vᵢ⟩`, reference first,
/// reference dimension equal to the state dimension.
pub fn purification_vector(rho: &DensityMatrix) -> Result<ComplexMatrix> {
    let d = rho.dim();
    let e = eigh(&rho.matrix)?;
    let mut psi = ComplexMatrix::zeros(d * d, 1);
    for (i, &lambda) in e.values.iter().enumerate() {
        if lambda < -POSITIVITY_TOL {
            return Err(Error::NotPositive(lambda));
        }
        let amp = lambda.max(0.0).sqrt();
        if amp == 0.0 {
            continue;
        }
        for q in 0..d {
            psi[(i * d + q, 0)] = e.vectors[(q, i)] * amp;
        }
    }
    Ok(psi)
}

/// Pure state on `R ⊗ Q` (dims `[d, d]`) whose `Q` marginal is `rho`.
pub fn purify(rho: &DensityMatrix) -> Result<DensityMatrix> {
    let d = rho.dim();
    let psi = purification_vector(rho)?;
    Ok(DensityMatrix::from_raw(ComplexMatrix::outer(&psi), vec![d, d]))
}

/// Uhlmann fidelity `(Tr √(√ρ σ √ρ))²`.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: sigma.dim(),
        });
    }
    let sqrt_rho = eigh(&rho.matrix)?.map(|x| x.max(0.0).sqrt());
    let inner = sigma.matrix.conjugate_by(&sqrt_rho);
    let root_trace: f64 = eigh_unchecked(&inner).values.iter().map(|&x| x.max(0.0).sqrt()).sum();
    Ok((root_trace * root_trace).min(1.0))
}

/// Transpose of subsystem `subsystem` in the computational basis.
pub fn partial_transpose(rho: &DensityMatrix, subsystem: usize) -> Result<DensityMatrix> {
    let n = rho.dims.len();
    if subsystem >= n {
        return Err(Error::SubsystemIndex {
            index: subsystem,
            count: n,
        });
    }
    let st = strides(&rho.dims);
    let (stride, dk) = (st[subsystem], rho.dims[subsystem]);
    let digit = |idx: usize| (idx / stride) % dk;
    let d = rho.dim();
    let m = ComplexMatrix::from_fn(d, d, |r, c| {
        let (dr, dc) = (digit(r), digit(c));
        let r2 = r - dr * stride + dc * stride;
        let c2 = c - dc * stride + dr * stride;
        rho.matrix[(r2, c2)]
    });
    Ok(DensityMatrix::from_raw(m, rho.dims.clone()))
}
