//! Seeded random states and channels.
//!
//! Every draw comes from ChaCha20 (`rand_chacha`) keyed by a 64-bit seed
//! and a 64-bit stream number, so `(seed, stream)` pins the whole sequence
//! independent of platform and thread scheduling. Consumers pick disjoint
//! stream ranges (see the `STREAM_*` constants) and add a local index such
//! as the restart number.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::channels::QuantumChannel;
use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, ZERO};
use crate::measures::Ensemble;
use crate::state::DensityMatrix;

/// Restart starts for the entanglement-assisted optimizer.
pub const STREAM_CE: u64 = 1 << 32;
/// Restart starts for the Holevo optimizer.
pub const STREAM_HOLEVO: u64 = 2 << 32;
/// Separable samples for the feedback bound check.
pub const STREAM_BOUND: u64 = 3 << 32;
/// Random channels for additivity sweeps and tests.
pub const STREAM_CHANNELS: u64 = 4 << 32;

/// Deterministic generator for one `(seed, stream)` pair.
#[derive(Clone, Debug)]
pub struct SeededRng {
    seed: u64,
    stream: u64,
    inner: ChaCha20Rng,
}

impl SeededRng {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha20Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Self { seed, stream, inner }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    pub fn normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.inner)
    }

    /// Standard complex Gaussian (independent N(0,1) real and imaginary parts).
    pub fn complex_normal(&mut self) -> Complex64 {
        Complex64::new(self.normal(), self.normal())
    }

    pub fn gaussian_matrix(&mut self, rows: usize, cols: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(rows, cols, |_, _| self.complex_normal())
    }

    /// Flat Dirichlet weights via normalized Exp(1) draws.
    pub fn dirichlet_flat(&mut self, n: usize) -> Vec<f64> {
        let raw: Vec<f64> = (0..n).map(|_| Exp1.sample(&mut self.inner)).collect();
        let total: f64 = raw.iter().sum();
        raw.into_iter().map(|x| x / total).collect()
    }
}

/// Hilbert–Schmidt random state `G G† / Tr(G G†)`.
pub fn random_density(rng: &mut SeededRng, dim: usize) -> DensityMatrix {
    let g = rng.gaussian_matrix(dim, dim);
    let m = ComplexMatrix::outer(&g);
    let tr = m.trace().re;
    DensityMatrix::from_raw(m.scale_real(1.0 / tr), vec![dim])
}

/// Haar-random unit vector.
pub fn random_pure_ket(rng: &mut SeededRng, dim: usize) -> ComplexMatrix {
    let g = rng.gaussian_matrix(dim, 1);
    let n = g.frobenius_norm();
    g.scale_real(1.0 / n)
}

pub fn random_pure_state(rng: &mut SeededRng, dim: usize) -> DensityMatrix {
    DensityMatrix::from_raw(ComplexMatrix::outer(&random_pure_ket(rng, dim)), vec![dim])
}

/// Haar-random isometry (`rows ≥ cols`): Gram–Schmidt on Gaussian columns.
pub fn random_isometry(rng: &mut SeededRng, rows: usize, cols: usize) -> ComplexMatrix {
    assert!(rows >= cols, "isometry needs rows >= cols");
    let mut g = rng.gaussian_matrix(rows, cols);
    for c in 0..cols {
        for prev in 0..c {
            let mut overlap = ZERO;
            for r in 0..rows {
                overlap += g[(r, prev)].conj() * g[(r, c)];
            }
            for r in 0..rows {
                let sub = g[(r, prev)] * overlap;
                g[(r, c)] -= sub;
            }
        }
        let norm = (0..rows).map(|r| g[(r, c)].norm_sqr()).sum::<f64>().sqrt();
        for r in 0..rows {
            g[(r, c)] /= norm;
        }
    }
    g
}

pub fn random_unitary(rng: &mut SeededRng, dim: usize) -> ComplexMatrix {
    random_isometry(rng, dim, dim)
}

/// Random Hermitian matrix with Gaussian entries (GUE-like, unnormalized).
pub fn random_hermitian(rng: &mut SeededRng, dim: usize) -> ComplexMatrix {
    rng.gaussian_matrix(dim, dim).hermitian_part()
}

/// Channel whose Stinespring isometry is Haar random. Kraus operator `e` is
/// the block of rows `o * env_dim + e`.
pub fn random_channel(rng: &mut SeededRng, dim_in: usize, dim_out: usize, env_dim: usize) -> Result<QuantumChannel> {
    let env = env_dim.max(1);
    if dim_out * env < dim_in {
        return Err(Error::Shape(format!(
            "no isometry from {dim_in} into {dim_out}x{env} dimensions"
        )));
    }
    let v = random_isometry(rng, dim_out * env, dim_in);
    let kraus = (0..env)
        .map(|e| ComplexMatrix::from_fn(dim_out, dim_in, |o, i| v[(o * env + e, i)]))
        .collect();
    QuantumChannel::new(
        kraus,
        dim_in,
        dim_out,
        format!("random({dim_in}->{dim_out}, env {env})"),
    )
}

/// `Σᵢ pᵢ σᵢ^R ⊗ τᵢ^{QR′}` with flat-Dirichlet weights and Hilbert–Schmidt
/// components; separable across `R : QR′` by construction. Dims are
/// `[d_r, d_q, d_cond]`.
pub fn random_separable_tripartite(
    rng: &mut SeededRng,
    d_r: usize,
    d_q: usize,
    d_cond: usize,
    terms: usize,
) -> DensityMatrix {
    let terms = terms.max(1);
    let weights = rng.dirichlet_flat(terms);
    let n = d_r * d_q * d_cond;
    let mut acc = ComplexMatrix::zeros(n, n);
    for w in weights {
        let sigma = random_density(rng, d_r);
        let tau = random_density(rng, d_q * d_cond);
        acc = &acc + &sigma.matrix().kron(tau.matrix()).scale_real(w);
    }
    DensityMatrix::from_raw(acc, vec![d_r, d_q, d_cond])
}

/// Ensemble of Hilbert–Schmidt states with flat-Dirichlet weights.
pub fn random_ensemble(rng: &mut SeededRng, size: usize, dim: usize) -> Ensemble {
    let probs = rng.dirichlet_flat(size);
    let states = (0..size).map(|_| random_density(rng, dim)).collect();
    Ensemble::new(probs, states).expect("sampled ensemble is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::mutual_information;
    use crate::state::{partial_trace, von_neumann_entropy};

    #[test]
    fn random_density_is_valid_and_deterministic() {
        let a = random_density(&mut SeededRng::new(7, 0), 2);
        let b = random_density(&mut SeededRng::new(7, 0), 2);
        assert_eq!(a, b);
        a.validate().unwrap();
        let c = random_density(&mut SeededRng::new(7, 1), 2);
        assert_ne!(a, c);
    }

    #[test]
    fn one_dimensional_state_is_scalar_one() {
        let r = random_density(&mut SeededRng::new(3, 0), 1);
        assert!((r.matrix()[(0, 0)].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn random_channels_are_complete() {
        let mut rng = SeededRng::new(11, 0);
        for env in 1..4 {
            let ch = random_channel(&mut rng, 2, 3, env).unwrap();
            assert_eq!(ch.kraus().len(), env);
        }
        let a = random_channel(&mut SeededRng::new(5, 9), 2, 2, 2).unwrap();
        let b = random_channel(&mut SeededRng::new(5, 9), 2, 2, 2).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn single_term_separable_state_is_product() {
        let rho = random_separable_tripartite(&mut SeededRng::new(1, 0), 2, 2, 2, 1);
        let grouped = rho.with_dims(vec![2, 4]).unwrap();
        assert!(mutual_information(&grouped).unwrap().abs() < 1e-9);
    }

    #[test]
    fn separable_states_respect_dimension_bound() {
        let mut rng = SeededRng::new(2, 0);
        for _ in 0..20 {
            let rho = random_separable_tripartite(&mut rng, 2, 2, 2, 8);
            rho.validate().unwrap();
            assert_eq!(rho.dims(), &[2, 2, 2]);
            let i = mutual_information(&rho.with_dims(vec![2, 4]).unwrap()).unwrap();
            assert!(i <= 2.0 * 1.0 + 1e-7);
            // separable ⇒ S(R|QR′) ≥ 0, i.e. I ≤ S(R)
            let s_r = von_neumann_entropy(&partial_trace(&rho, &[0]).unwrap()).unwrap();
            assert!(i <= s_r + 1e-7);
        }
    }

    #[test]
    fn dirichlet_weights_sum_to_one() {
        let w = SeededRng::new(0, 0).dirichlet_flat(8);
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(w.iter().all(|&x| x >= 0.0));
    }
}
