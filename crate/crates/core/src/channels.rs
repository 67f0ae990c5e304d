//! Kraus-represented quantum channels.
//!
//! A channel `Λ(ρ) = Σ Kᵢ ρ Kᵢ†` is stored exactly as given; Kraus sets are
//! never canonicalized. The Stinespring isometry `V = Σ Kᵢ ⊗ |i⟩_E` orders
//! the output system before the environment, so the environment dimension
//! of the dilation and of the complementary channel equals the Kraus count.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{eigh_unchecked, pauli, ComplexMatrix, ZERO};
use crate::state::{partial_trace, partial_trace_matrix, partial_transpose, DensityMatrix, POSITIVITY_TOL};

/// Frobenius tolerance on `Σ K†K − I`.
pub const COMPLETENESS_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuantumChannel {
    dim_in: usize,
    dim_out: usize,
    kraus: Vec<ComplexMatrix>,
    name: String,
}

/// `‖Σ K†K − I‖_F` for a Kraus list acting on dimension `dim_in`.
pub fn completeness_residual(kraus: &[ComplexMatrix], dim_in: usize) -> f64 {
    let mut acc = ComplexMatrix::zeros(dim_in, dim_in);
    for k in kraus {
        acc = &acc + &(&k.adjoint() * k);
    }
    (&acc - &ComplexMatrix::identity(dim_in)).frobenius_norm()
}

/// Builds a channel from user-provided Kraus operators.
pub fn validate(kraus: Vec<ComplexMatrix>, dim_in: usize, dim_out: usize) -> Result<QuantumChannel> {
    QuantumChannel::new(kraus, dim_in, dim_out, "custom")
}

impl QuantumChannel {
    pub fn new(kraus: Vec<ComplexMatrix>, dim_in: usize, dim_out: usize, name: impl Into<String>) -> Result<Self> {
        if kraus.len() > dim_in * dim_out {
            return Err(Error::Shape(format!(
                "{} Kraus operators exceed the {} needed for a {}->{} channel",
                kraus.len(),
                dim_in * dim_out,
                dim_in,
                dim_out
            )));
        }
        Self::new_unbounded(kraus, dim_in, dim_out, name)
    }

    /// Like [`QuantumChannel::new`] without the Kraus-count ceiling; used for
    /// derived channels whose Kraus sets may be linearly dependent.
    fn new_unbounded(
        kraus: Vec<ComplexMatrix>,
        dim_in: usize,
        dim_out: usize,
        name: impl Into<String>,
    ) -> Result<Self> {
        if kraus.is_empty() {
            return Err(Error::Shape("a channel needs at least one Kraus operator".into()));
        }
        if dim_in == 0 || dim_out == 0 {
            return Err(Error::Shape("channel dimensions must be positive".into()));
        }
        for (i, k) in kraus.iter().enumerate() {
            if k.rows() != dim_out || k.cols() != dim_in {
                return Err(Error::Shape(format!(
                    "Kraus operator {} is {}x{}, expected {}x{}",
                    i,
                    k.rows(),
                    k.cols(),
                    dim_out,
                    dim_in
                )));
            }
        }
        let residual = completeness_residual(&kraus, dim_in);
        if residual > COMPLETENESS_TOL {
            return Err(Error::Completeness { residual });
        }
        Ok(Self {
            dim_in,
            dim_out,
            kraus,
            name: name.into(),
        })
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// `Σ K X K†` on a raw operator.
    pub fn apply_matrix(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let mut acc = ComplexMatrix::zeros(self.dim_out, self.dim_out);
        for k in &self.kraus {
            acc = &acc + &x.conjugate_by(k);
        }
        acc
    }

    /// Heisenberg-picture adjoint `Λ†(Y) = Σ K† Y K`.
    pub fn adjoint_apply(&self, y: &ComplexMatrix) -> ComplexMatrix {
        let mut acc = ComplexMatrix::zeros(self.dim_in, self.dim_in);
        for k in &self.kraus {
            acc = &acc + &(&(&k.adjoint() * y) * k);
        }
        acc
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != self.dim_in {
            return Err(Error::DimensionMismatch {
                expected: self.dim_in,
                got: rho.dim(),
            });
        }
        Ok(DensityMatrix::from_raw(
            self.apply_matrix(rho.matrix()),
            vec![self.dim_out],
        ))
    }

    /// Applies the channel to subsystem `acted`, identity on the others.
    pub fn apply_extended(&self, rho: &DensityMatrix, acted: usize) -> Result<DensityMatrix> {
        let dims = rho.dims();
        if acted >= dims.len() {
            return Err(Error::SubsystemIndex {
                index: acted,
                count: dims.len(),
            });
        }
        if dims[acted] != self.dim_in {
            return Err(Error::DimensionMismatch {
                expected: self.dim_in,
                got: dims[acted],
            });
        }
        let left = ComplexMatrix::identity(dims[..acted].iter().product());
        let right = ComplexMatrix::identity(dims[acted + 1..].iter().product());
        let mut out_dims = dims.to_vec();
        out_dims[acted] = self.dim_out;
        let n: usize = out_dims.iter().product();
        let mut acc = ComplexMatrix::zeros(n, n);
        for k in &self.kraus {
            let full = left.kron(k).kron(&right);
            acc = &acc + &rho.matrix().conjugate_by(&full);
        }
        Ok(DensityMatrix::from_raw(acc, out_dims))
    }

    /// `Λ ⊗ Λ'` with Kraus operators `Kᵢ ⊗ K'ⱼ`.
    pub fn tensor(&self, other: &QuantumChannel) -> QuantumChannel {
        let kraus = self
            .kraus
            .iter()
            .flat_map(|a| other.kraus.iter().map(move |b| a.kron(b)))
            .collect();
        QuantumChannel {
            dim_in: self.dim_in * other.dim_in,
            dim_out: self.dim_out * other.dim_out,
            kraus,
            name: format!("{}⊗{}", self.name, other.name),
        }
    }

    /// `self ∘ first`.
    pub fn compose(&self, first: &QuantumChannel) -> Result<QuantumChannel> {
        if first.dim_out != self.dim_in {
            return Err(Error::DimensionMismatch {
                expected: self.dim_in,
                got: first.dim_out,
            });
        }
        let kraus = self
            .kraus
            .iter()
            .flat_map(|b| first.kraus.iter().map(move |a| b * a))
            .collect();
        Self::new_unbounded(
            kraus,
            first.dim_in,
            self.dim_out,
            format!("{}∘{}", self.name, first.name),
        )
    }

    /// Channel `ρ ↦ Λ(U ρ U†)`.
    pub fn precompose_unitary(&self, u: &ComplexMatrix) -> Result<QuantumChannel> {
        let unitary = Self::new(vec![u.clone()], u.cols(), u.rows(), "unitary")?;
        self.compose(&unitary)
    }

    pub fn stinespring(&self) -> Isometry {
        let env = self.kraus.len();
        let mut v = ComplexMatrix::zeros(self.dim_out * env, self.dim_in);
        for (e, k) in self.kraus.iter().enumerate() {
            for o in 0..self.dim_out {
                for i in 0..self.dim_in {
                    v[(o * env + e, i)] = k[(o, i)];
                }
            }
        }
        Isometry {
            matrix: v,
            dim_in: self.dim_in,
            dim_out: self.dim_out,
            dim_env: env,
        }
    }

    /// Channel from the input to the environment of the Stinespring dilation.
    pub fn complementary(&self) -> QuantumChannel {
        let env = self.kraus.len();
        let kraus = (0..self.dim_out)
            .map(|o| ComplexMatrix::from_fn(env, self.dim_in, |e, i| self.kraus[e][(o, i)]))
            .collect();
        QuantumChannel {
            dim_in: self.dim_in,
            dim_out: env,
            kraus,
            name: format!("{}^c", self.name),
        }
    }

    /// Normalized Choi state `(I ⊗ Λ)|Ω⟩⟨Ω|`, reference first, with
    /// `|Ω⟩ = Σᵢ |ii⟩ / √d`.
    pub fn choi(&self) -> DensityMatrix {
        let d = self.dim_in;
        let mut omega = ComplexMatrix::zeros(d * d, 1);
        for i in 0..d {
            omega[(i * d + i, 0)] = Complex64::new(1.0 / (d as f64).sqrt(), 0.0);
        }
        let phi = DensityMatrix::from_raw(ComplexMatrix::outer(&omega), vec![d, d]);
        self.apply_extended(&phi, 1).expect("Choi input matches channel")
    }

    /// PPT test on the Choi state. Exact for qubit-to-qubit channels only,
    /// which is all that is accepted.
    pub fn is_entanglement_breaking(&self) -> Result<bool> {
        if self.dim_in != 2 || self.dim_out != 2 {
            return Err(Error::Unsupported(format!(
                "entanglement-breaking test needs a qubit channel, got {}->{}",
                self.dim_in, self.dim_out
            )));
        }
        let pt = partial_transpose(&self.choi(), 0)?;
        let min = eigh_unchecked(pt.matrix()).values.last().copied().unwrap_or(0.0);
        Ok(min >= -POSITIVITY_TOL)
    }
}

/// Stinespring isometry with the output system ahead of the environment.
#[derive(Clone, Debug, PartialEq)]
pub struct Isometry {
    pub matrix: ComplexMatrix,
    pub dim_in: usize,
    pub dim_out: usize,
    pub dim_env: usize,
}

impl Isometry {
    /// `‖V†V − I‖_F`.
    pub fn isometry_residual(&self) -> f64 {
        (&(&self.matrix.adjoint() * &self.matrix) - &ComplexMatrix::identity(self.dim_in)).frobenius_norm()
    }

    /// `VρV†` on `out ⊗ env`.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != self.dim_in {
            return Err(Error::DimensionMismatch {
                expected: self.dim_in,
                got: rho.dim(),
            });
        }
        Ok(DensityMatrix::from_raw(
            rho.matrix().conjugate_by(&self.matrix),
            vec![self.dim_out, self.dim_env],
        ))
    }

    /// `Tr_E VρV†`.
    pub fn output_marginal(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        partial_trace(&self.apply(rho)?, &[0])
    }

    /// `Tr_out VρV†`.
    pub fn environment_marginal(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        let joint = self.apply(rho)?;
        let m = partial_trace_matrix(joint.matrix(), joint.dims(), &[1]);
        Ok(DensityMatrix::from_raw(m, vec![self.dim_env]))
    }
}

/// Built-in channel families.
#[derive(Clone, Debug, PartialEq)]
pub enum ChannelKind {
    Identity,
    /// `ρ ↦ (1−p)ρ + p I/d`.
    Depolarizing {
        p: f64,
    },
    /// `ρ ↦ (1−p)ρ + p diag(ρ)`.
    Dephasing {
        p: f64,
    },
    /// Qubit decay `|1⟩ → |0⟩` with probability `gamma`.
    AmplitudeDamping {
        gamma: f64,
    },
    /// With probability `p` the output is the flag `|d⟩`, the last basis
    /// vector of the enlarged `d+1` output space.
    Erasure {
        p: f64,
    },
    /// Replaces every input with `state`.
    Constant {
        state: DensityMatrix,
    },
}

impl ChannelKind {
    pub fn label(&self) -> &'static str {
        match self {
            ChannelKind::Identity => "identity",
            ChannelKind::Depolarizing { .. } => "depolarizing",
            ChannelKind::Dephasing { .. } => "dephasing",
            ChannelKind::AmplitudeDamping { .. } => "amplitude_damping",
            ChannelKind::Erasure { .. } => "erasure",
            ChannelKind::Constant { .. } => "constant",
        }
    }
}

fn check_unit(name: &str, value: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::Parameter {
            name: name.into(),
            value,
        });
    }
    Ok(())
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Generalized Pauli `X^a Z^b` in dimension `d`.
fn weyl(d: usize, a: usize, b: usize) -> ComplexMatrix {
    let omega = 2.0 * std::f64::consts::PI / d as f64;
    ComplexMatrix::from_fn(d, d, |r, c| {
        if r == (c + a) % d {
            Complex64::from_polar(1.0, omega * (b * c) as f64)
        } else {
            ZERO
        }
    })
}

/// Channel from the zoo. `dim` is ignored for `Constant`, whose dimension
/// comes from its state; amplitude damping is qubit-only.
pub fn make_channel(kind: &ChannelKind, dim: usize) -> Result<QuantumChannel> {
    if dim < 2 && !matches!(kind, ChannelKind::Constant { .. }) {
        return Err(Error::Unsupported(format!("channel dimension {dim} < 2")));
    }
    let id = ComplexMatrix::identity(dim);
    let (kraus, dim_in, dim_out, name) = match kind {
        ChannelKind::Identity => (vec![id], dim, dim, "identity".to_string()),
        ChannelKind::Depolarizing { p } => {
            check_unit("p", *p)?;
            let kraus = if dim == 2 {
                vec![
                    id.scale_real((1.0 - 0.75 * p).sqrt()),
                    pauli::x().scale_real((p / 4.0).sqrt()),
                    pauli::y().scale_real((p / 4.0).sqrt()),
                    pauli::z().scale_real((p / 4.0).sqrt()),
                ]
            } else {
                let d2 = (dim * dim) as f64;
                let mut ops = vec![id.scale_real((1.0 - p + p / d2).sqrt())];
                for a in 0..dim {
                    for b in 0..dim {
                        if (a, b) != (0, 0) {
                            ops.push(weyl(dim, a, b).scale_real((p / d2).sqrt()));
                        }
                    }
                }
                ops
            };
            (kraus, dim, dim, format!("depolarizing(p={p})"))
        }
        ChannelKind::Dephasing { p } => {
            check_unit("p", *p)?;
            let kraus = if dim == 2 {
                vec![
                    id.scale_real((1.0 - p / 2.0).sqrt()),
                    pauli::z().scale_real((p / 2.0).sqrt()),
                ]
            } else {
                let mut ops = vec![id.scale_real((1.0 - p).sqrt())];
                for i in 0..dim {
                    let mut proj = ComplexMatrix::zeros(dim, dim);
                    proj[(i, i)] = real(p.sqrt());
                    ops.push(proj);
                }
                ops
            };
            (kraus, dim, dim, format!("dephasing(p={p})"))
        }
        ChannelKind::AmplitudeDamping { gamma } => {
            check_unit("gamma", *gamma)?;
            if dim != 2 {
                return Err(Error::Unsupported(
                    "amplitude damping is defined for qubits only".into(),
                ));
            }
            let k0 = ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, (1.0 - gamma).sqrt()]]);
            let k1 = ComplexMatrix::from_real_rows(&[&[0.0, gamma.sqrt()], &[0.0, 0.0]]);
            (vec![k0, k1], 2, 2, format!("amplitude_damping(gamma={gamma})"))
        }
        ChannelKind::Erasure { p } => {
            check_unit("p", *p)?;
            let mut keep = ComplexMatrix::zeros(dim + 1, dim);
            for i in 0..dim {
                keep[(i, i)] = real((1.0 - p).sqrt());
            }
            let mut ops = vec![keep];
            for i in 0..dim {
                let mut flag = ComplexMatrix::zeros(dim + 1, dim);
                flag[(dim, i)] = real(p.sqrt());
                ops.push(flag);
            }
            (ops, dim, dim + 1, format!("erasure(p={p})"))
        }
        ChannelKind::Constant { state } => {
            state.validate()?;
            let d_in = dim.max(1);
            let d_out = state.dim();
            let e = eigh_unchecked(state.matrix());
            let mut ops = Vec::new();
            for (k, &lambda) in e.values.iter().enumerate() {
                if lambda <= 1e-14 {
                    continue;
                }
                for i in 0..d_in {
                    let mut op = ComplexMatrix::zeros(d_out, d_in);
                    for o in 0..d_out {
                        op[(o, i)] = e.vectors[(o, k)] * lambda.sqrt();
                    }
                    ops.push(op);
                }
            }
            (ops, d_in, d_out, "constant".to_string())
        }
    };
    QuantumChannel::new(kraus, dim_in, dim_out, name)
}

/// Constant channel onto `|0⟩⟨0|` in dimension `dim`.
pub fn constant_ground(dim: usize) -> QuantumChannel {
    make_channel(
        &ChannelKind::Constant {
            state: DensityMatrix::basis(dim, 0),
        },
        dim,
    )
    .expect("valid constant channel")
}

pub fn identity(dim: usize) -> QuantumChannel {
    make_channel(&ChannelKind::Identity, dim).expect("valid identity channel")
}

/// The channels the acceptance checks sweep over.
pub fn zoo() -> Vec<QuantumChannel> {
    let kinds = [
        ChannelKind::Identity,
        ChannelKind::Dephasing { p: 0.3 },
        ChannelKind::Dephasing { p: 1.0 },
        ChannelKind::Depolarizing { p: 0.5 },
        ChannelKind::Depolarizing { p: 0.9 },
        ChannelKind::AmplitudeDamping { gamma: 0.5 },
    ];
    let mut out: Vec<QuantumChannel> = kinds
        .iter()
        .map(|k| make_channel(k, 2).expect("zoo parameters are valid"))
        .collect();
    out.push(constant_ground(2));
    out
}
