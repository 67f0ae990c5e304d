//! JSON channel descriptions.
//!
//! Two shapes are accepted:
//!
//! ```json
//! {"kind": "depolarizing", "dim": 2, "params": {"p": 0.5}}
//! {"dim_in": 2, "dim_out": 2, "kraus": [[[1, 0], [0, 0], [0, 0], [1, 0]]]}
//! ```
//!
//! Explicit Kraus matrices are row-major lists of `[re, im]` pairs. Named
//! kinds are `identity`, `depolarizing` (`p`), `dephasing` (`p`),
//! `amplitude_damping` (`gamma`), `erasure` (`p`) and `constant`
//! (optional `state`, a row-major `[re, im]` matrix; default `|0⟩⟨0|`).
//! `dim` defaults to 2.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::channels::{make_channel, validate, ChannelKind, QuantumChannel};
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::state::DensityMatrix;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedSpec {
    pub kind: String,
    #[serde(default)]
    pub params: Map<String, Value>,
    #[serde(default = "default_dim")]
    pub dim: usize,
}

fn default_dim() -> usize {
    2
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitSpec {
    pub dim_in: usize,
    pub dim_out: usize,
    pub kraus: Vec<Vec<[f64; 2]>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum ChannelSpec {
    Named(NamedSpec),
    Explicit(ExplicitSpec),
}

impl ChannelSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text).map_err(|e| Error::ChannelSpec(e.to_string()))?;
        let is_named = value.get("kind").is_some();
        let parsed = if is_named {
            serde_json::from_value(value).map(ChannelSpec::Named)
        } else {
            serde_json::from_value(value).map(ChannelSpec::Explicit)
        };
        parsed.map_err(|e| Error::ChannelSpec(e.to_string()))
    }

    /// Explicit Kraus description of an existing channel.
    pub fn explicit(ch: &QuantumChannel) -> Self {
        ChannelSpec::Explicit(ExplicitSpec {
            dim_in: ch.dim_in(),
            dim_out: ch.dim_out(),
            kraus: ch
                .kraus()
                .iter()
                .map(|k| k.entries().iter().map(|z| [z.re, z.im]).collect())
                .collect(),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("spec serializes")
    }

    /// Builds and validates the channel.
    pub fn to_channel(&self) -> Result<QuantumChannel> {
        match self {
            ChannelSpec::Named(named) => named.to_channel(),
            ChannelSpec::Explicit(explicit) => explicit.to_channel(),
        }
    }
}

fn pairs_to_matrix(pairs: &[[f64; 2]], rows: usize, cols: usize) -> Result<ComplexMatrix> {
    let entries = pairs.iter().map(|[re, im]| Complex64::new(*re, *im)).collect();
    ComplexMatrix::new(rows, cols, entries)
}

impl ExplicitSpec {
    pub fn to_channel(&self) -> Result<QuantumChannel> {
        let kraus = self
            .kraus
            .iter()
            .enumerate()
            .map(|(i, k)| {
                pairs_to_matrix(k, self.dim_out, self.dim_in).map_err(|_| {
                    Error::Shape(format!(
                        "Kraus operator {} has {} entries, expected {}x{} = {}",
                        i,
                        k.len(),
                        self.dim_out,
                        self.dim_in,
                        self.dim_out * self.dim_in
                    ))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        validate(kraus, self.dim_in, self.dim_out)
    }
}

impl NamedSpec {
    fn param(&self, name: &str) -> Result<f64> {
        self.params
            .get(name)
            .and_then(Value::as_f64)
            .ok_or_else(|| Error::ChannelSpec(format!("kind `{}` needs numeric param `{name}`", self.kind)))
    }

    pub fn kind(&self) -> Result<ChannelKind> {
        Ok(match self.kind.as_str() {
            "identity" => ChannelKind::Identity,
            "depolarizing" => ChannelKind::Depolarizing { p: self.param("p")? },
            "dephasing" => ChannelKind::Dephasing { p: self.param("p")? },
            "amplitude_damping" => ChannelKind::AmplitudeDamping {
                gamma: self.param("gamma")?,
            },
            "erasure" => ChannelKind::Erasure { p: self.param("p")? },
            "constant" => {
                let state = match self.params.get("state") {
                    None => DensityMatrix::basis(self.dim, 0),
                    Some(v) => {
                        let pairs: Vec<[f64; 2]> = serde_json::from_value(v.clone())
                            .map_err(|e| Error::ChannelSpec(format!("constant state: {e}")))?;
                        let d = (pairs.len() as f64).sqrt().round() as usize;
                        DensityMatrix::from_matrix(pairs_to_matrix(&pairs, d, d)?)?
                    }
                };
                ChannelKind::Constant { state }
            }
            other => return Err(Error::ChannelSpec(format!("unknown channel kind `{other}`"))),
        })
    }

    pub fn to_channel(&self) -> Result<QuantumChannel> {
        make_channel(&self.kind()?, self.dim)
    }
}

/// Built-in kinds with their parameters, for listings.
pub const KINDS: &[(&str, &[&str])] = &[
    ("identity", &[]),
    ("depolarizing", &["p"]),
    ("dephasing", &["p"]),
    ("amplitude_damping", &["gamma"]),
    ("erasure", &["p"]),
    ("constant", &["state (optional)"]),
];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_depolarizing() {
        let ch = ChannelSpec::from_json(r#"{"kind": "depolarizing", "dim": 2, "params": {"p": 0.5}}"#)
            .unwrap()
            .to_channel()
            .unwrap();
        assert_eq!(ch.kraus().len(), 4);
    }

    #[test]
    fn explicit_identity() {
        let ch = ChannelSpec::from_json(r#"{"dim_in": 2, "dim_out": 2, "kraus": [[[1,0],[0,0],[0,0],[1,0]]]}"#)
            .unwrap()
            .to_channel()
            .unwrap();
        assert_eq!(ch.kraus()[0], ComplexMatrix::identity(2));
    }

    #[test]
    fn declared_dims_must_match_matrices() {
        let err = ChannelSpec::from_json(r#"{"dim_in": 3, "dim_out": 2, "kraus": [[[1,0],[0,0],[0,0],[1,0]]]}"#)
            .unwrap()
            .to_channel()
            .unwrap_err();
        assert!(matches!(err, Error::Shape(_)));
    }

    #[test]
    fn malformed_and_unknown() {
        assert!(ChannelSpec::from_json("{not json").is_err());
        assert!(ChannelSpec::from_json(r#"{"kind": "teleporter"}"#)
            .unwrap()
            .to_channel()
            .is_err());
        assert!(ChannelSpec::from_json(r#"{"kind": "dephasing"}"#)
            .unwrap()
            .to_channel()
            .is_err());
        assert!(ChannelSpec::from_json(r#"{"dim_in": 2}"#).is_err());
    }

    #[test]
    fn constant_with_state() {
        let ch = ChannelSpec::from_json(r#"{"kind": "constant", "params": {"state": [[0.5,0],[0,0],[0,0],[0.5,0]]}}"#)
            .unwrap()
            .to_channel()
            .unwrap();
        let out = ch.apply(&DensityMatrix::basis(2, 1)).unwrap();
        assert!(out.matrix().max_abs_diff(DensityMatrix::maximally_mixed(2).matrix()) < 1e-12);
    }
}
