//! JSON documents accepted and emitted by the command-line tool.
//!
//! Complex entries are `[re, im]` pairs and matrices are row-major lists of rows.

use std::path::Path;

use num_complex::Complex64;
use qleak::channel::{depolarizing_global, depolarizing_local, dp_epsilon_bound_depolarizing};
use qleak::{
    CMatrix, ChannelKind, DensityOperator, Encoder, Ensemble, HermitianOperator, Layer, ModelInput,
    Neighbouring, Povm, ProbVector, QuantumChannel, VariationalModel,
};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub type MatrixDoc = Vec<Vec<[f64; 2]>>;

pub fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| CliError::Json {
        path: path.display().to_string(),
        source,
    })
}

pub fn matrix_from_doc(doc: &MatrixDoc, dim: usize, field: &str) -> CliResult<CMatrix> {
    if doc.len() != dim || doc.iter().any(|row| row.len() != dim) {
        return Err(CliError::validation(
            field,
            format!("expected a {dim}x{dim} matrix"),
        ));
    }
    Ok(CMatrix::from_fn(dim, dim, |i, j| {
        let [re, im] = doc[i][j];
        Complex64::new(re, im)
    }))
}

fn rect_from_doc(doc: &MatrixDoc, field: &str) -> CliResult<CMatrix> {
    let rows = doc.len();
    let cols = doc.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 || doc.iter().any(|row| row.len() != cols) {
        return Err(CliError::validation(
            field,
            "rows must be non-empty and of equal length",
        ));
    }
    Ok(CMatrix::from_fn(rows, cols, |i, j| {
        let [re, im] = doc[i][j];
        Complex64::new(re, im)
    }))
}

pub fn matrix_to_doc(m: &CMatrix) -> MatrixDoc {
    (0..m.nrows())
        .map(|i| {
            (0..m.ncols())
                .map(|j| [m[(i, j)].re, m[(i, j)].im])
                .collect()
        })
        .collect()
}

fn indexed(field: &str, i: usize) -> String {
    format!("{field}[{i}]")
}

fn core_at(field: String) -> impl Fn(qleak::Error) -> CliError {
    move |e| CliError::validation(field.clone(), e.to_string())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleDoc {
    pub dimension: usize,
    pub prior: Vec<f64>,
    pub states: Vec<MatrixDoc>,
}

impl EnsembleDoc {
    pub fn from_ensemble(e: &Ensemble) -> Self {
        Self {
            dimension: e.dim(),
            prior: e.prior().as_slice().to_vec(),
            states: e
                .states()
                .iter()
                .map(|s| matrix_to_doc(s.matrix()))
                .collect(),
        }
    }

    pub fn to_ensemble(&self) -> CliResult<Ensemble> {
        if self.dimension == 0 {
            return Err(CliError::validation("dimension", "must be positive"));
        }
        if self.prior.len() != self.states.len() {
            return Err(CliError::validation(
                "prior",
                format!(
                    "has {} entries for {} states",
                    self.prior.len(),
                    self.states.len()
                ),
            ));
        }
        let states = self
            .states
            .iter()
            .enumerate()
            .map(|(i, doc)| {
                let field = indexed("states", i);
                let m = matrix_from_doc(doc, self.dimension, &field)?;
                let op = HermitianOperator::new(m).map_err(core_at(field.clone()))?;
                DensityOperator::new(op).map_err(core_at(field))
            })
            .collect::<CliResult<Vec<_>>>()?;
        let prior = ProbVector::new(self.prior.clone()).map_err(core_at("prior".into()))?;
        Ensemble::new(prior, states).map_err(core_at("prior".into()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(
    tag = "kind",
    content = "params",
    rename_all = "snake_case",
    deny_unknown_fields
)]
pub enum ChannelDoc {
    DepolarizingGlobal { p: f64, d: usize },
    DepolarizingLocal { p: f64, qubits: usize },
    Kraus { operators: Vec<MatrixDoc> },
}

impl ChannelDoc {
    pub fn to_channel(&self) -> CliResult<QuantumChannel> {
        match self {
            ChannelDoc::DepolarizingGlobal { p, d } => {
                depolarizing_global(*p, *d).map_err(core_at("channel.params".into()))
            }
            ChannelDoc::DepolarizingLocal { p, qubits } => {
                depolarizing_local(*p, *qubits).map_err(core_at("channel.params".into()))
            }
            ChannelDoc::Kraus { operators } => {
                let kraus = operators
                    .iter()
                    .enumerate()
                    .map(|(i, k)| rect_from_doc(k, &indexed("channel.params.operators", i)))
                    .collect::<CliResult<Vec<_>>>()?;
                QuantumChannel::new(kraus).map_err(core_at("channel.params.operators".into()))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum NeighbouringDoc {
    #[default]
    AllPairs,
    TraceDistance {
        kappa: f64,
    },
    Pairs {
        pairs: Vec<[usize; 2]>,
    },
}

impl NeighbouringDoc {
    pub fn to_core(&self) -> Neighbouring {
        match self {
            NeighbouringDoc::AllPairs => Neighbouring::AllPairs,
            NeighbouringDoc::TraceDistance { kappa } => Neighbouring::TraceDistance(*kappa),
            NeighbouringDoc::Pairs { pairs } => {
                Neighbouring::ExplicitPairs(pairs.iter().map(|[a, b]| (*a, *b)).collect())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DpCheckDoc {
    pub channel: ChannelDoc,
    pub ensemble: EnsembleDoc,
    /// Defaults to the known privacy level when the channel is depolarizing.
    #[serde(default)]
    pub epsilon_nats: Option<f64>,
    #[serde(default)]
    pub delta: f64,
    #[serde(default)]
    pub neighbouring: NeighbouringDoc,
}

impl DpCheckDoc {
    pub fn epsilon_for(&self, ch: &QuantumChannel) -> CliResult<f64> {
        if let Some(eps) = self.epsilon_nats {
            return Ok(eps);
        }
        let (p, d) = match ch.kind() {
            ChannelKind::DepolarizingGlobal { p } => (p, ch.out_dim()),
            ChannelKind::DepolarizingLocal { p, qubits } => (p, 1 << qubits),
            ChannelKind::Kraus => {
                return Err(CliError::validation(
                    "epsilon_nats",
                    "required for channels given by Kraus operators",
                ))
            }
        };
        Ok(dp_epsilon_bound_depolarizing(p, d)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EncoderDoc {
    Basis,
    Angle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InputDoc {
    Index(usize),
    Angles(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayerDoc {
    pub ry: Vec<f64>,
    pub rz: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDoc {
    pub qubits: usize,
    pub encoder: EncoderDoc,
    pub layers: Vec<LayerDoc>,
    /// Class operators; defaults to the computational basis.
    #[serde(default)]
    pub povm: Option<Vec<MatrixDoc>>,
    /// Defaults to every basis index for the basis encoder.
    #[serde(default)]
    pub inputs: Option<Vec<InputDoc>>,
    /// Defaults to uniform.
    #[serde(default)]
    pub prior: Option<Vec<f64>>,
}

/// A model together with the inputs it is evaluated on.
#[derive(Debug, Clone)]
pub struct ModelJob {
    pub model: VariationalModel,
    pub inputs: Vec<ModelInput>,
    pub prior: ProbVector,
}

impl ModelDoc {
    pub fn to_job(&self) -> CliResult<ModelJob> {
        if self.qubits == 0 || self.qubits > qleak::vqml::MAX_QUBITS {
            return Err(CliError::validation(
                "qubits",
                format!(
                    "must be in 1..={}, got {}",
                    qleak::vqml::MAX_QUBITS,
                    self.qubits
                ),
            ));
        }
        let dim = 1usize << self.qubits;
        let encoder = match self.encoder {
            EncoderDoc::Basis => Encoder::Basis,
            EncoderDoc::Angle => Encoder::Angle,
        };
        let povm = match &self.povm {
            None => Povm::computational_basis(dim),
            Some(docs) => {
                let elements = docs
                    .iter()
                    .enumerate()
                    .map(|(i, m)| {
                        let field = indexed("povm", i);
                        HermitianOperator::new(matrix_from_doc(m, dim, &field)?)
                            .map_err(core_at(field))
                    })
                    .collect::<CliResult<Vec<_>>>()?;
                Povm::new(elements).map_err(core_at("povm".into()))?
            }
        };
        let layers = self
            .layers
            .iter()
            .map(|l| Layer {
                ry: l.ry.clone(),
                rz: l.rz.clone(),
            })
            .collect();
        let model = VariationalModel::new(self.qubits, encoder, layers, povm)
            .map_err(core_at("layers".into()))?;
        let inputs: Vec<ModelInput> = match (&self.inputs, encoder) {
            (Some(xs), _) => xs
                .iter()
                .map(|x| match x {
                    InputDoc::Index(i) => ModelInput::Index(*i),
                    InputDoc::Angles(a) => ModelInput::Angles(a.clone()),
                })
                .collect(),
            (None, Encoder::Basis) => (0..dim).map(ModelInput::Index).collect(),
            (None, Encoder::Angle) => {
                return Err(CliError::validation(
                    "inputs",
                    "required for the angle encoder",
                ))
            }
        };
        if inputs.is_empty() {
            return Err(CliError::validation(
                "inputs",
                "at least one input is required",
            ));
        }
        for (i, x) in inputs.iter().enumerate() {
            model.encode(x).map_err(core_at(indexed("inputs", i)))?;
        }
        let prior = match &self.prior {
            Some(p) if p.len() != inputs.len() => {
                return Err(CliError::validation(
                    "prior",
                    format!("has {} entries for {} inputs", p.len(), inputs.len()),
                ))
            }
            Some(p) => ProbVector::new(p.clone()).map_err(core_at("prior".into()))?,
            None => ProbVector::uniform(inputs.len())?,
        };
        Ok(ModelJob {
            model,
            inputs,
            prior,
        })
    }
}
