//! Information leakage of classical data encoded in quantum states.
//!
//! The crate computes maximal, barycentric and pairwise leakage of an
//! ensemble of density operators, the Holevo quantity and an accessible
//! information lower bound, and checks the inequalities that tie them
//! together. Channels (depolarizing noise in particular) can be applied
//! before measuring leakage, and a small variational classifier shows the
//! trade-off between noise-induced privacy and classification accuracy.
//!
//! Everything is dense and exact up to floating point, and sized for up to
//! six qubits.

pub mod channel;
pub mod divergence;
pub mod error;
pub mod hermitian;
pub mod leakage;
pub mod lp;
pub mod sdp;
pub mod vqml;

pub use channel::{ChannelKind, DpParams, DpReport, Neighbouring, QuantumChannel};
pub use divergence::{ConditionalKernel, ProbVector, RenyiOrder};
pub use error::{Error, Result};
pub use hermitian::{CMatrix, CVector, DensityOperator, HermitianOperator, Spectrum};
pub use leakage::{
    ChainOptions, ChainReport, Ensemble, LeakageCertificate, LeakageKind, LeakageWitness, Povm,
};
pub use sdp::{LmiForm, LmiProgram, PrimalPoint, SdpSolution, SolveStatus};
pub use vqml::{Encoder, Layer, ModelInput, TradeoffRow, VariationalModel};
