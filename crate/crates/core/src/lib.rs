//! Quantum channel capacity toolkit.
//!
//! Entropies and correlation measures over dense density matrices, Kraus
//! channels with their Stinespring picture, optimizers for the one-shot
//! Holevo quantity and the entanglement-assisted capacity, empirical
//! checks of the conditional mutual information feedback bound and of
//! additivity, and exact dense-coding/teleportation protocols.
//!
//! All information quantities are in bits.

pub mod channel_spec;
pub mod channels;
pub mod error;
pub mod matrix;
pub mod measures;
pub mod optimize;
pub mod protocols;
pub mod sampling;
pub mod state;

pub use channel_spec::ChannelSpec;
pub use channels::{make_channel, ChannelKind, Isometry, QuantumChannel};
pub use error::{Error, Result};
pub use matrix::{eigh, tensor, ComplexMatrix, Eigh};
pub use measures::{
    channel_mutual_information, conditional_mutual_information, holevo_chi, mutual_information, Ensemble,
};
pub use optimize::{
    check_additivity, check_cqfb_bound, compute_ce, compute_holevo, AdditivityReport, BoundCheckReport, CeOptions,
    HolevoOptions, OptimizerReport,
};
pub use protocols::{dense_coding, feedback_equivalence_demo, teleportation, ProtocolReport};
pub use sampling::SeededRng;
pub use state::{partial_trace, purify, von_neumann_entropy, DensityMatrix};
