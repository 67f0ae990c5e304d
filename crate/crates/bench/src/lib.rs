//! Shared fixtures for the criterion benches.

use qcap_core::channels::{make_channel, ChannelKind, QuantumChannel};
use qcap_core::sampling::{random_hermitian, SeededRng};
use qcap_core::ComplexMatrix;

pub fn amplitude_damping(gamma: f64) -> QuantumChannel {
    make_channel(&ChannelKind::AmplitudeDamping { gamma }, 2).expect("valid gamma")
}

pub fn depolarizing(p: f64) -> QuantumChannel {
    make_channel(&ChannelKind::Depolarizing { p }, 2).expect("valid p")
}

/// Seeded Hermitian matrix for eigensolver benches.
pub fn hermitian(dim: usize) -> ComplexMatrix {
    random_hermitian(&mut SeededRng::new(0, dim as u64), dim)
}
