//! Path-preserving channels, their Choi states and Stinespring dilations.

pub mod builders;
mod channel;
mod dilation;
pub mod file;
mod state;

pub use builders::{
    erasure_dilation, identity_channel, pauli_mixture_channel, phase_channel, random_path_channel,
    replace_channel, transpose_channel,
};
pub use channel::{Path, PathChannel, TP_TOL};
pub use dilation::Dilation;
pub use state::{PathSpinState, Preparation};

/// Canonical dilation of `ch`, one environment dimension per Kraus pair.
pub fn dilate(ch: &PathChannel) -> Dilation {
    Dilation::from_channel(ch)
}
