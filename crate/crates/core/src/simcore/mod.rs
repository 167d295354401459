//! Exact simulation: Fermi-Hubbard Hamiltonians, states and evolution signals.

mod hamiltonian;
mod lattice;
mod signal;
mod state;

pub use hamiltonian::{
    build_fermi_hubbard, build_fermi_hubbard_capped, build_number_operator, build_number_operator_capped, normalize_to_band,
    BandMap, Hamiltonian, DEFAULT_DIM_CAP,
};
pub use lattice::{FermiHubbardParams, Lattice, Spin};
pub use signal::{signal_1d, signal_2d, signal_2d_with_dz, variance, windowed_series, Signal2D, SpectralWeights, TimeSeries1D};
pub use state::{all_secondary_bitstrings, make_secondary_states, secondary_bitstrings, BitString, QuantumState};
