//! Simulation and synthesis of cyclic permutation gates on photonic qudits
//! encoded in orbital angular momentum.
//!
//! The crate has five parts:
//!
//! * [`state`] — exact sparse photon states on the OAM ⊗ spatial-mode space;
//! * [`element`] — primitive optical elements (spiral phase plates, Dove
//!   phases, mode Fourier gates, sorter phase banks, beamsplitters) as exact
//!   unitaries with adjoints and window matrices;
//! * [`network`] — sorter, cyclic-shift and Michelson architectures built
//!   from those elements, with physical resource tallies;
//! * [`mesh`] — compilation of d-mode unitaries (in particular the Fourier
//!   gate) into beamsplitter/phase-shifter meshes, rectangular and butterfly;
//! * [`verify`] — brute-force oracles and the report-producing verification
//!   engine, plus [`format`] for the machine-readable file formats.

pub mod element;
pub mod error;
pub mod format;
pub mod mesh;
pub mod network;
pub mod state;
pub mod verify;
pub mod window;

pub use element::Element;
pub use error::{Error, Result};
pub use mesh::{
    apply_with_fourier_mesh, butterfly_fourier, decompose_rectangular, fourier_matrix,
    haar_unitary, Mesh, MeshScheme,
};
pub use network::{Interferometer, Network, NetworkKind, ResourceTally, Variant};
pub use state::{BasisLabel, CodingSubspace, PhotonState, NORM_TOLERANCE, PRUNE_THRESHOLD};
pub use verify::{cyclic_oracle, matrix_consistency_check, verify_gate, VerificationReport};
pub use window::{OamWindow, WindowedMatrix};
