//! Knot groups, their SU(2) representations and the quantum gates built
//! from them.
//!
//! The pipeline runs from a diagram ([`diagram`]) to a finitely presented
//! group ([`fpgroup`]), then to verified representations ([`reps`]) and
//! their flat-connection holonomy ([`holonomy`]). [`linkgate`] builds the
//! two-qubit Hamiltonians attached to two-component links and [`compile`]
//! approximates arbitrary SU(2) targets by words in a representation.

pub mod algebra;
pub mod compile;
pub mod diagram;
pub mod fpgroup;
pub mod holonomy;
pub mod linkgate;
pub mod reps;

pub use algebra::{distance, C64, herm_exp, quat_mul, quat_to_su2, tensor, IntMatrix2, Mat2, Mat4, Quaternion};
pub use diagram::{catalog, parse_pd, wirtinger_presentation, CatalogEntry, PDCode};
pub use fpgroup::{braid_presentation, commutator, eliminate_generator, equivalent_relator, free_reduce, Presentation, Word};
pub use reps::{
    fibonacci_rep, kl_family, modular_image, rep_solve, verify, CharacterPoint, KLParams, Representation, SolveOptions,
};
pub use holonomy::{
    berry_connection, connection_from_rep, flatness_residual, loop_transport, word_holonomy, FlatConnection, HamiltonianFamily,
    Loop, SpinFamily, TransportMode,
};
pub use linkgate::{entangling_power, evolve, link_hamiltonian, LinkGateSpec, TwoQubitGate};
pub use compile::{compile_word, coverage, CompileResult, Compiler, CoverageReport};
