//! Flip-flop quantum walk search on regular graphs.
//!
//! The walk lives on the coin-vertex space `C^d ⊗ C^N`, indexed as `h*N + u`.
//! States that carry an ancilla qubit double that space, with the ancilla bit
//! as the most significant stride: index `a*d*N + h*N + u`.
//!
//! [`graph`] builds the graphs and the coin labelling, [`walk`] applies the coin
//! and shift, [`search`] the oracle and ancilla-assisted step, [`spectral`]
//! gathers the eigenvalue relations between the walk, the adjacency matrix and
//! the leaking matrix, and [`hitting`] computes classical hitting times.
//!
//! Dense eigendecompositions refuse to run above a dimension cap, see
//! [`linalg::set_dense_cap`].
//!
//! Builds without `std` (the default `std` feature switches nalgebra to its
//! blocked kernels); `alloc` is always required.
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod error;
pub mod graph;
pub mod hitting;
pub mod linalg;
pub mod report;
pub mod search;
pub mod spectral;
pub mod walk;

pub use error::{Error, Result};
pub use graph::{Bipartition, CoinMap, GraphKind, RegularGraph};
pub use report::{CheckReport, Report};
pub use walk::{FlipFlopWalk, WalkState};

/// Complex amplitude type used by all states.
pub type C64 = num_complex::Complex64;
