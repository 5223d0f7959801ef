//! Numerics for the arrow of time as correlation growth on small bipartite
//! quantum systems.
//!
//! The crate is `no_std` and needs only `alloc`. Modules:
//!
//! - [`quantum`]: density operators, unitaries, Hamiltonians, partial traces,
//!   entropies, distances, Gibbs states and purifications.
//! - [`random`]: seeded Haar unitaries and random states.
//! - [`arrow`]: entropy balance under global unitaries, the near-product
//!   construction whose local entropies can be lowered, the relative-arrow
//!   check and a search over the unitary group for entropy-decreasing
//!   evolutions.
//! - [`collision`]: a system qubit colliding with fresh reservoir qubits, with
//!   a transcript that allows exact reversal.
//! - [`fluctuation`]: two-point measurement statistics, the Crooks ratio,
//!   Jarzynski equality, effective temperatures and heat flow.
#![no_std]

extern crate alloc;

pub mod arrow;
pub mod collision;
pub mod error;
pub mod fluctuation;
pub mod linalg;
pub mod quantum;
pub mod random;

pub use error::{Error, Result};
pub use quantum::{BipartitionLayout, DensityOperator, Hamiltonian, Subsystem, UnitaryOperator};
pub use random::RandomSource;
