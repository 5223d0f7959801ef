//! Entropy bookkeeping for a bipartition under global unitary evolution.
//!
//! For an uncorrelated input the change in local entropies equals the
//! mutual information created; with any initial correlation it can be made
//! negative. This module holds the balance report, the explicit
//! constructions showing a decrease, the relative-arrow classification and a
//! search over the unitary group that finds decreasing evolutions.

mod balance;
mod constructions;
mod nelder_mead;
mod neighborhood;
mod search;
mod sweep;

pub use balance::{
    entropy_balance, entropy_balance_with_state, schrodinger_check, EntropyBalanceReport, RelativeArrow, ARROW_TOLERANCE,
    PRODUCT_THRESHOLD,
};
pub use constructions::{
    binary_entropy, classical_correlated_demo, classical_decorrelating_unitary, classically_correlated_state,
    decorrelating_unitary, near_product_state,
};
pub use nelder_mead::{minimize, Minimum, NelderMeadOptions};
pub use neighborhood::{bures_neighborhood_sample, NeighborhoodSample, MIN_NEIGHBORHOOD_RADIUS};
pub use search::{
    generator_basis, search_entropy_decreasing_unitary, unitary_from_coefficients, SearchOutcome, UnitarySearchConfig,
    MIN_SEARCH_MUTUAL_INFORMATION,
};
pub use sweep::{exchange_interaction, weak_coupling_sweep, SweepCell, SweepGrid};
