use crate::error::{Error, Result};
use crate::quantum::{fidelity_and_bures, mutual_information, partial_trace, BipartitionLayout, DensityOperator, Subsystem};
use crate::random::{random_pure_vector, RandomSource};

use super::balance::PRODUCT_THRESHOLD;

/// Smallest Bures radius accepted; below it the mixing weight sinks under
/// the numerical floor of the entropy evaluation.
pub const MIN_NEIGHBORHOOD_RADIUS: f64 = 1e-6;
const BISECTION_STEPS: usize = 80;
const MAX_PERTURBATION_DRAWS: usize = 32;

#[derive(Debug, Clone, PartialEq)]
pub struct NeighborhoodSample {
    pub state: DensityOperator,
    /// Weight `w` of the correlated perturbation in `(1-w) ρ + w σ`.
    pub weight: f64,
    pub bures_distance: f64,
    pub mutual_information: f64,
}

fn mix(a: &DensityOperator, b: &DensityOperator, w: f64) -> DensityOperator {
    DensityOperator::from_valid(a.matrix().scale(1.0 - w) + b.matrix().scale(w))
}

/// A correlated state within Bures distance `delta` of a product state.
///
/// The product state is mixed with a random entangled pure state and the
/// weight is bisected to the largest value whose Bures distance stays within
/// `delta`; Bures distance to `ρ` is non-decreasing in the weight because
/// root fidelity is concave.
pub fn bures_neighborhood_sample(
    product: &DensityOperator,
    layout: BipartitionLayout,
    delta: f64,
    rng: &mut RandomSource,
) -> Result<NeighborhoodSample> {
    if !(delta >= MIN_NEIGHBORHOOD_RADIUS) || !delta.is_finite() {
        return Err(Error::InvalidParameter { name: "delta", value: delta });
    }
    let mi = mutual_information(product, layout)?;
    if mi > PRODUCT_THRESHOLD {
        return Err(Error::NotProduct { mutual_information: mi });
    }
    let dim = layout.joint_dim();
    for _ in 0..MAX_PERTURBATION_DRAWS {
        let perturbation = DensityOperator::pure(&random_pure_vector(dim, rng))?;
        let marginal = partial_trace(&perturbation, layout, Subsystem::System)?;
        if marginal.purity() > 1.0 - 1e-3 {
            continue;
        }
        let distance = |w: f64| -> Result<f64> { Ok(fidelity_and_bures(product, &mix(product, &perturbation, w))?.1) };
        let weight = if distance(1.0)? <= delta {
            1.0
        } else {
            let (mut lo, mut hi) = (0.0, 1.0);
            for _ in 0..BISECTION_STEPS {
                let mid = 0.5 * (lo + hi);
                if distance(mid)? <= delta {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            lo
        };
        if weight <= 0.0 {
            continue;
        }
        let state = mix(product, &perturbation, weight);
        let mutual_information = mutual_information(&state, layout)?;
        if mutual_information > 0.0 {
            let bures_distance = fidelity_and_bures(product, &state)?.1;
            return Ok(NeighborhoodSample { state, weight, bures_distance, mutual_information });
        }
    }
    Err(Error::InvalidParameter { name: "delta", value: delta })
}
