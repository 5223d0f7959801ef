use crate::error::Result;
use crate::quantum::{
    evolve, mutual_information, partial_trace, von_neumann_entropy, BipartitionLayout, DensityOperator, Subsystem,
    UnitaryOperator,
};

/// Mutual information at or below this counts as an uncorrelated input.
pub const PRODUCT_THRESHOLD: f64 = 1e-9;
/// Sign threshold on `ΔS_S · ΔS_R`.
pub const ARROW_TOLERANCE: f64 = 1e-10;

/// Local entropy changes of one global evolution, in nats.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyBalanceReport {
    pub ds_s: f64,
    pub ds_r: f64,
    /// `ds_s + ds_r`
    pub sum: f64,
    pub mutual_info_initial: f64,
    pub mutual_info_final: f64,
    /// `ds_s * ds_r`
    pub schrodinger_product: f64,
    /// Set when `mutual_info_initial <= 1e-9`; then `sum == mutual_info_final`.
    pub product_input: bool,
}

fn local_entropies(rho: &DensityOperator, layout: BipartitionLayout) -> Result<(f64, f64)> {
    Ok((
        von_neumann_entropy(&partial_trace(rho, layout, Subsystem::System)?)?,
        von_neumann_entropy(&partial_trace(rho, layout, Subsystem::Rest)?)?,
    ))
}

pub fn entropy_balance(rho: &DensityOperator, layout: BipartitionLayout, u: &UnitaryOperator) -> Result<EntropyBalanceReport> {
    entropy_balance_with_state(rho, layout, u).map(|(report, _)| report)
}

/// Same as [`entropy_balance`], also returning the evolved joint state.
pub fn entropy_balance_with_state(
    rho: &DensityOperator,
    layout: BipartitionLayout,
    u: &UnitaryOperator,
) -> Result<(EntropyBalanceReport, DensityOperator)> {
    let mutual_info_initial = mutual_information(rho, layout)?;
    let (s0, r0) = local_entropies(rho, layout)?;
    let after = evolve(rho, u)?;
    let (s1, r1) = local_entropies(&after, layout)?;
    let mutual_info_final = mutual_information(&after, layout)?;
    let (ds_s, ds_r) = (s1 - s0, r1 - r0);
    let report = EntropyBalanceReport {
        ds_s,
        ds_r,
        sum: ds_s + ds_r,
        mutual_info_initial,
        mutual_info_final,
        schrodinger_product: ds_s * ds_r,
        product_input: mutual_info_initial <= PRODUCT_THRESHOLD,
    };
    Ok((report, after))
}

/// Whether system and rest agree on the direction of their entropy change.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RelativeArrow {
    Aligned,
    AntiAligned,
    Degenerate,
}

impl RelativeArrow {
    pub fn label(self) -> &'static str {
        match self {
            Self::Aligned => "aligned",
            Self::AntiAligned => "anti-aligned",
            Self::Degenerate => "degenerate",
        }
    }
}

pub fn schrodinger_check(report: &EntropyBalanceReport) -> RelativeArrow {
    if report.schrodinger_product > ARROW_TOLERANCE {
        RelativeArrow::Aligned
    } else if report.schrodinger_product < -ARROW_TOLERANCE {
        RelativeArrow::AntiAligned
    } else {
        RelativeArrow::Degenerate
    }
}
