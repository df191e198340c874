//! Small-block wiretap codes analysed exactly.
//!
//! A [`BinningPlan`] turns a per-symbol distribution into binning rates, a
//! [`WiretapCodebook`] realises them as a seeded superposition code with
//! double binning, and the `exact_*` functions enumerate every output
//! sequence to get equivocation and MAP error probability without sampling.

mod codebook;
mod exact;
mod plan;
mod trend;

pub use codebook::{
    even_mapping, generate_codebook, generate_with_structure, structure_size, uniform_prior, CodeStructure,
    MessageSpace, PairSelection, WiretapCodebook, MAX_CODEWORDS,
};
pub use exact::{
    enumeration_size, exact_equivocation, exact_error_probability, EquivocationReport, ErrorReport,
    MAX_ENUMERATION_WORK, MAX_OUTPUT_BITS,
};
pub use plan::{plan_binning, BinningPlan, CodingDistribution, RateTargets};
pub use trend::{secrecy_trend, SeedOutcome, TrendRow};
