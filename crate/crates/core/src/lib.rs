//! Risk-averse supplier selection: total-cost and risk-index objectives over
//! integer workload distributions, an exhaustive baseline solver, a seeded
//! genetic optimizer, GA-based Pareto optimization and uncertainty
//! envelopes over demand time series.

pub mod envelope;
pub mod error;
pub mod ga;
pub mod oracle;
pub mod pareto;
pub mod scm;

pub use envelope::{build_envelope, containment_ratio, load_series, ColumnMap, ContainmentReport, Envelope, TimeSeries};
pub use error::{Error, Result};
pub use ga::{derive_seed, run_ga, GaConfig, GaResult, GenerationStats, ObjectiveKind};
pub use oracle::{
    composition_count, dominates, enumerate, exact_pareto_front, for_each_distribution,
    weighted_sum_optimum, EnumerationReport, FrontPoint,
};
pub use pareto::{front_filter, pareto_distance, pareto_optimize, sweep, Normalization, ParetoResult, SweepResult};
pub use scm::{Breakpoint, Distribution, ObjectivePoint, Scenario, StructuralProfile, SupplierSpec};
