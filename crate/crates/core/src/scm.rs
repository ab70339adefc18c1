//! Supply chain domain model: scenarios, workload distributions and the two
//! objective functions (total cost and risk index) together with the
//! scalarized fitness used by the classical genetic optimizer.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One `(threshold, alpha, beta)` step of a structural profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Breakpoint {
    /// Workload share at which this step starts, in `[0, 1]`.
    pub threshold: f64,
    /// Consequence to the supply chain if the supplier fails, in `[0, 1]`.
    pub alpha: f64,
    /// Percentage of value added to the product, in `[0, 1]`.
    pub beta: f64,
}

/// Step function mapping a supplier's workload share to its structural
/// variables `(alpha, beta)`.
///
/// Thresholds are strictly increasing, the first threshold is 0 so every
/// share in `[0, 1]` is covered, and both alpha and beta are non-decreasing
/// across breakpoints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructuralProfile {
    breakpoints: Vec<Breakpoint>,
}

impl StructuralProfile {
    pub fn new(breakpoints: Vec<Breakpoint>) -> Result<Self> {
        if breakpoints.is_empty() {
            return Err(Error::Config("structural profile has no breakpoints".into()));
        }
        if breakpoints[0].threshold != 0.0 {
            return Err(Error::Config(format!(
                "first profile threshold must be 0, got {}",
                breakpoints[0].threshold
            )));
        }
        for pair in breakpoints.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            if b.threshold <= a.threshold {
                return Err(Error::Config(format!(
                    "profile thresholds must be strictly increasing ({} then {})",
                    a.threshold, b.threshold
                )));
            }
            if b.alpha < a.alpha || b.beta < a.beta {
                return Err(Error::Config(
                    "profile alpha/beta must be non-decreasing across breakpoints".into(),
                ));
            }
        }
        for bp in &breakpoints {
            let ok = (0.0..=1.0).contains(&bp.threshold)
                && (0.0..=1.0).contains(&bp.alpha)
                && (0.0..=1.0).contains(&bp.beta);
            if !ok {
                return Err(Error::Config(format!(
                    "profile values must lie in [0,1]: ({}, {}, {})",
                    bp.threshold, bp.alpha, bp.beta
                )));
            }
        }
        Ok(Self { breakpoints })
    }

    /// Profile with a single constant step.
    pub fn constant(alpha: f64, beta: f64) -> Result<Self> {
        Self::new(vec![Breakpoint { threshold: 0.0, alpha, beta }])
    }

    /// The step table fitted to the reference three-supplier instance.
    pub fn default_profile() -> Self {
        let table = [
            (0.00, 0.1, 0.1),
            (0.15, 0.1, 0.2),
            (0.20, 0.2, 0.3),
            (0.30, 0.3, 0.4),
            (0.40, 0.4, 0.4),
            (0.45, 0.5, 0.5),
            (0.50, 0.8, 0.6),
            (0.60, 1.0, 0.8),
            (0.75, 1.0, 1.0),
        ];
        let breakpoints = table
            .iter()
            .map(|&(threshold, alpha, beta)| Breakpoint { threshold, alpha, beta })
            .collect();
        Self::new(breakpoints).expect("default profile table is valid")
    }

    /// Structural variables for a workload share: the `(alpha, beta)` of the
    /// last breakpoint whose threshold does not exceed `share`.
    pub fn values(&self, share: f64) -> (f64, f64) {
        debug_assert!((0.0..=1.0).contains(&share), "share out of range: {share}");
        let mut current = self.breakpoints[0];
        for bp in &self.breakpoints {
            if bp.threshold <= share {
                current = *bp;
            } else {
                break;
            }
        }
        (current.alpha, current.beta)
    }

    pub fn breakpoints(&self) -> &[Breakpoint] {
        &self.breakpoints
    }
}

/// A supplier: unit cost plus the step profile of its structural variables.
#[derive(Debug, Clone, PartialEq)]
pub struct SupplierSpec {
    pub unit_cost: f64,
    pub profile: StructuralProfile,
}

impl SupplierSpec {
    pub fn new(unit_cost: f64, profile: StructuralProfile) -> Result<Self> {
        if !(unit_cost > 0.0) {
            return Err(Error::Config(format!("unit cost must be positive, got {unit_cost}")));
        }
        Ok(Self { unit_cost, profile })
    }
}

/// A supply chain instance: suppliers, demand and the coefficients of the
/// cost constraint and scalarized fitness.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    suppliers: Vec<SupplierSpec>,
    demand: u64,
    retailer_coefficient: f64,
    period_of_interest: f64,
    mean_demand_rate: f64,
    weights: (f64, f64),
}

impl Scenario {
    pub fn new(
        suppliers: Vec<SupplierSpec>,
        demand: u64,
        retailer_coefficient: f64,
        period_of_interest: f64,
        mean_demand_rate: f64,
        weights: (f64, f64),
    ) -> Result<Self> {
        if suppliers.len() < 2 {
            return Err(Error::Config(format!(
                "scenario needs at least 2 suppliers, got {}",
                suppliers.len()
            )));
        }
        if demand == 0 {
            return Err(Error::Config("demand must be at least 1".into()));
        }
        if !(retailer_coefficient > 0.0) {
            return Err(Error::Config(format!(
                "retailer coefficient must be positive, got {retailer_coefficient}"
            )));
        }
        if !(period_of_interest > 0.0) || !(mean_demand_rate > 0.0) {
            return Err(Error::Config(
                "period of interest and mean demand rate must be positive".into(),
            ));
        }
        if weights.0 < 0.0 || weights.1 < 0.0 || weights.0 + weights.1 <= 0.0 {
            return Err(Error::Config(format!(
                "weights must be non-negative with a positive sum, got ({}, {})",
                weights.0, weights.1
            )));
        }
        Ok(Self {
            suppliers,
            demand,
            retailer_coefficient,
            period_of_interest,
            mean_demand_rate,
            weights,
        })
    }

    /// The reference instance: three suppliers with unit costs 2, 3 and 7,
    /// retailer coefficient 4 and the default structural profile.
    pub fn builtin_fig2(demand: u64) -> Self {
        let suppliers = [2.0, 3.0, 7.0]
            .iter()
            .map(|&c| SupplierSpec::new(c, StructuralProfile::default_profile()).unwrap())
            .collect();
        Self::new(suppliers, demand, 4.0, 1.0, 1.0, (0.5, 0.5)).expect("builtin instance is valid")
    }

    /// Same scenario at a different demand.
    pub fn with_demand(&self, demand: u64) -> Result<Self> {
        Self::new(
            self.suppliers.clone(),
            demand,
            self.retailer_coefficient,
            self.period_of_interest,
            self.mean_demand_rate,
            self.weights,
        )
    }

    pub fn with_weights(&self, weights: (f64, f64)) -> Result<Self> {
        Self::new(
            self.suppliers.clone(),
            self.demand,
            self.retailer_coefficient,
            self.period_of_interest,
            self.mean_demand_rate,
            weights,
        )
    }

    pub fn suppliers(&self) -> &[SupplierSpec] {
        &self.suppliers
    }

    pub fn supplier_count(&self) -> usize {
        self.suppliers.len()
    }

    pub fn demand(&self) -> u64 {
        self.demand
    }

    pub fn retailer_coefficient(&self) -> f64 {
        self.retailer_coefficient
    }

    pub fn weights(&self) -> (f64, f64) {
        self.weights
    }

    pub fn max_unit_cost(&self) -> f64 {
        self.suppliers
            .iter()
            .map(|s| s.unit_cost)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    fn check_dims(&self, dist: &Distribution) -> Result<()> {
        if dist.shares().len() != self.suppliers.len() {
            return Err(Error::Validation(format!(
                "distribution has {} entries but scenario has {} suppliers",
                dist.shares().len(),
                self.suppliers.len()
            )));
        }
        Ok(())
    }

    /// Total supply chain cost: `xi * sum(mu * c_i * x_i)`. Evaluated as the
    /// raw linear form, so it is defined even when the sum constraint is
    /// suspended.
    pub fn total_cost(&self, dist: &Distribution) -> Result<f64> {
        self.check_dims(dist)?;
        let raw: f64 = self
            .suppliers
            .iter()
            .zip(dist.shares())
            .map(|(s, &x)| s.unit_cost * x as f64)
            .sum();
        Ok(self.period_of_interest * self.mean_demand_rate * raw)
    }

    /// True iff the distribution sums to the demand and, unless `relax` is
    /// set, its total cost stays within the retailer budget.
    pub fn is_feasible(&self, dist: &Distribution, relax: bool) -> Result<bool> {
        self.check_dims(dist)?;
        if dist.total() != self.demand {
            return Ok(false);
        }
        let cost = self.total_cost(dist)?;
        Ok(relax || cost <= self.retailer_coefficient * self.demand as f64)
    }

    /// Marginal failure probabilities, one per supplier: `P_i = x_i / d`.
    pub fn marginal_failure_probabilities(&self, dist: &Distribution) -> Result<Vec<f64>> {
        self.check_dims(dist)?;
        let d = self.demand as f64;
        Ok(dist.shares().iter().map(|&x| x as f64 / d).collect())
    }

    /// Risk index: `sum(alpha_i * beta_i * P_i)` with the structural
    /// variables looked up at each supplier's own workload share.
    pub fn risk_index(&self, dist: &Distribution) -> Result<f64> {
        let probs = self.marginal_failure_probabilities(dist)?;
        Ok(self
            .suppliers
            .iter()
            .zip(&probs)
            .map(|(s, &p)| {
                let (alpha, beta) = s.profile.values(p);
                alpha * beta * p
            })
            .sum())
    }

    /// Scalarized fitness, larger is better:
    /// `1 - (W1 * cost / (c_max * d) + W2 * risk / n)`.
    pub fn fitness(&self, dist: &Distribution) -> Result<f64> {
        let cost = self.total_cost(dist)?;
        let risk = self.risk_index(dist)?;
        let (w1, w2) = self.weights;
        let cost_scale = self.max_unit_cost() * self.demand as f64;
        let n = self.suppliers.len() as f64;
        Ok(1.0 - (w1 * cost / cost_scale + w2 * risk / n))
    }

    /// Both objectives at once.
    pub fn objective_point(&self, dist: &Distribution) -> Result<ObjectivePoint> {
        Ok(ObjectivePoint {
            total_cost: self.total_cost(dist)?,
            risk_index: self.risk_index(dist)?,
        })
    }

    /// Parse a scenario from the JSON document format.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: ScenarioFile = serde_json::from_str(text)?;
        file.into_scenario()
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }
}

/// An integer workload assignment across suppliers.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Distribution(Vec<u64>);

impl Distribution {
    /// Build a distribution, checking that shares sum to `demand`.
    pub fn new(shares: Vec<u64>, demand: u64) -> Result<Self> {
        let total: u64 = shares.iter().sum();
        if total != demand {
            return Err(Error::Validation(format!(
                "shares sum to {total} but demand is {demand}"
            )));
        }
        Ok(Self(shares))
    }

    /// Build without the sum check. Callers must guarantee the invariant.
    pub(crate) fn from_raw(shares: Vec<u64>) -> Self {
        Self(shares)
    }

    pub fn shares(&self) -> &[u64] {
        &self.0
    }

    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }
}

impl std::fmt::Display for Distribution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "]")
    }
}

/// A `(total cost, risk index)` pair, both minimized.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectivePoint {
    pub total_cost: f64,
    pub risk_index: f64,
}

// --- scenario file format -------------------------------------------------

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    suppliers: Vec<SupplierFile>,
    demand: u64,
    retailer_coefficient: f64,
    #[serde(default)]
    weights: Option<[f64; 2]>,
    #[serde(default)]
    period_of_interest: Option<f64>,
    #[serde(default)]
    mean_demand_rate: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SupplierFile {
    unit_cost: f64,
    #[serde(default)]
    profile: Option<Vec<[f64; 3]>>,
}

impl ScenarioFile {
    fn into_scenario(self) -> Result<Scenario> {
        let suppliers = self
            .suppliers
            .into_iter()
            .map(|s| {
                let profile = match s.profile {
                    None => StructuralProfile::default_profile(),
                    Some(rows) => StructuralProfile::new(
                        rows.into_iter()
                            .map(|[threshold, alpha, beta]| Breakpoint { threshold, alpha, beta })
                            .collect(),
                    )?,
                };
                SupplierSpec::new(s.unit_cost, profile)
            })
            .collect::<Result<Vec<_>>>()?;
        let weights = self.weights.map(|[a, b]| (a, b)).unwrap_or((0.5, 0.5));
        Scenario::new(
            suppliers,
            self.demand,
            self.retailer_coefficient,
            self.period_of_interest.unwrap_or(1.0),
            self.mean_demand_rate.unwrap_or(1.0),
            weights,
        )
    }
}
