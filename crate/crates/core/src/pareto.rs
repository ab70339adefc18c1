//! Multi-objective driver: one genetic run per objective, the
//! {min cost, max cost, min risk} triple, non-dominated front extraction,
//! demand sweeps and the front-distance indicator.

use crate::error::{Error, Result};
use crate::ga::{derive_seed, run_ga, GaConfig, GaResult, ObjectiveKind};
use crate::oracle::FrontPoint;
use crate::scm::{Distribution, ObjectivePoint, Scenario};

/// Seed tags for the two per-objective runs.
const COST_RUN_TAG: u64 = 0xC0;
const RISK_RUN_TAG: u64 = 0x41;

/// Output of one multi-objective optimization.
#[derive(Debug, Clone, PartialEq)]
pub struct ParetoResult {
    pub min_cost: f64,
    /// Cost paid at the risk minimizer, the upper edge of the envelope.
    pub max_cost: f64,
    pub min_risk: f64,
    pub argmin_cost: Distribution,
    pub argmin_risk: Distribution,
    /// Non-dominated subset of the union of both final populations.
    pub front: Vec<FrontPoint>,
    pub cost_run: GaResult,
    pub risk_run: GaResult,
}

/// One sweep entry per demand value.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepEntry {
    pub demand: u64,
    pub result: ParetoResult,
    /// Front distance between successive generations, present when
    /// indicators were requested.
    pub indicators: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub entries: Vec<SweepEntry>,
}

/// Scales used to bring both objectives into `[0, 1]` before distances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Normalization {
    pub cost_scale: f64,
    pub risk_scale: f64,
}

impl Normalization {
    /// `(c_max * d, n)` for a scenario.
    pub fn for_scenario(scen: &Scenario) -> Self {
        Self {
            cost_scale: scen.max_unit_cost() * scen.demand() as f64,
            risk_scale: scen.supplier_count() as f64,
        }
    }

    pub fn identity() -> Self {
        Self { cost_scale: 1.0, risk_scale: 1.0 }
    }
}

/// Maximal non-dominated subset, sorted by ascending cost, duplicate
/// objective points collapsed onto the lexicographically smallest
/// distribution.
pub fn front_filter(mut points: Vec<FrontPoint>) -> Vec<FrontPoint> {
    points.sort_by(|a, b| {
        a.point
            .total_cost
            .total_cmp(&b.point.total_cost)
            .then_with(|| a.point.risk_index.total_cmp(&b.point.risk_index))
            .then_with(|| a.distribution.cmp(&b.distribution))
    });
    let mut front: Vec<FrontPoint> = Vec::new();
    let mut min_risk = f64::INFINITY;
    for p in points {
        // after the cost sort, a point is non-dominated (and not a
        // duplicate) exactly when it strictly improves the running risk
        if p.point.risk_index < min_risk {
            min_risk = p.point.risk_index;
            front.push(p);
        }
    }
    front
}

/// Symmetrized average nearest-neighbor Euclidean distance between two
/// fronts in normalized objective space.
pub fn pareto_distance(a: &[ObjectivePoint], b: &[ObjectivePoint], norm: Normalization) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Validation("pareto distance needs two non-empty fronts".into()));
    }
    let directed = |from: &[ObjectivePoint], to: &[ObjectivePoint]| -> f64 {
        let total: f64 = from
            .iter()
            .map(|p| {
                to.iter()
                    .map(|q| {
                        let dc = (p.total_cost - q.total_cost) / norm.cost_scale;
                        let dr = (p.risk_index - q.risk_index) / norm.risk_scale;
                        (dc * dc + dr * dr).sqrt()
                    })
                    .fold(f64::INFINITY, f64::min)
            })
            .sum();
        total / from.len() as f64
    };
    Ok(0.5 * (directed(a, b) + directed(b, a)))
}

fn population_front(scen: &Scenario, relax: bool, members: &[Distribution]) -> Result<Vec<FrontPoint>> {
    let mut points = Vec::new();
    for dist in members {
        // the front is defined over the constrained objective space
        if !scen.is_feasible(dist, relax)? {
            continue;
        }
        points.push(FrontPoint {
            distribution: dist.clone(),
            point: scen.objective_point(dist)?,
        });
    }
    Ok(front_filter(points))
}

/// Run one genetic optimization per objective and assemble the triple plus
/// the merged non-dominated front.
pub fn pareto_optimize(scen: &Scenario, cfg: &GaConfig) -> Result<ParetoResult> {
    let cost_cfg = GaConfig { seed: derive_seed(cfg.seed, COST_RUN_TAG), ..cfg.clone() };
    let risk_cfg = GaConfig { seed: derive_seed(cfg.seed, RISK_RUN_TAG), ..cfg.clone() };
    let cost_run = run_ga(scen, &cost_cfg, ObjectiveKind::CostOnly)?;
    let risk_run = run_ga(scen, &risk_cfg, ObjectiveKind::RiskOnly)?;

    let argmin_cost = cost_run.best.clone();
    let argmin_risk = risk_run.best.clone();
    let min_cost = scen.total_cost(&argmin_cost)?;
    let max_cost = scen.total_cost(&argmin_risk)?;
    let min_risk = scen.risk_index(&argmin_risk)?;

    let mut merged = cost_run.final_population.clone();
    merged.extend(risk_run.final_population.iter().cloned());
    let front = population_front(scen, cfg.relax, &merged)?;

    Ok(ParetoResult {
        min_cost,
        max_cost,
        min_risk,
        argmin_cost,
        argmin_risk,
        front,
        cost_run,
        risk_run,
    })
}

fn generation_indicators(scen: &Scenario, cfg: &GaConfig, result: &ParetoResult) -> Result<Vec<f64>> {
    let cost_snaps = result
        .cost_run
        .population_snapshots
        .as_ref()
        .expect("indicator sweep records populations");
    let risk_snaps = result
        .risk_run
        .population_snapshots
        .as_ref()
        .expect("indicator sweep records populations");
    let generations = cost_snaps.len().min(risk_snaps.len());
    let norm = Normalization::for_scenario(scen);

    let mut fronts = Vec::with_capacity(generations);
    for g in 0..generations {
        let mut members = cost_snaps[g].clone();
        members.extend(risk_snaps[g].iter().cloned());
        let front = population_front(scen, cfg.relax, &members)?;
        fronts.push(front.iter().map(|f| f.point).collect::<Vec<_>>());
    }
    let mut series = Vec::new();
    for pair in fronts.windows(2) {
        if pair[0].is_empty() || pair[1].is_empty() {
            continue;
        }
        series.push(pareto_distance(&pair[0], &pair[1], norm)?);
    }
    Ok(series)
}

fn sweep_entry(scen_template: &Scenario, demand: u64, cfg: &GaConfig, indicators: bool) -> Result<SweepEntry> {
    let scen = scen_template.with_demand(demand)?;
    let cfg = GaConfig {
        seed: derive_seed(cfg.seed, demand),
        record_populations: cfg.record_populations || indicators,
        ..cfg.clone()
    };
    let result = pareto_optimize(&scen, &cfg)?;
    let series = indicators
        .then(|| generation_indicators(&scen, &cfg, &result))
        .transpose()?;
    Ok(SweepEntry { demand, result, indicators: series })
}

/// Run `pareto_optimize` per demand, optionally recording per-generation
/// front indicators. `workers` caps the number of concurrent demand runs;
/// results do not depend on it.
pub fn sweep(
    scen_template: &Scenario,
    demands: &[u64],
    cfg: &GaConfig,
    indicators: bool,
    workers: usize,
) -> Result<SweepResult> {
    if demands.is_empty() {
        return Err(Error::Validation("sweep needs at least one demand".into()));
    }
    if demands.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Validation("sweep demands must be strictly increasing".into()));
    }
    let workers = workers.max(1).min(demands.len());

    if workers == 1 {
        let entries = demands
            .iter()
            .map(|&d| sweep_entry(scen_template, d, cfg, indicators))
            .collect::<Result<Vec<_>>>()?;
        return Ok(SweepResult { entries });
    }

    let mut slots: Vec<Option<Result<SweepEntry>>> = Vec::new();
    slots.resize_with(demands.len(), || None);
    let next = std::sync::atomic::AtomicUsize::new(0);
    let slots = std::sync::Mutex::new(&mut slots);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
                if i >= demands.len() {
                    break;
                }
                let entry = sweep_entry(scen_template, demands[i], cfg, indicators);
                slots.lock().unwrap()[i] = Some(entry);
            });
        }
    });
    let entries = slots
        .into_inner()
        .unwrap()
        .iter_mut()
        .map(|slot| slot.take().expect("every sweep slot filled"))
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult { entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scm::{StructuralProfile, SupplierSpec};

    fn point(cost: f64, risk: f64) -> FrontPoint {
        FrontPoint {
            distribution: Distribution::new(vec![0, 0], 0).unwrap(),
            point: ObjectivePoint { total_cost: cost, risk_index: risk },
        }
    }

    #[test]
    fn front_filter_examples() {
        let single = front_filter(vec![point(5.0, 0.5)]);
        assert_eq!(single.len(), 1);

        let filtered = front_filter(vec![point(350.0, 0.12), point(600.0, 0.7575)]);
        assert_eq!(filtered.len(), 1);
        assert_eq!(filtered[0].point.total_cost, 350.0);

        // a chain of incomparable points survives whole
        let chain = vec![point(1.0, 0.9), point(2.0, 0.5), point(3.0, 0.1)];
        assert_eq!(front_filter(chain).len(), 3);
    }

    #[test]
    fn front_filter_collapses_duplicates_to_lex_smallest() {
        let mut a = point(10.0, 0.2);
        a.distribution = Distribution::new(vec![3, 1], 4).unwrap();
        let mut b = point(10.0, 0.2);
        b.distribution = Distribution::new(vec![1, 3], 4).unwrap();
        let out = front_filter(vec![a, b]);
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].distribution.shares(), &[1, 3]);
    }

    #[test]
    fn distance_examples() {
        let a = vec![ObjectivePoint { total_cost: 0.0, risk_index: 0.0 }];
        let b = vec![ObjectivePoint { total_cost: 3.0, risk_index: 4.0 }];
        let d = pareto_distance(&a, &b, Normalization::identity()).unwrap();
        assert_eq!(d, 5.0);

        assert_eq!(pareto_distance(&a, &a, Normalization::identity()).unwrap(), 0.0);

        let ab = pareto_distance(&a, &b, Normalization::identity()).unwrap();
        let ba = pareto_distance(&b, &a, Normalization::identity()).unwrap();
        assert_eq!(ab, ba);

        assert!(pareto_distance(&[], &b, Normalization::identity()).is_err());
    }

    #[test]
    fn triple_collapses_when_one_supplier_wins_both() {
        let calm = StructuralProfile::constant(0.0, 0.5).unwrap();
        let hot = StructuralProfile::constant(0.9, 0.9).unwrap();
        let suppliers = vec![
            SupplierSpec::new(2.0, calm).unwrap(),
            SupplierSpec::new(3.0, hot.clone()).unwrap(),
            SupplierSpec::new(7.0, hot).unwrap(),
        ];
        let scen = Scenario::new(suppliers, 25, 4.0, 1.0, 1.0, (0.5, 0.5)).unwrap();
        let cfg = GaConfig { seed: 2, ..GaConfig::default() };
        let result = pareto_optimize(&scen, &cfg).unwrap();
        assert_eq!(result.argmin_cost.shares(), &[25, 0, 0]);
        assert_eq!(result.argmin_risk.shares(), &[25, 0, 0]);
        assert_eq!(result.min_cost, result.max_cost);
        assert_eq!(result.front.len(), 1);
    }

    #[test]
    fn envelope_order_holds() {
        let scen = Scenario::builtin_fig2(40);
        let cfg = GaConfig { seed: 4, max_generations: 30, ..GaConfig::default() };
        let result = pareto_optimize(&scen, &cfg).unwrap();
        assert!(result.min_cost <= result.max_cost);
        // the front never dominates itself
        for a in &result.front {
            for b in &result.front {
                assert!(!crate::oracle::dominates(&a.point, &b.point) || a.point == b.point);
            }
        }
    }

    #[test]
    fn single_demand_sweep_reduces_to_pareto_optimize() {
        let scen = Scenario::builtin_fig2(100);
        let cfg = GaConfig { seed: 6, max_generations: 10, ..GaConfig::default() };
        let swept = sweep(&scen, &[30], &cfg, false, 1).unwrap();
        assert_eq!(swept.entries.len(), 1);

        let direct_cfg = GaConfig { seed: derive_seed(6, 30), ..cfg.clone() };
        let direct = pareto_optimize(&scen.with_demand(30).unwrap(), &direct_cfg).unwrap();
        assert_eq!(swept.entries[0].result, direct);
    }

    #[test]
    fn sweep_is_independent_of_worker_count() {
        let scen = Scenario::builtin_fig2(100);
        let cfg = GaConfig { seed: 8, max_generations: 5, initial_population: 40, ..GaConfig::default() };
        let serial = sweep(&scen, &[10, 20, 30], &cfg, false, 1).unwrap();
        let parallel = sweep(&scen, &[10, 20, 30], &cfg, false, 3).unwrap();
        assert_eq!(serial, parallel);
    }

    #[test]
    fn sweep_validates_demands() {
        let scen = Scenario::builtin_fig2(100);
        let cfg = GaConfig::default();
        assert!(sweep(&scen, &[], &cfg, false, 1).is_err());
        assert!(sweep(&scen, &[20, 10], &cfg, false, 1).is_err());
    }

    #[test]
    fn indicator_series_present_and_finite() {
        let scen = Scenario::builtin_fig2(100);
        let cfg = GaConfig { seed: 3, max_generations: 8, initial_population: 50, ..GaConfig::default() };
        let swept = sweep(&scen, &[30], &cfg, true, 1).unwrap();
        let series = swept.entries[0].indicators.as_ref().unwrap();
        assert!(!series.is_empty());
        assert!(series.iter().all(|d| d.is_finite() && *d >= 0.0));
    }
}
