//! Exhaustive baseline: enumerates every integer workload distribution,
//! extracts the exact Pareto front and the weighted-sum optimum. This is the
//! ground truth the genetic optimizer is checked against.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::pareto::front_filter;
use crate::scm::{Distribution, ObjectivePoint, Scenario};

/// Refuse to enumerate instances with more relaxed compositions than this.
pub const ENUMERATION_GUARD: u128 = 100_000_000;

/// A distribution together with its objectives.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrontPoint {
    pub distribution: Distribution,
    pub point: ObjectivePoint,
}

/// Counters for one enumeration pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EnumerationReport {
    /// Compositions that also satisfy the cost constraint.
    pub feasible_count: u64,
    /// All compositions of the demand, the closed-form stars-and-bars count.
    pub relaxed_count: u64,
    pub demand: u64,
}

/// `C(d + n - 1, n - 1)`: the number of compositions of `d` into `n`
/// non-negative parts.
pub fn composition_count(demand: u64, parts: u64) -> Option<u128> {
    if parts == 0 {
        return Some(if demand == 0 { 1 } else { 0 });
    }
    // binomial(d + n - 1, n - 1), multiplicative form
    let n = (demand as u128).checked_add(parts as u128 - 1)?;
    let k = (parts - 1) as u128;
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 1..=k {
        acc = acc.checked_mul(n - k + i)? / i;
    }
    Some(acc)
}

/// Lexicographically ordered stream of all compositions of `demand` into
/// `parts` non-negative integers.
#[derive(Debug, Clone)]
pub struct Compositions {
    next: Option<Vec<u64>>,
}

impl Compositions {
    pub fn new(demand: u64, parts: usize) -> Self {
        assert!(parts >= 1, "need at least one part");
        let mut first = vec![0; parts];
        first[parts - 1] = demand;
        Self { next: Some(first) }
    }
}

impl Iterator for Compositions {
    type Item = Vec<u64>;

    fn next(&mut self) -> Option<Vec<u64>> {
        let current = self.next.take()?;
        let n = current.len();
        // Find the rightmost index that still has stock to its right, move
        // one unit onto it and flush the rest into the last slot.
        let mut suffix_sum: u64 = 0;
        let mut pivot = None;
        for i in (0..n - 1).rev() {
            suffix_sum += current[i + 1];
            if suffix_sum > 0 {
                pivot = Some((i, suffix_sum));
                break;
            }
        }
        if let Some((i, stock)) = pivot {
            let mut next = current.clone();
            next[i] += 1;
            for slot in next.iter_mut().take(n - 1).skip(i + 1) {
                *slot = 0;
            }
            next[n - 1] = stock - 1;
            self.next = Some(next);
        }
        Some(current)
    }
}

fn guard(scen: &Scenario) -> Result<u64> {
    let relaxed = composition_count(scen.demand(), scen.supplier_count() as u64)
        .filter(|&c| c <= ENUMERATION_GUARD)
        .ok_or_else(|| capacity_error(scen))?;
    Ok(relaxed as u64)
}

fn capacity_error(scen: &Scenario) -> Error {
    Error::Capacity(format!(
        "demand {} across {} suppliers exceeds the enumeration guard of {} compositions; \
         use the genetic solver instead",
        scen.demand(),
        scen.supplier_count(),
        ENUMERATION_GUARD
    ))
}

/// Visit every distribution passing `is_feasible(-, relax)` in lexicographic
/// order. The report counts both the feasible and the relaxed totals
/// regardless of the `relax` flag.
pub fn for_each_distribution<F>(scen: &Scenario, relax: bool, mut visit: F) -> Result<EnumerationReport>
where
    F: FnMut(&Distribution) -> Result<()>,
{
    let relaxed_count = guard(scen)?;
    let mut feasible_count = 0u64;
    for shares in Compositions::new(scen.demand(), scen.supplier_count()) {
        let dist = Distribution::from_raw(shares);
        let feasible = scen.is_feasible(&dist, false)?;
        if feasible {
            feasible_count += 1;
        }
        if relax || feasible {
            visit(&dist)?;
        }
    }
    Ok(EnumerationReport {
        feasible_count,
        relaxed_count,
        demand: scen.demand(),
    })
}

/// Collect the enumeration stream. Convenient at desk scale; large runs
/// should stream through [`for_each_distribution`].
pub fn enumerate(scen: &Scenario, relax: bool) -> Result<(Vec<Distribution>, EnumerationReport)> {
    let mut out = Vec::new();
    let report = for_each_distribution(scen, relax, |dist| {
        out.push(dist.clone());
        Ok(())
    })?;
    Ok((out, report))
}

/// Strict Pareto dominance, both objectives minimized.
pub fn dominates(a: &ObjectivePoint, b: &ObjectivePoint) -> bool {
    a.total_cost <= b.total_cost
        && a.risk_index <= b.risk_index
        && (a.total_cost < b.total_cost || a.risk_index < b.risk_index)
}

/// The exact Pareto front over the full enumerated set, sorted by ascending
/// cost. Duplicate objective points collapse to the lexicographically
/// smallest distribution.
pub fn exact_pareto_front(scen: &Scenario, relax: bool) -> Result<Vec<FrontPoint>> {
    let mut points = Vec::new();
    for_each_distribution(scen, relax, |dist| {
        points.push(FrontPoint {
            distribution: dist.clone(),
            point: scen.objective_point(dist)?,
        });
        Ok(())
    })?;
    Ok(front_filter(points))
}

/// The enumerated distribution with the highest scalarized fitness, ties
/// broken by the lexicographically smallest distribution.
pub fn weighted_sum_optimum(scen: &Scenario, relax: bool) -> Result<FrontPoint> {
    let mut best: Option<(f64, Distribution)> = None;
    for_each_distribution(scen, relax, |dist| {
        let fitness = scen.fitness(dist)?;
        let better = match &best {
            None => true,
            // lexicographic order equals enumeration order, so on a tie the
            // incumbent (earlier) distribution wins
            Some((f, _)) => fitness > *f,
        };
        if better {
            best = Some((fitness, dist.clone()));
        }
        Ok(())
    })?;
    let (_, distribution) = best.ok_or_else(|| {
        Error::Infeasible(format!(
            "no distribution satisfies the cost constraint at demand {}",
            scen.demand()
        ))
    })?;
    let point = scen.objective_point(&distribution)?;
    Ok(FrontPoint { distribution, point })
}
