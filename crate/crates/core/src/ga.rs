//! Seeded genetic optimizer: spawn/eliminate selection against a ranked
//! population, crossover-based mutation with repair, per-generation counters
//! and deterministic sub-streamed randomness.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scm::{Distribution, ObjectivePoint, Scenario};

/// Which fitness the optimizer maximizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ObjectiveKind {
    /// `1 - (W1 * cost/(c_max*d) + W2 * risk/n)`, the classical scalarization.
    Weighted,
    /// `1 - cost/(c_max*d)`.
    CostOnly,
    /// `1 - risk/n`.
    RiskOnly,
}

impl ObjectiveKind {
    pub fn fitness(&self, scen: &Scenario, dist: &Distribution) -> Result<f64> {
        match self {
            ObjectiveKind::Weighted => scen.fitness(dist),
            ObjectiveKind::CostOnly => {
                let cost = scen.total_cost(dist)?;
                Ok(1.0 - cost / (scen.max_unit_cost() * scen.demand() as f64))
            }
            ObjectiveKind::RiskOnly => {
                let risk = scen.risk_index(dist)?;
                Ok(1.0 - risk / scen.supplier_count() as f64)
            }
        }
    }
}

/// Optimizer configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaConfig {
    pub initial_population: usize,
    /// Children spawned per generation; `None` repeats `initial_population`.
    /// A shorter schedule than `max_generations` repeats its last entry.
    pub spawn_schedule: Option<Vec<usize>>,
    pub crossover_ratio: f64,
    pub max_generations: usize,
    pub seed: u64,
    pub relax: bool,
    /// Rank quantile of the member whose fitness gates spawned children.
    /// Children at or below the gate are eliminated.
    pub elimination_quantile: f64,
    /// Mutation trials per generation are `floor(crossover_ratio * this)`.
    pub mutation_trial_scale: u32,
    /// Keep a population snapshot per generation (used for front indicators).
    pub record_populations: bool,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            initial_population: 200,
            spawn_schedule: None,
            crossover_ratio: 0.8,
            max_generations: 100,
            seed: 0,
            relax: false,
            elimination_quantile: 0.1,
            mutation_trial_scale: 100,
            record_populations: false,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.initial_population < 2 {
            return Err(Error::Config("initial population must be at least 2".into()));
        }
        if !(0.0..=1.0).contains(&self.crossover_ratio) {
            return Err(Error::Config(format!(
                "crossover ratio must lie in [0,1], got {}",
                self.crossover_ratio
            )));
        }
        if self.max_generations == 0 {
            return Err(Error::Config("max generations must be positive".into()));
        }
        if !(self.elimination_quantile > 0.0 && self.elimination_quantile <= 1.0) {
            return Err(Error::Config(format!(
                "elimination quantile must lie in (0,1], got {}",
                self.elimination_quantile
            )));
        }
        if let Some(schedule) = &self.spawn_schedule {
            if schedule.is_empty() || schedule.iter().any(|&s| s == 0) {
                return Err(Error::Config("spawn schedule entries must be positive".into()));
            }
        }
        Ok(())
    }

    fn spawn_count(&self, generation: usize) -> usize {
        match &self.spawn_schedule {
            None => self.initial_population,
            Some(schedule) => schedule
                .get(generation)
                .or_else(|| schedule.last())
                .copied()
                .unwrap_or(self.initial_population),
        }
    }

    fn mutation_trials(&self) -> usize {
        (self.crossover_ratio * self.mutation_trial_scale as f64).floor() as usize
    }
}

/// Counters for one generation, in the population-statistics table layout.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GenerationStats {
    pub generation: usize,
    pub spawned: u64,
    /// Spawned children that survived the elimination gate.
    pub children: u64,
    /// Mutation trials performed.
    pub mutations: u64,
    pub eliminated: u64,
    pub surviving: u64,
    pub best_fitness: f64,
}

/// Outcome of a full optimizer run.
#[derive(Debug, Clone, PartialEq)]
pub struct GaResult {
    pub best: Distribution,
    pub best_fitness: f64,
    pub best_point: ObjectivePoint,
    pub history: Vec<GenerationStats>,
    pub final_population: Vec<Distribution>,
    /// Total fitness evaluations across the run.
    pub evaluations: u64,
    /// Ranked population after each generation (index 0 is the initial
    /// population), present when `record_populations` is set.
    pub population_snapshots: Option<Vec<Vec<Distribution>>>,
}

/// Independent deterministic sub-stream for `(seed, tag)`.
pub(crate) fn sub_rng(seed: u64, tag: u64) -> ChaCha8Rng {
    let mut bytes = [0u8; 32];
    bytes[..8].copy_from_slice(&seed.to_le_bytes());
    bytes[8..16].copy_from_slice(&tag.to_le_bytes());
    ChaCha8Rng::from_seed(bytes)
}

/// splitmix64-style mix for deriving independent seeds.
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    let mut z = seed
        .wrapping_add(tag.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn spawn_one(demand: u64, parts: usize, rng: &mut ChaCha8Rng) -> Distribution {
    debug_assert!(parts >= 2);
    // stars-and-bars bijection: a sorted (parts-1)-subset of the slot range
    // maps to a unique composition, so compositions are drawn uniformly
    let slots = (demand + parts as u64 - 1) as usize;
    let mut cuts = rand::seq::index::sample(rng, slots, parts - 1).into_vec();
    cuts.sort_unstable();
    let mut shares = Vec::with_capacity(parts);
    let mut prev: i64 = -1;
    for &c in &cuts {
        shares.push((c as i64 - prev - 1) as u64);
        prev = c as i64;
    }
    shares.push((slots as i64 - 1 - prev) as u64);
    Distribution::from_raw(shares)
}

/// Draw `count` compositions of `demand` into `parts` parts, uniformly over
/// all compositions.
pub fn spawn_random(demand: u64, parts: usize, count: usize, rng: &mut ChaCha8Rng) -> Vec<Distribution> {
    (0..count).map(|_| spawn_one(demand, parts, rng)).collect()
}

/// Rescale an arbitrary non-negative gene vector onto the demand simplex:
/// floor-scale every gene, then hand out the remaining units to the largest
/// fractional parts, ties to the lower index.
pub fn repair(genes: &[u64], demand: u64) -> Vec<u64> {
    let sum: u64 = genes.iter().sum();
    if sum == demand {
        return genes.to_vec();
    }
    if sum == 0 {
        let mut out = vec![0; genes.len()];
        out[0] = demand;
        return out;
    }
    let mut scaled: Vec<u64> = Vec::with_capacity(genes.len());
    let mut fractions: Vec<(u128, usize)> = Vec::with_capacity(genes.len());
    for (i, &g) in genes.iter().enumerate() {
        let num = g as u128 * demand as u128;
        scaled.push((num / sum as u128) as u64);
        fractions.push((num % sum as u128, i));
    }
    let assigned: u64 = scaled.iter().sum();
    let mut remainder = demand - assigned;
    fractions.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    for &(_, i) in &fractions {
        if remainder == 0 {
            break;
        }
        scaled[i] += 1;
        remainder -= 1;
    }
    scaled
}

/// Uniform gene mask: each gene comes from either parent with probability 1/2.
pub fn crossover_genes(a: &Distribution, b: &Distribution, rng: &mut ChaCha8Rng) -> Vec<u64> {
    a.shares()
        .iter()
        .zip(b.shares())
        .map(|(&x, &y)| if rng.gen_bool(0.5) { x } else { y })
        .collect()
}

/// Uniform-mask crossover followed by repair onto the demand simplex.
pub fn crossover(a: &Distribution, b: &Distribution, demand: u64, rng: &mut ChaCha8Rng) -> Distribution {
    Distribution::from_raw(repair(&crossover_genes(a, b, rng), demand))
}

#[derive(Debug, Clone)]
struct Individual {
    dist: Distribution,
    fitness: f64,
}

/// Ranked population plus instrumentation counters.
#[derive(Debug, Clone)]
pub struct GaState {
    population: Vec<Individual>,
    evaluations: u64,
}

impl GaState {
    pub fn population(&self) -> Vec<Distribution> {
        self.population.iter().map(|m| m.dist.clone()).collect()
    }

    pub fn best(&self) -> (&Distribution, f64) {
        let top = &self.population[0];
        (&top.dist, top.fitness)
    }

    fn rank(&mut self) {
        self.population.sort_by(|a, b| {
            b.fitness
                .total_cmp(&a.fitness)
                .then_with(|| a.dist.cmp(&b.dist))
        });
    }
}

struct Evaluator<'a> {
    scen: &'a Scenario,
    objective: ObjectiveKind,
    relax: bool,
}

impl Evaluator<'_> {
    fn eval(&self, state: &mut GaState, dist: &Distribution) -> Result<f64> {
        state.evaluations += 1;
        let base = self.objective.fitness(self.scen, dist)?;
        if !self.relax && !self.scen.is_feasible(dist, false)? {
            // keep infeasible repairs in play but strictly below every
            // feasible member
            Ok(base - 1.0)
        } else {
            Ok(base)
        }
    }

    fn spawn(&self, state: &mut GaState, rng: &mut ChaCha8Rng) -> Result<Individual> {
        let demand = self.scen.demand();
        let parts = self.scen.supplier_count();
        let mut dist = spawn_one(demand, parts, rng);
        if !self.relax {
            let mut attempts = 1;
            while attempts < 1000 && !self.scen.is_feasible(&dist, false)? {
                dist = spawn_one(demand, parts, rng);
                attempts += 1;
            }
        }
        let fitness = self.eval(state, &dist)?;
        Ok(Individual { dist, fitness })
    }
}

/// Run one generation: spawn, eliminate against the gate member, run
/// crossover-mutation trials, re-rank.
pub fn run_generation(
    state: &mut GaState,
    scen: &Scenario,
    cfg: &GaConfig,
    objective: ObjectiveKind,
    generation: usize,
    rng: &mut ChaCha8Rng,
) -> Result<GenerationStats> {
    let evaluator = Evaluator { scen, objective, relax: cfg.relax };

    // population is ranked descending; the gate is the member at the
    // configured rank quantile
    let gate_rank = ((cfg.elimination_quantile * state.population.len() as f64).ceil() as usize)
        .clamp(1, state.population.len());
    let gate_fitness = state.population[gate_rank - 1].fitness;

    let spawned = cfg.spawn_count(generation);
    let mut accepted = 0u64;
    for _ in 0..spawned {
        let child = evaluator.spawn(state, rng)?;
        if child.fitness > gate_fitness {
            state.population.push(child);
            accepted += 1;
        }
    }
    let eliminated = spawned as u64 - accepted;

    let trials = cfg.mutation_trials();
    let mut performed = 0u64;
    for _ in 0..trials {
        if state.population.len() < 2 {
            break;
        }
        let picked = rand::seq::index::sample(rng, state.population.len(), 2);
        let (i, j) = (picked.index(0), picked.index(1));
        let child_dist = crossover(
            &state.population[i].dist,
            &state.population[j].dist,
            scen.demand(),
            rng,
        );
        performed += 1;
        let child_fitness = evaluator.eval(state, &child_dist)?;
        if child_fitness > state.population[i].fitness && child_fitness > state.population[j].fitness {
            let (hi, lo) = if i > j { (i, j) } else { (j, i) };
            state.population.remove(hi);
            state.population.remove(lo);
            state.population.push(Individual { dist: child_dist, fitness: child_fitness });
        }
    }

    state.rank();
    Ok(GenerationStats {
        generation,
        spawned: spawned as u64,
        children: accepted,
        mutations: performed,
        eliminated,
        surviving: state.population.len() as u64,
        best_fitness: state.population[0].fitness,
    })
}

/// Full optimizer run: seeded initial population, generations until the cap
/// or until a generation eliminates nothing, final ranking.
pub fn run_ga(scen: &Scenario, cfg: &GaConfig, objective: ObjectiveKind) -> Result<GaResult> {
    cfg.validate()?;
    let evaluator = Evaluator { scen, objective, relax: cfg.relax };

    let mut state = GaState { population: Vec::with_capacity(cfg.initial_population), evaluations: 0 };
    let mut rng = sub_rng(cfg.seed, 0);
    for _ in 0..cfg.initial_population {
        let member = evaluator.spawn(&mut state, &mut rng)?;
        state.population.push(member);
    }
    state.rank();

    let mut snapshots = cfg.record_populations.then(|| vec![state.population()]);
    let mut history = Vec::new();
    for generation in 0..cfg.max_generations {
        let mut gen_rng = sub_rng(cfg.seed, generation as u64 + 1);
        let stats = run_generation(&mut state, scen, cfg, objective, generation, &mut gen_rng)?;
        history.push(stats);
        if let Some(snaps) = snapshots.as_mut() {
            snaps.push(state.population());
        }
        if stats.eliminated == 0 {
            break;
        }
    }

    let (best, best_fitness) = {
        let (d, f) = state.best();
        (d.clone(), f)
    };
    let best_point = scen.objective_point(&best)?;
    Ok(GaResult {
        best,
        best_fitness,
        best_point,
        history,
        final_population: state.population(),
        evaluations: state.evaluations,
        population_snapshots: snapshots,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn repair_examples() {
        assert_eq!(repair(&[10, 10, 10], 30), vec![10, 10, 10]);
        assert_eq!(repair(&[1, 1, 1], 30), vec![10, 10, 10]);
        assert_eq!(repair(&[0, 0, 0], 5), vec![5, 0, 0]);
        // remainder goes to the largest fractional parts, ties to lower index
        assert_eq!(repair(&[1, 1], 3), vec![2, 1]);
        assert_eq!(repair(&[2, 1], 10).iter().sum::<u64>(), 10);
    }

    #[test]
    fn spawn_random_sums_and_determinism() {
        let mut rng = sub_rng(7, 0);
        let draws = spawn_random(37, 4, 100, &mut rng);
        assert!(draws.iter().all(|d| d.total() == 37));

        let mut rng2 = sub_rng(7, 0);
        assert_eq!(draws, spawn_random(37, 4, 100, &mut rng2));
    }

    #[test]
    fn spawn_random_is_uniform_over_unit_vectors() {
        let mut rng = sub_rng(11, 0);
        let mut counts = [0u32; 3];
        for d in spawn_random(1, 3, 30_000, &mut rng) {
            let hot = d.shares().iter().position(|&x| x == 1).unwrap();
            counts[hot] += 1;
        }
        for c in counts {
            let freq = c as f64 / 30_000.0;
            assert!((freq - 1.0 / 3.0).abs() < 0.02, "frequency {freq} off uniform");
        }
    }

    #[test]
    fn crossover_identity_and_gene_membership() {
        let mut rng = sub_rng(3, 0);
        let a = Distribution::new(vec![5, 10, 15], 30).unwrap();
        assert_eq!(crossover(&a, &a, 30, &mut rng), a);

        let b = Distribution::new(vec![20, 10, 0], 30).unwrap();
        for _ in 0..50 {
            let genes = crossover_genes(&a, &b, &mut rng);
            for (i, &g) in genes.iter().enumerate() {
                assert!(g == a.shares()[i] || g == b.shares()[i]);
            }
            let child = Distribution::from_raw(repair(&genes, 30));
            assert_eq!(child.total(), 30);
        }
    }

    #[test]
    fn run_is_bit_for_bit_deterministic() {
        let scen = Scenario::builtin_fig2(50);
        let cfg = GaConfig { seed: 42, max_generations: 10, ..GaConfig::default() };
        let a = run_ga(&scen, &cfg, ObjectiveKind::Weighted).unwrap();
        let b = run_ga(&scen, &cfg, ObjectiveKind::Weighted).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn elitism_best_fitness_never_drops() {
        let scen = Scenario::builtin_fig2(60);
        let cfg = GaConfig { seed: 5, max_generations: 30, ..GaConfig::default() };
        let result = run_ga(&scen, &cfg, ObjectiveKind::Weighted).unwrap();
        let best: Vec<f64> = result.history.iter().map(|h| h.best_fitness).collect();
        assert!(best.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn every_member_satisfies_the_sum_invariant() {
        let scen = Scenario::builtin_fig2(40);
        let cfg = GaConfig {
            seed: 9,
            max_generations: 15,
            record_populations: true,
            ..GaConfig::default()
        };
        let result = run_ga(&scen, &cfg, ObjectiveKind::Weighted).unwrap();
        for snapshot in result.population_snapshots.unwrap() {
            assert!(snapshot.iter().all(|d| d.total() == 40));
        }
    }

    #[test]
    fn counters_are_consistent() {
        let scen = Scenario::builtin_fig2(80);
        let cfg = GaConfig { seed: 1, max_generations: 20, ..GaConfig::default() };
        let result = run_ga(&scen, &cfg, ObjectiveKind::Weighted).unwrap();
        let mut carry_in = cfg.initial_population as i64;
        for h in &result.history {
            assert_eq!(h.spawned, h.children + h.eliminated);
            // mutations each remove at most one net member
            let accepted_mutants = carry_in + h.children as i64 - h.surviving as i64;
            assert!(accepted_mutants >= 0, "generation {}", h.generation);
            assert!(accepted_mutants as u64 <= h.mutations);
            assert!(h.surviving <= carry_in as u64 + h.spawned + h.mutations);
            carry_in = h.surviving as i64;
        }
    }

    #[test]
    fn cost_only_run_finds_the_cheap_corner() {
        let scen = Scenario::builtin_fig2(20);
        let cfg = GaConfig { seed: 13, ..GaConfig::default() };
        let result = run_ga(&scen, &cfg, ObjectiveKind::CostOnly).unwrap();
        assert_eq!(result.best.shares(), &[20, 0, 0]);
    }

    #[test]
    fn derived_seeds_differ() {
        assert_ne!(derive_seed(0, 0), derive_seed(0, 1));
        assert_ne!(derive_seed(1, 0), derive_seed(2, 0));
        assert_eq!(derive_seed(5, 7), derive_seed(5, 7));
    }
}
