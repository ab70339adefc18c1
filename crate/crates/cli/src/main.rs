//! `riskfront`: reproducible supplier-selection experiments. Every
//! subcommand writes plot-ready CSV/JSON artifacts plus a run manifest into
//! the output directory.

mod output;

use std::collections::HashSet;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use riskfront_core::envelope::{build_envelope, containment_ratio, load_series, ColumnMap};
use riskfront_core::ga::{run_ga, GaConfig, GaResult, ObjectiveKind};
use riskfront_core::oracle::{exact_pareto_front, for_each_distribution};
use riskfront_core::pareto::{pareto_optimize, sweep, SweepResult};
use riskfront_core::{Distribution, Error, Result, Scenario};
use serde_json::json;

use output::OutputSet;

#[derive(Parser)]
#[command(name = "riskfront", version, about = "Risk-averse supplier selection solvers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate objective values for a file of workload distributions.
    Evaluate(EvaluateArgs),
    /// Exhaustively enumerate distributions; optionally the exact front.
    Enumerate(EnumerateArgs),
    /// Run the genetic optimizer for one objective.
    Ga(GaArgs),
    /// GA-based Pareto optimization over one or more demands.
    Pareto(ParetoArgs),
    /// Compare solution counts of the oracle, the classical GA and GA-Pareto.
    Compare(CompareArgs),
    /// Build a cost envelope over a demand trace and score a forecast.
    Envelope(EnvelopeArgs),
}

#[derive(Args)]
struct ScenarioArgs {
    /// Scenario JSON file.
    #[arg(long, conflicts_with = "builtin")]
    scenario: Option<PathBuf>,
    /// Built-in scenario (three suppliers, costs 2/3/7, coefficient 4).
    #[arg(long, value_enum, default_value_t = Builtin::Fig2)]
    builtin: Builtin,
    /// Override the scenario demand.
    #[arg(long)]
    demand: Option<u64>,
    /// Override the fitness weights, e.g. `0.5,0.5`.
    #[arg(long, value_parser = parse_weights)]
    weights: Option<(f64, f64)>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Builtin {
    Fig2,
}

impl ScenarioArgs {
    fn resolve(&self, default_demand: u64) -> Result<(Scenario, String)> {
        let (mut scen, label) = match &self.scenario {
            Some(path) => (Scenario::from_path(path)?, path.display().to_string()),
            None => (Scenario::builtin_fig2(default_demand), "builtin:fig2".to_string()),
        };
        if let Some(demand) = self.demand {
            scen = scen.with_demand(demand)?;
        }
        if let Some(weights) = self.weights {
            scen = scen.with_weights(weights)?;
        }
        Ok((scen, label))
    }
}

#[derive(Args)]
struct SolverArgs {
    /// RNG seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Initial population size (also the per-generation spawn count).
    #[arg(long, default_value_t = 200)]
    population: usize,
    /// Maximum number of generations.
    #[arg(long, default_value_t = 100)]
    generations: usize,
    /// Crossover ratio in [0,1].
    #[arg(long, default_value_t = 0.8)]
    crossover_ratio: f64,
    /// Drop the retailer cost constraint.
    #[arg(long)]
    relax: bool,
}

impl SolverArgs {
    fn config(&self) -> GaConfig {
        GaConfig {
            initial_population: self.population,
            max_generations: self.generations,
            crossover_ratio: self.crossover_ratio,
            seed: self.seed,
            relax: self.relax,
            ..GaConfig::default()
        }
    }

    fn echo(&self) -> serde_json::Value {
        json!({
            "seed": self.seed,
            "population": self.population,
            "generations": self.generations,
            "crossover_ratio": self.crossover_ratio,
            "relax": self.relax,
        })
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Objective {
    Cost,
    Risk,
    Weighted,
}

impl From<Objective> for ObjectiveKind {
    fn from(value: Objective) -> Self {
        match value {
            Objective::Cost => ObjectiveKind::CostOnly,
            Objective::Risk => ObjectiveKind::RiskOnly,
            Objective::Weighted => ObjectiveKind::Weighted,
        }
    }
}

#[derive(Args)]
struct EvaluateArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// File of comma-separated integer rows, one distribution per line.
    #[arg(long)]
    distributions: PathBuf,
}

#[derive(Args)]
struct EnumerateArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// Include distributions that violate the cost constraint.
    #[arg(long)]
    relax: bool,
    /// Also emit the exact Pareto front.
    #[arg(long)]
    front: bool,
}

#[derive(Args)]
struct GaArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    #[command(flatten)]
    solver: SolverArgs,
    /// Objective to maximize fitness for.
    #[arg(long, value_enum, default_value_t = Objective::Weighted)]
    objective: Objective,
}

#[derive(Args)]
struct ParetoArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    #[command(flatten)]
    solver: SolverArgs,
    /// Comma-separated demand values, strictly increasing.
    #[arg(long, value_delimiter = ',', required = true)]
    demands: Vec<u64>,
    /// Emit the per-generation front-distance indicator series.
    #[arg(long)]
    indicators: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Oracle,
    Ga,
    GaPareto,
}

impl Method {
    fn label(&self) -> &'static str {
        match self {
            Method::Oracle => "oracle",
            Method::Ga => "ga",
            Method::GaPareto => "ga-pareto",
        }
    }
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    #[command(flatten)]
    solver: SolverArgs,
    /// Comma-separated demand values, strictly increasing.
    #[arg(long, value_delimiter = ',', required = true)]
    demands: Vec<u64>,
    /// Methods to instrument.
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [Method::Oracle, Method::Ga, Method::GaPareto])]
    methods: Vec<Method>,
}

#[derive(Args)]
struct EnvelopeArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    #[command(flatten)]
    solver: SolverArgs,
    /// Sweep knots (demand values), strictly increasing.
    #[arg(long, value_delimiter = ',', required = true)]
    demands: Vec<u64>,
    /// CSV with columns `t,demand`: the demand trajectory.
    #[arg(long)]
    demand_series: PathBuf,
    /// CSV with columns `t,revenue`: the forecast to score.
    #[arg(long)]
    forecast: PathBuf,
}

fn parse_weights(text: &str) -> std::result::Result<(f64, f64), String> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 2 {
        return Err("expected two comma-separated weights, e.g. 0.5,0.5".into());
    }
    let w1 = parts[0].trim().parse::<f64>().map_err(|e| e.to_string())?;
    let w2 = parts[1].trim().parse::<f64>().map_err(|e| e.to_string())?;
    Ok((w1, w2))
}

fn worker_count() -> usize {
    std::env::var("RISKFRONT_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .unwrap_or(1)
}

fn float(v: f64) -> String {
    format!("{v}")
}

fn shares_header(n: usize) -> String {
    (1..=n).map(|i| format!("x{i}")).collect::<Vec<_>>().join(",")
}

fn shares_row(dist: &Distribution) -> String {
    dist.shares().iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

// --- subcommands ----------------------------------------------------------

fn cmd_evaluate(args: &EvaluateArgs) -> Result<()> {
    let started = Instant::now();
    let (scen, label) = args.scenario.resolve(100)?;
    let n = scen.supplier_count();

    let text = fs::read_to_string(&args.distributions).map_err(|source| Error::Io {
        path: args.distributions.clone(),
        source,
    })?;
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let shares = line
            .split(',')
            .map(|p| p.trim().parse::<u64>())
            .collect::<std::result::Result<Vec<u64>, _>>()
            .map_err(|e| Error::Validation(format!("line {}: {e}", lineno + 1)))?;
        if shares.len() != n {
            return Err(Error::Validation(format!(
                "line {}: row has {} entries but the scenario has {n} suppliers",
                lineno + 1,
                shares.len()
            )));
        }
        let dist = Distribution::new(shares, scen.demand()).map_err(|e| {
            Error::Validation(format!("line {}: {e}", lineno + 1))
        })?;
        rows.push(dist);
    }
    if rows.is_empty() {
        return Err(Error::Validation(format!(
            "{} contains no distributions",
            args.distributions.display()
        )));
    }

    let mut csv = String::new();
    let cols: Vec<String> = (1..=n)
        .map(|i| format!("alpha{i}"))
        .chain((1..=n).map(|i| format!("beta{i}")))
        .chain((1..=n).map(|i| format!("p{i}")))
        .collect();
    csv.push_str(&format!(
        "{},{},total_cost,risk_index,fitness\n",
        shares_header(n),
        cols.join(",")
    ));
    for dist in &rows {
        let probs = scen.marginal_failure_probabilities(&dist)?;
        let (mut alphas, mut betas) = (Vec::new(), Vec::new());
        for (supplier, &p) in scen.suppliers().iter().zip(&probs) {
            let (a, b) = supplier.profile.values(p);
            alphas.push(float(a));
            betas.push(float(b));
        }
        csv.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            shares_row(dist),
            alphas.join(","),
            betas.join(","),
            probs.iter().map(|&p| float(p)).collect::<Vec<_>>().join(","),
            float(scen.total_cost(dist)?),
            float(scen.risk_index(dist)?),
            float(scen.fitness(dist)?),
        ));
    }

    let mut out = OutputSet::new(&args.scenario.out);
    out.write("evaluation.csv", &csv)?;
    out.finish(
        "evaluate",
        &label,
        json!({ "distributions": args.distributions.display().to_string(), "demand": scen.demand() }),
        None,
        started,
    )
}

fn cmd_enumerate(args: &EnumerateArgs) -> Result<()> {
    let started = Instant::now();
    let (scen, label) = args.scenario.resolve(100)?;
    let n = scen.supplier_count();

    let mut csv = format!("{},total_cost,risk_index,feasible\n", shares_header(n));
    let report = for_each_distribution(&scen, args.relax, |dist| {
        let point = scen.objective_point(dist)?;
        let feasible = scen.is_feasible(dist, false)?;
        csv.push_str(&format!(
            "{},{},{},{}\n",
            shares_row(dist),
            float(point.total_cost),
            float(point.risk_index),
            feasible
        ));
        Ok(())
    })?;

    let mut out = OutputSet::new(&args.scenario.out);
    out.write("enumeration.csv", &csv)?;
    out.write_json("report.json", &report)?;
    if args.front {
        let front = exact_pareto_front(&scen, args.relax)?;
        let mut front_csv = format!("{},total_cost,risk_index,feasible\n", shares_header(n));
        for fp in &front {
            front_csv.push_str(&format!(
                "{},{},{},{}\n",
                shares_row(&fp.distribution),
                float(fp.point.total_cost),
                float(fp.point.risk_index),
                scen.is_feasible(&fp.distribution, false)?
            ));
        }
        out.write("front.csv", &front_csv)?;
    }
    out.finish(
        "enumerate",
        &label,
        json!({ "relax": args.relax, "front": args.front, "demand": scen.demand() }),
        None,
        started,
    )
}

fn stats_csv(result: &GaResult) -> String {
    let mut csv = String::from("generation,spawned,children,mutations,eliminated,surviving,best_fitness\n");
    for h in &result.history {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            h.generation, h.spawned, h.children, h.mutations, h.eliminated, h.surviving,
            float(h.best_fitness)
        ));
    }
    csv
}

fn cmd_ga(args: &GaArgs) -> Result<()> {
    let started = Instant::now();
    let (scen, label) = args.scenario.resolve(100)?;
    let cfg = args.solver.config();
    let objective: ObjectiveKind = args.objective.into();
    let result = run_ga(&scen, &cfg, objective)?;

    let best = json!({
        "distribution": result.best.shares(),
        "fitness": result.best_fitness,
        "total_cost": result.best_point.total_cost,
        "risk_index": result.best_point.risk_index,
        "evaluations": result.evaluations,
        "generations": result.history.len(),
    });

    let mut out = OutputSet::new(&args.scenario.out);
    out.write_json("best.json", &best)?;
    out.write("stats.csv", &stats_csv(&result))?;
    let mut config = args.solver.echo();
    config["objective"] = json!(match args.objective {
        Objective::Cost => "cost",
        Objective::Risk => "risk",
        Objective::Weighted => "weighted",
    });
    config["demand"] = json!(scen.demand());
    out.finish("ga", &label, config, Some(args.solver.seed), started)
}

fn front_csv(swept: &SweepResult, n: usize) -> String {
    let mut csv = format!("demand,{},total_cost,risk_index,source\n", shares_header(n));
    for entry in &swept.entries {
        let cost_members: HashSet<&Distribution> =
            entry.result.cost_run.final_population.iter().collect();
        for fp in &entry.result.front {
            let source = if cost_members.contains(&fp.distribution) {
                "cost_run"
            } else {
                "risk_run"
            };
            csv.push_str(&format!(
                "{},{},{},{},{}\n",
                entry.demand,
                shares_row(&fp.distribution),
                float(fp.point.total_cost),
                float(fp.point.risk_index),
                source
            ));
        }
    }
    csv
}

fn cmd_pareto(args: &ParetoArgs) -> Result<()> {
    let started = Instant::now();
    let (scen, label) = args.scenario.resolve(100)?;
    let cfg = args.solver.config();
    let swept = sweep(&scen, &args.demands, &cfg, args.indicators, worker_count())?;

    let mut triple = String::from("demand,min_fc,max_fc,min_ri\n");
    for entry in &swept.entries {
        triple.push_str(&format!(
            "{},{},{},{}\n",
            entry.demand,
            float(entry.result.min_cost),
            float(entry.result.max_cost),
            float(entry.result.min_risk)
        ));
    }

    let mut out = OutputSet::new(&args.scenario.out);
    out.write("triple.csv", &triple)?;
    out.write("front.csv", &front_csv(&swept, scen.supplier_count()))?;
    if args.indicators {
        for entry in &swept.entries {
            let series = entry.indicators.as_ref().expect("indicators recorded");
            let mut csv = String::from("generation,pareto_distance\n");
            for (g, d) in series.iter().enumerate() {
                csv.push_str(&format!("{},{}\n", g + 1, float(*d)));
            }
            out.write(&format!("indicators_{}.csv", entry.demand), &csv)?;
        }
    }
    let mut config = args.solver.echo();
    config["demands"] = json!(args.demands);
    config["indicators"] = json!(args.indicators);
    out.finish("pareto", &label, config, Some(args.solver.seed), started)
}

fn cmd_compare(args: &CompareArgs) -> Result<()> {
    let started = Instant::now();
    let (scen, label) = args.scenario.resolve(100)?;
    if args.demands.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Validation("demands must be strictly increasing".into()));
    }
    let cfg = args.solver.config();

    let mut csv = String::from("demand,method,solutions,runtime_ms\n");
    for &demand in &args.demands {
        let scen_d = scen.with_demand(demand)?;
        for method in &args.methods {
            let row_started = Instant::now();
            let solutions: u64 = match method {
                Method::Oracle => {
                    let mut count = 0u64;
                    for_each_distribution(&scen_d, false, |_| {
                        count += 1;
                        Ok(())
                    })?;
                    count
                }
                Method::Ga => {
                    let ga_cfg = GaConfig {
                        seed: riskfront_core::derive_seed(cfg.seed, demand),
                        ..cfg.clone()
                    };
                    run_ga(&scen_d, &ga_cfg, ObjectiveKind::Weighted)?.evaluations
                }
                Method::GaPareto => {
                    let ga_cfg = GaConfig {
                        seed: riskfront_core::derive_seed(cfg.seed, demand),
                        ..cfg.clone()
                    };
                    let result = pareto_optimize(&scen_d, &ga_cfg)?;
                    result.cost_run.evaluations + result.risk_run.evaluations
                }
            };
            csv.push_str(&format!(
                "{},{},{},{}\n",
                demand,
                method.label(),
                solutions,
                row_started.elapsed().as_millis()
            ));
        }
    }

    let mut out = OutputSet::new(&args.scenario.out);
    out.write("compare.csv", &csv)?;
    let mut config = args.solver.echo();
    config["demands"] = json!(args.demands);
    config["methods"] = json!(args.methods.iter().map(|m| m.label()).collect::<Vec<_>>());
    out.finish("compare", &label, config, Some(args.solver.seed), started)
}

fn cmd_envelope(args: &EnvelopeArgs) -> Result<()> {
    let started = Instant::now();
    let (scen, label) = args.scenario.resolve(100)?;
    let cfg = args.solver.config();

    let demand_series = load_series(&args.demand_series, &ColumnMap::new("t", "demand"))?;
    let forecast = load_series(&args.forecast, &ColumnMap::new("t", "revenue"))?;

    let swept = sweep(&scen, &args.demands, &cfg, false, worker_count())?;
    let envelope = build_envelope(&demand_series, &swept)?;
    let report = containment_ratio(&forecast, &envelope)?;

    let mut csv = String::from("t,lower,upper\n");
    for (&(t, lo), &(_, hi)) in envelope.lower.points().iter().zip(envelope.upper.points()) {
        csv.push_str(&format!("{},{},{}\n", float(t), float(lo), float(hi)));
    }

    let mut out = OutputSet::new(&args.scenario.out);
    out.write("envelope.csv", &csv)?;
    out.write_json("containment.json", &report)?;
    let mut config = args.solver.echo();
    config["demands"] = json!(args.demands);
    config["demand_series"] = json!(args.demand_series.display().to_string());
    config["forecast"] = json!(args.forecast.display().to_string());
    out.finish("envelope", &label, config, Some(args.solver.seed), started)
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Evaluate(args) => cmd_evaluate(args),
        Command::Enumerate(args) => cmd_enumerate(args),
        Command::Ga(args) => cmd_ga(args),
        Command::Pareto(args) => cmd_pareto(args),
        Command::Compare(args) => cmd_compare(args),
        Command::Envelope(args) => cmd_envelope(args),
    }
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Capacity(_) => 3,
        Error::Infeasible(_) => 4,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}
