//! Seeded Monte-Carlo runs of each experiment kind.
//!
//! Trial `t` of every grid point uses seed `spec.seed + t`, so the same
//! cluster, prices and weights recur along a grid and only the swept
//! parameter changes between points.

use std::time::Instant;

use anyhow::{anyhow, Context, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use ranslice::costs::{congestion_levels, deployment_spend};
use ranslice::equilibrium::{price_of_anarchy, solve_brd, solve_learning, solve_social_optimum, Learner};
use ranslice::exec::{self, Execution};
use ranslice::ingest::{
    build_cluster, generate_scenario, parse_towers, parse_towers_from_reader, AccessRate, Scenario, ScenarioConfig,
    TowerRecord,
};
use ranslice::model::feasible_uniform;
use ranslice::pricing::{make_policy, profit, served_load, update_prices, PricingPolicyKind, PricingState};
use ranslice::{AllocationPolicy, GameInstance};
use serde::Serialize;
use serde_json::{json, Value};

use crate::spec::{DataSource, ExperimentKind, ExperimentSpec, Series};
use crate::stats::summarize;
use crate::table::{Row, Table};

/// Synthetic stand-in for the Boston tower extract.
pub const BOSTON_TOWERS: &str = include_str!("../fixtures/boston_towers.csv");

/// Slot and reshuffle randomness; streams 0 to 3 belong to scenario generation.
const DYNAMICS_STREAM: u64 = 4;

pub fn metric_names(kind: ExperimentKind) -> &'static [&'static str] {
    match kind {
        ExperimentKind::PoaVsRatio | ExperimentKind::PoaVsWeight => {
            &["poa", "bound", "cost_ne", "cost_opt", "brd_rounds", "social_iterations"]
        }
        ExperimentKind::RuntimeCompare => &["brd_rounds", "learning_iterations", "social_iterations"],
        ExperimentKind::StepsizeSweep => &["learning_iterations", "distance_to_ne"],
        ExperimentKind::CongestionVsRatio | ExperimentKind::CongestionVsMu | ExperimentKind::CongestionVsWeight => {
            &["congestion", "congestion_per_rrh", "deployment_cost", "brd_rounds"]
        }
        ExperimentKind::ProfitVsPrice => &["profit", "mean_price", "brd_rounds"],
        ExperimentKind::DynamicTracking => &["congestion_learning", "congestion_ne", "distance", "within"],
    }
}

/// Metrics that get their own plot.
pub fn plotted_metrics(kind: ExperimentKind) -> Vec<Vec<&'static str>> {
    match kind {
        ExperimentKind::PoaVsRatio | ExperimentKind::PoaVsWeight => vec![vec!["poa"]],
        ExperimentKind::RuntimeCompare => vec![vec!["brd_rounds"], vec!["learning_iterations"], vec!["social_iterations"]],
        ExperimentKind::StepsizeSweep => vec![vec!["learning_iterations"]],
        ExperimentKind::CongestionVsRatio | ExperimentKind::CongestionVsMu | ExperimentKind::CongestionVsWeight => {
            vec![vec!["congestion"], vec!["congestion_per_rrh"], vec!["deployment_cost"]]
        }
        ExperimentKind::ProfitVsPrice => vec![vec!["profit"]],
        ExperimentKind::DynamicTracking => vec![vec!["congestion_learning", "congestion_ne"], vec!["distance"]],
    }
}

pub fn load_towers(data: &DataSource) -> Result<Vec<TowerRecord>> {
    let set = match &data.towers {
        Some(path) => parse_towers(path, &data.radios).with_context(|| format!("loading towers from {}", path.display()))?,
        None => parse_towers_from_reader(BOSTON_TOWERS.as_bytes(), &data.radios).context("parsing bundled towers")?,
    };
    Ok(set.records)
}

/// The scenario parameters of one trial at one grid point.
pub fn trial_config(spec: &ExperimentSpec, series: &Series, x: Option<f64>, trial: usize) -> ScenarioConfig {
    let mut c = series.apply(&spec.scenario);
    c.seed = spec.seed.wrapping_add(trial as u64);
    if let Some(x) = x {
        match spec.kind {
            ExperimentKind::PoaVsRatio | ExperimentKind::CongestionVsRatio => {
                c.rrhs = ((x * c.mvnos as f64).round() as usize).max(1);
            }
            ExperimentKind::RuntimeCompare => c.rrhs = (x.round() as usize).max(1),
            ExperimentKind::PoaVsWeight | ExperimentKind::CongestionVsWeight => c.price_weight_max = x,
            ExperimentKind::CongestionVsMu => c.mu = AccessRate::Fixed(x),
            ExperimentKind::ProfitVsPrice => c.price_mean = x,
            ExperimentKind::StepsizeSweep | ExperimentKind::DynamicTracking => {}
        }
    }
    c
}

pub fn build_scenario(towers: &[TowerRecord], spec: &ExperimentSpec, config: &ScenarioConfig) -> Result<Scenario> {
    let cluster = build_cluster(towers, &spec.data.region, config.rrhs, config.seed)?;
    Ok(generate_scenario(&cluster, config, Execution::Sequential)?)
}

/// Users per unit of QoE capacity as seen by an average user:
/// `Σ_r X_r φ_r / Σ_r X_r`.
pub fn user_congestion(game: &GameInstance, policy: &AllocationPolicy) -> f64 {
    let loads = policy.column_sums();
    let total: f64 = loads.iter().sum();
    if total <= 0.0 {
        return 0.0;
    }
    loads.iter().zip(game.inv_qoe()).map(|(x, inv)| x * x * inv).sum::<f64>() / total
}

/// Mean of `φ_r` over RRHs.
pub fn mean_congestion(game: &GameInstance, policy: &AllocationPolicy) -> f64 {
    let phi = congestion_levels(game, policy);
    phi.iter().sum::<f64>() / phi.len() as f64
}

/// Mean over players of `Σ_r ξ_{m,r} p_r`.
pub fn mean_deployment_cost(game: &GameInstance, policy: &AllocationPolicy) -> f64 {
    let m = game.num_players();
    (0..m).map(|i| deployment_spend(game, policy, i)).sum::<f64>() / m as f64
}

struct TrialOutput {
    /// `(x, metrics)`; one entry except for time series.
    rows: Vec<(f64, Vec<f64>)>,
    converged: bool,
    extra: Value,
}

impl TrialOutput {
    fn point(x: f64, metrics: Vec<f64>, converged: bool) -> Self {
        TrialOutput { rows: vec![(x, metrics)], converged, extra: Value::Null }
    }
}

struct Job {
    series: usize,
    x: Option<f64>,
    trial: usize,
}

/// Everything one run produces.
#[derive(Debug, Clone, Serialize)]
pub struct Outcome {
    pub table: Table,
    /// Kind-specific results that are not per-grid-point means, such as
    /// wall-clock timings and reshuffle re-entry counts.
    pub details: Value,
    /// The scenario of the first trial of the first grid point, with its
    /// equilibrium.
    #[serde(skip)]
    pub sample: Option<(ScenarioConfig, Scenario, AllocationPolicy)>,
}

pub fn run_experiment(spec: &ExperimentSpec, exec: Execution) -> Result<Outcome> {
    spec.validate()?;
    let towers = load_towers(&spec.data)?;
    let series = spec.series();
    let xs: Vec<Option<f64>> =
        if spec.kind == ExperimentKind::DynamicTracking { vec![None] } else { spec.x.iter().copied().map(Some).collect() };

    let mut jobs = Vec::with_capacity(series.len() * xs.len() * spec.repetitions);
    for s in 0..series.len() {
        for &x in &xs {
            for trial in 0..spec.repetitions {
                jobs.push(Job { series: s, x, trial });
            }
        }
    }
    let outputs = exec::map(&jobs, exec, |job| {
        run_trial(spec, &towers, &series[job.series], job.x, job.trial).with_context(|| {
            format!("series {:?}, x = {:?}, trial {}", series[job.series].label, job.x, job.trial)
        })
    });
    let outputs = outputs.into_iter().collect::<Result<Vec<_>>>()?;

    let mut table = Table::new(spec.kind.x_label(), metric_names(spec.kind));
    let mut details = Vec::new();
    for (block, chunk) in outputs.chunks(spec.repetitions).enumerate() {
        let label = &series[block / xs.len()].label;
        let nonconverged = chunk.iter().filter(|o| !o.converged).count();
        let points = chunk[0].rows.len();
        for k in 0..points {
            let x = chunk[0].rows[k].0;
            let values = (0..table.metrics.len())
                .map(|j| summarize(&chunk.iter().map(|o| o.rows[k].1[j]).collect::<Vec<_>>()))
                .collect();
            table.rows.push(Row { series: label.clone(), x, reps: chunk.len(), nonconverged, values });
        }
        let extras: Vec<&Value> = chunk.iter().map(|o| &o.extra).filter(|v| !v.is_null()).collect();
        if !extras.is_empty() {
            details.push(block_details(spec.kind, label, xs[block % xs.len()], &extras));
        }
    }

    let sample = {
        let config = trial_config(spec, &series[0], xs[0], 0);
        let scenario = build_scenario(&towers, spec, &config)?;
        let ne = solve_brd(&scenario.game, &feasible_uniform(&scenario.game), spec.solver.brd())?;
        Some((config, scenario, ne.final_policy))
    };
    Ok(Outcome { table, details: Value::Array(details), sample })
}

fn block_details(kind: ExperimentKind, label: &str, x: Option<f64>, extras: &[&Value]) -> Value {
    match kind {
        ExperimentKind::RuntimeCompare => {
            let mean = |key: &str| extras.iter().filter_map(|e| e[key].as_f64()).sum::<f64>() / extras.len() as f64;
            json!({
                "series": label,
                "x": x,
                "wall_ms": { "brd": mean("brd_ms"), "learning": mean("learning_ms"), "social": mean("social_ms") },
            })
        }
        ExperimentKind::DynamicTracking => {
            let (mut hit, mut total) = (0u64, 0u64);
            for e in extras {
                hit += e["reentered"].as_u64().unwrap_or(0);
                total += e["reshuffles"].as_u64().unwrap_or(0);
            }
            json!({
                "series": label,
                "reentered": hit,
                "reshuffles": total,
                "reentry_fraction": if total > 0 { hit as f64 / total as f64 } else { 0.0 },
                "trials": extras,
            })
        }
        ExperimentKind::ProfitVsPrice => {
            let profits: Vec<f64> = extras.iter().filter_map(|e| e["profit"].as_f64()).collect();
            json!({ "series": label, "x": x, "per_trial_profit": profits })
        }
        _ => json!({ "series": label, "x": x, "trials": extras }),
    }
}

fn run_trial(spec: &ExperimentSpec, towers: &[TowerRecord], series: &Series, x: Option<f64>, trial: usize) -> Result<TrialOutput> {
    let config = trial_config(spec, series, x, trial);
    let scenario = build_scenario(towers, spec, &config)?;
    let game = &scenario.game;
    let x = x.unwrap_or(0.0);
    let solver = &spec.solver;
    match spec.kind {
        ExperimentKind::PoaVsRatio | ExperimentKind::PoaVsWeight => {
            let r = price_of_anarchy(game, solver.brd(), solver.social())?;
            let converged = r.equilibrium.converged && r.optimum.converged;
            let metrics = vec![
                r.poa,
                r.bound,
                r.cost_ne,
                r.cost_opt,
                r.equilibrium.iterations as f64,
                r.optimum.iterations as f64,
            ];
            Ok(TrialOutput::point(x, metrics, converged))
        }
        ExperimentKind::RuntimeCompare => {
            let uniform = feasible_uniform(game);
            let clock = Instant::now();
            let brd = solve_brd(game, &uniform, solver.brd())?;
            let brd_ms = clock.elapsed().as_secs_f64() * 1e3;
            let rule = solver.step.rule(game)?;
            let clock = Instant::now();
            let learning = solve_learning(game, None, rule, solver.learning())?;
            let learning_ms = clock.elapsed().as_secs_f64() * 1e3;
            let clock = Instant::now();
            let social = solve_social_optimum(game, None, solver.social())?;
            let social_ms = clock.elapsed().as_secs_f64() * 1e3;
            let converged = brd.converged && learning.converged && social.converged;
            let metrics = vec![brd.iterations as f64, learning.iterations as f64, social.iterations as f64];
            Ok(TrialOutput {
                rows: vec![(x, metrics)],
                converged,
                extra: json!({ "brd_ms": brd_ms, "learning_ms": learning_ms, "social_ms": social_ms }),
            })
        }
        ExperimentKind::StepsizeSweep => {
            let rule = solver.step.with_value(x).rule(game)?;
            let learning = solve_learning(game, None, rule, solver.learning())?;
            let ne = solve_brd(game, &feasible_uniform(game), solver.brd())?;
            let distance = learning.final_policy.max_scaled_diff(&ne.final_policy, game);
            Ok(TrialOutput::point(x, vec![learning.iterations as f64, distance], learning.converged && ne.converged))
        }
        ExperimentKind::CongestionVsRatio | ExperimentKind::CongestionVsMu | ExperimentKind::CongestionVsWeight => {
            let ne = solve_brd(game, &feasible_uniform(game), solver.brd())?;
            let p = &ne.final_policy;
            let metrics =
                vec![user_congestion(game, p), mean_congestion(game, p), mean_deployment_cost(game, p), ne.iterations as f64];
            Ok(TrialOutput::point(x, metrics, ne.converged))
        }
        ExperimentKind::ProfitVsPrice => {
            let kind = series.pricing.ok_or_else(|| anyhow!("series {:?} names no pricing policy", series.label))?;
            pricing_trial(spec, &scenario, &config, kind, x)
        }
        ExperimentKind::DynamicTracking => tracking_trial(spec, &scenario, &config),
    }
}

fn slot_rng(config: &ScenarioConfig) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(DYNAMICS_STREAM);
    rng
}

/// Slot loop: each slot draws a new network configuration, the MVNOs settle
/// on its equilibrium under the current prices, and the operator collects
/// profit and (for the adaptive scheme) moves prices.
fn pricing_trial(
    spec: &ExperimentSpec,
    scenario: &Scenario,
    config: &ScenarioConfig,
    kind: PricingPolicyKind,
    mean_price: f64,
) -> Result<TrialOutput> {
    let settings = &spec.pricing;
    let mut rng = slot_rng(config);
    let mut state = PricingState::new(make_policy(kind, &scenario.game, mean_price)?, settings.sigma, settings.cost_per_user)?;
    let mut profits = Vec::with_capacity(settings.slots);
    let mut prices = Vec::with_capacity(settings.slots);
    let mut rounds = 0.0;
    let mut converged = true;
    for _ in 0..settings.slots {
        let game = scenario.perturbed(&settings.variation, &mut rng, Execution::Sequential)?.with_prices(&state.prices)?;
        let ne = solve_brd(&game, &feasible_uniform(&game), spec.solver.brd())?;
        converged &= ne.converged;
        rounds += ne.iterations as f64;
        let load = served_load(&game, &ne.final_policy);
        profits.push(profit(&state, &load));
        prices.push(state.prices.iter().sum::<f64>() / state.prices.len() as f64);
        if kind == PricingPolicyKind::Adaptive {
            state = update_prices(&state, &load)?;
        }
    }
    let tail = settings.slots - settings.steady_slots;
    let steady = |v: &[f64]| v[tail..].iter().sum::<f64>() / settings.steady_slots as f64;
    let steady_profit = steady(&profits);
    let metrics = vec![steady_profit, steady(&prices), rounds / settings.slots as f64];
    Ok(TrialOutput { rows: vec![(mean_price, metrics)], converged, extra: json!({ "profit": steady_profit }) })
}

/// Learning run on a network that is redrawn every `segment_length`
/// iterations; the first segment starts from uniform scores.
fn tracking_trial(spec: &ExperimentSpec, scenario: &Scenario, config: &ScenarioConfig) -> Result<TrialOutput> {
    let settings = &spec.dynamics;
    let mut rng = slot_rng(config);
    let mut game = scenario.game.clone();
    let mut learner = Learner::new(&game, settings.step.rule(&game)?)?;
    let mut rows = Vec::with_capacity(settings.segments * settings.segment_length);
    let mut converged = true;
    let mut reentered = 0u64;
    let mut hits = Vec::with_capacity(settings.segments);
    for segment in 0..settings.segments {
        if segment > 0 {
            game = scenario.perturbed(&settings.variation, &mut rng, Execution::Sequential)?;
            learner.set_step_rule(settings.step.rule(&game)?)?;
            learner.rebase(&game);
        }
        let ne = solve_brd(&game, &feasible_uniform(&game), spec.solver.brd())?;
        converged &= ne.converged;
        let ne_congestion = user_congestion(&game, &ne.final_policy);
        let mut hit = None;
        for k in 0..settings.segment_length {
            learner.step(&game);
            let distance = learner.policy().max_scaled_diff(&ne.final_policy, &game);
            let within = distance <= settings.neighborhood;
            if within && hit.is_none() {
                hit = Some(k + 1);
            }
            let iteration = (segment * settings.segment_length + k + 1) as f64;
            rows.push((iteration, vec![user_congestion(&game, learner.policy()), ne_congestion, distance, f64::from(u8::from(within))]));
        }
        if segment > 0 && hit.is_some() {
            reentered += 1;
        }
        hits.push(hit);
    }
    let extra = json!({
        "reentered": reentered,
        "reshuffles": settings.segments - 1,
        "first_hit": hits,
    });
    Ok(TrialOutput { rows, converged, extra })
}
