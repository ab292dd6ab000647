use std::path::{Path, PathBuf};

use clap::{Args, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::json;

use super::io::{csv_table, parse_sizes, read_text, OutputArgs, SizeList};
use super::{CliError, CliResult};
use crate::arraysim::{
    execute_plan, plan_rearrangement, run_trial, sample_loading, scaling_benchmark, success_probability, trial_rng,
    ArrayGeometry, ArrayState, BenchPattern, BenchRow, BenchmarkOptions, LoadingModel, LossMode, LossModel, MovePlan,
    PlanOptions, TargetPattern, TrajectoryMode, TrialConfig, DEFAULT_PARABOLIC_APEX,
};

#[derive(Debug, Subcommand)]
pub enum RearrangeCmd {
    /// Plan moves from a loaded (or sampled) array to a target pattern.
    Plan(PlanArgs),
    /// Execute plans with atom loss: one run for a given state, otherwise a
    /// Monte Carlo estimate of the success probability.
    Simulate(SimulateArgs),
    /// Mean move and batch counts versus target size, as CSV.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PatternArg {
    Checkerboard,
    Stripes,
}

impl From<PatternArg> for BenchPattern {
    fn from(p: PatternArg) -> Self {
        match p {
            PatternArg::Checkerboard => BenchPattern::Checkerboard,
            PatternArg::Stripes => BenchPattern::Stripes,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum TrajectoryArg {
    Corridor,
    Parabolic,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum LossArg {
    Ideal,
    Proximity,
}

#[derive(Debug, Clone, Args)]
pub struct LoadingArgs {
    /// Per-site probability of loading one atom of isotope 1.
    #[arg(long, default_value_t = 0.2)]
    pub p1: f64,
    /// Per-site probability of loading one atom of isotope 2.
    #[arg(long, default_value_t = 0.2)]
    pub p2: f64,
    /// Per-site probability of loading one atom of each isotope.
    #[arg(long, default_value_t = 0.002)]
    pub p_dual: f64,
}

#[derive(Debug, Clone, Args)]
pub struct PlanningArgs {
    /// Tweezer trajectory shape.
    #[arg(long, value_enum, default_value = "corridor")]
    pub trajectory: TrajectoryArg,
    /// Arc apex offset for parabolic trajectories, in units of the pitch.
    #[arg(long, default_value_t = DEFAULT_PARABOLIC_APEX)]
    pub apex: f64,
    /// Execute every move on its own instead of batching parallel moves.
    #[arg(long)]
    pub serial: bool,
}

impl PlanningArgs {
    fn options(&self) -> PlanOptions {
        let trajectory = match self.trajectory {
            TrajectoryArg::Corridor => TrajectoryMode::Corridor,
            TrajectoryArg::Parabolic => TrajectoryMode::Parabolic { apex: self.apex },
        };
        PlanOptions { trajectory, parallel: !self.serial }
    }
}

#[derive(Debug, Clone, Args)]
pub struct ArrayArgs {
    /// Loaded array as text rows (`.`, `1`, `2`, `D`) or grid JSON; sampled
    /// from the loading probabilities when omitted.
    #[arg(long, value_name = "FILE")]
    pub state: Option<PathBuf>,
    /// Target pattern as text rows (`1`, `2`, `.` for don't care) or grid JSON; a centred
    /// block of `--pattern` when omitted.
    #[arg(long, value_name = "FILE")]
    pub target: Option<PathBuf>,
    /// Rows of a sampled array.
    #[arg(long, default_value_t = 10)]
    pub rows: usize,
    /// Columns of a sampled array.
    #[arg(long, default_value_t = 10)]
    pub cols: usize,
    /// Site spacing in μm.
    #[arg(long, default_value_t = 5.0)]
    pub pitch: f64,
    /// Generated target pattern.
    #[arg(long, value_enum, default_value = "checkerboard")]
    pub pattern: PatternArg,
    /// Side length of the generated target block.
    #[arg(long, default_value_t = 4)]
    pub size: usize,
    #[command(flatten)]
    pub loading: LoadingArgs,
    #[command(flatten)]
    pub planning: PlanningArgs,
}

#[derive(Debug, Clone, Args)]
pub struct LossArgs {
    /// Loss model applied while executing moves.
    #[arg(long, value_enum, default_value = "ideal")]
    pub loss: LossArg,
    /// Distance (μm) below which a passing tweezer disturbs a resting atom.
    #[arg(long, default_value_t = 1.0)]
    pub activation_radius: f64,
    /// Probability that a disturbed resting atom is lost.
    #[arg(long, default_value_t = 1.0)]
    pub p_loss_near: f64,
    /// Per-move probability of losing the transported atom.
    #[arg(long, default_value_t = 0.0)]
    pub p_loss_transport: f64,
}

impl LossArgs {
    fn model(&self) -> LossModel {
        LossModel {
            mode: match self.loss {
                LossArg::Ideal => LossMode::Ideal,
                LossArg::Proximity => LossMode::ProximityLoss,
            },
            activation_radius: self.activation_radius,
            p_loss_near: self.p_loss_near,
            p_loss_transport: self.p_loss_transport,
        }
    }
}

#[derive(Debug, Args)]
pub struct PlanArgs {
    #[command(flatten)]
    pub array: ArrayArgs,
    /// Seed for sampling the loaded array.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub array: ArrayArgs,
    #[command(flatten)]
    pub loss: LossArgs,
    /// Monte Carlo trials (ignored when `--state` is given).
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
    /// Seed for loading and loss draws.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Target side lengths: inclusive range `a..b` or list `a,b,c`.
    #[arg(long, default_value = "2..8", value_parser = parse_sizes)]
    pub sizes: SizeList,
    /// Trials per size.
    #[arg(long, default_value_t = 200)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Target pattern.
    #[arg(long, value_enum, default_value = "checkerboard")]
    pub pattern: PatternArg,
    /// Square grid side; `2·size + 2` when omitted.
    #[arg(long)]
    pub grid_side: Option<usize>,
    /// Site spacing in μm.
    #[arg(long, default_value_t = 5.0)]
    pub pitch: f64,
    #[command(flatten)]
    pub loading: LoadingArgs,
    #[command(flatten)]
    pub planning: PlanningArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

pub fn run(cmd: RearrangeCmd) -> CliResult {
    match cmd {
        RearrangeCmd::Plan(a) => plan(a),
        RearrangeCmd::Simulate(a) => simulate(a),
        RearrangeCmd::Bench(a) => bench(a),
    }
}

fn loading_model(a: &LoadingArgs, seed: u64) -> LoadingModel {
    LoadingModel { p1: a.p1, p2: a.p2, p_dual: a.p_dual, seed }
}

fn read_state(path: &Path, pitch: f64) -> Result<ArrayState, CliError> {
    let text = read_text(path)?;
    if text.trim_start().starts_with('{') {
        Ok(ArrayState::from_json(&serde_json::from_str(&text)?)?)
    } else {
        Ok(ArrayState::parse_text(&text, pitch)?)
    }
}

fn read_target(path: &Path) -> Result<TargetPattern, CliError> {
    let text = read_text(path)?;
    if text.trim_start().starts_with('{') {
        Ok(TargetPattern::from_json(&serde_json::from_str(&text)?)?)
    } else {
        Ok(TargetPattern::parse_text(&text)?)
    }
}

fn geometry_of(a: &ArrayArgs) -> Result<ArrayGeometry, CliError> {
    Ok(ArrayGeometry::new(a.rows, a.cols, a.pitch)?)
}

fn target_for(a: &ArrayArgs, rows: usize, cols: usize) -> Result<TargetPattern, CliError> {
    let t = match &a.target {
        Some(p) => read_target(p)?,
        None => match a.pattern {
            PatternArg::Checkerboard => TargetPattern::centered_checkerboard(rows, cols, a.size),
            PatternArg::Stripes => TargetPattern::centered_stripes(rows, cols, a.size),
        },
    };
    if t.rows != rows || t.cols != cols {
        return Err(CliError(format!("target is {}x{} but the array is {rows}x{cols}", t.rows, t.cols)));
    }
    Ok(t)
}

fn initial_state(a: &ArrayArgs, seed: u64) -> Result<ArrayState, CliError> {
    match &a.state {
        Some(p) => read_state(p, a.pitch),
        None => Ok(sample_loading(&geometry_of(a)?, &loading_model(&a.loading, seed))?),
    }
}

fn plan_json(state: &ArrayState, target: &TargetPattern, plan: &MovePlan) -> serde_json::Value {
    json!({
        "initial": state.to_json(),
        "target": target.to_json(),
        "predicted": plan.predicted.to_json(),
        "n_moves": plan.moves.len(),
        "n_batches": plan.n_batches,
        "phases": plan.phases,
        "moves": plan.moves,
        "log": plan.log,
    })
}

fn paths_csv(plan: &MovePlan) -> String {
    let rows = plan.moves.iter().enumerate().flat_map(|(i, m)| {
        let phase = serde_json::to_value(m.phase).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default();
        let kind = serde_json::to_value(m.kind).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default();
        m.path.iter().map(move |(x, y)| format!("{i},{},{phase},{kind},{x},{y}", m.batch_id)).collect::<Vec<_>>()
    });
    csv_table("move,batch,phase,kind,x_um,y_um", rows)
}

fn plan(a: PlanArgs) -> CliResult {
    a.out.check_free(&["plan.json"])?;
    let state = initial_state(&a.array, a.seed)?;
    let target = target_for(&a.array, state.geometry.rows, state.geometry.cols)?;
    let plan = plan_rearrangement(&state, &target, &a.array.planning.options())?;
    let path = a.out.write("plan.json", &format!("{:#}\n", plan_json(&state, &target, &plan)))?;
    let plot = a.out.plot("plan_paths.csv", || paths_csv(&plan))?;
    Ok(json!({
        "command": "rearrange plan",
        "seed": a.seed,
        "moves": plan.moves.len(),
        "batches": plan.n_batches,
        "reaches_target": plan.predicted.satisfies(&target),
        "output": path,
        "plotdata": plot,
    }))
}

fn simulate(a: SimulateArgs) -> CliResult {
    a.out.check_free(&["simulate.json"])?;
    let loss = a.loss.model();
    loss.validate()?;
    let opts = a.array.planning.options();
    if let Some(p) = &a.array.state {
        let state = read_state(p, a.array.pitch)?;
        let target = target_for(&a.array, state.geometry.rows, state.geometry.cols)?;
        let plan = plan_rearrangement(&state, &target, &opts)?;
        let mut rng = trial_rng(a.seed, 0);
        let (fin, losses) = execute_plan(&state, &plan, &loss, &mut rng)?;
        let success = fin.satisfies(&target);
        let doc = json!({
            "seed": a.seed,
            "loss_model": loss,
            "initial": state.to_json(),
            "target": target.to_json(),
            "final": fin.to_json(),
            "success": success,
            "n_moves": plan.moves.len(),
            "n_batches": plan.n_batches,
            "losses": losses,
        });
        let path = a.out.write("simulate.json", &format!("{doc:#}\n"))?;
        let plot = a.out.plot("simulate_paths.csv", || paths_csv(&plan))?;
        return Ok(json!({
            "command": "rearrange simulate",
            "seed": a.seed,
            "success": success,
            "lost": losses.len(),
            "output": path,
            "plotdata": plot,
        }));
    }
    let geometry = geometry_of(&a.array)?;
    let cfg = TrialConfig {
        geometry,
        loading: loading_model(&a.array.loading, a.seed),
        target: target_for(&a.array, geometry.rows, geometry.cols)?,
        plan: opts,
        loss,
    };
    let est = success_probability(&cfg, a.trials, a.seed)?;
    let doc = json!({ "seed": a.seed, "config": cfg, "estimate": est });
    let path = a.out.write("simulate.json", &format!("{doc:#}\n"))?;
    let plot = a.out.plot_result("simulate_trials.csv", || {
        let outcomes =
            (0..a.trials).into_par_iter().map(|t| run_trial(&cfg, a.seed, t)).collect::<Result<Vec<_>, _>>()?;
        Ok(csv_table(
            "trial,success,feasible,moves,batches,lost",
            outcomes.iter().enumerate().map(|(t, o)| {
                format!("{t},{},{},{},{},{}", o.success as u8, o.feasible as u8, o.moves, o.batches, o.lost)
            }),
        ))
    })?;
    Ok(json!({
        "command": "rearrange simulate",
        "seed": a.seed,
        "trials": est.n_trials,
        "p_success": est.p_success,
        "stderr": est.stderr,
        "feasible": est.feasible,
        "output": path,
        "plotdata": plot,
    }))
}

fn bench(a: BenchArgs) -> CliResult {
    a.out.check_free(&["bench.csv"])?;
    let opts = BenchmarkOptions {
        trials: a.trials,
        seed: a.seed,
        pattern: a.pattern.into(),
        plan: a.planning.options(),
        pitch: a.pitch,
        grid_side: a.grid_side,
    };
    let rows = scaling_benchmark(&a.sizes.0, &loading_model(&a.loading, a.seed), &opts)?;
    let csv = csv_table(BenchRow::CSV_HEADER, rows.iter().map(BenchRow::csv_line));
    let path = a.out.write("bench.csv", &csv)?;
    Ok(json!({
        "command": "rearrange bench",
        "seed": a.seed,
        "trials": a.trials,
        "sizes": a.sizes.0,
        "output": path,
    }))
}
