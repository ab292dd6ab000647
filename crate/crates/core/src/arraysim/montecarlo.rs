//! Monte Carlo success estimates and move-count scaling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    execute_plan, plan_rearrangement, sample_loading_rng, ArrayError, ArrayGeometry, LoadingModel, LossModel,
    PlanOptions, TargetPattern,
};

/// Everything one sample → plan → execute trial needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialConfig {
    pub geometry: ArrayGeometry,
    pub loading: LoadingModel,
    pub target: TargetPattern,
    pub plan: PlanOptions,
    pub loss: LossModel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub success: bool,
    /// False when the loaded state cannot satisfy the target at all.
    pub feasible: bool,
    pub moves: usize,
    pub batches: usize,
    pub lost: usize,
}

/// Generator for trial `trial` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

pub fn run_trial(cfg: &TrialConfig, seed: u64, trial: u64) -> Result<TrialOutcome, ArrayError> {
    let mut rng = trial_rng(seed, trial);
    let state = sample_loading_rng(&cfg.geometry, &cfg.loading, &mut rng)?;
    let plan = match plan_rearrangement(&state, &cfg.target, &cfg.plan) {
        Ok(p) => p,
        Err(ArrayError::Infeasible(_)) => {
            return Ok(TrialOutcome { success: false, feasible: false, moves: 0, batches: 0, lost: 0 });
        }
        Err(e) => return Err(e),
    };
    let (fin, log) = execute_plan(&state, &plan, &cfg.loss, &mut rng)?;
    Ok(TrialOutcome {
        success: fin.satisfies(&cfg.target),
        feasible: true,
        moves: plan.moves.len(),
        batches: plan.n_batches,
        lost: log.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuccessEstimate {
    pub p_success: f64,
    pub stderr: f64,
    pub n_trials: u64,
    pub successes: u64,
    pub feasible: u64,
}

pub fn success_probability(cfg: &TrialConfig, n_trials: u64, seed: u64) -> Result<SuccessEstimate, ArrayError> {
    if n_trials == 0 {
        return Err(ArrayError::NoTrials);
    }
    cfg.loss.validate()?;
    let (successes, feasible) = (0..n_trials)
        .into_par_iter()
        .map(|t| run_trial(cfg, seed, t).map(|o| (o.success as u64, o.feasible as u64)))
        .try_reduce(|| (0, 0), |a, b| Ok((a.0 + b.0, a.1 + b.1)))?;
    let n = n_trials as f64;
    let p = successes as f64 / n;
    Ok(SuccessEstimate { p_success: p, stderr: (p * (1.0 - p) / n).sqrt(), n_trials, successes, feasible })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BenchPattern {
    #[default]
    Checkerboard,
    Stripes,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkOptions {
    pub trials: u64,
    pub seed: u64,
    pub pattern: BenchPattern,
    pub plan: PlanOptions,
    pub pitch: f64,
    /// Square grid side; `None` picks `ceil(2·L) + 2` for a target of side L.
    pub grid_side: Option<usize>,
}

impl Default for BenchmarkOptions {
    fn default() -> Self {
        BenchmarkOptions {
            trials: 200,
            seed: 0,
            pattern: BenchPattern::Checkerboard,
            plan: PlanOptions::default(),
            pitch: 5.0,
            grid_side: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    /// Side length of the square target.
    pub target_size: usize,
    pub grid_side: usize,
    pub feasible_trials: u64,
    /// `None` when no trial was feasible.
    pub mean_moves: Option<f64>,
    pub mean_batches: Option<f64>,
    /// Standard error of `mean_moves`.
    pub stderr: Option<f64>,
}

impl BenchRow {
    pub const CSV_HEADER: &'static str = "target_size,mean_moves,mean_batches,stderr";

    pub fn csv_line(&self) -> String {
        match (self.mean_moves, self.mean_batches, self.stderr) {
            (Some(m), Some(b), Some(s)) => format!("{},{},{},{}", self.target_size, m, b, s),
            _ => format!("{},infeasible,infeasible,infeasible", self.target_size),
        }
    }
}

/// Mean move and batch counts versus target size, averaged over feasible
/// trials. Loss is ideal: counts depend only on loading and planning.
pub fn scaling_benchmark(
    target_sizes: &[usize],
    loading: &LoadingModel,
    opts: &BenchmarkOptions,
) -> Result<Vec<BenchRow>, ArrayError> {
    if opts.trials == 0 {
        return Err(ArrayError::NoTrials);
    }
    loading.validate()?;
    let mut rows = Vec::with_capacity(target_sizes.len());
    for &l in target_sizes {
        let side = opts.grid_side.unwrap_or(2 * l + 2);
        let geometry = ArrayGeometry::new(side, side, opts.pitch)?;
        if l == 0 || l > side {
            rows.push(BenchRow {
                target_size: l,
                grid_side: side,
                feasible_trials: 0,
                mean_moves: None,
                mean_batches: None,
                stderr: None,
            });
            continue;
        }
        let target = match opts.pattern {
            BenchPattern::Checkerboard => TargetPattern::centered_checkerboard(side, side, l),
            BenchPattern::Stripes => TargetPattern::centered_stripes(side, side, l),
        };
        let cfg = TrialConfig { geometry, loading: *loading, target, plan: opts.plan, loss: LossModel::default() };
        let seed = opts.seed ^ (l as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
        let outcomes: Vec<TrialOutcome> =
            (0..opts.trials).into_par_iter().map(|t| run_trial(&cfg, seed, t)).collect::<Result<_, _>>()?;
        // integer sums keep the result independent of reduction order
        let ok: Vec<&TrialOutcome> = outcomes.iter().filter(|o| o.feasible).collect();
        let n = ok.len() as u64;
        let (mean_moves, mean_batches, stderr) = if n == 0 {
            (None, None, None)
        } else {
            let nf = n as f64;
            let sm: u64 = ok.iter().map(|o| o.moves as u64).sum();
            let sm2: u64 = ok.iter().map(|o| (o.moves * o.moves) as u64).sum();
            let sb: u64 = ok.iter().map(|o| o.batches as u64).sum();
            let m = sm as f64 / nf;
            let var = if n > 1 { (sm2 as f64 - nf * m * m) / (nf - 1.0) } else { 0.0 };
            (Some(m), Some(sb as f64 / nf), Some((var.max(0.0) / nf).sqrt()))
        };
        rows.push(BenchRow { target_size: l, grid_side: side, feasible_trials: n, mean_moves, mean_batches, stderr });
    }
    Ok(rows)
}
