//! Success probability of the 10×10 → 4×4 checkerboard task versus the
//! parabolic apex offset.

use tweezerforge::arraysim::{
    success_probability, ArrayGeometry, LoadingModel, LossModel, PlanOptions, TargetPattern, TrajectoryMode,
    TrialConfig,
};

fn main() {
    let trials: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(10_000);
    let base = TrialConfig {
        geometry: ArrayGeometry::new(10, 10, 5.0).unwrap(),
        loading: LoadingModel { p1: 0.2, p2: 0.2, p_dual: 0.002, seed: 0 },
        target: TargetPattern::centered_checkerboard(10, 10, 4),
        plan: PlanOptions::default(),
        loss: LossModel::proximity(),
    };
    let e = success_probability(&base, trials, 1).unwrap();
    println!("corridor: p={:.4} ± {:.4} (feasible {})", e.p_success, e.stderr, e.feasible);
    let list: Vec<f64> = match std::env::args().nth(2) {
        Some(s) => s.split(',').map(|x| x.parse().unwrap()).collect(),
        None => vec![0.0, 0.1, 0.2, 0.25, 0.3, 0.4, 0.5],
    };
    for apex in list {
        let mut c = base.clone();
        c.plan.trajectory = TrajectoryMode::Parabolic { apex };
        let e = success_probability(&c, trials, 1).unwrap();
        println!("apex {apex:.2}: p={:.4} ± {:.4}", e.p_success, e.stderr);
    }
}
