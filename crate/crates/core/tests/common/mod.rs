//! Helpers shared by the integration test targets.
#![allow(dead_code)]

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tweezerforge::arraysim::{
    execute_plan, plan_rearrangement, ArrayError, ArrayGeometry, ArrayState, Destination, LossModel, MovePlan,
    Occupancy, PlanOptions, Point, SiteTarget, TargetPattern,
};

/// Shortest distance from `p` to the polyline `path`, computed directly from
/// the segment projections.
pub fn distance_to_polyline(p: Point, path: &[Point]) -> f64 {
    let d = |a: Point, b: Point| ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt();
    if path.len() == 1 {
        return d(p, path[0]);
    }
    path.windows(2)
        .map(|w| {
            let (a, b) = (w[0], w[1]);
            let (vx, vy) = (b.0 - a.0, b.1 - a.1);
            let len2 = vx * vx + vy * vy;
            let t = if len2 == 0.0 { 0.0 } else { (((p.0 - a.0) * vx + (p.1 - a.1) * vy) / len2).clamp(0.0, 1.0) };
            d(p, (a.0 + t * vx, a.1 + t * vy))
        })
        .fold(f64::INFINITY, f64::min)
}

/// Smallest distance between any path of a batch and the centre of an
/// occupied site that takes no part in that batch, replaying the plan on
/// `state`.
pub fn min_bystander_distance(state: &ArrayState, plan: &MovePlan) -> f64 {
    let g: ArrayGeometry = state.geometry;
    let mut occ = state.occupancy.clone();
    let mut best = f64::INFINITY;
    for batch in plan.batches() {
        let mut involved = vec![false; occ.len()];
        for m in batch {
            involved[m.src] = true;
            if let Destination::Site(s) = m.dst {
                involved[s] = true;
            }
        }
        for (site, o) in occ.iter().enumerate() {
            if *o == Occupancy::Empty || involved[site] {
                continue;
            }
            for m in batch {
                best = best.min(distance_to_polyline(g.position(site), &m.path));
            }
        }
        for m in batch {
            let cargo = occ[m.src];
            occ[m.src] = Occupancy::Empty;
            if let Destination::Site(s) = m.dst {
                occ[s] = cargo;
            }
        }
    }
    best
}

/// Every assignment of `.`, `1`, `2` to `n` sites.
pub fn all_states(n: usize) -> impl Iterator<Item = Vec<Occupancy>> {
    let total = 3usize.pow(n as u32);
    (0..total).map(move |mut k| {
        (0..n)
            .map(|_| {
                let o = [Occupancy::Empty, Occupancy::Iso1, Occupancy::Iso2][k % 3];
                k /= 3;
                o
            })
            .collect()
    })
}

pub fn counts(occ: &[Occupancy]) -> (usize, usize) {
    (occ.iter().filter(|&&o| o == Occupancy::Iso1).count(), occ.iter().filter(|&&o| o == Occupancy::Iso2).count())
}

pub fn target_from_index(mut k: usize, n: usize) -> Vec<SiteTarget> {
    (0..n)
        .map(|_| {
            let t = [SiteTarget::DontCare, SiteTarget::WantIso1, SiteTarget::WantIso2][k % 3];
            k /= 3;
            t
        })
        .collect()
}

/// Plans and executes a 3×3 instance without loss. Returns whether it was
/// feasible by atom count, or a description of what went wrong.
pub fn instance_outcome(occ: Vec<Occupancy>, sites: Vec<SiteTarget>) -> Result<bool, String> {
    let g = ArrayGeometry::new(3, 3, 5.0).unwrap();
    let state = ArrayState::new(g, occ).unwrap();
    let target = TargetPattern::new(3, 3, sites).unwrap();
    let (n1, n2) = counts(&state.occupancy);
    let feasible = n1 >= target.count(SiteTarget::WantIso1) && n2 >= target.count(SiteTarget::WantIso2);
    let show = || format!("state\n{state}target\n{}", target.to_text());
    match plan_rearrangement(&state, &target, &PlanOptions::default()) {
        Ok(plan) => {
            if !feasible {
                return Err(format!("planned an infeasible instance\n{}", show()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(0);
            let (fin, lost) =
                execute_plan(&state, &plan, &LossModel::default(), &mut rng).map_err(|e| e.to_string())?;
            if !lost.is_empty() || fin != plan.predicted || !fin.satisfies(&target) {
                return Err(format!("ideal execution missed the target\n{}", show()));
            }
        }
        Err(ArrayError::Infeasible(_)) if !feasible => {}
        Err(e) => return Err(format!("{e}\n{}", show())),
    }
    Ok(feasible)
}

pub fn check_instance(occ: Vec<Occupancy>, sites: Vec<SiteTarget>) -> bool {
    instance_outcome(occ, sites).unwrap_or_else(|e| panic!("{e}"))
}

pub fn small_states() -> Vec<Vec<Occupancy>> {
    all_states(9).filter(|o| counts(o).0 <= 4 && counts(o).1 <= 4).collect()
}
