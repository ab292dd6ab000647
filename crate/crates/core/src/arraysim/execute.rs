//! Move execution with optional atom loss.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::path::path_distance;
use super::{ArrayError, ArrayState, Destination, MovePlan, Occupancy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossMode {
    #[default]
    Ideal,
    ProximityLoss,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossModel {
    pub mode: LossMode,
    /// Distance (μm) below which a passing tweezer disturbs a resting atom.
    pub activation_radius: f64,
    pub p_loss_near: f64,
    /// Per-move probability of losing the transported atom.
    pub p_loss_transport: f64,
}

impl Default for LossModel {
    fn default() -> Self {
        LossModel { mode: LossMode::Ideal, activation_radius: 1.0, p_loss_near: 1.0, p_loss_transport: 0.0 }
    }
}

impl LossModel {
    pub fn proximity() -> Self {
        LossModel { mode: LossMode::ProximityLoss, ..Default::default() }
    }

    pub fn validate(&self) -> Result<(), ArrayError> {
        let p_ok = |p: f64| (0.0..=1.0).contains(&p);
        if !(self.activation_radius >= 0.0 && self.activation_radius.is_finite()) {
            return Err(ArrayError::BadLossModel(format!("activation_radius {}", self.activation_radius)));
        }
        if !p_ok(self.p_loss_near) || !p_ok(self.p_loss_transport) {
            return Err(ArrayError::BadLossModel(format!(
                "probabilities must lie in [0, 1]: p_loss_near={}, p_loss_transport={}",
                self.p_loss_near, self.p_loss_transport
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossCause {
    /// A tweezer path came within the activation radius of a resting atom.
    Proximity,
    /// The transported atom was dropped.
    Transport,
    /// The move was skipped because its atom had already been lost.
    SourceLost,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossEvent {
    pub move_index: usize,
    pub batch_id: usize,
    pub site: usize,
    pub occupancy: Occupancy,
    pub cause: LossCause,
}

/// Executes `plan` on `state` batch by batch. Returns the final state and
/// the loss log.
pub fn execute_plan<R: Rng + ?Sized>(
    state: &ArrayState,
    plan: &MovePlan,
    loss: &LossModel,
    rng: &mut R,
) -> Result<(ArrayState, Vec<LossEvent>), ArrayError> {
    loss.validate()?;
    let g = state.geometry;
    let mut occ = state.occupancy.clone();
    let mut lost = vec![false; occ.len()];
    let mut log = Vec::new();
    let lossy = loss.mode == LossMode::ProximityLoss;

    let mut index = 0;
    for batch in plan.batches() {
        let first = index;
        let batch_id = batch[0].batch_id;
        if lossy && loss.p_loss_near > 0.0 {
            let mut participant = vec![false; occ.len()];
            for m in batch {
                participant[m.src] = true;
                if let Some(d) = m.dst.site() {
                    participant[d] = true;
                }
            }
            for s in 0..occ.len() {
                if participant[s] || !occ[s].is_occupied() {
                    continue;
                }
                let p = g.position(s);
                let near = batch.iter().any(|m| path_distance(p, &m.path) < loss.activation_radius);
                if near && rng.random::<f64>() < loss.p_loss_near {
                    log.push(LossEvent {
                        move_index: first,
                        batch_id,
                        site: s,
                        occupancy: occ[s],
                        cause: LossCause::Proximity,
                    });
                    occ[s] = Occupancy::Empty;
                    lost[s] = true;
                }
            }
        }
        for m in batch {
            let i = index;
            index += 1;
            let here = occ[m.src];
            if here == Occupancy::Empty {
                if lost[m.src] {
                    log.push(LossEvent {
                        move_index: i,
                        batch_id,
                        site: m.src,
                        occupancy: here,
                        cause: LossCause::SourceLost,
                    });
                    // the planner expects an atom at the destination from now on
                    if let Destination::Site(d) = m.dst {
                        lost[d] = true;
                    }
                    continue;
                }
                return Err(ArrayError::PlanInconsistent { index: i, msg: format!("source site {} is empty", m.src) });
            }
            if here != m.cargo.occupancy() {
                return Err(ArrayError::PlanInconsistent {
                    index: i,
                    msg: format!("source site {} holds {:?}, plan expects {:?}", m.src, here, m.cargo),
                });
            }
            occ[m.src] = Occupancy::Empty;
            let Destination::Site(d) = m.dst else { continue };
            if occ[d] != Occupancy::Empty {
                return Err(ArrayError::PlanInconsistent {
                    index: i,
                    msg: format!("destination site {d} is occupied"),
                });
            }
            if lossy && loss.p_loss_transport > 0.0 && rng.random::<f64>() < loss.p_loss_transport {
                log.push(LossEvent {
                    move_index: i,
                    batch_id,
                    site: m.src,
                    occupancy: here,
                    cause: LossCause::Transport,
                });
                lost[d] = true;
                continue;
            }
            occ[d] = here;
            lost[d] = false;
        }
    }
    Ok((ArrayState { geometry: g, occupancy: occ }, log))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arraysim::{plan_rearrangement, PlanOptions, TargetPattern, TrajectoryMode};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn ideal_execution_reaches_prediction() {
        let s = ArrayState::parse_text("2.1.\n.1.2\n1..2\n", 5.0).unwrap();
        let t = TargetPattern::parse_text("12..\n21..\n....\n").unwrap();
        let plan = plan_rearrangement(&s, &t, &PlanOptions::default()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (f, log) = execute_plan(&s, &plan, &LossModel::default(), &mut rng).unwrap();
        assert!(log.is_empty());
        assert_eq!(f, plan.predicted);
        assert!(f.satisfies(&t));
    }

    #[test]
    fn corridor_paths_cause_no_proximity_loss() {
        let s = ArrayState::parse_text("2.1.\n.1.2\n1..2\n", 5.0).unwrap();
        let t = TargetPattern::parse_text("12..\n21..\n....\n").unwrap();
        let plan = plan_rearrangement(&s, &t, &PlanOptions::default()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (f, log) = execute_plan(&s, &plan, &LossModel::proximity(), &mut rng).unwrap();
        assert!(log.is_empty(), "{log:?}");
        assert!(f.satisfies(&t));
    }

    #[test]
    fn straight_line_through_a_site_kills_it() {
        // a flat arc along a row passes over the middle atom
        let s = ArrayState::parse_text("1 2 . ".replace(' ', "").as_str(), 5.0).unwrap();
        let t = TargetPattern::parse_text("..1").unwrap();
        let opts = PlanOptions { trajectory: TrajectoryMode::Parabolic { apex: 0.0 }, parallel: false };
        let plan = plan_rearrangement(&s, &t, &opts).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (f, log) = execute_plan(&s, &plan, &LossModel::proximity(), &mut rng).unwrap();
        assert_eq!(log.len(), 1);
        assert_eq!(log[0].cause, LossCause::Proximity);
        assert_eq!(log[0].site, 1);
        assert_eq!(f.to_text(), "..1\n");
    }

    #[test]
    fn move_from_empty_site_is_an_error() {
        let s = ArrayState::parse_text("1.\n", 5.0).unwrap();
        let t = TargetPattern::parse_text(".1").unwrap();
        let plan = plan_rearrangement(&s, &t, &PlanOptions::default()).unwrap();
        let empty = ArrayState::parse_text("..\n", 5.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let e = execute_plan(&empty, &plan, &LossModel::default(), &mut rng).unwrap_err();
        assert!(matches!(e, ArrayError::PlanInconsistent { index: 0, .. }));
    }
}
