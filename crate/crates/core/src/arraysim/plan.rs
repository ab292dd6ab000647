//! Dual-species rearrangement planner.
//!
//! Phases, in order: Classify1 (ejects dual sites, clears Iso2 atoms off
//! Iso1 targets), PreSort1 (moves Iso1 atoms between columns until every
//! column holds at least as many as it has Iso1 targets), MainSort1
//! (fills Iso1 targets within each column), Classify2 (clears leftover Iso1
//! atoms off Iso2 targets; skipped when every column already holds exactly
//! its Iso1 target count), PreSort2 and MainSort2.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::path::{corridor_path, parabolic_path, parking_position, Point, TrajectoryMode};
use super::{ArrayError, ArrayGeometry, ArrayState, Occupancy, SiteTarget, Species, TargetPattern};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Phase {
    Classify1,
    PreSort1,
    MainSort1,
    Classify2,
    PreSort2,
    MainSort2,
    /// Used only for moves built outside the planner (e.g. a final clean-up);
    /// planner ejections carry the phase they happen in and `MoveKind::Eject`.
    Eject,
}

impl Phase {
    pub const SEQUENCE: [Phase; 6] =
        [Phase::Classify1, Phase::PreSort1, Phase::MainSort1, Phase::Classify2, Phase::PreSort2, Phase::MainSort2];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Cargo {
    Iso1,
    Iso2,
    Dual,
}

impl Cargo {
    pub fn occupancy(self) -> Occupancy {
        match self {
            Cargo::Iso1 => Occupancy::Iso1,
            Cargo::Iso2 => Occupancy::Iso2,
            Cargo::Dual => Occupancy::Dual,
        }
    }

    pub fn from_species(s: Species) -> Cargo {
        match s {
            Species::Iso1 => Cargo::Iso1,
            Species::Iso2 => Cargo::Iso2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Destination {
    Site(usize),
    /// Off-grid position; the atom is discarded.
    Parking {
        x: f64,
        y: f64,
    },
}

impl Destination {
    pub fn site(&self) -> Option<usize> {
        match self {
            Destination::Site(s) => Some(*s),
            Destination::Parking { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MoveKind {
    Transfer,
    Eject,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Move {
    pub cargo: Cargo,
    pub src: usize,
    pub dst: Destination,
    /// Waypoints in μm, from the source centre to the destination.
    pub path: Vec<Point>,
    pub batch_id: usize,
    pub phase: Phase,
    pub kind: MoveKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseRecord {
    pub phase: Phase,
    pub skipped: bool,
    pub moves: usize,
    pub batches: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MovePlan {
    pub moves: Vec<Move>,
    pub phases: Vec<PhaseRecord>,
    pub n_batches: usize,
    /// State expected after executing the plan without losses.
    pub predicted: ArrayState,
    pub log: Vec<String>,
}

impl MovePlan {
    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    pub fn phase_record(&self, p: Phase) -> Option<&PhaseRecord> {
        self.phases.iter().find(|r| r.phase == p)
    }

    /// Moves grouped by batch, in execution order.
    pub fn batches(&self) -> Vec<&[Move]> {
        let mut out = Vec::new();
        let mut start = 0;
        for i in 1..=self.moves.len() {
            if i == self.moves.len() || self.moves[i].batch_id != self.moves[start].batch_id {
                out.push(&self.moves[start..i]);
                start = i;
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanOptions {
    pub trajectory: TrajectoryMode,
    /// Merge compatible consecutive moves into parallel batches.
    pub parallel: bool,
}

impl Default for PlanOptions {
    fn default() -> Self {
        PlanOptions { trajectory: TrajectoryMode::Corridor, parallel: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Shortfall {
    pub species: Species,
    pub have: usize,
    pub need: usize,
    /// Columns holding fewer atoms of the species than they have targets.
    pub deficient_columns: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Infeasibility {
    pub shortfalls: Vec<Shortfall>,
    pub note: Option<String>,
}

impl fmt::Display for Infeasibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.shortfalls.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(
                f,
                "{:?}: have {}, need {}, deficient columns {:?}",
                s.species, s.have, s.need, s.deficient_columns
            )?;
        }
        if let Some(n) = &self.note {
            if !self.shortfalls.is_empty() {
                f.write_str("; ")?;
            }
            f.write_str(n)?;
        }
        Ok(())
    }
}

struct Planner<'a> {
    g: ArrayGeometry,
    target: &'a TargetPattern,
    state: ArrayState,
    opts: PlanOptions,
    moves: Vec<Move>,
    phases: Vec<PhaseRecord>,
    next_batch: usize,
    log: Vec<String>,
}

fn dist2(g: &ArrayGeometry, a: usize, b: usize) -> usize {
    let (ra, ca) = g.row_col(a);
    let (rb, cb) = g.row_col(b);
    ra.abs_diff(rb).pow(2) + ca.abs_diff(cb).pow(2)
}

impl Planner<'_> {
    fn occ(&self, s: usize) -> Occupancy {
        self.state.occupancy[s]
    }

    fn tgt(&self, s: usize) -> SiteTarget {
        self.target.sites[s]
    }

    fn path(&self, from: Point, to: Point) -> Vec<Point> {
        match self.opts.trajectory {
            TrajectoryMode::Corridor => corridor_path(&self.g, from, to),
            TrajectoryMode::Parabolic { apex } => parabolic_path(&self.g, from, to, apex),
        }
    }

    fn transfer(&mut self, src: usize, dst: usize, phase: Phase) {
        let occ = self.occ(src);
        let cargo = match occ {
            Occupancy::Iso1 => Cargo::Iso1,
            Occupancy::Iso2 => Cargo::Iso2,
            Occupancy::Dual => Cargo::Dual,
            Occupancy::Empty => unreachable!("planner moves only occupied sites"),
        };
        debug_assert_eq!(self.occ(dst), Occupancy::Empty);
        let path = self.path(self.g.position(src), self.g.position(dst));
        self.state.occupancy[src] = Occupancy::Empty;
        self.state.occupancy[dst] = occ;
        self.moves.push(Move {
            cargo,
            src,
            dst: Destination::Site(dst),
            path,
            batch_id: 0,
            phase,
            kind: MoveKind::Transfer,
        });
    }

    fn eject(&mut self, src: usize, phase: Phase) {
        let cargo = match self.occ(src) {
            Occupancy::Iso1 => Cargo::Iso1,
            Occupancy::Iso2 => Cargo::Iso2,
            Occupancy::Dual => Cargo::Dual,
            Occupancy::Empty => unreachable!("planner ejects only occupied sites"),
        };
        let (x, y) = parking_position(&self.g, src);
        let path = self.path(self.g.position(src), (x, y));
        self.state.occupancy[src] = Occupancy::Empty;
        self.moves.push(Move {
            cargo,
            src,
            dst: Destination::Parking { x, y },
            path,
            batch_id: 0,
            phase,
            kind: MoveKind::Eject,
        });
    }

    /// Nearest empty site with designation `t` (ties: lowest index).
    fn nearest_empty(&self, from: usize, t: SiteTarget) -> Option<usize> {
        (0..self.g.n_sites())
            .filter(|&s| self.occ(s) == Occupancy::Empty && self.tgt(s) == t)
            .min_by_key(|&s| (dist2(&self.g, from, s), s))
    }

    fn column_need(&self, col: usize, k: Species) -> usize {
        self.target.count_in_column(col, k.target())
    }

    fn column_have(&self, col: usize, k: Species) -> usize {
        self.state.count_in_column(col, k.occupancy())
    }

    fn shortfall(&self, k: Species) -> Option<Shortfall> {
        let have = self.state.count(k.occupancy());
        let need = self.target.count(k.target());
        (have < need).then(|| Shortfall {
            species: k,
            have,
            need,
            deficient_columns: (0..self.g.cols).filter(|&c| self.column_have(c, k) < self.column_need(c, k)).collect(),
        })
    }

    /// Closes the current phase: assigns batch ids to its moves.
    fn finish_phase(&mut self, phase: Phase, first_move: usize, skipped: bool) {
        let batches_before = self.next_batch;
        let mut current: Vec<usize> = Vec::new();
        for i in first_move..self.moves.len() {
            if !(self.opts.parallel && !current.is_empty() && self.compatible(&current, i)) {
                if !current.is_empty() {
                    self.next_batch += 1;
                }
                current.clear();
            }
            self.moves[i].batch_id = self.next_batch;
            current.push(i);
        }
        if !current.is_empty() {
            self.next_batch += 1;
        }
        self.phases.push(PhaseRecord {
            phase,
            skipped,
            moves: self.moves.len() - first_move,
            batches: self.next_batch - batches_before,
        });
    }

    fn compatible(&self, batch: &[usize], i: usize) -> bool {
        let m = &self.moves[i];
        let Some(md) = m.dst.site() else { return false };
        let (mr, mc) = self.g.row_col(m.src);
        let (dr, dc) = self.g.row_col(md);
        let disp = (dr as i64 - mr as i64, dc as i64 - mc as i64);
        let mut same_row = true;
        let mut same_col = true;
        for &j in batch {
            let o = &self.moves[j];
            let Some(od) = o.dst.site() else { return false };
            let (or, oc) = self.g.row_col(o.src);
            let (odr, odc) = self.g.row_col(od);
            if (odr as i64 - or as i64, odc as i64 - oc as i64) != disp {
                return false;
            }
            if [o.src, od].iter().any(|&s| s == m.src || s == md) {
                return false;
            }
            same_row &= or == mr;
            same_col &= oc == mc;
        }
        same_row || same_col
    }

    fn classify1(&mut self) -> Result<(), ArrayError> {
        let start = self.moves.len();
        for s in 0..self.g.n_sites() {
            if self.occ(s) == Occupancy::Dual {
                self.eject(s, Phase::Classify1);
            }
        }
        let shortfalls: Vec<Shortfall> =
            [Species::Iso1, Species::Iso2].iter().filter_map(|&k| self.shortfall(k)).collect();
        if !shortfalls.is_empty() {
            return Err(ArrayError::Infeasible(Infeasibility { shortfalls, note: None }));
        }
        let need2 = self.target.count(SiteTarget::WantIso2);
        for s in 0..self.g.n_sites() {
            if !(self.occ(s) == Occupancy::Iso2 && self.tgt(s) == SiteTarget::WantIso1) {
                continue;
            }
            if let Some(d) = self.nearest_empty(s, SiteTarget::WantIso2) {
                self.transfer(s, d, Phase::Classify1);
                continue;
            }
            if let Some(d) = self.nearest_empty(s, SiteTarget::DontCare) {
                self.log.push(format!("Classify1: Iso2 from site {s} parked on non-target site {d}"));
                self.transfer(s, d, Phase::Classify1);
                continue;
            }
            if self.state.count(Occupancy::Iso2) > need2 {
                self.eject(s, Phase::Classify1);
                continue;
            }
            // No free Iso2 or non-target site: some Iso2 target holds an Iso1
            // atom. Move that atom onto a free Iso1 target first.
            let blocker = (0..self.g.n_sites())
                .filter(|&b| self.occ(b) == Occupancy::Iso1 && self.tgt(b) == SiteTarget::WantIso2)
                .min_by_key(|&b| (dist2(&self.g, s, b), b));
            let (Some(b), Some(free)) = (blocker, self.nearest_empty(s, SiteTarget::WantIso1)) else {
                return Err(ArrayError::Infeasible(Infeasibility {
                    shortfalls: Vec::new(),
                    note: Some(format!("no free site to clear Iso2 atom from Iso1 target {s}")),
                }));
            };
            self.transfer(b, free, Phase::Classify1);
            self.transfer(s, b, Phase::Classify1);
        }
        self.finish_phase(Phase::Classify1, start, false);
        Ok(())
    }

    fn classify2(&mut self) {
        let start = self.moves.len();
        let exact = (0..self.g.cols).all(|c| self.column_have(c, Species::Iso1) == self.column_need(c, Species::Iso1));
        if exact {
            self.finish_phase(Phase::Classify2, start, true);
            return;
        }
        for s in 0..self.g.n_sites() {
            if !(self.occ(s) == Occupancy::Iso1 && self.tgt(s) == SiteTarget::WantIso2) {
                continue;
            }
            if let Some(d) = self.nearest_empty(s, SiteTarget::DontCare) {
                self.transfer(s, d, Phase::Classify2);
            } else if let Some(d) = self.nearest_empty(s, SiteTarget::WantIso1) {
                self.transfer(s, d, Phase::Classify2);
            } else {
                self.eject(s, Phase::Classify2);
            }
        }
        self.finish_phase(Phase::Classify2, start, false);
    }

    /// Iso-k atoms in `col` not sitting on an Iso-k target.
    fn free_atoms(&self, col: usize, k: Species) -> Vec<usize> {
        (0..self.g.rows)
            .map(|r| self.g.site(r, col))
            .filter(|&s| self.occ(s) == k.occupancy() && self.tgt(s) != k.target())
            .collect()
    }

    fn presort(&mut self, k: Species, phase: Phase) -> Result<(), ArrayError> {
        let start = self.moves.len();
        if let Some(sf) = self.shortfall(k) {
            return Err(ArrayError::Infeasible(Infeasibility { shortfalls: vec![sf], note: None }));
        }
        for c in 0..self.g.cols {
            while self.column_have(c, k) < self.column_need(c, k) {
                let donor = (0..self.g.cols)
                    .filter(|&d| d != c && self.column_have(d, k) > self.column_need(d, k))
                    .min_by_key(|&d| (d.abs_diff(c), d));
                let dst = (0..self.g.rows)
                    .map(|r| self.g.site(r, c))
                    .find(|&s| self.occ(s) == Occupancy::Empty && self.tgt(s) == k.target())
                    .or_else(|| (0..self.g.rows).map(|r| self.g.site(r, c)).find(|&s| self.occ(s) == Occupancy::Empty));
                let (Some(d), Some(dst)) = (donor, dst) else {
                    return Err(ArrayError::Infeasible(Infeasibility {
                        shortfalls: self.shortfall(k).into_iter().collect(),
                        note: Some(format!("pre-sorting {k:?} cannot feed column {c}")),
                    }));
                };
                let dst_row = self.g.row_col(dst).0;
                let src = self
                    .free_atoms(d, k)
                    .into_iter()
                    .min_by_key(|&s| (self.g.row_col(s).0.abs_diff(dst_row), s))
                    .expect("surplus column has a free atom");
                self.transfer(src, dst, phase);
            }
        }
        self.finish_phase(phase, start, false);
        Ok(())
    }

    fn mainsort(&mut self, k: Species, phase: Phase) {
        let start = self.moves.len();
        for c in 0..self.g.cols {
            let targets: Vec<usize> = (0..self.g.rows)
                .map(|r| self.g.site(r, c))
                .filter(|&s| self.occ(s) == Occupancy::Empty && self.tgt(s) == k.target())
                .collect();
            for t in targets {
                let tr = self.g.row_col(t).0;
                let Some(src) =
                    self.free_atoms(c, k).into_iter().min_by_key(|&s| (self.g.row_col(s).0.abs_diff(tr), s))
                else {
                    break;
                };
                self.transfer(src, t, phase);
            }
        }
        self.finish_phase(phase, start, false);
    }
}

/// Plans the six-phase rearrangement of `state` into `target`.
pub fn plan_rearrangement(
    state: &ArrayState,
    target: &TargetPattern,
    opts: &PlanOptions,
) -> Result<MovePlan, ArrayError> {
    let g = state.geometry;
    if g.rows != target.rows || g.cols != target.cols {
        return Err(ArrayError::ShapeMismatch(g.rows, g.cols, target.rows, target.cols));
    }
    let mut p = Planner {
        g,
        target,
        state: state.clone(),
        opts: *opts,
        moves: Vec::new(),
        phases: Vec::new(),
        next_batch: 0,
        log: Vec::new(),
    };
    p.classify1()?;
    p.presort(Species::Iso1, Phase::PreSort1)?;
    p.mainsort(Species::Iso1, Phase::MainSort1);
    p.classify2();
    p.presort(Species::Iso2, Phase::PreSort2)?;
    p.mainsort(Species::Iso2, Phase::MainSort2);
    debug_assert!(p.state.satisfies(target));
    Ok(MovePlan { n_batches: p.next_batch, moves: p.moves, phases: p.phases, predicted: p.state, log: p.log })
}
