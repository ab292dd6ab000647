//! Bound states of a one-dimensional radial potential by Numerov shooting.
//!
//! Units: R in a0, energies in MHz, kinetic coefficient ħ²/(2μ) in MHz·a0².
//!
//! The grid is piecewise uniform. It starts with a fine step at the inner
//! wall and doubles the step outward wherever the local wavenumber allows,
//! so that a deep short-range well and a tail reaching 10⁴ a0 fit in one
//! integration. Levels are bracketed by node counting (Sturm oscillation
//! count of the outward solution) and then refined with Brent's method on
//! the phase of the outward solution at the outer edge, where the boundary
//! condition ψ(R_max) = 0 is imposed.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::PaError;
use crate::numerics::brent_root;
use crate::units::CODATA2018;

pub trait RadialPotential: Sync {
    /// Potential energy in MHz at distance `r` (a0).
    fn value(&self, r: f64) -> f64;

    /// Range of `r` on which `value` may be called.
    fn domain(&self) -> (f64, f64) {
        (0.0, f64::INFINITY)
    }
}

impl<F: Fn(f64) -> f64 + Sync> RadialPotential for F {
    fn value(&self, r: f64) -> f64 {
        self(r)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Inner edge; `None` places it inside the repulsive wall where the
    /// highest window energy is suppressed by e^-35.
    pub r_min: Option<f64>,
    /// Initial outer edge, extended as needed.
    pub r_max: f64,
    /// Largest outer edge the extension may reach.
    pub r_max_cap: f64,
    /// Smallest step; all steps are power-of-two multiples of it.
    pub step: f64,
    pub max_step: f64,
    /// Target local phase advance k·h per step in allowed regions.
    pub phase_per_step: f64,
    /// Required decay of the wavefunction tail between the outer turning
    /// point and the outer edge.
    pub tail_decay: f64,
    /// Absolute energy tolerance in MHz.
    pub energy_tol: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            r_min: None,
            r_max: 4000.0,
            r_max_cap: 2.0e5,
            step: 1.0e-4,
            max_step: 4.0,
            phase_per_step: 0.01,
            tail_decay: 1e6,
            energy_tol: 1e-9,
        }
    }
}

impl GridSpec {
    /// Same grid with every step halved.
    pub fn refined(&self) -> Self {
        GridSpec { step: self.step / 2.0, phase_per_step: self.phase_per_step / 2.0, ..self.clone() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundState {
    /// Energy in MHz relative to the potential's zero (the dissociation
    /// limit for model potentials).
    pub binding_energy: f64,
    /// Counted down from threshold: 0 is the least-bound level. `None` when
    /// the potential has no threshold at zero above this level.
    pub v_index: Option<u32>,
    /// Interior nodes of the eigenfunction.
    pub nodes: u32,
    /// Position in the spectrum counted from the bottom of the well.
    pub level: u32,
    pub te: Option<f64>,
}

struct Grid {
    r: Vec<f64>,
    v: Vec<f64>,
    h: Vec<f64>,
    back: Vec<usize>,
    kin: f64,
}

struct Shot {
    nodes: u32,
    /// ψ at the last point, scaled so that (last, prev) is a unit vector.
    last: f64,
}

impl Grid {
    fn shoot(&self, e: f64) -> Shot {
        let n = self.r.len();
        let inv = 1.0 / self.kin;
        let g = |i: usize| (self.v[i] - e) * inv;
        // ring buffer: values at n-2, n-1, n
        let (mut p2, mut p1, mut p0) = (0.0f64, 0.0f64, 1e-30f64);
        let mut nodes = 0u32;
        let mut sign = 0i8;
        for i in 1..n - 1 {
            let h2 = self.h[i] * self.h[i] / 12.0;
            let pb = if self.back[i] == i - 1 { p1 } else { p2 };
            let next = (2.0 * (1.0 + 5.0 * h2 * g(i)) * p0 - (1.0 - h2 * g(self.back[i])) * pb) / (1.0 - h2 * g(i + 1));
            p2 = p1;
            p1 = p0;
            p0 = next;
            if p0 != 0.0 {
                let s = if p0 > 0.0 { 1 } else { -1 };
                if sign != 0 && s != sign {
                    nodes += 1;
                }
                sign = s;
            }
            let a = p0.abs();
            if a > 1e150 {
                p0 *= 1e-150;
                p1 *= 1e-150;
                p2 *= 1e-150;
            } else if a < 1e-150 && p1.abs() < 1e-150 {
                p0 *= 1e150;
                p1 *= 1e150;
                p2 *= 1e150;
            }
        }
        let norm = (p0 * p0 + p1 * p1).sqrt();
        Shot { nodes, last: if norm > 0.0 { p0 / norm } else { 0.0 } }
    }

    /// Outward solution at energy `e`, unnormalized. On overflow only the
    /// points the recurrence still reads are rescaled, so earlier values keep
    /// their signs instead of underflowing to zero; only signs are
    /// meaningful across a rescaling.
    fn wavefunction(&self, e: f64) -> Vec<f64> {
        let n = self.r.len();
        let inv = 1.0 / self.kin;
        let g = |i: usize| (self.v[i] - e) * inv;
        let mut psi = vec![0.0; n];
        psi[1] = 1e-30;
        for i in 1..n - 1 {
            let h2 = self.h[i] * self.h[i] / 12.0;
            let b = self.back[i];
            psi[i + 1] = (2.0 * (1.0 + 5.0 * h2 * g(i)) * psi[i] - (1.0 - h2 * g(b)) * psi[b]) / (1.0 - h2 * g(i + 1));
            if psi[i + 1].abs() > 1e150 {
                for p in &mut psi[i - 1..i + 2] {
                    *p *= 1e-150;
                }
            }
        }
        psi
    }

    fn count(&self, e: f64) -> u32 {
        self.shoot(e).nodes
    }

    /// Nodes of the eigenfunction at `e`, ignoring the far tail where the
    /// residual growing solution takes over.
    fn interior_nodes(&self, e: f64) -> u32 {
        let psi = self.wavefunction(e);
        let inv = 1.0 / self.kin;
        // last classically allowed point
        let Some(t) = (0..self.r.len()).rev().find(|&i| self.v[i] < e) else {
            return 0;
        };
        let mut decay = 0.0;
        let mut cut = self.r.len() - 1;
        for i in t..self.r.len() - 1 {
            decay += ((self.v[i] - e).max(0.0) * inv).sqrt() * self.h[i];
            if decay > 4.0 {
                cut = i;
                break;
            }
        }
        let mut nodes = 0;
        let mut sign = 0.0f64;
        for &p in &psi[1..=cut] {
            if p != 0.0 {
                if sign != 0.0 && p.signum() != sign {
                    nodes += 1;
                }
                sign = p.signum();
            }
        }
        nodes
    }
}

struct Setup<'a, P: RadialPotential + ?Sized> {
    pot: &'a P,
    kin: f64,
    e_lo: f64,
    e_hi: f64,
    spec: &'a GridSpec,
}

impl<P: RadialPotential + ?Sized> Setup<'_, P> {
    fn tail_target(&self) -> f64 {
        self.spec.tail_decay.ln()
    }

    /// Sample points spanning [lo, hi], log-spaced.
    fn samples(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64)).collect()
    }

    fn inner_edge(&self, lo: f64, probe_hi: f64) -> Result<f64, PaError> {
        if let Some(r) = self.spec.r_min {
            return Ok(r.max(lo));
        }
        let lo_probe = if lo > 0.0 { lo } else { 1e-3 * probe_hi };
        let rs = Self::samples(lo_probe, probe_hi, 20_000);
        let Some(first) = rs.iter().position(|&r| self.pot.value(r) < self.e_hi) else {
            return Err(PaError::NoWell);
        };
        // integrate the decay constant inward from the inner turning point
        let mut r = rs[first];
        let mut decay = 0.0;
        let dr = (rs[first] * 1e-4).max(1e-6);
        while decay < 35.0 && r - dr > lo_probe {
            r -= dr;
            decay += ((self.pot.value(r) - self.e_hi).max(0.0) / self.kin).sqrt() * dr;
        }
        Ok(r)
    }

    /// Smallest outer edge at which the tail at energy `e` has decayed.
    fn needed_outer_edge(&self, e: f64, from: f64, cap: f64) -> Option<f64> {
        let target = self.tail_target();
        let mut r = from;
        let mut decay = 0.0;
        while r < cap {
            let dr = (0.002 * r).max(0.01);
            let v = self.pot.value(r);
            if v < e {
                decay = 0.0;
            } else {
                decay += ((v - e) / self.kin).sqrt() * dr;
                if decay >= target {
                    return Some(r);
                }
            }
            r += dr;
        }
        None
    }

    fn build(&self, r_min: f64, r_max: f64) -> Grid {
        let s = self.spec;
        let ns = 8000;
        let rs = Self::samples(r_min, r_max, ns);
        let vs: Vec<f64> = rs.par_iter().map(|&r| self.pot.value(r)).collect();
        let vmin = vs.iter().copied().fold(f64::INFINITY, f64::min);
        let well = (self.e_hi - vmin).max(1e-12);
        let local_k = |v: f64| {
            let mut k: f64 = 0.0;
            for e in [self.e_lo, self.e_hi] {
                let d = e - v;
                let kk = if d > 0.0 {
                    (d / self.kin).sqrt()
                } else {
                    // forbidden: coarser resolution is enough, and inside the
                    // wall the decay rate is capped at the well scale
                    0.25 * ((-d).min(4.0 * well) / self.kin).sqrt()
                };
                k = k.max(kk);
            }
            k
        };
        let mut ksup: Vec<f64> = vs.iter().map(|&v| local_k(v)).collect();
        for i in (0..ns - 1).rev() {
            ksup[i] = ksup[i].max(ksup[i + 1]);
        }
        let allowed = |r: f64| -> f64 {
            let j = match rs.binary_search_by(|x| x.total_cmp(&r)) {
                Ok(j) => j,
                Err(j) => j.saturating_sub(1),
            };
            let k = ksup[j.min(ns - 1)];
            if k > 0.0 {
                (s.phase_per_step / k).min(s.max_step)
            } else {
                s.max_step
            }
        };
        let mut h = s.step;
        while 2.0 * h <= allowed(r_min) {
            h *= 2.0;
        }
        let mut r = vec![r_min];
        let mut steps = Vec::new();
        let mut back = vec![0usize];
        let mut at_h = 0usize;
        let mut x = r_min;
        while x < r_max {
            let n = r.len() - 1;
            let mut this_h = h;
            if at_h >= 2 && 2.0 * h <= allowed(x) {
                this_h = 2.0 * h;
                h = this_h;
                at_h = 0;
            }
            if n >= 1 {
                back.push(if steps[n - 1] == this_h { n - 1 } else { n - 2 });
            }
            steps.push(this_h);
            x = r[n] + this_h;
            r.push(x);
            at_h += 1;
        }
        steps.push(h);
        back.push(r.len() - 2);
        let v: Vec<f64> = r.par_iter().map(|&x| self.pot.value(x)).collect();
        Grid { r, v, h: steps, back, kin: self.kin }
    }
}

fn find_levels(grid: &Grid, e_lo: f64, e_hi: f64, tol: f64) -> Result<Vec<(u32, f64)>, PaError> {
    let n_lo = grid.count(e_lo);
    let n_hi = grid.count(e_hi);
    let mut brackets = Vec::new();
    let mut stack = vec![(e_lo, n_lo, e_hi, n_hi)];
    while let Some((a, na, b, nb)) = stack.pop() {
        if nb <= na {
            continue;
        }
        if nb == na + 1 {
            brackets.push((a, b, na));
            continue;
        }
        if b - a < tol {
            return Err(PaError::NotConverged { level: na as usize, lo: a, hi: b });
        }
        let m = 0.5 * (a + b);
        let nm = grid.count(m);
        stack.push((a, na, m, nm));
        stack.push((m, nm, b, nb));
    }
    brackets.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut out = Vec::with_capacity(brackets.len());
    for (a, b, k) in brackets {
        let f = |e: f64| grid.shoot(e).last;
        let e = match brent_root(f, a, b, tol, 300) {
            Some(e) => e,
            None => {
                // boundary value does not change sign: fall back to bisection on the count
                let (mut lo, mut hi) = (a, b);
                let mut iter = 0;
                while hi - lo > tol {
                    let m = 0.5 * (lo + hi);
                    if grid.count(m) > k {
                        hi = m;
                    } else {
                        lo = m;
                    }
                    iter += 1;
                    if iter > 200 {
                        return Err(PaError::NotConverged { level: k as usize, lo, hi });
                    }
                }
                0.5 * (lo + hi)
            }
        };
        out.push((k, e));
    }
    Ok(out)
}

/// Bound states of `pot` with energies in `window` for a reduced mass in u.
pub fn solve_bound_states<P: RadialPotential + ?Sized>(
    pot: &P,
    mu_amu: f64,
    window: (f64, f64),
    spec: &GridSpec,
) -> Result<Vec<BoundState>, PaError> {
    if !(mu_amu > 0.0 && mu_amu.is_finite()) {
        return Err(PaError::InvalidParameter { name: "mu", value: mu_amu });
    }
    solve_bound_states_with_kinetic(pot, CODATA2018.kinetic_mhz_a0sq(mu_amu), window, spec)
}

/// As [`solve_bound_states`] with the kinetic coefficient ħ²/(2μ) given
/// directly in MHz·a0².
pub fn solve_bound_states_with_kinetic<P: RadialPotential + ?Sized>(
    pot: &P,
    kinetic: f64,
    window: (f64, f64),
    spec: &GridSpec,
) -> Result<Vec<BoundState>, PaError> {
    let (e_lo, e_hi) = window;
    if !(e_lo < e_hi) || !e_lo.is_finite() || !e_hi.is_finite() {
        return Err(PaError::BadWindow(e_lo, e_hi));
    }
    if !(kinetic > 0.0 && kinetic.is_finite()) {
        return Err(PaError::InvalidParameter { name: "kinetic", value: kinetic });
    }
    let (dlo, dhi) = pot.domain();
    let cap = spec.r_max_cap.min(dhi);
    let setup = Setup { pot, kin: kinetic, e_lo, e_hi, spec };
    let mut r_max = spec.r_max.min(cap);
    let r_min = match setup.inner_edge(dlo, r_max) {
        Ok(r) => r,
        Err(PaError::NoWell) => return Ok(Vec::new()),
        Err(e) => return Err(e),
    };
    if r_min >= r_max {
        return Err(PaError::BadGrid);
    }
    let tol = spec.energy_tol;
    let mut attempts = 0;
    let (grid, levels) = loop {
        attempts += 1;
        let grid = setup.build(r_min, r_max);
        let levels = find_levels(&grid, e_lo, e_hi, tol)?;
        let Some(&(_, top)) = levels.last() else {
            break (grid, levels);
        };
        // outermost turning point search starts at the well bottom
        let i_min = (0..grid.v.len()).min_by(|&a, &b| grid.v[a].total_cmp(&grid.v[b])).unwrap_or(0);
        match setup.needed_outer_edge(top, grid.r[i_min], cap) {
            Some(need) if need <= r_max => break (grid, levels),
            Some(need) if attempts < 8 => r_max = (need * 1.05).min(cap),
            _ => return Err(PaError::TailNotContained { energy: top, cap }),
        }
    };
    let threshold_count = if e_hi <= 0.0 { Some(grid.count(0.0)) } else { None };
    Ok(levels
        .into_iter()
        .map(|(k, e)| BoundState {
            binding_energy: e,
            v_index: threshold_count.and_then(|n0| n0.checked_sub(k + 1)),
            nodes: grid.interior_nodes(e),
            level: k,
            te: None,
        })
        .collect())
}
