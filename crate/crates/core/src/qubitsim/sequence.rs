use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{fit_damped_sinusoid, QubitError, SequenceKind};

/// Bloch vector; `z = +1` is |0⟩.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bloch {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Bloch {
    pub const GROUND: Bloch = Bloch { x: 0.0, y: 0.0, z: 1.0 };

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    /// Population of |1⟩.
    pub fn p1(&self) -> f64 {
        0.5 * (1.0 - self.z)
    }

    /// Right-handed rotation by `angle` about the unit axis `n`.
    fn rotate(self, n: [f64; 3], angle: f64) -> Bloch {
        let (s, c) = angle.sin_cos();
        let v = [self.x, self.y, self.z];
        let dot = n[0] * v[0] + n[1] * v[1] + n[2] * v[2];
        let cross = [n[1] * v[2] - n[2] * v[1], n[2] * v[0] - n[0] * v[2], n[0] * v[1] - n[1] * v[0]];
        let r: Vec<f64> = (0..3).map(|i| v[i] * c + cross[i] * s + n[i] * dot * (1.0 - c)).collect();
        Bloch { x: r[0], y: r[1], z: r[2] }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Element {
    /// Resonant drive of area `area` (rad) about the equatorial axis at
    /// angle `phase`, with Rabi frequency `rabi_hz` (cycles per second).
    Pulse { phase: f64, area: f64, rabi_hz: f64 },
    /// Free evolution; `exposed` waits see the imaging light.
    Wait { duration: f64, exposed: bool },
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PulseSequence {
    pub elements: Vec<Element>,
}

impl PulseSequence {
    pub fn validate(&self) -> Result<(), QubitError> {
        for e in &self.elements {
            match *e {
                Element::Pulse { phase, area, rabi_hz } => {
                    if !(area > 0.0 && area.is_finite()) {
                        return Err(QubitError::InvalidParameter { name: "area", value: area });
                    }
                    if !(rabi_hz > 0.0 && rabi_hz.is_finite()) {
                        return Err(QubitError::InvalidParameter { name: "rabi_hz", value: rabi_hz });
                    }
                    if !phase.is_finite() {
                        return Err(QubitError::InvalidParameter { name: "phase", value: phase });
                    }
                }
                Element::Wait { duration, .. } => {
                    if !(duration >= 0.0 && duration.is_finite()) {
                        return Err(QubitError::InvalidParameter { name: "duration", value: duration });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn total_duration(&self) -> f64 {
        self.elements
            .iter()
            .map(|e| match *e {
                Element::Pulse { area, rabi_hz, .. } => area / (2.0 * PI * rabi_hz),
                Element::Wait { duration, .. } => duration,
            })
            .sum()
    }
}

/// π/2 – (T exposed) – (ΔT dark) – π/2.
pub fn ramsey(t: f64, dt: f64, rabi_hz: f64) -> PulseSequence {
    let half = Element::Pulse { phase: 0.0, area: PI / 2.0, rabi_hz };
    PulseSequence {
        elements: vec![
            half,
            Element::Wait { duration: t, exposed: true },
            Element::Wait { duration: dt, exposed: false },
            half,
        ],
    }
}

/// π/2 – (T/2 exposed) – π – (T/2 exposed) – (ΔT dark) – π/2.
pub fn echo(t: f64, dt: f64, rabi_hz: f64) -> PulseSequence {
    let half = Element::Pulse { phase: 0.0, area: PI / 2.0, rabi_hz };
    PulseSequence {
        elements: vec![
            half,
            Element::Wait { duration: 0.5 * t, exposed: true },
            Element::Pulse { phase: 0.0, area: PI, rabi_hz },
            Element::Wait { duration: 0.5 * t, exposed: true },
            Element::Wait { duration: dt, exposed: false },
            half,
        ],
    }
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    /// Decoherence rate (1/s) added during exposed waits.
    pub scatter_rate: f64,
    /// Always-on decoherence rate (1/s) from the trap light.
    pub trap_scatter_rate: f64,
    /// Standard deviation (Hz) of the shot-to-shot static detuning.
    pub quasistatic_sigma: f64,
    /// Qubit precession frequency (Hz) during waits.
    pub larmor: f64,
    /// Fraction of scattering events that destroy the coherence.
    #[serde(default = "one")]
    pub destructive_fraction: f64,
    /// Probability of reading the wrong state.
    #[serde(default)]
    pub readout_infidelity: f64,
}

impl Default for NoiseModel {
    fn default() -> Self {
        NoiseModel {
            scatter_rate: 0.0,
            trap_scatter_rate: 0.0,
            quasistatic_sigma: 0.0,
            larmor: 0.0,
            destructive_fraction: 1.0,
            readout_infidelity: 0.0,
        }
    }
}

impl NoiseModel {
    pub fn validate(&self) -> Result<(), QubitError> {
        let checks = [
            ("scatter_rate", self.scatter_rate),
            ("trap_scatter_rate", self.trap_scatter_rate),
            ("quasistatic_sigma", self.quasistatic_sigma),
            ("larmor", self.larmor),
        ];
        for (name, value) in checks {
            if !(value >= 0.0 && value.is_finite()) {
                return Err(QubitError::InvalidParameter { name, value });
            }
        }
        for (name, value) in
            [("destructive_fraction", self.destructive_fraction), ("readout_infidelity", self.readout_infidelity)]
        {
            if !(0.0..=1.0).contains(&value) {
                return Err(QubitError::InvalidParameter { name, value });
            }
        }
        Ok(())
    }
}

/// Applies one drive pulse with static detuning `detuning_hz`.
pub fn apply_pulse(b: Bloch, phase: f64, area: f64, rabi_hz: f64, detuning_hz: f64) -> Bloch {
    let eff = rabi_hz.hypot(detuning_hz);
    let axis = [rabi_hz * phase.cos() / eff, rabi_hz * phase.sin() / eff, detuning_hz / eff];
    let duration = area / (2.0 * PI * rabi_hz);
    b.rotate(axis, 2.0 * PI * eff * duration)
}

/// Per-trajectory random draws, reusable across a ΔT scan.
struct Draws {
    detuning: f64,
    /// Unit-rate exponential arrival time for each wait element.
    arrivals: Vec<f64>,
}

fn draw<R: Rng + ?Sized>(seq: &PulseSequence, noise: &NoiseModel, rng: &mut R) -> Draws {
    let z: f64 = rng.sample(StandardNormal);
    let unit = Exp::new(1.0).expect("rate 1");
    let arrivals =
        seq.elements.iter().filter(|e| matches!(e, Element::Wait { .. })).map(|_| unit.sample(rng)).collect();
    Draws { detuning: noise.quasistatic_sigma * z, arrivals }
}

fn evolve(seq: &PulseSequence, noise: &NoiseModel, d: &Draws) -> Bloch {
    let mut b = Bloch::GROUND;
    let mut w = 0;
    for e in &seq.elements {
        match *e {
            Element::Pulse { phase, area, rabi_hz } => b = apply_pulse(b, phase, area, rabi_hz, d.detuning),
            Element::Wait { duration, exposed } => {
                let rate = noise.destructive_fraction
                    * (noise.trap_scatter_rate + if exposed { noise.scatter_rate } else { 0.0 });
                // first destructive event before the end of the wait
                if d.arrivals[w] < rate * duration {
                    b.x = 0.0;
                    b.y = 0.0;
                } else {
                    b = b.rotate([0.0, 0.0, 1.0], 2.0 * PI * (noise.larmor + d.detuning) * duration);
                }
                w += 1;
            }
        }
    }
    b
}

fn readout(b: Bloch, noise: &NoiseModel) -> f64 {
    let e = noise.readout_infidelity;
    e + (1.0 - 2.0 * e) * b.p1()
}

/// |1⟩ population and final Bloch vector of one trajectory.
pub fn trajectory_population<R: Rng + ?Sized>(seq: &PulseSequence, noise: &NoiseModel, rng: &mut R) -> (f64, Bloch) {
    let d = draw(seq, noise, rng);
    let b = evolve(seq, noise, &d);
    (readout(b, noise), b)
}

fn traj_rng(seed: u64, i: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub p1: f64,
    pub stderr: f64,
    pub n_trajectories: usize,
}

fn mean_stderr(v: &[f64]) -> (f64, f64) {
    let (m, s) = crate::numerics::stats::mean_stderr(v);
    (m, if s.is_nan() { 0.0 } else { s })
}

/// Mean |1⟩ population over `n` trajectories.
pub fn simulate_sequence(
    seq: &PulseSequence,
    noise: &NoiseModel,
    n: usize,
    seed: u64,
) -> Result<SimResult, QubitError> {
    if n == 0 {
        return Err(QubitError::InvalidParameter { name: "n_trajectories", value: 0.0 });
    }
    seq.validate()?;
    noise.validate()?;
    let pops: Vec<f64> =
        (0..n as u64).into_par_iter().map(|i| trajectory_population(seq, noise, &mut traj_rng(seed, i)).0).collect();
    let (p1, stderr) = mean_stderr(&pops);
    Ok(SimResult { p1, stderr, n_trajectories: n })
}

/// ΔT values scanned to trace one fringe.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DtScan {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl DtScan {
    /// Two fringe periods at the Larmor frequency, 12 points per period.
    pub fn for_larmor(larmor: f64) -> Self {
        DtScan { start: 0.0, stop: 2.0 / larmor, points: 24 }
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.points).map(|i| self.start + (self.stop - self.start) * i as f64 / self.points as f64).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContrastPoint {
    #[serde(rename = "T_s")]
    pub t: f64,
    pub contrast: Option<f64>,
    pub stderr: Option<f64>,
    /// The fringe fit failed at this T.
    pub flagged: bool,
}

const GROUPS: usize = 10;

fn fringe_contrast(dts: &[f64], pops: &[f64]) -> Option<f64> {
    let f = fit_damped_sinusoid(dts, pops).ok()?;
    (f.offset > 0.0).then(|| f.amplitude / f.offset)
}

/// Contrast versus hold time: for each T a ΔT fringe is simulated (the same
/// random draws are reused along the fringe), fitted with a damped sinusoid,
/// and its amplitude divided by its offset. The standard error comes from
/// refitting ten disjoint trajectory groups.
pub fn contrast_curve(
    kind: SequenceKind,
    rabi_hz: f64,
    noise: &NoiseModel,
    t_values: &[f64],
    scan: &DtScan,
    n: usize,
    seed: u64,
) -> Result<Vec<ContrastPoint>, QubitError> {
    noise.validate()?;
    if n < GROUPS {
        return Err(QubitError::InvalidParameter { name: "n_trajectories", value: n as f64 });
    }
    if scan.points < 6 || !(scan.stop > scan.start) {
        return Err(QubitError::BadInput("ΔT scan needs at least 6 points over a positive span".into()));
    }
    if noise.larmor * (scan.stop - scan.start) < 1.0 {
        return Err(QubitError::BadInput("ΔT scan must cover at least one fringe period".into()));
    }
    let dts = scan.values();
    let build = |t: f64, dt: f64| match kind {
        SequenceKind::Ramsey => ramsey(t, dt, rabi_hz),
        SequenceKind::Echo => echo(t, dt, rabi_hz),
    };
    let mut out = Vec::with_capacity(t_values.len());
    for (ti, &t) in t_values.iter().enumerate() {
        let seqs: Vec<PulseSequence> = dts.iter().map(|&dt| build(t, dt)).collect();
        for s in &seqs {
            s.validate()?;
        }
        let run_seed = seed.wrapping_add((ti as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let rows: Vec<Vec<f64>> = (0..n as u64)
            .into_par_iter()
            .map(|i| {
                let d = draw(&seqs[0], noise, &mut traj_rng(run_seed, i));
                seqs.iter().map(|s| readout(evolve(s, noise, &d), noise)).collect()
            })
            .collect();
        let mean_over = |range: std::ops::Range<usize>| -> Vec<f64> {
            let m = range.len() as f64;
            (0..dts.len()).map(|k| rows[range.clone()].iter().map(|r| r[k]).sum::<f64>() / m).collect()
        };
        let contrast = fringe_contrast(&dts, &mean_over(0..n));
        let per = n / GROUPS;
        let groups: Option<Vec<f64>> =
            (0..GROUPS).map(|g| fringe_contrast(&dts, &mean_over(g * per..(g + 1) * per))).collect();
        let stderr = groups.map(|c| mean_stderr(&c).1);
        out.push(ContrastPoint { t, contrast, stderr, flagged: contrast.is_none() || stderr.is_none() });
    }
    Ok(out)
}

/// Transfer probability of a nominal π pulse with a detuning error and a
/// fractional duration error (generalized Rabi formula).
pub fn pi_pulse_fidelity(rabi_hz: f64, detuning_hz: f64, duration_error: f64) -> Result<f64, QubitError> {
    if !(rabi_hz > 0.0) {
        return Err(QubitError::InvalidParameter { name: "rabi", value: rabi_hz });
    }
    let eff = rabi_hz.hypot(detuning_hz);
    let t = (1.0 + duration_error) / (2.0 * rabi_hz);
    Ok((rabi_hz / eff).powi(2) * (PI * eff * t).sin().powi(2))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_quarter_turns_make_a_flip() {
        let r = simulate_sequence(&ramsey(0.0, 0.0, 2.0e5), &NoiseModel::default(), 10, 1).unwrap();
        assert!((r.p1 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn norm_is_preserved_without_scattering() {
        let noise = NoiseModel { quasistatic_sigma: 30.0, larmor: 1875.0, ..Default::default() };
        let seq = echo(0.05, 1e-4, 2.0e5);
        let mut rng = traj_rng(5, 0);
        for _ in 0..100 {
            let (_, b) = trajectory_population(&seq, &noise, &mut rng);
            assert!((b.norm() - 1.0).abs() < 1e-12);
        }
        let lossy = NoiseModel { trap_scatter_rate: 50.0, ..noise };
        for _ in 0..100 {
            let (_, b) = trajectory_population(&seq, &lossy, &mut rng);
            assert!(b.norm() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn pulse_matches_generalized_rabi_formula() {
        for (det, err) in [(0.0, 0.0), (1.0e5, 0.0), (3.0e4, 0.05), (-2.0e5, -0.1)] {
            let rabi = 1.0e5;
            let b = apply_pulse(Bloch::GROUND, 0.7, PI * (1.0 + err), rabi, det);
            let f = pi_pulse_fidelity(rabi, det, err).unwrap();
            assert!((b.p1() - f).abs() < 1e-12, "{det} {err}");
        }
        let f = pi_pulse_fidelity(1.0, 1.0, 0.0).unwrap();
        let oracle = 0.5 * 0.5 * (1.0 - (PI * 2f64.sqrt()).cos());
        assert!((f - oracle).abs() < 1e-12);
    }

    #[test]
    fn ideal_fringe_has_unit_contrast() {
        let noise = NoiseModel { larmor: 1875.0, ..Default::default() };
        let pts = contrast_curve(
            SequenceKind::Ramsey,
            2.08e5,
            &noise,
            &[0.0, 0.01, 0.1],
            &DtScan::for_larmor(1875.0),
            100,
            1,
        )
        .unwrap();
        for p in pts {
            assert!((p.contrast.unwrap() - 1.0).abs() < 1e-6, "{p:?}");
        }
    }

    #[test]
    fn reproducible() {
        let noise = NoiseModel { quasistatic_sigma: 5.0, trap_scatter_rate: 3.0, larmor: 1875.0, ..Default::default() };
        let a = simulate_sequence(&ramsey(0.05, 1e-4, 2e5), &noise, 500, 9).unwrap();
        let b = simulate_sequence(&ramsey(0.05, 1e-4, 2e5), &noise, 500, 9).unwrap();
        assert_eq!(a, b);
    }
}
