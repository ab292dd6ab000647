use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tweezerforge::pamol::{
    adiabatic_potentials, build_hamiltonian, default_curve_grid, pa_spectrum, solve_bound_states,
    solve_bound_states_with_kinetic, ChannelBasis, GridSpec, ModelPotential, PaParameters, Sector, SpectrumOptions,
};
use tweezerforge::units::CODATA2018;

fn curve2_levels(p: &PaParameters, te: f64, spec: &GridSpec) -> Vec<tweezerforge::pamol::BoundState> {
    let curves = adiabatic_potentials(p, &default_curve_grid()).unwrap();
    let pot = ModelPotential::new(&curves[1], te, p).unwrap();
    solve_bound_states(&pot, p.mu, (-1000.0, 0.0), spec).unwrap()
}

#[test]
fn hamiltonian_is_symmetric_at_random_distances() {
    let p = PaParameters::calibrated();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let r = 10f64.powf(rng.random_range(0.7..4.0));
        let h = build_hamiltonian(r, &p).unwrap();
        let scale = h.abs().max();
        assert!((h - h.transpose()).abs().max() <= 1e-14 * scale, "R = {r}");
    }
}

#[test]
fn zero_hyperfine_spectrum_is_pure_dipole_exchange() {
    // With A = 0 each 174-excited state couples to exactly one 171-excited
    // state, so the spectrum is ±2·fΣ·d²/R³ (twice) and ±fΠ·d²/R³ (four times).
    let p = PaParameters { a_hfs: 0.0, ..PaParameters::calibrated() };
    p.validate().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..20 {
        let r = 10f64.powf(rng.random_range(0.7..4.0));
        let mut got: Vec<f64> = build_hamiltonian(r, &p).unwrap().symmetric_eigenvalues().iter().copied().collect();
        got.sort_by(f64::total_cmp);
        let x = p.k_photon * r;
        let fs = x.cos() + x * x.sin();
        let fp = fs - x * x * x.cos();
        let d = p.dipole_scale * p.d2_mhz() / r.powi(3);
        let mut want = Vec::new();
        for s in [-1.0, 1.0] {
            want.extend([s * 2.0 * fs * d; 2]);
            want.extend([s * fp * d; 4]);
        }
        want.sort_by(f64::total_cmp);
        let scale = want.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() <= 1e-12 * scale, "R = {r}: {g} vs {w}");
        }
    }
}

#[test]
fn basis_sectors_are_balanced() {
    let b = ChannelBasis::new();
    assert_eq!(b.len(), 12);
    assert_eq!(b.states.iter().filter(|s| s.sector == Sector::Ground171Excited174).count(), 6);
}

#[test]
fn curve_structure() {
    let p = PaParameters::calibrated();
    let curves = adiabatic_potentials(&p, &default_curve_grid()).unwrap();
    assert_eq!(curves.len(), 6);
    assert_eq!(curves.iter().filter(|c| c.attractive).count(), 3);
    let mut limits: Vec<f64> = curves.iter().map(|c| c.asymptote).collect();
    limits.sort_by(f64::total_cmp);
    limits.dedup_by(|a, b| (*a - *b).abs() < 0.1);
    let want = [-p.a_hfs, 0.0, p.a_hfs / 2.0];
    assert_eq!(limits.len(), 3);
    for (l, w) in limits.iter().zip(want) {
        assert!((l - w).abs() < 0.1, "{l} vs {w}");
    }
}

#[test]
fn morse_levels_match_closed_form() {
    // V = D(1 − e^{−a(r−re)})² − D has E_n = −kin·a²·(λ − n − ½)², λ = √(D/kin)/a.
    let kin = CODATA2018.kinetic_mhz_a0sq(86.2);
    let (d, a, re) = (1.0e7, 0.3, 50.0);
    let morse = move |r: f64| d * (1.0 - (-a * (r - re)).exp()).powi(2) - d;
    let lambda = (d / kin).sqrt() / a;
    let spec = GridSpec { r_max: 120.0, ..GridSpec::default() };
    let states = solve_bound_states_with_kinetic(&morse, kin, (-d, -0.5 * d), &spec).unwrap();
    assert!(states.len() >= 10);
    for s in &states {
        let n = f64::from(s.level);
        let exact = -kin * a * a * (lambda - n - 0.5).powi(2);
        assert!(((s.binding_energy - exact) / exact).abs() < 1e-6, "n = {n}: {} vs {exact}", s.binding_energy);
        assert_eq!(s.nodes, s.level);
    }
}

#[test]
fn node_theorem_survives_step_halving() {
    let p = PaParameters::calibrated();
    let spec = GridSpec::default();
    let coarse = curve2_levels(&p, 0.5, &spec);
    let fine = curve2_levels(&p, 0.5, &spec.refined());
    assert_eq!(coarse.len(), fine.len());
    for (c, f) in coarse.iter().zip(&fine) {
        assert_eq!(c.nodes, f.nodes);
        assert!((c.binding_energy - f.binding_energy).abs() < 0.01, "{} vs {}", c.binding_energy, f.binding_energy);
    }
    for w in coarse.windows(2) {
        assert_eq!(w[1].nodes, w[0].nodes + 1);
    }
}

#[test]
fn levels_rise_with_c12() {
    // A harder inner wall squeezes the well, so a level with a fixed node
    // count moves up.
    let base = PaParameters::calibrated();
    let spec = GridSpec::default();
    let energies: Vec<Vec<(u32, f64)>> = [0.999, 1.0, 1.001]
        .iter()
        .map(|f| {
            let p = PaParameters { c12: base.c12 * f, ..base.clone() };
            curve2_levels(&p, 0.5, &spec).iter().map(|s| (s.nodes, s.binding_energy)).collect()
        })
        .collect();
    for &(nodes, e_mid) in &energies[1] {
        let find = |k: usize| energies[k].iter().find(|l| l.0 == nodes).map(|l| l.1);
        if let (Some(lo), Some(hi)) = (find(0), find(2)) {
            assert!(lo < e_mid && e_mid < hi, "nodes {nodes}: {lo} {e_mid} {hi}");
        }
    }
}

#[test]
fn spectrum_is_sorted_and_inside_window() {
    let lines =
        pa_spectrum(&PaParameters::calibrated(), &[0.5, 1.5], (-1000.0, 0.0), &SpectrumOptions::default()).unwrap();
    assert!(lines.windows(2).all(|w| w[0].energy <= w[1].energy));
    assert!(lines.iter().all(|l| (-1000.0..0.0).contains(&l.energy)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hamiltonian_conserves_omega(r in 5.0f64..5000.0) {
        let p = PaParameters::calibrated();
        let h = build_hamiltonian(r, &p).unwrap();
        let b = ChannelBasis::new();
        for i in 0..12 {
            for j in 0..12 {
                if b.states[i].two_omega() != b.states[j].two_omega() {
                    prop_assert_eq!(h[(i, j)], 0.0);
                }
            }
        }
    }

    #[test]
    fn trace_is_distance_independent(r in 5.0f64..5000.0) {
        // Dipole exchange is purely off-diagonal, so the trace is the
        // hyperfine trace, which vanishes for I·J.
        let h = build_hamiltonian(r, &PaParameters::calibrated()).unwrap();
        prop_assert!(h.trace().abs() < 1e-9);
    }
}
