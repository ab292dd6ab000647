use proptest::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};
use tweezerforge::imaging::{
    double_lorentzian, fit_double_lorentzian, fit_histogram, generate_triples, infidelity_curve, model_free_fidelity,
    optimize_threshold, sample_histogram, FitOptions, HistogramModel, ImagingError, TripleGenerator, TripleImageRecord,
};

fn gaussian_pair(f: f64) -> HistogramModel {
    HistogramModel {
        f,
        sigma_d: 8.0,
        mu_d: 40.0,
        a: 0.0,
        b: 1.0,
        sigma_b: 8.0,
        mu_b: 100.0,
        c: 0.0,
        x_max: 400.0,
        ..HistogramModel::typical_399()
    }
}

#[test]
fn samples_follow_the_mixture_density() {
    let m = HistogramModel::typical_399();
    let pm = m.prepare().unwrap();
    let xs = sample_histogram(&m, 100_000, 3).unwrap();
    // bins with at least ~20 expected counts
    let edges: Vec<f64> = (0..=100).map(|i| m.x_max * f64::from(i) / 100.0).collect();
    let mut observed = vec![0.0; 100];
    for x in &xs {
        observed[((x / m.x_max * 100.0) as usize).min(99)] += 1.0;
    }
    let (mut chi2, mut dof) = (0.0, 0usize);
    let (mut o_acc, mut e_acc) = (0.0, 0.0);
    for i in 0..100 {
        let n = 16;
        let h = (edges[i + 1] - edges[i]) / n as f64;
        let mass: f64 = (0..n).map(|k| pm.pdf(edges[i] + (k as f64 + 0.5) * h) * h).sum();
        o_acc += observed[i];
        e_acc += mass * xs.len() as f64;
        if e_acc >= 20.0 {
            chi2 += (o_acc - e_acc).powi(2) / e_acc;
            dof += 1;
            o_acc = 0.0;
            e_acc = 0.0;
        }
    }
    let p = 1.0 - ChiSquared::new((dof - 1) as f64).unwrap().cdf(chi2);
    assert!(p > 0.01, "chi2 = {chi2}, dof = {dof}, p = {p}");
}

#[test]
fn single_component_limits() {
    // F = 0 draws only dark counts and F = 1 only bright ones; compare the
    // sample mean with the component mean by midpoint quadrature
    for (f, dark) in [(0.0, true), (1.0, false)] {
        let m = HistogramModel { f, ..HistogramModel::typical_399() };
        let pm = m.prepare().unwrap();
        let n = 30_000;
        let h = m.x_max / 30_000.0;
        let pdf = |x: f64| if dark { pm.dark_pdf(x) } else { pm.bright_pdf(x) };
        let moment = |k: i32| (0..n).map(|i| (i as f64 + 0.5) * h).map(|x| x.powi(k) * pdf(x) * h).sum::<f64>();
        let (mean, var) = (moment(1), moment(2) - moment(1).powi(2));
        let xs = sample_histogram(&m, 20_000, 1).unwrap();
        let got = xs.iter().sum::<f64>() / xs.len() as f64;
        assert!((got - mean).abs() < 3.0 * (var / xs.len() as f64).sqrt(), "F = {f}: {got} vs {mean}");
    }
}

#[test]
fn symmetric_gaussians_put_the_threshold_at_the_midpoint() {
    let r = optimize_threshold(&gaussian_pair(0.5)).unwrap();
    assert!((r.threshold - 70.0).abs() < 1e-4, "{}", r.threshold);
    assert!((r.e0 - r.e1).abs() < 1e-9);
}

#[test]
fn disjoint_peaks_give_unit_fidelity() {
    let m = HistogramModel { sigma_d: 1.0, sigma_b: 1.0, ..gaussian_pair(0.5) };
    let r = optimize_threshold(&m).unwrap();
    assert!(r.fidelity > 1.0 - 1e-15, "{}", r.fidelity);
}

#[test]
fn overlapping_peaks_are_flagged() {
    let m = HistogramModel { mu_b: 40.0, ..gaussian_pair(0.5) };
    assert!(optimize_threshold(&m).unwrap().unreliable);
}

#[test]
fn curve_has_its_minimum_at_the_optimum() {
    let m = HistogramModel::typical_399();
    let best = optimize_threshold(&m).unwrap();
    let xs: Vec<f64> = (0..=300).map(f64::from).collect();
    let curve = infidelity_curve(&m, &xs).unwrap();
    assert!(curve.iter().all(|r| r.error >= best.error - 1e-12));
    assert!((best.error - 1.5e-3).abs() < 1e-4, "{}", best.error);
}

#[test]
fn fit_recovers_generation_parameters() {
    let truth = HistogramModel::typical_399();
    let counts = sample_histogram(&truth, 200_000, 17).unwrap();
    let fit = fit_histogram(&counts, &FitOptions { x_max: Some(truth.x_max), ..Default::default() }).unwrap();
    for (k, (got, want)) in fit.model.params().iter().zip(truth.params()).enumerate() {
        let z = (got - want).abs() / fit.stderr[k];
        assert!(z < 4.0, "{}: {got} vs {want} ({z:.1}σ)", HistogramModel::PARAM_NAMES[k]);
    }
}

#[test]
fn identical_counts_are_degenerate() {
    assert!(fit_histogram(&vec![50.0; 5000], &FitOptions::default()).is_err());
}

#[test]
fn too_few_counts_are_rejected() {
    let err = fit_histogram(&[1.0, 2.0, 3.0], &FitOptions::default()).unwrap_err();
    assert!(matches!(err, ImagingError::TooFewSamples { .. }), "{err}");
}

#[test]
fn lorentzian_recovers_dip_centres() {
    let truth = [0.9, 0.5, -716.4, 2.0, 0.6, -698.8, 2.5];
    let x: Vec<f64> = (0..81).map(|i| -730.0 + 0.5 * f64::from(i)).collect();
    let y: Vec<f64> = x.iter().map(|&v| double_lorentzian(v, &truth)).collect();
    let f = fit_double_lorentzian(&x, &y).unwrap();
    let mut c = f.centers;
    c.sort_by(f64::total_cmp);
    assert!((c[0] + 716.4).abs() < 1e-9 && (c[1] + 698.8).abs() < 1e-9, "{c:?}");
    assert!(!f.single_dip);
}

#[test]
fn model_free_on_generated_triples() {
    let g = TripleGenerator {
        n_sites: 100,
        n_shots: 1000,
        load: 0.5,
        miss: 8e-4,
        false_positive: 8e-4,
        loss: 1.2e-2,
        seed: 4,
    };
    let r = model_free_fidelity(&generate_triples(&g).unwrap()).unwrap();
    assert!(r.fidelity_ci.lo <= g.fidelity(r.bright_fraction) && g.fidelity(r.bright_fraction) <= r.fidelity_ci.hi);
    assert!(r.survival_corrected_ci.lo <= g.survival() && g.survival() <= r.survival_corrected_ci.hi);
    // the raw conditional is pulled below the true survival by misses
    assert!(r.survival.unwrap() < r.survival_corrected.unwrap());
}

fn rec(b: [bool; 3]) -> TripleImageRecord {
    TripleImageRecord { site: 0, shot: 0, b1: b[0], b2: b[1], b3: b[2] }
}

proptest! {
    #[test]
    fn threshold_errors_are_consistent(f in 0.05f64..0.95, shift in 30.0f64..120.0) {
        let m = HistogramModel { f, mu_b: 20.0 + shift, ..HistogramModel::typical_399() };
        let r = optimize_threshold(&m).unwrap();
        prop_assert!((r.error - ((1.0 - f) * r.e0 + f * r.e1)).abs() < 1e-12);
        for v in [r.e0, r.e1, r.error, r.fidelity] {
            prop_assert!((0.0..=1.0).contains(&v));
        }
    }

    #[test]
    fn model_free_rates_are_probabilities(patterns in prop::collection::vec(0u8..8, 1..400)) {
        let records: Vec<_> = patterns.iter().map(|&p| rec([p & 4 != 0, p & 2 != 0, p & 1 != 0])).collect();
        let r = model_free_fidelity(&records).unwrap();
        prop_assert!(r.fidelity_ci.lo <= r.fidelity && r.fidelity <= r.fidelity_ci.hi);
        prop_assert!((0.0..=1.0).contains(&r.fidelity));
        if let Some(s) = r.survival {
            prop_assert!(r.survival_ci.lo <= s && s <= r.survival_ci.hi);
        }
        prop_assert_eq!(r.patterns.values().sum::<u64>() as usize, records.len());
    }
}
