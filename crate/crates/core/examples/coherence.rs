//! Simulated contrast decay for each preset, with a stretched-exponential fit.

use tweezerforge::qubitsim::{contrast_curve, fit_stretched_exp, presets, DtScan};

fn main() {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(4000);
    for p in presets() {
        let ts: Vec<f64> = (1..=8).map(|i| p.target_t2 * 0.25 * i as f64).collect();
        let pts = contrast_curve(p.kind, p.rabi_hz, &p.noise, &ts, &DtScan::for_larmor(p.noise.larmor), n, 1).unwrap();
        let c: Vec<f64> = pts.iter().map(|q| q.contrast.unwrap_or(f64::NAN)).collect();
        let fit = fit_stretched_exp(&ts, &c, None);
        println!("{:17} {:?}", p.name, fit.map(|f| (f.a, f.t2, f.n)));
        let c20 =
            contrast_curve(p.kind, p.rabi_hz, &p.noise, &[0.02], &DtScan::for_larmor(p.noise.larmor), n, 2).unwrap();
        println!("    C(20 ms) = {:?} ± {:?}", c20[0].contrast, c20[0].stderr);
    }
}
