use std::time::Instant;
use tweezerforge::pamol::*;

fn main() {
    let args: Vec<f64> = std::env::args().skip(1).map(|a| a.parse().unwrap()).collect();
    let mut p = PaParameters::calibrated();
    if args.len() >= 2 {
        p.dipole_scale = args[0];
        p.c12 = args[1];
    }
    let mut opts = SpectrumOptions::default();
    if args.len() >= 3 {
        opts.grid.phase_per_step = args[2];
    }
    let t = Instant::now();
    let lines = pa_spectrum(&p, &[0.5, 1.5], (-1000.0, 0.0), &opts).unwrap();
    for l in &lines {
        println!("{} {:.4} nodes={} v={:?}", l.te, l.energy, l.nodes, l.v_index);
    }
    println!("{:?}", t.elapsed());
}
