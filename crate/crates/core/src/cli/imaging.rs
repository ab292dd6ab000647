use std::path::PathBuf;

use clap::{Args, Subcommand, ValueEnum};
use serde_json::json;

use super::io::{csv_table, parse_counts, parse_triples, read_json, read_text, write_triples_csv, OutputArgs};
use super::{CliError, CliResult};
use crate::imaging::{
    double_lorentzian, fit_double_lorentzian, fit_histogram, generate_triples, infidelity_curve, model_free_fidelity,
    optimize_threshold, sample_histogram, DarkModel, FitOptions, HistogramModel, TripleGenerator,
};

#[derive(Debug, Subcommand)]
pub enum ImagingCmd {
    /// Fit a count histogram (or a double-Lorentzian line scan).
    Fit(FitArgs),
    /// Optimal threshold and error components of a histogram model.
    Threshold(ThresholdArgs),
    /// Fidelity and survival from three consecutive images, with 95 % intervals.
    Modelfree(ModelFreeArgs),
    /// Synthetic counts or triple-image records.
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum DarkArg {
    Exponential,
    Erlang,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FitKind {
    /// Photon counts, one per line or a JSON array.
    Histogram,
    /// `x,y` rows of a spectroscopy scan with two dips.
    Lorentzian,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SynthKind {
    Counts,
    Triples,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Input data file.
    #[arg(long, value_name = "FILE")]
    pub input: PathBuf,
    /// What the input holds.
    #[arg(long, value_enum, default_value = "histogram")]
    pub kind: FitKind,
    /// Shape of the dark-count tail.
    #[arg(long, value_enum, default_value = "exponential")]
    pub dark: DarkArg,
    /// Shape parameter of the Erlang dark tail.
    #[arg(long, default_value_t = 2)]
    pub erlang_n: u32,
    /// Upper end of the count axis; the largest count when omitted.
    #[arg(long)]
    pub x_max: Option<f64>,
    /// Fewest counts accepted.
    #[arg(long, default_value_t = 1000)]
    pub min_samples: usize,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ModelArg {
    /// Histogram model JSON (`F`, `sigma_D`, `mu_D`, `a`, `b`, `sigma_B`,
    /// `mu_B`, `c`, `x_max`); a typical 399 nm imaging model when omitted.
    #[arg(long, value_name = "FILE")]
    pub model: Option<PathBuf>,
}

impl ModelArg {
    fn load(&self) -> Result<HistogramModel, CliError> {
        let m = match &self.model {
            Some(p) => read_json(p)?,
            None => HistogramModel::typical_399(),
        };
        m.validate()?;
        Ok(m)
    }
}

#[derive(Debug, Args)]
pub struct ThresholdArgs {
    #[command(flatten)]
    pub model: ModelArg,
    /// Points in the plotted error-versus-threshold curve.
    #[arg(long, default_value_t = 301)]
    pub curve_points: usize,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ModelFreeArgs {
    /// CSV with columns `site,shot,b1,b2,b3` (detections as 0/1).
    #[arg(long, value_name = "FILE")]
    pub input: PathBuf,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// What to generate.
    #[arg(long, value_enum, default_value = "counts")]
    pub kind: SynthKind,
    #[command(flatten)]
    pub model: ModelArg,
    /// Number of counts drawn.
    #[arg(long, default_value_t = 100_000)]
    pub n: usize,
    /// Sites per shot (triples).
    #[arg(long, default_value_t = 100)]
    pub sites: usize,
    /// Shots (triples).
    #[arg(long, default_value_t = 1000)]
    pub shots: usize,
    /// Site loading probability (triples).
    #[arg(long, default_value_t = 0.5)]
    pub load: f64,
    /// Probability of missing a present atom in one image (triples).
    #[arg(long, default_value_t = 8e-4)]
    pub miss: f64,
    /// Probability of a bright reading on an empty site (triples).
    #[arg(long, default_value_t = 8e-4)]
    pub false_positive: f64,
    /// Probability of losing the atom during one image (triples).
    #[arg(long, default_value_t = 1.2e-2)]
    pub loss: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub out: OutputArgs,
}

pub fn run(cmd: ImagingCmd) -> CliResult {
    match cmd {
        ImagingCmd::Fit(a) => match a.kind {
            FitKind::Histogram => fit(a),
            FitKind::Lorentzian => lorentzian(a),
        },
        ImagingCmd::Threshold(a) => threshold(a),
        ImagingCmd::Modelfree(a) => modelfree(a),
        ImagingCmd::Synth(a) => synth(a),
    }
}

fn fit(a: FitArgs) -> CliResult {
    a.out.check_free(&["histogram_fit.json"])?;
    let counts = parse_counts(&read_text(&a.input)?)?;
    let dark = match a.dark {
        DarkArg::Exponential => DarkModel::Exponential,
        DarkArg::Erlang => DarkModel::Erlang { n: a.erlang_n },
    };
    let fit = fit_histogram(&counts, &FitOptions { dark, x_max: a.x_max, min_samples: a.min_samples })?;
    let best = optimize_threshold(&fit.model)?;
    let doc = json!({ "n_counts": counts.len(), "fit": fit, "threshold": best });
    let path = a.out.write("histogram_fit.json", &format!("{doc:#}\n"))?;
    let plot = a.out.plot_result("fit_histogram.csv", || {
        let pm = fit.model.prepare()?;
        let w = fit.bin_width;
        let nb = (fit.model.x_max / w).ceil() as usize;
        let mut hist = vec![0u64; nb];
        for &x in &counts {
            if (0.0..=fit.model.x_max).contains(&x) {
                hist[((x / w) as usize).min(nb - 1)] += 1;
            }
        }
        let n = counts.len() as f64;
        Ok(csv_table(
            "x_lo,x_hi,count,model",
            hist.iter().enumerate().map(|(i, &k)| {
                let (lo, hi) = (i as f64 * w, ((i + 1) as f64 * w).min(fit.model.x_max));
                format!("{lo},{hi},{k},{}", n * (hi - lo) * pm.pdf(0.5 * (lo + hi)))
            }),
        ))
    })?;
    Ok(json!({
        "command": "imaging fit",
        "n_counts": counts.len(),
        "F": fit.model.f,
        "threshold": best.threshold,
        "fidelity": best.fidelity,
        "unreliable": best.unreliable,
        "output": path,
        "plotdata": plot,
    }))
}

fn lorentzian(a: FitArgs) -> CliResult {
    a.out.check_free(&["lorentzian_fit.json"])?;
    let text = read_text(&a.input)?;
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(text.as_bytes());
    let (mut x, mut y) = (Vec::new(), Vec::new());
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let parsed = (rec.get(0).map(str::parse::<f64>), rec.get(1).map(str::parse::<f64>));
        match parsed {
            (Some(Ok(xi)), Some(Ok(yi))) => {
                x.push(xi);
                y.push(yi);
            }
            _ if i == 0 => continue,
            _ => return Err(CliError(format!("line {}: expected two numbers `x,y`", i + 1))),
        }
    }
    let fit = fit_double_lorentzian(&x, &y)?;
    let path = a.out.write("lorentzian_fit.json", &format!("{:#}\n", json!({ "fit": fit })))?;
    let plot = a.out.plot("fit_lorentzian.csv", || {
        let p = [
            fit.offset,
            fit.amplitudes[0],
            fit.centers[0],
            fit.widths[0],
            fit.amplitudes[1],
            fit.centers[1],
            fit.widths[1],
        ];
        csv_table("x,y,model", x.iter().zip(&y).map(|(xi, yi)| format!("{xi},{yi},{}", double_lorentzian(*xi, &p))))
    })?;
    Ok(json!({
        "command": "imaging fit",
        "centers": fit.centers,
        "widths": fit.widths,
        "single_dip": fit.single_dip,
        "output": path,
        "plotdata": plot,
    }))
}

fn threshold(a: ThresholdArgs) -> CliResult {
    a.out.check_free(&["threshold.json"])?;
    let model = a.model.load()?;
    let best = optimize_threshold(&model)?;
    let doc = json!({ "model": model, "optimum": best });
    let path = a.out.write("threshold.json", &format!("{doc:#}\n"))?;
    let plot = a.out.plot_result("threshold_curve.csv", || {
        let n = a.curve_points.max(2);
        let xs: Vec<f64> = (0..n).map(|i| model.x_max * i as f64 / (n - 1) as f64).collect();
        let curve = infidelity_curve(&model, &xs)?;
        Ok(csv_table(
            "threshold,E0,E1,error",
            curve.iter().map(|r| format!("{},{},{},{}", r.threshold, r.e0, r.e1, r.error)),
        ))
    })?;
    Ok(json!({
        "command": "imaging threshold",
        "threshold": best.threshold,
        "fidelity": best.fidelity,
        "E0": best.e0,
        "E1": best.e1,
        "unreliable": best.unreliable,
        "output": path,
        "plotdata": plot,
    }))
}

fn modelfree(a: ModelFreeArgs) -> CliResult {
    a.out.check_free(&["modelfree.json"])?;
    let records = parse_triples(&read_text(&a.input)?)?;
    let report = model_free_fidelity(&records)?;
    let path = a.out.write("modelfree.json", &format!("{:#}\n", json!(report)))?;
    Ok(json!({
        "command": "imaging modelfree",
        "records": report.n_records,
        "fidelity": report.fidelity,
        "fidelity_ci": [report.fidelity_ci.lo, report.fidelity_ci.hi],
        "survival": report.survival,
        "survival_ci": [report.survival_ci.lo, report.survival_ci.hi],
        "survival_corrected": report.survival_corrected,
        "survival_corrected_ci": [report.survival_corrected_ci.lo, report.survival_corrected_ci.hi],
        "output": path,
    }))
}

fn synth(a: SynthArgs) -> CliResult {
    match a.kind {
        SynthKind::Counts => {
            a.out.check_free(&["counts.csv"])?;
            let model = a.model.load()?;
            let counts = sample_histogram(&model, a.n, a.seed)?;
            let path = a.out.write("counts.csv", &csv_table("counts", counts.iter().map(|c| c.to_string())))?;
            Ok(json!({ "command": "imaging synth", "kind": "counts", "seed": a.seed, "n": a.n, "output": path }))
        }
        SynthKind::Triples => {
            a.out.check_free(&["triples.csv"])?;
            let g = TripleGenerator {
                n_sites: a.sites,
                n_shots: a.shots,
                load: a.load,
                miss: a.miss,
                false_positive: a.false_positive,
                loss: a.loss,
                seed: a.seed,
            };
            let records = generate_triples(&g)?;
            let path = a.out.write("triples.csv", &write_triples_csv(&records))?;
            Ok(json!({
                "command": "imaging synth",
                "kind": "triples",
                "seed": a.seed,
                "generator": g,
                "survival": g.survival(),
                "output": path,
            }))
        }
    }
}
