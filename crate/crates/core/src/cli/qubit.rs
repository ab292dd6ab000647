use std::path::PathBuf;

use clap::{Args, Subcommand, ValueEnum};
use serde_json::json;

use super::io::{csv_table, opt_field, parse_number_list, read_json, read_text, NumberList, OutputArgs};
use super::{CliError, CliResult};
use crate::qubitsim::{
    contrast_curve, fit_damped_sinusoid, fit_stretched_exp, preset, presets, stretched_exp, DtScan, Preset,
    StretchedExpFit, YB171_HZ_PER_GAUSS,
};

#[derive(Debug, Subcommand)]
pub enum QubitCmd {
    /// Monte Carlo contrast versus hold time, as CSV `T_s,contrast,stderr`.
    Simulate(SimulateArgs),
    /// Stretched-exponential or damped-sinusoid fit of a two-column CSV.
    Fit(FitArgs),
    /// Built-in calibrated noise presets, as JSON.
    Presets(PresetsArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FitModel {
    /// `A·exp(−(T/T2)^n)` to contrast versus hold time.
    StretchedExp,
    /// Damped sinusoid to a fringe.
    DampedSinusoid,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Built-in preset name (see `qubit presets`).
    #[arg(long, default_value = "echo-399", conflicts_with = "config")]
    pub preset: String,
    /// Preset JSON (`name`, `kind`, `noise`, `rabi_hz`, `target_t2`, `description`).
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Hold times T in seconds; eight points up to twice the preset's T2 when omitted.
    #[arg(long, value_parser = parse_number_list)]
    pub times: Option<NumberList>,
    /// Hold field in gauss; recomputes the Larmor frequency.
    #[arg(long)]
    pub field_gauss: Option<f64>,
    /// Trajectories per hold time.
    #[arg(long, default_value_t = 2000)]
    pub trajectories: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// CSV whose first two columns are x and y; a third column, if present,
    /// holds the standard error of y (stretched-exp only).
    #[arg(long, value_name = "FILE")]
    pub input: PathBuf,
    /// Model to fit.
    #[arg(long, value_enum, default_value = "stretched-exp")]
    pub model: FitModel,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct PresetsArgs {
    #[command(flatten)]
    pub out: OutputArgs,
}

pub fn run(cmd: QubitCmd) -> CliResult {
    match cmd {
        QubitCmd::Simulate(a) => simulate(a),
        QubitCmd::Fit(a) => fit(a),
        QubitCmd::Presets(a) => list_presets(a),
    }
}

fn stretched_fit_if_possible(t: &[f64], c: &[f64], s: Option<&[f64]>) -> Option<StretchedExpFit> {
    fit_stretched_exp(t, c, s).ok()
}

fn simulate(a: SimulateArgs) -> CliResult {
    a.out.check_free(&["contrast.csv"])?;
    let mut p: Preset = match &a.config {
        Some(path) => read_json(path)?,
        None => preset(&a.preset)?,
    };
    if let Some(g) = a.field_gauss {
        p = p.with_field(g, YB171_HZ_PER_GAUSS);
    }
    let times = match &a.times {
        Some(t) => t.0.clone(),
        None => (1..=8).map(|k| p.target_t2 * f64::from(k) / 4.0).collect(),
    };
    if times.iter().any(|&t| !(t >= 0.0)) {
        return Err(CliError("hold times must be non-negative".into()));
    }
    let points = contrast_curve(
        p.kind,
        p.rabi_hz,
        &p.noise,
        &times,
        &DtScan::for_larmor(p.noise.larmor),
        a.trajectories,
        a.seed,
    )?;
    let csv = csv_table(
        "T_s,contrast,stderr",
        points.iter().map(|q| format!("{},{},{}", q.t, opt_field(q.contrast), opt_field(q.stderr))),
    );
    let path = a.out.write("contrast.csv", &csv)?;
    let good: Vec<_> = points.iter().filter(|q| !q.flagged).collect();
    let t: Vec<f64> = good.iter().map(|q| q.t).collect();
    let c: Vec<f64> = good.iter().filter_map(|q| q.contrast).collect();
    let s: Vec<f64> = good.iter().filter_map(|q| q.stderr.map(|e| e.max(1e-6))).collect();
    let fit = stretched_fit_if_possible(&t, &c, Some(&s));
    let plot = a.out.plot("contrast_fit.csv", || {
        let tmax = times.iter().cloned().fold(0.0, f64::max);
        csv_table(
            "T_s,fit",
            (0..=200).filter_map(|i| {
                let ti = tmax * f64::from(i) / 200.0;
                fit.as_ref().map(|f| format!("{ti},{}", stretched_exp(ti, f.a, f.t2, f.n)))
            }),
        )
    })?;
    Ok(json!({
        "command": "qubit simulate",
        "preset": p.name,
        "seed": a.seed,
        "trajectories": a.trajectories,
        "flagged": points.iter().filter(|q| q.flagged).count(),
        "fit": fit.as_ref().map(|f| json!({ "A": f.a, "T2": f.t2, "n": f.n, "stderr": f.stderr })),
        "output": path,
        "plotdata": plot,
    }))
}

/// x, y and, when every row has one, the standard error column.
type Columns = (Vec<f64>, Vec<f64>, Option<Vec<f64>>);

fn read_columns(text: &str) -> Result<Columns, CliError> {
    let mut rdr =
        csv::ReaderBuilder::new().has_headers(false).flexible(true).trim(csv::Trim::All).from_reader(text.as_bytes());
    let (mut x, mut y, mut s) = (Vec::new(), Vec::new(), Vec::new());
    let mut all_s = true;
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let num = |k: usize| rec.get(k).filter(|f| !f.is_empty()).map(str::parse::<f64>);
        match (num(0), num(1)) {
            (Some(Ok(xi)), Some(Ok(yi))) => {
                x.push(xi);
                y.push(yi);
                match num(2) {
                    Some(Ok(si)) => s.push(si),
                    _ => all_s = false,
                }
            }
            (Some(Ok(_)), None) => continue,
            _ if i == 0 => continue,
            _ => return Err(CliError(format!("line {}: expected numeric columns", i + 1))),
        }
    }
    Ok((x, y, (all_s && !s.is_empty()).then_some(s)))
}

fn fit(a: FitArgs) -> CliResult {
    a.out.check_free(&["coherence_fit.json"])?;
    let (x, y, s) = read_columns(&read_text(&a.input)?)?;
    let (doc, summary) = match a.model {
        FitModel::StretchedExp => {
            let f = fit_stretched_exp(&x, &y, s.as_deref())?;
            let summary = json!({ "A": f.a, "T2": f.t2, "n": f.n, "stderr": f.stderr });
            (json!({ "model": "stretched-exp", "fit": f }), summary)
        }
        FitModel::DampedSinusoid => {
            let f = fit_damped_sinusoid(&x, &y)?;
            let (c, ce) = f.contrast();
            let summary = json!({ "frequency": f.frequency, "contrast": c, "contrast_stderr": ce });
            (json!({ "model": "damped-sinusoid", "fit": f, "contrast": c, "contrast_stderr": ce }), summary)
        }
    };
    let path = a.out.write("coherence_fit.json", &format!("{doc:#}\n"))?;
    Ok(json!({ "command": "qubit fit", "points": x.len(), "fit": summary, "output": path }))
}

fn list_presets(a: PresetsArgs) -> CliResult {
    a.out.check_free(&["presets.json"])?;
    let all = presets();
    let path = a.out.write("presets.json", &format!("{:#}\n", json!(all)))?;
    Ok(json!({
        "command": "qubit presets",
        "presets": all.iter().map(|p| p.name.as_str()).collect::<Vec<_>>(),
        "output": path,
    }))
}
