use std::path::PathBuf;

use clap::{Args, Subcommand, ValueEnum};
use serde_json::json;

use super::io::{csv_table, parse_number, parse_number_list, parse_window, read_json, NumberList, OutputArgs};
use super::{CliError, CliResult};
use crate::pamol::{
    adiabatic_potentials, default_curve_grid, lb_density_ratio, pa_spectrum, C6Scaling, FSquaredMode, ModelPotential,
    PaParameters, SpectrumOptions,
};

#[derive(Debug, Subcommand)]
pub enum PaCmd {
    /// Adiabatic potential curves, optionally with the radial model terms.
    Potentials(PotentialsArgs),
    /// Bound levels of one curve inside an energy window, as CSV.
    Spectrum(SpectrumArgs),
    /// LeRoy-Bernstein level-density ratio between two linewidths.
    Lb(LbArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FSquaredArg {
    Expectation,
    Asymptotic,
}

impl From<FSquaredArg> for FSquaredMode {
    fn from(f: FSquaredArg) -> Self {
        match f {
            FSquaredArg::Expectation => FSquaredMode::Expectation,
            FSquaredArg::Asymptotic => FSquaredMode::Asymptotic,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ScalingArg {
    GammaSquared,
    Fixed,
}

#[derive(Debug, Args)]
pub struct ParamsArg {
    /// Parameter JSON (`A`, `d2`, `C6`, `C12`, `mu`, `k_photon`, `retardation`,
    /// `dipole_scale`); the calibrated built-in set when omitted.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
}

impl ParamsArg {
    fn load(&self) -> Result<PaParameters, CliError> {
        let p = match &self.config {
            Some(path) => read_json(path)?,
            None => PaParameters::calibrated(),
        };
        p.validate()?;
        Ok(p)
    }
}

#[derive(Debug, Args)]
pub struct PotentialsArgs {
    #[command(flatten)]
    pub params: ParamsArg,
    /// Rotational quantum numbers T_e; each adds the model potential of every
    /// curve (fractions such as `3/2` are accepted).
    #[arg(long = "Te", value_parser = parse_number_list)]
    pub te: Option<NumberList>,
    /// How ⟨F²⟩ enters the rotational term.
    #[arg(long, value_enum, default_value = "expectation")]
    pub f_squared: FSquaredArg,
    /// Smallest R (a0) written.
    #[arg(long, default_value_t = 5.0)]
    pub r_min: f64,
    /// Largest R (a0) written.
    #[arg(long, default_value_t = 1000.0)]
    pub r_max: f64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub params: ParamsArg,
    /// Rotational quantum numbers T_e, comma separated.
    #[arg(long = "Te", default_value = "1/2,3/2", value_parser = parse_number_list)]
    pub te: NumberList,
    /// Energy window `lo,hi` in MHz below the curve's dissociation limit.
    #[arg(long, default_value = "-1000,0", allow_hyphen_values = true, value_parser = parse_window)]
    pub window: (f64, f64),
    /// Curve number (1-6).
    #[arg(long, default_value_t = 2)]
    pub curve: usize,
    /// How ⟨F²⟩ enters the rotational term.
    #[arg(long, value_enum, default_value = "expectation")]
    pub f_squared: FSquaredArg,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct LbArgs {
    /// Linewidth ratio Γ_a / Γ_b.
    #[arg(long, default_value = "30", value_parser = parse_number)]
    pub gamma_ratio: f64,
    /// How C6 follows the linewidth.
    #[arg(long, value_enum, default_value = "gamma-squared")]
    pub scaling: ScalingArg,
    #[command(flatten)]
    pub out: OutputArgs,
}

pub fn run(cmd: PaCmd) -> CliResult {
    match cmd {
        PaCmd::Potentials(a) => potentials(a),
        PaCmd::Spectrum(a) => spectrum(a),
        PaCmd::Lb(a) => lb(a),
    }
}

fn te_label(te: Option<f64>) -> String {
    te.map(|t| t.to_string()).unwrap_or_default()
}

fn potentials(a: PotentialsArgs) -> CliResult {
    a.out.check_free(&["potentials.csv"])?;
    if !(a.r_min > 0.0 && a.r_min < a.r_max) {
        return Err(CliError(format!("need 0 < r_min < r_max, got {} and {}", a.r_min, a.r_max)));
    }
    let params = a.params.load()?;
    let curves = adiabatic_potentials(&params, &default_curve_grid())?;
    let mut rows = Vec::new();
    for c in &curves {
        for (r, v) in c.r_grid.iter().zip(&c.v) {
            if (a.r_min..=a.r_max).contains(r) {
                rows.push(format!("{r},{v},{},,{}", c.index, c.abs_omega));
            }
        }
    }
    for &te in a.te.as_ref().map_or(&[][..], |t| &t.0) {
        for c in &curves {
            let pot = ModelPotential::with_mode(c, te, &params, a.f_squared.into())?;
            for r in c.r_grid.iter().filter(|r| (a.r_min..=a.r_max).contains(*r)) {
                let v = pot.eval(*r)? + c.asymptote;
                rows.push(format!("{r},{v},{},{},{}", c.index, te_label(Some(te)), c.abs_omega));
            }
        }
    }
    let path = a.out.write("potentials.csv", &csv_table("R_a0,V_MHz,curve,Te,omega", rows))?;
    let summary: Vec<_> = curves
        .iter()
        .map(|c| json!({ "curve": c.index, "omega": c.abs_omega, "asymptote_MHz": c.asymptote, "attractive": c.attractive }))
        .collect();
    Ok(json!({ "command": "pa potentials", "curves": summary, "output": path }))
}

fn spectrum(a: SpectrumArgs) -> CliResult {
    a.out.check_free(&["spectrum.csv"])?;
    let params = a.params.load()?;
    let opts = SpectrumOptions { curve: a.curve, f_squared: a.f_squared.into(), ..Default::default() };
    let lines = pa_spectrum(&params, &a.te.0, a.window, &opts)?;
    let csv = csv_table("Te,E_MHz,nodes", lines.iter().map(|l| format!("{},{},{}", l.te, l.energy, l.nodes)));
    let path = a.out.write("spectrum.csv", &csv)?;
    let plot = a.out.plot_result("spectrum_potential.csv", || {
        let curves = adiabatic_potentials(&params, &default_curve_grid())?;
        let c = curves.iter().find(|c| c.index == a.curve).ok_or_else(|| CliError(format!("no curve {}", a.curve)))?;
        let mut rows = Vec::new();
        for &te in &a.te.0 {
            let pot = ModelPotential::with_mode(c, te, &params, a.f_squared.into())?;
            for &r in c.r_grid.iter().filter(|&&r| r <= 2000.0) {
                rows.push(format!("{r},{},{te}", pot.eval(r)?));
            }
        }
        Ok(csv_table("R_a0,V_MHz,Te", rows))
    })?;
    Ok(json!({
        "command": "pa spectrum",
        "curve": a.curve,
        "levels": lines.len(),
        "energies_MHz": lines.iter().map(|l| l.energy).collect::<Vec<_>>(),
        "output": path,
        "plotdata": plot,
    }))
}

fn lb(a: LbArgs) -> CliResult {
    a.out.check_free(&["lb.json"])?;
    if !(a.gamma_ratio > 0.0) {
        return Err(CliError(format!("gamma ratio must be positive, got {}", a.gamma_ratio)));
    }
    let mode = match a.scaling {
        ScalingArg::GammaSquared => C6Scaling::GammaSquared,
        ScalingArg::Fixed => C6Scaling::Fixed,
    };
    let ratio = lb_density_ratio(a.gamma_ratio, 1.0, mode);
    let doc = json!({ "gamma_ratio": a.gamma_ratio, "scaling": mode, "density_ratio": ratio });
    let path = a.out.write("lb.json", &format!("{doc:#}\n"))?;
    let plot = a.out.plot("lb_density.csv", || {
        csv_table(
            "gamma_ratio,density_ratio",
            (1..=100).map(|g| format!("{g},{}", lb_density_ratio(f64::from(g), 1.0, mode))),
        )
    })?;
    Ok(json!({
        "command": "pa lb",
        "gamma_ratio": a.gamma_ratio,
        "density_ratio": ratio,
        "output": path,
        "plotdata": plot,
    }))
}
