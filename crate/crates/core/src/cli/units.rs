use clap::{Args, Subcommand};
use serde_json::json;

use super::CliResult;
use crate::units::convert_energy_str;

#[derive(Debug, Subcommand)]
pub enum UnitsCmd {
    /// Convert an energy between hartree, MHz, joule and kelvin.
    Convert(ConvertArgs),
}

#[derive(Debug, Args)]
pub struct ConvertArgs {
    /// Value to convert.
    #[arg(long, allow_hyphen_values = true)]
    pub value: f64,
    /// Unit of the value (`hartree`, `mhz`, `joule`, `kelvin`).
    #[arg(long)]
    pub from: String,
    /// Target unit.
    #[arg(long)]
    pub to: String,
}

pub fn run(cmd: UnitsCmd) -> CliResult {
    match cmd {
        UnitsCmd::Convert(a) => {
            let out = convert_energy_str(a.value, &a.from, &a.to)?;
            Ok(json!({ "command": "units convert", "value": a.value, "from": a.from, "to": a.to, "result": out }))
        }
    }
}
