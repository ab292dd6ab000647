//! Photoassociation resonance list for one adiabatic curve.

use serde::{Deserialize, Serialize};

use super::{
    adiabatic_potentials, default_curve_grid, solve_bound_states, FSquaredMode, GridSpec, ModelPotential, PaError,
    PaParameters,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumOptions {
    /// Curve number (1-6).
    pub curve: usize,
    pub f_squared: FSquaredMode,
    pub grid: GridSpec,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        SpectrumOptions { curve: 2, f_squared: FSquaredMode::Expectation, grid: GridSpec::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumLine {
    #[serde(rename = "Te")]
    pub te: f64,
    /// MHz below the curve's dissociation limit.
    #[serde(rename = "E_MHz")]
    pub energy: f64,
    pub nodes: u32,
    pub v_index: Option<u32>,
}

/// Bound levels of the chosen curve for each T_e, merged and sorted by
/// energy (deepest first).
pub fn pa_spectrum(
    params: &PaParameters,
    te_list: &[f64],
    window: (f64, f64),
    opts: &SpectrumOptions,
) -> Result<Vec<SpectrumLine>, PaError> {
    params.validate()?;
    if !(window.0 < window.1) {
        return Err(PaError::BadWindow(window.0, window.1));
    }
    let curves = adiabatic_potentials(params, &default_curve_grid())?;
    let curve = curves.iter().find(|c| c.index == opts.curve).ok_or(PaError::NoSuchCurve(opts.curve))?;
    let mut lines = Vec::new();
    for &te in te_list {
        let pot = ModelPotential::with_mode(curve, te, params, opts.f_squared)?;
        for s in solve_bound_states(&pot, params.mu, window, &opts.grid)? {
            lines.push(SpectrumLine { te, energy: s.binding_energy, nodes: s.nodes, v_index: s.v_index });
        }
    }
    lines.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    Ok(lines)
}
