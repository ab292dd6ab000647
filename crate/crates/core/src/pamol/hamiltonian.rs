//! 12-state channel basis and the interaction Hamiltonian
//! H = [d₁·d₂ − 3 d₁z d₂z]/R³ + A I·J (¹⁷¹Yb ³P₁ only).

use nalgebra::{DMatrix, SMatrix};

use super::{PaError, PaParameters};

pub type Matrix12 = SMatrix<f64, 12, 12>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sector {
    /// ¹⁷¹Yb in ¹S₀ (spin m_I), ¹⁷⁴Yb in ³P₁ (projection m).
    Ground171Excited174,
    /// ¹⁷¹Yb in ³P₁ (projection m, spin m_I), ¹⁷⁴Yb in ¹S₀.
    Excited171Ground174,
}

/// One product state. Half-integer nuclear projections are stored doubled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BasisState {
    pub sector: Sector,
    pub two_mi: i8,
    pub m: i8,
}

impl BasisState {
    pub fn two_omega(&self) -> i8 {
        self.two_mi + 2 * self.m
    }

    pub fn omega(&self) -> f64 {
        f64::from(self.two_omega()) / 2.0
    }

    pub fn mi(&self) -> f64 {
        f64::from(self.two_mi) / 2.0
    }
}

#[derive(Debug, Clone)]
pub struct ChannelBasis {
    pub states: Vec<BasisState>,
}

impl ChannelBasis {
    pub fn new() -> Self {
        let mut states = Vec::with_capacity(12);
        for two_mi in [1i8, -1] {
            for m in -1i8..=1 {
                states.push(BasisState { sector: Sector::Ground171Excited174, two_mi, m });
            }
        }
        for m in -1i8..=1 {
            for two_mi in [1i8, -1] {
                states.push(BasisState { sector: Sector::Excited171Ground174, two_mi, m });
            }
        }
        ChannelBasis { states }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn index_of(&self, s: &BasisState) -> Option<usize> {
        self.states.iter().position(|t| t == s)
    }
}

impl Default for ChannelBasis {
    fn default() -> Self {
        Self::new()
    }
}

/// States of the block with total projection Ω = two_omega/2, in basis order.
pub fn block_states(two_omega: i8) -> Vec<BasisState> {
    ChannelBasis::new().states.into_iter().filter(|s| s.two_omega() == two_omega).collect()
}

fn ladder(j2: i32, m2: i32, up: bool) -> f64 {
    // √(j(j+1) − m(m±1)) with doubled arguments
    let (j, m) = (f64::from(j2) / 2.0, f64::from(m2) / 2.0);
    let v = if up { j * (j + 1.0) - m * (m + 1.0) } else { j * (j + 1.0) - m * (m - 1.0) };
    v.max(0.0).sqrt()
}

/// ⟨a| I·J |b⟩ within one sector (I = 1/2, J = 1 of the excited atom).
fn i_dot_j(a: &BasisState, b: &BasisState) -> f64 {
    if a.sector != b.sector {
        return 0.0;
    }
    let (ami, am) = (i32::from(a.two_mi), 2 * i32::from(a.m));
    let (bmi, bm) = (i32::from(b.two_mi), 2 * i32::from(b.m));
    if ami == bmi && am == bm {
        return f64::from(bmi * bm) / 4.0;
    }
    if ami == bmi + 2 && am == bm - 2 {
        return 0.5 * ladder(1, bmi, true) * ladder(2, bm, false);
    }
    if ami == bmi - 2 && am == bm + 2 {
        return 0.5 * ladder(1, bmi, false) * ladder(2, bm, true);
    }
    0.0
}

/// Retardation factors (Σ, Π) for x = kR.
pub(crate) fn retardation_factors(x: f64) -> (f64, f64) {
    let (s, c) = x.sin_cos();
    let sigma = c + x * s;
    (sigma, sigma - x * x * c)
}

/// Precomputed R-independent pieces so that blocks can be assembled cheaply.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Couplings {
    a: f64,
    d2: f64,
    k: f64,
    retardation: bool,
}

impl Couplings {
    pub(crate) fn new(p: &PaParameters) -> Self {
        Couplings { a: p.a_hfs, d2: p.dipole_scale * p.d2_mhz(), k: p.k_photon, retardation: p.retardation }
    }

    /// Matrix element in MHz at distance r (a0).
    pub(crate) fn element(&self, a: &BasisState, b: &BasisState, r: f64) -> f64 {
        let mut v = 0.0;
        if a.sector == Sector::Excited171Ground174 {
            v += self.a * i_dot_j(a, b);
        }
        if a.sector != b.sector && a.two_mi == b.two_mi && a.m == b.m {
            let (fs, fp) = if self.retardation { retardation_factors(self.k * r) } else { (1.0, 1.0) };
            let coeff = if a.m == 0 { -2.0 * fs } else { fp };
            v += coeff * self.d2 / (r * r * r);
        }
        v
    }
}

pub fn build_hamiltonian(r: f64, params: &PaParameters) -> Result<Matrix12, PaError> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(PaError::NonPositiveDistance(r));
    }
    let basis = ChannelBasis::new();
    let c = Couplings::new(params);
    let mut h = Matrix12::zeros();
    for i in 0..12 {
        for j in i..12 {
            let v = c.element(&basis.states[i], &basis.states[j], r);
            h[(i, j)] = v;
            h[(j, i)] = v;
        }
    }
    Ok(h)
}

/// F² = (I + J₁₇₁ + J₁₇₄)² restricted to the given states. Only one atom is
/// excited in each sector, so F² = 11/4 + 2 I·J with J that atom's ³P₁
/// angular momentum.
pub fn f_squared_matrix(states: &[BasisState]) -> DMatrix<f64> {
    let n = states.len();
    DMatrix::from_fn(n, n, |i, j| {
        let diag = if i == j { 11.0 / 4.0 } else { 0.0 };
        diag + 2.0 * i_dot_j(&states[i], &states[j])
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_has_twelve_states_and_blocks() {
        let b = ChannelBasis::new();
        assert_eq!(b.len(), 12);
        assert_eq!(block_states(1).len(), 4);
        assert_eq!(block_states(-1).len(), 4);
        assert_eq!(block_states(3).len(), 2);
        assert_eq!(block_states(-3).len(), 2);
    }

    #[test]
    fn hamiltonian_conserves_omega() {
        let p = PaParameters::table2();
        let b = ChannelBasis::new();
        let h = build_hamiltonian(37.0, &p).unwrap();
        for i in 0..12 {
            for j in 0..12 {
                if b.states[i].two_omega() != b.states[j].two_omega() {
                    assert_eq!(h[(i, j)], 0.0);
                }
            }
        }
    }

    #[test]
    fn f_squared_eigenvalues() {
        let states = block_states(1);
        let f2 = f_squared_matrix(&states);
        let mut ev: Vec<f64> = f2.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        // F = 1/2 and 3/2 in each sector
        let want = [0.75, 0.75, 3.75, 3.75];
        for (a, b) in ev.iter().zip(want) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_nonpositive_distance() {
        let p = PaParameters::table2();
        assert!(build_hamiltonian(0.0, &p).is_err());
        assert!(build_hamiltonian(-3.0, &p).is_err());
    }
}
