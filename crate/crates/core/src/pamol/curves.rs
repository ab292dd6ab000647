//! Adiabatic potentials from block diagonalization of the interaction
//! Hamiltonian.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::hamiltonian::{block_states, f_squared_matrix, BasisState, Couplings};
use super::{PaError, PaParameters};

/// Ω > 0 blocks; the Ω < 0 blocks are Kramers-degenerate copies.
pub(crate) const BLOCKS: [i8; 2] = [1, 3];

/// Distance at which curves are ranked when numbering them.
const NUMBERING_R: f64 = 100.0;
/// Distance used to decide attractive vs repulsive.
const CHARACTER_R: f64 = 20.0;

#[derive(Debug, Clone)]
pub(crate) struct Block {
    pub states: Vec<BasisState>,
    couplings: Couplings,
    f2: DMatrix<f64>,
}

impl Block {
    pub fn new(two_omega: i8, params: &PaParameters) -> Self {
        let states = block_states(two_omega);
        let f2 = f_squared_matrix(&states);
        Block { states, couplings: Couplings::new(params), f2 }
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn matrix(&self, r: f64) -> DMatrix<f64> {
        let n = self.dim();
        DMatrix::from_fn(n, n, |i, j| self.couplings.element(&self.states[i], &self.states[j], r))
    }

    /// Ascending eigenvalues with matching unit eigenvectors.
    pub fn eigen(&self, r: f64) -> (Vec<f64>, Vec<DVector<f64>>) {
        let eig = self.matrix(r).symmetric_eigen();
        let mut idx: Vec<usize> = (0..self.dim()).collect();
        idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let vals = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
        let vecs = idx.iter().map(|&i| eig.eigenvectors.column(i).into_owned()).collect();
        (vals, vecs)
    }

    /// Eigenvalue of the given rank and ⟨F²⟩ in its eigenvector.
    pub fn level(&self, r: f64, rank: usize) -> (f64, f64) {
        let (vals, vecs) = self.eigen(r);
        let v = &vecs[rank];
        (vals[rank], v.dot(&(&self.f2 * v)))
    }

    /// Sorted eigenvalues of the pure hyperfine problem (R → ∞).
    pub fn asymptotes(&self) -> Vec<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        let far = 1e30;
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = self.couplings.element(&self.states[i], &self.states[j], far);
            }
        }
        let mut v: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
        v.sort_by(f64::total_cmp);
        v
    }
}

/// An adiabatic curve sampled on a radial grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PotentialCurve {
    /// Curve number 1-6: grouped by asymptote (lowest first), then by
    /// energy at R = 100 a0.
    pub index: usize,
    /// Set when the samples include the rotational terms of the model
    /// potential for this T_e; `None` for bare interaction curves.
    pub te: Option<f64>,
    pub abs_omega: f64,
    /// Energy of the dissociation limit in MHz (relative to ¹⁷⁴Yb ³P₁).
    pub asymptote: f64,
    pub attractive: bool,
    pub r_grid: Vec<f64>,
    /// Energies in MHz relative to ¹⁷⁴Yb ³P₁.
    pub v: Vec<f64>,
    /// ⟨F²⟩ in the adiabatic eigenvector at each sample.
    pub f_squared: Vec<f64>,
    /// Position of this curve in the ascending spectrum of its Ω block.
    pub block_rank: usize,
}

impl PotentialCurve {
    pub fn two_omega(&self) -> i8 {
        (2.0 * self.abs_omega).round() as i8
    }

    pub fn r_range(&self) -> (f64, f64) {
        (self.r_grid[0], *self.r_grid.last().expect("non-empty grid"))
    }
}

/// Log-spaced grid suitable for the curves and for the bound-state search.
pub fn default_curve_grid() -> Vec<f64> {
    let (lo, hi, n) = (4.0f64, 2.0e5f64, 3000usize);
    (0..n).map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64)).collect()
}

fn best_permutation(overlap: &[Vec<f64>]) -> (Vec<usize>, f64) {
    let n = overlap.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best = (perm.clone(), f64::NEG_INFINITY, 0.0);
    permute(&mut perm, 0, &mut |p| {
        let score: f64 = (0..n).map(|i| overlap[i][p[i]]).sum();
        if score > best.1 {
            let worst = (0..n).map(|i| overlap[i][p[i]]).fold(f64::INFINITY, f64::min);
            best = (p.to_vec(), score, worst);
        }
    });
    (best.0, best.2)
}

fn permute(p: &mut Vec<usize>, k: usize, f: &mut dyn FnMut(&[usize])) {
    if k == p.len() {
        f(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permute(p, k + 1, f);
        p.swap(k, i);
    }
}

pub fn adiabatic_potentials(params: &PaParameters, r_grid: &[f64]) -> Result<Vec<PotentialCurve>, PaError> {
    if r_grid.is_empty() || r_grid[0] <= 0.0 || r_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(PaError::BadGrid);
    }
    let mut curves = Vec::new();
    for two_omega in BLOCKS {
        let block = Block::new(two_omega, params);
        let n = block.dim();
        let asym = block.asymptotes();
        // track[i] = current rank of the curve that started at rank i
        let mut track: Vec<usize> = (0..n).collect();
        let mut v = vec![Vec::with_capacity(r_grid.len()); n];
        let mut f2 = vec![Vec::with_capacity(r_grid.len()); n];
        let mut prev: Option<Vec<DVector<f64>>> = None;
        for (k, &r) in r_grid.iter().enumerate() {
            let (vals, vecs) = block.eigen(r);
            if let Some(pv) = &prev {
                let ov: Vec<Vec<f64>> =
                    (0..n).map(|i| (0..n).map(|j| pv[track[i]].dot(&vecs[j]).abs()).collect()).collect();
                let (perm, worst) = best_permutation(&ov);
                if worst < 0.5 {
                    return Err(PaError::TrackingFailed { r0: r_grid[k - 1], r1: r, overlap: worst });
                }
                track = perm;
            }
            for i in 0..n {
                let vec = &vecs[track[i]];
                v[i].push(vals[track[i]]);
                f2[i].push(vec.dot(&(&block.f2 * vec)));
            }
            prev = Some(vecs);
        }
        for i in 0..n {
            let rank = track[i];
            let asymptote = asym[rank];
            let attractive = block.level(CHARACTER_R, rank).0 < asymptote;
            curves.push((
                asymptote,
                block.level(NUMBERING_R, rank).0,
                PotentialCurve {
                    index: 0,
                    te: None,
                    abs_omega: f64::from(two_omega) / 2.0,
                    asymptote,
                    attractive,
                    r_grid: r_grid.to_vec(),
                    v: std::mem::take(&mut v[i]),
                    f_squared: std::mem::take(&mut f2[i]),
                    block_rank: rank,
                },
            ));
        }
    }
    curves.sort_by(|a, b| {
        let ka = (a.0 * 1e3).round();
        let kb = (b.0 * 1e3).round();
        ka.total_cmp(&kb).then(a.1.total_cmp(&b.1))
    });
    Ok(curves
        .into_iter()
        .enumerate()
        .map(|(i, (_, _, mut c))| {
            c.index = i + 1;
            c
        })
        .collect())
}
