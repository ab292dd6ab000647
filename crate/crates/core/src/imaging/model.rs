use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;
use statrs::function::gamma::{gamma_lr, ln_gamma};

use super::ImagingError;
use crate::numerics::quad::integrate;

/// Shape of the non-Gaussian part of the dark distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DarkModel {
    /// `a·exp(−b·x)`.
    #[default]
    Exponential,
    /// `(a/b)·Erlang(x; n, rate b)`; equal to the exponential form at n = 1.
    Erlang { n: u32 },
}

/// Two-component count distribution `(1−F)·P_D + F·P_B`, both components
/// renormalized on `[0, x_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistogramModel {
    #[serde(rename = "F")]
    pub f: f64,
    #[serde(rename = "sigma_D")]
    pub sigma_d: f64,
    #[serde(rename = "mu_D")]
    pub mu_d: f64,
    pub a: f64,
    pub b: f64,
    #[serde(rename = "sigma_B")]
    pub sigma_b: f64,
    #[serde(rename = "mu_B")]
    pub mu_b: f64,
    pub c: f64,
    pub x_max: f64,
    #[serde(default)]
    pub dark: DarkModel,
}

const SQRT_2PI: f64 = 2.506_628_274_631_000_7;

fn gauss(x: f64, mu: f64, sigma: f64) -> f64 {
    let z = (x - mu) / sigma;
    (-0.5 * z * z).exp() / (SQRT_2PI * sigma)
}

/// ∫_lo^hi N(x; mu, sigma) dx, accurate in both tails.
fn gauss_mass(lo: f64, hi: f64, mu: f64, sigma: f64) -> f64 {
    let s = std::f64::consts::SQRT_2 * sigma;
    let (zl, zh) = ((lo - mu) / s, (hi - mu) / s);
    if zl >= 0.0 {
        0.5 * (erfc(zl) - erfc(zh))
    } else if zh <= 0.0 {
        0.5 * (erfc(-zh) - erfc(-zl))
    } else {
        1.0 - 0.5 * (erfc(-zl) + erfc(zh))
    }
}

impl HistogramModel {
    /// A well-separated model resembling 20 ms, 399 nm imaging of single
    /// atoms on an EMCCD (best threshold infidelity ≈ 1.5e-3).
    pub fn typical_399() -> Self {
        HistogramModel {
            f: 0.5,
            sigma_d: 6.0,
            mu_d: 20.0,
            a: 4.6e-4,
            b: 0.025,
            sigma_b: 16.0,
            mu_b: 110.0,
            c: 1.0,
            x_max: 300.0,
            dark: DarkModel::Exponential,
        }
    }

    pub fn params(&self) -> [f64; 8] {
        [self.f, self.sigma_d, self.mu_d, self.a, self.b, self.sigma_b, self.mu_b, self.c]
    }

    pub const PARAM_NAMES: [&'static str; 8] = ["F", "sigma_D", "mu_D", "a", "b", "sigma_B", "mu_B", "c"];

    pub fn with_params(&self, p: &[f64]) -> Self {
        HistogramModel {
            f: p[0],
            sigma_d: p[1],
            mu_d: p[2],
            a: p[3],
            b: p[4],
            sigma_b: p[5],
            mu_b: p[6],
            c: p[7],
            ..*self
        }
    }

    pub fn validate(&self) -> Result<(), ImagingError> {
        let bad = |m: &str| Err(ImagingError::BadModel(m.into()));
        if !self.params().iter().all(|v| v.is_finite()) || !self.x_max.is_finite() {
            return bad("non-finite parameter");
        }
        if !(0.0..=1.0).contains(&self.f) {
            return bad("F outside [0, 1]");
        }
        if self.sigma_d <= 0.0 || self.sigma_b <= 0.0 {
            return bad("widths must be positive");
        }
        if self.b <= 0.0 || self.a < 0.0 {
            return bad("need a ≥ 0 and b > 0");
        }
        if self.x_max <= 0.0 {
            return bad("x_max must be positive");
        }
        if let DarkModel::Erlang { n } = self.dark {
            if n == 0 {
                return bad("Erlang order must be at least 1");
            }
        }
        Ok(())
    }

    fn tail(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        match self.dark {
            DarkModel::Exponential => self.a * (-self.b * x).exp(),
            DarkModel::Erlang { n } => {
                if self.a == 0.0 {
                    return 0.0;
                }
                let n = n as f64;
                let ln = (n - 1.0) * x.ln() + n * self.b.ln() - self.b * x - ln_gamma(n);
                if x == 0.0 {
                    return if n == 1.0 { self.a } else { 0.0 };
                }
                self.a / self.b * ln.exp()
            }
        }
    }

    fn tail_mass(&self, hi: f64) -> f64 {
        match self.dark {
            DarkModel::Exponential => self.a / self.b * -(-self.b * hi).exp_m1(),
            DarkModel::Erlang { n } => self.a / self.b * gamma_lr(n as f64, self.b * hi),
        }
    }

    /// Caches the normalization constants.
    pub fn prepare(&self) -> Result<PreparedModel, ImagingError> {
        self.validate()?;
        let zg = gauss_mass(0.0, self.x_max, self.mu_d, self.sigma_d);
        let zt = self.tail_mass(self.x_max);
        let zd = zg + zt;
        let m = *self;
        let zb = integrate(|x| m.bright_raw(x), 0.0, self.x_max, 0.0, 1e-12)?;
        if !(zd > 0.0 && zb > 0.0) {
            return Err(ImagingError::BadModel("a component has no mass on [0, x_max]".into()));
        }
        Ok(PreparedModel { model: *self, zd, zb, dark_gauss_mass: zg, dark_tail_mass: zt })
    }

    fn dark_raw(&self, x: f64) -> f64 {
        gauss(x, self.mu_d, self.sigma_d) + self.tail(x)
    }

    fn bright_raw(&self, x: f64) -> f64 {
        // 1 + erf(z) written as erfc(−z) to keep the lower tail accurate
        let z = self.c * (x - self.mu_b) / (std::f64::consts::SQRT_2 * self.sigma_b);
        gauss(x, self.mu_b, self.sigma_b) * erfc(-z)
    }
}

/// A validated model with its normalization constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PreparedModel {
    pub model: HistogramModel,
    zd: f64,
    zb: f64,
    dark_gauss_mass: f64,
    dark_tail_mass: f64,
}

impl PreparedModel {
    fn inside(&self, x: f64) -> bool {
        (0.0..=self.model.x_max).contains(&x)
    }

    pub fn dark_pdf(&self, x: f64) -> f64 {
        if self.inside(x) {
            self.model.dark_raw(x) / self.zd
        } else {
            0.0
        }
    }

    pub fn bright_pdf(&self, x: f64) -> f64 {
        if self.inside(x) {
            self.model.bright_raw(x) / self.zb
        } else {
            0.0
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        (1.0 - self.model.f) * self.dark_pdf(x) + self.model.f * self.bright_pdf(x)
    }

    /// Dark probability mass above `x` (atom absent, counted as present).
    pub fn dark_above(&self, x: f64) -> Result<f64, ImagingError> {
        let x = x.clamp(0.0, self.model.x_max);
        Ok(integrate(|t| self.dark_pdf(t), x, self.model.x_max, 1e-300, 1e-10)?)
    }

    /// Bright probability mass below `x` (atom present, counted as absent).
    pub fn bright_below(&self, x: f64) -> Result<f64, ImagingError> {
        let x = x.clamp(0.0, self.model.x_max);
        Ok(integrate(|t| self.bright_pdf(t), 0.0, x, 1e-300, 1e-10)?)
    }

    /// Closed form of [`dark_above`](Self::dark_above).
    pub fn dark_above_exact(&self, x: f64) -> f64 {
        let m = &self.model;
        let x = x.clamp(0.0, m.x_max);
        let g = gauss_mass(x, m.x_max, m.mu_d, m.sigma_d);
        let t = self.dark_tail_mass - m.tail_mass(x);
        (g + t) / self.zd
    }

    fn sample_dark<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let m = &self.model;
        let p_gauss = self.dark_gauss_mass / self.zd;
        loop {
            let x = if rng.random::<f64>() < p_gauss {
                let z: f64 = rng.sample(StandardNormal);
                m.mu_d + m.sigma_d * z
            } else {
                match m.dark {
                    DarkModel::Exponential => Exp::new(m.b).expect("b > 0").sample(rng),
                    DarkModel::Erlang { n } => Gamma::new(n as f64, 1.0 / m.b).expect("b > 0").sample(rng),
                }
            };
            if self.inside(x) {
                return x;
            }
        }
    }

    fn sample_bright<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let m = &self.model;
        let delta = m.c / (1.0 + m.c * m.c).sqrt();
        loop {
            let u0: f64 = rng.sample(StandardNormal);
            let v: f64 = rng.sample(StandardNormal);
            let z = delta * u0.abs() + (1.0 - delta * delta).sqrt() * v;
            let x = m.mu_b + m.sigma_b * z;
            if self.inside(x) {
                return x;
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if rng.random::<f64>() < self.model.f {
            self.sample_bright(rng)
        } else {
            self.sample_dark(rng)
        }
    }
}

/// Draws `n` counts from the mixture.
pub fn sample_histogram(model: &HistogramModel, n: usize, seed: u64) -> Result<Vec<f64>, ImagingError> {
    let pm = model.prepare()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n).map(|_| pm.sample(&mut rng)).collect())
}
