//! Deterministic noise generators and the numeric noise test.
//!
//! A noise of mean `m` is a function `n` such that `n − m` is fast
//! oscillating, i.e. its integral over every interval is small. At finite
//! resolution this is checked with [`oscillation_norm`] against an explicit
//! threshold.
//!
//! Random families draw from [`crate::rng::Stream`], so every realization is a
//! pure function of `(seed, trial, index)`.

use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

use crate::error::{argument, Result};
use crate::hypergrid::{integrate, oscillation_norm, GridFunction, GridSpec};
use crate::rng::Stream;

/// Highest degree accepted for a burst mean polynomial.
pub const MAX_BURST_DEGREE: usize = 8;

/// `A sin(2π Ω t + φ)` with `Ω` in cycles per unit time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SinusoidTerm {
    pub amplitude: f64,
    pub frequency: f64,
    #[serde(default)]
    pub phase: f64,
}

/// A finite sum of sinusoids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SinusoidMixSpec {
    pub terms: Vec<SinusoidTerm>,
}

impl SinusoidMixSpec {
    pub fn new(terms: Vec<SinusoidTerm>) -> Result<Self> {
        let spec = Self { terms };
        spec.validate()?;
        Ok(spec)
    }

    pub fn single(amplitude: f64, frequency: f64, phase: f64) -> Self {
        Self { terms: vec![SinusoidTerm { amplitude, frequency, phase }] }
    }

    /// A constant `c` written as `c·sin(0·t + π/2)`.
    pub fn constant(c: f64) -> Self {
        Self::single(c, 0.0, PI / 2.0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.terms.is_empty() {
            return Err(argument("sinusoid mix needs at least one term"));
        }
        for t in &self.terms {
            if !(t.amplitude.is_finite() && t.frequency.is_finite() && t.phase.is_finite()) {
                return Err(argument(format!("non-finite sinusoid term {t:?}")));
            }
        }
        Ok(())
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.terms
            .iter()
            .map(|s| s.amplitude * (TAU * s.frequency * t + s.phase).sin())
            .sum()
    }

    /// `Σ|A|/(π Ω_min) + 2π Σ|A| Ω_max / n`: the closed-form ceiling on the
    /// oscillation norm of the mix (antiderivative bound plus left-sum error).
    /// Infinite when a term has zero frequency.
    pub fn oscillation_bound(&self, n: usize) -> f64 {
        let amp: f64 = self.terms.iter().map(|t| t.amplitude.abs()).sum();
        if amp == 0.0 {
            return 0.0;
        }
        let (lo, hi) = self.terms.iter().filter(|t| t.amplitude != 0.0).fold(
            (f64::INFINITY, 0.0_f64),
            |(lo, hi), t| (lo.min(t.frequency.abs()), hi.max(t.frequency.abs())),
        );
        if lo == 0.0 {
            return f64::INFINITY;
        }
        amp / (PI * lo) + TAU * amp * hi / n as f64
    }
}

/// Centered, unit-variance distributions for independent samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IidFamily {
    /// `±1` with equal probability.
    #[default]
    Rademacher,
    /// Uniform on `[−√3, √3]`.
    Uniform,
    /// Standard normal.
    Gaussian,
}

impl IidFamily {
    #[inline]
    fn sample(self, stream: &Stream, index: u64) -> f64 {
        match self {
            IidFamily::Rademacher => stream.sign(index),
            IidFamily::Uniform => (2.0 * stream.uniform(index, 0) - 1.0) * 3f64.sqrt(),
            IidFamily::Gaussian => stream.normal(index),
        }
    }
}

fn default_scale() -> f64 {
    1.0
}

/// Independent samples `scale · X_k`, with `X_k` drawn from `family`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IidNoiseSpec {
    #[serde(default)]
    pub family: IidFamily,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_scale")]
    pub scale: f64,
}

impl IidNoiseSpec {
    pub fn new(family: IidFamily, seed: u64, scale: f64) -> Result<Self> {
        let spec = Self { family, seed, scale };
        spec.validate()?;
        Ok(spec)
    }

    pub fn rademacher(seed: u64) -> Self {
        Self { family: IidFamily::Rademacher, seed, scale: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.scale.is_finite() && self.scale > 0.0) {
            return Err(argument(format!("iid scale must be positive, got {}", self.scale)));
        }
        Ok(())
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Anything that yields one real per `(trial, index)`.
pub trait DrawSource {
    fn draw(&self, trial: u64, index: u64) -> f64;
}

impl DrawSource for IidNoiseSpec {
    fn draw(&self, trial: u64, index: u64) -> f64 {
        self.scale * self.family.sample(&Stream::new(self.seed, trial), index)
    }
}

/// The fluctuating part of a burst.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BaseNoise {
    Iid(IidNoiseSpec),
    SinusoidMix(SinusoidMixSpec),
}

impl BaseNoise {
    fn validate(&self) -> Result<()> {
        match self {
            BaseNoise::Iid(s) => s.validate(),
            BaseNoise::SinusoidMix(s) => s.validate(),
        }
    }

    fn realize(&self, grid: GridSpec, trial: u64) -> GridFunction {
        match self {
            BaseNoise::Iid(s) => gen_iid(s, grid, trial),
            BaseNoise::SinusoidMix(s) => gen_sinusoid(s, grid),
        }
    }
}

/// A noise whose mean is the polynomial `p(t) = Σ c_j t^j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BurstSpec {
    pub poly_coeffs: Vec<f64>,
    pub base: BaseNoise,
}

impl BurstSpec {
    pub fn new(poly_coeffs: Vec<f64>, base: BaseNoise) -> Result<Self> {
        let spec = Self { poly_coeffs, base };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.poly_coeffs.is_empty() {
            return Err(argument("burst polynomial needs at least one coefficient"));
        }
        if self.poly_coeffs.len() - 1 > MAX_BURST_DEGREE {
            return Err(argument(format!(
                "burst polynomial degree {} exceeds {MAX_BURST_DEGREE}",
                self.poly_coeffs.len() - 1
            )));
        }
        if self.poly_coeffs.iter().any(|c| !c.is_finite()) {
            return Err(argument("non-finite burst coefficient"));
        }
        self.base.validate()
    }

    pub fn degree(&self) -> usize {
        self.poly_coeffs.len() - 1
    }

    /// Evaluates the mean polynomial by Horner's rule.
    pub fn mean_at(&self, t: f64) -> f64 {
        poly_eval(&self.poly_coeffs, t)
    }
}

/// Horner evaluation of ascending-degree coefficients.
pub fn poly_eval(coeffs: &[f64], t: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c)
}

/// Any of the supported noise recipes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum NoiseSpec {
    SinusoidMix(SinusoidMixSpec),
    Iid(IidNoiseSpec),
    Burst(BurstSpec),
}

impl NoiseSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            NoiseSpec::SinusoidMix(s) => s.validate(),
            NoiseSpec::Iid(s) => s.validate(),
            NoiseSpec::Burst(s) => s.validate(),
        }
    }

    /// Realization for `trial` together with its declared mean. Sinusoid
    /// mixes and iid families are declared zero-mean.
    pub fn realize(&self, grid: GridSpec, trial: u64) -> (GridFunction, GridFunction) {
        match self {
            NoiseSpec::SinusoidMix(s) => (gen_sinusoid(s, grid), GridFunction::zeros(grid)),
            NoiseSpec::Iid(s) => (gen_iid(s, grid, trial), GridFunction::zeros(grid)),
            NoiseSpec::Burst(s) => gen_burst(s, grid, trial),
        }
    }

    /// Same recipe with every random seed replaced by `seed`.
    pub fn reseeded(&self, seed: u64) -> NoiseSpec {
        match self {
            NoiseSpec::Iid(s) => NoiseSpec::Iid(s.with_seed(seed)),
            NoiseSpec::Burst(b) => {
                let mut b = b.clone();
                if let BaseNoise::Iid(s) = &mut b.base {
                    s.seed = seed;
                }
                NoiseSpec::Burst(b)
            }
            other => other.clone(),
        }
    }
}

/// `Σ A sin(2π Ω t + φ)` sampled on the grid.
pub fn gen_sinusoid(spec: &SinusoidMixSpec, grid: GridSpec) -> GridFunction {
    GridFunction::from_fn(grid, |t| spec.eval(t))
}

/// `n + 1` independent draws for `trial`.
pub fn gen_iid(spec: &IidNoiseSpec, grid: GridSpec, trial: u64) -> GridFunction {
    let stream = Stream::new(spec.seed, trial);
    let values = (0..=grid.n() as u64)
        .map(|k| spec.scale * spec.family.sample(&stream, k))
        .collect();
    GridFunction::new(grid, values).expect("iid draws are finite")
}

/// Returns `(p + base, p)` where `p` is the burst mean polynomial.
pub fn gen_burst(spec: &BurstSpec, grid: GridSpec, trial: u64) -> (GridFunction, GridFunction) {
    let mean = GridFunction::from_fn(grid, |t| spec.mean_at(t));
    let base = spec.base.realize(grid, trial);
    (&mean + &base, mean)
}

/// `1 + fast`: a multiplicative noise of mean one built from a zero-mean one.
pub fn unit_mean(fast: &GridFunction) -> GridFunction {
    fast.map(|v| 1.0 + v)
}

/// `y = n1 · x + n2`.
pub fn apply_multiplicative(
    x: &GridFunction,
    n1: &GridFunction,
    n2: &GridFunction,
) -> Result<GridFunction> {
    let scaled = n1.zip_with(x, |a, b| a * b)?;
    scaled.zip_with(n2, |a, b| a + b)
}

/// The effective additive noise `y − x`.
pub fn residual_decompose(y: &GridFunction, x: &GridFunction) -> Result<GridFunction> {
    y.zip_with(x, |a, b| a - b)
}

/// Outcome of [`verify_noise`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseCheck {
    pub pass: bool,
    pub norm: f64,
}

/// Checks that `n − m` is fast oscillating at the given threshold.
pub fn verify_noise(n: &GridFunction, m: &GridFunction, threshold: f64) -> Result<NoiseCheck> {
    if threshold.is_nan() || threshold <= 0.0 {
        return Err(argument(format!("threshold must be positive, got {threshold}")));
    }
    let norm = oscillation_norm(&n.zip_with(m, |a, b| a - b)?);
    Ok(NoiseCheck { pass: norm <= threshold, norm })
}

/// Default verification threshold for unit-variance iid noise: `5 √(ln n / n)`.
pub fn iid_threshold(n: usize) -> f64 {
    let n = n as f64;
    5.0 * (n.ln() / n).sqrt()
}

/// `∫ f²` over the whole grid.
pub fn mean_square(f: &GridFunction) -> f64 {
    integrate(&f.map(|v| v * v), 0, f.n()).expect("full range is valid")
}

/// `((t_F − t_I) / n̄) · Σ draw(α)` over integers `α` with
/// `t_I ≤ α / n̄ ≤ t_F`.
///
/// The index range is not capped at 1, so `t_F = n̄²` gives the divergent
/// regime. Samples are streamed, never materialized.
pub fn centlim_statistic(
    source: &impl DrawSource,
    n_bar: u64,
    t_start: f64,
    t_end: f64,
    trial: u64,
) -> Result<f64> {
    if n_bar == 0 {
        return Err(argument("n_bar must be positive"));
    }
    if !(t_start >= 0.0 && t_start < t_end && t_end.is_finite()) {
        return Err(argument(format!("need 0 <= t_I < t_F, got [{t_start}, {t_end}]")));
    }
    let scale = n_bar as f64;
    let lo = (t_start * scale).ceil();
    let hi = (t_end * scale).floor();
    if lo > hi {
        return Err(argument(format!("no sample index in [{t_start}, {t_end}] at n_bar = {n_bar}")));
    }
    let sum: f64 = (lo as u64..=hi as u64).map(|a| source.draw(trial, a)).sum();
    Ok((t_end - t_start) / scale * sum)
}
