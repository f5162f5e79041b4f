//! JSON experiment configuration and its validation.
//!
//! A config names the experiment, the grid resolution, the seed, the trial
//! count and an experiment-specific `params` object. Every omitted field has
//! a default; [`ExperimentConfig::resolve`] fills them in and checks every
//! downstream invariant, producing a [`Resolved`] value that is the only
//! input the runners accept.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::demod::{Alphabet, DemodScenario};
use crate::error::{Error, Result};
use crate::estimator::{
    build_affine_slope_estimator, build_amplitude_estimator, build_annihilating_estimator,
    build_constant_estimator, Carrier, EstimatorSpec, Kernel,
};
use crate::hypergrid::GridSpec;
use crate::noise::{
    BaseNoise, BurstSpec, IidFamily, IidNoiseSpec, NoiseSpec, SinusoidMixSpec, SinusoidTerm,
};
use crate::rng::mix64;

/// The five canonical experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    OscTrend,
    MultReduce,
    WindowSweep,
    Centlim,
    BurstDemod,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 5] = [
        ExperimentKind::OscTrend,
        ExperimentKind::MultReduce,
        ExperimentKind::WindowSweep,
        ExperimentKind::Centlim,
        ExperimentKind::BurstDemod,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::OscTrend => "osc-trend",
            ExperimentKind::MultReduce => "mult-reduce",
            ExperimentKind::WindowSweep => "window-sweep",
            ExperimentKind::Centlim => "centlim",
            ExperimentKind::BurstDemod => "burst-demod",
        }
    }

    fn default_n(self) -> usize {
        match self {
            ExperimentKind::OscTrend | ExperimentKind::MultReduce => 1 << 16,
            _ => 1 << 14,
        }
    }

    fn default_trials(self) -> usize {
        match self {
            ExperimentKind::OscTrend | ExperimentKind::MultReduce => 1,
            ExperimentKind::WindowSweep | ExperimentKind::Centlim => 50,
            ExperimentKind::BurstDemod => 200,
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown experiment `{s}`")))
    }
}

/// The config document as written by a user.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub experiment: Option<ExperimentKind>,
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub trials: Option<usize>,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub params: Option<serde_json::Value>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("config: {e}")))
    }

    /// Fills defaults, applies the seed fallback chain and validates.
    ///
    /// `seed_override` (the `--seed` flag) beats the config's `seed`, which
    /// beats `seed_fallback` (the `ALGESTIM_SEED` variable); the final
    /// fallback is 0.
    pub fn resolve(
        &self,
        kind: ExperimentKind,
        seed_override: Option<u64>,
        seed_fallback: Option<u64>,
    ) -> Result<Resolved> {
        if let Some(declared) = self.experiment {
            if declared != kind {
                return Err(Error::Config(format!(
                    "config is for `{declared}` but `{kind}` was requested"
                )));
            }
        }
        let n = self.n.unwrap_or(kind.default_n());
        let grid = GridSpec::new(n).map_err(config_err)?;
        let trials = self.trials.unwrap_or(kind.default_trials());
        if trials == 0 {
            return Err(Error::Config("trials must be >= 1".into()));
        }
        let seed = seed_override.or(self.seed).or(seed_fallback).unwrap_or(0);
        let raw = self.params.clone().unwrap_or(serde_json::Value::Object(Default::default()));
        let params = match kind {
            ExperimentKind::OscTrend => Params::OscTrend(parse(raw)?),
            ExperimentKind::MultReduce => Params::MultReduce(parse(raw)?),
            ExperimentKind::WindowSweep => Params::WindowSweep(parse(raw)?),
            ExperimentKind::Centlim => Params::Centlim(parse(raw)?),
            ExperimentKind::BurstDemod => Params::BurstDemod(parse(raw)?),
        };
        let resolved = Resolved { kind, grid, seed, trials, output: self.output.clone(), params };
        resolved.validate()?;
        Ok(resolved)
    }
}

fn parse<T: serde::de::DeserializeOwned>(raw: serde_json::Value) -> Result<T> {
    serde_json::from_value(raw).map_err(|e| Error::Config(format!("params: {e}")))
}

fn config_err(e: Error) -> Error {
    match e {
        Error::Config(_) => e,
        other => Error::Config(other.to_string()),
    }
}

fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Config(msg()))
    }
}

fn positive(x: f64, what: &str) -> Result<()> {
    require(x.is_finite() && x > 0.0, || format!("{what} must be positive and finite, got {x}"))
}

/// A noise recipe as written in a config; `zero` and `constant` are
/// shorthands for zero-frequency sinusoids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum NoiseConfig {
    Zero,
    Constant { value: f64 },
    SinusoidMix { terms: Vec<SinusoidTerm> },
    Iid {
        #[serde(default)]
        family: IidFamily,
        #[serde(default = "one")]
        scale: f64,
    },
    Burst { poly_coeffs: Vec<f64>, base: BaseConfig },
}

/// Base (fluctuating) part of a burst in a config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BaseConfig {
    SinusoidMix {
        terms: Vec<SinusoidTerm>,
    },
    Iid {
        #[serde(default)]
        family: IidFamily,
        #[serde(default = "one")]
        scale: f64,
    },
}

fn one() -> f64 {
    1.0
}

impl BaseConfig {
    fn to_base(&self, seed: u64) -> Result<BaseNoise> {
        Ok(match self {
            BaseConfig::SinusoidMix { terms } => {
                BaseNoise::SinusoidMix(SinusoidMixSpec::new(terms.clone())?)
            }
            BaseConfig::Iid { family, scale } => {
                BaseNoise::Iid(IidNoiseSpec::new(*family, seed, *scale)?)
            }
        })
    }
}

impl NoiseConfig {
    pub fn rademacher() -> Self {
        NoiseConfig::Iid { family: IidFamily::Rademacher, scale: 1.0 }
    }

    /// Builds the library spec; random parts draw from `seed`.
    pub fn to_spec(&self, seed: u64) -> Result<NoiseSpec> {
        let spec = match self {
            NoiseConfig::Zero => NoiseSpec::SinusoidMix(SinusoidMixSpec::constant(0.0)),
            NoiseConfig::Constant { value } => {
                NoiseSpec::SinusoidMix(SinusoidMixSpec::constant(*value))
            }
            NoiseConfig::SinusoidMix { terms } => {
                NoiseSpec::SinusoidMix(SinusoidMixSpec::new(terms.clone())?)
            }
            NoiseConfig::Iid { family, scale } => {
                NoiseSpec::Iid(IidNoiseSpec::new(*family, seed, *scale)?)
            }
            NoiseConfig::Burst { poly_coeffs, base } => {
                NoiseSpec::Burst(BurstSpec::new(poly_coeffs.clone(), base.to_base(seed)?)?)
            }
        };
        spec.validate()?;
        Ok(spec)
    }
}

// ---------------------------------------------------------------------------
// osc-trend

/// Noise whose oscillation norm is tracked along a ladder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum OscNoise {
    /// `A sin(2π Ω t + φ)` with `Ω` taken from each ladder rung.
    Sinusoid {
        #[serde(default = "one")]
        amplitude: f64,
        #[serde(default)]
        phase: f64,
    },
    Constant { value: f64 },
    Zero,
    /// Median over trials; the rung's `omega` is ignored.
    Iid {
        #[serde(default)]
        family: IidFamily,
        #[serde(default = "one")]
        scale: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Rung {
    /// Grid resolution; defaults to the config's `n`.
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub omega: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OscTrendParams {
    #[serde(default = "OscTrendParams::default_noise")]
    pub noise: OscNoise,
    #[serde(default = "OscTrendParams::default_ladder")]
    pub ladder: Vec<Rung>,
    /// Each rung's norm must be at most the previous one divided by this.
    #[serde(default = "OscTrendParams::default_factor")]
    pub min_decrease_factor: f64,
}

impl OscTrendParams {
    fn default_noise() -> OscNoise {
        OscNoise::Sinusoid { amplitude: 1.0, phase: 0.0 }
    }
    fn default_ladder() -> Vec<Rung> {
        vec![Rung { n: None, omega: 8.0 }, Rung { n: None, omega: 64.0 }]
    }
    fn default_factor() -> f64 {
        4.0
    }
}

// ---------------------------------------------------------------------------
// mult-reduce

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultReduceParams {
    /// Ascending coefficients of the signal polynomial `x(t)`.
    #[serde(default = "MultReduceParams::default_signal")]
    pub signal: Vec<f64>,
    /// Zero-mean part of the multiplicative noise; `n1 = 1 + n1_fast`.
    #[serde(default = "MultReduceParams::default_n1")]
    pub n1_fast: NoiseConfig,
    #[serde(default = "NoiseConfig::rademacher")]
    pub n2: NoiseConfig,
    #[serde(default = "MultReduceParams::default_threshold")]
    pub threshold: f64,
    /// Resolutions to test; defaults to `[n]`.
    #[serde(default)]
    pub grid_sizes: Option<Vec<usize>>,
}

impl MultReduceParams {
    fn default_signal() -> Vec<f64> {
        vec![1.0, 1.0]
    }
    fn default_n1() -> NoiseConfig {
        NoiseConfig::SinusoidMix {
            terms: vec![SinusoidTerm { amplitude: 1.0, frequency: 512.0, phase: 0.0 }],
        }
    }
    fn default_threshold() -> f64 {
        0.05
    }
}

// ---------------------------------------------------------------------------
// window-sweep

/// Kernel selection for the amplitude estimator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum KernelConfig {
    Unit,
    Ramp,
    Legendre { order: usize },
}

impl KernelConfig {
    fn to_kernel(self) -> Kernel {
        match self {
            KernelConfig::Unit => Kernel::Unit,
            KernelConfig::Ramp => Kernel::Ramp,
            KernelConfig::Legendre { order } => Kernel::Legendre { order },
        }
    }
}

fn default_carrier() -> Carrier {
    Carrier::Sinusoid { frequency: 2.0, phase: 0.0 }
}

fn default_kernel() -> KernelConfig {
    KernelConfig::Unit
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum EstimatorConfig {
    Constant,
    AffineSlope,
    Amplitude {
        #[serde(default = "default_carrier")]
        carrier: Carrier,
        #[serde(default = "default_kernel")]
        kernel: KernelConfig,
    },
    Annihilating {
        #[serde(default = "default_carrier")]
        carrier: Carrier,
        degree: usize,
    },
}

impl EstimatorConfig {
    pub fn build(&self) -> Result<EstimatorSpec> {
        match self {
            EstimatorConfig::Constant => Ok(build_constant_estimator()),
            EstimatorConfig::AffineSlope => Ok(build_affine_slope_estimator()),
            EstimatorConfig::Amplitude { carrier, kernel } => {
                if let KernelConfig::Legendre { order } = kernel {
                    require(*order <= 9, || format!("legendre order {order} exceeds 9"))?;
                }
                build_amplitude_estimator(carrier.clone(), kernel.to_kernel())
            }
            EstimatorConfig::Annihilating { carrier, degree } => {
                build_annihilating_estimator(carrier.clone(), *degree)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Amplification {
    /// Reference band of window lengths away from divisor zeros.
    #[serde(default = "Amplification::default_band")]
    pub band: [f64; 2],
    /// Window length close to a divisor zero.
    #[serde(default = "Amplification::default_probe")]
    pub probe: f64,
    #[serde(default = "Amplification::default_factor")]
    pub min_factor: f64,
}

impl Amplification {
    fn default_band() -> [f64; 2] {
        [0.15, 0.35]
    }
    fn default_probe() -> f64 {
        0.49
    }
    fn default_factor() -> f64 {
        10.0
    }
}

impl Default for Amplification {
    fn default() -> Self {
        Self {
            band: Self::default_band(),
            probe: Self::default_probe(),
            min_factor: Self::default_factor(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SmallWindow {
    /// Width of the short window in grid steps.
    #[serde(default = "SmallWindow::default_points")]
    pub grid_points: usize,
    #[serde(default = "SmallWindow::default_reference")]
    pub reference: f64,
    #[serde(default = "Amplification::default_factor")]
    pub min_factor: f64,
}

impl SmallWindow {
    fn default_points() -> usize {
        8
    }
    fn default_reference() -> f64 {
        0.25
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAssertions {
    #[serde(default)]
    pub amplification: Option<Amplification>,
    #[serde(default)]
    pub small_window: Option<SmallWindow>,
    /// Bound on every unflagged error, in units of `1/n`.
    #[serde(default)]
    pub max_error_grid_units: Option<f64>,
}

impl Default for SweepAssertions {
    fn default() -> Self {
        Self { amplification: Some(Amplification::default()), small_window: None, max_error_grid_units: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowSweepParams {
    #[serde(default = "WindowSweepParams::default_estimator")]
    pub estimator: EstimatorConfig,
    #[serde(default = "one")]
    pub theta: f64,
    #[serde(default = "NoiseConfig::rademacher")]
    pub noise: NoiseConfig,
    /// Defaults to `0.01, 0.02, …, 1.00`; assertion probes are appended.
    #[serde(default)]
    pub window_lengths: Option<Vec<f64>>,
    #[serde(default)]
    pub assertions: SweepAssertions,
}

impl WindowSweepParams {
    fn default_estimator() -> EstimatorConfig {
        EstimatorConfig::Amplitude { carrier: default_carrier(), kernel: KernelConfig::Unit }
    }
}

// ---------------------------------------------------------------------------
// centlim

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Convergent {
    #[serde(default = "Convergent::default_n_bars")]
    pub n_bars: Vec<u64>,
    #[serde(default)]
    pub t_start: f64,
    #[serde(default = "one")]
    pub t_end: f64,
    #[serde(default = "Convergent::default_slope")]
    pub slope_range: [f64; 2],
}

impl Convergent {
    fn default_n_bars() -> Vec<u64> {
        vec![100, 1_000, 10_000]
    }
    fn default_slope() -> [f64; 2] {
        [-0.7, -0.3]
    }
}

impl Default for Convergent {
    fn default() -> Self {
        Self {
            n_bars: Self::default_n_bars(),
            t_start: 0.0,
            t_end: 1.0,
            slope_range: Self::default_slope(),
        }
    }
}

/// `t_F = n̄²`, `t_I = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Divergent {
    #[serde(default = "Divergent::default_n_bars")]
    pub n_bars: Vec<u64>,
    /// Required ratio of the last to the first median.
    #[serde(default = "Divergent::default_growth")]
    pub min_growth: f64,
}

impl Divergent {
    fn default_n_bars() -> Vec<u64> {
        vec![16, 64]
    }
    fn default_growth() -> f64 {
        4.0
    }
}

impl Default for Divergent {
    fn default() -> Self {
        Self { n_bars: Self::default_n_bars(), min_growth: Self::default_growth() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CentlimParams {
    #[serde(default)]
    pub family: IidFamily,
    #[serde(default = "one")]
    pub scale: f64,
    #[serde(default)]
    pub convergent: Convergent,
    #[serde(default)]
    pub divergent: Divergent,
}

// ---------------------------------------------------------------------------
// burst-demod

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DemodAssertions {
    #[serde(default = "DemodAssertions::default_max")]
    pub max_annihilating_ser: f64,
    #[serde(default = "DemodAssertions::default_ratio")]
    pub min_plain_ratio: f64,
    #[serde(default = "DemodAssertions::default_min_plain")]
    pub min_plain_ser: f64,
}

impl DemodAssertions {
    fn default_max() -> f64 {
        0.02
    }
    fn default_ratio() -> f64 {
        5.0
    }
    fn default_min_plain() -> f64 {
        0.05
    }
}

impl Default for DemodAssertions {
    fn default() -> Self {
        Self {
            max_annihilating_ser: Self::default_max(),
            min_plain_ratio: Self::default_ratio(),
            min_plain_ser: Self::default_min_plain(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BurstDemodParams {
    #[serde(default = "default_carrier")]
    pub carrier: Carrier,
    #[serde(default = "BurstDemodParams::default_window")]
    pub window_length: f64,
    #[serde(default = "BurstDemodParams::default_poly")]
    pub burst_poly: Vec<f64>,
    #[serde(default = "BurstDemodParams::default_base")]
    pub base: BaseConfig,
    #[serde(default = "BurstDemodParams::default_alphabet")]
    pub alphabet: Vec<f64>,
    #[serde(default = "BurstDemodParams::default_degree")]
    pub degree: usize,
    #[serde(default)]
    pub assertions: DemodAssertions,
}

impl BurstDemodParams {
    fn default_window() -> f64 {
        0.3
    }
    fn default_poly() -> Vec<f64> {
        vec![0.5, 0.5, 0.5]
    }
    fn default_base() -> BaseConfig {
        BaseConfig::Iid { family: IidFamily::Rademacher, scale: 1.0 }
    }
    fn default_alphabet() -> Vec<f64> {
        vec![-3.0, -1.0, 1.0, 3.0]
    }
    fn default_degree() -> usize {
        2
    }

    /// Scenario for `degree` (`-1` = plain kernel).
    pub fn scenario(&self, trials: usize, seed: u64, degree: i32) -> Result<DemodScenario> {
        Ok(DemodScenario {
            carrier: self.carrier.clone(),
            window_length: self.window_length,
            noise: BurstSpec::new(self.burst_poly.clone(), self.base.to_base(seed)?)?,
            alphabet: Alphabet::new(self.alphabet.clone())?,
            trials,
            estimator_degree: degree,
        })
    }
}

// ---------------------------------------------------------------------------

/// Experiment-specific parameters with every default filled in.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Params {
    OscTrend(OscTrendParams),
    MultReduce(MultReduceParams),
    WindowSweep(WindowSweepParams),
    Centlim(CentlimParams),
    BurstDemod(BurstDemodParams),
}

/// A fully defaulted and validated configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    pub kind: ExperimentKind,
    pub grid: GridSpec,
    pub seed: u64,
    pub trials: usize,
    pub output: Option<PathBuf>,
    pub params: Params,
}

/// Independent sub-seed for one role (noise 1, noise 2, …) within a run.
pub fn sub_seed(seed: u64, role: u64) -> u64 {
    mix64(seed ^ mix64(role.wrapping_add(0x5eed)))
}

impl Resolved {
    /// The config with all defaults materialized, as written next to the CSVs.
    pub fn to_json(&self) -> String {
        let doc = serde_json::json!({
            "experiment": self.kind,
            "n": self.grid.n(),
            "seed": self.seed,
            "trials": self.trials,
            "params": self.params,
        });
        let mut text = serde_json::to_string_pretty(&doc).expect("config serializes");
        text.push('\n');
        text
    }

    fn validate(&self) -> Result<()> {
        self.validate_inner().map_err(config_err)
    }

    fn validate_inner(&self) -> Result<()> {
        match &self.params {
            Params::OscTrend(p) => {
                require(!p.ladder.is_empty(), || "ladder must not be empty".into())?;
                positive(p.min_decrease_factor, "min_decrease_factor")?;
                for rung in &p.ladder {
                    GridSpec::new(rung.n.unwrap_or(self.grid.n()))?;
                    require(rung.omega.is_finite() && rung.omega >= 0.0, || {
                        format!("omega must be finite and >= 0, got {}", rung.omega)
                    })?;
                }
                match p.noise {
                    OscNoise::Sinusoid { amplitude, phase } => {
                        require(amplitude.is_finite() && phase.is_finite(), || {
                            "sinusoid amplitude and phase must be finite".into()
                        })?;
                    }
                    OscNoise::Constant { value } => {
                        require(value.is_finite(), || "constant must be finite".into())?;
                    }
                    OscNoise::Zero => {}
                    OscNoise::Iid { family, scale } => {
                        IidNoiseSpec::new(family, 0, scale)?;
                    }
                }
            }
            Params::MultReduce(p) => {
                require(!p.signal.is_empty(), || "signal needs at least one coefficient".into())?;
                require(p.signal.iter().all(|c| c.is_finite()), || "signal must be finite".into())?;
                p.n1_fast.to_spec(0)?;
                p.n2.to_spec(0)?;
                positive(p.threshold, "threshold")?;
                if let Some(sizes) = &p.grid_sizes {
                    require(!sizes.is_empty(), || "grid_sizes must not be empty".into())?;
                    for &n in sizes {
                        GridSpec::new(n)?;
                    }
                }
            }
            Params::WindowSweep(p) => {
                p.estimator.build()?;
                require(p.theta.is_finite(), || "theta must be finite".into())?;
                p.noise.to_spec(0)?;
                if let Some(ws) = &p.window_lengths {
                    require(!ws.is_empty(), || "window_lengths must not be empty".into())?;
                    for &t in ws {
                        require(t > 0.0 && t <= 1.0, || format!("window length {t} outside (0, 1]"))?;
                    }
                }
                let a = &p.assertions;
                if let Some(amp) = &a.amplification {
                    let [lo, hi] = amp.band;
                    require(lo > 0.0 && lo < hi && hi <= 1.0, || {
                        format!("amplification band [{lo}, {hi}] invalid")
                    })?;
                    require(amp.probe > 0.0 && amp.probe <= 1.0, || {
                        format!("probe {} outside (0, 1]", amp.probe)
                    })?;
                    positive(amp.min_factor, "amplification min_factor")?;
                }
                if let Some(sw) = &a.small_window {
                    require(sw.grid_points >= 1 && sw.grid_points <= self.grid.n(), || {
                        format!("small window of {} points does not fit the grid", sw.grid_points)
                    })?;
                    require(sw.reference > 0.0 && sw.reference <= 1.0, || {
                        format!("reference {} outside (0, 1]", sw.reference)
                    })?;
                    positive(sw.min_factor, "small_window min_factor")?;
                }
                if let Some(bound) = a.max_error_grid_units {
                    positive(bound, "max_error_grid_units")?;
                }
            }
            Params::Centlim(p) => {
                IidNoiseSpec::new(p.family, 0, p.scale)?;
                let c = &p.convergent;
                require(c.n_bars.len() >= 2, || "convergent regime needs >= 2 n_bars".into())?;
                require(c.n_bars.iter().all(|&n| n > 0), || "n_bar must be positive".into())?;
                require(c.t_start >= 0.0 && c.t_start < c.t_end && c.t_end.is_finite(), || {
                    format!("need 0 <= t_start < t_end, got [{}, {}]", c.t_start, c.t_end)
                })?;
                for &nb in &c.n_bars {
                    let lo = (c.t_start * nb as f64).ceil();
                    let hi = (c.t_end * nb as f64).floor();
                    require(lo <= hi, || format!("no samples in the window at n_bar = {nb}"))?;
                }
                let [lo, hi] = c.slope_range;
                require(lo.is_finite() && hi.is_finite() && lo <= hi, || {
                    format!("slope range [{lo}, {hi}] invalid")
                })?;
                let d = &p.divergent;
                require(d.n_bars.len() >= 2, || "divergent regime needs >= 2 n_bars".into())?;
                require(d.n_bars.iter().all(|&n| n > 0 && n <= 1024), || {
                    "divergent n_bar must be in 1..=1024 (n_bar³ samples per trial)".into()
                })?;
                positive(d.min_growth, "min_growth")?;
            }
            Params::BurstDemod(p) => {
                let scenario = p.scenario(self.trials, 0, p.degree as i32)?;
                scenario.validate()?;
                scenario.estimator()?;
                let a = &p.assertions;
                require((0.0..=1.0).contains(&a.max_annihilating_ser), || {
                    "max_annihilating_ser must be in [0, 1]".into()
                })?;
                require((0.0..=1.0).contains(&a.min_plain_ser), || {
                    "min_plain_ser must be in [0, 1]".into()
                })?;
                require(a.min_plain_ratio.is_finite() && a.min_plain_ratio >= 0.0, || {
                    "min_plain_ratio must be finite and >= 0".into()
                })?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn resolve(kind: ExperimentKind, json: &str) -> Result<Resolved> {
        ExperimentConfig::from_json(json)?.resolve(kind, None, None)
    }

    #[test]
    fn empty_config_resolves_for_every_experiment() {
        for kind in ExperimentKind::ALL {
            let r = resolve(kind, "{}").unwrap();
            assert_eq!(r.kind, kind);
            assert_eq!(r.seed, 0);
            let text = r.to_json();
            assert!(text.contains(&format!("\"experiment\": \"{kind}\"")), "{text}");
        }
    }

    #[test]
    fn seed_precedence() {
        let cfg = ExperimentConfig::from_json(r#"{"seed": 5}"#).unwrap();
        let k = ExperimentKind::Centlim;
        assert_eq!(cfg.resolve(k, Some(9), Some(1)).unwrap().seed, 9);
        assert_eq!(cfg.resolve(k, None, Some(1)).unwrap().seed, 5);
        let bare = ExperimentConfig::default();
        assert_eq!(bare.resolve(k, None, Some(1)).unwrap().seed, 1);
    }

    #[test]
    fn mismatched_experiment_is_rejected() {
        let err = resolve(ExperimentKind::Centlim, r#"{"experiment": "osc-trend"}"#).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }

    #[test]
    fn unknown_fields_are_rejected() {
        assert!(resolve(ExperimentKind::Centlim, r#"{"bogus": 1}"#).is_err());
        assert!(resolve(ExperimentKind::Centlim, r#"{"params": {"bogus": 1}}"#).is_err());
    }

    #[test]
    fn invalid_values_are_config_errors() {
        let cases = [
            (ExperimentKind::OscTrend, r#"{"n": 1}"#),
            (ExperimentKind::OscTrend, r#"{"params": {"ladder": []}}"#),
            (ExperimentKind::MultReduce, r#"{"params": {"threshold": 0}}"#),
            (ExperimentKind::MultReduce, r#"{"params": {"n2": {"kind": "iid", "scale": -1}}}"#),
            (ExperimentKind::WindowSweep, r#"{"params": {"window_lengths": [0.5, 1.5]}}"#),
            (ExperimentKind::WindowSweep, r#"{"params": {"estimator": {"kind": "annihilating", "degree": 12}}}"#),
            (ExperimentKind::Centlim, r#"{"params": {"divergent": {"n_bars": [16, 4096]}}}"#),
            (ExperimentKind::BurstDemod, r#"{"params": {"alphabet": [1, 0]}}"#),
            (ExperimentKind::BurstDemod, r#"{"params": {"window_length": 0}}"#),
            (ExperimentKind::BurstDemod, r#"{"trials": 0}"#),
        ];
        for (kind, json) in cases {
            let err = resolve(kind, json).unwrap_err();
            assert!(matches!(err, Error::Config(_)), "{json}: {err:?}");
        }
    }

    #[test]
    fn experiment_names_parse() {
        for kind in ExperimentKind::ALL {
            assert_eq!(kind.name().parse::<ExperimentKind>().unwrap(), kind);
        }
        assert!("nope".parse::<ExperimentKind>().is_err());
    }
}
