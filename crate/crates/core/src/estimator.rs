//! Algebraic estimators of a constant parameter `θ` from a windowed signal.
//!
//! Every estimator here has the shape
//!
//! ```text
//! [θ](t) = ∫₀ᵗ K(τ, t) y(τ) dτ / δ(t),      δ(t) = ∫₀ᵗ K(τ, t) r(τ) dτ
//! ```
//!
//! where `r` is the regressor multiplying `θ` in the signal model and `δ` is
//! the divisor, which vanishes at `t = 0`. The estimation error then obeys
//! `δ(t)([θ](t) − θ) = ∫₀ᵗ K 𝔫`, which for the constant and affine
//! estimators expands into a finite sum of weighted iterated integrals of
//! the noise ([`EstimTerm`]). Windows whose divisor sits within
//! [`EstimatorSpec::epsilon_div`] of zero are rejected.
//!
//! On a grid, kernels are applied as left-sum weights. Polynomial-annihilating
//! kernels use discrete Legendre (Gram) weights, so a polynomial mean of
//! degree `≤ d` is removed to rounding error rather than quadrature error.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::csvfmt;
use crate::error::{argument, Error, Result};
use crate::hypergrid::{eval_estim_term, weighted_integral, GridFunction, GridSpec};
use crate::legendre::{gauss_integrate, gauss_rule, gram_weights, legendre};
use crate::noise::NoiseSpec;

/// Largest accepted annihilation degree and term power/depth.
pub const MAX_DEGREE: usize = 8;

const SCAN_POINTS: usize = 512;
const QUAD_PANELS: usize = 64;
const QUAD_POINTS: usize = 10;

/// A known carrier `s(t)` for amplitude-modulated symbols.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Carrier {
    /// `sin(2π f t + φ)`, `f` in cycles per unit time.
    Sinusoid {
        frequency: f64,
        #[serde(default)]
        phase: f64,
    },
    /// `sinc((t − center) / width)` with `sinc(x) = sin(πx)/(πx)`.
    Sinc { center: f64, width: f64 },
    /// Samples on a fixed grid; linearly interpolated between points.
    #[serde(skip)]
    Sampled(GridFunction),
}

impl Carrier {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Carrier::Sinusoid { frequency, phase } => {
                (std::f64::consts::TAU * frequency * t + phase).sin()
            }
            Carrier::Sinc { center, width } => {
                let x = std::f64::consts::PI * (t - center) / width;
                if x.abs() < 1e-12 {
                    1.0
                } else {
                    x.sin() / x
                }
            }
            Carrier::Sampled(f) => {
                let n = f.n();
                let pos = (t.clamp(0.0, 1.0) * n as f64).min(n as f64);
                let k = (pos.floor() as usize).min(n - 1);
                let frac = pos - k as f64;
                let v = f.values();
                v[k] + frac * (v[k + 1] - v[k])
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Carrier::Sinusoid { frequency, phase } => {
                if !(frequency.is_finite() && phase.is_finite()) {
                    return Err(argument("non-finite sinusoid carrier"));
                }
            }
            Carrier::Sinc { center, width } => {
                if !(center.is_finite() && width.is_finite() && *width > 0.0) {
                    return Err(argument("sinc carrier needs a finite center and positive width"));
                }
            }
            Carrier::Sampled(_) => {}
        }
        Ok(())
    }
}

/// How `θ` enters the noiseless signal.
#[derive(Debug, Clone, PartialEq)]
pub enum SignalModel {
    /// `x = θ`.
    Constant,
    /// `x = b + θ t`; the intercept `b` is a nuisance the kernel removes.
    Affine,
    /// `x = θ s(t)`.
    Carrier(Carrier),
}

impl SignalModel {
    /// The function multiplying `θ`.
    pub fn regressor(&self, t: f64) -> f64 {
        match self {
            SignalModel::Constant => 1.0,
            SignalModel::Affine => t,
            SignalModel::Carrier(c) => c.eval(t),
        }
    }

    fn sampled_on(&self, grid: GridSpec) -> Result<Option<&GridFunction>> {
        match self {
            SignalModel::Carrier(Carrier::Sampled(f)) => {
                if f.spec() != grid {
                    return Err(Error::GridMismatch { left: f.n(), right: grid.n() });
                }
                Ok(Some(f))
            }
            _ => Ok(None),
        }
    }

    /// `θ · r` on the grid (zero intercept for the affine model).
    pub fn signal(&self, theta: f64, grid: GridSpec) -> Result<GridFunction> {
        if let Some(f) = self.sampled_on(grid)? {
            return Ok(f * theta);
        }
        GridFunction::try_from_fn(grid, |t| theta * self.regressor(t))
    }
}

/// A user-supplied kernel `K(τ, t)`.
#[derive(Clone)]
pub struct CustomKernel(pub Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>);

/// Window kernel `K(τ, t)` on `0 ≤ τ < t`.
#[derive(Clone)]
pub enum Kernel {
    /// `K ≡ 1`.
    Unit,
    /// `K = 2τ − t`; annihilates constants.
    Ramp,
    /// `K = P_order(2τ/t − 1)`; annihilates polynomials of degree `< order`.
    Legendre { order: usize },
    Custom(CustomKernel),
}

impl fmt::Debug for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kernel::Unit => write!(f, "Unit"),
            Kernel::Ramp => write!(f, "Ramp"),
            Kernel::Legendre { order } => write!(f, "Legendre {{ order: {order} }}"),
            Kernel::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

impl Kernel {
    pub fn custom(k: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        Kernel::Custom(CustomKernel(Arc::new(k)))
    }

    /// Continuous-time value.
    pub fn eval(&self, tau: f64, t: f64) -> f64 {
        match self {
            Kernel::Unit => 1.0,
            Kernel::Ramp => 2.0 * tau - t,
            Kernel::Legendre { order } => legendre(*order, 2.0 * tau / t - 1.0),
            Kernel::Custom(k) => (k.0)(tau, t),
        }
    }

    /// Highest polynomial degree removed exactly; `-1` for none.
    pub fn annihilation_degree(&self) -> i32 {
        match self {
            Kernel::Unit | Kernel::Custom(_) => -1,
            Kernel::Ramp => 0,
            Kernel::Legendre { order } => *order as i32 - 1,
        }
    }

    /// Left-sum weights for the window `[0, m/n)`.
    ///
    /// The ramp is applied as `2τ − t + 1/n`, its discrete counterpart that
    /// sums to zero over the window's nodes; Legendre kernels use Gram weights.
    pub fn grid_weights(&self, m: usize, grid: GridSpec) -> Result<Vec<f64>> {
        let h = grid.step();
        Ok(match self {
            Kernel::Unit => vec![1.0; m],
            Kernel::Ramp => (0..m).map(|j| (2.0 * j as f64 - m as f64 + 1.0) * h).collect(),
            Kernel::Legendre { order } => gram_weights(*order, m),
            Kernel::Custom(k) => {
                let t = grid.point(m);
                (0..m)
                    .map(|j| {
                        let tau = grid.point(j);
                        let w = (k.0)(tau, t);
                        if w.is_finite() {
                            Ok(w)
                        } else {
                            Err(Error::NonFinite { t: tau, value: w })
                        }
                    })
                    .collect::<Result<_>>()?
            }
        })
    }
}

/// One term `c ∫₀ᵗ (t−τ)^{k−1}/(k−1)! τ^ν 𝔫(τ) dτ` of the error expansion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimTerm {
    pub c: f64,
    pub nu: u32,
    pub k: u32,
}

impl EstimTerm {
    pub fn new(c: f64, nu: u32, k: u32) -> Result<Self> {
        if nu as usize > MAX_DEGREE || k == 0 || k as usize > MAX_DEGREE || !c.is_finite() {
            return Err(argument(format!("invalid term c={c}, nu={nu}, k={k}")));
        }
        Ok(Self { c, nu, k })
    }

    pub fn eval(&self, noise: &GridFunction, t: usize) -> Result<f64> {
        eval_estim_term(self.c, self.nu, self.k, noise, t)
    }
}

/// A linearly identifiable estimator: kernel, signal model and error expansion.
#[derive(Debug, Clone)]
pub struct EstimatorSpec {
    pub name: String,
    pub kernel: Kernel,
    pub model: SignalModel,
    pub residual_terms: Vec<EstimTerm>,
    pub annihilation_degree: i32,
    divisor_scale: f64,
}

impl EstimatorSpec {
    fn assemble(
        name: &str,
        kernel: Kernel,
        model: SignalModel,
        residual_terms: Vec<EstimTerm>,
    ) -> Self {
        let annihilation_degree = kernel.annihilation_degree();
        let mut spec = Self {
            name: name.to_string(),
            kernel,
            model,
            residual_terms,
            annihilation_degree,
            divisor_scale: 0.0,
        };
        spec.divisor_scale = (1..=SCAN_POINTS)
            .map(|i| spec.divisor(i as f64 / SCAN_POINTS as f64).abs())
            .fold(0.0, f64::max);
        spec
    }

    /// `δ(t) = ∫₀ᵗ K(τ, t) r(τ) dτ` in continuous time. Sampled carriers
    /// fall back to the left sum on their own grid.
    pub fn divisor(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match (&self.kernel, &self.model) {
            (Kernel::Unit, SignalModel::Constant) => t,
            (Kernel::Ramp, SignalModel::Affine) => t * t * t / 6.0,
            (_, SignalModel::Carrier(Carrier::Sampled(f))) => {
                let grid = f.spec();
                self.grid_divisor(grid, grid.snap(t)).unwrap_or(0.0)
            }
            _ => {
                thread_local! {
                    static RULE: Vec<(f64, f64)> = gauss_rule(QUAD_POINTS);
                }
                RULE.with(|rule| {
                    gauss_integrate(
                        |tau| self.kernel.eval(tau, t) * self.model.regressor(tau),
                        0.0,
                        t,
                        rule,
                        QUAD_PANELS,
                    )
                })
            }
        }
    }

    /// Largest `|δ|` over a uniform scan of `(0, 1]`.
    pub fn divisor_scale(&self) -> f64 {
        self.divisor_scale
    }

    /// Exclusion threshold `10/n · sup|δ|`: windows with a smaller divisor
    /// are treated as lying on a divisor zero.
    pub fn epsilon_div(&self, grid: GridSpec) -> f64 {
        10.0 * grid.step() * self.divisor_scale
    }

    /// Left-sum divisor on the grid window `[0, m/n)`.
    pub fn grid_divisor(&self, grid: GridSpec, m: usize) -> Result<f64> {
        Ok(self.plan(grid, m)?.divisor)
    }

    /// Precomputes kernel weights and divisor for one window.
    pub fn plan(&self, grid: GridSpec, m: usize) -> Result<WindowPlan> {
        if m > grid.n() {
            return Err(argument(format!("window index {m} beyond grid n = {}", grid.n())));
        }
        let weights = self.kernel.grid_weights(m, grid)?;
        let regressor = match self.model.sampled_on(grid)? {
            Some(f) => f.clone(),
            None => GridFunction::try_from_fn(grid, |t| self.model.regressor(t))?,
        };
        let divisor = weighted_integral(&regressor, &weights)?;
        Ok(WindowPlan { grid, m, weights, divisor, epsilon: self.epsilon_div(grid) })
    }
}

/// Kernel weights and divisor for a fixed grid window, reusable across
/// measurements.
#[derive(Debug, Clone)]
pub struct WindowPlan {
    pub grid: GridSpec,
    pub m: usize,
    pub weights: Vec<f64>,
    pub divisor: f64,
    pub epsilon: f64,
}

impl WindowPlan {
    pub fn t(&self) -> f64 {
        self.grid.point(self.m)
    }

    pub fn near_zero(&self) -> bool {
        self.divisor.abs() < self.epsilon
    }

    /// `∫ K y / δ`, refusing windows on a divisor zero.
    pub fn apply(&self, y: &GridFunction) -> Result<f64> {
        if y.spec() != self.grid {
            return Err(Error::GridMismatch { left: y.n(), right: self.grid.n() });
        }
        if self.m == 0 {
            return Err(argument("estimation window has zero width"));
        }
        if self.near_zero() {
            return Err(Error::DivisorZero {
                t: self.t(),
                divisor: self.divisor,
                epsilon: self.epsilon,
            });
        }
        self.apply_unguarded(y)
    }

    /// `∫ K y / δ` without the divisor-zero exclusion, for probing windows
    /// inside the halo of a zero. Still refuses zero width and `δ = 0`.
    pub fn apply_unguarded(&self, y: &GridFunction) -> Result<f64> {
        if y.spec() != self.grid {
            return Err(Error::GridMismatch { left: y.n(), right: self.grid.n() });
        }
        if self.m == 0 || self.divisor == 0.0 {
            return Err(Error::DivisorZero { t: self.t(), divisor: self.divisor, epsilon: self.epsilon });
        }
        Ok(weighted_integral(y, &self.weights)? / self.divisor)
    }
}

fn unit_terms() -> Vec<EstimTerm> {
    vec![EstimTerm { c: 1.0, nu: 0, k: 1 }]
}

fn ramp_terms() -> Vec<EstimTerm> {
    // ∫(2τ − t)𝔫 = ∫τ𝔫 − ∫∫𝔫, by t∫𝔫 = ∫∫𝔫 + ∫τ𝔫
    vec![EstimTerm { c: 1.0, nu: 1, k: 1 }, EstimTerm { c: -1.0, nu: 0, k: 2 }]
}

/// `y = θ + 𝔫`: the window average, with `δ(t) = t`.
pub fn build_constant_estimator() -> EstimatorSpec {
    EstimatorSpec::assemble("constant", Kernel::Unit, SignalModel::Constant, unit_terms())
}

/// `y = b + θt + 𝔫`: slope with kernel `2τ − t` and `δ(t) = t³/6`,
/// independent of the intercept `b`.
pub fn build_affine_slope_estimator() -> EstimatorSpec {
    EstimatorSpec::assemble("affine-slope", Kernel::Ramp, SignalModel::Affine, ramp_terms())
}

/// `y = θ s(t) + 𝔫` with an arbitrary kernel; `δ(t) = ∫₀ᵗ K s`.
pub fn build_amplitude_estimator(carrier: Carrier, kernel: Kernel) -> Result<EstimatorSpec> {
    carrier.validate()?;
    let terms = match kernel {
        Kernel::Unit => unit_terms(),
        Kernel::Ramp => ramp_terms(),
        _ => Vec::new(),
    };
    Ok(EstimatorSpec::assemble("amplitude", kernel, SignalModel::Carrier(carrier), terms))
}

/// Amplitude estimator whose kernel `P_{d+1}(2τ/t − 1)` removes any additive
/// polynomial of degree `≤ d`.
///
/// Fails when the carrier itself is annihilated, i.e. its divisor vanishes
/// over the whole of `(0, 1]`.
pub fn build_annihilating_estimator(carrier: Carrier, d: usize) -> Result<EstimatorSpec> {
    if d > MAX_DEGREE {
        return Err(argument(format!("annihilation degree {d} exceeds {MAX_DEGREE}")));
    }
    carrier.validate()?;
    let sup_carrier = (0..=SCAN_POINTS)
        .map(|i| carrier.eval(i as f64 / SCAN_POINTS as f64).abs())
        .fold(0.0, f64::max);
    let spec = EstimatorSpec::assemble(
        "annihilating",
        Kernel::Legendre { order: d + 1 },
        SignalModel::Carrier(carrier),
        Vec::new(),
    );
    if spec.divisor_scale <= 1e-9 * sup_carrier || sup_carrier == 0.0 {
        return Err(Error::Construction(format!(
            "carrier is annihilated by the degree-{d} kernel (max |divisor| = {:e})",
            spec.divisor_scale
        )));
    }
    Ok(spec)
}

/// `[θ](t)` at grid index `t`.
pub fn estimate(est: &EstimatorSpec, y: &GridFunction, t: usize) -> Result<f64> {
    if t == 0 {
        return Err(argument("estimation window has zero width"));
    }
    est.plan(y.spec(), t)?.apply(y)
}

/// `|δ(t)([θ](t) − θ) − Σ terms|` for a measurement built from `θ` and `noise`.
pub fn residual_identity_check(
    est: &EstimatorSpec,
    noise: &GridFunction,
    theta: f64,
    t: usize,
) -> Result<f64> {
    if est.residual_terms.is_empty() {
        return Err(argument(format!("estimator `{}` has no error expansion", est.name)));
    }
    let grid = noise.spec();
    let y = &est.model.signal(theta, grid)? + noise;
    let plan = est.plan(grid, t)?;
    let lhs = plan.divisor * (plan.apply(&y)? - theta);
    let rhs: f64 = est
        .residual_terms
        .iter()
        .map(|term| term.eval(noise, t))
        .sum::<Result<f64>>()?;
    Ok((lhs - rhs).abs())
}

/// Zeros of the divisor on `[0, 1]`.
///
/// Sign changes on a `resolution`-point scan are bisected to width below
/// `1/resolution²`; local minima of `|δ|` without a sign change (even-order
/// zeros) are refined by golden-section search and kept when the divisor
/// there is numerically zero. `0` is always included.
pub fn divisor_zeros(est: &EstimatorSpec, resolution: usize) -> Result<Vec<f64>> {
    if resolution < 16 {
        return Err(argument(format!("resolution must be >= 16, got {resolution}")));
    }
    let width = 1.0 / (resolution as f64 * resolution as f64);
    let zero_tol = 1e-9 * est.divisor_scale.max(f64::MIN_POSITIVE);
    let ts: Vec<f64> = (0..=resolution).map(|i| i as f64 / resolution as f64).collect();
    let ds: Vec<f64> = ts.iter().map(|&t| est.divisor(t)).collect();
    let mut zeros = vec![0.0];
    let push = |z: f64, zeros: &mut Vec<f64>| {
        if zeros.iter().all(|&q| (q - z).abs() > 1.0 / resolution as f64) {
            zeros.push(z);
        }
    };
    for i in 1..=resolution {
        let (a, b) = (ds[i - 1], ds[i]);
        if i > 1 && a != 0.0 && b != 0.0 && a.signum() != b.signum() {
            let (mut lo, mut hi, mut f_lo) = (ts[i - 1], ts[i], a);
            while hi - lo >= width {
                let mid = 0.5 * (lo + hi);
                let f_mid = est.divisor(mid);
                if f_mid == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if f_mid.signum() == f_lo.signum() {
                    lo = mid;
                    f_lo = f_mid;
                } else {
                    hi = mid;
                }
            }
            push(0.5 * (lo + hi), &mut zeros);
            continue;
        }
        let left = ds[i - 1].abs();
        let right = if i < resolution { ds[i + 1].abs() } else { f64::INFINITY };
        if ds[i].abs() <= left && ds[i].abs() <= right {
            let hi = if i < resolution { ts[i + 1] } else { ts[i] };
            let z = golden_min(|t| est.divisor(t).abs(), ts[i - 1], hi, width);
            if est.divisor(z).abs() <= zero_tol {
                push(z, &mut zeros);
            }
        }
    }
    zeros.sort_by(|a, b| a.total_cmp(b));
    Ok(zeros)
}

fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, width: f64) -> f64 {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > width {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d);
        }
    }
    // the bracket may end at an endpoint minimum such as t = 1
    let mid = 0.5 * (a + b);
    [a, mid, b].into_iter().min_by(|x, y| f(*x).total_cmp(&f(*y))).unwrap()
}

/// Per-window estimates, errors and divisor values from one noise realization.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct WindowSweepResult {
    pub window_lengths: Vec<f64>,
    pub estimates: Vec<f64>,
    pub abs_errors: Vec<f64>,
    pub divisor_values: Vec<f64>,
    pub near_zero_flags: Vec<bool>,
}

impl WindowSweepResult {
    pub fn len(&self) -> usize {
        self.window_lengths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.window_lengths.is_empty()
    }

    /// CSV with header `t,estimate,abs_error,divisor,near_zero`.
    pub fn to_csv(&self) -> String {
        let mut table = csvfmt::Table::new(&["t", "estimate", "abs_error", "divisor", "near_zero"]);
        for i in 0..self.len() {
            table.row(&[
                csvfmt::real(self.window_lengths[i]),
                csvfmt::real(self.estimates[i]),
                csvfmt::real(self.abs_errors[i]),
                csvfmt::real(self.divisor_values[i]),
                self.near_zero_flags[i].to_string(),
            ]);
        }
        table.into_string()
    }
}

/// A window sweep with kernel weights and divisors precomputed, so many
/// trials can share them.
#[derive(Debug, Clone)]
pub struct WindowSweep {
    est: EstimatorSpec,
    grid: GridSpec,
    plans: Vec<WindowPlan>,
}

impl WindowSweep {
    /// Window lengths must lie in `(0, 1]`; each is floored to a grid index.
    pub fn new(est: &EstimatorSpec, grid: GridSpec, window_lengths: &[f64]) -> Result<Self> {
        let plans = window_lengths
            .par_iter()
            .map(|&t| {
                if !(t > 0.0 && t <= 1.0) {
                    return Err(argument(format!("window length {t} outside (0, 1]")));
                }
                est.plan(grid, grid.snap(t))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { est: est.clone(), grid, plans })
    }

    pub fn plans(&self) -> &[WindowPlan] {
        &self.plans
    }

    pub fn run(&self, theta: f64, noise_spec: &NoiseSpec, trial: u64) -> Result<WindowSweepResult> {
        let (noise, _) = noise_spec.realize(self.grid, trial);
        let y = &self.est.model.signal(theta, self.grid)? + &noise;
        Ok(self.run_on(&y, theta))
    }

    /// Sweeps a given measurement against the true value `theta`.
    pub fn run_on(&self, y: &GridFunction, theta: f64) -> WindowSweepResult {
        let mut out = WindowSweepResult::default();
        for plan in &self.plans {
            let flagged = plan.near_zero();
            let estimate = if flagged { f64::NAN } else { plan.apply(y).unwrap_or(f64::NAN) };
            out.window_lengths.push(plan.t());
            out.estimates.push(estimate);
            out.abs_errors.push((estimate - theta).abs());
            out.divisor_values.push(plan.divisor);
            out.near_zero_flags.push(flagged);
        }
        out
    }
}

/// One sweep over `window_lengths` for noise realization `trial`.
pub fn window_sweep(
    est: &EstimatorSpec,
    theta: f64,
    noise_spec: &NoiseSpec,
    grid: GridSpec,
    window_lengths: &[f64],
    trial: u64,
) -> Result<WindowSweepResult> {
    WindowSweep::new(est, grid, window_lengths)?.run(theta, noise_spec, trial)
}
