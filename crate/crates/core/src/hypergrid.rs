//! Uniform grids over `[0, 1]` standing in for a hyperfinite time axis.
//!
//! A grid of resolution `n` has the points `k/n`, `k = 0..=n`. Every point
//! except the right endpoint carries the measure `1/n`, so all integrals are
//! left Riemann sums accumulated in ascending index order. "Small" at finite
//! `n` is never absolute: it is either a trend under refinement or a
//! comparison against an explicit tolerance.

use std::io::{BufRead, Write};
use std::ops::{Add, Mul, Sub};

use crate::csvfmt;
use crate::error::{argument, Error, Result};

/// Resolution of a uniform grid on `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct GridSpec {
    n: usize,
}

impl GridSpec {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(argument(format!("grid resolution must be >= 2, got {n}")));
        }
        Ok(Self { n })
    }

    /// `GridSpec::new(1 << log2)`.
    pub fn pow2(log2: u32) -> Self {
        Self::new(1usize << log2).expect("2^k >= 2")
    }

    /// Number of intervals; there are `n + 1` points.
    pub fn n(&self) -> usize {
        self.n
    }

    /// The measure carried by each point, `1/n`.
    pub fn step(&self) -> f64 {
        1.0 / self.n as f64
    }

    pub fn point(&self, k: usize) -> f64 {
        k as f64 / self.n as f64
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.n).map(move |k| self.point(k))
    }

    /// Largest grid index whose point does not exceed `t` (clamped to the grid).
    pub fn snap(&self, t: f64) -> usize {
        let k = (t * self.n as f64).floor();
        if k <= 0.0 {
            0
        } else {
            (k as usize).min(self.n)
        }
    }

    fn check_index(&self, k: usize) -> Result<()> {
        if k > self.n {
            return Err(argument(format!("grid index {k} outside 0..={}", self.n)));
        }
        Ok(())
    }
}

impl TryFrom<usize> for GridSpec {
    type Error = Error;

    fn try_from(n: usize) -> Result<Self> {
        Self::new(n)
    }
}

impl From<GridSpec> for usize {
    fn from(g: GridSpec) -> usize {
        g.n
    }
}

/// A real function sampled at every point of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    spec: GridSpec,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(spec: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != spec.n + 1 {
            return Err(argument(format!(
                "expected {} samples for n = {}, got {}",
                spec.n + 1,
                spec.n,
                values.len()
            )));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { t: spec.point(k), value: values[k] });
        }
        Ok(Self { spec, values })
    }

    /// Samples `f` at every grid point. Panics if `f` returns a non-finite value.
    pub fn from_fn(spec: GridSpec, f: impl Fn(f64) -> f64) -> Self {
        Self::try_from_fn(spec, f).expect("sampled function must be finite")
    }

    pub fn try_from_fn(spec: GridSpec, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(spec, spec.points().map(f).collect())
    }

    pub fn constant(spec: GridSpec, c: f64) -> Self {
        Self::from_fn(spec, |_| c)
    }

    pub fn zeros(spec: GridSpec) -> Self {
        Self::constant(spec, 0.0)
    }

    pub fn spec(&self) -> GridSpec {
        self.spec
    }

    pub fn n(&self) -> usize {
        self.spec.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn same_grid(&self, other: &GridFunction) -> Result<()> {
        if self.spec != other.spec {
            return Err(Error::GridMismatch { left: self.spec.n, right: other.spec.n });
        }
        Ok(())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> GridFunction {
        GridFunction { spec: self.spec, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    /// Pointwise combination of two functions on the same grid.
    pub fn zip_with(
        &self,
        other: &GridFunction,
        f: impl Fn(f64, f64) -> f64,
    ) -> Result<GridFunction> {
        self.same_grid(other)?;
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Ok(GridFunction { spec: self.spec, values })
    }

    /// Multiplies pointwise by `phi` sampled on this grid.
    pub fn modulate(&self, phi: impl Fn(f64) -> f64) -> GridFunction {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(k, &v)| v * phi(self.spec.point(k)))
            .collect();
        GridFunction { spec: self.spec, values }
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Writes the `t,value` CSV form, one row per grid point.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let mut table = csvfmt::Table::new(&["t", "value"]);
        for (k, &v) in self.values.iter().enumerate() {
            table.row(&[csvfmt::real(self.spec.point(k)), csvfmt::real(v)]);
        }
        out.write_all(table.as_str().as_bytes())?;
        Ok(())
    }

    /// Reads the `t,value` CSV form. The resolution is inferred from the row
    /// count and every `t` column must sit on that grid.
    pub fn read_csv<R: BufRead>(input: R) -> Result<GridFunction> {
        let mut lines = input.lines();
        let header = lines.next().transpose()?.unwrap_or_default();
        if header.trim() != "t,value" {
            return Err(argument(format!("expected header `t,value`, got `{header}`")));
        }
        let mut ts = Vec::new();
        let mut values = Vec::new();
        for (row, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let (t, v) = line
                .split_once(',')
                .ok_or_else(|| argument(format!("row {row}: expected two fields")))?;
            let parse = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| argument(format!("row {row}: {e}: `{s}`")))
            };
            ts.push(parse(t)?);
            values.push(parse(v)?);
        }
        if values.len() < 3 {
            return Err(argument("a grid function needs at least 3 rows"));
        }
        let spec = GridSpec::new(values.len() - 1)?;
        for (k, &t) in ts.iter().enumerate() {
            if (t - spec.point(k)).abs() > 1e-12 {
                return Err(argument(format!("row {k}: t = {t} is not grid point {k}/{}", spec.n)));
            }
        }
        GridFunction::new(spec, values)
    }
}

impl Add for &GridFunction {
    type Output = GridFunction;

    /// Panics on a grid mismatch; use [`GridFunction::zip_with`] to get an error instead.
    fn add(self, rhs: &GridFunction) -> GridFunction {
        self.zip_with(rhs, |a, b| a + b).expect("grid mismatch in add")
    }
}

impl Sub for &GridFunction {
    type Output = GridFunction;

    fn sub(self, rhs: &GridFunction) -> GridFunction {
        self.zip_with(rhs, |a, b| a - b).expect("grid mismatch in sub")
    }
}

impl Mul<f64> for &GridFunction {
    type Output = GridFunction;

    fn mul(self, rhs: f64) -> GridFunction {
        self.map(|v| v * rhs)
    }
}

/// `Σ_{a ≤ k < b} f(k/n) / n`. The right endpoint of the grid carries no mass.
pub fn integrate(f: &GridFunction, a: usize, b: usize) -> Result<f64> {
    f.spec.check_index(b)?;
    if a > b {
        return Err(argument(format!("integration bounds reversed: {a} > {b}")));
    }
    let sum: f64 = f.values[a..b].iter().sum();
    Ok(sum * f.spec.step())
}

/// Left-sum integral of `weights[j] * f(j/n)` over `j < weights.len()`.
pub fn weighted_integral(f: &GridFunction, weights: &[f64]) -> Result<f64> {
    f.spec.check_index(weights.len())?;
    let sum: f64 = weights.iter().zip(&f.values).map(|(w, v)| w * v).sum();
    Ok(sum * f.spec.step())
}

/// Largest `|∫_A f|` over intervals `A` of the grid.
///
/// Equals the spread of the prefix sums (the empty prefix included), which
/// is linear in `n`.
pub fn oscillation_norm(f: &GridFunction) -> f64 {
    let mut acc = 0.0_f64;
    let (mut lo, mut hi) = (0.0_f64, 0.0_f64);
    for &v in &f.values[..f.spec.n] {
        acc += v;
        lo = lo.min(acc);
        hi = hi.max(acc);
    }
    (hi - lo) * f.spec.step()
}

/// `Σ_{k' < t} kernel(k'/n, t/n) f(k'/n) / n`.
pub fn kernel_integral(
    f: &GridFunction,
    kernel: impl Fn(f64, f64) -> f64,
    t: usize,
) -> Result<f64> {
    f.spec.check_index(t)?;
    let t_real = f.spec.point(t);
    let mut sum = 0.0;
    for (j, &v) in f.values[..t].iter().enumerate() {
        let tau = f.spec.point(j);
        let w = kernel(tau, t_real);
        if !w.is_finite() {
            return Err(Error::NonFinite { t: tau, value: w });
        }
        sum += w * v;
    }
    Ok(sum * f.spec.step())
}

fn factorial(k: u32) -> f64 {
    (1..=k).map(f64::from).product()
}

fn check_depth(k: u32) -> Result<()> {
    if k == 0 {
        return Err(argument("iterated integral depth must be >= 1"));
    }
    if k > 8 {
        return Err(argument(format!("iterated integral depth {k} exceeds 8")));
    }
    Ok(())
}

/// k-fold iterated integral `∫₀ᵗ…∫₀^{τ₂} f`, collapsed by the Cauchy formula
/// into the single kernel `(t − τ)^{k−1} / (k−1)!`.
pub fn iterated_integral(f: &GridFunction, k: u32, t: usize) -> Result<f64> {
    eval_estim_term(1.0, 0, k, f, t)
}

/// `c ∫₀ᵗ (t − τ)^{k−1}/(k−1)! · τ^ν · f(τ) dτ`: one term of the error
/// expansion of an algebraic estimator.
pub fn eval_estim_term(c: f64, nu: u32, k: u32, f: &GridFunction, t: usize) -> Result<f64> {
    check_depth(k)?;
    if nu > 8 {
        return Err(argument(format!("power nu = {nu} exceeds 8")));
    }
    let norm = factorial(k - 1);
    let integral = kernel_integral(
        f,
        |tau, t| (t - tau).powi(k as i32 - 1) / norm * tau.powi(nu as i32),
        t,
    )?;
    Ok(c * integral)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid(n: usize) -> GridSpec {
        GridSpec::new(n).unwrap()
    }

    #[test]
    fn grid_spec_rejects_tiny_resolution() {
        assert!(GridSpec::new(1).is_err());
        assert!(GridSpec::new(0).is_err());
        assert_eq!(GridSpec::new(2).unwrap().step(), 0.5);
    }

    #[test]
    fn grid_function_rejects_bad_samples() {
        let g = grid(4);
        assert!(GridFunction::new(g, vec![0.0; 4]).is_err());
        let err = GridFunction::new(g, vec![0.0, 1.0, f64::NAN, 0.0, 0.0]).unwrap_err();
        assert!(matches!(err, Error::NonFinite { t, .. } if t == 0.5));
    }

    #[test]
    fn integrate_examples() {
        let g = grid(4);
        let one = GridFunction::constant(g, 1.0);
        assert_eq!(integrate(&one, 0, 4).unwrap(), 1.0);
        assert_eq!(integrate(&one, 2, 2).unwrap(), 0.0);
        let ramp = GridFunction::from_fn(g, |t| t);
        assert_eq!(integrate(&ramp, 0, 4).unwrap(), 0.375);
        assert!(integrate(&one, 0, 5).is_err());
        assert!(integrate(&one, 3, 2).is_err());
    }

    #[test]
    fn oscillation_norm_examples() {
        let g = grid(1024);
        assert_eq!(oscillation_norm(&GridFunction::zeros(g)), 0.0);
        assert_eq!(oscillation_norm(&GridFunction::constant(g, 1.0)), 1.0);
        // a negative excursion followed by a positive one
        let f = GridFunction::new(grid(4), vec![-1.0, -1.0, 3.0, 0.0, 7.0]).unwrap();
        assert_eq!(oscillation_norm(&f), 3.0 / 4.0);
    }

    #[test]
    fn oscillation_norm_sinusoid_bound() {
        let n = 1 << 16;
        let g = grid(n);
        for omega in [8.0, 64.0] {
            let f = GridFunction::from_fn(g, |t| (2.0 * PI * omega * t).sin());
            let bound = 1.0 / (PI * omega) + 2.0 * PI * omega / n as f64;
            let v = oscillation_norm(&f);
            assert!(v <= bound, "omega {omega}: {v} > {bound}");
        }
    }

    #[test]
    fn iterated_integral_examples() {
        let n = 1024;
        let one = GridFunction::constant(grid(n), 1.0);
        let h = 1.0 / n as f64;
        assert!((iterated_integral(&one, 2, n).unwrap() - 0.5).abs() <= 2.0 * h);
        assert!((iterated_integral(&one, 1, n).unwrap() - 1.0).abs() <= h);
        assert!(iterated_integral(&one, 0, n).is_err());
        assert!(iterated_integral(&one, 9, n).is_err());
    }

    #[test]
    fn kernel_integral_examples() {
        let n = 512;
        let g = grid(n);
        let h = 1.0 / n as f64;
        let f = GridFunction::from_fn(g, |t| (7.0 * t).cos());
        for t in [0, 1, 100, n] {
            assert_eq!(kernel_integral(&f, |_, _| 1.0, t).unwrap(), integrate(&f, 0, t).unwrap());
        }
        let cauchy = |tau: f64, t: f64| (t - tau).powi(2) / 2.0;
        assert_eq!(
            kernel_integral(&f, cauchy, 300).unwrap(),
            iterated_integral(&f, 3, 300).unwrap()
        );
        let one = GridFunction::constant(g, 1.0);
        for t in [10, 256, n] {
            assert!(kernel_integral(&one, |tau, t| 2.0 * tau - t, t).unwrap().abs() <= 2.0 * h);
        }
    }

    #[test]
    fn kernel_integral_reports_non_finite_kernel() {
        let one = GridFunction::constant(grid(8), 1.0);
        let err = kernel_integral(&one, |tau, _| 1.0 / (tau - 0.25), 8).unwrap_err();
        assert!(matches!(err, Error::NonFinite { t, .. } if t == 0.25));
    }

    #[test]
    fn estim_term_examples() {
        let n = 2048;
        let one = GridFunction::constant(grid(n), 1.0);
        let h = 1.0 / n as f64;
        assert!((eval_estim_term(1.0, 0, 1, &one, n).unwrap() - 1.0).abs() <= h);
        assert!((eval_estim_term(1.0, 1, 1, &one, n).unwrap() - 0.5).abs() <= 2.0 * h);
        assert!((eval_estim_term(-1.0, 0, 2, &one, n).unwrap() + 0.5).abs() <= 2.0 * h);
        assert!(eval_estim_term(1.0, 9, 1, &one, n).is_err());
    }

    #[test]
    fn csv_round_trip_and_header() {
        let f = GridFunction::from_fn(grid(16), |t| (3.0 * t).exp() / 7.0);
        let mut buf = Vec::new();
        f.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("t,value\n0.0000000000000000e0,"));
        assert!(!text.contains('\r'));
        let back = GridFunction::read_csv(buf.as_slice()).unwrap();
        assert_eq!(back, f);
        assert!(GridFunction::read_csv("x,y\n0,1\n".as_bytes()).is_err());
    }

    #[test]
    fn snap_floors_to_grid() {
        let g = grid(100);
        assert_eq!(g.snap(0.499), 49);
        assert_eq!(g.snap(0.5), 50);
        assert_eq!(g.snap(2.0), 100);
        assert_eq!(g.snap(-1.0), 0);
    }
}
