use rayon::prelude::*;

use super::config::{sub_seed, OscNoise, Params, Resolved};
use super::{median, Check, Extras};
use crate::csvfmt::{real, Table};
use crate::demod::symbol_error_rate;
use crate::error::Result;
use crate::estimator::{WindowSweep, WindowSweepResult};
use crate::hypergrid::{oscillation_norm, GridFunction, GridSpec};
use crate::noise::{
    apply_multiplicative, centlim_statistic, gen_iid, gen_sinusoid, poly_eval, residual_decompose,
    unit_mean, verify_noise, IidNoiseSpec, SinusoidMixSpec,
};

type Output = (String, Extras);

pub(super) fn osc_trend(r: &Resolved) -> Result<Output> {
    let Params::OscTrend(p) = &r.params else { unreachable!() };
    let mut table = Table::new(&["n", "omega", "osc_norm"]);
    let mut norms = Vec::with_capacity(p.ladder.len());
    for rung in &p.ladder {
        let grid = GridSpec::new(rung.n.unwrap_or(r.grid.n()))?;
        let norm = match p.noise {
            OscNoise::Sinusoid { amplitude, phase } => {
                oscillation_norm(&gen_sinusoid(&SinusoidMixSpec::single(amplitude, rung.omega, phase), grid))
            }
            OscNoise::Constant { value } => {
                oscillation_norm(&gen_sinusoid(&SinusoidMixSpec::constant(value), grid))
            }
            OscNoise::Zero => 0.0,
            OscNoise::Iid { family, scale } => {
                let spec = IidNoiseSpec::new(family, r.seed, scale)?;
                let per_trial: Vec<f64> = (0..r.trials as u64)
                    .into_par_iter()
                    .map(|trial| oscillation_norm(&gen_iid(&spec, grid, trial)))
                    .collect();
                median(&per_trial)
            }
        };
        table.row(&[grid.n().to_string(), real(rung.omega), real(norm)]);
        norms.push(norm);
    }
    let checks = norms
        .windows(2)
        .enumerate()
        .map(|(i, w)| Check {
            name: format!("decrease_row_{}", i + 1),
            value: w[0] / w[1],
            threshold: p.min_decrease_factor,
            pass: w[1] * p.min_decrease_factor <= w[0],
        })
        .collect();
    Ok((table.into_string(), Extras { files: vec![], checks }))
}

pub(super) fn mult_reduce(r: &Resolved) -> Result<Output> {
    let Params::MultReduce(p) = &r.params else { unreachable!() };
    let n1_spec = p.n1_fast.to_spec(sub_seed(r.seed, 1))?;
    let n2_spec = p.n2.to_spec(sub_seed(r.seed, 2))?;
    let sizes = p.grid_sizes.clone().unwrap_or_else(|| vec![r.grid.n()]);
    let mut table = Table::new(&["n", "osc_norm", "threshold", "pass"]);
    let mut checks = Vec::new();
    for &n in &sizes {
        let grid = GridSpec::new(n)?;
        let x = GridFunction::from_fn(grid, |t| poly_eval(&p.signal, t));
        let rows: Vec<f64> = (0..r.trials as u64)
            .into_par_iter()
            .map(|trial| {
                let (fast, fast_mean) = n1_spec.realize(grid, trial);
                let (n2, n2_mean) = n2_spec.realize(grid, trial);
                let y = apply_multiplicative(&x, &unit_mean(&fast), &n2)?;
                let residual = residual_decompose(&y, &x)?;
                let mean = x.zip_with(&fast_mean, |a, b| a * b)?.zip_with(&n2_mean, |a, b| a + b)?;
                Ok(verify_noise(&residual, &mean, p.threshold)?.norm)
            })
            .collect::<Result<_>>()?;
        for (trial, &norm) in rows.iter().enumerate() {
            let check = Check::at_most(format!("n{n}_trial{trial}"), norm, p.threshold);
            table.row(&[n.to_string(), real(norm), real(p.threshold), check.pass.to_string()]);
            checks.push(check);
        }
    }
    Ok((table.into_string(), Extras { files: vec![], checks }))
}

pub(super) fn window_sweep(r: &Resolved) -> Result<Output> {
    let Params::WindowSweep(p) = &r.params else { unreachable!() };
    let grid = r.grid;
    let est = p.estimator.build()?;
    let noise = p.noise.to_spec(r.seed)?;
    let mut lengths = p
        .window_lengths
        .clone()
        .unwrap_or_else(|| (1..=100).map(|i| i as f64 / 100.0).collect());
    let a = &p.assertions;
    let mut probes = Vec::new();
    if let Some(amp) = &a.amplification {
        probes.push(amp.probe);
    }
    for t in probes {
        if !lengths.iter().any(|&l| grid.snap(l) == grid.snap(t)) {
            lengths.push(t);
        }
    }

    let sweep = WindowSweep::new(&est, grid, &lengths)?;
    let runs: Vec<WindowSweepResult> = (0..r.trials as u64)
        .into_par_iter()
        .map(|trial| sweep.run(p.theta, &noise, trial))
        .collect::<Result<_>>()?;

    let mut agg = WindowSweepResult::default();
    for (i, plan) in sweep.plans().iter().enumerate() {
        let flagged = plan.near_zero();
        let column = |f: fn(&WindowSweepResult) -> &Vec<f64>| -> Vec<f64> {
            runs.iter().map(|run| f(run)[i]).collect()
        };
        let (estimate, error) = if flagged {
            (f64::NAN, f64::NAN)
        } else {
            (median(&column(|x| &x.estimates)), median(&column(|x| &x.abs_errors)))
        };
        agg.window_lengths.push(plan.t());
        agg.estimates.push(estimate);
        agg.abs_errors.push(error);
        agg.divisor_values.push(plan.divisor);
        agg.near_zero_flags.push(flagged);
    }

    let error_at = |t: f64| -> f64 {
        let m = grid.snap(t);
        sweep
            .plans()
            .iter()
            .position(|plan| plan.m == m)
            .map_or(f64::NAN, |i| agg.abs_errors[i])
    };
    let mut checks = Vec::new();
    if let Some(amp) = &a.amplification {
        let [lo, hi] = amp.band;
        let band: Vec<f64> = (0..agg.len())
            .filter(|&i| agg.window_lengths[i] >= lo && agg.window_lengths[i] <= hi)
            .map(|i| agg.abs_errors[i])
            .collect();
        let ratio = error_at(amp.probe) / median(&band);
        checks.push(Check::at_least("amplification", ratio, amp.min_factor));
    }
    if let Some(sw) = &a.small_window {
        // the short window sits in the halo of the zero at t = 0, so the
        // sweep flags it; probe it without the exclusion
        let short = est.plan(grid, sw.grid_points)?;
        let reference = est.plan(grid, grid.snap(sw.reference))?;
        let signal = est.model.signal(p.theta, grid)?;
        let pairs: Vec<(f64, f64)> = (0..r.trials as u64)
            .into_par_iter()
            .map(|trial| {
                let y = &signal + &noise.realize(grid, trial).0;
                let e_short = (short.apply_unguarded(&y)? - p.theta).abs();
                let e_ref = (reference.apply_unguarded(&y)? - p.theta).abs();
                Ok((e_short, e_ref))
            })
            .collect::<Result<_>>()?;
        let (shorts, refs): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let ratio = median(&shorts) / median(&refs);
        checks.push(Check::at_least("small_window", ratio, sw.min_factor));
    }
    if let Some(units) = a.max_error_grid_units {
        let worst = runs
            .iter()
            .flat_map(|run| {
                run.abs_errors.iter().zip(&run.near_zero_flags).filter(|(_, &f)| !f).map(|(e, _)| *e)
            })
            .fold(0.0, f64::max);
        checks.push(Check::at_most("max_error", worst, units * grid.step()));
    }
    Ok((agg.to_csv(), Extras { files: vec![], checks }))
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

pub(super) fn centlim(r: &Resolved) -> Result<Output> {
    let Params::Centlim(p) = &r.params else { unreachable!() };
    let source = IidNoiseSpec::new(p.family, r.seed, p.scale)?;
    let medians = |n_bar: u64, t_start: f64, t_end: f64| -> Result<f64> {
        let stats: Vec<f64> = (0..r.trials as u64)
            .into_par_iter()
            .map(|trial| centlim_statistic(&source, n_bar, t_start, t_end, trial).map(f64::abs))
            .collect::<Result<_>>()?;
        Ok(median(&stats))
    };

    let mut table = Table::new(&["regime", "n_bar", "median_abs", "trials"]);
    let c = &p.convergent;
    let mut conv = Vec::new();
    for &nb in &c.n_bars {
        let m = medians(nb, c.t_start, c.t_end)?;
        table.row(&["convergent".into(), nb.to_string(), real(m), r.trials.to_string()]);
        conv.push(m);
    }
    let d = &p.divergent;
    let mut div = Vec::new();
    for &nb in &d.n_bars {
        let m = medians(nb, 0.0, (nb * nb) as f64)?;
        table.row(&["divergent".into(), nb.to_string(), real(m), r.trials.to_string()]);
        div.push(m);
    }

    let xs: Vec<f64> = c.n_bars.iter().map(|&nb| (nb as f64).log10()).collect();
    let ys: Vec<f64> = conv.iter().map(|m| m.log10()).collect();
    let s = slope(&xs, &ys);
    let [lo, hi] = c.slope_range;
    let growth = div[div.len() - 1] / div[0];
    let checks = vec![
        Check::at_least("convergent_slope_min", s, lo),
        Check::at_most("convergent_slope_max", s, hi),
        Check::at_least("divergent_growth", growth, d.min_growth),
    ];
    Ok((table.into_string(), Extras { files: vec![], checks }))
}

pub(super) fn burst_demod(r: &Resolved) -> Result<Output> {
    let Params::BurstDemod(p) = &r.params else { unreachable!() };
    let plain = symbol_error_rate(&p.scenario(r.trials, r.seed, -1)?, r.grid, r.seed)?;
    let annih = symbol_error_rate(&p.scenario(r.trials, r.seed, p.degree as i32)?, r.grid, r.seed)?;

    let mut table = Table::new(&["mode", "ser"]);
    table.row(&["plain".into(), real(plain.ser)]);
    table.row(&["annihilating".into(), real(annih.ser)]);
    let a = &p.assertions;
    let checks = vec![
        Check::at_most("annihilating_ser", annih.ser, a.max_annihilating_ser),
        Check::at_least("plain_ser", plain.ser, a.min_plain_ser),
        Check::at_least("plain_ser_ratio", plain.ser, a.min_plain_ratio * annih.ser),
    ];
    let files = vec![
        ("burst_demod_plain_trials.csv".to_string(), plain.to_csv()),
        ("burst_demod_annihilating_trials.csv".to_string(), annih.to_csv()),
    ];
    Ok((table.into_string(), Extras { files, checks }))
}
