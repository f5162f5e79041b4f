// The scaled sample sum: vanishing on a fixed interval, divergent when the
// interval grows like n_bar squared.

use algestim::noise::{centlim_statistic, IidNoiseSpec};

fn median_abs(source: &IidNoiseSpec, n_bar: u64, t_end: f64, trials: u64) -> algestim::Result<f64> {
    let mut v = (0..trials)
        .map(|trial| centlim_statistic(source, n_bar, 0.0, t_end, trial).map(f64::abs))
        .collect::<algestim::Result<Vec<_>>>()?;
    v.sort_by(f64::total_cmp);
    Ok(v[v.len() / 2])
}

pub fn run_example() -> algestim::Result<()> {
    let source = IidNoiseSpec::rademacher(11);
    println!("fixed interval [0, 1]");
    for n_bar in [100, 1_000, 10_000] {
        println!("  n_bar {n_bar:6}: median |S| = {:.4e}", median_abs(&source, n_bar, 1.0, 25)?);
    }
    println!("interval [0, n_bar^2]");
    for n_bar in [4, 16, 64] {
        let t_end = (n_bar * n_bar) as f64;
        println!("  n_bar {n_bar:6}: median |S| = {:.4e}", median_abs(&source, n_bar, t_end, 25)?);
    }
    Ok(())
}

fn main() -> algestim::Result<()> {
    run_example()
}
