// Estimation error against window length; errors blow up near divisor zeros.

use algestim::estimator::{build_amplitude_estimator, divisor_zeros, Carrier, Kernel, WindowSweep};
use algestim::noise::{IidNoiseSpec, NoiseSpec};
use algestim::GridSpec;

pub fn run_example() -> algestim::Result<()> {
    let grid = GridSpec::pow2(14);
    let est = build_amplitude_estimator(Carrier::Sinusoid { frequency: 2.0, phase: 0.0 }, Kernel::Unit)?;
    println!("divisor zeros: {:?}", divisor_zeros(&est, 128)?);

    let lengths = [0.05, 0.15, 0.25, 0.35, 0.45, 0.49, 0.5, 0.55, 0.75, 0.99];
    let sweep = WindowSweep::new(&est, grid, &lengths)?;
    let noise = NoiseSpec::Iid(IidNoiseSpec::rademacher(5));
    let r = sweep.run(1.0, &noise, 0)?;
    println!("    t  divisor     abs_error");
    for i in 0..r.len() {
        let err = if r.near_zero_flags[i] { "flagged".to_string() } else { format!("{:.3e}", r.abs_errors[i]) };
        println!("{:5.3}  {:+.3e}  {err}", r.window_lengths[i], r.divisor_values[i]);
    }
    Ok(())
}

fn main() -> algestim::Result<()> {
    run_example()
}
