// Symbols on a sinusoidal carrier under a burst with a quadratic mean:
// the plain window average against a Legendre annihilator.

use algestim::demod::{symbol_error_rate, Alphabet, DemodScenario};
use algestim::estimator::Carrier;
use algestim::noise::{BaseNoise, BurstSpec, IidNoiseSpec};
use algestim::GridSpec;

pub fn run_example() -> algestim::Result<()> {
    let grid = GridSpec::pow2(14);
    let mut scenario = DemodScenario {
        carrier: Carrier::Sinusoid { frequency: 2.0, phase: 0.0 },
        window_length: 0.3,
        noise: BurstSpec::new(vec![0.5, 0.5, 0.5], BaseNoise::Iid(IidNoiseSpec::rademacher(0)))?,
        alphabet: Alphabet::new(vec![-3.0, -1.0, 1.0, 3.0])?,
        trials: 100,
        estimator_degree: -1,
    };
    for degree in [-1, 0, 1, 2, 3] {
        scenario.estimator_degree = degree;
        let report = symbol_error_rate(&scenario, grid, 2024)?;
        let label = if degree < 0 { "plain".to_string() } else { format!("d = {degree}") };
        println!("{label:6} ser = {:.3}", report.ser);
    }
    Ok(())
}

fn main() -> algestim::Result<()> {
    run_example()
}
