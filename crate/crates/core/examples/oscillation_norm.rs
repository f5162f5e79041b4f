// Oscillation norm of sinusoids and iid noise as frequency and resolution grow.

use algestim::hypergrid::{integrate, oscillation_norm};
use algestim::noise::{gen_iid, gen_sinusoid, iid_threshold, mean_square, IidNoiseSpec, SinusoidMixSpec};
use algestim::GridSpec;

pub fn run_example() -> algestim::Result<()> {
    let grid = GridSpec::pow2(16);
    println!("omega  osc_norm      bound 1/(pi omega)");
    for omega in [1.0, 8.0, 64.0, 512.0] {
        let f = gen_sinusoid(&SinusoidMixSpec::single(1.0, omega, 0.0), grid);
        println!("{omega:5}  {:.6e}  {:.6e}", oscillation_norm(&f), 1.0 / (std::f64::consts::PI * omega));
    }

    // small integrals, appreciable energy
    let f = gen_sinusoid(&SinusoidMixSpec::single(1.0, 64.0, 0.0), grid);
    println!("sin(2pi 64 t): osc {:.4e}, mean square {:.4}", oscillation_norm(&f), mean_square(&f));

    println!("\nlog2 n  iid osc_norm  threshold");
    for log2 in [10, 12, 14, 16] {
        let grid = GridSpec::pow2(log2);
        let f = gen_iid(&IidNoiseSpec::rademacher(1), grid, 0);
        println!("{log2:6}  {:.4e}   {:.4e}", oscillation_norm(&f), iid_threshold(grid.n()));
    }
    let f = gen_iid(&IidNoiseSpec::rademacher(1), grid, 0);
    println!("full integral at n = 2^16: {:.3e}", integrate(&f, 0, grid.n())?);
    Ok(())
}

fn main() -> algestim::Result<()> {
    run_example()
}
