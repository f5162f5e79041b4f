// A fast multiplicative noise folds into an additive noise with the same mean.

use algestim::noise::{
    apply_multiplicative, gen_iid, gen_sinusoid, residual_decompose, unit_mean, verify_noise,
    IidNoiseSpec, SinusoidMixSpec,
};
use algestim::{GridFunction, GridSpec};

pub fn run_example() -> algestim::Result<()> {
    let grid = GridSpec::pow2(16);
    let x = GridFunction::from_fn(grid, |t| 1.0 + t);
    let n2 = gen_iid(&IidNoiseSpec::rademacher(7), grid, 0);
    let zero = GridFunction::zeros(grid);

    for (label, fast) in [
        ("sinusoid, omega 512", SinusoidMixSpec::single(1.0, 512.0, 0.0)),
        ("sinusoid, omega 8  ", SinusoidMixSpec::single(1.0, 8.0, 0.0)),
        ("constant 0.5       ", SinusoidMixSpec::constant(0.5)),
    ] {
        let n1 = unit_mean(&gen_sinusoid(&fast, grid));
        let y = apply_multiplicative(&x, &n1, &n2)?;
        let residual = residual_decompose(&y, &x)?;
        let check = verify_noise(&residual, &zero, 0.05)?;
        println!("n1 = 1 + {label}: residual osc {:.4e} -> {}", check.norm, if check.pass { "pass" } else { "fail" });
    }
    Ok(())
}

fn main() -> algestim::Result<()> {
    run_example()
}
