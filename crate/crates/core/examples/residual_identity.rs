// The error of a kernel estimator is a finite sum of iterated noise integrals.

use algestim::estimator::{build_affine_slope_estimator, build_constant_estimator, residual_identity_check};
use algestim::noise::{gen_iid, IidNoiseSpec};
use algestim::GridSpec;

pub fn run_example() -> algestim::Result<()> {
    let grid = GridSpec::pow2(14);
    let noise = gen_iid(&IidNoiseSpec::rademacher(3), grid, 0);
    for est in [build_constant_estimator(), build_affine_slope_estimator()] {
        let terms: Vec<String> =
            est.residual_terms.iter().map(|r| format!("({}, nu={}, k={})", r.c, r.nu, r.k)).collect();
        println!("{}: terms {}", est.name, terms.join(" "));
        for t in [0.25, 0.5, 1.0] {
            let gap = residual_identity_check(&est, &noise, 2.0, grid.snap(t))?;
            println!("  t = {t:4}: gap {gap:.3e}  (n * gap = {:.3})", gap * grid.n() as f64);
        }
    }
    Ok(())
}

fn main() -> algestim::Result<()> {
    run_example()
}
