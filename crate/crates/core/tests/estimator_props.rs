use algestim::estimator::{
    build_affine_slope_estimator, build_amplitude_estimator, build_annihilating_estimator,
    build_constant_estimator, divisor_zeros, estimate, residual_identity_check, Carrier,
    EstimatorSpec, Kernel, WindowSweep,
};
use algestim::hypergrid::weighted_integral;
use algestim::noise::{gen_iid, gen_sinusoid, poly_eval, IidNoiseSpec, NoiseSpec, SinusoidMixSpec};
use algestim::rng::Stream;
use algestim::{Error, GridFunction, GridSpec};
use rayon::prelude::*;

fn sin4() -> Carrier {
    Carrier::Sinusoid { frequency: 2.0, phase: 0.0 }
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

fn built_ins() -> Vec<EstimatorSpec> {
    let mut v = vec![
        build_constant_estimator(),
        build_affine_slope_estimator(),
        build_amplitude_estimator(sin4(), Kernel::Unit).unwrap(),
        build_amplitude_estimator(sin4(), Kernel::Ramp).unwrap(),
        build_amplitude_estimator(Carrier::Sinc { center: 0.4, width: 0.15 }, Kernel::Unit).unwrap(),
    ];
    for d in 0..=4 {
        v.push(build_annihilating_estimator(sin4(), d).unwrap());
    }
    v
}

// y for the estimator's model: θ·regressor, plus an intercept for the slope model
fn noiseless(est: &EstimatorSpec, theta: f64, grid: GridSpec) -> GridFunction {
    let s = est.model.signal(theta, grid).unwrap();
    if est.name == "affine-slope" {
        s.map(|v| v - 1.25)
    } else {
        s
    }
}

#[test]
fn unbiased_without_noise() {
    let grid = GridSpec::pow2(14);
    let tol = 50.0 / grid.n() as f64;
    for est in built_ins() {
        for theta in [-2.0, 0.7, 3.0] {
            let y = noiseless(&est, theta, grid);
            let mut checked = 0;
            for i in 1..=40 {
                let t = grid.snap(i as f64 / 40.0);
                match estimate(&est, &y, t) {
                    Ok(v) => {
                        assert!((v - theta).abs() <= tol, "{} t={t}: {v} vs {theta}", est.name);
                        checked += 1;
                    }
                    Err(Error::DivisorZero { .. }) => {}
                    Err(e) => panic!("{}: {e}", est.name),
                }
            }
            assert!(checked >= 20, "{}: only {checked} windows usable", est.name);
        }
    }
}

// brute force: ∫₀ᵗ τ^ν 𝔫 and nested left sums for the k-fold integral
fn nested_rhs(terms: &[(f64, u32, u32)], noise: &GridFunction, t: usize) -> f64 {
    let h = noise.spec().step();
    let mut total = 0.0;
    for &(c, nu, k) in terms {
        let mut level: Vec<f64> =
            noise.values().iter().enumerate().map(|(j, v)| (j as f64 * h).powi(nu as i32) * v).collect();
        for _ in 0..k {
            let mut acc = 0.0;
            level = level
                .iter()
                .map(|v| {
                    let before = acc;
                    acc += v * h;
                    before
                })
                .collect();
        }
        total += c * level[t];
    }
    total
}

#[test]
fn residual_identity_randomized() {
    let grid = GridSpec::pow2(14);
    let tol = 50.0 / grid.n() as f64;
    let ests = [
        build_constant_estimator(),
        build_affine_slope_estimator(),
        build_amplitude_estimator(sin4(), Kernel::Unit).unwrap(),
        build_amplitude_estimator(sin4(), Kernel::Ramp).unwrap(),
    ];
    let draws = Stream::new(99, 0);
    let mut cross_checked = 0;
    for case in 0..100u64 {
        let est = &ests[case as usize % ests.len()];
        let theta = 10.0 * draws.uniform(case, 0) - 5.0;
        let t = grid.snap(0.05 + 0.95 * draws.uniform(case, 1));
        let noise = if case % 2 == 0 {
            gen_iid(&IidNoiseSpec::rademacher(case), grid, case)
        } else {
            gen_sinusoid(&SinusoidMixSpec::single(1.5, 40.0 + case as f64, 0.3), grid)
        };
        let gap = match residual_identity_check(est, &noise, theta, t) {
            Ok(g) => g,
            Err(Error::DivisorZero { .. }) => continue,
            Err(e) => panic!("{e}"),
        };
        assert!(gap <= tol, "case {case} ({}): {gap}", est.name);

        if case % 10 == 0 {
            let terms: Vec<(f64, u32, u32)> = est.residual_terms.iter().map(|r| (r.c, r.nu, r.k)).collect();
            let plan = est.plan(grid, t).unwrap();
            let y = &est.model.signal(theta, grid).unwrap() + &noise;
            let lhs = plan.divisor * (plan.apply(&y).unwrap() - theta);
            let oracle = nested_rhs(&terms, &noise, t);
            assert!((lhs - oracle).abs() <= tol, "case {case}: {lhs} vs nested {oracle}");
            cross_checked += 1;
        }
    }
    assert_eq!(cross_checked, 10);
}

#[test]
fn annihilation_is_exhaustive() {
    let grid = GridSpec::pow2(14);
    let tol = 20.0 / grid.n() as f64;
    for d in 0..=4usize {
        let est = build_annihilating_estimator(sin4(), d).unwrap();
        for w in 1..=10 {
            let m = grid.snap(w as f64 / 10.0 - 0.013);
            let plan = est.plan(grid, m).unwrap();
            for j in 0..=d {
                let mono = GridFunction::from_fn(grid, |tau| tau.powi(j as i32));
                let v = weighted_integral(&mono, &plan.weights).unwrap();
                assert!(v.abs() <= tol, "d={d} j={j} m={m}: {v}");
            }
        }
    }
}

#[test]
fn added_polynomials_do_not_move_the_estimate() {
    let grid = GridSpec::pow2(14);
    let tol = 20.0 / grid.n() as f64;
    let base = &gen_sinusoid(&SinusoidMixSpec::single(1.0, 2.0, 0.0), grid)
        + &gen_iid(&IidNoiseSpec::rademacher(8), grid, 0);
    for d in 0..=4usize {
        let est = build_annihilating_estimator(sin4(), d).unwrap();
        for coeffs in [vec![3.0], vec![-1.0, 4.0], vec![0.5, -2.0, 7.0, -3.0, 1.0]] {
            if coeffs.len() > d + 1 {
                continue;
            }
            let shifted = base.zip_with(&GridFunction::from_fn(grid, |t| poly_eval(&coeffs, t)), |a, b| a + b).unwrap();
            for t in [0.2, 0.3, 0.62, 0.9] {
                let k = grid.snap(t);
                let (Ok(a), Ok(b)) = (estimate(&est, &base, k), estimate(&est, &shifted, k)) else {
                    continue;
                };
                assert!((a - b).abs() <= tol, "d={d} {coeffs:?} t={t}: {a} vs {b}");
            }
        }
    }
}

#[test]
fn divisor_zero_amplifies_errors() {
    let grid = GridSpec::pow2(14);
    let est = build_amplitude_estimator(sin4(), Kernel::Unit).unwrap();
    let zeros = divisor_zeros(&est, 256).unwrap();
    let lengths: Vec<f64> = (1..=200).map(|i| i as f64 / 200.0).collect();
    let sweep = WindowSweep::new(&est, grid, &lengths).unwrap();
    let noise = NoiseSpec::Iid(IidNoiseSpec::rademacher(31));
    let max_div = est.divisor_scale();

    let ratios: Vec<f64> = (0..50u64)
        .into_par_iter()
        .map(|trial| {
            let r = sweep.run(1.0, &noise, trial).unwrap();
            let mut near = 0.0f64;
            let mut far = Vec::new();
            for i in 0..r.len() {
                if r.near_zero_flags[i] {
                    continue;
                }
                let t = r.window_lengths[i];
                if zeros.iter().any(|z| (z - t).abs() < 0.02) {
                    near = near.max(r.abs_errors[i]);
                } else if r.divisor_values[i].abs() > 0.1 * max_div {
                    far.push(r.abs_errors[i]);
                }
            }
            near / median(far)
        })
        .collect();
    let ratio = median(ratios);
    assert!(ratio >= 5.0, "ratio {ratio}");
}

#[test]
fn divisor_zeros_of_monotone_divisors() {
    assert_eq!(divisor_zeros(&build_constant_estimator(), 64).unwrap(), vec![0.0]);
    assert_eq!(divisor_zeros(&build_affine_slope_estimator(), 64).unwrap(), vec![0.0]);
}

#[test]
fn constant_estimator_monte_carlo() {
    let grid = GridSpec::pow2(14);
    let est = build_constant_estimator();
    let t = grid.snap(0.5);
    let hits = (0..100u64)
        .filter(|&trial| {
            let y = gen_iid(&IidNoiseSpec::rademacher(12), grid, trial).map(|v| 2.0 + v);
            (estimate(&est, &y, t).unwrap() - 2.0).abs() <= 0.1
        })
        .count();
    assert!(hits >= 95, "{hits}");
}

#[test]
fn annihilator_beats_plain_kernel_under_a_burst() {
    // base noise scale 0.1: at unit scale the d = 2 estimate has std ≈ 0.33
    let grid = GridSpec::pow2(14);
    let p = [0.4, -0.8, 0.6];
    let annih = build_annihilating_estimator(sin4(), 2).unwrap();
    let plain = build_amplitude_estimator(sin4(), Kernel::Unit).unwrap();
    let t = grid.snap(0.3);
    let signal = annih.model.signal(1.0, grid).unwrap();
    let mean = GridFunction::from_fn(grid, |tau| poly_eval(&p, tau));
    let base = IidNoiseSpec::new(Default::default(), 41, 0.1).unwrap();

    let errs: Vec<(f64, f64)> = (0..100u64)
        .into_par_iter()
        .map(|trial| {
            let y = &(&signal + &mean) + &gen_iid(&base, grid, trial);
            (
                (estimate(&annih, &y, t).unwrap() - 1.0).abs(),
                (estimate(&plain, &y, t).unwrap() - 1.0).abs(),
            )
        })
        .collect();
    let hits = errs.iter().filter(|e| e.0 <= 0.1).count();
    assert!(hits >= 95, "{hits}");
    let (a, b): (Vec<f64>, Vec<f64>) = errs.into_iter().unzip();
    let (ma, mb) = (median(a), median(b));
    assert!(mb >= 10.0 * ma, "plain {mb} vs annihilating {ma}");
}
