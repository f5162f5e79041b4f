use algestim::demod::{detect, symbol_error_rate, Alphabet, DemodScenario};
use algestim::estimator::{build_annihilating_estimator, Carrier};
use algestim::noise::{gen_iid, poly_eval, BaseNoise, BurstSpec, IidFamily, IidNoiseSpec};
use algestim::{Error, GridFunction, GridSpec};

fn carrier() -> Carrier {
    Carrier::Sinusoid { frequency: 2.0, phase: 0.0 }
}

fn scenario(alphabet: Alphabet, degree: i32, scale: f64, poly: Vec<f64>) -> DemodScenario {
    DemodScenario {
        carrier: carrier(),
        window_length: 0.3,
        noise: BurstSpec::new(poly, BaseNoise::Iid(IidNoiseSpec::new(IidFamily::Rademacher, 0, scale).unwrap()))
            .unwrap(),
        alphabet,
        trials: 200,
        estimator_degree: degree,
    }
}

fn four() -> Alphabet {
    Alphabet::new(vec![-3.0, -1.0, 1.0, 3.0]).unwrap()
}

#[test]
fn detection_ignores_annihilated_polynomials() {
    let grid = GridSpec::pow2(14);
    let t = grid.snap(0.3);
    for d in 0..=4usize {
        let est = build_annihilating_estimator(carrier(), d).unwrap();
        for trial in 0..20u64 {
            let theta = four().symbols()[trial as usize % 4];
            let y = &est.model.signal(theta, grid).unwrap()
                + &gen_iid(&IidNoiseSpec::new(IidFamily::Gaussian, 6, 0.2).unwrap(), grid, trial);
            let coeffs: Vec<f64> = (0..=d).map(|j| ((trial + j as u64) as f64 * 0.37).sin() * 2.0).collect();
            let shifted = y.zip_with(&GridFunction::from_fn(grid, |s| poly_eval(&coeffs, s)), |a, b| a + b).unwrap();
            let before = detect(&est, &y, t, &four()).unwrap();
            let after = detect(&est, &shifted, t, &four()).unwrap();
            assert_eq!(before.symbol.to_bits(), after.symbol.to_bits(), "d={d} trial {trial}");
            assert!((before.raw_estimate - after.raw_estimate).abs() <= 20.0 / grid.n() as f64);
        }
    }
}

#[test]
fn error_rate_is_deterministic_across_pools() {
    let grid = GridSpec::pow2(13);
    let s = scenario(four(), 2, 1.0, vec![0.5, 0.5, 0.5]);
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| symbol_error_rate(&s, grid, 42).unwrap())
    };
    let one = run(1);
    let four_threads = run(4);
    assert_eq!(one.to_csv(), four_threads.to_csv());
    assert_eq!(one, symbol_error_rate(&s, grid, 42).unwrap());
    assert_ne!(one.to_csv(), symbol_error_rate(&s, grid, 43).unwrap().to_csv());
}

#[test]
fn wider_alphabets_err_less() {
    let grid = GridSpec::pow2(14);
    let sers: Vec<f64> = [0.5, 1.0, 2.0]
        .iter()
        .map(|&sep| {
            let s = scenario(Alphabet::uniform(4, sep).unwrap(), 2, 1.0, vec![0.5, 0.5, 0.5]);
            symbol_error_rate(&s, grid, 9).unwrap().ser
        })
        .collect();
    assert!(sers[0] >= sers[1] && sers[1] >= sers[2], "{sers:?}");
    assert!(sers[0] > sers[2], "{sers:?}");
}

#[test]
fn vanishing_noise_gives_no_errors() {
    let grid = GridSpec::pow2(14);
    for degree in [-1, 0, 2] {
        for window in [0.1, 0.3, 0.45, 0.7, 0.95] {
            let mut s = scenario(four(), degree, 1e-9, vec![0.0]);
            s.window_length = window;
            s.trials = 16;
            match symbol_error_rate(&s, grid, 1) {
                Ok(r) => assert_eq!(r.ser, 0.0, "degree {degree} window {window}"),
                Err(Error::Config(_)) => {}
                Err(e) => panic!("{e}"),
            }
        }
    }
}
