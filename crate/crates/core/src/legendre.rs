//! Legendre polynomials, their discrete (Gram) counterparts on uniform
//! grids, and Gauss–Legendre quadrature.

/// `P_n(x)` by the three-term recurrence
/// `(k+1) P_{k+1} = (2k+1) x P_k − k P_{k−1}`.
pub fn legendre(n: usize, x: f64) -> f64 {
    legendre_with_derivative(n, x).0
}

/// `(P_n(x), P_n'(x))`. The derivative formula is singular at `x = ±1`,
/// where the closed form `P_n'(±1) = (±1)^{n+1} n(n+1)/2` is used.
pub fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let (mut prev, mut cur) = (1.0, x);
    for k in 1..n {
        let k = k as f64;
        let next = ((2.0 * k + 1.0) * x * cur - k * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    let nf = n as f64;
    let deriv = if (1.0 - x * x).abs() < 1e-300 {
        let sign = if x > 0.0 || n % 2 == 1 { 1.0 } else { -1.0 };
        sign * nf * (nf + 1.0) / 2.0
    } else {
        nf * (x * cur - prev) / (x * x - 1.0)
    };
    (cur, deriv)
}

/// Leading coefficient of `P_n`, `(2n)! / (2^n (n!)^2)`.
fn leading_coefficient(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * (2 * k - 1) as f64 / k as f64)
}

/// Samples of the degree-`order` discrete Legendre (Gram) polynomial on the
/// `m` points `j = 0..m`, normalized so that it tends to
/// `P_order(2j/m − 1)` as `m` grows.
///
/// The samples are exactly orthogonal, under uniform weights, to every
/// polynomial in `j` of degree below `order`, which is what makes windowed
/// left sums annihilate polynomial perturbations without quadrature error.
/// When `m <= order` the polynomial vanishes on every point.
pub fn gram_weights(order: usize, m: usize) -> Vec<f64> {
    let mf = m as f64;
    let lead = leading_coefficient(order);
    // monic recurrence in u = (2j − m + 1)/m:
    // q_{k+1} = u q_k − k²(1 − k²/m²)/(4k² − 1) q_{k−1}
    let betas: Vec<f64> = (1..order.max(1))
        .map(|k| {
            let k = k as f64;
            k * k * (1.0 - k * k / (mf * mf)) / (4.0 * k * k - 1.0)
        })
        .collect();
    (0..m)
        .map(|j| {
            let u = (2.0 * j as f64 - mf + 1.0) / mf;
            if order == 0 {
                return 1.0;
            }
            let (mut prev, mut cur) = (1.0, u);
            for beta in &betas[..order - 1] {
                let next = u * cur - beta * prev;
                prev = cur;
                cur = next;
            }
            lead * cur
        })
        .collect()
}

/// Nodes and weights of the `points`-point Gauss–Legendre rule on `[−1, 1]`.
pub fn gauss_rule(points: usize) -> Vec<(f64, f64)> {
    assert!(points >= 1);
    let n = points as f64;
    (1..=points)
        .map(|i| {
            let mut x = (std::f64::consts::PI * (i as f64 - 0.25) / (n + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = legendre_with_derivative(points, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, dp) = legendre_with_derivative(points, x);
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

/// Composite Gauss–Legendre integral of `f` over `[a, b]`.
pub fn gauss_integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, rule: &[(f64, f64)], panels: usize) -> f64 {
    let width = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let lo = a + p as f64 * width;
        let mid = lo + 0.5 * width;
        let part: f64 = rule.iter().map(|&(x, w)| w * f(mid + 0.5 * width * x)).sum();
        total += 0.5 * width * part;
    }
    total
}
