//! Gauss–Legendre rules on `[0, 1]`.

use crate::scalar::Scalar;

/// Nodes and weights of the `n`-point Gauss–Legendre rule mapped to `[0, 1]`.
///
/// Exact for polynomials of degree `≤ 2n − 1`. Nodes come from Newton
/// iteration on `Pₙ` in `f64` and are cast afterwards.
pub fn gauss_legendre<S: Scalar>(n: usize) -> (Vec<S>, Vec<S>) {
    assert!(n >= 1, "quadrature needs at least one node");
    let mut nodes = vec![S::zero(); n];
    let mut weights = vec![S::zero(); n];
    let nf = n as f64;
    for i in 0..(n + 1) / 2 {
        // Tricomi initial guess for the i-th root, counted from the right.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d.is_finite() {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // Map [-1, 1] to [0, 1]: t = (1 + x)/2, weight halves.
        nodes[n - 1 - i] = S::c(0.5 * (1.0 + x));
        nodes[i] = S::c(0.5 * (1.0 - x));
        weights[n - 1 - i] = S::c(0.5 * w);
        weights[i] = S::c(0.5 * w);
    }
    (nodes, weights)
}

/// `(Pₙ(x), Pₙ'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Smallest node count that integrates `t^(k−1)·ω(t·x)` exactly when `ω` has
/// total degree at most `d`, capped at `cap`.
pub fn nodes_for_degree(k: usize, d: Option<u32>, cap: usize) -> usize {
    match d {
        Some(d) => ((k + d as usize + 1) / 2).clamp(1, cap),
        None => cap,
    }
}
