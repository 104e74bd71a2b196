//! Fixed-order Gauss-Legendre rules and composite helpers.

/// Nodes and weights of the 5-point rule on [-1, 1].
const GL5_NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683,
    0.0,
    0.538_469_310_105_683,
    0.906_179_845_938_664,
];
const GL5_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189_1,
    0.478_628_670_499_366_5,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
];

/// 5-point Gauss-Legendre on [a, b]; exact for polynomials of degree 9.
pub fn gauss5<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut s = 0.0;
    for (t, w) in GL5_NODES.iter().zip(GL5_WEIGHTS.iter()) {
        s += w * f(mid + half * t);
    }
    s * half
}

/// Composite 5-point rule over `panels` equal panels.
pub fn composite_gauss5<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|p| {
            let lo = a + p as f64 * h;
            gauss5(&f, lo, lo + h)
        })
        .sum()
}

/// Midpoints of the `2^level` equal cells of [0, 1].
pub fn midpoints(level: u32) -> impl Iterator<Item = f64> {
    let n = 1usize << level;
    let h = 1.0 / n as f64;
    (0..n).map(move |i| (i as f64 + 0.5) * h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss5_is_exact_for_degree_nine() {
        let v = gauss5(|x| x.powi(9) + x.powi(4), 0.0, 2.0);
        assert!((v - (512.0 / 10.0 * 2.0 + 32.0 / 5.0)).abs() < 1e-10);
    }

    #[test]
    fn composite_integrates_sine() {
        let v = composite_gauss5(f64::sin, 0.0, std::f64::consts::PI, 8);
        assert!((v - 2.0).abs() < 1e-12);
    }
}
