//! Gauss–Legendre rules.

use std::f64::consts::PI;

/// Nodes and weights on `[-1, 1]`, ascending.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Newton iteration on `P_n` from the Chebyshev-like initial guesses.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    /// `∫_lo^hi f` by this rule.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, lo: f64, hi: f64, mut f: F) -> f64 {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two_and_nodes_are_symmetric() {
        for n in [1, 2, 3, 8, 16, 31] {
            let rule = GaussLegendre::new(n);
            let total: f64 = rule.weights.iter().sum();
            assert!((total - 2.0).abs() < 1e-14, "n={n}: {total}");
            for i in 0..n {
                assert!((rule.nodes[i] + rule.nodes[n - 1 - i]).abs() < 1e-15);
            }
            assert!(rule.nodes.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn exact_for_polynomials_up_to_degree_2n_minus_1() {
        let rule = GaussLegendre::new(16);
        for k in 0..32 {
            let approx = rule.integrate(0.0, 1.0, |x| x.powi(k));
            let exact = 1.0 / (k as f64 + 1.0);
            assert!((approx - exact).abs() < 1e-15, "degree {k}");
        }
    }

    #[test]
    fn two_point_rule() {
        let rule = GaussLegendre::new(2);
        assert!((rule.nodes[1] - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        assert!((rule.weights[0] - 1.0).abs() < 1e-15);
    }
}
