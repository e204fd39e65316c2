//! Quadrature rules on [0,1].
//!
//! Two rules cover everything the toolkit integrates:
//!
//! * composite 5-point Gauss–Legendre for the form assembly and the Newton
//!   Jacobian — the integrands there are trigonometric polynomials of bounded
//!   degree, so a panel count past the anti-aliasing threshold makes the rule
//!   exact up to rounding;
//! * composite Simpson on uniform grids for everything that lives on stored
//!   samples (family inner products, Fréchet integrals), where
//!   bit-reproducibility matters more than squeezing out the last digit.

use crate::error::{Error, Result};

// 5-point Gauss-Legendre on [-1,1].
const GL5_NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683_1,
    0.0,
    0.538_469_310_105_683_1,
    0.906_179_845_938_664,
];
const GL5_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189_08,
    0.478_628_670_499_366_47,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_47,
    0.236_926_885_056_189_08,
];

/// Nodes and weights of a composite rule on [0,1], in ascending node order.
#[derive(Debug, Clone)]
pub struct PanelRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl PanelRule {
    /// Composite 5-point Gauss–Legendre rule with `panels` equal panels.
    pub fn gauss_legendre(panels: usize) -> Result<Self> {
        if panels == 0 {
            return Err(Error::domain("quadrature needs at least one panel"));
        }
        let h = 1.0 / panels as f64;
        let mut nodes = Vec::with_capacity(5 * panels);
        let mut weights = Vec::with_capacity(5 * panels);
        for p in 0..panels {
            let a = p as f64 * h;
            let mid = a + 0.5 * h;
            for (t, w) in GL5_NODES.iter().zip(GL5_WEIGHTS.iter()) {
                nodes.push(mid + 0.5 * h * t);
                weights.push(0.5 * h * w);
            }
        }
        Ok(PanelRule { nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// ∫₀¹ f, with f given by its values on the rule's nodes.
    pub fn integrate_values(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.weights.len());
        let mut acc = 0.0;
        for (v, w) in values.iter().zip(self.weights.iter()) {
            acc += v * w;
        }
        acc
    }

    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(self.weights.iter()) {
            acc += f(*x) * w;
        }
        acc
    }
}

/// Composite Simpson on a uniform grid over [0,1] (endpoints included).
/// The grid must have an even number of intervals, i.e. an odd length ≥ 3.
pub fn simpson_uniform(values: &[f64]) -> Result<f64> {
    let m = values.len();
    if m < 3 || m % 2 == 0 {
        return Err(Error::domain(format!(
            "Simpson rule needs an odd number of grid points >= 3, got {m}"
        )));
    }
    let h = 1.0 / (m - 1) as f64;
    let mut acc = values[0] + values[m - 1];
    let mut four = 0.0;
    let mut two = 0.0;
    for (i, v) in values.iter().enumerate().take(m - 1).skip(1) {
        if i % 2 == 1 {
            four += v;
        } else {
            two += v;
        }
    }
    acc += 4.0 * four + 2.0 * two;
    Ok(acc * h / 3.0)
}

/// L² inner product of two sampled functions on the same uniform grid.
pub fn simpson_inner(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::domain(format!(
            "grid mismatch: {} vs {} samples",
            a.len(),
            b.len()
        )));
    }
    let prod: Vec<f64> = a.iter().zip(b.iter()).map(|(x, y)| x * y).collect();
    simpson_uniform(&prod)
}

/// Uniform grid on [0,1] with `points` nodes, endpoints included.
pub fn uniform_grid(points: usize) -> Vec<f64> {
    assert!(points >= 2);
    let h = 1.0 / (points - 1) as f64;
    (0..points).map(|i| i as f64 * h).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn gl_exact_on_polynomials() {
        let rule = PanelRule::gauss_legendre(3).unwrap();
        // degree 9 is exact for 5-point GL
        let exact = 1.0 / 10.0;
        let got = rule.integrate(|x| x.powi(9));
        assert!((got - exact).abs() < 1e-15, "got {got}");
    }

    #[test]
    fn gl_trig_products() {
        // ∫ 2 sin(3πx) sin(3πx) = 1, ∫ 2 sin(3πx) sin(5πx) = 0
        let rule = PanelRule::gauss_legendre(32).unwrap();
        let diag = rule.integrate(|x| 2.0 * (3.0 * PI * x).sin() * (3.0 * PI * x).sin());
        let off = rule.integrate(|x| 2.0 * (3.0 * PI * x).sin() * (5.0 * PI * x).sin());
        assert!((diag - 1.0).abs() < 1e-14);
        assert!(off.abs() < 1e-14);
    }

    #[test]
    fn simpson_matches_closed_forms() {
        let xs = uniform_grid(1025);
        let cos2: Vec<f64> = xs.iter().map(|&x| (2.0 * PI * x).cos().powi(2)).collect();
        let got = simpson_uniform(&cos2).unwrap();
        assert!((got - 0.5).abs() < 1e-12, "got {got}");
    }

    #[test]
    fn simpson_rejects_even_lengths() {
        assert!(simpson_uniform(&[1.0, 2.0]).is_err());
        assert!(simpson_uniform(&[1.0, 2.0, 3.0, 4.0]).is_err());
    }

    #[test]
    fn inner_product_grid_mismatch_is_domain_error() {
        let a = vec![0.0; 9];
        let b = vec![0.0; 11];
        match simpson_inner(&a, &b) {
            Err(crate::error::Error::Domain(_)) => {}
            other => panic!("expected domain error, got {other:?}"),
        }
    }
}
