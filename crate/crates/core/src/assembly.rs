//! Galerkin assembly of the sesquilinear form
//! 𝔮_{(p,q)}[y,z] = (y″, z″) + (p y′, z′) + (q y, z)
//! in the orthonormal sine family of the chosen boundary condition.
//!
//! With bₙ = √2 sin(kₙ x) the bending term is diagonal in closed form,
//! (bₘ″, bₙ″) = kₙ⁴ δₘₙ, so only the shear and potential terms are
//! integrated numerically. Both integrands are trigonometric polynomials of
//! bounded degree; a composite Gauss–Legendre rule past the anti-aliasing
//! threshold of 4·(N + L) panels (L = highest coefficient mode) integrates
//! them exactly up to rounding. The result is symmetrized by (A + Aᵀ)/2 to
//! kill residual quadrature asymmetry.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::coeff::{BoundaryKind, CoefficientPair};
use crate::error::{Error, Result};
use crate::quad::PanelRule;

/// Tolerance for quadrature-level agreement claims about assembled entries.
pub const ASSEMBLY_TOL: f64 = 1e-10;

/// Symmetric form matrix of 𝔮_{(p,q)} in the sine basis of one boundary kind.
#[derive(Debug, Clone, Serialize)]
pub struct GalerkinSystem {
    pub kind: BoundaryKind,
    pub dimension: usize,
    #[serde(skip)]
    pub matrix: DMatrix<f64>,
    /// Total number of quadrature nodes used for the non-diagonal terms.
    pub quadrature_nodes: usize,
}

/// Galerkin dimension rule: the form couples basis modes only within the
/// coefficient bandwidth, so N = max(2·n_max + L + 8, 32) converges the first
/// n_max eigenvalues.
pub fn default_dimension(n_max: usize, max_mode: usize) -> usize {
    (2 * n_max + max_mode + 8).max(32)
}

/// Anti-aliasing panel count for assembling an N×N system.
pub fn default_panels(n: usize, max_mode: usize) -> usize {
    (4 * (n + max_mode)).max(16)
}

/// Assemble A[m][n] = (bₘ″, bₙ″) + (p bₘ′, bₙ′) + (q bₘ, bₙ).
pub fn assemble_form_matrix(
    pair: &CoefficientPair,
    kind: BoundaryKind,
    n: usize,
    panels: usize,
) -> Result<GalerkinSystem> {
    if n == 0 {
        return Err(Error::domain("matrix dimension N must be >= 1"));
    }
    let finite = |c: &crate::coeff::CoefficientFunction| {
        c.constant.is_finite()
            && c.cos.iter().all(|v| v.is_finite())
            && c.sin.iter().all(|v| v.is_finite())
    };
    if !finite(&pair.p) || !finite(&pair.q) {
        return Err(Error::validation(
            "assembly error: non-finite coefficient values",
        ));
    }
    let rule = PanelRule::gauss_legendre(panels)?;
    let nodes = rule.len();

    // Coefficient values and basis traces on the quadrature nodes.
    let p_vals: Vec<f64> = rule.nodes.iter().map(|&x| pair.p.eval_series(x)).collect();
    let q_vals: Vec<f64> = rule.nodes.iter().map(|&x| pair.q.eval_series(x)).collect();
    let wavenumbers: Vec<f64> = (1..=n).map(|m| kind.wavenumber(m)).collect();
    let sqrt2 = std::f64::consts::SQRT_2;
    // sin_t[m][j] = √2 sin(kₘ x_j), cos_t[m][j] = √2 cos(kₘ x_j)
    let sin_t: Vec<Vec<f64>> = wavenumbers
        .iter()
        .map(|&k| rule.nodes.iter().map(|&x| sqrt2 * (k * x).sin()).collect())
        .collect();
    let cos_t: Vec<Vec<f64>> = wavenumbers
        .iter()
        .map(|&k| rule.nodes.iter().map(|&x| sqrt2 * (k * x).cos()).collect())
        .collect();

    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|m| {
            let km = wavenumbers[m];
            let mut row = vec![0.0; n];
            for col in 0..n {
                let kn = wavenumbers[col];
                let mut shear = 0.0;
                let mut potential = 0.0;
                for j in 0..nodes {
                    let w = rule.weights[j];
                    shear += w * p_vals[j] * cos_t[m][j] * cos_t[col][j];
                    potential += w * q_vals[j] * sin_t[m][j] * sin_t[col][j];
                }
                row[col] = km * kn * shear + potential;
                if col == m {
                    row[col] += km.powi(4);
                }
            }
            row
        })
        .collect();

    let mut matrix = DMatrix::<f64>::zeros(n, n);
    for (m, row) in rows.iter().enumerate() {
        for (col, v) in row.iter().enumerate() {
            matrix[(m, col)] = *v;
        }
    }
    // Symmetrize: the form is symmetric for real coefficients, quadrature
    // rounding is not.
    for m in 0..n {
        for col in (m + 1)..n {
            let avg = 0.5 * (matrix[(m, col)] + matrix[(col, m)]);
            matrix[(m, col)] = avg;
            matrix[(col, m)] = avg;
        }
    }

    Ok(GalerkinSystem {
        kind,
        dimension: n,
        matrix,
        quadrature_nodes: nodes,
    })
}

/// Convenience assembly with the default anti-aliasing panel count.
pub fn assemble_default(
    pair: &CoefficientPair,
    kind: BoundaryKind,
    n: usize,
) -> Result<GalerkinSystem> {
    assemble_form_matrix(pair, kind, n, default_panels(n, pair.max_mode()))
}

/// A computable c = c(‖p‖, ‖q‖) such that A + cI is positive definite for
/// every dimension and both boundary kinds.
///
/// For unit-norm y in the form domain, with s = ‖y″‖ one has
/// ‖y′‖² ≤ s, ‖y′‖∞² ≤ s + 2s^{3/2}, ‖y‖∞ ≤ √s, hence
/// 𝔮[y,y] ≥ s² − ‖p‖(s + √2 s^{5/4}) − ‖q‖ s^{1/2}, and Young's inequality
/// pushes the right side above −(‖p‖² + 4.36‖p‖^{8/3} + ¾‖q‖^{4/3}).
pub fn coercivity_shift(pair: &CoefficientPair) -> f64 {
    let np = pair.p.l2_norm();
    let nq = pair.q.l2_norm();
    np * np + 4.36 * np.powf(8.0 / 3.0) + 0.75 * nq.powf(4.0 / 3.0) + 1.0
}

impl GalerkinSystem {
    /// Max-norm relative asymmetry ‖A − Aᵀ‖_max / ‖A‖_max.
    pub fn relative_asymmetry(&self) -> f64 {
        let n = self.dimension;
        let mut num = 0.0f64;
        let mut den = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                num = num.max((self.matrix[(i, j)] - self.matrix[(j, i)]).abs());
                den = den.max(self.matrix[(i, j)].abs());
            }
        }
        if den == 0.0 {
            0.0
        } else {
            num / den
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::CoefficientFunction;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn constant_pair_is_diagonal_closed_form() {
        // (p,q) = (1,1), Dirichlet, N=3: Aₙₙ = n⁴π⁴ + n²π² + 1
        let sys = assemble_default(&CoefficientPair::constants(1.0, 1.0), BoundaryKind::Dirichlet, 3)
            .unwrap();
        for n in 1..=3usize {
            let expected = (n as f64 * PI).powi(4) + (n as f64 * PI).powi(2) + 1.0;
            assert_relative_eq!(sys.matrix[(n - 1, n - 1)], expected, max_relative = 1e-12);
        }
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    assert!(sys.matrix[(i, j)].abs() < 1e-9, "off-diagonal not ~0");
                }
            }
        }
    }

    #[test]
    fn zero_pair_dirichlet_neumann_diagonal() {
        // (0,0), DN, N=2: diag((1.5π)⁴, (2.5π)⁴)
        let sys =
            assemble_default(&CoefficientPair::zero(), BoundaryKind::DirichletNeumann, 2).unwrap();
        assert_relative_eq!(sys.matrix[(0, 0)], (1.5 * PI).powi(4), max_relative = 1e-12);
        assert_relative_eq!(sys.matrix[(1, 1)], (2.5 * PI).powi(4), max_relative = 1e-12);
    }

    #[test]
    fn cosine_shear_coupling_matches_trig_identities() {
        // p = cos(2πx), q = 0, Dirichlet, N=3:
        //   A₁₁ = π⁴ + π²/2, A₁₃ = A₃₁ = 3π²/2 (analytic triple products)
        let pair = CoefficientPair::new(
            CoefficientFunction::new(0.0, vec![1.0], vec![]).unwrap(),
            CoefficientFunction::zero(),
        );
        let sys = assemble_default(&pair, BoundaryKind::Dirichlet, 3).unwrap();
        assert_relative_eq!(
            sys.matrix[(0, 0)],
            PI.powi(4) + PI.powi(2) / 2.0,
            max_relative = 1e-12
        );
        assert_relative_eq!(sys.matrix[(0, 2)], 1.5 * PI.powi(2), max_relative = 1e-12);
        assert_relative_eq!(sys.matrix[(2, 0)], 1.5 * PI.powi(2), max_relative = 1e-12);
    }

    #[test]
    fn quadrature_agrees_with_independent_simpson() {
        // Cross-check one generic entry against a fine Simpson oracle.
        let pair = CoefficientPair::new(
            CoefficientFunction::new(0.2, vec![0.3], vec![0.1]).unwrap(),
            CoefficientFunction::new(-0.1, vec![], vec![0.2]).unwrap(),
        );
        let sys = assemble_default(&pair, BoundaryKind::DirichletNeumann, 4).unwrap();
        let xs = crate::quad::uniform_grid(8193);
        let (m, n) = (1usize, 3usize); // rows 2 and 4
        let km = BoundaryKind::DirichletNeumann.wavenumber(m + 1);
        let kn = BoundaryKind::DirichletNeumann.wavenumber(n + 1);
        let vals: Vec<f64> = xs
            .iter()
            .map(|&x| {
                let bp = 2.0 * km * kn * (km * x).cos() * (kn * x).cos();
                let bq = 2.0 * (km * x).sin() * (kn * x).sin();
                pair.p.eval_series(x) * bp + pair.q.eval_series(x) * bq
            })
            .collect();
        let oracle = crate::quad::simpson_uniform(&vals).unwrap();
        assert_relative_eq!(sys.matrix[(m, n)], oracle, epsilon = 1e-9);
    }

    #[test]
    fn doubling_panels_is_stable_past_threshold() {
        let pair = CoefficientPair::new(
            CoefficientFunction::new(0.1, vec![0.4, 0.2], vec![0.3]).unwrap(),
            CoefficientFunction::new(0.0, vec![0.1], vec![]).unwrap(),
        );
        let n = 12;
        let base = default_panels(n, pair.max_mode());
        let a = assemble_form_matrix(&pair, BoundaryKind::Dirichlet, n, base).unwrap();
        let b = assemble_form_matrix(&pair, BoundaryKind::Dirichlet, n, 2 * base).unwrap();
        let scale = 1.0 + a.matrix.amax();
        let diff = (&a.matrix - &b.matrix).amax();
        assert!(
            diff <= ASSEMBLY_TOL * scale,
            "doubling panels moved an entry by {diff:e} (scale {scale:e})"
        );
    }

    #[test]
    fn shifted_matrix_is_positive_definite() {
        let pair = CoefficientPair::new(
            CoefficientFunction::new(-3.0, vec![2.0], vec![1.0]).unwrap(),
            CoefficientFunction::new(-40.0, vec![], vec![5.0]).unwrap(),
        );
        let shift = coercivity_shift(&pair);
        for kind in BoundaryKind::BOTH {
            let sys = assemble_default(&pair, kind, 24).unwrap();
            let mut shifted = sys.matrix.clone();
            for i in 0..24 {
                shifted[(i, i)] += shift;
            }
            let eig = shifted.symmetric_eigen();
            let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
            assert!(min > 0.0, "A + cI not positive definite: min eig {min}");
        }
    }

    #[test]
    fn rejects_zero_dimension_and_non_finite() {
        assert!(matches!(
            assemble_default(&CoefficientPair::zero(), BoundaryKind::Dirichlet, 0),
            Err(Error::Domain(_))
        ));
        let mut pair = CoefficientPair::zero();
        pair.p.constant = f64::NAN;
        assert!(matches!(
            assemble_default(&pair, BoundaryKind::Dirichlet, 4),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn assembly_is_deterministic() {
        let pair = CoefficientPair::new(
            CoefficientFunction::new(0.1, vec![0.4], vec![0.3]).unwrap(),
            CoefficientFunction::new(0.2, vec![0.1], vec![]).unwrap(),
        );
        let a = assemble_default(&pair, BoundaryKind::Dirichlet, 16).unwrap();
        let b = assemble_default(&pair, BoundaryKind::Dirichlet, 16).unwrap();
        assert_eq!(a.matrix, b.matrix);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn prop_symmetry_and_constant_exactness(
            a1 in -20.0..20.0f64,
            a2 in -20.0..20.0f64,
            c1 in -0.5..0.5f64,
            s1 in -0.5..0.5f64,
            n in 1usize..12,
        ) {
            // symmetry for generic trig coefficients
            let pair = CoefficientPair::new(
                CoefficientFunction::new(a1, vec![c1], vec![s1]).unwrap(),
                CoefficientFunction::new(a2, vec![-s1], vec![c1]).unwrap(),
            );
            for kind in BoundaryKind::BOTH {
                let sys = assemble_default(&pair, kind, n).unwrap();
                prop_assert!(sys.relative_asymmetry() <= 1e-12);
            }

            // closed-form diagonal for the constant part alone
            let const_pair = CoefficientPair::constants(a1, a2);
            for kind in BoundaryKind::BOTH {
                let sys = assemble_default(&const_pair, kind, n).unwrap();
                for m in 1..=n {
                    let k = kind.wavenumber(m);
                    let expected = k.powi(4) + a1 * k.powi(2) + a2;
                    let got = sys.matrix[(m - 1, m - 1)];
                    prop_assert!(
                        (got - expected).abs() <= 1e-10 * (1.0 + expected.abs()),
                        "kind {:?} n {} got {} expected {}", kind, m, got, expected
                    );
                }
            }
        }
    }
}
