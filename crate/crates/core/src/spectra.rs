//! Spectra and eigenfunctions of the two boundary-value problems.
//!
//! Eigenvalues come from the symmetric Galerkin matrix of the form; each
//! requested eigenpair is then polished by shifted inverse iteration with a
//! Rayleigh-quotient update so that the residual ‖A c − λ c‖ sits near the
//! rounding floor rather than at the backward-error level of the dense
//! eigensolver (the matrix norm grows like N⁴π⁴, the low eigenvalues do not).
//!
//! At constant coefficients everything is available in closed form,
//!   λₙ(a) = n⁴π⁴ + a₁ n²π² + a₂,
//!   μₙ(a) = (n+½)⁴π⁴ + a₁ (n+½)²π² + a₂,
//! and those formulas also enumerate the exceptional constants where two
//! eigenvalues of one family collide.
//!
//! Sign convention: the n-th Dirichlet eigenfunction is positive at
//! x = 1/(2n), the n-th Dirichlet–Neumann eigenfunction at x = 1/(4n+2);
//! at those points the unperturbed eigenfunctions equal √2 and 1.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::assembly::{assemble_default, default_dimension};
use crate::coeff::{BoundaryKind, CoefficientPair};
use crate::error::{Error, Result};
use crate::quad::{simpson_uniform, uniform_grid};

/// Uniform grid resolution for the stored eigenfunction samples.
pub const DEFAULT_SAMPLE_POINTS: usize = 1025;

/// Default relative gap below which two eigenvalues count as one cluster.
pub const DEGENERACY_TOL: f64 = 1e-6;

/// Sorted eigenvalues of one boundary-value problem.
#[derive(Debug, Clone, Serialize)]
pub struct Spectrum {
    pub kind: BoundaryKind,
    /// values[n-1] approximates the n-th eigenvalue, n = 1..=n_max.
    pub values: Vec<f64>,
    /// Galerkin dimension behind the values; 0 marks exact closed forms.
    pub dimension_used: usize,
}

impl Spectrum {
    pub fn n_max(&self) -> usize {
        self.values.len()
    }

    pub fn value(&self, n: usize) -> f64 {
        self.values[n - 1]
    }
}

/// One normalized, sign-fixed eigenpair.
#[derive(Debug, Clone, Serialize)]
pub struct EigenPair {
    pub kind: BoundaryKind,
    /// 1-based index in the sorted spectrum.
    pub n: usize,
    pub value: f64,
    /// Expansion in the orthonormal basis √2 sin(kⱼ x); Euclidean norm 1.
    pub coeffs: Vec<f64>,
    /// Eigenfunction values on the uniform sample grid (endpoints included).
    pub samples: Vec<f64>,
    /// Derivative values on the same grid.
    pub deriv_samples: Vec<f64>,
}

impl EigenPair {
    pub fn eval(&self, x: f64) -> f64 {
        let sqrt2 = std::f64::consts::SQRT_2;
        let mut acc = 0.0;
        for (j, c) in self.coeffs.iter().enumerate() {
            acc += c * sqrt2 * (self.kind.wavenumber(j + 1) * x).sin();
        }
        acc
    }

    pub fn eval_deriv(&self, x: f64) -> f64 {
        let sqrt2 = std::f64::consts::SQRT_2;
        let mut acc = 0.0;
        for (j, c) in self.coeffs.iter().enumerate() {
            let k = self.kind.wavenumber(j + 1);
            acc += c * sqrt2 * k * (k * x).cos();
        }
        acc
    }

    pub fn eval_second_deriv(&self, x: f64) -> f64 {
        let sqrt2 = std::f64::consts::SQRT_2;
        let mut acc = 0.0;
        for (j, c) in self.coeffs.iter().enumerate() {
            let k = self.kind.wavenumber(j + 1);
            acc -= c * sqrt2 * k * k * (k * x).sin();
        }
        acc
    }

    /// The x-grid the samples live on.
    pub fn sample_xs(&self) -> Vec<f64> {
        uniform_grid(self.samples.len())
    }
}

/// Exact spectrum at constant coefficients, no discretization.
pub fn unperturbed_spectrum(a: (f64, f64), kind: BoundaryKind, n_max: usize) -> Spectrum {
    let mut values: Vec<f64> = (1..=n_max)
        .map(|n| {
            let k = kind.wavenumber(n);
            k.powi(4) + a.0 * k.powi(2) + a.1
        })
        .collect();
    values.sort_by(|x, y| x.partial_cmp(y).unwrap());
    Spectrum {
        kind,
        values,
        dimension_used: 0,
    }
}

fn residual_norm(a: &DMatrix<f64>, lambda: f64, v: &DVector<f64>) -> f64 {
    let mut r = a * v;
    r.axpy(-lambda, v, 1.0);
    r.norm()
}

/// One shifted inverse-iteration step followed by a Rayleigh-quotient update;
/// keeps the result only when the eigen-residual improves.
fn refine_eigenpair(a: &DMatrix<f64>, lambda: &mut f64, v: &mut DVector<f64>) {
    let n = a.nrows();
    let mut best = residual_norm(a, *lambda, v);
    for _ in 0..2 {
        let mut shifted = a.clone();
        for i in 0..n {
            shifted[(i, i)] -= *lambda;
        }
        let Some(w) = shifted.lu().solve(&*v) else {
            // exactly singular shift: the raw pair is already as good as the
            // degenerate cluster allows
            return;
        };
        let norm = w.norm();
        if !norm.is_finite() || norm == 0.0 {
            return;
        }
        let mut w = w / norm;
        if w.dot(v) < 0.0 {
            w.neg_mut();
        }
        let aw = a * &w;
        let rq = w.dot(&aw);
        let mut r = aw;
        r.axpy(-rq, &w, 1.0);
        let res = r.norm();
        if res < best {
            best = res;
            *lambda = rq;
            *v = w;
        } else {
            return;
        }
    }
}

/// Spectrum and normalized, sign-fixed eigenfunctions of the assembled
/// Galerkin system of dimension `n`, reported for indices 1..=n_max.
pub fn compute_spectrum(
    pair: &CoefficientPair,
    kind: BoundaryKind,
    n: usize,
    n_max: usize,
) -> Result<(Spectrum, Vec<EigenPair>)> {
    if n_max == 0 {
        return Err(Error::domain("n_max must be >= 1"));
    }
    if n_max > n {
        return Err(Error::domain(format!(
            "n_max = {n_max} exceeds Galerkin dimension N = {n}"
        )));
    }
    let system = assemble_default(pair, kind, n)?;
    let eig = system
        .matrix
        .clone()
        .try_symmetric_eigen(f64::EPSILON, 10_000)
        .ok_or_else(|| Error::numeric("symmetric eigensolver did not converge"))?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].partial_cmp(&eig.eigenvalues[j]).unwrap());

    let mut refined: Vec<(f64, DVector<f64>)> = Vec::with_capacity(n_max);
    for &idx in order.iter().take(n_max) {
        let mut lambda = eig.eigenvalues[idx];
        let mut v: DVector<f64> = eig.eigenvectors.column(idx).into_owned();
        let norm = v.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::numeric("eigensolver returned a zero eigenvector"));
        }
        v /= norm;
        refine_eigenpair(&system.matrix, &mut lambda, &mut v);
        refined.push((lambda, v));
    }
    refined.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());

    let xs = uniform_grid(DEFAULT_SAMPLE_POINTS);
    let mut values = Vec::with_capacity(n_max);
    let mut pairs = Vec::with_capacity(n_max);
    for (i, (lambda, mut v)) in refined.into_iter().enumerate() {
        let idx = i + 1;
        // sign convention: positive at the kind's anchor point
        let x_star = kind.sign_fix_point(idx);
        let mut probe = EigenPair {
            kind,
            n: idx,
            value: lambda,
            coeffs: v.iter().cloned().collect(),
            samples: Vec::new(),
            deriv_samples: Vec::new(),
        };
        let mut s = probe.eval(x_star);
        if s == 0.0 {
            // degenerate fallback: orient by the largest expansion coefficient
            let dom = v
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.abs().partial_cmp(&b.1.abs()).unwrap())
                .map(|(j, _)| j)
                .unwrap_or(0);
            s = v[dom];
        }
        if s < 0.0 {
            v.neg_mut();
            probe.coeffs = v.iter().cloned().collect();
        }
        probe.samples = xs.iter().map(|&x| probe.eval(x)).collect();
        probe.deriv_samples = xs.iter().map(|&x| probe.eval_deriv(x)).collect();
        values.push(lambda);
        pairs.push(probe);
    }

    Ok((
        Spectrum {
            kind,
            values,
            dimension_used: n,
        },
        pairs,
    ))
}

/// [`compute_spectrum`] with the default dimension rule.
pub fn compute_spectrum_auto(
    pair: &CoefficientPair,
    kind: BoundaryKind,
    n_max: usize,
) -> Result<(Spectrum, Vec<EigenPair>)> {
    let n = default_dimension(n_max, pair.max_mode());
    compute_spectrum(pair, kind, n, n_max)
}

/// Eigenfunctions of both boundary-value problems for one coefficient pair.
#[derive(Debug, Clone)]
pub struct EigenfunctionSet {
    pub dirichlet: (Spectrum, Vec<EigenPair>),
    pub dirichlet_neumann: (Spectrum, Vec<EigenPair>),
}

impl EigenfunctionSet {
    pub fn compute(pair: &CoefficientPair, n_max: usize) -> Result<Self> {
        Ok(EigenfunctionSet {
            dirichlet: compute_spectrum_auto(pair, BoundaryKind::Dirichlet, n_max)?,
            dirichlet_neumann: compute_spectrum_auto(pair, BoundaryKind::DirichletNeumann, n_max)?,
        })
    }

    pub fn of_kind(&self, kind: BoundaryKind) -> &(Spectrum, Vec<EigenPair>) {
        match kind {
            BoundaryKind::Dirichlet => &self.dirichlet,
            BoundaryKind::DirichletNeumann => &self.dirichlet_neumann,
        }
    }
}

/// A group of eigenvalue indices that coincide within tolerance.
#[derive(Debug, Clone, Serialize)]
pub struct Cluster {
    pub kind: BoundaryKind,
    /// 1-based indices, length >= 2.
    pub indices: Vec<usize>,
}

/// Match of a constant a₁ against one of the exceptional lines on which a
/// spectrum has a multiple eigenvalue.
#[derive(Debug, Clone, Serialize)]
pub struct ExceptionalMatch {
    /// Line parameters: a₁ = −π²(((k+1)/2)² + ((k+1)/2 + t)²).
    pub k: usize,
    pub t: usize,
    pub a1: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DegeneracyReport {
    pub clusters: Vec<Cluster>,
    /// True iff both spectra have only simple eigenvalues at this tolerance.
    pub in_w: bool,
    pub exceptional_constant: Option<ExceptionalMatch>,
}

/// Value of the exceptional line with parameters (k, t).
pub fn exceptional_line(k: usize, t: usize) -> f64 {
    let half = (k as f64 + 1.0) / 2.0;
    -PI * PI * (half * half + (half + t as f64) * (half + t as f64))
}

/// Exact membership test of a₁ against the exceptional lines with indices up
/// to n_max.
pub fn match_exceptional_constant(a1: f64, n_max: usize) -> Option<ExceptionalMatch> {
    for k in 1..=(2 * n_max) {
        for t in 1..=n_max {
            let line = exceptional_line(k, t);
            if (a1 - line).abs() <= 1e-9 * (1.0 + line.abs()) {
                return Some(ExceptionalMatch { k, t, a1: line });
            }
        }
    }
    None
}

fn find_clusters(spectrum: &Spectrum, tol: f64) -> Vec<Cluster> {
    let mut clusters = Vec::new();
    let v = &spectrum.values;
    let mut start = 0;
    for i in 1..=v.len() {
        let joined = i < v.len() && {
            let gap = v[i] - v[i - 1];
            gap < tol * (1.0 + v[i].abs().max(v[i - 1].abs()))
        };
        if !joined {
            if i - start >= 2 {
                clusters.push(Cluster {
                    kind: spectrum.kind,
                    indices: (start + 1..=i).collect(),
                });
            }
            start = i;
        }
    }
    clusters
}

/// Cluster detection across the two spectra with the relative gap tolerance
/// tol·(1+|λ|); when the input pair is a known constant, the exceptional
/// lines are matched exactly.
pub fn detect_degeneracy(
    dirichlet: &Spectrum,
    dirichlet_neumann: &Spectrum,
    tol: f64,
    constant: Option<(f64, f64)>,
) -> Result<DegeneracyReport> {
    if tol <= 0.0 {
        return Err(Error::domain("degeneracy tolerance must be positive"));
    }
    if dirichlet.kind != BoundaryKind::Dirichlet
        || dirichlet_neumann.kind != BoundaryKind::DirichletNeumann
    {
        return Err(Error::domain(
            "detect_degeneracy expects (Dirichlet, Dirichlet-Neumann) spectra",
        ));
    }
    if dirichlet.n_max() != dirichlet_neumann.n_max() {
        return Err(Error::domain(format!(
            "spectra computed with different n_max: {} vs {}",
            dirichlet.n_max(),
            dirichlet_neumann.n_max()
        )));
    }
    let mut clusters = find_clusters(dirichlet, tol);
    clusters.extend(find_clusters(dirichlet_neumann, tol));
    let in_w = clusters.is_empty();
    let exceptional_constant =
        constant.and_then(|(a1, _)| match_exceptional_constant(a1, dirichlet.n_max()));
    Ok(DegeneracyReport {
        clusters,
        in_w,
        exceptional_constant,
    })
}

/// Least-squares fit of λₙ ≈ kₙ⁴ + c₁ kₙ² + c₂ over the top half of the
/// available indices. Returns (c₁, c₂); c₁ estimates ∫p.
pub fn asymptotic_fit(spectrum: &Spectrum) -> Result<(f64, f64)> {
    let n_max = spectrum.n_max();
    let lo = n_max / 2 + 1;
    if n_max < lo + 2 {
        return Err(Error::domain(format!(
            "asymptotic fit needs at least 3 usable modes, top half of n_max = {n_max} has {}",
            n_max.saturating_sub(lo) + 1
        )));
    }
    let mut sx = 0.0;
    let mut sy = 0.0;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut count = 0.0;
    for idx in lo..=n_max {
        let k2 = spectrum.kind.wavenumber(idx).powi(2);
        let r = spectrum.value(idx) - k2 * k2;
        sx += k2;
        sy += r;
        sxx += k2 * k2;
        sxy += k2 * r;
        count += 1.0;
    }
    let det = count * sxx - sx * sx;
    if det.abs() < 1e-300 {
        return Err(Error::numeric("degenerate normal equations in asymptotic fit"));
    }
    let c1 = (count * sxy - sx * sy) / det;
    let c2 = (sy - c1 * sx) / count;
    Ok((c1, c2))
}

/// Estimated mean of p from the n²π² slope of the eigenvalue asymptotics.
pub fn asymptotic_mean_estimate(spectrum: &Spectrum) -> Result<f64> {
    asymptotic_fit(spectrum).map(|(c1, _)| c1)
}

/// First-order eigenvalue change dλ = ∫ δp (φ′)² + ∫ δq φ² under a
/// coefficient perturbation, by Simpson quadrature on the stored samples.
pub fn frechet_eigenvalue_derivative(eig: &EigenPair, delta: &CoefficientPair) -> Result<f64> {
    let norm: f64 = eig.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-8 {
        return Err(Error::domain(format!(
            "eigenfunction is not normalized (L2 norm {norm})"
        )));
    }
    let xs = eig.sample_xs();
    let integrand: Vec<f64> = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let dp = delta.p.eval_series(x);
            let dq = delta.q.eval_series(x);
            dp * eig.deriv_samples[i] * eig.deriv_samples[i] + dq * eig.samples[i] * eig.samples[i]
        })
        .collect();
    simpson_uniform(&integrand)
}

/// One exceptional constant flagged by the degenerate-constant scan.
#[derive(Debug, Clone, Serialize)]
pub struct FlaggedLine {
    pub kind: BoundaryKind,
    pub a1: f64,
    /// The two 1-based mode indices whose eigenvalues collide there.
    pub indices: (usize, usize),
}

#[derive(Debug, Clone, Serialize)]
pub struct DegenerateScan {
    /// (a₁, min relative gap Dirichlet, min relative gap Dirichlet-Neumann)
    /// on the scan grid.
    pub curve: Vec<(f64, f64, f64)>,
    pub flagged: Vec<FlaggedLine>,
}

/// Scan constant pairs (a₁, 0) over [lo, hi]: a min-gap curve on `steps` grid
/// points plus the exact collision lines a₁ = −(kᵢ² + kⱼ²) inside the range.
pub fn scan_degenerate_constants(
    lo: f64,
    hi: f64,
    steps: usize,
    n_max: usize,
) -> Result<DegenerateScan> {
    if !(lo.is_finite() && hi.is_finite()) || lo >= hi {
        return Err(Error::domain("scan range must satisfy lo < hi"));
    }
    if steps < 2 {
        return Err(Error::domain("scan needs at least 2 steps"));
    }
    if n_max < 2 {
        return Err(Error::domain("scan needs n_max >= 2"));
    }

    let min_rel_gap = |spectrum: &Spectrum| -> f64 {
        let v = &spectrum.values;
        let mut min = f64::INFINITY;
        for i in 1..v.len() {
            let gap = (v[i] - v[i - 1]).abs() / (1.0 + v[i].abs().max(v[i - 1].abs()));
            min = min.min(gap);
        }
        min
    };

    let mut curve = Vec::with_capacity(steps);
    for i in 0..steps {
        let a1 = lo + (hi - lo) * i as f64 / (steps - 1) as f64;
        let d = unperturbed_spectrum((a1, 0.0), BoundaryKind::Dirichlet, n_max);
        let dn = unperturbed_spectrum((a1, 0.0), BoundaryKind::DirichletNeumann, n_max);
        curve.push((a1, min_rel_gap(&d), min_rel_gap(&dn)));
    }

    let mut flagged = Vec::new();
    for kind in BoundaryKind::BOTH {
        for i in 1..=n_max {
            for j in (i + 1)..=n_max {
                let ki = kind.wavenumber(i);
                let kj = kind.wavenumber(j);
                let a1 = -(ki * ki + kj * kj);
                if a1 >= lo && a1 <= hi {
                    flagged.push(FlaggedLine {
                        kind,
                        a1,
                        indices: (i, j),
                    });
                }
            }
        }
    }
    flagged.sort_by(|a, b| a.a1.partial_cmp(&b.a1).unwrap());
    Ok(DegenerateScan { curve, flagged })
}
