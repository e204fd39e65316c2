//! Coefficients and boundary conditions.
//!
//! A coefficient is a real function on [0,1] held canonically as a constant
//! plus a truncated trigonometric series in cos(2kπx), sin(2kπx); raw uniform
//! grid samples may ride along and are projected onto the series by discrete
//! least squares. Pairs (p, q) carry the product-space norm
//! ‖(p,q)‖ = (‖p‖² + ‖q‖²)^{1/2}.
//!
//! The two boundary conditions of interest each come with the sine family
//! that diagonalizes the unperturbed operator:
//!
//! * Dirichlet        y(0)=y″(0)=y(1)=y″(1)=0   →  √2 sin(nπx)
//! * Dirichlet–Neumann y(0)=y″(0)=y′(1)=y‴(1)=0 →  √2 sin((n+½)πx)
//!
//! with n ≥ 1 in both families.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance to which attached grid samples must agree with the
/// series evaluation at the grid nodes.
pub const GRID_AGREEMENT_TOL: f64 = 1e-6;

/// Which boundary-value problem a basis, matrix, or spectrum belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryKind {
    Dirichlet,
    DirichletNeumann,
}

impl BoundaryKind {
    /// Wavenumber kₙ of the n-th basis mode: nπ or (n+½)π, n ≥ 1.
    pub fn wavenumber(self, n: usize) -> f64 {
        debug_assert!(n >= 1);
        match self {
            BoundaryKind::Dirichlet => n as f64 * PI,
            BoundaryKind::DirichletNeumann => (n as f64 + 0.5) * PI,
        }
    }

    /// Point where the n-th unperturbed eigenfunction is bounded away from
    /// zero; eigenfunction signs are fixed so that the value there is
    /// positive. 1/(2n) for Dirichlet, 1/(4n+2) for Dirichlet-Neumann.
    pub fn sign_fix_point(self, n: usize) -> f64 {
        match self {
            BoundaryKind::Dirichlet => 1.0 / (2.0 * n as f64),
            BoundaryKind::DirichletNeumann => 1.0 / (4.0 * n as f64 + 2.0),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            BoundaryKind::Dirichlet => "dirichlet",
            BoundaryKind::DirichletNeumann => "dirichlet-neumann",
        }
    }

    pub const BOTH: [BoundaryKind; 2] = [BoundaryKind::Dirichlet, BoundaryKind::DirichletNeumann];
}

/// n-th orthonormal basis function √2 sin(kₙ x) of the given kind.
pub fn basis_function(kind: BoundaryKind, n: usize, x: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("basis index n must be >= 1"));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::domain(format!("x = {x} outside [0,1]")));
    }
    Ok(std::f64::consts::SQRT_2 * (kind.wavenumber(n) * x).sin())
}

/// Derivative √2 kₙ cos(kₙ x) of the n-th basis function.
pub fn basis_derivative(kind: BoundaryKind, n: usize, x: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("basis index n must be >= 1"));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::domain(format!("x = {x} outside [0,1]")));
    }
    let k = kind.wavenumber(n);
    Ok(std::f64::consts::SQRT_2 * k * (k * x).cos())
}

/// A real coefficient on [0,1]: constant + Σ cos[k]·cos(2(k+1)πx)
/// + Σ sin[k]·sin(2(k+1)πx), with optional uniform grid samples.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientFunction {
    pub constant: f64,
    /// Coefficient of cos(2kπx); entry k-1 holds mode k.
    pub cos: Vec<f64>,
    /// Coefficient of sin(2kπx); entry k-1 holds mode k.
    pub sin: Vec<f64>,
    /// Uniform samples on [0,1] including both endpoints, when the
    /// coefficient was built from (or validated against) grid data.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<Vec<f64>>,
}

impl CoefficientFunction {
    pub fn new(constant: f64, cos: Vec<f64>, sin: Vec<f64>) -> Result<Self> {
        let c = CoefficientFunction {
            constant,
            cos,
            sin,
            grid: None,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn constant(value: f64) -> Self {
        CoefficientFunction {
            constant: value,
            cos: Vec::new(),
            sin: Vec::new(),
            grid: None,
        }
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    fn validate(&self) -> Result<()> {
        let all_finite = self.constant.is_finite()
            && self.cos.iter().all(|c| c.is_finite())
            && self.sin.iter().all(|c| c.is_finite())
            && self
                .grid
                .as_ref()
                .map_or(true, |g| g.iter().all(|v| v.is_finite()));
        if !all_finite {
            return Err(Error::validation("non-finite coefficient values"));
        }
        if let Some(g) = &self.grid {
            if g.len() < 2 {
                return Err(Error::validation(
                    "grid samples must include both endpoints (>= 2 points)",
                ));
            }
        }
        Ok(())
    }

    /// Attach grid samples to a series coefficient, checking that they agree
    /// with the series at the grid nodes to [`GRID_AGREEMENT_TOL`].
    pub fn with_grid(mut self, grid: Vec<f64>) -> Result<Self> {
        self.grid = Some(grid);
        self.validate()?;
        let g = self.grid.as_ref().unwrap();
        let scale = 1.0 + g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let h = 1.0 / (g.len() - 1) as f64;
        for (i, v) in g.iter().enumerate() {
            let s = self.eval_series(i as f64 * h);
            if (s - v).abs() > GRID_AGREEMENT_TOL * scale {
                return Err(Error::validation(format!(
                    "grid sample {i} = {v} disagrees with series value {s}"
                )));
            }
        }
        Ok(self)
    }

    /// Project uniform grid samples onto the trigonometric series by discrete
    /// least squares with `modes` cosine/sine modes. Returns the coefficient
    /// and the max-norm projection residual; the samples are kept on the
    /// coefficient only when they agree with the projection to
    /// [`GRID_AGREEMENT_TOL`].
    pub fn from_grid(samples: &[f64], modes: usize) -> Result<(Self, f64)> {
        if samples.len() < 2 {
            return Err(Error::validation(
                "grid samples must include both endpoints (>= 2 points)",
            ));
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::validation("non-finite coefficient values"));
        }
        if samples.len() < 2 * modes + 2 {
            return Err(Error::validation(format!(
                "{} grid points cannot determine {} trig modes",
                samples.len(),
                modes
            )));
        }
        let m = samples.len();
        let h = 1.0 / (m - 1) as f64;
        let cols = 2 * modes + 1;
        let mut design = DMatrix::<f64>::zeros(m, cols);
        for i in 0..m {
            let x = i as f64 * h;
            design[(i, 0)] = 1.0;
            for k in 1..=modes {
                design[(i, 2 * k - 1)] = (2.0 * k as f64 * PI * x).cos();
                design[(i, 2 * k)] = (2.0 * k as f64 * PI * x).sin();
            }
        }
        let rhs = DVector::from_column_slice(samples);
        let svd = design.clone().svd(true, true);
        let sol = svd
            .solve(&rhs, 1e-12)
            .map_err(|e| Error::numeric(format!("grid projection failed: {e}")))?;
        let fitted = design * &sol;
        let residual = (&fitted - &rhs).amax();

        let mut cos = vec![0.0; modes];
        let mut sin = vec![0.0; modes];
        for k in 1..=modes {
            cos[k - 1] = sol[2 * k - 1];
            sin[k - 1] = sol[2 * k];
        }
        let mut coeff = CoefficientFunction {
            constant: sol[0],
            cos,
            sin,
            grid: None,
        };
        let scale = 1.0 + samples.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if residual <= GRID_AGREEMENT_TOL * scale {
            coeff.grid = Some(samples.to_vec());
        }
        Ok((coeff, residual))
    }

    /// Series evaluation without the domain check; for quadrature loops whose
    /// nodes are in [0,1] by construction.
    pub fn eval_series(&self, x: f64) -> f64 {
        let mut acc = self.constant;
        for (k, c) in self.cos.iter().enumerate() {
            acc += c * (2.0 * (k + 1) as f64 * PI * x).cos();
        }
        for (k, s) in self.sin.iter().enumerate() {
            acc += s * (2.0 * (k + 1) as f64 * PI * x).sin();
        }
        acc
    }

    /// Evaluate the coefficient at x ∈ [0,1] from its series representation.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::domain(format!("x = {x} outside [0,1]")));
        }
        Ok(self.eval_series(x))
    }

    /// Evaluate by linear interpolation of the attached grid samples.
    pub fn eval_grid(&self, x: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::domain(format!("x = {x} outside [0,1]")));
        }
        let g = self
            .grid
            .as_ref()
            .ok_or_else(|| Error::domain("coefficient carries no grid samples"))?;
        let m = g.len() - 1;
        let t = x * m as f64;
        let i = (t.floor() as usize).min(m - 1);
        let frac = t - i as f64;
        Ok(g[i] * (1.0 - frac) + g[i + 1] * frac)
    }

    /// L²(0,1) norm. By Parseval this is
    /// (constant² + ½ Σ cos² + ½ Σ sin²)^{1/2} for the series representation.
    pub fn l2_norm(&self) -> f64 {
        let mut acc = self.constant * self.constant;
        for c in &self.cos {
            acc += 0.5 * c * c;
        }
        for s in &self.sin {
            acc += 0.5 * s * s;
        }
        acc.sqrt()
    }

    /// Highest trigonometric mode index present (0 for a constant).
    pub fn max_mode(&self) -> usize {
        self.cos.len().max(self.sin.len())
    }

    /// Pointwise difference of the series parts.
    pub fn sub(&self, other: &Self) -> Self {
        let n_cos = self.cos.len().max(other.cos.len());
        let n_sin = self.sin.len().max(other.sin.len());
        let get = |v: &[f64], i: usize| v.get(i).copied().unwrap_or(0.0);
        CoefficientFunction {
            constant: self.constant - other.constant,
            cos: (0..n_cos)
                .map(|i| get(&self.cos, i) - get(&other.cos, i))
                .collect(),
            sin: (0..n_sin)
                .map(|i| get(&self.sin, i) - get(&other.sin, i))
                .collect(),
            grid: None,
        }
    }
}

impl<'de> Deserialize<'de> for CoefficientFunction {
    fn deserialize<D>(deserializer: D) -> std::result::Result<Self, D::Error>
    where
        D: serde::Deserializer<'de>,
    {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Spec {
            Grid {
                grid: Vec<f64>,
                #[serde(default)]
                modes: Option<usize>,
            },
            Series {
                #[serde(default)]
                constant: f64,
                #[serde(default)]
                cos: Vec<f64>,
                #[serde(default)]
                sin: Vec<f64>,
            },
        }
        match Spec::deserialize(deserializer)? {
            Spec::Grid { grid, modes } => {
                let default_modes = ((grid.len().saturating_sub(1)) / 4).min(16);
                let modes = modes.unwrap_or(default_modes);
                let (coeff, residual) = CoefficientFunction::from_grid(&grid, modes)
                    .map_err(serde::de::Error::custom)?;
                if coeff.grid.is_none() {
                    return Err(serde::de::Error::custom(format!(
                        "grid samples are not representable by {modes} trig modes \
                         (projection residual {residual:.3e}); supply more \"modes\""
                    )));
                }
                Ok(coeff)
            }
            Spec::Series { constant, cos, sin } => {
                CoefficientFunction::new(constant, cos, sin).map_err(serde::de::Error::custom)
            }
        }
    }
}

/// A coefficient pair 𝐩 = (p, q) in L²(0,1) × L²(0,1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientPair {
    pub p: CoefficientFunction,
    pub q: CoefficientFunction,
}

impl CoefficientPair {
    pub fn new(p: CoefficientFunction, q: CoefficientFunction) -> Self {
        CoefficientPair { p, q }
    }

    pub fn constants(a1: f64, a2: f64) -> Self {
        CoefficientPair {
            p: CoefficientFunction::constant(a1),
            q: CoefficientFunction::constant(a2),
        }
    }

    pub fn zero() -> Self {
        Self::constants(0.0, 0.0)
    }

    /// Product norm ‖(p,q)‖ = (‖p‖² + ‖q‖²)^{1/2}.
    pub fn pair_norm(&self) -> f64 {
        let np = self.p.l2_norm();
        let nq = self.q.l2_norm();
        (np * np + nq * nq).sqrt()
    }

    /// Distance ‖self − other‖ in the product norm.
    pub fn distance(&self, other: &Self) -> f64 {
        let dp = self.p.sub(&other.p).l2_norm();
        let dq = self.q.sub(&other.q).l2_norm();
        (dp * dp + dq * dq).sqrt()
    }

    /// Membership in the open ball B(anchor, ε).
    pub fn in_ball(&self, anchor: &Self, epsilon: f64) -> bool {
        self.distance(anchor) < epsilon
    }

    pub fn max_mode(&self) -> usize {
        self.p.max_mode().max(self.q.max_mode())
    }

    pub fn component(&self, slot: Slot) -> &CoefficientFunction {
        match slot {
            Slot::P => &self.p,
            Slot::Q => &self.q,
        }
    }

    pub fn with_component(&self, slot: Slot, value: CoefficientFunction) -> Self {
        let mut out = self.clone();
        match slot {
            Slot::P => out.p = value,
            Slot::Q => out.q = value,
        }
        out
    }
}

/// Which slot of a pair a statement refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Slot {
    P,
    Q,
}

impl Slot {
    pub fn label(self) -> &'static str {
        match self {
            Slot::P => "p",
            Slot::Q => "q",
        }
    }

    pub fn other(self) -> Slot {
        match self {
            Slot::P => Slot::Q,
            Slot::Q => Slot::P,
        }
    }
}
