//! The elliptic operator `A = −div((1/p₁)∇·)` on a uniform 1-D grid, its
//! Dirichlet eigensystem and the modal solution operators S, S′, S″.

use nalgebra::SymmetricEigen;

use crate::error::{Error, Result};
use crate::linalg::Tridiagonal;
use crate::melf::{ml_eval, MlParams};

/// Uniform grid on (0, L) with `n_interior` unknowns and spacing `L/(n_interior+1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpatialGrid {
    length: f64,
    n_interior: usize,
}

impl SpatialGrid {
    pub fn new(length: f64, n_interior: usize) -> Result<Self> {
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::Domain(format!("domain length must be positive, got {length}")));
        }
        if n_interior < 3 {
            return Err(Error::Domain(format!("at least 3 interior nodes are required, got {n_interior}")));
        }
        Ok(Self { length, n_interior })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn n_interior(&self) -> usize {
        self.n_interior
    }

    pub fn spacing(&self) -> f64 {
        self.length / (self.n_interior + 1) as f64
    }

    /// Interior nodes x₁ … x_n.
    pub fn interior_nodes(&self) -> Vec<f64> {
        let h = self.spacing();
        (1..=self.n_interior).map(|i| i as f64 * h).collect()
    }

    /// All nodes x₀ = 0 … x_{n+1} = L.
    pub fn closed_nodes(&self) -> Vec<f64> {
        let h = self.spacing();
        let mut nodes: Vec<f64> = (0..=self.n_interior + 1).map(|i| i as f64 * h).collect();
        nodes[self.n_interior + 1] = self.length;
        nodes
    }

    /// Discrete L² inner product of interior grid functions.
    pub fn inner(&self, a: &[f64], b: &[f64]) -> f64 {
        self.spacing() * a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>()
    }

    pub fn norm(&self, a: &[f64]) -> f64 {
        self.inner(a, a).sqrt()
    }

    /// Plain second difference with homogeneous Dirichlet data.
    pub fn laplacian(&self) -> Tridiagonal {
        let n = self.n_interior;
        let inv_h2 = 1.0 / (self.spacing() * self.spacing());
        Tridiagonal::new(vec![inv_h2; n], vec![-2.0 * inv_h2; n], vec![inv_h2; n])
    }
}

/// The assembled operator together with the data it was built from.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteOperator {
    grid: SpatialGrid,
    p1: Vec<f64>,
    matrix: Tridiagonal,
}

impl DiscreteOperator {
    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    /// p₁ on the closed grid.
    pub fn p1(&self) -> &[f64] {
        &self.p1
    }

    pub fn matrix(&self) -> &Tridiagonal {
        &self.matrix
    }
}

/// Conservative discretization of `−div((1/p₁)∇ψ)` with homogeneous Dirichlet data.
///
/// `p1` holds values on the closed grid; the half-node coefficient is the
/// harmonic mean of 1/p₁ at the neighbouring nodes.
pub fn assemble_operator(grid: &SpatialGrid, p1: &[f64]) -> Result<DiscreteOperator> {
    let n = grid.n_interior();
    if p1.len() != n + 2 {
        return Err(Error::Shape(format!("p1 must have {} closed-grid values, got {}", n + 2, p1.len())));
    }
    if let Some((i, v)) = p1.iter().enumerate().find(|(_, v)| !(**v > 0.0) || !v.is_finite()) {
        return Err(Error::Admissibility(format!("p1 must be positive on the closed domain (p1 = {v} at node {i})")));
    }
    let inv_h2 = 1.0 / (grid.spacing() * grid.spacing());
    // k[i] couples nodes i and i+1 of the closed grid.
    let k: Vec<f64> = p1.windows(2).map(|w| 2.0 / (w[0] + w[1])).collect();
    let mut sub = vec![0.0; n];
    let mut diag = vec![0.0; n];
    let mut sup = vec![0.0; n];
    for r in 0..n {
        diag[r] = (k[r] + k[r + 1]) * inv_h2;
        if r > 0 {
            sub[r] = -k[r] * inv_h2;
        }
        if r + 1 < n {
            sup[r] = -k[r + 1] * inv_h2;
        }
    }
    Ok(DiscreteOperator { grid: *grid, p1: p1.to_vec(), matrix: Tridiagonal::new(sub, diag, sup) })
}

/// Default mode count, min(64, n_interior/4).
pub fn default_modes(grid: &SpatialGrid) -> usize {
    (grid.n_interior() / 4).clamp(1, 64)
}

/// Eigenpairs of the discrete operator, orthonormal in the h-weighted inner product.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSystem {
    grid: SpatialGrid,
    eigenvalues: Vec<f64>,
    eigenvectors: Vec<Vec<f64>>,
    p1: Vec<f64>,
    orthonormality_residual: f64,
}

impl EigenSystem {
    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &[Vec<f64>] {
        &self.eigenvectors
    }

    pub fn p1(&self) -> &[f64] {
        &self.p1
    }

    pub fn n_modes(&self) -> usize {
        self.eigenvalues.len()
    }

    /// max |⟨φ_i, φ_j⟩_h − δ_ij| over the retained modes.
    pub fn orthonormality_residual(&self) -> f64 {
        self.orthonormality_residual
    }

    /// Modal coefficients (a, φ_n)_h.
    pub fn coefficients(&self, a: &[f64]) -> Vec<f64> {
        self.eigenvectors.iter().map(|phi| self.grid.inner(a, phi)).collect()
    }

    /// Σ c_n φ_n.
    pub fn synthesize(&self, coeffs: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.grid.n_interior()];
        for (c, phi) in coeffs.iter().zip(&self.eigenvectors) {
            for (o, p) in out.iter_mut().zip(phi) {
                *o += c * p;
            }
        }
        out
    }

    /// A^γ a restricted to the retained modes.
    pub fn fractional_power(&self, gamma: f64, a: &[f64]) -> Vec<f64> {
        let coeffs: Vec<f64> =
            self.coefficients(a).iter().zip(&self.eigenvalues).map(|(c, l)| c * l.powf(gamma)).collect();
        self.synthesize(&coeffs)
    }
}

/// First `n_modes` eigenpairs in ascending order.
pub fn eigensystem(op: &DiscreteOperator, n_modes: usize) -> Result<EigenSystem> {
    let grid = op.grid;
    let n = grid.n_interior();
    if n_modes == 0 || n_modes > n {
        return Err(Error::Domain(format!("n_modes must lie in 1..={n}, got {n_modes}")));
    }
    let dense = op.matrix.to_dense();
    let eig = SymmetricEigen::try_new(dense, 1e-15, 10_000)
        .ok_or_else(|| Error::Numeric(format!("symmetric eigen-solver did not converge for n = {n}")))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let scale = 1.0 / grid.spacing().sqrt();
    let mut eigenvalues = Vec::with_capacity(n_modes);
    let mut eigenvectors = Vec::with_capacity(n_modes);
    for &idx in order.iter().take(n_modes) {
        let lambda = eig.eigenvalues[idx];
        let col = eig.eigenvectors.column(idx);
        let lead = col.iter().copied().find(|v| v.abs() > 1e-12).unwrap_or(1.0);
        let sign = if lead >= 0.0 { 1.0 } else { -1.0 };
        eigenvalues.push(lambda);
        eigenvectors.push(col.iter().map(|v| sign * v * scale).collect::<Vec<f64>>());
    }
    if !(eigenvalues[0] > 0.0) {
        return Err(Error::Numeric(format!("smallest eigenvalue {} is not positive", eigenvalues[0])));
    }
    let mut residual: f64 = 0.0;
    for i in 0..n_modes {
        for j in i..n_modes {
            let ip = grid.inner(&eigenvectors[i], &eigenvectors[j]);
            let target = if i == j { 1.0 } else { 0.0 };
            residual = residual.max((ip - target).abs());
        }
    }
    if residual > 1e-10 {
        return Err(Error::Numeric(format!("eigenvectors are not orthonormal (residual {residual:e})")));
    }
    Ok(EigenSystem { grid, eigenvalues, eigenvectors, p1: op.p1.clone(), orthonormality_residual: residual })
}

/// Which solution operator to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolutionKind {
    /// S(t): multiplier E_{α,1}(−λt^α).
    S,
    /// S′(t): multiplier −λ t^{α−1} E_{α,α}(−λt^α).
    S1,
    /// S″(t): multiplier −λ t^{α−2} E_{α,α−1}(−λt^α).
    S2,
}

/// Modal multiplier of a solution operator for one eigenvalue.
pub fn solution_multiplier(kind: SolutionKind, alpha1: f64, lambda: f64, t: f64) -> Result<f64> {
    let z = -lambda * t.powf(alpha1);
    Ok(match kind {
        SolutionKind::S => ml_eval(MlParams::new(alpha1, 1.0)?, z)?,
        SolutionKind::S1 => -lambda * t.powf(alpha1 - 1.0) * ml_eval(MlParams::new(alpha1, alpha1)?, z)?,
        SolutionKind::S2 => -lambda * t.powf(alpha1 - 2.0) * ml_eval(MlParams::new(alpha1, alpha1 - 1.0)?, z)?,
    })
}

/// Applies S(t), S′(t) or S″(t) to a grid function, truncated at the retained modes.
pub fn solution_operator_apply(
    eig: &EigenSystem,
    alpha1: f64,
    t: f64,
    a: &[f64],
    kind: SolutionKind,
) -> Result<Vec<f64>> {
    if !(alpha1 > 0.0 && alpha1 <= 1.0) {
        return Err(Error::Domain(format!("alpha1 must lie in (0, 1], got {alpha1}")));
    }
    if a.len() != eig.grid.n_interior() {
        return Err(Error::Shape(format!("grid function has {} values, expected {}", a.len(), eig.grid.n_interior())));
    }
    if t < 0.0 || !t.is_finite() {
        return Err(Error::Domain(format!("time must be non-negative, got {t}")));
    }
    if t == 0.0 && kind != SolutionKind::S {
        return Err(Error::Singularity(format!("{kind:?}(t) is singular at t = 0")));
    }
    let coeffs = eig.coefficients(a);
    let scaled = coeffs
        .iter()
        .zip(&eig.eigenvalues)
        .map(|(c, &l)| Ok(c * solution_multiplier(kind, alpha1, l, t)?))
        .collect::<Result<Vec<f64>>>()?;
    Ok(eig.synthesize(&scaled))
}
