//! The coefficient tuple (ℓ, α, p₁ … p_ℓ, p) and its admissibility checks.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::SpatialGrid;

/// A multi-term model sampled at a set of spatial nodes.
///
/// `alphas[j]` is the order of the term weighted by `p_terms[j]`; orders are
/// strictly decreasing, so `p_terms[0]` is the leading coefficient p₁.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FractionalModel {
    nodes: Vec<f64>,
    alphas: Vec<f64>,
    p_terms: Vec<Vec<f64>>,
    potential: Vec<f64>,
}

impl FractionalModel {
    /// Builds and validates a model. Every field must have one value per node.
    pub fn new(nodes: Vec<f64>, alphas: Vec<f64>, p_terms: Vec<Vec<f64>>, potential: Vec<f64>) -> Result<Self> {
        let model = Self { nodes, alphas, p_terms, potential };
        model.validate()?;
        Ok(model)
    }

    /// A model with constant coefficients on the closed nodes of `grid`.
    pub fn constant(grid: &SpatialGrid, alphas: &[f64], p_terms: &[f64], potential: f64) -> Result<Self> {
        let nodes = grid.closed_nodes();
        let n = nodes.len();
        Self::new(nodes, alphas.to_vec(), p_terms.iter().map(|&p| vec![p; n]).collect(), vec![potential; n])
    }

    /// A model whose fields are functions of x, sampled on the closed nodes of `grid`.
    pub fn from_functions(
        grid: &SpatialGrid,
        alphas: &[f64],
        p_terms: &[&dyn Fn(f64) -> f64],
        potential: &dyn Fn(f64) -> f64,
    ) -> Result<Self> {
        let nodes = grid.closed_nodes();
        let p = p_terms.iter().map(|f| nodes.iter().map(|&x| f(x)).collect()).collect();
        let q = nodes.iter().map(|&x| potential(x)).collect();
        Self::new(nodes, alphas.to_vec(), p, q)
    }

    fn validate(&self) -> Result<()> {
        let ell = self.alphas.len();
        if ell == 0 {
            return Err(Error::Admissibility("at least one fractional term is required".into()));
        }
        if self.p_terms.len() != ell {
            return Err(Error::Shape(format!("{} orders but {} coefficient fields", ell, self.p_terms.len())));
        }
        let n = self.nodes.len();
        if n < 2 {
            return Err(Error::Shape("a model needs at least two nodes".into()));
        }
        if self.nodes.windows(2).any(|w| !(w[1] > w[0])) || self.nodes.iter().any(|x| !x.is_finite()) {
            return Err(Error::Shape("model nodes must be finite and strictly increasing".into()));
        }
        for (j, field) in self.p_terms.iter().chain(std::iter::once(&self.potential)).enumerate() {
            if field.len() != n {
                return Err(Error::Shape(format!("field {j} has {} values, expected {n}", field.len())));
            }
            if field.iter().any(|v| !v.is_finite()) {
                return Err(Error::Admissibility(format!("field {j} has non-finite values")));
            }
        }
        for (j, &a) in self.alphas.iter().enumerate() {
            if !(a > 0.0 && a < 1.0) {
                return Err(Error::Admissibility(format!("order α_{} = {a} must lie in (0, 1)", j + 1)));
            }
        }
        if let Some(j) = self.alphas.windows(2).position(|w| !(w[0] > w[1])) {
            return Err(Error::Admissibility(format!(
                "orders must satisfy 0 < α_ℓ < … < α_1 < 1, but α_{} = {} ≤ α_{} = {}",
                j + 1,
                self.alphas[j],
                j + 2,
                self.alphas[j + 1]
            )));
        }
        if let Some((i, v)) = self.p_terms[0].iter().enumerate().find(|(_, v)| !(**v > 0.0)) {
            return Err(Error::Admissibility(format!(
                "p_1 must be positive on the closed domain, p_1 = {v} at x = {}",
                self.nodes[i]
            )));
        }
        for (j, field) in self.p_terms.iter().enumerate().skip(1) {
            if let Some((i, v)) = field.iter().enumerate().find(|(_, v)| **v < 0.0) {
                return Err(Error::Admissibility(format!(
                    "p_{} must be non-negative, p_{} = {v} at x = {}",
                    j + 1,
                    j + 1,
                    self.nodes[i]
                )));
            }
            if field.iter().all(|v| *v == 0.0) {
                return Err(Error::Admissibility(format!("p_{} must not vanish identically", j + 1)));
            }
        }
        if let Some((i, v)) = self.potential.iter().enumerate().find(|(_, v)| **v > 0.0) {
            return Err(Error::Admissibility(format!("p must be non-positive, p = {v} at x = {}", self.nodes[i])));
        }
        Ok(())
    }

    pub fn ell(&self) -> usize {
        self.alphas.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn p_terms(&self) -> &[Vec<f64>] {
        &self.p_terms
    }

    pub fn potential(&self) -> &[f64] {
        &self.potential
    }

    /// Whether the nodes coincide with the closed nodes of `grid`.
    pub fn matches_grid(&self, grid: &SpatialGrid) -> bool {
        let closed = grid.closed_nodes();
        closed.len() == self.nodes.len()
            && closed.iter().zip(&self.nodes).all(|(a, b)| (a - b).abs() <= 1e-12 * grid.length())
    }

    /// The model linearly interpolated onto the closed nodes of `grid`.
    pub fn on_grid(&self, grid: &SpatialGrid) -> Result<Self> {
        if self.matches_grid(grid) {
            return Ok(self.clone());
        }
        let lo = self.nodes[0];
        let hi = *self.nodes.last().expect("validated");
        let tol = 1e-12 * (hi - lo).abs().max(1.0);
        if (lo - 0.0).abs() > tol || (hi - grid.length()).abs() > tol {
            return Err(Error::Shape(format!("model spans [{lo}, {hi}] but the grid spans [0, {}]", grid.length())));
        }
        let target = grid.closed_nodes();
        let resample =
            |field: &[f64]| -> Vec<f64> { target.iter().map(|&x| interpolate(&self.nodes, field, x)).collect() };
        Self::new(
            target.clone(),
            self.alphas.clone(),
            self.p_terms.iter().map(|f| resample(f)).collect(),
            resample(&self.potential),
        )
    }

    /// p̃_j = p_j / p₁ at every node, for j = 1 … ℓ.
    pub fn normalized_terms(&self) -> Vec<Vec<f64>> {
        self.p_terms.iter().map(|f| f.iter().zip(&self.p_terms[0]).map(|(p, p1)| p / p1).collect()).collect()
    }
}

/// Piecewise-linear interpolation, clamped at the ends.
pub fn interpolate(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    if x <= xs[0] {
        return ys[0];
    }
    let last = xs.len() - 1;
    if x >= xs[last] {
        return ys[last];
    }
    let k = xs.partition_point(|&v| v <= x) - 1;
    let w = (x - xs[k]) / (xs[k + 1] - xs[k]);
    ys[k] * (1.0 - w) + ys[k + 1] * w
}
