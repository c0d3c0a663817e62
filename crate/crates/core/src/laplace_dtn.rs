//! Laplace transforms of sampled data, the spectral symbol
//! `P_s(x) = p(x) − Σ p_j(x) s^{α_j}` and the Dirichlet-to-Neumann data of
//! `Δv + P_s v = 0`, `v = g` on the boundary.

use serde::{Deserialize, Serialize};

use crate::caputo::{Excitation, TimeSeries};
use crate::error::{Error, Result};
use crate::forward::{boundary_flux, BoundaryPair, SolutionField};
use crate::linalg::Tridiagonal;
use crate::model::{interpolate, FractionalModel};
use crate::quadrature::gauss_legendre;
use crate::spectral::SpatialGrid;

/// Relative threshold ζ below which |Lλ(s)| counts as a zero of the transform.
pub const SIGMA_ZETA: f64 = 1e-6;

/// Treatment of the transform beyond the last sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tail {
    /// Ignore everything after the last sample.
    Truncate,
    /// Fit `c e^{−γt}` to the last tenth of the window and integrate it to infinity.
    ExpFit,
}

/// `∫_0^∞ e^{−st} u(t) dt` of a sampled signal.
///
/// The samples are interpolated by local cubics and integrated with four
/// Gauss–Legendre nodes per interval.
pub fn laplace_transform(series: &TimeSeries, s: f64, tail: Tail) -> Result<f64> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::Domain(format!("Laplace abscissa must be positive, got {s}")));
    }
    let t = series.t();
    let v = series.values();
    let n = t.len();
    let rule = gauss_legendre(4);
    let mut total = 0.0;
    for k in 0..n - 1 {
        let lo = k.saturating_sub(1).min(n.saturating_sub(4));
        let hi = (lo + 4).min(n);
        let xs = &t[lo..hi];
        let ys = &v[lo..hi];
        let mapped = rule.mapped(t[k], t[k + 1]);
        for (&x, &w) in mapped.nodes.iter().zip(&mapped.weights) {
            total += w * (-s * x).exp() * lagrange(xs, ys, x);
        }
    }
    let tail_value = match tail {
        Tail::Truncate => 0.0,
        Tail::ExpFit => exponential_tail(t, v, s),
    };
    if tail_value.abs() > 0.01 * total.abs() && tail_value != 0.0 {
        log::warn!("Laplace tail estimate {tail_value:e} exceeds 1% of the integral {total:e} at s = {s}");
    }
    Ok(total + tail_value)
}

fn lagrange(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let mut acc = 0.0;
    for (i, (&xi, &yi)) in xs.iter().zip(ys).enumerate() {
        let mut basis = 1.0;
        for (j, &xj) in xs.iter().enumerate() {
            if i != j {
                basis *= (x - xj) / (xi - xj);
            }
        }
        acc += yi * basis;
    }
    acc
}

/// `c e^{−(s+γ)T}/(s+γ)` from a log-linear fit of the last tenth of the window.
fn exponential_tail(t: &[f64], v: &[f64], s: f64) -> f64 {
    let t_max = *t.last().expect("non-empty");
    let start = 0.9 * t_max;
    let window: Vec<(f64, f64)> = t.iter().zip(v).filter(|(x, _)| **x >= start).map(|(&x, &y)| (x, y)).collect();
    let sign = window.last().map(|w| w.1.signum()).unwrap_or(0.0);
    if window.len() < 2 || sign == 0.0 || window.iter().any(|w| w.1 * sign <= 0.0) {
        return 0.0;
    }
    let m = window.len() as f64;
    let mx = window.iter().map(|w| w.0).sum::<f64>() / m;
    let my = window.iter().map(|w| (w.1 * sign).ln()).sum::<f64>() / m;
    let sxx: f64 = window.iter().map(|w| (w.0 - mx).powi(2)).sum();
    let sxy: f64 = window.iter().map(|w| (w.0 - mx) * ((w.1 * sign).ln() - my)).sum();
    let rate = -sxy / sxx;
    if !(s + rate > 0.0) {
        return 0.0;
    }
    let log_c = my + rate * mx;
    sign * (log_c - (s + rate) * t_max).exp() / (s + rate)
}

/// Uniform samples of λ and of ∂^α λ on `[0, t_max]`.
fn excitation_pair(exc: &Excitation, alpha: f64, t_max: f64, dt: f64) -> Result<(TimeSeries, TimeSeries)> {
    let steps = (t_max / dt).round() as usize;
    let t = TimeSeries::uniform_grid(t_max / steps as f64, steps);
    let lam = t.iter().map(|&x| exc.value(x)).collect();
    let der = t.iter().map(|&x| exc.caputo(alpha, x)).collect::<Result<Vec<f64>>>()?;
    Ok((TimeSeries::new(t.clone(), lam)?, TimeSeries::new(t, der)?))
}

/// max_s |L(∂^α λ)(s) − s^α Lλ(s)| / |s^α Lλ(s)|, both transforms computed numerically.
///
/// Samples cover `[0, 40]` with step `10⁻³`.
pub fn verify_laplace_identity(exc: &Excitation, alpha: f64, s_grid: &SGrid) -> Result<f64> {
    verify_laplace_identity_with(exc, alpha, s_grid, 40.0, 1e-3)
}

/// [`verify_laplace_identity`] with an explicit window and step.
pub fn verify_laplace_identity_with(exc: &Excitation, alpha: f64, s_grid: &SGrid, t_max: f64, dt: f64) -> Result<f64> {
    exc.check_admissible()?;
    let (lam, der) = excitation_pair(exc, alpha, t_max, dt)?;
    let mut worst: f64 = 0.0;
    for &s in s_grid.values() {
        let lhs = laplace_transform(&der, s, Tail::Truncate)?;
        let rhs = s.powf(alpha) * laplace_transform(&lam, s, Tail::Truncate)?;
        let diff = (lhs - rhs).abs();
        let rel = if rhs != 0.0 { diff / rhs.abs() } else { diff };
        worst = worst.max(rel);
    }
    Ok(worst)
}

/// Ascending Laplace abscissae, all at or above the convergence abscissa C₁.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SGrid {
    values: Vec<f64>,
    c1: f64,
}

impl SGrid {
    pub fn new(values: Vec<f64>, c1: f64) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Domain("s-grid is empty".into()));
        }
        if !(c1 > 0.0) {
            return Err(Error::Domain(format!("C1 must be positive, got {c1}")));
        }
        if values.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Domain("s-grid must be strictly ascending".into()));
        }
        if let Some(s) = values.iter().find(|&&s| !(s >= c1) || !s.is_finite()) {
            return Err(Error::Domain(format!("s = {s} lies below C1 = {c1}")));
        }
        Ok(Self { values, c1 })
    }

    /// `count` log-spaced points on `[lo, hi]`.
    pub fn log_spaced(lo: f64, hi: f64, count: usize, c1: f64) -> Result<Self> {
        if !(lo > 0.0 && hi > lo) || count < 2 {
            return Err(Error::Domain(format!(
                "log-spaced grid needs 0 < lo < hi and at least 2 points, got [{lo}, {hi}] x {count}"
            )));
        }
        let (a, b) = (lo.ln(), hi.ln());
        let mut values: Vec<f64> = (0..count).map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp()).collect();
        values[0] = lo;
        values[count - 1] = hi;
        Self::new(values, c1)
    }

    /// The default grid: 40 log-spaced points on [1, 100] with C₁ = 1.
    pub fn default_grid() -> Self {
        Self::log_spaced(1.0, 100.0, 40, 1.0).expect("valid default grid")
    }

    /// Drops abscissae where |Lλ(s)| ≤ ζ·max_grid |Lλ|.
    pub fn admissible_for(&self, exc: &Excitation) -> Result<Self> {
        let transforms = self.values.iter().map(|&s| exc.laplace(s)).collect::<Result<Vec<f64>>>()?;
        let peak = transforms.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let kept: Vec<f64> = self
            .values
            .iter()
            .zip(&transforms)
            .filter(|(_, l)| l.abs() > SIGMA_ZETA * peak && l.abs() > 0.0)
            .map(|(s, _)| *s)
            .collect();
        if kept.is_empty() {
            return Err(Error::SigmaMembership {
                s: self.values[0],
                transform: transforms[0],
                threshold: SIGMA_ZETA * peak,
            });
        }
        Self::new(kept, self.c1)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn c1(&self) -> f64 {
        self.c1
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Rejects `s` unless |Lλ(s)| exceeds ζ times the peak of |Lλ| over `[C₁, 100 C₁]`.
pub fn check_sigma_membership(exc: &Excitation, s: f64, c1: f64) -> Result<f64> {
    let transform = exc.laplace(s)?;
    let probe = SGrid::log_spaced(c1, 100.0 * c1, 40, c1)?;
    let peak = probe
        .values()
        .iter()
        .map(|&x| exc.laplace(x).map(f64::abs))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(transform.abs(), f64::max);
    let threshold = SIGMA_ZETA * peak;
    if !(transform.abs() > threshold) || s < c1 {
        return Err(Error::SigmaMembership { s, transform, threshold });
    }
    Ok(transform)
}

/// `P_s` at arbitrary locations, linearly interpolating the model fields between nodes.
pub fn spectral_symbol(model: &FractionalModel, s: f64, locations: &[f64]) -> Result<Vec<f64>> {
    if !(s > 0.0) {
        return Err(Error::Domain(format!("symbol needs s > 0, got {s}")));
    }
    let nodes = model.nodes();
    let powers: Vec<f64> = model.alphas().iter().map(|a| s.powf(*a)).collect();
    Ok(locations
        .iter()
        .map(|&x| {
            let mut v = interpolate(nodes, model.potential(), x);
            for (field, sa) in model.p_terms().iter().zip(&powers) {
                v -= interpolate(nodes, field, x) * sa;
            }
            v
        })
        .collect())
}

/// `P_s(x)` sampled over an s-grid: `values[i][m]` is the symbol at `s_i`, `locations[m]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolSamples {
    s_grid: SGrid,
    locations: Vec<f64>,
    values: Vec<Vec<f64>>,
}

impl SymbolSamples {
    pub fn new(s_grid: SGrid, locations: Vec<f64>, values: Vec<Vec<f64>>) -> Result<Self> {
        if locations.is_empty() {
            return Err(Error::Shape("symbol samples need at least one location".into()));
        }
        if values.len() != s_grid.len() || values.iter().any(|row| row.len() != locations.len()) {
            return Err(Error::Shape(format!("symbol table must be {} x {}", s_grid.len(), locations.len())));
        }
        if values.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Domain("symbol samples must be finite".into()));
        }
        Ok(Self { s_grid, locations, values })
    }

    pub fn from_model(model: &FractionalModel, s_grid: &SGrid, locations: &[f64]) -> Result<Self> {
        let values = s_grid.values().iter().map(|&s| spectral_symbol(model, s, locations)).collect::<Result<_>>()?;
        Self::new(s_grid.clone(), locations.to_vec(), values)
    }

    pub fn s_grid(&self) -> &SGrid {
        &self.s_grid
    }

    pub fn locations(&self) -> &[f64] {
        &self.locations
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    /// The samples at one location, ordered by s.
    pub fn column(&self, m: usize) -> Vec<f64> {
        self.values.iter().map(|row| row[m]).collect()
    }

    /// Whether s ↦ P_s(x) strictly decreases at every location.
    pub fn is_strictly_decreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[0].iter().zip(&w[1]).all(|(a, b)| b < a))
    }

    /// The samples multiplied pointwise by `factors` (same layout as `values`).
    pub fn perturbed(&self, factors: &[Vec<f64>]) -> Result<Self> {
        let values =
            self.values.iter().zip(factors).map(|(row, f)| row.iter().zip(f).map(|(v, k)| v * k).collect()).collect();
        Self::new(self.s_grid.clone(), self.locations.clone(), values)
    }

    /// All samples scaled by one factor.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        let values = self.values.iter().map(|row| row.iter().map(|v| c * v).collect()).collect();
        Self::new(self.s_grid.clone(), self.locations.clone(), values)
    }
}

/// Boundary data of one Dirichlet problem at abscissa `s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DtNSample {
    pub s: f64,
    pub g: BoundaryPair,
    pub dirichlet_trace: BoundaryPair,
    /// Outward normal derivative from second-order one-sided differences.
    pub neumann_trace: BoundaryPair,
    /// Outward flux consistent with the discrete energy form; exactly symmetric.
    pub energy_trace: BoundaryPair,
}

/// Solves `Δ_h v + P_s v = 0` with `v = g` at both ends.
///
/// `symbol` holds P_s on the closed grid. The system `−Δ_h − P_s` must be positive
/// definite; otherwise the problem is reported as not solvable.
pub fn dtn_solve(symbol: &[f64], grid: &SpatialGrid, g: BoundaryPair, s: f64) -> Result<DtNSample> {
    let v = dirichlet_solution(symbol, grid, g)?;
    let n = v.len();
    let h = grid.spacing();
    let (left, right) = boundary_flux(&v, h);
    let energy_left = (v[0] - v[1]) / h - 0.5 * h * symbol[0] * v[0];
    let energy_right = (v[n - 1] - v[n - 2]) / h - 0.5 * h * symbol[n - 1] * v[n - 1];
    Ok(DtNSample {
        s,
        g,
        dirichlet_trace: BoundaryPair::new(v[0], v[n - 1]),
        neumann_trace: BoundaryPair::new(left, right),
        energy_trace: BoundaryPair::new(energy_left, energy_right),
    })
}

/// The closed-grid solution of the discrete Dirichlet problem.
pub fn dirichlet_solution(symbol: &[f64], grid: &SpatialGrid, g: BoundaryPair) -> Result<Vec<f64>> {
    let n = grid.n_interior();
    if symbol.len() != n + 2 {
        return Err(Error::Shape(format!("symbol has {} values, expected {}", symbol.len(), n + 2)));
    }
    let inv_h2 = 1.0 / (grid.spacing() * grid.spacing());
    let diag: Vec<f64> = symbol[1..=n].iter().map(|p| 2.0 * inv_h2 - p).collect();
    let matrix = Tridiagonal::new(vec![-inv_h2; n], diag, vec![-inv_h2; n]);
    let lu = matrix.factor().map_err(|e| Error::Solvability(format!("factorization failed: {e}")))?;
    let pivot = lu.min_pivot();
    if !(pivot > 0.0) {
        return Err(Error::Solvability(format!("−Δ_h − P_s is not positive definite (smallest pivot {pivot:e})")));
    }
    let mut rhs = vec![0.0; n];
    rhs[0] += inv_h2 * g.left;
    rhs[n - 1] += inv_h2 * g.right;
    let interior = lu.solve(&rhs);
    let mut v = Vec::with_capacity(n + 2);
    v.push(g.left);
    v.extend(interior);
    v.push(g.right);
    Ok(v)
}

/// DtN data of the normalized transform `L u(·, s) / Lλ(s)` of a simulated field.
///
/// Both the traces and λ are transformed with the same quadrature on the
/// solution's time samples.
pub fn dtn_from_timeseries(sol: &SolutionField, exc: &Excitation, s: f64, c1: f64) -> Result<DtNSample> {
    check_sigma_membership(exc, s, c1)?;
    let t = sol.t().to_vec();
    let transform = |values: Vec<f64>| -> Result<f64> {
        laplace_transform(&TimeSeries::new(t.clone(), values)?, s, Tail::Truncate)
    };
    let lam = transform(t.iter().map(|&x| exc.value(x)).collect())?;
    if lam == 0.0 {
        return Err(Error::SigmaMembership { s, transform: lam, threshold: 0.0 });
    }
    let values = sol.values();
    let last = values[0].len() - 1;
    let left = transform(values.iter().map(|u| u[0]).collect())? / lam;
    let right = transform(values.iter().map(|u| u[last]).collect())? / lam;
    let flux_left = transform(sol.flux_left().to_vec())? / lam;
    let flux_right = transform(sol.flux_right().to_vec())? / lam;
    let g = BoundaryPair::new(left, right);
    Ok(DtNSample {
        s,
        g,
        dirichlet_trace: g,
        neumann_trace: BoundaryPair::new(flux_left, flux_right),
        energy_trace: BoundaryPair::new(flux_left, flux_right),
    })
}

/// Closed-grid Laplace transform of every node of a simulated field.
pub fn transform_field(sol: &SolutionField, s: f64) -> Result<Vec<f64>> {
    let t = sol.t();
    let width = sol.values()[0].len();
    (0..width)
        .map(|m| {
            let series = TimeSeries::new(t.to_vec(), sol.values().iter().map(|u| u[m]).collect())?;
            laplace_transform(&series, s, Tail::Truncate)
        })
        .collect()
}

/// ‖Δ_h V + P_s V‖ / ‖P_s V‖ over interior nodes, with `V` the transformed field.
pub fn elliptic_residual(sol: &SolutionField, model: &FractionalModel, s: f64) -> Result<f64> {
    let grid = *sol.grid();
    let field = transform_field(sol, s)?;
    let symbol = spectral_symbol(model, s, &grid.closed_nodes())?;
    let inv_h2 = 1.0 / (grid.spacing() * grid.spacing());
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 1..=grid.n_interior() {
        let lap = (field[i - 1] - 2.0 * field[i] + field[i + 1]) * inv_h2;
        let pv = symbol[i] * field[i];
        num += (lap + pv).powi(2);
        den += pv * pv;
    }
    Ok((num / den).sqrt())
}
