//! Forward solvers for `Σ p_j ∂_t^{α_j} u = Δu + p u`, `u(·,0) = 0`, `u = λ(t) g` on the boundary.
//!
//! Both solvers work with the lifted unknown `ũ = u − λ g̃`, which satisfies
//!
//! ```text
//! ∂^{α₁}ũ + Σ_{j≥2} p̃_j ∂^{α_j}ũ = −Aũ + B·∇ũ + b ũ + F
//! ```
//!
//! with `p̃_j = p_j/p₁`, `b = p/p₁` and
//! `F = (λ(Δg̃ + p g̃) − Σ_j ∂^{α_j}λ p_j g̃)/p₁`.
//!
//! [`solve_picard`] iterates the mild form mode by mode on real time. In the
//! variable `τ = (t−s)/t` every term becomes
//! `t^γ ∫_0^1 τ^{γ−1} E_{α₁,β}(−λ_k t^{α₁} τ^{α₁}) v((1−τ)t) dτ`; the lower-order
//! Caputo terms are integrated by parts against the kernel, which turns them into
//! `γ = β = α₁ − α_j` integrals of `p̃_j ũ` itself. Iterates live at Chebyshev
//! points of `[0, T]` and are interpolated barycentrically.
//!
//! [`solve_l1`] is an implicit L1 time-stepping scheme on the same grid.

use rayon::prelude::*;

use crate::caputo::{validate_grid, Excitation};
use crate::error::{Error, Result};
use crate::linalg::Tridiagonal;
use crate::melf::{gamma, ml_eval, MlParams};
use crate::model::FractionalModel;
use crate::quadrature::{gauss_jacobi_unit, gauss_legendre, Rule};
use crate::spectral::{assemble_operator, default_modes, eigensystem, EigenSystem, SpatialGrid};

/// Dirichlet data g at x = 0 and x = L.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct BoundaryPair {
    pub left: f64,
    pub right: f64,
}

impl BoundaryPair {
    pub const fn new(left: f64, right: f64) -> Self {
        Self { left, right }
    }

    pub fn max_abs(&self) -> f64 {
        self.left.abs().max(self.right.abs())
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self::new(c * self.left, c * self.right)
    }
}

/// Linear lifting g̃(x) = g(0)(1 − x/L) + g(L) x/L on the closed grid.
pub fn lift_boundary(g: BoundaryPair, grid: &SpatialGrid) -> Vec<f64> {
    let length = grid.length();
    let mut lift: Vec<f64> =
        grid.closed_nodes().iter().map(|&x| g.left * (1.0 - x / length) + g.right * (x / length)).collect();
    lift[0] = g.left;
    *lift.last_mut().expect("closed grid is non-empty") = g.right;
    lift
}

/// Outward normal derivatives at x = 0 and x = L from second-order one-sided differences.
pub fn boundary_flux(closed: &[f64], spacing: f64) -> (f64, f64) {
    let n = closed.len();
    let left = -(-3.0 * closed[0] + 4.0 * closed[1] - closed[2]) / (2.0 * spacing);
    let right = (3.0 * closed[n - 1] - 4.0 * closed[n - 2] + closed[n - 3]) / (2.0 * spacing);
    (left, right)
}

/// Coefficients of the lifted problem on the interior nodes.
#[derive(Debug, Clone)]
pub struct LiftedProblem {
    grid: SpatialGrid,
    alphas: Vec<f64>,
    g_lift: Vec<f64>,
    /// p₁ on the closed grid.
    p1: Vec<f64>,
    /// B·∇ discretized as diag(1/p₁)Δ_h + A_h on functions vanishing at the boundary.
    drift: Tridiagonal,
    b_field: Vec<f64>,
    ptilde: Vec<Vec<f64>>,
    /// (Δ_h g̃ + p g̃)/p₁.
    source_value: Vec<f64>,
    /// p_j g̃/p₁ for every term.
    source_terms: Vec<Vec<f64>>,
}

impl LiftedProblem {
    pub fn new(model: &FractionalModel, g: BoundaryPair, grid: &SpatialGrid) -> Result<Self> {
        Self::with_lift(model, lift_boundary(g, grid), grid)
    }

    /// Builds the problem around an arbitrary closed-grid lifting.
    pub fn with_lift(model: &FractionalModel, g_lift: Vec<f64>, grid: &SpatialGrid) -> Result<Self> {
        let model = model.on_grid(grid)?;
        if g_lift.len() != grid.n_interior() + 2 {
            return Err(Error::Shape(format!(
                "lifting has {} values, expected {}",
                g_lift.len(),
                grid.n_interior() + 2
            )));
        }
        let n = grid.n_interior();
        let h2 = grid.spacing() * grid.spacing();
        let p1 = model.p_terms()[0].clone();
        let op = assemble_operator(grid, &p1)?;
        let lap = grid.laplacian();
        let a = op.matrix();
        let mut drift = Tridiagonal::new(vec![0.0; n], vec![0.0; n], vec![0.0; n]);
        for r in 0..n {
            let w = 1.0 / p1[r + 1];
            drift.sub[r] = w * lap.sub[r] + a.sub[r];
            drift.diag[r] = w * lap.diag[r] + a.diag[r];
            drift.sup[r] = w * lap.sup[r] + a.sup[r];
        }
        drift.sub[0] = 0.0;
        drift.sup[n - 1] = 0.0;
        let interior = |field: &[f64]| -> Vec<f64> { field[1..=n].to_vec() };
        let b_field: Vec<f64> = (1..=n).map(|i| model.potential()[i] / p1[i]).collect();
        let ptilde = model.normalized_terms().iter().map(|f| interior(f)).collect();
        let source_value = (1..=n)
            .map(|i| {
                let lap_g = (g_lift[i - 1] - 2.0 * g_lift[i] + g_lift[i + 1]) / h2;
                (lap_g + model.potential()[i] * g_lift[i]) / p1[i]
            })
            .collect();
        let source_terms =
            model.p_terms().iter().map(|f| (1..=n).map(|i| f[i] * g_lift[i] / p1[i]).collect()).collect();
        Ok(Self {
            grid: *grid,
            alphas: model.alphas().to_vec(),
            g_lift,
            p1,
            drift,
            b_field,
            ptilde,
            source_value,
            source_terms,
        })
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn g_lift(&self) -> &[f64] {
        &self.g_lift
    }

    pub fn b_field(&self) -> &[f64] {
        &self.b_field
    }

    pub fn ptilde_fields(&self) -> &[Vec<f64>] {
        &self.ptilde
    }

    pub fn drift(&self) -> &Tridiagonal {
        &self.drift
    }

    /// F(·, t) on the interior nodes.
    pub fn source_at(&self, exc: &Excitation, t: f64) -> Result<Vec<f64>> {
        let lam = exc.value(t);
        let rates = self.alphas.iter().map(|&a| exc.caputo(a, t)).collect::<Result<Vec<f64>>>()?;
        Ok(self.combine(lam, &rates))
    }

    /// ∂_t F(·, t) on the interior nodes.
    pub fn source_rate_at(&self, exc: &Excitation, t: f64) -> Result<Vec<f64>> {
        let lam = exc.derivative(t);
        let rates = self.alphas.iter().map(|&a| exc.caputo_rate(a, t)).collect::<Result<Vec<f64>>>()?;
        Ok(self.combine(lam, &rates))
    }

    fn combine(&self, lam: f64, caputo: &[f64]) -> Vec<f64> {
        let mut out: Vec<f64> = self.source_value.iter().map(|v| lam * v).collect();
        for (d, field) in caputo.iter().zip(&self.source_terms) {
            for (o, f) in out.iter_mut().zip(field) {
                *o -= d * f;
            }
        }
        out
    }
}

/// F on every time of `t_grid`, interior nodes only.
pub fn assemble_source(
    model: &FractionalModel,
    exc: &Excitation,
    g_lift: &[f64],
    grid: &SpatialGrid,
    t_grid: &[f64],
) -> Result<Vec<Vec<f64>>> {
    exc.check_admissible()?;
    let lifted = LiftedProblem::with_lift(model, g_lift.to_vec(), grid)?;
    t_grid.iter().map(|&t| lifted.source_at(exc, t)).collect()
}

/// A space-time solution with its boundary flux traces.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionField {
    grid: SpatialGrid,
    t: Vec<f64>,
    values: Vec<Vec<f64>>,
    flux_left: Vec<f64>,
    flux_right: Vec<f64>,
    increments: Vec<f64>,
}

impl SolutionField {
    fn from_values(grid: SpatialGrid, t: Vec<f64>, values: Vec<Vec<f64>>, increments: Vec<f64>) -> Self {
        let h = grid.spacing();
        let (flux_left, flux_right) = values.iter().map(|u| boundary_flux(u, h)).unzip();
        Self { grid, t, values, flux_left, flux_right, increments }
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn t(&self) -> &[f64] {
        &self.t
    }

    /// One closed-grid profile per time.
    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn flux_left(&self) -> &[f64] {
        &self.flux_left
    }

    pub fn flux_right(&self) -> &[f64] {
        &self.flux_right
    }

    /// Picard increments ‖A(ũ_{n+1} − ũ_n)‖; empty for time-stepping solves.
    pub fn increments(&self) -> &[f64] {
        &self.increments
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().flatten().fold(0.0, |m: f64, v| m.max(v.abs()))
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().flatten().fold(f64::NEG_INFINITY, |m: f64, v| m.max(*v))
    }

    /// Relative discrete L²(Ω×(0,T)) distance ‖self − other‖/‖other‖ over shared samples.
    pub fn relative_l2_distance(&self, other: &SolutionField) -> Result<f64> {
        if self.grid != other.grid || self.t.len() != other.t.len() {
            return Err(Error::Shape("solution fields live on different grids".into()));
        }
        if self.t.iter().zip(&other.t).any(|(a, b)| (a - b).abs() > 1e-9 * a.abs().max(1.0)) {
            return Err(Error::Shape("solution fields have different time samples".into()));
        }
        let mut num = 0.0;
        let mut den = 0.0;
        for (a, b) in self.values.iter().zip(&other.values) {
            for (x, y) in a.iter().zip(b) {
                num += (x - y) * (x - y);
                den += y * y;
            }
        }
        Ok(if den > 0.0 { (num / den).sqrt() } else { num.sqrt() })
    }

    /// Keeps every `stride`-th time sample, always including the first.
    pub fn subsampled(&self, stride: usize) -> SolutionField {
        let stride = stride.max(1);
        let pick = |v: &[f64]| v.iter().step_by(stride).copied().collect::<Vec<f64>>();
        SolutionField {
            grid: self.grid,
            t: pick(&self.t),
            values: self.values.iter().step_by(stride).cloned().collect(),
            flux_left: pick(&self.flux_left),
            flux_right: pick(&self.flux_right),
            increments: self.increments.clone(),
        }
    }

    /// Keeps the samples with `t ≤ t_end`.
    pub fn truncated(&self, t_end: f64) -> SolutionField {
        let keep = self.t.partition_point(|&t| t <= t_end * (1.0 + 1e-12));
        SolutionField {
            grid: self.grid,
            t: self.t[..keep].to_vec(),
            values: self.values[..keep].to_vec(),
            flux_left: self.flux_left[..keep].to_vec(),
            flux_right: self.flux_right[..keep].to_vec(),
            increments: self.increments.clone(),
        }
    }
}

/// Tuning of the Picard solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PicardOptions {
    /// Stop once sup_t ‖A(ũ_{n+1} − ũ_n)‖ falls below this.
    pub tol: f64,
    pub max_iter: usize,
    /// Retained eigenmodes; `None` selects the default for the grid.
    pub n_modes: Option<usize>,
    /// Chebyshev intervals on [0, T].
    pub n_cheb: usize,
    /// Gauss nodes per quadrature panel.
    pub panel_nodes: usize,
}

impl Default for PicardOptions {
    fn default() -> Self {
        Self { tol: 1e-8, max_iter: 30, n_modes: None, n_cheb: 48, panel_nodes: 8 }
    }
}

/// Horizon beyond which the contraction profile has not been exercised.
pub const PICARD_VALIDATED_HORIZON: f64 = 4.0;

/// Chebyshev points of the second kind on [0, T] with barycentric weights.
fn chebyshev_points(t_end: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
    let nodes = (0..=n).map(|i| 0.5 * t_end * (1.0 - (std::f64::consts::PI * i as f64 / n as f64).cos())).collect();
    let weights = (0..=n)
        .map(|i| {
            let w = if i % 2 == 0 { 1.0 } else { -1.0 };
            if i == 0 || i == n {
                0.5 * w
            } else {
                w
            }
        })
        .collect();
    (nodes, weights)
}

/// Values of the Lagrange basis at `s`.
fn barycentric_basis(nodes: &[f64], weights: &[f64], s: f64) -> Vec<f64> {
    let scale = nodes.last().copied().unwrap_or(1.0).abs().max(1e-300);
    if let Some(j) = nodes.iter().position(|&x| (s - x).abs() <= 1e-15 * scale) {
        let mut e = vec![0.0; nodes.len()];
        e[j] = 1.0;
        return e;
    }
    let mut basis: Vec<f64> = nodes.iter().zip(weights).map(|(x, w)| w / (s - x)).collect();
    let total: f64 = basis.iter().sum();
    basis.iter_mut().for_each(|b| *b /= total);
    basis
}

/// Rule for `∫_0^1 σ^e f(σ) dσ`, graded geometrically toward both ends.
///
/// The first panel `[0, 2^{−levels}]` carries the weight exactly (Gauss–Jacobi);
/// dyadic panels follow up to 1/2 and mirror toward 1.
fn graded_rule(exponent: f64, levels: usize, end_levels: usize, panel: &Rule) -> Result<Rule> {
    let npan = panel.len();
    let first = gauss_jacobi_unit(npan, 0.0, exponent)?;
    let sigma0 = 0.5f64.powi(levels as i32);
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    let scale = sigma0.powf(1.0 + exponent);
    for (x, w) in first.nodes.iter().zip(&first.weights) {
        nodes.push(sigma0 * x);
        weights.push(w * scale);
    }
    let mut push_panel = |a: f64, b: f64| {
        let mapped = panel.mapped(a, b);
        for (x, w) in mapped.nodes.iter().zip(&mapped.weights) {
            nodes.push(*x);
            weights.push(w * x.powf(exponent));
        }
    };
    let mut a = sigma0;
    while a < 0.5 {
        push_panel(a, 2.0 * a);
        a *= 2.0;
    }
    for m in 1..=end_levels {
        push_panel(1.0 - 0.5f64.powi(m as i32), 1.0 - 0.5f64.powi(m as i32 + 1));
    }
    push_panel(1.0 - 0.5f64.powi(end_levels as i32 + 1), 1.0);
    Ok(Rule { nodes, weights })
}

/// Interaction table of one kernel, `table[(i·(N+1) + l)·K + k]`.
struct KernelTable {
    table: Vec<f64>,
    /// Per time node: quadrature times and their per-mode weights (flattened), if kept.
    samples: Vec<(Vec<f64>, Vec<f64>)>,
}

/// Builds `Σ_q W[i][q][k] L_l(s_{iq})` for the kernel `t^γ τ^{γ−1} E_{α₁,β}(−λ_k t^{α₁} τ^{α₁})`.
fn kernel_table(
    alpha1: f64,
    gamma_exp: f64,
    beta: f64,
    eigenvalues: &[f64],
    cheb: &(Vec<f64>, Vec<f64>),
    rule: &Rule,
    keep_samples: bool,
) -> Result<KernelTable> {
    let (nodes, bary) = cheb;
    let n1 = nodes.len();
    let k_modes = eigenvalues.len();
    let params = MlParams::new(alpha1, beta)?;
    type Row = (Vec<f64>, (Vec<f64>, Vec<f64>));
    let rows: Vec<Row> = (0..n1)
        .into_par_iter()
        .map(|i| -> Result<_> {
            let mut block = vec![0.0; n1 * k_modes];
            let mut times = Vec::new();
            let mut weights = Vec::new();
            if i == 0 {
                return Ok((block, (times, weights)));
            }
            let t = nodes[i];
            let pre = t.powf(gamma_exp) / alpha1;
            let ta = t.powf(alpha1);
            let mut w = vec![0.0; k_modes];
            for (&sigma, &omega) in rule.nodes.iter().zip(&rule.weights) {
                let s = t * (1.0 - sigma.powf(1.0 / alpha1));
                let basis = barycentric_basis(nodes, bary, s);
                for (wk, &lam) in w.iter_mut().zip(eigenvalues) {
                    *wk = pre * omega * ml_eval(params, -lam * ta * sigma)?;
                }
                for (l, &b) in basis.iter().enumerate() {
                    if b == 0.0 {
                        continue;
                    }
                    let row = &mut block[l * k_modes..(l + 1) * k_modes];
                    for (r, wk) in row.iter_mut().zip(&w) {
                        *r += wk * b;
                    }
                }
                if keep_samples {
                    times.push(s);
                    weights.extend_from_slice(&w);
                }
            }
            Ok((block, (times, weights)))
        })
        .collect::<Result<_>>()?;
    let mut table = Vec::with_capacity(n1 * n1 * k_modes);
    let mut samples = Vec::with_capacity(n1);
    for (block, sample) in rows {
        table.extend_from_slice(&block);
        samples.push(sample);
    }
    Ok(KernelTable { table, samples })
}

/// Modal projection `Φᵀ h M Φ` of an interior operator.
fn project(eig: &EigenSystem, apply: impl Fn(&[f64]) -> Vec<f64>) -> Vec<Vec<f64>> {
    let images: Vec<Vec<f64>> = eig.eigenvectors().iter().map(|phi| apply(phi)).collect();
    eig.eigenvectors().iter().map(|row| images.iter().map(|col| eig.grid().inner(row, col)).collect()).collect()
}

fn check_time_grid(t_grid: &[f64]) -> Result<f64> {
    validate_grid(t_grid)?;
    Ok(*t_grid.last().expect("validated"))
}

/// Picard iteration of the mild formulation on real time.
pub fn solve_picard(
    model: &FractionalModel,
    exc: &Excitation,
    g: BoundaryPair,
    grid: &SpatialGrid,
    t_grid: &[f64],
    options: &PicardOptions,
) -> Result<SolutionField> {
    if !(options.tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {}", options.tol)));
    }
    if options.n_cheb < 2 || options.panel_nodes < 2 {
        return Err(Error::Domain("Picard needs at least 2 Chebyshev intervals and 2 panel nodes".into()));
    }
    let t_end = check_time_grid(t_grid)?;
    exc.check_admissible()?;
    if t_end > PICARD_VALIDATED_HORIZON {
        log::warn!(
            "Picard horizon T = {t_end} exceeds the validated range T <= {PICARD_VALIDATED_HORIZON}; \
             the contraction constant grows with T"
        );
    }
    let model = model.on_grid(grid)?;
    let lifted = LiftedProblem::new(&model, g, grid)?;
    let op = assemble_operator(grid, &lifted.p1)?;
    let n_modes = options.n_modes.unwrap_or_else(|| default_modes(grid));
    let eig = eigensystem(&op, n_modes)?;
    let lambdas = eig.eigenvalues().to_vec();
    let k_modes = lambdas.len();
    let alphas = model.alphas().to_vec();
    let alpha1 = alphas[0];

    let coupling = project(&eig, |v| {
        let mut out = lifted.drift.apply(v);
        for (o, (b, x)) in out.iter_mut().zip(lifted.b_field.iter().zip(v)) {
            *o += b * x;
        }
        out
    });
    let lower: Vec<Vec<Vec<f64>>> =
        lifted.ptilde[1..].iter().map(|pt| project(&eig, |v| v.iter().zip(pt).map(|(x, p)| x * p).collect())).collect();
    let source_value = eig.coefficients(&lifted.source_value);
    let source_terms: Vec<Vec<f64>> = lifted.source_terms.iter().map(|f| eig.coefficients(f)).collect();

    let cheb = chebyshev_points(t_end, options.n_cheb);
    let n1 = cheb.0.len();
    let c_max = lambdas[k_modes - 1] * t_end.powf(alpha1);
    let levels = (c_max.log2().ceil().max(0.0) as usize + 2).max(4);
    let panel = gauss_legendre(options.panel_nodes);

    let main_rule = graded_rule(0.0, levels, 10, &panel)?;
    let main = kernel_table(alpha1, alpha1, alpha1, &lambdas, &cheb, &main_rule, true)?;
    let mut forcing = vec![vec![0.0; k_modes]; n1];
    for (row, (times, weights)) in forcing.iter_mut().zip(&main.samples) {
        for (&s, w) in times.iter().zip(weights.chunks(k_modes)) {
            let lam = exc.value(s);
            let mut fk: Vec<f64> = source_value.iter().map(|v| lam * v).collect();
            for (&a, field) in alphas.iter().zip(&source_terms) {
                let d = exc.caputo(a, s)?;
                for (o, v) in fk.iter_mut().zip(field) {
                    *o -= d * v;
                }
            }
            for ((o, wk), v) in row.iter_mut().zip(w).zip(&fk) {
                *o += wk * v;
            }
        }
    }
    let lower_tables = alphas[1..]
        .iter()
        .map(|&aj| {
            let rule = graded_rule(-aj / alpha1, levels, 10, &panel)?;
            kernel_table(alpha1, alpha1 - aj, alpha1 - aj, &lambdas, &cheb, &rule, false)
        })
        .collect::<Result<Vec<_>>>()?;

    let matvec = |m: &[Vec<f64>], c: &[f64]| -> Vec<f64> {
        m.iter().map(|row| row.iter().zip(c).map(|(a, b)| a * b).sum()).collect()
    };
    let mut coeffs = vec![vec![0.0; k_modes]; n1];
    let mut history = Vec::new();
    loop {
        let driven: Vec<Vec<f64>> = coeffs.iter().map(|c| matvec(&coupling, c)).collect();
        let damped: Vec<Vec<Vec<f64>>> = lower.iter().map(|p| coeffs.iter().map(|c| matvec(p, c)).collect()).collect();
        let mut next = forcing.clone();
        for (i, row) in next.iter_mut().enumerate().skip(1) {
            for l in 0..n1 {
                let off = (i * n1 + l) * k_modes;
                let m = &main.table[off..off + k_modes];
                for ((r, mk), y) in row.iter_mut().zip(m).zip(&driven[l]) {
                    *r += mk * y;
                }
                for (table, y_j) in lower_tables.iter().zip(&damped) {
                    let m = &table.table[off..off + k_modes];
                    for ((r, mk), y) in row.iter_mut().zip(m).zip(&y_j[l]) {
                        *r -= mk * y;
                    }
                }
            }
        }
        let increment = next
            .iter()
            .zip(&coeffs)
            .map(|(a, b)| a.iter().zip(b).zip(&lambdas).map(|((x, y), l)| (l * (x - y)).powi(2)).sum::<f64>().sqrt())
            .fold(0.0, f64::max);
        coeffs = next;
        history.push(increment);
        log::debug!("Picard iteration {}: increment {increment:e}", history.len());
        if !increment.is_finite() {
            return Err(Error::Numeric(format!("Picard increment became non-finite at iteration {}", history.len())));
        }
        if increment < options.tol {
            break;
        }
        if history.len() >= options.max_iter {
            return Err(Error::Convergence { tol: options.tol, max_iter: options.max_iter, last: increment, history });
        }
    }

    let n = grid.n_interior();
    let values = t_grid
        .iter()
        .map(|&t| {
            let basis = barycentric_basis(&cheb.0, &cheb.1, t);
            let mut c = vec![0.0; k_modes];
            for (b, row) in basis.iter().zip(&coeffs) {
                for (ck, r) in c.iter_mut().zip(row) {
                    *ck += b * r;
                }
            }
            let lam = exc.value(t);
            let interior = eig.synthesize(&c);
            let mut closed = Vec::with_capacity(n + 2);
            closed.push(lam * g.left);
            closed.extend(interior.iter().zip(&lifted.g_lift[1..=n]).map(|(v, gl)| v + lam * gl));
            closed.push(lam * g.right);
            closed
        })
        .collect();
    Ok(SolutionField::from_values(*grid, t_grid.to_vec(), values, history))
}

/// Implicit L1 time stepping with `dt` up to `t_end` (full memory).
pub fn solve_l1(
    model: &FractionalModel,
    exc: &Excitation,
    g: BoundaryPair,
    grid: &SpatialGrid,
    dt: f64,
    t_end: f64,
) -> Result<SolutionField> {
    if !(dt > 0.0 && t_end > 0.0 && dt.is_finite() && t_end.is_finite()) {
        return Err(Error::Domain(format!("need dt > 0 and T > 0, got dt = {dt}, T = {t_end}")));
    }
    exc.check_admissible()?;
    let model = model.on_grid(grid)?;
    let steps = (t_end / dt).round().max(1.0) as usize;
    let n = grid.n_interior();
    let inv_h2 = 1.0 / (grid.spacing() * grid.spacing());
    let p_terms: Vec<Vec<f64>> = model.p_terms().iter().map(|f| f[1..=n].to_vec()).collect();
    let potential = &model.potential()[1..=n];
    let scales: Vec<f64> = model.alphas().iter().map(|&a| dt.powf(-a) / gamma(2.0 - a)).collect();
    let memory: Vec<Vec<f64>> = model
        .alphas()
        .iter()
        .map(|&a| {
            let q = 1.0 - a;
            (0..=steps).map(|m| ((m + 1) as f64).powf(q) - (m as f64).powf(q)).collect()
        })
        .collect();
    // Σ_j p_j a_j at every node.
    let mass: Vec<f64> = (0..n).map(|i| p_terms.iter().zip(&scales).map(|(p, a)| p[i] * a).sum()).collect();
    let diag: Vec<f64> = (0..n).map(|i| mass[i] - potential[i] + 2.0 * inv_h2).collect();
    let system = Tridiagonal::new(vec![-inv_h2; n], diag, vec![-inv_h2; n]).factor()?;

    let times: Vec<f64> = (0..=steps).map(|k| k as f64 * dt).collect();
    let mut values = Vec::with_capacity(steps + 1);
    values.push(vec![0.0; n + 2]);
    let mut increments: Vec<Vec<f64>> = Vec::with_capacity(steps);
    let mut previous = vec![0.0; n];
    for k in 1..=steps {
        let lam = exc.value(times[k]);
        let mut rhs = vec![0.0; n];
        for (j, (p, a)) in p_terms.iter().zip(&scales).enumerate() {
            let b = &memory[j];
            let mut hist = vec![0.0; n];
            for (m, d) in increments.iter().enumerate() {
                let w = b[k - 1 - m];
                for (h, dv) in hist.iter_mut().zip(d) {
                    *h += w * dv;
                }
            }
            for i in 0..n {
                rhs[i] += p[i] * a * (previous[i] - hist[i]);
            }
        }
        rhs[0] += inv_h2 * lam * g.left;
        rhs[n - 1] += inv_h2 * lam * g.right;
        let current = system.solve(&rhs);
        if current.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric(format!("L1 step {k} produced non-finite values")));
        }
        increments.push(current.iter().zip(&previous).map(|(a, b)| a - b).collect());
        let mut closed = Vec::with_capacity(n + 2);
        closed.push(lam * g.left);
        closed.extend_from_slice(&current);
        closed.push(lam * g.right);
        values.push(closed);
        previous = current;
    }
    Ok(SolutionField::from_values(*grid, times, values, Vec::new()))
}

/// Fitted contraction profile `log M₁ + n log(C T^{α₀} Γ(α₀)) − log Γ(nα₀ + 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContractionProfile {
    pub alpha0: f64,
    pub horizon: f64,
    pub log_m1: f64,
    pub constant: f64,
}

impl ContractionProfile {
    /// α₀ = min(α₁/2, α₁ − α_j) over the lower-order terms.
    pub fn exponent(alphas: &[f64]) -> f64 {
        alphas[1..].iter().fold(0.5 * alphas[0], |m, &a| m.min(alphas[0] - a))
    }

    /// Least-squares fit on the first `n_fit` increments, lifted to dominate them.
    pub fn fit(increments: &[f64], alphas: &[f64], horizon: f64, n_fit: usize) -> Result<Self> {
        let alpha0 = Self::exponent(alphas);
        let data: Vec<(f64, f64)> = increments
            .iter()
            .take(n_fit)
            .enumerate()
            .filter(|(_, v)| **v > 0.0)
            .map(|(i, v)| {
                let n = (i + 1) as f64;
                Ok((n, v.ln() + crate::melf::log_gamma(n * alpha0 + 1.0)?))
            })
            .collect::<Result<_>>()?;
        if data.len() < 2 {
            return Err(Error::Degenerate("need at least two positive increments to fit".into()));
        }
        let m = data.len() as f64;
        let mx = data.iter().map(|d| d.0).sum::<f64>() / m;
        let my = data.iter().map(|d| d.1).sum::<f64>() / m;
        let sxx: f64 = data.iter().map(|d| (d.0 - mx).powi(2)).sum();
        let sxy: f64 = data.iter().map(|d| (d.0 - mx) * (d.1 - my)).sum();
        let slope = sxy / sxx;
        let mut log_m1 = my - slope * mx;
        for &(n, y) in &data {
            log_m1 = log_m1.max(y - slope * n);
        }
        let constant = slope.exp() / (horizon.powf(alpha0) * gamma(alpha0));
        Ok(Self { alpha0, horizon, log_m1, constant })
    }

    /// Profile value for iteration `n` (1-based), in log space.
    pub fn log_bound(&self, n: usize) -> Result<f64> {
        let nf = n as f64;
        Ok(self.log_m1 + nf * (self.constant * self.horizon.powf(self.alpha0) * gamma(self.alpha0)).ln()
            - crate::melf::log_gamma(nf * self.alpha0 + 1.0)?)
    }

    /// Whether every increment lies at or below the profile (with relative slack).
    pub fn dominates(&self, increments: &[f64], slack: f64) -> Result<bool> {
        for (i, &v) in increments.iter().enumerate() {
            if v > 0.0 && v.ln() > self.log_bound(i + 1)? + slack.ln_1p() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference(grid: &SpatialGrid) -> FractionalModel {
        FractionalModel::constant(grid, &[0.8, 0.3], &[1.0, 0.5], -1.0).unwrap()
    }

    #[test]
    fn lifting_examples() {
        let g = SpatialGrid::new(1.0, 9).unwrap();
        assert!(lift_boundary(BoundaryPair::new(0.0, 0.0), &g).iter().all(|v| *v == 0.0));
        let lift = lift_boundary(BoundaryPair::new(0.0, 1.0), &g);
        for (x, v) in g.closed_nodes().iter().zip(&lift) {
            assert!((x - v).abs() < 1e-15);
        }
        let g2 = SpatialGrid::new(2.0, 3).unwrap();
        let lift = lift_boundary(BoundaryPair::new(2.0, -1.0), &g2);
        assert!((lift[2] - 0.5).abs() < 1e-15);
        assert_eq!((lift[0], lift[4]), (2.0, -1.0));
    }

    #[test]
    fn drift_vanishes_for_constant_leading_coefficient() {
        let g = SpatialGrid::new(1.0, 20).unwrap();
        let m = reference(&g);
        let lifted = LiftedProblem::new(&m, BoundaryPair::new(0.0, 1.0), &g).unwrap();
        let d = lifted.drift();
        let worst = d.diag.iter().chain(&d.sub).chain(&d.sup).fold(0.0f64, |a, v| a.max(v.abs()));
        assert!(worst < 1e-9, "{worst}");
        assert!(lifted.b_field().iter().all(|b| *b == -1.0));
    }

    #[test]
    fn drift_matches_weighted_laplacian() {
        let g = SpatialGrid::new(1.0, 40).unwrap();
        let p1 = |x: f64| 1.0 + 0.5 * x;
        let m = FractionalModel::from_functions(&g, &[0.6], &[&p1], &|_| 0.0).unwrap();
        let lifted = LiftedProblem::new(&m, BoundaryPair::new(0.0, 0.0), &g).unwrap();
        let op = assemble_operator(&g, &m.p_terms()[0]).unwrap();
        let v: Vec<f64> = g.interior_nodes().iter().map(|x| (3.0 * x).sin() * x * (1.0 - x)).collect();
        let lhs: Vec<f64> = {
            let d = lifted.drift().apply(&v);
            let a = op.matrix().apply(&v);
            d.iter().zip(&a).map(|(x, y)| x - y).collect()
        };
        let lap = g.laplacian().apply(&v);
        for (i, (l, r)) in lhs.iter().zip(&lap).enumerate() {
            let want = r / p1(g.interior_nodes()[i]);
            assert!((l - want).abs() < 1e-8 * want.abs().max(1.0));
        }
    }

    #[test]
    fn source_examples() {
        let g = SpatialGrid::new(1.0, 10).unwrap();
        let lift = lift_boundary(BoundaryPair::new(0.0, 1.0), &g);
        let t: Vec<f64> = (0..=5).map(|k| 0.2 * k as f64).collect();
        let zero = Excitation::PolyExp { a: 0.0, c: 1.0 };
        let m = reference(&g);
        let f = assemble_source(&m, &zero, &lift, &g, &t).unwrap();
        assert!(f.iter().flatten().all(|v| *v == 0.0));

        let single = FractionalModel::constant(&g, &[0.5], &[1.0], 0.0).unwrap();
        let exc = Excitation::default();
        let f = assemble_source(&single, &exc, &lift, &g, &t).unwrap();
        for (k, &tk) in t.iter().enumerate() {
            let d = exc.caputo(0.5, tk).unwrap();
            for (i, x) in g.interior_nodes().iter().enumerate() {
                assert!((f[k][i] + d * x).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn graded_rule_integrates_weighted_monomials() {
        let panel = gauss_legendre(8);
        for &e in &[0.0, -0.375, -0.6] {
            let rule = graded_rule(e, 20, 10, &panel).unwrap();
            for p in 0..4 {
                let got = rule.integrate(|s| s.powi(p));
                let want = 1.0 / (p as f64 + e + 1.0);
                assert!((got - want).abs() < 1e-12 * want, "e={e} p={p}: {got} vs {want}");
            }
            let got = rule.integrate(|s| (1.0 - s).powf(1.2));
            let want = crate::melf::gamma(e + 1.0) * crate::melf::gamma(2.2) / crate::melf::gamma(e + 3.2);
            assert!((got - want).abs() < 1e-9, "e={e}: {got} vs {want}");
        }
    }

    #[test]
    fn barycentric_reproduces_polynomials() {
        let (x, w) = chebyshev_points(2.0, 12);
        let f = |t: f64| 1.0 - 3.0 * t + t.powi(5);
        let vals: Vec<f64> = x.iter().map(|&t| f(t)).collect();
        for &s in &[0.0, 0.123, 1.0, 1.77, 2.0] {
            let b = barycentric_basis(&x, &w, s);
            let got: f64 = b.iter().zip(&vals).map(|(a, v)| a * v).sum();
            assert!((got - f(s)).abs() < 1e-12);
        }
    }

    #[test]
    fn lower_order_kernel_identity() {
        // ∫_0^t (t−s)^{α−1}E_{α,α}(−λ(t−s)^α) ∂^{β}v(s) ds equals
        // ∫_0^t (t−s)^{α−β−1}E_{α,α−β}(−λ(t−s)^α) v(s) ds for v(0) = 0.
        let (alpha, beta, lam, t): (f64, f64, f64, f64) = (0.8, 0.3, 3.0, 1.3);
        let v = |s: f64| s * s;
        let dv = |s: f64| crate::caputo::caputo_of_power(2.0, beta, s);
        let k1 = MlParams::new(alpha, alpha).unwrap();
        let k2 = MlParams::new(alpha, alpha - beta).unwrap();
        let lhs = crate::quadrature::adaptive(
            |w: f64| {
                // w = (t−s)^α
                let s = t - w.powf(1.0 / alpha);
                ml_eval(k1, -lam * w).unwrap() * dv(s) / alpha
            },
            0.0,
            t.powf(alpha),
            1e-13,
            1e-11,
        )
        .unwrap()
        .value;
        let e = alpha - beta;
        let rhs = crate::quadrature::adaptive(
            |w: f64| {
                // w = (t−s)^{α−β}
                let r = w.powf(1.0 / e);
                ml_eval(k2, -lam * r.powf(alpha)).unwrap() * v(t - r) / e
            },
            0.0,
            t.powf(e),
            1e-13,
            1e-11,
        )
        .unwrap()
        .value;
        assert!((lhs - rhs).abs() < 1e-8 * rhs.abs(), "{lhs} vs {rhs}");
    }

    #[test]
    fn zero_excitation_gives_zero_fields() {
        let g = SpatialGrid::new(1.0, 16).unwrap();
        let m = reference(&g);
        let zero = Excitation::PolyExp { a: 0.0, c: 1.0 };
        let gb = BoundaryPair::new(0.0, 1.0);
        let l1 = solve_l1(&m, &zero, gb, &g, 0.05, 1.0).unwrap();
        assert_eq!(l1.max_abs(), 0.0);
        let t: Vec<f64> = (0..=10).map(|k| 0.1 * k as f64).collect();
        let opts = PicardOptions { n_cheb: 8, ..Default::default() };
        let pic = solve_picard(&m, &zero, gb, &g, &t, &opts).unwrap();
        assert_eq!(pic.max_abs(), 0.0);
        assert_eq!(pic.increments(), &[0.0]);
    }

    #[test]
    fn l1_boundary_rows_and_initial_state() {
        let g = SpatialGrid::new(1.0, 12).unwrap();
        let m = reference(&g);
        let exc = Excitation::default();
        let gb = BoundaryPair::new(0.5, 1.0);
        let sol = solve_l1(&m, &exc, gb, &g, 0.01, 2.0).unwrap();
        assert!(sol.values()[0].iter().all(|v| *v == 0.0));
        for (t, u) in sol.t().iter().zip(sol.values()) {
            let lam = exc.value(*t);
            assert_eq!(u[0], lam * 0.5);
            assert_eq!(*u.last().unwrap(), lam * 1.0);
        }
    }

    #[test]
    fn flux_stencil_is_exact_for_quadratics() {
        let h = 0.1;
        let u: Vec<f64> = (0..=10)
            .map(|i| {
                let x = i as f64 * h;
                1.0 + 2.0 * x - 3.0 * x * x
            })
            .collect();
        let (l, r) = boundary_flux(&u, h);
        assert!((l + 2.0).abs() < 1e-12);
        assert!((r - (2.0 - 6.0)).abs() < 1e-12);
    }
}
