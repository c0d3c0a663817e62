//! Recovery of (ℓ, α, p₁ … p_ℓ, p) from samples of the spectral symbol.
//!
//! For fixed exponents the symbol `P_s(x) = p(x) − Σ p_j(x) s^{α_j}` is linear in
//! the coefficient fields, so each location is an ordinary least-squares problem
//! sharing one design matrix. The exponents are found by Nelder–Mead on an
//! unconstrained parameterization of the ordered set
//! `ε ≤ α_ℓ < … < α_1 ≤ 1 − ε`, restarted from a Latin hypercube.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forward::BoundaryPair;
use crate::laplace_dtn::{dtn_solve, spectral_symbol, SGrid, SymbolSamples};
use crate::model::FractionalModel;
use crate::spectral::SpatialGrid;

/// Distance kept between exponents and the ends of (0, 1).
pub const EXPONENT_MARGIN: f64 = 0.01;
/// Exponents closer than this are merged into one term.
pub const MERGE_GAP: f64 = 0.02;
/// Design matrices above this condition number are rejected.
pub const MAX_CONDITION: f64 = 1e12;

/// Exponents and coefficient fields of one fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolFit {
    /// Distinct exponents, descending.
    pub alphas: Vec<f64>,
    /// `p_terms[j][m]`: coefficient of `−s^{α_j}` at location m.
    pub p_terms: Vec<Vec<f64>>,
    pub potential: Vec<f64>,
    /// Root-mean-square residual over all samples.
    pub residual: f64,
    /// Condition number of the column-scaled design matrix.
    pub condition: f64,
    /// True when the optimizer drove two exponents closer than [`MERGE_GAP`].
    pub merged: bool,
    /// Best objective value after each start.
    pub trace: Vec<f64>,
}

/// Outcome of term-count detection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryResult {
    pub ell: usize,
    pub fit: SymbolFit,
    pub locations: Vec<f64>,
    /// Best residual for ℓ = 1 … ell_max.
    pub residual_per_ell: Vec<f64>,
    /// Gauss–Newton covariance estimate of the exponents.
    pub alpha_covariance: Vec<Vec<f64>>,
    /// Admissibility violations of the fitted fields (empty when admissible).
    pub violations: Vec<String>,
}

impl RecoveryResult {
    /// The recovered tuple as a validated model on the sample locations.
    pub fn model(&self) -> Result<FractionalModel> {
        FractionalModel::new(
            self.locations.clone(),
            self.fit.alphas.clone(),
            self.fit.p_terms.clone(),
            self.fit.potential.clone(),
        )
    }
}

/// Settings of the multi-start search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecoveryOptions {
    pub starts: usize,
    pub seed: u64,
    /// Nelder–Mead evaluations per start.
    pub max_evals: usize,
    /// Required residual improvement to accept one more term.
    pub drop_factor: f64,
    /// Absolute residual ceiling; `None` uses half the RMS of the data.
    pub ceiling: Option<f64>,
}

impl Default for RecoveryOptions {
    fn default() -> Self {
        Self { starts: 8, seed: 0, max_evals: 4000, drop_factor: 10.0, ceiling: None }
    }
}

/// Maps an unconstrained vector to exponents `1−ε ≥ α_1 > … > α_ℓ ≥ ε`.
fn to_alphas(z: &[f64]) -> Vec<f64> {
    let peak = z.iter().fold(0.0f64, |m, v| m.max(*v));
    let mut w: Vec<f64> = std::iter::once(0.0).chain(z.iter().copied()).map(|v| (v - peak).exp()).collect();
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= total);
    let span = 1.0 - 2.0 * EXPONENT_MARGIN;
    let ell = z.len();
    let mut alphas = vec![0.0; ell];
    let mut acc = 0.0;
    for k in 0..ell {
        acc += w[k];
        alphas[ell - 1 - k] = EXPONENT_MARGIN + span * acc;
    }
    alphas
}

/// Inverse of [`to_alphas`] for strictly ordered exponents inside the margins.
fn from_alphas(alphas: &[f64]) -> Vec<f64> {
    let ell = alphas.len();
    let span = 1.0 - 2.0 * EXPONENT_MARGIN;
    let cumulative: Vec<f64> = (0..ell).map(|k| (alphas[ell - 1 - k] - EXPONENT_MARGIN) / span).collect();
    let mut w = Vec::with_capacity(ell + 1);
    w.push(cumulative[0]);
    for k in 1..ell {
        w.push(cumulative[k] - cumulative[k - 1]);
    }
    w.push(1.0 - cumulative[ell - 1]);
    let floor = 1e-12;
    let base = w[0].max(floor);
    w[1..].iter().map(|v| (v.max(floor) / base).ln()).collect()
}

/// Groups exponents closer than [`MERGE_GAP`]; returns the distinct values.
fn merge_close(alphas: &[f64]) -> (Vec<f64>, bool) {
    let mut groups: Vec<Vec<f64>> = Vec::new();
    for &a in alphas {
        match groups.last_mut() {
            Some(g) if g.last().expect("non-empty group") - a < MERGE_GAP => g.push(a),
            _ => groups.push(vec![a]),
        }
    }
    let merged = groups.len() < alphas.len();
    (groups.iter().map(|g| g.iter().sum::<f64>() / g.len() as f64).collect(), merged)
}

/// Linear stage for fixed exponents.
struct LinearFit {
    /// `coefficients[c][m]`: column 0 is p, column j is p_j.
    coefficients: Vec<Vec<f64>>,
    residual: f64,
    condition: f64,
}

fn linear_stage(samples: &SymbolSamples, alphas: &[f64]) -> Result<LinearFit> {
    let s = samples.s_grid().values();
    let rows = s.len();
    let cols = alphas.len() + 1;
    let mut design = DMatrix::<f64>::zeros(rows, cols);
    for (i, &si) in s.iter().enumerate() {
        design[(i, 0)] = 1.0;
        for (j, &a) in alphas.iter().enumerate() {
            design[(i, j + 1)] = -si.powf(a);
        }
    }
    let scales: Vec<f64> = (0..cols).map(|c| design.column(c).norm()).collect();
    for (c, sc) in scales.iter().enumerate() {
        design.column_mut(c).unscale_mut(*sc);
    }
    let svd = design.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !(condition <= MAX_CONDITION) {
        return Err(Error::Conditioning {
            condition,
            detail: format!("exponents {alphas:?} give numerically collinear columns"),
        });
    }
    let locations = samples.locations().len();
    let data = DMatrix::from_fn(rows, locations, |i, m| samples.values()[i][m]);
    let solution = svd.solve(&data, 0.0).map_err(|e| Error::Numeric(format!("least-squares solve failed: {e}")))?;
    let fitted = &design * &solution;
    let residual = ((&data - fitted).norm_squared() / (rows * locations) as f64).sqrt();
    let coefficients = (0..cols).map(|c| (0..locations).map(|m| solution[(c, m)] / scales[c]).collect()).collect();
    Ok(LinearFit { coefficients, residual, condition })
}

/// Residual of the exponent vector after merging close exponents.
fn objective(samples: &SymbolSamples, alphas: &[f64]) -> f64 {
    let (distinct, _) = merge_close(alphas);
    linear_stage(samples, &distinct).map(|f| f.residual).unwrap_or(f64::INFINITY)
}

/// Plain Nelder–Mead; stops when the simplex diameter falls below `x_tol`.
fn nelder_mead(f: impl Fn(&[f64]) -> f64, start: &[f64], step: f64, x_tol: f64, max_evals: usize) -> (Vec<f64>, f64) {
    let dim = start.len();
    let mut simplex: Vec<Vec<f64>> = vec![start.to_vec()];
    for i in 0..dim {
        let mut p = start.to_vec();
        p[i] += step;
        simplex.push(p);
    }
    let mut values: Vec<f64> = simplex.iter().map(|p| f(p)).collect();
    let mut evals = simplex.len();
    while evals < max_evals {
        let mut order: Vec<usize> = (0..=dim).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();
        let diameter = simplex[1..]
            .iter()
            .map(|p| p.iter().zip(&simplex[0]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if diameter < x_tol {
            break;
        }
        let centroid: Vec<f64> =
            (0..dim).map(|k| simplex[..dim].iter().map(|p| p[k]).sum::<f64>() / dim as f64).collect();
        let along = |t: f64| -> Vec<f64> { centroid.iter().zip(&simplex[dim]).map(|(c, w)| c + t * (w - c)).collect() };
        let reflected = along(-1.0);
        let fr = f(&reflected);
        evals += 1;
        if fr < values[0] {
            let expanded = along(-2.0);
            let fe = f(&expanded);
            evals += 1;
            if fe < fr {
                simplex[dim] = expanded;
                values[dim] = fe;
            } else {
                simplex[dim] = reflected;
                values[dim] = fr;
            }
        } else if fr < values[dim - 1] {
            simplex[dim] = reflected;
            values[dim] = fr;
        } else {
            let contracted = if fr < values[dim] { along(-0.5) } else { along(0.5) };
            let fc = f(&contracted);
            evals += 1;
            if fc < values[dim].min(fr) {
                simplex[dim] = contracted;
                values[dim] = fc;
            } else {
                let best = simplex[0].clone();
                for i in 1..=dim {
                    simplex[i] = simplex[i].iter().zip(&best).map(|(p, b)| b + 0.5 * (p - b)).collect();
                    values[i] = f(&simplex[i]);
                }
                evals += dim;
            }
        }
    }
    let best = (0..=dim).min_by(|&a, &b| values[a].total_cmp(&values[b])).expect("non-empty simplex");
    (simplex[best].clone(), values[best])
}

fn check_samples(samples: &SymbolSamples, ell: usize) -> Result<()> {
    if ell == 0 {
        return Err(Error::Domain("the candidate term count must be at least 1".into()));
    }
    let needed = 2 * ell + 2;
    if samples.s_grid().len() < needed {
        return Err(Error::Domain(format!(
            "{} s-samples cannot identify {ell} terms (need at least {needed})",
            samples.s_grid().len()
        )));
    }
    let scale = data_rms(samples);
    let variation = (0..samples.locations().len())
        .map(|m| {
            let col = samples.column(m);
            let lo = col.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            hi - lo
        })
        .fold(0.0, f64::max);
    if !(variation > 1e-12 * scale.max(f64::MIN_POSITIVE)) {
        return Err(Error::Degenerate("symbol samples do not vary with s, so no s^α term can be resolved".into()));
    }
    Ok(())
}

fn data_rms(samples: &SymbolSamples) -> f64 {
    let count = samples.values().iter().map(Vec::len).sum::<usize>() as f64;
    (samples.values().iter().flatten().map(|v| v * v).sum::<f64>() / count).sqrt()
}

fn finish(samples: &SymbolSamples, alphas: &[f64], trace: Vec<f64>) -> Result<SymbolFit> {
    let (distinct, merged) = merge_close(alphas);
    let lin = linear_stage(samples, &distinct)?;
    let mut coefficients = lin.coefficients;
    let potential = coefficients.remove(0);
    Ok(SymbolFit {
        alphas: distinct,
        p_terms: coefficients,
        potential,
        residual: lin.residual,
        condition: lin.condition,
        merged,
        trace,
    })
}

fn optimize_from(samples: &SymbolSamples, alpha_init: &[f64], max_evals: usize) -> (Vec<f64>, f64) {
    let f = |z: &[f64]| objective(samples, &to_alphas(z));
    let mut z = from_alphas(alpha_init);
    let mut best = f64::INFINITY;
    // Restarting from the incumbent guards against a collapsed simplex.
    for _ in 0..3 {
        let (zn, fv) = nelder_mead(f, &z, 0.5, 1e-10, max_evals);
        let improved = fv < best;
        if fv <= best {
            z = zn;
            best = fv;
        }
        if !improved {
            break;
        }
    }
    (to_alphas(&z), best)
}

/// Fits `ell` exponents from one initial guess.
pub fn fit_symbol(samples: &SymbolSamples, ell: usize, alpha_init: &[f64]) -> Result<SymbolFit> {
    check_samples(samples, ell)?;
    if alpha_init.len() != ell {
        return Err(Error::Shape(format!("initial guess has {} exponents, expected {ell}", alpha_init.len())));
    }
    let mut init = alpha_init.to_vec();
    init.sort_by(|a, b| b.total_cmp(a));
    let (alphas, value) = optimize_from(samples, &init, RecoveryOptions::default().max_evals);
    if !value.is_finite() {
        return Err(Error::Fit {
            reason: "no finite residual was reached from the initial guess".into(),
            trace: vec![value],
        });
    }
    finish(samples, &alphas, vec![value])
}

/// Latin-hypercube starting points inside the ordered exponent set.
fn latin_starts(ell: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lo = EXPONENT_MARGIN + MERGE_GAP;
    let hi = 1.0 - EXPONENT_MARGIN - MERGE_GAP;
    let strata: Vec<Vec<usize>> = (0..ell)
        .map(|_| {
            let mut idx: Vec<usize> = (0..count).collect();
            for i in (1..count).rev() {
                let j = rng.random_range(0..=i);
                idx.swap(i, j);
            }
            idx
        })
        .collect();
    (0..count)
        .map(|c| {
            let mut point: Vec<f64> = (0..ell)
                .map(|d| {
                    let u: f64 = rng.random();
                    lo + (hi - lo) * (strata[d][c] as f64 + u) / count as f64
                })
                .collect();
            point.sort_by(|a, b| b.total_cmp(a));
            for k in 1..ell {
                if point[k - 1] - point[k] < MERGE_GAP {
                    point[k] = point[k - 1] - MERGE_GAP;
                }
            }
            let shift = (lo - point[ell - 1]).max(0.0);
            point.iter_mut().for_each(|p| *p += shift);
            point
        })
        .collect()
}

/// Multi-start fit with a fixed term count; the lowest residual wins, ties by start index.
pub fn fit_symbol_multistart(samples: &SymbolSamples, ell: usize, options: &RecoveryOptions) -> Result<SymbolFit> {
    check_samples(samples, ell)?;
    let starts = latin_starts(ell, options.starts.max(1), options.seed);
    let runs: Vec<(Vec<f64>, f64)> =
        starts.par_iter().map(|init| optimize_from(samples, init, options.max_evals)).collect();
    let trace: Vec<f64> = runs.iter().map(|r| r.1).collect();
    let best = (0..runs.len())
        .filter(|&i| runs[i].1.is_finite())
        .min_by(|&a, &b| runs[a].1.total_cmp(&runs[b].1).then(a.cmp(&b)))
        .ok_or_else(|| Error::Fit {
            reason: format!("no start reached a finite residual for ell = {ell}"),
            trace: trace.clone(),
        })?;
    finish(samples, &runs[best].0, trace)
}

/// Finite-difference Gauss–Newton covariance of the exponents.
fn alpha_covariance(samples: &SymbolSamples, alphas: &[f64]) -> Vec<Vec<f64>> {
    let ell = alphas.len();
    let residuals = |a: &[f64]| -> Option<Vec<f64>> {
        let lin = linear_stage(samples, a).ok()?;
        let s = samples.s_grid().values();
        let mut out = Vec::new();
        for (i, &si) in s.iter().enumerate() {
            for m in 0..samples.locations().len() {
                let mut model = lin.coefficients[0][m];
                for (j, &aj) in a.iter().enumerate() {
                    model -= lin.coefficients[j + 1][m] * si.powf(aj);
                }
                out.push(samples.values()[i][m] - model);
            }
        }
        Some(out)
    };
    let nan = vec![vec![f64::NAN; ell]; ell];
    let Some(base) = residuals(alphas) else { return nan };
    let h = 1e-6;
    let mut jac = DMatrix::<f64>::zeros(base.len(), ell);
    for j in 0..ell {
        let mut up = alphas.to_vec();
        let mut down = alphas.to_vec();
        up[j] += h;
        down[j] -= h;
        let (Some(ru), Some(rd)) = (residuals(&up), residuals(&down)) else { return nan };
        for (r, (a, b)) in ru.iter().zip(&rd).enumerate() {
            jac[(r, j)] = (a - b) / (2.0 * h);
        }
    }
    let dof = (base.len() as f64 - (ell + (ell + 1) * samples.locations().len()) as f64).max(1.0);
    let sigma2 = DVector::from_vec(base).norm_squared() / dof;
    match (jac.transpose() * &jac).try_inverse() {
        Some(inv) => (0..ell).map(|i| (0..ell).map(|j| sigma2 * inv[(i, j)]).collect()).collect(),
        None => nan,
    }
}

/// Sets sign-violating values within `tol` of zero to zero.
fn snap_roundoff(mut fit: SymbolFit, tol: f64) -> SymbolFit {
    for field in fit.p_terms.iter_mut().skip(1) {
        field.iter_mut().filter(|v| **v < 0.0 && **v >= -tol).for_each(|v| *v = 0.0);
    }
    fit.potential.iter_mut().filter(|v| **v > 0.0 && **v <= tol).for_each(|v| *v = 0.0);
    fit
}

fn violations(fit: &SymbolFit) -> Vec<String> {
    let mut out = Vec::new();
    if let Some(v) = fit.p_terms.first().and_then(|p| p.iter().find(|v| !(**v > 0.0))) {
        out.push(format!("p_1 = {v} is not positive"));
    }
    for (j, field) in fit.p_terms.iter().enumerate().skip(1) {
        if let Some(v) = field.iter().find(|v| **v < 0.0) {
            out.push(format!("p_{} = {v} is negative", j + 1));
        }
        if field.iter().all(|v| *v == 0.0) {
            out.push(format!("p_{} vanishes identically", j + 1));
        }
    }
    if let Some(v) = fit.potential.iter().find(|v| **v > 0.0) {
        out.push(format!("p = {v} is positive"));
    }
    out
}

/// Fits ℓ = 1 … ell_max and keeps the smallest ℓ that one more term does not
/// improve by `drop_factor`.
///
/// Residuals are floored at `10⁻⁹ × RMS(data)` so round-off cannot masquerade
/// as improvement. Coefficients within the same floor of zero but of the wrong
/// sign are set to zero before the admissibility check.
pub fn detect_term_count(samples: &SymbolSamples, ell_max: usize, options: &RecoveryOptions) -> Result<RecoveryResult> {
    if ell_max == 0 {
        return Err(Error::Domain("ell_max must be at least 1".into()));
    }
    if !(options.drop_factor > 1.0) {
        return Err(Error::Domain(format!("drop_factor must exceed 1, got {}", options.drop_factor)));
    }
    check_samples(samples, 1)?;
    let rms = data_rms(samples);
    let floor = 1e-9 * rms;
    let ceiling = options.ceiling.unwrap_or(0.5 * rms);
    let mut fits = Vec::new();
    for ell in 1..=ell_max {
        if samples.s_grid().len() < 2 * ell + 2 {
            break;
        }
        match fit_symbol_multistart(samples, ell, options) {
            Ok(fit) => fits.push(fit),
            Err(Error::Conditioning { .. }) | Err(Error::Fit { .. }) => break,
            Err(e) => return Err(e),
        }
    }
    let ladder: Vec<f64> = fits.iter().map(|f| f.residual).collect();
    let effective: Vec<f64> = ladder.iter().map(|r| r.max(floor)).collect();
    let chosen = (0..fits.len()).find(|&i| {
        effective[i] <= ceiling && (i + 1 == fits.len() || effective[i] < options.drop_factor * effective[i + 1])
    });
    let Some(idx) = chosen else {
        return Err(Error::NoModel { ceiling, ladder });
    };
    let fit = snap_roundoff(fits[idx].clone(), floor);
    if fit.p_terms.first().is_none_or(|p| p.iter().all(|v| v.abs() <= 1e-12 * rms.max(1.0))) {
        return Err(Error::Degenerate("no s-dependent term was resolved".into()));
    }
    let alpha_covariance = alpha_covariance(samples, &fit.alphas);
    let violations = violations(&fit);
    for v in &violations {
        log::warn!("recovered coefficients are not admissible: {v}");
    }
    Ok(RecoveryResult {
        ell: fit.alphas.len(),
        fit,
        locations: samples.locations().to_vec(),
        residual_per_ell: ladder,
        alpha_covariance,
        violations,
    })
}

/// Multiplies every sample by `1 + level·N(0,1)`.
pub fn add_multiplicative_noise(samples: &SymbolSamples, level: f64, seed: u64) -> Result<SymbolSamples> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, level).map_err(|e| Error::Domain(format!("noise level {level}: {e}")))?;
    let factors: Vec<Vec<f64>> =
        samples.values().iter().map(|row| row.iter().map(|_| 1.0 + normal.sample(&mut rng)).collect()).collect();
    samples.perturbed(&factors)
}

/// Boundary inputs used when comparing DtN maps.
pub fn default_g_set() -> Vec<BoundaryPair> {
    vec![BoundaryPair::new(1.0, 0.0), BoundaryPair::new(0.0, 1.0), BoundaryPair::new(1.0, 1.0)]
}

/// max over (g, s) of ‖Λ_A g − Λ_B g‖ / (1 + ‖Λ_A g‖) from discrete Dirichlet solves.
pub fn distinguishability(
    model_a: &FractionalModel,
    model_b: &FractionalModel,
    g_set: &[BoundaryPair],
    s_grid: &SGrid,
    grid: &SpatialGrid,
) -> Result<f64> {
    let nodes = grid.closed_nodes();
    let per_s = s_grid
        .values()
        .par_iter()
        .map(|&s| -> Result<f64> {
            let pa = spectral_symbol(model_a, s, &nodes)?;
            let pb = spectral_symbol(model_b, s, &nodes)?;
            let mut worst: f64 = 0.0;
            for &g in g_set {
                let fa = dtn_solve(&pa, grid, g, s)?.neumann_trace;
                let fb = dtn_solve(&pb, grid, g, s)?.neumann_trace;
                let diff = (fa.left - fb.left).hypot(fa.right - fb.right);
                worst = worst.max(diff / (1.0 + fa.left.hypot(fa.right)));
            }
            Ok(worst)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(per_s.into_iter().fold(0.0, f64::max))
}
