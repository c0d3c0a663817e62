//! JSON experiment configuration.
//!
//! Every section except `model` has defaults, and [`load_config`] returns the
//! config with all of them filled in. Coefficient fields are written as a
//! number, `{"expr": "1 + 0.5*sin(x)"}`, `{"nodal": [..]}` (values on a uniform
//! grid spanning `[0, L]`) or `{"csv": "p1.csv"}` (columns `x,value`; relative
//! paths resolve against the config file).

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::caputo::Excitation;
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::forward::{BoundaryPair, PicardOptions};
use crate::inverse::RecoveryOptions;
use crate::io::{read_csv, sha256_hex};
use crate::laplace_dtn::{SGrid, Tail};
use crate::model::{interpolate, FractionalModel};
use crate::spectral::SpatialGrid;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FieldSpec {
    Constant(f64),
    Source(FieldSource),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldSource {
    Expr(String),
    Nodal(Vec<f64>),
    Csv(PathBuf),
}

impl Default for FieldSpec {
    fn default() -> Self {
        FieldSpec::Constant(0.0)
    }
}

impl FieldSpec {
    pub fn expr(src: &str) -> Self {
        FieldSpec::Source(FieldSource::Expr(src.to_string()))
    }

    /// Values at the closed nodes of `grid`.
    pub fn resolve(&self, grid: &SpatialGrid, field: &str) -> Result<Vec<f64>> {
        let nodes = grid.closed_nodes();
        let values = match self {
            FieldSpec::Constant(v) => vec![*v; nodes.len()],
            FieldSpec::Source(FieldSource::Expr(src)) => {
                let e = Expr::parse(src).map_err(|e| Error::config(field, e.to_string()))?;
                nodes.iter().map(|&x| e.eval(x)).collect()
            }
            FieldSpec::Source(FieldSource::Nodal(vals)) => {
                if vals.len() < 2 {
                    return Err(Error::config(field, "nodal fields need at least two values"));
                }
                let m = vals.len() - 1;
                let xs: Vec<f64> = (0..=m).map(|i| grid.length() * i as f64 / m as f64).collect();
                nodes.iter().map(|&x| interpolate(&xs, vals, x)).collect()
            }
            FieldSpec::Source(FieldSource::Csv(path)) => {
                let table = read_csv(path).map_err(|e| Error::config(field, e.to_string()))?;
                let xs = table.column("x").map_err(|e| Error::config(field, e.to_string()))?;
                let ys = table.column("value").map_err(|e| Error::config(field, e.to_string()))?;
                if xs.len() < 2 || xs.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(Error::config(field, "csv x column must be strictly increasing with two or more rows"));
                }
                let tol = 1e-9 * grid.length();
                if xs[0].abs() > tol || (xs[xs.len() - 1] - grid.length()).abs() > tol {
                    return Err(Error::config(field, format!("csv must span [0, {}]", grid.length())));
                }
                nodes.iter().map(|&x| interpolate(&xs, &ys, x)).collect()
            }
        };
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::config(field, "field evaluates to a non-finite value"));
        }
        Ok(values)
    }

    fn absolutize(&mut self, base: &Path) {
        if let FieldSpec::Source(FieldSource::Csv(path)) = self {
            if path.is_relative() {
                *path = base.join(&*path);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub alphas: Vec<f64>,
    pub p_terms: Vec<FieldSpec>,
    #[serde(default)]
    pub potential: FieldSpec,
}

impl ModelSpec {
    /// The ℓ = 2 reference model on [0, 1].
    pub fn reference() -> Self {
        Self {
            alphas: vec![0.8, 0.3],
            p_terms: vec![FieldSpec::Constant(1.0), FieldSpec::expr("0.5*(1+x)")],
            potential: FieldSpec::expr("-1-x^2"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExcitationSpec {
    pub kind: String,
    pub parameters: Vec<f64>,
}

impl Default for ExcitationSpec {
    fn default() -> Self {
        Self { kind: "poly_exp".into(), parameters: vec![1.0, 1.0] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSpec {
    pub length: f64,
    pub n_interior: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { length: 1.0, n_interior: 100 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverMethod {
    L1,
    Picard,
    Both,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSpec {
    pub method: SolverMethod,
    /// L1 step.
    pub dt: f64,
    /// Horizon of the simulation feeding the Laplace transforms.
    pub t_end: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub n_modes: Option<usize>,
    pub n_cheb: usize,
    /// Horizon of the Picard solve used for the cross-check.
    pub picard_t_end: f64,
    /// Every `output_stride`-th time step is written to `solution.csv`.
    pub output_stride: usize,
}

impl Default for SolverSpec {
    fn default() -> Self {
        let picard = PicardOptions::default();
        Self {
            method: SolverMethod::Both,
            dt: 2e-3,
            t_end: 14.0,
            tol: picard.tol,
            max_iter: picard.max_iter,
            n_modes: None,
            n_cheb: picard.n_cheb,
            picard_t_end: 1.0,
            output_stride: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LaplaceSpec {
    pub s_min: f64,
    pub s_max: f64,
    pub count: usize,
    pub c1: f64,
    pub tail: Tail,
    /// Abscissae of the DtN and elliptic-residual checks.
    pub dtn_s: Vec<f64>,
}

impl Default for LaplaceSpec {
    fn default() -> Self {
        Self { s_min: 1.0, s_max: 100.0, count: 40, c1: 1.0, tail: Tail::Truncate, dtn_s: vec![2.0, 5.0, 10.0, 20.0] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RecoverySpec {
    pub ell_max: usize,
    pub starts: usize,
    pub max_evals: usize,
    pub drop_factor: f64,
    /// Interior sampling locations of the symbol, evenly spaced.
    pub n_locations: usize,
    /// Multiplicative noise level of the robustness stage; 0 skips it.
    pub noise: f64,
    pub ceiling: Option<f64>,
}

impl Default for RecoverySpec {
    fn default() -> Self {
        let opts = RecoveryOptions::default();
        Self {
            ell_max: 3,
            starts: opts.starts,
            max_evals: opts.max_evals,
            drop_factor: opts.drop_factor,
            n_locations: 21,
            noise: 0.01,
            ceiling: opts.ceiling,
        }
    }
}

/// Grids of the `ml-table` subcommand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MlTableSpec {
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
    pub z_min: f64,
    pub z_max: f64,
    pub z_count: usize,
}

impl Default for MlTableSpec {
    fn default() -> Self {
        Self { alphas: vec![0.3, 0.5, 0.8], betas: vec![1.0], z_min: -10.0, z_max: 0.0, z_count: 21 }
    }
}

impl MlTableSpec {
    pub fn z_values(&self) -> Vec<f64> {
        if self.z_count == 1 {
            return vec![self.z_min];
        }
        (0..self.z_count)
            .map(|i| self.z_min + (self.z_max - self.z_min) * i as f64 / (self.z_count - 1) as f64)
            .collect()
    }
}

fn default_boundary() -> BoundaryPair {
    BoundaryPair::new(1.0, 0.5)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelSpec,
    #[serde(default)]
    pub excitation: ExcitationSpec,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default = "default_boundary")]
    pub boundary: BoundaryPair,
    #[serde(default)]
    pub solver: SolverSpec,
    #[serde(default)]
    pub laplace: LaplaceSpec,
    #[serde(default)]
    pub recovery: RecoverySpec,
    #[serde(default)]
    pub ml_table: MlTableSpec,
    #[serde(default)]
    pub seed: u64,
}

impl ExperimentConfig {
    /// The reference ℓ = 2 experiment with every default.
    pub fn reference() -> Self {
        Self {
            model: ModelSpec::reference(),
            excitation: ExcitationSpec::default(),
            grid: GridSpec::default(),
            boundary: default_boundary(),
            solver: SolverSpec::default(),
            laplace: LaplaceSpec::default(),
            recovery: RecoverySpec::default(),
            ml_table: MlTableSpec::default(),
            seed: 0,
        }
    }

    /// Parses JSON text; relative CSV paths resolve against `base_dir`.
    pub fn from_json(text: &str, base_dir: &Path) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let mut cfg: ExperimentConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::config(if path == "." { "<root>".to_string() } else { path }, e.inner().to_string())
        })?;
        for field in cfg.model.p_terms.iter_mut().chain(std::iter::once(&mut cfg.model.potential)) {
            field.absolutize(base_dir);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Pretty JSON of the normalized config.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// SHA-256 of the compact normalized JSON.
    pub fn hash(&self) -> String {
        sha256_hex(serde_json::to_string(self).expect("config serializes").as_bytes())
    }

    /// Checks every section; admissibility errors name the violated constraint.
    pub fn validate(&self) -> Result<()> {
        self.spatial_grid()?;
        self.build_model()?;
        self.build_excitation()?;
        let b = &self.boundary;
        if !(b.left.is_finite() && b.right.is_finite()) {
            return Err(Error::config("boundary", "boundary values must be finite"));
        }
        let s = &self.solver;
        positive("solver.dt", s.dt)?;
        positive("solver.t_end", s.t_end)?;
        positive("solver.tol", s.tol)?;
        positive("solver.picard_t_end", s.picard_t_end)?;
        if s.dt >= s.t_end {
            return Err(Error::config("solver.dt", "must be smaller than solver.t_end"));
        }
        if s.max_iter == 0 {
            return Err(Error::config("solver.max_iter", "must be at least 1"));
        }
        if s.n_cheb < 4 {
            return Err(Error::config("solver.n_cheb", "must be at least 4"));
        }
        if s.output_stride == 0 {
            return Err(Error::config("solver.output_stride", "must be at least 1"));
        }
        if let Some(m) = s.n_modes {
            if m == 0 || m > self.grid.n_interior {
                return Err(Error::config("solver.n_modes", format!("must lie in 1..={}", self.grid.n_interior)));
            }
        }
        self.s_grid()?;
        let l = &self.laplace;
        if let Some(bad) = l.dtn_s.iter().find(|&&v| !(v >= l.c1 && v.is_finite())) {
            return Err(Error::config("laplace.dtn_s", format!("s = {bad} lies below C1 = {}", l.c1)));
        }
        let r = &self.recovery;
        if r.ell_max == 0 {
            return Err(Error::config("recovery.ell_max", "must be at least 1"));
        }
        if r.starts == 0 {
            return Err(Error::config("recovery.starts", "must be at least 1"));
        }
        if !(r.drop_factor > 1.0) {
            return Err(Error::config("recovery.drop_factor", "must exceed 1"));
        }
        if r.n_locations == 0 {
            return Err(Error::config("recovery.n_locations", "must be at least 1"));
        }
        if !(r.noise >= 0.0 && r.noise.is_finite()) {
            return Err(Error::config("recovery.noise", "must be a finite non-negative level"));
        }
        if let Some(c) = r.ceiling {
            positive("recovery.ceiling", c)?;
        }
        let t = &self.ml_table;
        if t.z_count == 0 || !(t.z_min <= t.z_max) {
            return Err(Error::config("ml_table", "need z_min ≤ z_max and z_count ≥ 1"));
        }
        Ok(())
    }

    pub fn spatial_grid(&self) -> Result<SpatialGrid> {
        positive("grid.length", self.grid.length)?;
        SpatialGrid::new(self.grid.length, self.grid.n_interior).map_err(|e| Error::config("grid", e.to_string()))
    }

    pub fn build_model(&self) -> Result<FractionalModel> {
        let grid = self.spatial_grid()?;
        let m = &self.model;
        if m.p_terms.len() != m.alphas.len() {
            return Err(Error::config(
                "model.p_terms",
                format!("{} coefficient fields for {} orders", m.p_terms.len(), m.alphas.len()),
            ));
        }
        let p_terms = m
            .p_terms
            .iter()
            .enumerate()
            .map(|(j, f)| f.resolve(&grid, &format!("model.p_terms[{j}]")))
            .collect::<Result<Vec<_>>>()?;
        let potential = m.potential.resolve(&grid, "model.potential")?;
        FractionalModel::new(grid.closed_nodes(), m.alphas.clone(), p_terms, potential)
    }

    pub fn build_excitation(&self) -> Result<Excitation> {
        Excitation::from_parameters(&self.excitation.kind, &self.excitation.parameters).map_err(|e| match e {
            Error::Domain(msg) => Error::config("excitation.kind", msg),
            other => other,
        })
    }

    pub fn s_grid(&self) -> Result<SGrid> {
        let l = &self.laplace;
        SGrid::log_spaced(l.s_min, l.s_max, l.count, l.c1).map_err(|e| Error::config("laplace", e.to_string()))
    }

    pub fn picard_options(&self) -> PicardOptions {
        PicardOptions {
            tol: self.solver.tol,
            max_iter: self.solver.max_iter,
            n_modes: self.solver.n_modes,
            n_cheb: self.solver.n_cheb,
            ..PicardOptions::default()
        }
    }

    pub fn recovery_options(&self) -> RecoveryOptions {
        RecoveryOptions {
            starts: self.recovery.starts,
            seed: self.seed,
            max_evals: self.recovery.max_evals,
            drop_factor: self.recovery.drop_factor,
            ceiling: self.recovery.ceiling,
        }
    }

    /// Evenly spaced interior sampling locations of the symbol.
    pub fn symbol_locations(&self) -> Vec<f64> {
        let n = self.recovery.n_locations;
        (1..=n).map(|i| self.grid.length * i as f64 / (n + 1) as f64).collect()
    }
}

fn positive(field: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::config(field, format!("must be a positive finite number, got {v}")))
    }
}

/// Reads, normalizes and validates a config file.
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::config("<file>", format!("cannot read {}: {e}", path.display())))?;
    let base =
        path.parent().map(|p| if p.as_os_str().is_empty() { Path::new(".") } else { p }).unwrap_or(Path::new("."));
    let base = std::fs::canonicalize(base).unwrap_or_else(|_| base.to_path_buf());
    ExperimentConfig::from_json(&text, &base)
}
