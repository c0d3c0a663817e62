//! Command-line front end.
//!
//! Exit codes: 0 success, 2 config error, 3 numeric failure, 4 acceptance
//! threshold missed under `pipeline --check`.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use multifrac::caputo::{caputo_l1, TimeSeries};
use multifrac::config::{load_config, ExperimentConfig};
use multifrac::forward::{solve_l1, solve_picard, SolutionField};
use multifrac::inverse::{default_g_set, detect_term_count, distinguishability, RecoveryOptions};
use multifrac::io::{fmt, read_csv, write_csv, write_json, Provenance};
use multifrac::laplace_dtn::{laplace_transform, SGrid, SymbolSamples};
use multifrac::melf::mittag_leffler;
use multifrac::pipeline::{flux_rows, header, run_pipeline, solution_rows, symbol_rows, RecoveredModel};
use multifrac::spectral::{assemble_operator, default_modes, eigensystem};
use multifrac::{Error, Result};

#[derive(Parser)]
#[command(
    name = "multifrac",
    version,
    about = "Multi-term time-fractional diffusion: forward solves and coefficient recovery"
)]
struct Cli {
    /// Overrides the seed of the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Repeat for more log output.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    L1,
    Picard,
}

#[derive(Subcommand)]
enum Command {
    /// Prints E_{α,β}(z).
    MlEval {
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        #[arg(long, allow_hyphen_values = true)]
        z: f64,
    },
    /// Tabulates E_{α,β} on the `ml_table` grids of a config.
    MlTable {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        output: PathBuf,
    },
    /// L1 Caputo derivative of a sampled series (CSV `t,value`).
    Caputo {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
    },
    /// Eigenpairs of the discrete operator −(1/p₁)Δ.
    Eigs {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        output: PathBuf,
    },
    /// Forward solve; writes `(t, x, u)` rows and a companion flux CSV.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum, default_value = "l1")]
        method: Method,
        #[arg(long)]
        output: PathBuf,
        /// Defaults to `flux.csv` next to the output.
        #[arg(long)]
        flux: Option<PathBuf>,
    },
    /// Normalized Laplace-domain DtN data from a flux CSV.
    Laplace {
        #[arg(long)]
        input: PathBuf,
        /// Supplies g, λ and the transform settings.
        #[arg(long)]
        config: PathBuf,
        /// `lo:hi:count` with an optional `log` or `lin` suffix.
        #[arg(long, default_value = "1:100:40log")]
        s_grid: String,
        #[arg(long)]
        output: PathBuf,
    },
    /// Samples of the spectral symbol P_s(x) of the configured model.
    Symbol {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        s_grid: Option<String>,
        #[arg(long)]
        output: PathBuf,
    },
    /// Recovers (ℓ, α, p_j, p) from a symbol CSV.
    Recover {
        #[arg(long)]
        symbol: PathBuf,
        #[arg(long, default_value_t = 4)]
        ell_max: usize,
        #[arg(long)]
        output: PathBuf,
    },
    /// DtN separation between two configured models, per s.
    Distinguish {
        #[arg(long)]
        config_a: PathBuf,
        #[arg(long)]
        config_b: PathBuf,
        #[arg(long)]
        output: PathBuf,
    },
    /// Full experiment; artifacts go to the output directory.
    Pipeline {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "out")]
        output: PathBuf,
        /// Exit with code 4 when a threshold is missed.
        #[arg(long)]
        check: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).parse_default_env().init();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn config(path: &Path, seed: Option<u64>) -> Result<ExperimentConfig> {
    let mut cfg = load_config(path)?;
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn provenance(cfg: &ExperimentConfig) -> Provenance {
    Provenance::new(cfg.hash(), cfg.seed)
}

fn read_input(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| Error::config("--input", format!("cannot read {}: {e}", path.display())))
}

/// Parses `lo:hi:count[log|lin]`.
fn parse_s_grid(spec: &str, c1: f64) -> Result<SGrid> {
    let bad = || Error::config("--s-grid", format!("expected lo:hi:count[log|lin], got '{spec}'"));
    let parts: Vec<&str> = spec.split(':').collect();
    let [lo, hi, count] = parts[..] else { return Err(bad()) };
    let (count, log_spaced) = match count.strip_suffix("log") {
        Some(c) => (c, true),
        None => (count.strip_suffix("lin").unwrap_or(count), false),
    };
    let lo: f64 = lo.parse().map_err(|_| bad())?;
    let hi: f64 = hi.parse().map_err(|_| bad())?;
    let count: usize = count.parse().map_err(|_| bad())?;
    let grid = if log_spaced {
        SGrid::log_spaced(lo, hi, count, c1)
    } else if count >= 2 && hi > lo {
        SGrid::new((0..count).map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64).collect(), c1)
    } else {
        Err(bad())
    };
    grid.map_err(|e| Error::config("--s-grid", e.to_string()))
}

fn write_solution(sol: &SolutionField, stride: usize, output: &Path, flux: &Path, prov: &Provenance) -> Result<()> {
    write_csv(output, prov, &header(&["t", "x", "u"]), &solution_rows(&sol.subsampled(stride)))?;
    write_csv(flux, prov, &header(&["t", "flux_left", "flux_right"]), &flux_rows(sol))
}

fn run(cli: &Cli) -> Result<u8> {
    match &cli.command {
        Command::MlEval { alpha, beta, z } => {
            println!("{:.14e}", mittag_leffler(*alpha, *beta, *z)?);
        }
        Command::MlTable { config: path, output } => {
            let cfg = config(path, cli.seed)?;
            let table = &cfg.ml_table;
            let mut rows = Vec::new();
            for &alpha in &table.alphas {
                for &beta in &table.betas {
                    for z in table.z_values() {
                        let v = mittag_leffler(alpha, beta, z)?;
                        rows.push(vec![fmt(alpha), fmt(beta), fmt(z), fmt(v)]);
                    }
                }
            }
            write_csv(output, &provenance(&cfg), &header(&["alpha", "beta", "z", "value"]), &rows)?;
        }
        Command::Caputo { alpha, input, output } => {
            let bytes = read_input(input)?;
            let table = read_csv(input)?;
            let series = TimeSeries::new(table.column("t")?, table.column("value")?)?;
            let d = caputo_l1(&series, *alpha)?;
            let rows: Vec<Vec<String>> = d.t().iter().zip(d.values()).map(|(t, v)| vec![fmt(*t), fmt(*v)]).collect();
            let prov = Provenance::of_bytes(&bytes, cli.seed.unwrap_or(0));
            write_csv(output, &prov, &header(&["t", "value"]), &rows)?;
        }
        Command::Eigs { config: path, output } => {
            let cfg = config(path, cli.seed)?;
            let grid = cfg.spatial_grid()?;
            let model = cfg.build_model()?;
            let op = assemble_operator(&grid, &model.p_terms()[0])?;
            let modes = cfg.solver.n_modes.unwrap_or_else(|| default_modes(&grid));
            let eig = eigensystem(&op, modes)?;
            log::info!("orthonormality residual {:e}", eig.orthonormality_residual());
            let mut head = vec!["n".to_string(), "lambda_n".to_string()];
            head.extend((1..=grid.n_interior()).map(|i| format!("phi_{i}")));
            let rows: Vec<Vec<String>> = eig
                .eigenvalues()
                .iter()
                .zip(eig.eigenvectors())
                .enumerate()
                .map(|(k, (lam, phi))| {
                    let mut row = vec![(k + 1).to_string(), fmt(*lam)];
                    row.extend(phi.iter().map(|v| fmt(*v)));
                    row
                })
                .collect();
            write_csv(output, &provenance(&cfg), &head, &rows)?;
        }
        Command::Simulate { config: path, method, output, flux } => {
            let cfg = config(path, cli.seed)?;
            let grid = cfg.spatial_grid()?;
            let model = cfg.build_model()?;
            let exc = cfg.build_excitation()?;
            let s = &cfg.solver;
            let sol = match method {
                Method::L1 => solve_l1(&model, &exc, cfg.boundary, &grid, s.dt, s.t_end)?,
                Method::Picard => {
                    let step = s.dt * s.output_stride as f64;
                    let n = (s.t_end / step).round().max(1.0) as usize;
                    let times: Vec<f64> = (0..=n).map(|i| s.t_end * i as f64 / n as f64).collect();
                    solve_picard(&model, &exc, cfg.boundary, &grid, &times, &cfg.picard_options())?
                }
            };
            let stride = if matches!(method, Method::L1) { s.output_stride } else { 1 };
            let flux = flux.clone().unwrap_or_else(|| output.with_file_name("flux.csv"));
            write_solution(&sol, stride, output, &flux, &provenance(&cfg))?;
            println!("max|u| = {:.6e}", sol.max_abs());
        }
        Command::Laplace { input, config: path, s_grid, output } => {
            let cfg = config(path, cli.seed)?;
            let exc = cfg.build_excitation()?;
            let grid = parse_s_grid(s_grid, cfg.laplace.c1)?.admissible_for(&exc)?;
            let table = read_csv(input)?;
            let t = table.column("t")?;
            let left = TimeSeries::new(t.clone(), table.column("flux_left")?)?;
            let right = TimeSeries::new(t.clone(), table.column("flux_right")?)?;
            let lam = TimeSeries::new(t.clone(), t.iter().map(|&x| exc.value(x)).collect())?;
            let tail = cfg.laplace.tail;
            let g = cfg.boundary;
            let rows = grid
                .values()
                .iter()
                .map(|&s| {
                    let l = laplace_transform(&lam, s, tail)?;
                    let fl = laplace_transform(&left, s, tail)? / l;
                    let fr = laplace_transform(&right, s, tail)? / l;
                    Ok(vec![fmt(s), fmt(g.left), fmt(g.right), fmt(fl), fmt(fr)])
                })
                .collect::<Result<Vec<_>>>()?;
            let head = header(&["s", "g_left", "g_right", "flux_left", "flux_right"]);
            write_csv(output, &provenance(&cfg), &head, &rows)?;
        }
        Command::Symbol { config: path, s_grid, output } => {
            let cfg = config(path, cli.seed)?;
            let model = cfg.build_model()?;
            let grid = match s_grid {
                Some(spec) => parse_s_grid(spec, cfg.laplace.c1)?,
                None => cfg.s_grid()?,
            };
            let samples = SymbolSamples::from_model(&model, &grid, &cfg.symbol_locations())?;
            write_csv(output, &provenance(&cfg), &header(&["s", "x", "P_s"]), &symbol_rows(&samples))?;
        }
        Command::Recover { symbol, ell_max, output } => {
            let bytes = read_input(symbol)?;
            let samples = read_symbol(symbol)?;
            let options = RecoveryOptions { seed: cli.seed.unwrap_or(0), ..RecoveryOptions::default() };
            let result = detect_term_count(&samples, *ell_max, &options)?;
            write_json(output, &RecoveredModel::new(&result))?;
            log::info!("input hash {}", Provenance::of_bytes(&bytes, options.seed).config_hash);
            println!("ell = {}, alphas = {:?}, ladder = {:?}", result.ell, result.fit.alphas, result.residual_per_ell);
        }
        Command::Distinguish { config_a, config_b, output } => {
            let a = config(config_a, cli.seed)?;
            let b = config(config_b, cli.seed)?;
            let grid = a.spatial_grid()?;
            let model_a = a.build_model()?;
            let model_b = b.build_model()?.on_grid(&grid)?;
            let s_grid = a.s_grid()?;
            let g_set = default_g_set();
            let mut rows = Vec::new();
            let mut worst: f64 = 0.0;
            for &s in s_grid.values() {
                let single = SGrid::new(vec![s], s_grid.c1())?;
                let sep = distinguishability(&model_a, &model_b, &g_set, &single, &grid)?;
                worst = worst.max(sep);
                rows.push(vec![fmt(s), fmt(sep)]);
            }
            let prov =
                Provenance::new(multifrac::io::sha256_hex(format!("{}{}", a.hash(), b.hash()).as_bytes()), a.seed);
            write_csv(output, &prov, &header(&["s", "separation"]), &rows)?;
            println!("separation = {worst:.6e}");
        }
        Command::Pipeline { config: path, output, check } => {
            let cfg = config(path, cli.seed)?;
            let report = run_pipeline(&cfg, output)?;
            for (name, passed) in &report.summary.checks {
                println!("{name}: {}", if *passed { "pass" } else { "FAIL" });
            }
            if *check && !report.summary.all_passed {
                return Ok(4);
            }
        }
    }
    Ok(0)
}

/// Reads `s,x,P_s` rows into samples; C₁ is taken as the smallest s.
fn read_symbol(path: &Path) -> Result<SymbolSamples> {
    let table = read_csv(path)?;
    let s = table.column("s")?;
    let x = table.column("x")?;
    let p = table.column("P_s")?;
    let mut s_values: Vec<f64> = Vec::new();
    let mut locations: Vec<f64> = Vec::new();
    for (&si, &xi) in s.iter().zip(&x) {
        if s_values.last() != Some(&si) {
            s_values.push(si);
        }
        if s_values.len() == 1 {
            locations.push(xi);
        }
    }
    let width = locations.len();
    if width == 0 || s.len() != s_values.len() * width {
        return Err(Error::Shape(format!("{}: rows do not form an s × x grid", path.display())));
    }
    if x.chunks(width).any(|c| c != locations.as_slice()) {
        return Err(Error::Shape(format!("{}: locations differ between s values", path.display())));
    }
    let values = p.chunks(width).map(|c| c.to_vec()).collect();
    let c1 = s_values[0];
    SymbolSamples::new(SGrid::new(s_values, c1)?, locations, values)
}
