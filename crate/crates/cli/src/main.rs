//! Command-line driver: solver runs, convergence studies, dissipation and
//! dispersion sweeps, and stability-region exports. All outputs are CSV
//! files with a one-line header.

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use dirkdg_core::driver::{
    gamma_sweep_csv, parse_scheme, run_analysis, run_convergence, run_simulation, run_stability,
    RunConfig,
};
use dirkdg_core::fourier::SCAN_POINTS;
use dirkdg_core::solver::SolverConfig;
use dirkdg_core::stepper::DtMode;
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "dirkdg", version, about = "Implicit DIRK-DG solver for 1D conservation laws")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Problem id (advect-sin-warp, double-step, sine-hf, smooth-hf,
    /// sin-discont, burgers-smooth, burgers-step, euler-expansion-a[-short],
    /// euler-colliding-b[-short], euler-density-wave[-stiff])
    #[arg(long)]
    problem: Option<String>,
    /// Scheme label (DG2DIRK22-0.25, DG2DIRK22-Lstab, DG2DIRK22-0.5,
    /// DG3DIRK33-Lstab, DG3DIRK43, DG2RK2, DG3RK3)
    #[arg(long)]
    scheme: Option<String>,
    /// Number of cells
    #[arg(long)]
    n: Option<usize>,
    /// Final time (defaults to the problem's)
    #[arg(long)]
    t_final: Option<f64>,
    /// Time-step as a multiple of the explicit-stability step
    #[arg(long, conflicts_with_all = ["dt_over_h", "dt"])]
    ratio: Option<f64>,
    /// Time-step as dt/h (material-wave targeting)
    #[arg(long, conflicts_with = "dt")]
    dt_over_h: Option<f64>,
    /// Fixed time-step
    #[arg(long)]
    dt: Option<f64>,
    /// Trouble-mask dilation radius (defaults to round(r/(2p+1)))
    #[arg(long)]
    delta: Option<usize>,
    /// TVB smoothness constant of the trouble indicator
    #[arg(long)]
    tvb: Option<f64>,
    /// Disable all space limiting
    #[arg(long)]
    no_limiting: bool,
    /// Rusanov viscosity rule: acoustic | material
    #[arg(long)]
    viscosity: Option<String>,
    #[arg(long)]
    newton_tol: Option<f64>,
    #[arg(long)]
    newton_max: Option<usize>,
    #[arg(long)]
    krylov_tol: Option<f64>,
    #[arg(long)]
    krylov_max: Option<usize>,
    /// Read the run configuration from a TOML file (flags override it)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write the effective configuration to this TOML file
    #[arg(long)]
    emit_config: Option<PathBuf>,
    /// Output directory for solution/report/exact CSVs
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

impl RunArgs {
    fn build(&self) -> Result<RunConfig> {
        let mut config = if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            RunConfig::from_toml(&text)?
        } else {
            let problem = self
                .problem
                .clone()
                .context("--problem is required without --config")?;
            let scheme = self
                .scheme
                .clone()
                .context("--scheme is required without --config")?;
            let n = self.n.context("--n is required without --config")?;
            RunConfig::new(&problem, &scheme, n, DtMode::Ratio(1.0))
        };
        if let Some(p) = &self.problem {
            config.problem = p.clone();
        }
        if let Some(s) = &self.scheme {
            config.scheme = s.clone();
        }
        if let Some(n) = self.n {
            config.n = n;
        }
        if let Some(t) = self.t_final {
            config.t_final = Some(t);
        }
        if let Some(r) = self.ratio {
            config.dt = DtMode::Ratio(r);
        } else if let Some(q) = self.dt_over_h {
            config.dt = DtMode::DtOverH(q);
        } else if let Some(v) = self.dt {
            config.dt = DtMode::Fixed(v);
        }
        if let Some(d) = self.delta {
            config.delta = Some(d);
        }
        if let Some(m) = self.tvb {
            config.tvb = Some(m);
        }
        if self.no_limiting {
            config.limiting = false;
        }
        if let Some(v) = &self.viscosity {
            config.viscosity = Some(match v.as_str() {
                "acoustic" => dirkdg_core::problems::ViscosityRule::Acoustic,
                "material" => dirkdg_core::problems::ViscosityRule::Material,
                other => bail!("unknown viscosity rule `{other}`"),
            });
        }
        let defaults = SolverConfig::default();
        config.solver = SolverConfig {
            newton_tol: self.newton_tol.unwrap_or(config.solver.newton_tol),
            newton_max: self.newton_max.unwrap_or(config.solver.newton_max),
            krylov_tol: self.krylov_tol.unwrap_or(config.solver.krylov_tol),
            krylov_max: self.krylov_max.unwrap_or(config.solver.krylov_max),
        };
        let _ = defaults;
        if let Some(dir) = &self.out_dir {
            config.out_dir = Some(dir.clone());
        }
        if let Some(path) = &self.emit_config {
            std::fs::write(path, config.to_toml())
                .with_context(|| format!("writing {}", path.display()))?;
        }
        Ok(config)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run a single simulation and write solution/report CSVs
    Solve(RunArgs),
    /// Grid-refinement study: L1 errors of cell means and dyadic rates
    Converge {
        #[command(flatten)]
        run: RunArgs,
        /// Comma-separated grid list, e.g. 40,80,160,320
        #[arg(long, value_delimiter = ',')]
        grids: Vec<usize>,
        /// Output CSV path (stdout if omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dissipation-dispersion sweeps of a DIRK-DG scheme
    Analyze {
        /// Scheme label (ignored with --gamma-sweep)
        #[arg(long, default_value = "DG2DIRK22-0.25")]
        scheme: String,
        /// Comma-separated time-step ratios r
        #[arg(long, value_delimiter = ',', default_value = "3,9,15")]
        ratios: Vec<f64>,
        /// Number of K samples on (0, pi]
        #[arg(long, default_value_t = 128)]
        k_points: usize,
        /// Mesh width entering the symbol
        #[arg(long, default_value_t = 0.05)]
        h: f64,
        /// Sweep the two-stage DIRK parameter: lo,hi,count
        #[arg(long, value_delimiter = ',', num_args = 3)]
        gamma_sweep: Option<Vec<f64>>,
        #[arg(long, default_value = "analysis")]
        out_dir: PathBuf,
    },
    /// Stability-region export: |R(z)| on a grid plus the A-stability verdict
    Stability {
        #[arg(long)]
        scheme: String,
        /// Grid resolution per axis
        #[arg(long, default_value_t = SCAN_POINTS)]
        points: usize,
        #[arg(long, default_value = "stability.csv")]
        out: PathBuf,
    },
}

fn main() {
    if let Err(err) = run() {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}

fn run() -> Result<()> {
    match Cli::parse().command {
        Command::Solve(args) => {
            let config = args.build()?;
            let artifacts = run_simulation(&config)?;
            let steps = artifacts.reports.len();
            println!(
                "{}: {} on n={} reached t={:.6} in {} steps (max troubled {}, avg GMRES/Newton {:.1})",
                config.problem,
                config.scheme,
                config.n,
                artifacts.state.time,
                steps,
                artifacts.max_troubled(),
                artifacts.krylov_per_newton()
            );
            if let Some(err) = artifacts.l1_error()? {
                println!("L1 error vs exact: {err:.6e}");
            }
            if let Some(dir) = &config.out_dir {
                println!("wrote {}", dir.display());
            }
            Ok(())
        }
        Command::Converge { run, grids, out } => {
            if grids.len() < 2 {
                bail!("need at least two grids");
            }
            let config = run.build()?;
            let report = run_convergence(&config, &grids)?;
            let csv = report.csv();
            match out {
                Some(path) => {
                    std::fs::write(&path, csv)?;
                    println!(
                        "{} {}: average rate {:.3} -> {}",
                        config.problem,
                        config.scheme,
                        report.average_rate(),
                        path.display()
                    );
                }
                None => print!("{csv}"),
            }
            Ok(())
        }
        Command::Analyze {
            scheme,
            ratios,
            k_points,
            h,
            gamma_sweep,
            out_dir,
        } => {
            std::fs::create_dir_all(&out_dir)?;
            if let Some(sweep) = gamma_sweep {
                let (lo, hi, count) = (sweep[0], sweep[1], sweep[2] as usize);
                let gammas: Vec<f64> = (0..count)
                    .map(|i| lo + (hi - lo) * i as f64 / (count - 1).max(1) as f64)
                    .collect();
                let ks = dirkdg_core::fourier::default_k_grid(k_points);
                for &r in &ratios {
                    let csv = gamma_sweep_csv(1, &gammas, h, r, &ks)?;
                    let path = out_dir.join(format!("gamma_sweep_r{r}.csv"));
                    std::fs::write(&path, csv)?;
                    println!("wrote {}", path.display());
                }
            } else {
                for path in run_analysis(&scheme, &ratios, k_points, h, &out_dir)? {
                    println!("wrote {}", path.display());
                }
            }
            Ok(())
        }
        Command::Stability {
            scheme,
            points,
            out,
        } => {
            let spec = parse_scheme(&scheme)?;
            let scan = dirkdg_core::fourier::stability_scan(spec.scheme.tableau());
            run_stability(&scheme, points, &out)?;
            println!(
                "{scheme}: A-stable on scan = {}, |R(-1e8)| = {:.3e} -> {}",
                scan.a_stable,
                scan.r_large_negative,
                out.display()
            );
            Ok(())
        }
    }
}
