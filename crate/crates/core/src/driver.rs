//! Experiment orchestration: run configuration, scheme labels, solver runs,
//! the convergence harness, analysis sweeps and all file output.

use crate::error::{Result, SolverError};
use crate::fourier;
use crate::grid::Grid1d;
use crate::limiting::default_delta;
use crate::problems::{Problem, ViscosityRule};
use crate::solver::SolverConfig;
use crate::state::DgState;
use crate::stepper::{integrate, DtMode, LimiterConfig, StepReport, TimeScheme};
use crate::tableau::{
    dirk22, dirk33, dirk43, explicit_rk, ButcherTableau, DIRK22_LSTABLE_GAMMA,
    DIRK33_LSTABLE_GAMMA,
};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

/// Scheme labels: DG2DIRK22-0.25, DG2DIRK22-Lstab, DG2DIRK22-0.5,
/// DG3DIRK33-Lstab, DG3DIRK43, and the explicit comparisons DG2RK2, DG3RK3.
/// A numeric suffix selects the DIRK parameter directly.
#[derive(Debug, Clone)]
pub struct SchemeSpec {
    pub label: String,
    pub p: usize,
    pub scheme: TimeScheme,
}

pub fn parse_scheme(label: &str) -> Result<SchemeSpec> {
    let (p, rest) = if let Some(rest) = label.strip_prefix("DG2") {
        (1usize, rest)
    } else if let Some(rest) = label.strip_prefix("DG3") {
        (2usize, rest)
    } else {
        return Err(SolverError::UnknownScheme(label.to_string()));
    };
    let scheme = if let Some(suffix) = rest.strip_prefix("DIRK22-") {
        let gamma = match suffix {
            "Lstab" => DIRK22_LSTABLE_GAMMA,
            s => s
                .parse::<f64>()
                .map_err(|_| SolverError::UnknownScheme(label.to_string()))?,
        };
        TimeScheme::Dirk(dirk22(gamma)?)
    } else if let Some(suffix) = rest.strip_prefix("DIRK33-") {
        let gamma = match suffix {
            "Lstab" => DIRK33_LSTABLE_GAMMA,
            s => s
                .parse::<f64>()
                .map_err(|_| SolverError::UnknownScheme(label.to_string()))?,
        };
        TimeScheme::Dirk(dirk33(gamma)?)
    } else if rest == "DIRK43" {
        TimeScheme::Dirk(dirk43())
    } else if rest == "RK2" {
        TimeScheme::Explicit(explicit_rk(2)?)
    } else if rest == "RK3" {
        TimeScheme::Explicit(explicit_rk(3)?)
    } else {
        return Err(SolverError::UnknownScheme(label.to_string()));
    };
    // label order must match the spatial degree
    let order_ok = match (&scheme, p) {
        (TimeScheme::Dirk(t), 1) => t.stages() == 2,
        (TimeScheme::Dirk(t), 2) => t.stages() >= 3,
        (TimeScheme::Explicit(t), 1) => t.stages() == 2,
        (TimeScheme::Explicit(t), 2) => t.stages() == 3,
        _ => false,
    };
    if !order_ok {
        return Err(SolverError::InvalidConfig(format!(
            "scheme `{label}` pairs a degree-{p} space with an incompatible tableau"
        )));
    }
    Ok(SchemeSpec {
        label: label.to_string(),
        p,
        scheme,
    })
}

fn default_limiting() -> bool {
    true
}

fn default_solver() -> SolverConfig {
    SolverConfig::default()
}

/// One solver run, serializable as flat TOML.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RunConfig {
    pub problem: String,
    pub scheme: String,
    pub n: usize,
    /// defaults to the problem's final time
    pub t_final: Option<f64>,
    pub dt: DtMode,
    /// trouble-mask dilation; defaults to round(r/(2p+1)) in ratio mode
    pub delta: Option<usize>,
    /// TVB smoothness constant of the trouble indicator
    pub tvb: Option<f64>,
    #[serde(default = "default_limiting")]
    pub limiting: bool,
    /// overrides the problem's Rusanov viscosity estimate
    pub viscosity: Option<ViscosityRule>,
    #[serde(default = "default_solver")]
    pub solver: SolverConfig,
    pub out_dir: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(problem: &str, scheme: &str, n: usize, dt: DtMode) -> Self {
        Self {
            problem: problem.to_string(),
            scheme: scheme.to_string(),
            n,
            t_final: None,
            dt,
            delta: None,
            tvb: None,
            limiting: true,
            viscosity: None,
            solver: SolverConfig::default(),
            out_dir: None,
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("RunConfig serializes")
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| SolverError::InvalidConfig(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 4 {
            return Err(SolverError::InvalidConfig(format!(
                "n must be at least 4, got {}",
                self.n
            )));
        }
        parse_scheme(&self.scheme)?;
        Problem::by_name(&self.problem)?;
        Ok(())
    }
}

/// Everything a finished run exposes to callers and file writers.
pub struct RunArtifacts {
    pub config: RunConfig,
    pub grid: Grid1d,
    pub problem: Problem,
    pub state: DgState,
    pub reports: Vec<StepReport>,
    pub scheme: SchemeSpec,
}

impl RunArtifacts {
    /// L1 error of the cell means against the exact solution, summed over
    /// components: sum_j h |mean_j - exact_mean_j|.
    pub fn l1_error(&self) -> Result<Option<f64>> {
        l1_error(&self.state, &self.problem, &self.grid, self.state.time)
    }

    pub fn total_newton_iters(&self) -> usize {
        self.reports.iter().map(|r| r.newton_iters).sum()
    }

    pub fn total_krylov_iters(&self) -> usize {
        self.reports.iter().map(|r| r.krylov_iters).sum()
    }

    /// Average GMRES iterations per Newton step over the whole run.
    pub fn krylov_per_newton(&self) -> f64 {
        let newton: usize = self.total_newton_iters();
        if newton == 0 {
            return 0.0;
        }
        self.total_krylov_iters() as f64 / newton as f64
    }

    pub fn max_troubled(&self) -> usize {
        self.reports.iter().map(|r| r.max_troubled()).max().unwrap_or(0)
    }
}

pub fn l1_error(state: &DgState, problem: &Problem, grid: &Grid1d, t: f64) -> Result<Option<f64>> {
    let Some(exact) = problem.exact_means(grid, t)? else {
        return Ok(None);
    };
    let nc = state.ncomp;
    let mut err = 0.0;
    for m in 0..nc {
        for j in 0..grid.n {
            err += grid.h * (state.get(j, 0, m) - exact[m * grid.n + j]).abs();
        }
    }
    Ok(Some(err))
}

/// Execute one configured run; write solution/report/exact CSVs when an
/// output directory is set.
pub fn run_simulation(config: &RunConfig) -> Result<RunArtifacts> {
    config.validate()?;
    let scheme = parse_scheme(&config.scheme)?;
    let mut problem = Problem::by_name(&config.problem)?;
    if let Some(v) = config.viscosity {
        problem.viscosity = v;
    }
    let grid = Grid1d::new(config.n, problem.domain.0, problem.domain.1)?;
    let t_final = config.t_final.unwrap_or(problem.default_t_final);
    let state0 = problem.initial_state(&grid, scheme.p)?;
    let delta = config.delta.unwrap_or(match config.dt {
        DtMode::Ratio(r) => default_delta(r, scheme.p),
        _ => 1,
    });
    let mut limiter = LimiterConfig::new(delta);
    limiter.enabled = config.limiting;
    if let Some(tvb) = config.tvb {
        limiter.tvb = tvb;
    }
    let dt_mode = match (&scheme.scheme, config.dt) {
        // explicit comparison runs stay inside the stability bound
        (TimeScheme::Explicit(_), DtMode::Ratio(r)) if r > 1.0 => DtMode::Ratio(0.95),
        (_, mode) => mode,
    };
    let (state, reports) = integrate(
        state0,
        &grid,
        &scheme.scheme,
        &problem,
        &config.solver,
        &limiter,
        dt_mode,
        t_final,
    )?;
    let artifacts = RunArtifacts {
        config: config.clone(),
        grid,
        problem,
        state,
        reports,
        scheme,
    };
    if let Some(dir) = &config.out_dir {
        write_run_outputs(&artifacts, dir)?;
    }
    Ok(artifacts)
}

fn component_names(problem: &Problem) -> Vec<&'static str> {
    match problem.ncomp() {
        1 => vec!["u"],
        3 => vec!["rho", "mom", "ene"],
        _ => vec!["c0", "c1", "c2", "c3"],
    }
}

pub fn solution_csv(artifacts: &RunArtifacts) -> String {
    let state = &artifacts.state;
    let names = component_names(&artifacts.problem);
    let mut out = String::from("x");
    for m in 0..state.ncomp {
        write!(out, ",{}_mean", names[m]).unwrap();
        for l in 1..=state.p {
            write!(out, ",{}_m{}", names[m], l).unwrap();
        }
    }
    out.push('\n');
    for j in 0..state.n {
        write!(out, "{:.12e}", artifacts.grid.center(j)).unwrap();
        for m in 0..state.ncomp {
            for l in 0..=state.p {
                write!(out, ",{:.12e}", state.get(j, l, m)).unwrap();
            }
        }
        out.push('\n');
    }
    out
}

pub fn report_csv(reports: &[StepReport]) -> String {
    let mut out = String::from(
        "step,time,dt,courant,ratio,troubled_detected,troubled_limited,newton_iters,krylov_iters\n",
    );
    for (i, r) in reports.iter().enumerate() {
        let detected = r.troubled_detected.iter().copied().max().unwrap_or(0);
        writeln!(
            out,
            "{},{:.12e},{:.12e},{:.6e},{:.6e},{},{},{},{}",
            i,
            r.time,
            r.dt,
            r.courant,
            r.ratio,
            detected,
            r.max_troubled(),
            r.newton_iters,
            r.krylov_iters
        )
        .unwrap();
    }
    out
}

pub fn exact_csv(artifacts: &RunArtifacts) -> Result<Option<String>> {
    let Some(means) = artifacts
        .problem
        .exact_means(&artifacts.grid, artifacts.state.time)?
    else {
        return Ok(None);
    };
    let names = component_names(&artifacts.problem);
    let nc = artifacts.problem.ncomp();
    let mut out = String::from("x");
    for name in names.iter().take(nc) {
        write!(out, ",{name}_mean").unwrap();
    }
    out.push('\n');
    for j in 0..artifacts.grid.n {
        write!(out, "{:.12e}", artifacts.grid.center(j)).unwrap();
        for m in 0..nc {
            write!(out, ",{:.12e}", means[m * artifacts.grid.n + j]).unwrap();
        }
        out.push('\n');
    }
    Ok(Some(out))
}

pub fn write_run_outputs(artifacts: &RunArtifacts, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("solution.csv"), solution_csv(artifacts))?;
    std::fs::write(dir.join("report.csv"), report_csv(&artifacts.reports))?;
    if let Some(exact) = exact_csv(artifacts)? {
        std::fs::write(dir.join("exact.csv"), exact)?;
    }
    Ok(())
}

/// Errors and dyadic rates over a grid-refinement sequence.
#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    pub grids: Vec<usize>,
    pub errors: Vec<f64>,
    /// rates[i] = log2(errors[i] / errors[i+1]), defined for dyadic pairs
    pub rates: Vec<f64>,
}

impl ConvergenceReport {
    pub fn average_rate(&self) -> f64 {
        if self.rates.is_empty() {
            return 0.0;
        }
        self.rates.iter().sum::<f64>() / self.rates.len() as f64
    }

    pub fn csv(&self) -> String {
        let mut out = String::from("n,l1_error,rate\n");
        for i in 0..self.grids.len() {
            let rate = if i > 0 {
                format!("{:.4}", self.rates[i - 1])
            } else {
                String::from("")
            };
            writeln!(out, "{},{:.12e},{}", self.grids[i], self.errors[i], rate).unwrap();
        }
        out
    }
}

/// Run the same configuration over a dyadic grid list and collect L1 errors
/// of the cell means against the exact solution.
pub fn run_convergence(template: &RunConfig, grids: &[usize]) -> Result<ConvergenceReport> {
    let mut errors = Vec::with_capacity(grids.len());
    for &n in grids {
        let mut config = template.clone();
        config.n = n;
        config.out_dir = None;
        let artifacts = run_simulation(&config)?;
        let err = artifacts.l1_error()?.ok_or_else(|| {
            SolverError::InvalidConfig(format!(
                "problem `{}` has no exact solution for convergence",
                template.problem
            ))
        })?;
        errors.push(err);
    }
    let mut rates = Vec::new();
    for i in 0..grids.len().saturating_sub(1) {
        if grids[i + 1] == 2 * grids[i] {
            rates.push((errors[i] / errors[i + 1]).log2());
        }
    }
    Ok(ConvergenceReport {
        grids: grids.to_vec(),
        errors,
        rates,
    })
}

/// Dissipation/dispersion sweep of one scheme at fixed ratio r, written in
/// the analysis CSV schema: K, re/im omega per mode, beta per mode, measures.
pub fn analysis_csv(p: usize, tab: &ButcherTableau, h: f64, r: f64, ks: &[f64]) -> Result<String> {
    let rows = fourier::sweep_measures(p, tab, h, r, 1.0, ks)?;
    let mut out = String::from("K");
    for l in 0..=p {
        write!(out, ",re_omega_{l},im_omega_{l}").unwrap();
    }
    for l in 0..=p {
        write!(out, ",beta_{l}").unwrap();
    }
    out.push_str(",m_disp,m_diss\n");
    for row in rows {
        write!(out, "{:.12e}", row.k_dimensionless).unwrap();
        for o in &row.omega {
            write!(out, ",{:.12e},{:.12e}", o.re, o.im).unwrap();
        }
        for b in &row.energies {
            write!(out, ",{:.12e}", b).unwrap();
        }
        writeln!(out, ",{:.12e},{:.12e}", row.m_disp, row.m_diss).unwrap();
    }
    Ok(out)
}

/// Measures over a (gamma, K) grid for the two-stage DIRK family
/// (heatmap-ready rows: gamma, K, m_disp, m_diss).
pub fn gamma_sweep_csv(
    p: usize,
    gammas: &[f64],
    h: f64,
    r: f64,
    ks: &[f64],
) -> Result<String> {
    let mut out = String::from("gamma,K,m_disp,m_diss\n");
    for &gamma in gammas {
        let tab = dirk22(gamma)?;
        let rows = fourier::sweep_measures(p, &tab, h, r, 1.0, ks)?;
        for row in rows {
            writeln!(
                out,
                "{:.12e},{:.12e},{:.12e},{:.12e}",
                gamma, row.k_dimensionless, row.m_disp, row.m_diss
            )
            .unwrap();
        }
    }
    Ok(out)
}

/// Invoke the measure sweep for each requested ratio and write one CSV per
/// (scheme, r) into `dir`.
pub fn run_analysis(
    scheme_label: &str,
    ratios: &[f64],
    k_points: usize,
    h: f64,
    dir: &Path,
) -> Result<Vec<PathBuf>> {
    let spec = parse_scheme(scheme_label)?;
    let TimeScheme::Dirk(tab) = &spec.scheme else {
        return Err(SolverError::InvalidConfig(
            "analysis sweeps apply to DIRK schemes".into(),
        ));
    };
    std::fs::create_dir_all(dir)?;
    let ks = fourier::default_k_grid(k_points);
    let mut written = Vec::new();
    for &r in ratios {
        let csv = analysis_csv(spec.p, tab, h, r, &ks)?;
        let path = dir.join(format!("analysis_{}_r{}.csv", spec.label, r));
        std::fs::write(&path, csv)?;
        written.push(path);
    }
    Ok(written)
}

/// Stability-region export: |R(z)| over the scan window with the stable-set
/// mask, one row per grid point.
pub fn stability_csv(tab: &ButcherTableau, points: usize) -> String {
    let (re_lo, re_hi) = fourier::SCAN_RE_RANGE;
    let (im_lo, im_hi) = fourier::SCAN_IM_RANGE;
    let mut out = String::from("re,im,abs_r,stable\n");
    for i in 0..points {
        let re = re_lo + (re_hi - re_lo) * i as f64 / (points - 1) as f64;
        for j in 0..points {
            let im = im_lo + (im_hi - im_lo) * j as f64 / (points - 1) as f64;
            let r = fourier::dirk_stability_function(tab, num_complex::Complex64::new(re, im))
                .norm();
            let stable = if r <= 1.0 { 1 } else { 0 };
            writeln!(out, "{:.8e},{:.8e},{:.8e},{}", re, im, r, stable).unwrap();
        }
    }
    out
}

pub fn run_stability(scheme_label: &str, points: usize, path: &Path) -> Result<()> {
    let spec = parse_scheme(scheme_label)?;
    let csv = stability_csv(spec.scheme.tableau(), points);
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    std::fs::write(path, csv)?;
    Ok(())
}

/// Total variation of the cell means of one component.
pub fn total_variation(state: &DgState, component: usize) -> f64 {
    let means = state.means(component);
    let n = means.len();
    (0..n)
        .map(|j| (means[(j + 1) % n] - means[j]).abs())
        .sum()
}
