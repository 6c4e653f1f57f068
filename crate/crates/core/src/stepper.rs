//! Time integration: the implicit DIRK-DG step with the first-order
//! predictor, frozen MP mask and per-stage BDF limiting, plus the explicit
//! Runge-Kutta comparison stepper and the outer time loop.

use crate::error::{Result, SolverError};
use crate::grid::Grid1d;
use crate::limiting::{bdf_limit_in_place, frozen_mp_mask, TroubleMask};
use crate::problems::{rusanov_flux, Problem};
use crate::problems::NumericalFlux;
use crate::solver::{jfnk_solve, jfnk_solve_lenient, ResidualFunction, SolverConfig};
use crate::spatial::{interface_alphas, stage_residual, DgOps, StateView};
use crate::state::DgState;
use crate::tableau::{derive_predictor, ButcherTableau, PredictorTableau};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct LimiterConfig {
    pub enabled: bool,
    /// dilation radius of the trouble mask
    pub delta: usize,
    /// TVB smoothness constant of the trouble indicator (threshold tvb*h^2
    /// relative to the data range)
    pub tvb: f64,
}

impl LimiterConfig {
    pub fn new(delta: usize) -> Self {
        Self {
            enabled: true,
            delta,
            tvb: crate::limiting::DEFAULT_TVB_CONSTANT,
        }
    }

    pub fn disabled() -> Self {
        Self {
            enabled: false,
            delta: 0,
            tvb: 0.0,
        }
    }
}

/// Bookkeeping for one time step.
#[derive(Debug, Clone, Default)]
pub struct StepReport {
    /// time reached after the step
    pub time: f64,
    pub dt: f64,
    /// Courant number max||f'|| dt / h at the start of the step
    pub courant: f64,
    /// dt / dt_CFL with dt_CFL = h / ((2p+1) maxspeed)
    pub ratio: f64,
    /// cells detected by the MP indicator, per stage (before dilation)
    pub troubled_detected: Vec<usize>,
    /// cells actually limited, per stage (after dilation)
    pub troubled_limited: Vec<usize>,
    pub newton_iters: usize,
    pub krylov_iters: usize,
    /// number of nonlinear solves contributing to the counters
    pub newton_solves: usize,
}

impl StepReport {
    pub fn max_troubled(&self) -> usize {
        self.troubled_limited.iter().copied().max().unwrap_or(0)
    }
}

/// Residual of one composite-backward-Euler predictor stage on cell means:
/// G(U) = U + factor * K(U) - U_prev with K_j = F(u_j, u_{j+1}) - F(u_{j-1}, u_j).
struct PredictorStage<'a> {
    problem: &'a Problem,
    n: usize,
    ncomp: usize,
    /// (c_i - c_{i-1}) dt / h
    factor: f64,
    prev: &'a [f64],
    /// Rusanov viscosities frozen at the stage initial guess
    alphas: Option<Vec<f64>>,
}

impl ResidualFunction for PredictorStage<'_> {
    fn dim(&self) -> usize {
        self.n * self.ncomp
    }

    fn eval(&self, u: &[f64], out: &mut [f64]) -> Result<()> {
        let n = self.n;
        let nc = self.ncomp;
        let bc = self.problem.bc;
        let mut fluxes = vec![0.0; (n + 1) * nc];
        for iface in 0..=n {
            let jl = if iface == 0 {
                bc.neighbor(0, -1, n)
            } else {
                iface - 1
            };
            let jr = if iface == n {
                bc.neighbor(n - 1, 1, n)
            } else {
                iface
            };
            let um = &u[jl * nc..(jl + 1) * nc];
            let up = &u[jr * nc..(jr + 1) * nc];
            let out_slice = &mut fluxes[iface * nc..(iface + 1) * nc];
            match &self.alphas {
                Some(alphas) => {
                    rusanov_flux(&self.problem.flux, um, up, alphas[iface], out_slice)?
                }
                None => self.problem.numerical_flux(um, up, out_slice)?,
            }
        }
        for j in 0..n {
            for m in 0..nc {
                let k = fluxes[(j + 1) * nc + m] - fluxes[j * nc + m];
                out[j * nc + m] = u[j * nc + m] + self.factor * k - self.prev[j * nc + m];
            }
        }
        Ok(())
    }
}

/// Residual of one semi-linearized high-order stage:
/// G(U) = U + (2l+1)(a_ii dt/h) K(U; mask) + constant, where `constant`
/// already contains -u_lim^n and the accumulated earlier-stage terms.
struct HighOrderStage<'a> {
    problem: &'a Problem,
    ops: &'a DgOps,
    p: usize,
    n: usize,
    ncomp: usize,
    aii_dt_h: f64,
    mask: Option<&'a [f64]>,
    alphas: Option<&'a [f64]>,
    constant: &'a [f64],
}

impl ResidualFunction for HighOrderStage<'_> {
    fn dim(&self) -> usize {
        self.n * (self.p + 1) * self.ncomp
    }

    fn eval(&self, u: &[f64], out: &mut [f64]) -> Result<()> {
        let view = StateView {
            p: self.p,
            ncomp: self.ncomp,
            n: self.n,
            data: u,
        };
        stage_residual(
            view,
            self.ops,
            self.problem,
            self.problem.bc,
            self.mask,
            self.alphas,
            out,
        )?;
        let nc = self.ncomp;
        for j in 0..self.n {
            for l in 0..=self.p {
                let scale = (2 * l + 1) as f64 * self.aii_dt_h;
                for m in 0..nc {
                    let i = (j * (self.p + 1) + l) * nc + m;
                    out[i] = u[i] + scale * out[i] + self.constant[i];
                }
            }
        }
        Ok(())
    }
}

fn state_means_flat(state: &DgState) -> Vec<f64> {
    let mut out = vec![0.0; state.n * state.ncomp];
    for j in 0..state.n {
        for m in 0..state.ncomp {
            out[j * state.ncomp + m] = state.get(j, 0, m);
        }
    }
    out
}

/// One step of the s-stage DIRK-DG scheme. The input state is the stored
/// (already limited) solution at t^n; the result is the limited solution at
/// t^n + dt together with the step report.
#[allow(clippy::too_many_arguments)]
pub fn dirk_dg_step(
    state: &DgState,
    grid: &Grid1d,
    tab: &ButcherTableau,
    predictor: &PredictorTableau,
    problem: &Problem,
    ops: &DgOps,
    solver_cfg: &SolverConfig,
    limiter: &LimiterConfig,
    dt: f64,
) -> Result<(DgState, StepReport)> {
    let s = tab.stages();
    let n = state.n;
    let nc = state.ncomp;
    let p = state.p;
    let len = state.moments.len();
    let mut report = StepReport {
        dt,
        ..Default::default()
    };

    let mut k_lim: Vec<Vec<f64>> = Vec::with_capacity(s);
    let mut pred_means = state_means_flat(state);
    let mut guess = state.moments.clone();

    for i in 0..s {
        let mask: Option<TroubleMask> = if limiter.enabled {
            // (1) predictor stage at t^(i), seeded from the previous stage.
            // The predictor only feeds the limiter mask, and its system can
            // be singular at isolated Courant numbers (negative abscissa
            // increments put a grid mode exactly on the resolvent pole), so
            // a stalled solve keeps the best iterate instead of aborting.
            let pred_alphas = if matches!(problem.num_flux, NumericalFlux::Rusanov) {
                let view = StateView {
                    p: 0,
                    ncomp: nc,
                    n,
                    data: &pred_means,
                };
                Some(interface_alphas(view, problem, problem.bc, None)?)
            } else {
                None
            };
            let stage = PredictorStage {
                problem,
                n,
                ncomp: nc,
                factor: predictor.increments[i] * dt / grid.h,
                prev: &pred_means,
                alphas: pred_alphas,
            };
            let (sol, rep, _converged) = jfnk_solve_lenient(&stage, &pred_means, solver_cfg)?;
            report.newton_iters += rep.newton_iters;
            report.krylov_iters += rep.krylov_iters;
            report.newton_solves += 1;
            pred_means = sol;
            // (2) frozen MP mask with delta-dilation, componentwise detection
            let comps: Vec<Vec<f64>> = (0..nc)
                .map(|m| (0..n).map(|j| pred_means[j * nc + m]).collect())
                .collect();
            let mask = frozen_mp_mask(
                &comps,
                problem.bc,
                limiter.delta,
                limiter.tvb * grid.h * grid.h,
            );
            report.troubled_detected.push(mask.detected);
            report.troubled_limited.push(mask.limited);
            Some(mask)
        } else {
            None
        };

        // (3) semi-linearized high-order stage system
        let mut constant: Vec<f64> = state.moments.iter().map(|v| -v).collect();
        for (kappa, k_prev) in k_lim.iter().enumerate() {
            let aik = tab.a[i][kappa];
            if aik == 0.0 {
                continue;
            }
            for j in 0..n {
                for l in 0..=p {
                    let scale = (2 * l + 1) as f64 * aik * dt / grid.h;
                    for m in 0..nc {
                        let idx = (j * (p + 1) + l) * nc + m;
                        constant[idx] += scale * k_prev[idx];
                    }
                }
            }
        }
        let mask_slice = mask.as_ref().map(|m| m.phi.as_slice());
        let stage_alphas = if matches!(problem.num_flux, NumericalFlux::Rusanov) {
            let view = StateView {
                p,
                ncomp: nc,
                n,
                data: &guess,
            };
            Some(interface_alphas(view, problem, problem.bc, mask_slice)?)
        } else {
            None
        };
        let stage = HighOrderStage {
            problem,
            ops,
            p,
            n,
            ncomp: nc,
            aii_dt_h: tab.a[i][i] * dt / grid.h,
            mask: mask_slice,
            alphas: stage_alphas.as_deref(),
            constant: &constant,
        };
        let (sol, rep) = jfnk_solve(&stage, &guess, solver_cfg)?;
        report.newton_iters += rep.newton_iters;
        report.krylov_iters += rep.krylov_iters;
        report.newton_solves += 1;

        // (4) BDF-limit the stage and record its residual. The recorded
        // residual keeps the stage's frozen mask: the limited polynomial at
        // stage times is the mask-scaled one, and recording anything else
        // would re-expose the implicit stage terms to an explicit update.
        let mut stage_state = DgState {
            p,
            ncomp: nc,
            n,
            time: state.time + tab.c[i] * dt,
            moments: sol,
        };
        if limiter.enabled {
            bdf_limit_in_place(&mut stage_state, problem.bc);
        }
        let mut k = vec![0.0; len];
        let view = StateView {
            p,
            ncomp: nc,
            n,
            data: &stage_state.moments,
        };
        stage_residual(
            view,
            ops,
            problem,
            problem.bc,
            mask_slice,
            stage_alphas.as_deref(),
            &mut k,
        )?;
        k_lim.push(k);
        guess = stage_state.moments;
    }

    // final update from the limited stage residuals
    let mut next = state.clone();
    next.time = state.time + dt;
    for j in 0..n {
        for l in 0..=p {
            let scale = (2 * l + 1) as f64 * dt / grid.h;
            for m in 0..nc {
                let idx = (j * (p + 1) + l) * nc + m;
                let acc: f64 = (0..s).map(|i| tab.b[i] * k_lim[i][idx]).sum();
                next.moments[idx] -= scale * acc;
            }
        }
    }
    if limiter.enabled {
        bdf_limit_in_place(&mut next, problem.bc);
    }
    if !next.is_finite() {
        return Err(SolverError::InvalidState(
            "non-finite moments after step".into(),
        ));
    }
    report.time = next.time;
    Ok((next, report))
}

/// One explicit Runge-Kutta step with BDF limiting after each stage.
/// Stability (C <= 1/(2p+1)) is the caller's contract.
pub fn explicit_step(
    state: &DgState,
    grid: &Grid1d,
    tab: &ButcherTableau,
    problem: &Problem,
    ops: &DgOps,
    limiter: &LimiterConfig,
    dt: f64,
) -> Result<(DgState, StepReport)> {
    let s = tab.stages();
    let n = state.n;
    let nc = state.ncomp;
    let p = state.p;
    let len = state.moments.len();
    let mut ks: Vec<Vec<f64>> = Vec::with_capacity(s);
    for i in 0..s {
        let mut stage = state.clone();
        stage.time = state.time + tab.c[i] * dt;
        for (kappa, k_prev) in ks.iter().enumerate() {
            let aik = tab.a[i][kappa];
            if aik == 0.0 {
                continue;
            }
            for j in 0..n {
                for l in 0..=p {
                    let scale = (2 * l + 1) as f64 * aik * dt / grid.h;
                    for m in 0..nc {
                        let idx = (j * (p + 1) + l) * nc + m;
                        stage.moments[idx] -= scale * k_prev[idx];
                    }
                }
            }
        }
        if limiter.enabled {
            bdf_limit_in_place(&mut stage, problem.bc);
        }
        let mut k = vec![0.0; len];
        let view = StateView {
            p,
            ncomp: nc,
            n,
            data: &stage.moments,
        };
        stage_residual(view, ops, problem, problem.bc, None, None, &mut k)?;
        ks.push(k);
    }
    let mut next = state.clone();
    next.time = state.time + dt;
    for j in 0..n {
        for l in 0..=p {
            let scale = (2 * l + 1) as f64 * dt / grid.h;
            for m in 0..nc {
                let idx = (j * (p + 1) + l) * nc + m;
                let acc: f64 = (0..s).map(|i| tab.b[i] * ks[i][idx]).sum();
                next.moments[idx] -= scale * acc;
            }
        }
    }
    if limiter.enabled {
        bdf_limit_in_place(&mut next, problem.bc);
    }
    let report = StepReport {
        time: next.time,
        dt,
        ..Default::default()
    };
    Ok((next, report))
}

/// Time-step selection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DtMode {
    /// dt = r * h / ((2p+1) maxspeed), maxspeed recomputed every step
    Ratio(f64),
    /// dt = value * h (material-wave targeting)
    DtOverH(f64),
    /// constant dt
    Fixed(f64),
}

#[derive(Debug, Clone)]
pub enum TimeScheme {
    Dirk(ButcherTableau),
    Explicit(ButcherTableau),
}

impl TimeScheme {
    pub fn tableau(&self) -> &ButcherTableau {
        match self {
            TimeScheme::Dirk(t) | TimeScheme::Explicit(t) => t,
        }
    }
}

/// Integrate from the state's current time to `t_final`; returns the final
/// state and one report per step.
#[allow(clippy::too_many_arguments)]
pub fn integrate(
    state0: DgState,
    grid: &Grid1d,
    scheme: &TimeScheme,
    problem: &Problem,
    solver_cfg: &SolverConfig,
    limiter: &LimiterConfig,
    dt_mode: DtMode,
    t_final: f64,
) -> Result<(DgState, Vec<StepReport>)> {
    let p = state0.p;
    let ops = DgOps::new(p)?;
    let predictor = derive_predictor(scheme.tableau());
    let mut state = state0;
    if limiter.enabled {
        // loop invariant: stored states are limited
        bdf_limit_in_place(&mut state, problem.bc);
    }
    let mut reports = Vec::new();
    let mut step_index = 0usize;
    while state.time < t_final - 1e-12 * t_final.abs().max(1.0) {
        let maxspeed = problem
            .max_wave_speed(&state)
            .map_err(|e| SolverError::StepFailed {
                step: step_index,
                time: state.time,
                source: Box::new(e),
            })?;
        let dt_cfl = if maxspeed > 1e-14 {
            grid.h / ((2 * p + 1) as f64 * maxspeed)
        } else {
            f64::INFINITY
        };
        let mut dt = match dt_mode {
            DtMode::Ratio(r) => r * dt_cfl,
            DtMode::DtOverH(q) => q * grid.h,
            DtMode::Fixed(v) => v,
        };
        if !dt.is_finite() {
            dt = t_final - state.time;
        }
        dt = dt.min(t_final - state.time);
        let result = match scheme {
            TimeScheme::Dirk(tab) => dirk_dg_step(
                &state, grid, tab, &predictor, problem, &ops, solver_cfg, limiter, dt,
            ),
            TimeScheme::Explicit(tab) => {
                explicit_step(&state, grid, tab, problem, &ops, limiter, dt)
            }
        };
        let (next, mut report) = result.map_err(|e| SolverError::StepFailed {
            step: step_index,
            time: state.time,
            source: Box::new(e),
        })?;
        report.courant = maxspeed * dt / grid.h;
        report.ratio = if dt_cfl.is_finite() { dt / dt_cfl } else { 0.0 };
        reports.push(report);
        state = next;
        step_index += 1;
        if step_index > 2_000_000 {
            return Err(SolverError::InvalidConfig(
                "step count exceeded 2e6; check the time-step mode".into(),
            ));
        }
    }
    Ok((state, reports))
}
