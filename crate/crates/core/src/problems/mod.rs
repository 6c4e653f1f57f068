//! Flux functions, numerical fluxes, wave-speed estimates, initial conditions
//! and exact reference solutions.

pub mod burgers;
pub mod euler;
pub mod riemann;

use crate::basis::QuadratureRule;
use crate::error::{Result, SolverError};
use crate::grid::{BoundaryCondition, Grid1d};
use crate::state::{DgState, PROJECTION_QUADRATURE};
use burgers::BurgersIc;
use euler::Primitive;
use riemann::RiemannSolution;

/// Physical flux of the conservation law.
#[derive(Debug, Clone)]
pub enum FluxKind {
    Advection { speed: f64 },
    /// f(u) = A u for a constant matrix (row-major), with a precomputed
    /// spectral-radius bound.
    LinearSystem { dim: usize, mat: Vec<f64>, eig_bound: f64 },
    /// f(u) = u^2 / 4
    Burgers,
    Euler,
}

impl FluxKind {
    pub fn ncomp(&self) -> usize {
        match self {
            FluxKind::Advection { .. } | FluxKind::Burgers => 1,
            FluxKind::LinearSystem { dim, .. } => *dim,
            FluxKind::Euler => 3,
        }
    }

    pub fn eval(&self, u: &[f64], out: &mut [f64]) -> Result<()> {
        match self {
            FluxKind::Advection { speed } => {
                out[0] = speed * u[0];
                Ok(())
            }
            FluxKind::LinearSystem { dim, mat, .. } => {
                for i in 0..*dim {
                    out[i] = (0..*dim).map(|j| mat[i * dim + j] * u[j]).sum();
                }
                Ok(())
            }
            FluxKind::Burgers => {
                out[0] = 0.25 * u[0] * u[0];
                Ok(())
            }
            FluxKind::Euler => euler::euler_flux(u, out),
        }
    }

    /// Spectral radius of the flux Jacobian at `u`.
    pub fn max_abs_eig(&self, u: &[f64]) -> Result<f64> {
        match self {
            FluxKind::Advection { speed } => Ok(speed.abs()),
            FluxKind::LinearSystem { eig_bound, .. } => Ok(*eig_bound),
            FluxKind::Burgers => Ok(0.5 * u[0].abs()),
            FluxKind::Euler => euler::euler_max_eig(u),
        }
    }
}

/// Rule for the Rusanov viscosity coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ViscosityRule {
    /// max of the Jacobian spectral radii of the two traces.
    Acoustic,
    /// max(|v-|, |v+|): targets the material wave in implicit Euler runs.
    Material,
}

/// Rusanov (local Lax-Friedrichs) flux (f(u-)+f(u+))/2 - (alpha/2)(u+ - u-).
pub fn rusanov_flux(
    flux: &FluxKind,
    um: &[f64],
    up: &[f64],
    alpha: f64,
    out: &mut [f64],
) -> Result<()> {
    let n = flux.ncomp();
    let mut fm = [0.0; 3];
    let mut fp = [0.0; 3];
    flux.eval(um, &mut fm[..n])?;
    flux.eval(up, &mut fp[..n])?;
    for m in 0..n {
        out[m] = 0.5 * (fm[m] + fp[m]) - 0.5 * alpha * (up[m] - um[m]);
    }
    Ok(())
}

/// Linear-advection flux a (b+ u- + b- u+) with b± = (a ± beta |a|)/(2a);
/// beta = 1 recovers pure upwinding, beta = 0 the central flux.
pub fn upwind_flux_parameterized(um: f64, up: f64, a: f64, beta: f64) -> Result<f64> {
    if a == 0.0 {
        return Err(SolverError::ZeroSpeed);
    }
    let b_plus = (a + beta * a.abs()) / (2.0 * a);
    let b_minus = (a - beta * a.abs()) / (2.0 * a);
    Ok(a * (b_plus * um + b_minus * up))
}

/// Interface flux selection for a solver run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NumericalFlux {
    Rusanov,
    /// beta-parameterized linear flux; valid for scalar advection only.
    UpwindBeta(f64),
}

#[derive(Debug, Clone)]
enum Ic {
    /// sin(pi x - sin(pi x)/pi)
    SinWarp,
    /// 1 on [-0.25, 0.25], 0 elsewhere
    DoubleStep,
    /// -sin(10 pi x)
    SineHf,
    /// sin(pi x) + sin(10 pi x) exp(-20 x^2)
    SmoothHf,
    /// sin(pi x) + 3 on [-0.4, 0.4]
    SinDiscont,
    Burgers(BurgersIc),
    EulerRiemann { left: Primitive, right: Primitive },
    /// rho = 1 + 0.5 sin(2 pi x), v = 1, p = 10^kappa
    EulerDensityWave { kappa: i32 },
}

impl Ic {
    fn eval(&self, x: f64, out: &mut [f64]) {
        use std::f64::consts::PI;
        match self {
            Ic::SinWarp => out[0] = (PI * x - (PI * x).sin() / PI).sin(),
            Ic::DoubleStep => out[0] = if (-0.25..=0.25).contains(&x) { 1.0 } else { 0.0 },
            Ic::SineHf => out[0] = -(10.0 * PI * x).sin(),
            Ic::SmoothHf => {
                out[0] = (PI * x).sin() + (10.0 * PI * x).sin() * (-20.0 * x * x).exp()
            }
            Ic::SinDiscont => {
                out[0] = (PI * x).sin() + if (-0.4..=0.4).contains(&x) { 3.0 } else { 0.0 }
            }
            Ic::Burgers(ic) => out[0] = ic.initial(x),
            Ic::EulerRiemann { left, right } => {
                let s = if x < 0.0 { left } else { right };
                out.copy_from_slice(&s.to_conserved());
            }
            Ic::EulerDensityWave { kappa } => {
                let rho = 1.0 + 0.5 * (2.0 * PI * x).sin();
                let p = 10.0_f64.powi(*kappa);
                out.copy_from_slice(&Primitive::new(rho, 1.0, p).to_conserved());
            }
        }
    }
}

#[derive(Debug, Clone)]
enum ExactKind {
    /// u(x, t) = u0(x - a t), periodic over the domain.
    Advection { speed: f64 },
    Burgers(BurgersIc),
    EulerRiemann(RiemannSolution),
    EulerDensityWave { kappa: i32 },
}

/// A named conservation-law setup: flux, viscosity rule, boundary handling,
/// initial condition and (when known) the exact solution.
#[derive(Debug, Clone)]
pub struct Problem {
    pub id: String,
    pub flux: FluxKind,
    pub viscosity: ViscosityRule,
    pub num_flux: NumericalFlux,
    pub bc: BoundaryCondition,
    pub domain: (f64, f64),
    pub default_t_final: f64,
    ic: Ic,
    exact: Option<ExactKind>,
}

impl Problem {
    pub fn ncomp(&self) -> usize {
        self.flux.ncomp()
    }

    /// Problems addressable by the string identifiers used in run configs.
    pub fn by_name(name: &str) -> Result<Problem> {
        let advection = |id: &str, ic: Ic, t: f64| Problem {
            id: id.to_string(),
            flux: FluxKind::Advection { speed: 1.0 },
            viscosity: ViscosityRule::Acoustic,
            num_flux: NumericalFlux::Rusanov,
            bc: BoundaryCondition::Periodic,
            domain: (-1.0, 1.0),
            default_t_final: t,
            ic,
            exact: Some(ExactKind::Advection { speed: 1.0 }),
        };
        let euler_riemann = |id: &str, left: Primitive, right: Primitive, domain: (f64, f64)| {
            let sol = riemann::exact_riemann_euler(left, right)?;
            Ok(Problem {
                id: id.to_string(),
                flux: FluxKind::Euler,
                viscosity: ViscosityRule::Material,
                num_flux: NumericalFlux::Rusanov,
                bc: BoundaryCondition::Transmissive,
                domain,
                default_t_final: 1.0,
                ic: Ic::EulerRiemann { left, right },
                exact: Some(ExactKind::EulerRiemann(sol)),
            })
        };
        match name {
            "advect-sin-warp" => Ok(advection(name, Ic::SinWarp, 2.0)),
            "double-step" => Ok(advection(name, Ic::DoubleStep, 2.0)),
            "sine-hf" => Ok(advection(name, Ic::SineHf, 2.0)),
            "smooth-hf" => Ok(advection(name, Ic::SmoothHf, 2.0)),
            "sin-discont" => Ok(advection(name, Ic::SinDiscont, 2.0)),
            "burgers-smooth" => Ok(Problem {
                id: name.to_string(),
                flux: FluxKind::Burgers,
                viscosity: ViscosityRule::Acoustic,
                num_flux: NumericalFlux::Rusanov,
                bc: BoundaryCondition::Periodic,
                domain: BurgersIc::SmoothSine.domain(),
                default_t_final: 2.0,
                ic: Ic::Burgers(BurgersIc::SmoothSine),
                exact: Some(ExactKind::Burgers(BurgersIc::SmoothSine)),
            }),
            "burgers-step" => Ok(Problem {
                id: name.to_string(),
                flux: FluxKind::Burgers,
                viscosity: ViscosityRule::Acoustic,
                num_flux: NumericalFlux::Rusanov,
                bc: BoundaryCondition::Periodic,
                domain: BurgersIc::DoubleStep.domain(),
                default_t_final: 0.5,
                ic: Ic::Burgers(BurgersIc::DoubleStep),
                exact: Some(ExactKind::Burgers(BurgersIc::DoubleStep)),
            }),
            "euler-expansion-a" => euler_riemann(
                name,
                Primitive::new(1.0, -0.15, 1.0),
                Primitive::new(0.5, 0.15, 1.0),
                (-2.0, 2.0),
            ),
            "euler-expansion-a-short" => euler_riemann(
                name,
                Primitive::new(1.0, -0.15, 1.0),
                Primitive::new(0.5, 0.15, 1.0),
                (-0.5, 0.5),
            ),
            // wide enough to hold both shocks (speeds about -2.8 and 5.2)
            // up to t = 1
            "euler-colliding-b" => euler_riemann(
                name,
                Primitive::new(1.5, 0.5, 10.0),
                Primitive::new(0.5, -0.5, 10.0),
                (-6.0, 6.0),
            ),
            "euler-colliding-b-short" => euler_riemann(
                name,
                Primitive::new(1.5, 0.5, 10.0),
                Primitive::new(0.5, -0.5, 10.0),
                (-1.5, 1.5),
            ),
            "euler-density-wave" | "euler-density-wave-stiff" => {
                let kappa = if name.ends_with("stiff") { 2 } else { 0 };
                Ok(Problem {
                    id: name.to_string(),
                    flux: FluxKind::Euler,
                    viscosity: ViscosityRule::Acoustic,
                    num_flux: NumericalFlux::Rusanov,
                    bc: BoundaryCondition::Periodic,
                    domain: (0.0, 1.0),
                    default_t_final: 0.25,
                    ic: Ic::EulerDensityWave { kappa },
                    exact: Some(ExactKind::EulerDensityWave { kappa }),
                })
            }
            _ => Err(SolverError::UnknownProblem(name.to_string())),
        }
    }

    pub fn initial(&self, x: f64, out: &mut [f64]) {
        self.ic.eval(x, out);
    }

    pub fn initial_state(&self, grid: &Grid1d, p: usize) -> Result<DgState> {
        DgState::project(p, self.ncomp(), grid, |x, out| self.initial(x, out))
    }

    pub fn has_exact(&self) -> bool {
        self.exact.is_some()
    }

    /// Exact solution at (x, t), if available.
    pub fn exact(&self, x: f64, t: f64, out: &mut [f64]) -> Result<bool> {
        let Some(kind) = &self.exact else {
            return Ok(false);
        };
        match kind {
            ExactKind::Advection { speed } => {
                let (lo, hi) = self.domain;
                let x0 = lo + (x - speed * t - lo).rem_euclid(hi - lo);
                self.ic.eval(x0, out);
            }
            ExactKind::Burgers(ic) => out[0] = burgers::exact_burgers(*ic, x, t)?,
            ExactKind::EulerRiemann(sol) => {
                let prim = if t <= 0.0 {
                    if x < 0.0 {
                        sol.left
                    } else {
                        sol.right
                    }
                } else {
                    sol.sample(x / t)
                };
                out.copy_from_slice(&prim.to_conserved());
            }
            ExactKind::EulerDensityWave { kappa } => {
                use std::f64::consts::PI;
                let rho = 1.0 + 0.5 * (2.0 * PI * (x - t)).sin();
                let p = 10.0_f64.powi(*kappa);
                out.copy_from_slice(&Primitive::new(rho, 1.0, p).to_conserved());
            }
        }
        Ok(true)
    }

    /// Riemann solution attached to this problem, when it has one.
    pub fn riemann_solution(&self) -> Option<&RiemannSolution> {
        match &self.exact {
            Some(ExactKind::EulerRiemann(sol)) => Some(sol),
            _ => None,
        }
    }

    /// Cell means of the exact solution at time `t` (component-major rows,
    /// length ncomp * n), via the projection quadrature.
    pub fn exact_means(&self, grid: &Grid1d, t: f64) -> Result<Option<Vec<f64>>> {
        if !self.has_exact() {
            return Ok(None);
        }
        let quad = QuadratureRule::gauss_legendre(PROJECTION_QUADRATURE)?;
        let nc = self.ncomp();
        let mut means = vec![0.0; nc * grid.n];
        let mut val = vec![0.0; nc];
        for j in 0..grid.n {
            let xc = grid.center(j);
            for (q, &y) in quad.nodes.iter().enumerate() {
                self.exact(xc + 0.5 * grid.h * y, t, &mut val)?;
                for m in 0..nc {
                    means[m * grid.n + j] += 0.5 * quad.weights[q] * val[m];
                }
            }
        }
        Ok(Some(means))
    }

    /// Rusanov viscosity for a pair of interface traces.
    pub fn viscosity_alpha(&self, um: &[f64], up: &[f64]) -> Result<f64> {
        match self.viscosity {
            ViscosityRule::Acoustic => Ok(self
                .flux
                .max_abs_eig(um)?
                .max(self.flux.max_abs_eig(up)?)),
            ViscosityRule::Material => match self.flux {
                FluxKind::Euler => Ok(euler::euler_velocity(um)?
                    .abs()
                    .max(euler::euler_velocity(up)?.abs())),
                _ => Ok(self
                    .flux
                    .max_abs_eig(um)?
                    .max(self.flux.max_abs_eig(up)?)),
            },
        }
    }

    /// Interface numerical flux.
    pub fn numerical_flux(&self, um: &[f64], up: &[f64], out: &mut [f64]) -> Result<()> {
        match self.num_flux {
            NumericalFlux::Rusanov => {
                let alpha = self.viscosity_alpha(um, up)?;
                rusanov_flux(&self.flux, um, up, alpha, out)
            }
            NumericalFlux::UpwindBeta(beta) => match self.flux {
                FluxKind::Advection { speed } => {
                    out[0] = upwind_flux_parameterized(um[0], up[0], speed, beta)?;
                    Ok(())
                }
                _ => Err(SolverError::InvalidConfig(
                    "beta-parameterized flux requires scalar advection".into(),
                )),
            },
        }
    }

    /// Max of the Jacobian spectral radius over interface traces and volume
    /// quadrature samples of the current state.
    pub fn max_wave_speed(&self, state: &DgState) -> Result<f64> {
        let quad = QuadratureRule::gauss_legendre(3)?;
        let mut speed: f64 = 0.0;
        let mut u = vec![0.0; self.ncomp()];
        for j in 0..state.n {
            for &y in quad.nodes.iter().chain([-1.0, 1.0].iter()) {
                state.eval_into(j, y, &mut u);
                speed = speed.max(self.flux.max_abs_eig(&u)?);
            }
        }
        Ok(speed)
    }
}
