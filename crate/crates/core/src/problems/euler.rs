//! 1D Euler equations of gas dynamics with ideal-gas EOS, Gamma = 1.4.

use crate::error::{Result, SolverError};

pub const GAMMA: f64 = 1.4;

/// Primitive variables (density, velocity, pressure).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Primitive {
    pub rho: f64,
    pub v: f64,
    pub p: f64,
}

impl Primitive {
    pub fn new(rho: f64, v: f64, p: f64) -> Self {
        Self { rho, v, p }
    }

    pub fn sound_speed(&self) -> f64 {
        (GAMMA * self.p / self.rho).sqrt()
    }

    /// Conserved variables (rho, rho*v, E) with E = p/(Gamma-1) + rho v^2/2.
    pub fn to_conserved(&self) -> [f64; 3] {
        let e = self.p / (GAMMA - 1.0) + 0.5 * self.rho * self.v * self.v;
        [self.rho, self.rho * self.v, e]
    }

    pub fn is_physical(&self) -> bool {
        self.rho > 0.0 && self.p > 0.0 && self.rho.is_finite() && self.p.is_finite()
    }
}

/// Primitive variables recovered from a conserved triple.
pub fn primitive_from_conserved(u: &[f64]) -> Result<Primitive> {
    let rho = u[0];
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(SolverError::InvalidState(format!(
            "non-positive density {rho}"
        )));
    }
    let v = u[1] / rho;
    let p = (GAMMA - 1.0) * (u[2] - 0.5 * rho * v * v);
    if !(p > 0.0) || !p.is_finite() {
        return Err(SolverError::InvalidState(format!(
            "non-positive pressure {p}"
        )));
    }
    Ok(Primitive { rho, v, p })
}

/// Physical flux (rho v, rho v^2 + p, v (E + p)).
pub fn euler_flux(u: &[f64], out: &mut [f64]) -> Result<()> {
    let prim = primitive_from_conserved(u)?;
    let e = u[2];
    out[0] = u[1];
    out[1] = u[1] * prim.v + prim.p;
    out[2] = prim.v * (e + prim.p);
    Ok(())
}

/// Spectral radius |v| + c of the flux Jacobian.
pub fn euler_max_eig(u: &[f64]) -> Result<f64> {
    let prim = primitive_from_conserved(u)?;
    Ok(prim.v.abs() + prim.sound_speed())
}

/// Velocity only (used by the material-wave viscosity estimate).
pub fn euler_velocity(u: &[f64]) -> Result<f64> {
    let rho = u[0];
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(SolverError::InvalidState(format!(
            "non-positive density {rho}"
        )));
    }
    Ok(u[1] / rho)
}
