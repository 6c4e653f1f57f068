//! Exact Riemann solver for the 1D Euler equations.
//!
//! Standard pressure-function Newton iteration with a two-rarefaction initial
//! guess; the sampler is self-similar in x/t.

use super::euler::{Primitive, GAMMA};
use crate::error::{Result, SolverError};

const TOL: f64 = 1e-12;
const MAX_ITER: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WaveKind {
    Shock,
    Rarefaction,
}

/// Solution of the Riemann problem: star state and wave pattern, plus a
/// self-similar sampler.
#[derive(Debug, Clone)]
pub struct RiemannSolution {
    pub left: Primitive,
    pub right: Primitive,
    pub p_star: f64,
    pub v_star: f64,
    pub rho_star_left: f64,
    pub rho_star_right: f64,
    pub left_wave: WaveKind,
    pub right_wave: WaveKind,
}

fn pressure_fn(p: f64, s: &Primitive) -> (f64, f64) {
    let a = 2.0 / ((GAMMA + 1.0) * s.rho);
    let b = (GAMMA - 1.0) / (GAMMA + 1.0) * s.p;
    let c = s.sound_speed();
    if p > s.p {
        // shock branch
        let q = (a / (p + b)).sqrt();
        let f = (p - s.p) * q;
        let df = q * (1.0 - 0.5 * (p - s.p) / (p + b));
        (f, df)
    } else {
        // rarefaction branch
        let z = (GAMMA - 1.0) / (2.0 * GAMMA);
        let f = 2.0 * c / (GAMMA - 1.0) * ((p / s.p).powf(z) - 1.0);
        let df = (p / s.p).powf(-(GAMMA + 1.0) / (2.0 * GAMMA)) / (s.rho * c);
        (f, df)
    }
}

pub fn exact_riemann_euler(left: Primitive, right: Primitive) -> Result<RiemannSolution> {
    if !left.is_physical() || !right.is_physical() {
        return Err(SolverError::InvalidState(
            "Riemann data must have positive density and pressure".into(),
        ));
    }
    let cl = left.sound_speed();
    let cr = right.sound_speed();
    let dv = right.v - left.v;
    if 2.0 * (cl + cr) / (GAMMA - 1.0) <= dv {
        return Err(SolverError::VacuumFormation);
    }

    // Two-rarefaction initial guess.
    let z = (GAMMA - 1.0) / (2.0 * GAMMA);
    let p0 = ((cl + cr - 0.5 * (GAMMA - 1.0) * dv)
        / (cl / left.p.powf(z) + cr / right.p.powf(z)))
    .powf(1.0 / z)
    .max(1e-10 * (left.p + right.p));

    let mut p = p0;
    let mut converged = false;
    for _ in 0..MAX_ITER {
        let (fl, dfl) = pressure_fn(p, &left);
        let (fr, dfr) = pressure_fn(p, &right);
        let g = fl + fr + dv;
        let dp = g / (dfl + dfr);
        let p_new = (p - dp).max(1e-12 * p);
        let rel = (p_new - p).abs() / (0.5 * (p_new + p));
        p = p_new;
        if rel < TOL || g.abs() < TOL {
            converged = true;
            break;
        }
    }
    // Polish and check the residual.
    let (fl, _) = pressure_fn(p, &left);
    let (fr, _) = pressure_fn(p, &right);
    if !converged && (fl + fr + dv).abs() > 1e-9 {
        return Err(SolverError::NewtonNonConvergence {
            iterations: MAX_ITER,
            residual: (fl + fr + dv).abs(),
            history: vec![],
        });
    }
    let v_star = 0.5 * (left.v + right.v) + 0.5 * (fr - fl);

    let gm = (GAMMA - 1.0) / (GAMMA + 1.0);
    let star_density = |s: &Primitive, shock: bool| -> f64 {
        if shock {
            s.rho * ((p / s.p + gm) / (gm * p / s.p + 1.0))
        } else {
            s.rho * (p / s.p).powf(1.0 / GAMMA)
        }
    };
    let left_wave = if p > left.p {
        WaveKind::Shock
    } else {
        WaveKind::Rarefaction
    };
    let right_wave = if p > right.p {
        WaveKind::Shock
    } else {
        WaveKind::Rarefaction
    };
    Ok(RiemannSolution {
        left,
        right,
        p_star: p,
        v_star,
        rho_star_left: star_density(&left, left_wave == WaveKind::Shock),
        rho_star_right: star_density(&right, right_wave == WaveKind::Shock),
        left_wave,
        right_wave,
    })
}

impl RiemannSolution {
    /// Speed of the left wave (shock speed, or rarefaction head/tail pair).
    pub fn left_wave_speeds(&self) -> (f64, f64) {
        let cl = self.left.sound_speed();
        match self.left_wave {
            WaveKind::Shock => {
                let q = ((GAMMA + 1.0) / (2.0 * GAMMA) * self.p_star / self.left.p
                    + (GAMMA - 1.0) / (2.0 * GAMMA))
                    .sqrt();
                let s = self.left.v - cl * q;
                (s, s)
            }
            WaveKind::Rarefaction => {
                let c_star = cl * (self.p_star / self.left.p).powf((GAMMA - 1.0) / (2.0 * GAMMA));
                (self.left.v - cl, self.v_star - c_star)
            }
        }
    }

    pub fn right_wave_speeds(&self) -> (f64, f64) {
        let cr = self.right.sound_speed();
        match self.right_wave {
            WaveKind::Shock => {
                let q = ((GAMMA + 1.0) / (2.0 * GAMMA) * self.p_star / self.right.p
                    + (GAMMA - 1.0) / (2.0 * GAMMA))
                    .sqrt();
                let s = self.right.v + cr * q;
                (s, s)
            }
            WaveKind::Rarefaction => {
                let c_star = cr * (self.p_star / self.right.p).powf((GAMMA - 1.0) / (2.0 * GAMMA));
                (self.v_star + c_star, self.right.v + cr)
            }
        }
    }

    /// Sample the self-similar solution at the ray `xi = x/t`.
    pub fn sample(&self, xi: f64) -> Primitive {
        if xi < self.v_star {
            // left of the contact
            let (head, tail) = self.left_wave_speeds();
            match self.left_wave {
                WaveKind::Shock => {
                    if xi < head {
                        self.left
                    } else {
                        Primitive::new(self.rho_star_left, self.v_star, self.p_star)
                    }
                }
                WaveKind::Rarefaction => {
                    if xi < head {
                        self.left
                    } else if xi > tail {
                        Primitive::new(self.rho_star_left, self.v_star, self.p_star)
                    } else {
                        let cl = self.left.sound_speed();
                        let c = 2.0 / (GAMMA + 1.0)
                            * (cl + 0.5 * (GAMMA - 1.0) * (self.left.v - xi));
                        let v = 2.0 / (GAMMA + 1.0)
                            * (cl + 0.5 * (GAMMA - 1.0) * self.left.v + xi);
                        let rho = self.left.rho * (c / cl).powf(2.0 / (GAMMA - 1.0));
                        let p = self.left.p * (c / cl).powf(2.0 * GAMMA / (GAMMA - 1.0));
                        Primitive::new(rho, v, p)
                    }
                }
            }
        } else {
            let (tail, head) = self.right_wave_speeds();
            match self.right_wave {
                WaveKind::Shock => {
                    if xi > head {
                        self.right
                    } else {
                        Primitive::new(self.rho_star_right, self.v_star, self.p_star)
                    }
                }
                WaveKind::Rarefaction => {
                    if xi > head {
                        self.right
                    } else if xi < tail {
                        Primitive::new(self.rho_star_right, self.v_star, self.p_star)
                    } else {
                        let cr = self.right.sound_speed();
                        let c = 2.0 / (GAMMA + 1.0)
                            * (cr - 0.5 * (GAMMA - 1.0) * (self.right.v - xi));
                        let v = 2.0 / (GAMMA + 1.0)
                            * (-cr + 0.5 * (GAMMA - 1.0) * self.right.v + xi);
                        let rho = self.right.rho * (c / cr).powf(2.0 / (GAMMA - 1.0));
                        let p = self.right.p * (c / cr).powf(2.0 * GAMMA / (GAMMA - 1.0));
                        Primitive::new(rho, v, p)
                    }
                }
            }
        }
    }

    /// Max of |v| + c over the wave fan (initial states, star states and
    /// rarefaction interiors).
    pub fn max_wave_speed(&self) -> f64 {
        let mut m: f64 = 0.0;
        let mut probe = |s: Primitive| {
            m = m.max(s.v.abs() + s.sound_speed());
        };
        probe(self.left);
        probe(self.right);
        probe(Primitive::new(self.rho_star_left, self.v_star, self.p_star));
        probe(Primitive::new(self.rho_star_right, self.v_star, self.p_star));
        let (hl, tl) = self.left_wave_speeds();
        let (tr, hr) = self.right_wave_speeds();
        for i in 0..=32 {
            let f = i as f64 / 32.0;
            probe(self.sample(hl + f * (tl - hl)));
            probe(self.sample(tr + f * (hr - tr)));
        }
        m
    }
}
