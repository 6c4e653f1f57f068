//! Entropy solutions of the Burgers equation with flux f(u) = u^2/4
//! (characteristic speed u/2), for the two initial profiles used in the
//! experiments.

use crate::error::{Result, SolverError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BurgersIc {
    /// 1 on [-0.25, 0.25], 0 elsewhere; domain [-1, 1] periodic.
    DoubleStep,
    /// 0.5 - 0.25 sin(pi x); domain [0, 2] periodic.
    SmoothSine,
}

impl BurgersIc {
    pub fn domain(self) -> (f64, f64) {
        match self {
            BurgersIc::DoubleStep => (-1.0, 1.0),
            BurgersIc::SmoothSine => (0.0, 2.0),
        }
    }

    pub fn initial(self, x: f64) -> f64 {
        match self {
            BurgersIc::DoubleStep => {
                let x = wrap(x, -1.0, 1.0);
                if (-0.25..=0.25).contains(&x) {
                    1.0
                } else {
                    0.0
                }
            }
            BurgersIc::SmoothSine => 0.5 - 0.25 * (std::f64::consts::PI * x).sin(),
        }
    }
}

fn wrap(x: f64, lo: f64, hi: f64) -> f64 {
    let len = hi - lo;
    lo + (x - lo).rem_euclid(len)
}

/// Signed periodic distance from `b` to `a` in (-len/2, len/2].
fn periodic_delta(a: f64, b: f64, len: f64) -> f64 {
    let mut d = (a - b).rem_euclid(len);
    if d > 0.5 * len {
        d -= len;
    }
    d
}

/// Shock-formation time of the smooth profile: 1 / max(-d/dx f'(u0)).
pub fn smooth_shock_time() -> f64 {
    8.0 / std::f64::consts::PI
}

/// Entropy solution value at (x, t).
pub fn exact_burgers(ic: BurgersIc, x: f64, t: f64) -> Result<f64> {
    if t < 0.0 {
        return Err(SolverError::InvalidConfig("negative time".into()));
    }
    if t == 0.0 {
        return Ok(ic.initial(x));
    }
    match ic {
        BurgersIc::DoubleStep => {
            // Rarefaction from x = -0.25 (speeds 0 to 1/2), shock from
            // x = 0.25 at Rankine-Hugoniot speed (f(1)-f(0))/(1-0) = 1/4.
            if t >= 2.0 {
                return Err(SolverError::InvalidConfig(
                    "double-step profile supported before wave interaction (t < 2)".into(),
                ));
            }
            let x = wrap(x, -1.0, 1.0);
            let fan_end = -0.25 + 0.5 * t;
            let shock = 0.25 + 0.25 * t;
            Ok(if x < -0.25 {
                0.0
            } else if x < fan_end {
                2.0 * (x + 0.25) / t
            } else if x < shock {
                1.0
            } else {
                0.0
            })
        }
        BurgersIc::SmoothSine => {
            let period = 2.0;
            let tb = smooth_shock_time();
            let u0 = |x: f64| BurgersIc::SmoothSine.initial(x);
            let g = |u: f64| u - u0(x - 0.5 * t * u);
            if t < tb {
                // Unique characteristic root; g is monotone increasing in u.
                Ok(bisect(g, 0.25, 0.75))
            } else {
                // The profile is antisymmetric about its mean 0.5, so the
                // shock moves at f'(0.5) = 1/4 from its formation point at
                // x = t_b/4: x_s(t) = t/4.
                let shock = wrap(0.25 * t, 0.0, 2.0);
                let d = periodic_delta(x, shock, period);
                let roots = all_roots(g, 0.25, 0.75);
                let u = if d >= 0.0 {
                    roots.iter().cloned().fold(f64::INFINITY, f64::min)
                } else {
                    roots.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
                };
                Ok(u)
            }
        }
    }
}

fn bisect(g: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut glo = g(lo);
    if glo == 0.0 {
        return lo;
    }
    for _ in 0..90 {
        let mid = 0.5 * (lo + hi);
        let gm = g(mid);
        if gm == 0.0 {
            return mid;
        }
        if (gm > 0.0) == (glo > 0.0) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn all_roots(g: impl Fn(f64) -> f64 + Copy, lo: f64, hi: f64) -> Vec<f64> {
    let n = 400;
    let mut roots = Vec::new();
    let mut prev_x = lo;
    let mut prev_g = g(lo);
    for i in 1..=n {
        let x = lo + (hi - lo) * i as f64 / n as f64;
        let gx = g(x);
        if prev_g == 0.0 {
            roots.push(prev_x);
        } else if (gx > 0.0) != (prev_g > 0.0) {
            roots.push(bisect(g, prev_x, x));
        }
        prev_x = x;
        prev_g = gx;
    }
    if roots.is_empty() {
        // Fall back to the global bisection bracket.
        roots.push(bisect(g, lo, hi));
    }
    roots
}
