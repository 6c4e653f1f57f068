//! Modal DG state: per-cell Legendre moments for every solution component.

use crate::basis::{legendre, QuadratureRule};
use crate::error::{Result, SolverError};
use crate::grid::Grid1d;

/// Quadrature order used to project arbitrary initial data. Oversampled with
/// respect to the 3-point rule of the volume terms so that projections of
/// trigonometric data are accurate to ~1e-12.
pub const PROJECTION_QUADRATURE: usize = 6;

/// Moments `u_j^(l)` stored cell-major: index `(j*(p+1) + l)*ncomp + m`.
#[derive(Debug, Clone, PartialEq)]
pub struct DgState {
    pub p: usize,
    pub ncomp: usize,
    pub n: usize,
    pub time: f64,
    pub moments: Vec<f64>,
}

impl DgState {
    pub fn zeros(p: usize, ncomp: usize, n: usize) -> Result<Self> {
        if p > crate::basis::MAX_DEGREE {
            return Err(SolverError::UnsupportedDegree(p));
        }
        Ok(Self {
            p,
            ncomp,
            n,
            time: 0.0,
            moments: vec![0.0; n * (p + 1) * ncomp],
        })
    }

    #[inline]
    pub fn idx(&self, j: usize, l: usize, m: usize) -> usize {
        (j * (self.p + 1) + l) * self.ncomp + m
    }

    #[inline]
    pub fn get(&self, j: usize, l: usize, m: usize) -> f64 {
        self.moments[self.idx(j, l, m)]
    }

    #[inline]
    pub fn set(&mut self, j: usize, l: usize, m: usize, v: f64) {
        let i = self.idx(j, l, m);
        self.moments[i] = v;
    }

    /// Cell means of component `m`.
    pub fn means(&self, m: usize) -> Vec<f64> {
        (0..self.n).map(|j| self.get(j, 0, m)).collect()
    }

    /// Evaluate the DG polynomial of cell `j` at reference coordinate `y`.
    pub fn eval(&self, j: usize, y: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.ncomp];
        self.eval_into(j, y, &mut out);
        out
    }

    pub fn eval_into(&self, j: usize, y: f64, out: &mut [f64]) {
        out.fill(0.0);
        for l in 0..=self.p {
            let z = legendre(l, y);
            for m in 0..self.ncomp {
                out[m] += self.get(j, l, m) * z;
            }
        }
    }

    /// Total integral of each component over the domain (h * sum of means).
    pub fn total_mass(&self, h: f64) -> Vec<f64> {
        (0..self.ncomp)
            .map(|m| h * (0..self.n).map(|j| self.get(j, 0, m)).sum::<f64>())
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.moments.iter().fold(0.0, |a, &v| a.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.moments.iter().all(|v| v.is_finite())
    }

    /// L2 projection of vector-valued data onto the DG space.
    pub fn project(
        p: usize,
        ncomp: usize,
        grid: &Grid1d,
        f: impl Fn(f64, &mut [f64]),
    ) -> Result<Self> {
        let mut state = Self::zeros(p, ncomp, grid.n)?;
        let quad = QuadratureRule::gauss_legendre(PROJECTION_QUADRATURE)?;
        let mut fval = vec![0.0; ncomp];
        for j in 0..grid.n {
            let xc = grid.center(j);
            for (q, &y) in quad.nodes.iter().enumerate() {
                f(xc + 0.5 * grid.h * y, &mut fval);
                let w = quad.weights[q];
                for l in 0..=p {
                    let scale = w * legendre(l, y) * (2 * l + 1) as f64 / 2.0;
                    for m in 0..ncomp {
                        let i = state.idx(j, l, m);
                        state.moments[i] += scale * fval[m];
                    }
                }
            }
        }
        Ok(state)
    }
}

/// Moments of a scalar function on one cell: `u^(l) = (1/Z_l) * integral of
/// f(x_j + h y/2) zeta_l(y) dy`, via the oversampled projection rule.
pub fn project_onto_cell(f: impl Fn(f64) -> f64, center: f64, h: f64, p: usize) -> Result<Vec<f64>> {
    if p > crate::basis::MAX_DEGREE {
        return Err(SolverError::UnsupportedDegree(p));
    }
    let quad = QuadratureRule::gauss_legendre(PROJECTION_QUADRATURE)?;
    let mut out = vec![0.0; p + 1];
    for (q, &y) in quad.nodes.iter().enumerate() {
        let v = f(center + 0.5 * h * y);
        for l in 0..=p {
            out[l] += quad.weights[q] * v * legendre(l, y) * (2 * l + 1) as f64 / 2.0;
        }
    }
    Ok(out)
}
