//! Uniform 1D grid and boundary conditions.

use crate::error::{Result, SolverError};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryCondition {
    Periodic,
    /// Exterior traces copy the boundary cell's polynomial.
    Transmissive,
}

impl BoundaryCondition {
    /// Index of the cell supplying the neighbor trace `offset` cells away
    /// from cell `j` (offset is -1 or +1).
    #[inline]
    pub fn neighbor(self, j: usize, offset: isize, n: usize) -> usize {
        let i = j as isize + offset;
        match self {
            BoundaryCondition::Periodic => i.rem_euclid(n as isize) as usize,
            BoundaryCondition::Transmissive => i.clamp(0, n as isize - 1) as usize,
        }
    }
}

/// Uniform grid of `n` cells over [x_left, x_right].
#[derive(Debug, Clone, PartialEq)]
pub struct Grid1d {
    pub n: usize,
    pub x_left: f64,
    pub x_right: f64,
    pub h: f64,
}

impl Grid1d {
    pub fn new(n: usize, x_left: f64, x_right: f64) -> Result<Self> {
        if n == 0 || !(x_right > x_left) {
            return Err(SolverError::InvalidConfig(format!(
                "grid needs n > 0 and x_right > x_left (got n={n}, [{x_left}, {x_right}])"
            )));
        }
        let h = (x_right - x_left) / n as f64;
        Ok(Self {
            n,
            x_left,
            x_right,
            h,
        })
    }

    #[inline]
    pub fn center(&self, j: usize) -> f64 {
        self.x_left + (j as f64 + 0.5) * self.h
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.center(j)).collect()
    }
}
