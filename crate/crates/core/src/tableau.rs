//! Butcher tableaux for the DIRK and explicit Runge-Kutta schemes, and the
//! composite-backward-Euler predictor tableau derived from the abscissae.

use crate::error::{Result, SolverError};

#[derive(Debug, Clone, PartialEq)]
pub struct ButcherTableau {
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
}

impl ButcherTableau {
    pub fn stages(&self) -> usize {
        self.b.len()
    }

    /// Strictly lower triangular coefficient matrix.
    pub fn is_explicit(&self) -> bool {
        self.a
            .iter()
            .enumerate()
            .all(|(i, row)| row.iter().skip(i).all(|&v| v == 0.0))
    }

    /// Lower triangular with at least one nonzero diagonal entry.
    pub fn is_dirk(&self) -> bool {
        let lower = self
            .a
            .iter()
            .enumerate()
            .all(|(i, row)| row.iter().skip(i + 1).all(|&v| v == 0.0));
        lower && self.a.iter().enumerate().any(|(i, row)| row[i] != 0.0)
    }

    /// Residuals of the consistency and order-2/3 conditions:
    /// (sum b - 1, sum b c - 1/2, sum b c^2 - 1/3, sum b a c - 1/6).
    pub fn order_residuals(&self) -> [f64; 4] {
        let s = self.stages();
        let r1: f64 = self.b.iter().sum::<f64>() - 1.0;
        let r2: f64 = (0..s).map(|i| self.b[i] * self.c[i]).sum::<f64>() - 0.5;
        let r3: f64 = (0..s).map(|i| self.b[i] * self.c[i] * self.c[i]).sum::<f64>() - 1.0 / 3.0;
        let r4: f64 = (0..s)
            .map(|i| {
                self.b[i]
                    * (0..s)
                        .map(|j| self.a[i][j] * self.c[j])
                        .sum::<f64>()
            })
            .sum::<f64>()
            - 1.0 / 6.0;
        [r1, r2, r3, r4]
    }

    pub fn validate(&self) -> Result<()> {
        let s = self.stages();
        if self.a.len() != s || self.c.len() != s || self.a.iter().any(|r| r.len() != s) {
            return Err(SolverError::InvalidConfig("ragged tableau".into()));
        }
        for i in 0..s {
            let row_sum: f64 = self.a[i].iter().sum();
            if (row_sum - self.c[i]).abs() > 1e-14 {
                return Err(SolverError::InvalidConfig(format!(
                    "row {i} sums to {row_sum}, abscissa is {}",
                    self.c[i]
                )));
            }
        }
        let bs: f64 = self.b.iter().sum();
        if (bs - 1.0).abs() > 1e-14 {
            return Err(SolverError::InvalidConfig(format!(
                "weights sum to {bs}"
            )));
        }
        Ok(())
    }
}

/// Two-stage DIRK, second order for any gamma > 0:
/// rows (g, 0; 1-2g, g), b = (1/2, 1/2), c = (g, 1-g).
pub fn dirk22(gamma: f64) -> Result<ButcherTableau> {
    if !(gamma > 0.0) {
        return Err(SolverError::InvalidConfig(format!(
            "dirk22 needs gamma > 0, got {gamma}"
        )));
    }
    Ok(ButcherTableau {
        a: vec![vec![gamma, 0.0], vec![1.0 - 2.0 * gamma, gamma]],
        b: vec![0.5, 0.5],
        c: vec![gamma, 1.0 - gamma],
    })
}

/// gamma of the L-stable two-stage DIRK variant.
pub const DIRK22_LSTABLE_GAMMA: f64 = 1.0 - std::f64::consts::FRAC_1_SQRT_2;

/// The three gamma values at which the three-stage DIRK is third order.
pub const DIRK33_THIRD_ORDER_GAMMAS: [f64; 3] = [
    0.158983899988677,
    0.435866521508459,
    2.405149578502864,
];

/// gamma of the L-stable (stiffly accurate) three-stage variant.
pub const DIRK33_LSTABLE_GAMMA: f64 = 0.435866521508459;

/// Three-stage DIRK: c = (g, (1+g)/2, 1), last row equal to the weights
/// b = (-3g^2/2 + 4g - 1/4, 3g^2/2 - 5g + 5/4, g). Third order at the
/// gammas in `DIRK33_THIRD_ORDER_GAMMAS`.
pub fn dirk33(gamma: f64) -> Result<ButcherTableau> {
    if !(gamma > 0.0) {
        return Err(SolverError::InvalidConfig(format!(
            "dirk33 needs gamma > 0, got {gamma}"
        )));
    }
    let b1 = -1.5 * gamma * gamma + 4.0 * gamma - 0.25;
    let b2 = 1.5 * gamma * gamma - 5.0 * gamma + 1.25;
    Ok(ButcherTableau {
        a: vec![
            vec![gamma, 0.0, 0.0],
            vec![0.5 * (1.0 - gamma), gamma, 0.0],
            vec![b1, b2, gamma],
        ],
        b: vec![b1, b2, gamma],
        c: vec![gamma, 0.5 * (1.0 + gamma), 1.0],
    })
}

/// Four-stage third-order SSP DIRK with exact rational coefficients.
pub fn dirk43() -> ButcherTableau {
    ButcherTableau {
        a: vec![
            vec![0.5, 0.0, 0.0, 0.0],
            vec![1.0 / 6.0, 0.5, 0.0, 0.0],
            vec![-0.5, 0.5, 0.5, 0.0],
            vec![1.5, -1.5, 0.5, 0.5],
        ],
        b: vec![1.5, -1.5, 0.5, 0.5],
        c: vec![0.5, 2.0 / 3.0, 0.5, 1.0],
    }
}

/// Explicit comparison schemes: Heun (order 2) or the Shu-Osher SSP
/// Runge-Kutta (order 3).
pub fn explicit_rk(order: usize) -> Result<ButcherTableau> {
    match order {
        1 => Ok(ButcherTableau {
            a: vec![vec![0.0]],
            b: vec![1.0],
            c: vec![0.0],
        }),
        2 => Ok(ButcherTableau {
            a: vec![vec![0.0, 0.0], vec![1.0, 0.0]],
            b: vec![0.5, 0.5],
            c: vec![0.0, 1.0],
        }),
        3 => Ok(ButcherTableau {
            a: vec![
                vec![0.0, 0.0, 0.0],
                vec![1.0, 0.0, 0.0],
                vec![0.25, 0.25, 0.0],
            ],
            b: vec![1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0],
            c: vec![0.0, 1.0, 0.5],
        }),
        _ => Err(SolverError::UnknownScheme(format!("explicit RK{order}"))),
    }
}

/// Composite backward Euler predictor evaluated at the parent abscissae:
/// per-stage increments c_i - c_{i-1} with c_0 = 0.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictorTableau {
    pub c: Vec<f64>,
    pub increments: Vec<f64>,
}

impl PredictorTableau {
    /// Full Butcher tableau of the predictor: row i holds the first i
    /// increments, the weights equal the last row.
    pub fn tableau(&self) -> ButcherTableau {
        let s = self.increments.len();
        let a = (0..s)
            .map(|i| {
                (0..s)
                    .map(|j| if j <= i { self.increments[j] } else { 0.0 })
                    .collect()
            })
            .collect();
        ButcherTableau {
            a,
            b: self.increments.clone(),
            c: self.c.clone(),
        }
    }
}

pub fn derive_predictor(tab: &ButcherTableau) -> PredictorTableau {
    let mut increments = Vec::with_capacity(tab.stages());
    let mut prev = 0.0;
    for &ci in &tab.c {
        increments.push(ci - prev);
        prev = ci;
    }
    PredictorTableau {
        c: tab.c.clone(),
        increments,
    }
}
