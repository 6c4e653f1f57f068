//! Legendre basis on the reference cell [-1, 1] and Gauss-Legendre quadrature.
//!
//! The modal basis is fixed to `p <= 2`: zeta_0 = 1, zeta_1 = y,
//! zeta_2 = (3y^2 - 1)/2. Mass coefficients are Z_l = 2/(2l+1); stiffness
//! coefficients Z'_{lm} = integral of zeta_m * zeta_l' vanish for m >= l.

use crate::error::{Result, SolverError};

pub const MAX_DEGREE: usize = 2;

/// Evaluate the Legendre polynomial of degree `l` at `y` in [-1, 1].
pub fn eval_legendre(l: usize, y: f64) -> Result<f64> {
    if l > MAX_DEGREE {
        return Err(SolverError::UnsupportedDegree(l));
    }
    Ok(legendre(l, y))
}

#[inline]
pub(crate) fn legendre(l: usize, y: f64) -> f64 {
    match l {
        0 => 1.0,
        1 => y,
        _ => 0.5 * (3.0 * y * y - 1.0),
    }
}

#[inline]
pub(crate) fn legendre_deriv(l: usize, y: f64) -> f64 {
    match l {
        0 => 0.0,
        1 => 1.0,
        _ => 3.0 * y,
    }
}

/// Mass and stiffness coefficients of the Legendre basis up to `degree`.
#[derive(Debug, Clone)]
pub struct LegendreBasis {
    pub degree: usize,
    /// Z_l = 2/(2l+1)
    pub mass: Vec<f64>,
    /// stiffness[l][m] = integral over [-1,1] of zeta_m * d(zeta_l)/dy
    pub stiffness: Vec<Vec<f64>>,
}

impl LegendreBasis {
    pub fn new(degree: usize) -> Result<Self> {
        if degree > MAX_DEGREE {
            return Err(SolverError::UnsupportedDegree(degree));
        }
        let mass = (0..=degree).map(|l| 2.0 / (2 * l + 1) as f64).collect();
        let mut stiffness = vec![vec![0.0; degree + 1]; degree + 1];
        for l in 0..=degree {
            for m in 0..l {
                // zeta_l' has degree l-1 and parity opposite to zeta_l, so the
                // product integrates to 2 exactly when l-m is odd.
                if (l - m) % 2 == 1 {
                    stiffness[l][m] = 2.0;
                }
            }
        }
        Ok(Self {
            degree,
            mass,
            stiffness,
        })
    }
}

/// Gauss-Legendre quadrature nodes and weights on [-1, 1].
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    /// `n`-point Gauss-Legendre rule, exact for polynomials of degree 2n-1.
    pub fn gauss_legendre(n: usize) -> Result<Self> {
        let (nodes, weights): (Vec<f64>, Vec<f64>) = match n {
            1 => (vec![0.0], vec![2.0]),
            2 => {
                let x = 1.0 / 3.0_f64.sqrt();
                (vec![-x, x], vec![1.0, 1.0])
            }
            3 => {
                let x = (3.0_f64 / 5.0).sqrt();
                (vec![-x, 0.0, x], vec![5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0])
            }
            4 => (
                vec![
                    -0.8611363115940526,
                    -0.3399810435848563,
                    0.3399810435848563,
                    0.8611363115940526,
                ],
                vec![
                    0.34785484513745385,
                    0.6521451548625461,
                    0.6521451548625461,
                    0.34785484513745385,
                ],
            ),
            5 => (
                vec![
                    -0.9061798459386640,
                    -0.5384693101056831,
                    0.0,
                    0.5384693101056831,
                    0.9061798459386640,
                ],
                vec![
                    0.23692688505618908,
                    0.47862867049936647,
                    0.5688888888888889,
                    0.47862867049936647,
                    0.23692688505618908,
                ],
            ),
            6 => (
                vec![
                    -0.9324695142031521,
                    -0.6612093864662645,
                    -0.2386191860831969,
                    0.2386191860831969,
                    0.6612093864662645,
                    0.9324695142031521,
                ],
                vec![
                    0.17132449237917036,
                    0.3607615730481386,
                    0.46791393457269104,
                    0.46791393457269104,
                    0.3607615730481386,
                    0.17132449237917036,
                ],
            ),
            _ => return Err(SolverError::UnsupportedQuadrature(n)),
        };
        Ok(Self { nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Integrate a scalar function over [-1, 1].
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn legendre_closed_forms() {
        assert_abs_diff_eq!(eval_legendre(0, 0.3).unwrap(), 1.0);
        assert_abs_diff_eq!(eval_legendre(1, 0.5).unwrap(), 0.5);
        assert_abs_diff_eq!(eval_legendre(2, 1.0).unwrap(), 1.0);
        assert!(eval_legendre(3, 0.0).is_err());
    }

    #[test]
    fn endpoint_values() {
        for l in 0..=MAX_DEGREE {
            assert_abs_diff_eq!(legendre(l, 1.0), 1.0, epsilon = 1e-15);
            assert_abs_diff_eq!(legendre(l, -1.0), (-1.0_f64).powi(l as i32), epsilon = 1e-15);
        }
    }

    #[test]
    fn orthogonality() {
        let quad = QuadratureRule::gauss_legendre(6).unwrap();
        let basis = LegendreBasis::new(2).unwrap();
        for l in 0..=2 {
            for m in 0..=2 {
                let v = quad.integrate(|y| legendre(l, y) * legendre(m, y));
                let expect = if l == m { basis.mass[l] } else { 0.0 };
                assert_abs_diff_eq!(v, expect, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn stiffness_coefficients() {
        let basis = LegendreBasis::new(2).unwrap();
        assert_eq!(basis.stiffness[1][0], 2.0);
        assert_eq!(basis.stiffness[2][1], 2.0);
        assert_eq!(basis.stiffness[2][0], 0.0);
        for l in 0..=2 {
            for m in l..=2 {
                assert_eq!(basis.stiffness[l][m], 0.0);
            }
        }
        // Cross-check against quadrature.
        let quad = QuadratureRule::gauss_legendre(6).unwrap();
        for l in 0..=2 {
            for m in 0..=2 {
                let v = quad.integrate(|y| legendre(m, y) * legendre_deriv(l, y));
                assert_abs_diff_eq!(v, basis.stiffness[l][m], epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn quadrature_weights_and_exactness() {
        for n in 1..=6 {
            let quad = QuadratureRule::gauss_legendre(n).unwrap();
            let wsum: f64 = quad.weights.iter().sum();
            assert_abs_diff_eq!(wsum, 2.0, epsilon = 1e-15);
            // Exact on monomials up to degree 2n-1.
            for d in 0..(2 * n) {
                let exact = if d % 2 == 0 {
                    2.0 / (d as f64 + 1.0)
                } else {
                    0.0
                };
                let v = quad.integrate(|y| y.powi(d as i32));
                assert_abs_diff_eq!(v, exact, epsilon = 1e-14);
            }
        }
        assert!(QuadratureRule::gauss_legendre(9).is_err());
    }
}
