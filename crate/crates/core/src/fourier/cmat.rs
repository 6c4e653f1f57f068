//! Dense complex matrices of size <= 4 with the few operations the Fourier
//! machinery needs: products, inverses, determinants, linear solves, and
//! closed-form eigen-decompositions for 2x2 and 3x3 (Cardano plus Newton
//! refinement on the characteristic polynomial).

use crate::error::{Result, SolverError};
use num_complex::Complex64 as C64;

#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    pub n: usize,
    pub data: Vec<C64>,
}

impl CMat {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![C64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Self {
        let n = rows.len();
        let mut m = Self::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        m
    }

    pub fn mul(&self, other: &CMat) -> CMat {
        let n = self.n;
        let mut out = CMat::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self[(i, k)];
                if aik == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += aik * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn add(&self, other: &CMat) -> CMat {
        let mut out = self.clone();
        for (o, v) in out.data.iter_mut().zip(&other.data) {
            *o += v;
        }
        out
    }

    pub fn scale(&self, s: C64) -> CMat {
        let mut out = self.clone();
        for v in &mut out.data {
            *v *= s;
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        let n = self.n;
        (0..n)
            .map(|i| (0..n).map(|j| self[(i, j)] * x[j]).sum())
            .collect()
    }

    pub fn det(&self) -> C64 {
        let mut lu = self.clone();
        let n = self.n;
        let mut det = C64::new(1.0, 0.0);
        for k in 0..n {
            let piv = (k..n)
                .max_by(|&i, &j| lu[(i, k)].norm().total_cmp(&lu[(j, k)].norm()))
                .unwrap();
            if lu[(piv, k)].norm() == 0.0 {
                return C64::new(0.0, 0.0);
            }
            if piv != k {
                for j in 0..n {
                    let t = lu[(k, j)];
                    lu[(k, j)] = lu[(piv, j)];
                    lu[(piv, j)] = t;
                }
                det = -det;
            }
            det *= lu[(k, k)];
            for i in (k + 1)..n {
                let f = lu[(i, k)] / lu[(k, k)];
                for j in k..n {
                    let v = lu[(k, j)];
                    lu[(i, j)] -= f * v;
                }
            }
        }
        det
    }

    pub fn solve(&self, rhs: &[C64]) -> Result<Vec<C64>> {
        let n = self.n;
        let mut m = self.clone();
        let mut x = rhs.to_vec();
        for k in 0..n {
            let piv = (k..n)
                .max_by(|&i, &j| m[(i, k)].norm().total_cmp(&m[(j, k)].norm()))
                .unwrap();
            if m[(piv, k)].norm() < 1e-300 {
                return Err(SolverError::SingularMatrix);
            }
            if piv != k {
                for j in 0..n {
                    let t = m[(k, j)];
                    m[(k, j)] = m[(piv, j)];
                    m[(piv, j)] = t;
                }
                x.swap(k, piv);
            }
            for i in (k + 1)..n {
                let f = m[(i, k)] / m[(k, k)];
                for j in k..n {
                    let v = m[(k, j)];
                    m[(i, j)] -= f * v;
                }
                let xk = x[k];
                x[i] -= f * xk;
            }
        }
        for i in (0..n).rev() {
            for j in (i + 1)..n {
                let xj = x[j];
                x[i] -= m[(i, j)] * xj;
            }
            x[i] /= m[(i, i)];
        }
        Ok(x)
    }

    pub fn inverse(&self) -> Result<CMat> {
        let n = self.n;
        let mut out = CMat::zeros(n);
        for j in 0..n {
            let mut e = vec![C64::new(0.0, 0.0); n];
            e[j] = C64::new(1.0, 0.0);
            let col = self.solve(&e)?;
            for i in 0..n {
                out[(i, j)] = col[i];
            }
        }
        Ok(out)
    }

    /// Eigenvalues via closed forms (quadratic / Cardano), Newton-refined on
    /// the characteristic polynomial. Supported for n <= 3.
    pub fn eigenvalues(&self) -> Result<Vec<C64>> {
        match self.n {
            1 => Ok(vec![self[(0, 0)]]),
            2 => {
                let tr = self[(0, 0)] + self[(1, 1)];
                let det = self.det();
                let disc = (tr * tr - 4.0 * det).sqrt();
                Ok(vec![0.5 * (tr + disc), 0.5 * (tr - disc)])
            }
            3 => {
                // monic characteristic polynomial x^3 + a2 x^2 + a1 x + a0
                let m = self;
                let tr = m[(0, 0)] + m[(1, 1)] + m[(2, 2)];
                let minors = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]
                    + m[(0, 0)] * m[(2, 2)]
                    - m[(0, 2)] * m[(2, 0)]
                    + m[(1, 1)] * m[(2, 2)]
                    - m[(1, 2)] * m[(2, 1)];
                let det = m.det();
                let a2 = -tr;
                let a1 = minors;
                let a0 = -det;
                let mut roots = cubic_roots(a2, a1, a0);
                // polish each root on p(x) = x^3 + a2 x^2 + a1 x + a0
                for r in &mut roots {
                    for _ in 0..3 {
                        let p = ((*r + a2) * *r + a1) * *r + a0;
                        let dp = (3.0 * *r + 2.0 * a2) * *r + a1;
                        if dp.norm() > 0.0 {
                            *r -= p / dp;
                        }
                    }
                }
                Ok(roots)
            }
            _ => Err(SolverError::InvalidConfig(format!(
                "eigenvalues unsupported for n = {}",
                self.n
            ))),
        }
    }

    /// Unit-norm eigenvector for the given eigenvalue, with the first
    /// significant entry rotated onto the positive real axis.
    pub fn eigenvector(&self, lambda: C64) -> Result<Vec<C64>> {
        let n = self.n;
        let mut b = self.clone();
        for i in 0..n {
            b[(i, i)] -= lambda;
        }
        let v = match n {
            2 => {
                // null vector of the (rank-1) shifted matrix from its rows
                let r0 = [b[(0, 0)], b[(0, 1)]];
                let r1 = [b[(1, 0)], b[(1, 1)]];
                let n0 = r0[0].norm() + r0[1].norm();
                let n1 = r1[0].norm() + r1[1].norm();
                let r = if n0 >= n1 { r0 } else { r1 };
                vec![r[1], -r[0]]
            }
            3 => {
                let row = |i: usize| [b[(i, 0)], b[(i, 1)], b[(i, 2)]];
                let cross = |u: [C64; 3], v: [C64; 3]| {
                    [
                        u[1] * v[2] - u[2] * v[1],
                        u[2] * v[0] - u[0] * v[2],
                        u[0] * v[1] - u[1] * v[0],
                    ]
                };
                let candidates = [
                    cross(row(0), row(1)),
                    cross(row(0), row(2)),
                    cross(row(1), row(2)),
                ];
                let best = candidates
                    .iter()
                    .max_by(|a, b| {
                        let na: f64 = a.iter().map(|v| v.norm_sqr()).sum();
                        let nb: f64 = b.iter().map(|v| v.norm_sqr()).sum();
                        na.total_cmp(&nb)
                    })
                    .unwrap();
                best.to_vec()
            }
            _ => {
                return Err(SolverError::InvalidConfig(format!(
                    "eigenvector unsupported for n = {n}"
                )))
            }
        };
        let norm: f64 = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-13 * self.max_abs().max(1.0) {
            return Err(SolverError::DefectiveMatrix(lambda));
        }
        let mut out: Vec<C64> = v.into_iter().map(|c| c / norm).collect();
        // deterministic phase: first significant entry positive real
        if let Some(first) = out.iter().find(|c| c.norm() > 1e-10) {
            let phase = first / first.norm();
            for c in &mut out {
                *c /= phase;
            }
        }
        Ok(out)
    }
}

impl std::ops::Index<(usize, usize)> for CMat {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.n + j]
    }
}

/// Roots of the monic cubic x^3 + a2 x^2 + a1 x + a0 (Cardano).
fn cubic_roots(a2: C64, a1: C64, a0: C64) -> Vec<C64> {
    let third = C64::new(1.0 / 3.0, 0.0);
    let p = a1 - a2 * a2 * third;
    let q = 2.0 * a2 * a2 * a2 / 27.0 - a2 * a1 * third + a0;
    let shift = -a2 * third;
    if p.norm() < 1e-300 && q.norm() < 1e-300 {
        return vec![shift; 3];
    }
    let disc = (0.25 * q * q + p * p * p / 27.0).sqrt();
    // pick the additive branch that keeps |u| large for stability
    let u3a = -0.5 * q + disc;
    let u3b = -0.5 * q - disc;
    let u3 = if u3a.norm() >= u3b.norm() { u3a } else { u3b };
    let u = u3.powf(1.0 / 3.0);
    let omega = C64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
    let mut roots = Vec::with_capacity(3);
    for k in 0..3 {
        let uk = u * omega.powu(k);
        let t = if uk.norm() > 0.0 {
            uk - p / (3.0 * uk)
        } else {
            C64::new(0.0, 0.0)
        };
        roots.push(t + shift);
    }
    roots
}
