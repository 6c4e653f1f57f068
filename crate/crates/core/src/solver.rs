//! Jacobian-free Newton-Krylov solver with a restart-free matrix-free GMRES
//! inner iteration.

use crate::error::{Result, SolverError};
use serde::{Deserialize, Serialize};

/// Evaluation contract for one stage system: flattened unknown vector to a
/// residual of the same length, closing over the frozen stage data.
pub trait ResidualFunction {
    fn dim(&self) -> usize;
    fn eval(&self, u: &[f64], out: &mut [f64]) -> Result<()>;
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct SolverConfig {
    /// Absolute max-norm tolerance on the Newton residual.
    pub newton_tol: f64,
    pub newton_max: usize,
    /// Relative 2-norm tolerance of the inner GMRES solve.
    pub krylov_tol: f64,
    pub krylov_max: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            newton_tol: 1e-5,
            newton_max: 50,
            krylov_tol: 1e-5,
            krylov_max: 100,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct NewtonReport {
    pub newton_iters: usize,
    pub krylov_iters: usize,
    pub residual_norms: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

#[derive(Debug, Clone)]
pub struct GmresResult {
    pub x: Vec<f64>,
    pub iterations: usize,
    pub residual_norm: f64,
    pub breakdown: bool,
}

/// Restart-free GMRES for `apply(x) = rhs`, starting from x = 0. Stops when
/// the residual drops below `tol * ||rhs||` or the iteration cap is reached.
/// A zero Arnoldi norm (happy breakdown) ends the iteration with the current
/// best solution.
pub fn gmres(
    mut apply: impl FnMut(&[f64], &mut [f64]) -> Result<()>,
    rhs: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<GmresResult> {
    let n = rhs.len();
    let beta = norm2(rhs);
    if beta == 0.0 {
        return Ok(GmresResult {
            x: vec![0.0; n],
            iterations: 0,
            residual_norm: 0.0,
            breakdown: false,
        });
    }
    let target = tol * beta;
    let max_iter = max_iter.min(n);

    let mut basis: Vec<Vec<f64>> = vec![rhs.iter().map(|v| v / beta).collect()];
    // Hessenberg columns after Givens rotations, plus rotation parameters.
    let mut h_cols: Vec<Vec<f64>> = Vec::new();
    let mut cs: Vec<f64> = Vec::new();
    let mut sn: Vec<f64> = Vec::new();
    let mut g = vec![beta];
    let mut res_norm = beta;
    let mut iters = 0;
    let mut breakdown = false;
    let mut w = vec![0.0; n];

    while iters < max_iter && res_norm > target {
        let k = iters;
        apply(&basis[k], &mut w)?;
        // modified Gram-Schmidt
        let mut h = vec![0.0; k + 2];
        for (i, v) in basis.iter().enumerate() {
            h[i] = dot(&w, v);
            for (wj, vj) in w.iter_mut().zip(v) {
                *wj -= h[i] * vj;
            }
        }
        let wn = norm2(&w);
        h[k + 1] = wn;
        // apply the accumulated rotations to the new column
        for i in 0..k {
            let t = cs[i] * h[i] + sn[i] * h[i + 1];
            h[i + 1] = -sn[i] * h[i] + cs[i] * h[i + 1];
            h[i] = t;
        }
        let denom = (h[k] * h[k] + h[k + 1] * h[k + 1]).sqrt();
        if denom == 0.0 {
            breakdown = true;
            iters += 1;
            break;
        }
        let c = h[k] / denom;
        let s = h[k + 1] / denom;
        h[k] = denom;
        h[k + 1] = 0.0;
        cs.push(c);
        sn.push(s);
        g.push(-s * g[k]);
        g[k] *= c;
        res_norm = g[k + 1].abs();
        h_cols.push(h);
        iters += 1;
        if wn == 0.0 {
            // exact invariant subspace: the least-squares solve is exact
            breakdown = true;
            break;
        }
        // Slow progress over a long window: hand the partial solution to the
        // outer Newton iteration (inexact-Newton step) rather than grinding
        // out the full subspace. A hard flatline (singular system) is caught
        // the same way.
        if iters >= 20 && res_norm > 0.98 * g[iters - 15].abs() {
            breakdown = true;
            break;
        }
        if iters < max_iter && res_norm > target {
            basis.push(w.iter().map(|v| v / wn).collect());
        }
    }

    // Back substitution on the triangular system, shrinking the subspace if
    // the least-squares solution explodes along an almost-flat direction
    // (beyond what the matrix-free product noise can support).
    let mut m = h_cols.len();
    let mut y;
    loop {
        y = vec![0.0; m];
        for i in (0..m).rev() {
            let mut v = g[i];
            for j in (i + 1)..m {
                v -= h_cols[j][i] * y[j];
            }
            y[i] = v / h_cols[i][i];
        }
        if m == 0 || norm2(&y) <= beta / f64::EPSILON.sqrt() {
            break;
        }
        m -= 1;
    }
    let mut x = vec![0.0; n];
    for (j, yj) in y.iter().enumerate() {
        for (xi, vi) in x.iter_mut().zip(&basis[j]) {
            *xi += yj * vi;
        }
    }
    // A breakdown with leftover residual means the Krylov space is exhausted
    // (singular or defective operator); the minimum-residual solution over
    // the explored space is still returned, flagged.
    Ok(GmresResult {
        x,
        iterations: iters,
        residual_norm: res_norm,
        breakdown,
    })
}

/// First-order finite-difference directional derivative
/// (G(u + eps v) - G(u)) / eps with eps = sqrt(machine eps) (1 + ||u||) / ||v||.
/// `gu` holds the precomputed residual G(u). A zero direction returns zeros.
pub fn jv_product(
    residual: &dyn ResidualFunction,
    u: &[f64],
    gu: &[f64],
    v: &[f64],
    out: &mut [f64],
) -> Result<()> {
    let vn = norm2(v);
    if vn == 0.0 {
        out.fill(0.0);
        return Ok(());
    }
    let eps = f64::EPSILON.sqrt() * (1.0 + norm2(u)) / vn;
    let shifted: Vec<f64> = u.iter().zip(v).map(|(ui, vi)| ui + eps * vi).collect();
    residual.eval(&shifted, out)?;
    for (o, g) in out.iter_mut().zip(gu) {
        *o = (*o - g) / eps;
    }
    Ok(())
}

/// Newton iteration with matrix-free GMRES linearization. Converges when
/// ||G(u)||_inf falls below the absolute Newton tolerance; a non-converged
/// iteration is an error carrying the residual history.
pub fn jfnk_solve(
    residual: &dyn ResidualFunction,
    u0: &[f64],
    cfg: &SolverConfig,
) -> Result<(Vec<f64>, NewtonReport)> {
    let (u, report, converged) = jfnk_iterate(residual, u0, cfg, false)?;
    if converged {
        Ok((u, report))
    } else {
        Err(SolverError::NewtonNonConvergence {
            iterations: report.newton_iters,
            residual: report.residual_norms.last().copied().unwrap_or(f64::NAN),
            history: report.residual_norms,
        })
    }
}

/// Newton iteration that hands back its best iterate even when the target
/// tolerance is out of reach. Used for the limiter predictor, whose systems
/// can be genuinely singular: stalls are cut short and catastrophic
/// null-direction excursions are backed out.
pub fn jfnk_solve_lenient(
    residual: &dyn ResidualFunction,
    u0: &[f64],
    cfg: &SolverConfig,
) -> Result<(Vec<f64>, NewtonReport, bool)> {
    jfnk_iterate(residual, u0, cfg, true)
}

fn jfnk_iterate(
    residual: &dyn ResidualFunction,
    u0: &[f64],
    cfg: &SolverConfig,
    lenient: bool,
) -> Result<(Vec<f64>, NewtonReport, bool)> {
    let n = residual.dim();
    let mut u = u0.to_vec();
    let mut gu = vec![0.0; n];
    let mut report = NewtonReport::default();
    let mut best_u = u.clone();
    let mut best_rnorm = f64::INFINITY;
    let mut stalls = 0;
    for iter in 0..=cfg.newton_max {
        residual.eval(&u, &mut gu)?;
        let rnorm = norm_inf(&gu);
        report.residual_norms.push(rnorm);
        if rnorm < best_rnorm {
            // less than one percent of progress counts as a stall
            if rnorm > 0.99 * best_rnorm {
                stalls += 1;
            } else {
                stalls = 0;
            }
            best_rnorm = rnorm;
            best_u.copy_from_slice(&u);
        } else {
            stalls += 1;
            if lenient && rnorm > 10.0 * best_rnorm {
                // catastrophic excursion (singular linearization): back off
                // to the best iterate rather than wandering further
                u.copy_from_slice(&best_u);
                residual.eval(&u, &mut gu)?;
            }
        }
        if rnorm <= cfg.newton_tol {
            return Ok((u, report, true));
        }
        if iter == cfg.newton_max || (lenient && stalls >= 3) {
            break;
        }
        let rhs: Vec<f64> = gu.iter().map(|v| -v).collect();
        let lin = gmres(
            |v, out| jv_product(residual, &u, &gu, v, out),
            &rhs,
            cfg.krylov_tol,
            cfg.krylov_max,
        )?;
        report.krylov_iters += lin.iterations;
        report.newton_iters += 1;
        for (ui, di) in u.iter_mut().zip(&lin.x) {
            *ui += di;
        }
    }
    Ok((best_u, report, false))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    struct Closure<F: Fn(&[f64], &mut [f64])> {
        n: usize,
        f: F,
    }

    impl<F: Fn(&[f64], &mut [f64])> ResidualFunction for Closure<F> {
        fn dim(&self) -> usize {
            self.n
        }
        fn eval(&self, u: &[f64], out: &mut [f64]) -> Result<()> {
            (self.f)(u, out);
            Ok(())
        }
    }

    #[test]
    fn gmres_identity_converges_immediately() {
        let rhs = vec![1.0, -2.0, 3.0];
        let res = gmres(
            |v, out| {
                out.copy_from_slice(v);
                Ok(())
            },
            &rhs,
            1e-12,
            10,
        )
        .unwrap();
        assert_eq!(res.iterations, 1);
        for (x, r) in res.x.iter().zip(&rhs) {
            assert_abs_diff_eq!(x, r, epsilon = 1e-12);
        }
    }

    #[test]
    fn gmres_zero_rhs() {
        let res = gmres(
            |v, out| {
                out.copy_from_slice(v);
                Ok(())
            },
            &[0.0; 4],
            1e-12,
            10,
        )
        .unwrap();
        assert_eq!(res.iterations, 0);
        assert!(res.x.iter().all(|&v| v == 0.0));
    }

    /// Dense LU with partial pivoting, used as the direct-solve oracle.
    fn lu_solve(a: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
        let n = b.len();
        let mut m: Vec<Vec<f64>> = a.to_vec();
        let mut x = b.to_vec();
        for k in 0..n {
            let piv = (k..n).max_by(|&i, &j| m[i][k].abs().total_cmp(&m[j][k].abs())).unwrap();
            m.swap(k, piv);
            x.swap(k, piv);
            for i in (k + 1)..n {
                let f = m[i][k] / m[k][k];
                for j in k..n {
                    m[i][j] -= f * m[k][j];
                }
                x[i] -= f * x[k];
            }
        }
        for i in (0..n).rev() {
            for j in (i + 1)..n {
                x[i] -= m[i][j] * x[j];
            }
            x[i] /= m[i][i];
        }
        x
    }

    #[test]
    fn gmres_matches_dense_oracle() {
        // 5x5 SPD system A = D + v v^T.
        let n = 5;
        let v: Vec<f64> = (0..n).map(|i| 0.3 * (i as f64 + 1.0)).collect();
        let mut a = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                a[i][j] = v[i] * v[j];
            }
            a[i][i] += 2.0 + i as f64;
        }
        let rhs: Vec<f64> = (0..n).map(|i| (i as f64 - 1.5).cos()).collect();
        let oracle = lu_solve(&a, &rhs);
        let res = gmres(
            |x, out| {
                for i in 0..n {
                    out[i] = dot(&a[i], x);
                }
                Ok(())
            },
            &rhs,
            1e-13,
            50,
        )
        .unwrap();
        for (x, o) in res.x.iter().zip(&oracle) {
            assert_abs_diff_eq!(x, o, epsilon = 1e-10);
        }
    }

    #[test]
    fn jv_product_linear_map_is_exact() {
        let res = Closure {
            n: 3,
            f: |u: &[f64], out: &mut [f64]| {
                out[0] = 2.0 * u[0] - u[1];
                out[1] = u[1] + 3.0 * u[2];
                out[2] = -u[0];
            },
        };
        let u = vec![0.4, -0.7, 0.1];
        let mut gu = vec![0.0; 3];
        res.eval(&u, &mut gu).unwrap();
        let v = vec![1.0, 2.0, -1.0];
        let mut jv = vec![0.0; 3];
        jv_product(&res, &u, &gu, &v, &mut jv).unwrap();
        // For linear G the directional derivative equals G(v) - G(0).
        let mut gv = vec![0.0; 3];
        res.eval(&v, &mut gv).unwrap();
        for (a, b) in jv.iter().zip(&gv) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-6);
        }
    }

    #[test]
    fn jv_product_quadratic() {
        let res = Closure {
            n: 1,
            f: |u: &[f64], out: &mut [f64]| out[0] = u[0] * u[0],
        };
        let u = vec![1.0];
        let mut gu = vec![0.0];
        res.eval(&u, &mut gu).unwrap();
        let mut jv = vec![0.0];
        jv_product(&res, &u, &gu, &[1.0], &mut jv).unwrap();
        assert_abs_diff_eq!(jv[0], 2.0, epsilon = 1e-6);
        // zero direction returns zero
        jv_product(&res, &u, &gu, &[0.0], &mut jv).unwrap();
        assert_abs_diff_eq!(jv[0], 0.0);
    }

    #[test]
    fn jfnk_affine_single_newton_iteration() {
        let res = Closure {
            n: 2,
            f: |u: &[f64], out: &mut [f64]| {
                out[0] = 3.0 * u[0] + u[1] - 1.0;
                out[1] = u[0] + 2.0 * u[1] + 0.5;
            },
        };
        // a single Newton iteration suffices up to the Krylov tolerance (the
        // finite-difference products carry ~1e-8 roundoff noise)
        let cfg = SolverConfig {
            newton_tol: 1e-6,
            newton_max: 5,
            krylov_tol: 1e-9,
            krylov_max: 20,
        };
        let (u, rep) = jfnk_solve(&res, &[0.0, 0.0], &cfg).unwrap();
        assert_eq!(rep.newton_iters, 1);
        let mut g = vec![0.0; 2];
        res.eval(&u, &mut g).unwrap();
        assert!(norm_inf(&g) < 1e-6);
    }

    #[test]
    fn jfnk_scalar_root_matches_dense_newton_oracle() {
        // G(u) = u + dt u^2/4 - 1
        let dt = 0.8;
        let res = Closure {
            n: 1,
            f: move |u: &[f64], out: &mut [f64]| out[0] = u[0] + dt * u[0] * u[0] / 4.0 - 1.0,
        };
        // dense Newton oracle
        let mut x = 1.0_f64;
        for _ in 0..50 {
            let g = x + dt * x * x / 4.0 - 1.0;
            let dg = 1.0 + dt * x / 2.0;
            x -= g / dg;
        }
        let cfg = SolverConfig {
            newton_tol: 1e-12,
            newton_max: 30,
            krylov_tol: 1e-13,
            krylov_max: 10,
        };
        let (u, _) = jfnk_solve(&res, &[1.0], &cfg).unwrap();
        assert_abs_diff_eq!(u[0], x, epsilon = 1e-9);
    }

    #[test]
    fn jfnk_zero_iterations_at_root() {
        let res = Closure {
            n: 1,
            f: |u: &[f64], out: &mut [f64]| out[0] = u[0] - 2.0,
        };
        let (u, rep) = jfnk_solve(&res, &[2.0], &SolverConfig::default()).unwrap();
        assert_eq!(rep.newton_iters, 0);
        assert_abs_diff_eq!(u[0], 2.0);
    }

    #[test]
    fn jfnk_nonconvergence_carries_history() {
        // G(u) = u^2 + 1 has no real root.
        let res = Closure {
            n: 1,
            f: |u: &[f64], out: &mut [f64]| out[0] = u[0] * u[0] + 1.0,
        };
        let cfg = SolverConfig {
            newton_tol: 1e-10,
            newton_max: 4,
            krylov_tol: 1e-10,
            krylov_max: 5,
        };
        match jfnk_solve(&res, &[0.3], &cfg) {
            Err(SolverError::NewtonNonConvergence { history, residual, .. }) => {
                assert!(history.len() >= 2, "history: {history:?}");
                assert!(residual > cfg.newton_tol);
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn newton_residuals_non_increasing_on_mild_problem() {
        let res = Closure {
            n: 2,
            f: |u: &[f64], out: &mut [f64]| {
                out[0] = u[0] + 0.1 * u[0] * u[0] - 0.7;
                out[1] = u[1] + 0.05 * u[0] * u[1] - 0.2;
            },
        };
        let cfg = SolverConfig {
            newton_tol: 1e-12,
            newton_max: 20,
            krylov_tol: 1e-12,
            krylov_max: 10,
        };
        let (_, rep) = jfnk_solve(&res, &[0.0, 0.0], &cfg).unwrap();
        for w in rep.residual_norms.windows(2) {
            assert!(w[1] <= w[0] * (1.0 + 1e-12));
        }
    }
}
