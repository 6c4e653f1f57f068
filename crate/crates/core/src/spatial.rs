//! Semi-discrete DG right-hand side: volume quadrature term, interface flux
//! differences and the stage residual shared by explicit and implicit
//! stepping.
//!
//! For moment l the stage residual is
//!     K_j^(l) = -Q(u_h; l) + [ F_{j+1/2} - (-1)^l F_{j-1/2} ]
//! and the semi-discrete update reads du^(l)/dt = -(2l+1)/h * K_j^(l).

use crate::basis::{legendre, legendre_deriv, QuadratureRule};
use crate::error::Result;
use crate::grid::BoundaryCondition;
use crate::problems::Problem;

/// Precomputed basis tables at the 3-point volume quadrature nodes.
#[derive(Debug, Clone)]
pub struct DgOps {
    pub p: usize,
    quad_nodes: Vec<f64>,
    quad_weights: Vec<f64>,
    /// zeta[q][l]
    zeta: Vec<Vec<f64>>,
    /// dzeta[q][l]
    dzeta: Vec<Vec<f64>>,
}

impl DgOps {
    pub fn new(p: usize) -> Result<Self> {
        let quad = QuadratureRule::gauss_legendre(3)?;
        let zeta = quad
            .nodes
            .iter()
            .map(|&y| (0..=p).map(|l| legendre(l, y)).collect())
            .collect();
        let dzeta = quad
            .nodes
            .iter()
            .map(|&y| (0..=p).map(|l| legendre_deriv(l, y)).collect())
            .collect();
        Ok(Self {
            p,
            quad_nodes: quad.nodes,
            quad_weights: quad.weights,
            zeta,
            dzeta,
        })
    }
}

/// Borrowed view of a flat moment vector with the same layout as `DgState`.
#[derive(Debug, Clone, Copy)]
pub struct StateView<'a> {
    pub p: usize,
    pub ncomp: usize,
    pub n: usize,
    pub data: &'a [f64],
}

impl<'a> StateView<'a> {
    #[inline]
    pub fn get(&self, j: usize, l: usize, m: usize) -> f64 {
        self.data[(j * (self.p + 1) + l) * self.ncomp + m]
    }

    /// Evaluate the cell polynomial at tabulated basis values, scaling the
    /// moments l >= 1 by `phi` (frozen limiter factor).
    #[inline]
    fn eval_tab(&self, j: usize, zeta: &[f64], phi: f64, out: &mut [f64]) {
        for m in 0..self.ncomp {
            out[m] = self.get(j, 0, m);
        }
        for l in 1..=self.p {
            let z = zeta[l] * phi;
            for m in 0..self.ncomp {
                out[m] += self.get(j, l, m) * z;
            }
        }
    }

    /// Left trace of interface j+1/2 (right edge of cell j): sum of moments.
    #[inline]
    fn trace_right_edge(&self, j: usize, phi: f64, out: &mut [f64]) {
        for m in 0..self.ncomp {
            out[m] = self.get(j, 0, m);
        }
        for l in 1..=self.p {
            for m in 0..self.ncomp {
                out[m] += self.get(j, l, m) * phi;
            }
        }
    }

    /// Right trace of interface j-1/2 (left edge of cell j): alternating sum.
    #[inline]
    fn trace_left_edge(&self, j: usize, phi: f64, out: &mut [f64]) {
        for m in 0..self.ncomp {
            out[m] = self.get(j, 0, m);
        }
        let mut sign = -1.0;
        for l in 1..=self.p {
            for m in 0..self.ncomp {
                out[m] += self.get(j, l, m) * sign * phi;
            }
            sign = -sign;
        }
    }
}

/// Volume term Q(u_h; l) of one cell: 3-point Gauss-Legendre quadrature of
/// f(u_h) zeta_l'(y). Identically zero for l = 0.
pub fn volume_term(
    view: StateView,
    ops: &DgOps,
    problem: &Problem,
    j: usize,
    l: usize,
    phi: f64,
    out: &mut [f64],
) -> Result<()> {
    out.fill(0.0);
    if l == 0 {
        return Ok(());
    }
    let nc = view.ncomp;
    let mut u = vec![0.0; nc];
    let mut f = vec![0.0; nc];
    for q in 0..ops.quad_nodes.len() {
        view.eval_tab(j, &ops.zeta[q], phi, &mut u);
        problem.flux.eval(&u, &mut f)?;
        let w = ops.quad_weights[q] * ops.dzeta[q][l];
        for m in 0..nc {
            out[m] += w * f[m];
        }
    }
    Ok(())
}

/// Assemble the full stage residual K into `out` (same layout as the state).
/// `mask`, when given, holds per-cell frozen limiter factors applied to the
/// moments l >= 1 wherever the polynomial is evaluated. `frozen_alphas`,
/// when given, supplies the Rusanov viscosity per interface instead of
/// re-deriving it from the traces (keeps the residual smooth inside Newton).
pub fn stage_residual(
    view: StateView,
    ops: &DgOps,
    problem: &Problem,
    bc: BoundaryCondition,
    mask: Option<&[f64]>,
    frozen_alphas: Option<&[f64]>,
    out: &mut [f64],
) -> Result<()> {
    let n = view.n;
    let nc = view.ncomp;
    let p = view.p;
    debug_assert_eq!(out.len(), n * (p + 1) * nc);
    let phi_of = |j: usize| mask.map_or(1.0, |m| m[j]);

    // Interface fluxes F_{j+1/2} for j+1/2 = -1/2 .. n-1/2 (n+1 interfaces).
    let mut fluxes = vec![0.0; (n + 1) * nc];
    let mut um = vec![0.0; nc];
    let mut up = vec![0.0; nc];
    for iface in 0..=n {
        // cells left and right of the interface
        let (jl, jr) = if iface == 0 {
            (bc.neighbor(0, -1, n), 0)
        } else if iface == n {
            (n - 1, bc.neighbor(n - 1, 1, n))
        } else {
            (iface - 1, iface)
        };
        view.trace_right_edge(jl, phi_of(jl), &mut um);
        view.trace_left_edge(jr, phi_of(jr), &mut up);
        let out_slice = &mut fluxes[iface * nc..(iface + 1) * nc];
        match frozen_alphas {
            Some(alphas) => {
                crate::problems::rusanov_flux(&problem.flux, &um, &up, alphas[iface], out_slice)?
            }
            None => problem.numerical_flux(&um, &up, out_slice)?,
        }
    }

    let mut q = vec![0.0; nc];
    for j in 0..n {
        let f_left = &fluxes[j * nc..(j + 1) * nc].to_vec();
        let f_right = &fluxes[(j + 1) * nc..(j + 2) * nc].to_vec();
        for l in 0..=p {
            volume_term(view, ops, problem, j, l, phi_of(j), &mut q)?;
            let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
            for m in 0..nc {
                out[(j * (p + 1) + l) * nc + m] = -q[m] + f_right[m] - sign * f_left[m];
            }
        }
    }
    Ok(())
}

/// Rusanov viscosities per interface evaluated on the (masked) traces of the
/// given state; used to freeze the viscosity over one nonlinear stage solve.
pub fn interface_alphas(
    view: StateView,
    problem: &Problem,
    bc: BoundaryCondition,
    mask: Option<&[f64]>,
) -> Result<Vec<f64>> {
    let n = view.n;
    let nc = view.ncomp;
    let phi_of = |j: usize| mask.map_or(1.0, |m| m[j]);
    let mut um = vec![0.0; nc];
    let mut up = vec![0.0; nc];
    let mut alphas = vec![0.0; n + 1];
    for (iface, alpha) in alphas.iter_mut().enumerate() {
        let (jl, jr) = if iface == 0 {
            (bc.neighbor(0, -1, n), 0)
        } else if iface == n {
            (n - 1, bc.neighbor(n - 1, 1, n))
        } else {
            (iface - 1, iface)
        };
        view.trace_right_edge(jl, phi_of(jl), &mut um);
        view.trace_left_edge(jr, phi_of(jr), &mut up);
        *alpha = problem.viscosity_alpha(&um, &up)?;
    }
    Ok(alphas)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid1d;
    use crate::problems::FluxKind;
    use crate::state::DgState;
    use approx::assert_abs_diff_eq;

    fn view_of(state: &DgState) -> StateView {
        StateView {
            p: state.p,
            ncomp: state.ncomp,
            n: state.n,
            data: &state.moments,
        }
    }

    #[test]
    fn volume_term_vanishes_for_mean_equation() {
        let prob = Problem::by_name("burgers-smooth").unwrap();
        let grid = Grid1d::new(8, 0.0, 2.0).unwrap();
        let state = prob.initial_state(&grid, 2).unwrap();
        let ops = DgOps::new(2).unwrap();
        let mut out = [0.0];
        volume_term(view_of(&state), &ops, &prob, 3, 0, 1.0, &mut out).unwrap();
        assert_abs_diff_eq!(out[0], 0.0);
    }

    #[test]
    fn volume_term_linear_flux_identities() {
        // For f = a u: Q(.; 1) = 2 a u^(0) and Q(.; 2) = 2 a u^(1).
        let prob = Problem::by_name("advect-sin-warp").unwrap();
        let grid = Grid1d::new(6, -1.0, 1.0).unwrap();
        let state = prob.initial_state(&grid, 2).unwrap();
        let ops = DgOps::new(2).unwrap();
        let mut out = [0.0];
        for j in 0..grid.n {
            volume_term(view_of(&state), &ops, &prob, j, 1, 1.0, &mut out).unwrap();
            assert_abs_diff_eq!(out[0], 2.0 * state.get(j, 0, 0), epsilon = 1e-14);
            volume_term(view_of(&state), &ops, &prob, j, 2, 1.0, &mut out).unwrap();
            assert_abs_diff_eq!(out[0], 2.0 * state.get(j, 1, 0), epsilon = 1e-14);
        }
    }

    #[test]
    fn constant_state_has_zero_residual() {
        for name in ["advect-sin-warp", "burgers-smooth"] {
            let prob = Problem::by_name(name).unwrap();
            let grid = Grid1d::new(10, prob.domain.0, prob.domain.1).unwrap();
            let mut state = DgState::zeros(2, 1, grid.n).unwrap();
            for j in 0..grid.n {
                state.set(j, 0, 0, 0.7);
            }
            let ops = DgOps::new(2).unwrap();
            let mut out = vec![0.0; state.moments.len()];
            stage_residual(view_of(&state), &ops, &prob, prob.bc, None, None, &mut out).unwrap();
            for v in &out {
                assert_abs_diff_eq!(*v, 0.0, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn conservation_of_mean_residual() {
        // Sum over cells of K^(0) telescopes to zero under periodic BCs.
        for name in ["advect-sin-warp", "burgers-smooth", "euler-density-wave"] {
            let prob = Problem::by_name(name).unwrap();
            let grid = Grid1d::new(24, prob.domain.0, prob.domain.1).unwrap();
            let state = prob.initial_state(&grid, 2).unwrap();
            let ops = DgOps::new(2).unwrap();
            let mut out = vec![0.0; state.moments.len()];
            stage_residual(view_of(&state), &ops, &prob, prob.bc, None, None, &mut out).unwrap();
            let nc = state.ncomp;
            for m in 0..nc {
                let total: f64 = (0..grid.n).map(|j| out[(j * 3) * nc + m]).sum();
                let scale: f64 = (0..grid.n)
                    .map(|j| out[(j * 3) * nc + m].abs())
                    .sum::<f64>()
                    .max(1.0);
                assert!(
                    (total / scale).abs() < 1e-12,
                    "{name} component {m}: drift {total:.3e}"
                );
            }
        }
    }

    #[test]
    fn residual_is_linear_for_linear_flux() {
        let prob = Problem::by_name("advect-sin-warp").unwrap();
        let grid = Grid1d::new(12, -1.0, 1.0).unwrap();
        let ops = DgOps::new(1).unwrap();
        let a = prob.initial_state(&grid, 1).unwrap();
        let b = DgState::project(1, 1, &grid, |x, out| out[0] = (2.5 * x).cos()).unwrap();
        let mut ka = vec![0.0; a.moments.len()];
        let mut kb = vec![0.0; a.moments.len()];
        let mut kab = vec![0.0; a.moments.len()];
        stage_residual(view_of(&a), &ops, &prob, prob.bc, None, None, &mut ka).unwrap();
        stage_residual(view_of(&b), &ops, &prob, prob.bc, None, None, &mut kb).unwrap();
        let mut sum = a.clone();
        for (s, bv) in sum.moments.iter_mut().zip(&b.moments) {
            *s = 2.0 * *s - 3.0 * bv;
        }
        stage_residual(view_of(&sum), &ops, &prob, prob.bc, None, None, &mut kab).unwrap();
        for i in 0..ka.len() {
            assert_abs_diff_eq!(kab[i], 2.0 * ka[i] - 3.0 * kb[i], epsilon = 1e-13);
        }
    }

    #[test]
    fn stencil_is_three_cells() {
        // A single nonzero cell influences only itself and its neighbors.
        let mut prob = Problem::by_name("advect-sin-warp").unwrap();
        prob.num_flux = crate::problems::NumericalFlux::UpwindBeta(1.0);
        let grid = Grid1d::new(16, -1.0, 1.0).unwrap();
        let ops = DgOps::new(1).unwrap();
        let mut state = DgState::zeros(1, 1, grid.n).unwrap();
        state.set(7, 0, 0, 1.0);
        state.set(7, 1, 0, 0.25);
        let mut out = vec![0.0; state.moments.len()];
        stage_residual(view_of(&state), &ops, &prob, prob.bc, None, None, &mut out).unwrap();
        for j in 0..grid.n {
            let nonzero = (0..=1).any(|l| out[j * 2 + l].abs() > 0.0);
            // the data of cell 7 reaches at most cells 6..8; for the pure
            // upwind flux the left neighbor drops out entirely
            assert!(!nonzero || (6..=8).contains(&j), "cell {j} outside stencil");
        }
        assert!((0..=1).any(|l| out[7 * 2 + l].abs() > 0.0));
        assert!((0..=1).any(|l| out[8 * 2 + l].abs() > 0.0));
    }

    #[test]
    fn locality_of_perturbations() {
        let prob = Problem::by_name("burgers-smooth").unwrap();
        let grid = Grid1d::new(16, 0.0, 2.0).unwrap();
        let ops = DgOps::new(2).unwrap();
        let state = prob.initial_state(&grid, 2).unwrap();
        let mut base = vec![0.0; state.moments.len()];
        stage_residual(view_of(&state), &ops, &prob, prob.bc, None, None, &mut base).unwrap();
        let mut pert = state.clone();
        let jp = 5;
        pert.set(jp, 1, 0, pert.get(jp, 1, 0) + 0.01);
        let mut out = vec![0.0; state.moments.len()];
        stage_residual(view_of(&pert), &ops, &prob, prob.bc, None, None, &mut out).unwrap();
        for j in 0..grid.n {
            let changed = (0..=2).any(|l| (out[j * 3 + l] - base[j * 3 + l]).abs() > 0.0);
            let near = (j as isize - jp as isize).abs() <= 1;
            assert!(!changed || near, "cell {j} changed outside the stencil");
        }
    }

    #[test]
    fn mask_reduces_cells_to_means() {
        // With a zero mask everywhere the residual matches the one computed
        // from a state whose higher moments are erased.
        let prob = Problem::by_name("burgers-smooth").unwrap();
        let grid = Grid1d::new(10, 0.0, 2.0).unwrap();
        let ops = DgOps::new(2).unwrap();
        let state = prob.initial_state(&grid, 2).unwrap();
        let mask = vec![0.0; grid.n];
        let mut masked = vec![0.0; state.moments.len()];
        stage_residual(view_of(&state), &ops, &prob, prob.bc, Some(&mask), None, &mut masked).unwrap();
        let mut flat = state.clone();
        for j in 0..grid.n {
            for l in 1..=2 {
                flat.set(j, l, 0, 0.0);
            }
        }
        let mut expect = vec![0.0; state.moments.len()];
        stage_residual(view_of(&flat), &ops, &prob, prob.bc, None, None, &mut expect).unwrap();
        for i in 0..masked.len() {
            assert_abs_diff_eq!(masked[i], expect[i], epsilon = 1e-14);
        }
    }

    #[test]
    fn matches_linear_system_example() {
        // diag(-16, 1) system: residual acts componentwise like advection
        // at speeds -16 and 1.
        let mut prob = Problem::by_name("advect-sin-warp").unwrap();
        prob.flux = FluxKind::LinearSystem {
            dim: 2,
            mat: vec![-16.0, 0.0, 0.0, 1.0],
            eig_bound: 16.0,
        };
        let grid = Grid1d::new(12, -1.0, 1.0).unwrap();
        let ops = DgOps::new(1).unwrap();
        let state = DgState::project(1, 2, &grid, |x, out| {
            out[0] = (3.0 * x).sin();
            out[1] = (3.0 * x).sin();
        })
        .unwrap();
        let mut out = vec![0.0; state.moments.len()];
        stage_residual(view_of(&state), &ops, &prob, prob.bc, None, None, &mut out).unwrap();
        // Component 1 must match a pure advection residual at speed 1 with
        // the same viscosity: alpha = 16 couples in through the Rusanov term,
        // so instead check conservation and finiteness here.
        for m in 0..2 {
            let total: f64 = (0..grid.n).map(|j| out[(j * 2) * 2 + m]).sum();
            assert!(total.abs() < 1e-12);
        }
    }
}
