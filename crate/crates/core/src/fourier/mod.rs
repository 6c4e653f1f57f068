//! Fourier (von Neumann) machinery for the fully discrete DIRK-DG schemes:
//! semi-discrete symbol matrices, the one-step amplification matrix, modal
//! weights and energies, dissipation/dispersion measures, and stability
//! diagnostics of the DIRK stability function.

pub mod cmat;

use crate::basis::{legendre, LegendreBasis, QuadratureRule};
use crate::error::{Result, SolverError};
use crate::tableau::ButcherTableau;
use cmat::CMat;
use num_complex::Complex64 as C64;

/// Semi-discrete spatial symbol: the three coupling matrices and the
/// assembled Fourier matrix A(K) of the upwind-parameterized linear flux.
#[derive(Debug, Clone)]
pub struct SpaceSymbol {
    pub p: usize,
    pub k_dimensionless: f64,
    pub speed: f64,
    pub h: f64,
    pub beta: f64,
    pub d_minus: Vec<Vec<f64>>,
    pub d_center: Vec<Vec<f64>>,
    pub d_plus: Vec<Vec<f64>>,
    pub a_matrix: CMat,
}

/// D-, D, D+ entries and A(K) = (2a/h)(D- e^{-iK} + D + D+ e^{iK}).
pub fn build_symbol(p: usize, k_dimensionless: f64, speed: f64, h: f64, beta: f64) -> Result<SpaceSymbol> {
    let basis = LegendreBasis::new(p)?;
    let b_plus = (speed + beta * speed.abs()) / (2.0 * speed);
    let b_minus = (speed - beta * speed.abs()) / (2.0 * speed);
    let n = p + 1;
    let mut d_minus = vec![vec![0.0; n]; n];
    let mut d_center = vec![vec![0.0; n]; n];
    let mut d_plus = vec![vec![0.0; n]; n];
    for l in 0..n {
        let sign_l = if l % 2 == 0 { 1.0 } else { -1.0 };
        for m in 0..n {
            let sign_m = if m % 2 == 0 { 1.0 } else { -1.0 };
            d_minus[l][m] = b_plus * sign_l / basis.mass[l];
            d_center[l][m] =
                (basis.stiffness[l][m] - b_plus + b_minus * sign_m * sign_l) / basis.mass[l];
            d_plus[l][m] = -b_minus * sign_m / basis.mass[l];
        }
    }
    let phase_minus = C64::from_polar(1.0, -k_dimensionless);
    let phase_plus = C64::from_polar(1.0, k_dimensionless);
    let scale = 2.0 * speed / h;
    let mut a_matrix = CMat::zeros(n);
    for l in 0..n {
        for m in 0..n {
            a_matrix[(l, m)] = scale
                * (d_minus[l][m] * phase_minus
                    + d_center[l][m]
                    + d_plus[l][m] * phase_plus);
        }
    }
    Ok(SpaceSymbol {
        p,
        k_dimensionless,
        speed,
        h,
        beta,
        d_minus,
        d_center,
        d_plus,
        a_matrix,
    })
}

/// Eigenvalues of the semi-discrete symbol, principal mode first (the one
/// closest to -i a k). Near-coincident eigenvalues with degenerate
/// eigenspaces are reported as defective.
pub fn semidiscrete_eigs(symbol: &SpaceSymbol) -> Result<Vec<C64>> {
    let mut eigs = symbol.a_matrix.eigenvalues()?;
    let scale = symbol.a_matrix.max_abs();
    for i in 0..eigs.len() {
        for j in (i + 1)..eigs.len() {
            if (eigs[i] - eigs[j]).norm() < 1e-10 * scale.max(1.0) {
                // probe the eigenspace; a near-parallel pair means defect
                let vi = symbol.a_matrix.eigenvector(eigs[i])?;
                let vj = symbol.a_matrix.eigenvector(eigs[j])?;
                let overlap: C64 = vi.iter().zip(&vj).map(|(a, b)| a.conj() * b).sum();
                if overlap.norm() > 1.0 - 1e-8 {
                    return Err(SolverError::DefectiveMatrix(eigs[i]));
                }
            }
        }
    }
    let wavenumber = symbol.k_dimensionless / symbol.h;
    let exact = C64::new(0.0, -symbol.speed * wavenumber);
    eigs.sort_by(|a, b| (a - exact).norm().total_cmp(&(b - exact).norm()));
    Ok(eigs)
}

/// One-step propagator of the fully discrete DIRK-DG scheme: nested sums of
/// descending stage chains with B_r = I - dt a_rr A factors,
/// M = I + dt sum b_i A B_i^-1 + dt^2 sum b_i a_ij (A B_i^-1)(A B_j^-1) + ...
pub fn build_m(symbol: &SpaceSymbol, tab: &ButcherTableau, dt: f64) -> Result<CMat> {
    build_m_from_matrix(&symbol.a_matrix, tab, dt)
}

pub fn build_m_from_matrix(a_matrix: &CMat, tab: &ButcherTableau, dt: f64) -> Result<CMat> {
    let s = tab.stages();
    let n = a_matrix.n;
    let identity = CMat::identity(n);
    // P_i = A B_i^{-1} with B_i = I - dt a_ii A
    let mut products = Vec::with_capacity(s);
    for i in 0..s {
        let b_i = identity.add(&a_matrix.scale(C64::new(-dt * tab.a[i][i], 0.0)));
        let inv = b_i.inverse().map_err(|_| SolverError::SingularMatrix)?;
        products.push(a_matrix.mul(&inv));
    }
    let mut m = CMat::identity(n);
    // Chains i1 > i2 > ... > iq contribute
    //   dt^q b_{i1} a_{i1 i2} ... a_{i(q-1) iq} P_{i1} P_{i2} ... P_{iq}.
    for i1 in 0..s {
        let mut stack: Vec<(usize, f64, CMat)> =
            vec![(i1, dt * tab.b[i1], products[i1].clone())];
        while let Some((tail, coeff, prod)) = stack.pop() {
            m = m.add(&prod.scale(C64::new(coeff, 0.0)));
            for next in 0..tail {
                if tab.a[tail][next] != 0.0 {
                    stack.push((
                        next,
                        coeff * dt * tab.a[tail][next],
                        prod.mul(&products[next]),
                    ));
                }
            }
        }
    }
    Ok(m)
}

/// Per-wave-number modal decomposition of the fully discrete scheme.
#[derive(Debug, Clone)]
pub struct AmplificationAnalysis {
    pub k_dimensionless: f64,
    pub dt: f64,
    pub h: f64,
    /// eigenvalues of M, principal mode first
    pub eigenvalues: Vec<C64>,
    pub eigenvectors: Vec<Vec<C64>>,
    /// projection coefficients mu = (c_0..c_p)
    pub projection: Vec<C64>,
    /// expansion weights of mu in the eigenvector basis
    pub weights: Vec<C64>,
    /// relative energies, summing to one
    pub energies: Vec<f64>,
    /// frequencies Omega_l = omega_l h (complex: re dispersion, im dissipation)
    pub omega: Vec<C64>,
    pub m_disp: f64,
    pub m_diss: f64,
}

/// Projection coefficients of e^{ikx} onto the reference-cell basis:
/// c_l = (1/Z_l) integral of e^{iK xi/2} zeta_l(xi) d xi. Composite
/// two-panel Gauss rule keeps the trigonometric moments accurate to ~1e-13
/// over the whole K range (0, pi].
pub fn projection_coefficients(p: usize, k_dimensionless: f64) -> Result<Vec<C64>> {
    let quad = QuadratureRule::gauss_legendre(6)?;
    let basis = LegendreBasis::new(p)?;
    let mut out = vec![C64::new(0.0, 0.0); p + 1];
    for panel in 0..2 {
        let center = -0.5 + panel as f64;
        for (q, &node) in quad.nodes.iter().enumerate() {
            let xi = center + 0.5 * node;
            let phase = C64::from_polar(1.0, 0.5 * k_dimensionless * xi);
            for l in 0..=p {
                out[l] += 0.5 * quad.weights[q] * legendre(l, xi) * phase / basis.mass[l];
            }
        }
    }
    Ok(out)
}

/// Full eigen-analysis of one (K, tableau, dt) combination.
pub fn analyze(
    p: usize,
    k_dimensionless: f64,
    speed: f64,
    h: f64,
    dt: f64,
    tab: &ButcherTableau,
    beta: f64,
) -> Result<AmplificationAnalysis> {
    let symbol = build_symbol(p, k_dimensionless, speed, h, beta)?;
    let m = build_m(&symbol, tab, dt)?;
    let mut eigs = m.eigenvalues()?;
    // principal mode: closest to the exact one-step factor e^{-i a k dt}
    let wavenumber = k_dimensionless / h;
    let exact = C64::from_polar(1.0, -speed * wavenumber * dt);
    eigs.sort_by(|a, b| {
        (a - exact)
            .norm()
            .total_cmp(&(b - exact).norm())
            .then(a.re.total_cmp(&b.re))
    });
    let eigenvectors: Vec<Vec<C64>> = eigs
        .iter()
        .map(|&lam| m.eigenvector(lam))
        .collect::<Result<_>>()?;
    // weights solve Theta w = mu
    let n = p + 1;
    let mut theta = CMat::zeros(n);
    for (col, v) in eigenvectors.iter().enumerate() {
        for row in 0..n {
            theta[(row, col)] = v[row];
        }
    }
    if theta.det().norm() < 1e-8 {
        return Err(SolverError::IllConditionedModes);
    }
    let projection = projection_coefficients(p, k_dimensionless)?;
    let weights = theta.solve(&projection)?;
    let total: f64 = weights.iter().map(|w| w.norm_sqr()).sum();
    let energies: Vec<f64> = weights.iter().map(|w| w.norm_sqr() / total).collect();
    // Omega_l from the eigenvalues of M
    let omega: Vec<C64> = eigs
        .iter()
        .map(|lam| {
            let im = h / (2.0 * dt) * (lam.re * lam.re + lam.im * lam.im).ln();
            let re = -(h / dt) * lam.im.atan2(lam.re);
            C64::new(re, im)
        })
        .collect();
    let exact_re = speed * k_dimensionless;
    let inv = 1.0 / n as f64;
    let m_disp = inv
        * omega
            .iter()
            .zip(&energies)
            .map(|(o, &b)| b * (o.re - exact_re).abs())
            .sum::<f64>();
    let m_diss = inv
        * omega
            .iter()
            .zip(&energies)
            .map(|(o, &b)| b * o.im)
            .sum::<f64>();
    Ok(AmplificationAnalysis {
        k_dimensionless,
        dt,
        h,
        eigenvalues: eigs,
        eigenvectors,
        projection,
        weights,
        energies,
        omega,
        m_disp,
        m_diss,
    })
}

/// Stability function R(z) = det(I - zA + z 1 b^T) / det(I - zA). A pole is
/// reported as an infinite magnitude.
pub fn dirk_stability_function(tab: &ButcherTableau, z: C64) -> C64 {
    let s = tab.stages();
    let mut den = CMat::identity(s);
    let mut num = CMat::identity(s);
    for i in 0..s {
        for j in 0..s {
            let a = C64::new(tab.a[i][j], 0.0);
            den[(i, j)] -= z * a;
            num[(i, j)] += z * (C64::new(tab.b[j], 0.0) - a);
        }
    }
    let d = den.det();
    if d.norm() == 0.0 {
        return C64::new(f64::INFINITY, 0.0);
    }
    num.det() / d
}

/// Default scan window and resolution used by the stability export.
pub const SCAN_RE_RANGE: (f64, f64) = (-20.0, 5.0);
pub const SCAN_IM_RANGE: (f64, f64) = (-15.0, 15.0);
pub const SCAN_POINTS: usize = 600;

/// |R| sampled over a rectangle of the complex plane plus the imaginary
/// axis. R of a DIRK tableau is analytic on the left half-plane (its poles
/// sit at 1/a_ii > 0), so by the maximum principle the boundary samples on
/// the axis decide A-stability; the interior grid feeds the region export.
#[derive(Debug, Clone)]
pub struct StabilityScan {
    pub re_range: (f64, f64),
    pub im_range: (f64, f64),
    pub n_re: usize,
    pub n_im: usize,
    /// max |R(z)| over sampled points with Re z < 0
    pub max_abs_left: f64,
    /// max |R(iy)| over the axis samples
    pub max_abs_axis: f64,
    pub a_stable: bool,
    /// |R(-1e8)|: L-stability proxy
    pub r_large_negative: f64,
}

pub fn stability_scan(tab: &ButcherTableau) -> StabilityScan {
    stability_scan_grid(tab, SCAN_RE_RANGE, SCAN_IM_RANGE, SCAN_POINTS, SCAN_POINTS)
}

pub fn stability_scan_grid(
    tab: &ButcherTableau,
    re_range: (f64, f64),
    im_range: (f64, f64),
    n_re: usize,
    n_im: usize,
) -> StabilityScan {
    let mut max_abs_left: f64 = 0.0;
    for i in 0..n_re {
        let re = re_range.0 + (re_range.1 - re_range.0) * i as f64 / (n_re - 1) as f64;
        if re >= 0.0 {
            continue;
        }
        for j in 0..n_im {
            let im = im_range.0 + (im_range.1 - im_range.0) * j as f64 / (n_im - 1) as f64;
            let r = dirk_stability_function(tab, C64::new(re, im)).norm();
            max_abs_left = max_abs_left.max(r);
        }
    }
    let mut max_abs_axis: f64 = 0.0;
    let n_axis = 4 * n_im + 1;
    for j in 0..n_axis {
        let im = im_range.0 + (im_range.1 - im_range.0) * j as f64 / (n_axis - 1) as f64;
        let r = dirk_stability_function(tab, C64::new(0.0, im)).norm();
        max_abs_axis = max_abs_axis.max(r);
    }
    let r_large_negative = dirk_stability_function(tab, C64::new(-1e8, 0.0)).norm();
    StabilityScan {
        re_range,
        im_range,
        n_re,
        n_im,
        max_abs_left,
        max_abs_axis,
        a_stable: max_abs_left.max(max_abs_axis) <= 1.0 + 1e-9,
        r_large_negative,
    }
}

/// One row of the measure sweep.
#[derive(Debug, Clone)]
pub struct MeasureRow {
    pub k_dimensionless: f64,
    pub omega: Vec<C64>,
    pub energies: Vec<f64>,
    pub m_disp: f64,
    pub m_diss: f64,
}

/// Sweep the dissipation/dispersion measures over a K grid at time-step
/// ratio r: dt = r h / ((2p+1) |a|).
pub fn sweep_measures(
    p: usize,
    tab: &ButcherTableau,
    h: f64,
    r: f64,
    speed: f64,
    k_grid: &[f64],
) -> Result<Vec<MeasureRow>> {
    let dt = r * h / ((2 * p + 1) as f64 * speed.abs());
    k_grid
        .iter()
        .map(|&k| {
            let analysis = analyze(p, k, speed, h, dt, tab, 1.0)?;
            Ok(MeasureRow {
                k_dimensionless: k,
                omega: analysis.omega,
                energies: analysis.energies,
                m_disp: analysis.m_disp,
                m_diss: analysis.m_diss,
            })
        })
        .collect()
}

/// Uniformly spaced K grid on (0, pi].
pub fn default_k_grid(points: usize) -> Vec<f64> {
    (1..=points)
        .map(|i| std::f64::consts::PI * i as f64 / points as f64)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tableau::{dirk22, dirk33, dirk43, DIRK22_LSTABLE_GAMMA, DIRK33_LSTABLE_GAMMA};
    use approx::assert_abs_diff_eq;

    #[test]
    fn p1_symbol_matches_literal_matrix() {
        let k = 0.7;
        let h = 0.05;
        let sym = build_symbol(1, k, 1.0, h, 1.0).unwrap();
        let e = C64::from_polar(1.0, -k);
        let one = C64::new(1.0, 0.0);
        let scale = C64::new(-1.0 / h, 0.0);
        let expect = [
            [(one - e) * scale, (one - e) * scale],
            [
                (C64::new(-3.0, 0.0) + 3.0 * e) * scale,
                (C64::new(3.0, 0.0) + 3.0 * e) * scale,
            ],
        ];
        for l in 0..2 {
            for m in 0..2 {
                assert!(
                    (sym.a_matrix[(l, m)] - expect[l][m]).norm() < 1e-13,
                    "entry ({l},{m})"
                );
            }
        }
    }

    #[test]
    fn p1_symbol_small_k_eigenvalues() {
        // K -> 0: eigenvalues approach 0 and -6a/h.
        let h = 0.1;
        let sym = build_symbol(1, 1e-8, 1.0, h, 1.0).unwrap();
        let eigs = semidiscrete_eigs(&sym).unwrap();
        assert!(eigs[0].norm() < 1e-6);
        assert!((eigs[1] - C64::new(-6.0 / h, 0.0)).norm() < 1e-4 / h);
    }

    #[test]
    fn p2_spurious_pair_leading_order() {
        let h = 1e-3;
        let sym = build_symbol(2, 1e-3, 1.0, h, 1.0).unwrap();
        let eigs = semidiscrete_eigs(&sym).unwrap();
        let expected_mag = (60.0_f64).sqrt() / h; // |-3 +- sqrt(51) i| / h
        for lam in &eigs[1..] {
            assert!(
                (lam.norm() - expected_mag).abs() / expected_mag < 0.02,
                "spurious magnitude {} vs {}",
                lam.norm(),
                expected_mag
            );
            assert!((lam.re * h + 3.0).abs() < 0.1, "real part {}", lam.re * h);
        }
    }

    #[test]
    fn p1_principal_eigenvalue_expansion() {
        // principal eigenvalue = -ik - k^4 h^3/72 + O(h^4): slope 3 in h and
        // coefficient k^4/72.
        let k = 1.0;
        let mut errs = Vec::new();
        let hs = [0.05, 0.025, 0.0125];
        for &h in &hs {
            let sym = build_symbol(1, k * h, 1.0, h, 1.0).unwrap();
            let eigs = semidiscrete_eigs(&sym).unwrap();
            let err = (eigs[0] - C64::new(0.0, -k)).norm();
            errs.push(err);
        }
        for i in 0..hs.len() - 1 {
            let slope = (errs[i] / errs[i + 1]).log2();
            assert!((slope - 3.0).abs() < 0.2, "slope {slope}");
        }
        let coeff = errs[0] / hs[0].powi(3);
        assert!((coeff - k.powi(4) / 72.0).abs() / (k.powi(4) / 72.0) < 0.05);
    }

    #[test]
    fn m_matrix_closed_form_two_stage() {
        // equal-diagonal 2-stage: M = I + dt A B^-1 + (1-2g)/2 dt^2 (A B^-1)^2
        let gamma = 0.3;
        let tab = dirk22(gamma).unwrap();
        let sym = build_symbol(1, 0.9, 1.0, 0.05, 1.0).unwrap();
        let dt = 0.02;
        let m = build_m(&sym, &tab, dt).unwrap();
        let identity = CMat::identity(2);
        let b = identity.add(&sym.a_matrix.scale(C64::new(-dt * gamma, 0.0)));
        let ab = sym.a_matrix.mul(&b.inverse().unwrap());
        let expect = identity
            .add(&ab.scale(C64::new(dt, 0.0)))
            .add(&ab.mul(&ab).scale(C64::new(0.5 * (1.0 - 2.0 * gamma) * dt * dt, 0.0)));
        for i in 0..2 {
            for j in 0..2 {
                assert!(
                    (m[(i, j)] - expect[(i, j)]).norm() < 1e-12 * expect.max_abs(),
                    "entry ({i},{j})"
                );
            }
        }
    }

    #[test]
    fn m_matrix_limits() {
        let tab = dirk43();
        let sym = build_symbol(2, 1.2, 1.0, 0.05, 1.0).unwrap();
        // dt -> 0: M -> I
        let m = build_m(&sym, &tab, 1e-12).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((m[(i, j)] - C64::new(expect, 0.0)).norm() < 1e-9);
            }
        }
        // K -> 0: constant mode preserved (eigenvalue -> 1)
        let sym0 = build_symbol(2, 1e-8, 1.0, 0.05, 1.0).unwrap();
        let m0 = build_m(&sym0, &tab, 0.1).unwrap();
        let eigs = m0.eigenvalues().unwrap();
        let closest = eigs
            .iter()
            .map(|l| (l - C64::new(1.0, 0.0)).norm())
            .fold(f64::INFINITY, f64::min);
        assert!(closest < 1e-7);
    }

    #[test]
    fn projection_coefficients_closed_forms() {
        let k = 1.3;
        let c = projection_coefficients(2, k).unwrap();
        let a = 0.5 * k;
        let c0 = 2.0 * a.sin() / k;
        let c1 = 3.0 * (a.sin() - a * a.cos()) / (a * a);
        let c2 = 5.0 / (a * a * a) * (3.0 * a * a.cos() + a * a * a.sin() - 3.0 * a.sin());
        assert_abs_diff_eq!(c[0].re, c0, epsilon = 1e-12);
        assert_abs_diff_eq!(c[0].im, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c[1].im, c1, epsilon = 1e-12);
        assert_abs_diff_eq!(c[1].re, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c[2].re, c2, epsilon = 1e-12);
    }

    #[test]
    fn energies_small_k_expansion() {
        // With unit-norm eigenvectors the spurious-mode energy behaves as
        // beta_1 = K^4/144 + O(K^6), independent of gamma (the equal-diagonal
        // family shares the eigenvectors of the space symbol).
        let h = 0.05;
        for &k in &[0.05_f64, 0.1] {
            let tab = dirk22(0.25).unwrap();
            let an = analyze(1, k, 1.0, h, 0.3 * h, &tab, 1.0).unwrap();
            let ratio = 144.0 * an.energies[1] / k.powi(4);
            assert!(
                (0.95..=1.05).contains(&ratio),
                "K={k}: 144 beta1/K^4 = {ratio}"
            );
            assert_abs_diff_eq!(an.energies.iter().sum::<f64>(), 1.0, epsilon = 1e-14);
            // gamma independence
            let tab2 = dirk22(0.5).unwrap();
            let an2 = analyze(1, k, 1.0, h, 0.3 * h, &tab2, 1.0).unwrap();
            assert!(
                (an.energies[1] - an2.energies[1]).abs() <= k.powi(6),
                "gamma dependence {:.3e}",
                (an.energies[1] - an2.energies[1]).abs()
            );
        }
    }

    #[test]
    fn principal_eigenvalue_series_gamma_quarter() {
        // lambda_0 = 1 - ik dt - k^2 dt^2/2 + 3i k^3 dt^3/16 + O(dt^4 + dt h^3)
        let k = 1.0;
        let h = 1e-3;
        let tab = dirk22(0.25).unwrap();
        for &dt in &[0.02_f64, 0.01] {
            let an = analyze(1, k * h, 1.0, h, dt, &tab, 1.0).unwrap();
            let series = C64::new(1.0, 0.0) + C64::new(0.0, -k * dt)
                + C64::new(-0.5 * k * k * dt * dt, 0.0)
                + C64::new(0.0, 3.0 / 16.0 * k.powi(3) * dt.powi(3));
            let resid = (an.eigenvalues[0] - series).norm();
            assert!(
                resid < 2.0 * (dt.powi(4) + dt * h.powi(3)),
                "dt={dt}: residual {resid:.3e}"
            );
        }
    }

    #[test]
    fn eigen_residuals_and_weight_reconstruction() {
        let tab = dirk33(DIRK33_LSTABLE_GAMMA).unwrap();
        let h = 0.05;
        let an = analyze(2, 1.7, 1.0, h, 3.0 * h, &tab, 1.0).unwrap();
        let sym = build_symbol(2, 1.7, 1.0, h, 1.0).unwrap();
        let m = build_m(&sym, &tab, 3.0 * h).unwrap();
        for (lam, vec) in an.eigenvalues.iter().zip(&an.eigenvectors) {
            let mv = m.apply(vec);
            let resid: f64 = mv
                .iter()
                .zip(vec)
                .map(|(a, b)| (a - lam * b).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(resid <= 1e-10 * m.max_abs());
        }
        // weights reconstruct the projection coefficients
        let mut recon = vec![C64::new(0.0, 0.0); 3];
        for (w, v) in an.weights.iter().zip(&an.eigenvectors) {
            for (r, x) in recon.iter_mut().zip(v) {
                *r += w * x;
            }
        }
        for (r, mu) in recon.iter().zip(&an.projection) {
            assert!((r - mu).norm() < 1e-10);
        }
    }

    #[test]
    fn stability_function_basics() {
        for tab in [dirk22(0.25).unwrap(), dirk33(DIRK33_LSTABLE_GAMMA).unwrap(), dirk43()] {
            let r0 = dirk_stability_function(&tab, C64::new(0.0, 0.0));
            assert!((r0 - C64::new(1.0, 0.0)).norm() < 1e-14);
        }
        // L-stable variants decay at -1e8
        let pr = dirk22(DIRK22_LSTABLE_GAMMA).unwrap();
        assert!(dirk_stability_function(&pr, C64::new(-1e8, 0.0)).norm() < 1e-6);
        let alex = dirk33(DIRK33_LSTABLE_GAMMA).unwrap();
        assert!(dirk_stability_function(&alex, C64::new(-1e8, 0.0)).norm() < 1e-6);
    }

    #[test]
    fn a_stability_classification() {
        let coarse = |tab: &ButcherTableau| {
            stability_scan_grid(tab, SCAN_RE_RANGE, SCAN_IM_RANGE, 240, 240)
        };
        assert!(!coarse(&dirk22(0.2).unwrap()).a_stable);
        assert!(coarse(&dirk22(0.25).unwrap()).a_stable);
        assert!(coarse(&dirk22(DIRK22_LSTABLE_GAMMA).unwrap()).a_stable);
        assert!(coarse(&dirk33(DIRK33_LSTABLE_GAMMA).unwrap()).a_stable);
        assert!(!coarse(&dirk33(0.158983899988677).unwrap()).a_stable);
        assert!(!coarse(&dirk33(2.405149578502864).unwrap()).a_stable);
        assert!(coarse(&dirk43()).a_stable);
    }

    #[test]
    fn measures_vanish_at_resolved_limit() {
        let tab = dirk22(0.25).unwrap();
        let rows = sweep_measures(1, &tab, 0.05, 9.0, 1.0, &[1e-8]).unwrap();
        assert!(rows[0].m_disp.abs() + rows[0].m_diss.abs() < 1e-6);
    }

    #[test]
    fn unstable_gamma_shows_positive_dissipation_measure() {
        // gamma = 0.2, r = 9: anti-dissipation shows up at some K.
        let tab = dirk22(0.2).unwrap();
        let ks = default_k_grid(64);
        let rows = sweep_measures(1, &tab, 0.05, 9.0, 1.0, &ks).unwrap();
        assert!(
            rows.iter().any(|r| r.m_diss > 1e-10),
            "expected positive dissipation measure somewhere"
        );
    }

    #[test]
    fn a_stable_schemes_never_antidissipative() {
        let ks = default_k_grid(48);
        for tab in [
            dirk22(0.25).unwrap(),
            dirk22(DIRK22_LSTABLE_GAMMA).unwrap(),
        ] {
            let rows = sweep_measures(1, &tab, 0.05, 15.0, 1.0, &ks).unwrap();
            for row in rows {
                assert!(row.m_diss <= 1e-12, "K={}: {}", row.k_dimensionless, row.m_diss);
            }
        }
        let rows = sweep_measures(2, &dirk33(DIRK33_LSTABLE_GAMMA).unwrap(), 0.05, 15.0, 1.0, &ks)
            .unwrap();
        for row in rows {
            assert!(row.m_diss <= 1e-12);
        }
    }

    #[test]
    fn gamma_half_most_dispersive_midrange() {
        // gamma = 0.5 vs 0.25 at r = 15: larger dispersion measure over the
        // mid-range wave numbers the step can still propagate (below the
        // phase-wrap threshold K r/(2p+1) = pi).
        let ks: Vec<f64> = (0..16).map(|i| 0.2 + 0.4 * i as f64 / 15.0).collect();
        let rows_half = sweep_measures(1, &dirk22(0.5).unwrap(), 0.05, 15.0, 1.0, &ks).unwrap();
        let rows_quarter =
            sweep_measures(1, &dirk22(0.25).unwrap(), 0.05, 15.0, 1.0, &ks).unwrap();
        for (a, b) in rows_half.iter().zip(&rows_quarter) {
            assert!(
                a.m_disp > b.m_disp,
                "K={}: gamma=0.5 {} vs gamma=0.25 {}",
                a.k_dimensionless,
                a.m_disp,
                b.m_disp
            );
        }
    }

    #[test]
    fn third_order_ssp_less_dissipative_and_dispersive() {
        // Compare inside the resolved band (K r below the phase-wrap point):
        // the four-stage scheme wins on both measures there.
        for r in [15.0, 25.0, 50.0] {
            let ks: Vec<f64> = (0..12).map(|i| (0.5 + 5.5 * i as f64 / 11.0) / r).collect();
            let rows43 = sweep_measures(2, &dirk43(), 0.05, r, 1.0, &ks).unwrap();
            let rows33 =
                sweep_measures(2, &dirk33(DIRK33_LSTABLE_GAMMA).unwrap(), 0.05, r, 1.0, &ks)
                    .unwrap();
            for (a, b) in rows43.iter().zip(&rows33) {
                assert!(
                    a.m_diss.abs() <= b.m_diss.abs() * 1.0001,
                    "r={r}, K={}: dissipation {} vs {}",
                    a.k_dimensionless,
                    a.m_diss,
                    b.m_diss
                );
                assert!(
                    a.m_disp <= b.m_disp * 1.0001,
                    "r={r}, K={}: dispersion {} vs {}",
                    a.k_dimensionless,
                    a.m_disp,
                    b.m_disp
                );
            }
        }
    }
}
