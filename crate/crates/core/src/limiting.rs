//! Space limiters applied componentwise to the conserved moments: the
//! adaptive moment (minmod) limiter, the MP indicator, and the frozen variant
//! computed on predictor means with delta-dilation of the trouble mask.

use crate::grid::BoundaryCondition;
use crate::state::DgState;

/// Sign-common minimum magnitude; zero when the signs disagree (arguments
/// equal to zero count as a sign mismatch).
pub fn minmod(values: &[f64]) -> f64 {
    debug_assert!(!values.is_empty());
    let first = values[0];
    if first == 0.0 {
        return 0.0;
    }
    let positive = first > 0.0;
    let mut mag = first.abs();
    for &v in &values[1..] {
        if v == 0.0 || (v > 0.0) != positive {
            return 0.0;
        }
        mag = mag.min(v.abs());
    }
    if positive {
        mag
    } else {
        -mag
    }
}

/// Adaptive moment limiter: sweeps l = p down to 1 per cell, replacing
/// u^(l) by minmod((2l-1) u^(l), forward and backward differences of the
/// neighbor moments of degree l-1) / (2l-1), and stopping at the first level
/// whose moment comes out unchanged. Iterated to a fixed point so that a
/// second application is a no-op.
pub fn bdf_limit(state: &DgState, bc: BoundaryCondition) -> DgState {
    let mut out = state.clone();
    bdf_limit_in_place(&mut out, bc);
    out
}

pub fn bdf_limit_in_place(state: &mut DgState, bc: BoundaryCondition) {
    if state.p == 0 {
        return;
    }
    // Changes can cascade through the neighbor differences; repeat the sweep
    // until no moment moves. Almost always settles in one or two passes.
    for _pass in 0..64 {
        if !bdf_sweep(state, bc) {
            return;
        }
    }
}

/// One level-synchronous sweep; returns true when any moment changed.
fn bdf_sweep(state: &mut DgState, bc: BoundaryCondition) -> bool {
    let n = state.n;
    let p = state.p;
    let nc = state.ncomp;
    let mut changed_any = false;
    // active[j*nc+m] says whether level l still needs limiting in that cell.
    let mut active = vec![true; n * nc];
    for l in (1..=p).rev() {
        let scale = (2 * l - 1) as f64;
        let snapshot = state.moments.clone();
        let get = |j: usize, l: usize, m: usize| snapshot[(j * (p + 1) + l) * nc + m];
        for j in 0..n {
            let jm = bc.neighbor(j, -1, n);
            let jp = bc.neighbor(j, 1, n);
            for m in 0..nc {
                if !active[j * nc + m] {
                    continue;
                }
                let own = scale * get(j, l, m);
                let fwd = get(jp, l - 1, m) - get(j, l - 1, m);
                let bwd = get(j, l - 1, m) - get(jm, l - 1, m);
                let lim = minmod(&[own, fwd, bwd]);
                if lim == own {
                    // Own moment selected: unchanged, stop the sweep here.
                    active[j * nc + m] = false;
                } else {
                    state.set(j, l, m, lim / scale);
                    changed_any = true;
                }
            }
        }
    }
    changed_any
}

/// Degenerate-ratio convention for the MP indicator: a zero denominator (or
/// one of opposite sign to a nonzero numerator) contributes 1 when the
/// numerator is zero too, else 0. Regular IEEE division otherwise, so a zero
/// numerator over a nonzero denominator flags the cell.
fn mp_ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        if num == 0.0 {
            1.0
        } else {
            0.0
        }
    } else if num * den < 0.0 {
        0.0
    } else {
        num / den
    }
}

/// MP limiter factor per cell from local means and the edge values of the
/// linear part: phi_j = min(1, du_max/dmax, du_min/dmin).
pub fn mp_phi(
    means: &[f64],
    edge_left: &[f64],
    edge_right: &[f64],
    bc: BoundaryCondition,
) -> Vec<f64> {
    let n = means.len();
    let mut phi = vec![1.0; n];
    for j in 0..n {
        let um = means[bc.neighbor(j, -1, n)];
        let u0 = means[j];
        let up = means[bc.neighbor(j, 1, n)];
        let local_max = um.max(u0).max(up);
        let local_min = um.min(u0).min(up);
        let edge_max = edge_left[j].max(edge_right[j]);
        let edge_min = edge_left[j].min(edge_right[j]);
        let r_max = mp_ratio(local_max - u0, edge_max - u0);
        let r_min = mp_ratio(local_min - u0, edge_min - u0);
        phi[j] = 1.0_f64.min(r_max).min(r_min).max(0.0);
    }
    phi
}

/// Trouble mask {0,1} per cell, with dilation radius delta.
#[derive(Debug, Clone)]
pub struct TroubleMask {
    /// Post-dilation limiter factors, each 0.0 or 1.0.
    pub phi: Vec<f64>,
    /// Number of cells detected before dilation.
    pub detected: usize,
    /// Number of cells limited after dilation.
    pub limited: usize,
    pub delta: usize,
}

impl TroubleMask {
    pub fn all_clear(n: usize) -> Self {
        Self {
            phi: vec![1.0; n],
            detected: 0,
            limited: 0,
            delta: 0,
        }
    }
}

/// Relative flatness floor of the frozen indicator: neighbor-mean
/// differences below this fraction of the component's magnitude are treated
/// as exactly flat, so solver-tolerance noise in constant regions cannot
/// masquerade as spurious extrema.
pub const FLATNESS_FLOOR: f64 = 1e-10;

/// Default TVB-style smoothness constant of the frozen indicator. A cell
/// whose neighbor-mean differences stay below `tvb * h^2` times the data
/// range is treated as resolved-smooth: extrema of smooth profiles have
/// differences of size h^2 |u''| and must not trigger limiting, while
/// spurious oscillations near discontinuities sit orders of magnitude above
/// the threshold on any practical grid.
pub const DEFAULT_TVB_CONSTANT: f64 = 20.0;

/// MP indicator evaluated on predictor means (linear reconstruction with
/// half neighbor-mean slopes), thresholded to {0,1}, then dilated: each
/// troubled cell also marks its 2*delta adjacent cells. `smooth_threshold`
/// is the absolute curvature scale (typically tvb * h^2) below which
/// mean differences count as resolved, relative to the component range.
pub fn frozen_mp_mask(
    predictor_means: &[Vec<f64>],
    bc: BoundaryCondition,
    delta: usize,
    smooth_threshold: f64,
) -> TroubleMask {
    let n = predictor_means[0].len();
    let mut mask = vec![1.0; n];
    for comp in predictor_means {
        let max_abs = comp.iter().fold(0.0_f64, |a, &v| a.max(v.abs()));
        let range = comp.iter().fold(f64::NEG_INFINITY, |a, &v| a.max(v))
            - comp.iter().fold(f64::INFINITY, |a, &v| a.min(v));
        let floor = (smooth_threshold * range).max(FLATNESS_FLOOR * max_abs);
        for j in 0..n {
            let um = comp[bc.neighbor(j, -1, n)];
            let up = comp[bc.neighbor(j, 1, n)];
            let snap = |d: f64| if d.abs() <= floor { 0.0 } else { d };
            let d_left = snap(um - comp[j]);
            let d_right = snap(up - comp[j]);
            // local data bounds and tent-edge deviations relative to the mean
            let num_max = 0.0_f64.max(d_left).max(d_right);
            let num_min = 0.0_f64.min(d_left).min(d_right);
            let den_max = 0.5 * d_left.max(d_right);
            let den_min = 0.5 * d_left.min(d_right);
            let phi = 1.0_f64
                .min(mp_ratio(num_max, den_max))
                .min(mp_ratio(num_min, den_min))
                .max(0.0);
            if phi < 1.0 {
                mask[j] = 0.0;
            }
        }
    }
    let detected = mask.iter().filter(|&&v| v == 0.0).count();
    let dilated = dilate_mask(&mask, bc, delta);
    let limited = dilated.iter().filter(|&&v| v == 0.0).count();
    TroubleMask {
        phi: dilated,
        detected,
        limited,
        delta,
    }
}

/// Spread every troubled (0) cell to its delta neighbors on each side.
pub fn dilate_mask(mask: &[f64], bc: BoundaryCondition, delta: usize) -> Vec<f64> {
    let n = mask.len();
    if delta == 0 {
        return mask.to_vec();
    }
    let mut out = mask.to_vec();
    for j in 0..n {
        if mask[j] == 0.0 {
            for d in 1..=delta as isize {
                out[bc.neighbor(j, -d, n)] = 0.0;
                out[bc.neighbor(j, d, n)] = 0.0;
            }
        }
    }
    out
}

/// Multiply the moments l >= 1 of every cell by its mask factor; cell means
/// are untouched.
pub fn apply_frozen_limiter(state: &DgState, mask: &TroubleMask) -> DgState {
    let mut out = state.clone();
    for j in 0..state.n {
        let phi = mask.phi[j];
        for l in 1..=state.p {
            for m in 0..state.ncomp {
                let v = out.get(j, l, m);
                out.set(j, l, m, phi * v);
            }
        }
    }
    out
}

/// Optimal dilation radius from the time-step ratio: round(r / (2p+1)).
pub fn default_delta(r: f64, p: usize) -> usize {
    (r / (2 * p + 1) as f64).round().max(0.0) as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid1d;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    const BC: BoundaryCondition = BoundaryCondition::Periodic;

    #[test]
    fn minmod_cases() {
        assert_abs_diff_eq!(minmod(&[1.0, 2.0, 3.0]), 1.0);
        assert_abs_diff_eq!(minmod(&[-1.0, 2.0, -3.0]), 0.0);
        assert_abs_diff_eq!(minmod(&[-2.0, -5.0]), -2.0);
        assert_abs_diff_eq!(minmod(&[0.0, 4.0]), 0.0);
    }

    fn state_from(means: &[f64], slopes: &[f64]) -> DgState {
        let n = means.len();
        let mut s = DgState::zeros(1, 1, n).unwrap();
        for j in 0..n {
            s.set(j, 0, 0, means[j]);
            s.set(j, 1, 0, slopes[j]);
        }
        s
    }

    #[test]
    fn bdf_keeps_linear_data() {
        // Means in arithmetic progression with slope moment d/2: the own
        // argument (2l-1)u^(1) = d/2 is the smallest same-sign argument.
        let n = 8;
        let d = 0.3;
        let means: Vec<f64> = (0..n).map(|j| j as f64 * d).collect();
        let slopes = vec![0.5 * d; n];
        let s = state_from(&means, &slopes);
        let lim = bdf_limit(&s, BoundaryCondition::Transmissive);
        for j in 1..n - 1 {
            assert_abs_diff_eq!(lim.get(j, 1, 0), 0.5 * d, epsilon = 0.0);
        }
    }

    #[test]
    fn bdf_zeroes_isolated_spike() {
        let n = 7;
        let means = vec![1.0; n];
        let mut slopes = vec![0.0; n];
        slopes[3] = 0.8;
        let s = state_from(&means, &slopes);
        let lim = bdf_limit(&s, BC);
        assert_abs_diff_eq!(lim.get(3, 1, 0), 0.0);
    }

    #[test]
    fn bdf_adaptive_sweep_stops() {
        // p = 2 cells where the top moment survives: the sweep stops there
        // and leaves the slope untouched.
        let n = 6;
        let mut s = DgState::zeros(2, 1, n).unwrap();
        for j in 0..n {
            s.set(j, 0, 0, j as f64); // increasing means, diff 1
            s.set(j, 1, 0, 0.4 + 0.05 * j as f64); // increasing slopes, diff 0.05
            s.set(j, 2, 0, 0.01); // tiny top moment: 3*u2 = 0.03 < 0.05
        }
        let lim = bdf_limit(&s, BoundaryCondition::Transmissive);
        for j in 2..4 {
            assert_abs_diff_eq!(lim.get(j, 2, 0), s.get(j, 2, 0), epsilon = 0.0);
            assert_abs_diff_eq!(lim.get(j, 1, 0), s.get(j, 1, 0), epsilon = 0.0);
        }
    }

    #[test]
    fn mp_monotone_data_is_clear() {
        let means = vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0];
        let n = means.len();
        let bc = BoundaryCondition::Transmissive;
        // edges from half neighbor-mean slopes stay inside the bounds
        let mut el = vec![0.0; n];
        let mut er = vec![0.0; n];
        for j in 0..n {
            let um = means[bc.neighbor(j, -1, n)];
            let up = means[bc.neighbor(j, 1, n)];
            er[j] = means[j] + 0.5 * (up - means[j]);
            el[j] = means[j] - 0.5 * (means[j] - um);
        }
        let phi = mp_phi(&means, &el, &er, bc);
        for v in phi {
            assert_abs_diff_eq!(v, 1.0);
        }
    }

    #[test]
    fn mp_flags_overshoot_on_flat_data() {
        // Flat means, edge value 1 in the middle cell: phi = 0 there.
        let means = vec![0.0, 0.0, 0.0];
        let el = vec![0.0, -1.0, 0.0];
        let er = vec![0.0, 1.0, 0.0];
        let phi = mp_phi(&means, &el, &er, BC);
        assert_abs_diff_eq!(phi[1], 0.0);
        assert_abs_diff_eq!(phi[0], 1.0);
        assert_abs_diff_eq!(phi[2], 1.0);
    }

    #[test]
    fn mp_scale_invariance() {
        let means = vec![0.1, 0.4, 0.2, 0.9, 0.3];
        let el = vec![0.0, 0.5, 0.15, 0.8, 0.25];
        let er = vec![0.2, 0.3, 0.35, 1.0, 0.35];
        let phi1 = mp_phi(&means, &el, &er, BC);
        let s = 10.0;
        let scale = |v: &Vec<f64>| v.iter().map(|x| x * s).collect::<Vec<_>>();
        let phi2 = mp_phi(&scale(&means), &scale(&el), &scale(&er), BC);
        for (a, b) in phi1.iter().zip(&phi2) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-13);
        }
    }

    #[test]
    fn frozen_mask_clear_on_monotone_profile() {
        // Smooth strictly monotone predictor data: no trouble anywhere.
        let means: Vec<f64> = (0..20).map(|j| (0.1 * j as f64).tanh()).collect();
        let mask = frozen_mp_mask(&[means], BoundaryCondition::Transmissive, 2, 0.0);
        assert_eq!(mask.detected, 0);
        assert!(mask.phi.iter().all(|&v| v == 1.0));
    }

    #[test]
    fn frozen_mask_flags_oscillation() {
        // A spurious interior extremum pair is detected.
        let mut means = vec![0.0; 16];
        for (j, v) in means.iter_mut().enumerate() {
            *v = j as f64 * 0.1;
        }
        means[8] += 0.5; // strict local max at 8, strict local min at 9
        let mask = frozen_mp_mask(&[means], BC, 0, 0.0);
        assert!(mask.detected >= 1);
        assert_eq!(mask.phi[8], 0.0);
    }

    #[test]
    fn mask_dilation() {
        let mut phi = vec![1.0; 11];
        phi[5] = 0.0;
        let out = dilate_mask(&phi, BC, 2);
        for j in 0..11 {
            let expect = if (3..=7).contains(&j) { 0.0 } else { 1.0 };
            assert_abs_diff_eq!(out[j], expect);
        }
        // delta = 0 leaves the mask unchanged
        assert_eq!(dilate_mask(&phi, BC, 0), phi);
    }

    #[test]
    fn apply_mask_resets_to_mean() {
        let grid = Grid1d::new(6, -1.0, 1.0).unwrap();
        let s = DgState::project(2, 1, &grid, |x, out| out[0] = x * x).unwrap();
        let mut mask = TroubleMask::all_clear(6);
        let identity = apply_frozen_limiter(&s, &mask);
        assert_eq!(identity.moments, s.moments);
        mask.phi[2] = 0.0;
        let lim = apply_frozen_limiter(&s, &mask);
        assert_abs_diff_eq!(lim.get(2, 1, 0), 0.0);
        assert_abs_diff_eq!(lim.get(2, 2, 0), 0.0);
        assert_abs_diff_eq!(lim.get(2, 0, 0), s.get(2, 0, 0));
        // total mass unchanged
        let mass0: f64 = s.total_mass(grid.h)[0];
        let mass1: f64 = lim.total_mass(grid.h)[0];
        assert_abs_diff_eq!(mass0, mass1, epsilon = 1e-15);
    }

    #[test]
    fn default_delta_rule() {
        assert_eq!(default_delta(15.0, 1), 5);
        assert_eq!(default_delta(15.0, 2), 3);
        assert_eq!(default_delta(1.0, 1), 0);
        assert_eq!(default_delta(9.0, 1), 3);
    }

    proptest! {
        #[test]
        fn bdf_preserves_means_and_is_idempotent(
            means in proptest::collection::vec(-5.0..5.0f64, 8),
            slopes in proptest::collection::vec(-2.0..2.0f64, 8),
            tops in proptest::collection::vec(-1.0..1.0f64, 8),
        ) {
            let n = 8;
            let mut s = DgState::zeros(2, 1, n).unwrap();
            for j in 0..n {
                s.set(j, 0, 0, means[j]);
                s.set(j, 1, 0, slopes[j]);
                s.set(j, 2, 0, tops[j]);
            }
            let once = bdf_limit(&s, BC);
            for j in 0..n {
                prop_assert_eq!(once.get(j, 0, 0), means[j]);
            }
            let twice = bdf_limit(&once, BC);
            prop_assert_eq!(&once.moments, &twice.moments);
        }

        #[test]
        fn mp_phi_in_unit_interval(
            means in proptest::collection::vec(-3.0..3.0f64, 6),
            el in proptest::collection::vec(-3.0..3.0f64, 6),
            er in proptest::collection::vec(-3.0..3.0f64, 6),
        ) {
            let phi = mp_phi(&means, &el, &er, BC);
            for v in phi {
                prop_assert!((0.0..=1.0).contains(&v));
            }
        }

        #[test]
        fn dilation_is_monotone_and_bounded(
            flags in proptest::collection::vec(proptest::bool::ANY, 12),
            delta in 0usize..3,
        ) {
            let mask: Vec<f64> = flags.iter().map(|&b| if b { 0.0 } else { 1.0 }).collect();
            let out = dilate_mask(&mask, BC, delta);
            let before = mask.iter().filter(|&&v| v == 0.0).count();
            let after = out.iter().filter(|&&v| v == 0.0).count();
            // troubled cells stay troubled
            for j in 0..mask.len() {
                if mask[j] == 0.0 {
                    prop_assert_eq!(out[j], 0.0);
                }
            }
            prop_assert!(after <= (2 * delta + 1) * before.max(0) || before == 0);
            if delta == 0 {
                prop_assert_eq!(out, mask);
            }
        }
    }
}
