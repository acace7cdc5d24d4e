//! Orbit windows, Lyapunov exponents, finite-horizon Oseledets directions,
//! Pliss times, and the `Z` / `X` membership tests built on them.
//!
//! Directions are obtained by power iteration: pushing a vector forward
//! along `Df` converges to `E⁺`, pulling one back along `Df⁻¹` converges to
//! `E⁻`. Vectors are renormalised every step and the log-norms are kept, so
//! no product of Jacobians is ever formed explicitly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::map::{Jacobian2, Params, StandardMap, TangentVec, TimeDirection, TorusPoint};

pub const DEFAULT_FRAME_HORIZON: usize = 30;
pub const FRAME_TOLERANCE: f64 = 1e-10;

/// Two fixed, generic starting vectors for power iteration.
const PROBE_A: TangentVec = TangentVec::new(0.540_302_305_868_139_8, 0.841_470_984_807_896_5);
const PROBE_B: TangentVec = TangentVec::new(-0.416_146_836_547_142_4, 0.909_297_426_825_681_7);

/// Orbit segment `f^{-n_back}(p), …, p, …, f^{n_fwd}(p)` with the Jacobian
/// at every point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitWindow {
    pub base: TorusPoint,
    pub n_back: usize,
    pub points: Vec<TorusPoint>,
    pub jacobians: Vec<Jacobian2>,
}

impl OrbitWindow {
    /// Index of `f^j(base)` in `points`.
    pub fn index(&self, j: isize) -> usize {
        (self.n_back as isize + j) as usize
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

pub fn iterate_orbit(map: &StandardMap, p: TorusPoint, n_back: usize, n_fwd: usize) -> OrbitWindow {
    let mut back = Vec::with_capacity(n_back);
    let mut z = p;
    for _ in 0..n_back {
        z = map.apply_inverse(z);
        back.push(z);
    }
    back.reverse();
    let mut points = back;
    points.reserve(n_fwd + 1);
    points.push(p);
    let mut z = p;
    for _ in 0..n_fwd {
        z = map.apply(z);
        points.push(z);
    }
    let jacobians = points.iter().map(|&q| map.jacobian(q)).collect();
    OrbitWindow {
        base: p,
        n_back,
        points,
        jacobians,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LyapunovEstimate {
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    pub horizon: usize,
}

/// Largest Lyapunov exponent of `f_k` (nats per iterate) along the orbit of `p`.
pub fn lyapunov(map: &StandardMap, p: TorusPoint, horizon: usize) -> Result<LyapunovEstimate> {
    lyapunov_dir(map, p, horizon, TimeDirection::Forward)
}

/// As [`lyapunov`], for `f_k` or `f_k^{-1}` depending on `dir`.
pub fn lyapunov_dir(
    map: &StandardMap,
    p: TorusPoint,
    horizon: usize,
    dir: TimeDirection,
) -> Result<LyapunovEstimate> {
    if horizon < 100 {
        return Err(Error::InvalidInput(format!("horizon must be >= 100, got {horizon}")));
    }
    let mut z = p;
    let mut w = PROBE_A;
    let mut acc = 0.0;
    for _ in 0..horizon {
        let img = map.jacobian_dir(z, dir).apply(w);
        let g = img.norm();
        acc += g.ln();
        if !acc.is_finite() || g == 0.0 {
            return Err(Error::NumericOverflow(format!(
                "log-norm accumulation became {acc} at {z:?}"
            )));
        }
        w = img * (1.0 / g);
        z = map.step(z, dir);
    }
    let lambda_plus = acc / horizon as f64;
    Ok(LyapunovEstimate {
        lambda_plus,
        lambda_minus: -lambda_plus,
        horizon,
    })
}

/// Finite-horizon approximation of the splitting `E⁻ ⊕ E⁺` at a point.
/// Sign convention: `e_plus.u >= 0` and `e_minus.v >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OseledetsFrame {
    pub e_minus: TangentVec,
    pub e_plus: TangentVec,
    pub horizon: usize,
}

fn orient_plus(w: TangentVec) -> TangentVec {
    if w.u < 0.0 || (w.u == 0.0 && w.v < 0.0) {
        -w
    } else {
        w
    }
}

fn orient_minus(w: TangentVec) -> TangentVec {
    if w.v < 0.0 || (w.v == 0.0 && w.u < 0.0) {
        -w
    } else {
        w
    }
}

/// Power-iteration directions along a window.
///
/// `e_plus[i]` is the forward push of a probe from index 0 to index `i`,
/// `log_stretch[i] = ln ‖Df(z_i) e_plus[i]‖`. `e_minus[i]` is the backward
/// pull from the last index, `log_contract[i] = ln ‖Df(z_i) e_minus[i]‖`.
/// `spread_*` is the line angle between the iterates of two distinct probes,
/// the convergence diagnostic.
struct Sweep {
    e_plus: Vec<TangentVec>,
    log_stretch: Vec<f64>,
    spread_plus: Vec<f64>,
    e_minus: Vec<TangentVec>,
    log_contract: Vec<f64>,
    spread_minus: Vec<f64>,
}

impl Sweep {
    fn run(map: &StandardMap, win: &OrbitWindow) -> Sweep {
        let n = win.len();
        let mut e_plus = vec![TangentVec::default(); n];
        let mut spread_plus = vec![f64::INFINITY; n];
        let mut log_stretch = vec![f64::NAN; n];
        let (mut a, mut b) = (PROBE_A, PROBE_B);
        for i in 0..n {
            e_plus[i] = a;
            spread_plus[i] = a.line_angle(b);
            let ja = win.jacobians[i].apply(a);
            let jb = win.jacobians[i].apply(b);
            let ga = ja.norm();
            log_stretch[i] = ga.ln();
            a = ja * (1.0 / ga);
            b = jb.normalized().unwrap_or(b);
        }

        let mut e_minus = vec![TangentVec::default(); n];
        let mut spread_minus = vec![f64::INFINITY; n];
        let mut log_contract = vec![f64::NAN; n];
        let (mut a, mut b) = (PROBE_A.swapped(), PROBE_B.swapped());
        for i in (0..n).rev() {
            e_minus[i] = a;
            spread_minus[i] = a.line_angle(b);
            if i == 0 {
                break;
            }
            // pull back from z_i to z_{i-1} with Df^{-1}(z_i)
            let inv = map.jacobian_inverse(win.points[i]);
            let ja = inv.apply(a);
            let jb = inv.apply(b);
            let ga = ja.norm();
            // ‖Df(z_{i-1}) e_minus[i-1]‖ = 1 / ga
            log_contract[i - 1] = -ga.ln();
            a = ja * (1.0 / ga);
            b = jb.normalized().unwrap_or(b);
        }
        Sweep {
            e_plus,
            log_stretch,
            spread_plus,
            e_minus,
            log_contract,
            spread_minus,
        }
    }

    fn check_plus(&self, i: usize, horizon: usize) -> Result<()> {
        let angle = self.spread_plus[i];
        if angle.is_finite() && angle <= FRAME_TOLERANCE {
            Ok(())
        } else {
            Err(Error::FrameUnresolved { angle, horizon })
        }
    }

    fn check_minus(&self, i: usize, horizon: usize) -> Result<()> {
        let angle = self.spread_minus[i];
        if angle.is_finite() && angle <= FRAME_TOLERANCE {
            Ok(())
        } else {
            Err(Error::FrameUnresolved { angle, horizon })
        }
    }
}

/// `e_plus = Df^H(f^{-H} p)·w` normalised, `e_minus` the time-reversed analogue.
/// The frame counts as resolved when two independent probes agree to
/// [`FRAME_TOLERANCE`] in direction.
pub fn oseledets_frame(map: &StandardMap, p: TorusPoint, horizon: usize) -> Result<OseledetsFrame> {
    if horizon < 20 {
        return Err(Error::InvalidInput(format!("frame horizon must be >= 20, got {horizon}")));
    }
    let win = iterate_orbit(map, p, horizon, horizon);
    let sweep = Sweep::run(map, &win);
    let c = win.index(0);
    sweep.check_plus(c, horizon)?;
    sweep.check_minus(c, horizon)?;
    Ok(OseledetsFrame {
        e_minus: orient_minus(sweep.e_minus[c]),
        e_plus: orient_plus(sweep.e_plus[c]),
        horizon,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlissOutput {
    pub times: Vec<usize>,
    pub density_lower_bound: f64,
}

impl PlissOutput {
    pub fn density(&self, len: usize) -> f64 {
        self.times.len() as f64 / len as f64
    }
}

/// Indices `l` such that every forward partial average
/// `(a_l + … + a_{n-1}) / (n - l)`, `l < n <= len`, is at most `alpha2 + eps`.
///
/// With `b_i = a_i - (alpha2 + eps)` and prefix sums `B`, `l` qualifies iff
/// `B_l >= max_{n > l} B_n`, so one reverse scan suffices.
pub fn pliss_times(seq: &[f64], alpha1: f64, alpha2: f64, eps: f64) -> Result<PlissOutput> {
    if !(eps > 0.0) || !(alpha1 < alpha2) || !alpha2.is_finite() || !eps.is_finite() {
        return Err(Error::InvalidInput(format!(
            "need eps > 0 and alpha1 < alpha2 (got alpha1={alpha1}, alpha2={alpha2}, eps={eps})"
        )));
    }
    if let Some((i, a)) = seq.iter().enumerate().find(|(_, &a)| !(a > alpha1) || !a.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "element {i} = {a} is not a finite value above alpha1 = {alpha1}"
        )));
    }
    let threshold = alpha2 + eps;
    let mut prefix = Vec::with_capacity(seq.len() + 1);
    prefix.push(0.0);
    for &a in seq {
        let last = *prefix.last().unwrap();
        prefix.push(last + (a - threshold));
    }
    let mut times = Vec::new();
    let mut suffix_max = f64::NEG_INFINITY;
    for l in (0..seq.len()).rev() {
        suffix_max = suffix_max.max(prefix[l + 1]);
        if prefix[l] >= suffix_max {
            times.push(l);
        }
    }
    times.reverse();
    Ok(PlissOutput {
        times,
        density_lower_bound: eps / (alpha2 + eps - alpha1),
    })
}

/// Shared evaluation of the `Z` conditions on a precomputed sweep.
fn z_conditions(
    params: &Params,
    sweep: &Sweep,
    center: usize,
    horizon: usize,
    frame_horizon: usize,
) -> Result<bool> {
    let log_rate = params.contraction_rate.ln();
    // f^{-1}(p) ∈ Z⁻: ‖Df^n(f^{-1}p)|E⁻‖ < rate^n
    let q = center - 1;
    for j in q..q + horizon {
        sweep.check_minus(j, frame_horizon)?;
    }
    let mut s = 0.0;
    for n in 1..=horizon {
        s += sweep.log_contract[q + n - 1];
        if !(s < n as f64 * log_rate) {
            return Ok(false);
        }
    }
    // f(p) ∈ Z⁺: ‖Df^{-n}(f p)|E⁺‖ < rate^n
    let r = center + 1;
    for j in (r + 1 - horizon)..=r {
        sweep.check_plus(j, frame_horizon)?;
    }
    let mut s = 0.0;
    for n in 1..=horizon {
        s -= sweep.log_stretch[r - n];
        if !(s < n as f64 * log_rate) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Finite-horizon membership in `Z = f(Z⁻) ∩ f^{-1}(Z⁺)`: derivative
/// conditions only, checked for `n = 1..=horizon`.
pub fn z_membership(params: &Params, p: TorusPoint, horizon: usize) -> Result<bool> {
    if horizon < params.t {
        return Err(Error::InvalidInput(format!(
            "z-membership horizon must be >= T = {}, got {horizon}",
            params.t
        )));
    }
    let map = params.map();
    let pad = horizon + DEFAULT_FRAME_HORIZON;
    let win = iterate_orbit(&map, p, pad, pad);
    let sweep = Sweep::run(&map, &win);
    z_conditions(params, &sweep, win.index(0), horizon, DEFAULT_FRAME_HORIZON)
}

/// Membership in `X = ∩_{|j| <= T-1} f^j(Z)`, i.e. `z_membership` at every
/// `f^j(p)`, `|j| <= T - 1`, with horizon `T`.
pub fn x_membership(params: &Params, p: TorusPoint) -> Result<bool> {
    let map = params.map();
    let t = params.t;
    let reach = t - 1;
    let pad = reach + t + DEFAULT_FRAME_HORIZON;
    let win = iterate_orbit(&map, p, pad, pad);
    let sweep = Sweep::run(&map, &win);
    let c = win.index(0);
    for center in (c - reach)..=(c + reach) {
        if !z_conditions(params, &sweep, center, t, DEFAULT_FRAME_HORIZON)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::{involution, torus_dist};
    use crate::sampling::uniform_points;
    use proptest::prelude::*;
    use std::f64::consts::{PI, TAU};

    fn fixed_point_exponent(k: f64) -> f64 {
        let t = TAU * k + 2.0;
        ((t + (t * t - 4.0).sqrt()) / 2.0).ln()
    }

    /// Exhaustive check of every suffix average.
    fn pliss_oracle(seq: &[f64], threshold: f64) -> Vec<usize> {
        (0..seq.len())
            .filter(|&l| {
                (l + 1..=seq.len()).all(|n| {
                    let s: f64 = seq[l..n].iter().sum();
                    s / (n - l) as f64 <= threshold
                })
            })
            .collect()
    }

    #[test]
    fn orbit_window_fixed_points() {
        for k in [0.5, 5.0, 1000.0] {
            let m = StandardMap::new(k).unwrap();
            let w = iterate_orbit(&m, TorusPoint::ORIGIN, 7, 9);
            assert_eq!(w.len(), 17);
            assert!(w.points.iter().all(|&q| q == TorusPoint::ORIGIN));
        }
        let m = StandardMap::new(1.0).unwrap();
        let q = TorusPoint::new(0.25, 0.25);
        let w = iterate_orbit(&m, q, 0, 1);
        assert_eq!(w.points, vec![q, q]);
    }

    #[test]
    fn orbit_window_consistency() {
        let m = StandardMap::new(20.0).unwrap();
        for p in uniform_points(5, 200) {
            let w = iterate_orbit(&m, p, 12, 15);
            assert_eq!(w.points[w.index(0)], p);
            for i in 0..w.len() - 1 {
                assert!(torus_dist(m.apply(w.points[i]), w.points[i + 1]) < 1e-9);
                assert!(torus_dist(m.apply_inverse(w.points[i + 1]), w.points[i]) < 1e-9);
                assert_eq!(w.jacobians[i], m.jacobian(w.points[i]));
            }
        }
    }

    #[test]
    fn lyapunov_at_hyperbolic_fixed_point() {
        let m = StandardMap::new(5.0).unwrap();
        let est = lyapunov(&m, TorusPoint::ORIGIN, 10_000).unwrap();
        let exact = fixed_point_exponent(5.0);
        assert!((exact - 3.508).abs() < 1e-3);
        assert!((est.lambda_plus - exact).abs() < 1e-3, "{est:?}");
        assert_eq!(est.lambda_plus + est.lambda_minus, 0.0);
    }

    #[test]
    fn lyapunov_rejects_short_horizon() {
        let m = StandardMap::new(5.0).unwrap();
        assert!(matches!(
            lyapunov(&m, TorusPoint::ORIGIN, 99),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn lyapunov_matches_analytic_average_at_k100() {
        let m = StandardMap::new(100.0).unwrap();
        let target = (PI * 100.0).ln();
        for p in uniform_points(9, 5) {
            let est = lyapunov(&m, p, 100_000).unwrap();
            assert!((est.lambda_plus / target - 1.0).abs() < 0.1, "{est:?}");
        }
    }

    #[test]
    fn lyapunov_reversibility() {
        let m = StandardMap::new(30.0).unwrap();
        for p in uniform_points(21, 5) {
            let fwd = lyapunov(&m, p, 100_000).unwrap().lambda_plus;
            let bwd = lyapunov_dir(&m, involution(p), 100_000, TimeDirection::Backward)
                .unwrap()
                .lambda_plus;
            assert!((fwd / bwd - 1.0).abs() < 0.01, "{fwd} vs {bwd}");
        }
    }

    #[test]
    fn frame_at_fixed_point_is_eigenbasis() {
        let m = StandardMap::new(5.0).unwrap();
        let fr = oseledets_frame(&m, TorusPoint::ORIGIN, DEFAULT_FRAME_HORIZON).unwrap();
        let t = TAU * 5.0 + 2.0;
        let big = (t + (t * t - 4.0).sqrt()) / 2.0;
        // [[t, -1], [1, 0]] (l, 1) = λ (l, 1) for λ = l
        let unstable = TangentVec::new(big, 1.0).normalized().unwrap();
        let stable = TangentVec::new(1.0 / big, 1.0).normalized().unwrap();
        assert!(fr.e_plus.line_angle(unstable) < 1e-6);
        assert!(fr.e_minus.line_angle(stable) < 1e-6);
        assert!(fr.e_plus.u >= 0.0 && fr.e_minus.v >= 0.0);
        assert!((fr.e_plus.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn frame_equivariance() {
        let m = StandardMap::new(50.0).unwrap();
        let mut checked = 0;
        for p in uniform_points(13, 300) {
            let (Ok(a), Ok(b)) = (
                oseledets_frame(&m, p, DEFAULT_FRAME_HORIZON),
                oseledets_frame(&m, m.apply(p), DEFAULT_FRAME_HORIZON),
            ) else {
                continue;
            };
            let pushed = m.jacobian(p).apply(a.e_plus);
            assert!(pushed.line_angle(b.e_plus) < 1e-3);
            let pulled = m.jacobian(p).apply(a.e_minus);
            assert!(pulled.line_angle(b.e_minus) < 1e-3);
            checked += 1;
        }
        assert!(checked > 250);
    }

    #[test]
    fn frame_rejects_short_horizon() {
        let m = StandardMap::new(5.0).unwrap();
        assert!(oseledets_frame(&m, TorusPoint::ORIGIN, 19).is_err());
    }

    #[test]
    fn frame_unresolved_on_elliptic_point() {
        // (1/2, 1/2) is elliptic for small k: no splitting to converge to.
        let m = StandardMap::new(0.1).unwrap();
        let r = oseledets_frame(&m, TorusPoint::new(0.5, 0.5), 40);
        assert!(matches!(r, Err(Error::FrameUnresolved { .. })));
    }

    #[test]
    fn pliss_constant_sequence() {
        let seq = vec![0.5; 50];
        let out = pliss_times(&seq, -1.0, 0.5, 0.25).unwrap();
        assert_eq!(out.times, (0..50).collect::<Vec<_>>());
        let out = pliss_times(&[0.75; 20], -1.0, 0.5, 0.25).unwrap();
        assert_eq!(out.times.len(), 20);
    }

    #[test]
    fn pliss_alternating_sequence_matches_oracle() {
        let seq: Vec<f64> = (0..40).map(|i| if i % 2 == 0 { 0.0 } else { 10.0 }).collect();
        let out = pliss_times(&seq, -1.0, 5.0, 1.0).unwrap();
        assert_eq!(out.times, pliss_oracle(&seq, 6.0));
        assert!(!out.times.is_empty());
        assert!((out.density_lower_bound - 1.0 / 7.0).abs() < 1e-15);
    }

    #[test]
    fn pliss_rejects_bad_input() {
        assert!(pliss_times(&[0.0, -2.0], -1.0, 1.0, 0.1).is_err());
        assert!(pliss_times(&[0.0], -1.0, 1.0, 0.0).is_err());
        assert!(pliss_times(&[0.0], 2.0, 1.0, 0.1).is_err());
        assert!(pliss_times(&[f64::NAN], -1.0, 1.0, 0.1).is_err());
    }

    proptest! {
        #[test]
        fn pliss_equals_oracle(seq in prop::collection::vec(-0.99f64..3.0, 1..120),
                               alpha2 in 0.0f64..1.5, eps in 0.01f64..1.0) {
            let out = pliss_times(&seq, -1.0, alpha2, eps).unwrap();
            prop_assert_eq!(out.times, pliss_oracle(&seq, alpha2 + eps));
        }

        #[test]
        fn pliss_density_bound(seq in prop::collection::vec(-0.99f64..4.0, 1..200),
                               eps in 0.01f64..1.0) {
            let mean = seq.iter().sum::<f64>() / seq.len() as f64;
            let alpha2 = mean.max(-0.5);
            let out = pliss_times(&seq, -1.0, alpha2, eps).unwrap();
            prop_assert!(out.density(seq.len()) >= out.density_lower_bound - 1e-12);
        }
    }

    #[test]
    fn z_membership_at_hyperbolic_fixed_point() {
        let params = Params::derive(1000.0).unwrap();
        assert!(z_membership(&params, TorusPoint::ORIGIN, 21).unwrap());
        assert!(x_membership(&params, TorusPoint::ORIGIN).unwrap());
        assert!(z_membership(&params, TorusPoint::ORIGIN, 10).is_err());
    }

    #[test]
    fn z_membership_fails_on_critical_line() {
        let params = Params::derive(1000.0).unwrap();
        let mut rng = crate::sampling::stream(3, 0);
        use rand::Rng;
        let mut fails = 0;
        for _ in 0..200 {
            let x = 0.25 + rng.gen_range(-1e-4..1e-4);
            let p = TorusPoint::new(x, rng.gen());
            if !z_membership(&params, p, 21).unwrap_or(false) {
                fails += 1;
            }
        }
        assert_eq!(fails, 200);
    }

    #[test]
    fn z_membership_implies_one_step_stretch() {
        let params = Params::derive(1000.0).unwrap();
        let m = params.map();
        let stretch = params.contraction_rate.recip();
        let mut members = 0;
        for p in uniform_points(17, 400) {
            if z_membership(&params, p, params.t).unwrap() {
                members += 1;
                let fr = oseledets_frame(&m, p, DEFAULT_FRAME_HORIZON).unwrap();
                assert!(m.jacobian(p).apply(fr.e_plus).norm() >= stretch);
            }
        }
        assert!(members > 100, "{members}");
    }

    #[test]
    fn x_membership_positive_fraction() {
        let params = Params::derive(1000.0).unwrap();
        let pass = uniform_points(23, 400)
            .into_iter()
            .filter(|&p| x_membership(&params, p).unwrap())
            .count();
        assert!(pass > 0);
    }
}
