//! The standard map `f_k(x, y) = (2x - y + k sin(2πx), x)` on the torus,
//! its closed-form inverse, derivative, and the reversing involution
//! `I(x, y) = (y, x)` which conjugates `f_k` to `f_k^{-1}`.
//!
//! Trigonometric evaluation goes through [`sin_2pi`] / [`cos_2pi`], which
//! reduce the argument exactly so that the lattice points `0, 1/4, 1/2, 3/4`
//! give exact zeros and units. This keeps `(1/2, 1/2)` an exact fixed point
//! and makes `Df` at `x = 1/4` exactly `[[2, -1], [1, 0]]`.

use std::f64::consts::{PI, TAU};
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `sin(2πx)` with exact reduction of `x` modulo 1.
pub fn sin_2pi(x: f64) -> f64 {
    let r = x - x.round(); // [-0.5, 0.5]
    let s = if r > 0.25 {
        0.5 - r
    } else if r < -0.25 {
        -0.5 - r
    } else {
        r
    };
    (TAU * s).sin()
}

/// `cos(2πx)` with exact reduction of `x` modulo 1.
pub fn cos_2pi(x: f64) -> f64 {
    let r = (x - x.round()).abs(); // [0, 0.5]
    if r < 0.125 {
        (TAU * r).cos()
    } else {
        // 0.25 - r is exact for r in [0.125, 0.5]
        (TAU * (0.25 - r)).sin()
    }
}

/// Reduce to `[0, 1)`.
#[inline]
pub fn wrap_unit(x: f64) -> f64 {
    let r = x - x.floor();
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// Reduce to the centered representative in `[-0.5, 0.5)`.
#[inline]
pub fn wrap_centered(d: f64) -> f64 {
    let r = d - d.round();
    if r >= 0.5 {
        r - 1.0
    } else {
        r
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TimeDirection {
    Forward,
    Backward,
}

impl TimeDirection {
    pub fn reversed(self) -> Self {
        match self {
            TimeDirection::Forward => TimeDirection::Backward,
            TimeDirection::Backward => TimeDirection::Forward,
        }
    }
}

/// A point of `T² = R²/Z²`. Coordinates always lie in `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TorusPoint {
    pub x: f64,
    pub y: f64,
}

impl TorusPoint {
    pub fn new(x: f64, y: f64) -> Self {
        TorusPoint {
            x: wrap_unit(x),
            y: wrap_unit(y),
        }
    }

    pub const ORIGIN: TorusPoint = TorusPoint { x: 0.0, y: 0.0 };

    pub fn to_array(self) -> [f64; 2] {
        [self.x, self.y]
    }

    /// Centered displacement `other - self` on the torus.
    pub fn displacement_to(self, other: TorusPoint) -> TangentVec {
        TangentVec::new(wrap_centered(other.x - self.x), wrap_centered(other.y - self.y))
    }

    pub fn translate(self, v: TangentVec) -> TorusPoint {
        TorusPoint::new(self.x + v.u, self.y + v.v)
    }
}

/// Euclidean distance between nearest lift representatives, in `[0, √2/2]`.
pub fn torus_dist(p: TorusPoint, q: TorusPoint) -> f64 {
    p.displacement_to(q).norm()
}

/// `I(x, y) = (y, x)`.
pub fn involution(p: TorusPoint) -> TorusPoint {
    TorusPoint { x: p.y, y: p.x }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TangentVec {
    pub u: f64,
    pub v: f64,
}

impl TangentVec {
    pub const fn new(u: f64, v: f64) -> Self {
        TangentVec { u, v }
    }

    pub fn norm(self) -> f64 {
        self.u.hypot(self.v)
    }

    pub fn dot(self, o: TangentVec) -> f64 {
        self.u * o.u + self.v * o.v
    }

    pub fn cross(self, o: TangentVec) -> f64 {
        self.u * o.v - self.v * o.u
    }

    /// Unit vector in the same direction; `None` for the zero vector.
    pub fn normalized(self) -> Option<TangentVec> {
        let n = self.norm();
        if n > 0.0 && n.is_finite() {
            Some(TangentVec::new(self.u / n, self.v / n))
        } else {
            None
        }
    }

    /// Rotation by +π/2.
    pub fn perp(self) -> TangentVec {
        TangentVec::new(-self.v, self.u)
    }

    pub fn swapped(self) -> TangentVec {
        TangentVec::new(self.v, self.u)
    }

    /// Angle between the lines spanned by `self` and `o`, in `[0, π/2]`.
    pub fn line_angle(self, o: TangentVec) -> f64 {
        let c = self.cross(o).abs();
        let d = self.dot(o).abs();
        c.atan2(d)
    }
}

impl Add for TangentVec {
    type Output = TangentVec;
    fn add(self, o: TangentVec) -> TangentVec {
        TangentVec::new(self.u + o.u, self.v + o.v)
    }
}

impl Sub for TangentVec {
    type Output = TangentVec;
    fn sub(self, o: TangentVec) -> TangentVec {
        TangentVec::new(self.u - o.u, self.v - o.v)
    }
}

impl Neg for TangentVec {
    type Output = TangentVec;
    fn neg(self) -> TangentVec {
        TangentVec::new(-self.u, -self.v)
    }
}

impl Mul<f64> for TangentVec {
    type Output = TangentVec;
    fn mul(self, s: f64) -> TangentVec {
        TangentVec::new(self.u * s, self.v * s)
    }
}

/// A 2×2 real matrix `[[a11, a12], [a21, a22]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Jacobian2 {
    pub a11: f64,
    pub a12: f64,
    pub a21: f64,
    pub a22: f64,
}

impl Jacobian2 {
    pub const IDENTITY: Jacobian2 = Jacobian2 {
        a11: 1.0,
        a12: 0.0,
        a21: 0.0,
        a22: 1.0,
    };

    pub const fn new(a11: f64, a12: f64, a21: f64, a22: f64) -> Self {
        Jacobian2 { a11, a12, a21, a22 }
    }

    pub fn det(&self) -> f64 {
        self.a11 * self.a22 - self.a12 * self.a21
    }

    pub fn trace(&self) -> f64 {
        self.a11 + self.a22
    }

    pub fn apply(&self, w: TangentVec) -> TangentVec {
        TangentVec::new(
            self.a11 * w.u + self.a12 * w.v,
            self.a21 * w.u + self.a22 * w.v,
        )
    }

    /// Matrix product `self · rhs`.
    pub fn compose(&self, rhs: &Jacobian2) -> Jacobian2 {
        Jacobian2 {
            a11: self.a11 * rhs.a11 + self.a12 * rhs.a21,
            a12: self.a11 * rhs.a12 + self.a12 * rhs.a22,
            a21: self.a21 * rhs.a11 + self.a22 * rhs.a21,
            a22: self.a21 * rhs.a12 + self.a22 * rhs.a22,
        }
    }

    pub fn inverse(&self) -> Option<Jacobian2> {
        let d = self.det();
        if d == 0.0 || !d.is_finite() {
            return None;
        }
        Some(Jacobian2 {
            a11: self.a22 / d,
            a12: -self.a12 / d,
            a21: -self.a21 / d,
            a22: self.a11 / d,
        })
    }

    pub fn transpose(&self) -> Jacobian2 {
        Jacobian2::new(self.a11, self.a21, self.a12, self.a22)
    }

    /// Both singular values `(σ_max, σ_min)` from the closed 2×2 form.
    pub fn singular_values(&self) -> (f64, f64) {
        let q = (self.a11 + self.a22).hypot(self.a21 - self.a12);
        let r = (self.a11 - self.a22).hypot(self.a21 + self.a12);
        ((q + r) / 2.0, (q - r).abs() / 2.0)
    }

    /// Operator norm (largest singular value).
    pub fn norm(&self) -> f64 {
        self.singular_values().0
    }

    pub fn is_finite(&self) -> bool {
        self.a11.is_finite() && self.a12.is_finite() && self.a21.is_finite() && self.a22.is_finite()
    }
}

/// One member `f_k` of the standard family. Valid for any finite `k`; the
/// threshold `k > 1` only matters for the derived constants in [`Params`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StandardMap {
    pub k: f64,
}

impl StandardMap {
    pub fn new(k: f64) -> Result<Self> {
        if !k.is_finite() {
            return Err(Error::InvalidParameter(format!("k must be finite, got {k}")));
        }
        Ok(StandardMap { k })
    }

    /// `f_k(x, y) = (2x - y + k sin(2πx) mod 1, x)`.
    pub fn apply(&self, p: TorusPoint) -> TorusPoint {
        TorusPoint {
            x: wrap_unit(2.0 * p.x - p.y + self.k * sin_2pi(p.x)),
            y: p.x,
        }
    }

    /// `f_k^{-1}(x, y) = (y, 2y - x + k sin(2πy))`; bitwise equal to `I∘f_k∘I`.
    pub fn apply_inverse(&self, p: TorusPoint) -> TorusPoint {
        TorusPoint {
            x: p.y,
            y: wrap_unit(2.0 * p.y - p.x + self.k * sin_2pi(p.y)),
        }
    }

    pub fn step(&self, p: TorusPoint, dir: TimeDirection) -> TorusPoint {
        match dir {
            TimeDirection::Forward => self.apply(p),
            TimeDirection::Backward => self.apply_inverse(p),
        }
    }

    pub fn iterate(&self, p: TorusPoint, n: usize, dir: TimeDirection) -> TorusPoint {
        (0..n).fold(p, |q, _| self.step(q, dir))
    }

    /// `2πk cos(2πx) + 2`, the only non-constant entry of `Df_k`.
    #[inline]
    pub fn shear(&self, x: f64) -> f64 {
        TAU * self.k * cos_2pi(x) + 2.0
    }

    /// `Df_k(x, y) = [[2πk cos(2πx) + 2, -1], [1, 0]]`.
    pub fn jacobian(&self, p: TorusPoint) -> Jacobian2 {
        Jacobian2::new(self.shear(p.x), -1.0, 1.0, 0.0)
    }

    /// Derivative of `f_k^{-1}` at `p`: `[[0, 1], [-1, 2πk cos(2πy) + 2]]`.
    pub fn jacobian_inverse(&self, p: TorusPoint) -> Jacobian2 {
        Jacobian2::new(0.0, 1.0, -1.0, self.shear(p.y))
    }

    pub fn jacobian_dir(&self, p: TorusPoint, dir: TimeDirection) -> Jacobian2 {
        match dir {
            TimeDirection::Forward => self.jacobian(p),
            TimeDirection::Backward => self.jacobian_inverse(p),
        }
    }

    /// `f^n(p)` together with `Df^n(p)` (chain product along the orbit).
    pub fn iterate_with_jacobian(&self, p: TorusPoint, n: usize) -> (TorusPoint, Jacobian2) {
        let mut z = p;
        let mut jac = Jacobian2::IDENTITY;
        for _ in 0..n {
            jac = self.jacobian(z).compose(&jac);
            z = self.apply(z);
        }
        (z, jac)
    }

    /// Image of a small displacement `off` attached to `base`, i.e.
    /// `F(base + off) - F(base)` for the lift `F` of `f_k`, modulo a common
    /// integer translation. Evaluated without cancellation so that curves
    /// parameterised on a tiny seed keep full relative precision.
    pub fn push_offset(&self, base: TorusPoint, off: TangentVec, dir: TimeDirection) -> TangentVec {
        match dir {
            TimeDirection::Forward => self.push_offset_forward(base.x, off),
            TimeDirection::Backward => {
                self.push_offset_forward(base.y, off.swapped()).swapped()
            }
        }
    }

    fn push_offset_forward(&self, bx: f64, off: TangentVec) -> TangentVec {
        let r = off.u - off.u.round();
        // sin(2π(b + r)) - sin(2πb) = 2 cos(2π(b + r/2)) sin(πr)
        let dsin = 2.0 * cos_2pi(bx + 0.5 * r) * (PI * r).sin();
        TangentVec::new(2.0 * off.u - off.v + self.k * dsin, off.u)
    }
}

/// The coupling `k` with every constant derived from it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub k: f64,
    pub delta: f64,
    /// `k^(-2/5)`
    pub theta1: f64,
    /// `k^(-3/5)`
    pub theta2: f64,
    /// `k^(-7)`
    pub r0: f64,
    /// `floor((1 + 7δ) / (28δ))`
    pub t: usize,
    /// `2 k^(-3/10)`
    pub crit_halfwidth_outer: f64,
    /// `k^(-3/10)`
    pub crit_halfwidth_inner: f64,
    /// `k^(-4/5)`
    pub contraction_rate: f64,
}

pub const DELTA: f64 = 1.0 / 600.0;

impl Params {
    pub fn derive(k: f64) -> Result<Self> {
        if !k.is_finite() || k <= 1.0 {
            return Err(Error::InvalidParameter(format!(
                "coupling must be finite and > 1, got {k}"
            )));
        }
        let delta = DELTA;
        let inner = k.powf(-0.3);
        Ok(Params {
            k,
            delta,
            theta1: k.powf(-0.4),
            theta2: k.powf(-0.6),
            r0: k.powi(-7),
            t: ((1.0 + 7.0 * delta) / (28.0 * delta)).floor() as usize,
            crit_halfwidth_outer: 2.0 * inner,
            crit_halfwidth_inner: inner,
            contraction_rate: k.powf(-0.8),
        })
    }

    pub fn map(&self) -> StandardMap {
        StandardMap { k: self.k }
    }
}

/// Shorthand for [`Params::derive`].
pub fn derive_params(k: f64) -> Result<Params> {
    Params::derive(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn derived_constants_at_1024() {
        let p = Params::derive(1024.0).unwrap();
        assert!(close(p.theta1, 0.0625, 1e-15));
        assert!(close(p.theta2, 0.015625, 1e-15));
        assert_eq!(p.delta, 1.0 / 600.0);
        assert_eq!(p.t, 21);
        assert_eq!(p.crit_halfwidth_inner * 2.0, p.crit_halfwidth_outer);
        assert!(p.theta2 < p.theta1 && p.theta1 < 1.0);
    }

    #[test]
    fn derive_rejects_bad_coupling() {
        for k in [1.0, 0.5, -3.0, f64::NAN, f64::INFINITY] {
            assert!(matches!(Params::derive(k), Err(Error::InvalidParameter(_))));
        }
    }

    #[test]
    fn trig_helpers_exact_at_quarters() {
        assert_eq!(sin_2pi(0.0), 0.0);
        assert_eq!(sin_2pi(0.5), 0.0);
        assert_eq!(sin_2pi(0.25), 1.0);
        assert_eq!(sin_2pi(0.75), -1.0);
        assert_eq!(cos_2pi(0.25), 0.0);
        assert_eq!(cos_2pi(0.75), 0.0);
        assert_eq!(cos_2pi(0.0), 1.0);
        assert_eq!(cos_2pi(0.5), -1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10_000 {
            let x: f64 = rng.gen_range(-3.0..3.0);
            assert!(close(sin_2pi(x), (TAU * x).sin(), 1e-14));
            assert!(close(cos_2pi(x), (TAU * x).cos(), 1e-14));
        }
    }

    #[test]
    fn apply_examples() {
        for k in [0.3, 1.0, 5.0, 1000.0] {
            let m = StandardMap::new(k).unwrap();
            assert_eq!(m.apply(TorusPoint::ORIGIN), TorusPoint::ORIGIN);
            assert_eq!(m.apply(TorusPoint::new(0.5, 0.0)), TorusPoint::new(0.0, 0.5));
            assert_eq!(m.apply_inverse(TorusPoint::ORIGIN), TorusPoint::ORIGIN);
        }
        let m = StandardMap::new(1.0).unwrap();
        let q = TorusPoint::new(0.25, 0.25);
        assert_eq!(m.apply(q), q);
    }

    #[test]
    fn inverse_round_trip_and_reversibility() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let m = StandardMap::new(5.0).unwrap();
        let mut worst_rt: f64 = 0.0;
        let mut worst_rev: f64 = 0.0;
        for _ in 0..100_000 {
            let p = TorusPoint::new(rng.gen(), rng.gen());
            worst_rt = worst_rt.max(torus_dist(m.apply(m.apply_inverse(p)), p));
            let via_involution = involution(m.apply(involution(p)));
            worst_rev = worst_rev.max(torus_dist(via_involution, m.apply_inverse(p)));
        }
        assert!(worst_rt < 1e-9, "round trip {worst_rt:e}");
        assert!(worst_rev <= 1e-12, "reversibility {worst_rev:e}");
    }

    #[test]
    fn jacobian_examples() {
        let m = StandardMap::new(5.0).unwrap();
        let j = m.jacobian(TorusPoint::ORIGIN);
        assert!(close(j.a11, TAU * 5.0 + 2.0, 1e-12));
        assert!(close(j.a11, 33.4159, 1e-4));
        assert_eq!((j.a12, j.a21, j.a22), (-1.0, 1.0, 0.0));
        assert_eq!(j.det(), 1.0);
        for k in [0.1, 7.0, 1e4] {
            let m = StandardMap::new(k).unwrap();
            assert_eq!(
                m.jacobian(TorusPoint::new(0.25, 0.6)),
                Jacobian2::new(2.0, -1.0, 1.0, 0.0)
            );
        }
    }

    #[test]
    fn area_preservation_and_norm_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for k in [10.0, 100.0, 3000.0] {
            let m = StandardMap::new(k).unwrap();
            for _ in 0..20_000 {
                let p = TorusPoint::new(rng.gen(), rng.gen());
                let j = m.jacobian(p);
                assert!((j.det() - 1.0).abs() <= 1e-12);
                assert!(j.norm() < 4.0 * PI * k);
                assert!(j.inverse().unwrap().norm() < 4.0 * PI * k);
                let ji = m.jacobian_inverse(m.apply(p));
                let prod = ji.compose(&j);
                assert!((prod.a11 - 1.0).abs() < 1e-9 && prod.a21.abs() < 1e-9);
            }
        }
    }

    #[test]
    fn singular_values_match_eigen_of_gram() {
        let j = Jacobian2::new(3.0, -1.0, 2.0, 0.5);
        let g = j.transpose().compose(&j);
        let tr = g.trace();
        let disc = (tr * tr - 4.0 * g.det()).sqrt();
        let (smax, smin) = j.singular_values();
        assert!(close(smax * smax, (tr + disc) / 2.0, 1e-12));
        assert!(close(smin * smin, (tr - disc) / 2.0, 1e-12));
    }

    #[test]
    fn involution_examples() {
        let p = TorusPoint::new(0.2, 0.7);
        assert_eq!(involution(p), TorusPoint::new(0.7, 0.2));
        assert_eq!(involution(involution(p)), p);
    }

    #[test]
    fn torus_dist_examples() {
        assert_eq!(torus_dist(TorusPoint::ORIGIN, TorusPoint::ORIGIN), 0.0);
        assert!(close(
            torus_dist(TorusPoint::new(0.95, 0.0), TorusPoint::new(0.05, 0.0)),
            0.1,
            1e-12
        ));
        assert!(close(
            torus_dist(TorusPoint::ORIGIN, TorusPoint::new(0.5, 0.5)),
            0.5f64.sqrt(),
            1e-15
        ));
    }

    #[test]
    fn wrap_unit_stays_below_one() {
        assert_eq!(wrap_unit(-1e-18), 0.0);
        assert_eq!(wrap_unit(1.0), 0.0);
        assert_eq!(wrap_unit(-0.25), 0.75);
        assert_eq!(wrap_centered(0.75), -0.25);
        assert_eq!(wrap_centered(0.5), -0.5);
    }

    #[test]
    fn push_offset_matches_direct_difference() {
        let m = StandardMap::new(50.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let b = TorusPoint::new(rng.gen(), rng.gen());
            let off = TangentVec::new(rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3));
            for dir in [TimeDirection::Forward, TimeDirection::Backward] {
                let d = m.push_offset(b, off, dir);
                let img = m.step(b, dir).translate(d);
                let direct = m.step(b.translate(off), dir);
                assert!(torus_dist(img, direct) < 1e-11);
            }
        }
    }
}
