//! Cones `C_θ(V) = { w : θ‖w_V‖ >= ‖w_⊥‖ }`, the critical strips around
//! `x, y ∈ {1/4, 3/4}`, and Monte Carlo audits of the cone estimates.

use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::map::{wrap_unit, Jacobian2, Params, StandardMap, TangentVec, TimeDirection, TorusPoint};
use crate::sampling::{self, BLOCK};

/// Double cone of half-angle `atan(aperture)` around a unit axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cone {
    pub axis: TangentVec,
    pub aperture: f64,
}

impl Cone {
    pub fn new(axis: TangentVec, aperture: f64) -> Result<Cone> {
        let axis = axis
            .normalized()
            .ok_or_else(|| Error::InvalidInput("cone axis must be non-zero".into()))?;
        if !(aperture > 0.0) || aperture.is_nan() {
            return Err(Error::InvalidInput(format!("aperture must be > 0, got {aperture}")));
        }
        Ok(Cone { axis, aperture })
    }

    pub fn horizontal(aperture: f64) -> Cone {
        Cone {
            axis: TangentVec::new(1.0, 0.0),
            aperture,
        }
    }

    pub fn vertical(aperture: f64) -> Cone {
        Cone {
            axis: TangentVec::new(0.0, 1.0),
            aperture,
        }
    }

    pub fn half_angle(&self) -> f64 {
        self.aperture.atan()
    }

    /// Non-strict: boundary rays are inside.
    pub fn contains(&self, v: TangentVec) -> Result<bool> {
        if v.u == 0.0 && v.v == 0.0 {
            return Err(Error::InvalidInput("zero vector has no direction".into()));
        }
        let along = v.dot(self.axis).abs();
        let across = v.dot(self.axis.perp()).abs();
        Ok(self.aperture * along >= across)
    }

    /// The two boundary rays `axis ± θ·axis⊥`.
    pub fn boundary_rays(&self) -> (TangentVec, TangentVec) {
        let side = self.axis.perp() * self.aperture;
        (self.axis + side, self.axis - side)
    }

    /// Angular slack `other.half_angle - (axis offset + self.half_angle)`;
    /// non-negative iff `self ⊆ other`.
    pub fn containment_margin(&self, other: &Cone) -> f64 {
        other.half_angle() - (self.axis.line_angle(other.axis) + self.half_angle())
    }

    pub fn is_subset_of(&self, other: &Cone) -> bool {
        self.containment_margin(other) >= 0.0
    }
}

pub fn cone_contains(c: &Cone, v: TangentVec) -> Result<bool> {
    c.contains(v)
}

/// Smallest cone containing the images of both boundary rays of `c`.
pub fn image_cone(jac: &Jacobian2, c: &Cone) -> Result<Cone> {
    let (b1, b2) = c.boundary_rays();
    let u1 = jac.apply(b1).normalized().ok_or(Error::ConeDegenerate)?;
    let u2 = jac.apply(b2).normalized().ok_or(Error::ConeDegenerate)?;
    // the sector spanned by u1, u2 contains the image of the axis
    let sum = u1 + u2;
    if sum.norm() < 1e-12 {
        return Err(Error::ConeDegenerate);
    }
    let axis = sum * (1.0 / sum.norm());
    let half = 0.5 * u1.cross(u2).abs().atan2(u1.dot(u2));
    if half >= FRAC_PI_2 {
        return Err(Error::ConeDegenerate);
    }
    Ok(Cone {
        axis,
        aperture: half.tan(),
    })
}

/// `Df(p)` applied to `c`.
pub fn cone_image(map: &StandardMap, p: TorusPoint, c: &Cone) -> Result<Cone> {
    image_cone(&map.jacobian(p), c)
}

/// `Df(p)` or `Df^{-1}(p)` applied to `c`.
pub fn cone_image_dir(map: &StandardMap, p: TorusPoint, c: &Cone, dir: TimeDirection) -> Result<Cone> {
    image_cone(&map.jacobian_dir(p, dir), c)
}

/// `min ‖L v‖` over unit `v ∈ c`. On the unit circle `vᵀ(LᵀL)v` is
/// `mean + amp·cos(2φ - 2φ0)`, so the minimum sits at an arc endpoint or at
/// the interior angle where the cosine equals -1.
pub fn min_expansion(jac: &Jacobian2, c: &Cone) -> f64 {
    let g = jac.transpose().compose(jac);
    let quad = |v: TangentVec| {
        let gv = g.apply(v);
        v.dot(gv)
    };
    let (b1, b2) = c.boundary_rays();
    let b1 = b1.normalized().unwrap_or(c.axis);
    let b2 = b2.normalized().unwrap_or(c.axis);
    let mut best = quad(b1).min(quad(b2));

    // direction of the smallest eigenvalue of G
    let phi0 = 0.5 * (2.0 * g.a12).atan2(g.a11 - g.a22);
    let phi_min = phi0 + FRAC_PI_2;
    let dir = TangentVec::new(phi_min.cos(), phi_min.sin());
    if c.contains(dir).unwrap_or(false) {
        best = best.min(quad(dir));
    }
    best.max(0.0).sqrt()
}

pub fn min_expansion_in_cone(map: &StandardMap, p: TorusPoint, c: &Cone) -> f64 {
    min_expansion(&map.jacobian(p), c)
}

/// Which critical strips a point lies in, and which square of `G₁`/`G₂`
/// otherwise. Squares are numbered `1 + i + 2j` where `i` (`j`) is 0 for the
/// arc of `x` (`y`) around 0 and 1 for the arc around 1/2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionLabel {
    pub in_crit1: bool,
    pub in_crit2: bool,
    pub g1_component: Option<u8>,
    pub g2_component: Option<u8>,
}

/// Distance from `t` to the nearer of 1/4 and 3/4, on the circle.
fn strip_distance(t: f64) -> f64 {
    let t = wrap_unit(t);
    (t - 0.25).abs().min((t - 0.75).abs())
}

fn arc_index(t: f64) -> u8 {
    let t = wrap_unit(t);
    if (0.25..0.75).contains(&t) {
        1
    } else {
        0
    }
}

pub fn classify_region(params: &Params, p: TorusPoint) -> RegionLabel {
    let dx = strip_distance(p.x);
    let dy = strip_distance(p.y);
    let in_crit1 = dx < params.crit_halfwidth_outer || dy < params.crit_halfwidth_outer;
    let in_crit2 = dx < params.crit_halfwidth_inner || dy < params.crit_halfwidth_inner;
    let component = 1 + arc_index(p.x) + 2 * arc_index(p.y);
    RegionLabel {
        in_crit1,
        in_crit2,
        g1_component: (!in_crit1).then_some(component),
        g2_component: (!in_crit2).then_some(component),
    }
}

pub fn in_g1(params: &Params, p: TorusPoint) -> bool {
    !classify_region(params, p).in_crit1
}

pub fn in_g2(params: &Params, p: TorusPoint) -> bool {
    !classify_region(params, p).in_crit2
}

/// Distance between `∂G₁ⱼ` and `∂G₂ⱼ`, or `None` when `G₁` is empty
/// (the outer strips cover the circle, which happens for `k <= 1024`).
pub fn boundary_gap(params: &Params) -> Option<f64> {
    let g1_half = 0.25 - params.crit_halfwidth_outer;
    let g2_half = 0.25 - params.crit_halfwidth_inner;
    (g1_half > 0.0).then_some(g2_half - g1_half)
}

/// Uniform sample of `G₂` built from one uniform draw per axis.
pub fn sample_g2<R: rand::Rng + ?Sized>(params: &Params, rng: &mut R) -> TorusPoint {
    let half = 0.25 - params.crit_halfwidth_inner;
    let mut axis = || {
        let u: f64 = rng.gen::<f64>() * 4.0 * half;
        if u < 2.0 * half {
            wrap_unit(u - half)
        } else {
            0.5 + (u - 2.0 * half) - half
        }
    };
    let x = axis();
    let y = axis();
    TorusPoint::new(x, y)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeAuditReport {
    pub k: f64,
    pub samples: usize,
    pub lemma: String,
    pub pass_rate: f64,
    pub worst_margin: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConeLemma {
    /// `Df(p) C^hor_{4/θ₁} ⊆ C^hor_{θ₂}` on `G₂` (and the vertical analogue for `f⁻¹`).
    Invariance,
    /// `min ‖Df(p) v‖ > k^{1/2}` over unit `v ∈ C^hor_{θ₂}` on `G₂`.
    Expansion,
}

impl ConeLemma {
    fn label(self, dir: TimeDirection) -> &'static str {
        match (self, dir) {
            (ConeLemma::Invariance, TimeDirection::Forward) => "cone-invariance-horizontal",
            (ConeLemma::Invariance, TimeDirection::Backward) => "cone-invariance-vertical",
            (ConeLemma::Expansion, TimeDirection::Forward) => "cone-expansion-horizontal",
            (ConeLemma::Expansion, TimeDirection::Backward) => "cone-expansion-vertical",
        }
    }
}

/// Margin of one sample: non-negative (invariance) or positive (expansion)
/// means the estimate holds at `p`.
pub fn lemma_margin(params: &Params, p: TorusPoint, lemma: ConeLemma, dir: TimeDirection) -> f64 {
    let map = params.map();
    let (wide, narrow) = match dir {
        TimeDirection::Forward => (
            Cone::horizontal(4.0 / params.theta1),
            Cone::horizontal(params.theta2),
        ),
        TimeDirection::Backward => (
            Cone::vertical(4.0 / params.theta1),
            Cone::vertical(params.theta2),
        ),
    };
    let jac = map.jacobian_dir(p, dir);
    match lemma {
        ConeLemma::Invariance => match image_cone(&jac, &wide) {
            Ok(img) => img.containment_margin(&narrow),
            Err(_) => f64::NEG_INFINITY,
        },
        ConeLemma::Expansion => min_expansion(&jac, &narrow) / params.k.sqrt() - 1.0,
    }
}

fn passes(lemma: ConeLemma, margin: f64) -> bool {
    match lemma {
        ConeLemma::Invariance => margin >= 0.0,
        ConeLemma::Expansion => margin > 0.0,
    }
}

/// Monte Carlo audit over `samples` uniform points of `G₂`.
pub fn audit_cone_lemma(
    params: &Params,
    lemma: ConeLemma,
    dir: TimeDirection,
    samples: usize,
    seed: u64,
) -> ConeAuditReport {
    let blocks = samples.div_ceil(BLOCK);
    let per_block: Vec<(usize, f64)> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = sampling::stream(seed, b as u64);
            let take = BLOCK.min(samples - b * BLOCK);
            let mut pass = 0usize;
            let mut worst = f64::INFINITY;
            for _ in 0..take {
                let p = sample_g2(params, &mut rng);
                let m = lemma_margin(params, p, lemma, dir);
                if passes(lemma, m) {
                    pass += 1;
                }
                worst = worst.min(m);
            }
            (pass, worst)
        })
        .collect();
    let pass: usize = per_block.iter().map(|b| b.0).sum();
    let worst = per_block.iter().map(|b| b.1).fold(f64::INFINITY, f64::min);
    ConeAuditReport {
        k: params.k,
        samples,
        lemma: lemma.label(dir).to_string(),
        pass_rate: if samples == 0 { 0.0 } else { pass as f64 / samples as f64 },
        worst_margin: worst,
    }
}

/// Smallest `k` in `ks` (scanned in increasing order) from which every
/// larger listed `k` also passes all four audits at 100%.
pub fn smallest_passing_k(ks: &[f64], samples: usize, seed: u64) -> Result<Option<f64>> {
    let mut sorted: Vec<f64> = ks.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut answer = None;
    for &k in sorted.iter().rev() {
        let params = Params::derive(k)?;
        let all = [ConeLemma::Invariance, ConeLemma::Expansion]
            .into_iter()
            .flat_map(|l| [(l, TimeDirection::Forward), (l, TimeDirection::Backward)])
            .all(|(l, d)| audit_cone_lemma(&params, l, d, samples, seed).pass_rate == 1.0);
        if all {
            answer = Some(k);
        } else {
            break;
        }
    }
    Ok(answer)
}
