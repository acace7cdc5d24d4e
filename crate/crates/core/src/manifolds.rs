//! Local stable and unstable curves, their growth under iteration, and
//! transverse intersections between grown curves.
//!
//! A grown curve is `f^m` applied to a short straight seed through `p`. Each
//! vertex is stored as an offset from the base orbit point `f^m(p)` and is
//! mapped with [`StandardMap::push_offset`], so a `1e-9` seed keeps full
//! relative precision while it is stretched by many orders of magnitude.
//! New vertices are always computed from the seed parameter, never by
//! interpolating images.

use std::collections::HashMap;
use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cocycle::{oseledets_frame, x_membership, DEFAULT_FRAME_HORIZON};
use crate::cones::Cone;
use crate::error::{Error, Result};
use crate::map::{wrap_unit, Params, StandardMap, TangentVec, TimeDirection, TorusPoint};
use crate::periodic::{classify, StabilityKind};

pub const SEED_FLOOR: f64 = 1e-9;
pub const H_MAX: f64 = 1e-3;
pub const VERTEX_CAP: usize = 10_000_000;
/// Once a grown curve is longer than this, only a central sub-arc of at
/// least this length is kept.
pub const TRIM_LENGTH: f64 = 64.0;
/// Witnesses are refined until both bracketing chords are shorter than this.
const REFINE_CHORD: f64 = 1e-11;
const GRID_CELLS: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ManifoldSide {
    Stable,
    Unstable,
}

impl ManifoldSide {
    /// The time direction that stretches this side.
    pub fn growth_direction(self) -> TimeDirection {
        match self {
            ManifoldSide::Stable => TimeDirection::Backward,
            ManifoldSide::Unstable => TimeDirection::Forward,
        }
    }
}

/// How a curve was generated: `f^iterates` (in `direction`) of the segment
/// `center + s·half_length·dir`, `s ∈ [-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveSource {
    pub k: f64,
    pub center: TorusPoint,
    pub dir: TangentVec,
    pub half_length: f64,
    pub direction: TimeDirection,
    pub iterates: usize,
    /// `f^iterates(center)`, reduced.
    pub base: TorusPoint,
}

impl CurveSource {
    fn map(&self) -> StandardMap {
        StandardMap { k: self.k }
    }

    /// Offset from `base` and unit tangent at parameter `s`.
    fn eval(&self, s: f64) -> (TangentVec, TangentVec) {
        let map = self.map();
        let mut off = self.dir * (s * self.half_length);
        let mut tan = self.dir;
        let mut base = self.center;
        for _ in 0..self.iterates {
            let (o, t) = step_vertex(&map, base, off, tan, self.direction);
            off = o;
            tan = t;
            base = map.step(base, self.direction);
        }
        (off, tan)
    }
}

fn step_vertex(
    map: &StandardMap,
    base: TorusPoint,
    off: TangentVec,
    tan: TangentVec,
    dir: TimeDirection,
) -> (TangentVec, TangentVec) {
    let here = TorusPoint::new(base.x + off.u, base.y + off.v);
    let img = map.jacobian_dir(here, dir).apply(tan);
    let tan = img.normalized().unwrap_or(img);
    (map.push_offset(base, off, dir), tan)
}

/// A polyline on the universal cover. `vertices` are unreduced lifts, so
/// consecutive vertices are close in the plane even across the torus seam.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    pub vertices: Vec<[f64; 2]>,
    pub tangents: Vec<TangentVec>,
    pub total_length: f64,
    /// Curve parameter of each vertex, strictly increasing.
    pub params: Vec<f64>,
    /// Offsets from `source.base`, present for seeded curves.
    offsets: Vec<TangentVec>,
    pub source: Option<CurveSource>,
}

fn polyline_length(v: &[[f64; 2]]) -> f64 {
    v.windows(2).map(|w| seg_len(w[0], w[1])).sum()
}

fn seg_len(a: [f64; 2], b: [f64; 2]) -> f64 {
    (b[0] - a[0]).hypot(b[1] - a[1])
}

impl Curve {
    /// Straight seed `center + s·(length/2)·dir`, `s ∈ {-1, 0, 1}`.
    pub fn seed_segment(map: &StandardMap, center: TorusPoint, dir: TangentVec, length: f64) -> Result<Curve> {
        let dir = dir
            .normalized()
            .ok_or_else(|| Error::InvalidInput("seed direction must be non-zero".into()))?;
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::InvalidInput(format!("seed length must be > 0, got {length}")));
        }
        let source = CurveSource {
            k: map.k,
            center,
            dir,
            half_length: 0.5 * length,
            direction: TimeDirection::Forward,
            iterates: 0,
            base: center,
        };
        let params = vec![-1.0, 0.0, 1.0];
        let offsets: Vec<TangentVec> = params.iter().map(|&s| dir * (s * source.half_length)).collect();
        Ok(Curve::assemble(source, params, offsets, vec![dir; 3]))
    }

    /// A plain polyline, parameterised by vertex index; tangents are chord
    /// directions.
    pub fn from_polyline(vertices: Vec<[f64; 2]>) -> Result<Curve> {
        if vertices.len() < 2 {
            return Err(Error::InvalidInput("a polyline needs at least two vertices".into()));
        }
        let n = vertices.len();
        let mut tangents = Vec::with_capacity(n);
        for i in 0..n {
            let (a, b) = if i + 1 < n { (i, i + 1) } else { (i - 1, i) };
            let d = TangentVec::new(vertices[b][0] - vertices[a][0], vertices[b][1] - vertices[a][1]);
            tangents.push(
                d.normalized()
                    .ok_or_else(|| Error::InvalidInput("repeated polyline vertex".into()))?,
            );
        }
        Ok(Curve {
            total_length: polyline_length(&vertices),
            params: (0..n).map(|i| i as f64).collect(),
            vertices,
            tangents,
            offsets: Vec::new(),
            source: None,
        })
    }

    fn assemble(source: CurveSource, params: Vec<f64>, offsets: Vec<TangentVec>, tangents: Vec<TangentVec>) -> Curve {
        let b = source.base;
        let vertices: Vec<[f64; 2]> = offsets.iter().map(|o| [b.x + o.u, b.y + o.v]).collect();
        Curve {
            total_length: polyline_length(&vertices),
            vertices,
            tangents,
            params,
            offsets,
            source: Some(source),
        }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Lift point and unit tangent at parameter `s`.
    pub fn eval(&self, s: f64) -> ([f64; 2], TangentVec) {
        match &self.source {
            Some(src) => {
                let (o, t) = src.eval(s);
                ([src.base.x + o.u, src.base.y + o.v], t)
            }
            None => {
                let last = self.vertices.len() - 1;
                let i = (s.floor().max(0.0) as usize).min(last.saturating_sub(1));
                let f = s - i as f64;
                let (a, b) = (self.vertices[i], self.vertices[i + 1]);
                ([a[0] + f * (b[0] - a[0]), a[1] + f * (b[1] - a[1])], self.tangents[i])
            }
        }
    }

    /// `index,x,y,tx,ty` rows with reduced coordinates.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,x,y,tx,ty\n");
        for (i, (v, t)) in self.vertices.iter().zip(&self.tangents).enumerate() {
            out.push_str(&format!("{i},{},{},{},{}\n", wrap_unit(v[0]), wrap_unit(v[1]), t.u, t.v));
        }
        out
    }
}

/// Straight segment of length `max(2 r0, SEED_FLOOR)` through `p` along
/// `e_plus` (unstable) or `e_minus` (stable).
pub fn seed_local_manifold(params: &Params, p: TorusPoint, side: ManifoldSide) -> Result<Curve> {
    let map = params.map();
    let frame = oseledets_frame(&map, p, DEFAULT_FRAME_HORIZON)?;
    let dir = match side {
        ManifoldSide::Unstable => frame.e_plus,
        ManifoldSide::Stable => frame.e_minus,
    };
    Curve::seed_segment(&map, p, dir, seed_length(params))
}

pub fn seed_length(params: &Params) -> f64 {
    (2.0 * params.r0).max(SEED_FLOOR)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthConfig {
    pub h_max: f64,
    pub vertex_cap: usize,
    /// `None` disables trimming.
    pub trim_length: Option<f64>,
    /// After each iterate keep only the arc around the centre whose tangents
    /// lie in the check cone (the sub-curves the growth lemma speaks about).
    pub clip_to_cone: bool,
    /// Aperture of the cone the tangents are checked against; `None` means `θ₂`.
    pub cone_aperture: Option<f64>,
}

impl Default for GrowthConfig {
    fn default() -> Self {
        GrowthConfig {
            h_max: H_MAX,
            vertex_cap: VERTEX_CAP,
            trim_length: Some(TRIM_LENGTH),
            clip_to_cone: true,
            cone_aperture: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    /// Entry `j` is the length after iterate `j`; entry 0 is the input curve.
    pub lengths_per_iterate: Vec<f64>,
    pub first_iterate_length_gt4: Option<usize>,
    /// Tangents outside the `θ₂` cone, summed over iterates 2 and later.
    pub cone_violations: usize,
    /// Same count for every iterate, the first included.
    pub violations_per_iterate: Vec<usize>,
    pub truncated: bool,
    /// Some iterate kept only a central sub-arc.
    pub trimmed: bool,
    /// Segments whose parameter gap hit double resolution before `h_max`.
    pub unresolved_segments: usize,
    /// Vertices removed by cone clipping, all iterates.
    pub clipped_vertices: usize,
    pub iterates: usize,
}

pub fn grow_curve(
    params: &Params,
    c: &Curve,
    direction: TimeDirection,
    max_iter: usize,
    target_length: f64,
) -> Result<(Curve, GrowthReport)> {
    grow_curve_with(params, c, direction, max_iter, target_length, &GrowthConfig::default())
}

pub fn grow_curve_with(
    params: &Params,
    c: &Curve,
    direction: TimeDirection,
    max_iter: usize,
    target_length: f64,
    cfg: &GrowthConfig,
) -> Result<(Curve, GrowthReport)> {
    if max_iter < 1 {
        return Err(Error::InvalidInput("max_iter must be >= 1".into()));
    }
    let mut src = c
        .source
        .ok_or_else(|| Error::InvalidInput("only seeded curves can be grown".into()))?;
    if src.iterates > 0 && src.direction != direction {
        return Err(Error::InvalidInput("curve was grown in the opposite direction".into()));
    }
    if src.k != params.k {
        return Err(Error::InconsistentInputs(format!("curve built for k = {}, params have k = {}", src.k, params.k)));
    }
    src.direction = direction;
    let map = params.map();
    let aperture = cfg.cone_aperture.unwrap_or(params.theta2);
    let cone = match direction {
        TimeDirection::Forward => Cone::horizontal(aperture),
        TimeDirection::Backward => Cone::vertical(aperture),
    };

    let mut s_vals = c.params.clone();
    let mut offs = c.offsets.clone();
    let mut tans = c.tangents.clone();
    let mut report = GrowthReport {
        lengths_per_iterate: vec![c.total_length],
        first_iterate_length_gt4: (c.total_length > 4.0).then_some(0),
        cone_violations: 0,
        violations_per_iterate: vec![0],
        truncated: false,
        trimmed: false,
        unresolved_segments: 0,
        clipped_vertices: 0,
        iterates: 0,
    };
    let mut length = c.total_length;

    for it in 1..=max_iter {
        if length > target_length {
            break;
        }
        let base = src.base;
        let mapped: Vec<(TangentVec, TangentVec)> = offs
            .par_iter()
            .zip(tans.par_iter())
            .map(|(&o, &t)| step_vertex(&map, base, o, t, direction))
            .collect();
        src.base = map.step(base, direction);
        src.iterates += 1;
        offs = mapped.iter().map(|m| m.0).collect();
        tans = mapped.iter().map(|m| m.1).collect();

        // Trim before refining so memory tracks the kept arc, not the image.
        let coarse: Vec<f64> = offs.windows(2).map(|w| (w[1] - w[0]).norm()).collect();
        let coarse_total: f64 = coarse.iter().sum();
        let cap_length = cfg.vertex_cap as f64 * cfg.h_max * 0.5;
        match cfg.trim_length {
            Some(l) if coarse_total > l.min(cap_length) => {
                let (lo, hi) = central_window(&s_vals, &coarse, l.min(cap_length));
                s_vals = s_vals[lo..=hi].to_vec();
                offs = offs[lo..=hi].to_vec();
                tans = tans[lo..=hi].to_vec();
                report.trimmed = true;
            }
            None if coarse_total > cap_length => {
                length = coarse_total;
                report.truncated = true;
                report.iterates = it;
                report.lengths_per_iterate.push(length);
                break;
            }
            _ => {}
        }

        let (s2, o2, t2, unresolved) = refine(&src, &s_vals, &offs, &tans, cfg.h_max);
        report.unresolved_segments += unresolved;
        if s2.len() > cfg.vertex_cap {
            report.truncated = true;
            report.iterates = it;
            s_vals = s2;
            offs = o2;
            tans = t2;
            length = polyline_len_offsets(&offs);
            report.lengths_per_iterate.push(length);
            break;
        }
        s_vals = s2;
        offs = o2;
        tans = t2;
        let inside: Vec<bool> = tans.iter().map(|t| cone.contains(*t).unwrap_or(false)).collect();
        if cfg.clip_to_cone {
            let (lo, hi) = clean_window(&s_vals, &inside);
            if hi + 1 - lo < s_vals.len() {
                report.clipped_vertices += s_vals.len() - (hi + 1 - lo);
                s_vals = s_vals[lo..=hi].to_vec();
                offs = offs[lo..=hi].to_vec();
                tans = tans[lo..=hi].to_vec();
            }
        }
        length = polyline_len_offsets(&offs);
        let violations = tans.iter().filter(|t| !cone.contains(**t).unwrap_or(false)).count();
        report.violations_per_iterate.push(violations);
        if it >= 2 {
            report.cone_violations += violations;
        }
        report.lengths_per_iterate.push(length);
        report.iterates = it;
        if report.first_iterate_length_gt4.is_none() && length > 4.0 {
            report.first_iterate_length_gt4 = Some(it);
        }
    }
    Ok((Curve::assemble(src, s_vals, offs, tans), report))
}

fn polyline_len_offsets(offs: &[TangentVec]) -> f64 {
    offs.windows(2).map(|w| (w[1] - w[0]).norm()).sum()
}

/// Smallest index window around the vertex nearest `s = 0` whose chord
/// length reaches `target`, grown alternately on both sides.
fn central_window(s_vals: &[f64], seg: &[f64], target: f64) -> (usize, usize) {
    let center = s_vals
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let (mut lo, mut hi) = (center, center);
    let mut total = 0.0;
    while total < target && (lo > 0 || hi + 1 < s_vals.len()) {
        if hi + 1 < s_vals.len() {
            total += seg[hi];
            hi += 1;
        }
        if total < target && lo > 0 {
            lo -= 1;
            total += seg[lo];
        }
    }
    (lo, hi)
}

/// Maximal run of in-cone vertices containing the vertex nearest `s = 0`.
/// If that vertex is itself outside the cone nothing is clipped.
fn clean_window(s_vals: &[f64], inside: &[bool]) -> (usize, usize) {
    let center = s_vals
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .map(|(i, _)| i)
        .unwrap_or(0);
    if !inside[center] {
        return (0, s_vals.len() - 1);
    }
    let mut lo = center;
    while lo > 0 && inside[lo - 1] {
        lo -= 1;
    }
    let mut hi = center;
    while hi + 1 < s_vals.len() && inside[hi + 1] {
        hi += 1;
    }
    (lo, hi)
}

type Refined = (Vec<f64>, Vec<TangentVec>, Vec<TangentVec>, usize);

/// Insert seed-parameter midpoints until neighbouring images are at most
/// `h_max` apart.
fn refine(src: &CurveSource, s: &[f64], offs: &[TangentVec], tans: &[TangentVec], h_max: f64) -> Refined {
    if s.len() < 2 {
        return (s.to_vec(), offs.to_vec(), tans.to_vec(), 0);
    }
    let pieces: Vec<(Vec<(f64, TangentVec, TangentVec)>, usize)> = (0..s.len() - 1)
        .into_par_iter()
        .map(|i| {
            let mut out = Vec::new();
            let mut unresolved = 0;
            let mut stack = vec![((s[i], offs[i]), (s[i + 1], offs[i + 1]))];
            // depth-first, right half pushed first so output stays ordered
            while let Some(((sa, oa), (sb, ob))) = stack.pop() {
                if (ob - oa).norm() <= h_max {
                    out.push((sb, ob, TangentVec::default()));
                    continue;
                }
                let sm = 0.5 * (sa + sb);
                if sm <= sa || sm >= sb {
                    unresolved += 1;
                    out.push((sb, ob, TangentVec::default()));
                    continue;
                }
                let (om, _) = src.eval(sm);
                stack.push(((sm, om), (sb, ob)));
                stack.push(((sa, oa), (sm, om)));
            }
            (out, unresolved)
        })
        .collect();

    let total: usize = pieces.iter().map(|p| p.0.len()).sum::<usize>() + 1;
    let mut s2 = Vec::with_capacity(total);
    let mut o2 = Vec::with_capacity(total);
    let mut t2 = Vec::with_capacity(total);
    let mut unresolved = 0;
    s2.push(s[0]);
    o2.push(offs[0]);
    t2.push(tans[0]);
    let mut next_original = 1;
    for (piece, u) in pieces {
        unresolved += u;
        for (sv, ov, _) in piece {
            s2.push(sv);
            o2.push(ov);
            if sv == s[next_original] {
                t2.push(tans[next_original]);
            } else {
                t2.push(TangentVec::default());
            }
        }
        next_original += 1;
    }
    // tangents of inserted vertices
    let fill: Vec<(usize, TangentVec)> = t2
        .par_iter()
        .enumerate()
        .filter(|(_, t)| t.u == 0.0 && t.v == 0.0)
        .map(|(i, _)| (i, src.eval(s2[i]).1))
        .collect();
    for (i, t) in fill {
        t2[i] = t;
    }
    (s2, o2, t2, unresolved)
}

/// A transverse crossing of two curves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntersectionWitness {
    pub point: TorusPoint,
    /// Angle between the two tangent lines, in `[0, π/2]`.
    pub angle: f64,
    pub param_a: f64,
    pub param_b: f64,
    /// Torus distance between the two curves at the reported parameters.
    pub residual: f64,
}

/// `π/2 - 2 atan(θ₂) - 0.05`.
pub fn default_angle_min(params: &Params) -> f64 {
    FRAC_PI_2 - 2.0 * params.theta2.atan() - 0.05
}

#[derive(Clone, Copy)]
struct Seg {
    a: [f64; 2],
    b: [f64; 2],
}

impl Seg {
    fn bbox(&self) -> ([f64; 2], [f64; 2]) {
        (
            [self.a[0].min(self.b[0]), self.a[1].min(self.b[1])],
            [self.a[0].max(self.b[0]), self.a[1].max(self.b[1])],
        )
    }

    fn shifted(&self, dx: f64, dy: f64) -> Seg {
        Seg {
            a: [self.a[0] + dx, self.a[1] + dy],
            b: [self.b[0] + dx, self.b[1] + dy],
        }
    }
}

/// Parameters `(α, β)` with `p.a + α (p.b - p.a) = q.a + β (q.b - q.a)`,
/// or `None` for parallel segments.
fn line_params(p: &Seg, q: &Seg) -> Option<(f64, f64)> {
    let r = [p.b[0] - p.a[0], p.b[1] - p.a[1]];
    let s = [q.b[0] - q.a[0], q.b[1] - q.a[1]];
    let den = r[0] * s[1] - r[1] * s[0];
    let scale = (r[0].hypot(r[1])) * (s[0].hypot(s[1]));
    if den.abs() <= 1e-14 * scale || scale == 0.0 {
        return None;
    }
    let w = [q.a[0] - p.a[0], q.a[1] - p.a[1]];
    let alpha = (w[0] * s[1] - w[1] * s[0]) / den;
    let beta = (w[0] * r[1] - w[1] * r[0]) / den;
    Some((alpha, beta))
}

/// Integer translations `t` for which `q + t` can meet `p`.
fn candidate_shifts(p: &Seg, q: &Seg) -> Vec<(f64, f64)> {
    let (pl, ph) = p.bbox();
    let (ql, qh) = q.bbox();
    let mut out = Vec::new();
    let x0 = (pl[0] - qh[0]).ceil() as i64;
    let x1 = (ph[0] - ql[0]).floor() as i64;
    let y0 = (pl[1] - qh[1]).ceil() as i64;
    let y1 = (ph[1] - ql[1]).floor() as i64;
    for sx in x0..=x1 {
        for sy in y0..=y1 {
            out.push((sx as f64, sy as f64));
        }
    }
    out
}

fn cell_range(lo: f64, hi: f64) -> Vec<usize> {
    let g = GRID_CELLS as f64;
    let a = (lo * g).floor() as i64;
    let b = (hi * g).floor() as i64;
    let n = GRID_CELLS as i64;
    if b - a + 1 >= n {
        return (0..GRID_CELLS).collect();
    }
    (a..=b).map(|c| c.rem_euclid(n) as usize).collect()
}

/// All crossings of `a` and `b` on the torus with angle `>= angle_min`.
///
/// Candidate segment pairs come from a spatial hash; each chord crossing is
/// refined by bisection on the curves themselves until the bracketing
/// chords are below `1e-11`.
pub fn find_transverse_intersections(a: &Curve, b: &Curve, angle_min: f64) -> Vec<IntersectionWitness> {
    if a.len() < 2 || b.len() < 2 {
        return Vec::new();
    }
    let seg = |c: &Curve, i: usize| Seg {
        a: c.vertices[i],
        b: c.vertices[i + 1],
    };
    let mut grid: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for i in 0..a.len() - 1 {
        let (lo, hi) = seg(a, i).bbox();
        for cx in cell_range(lo[0], hi[0]) {
            for cy in cell_range(lo[1], hi[1]) {
                grid.entry((cx, cy)).or_default().push(i);
            }
        }
    }
    let last_a = a.len() - 2;
    let last_b = b.len() - 2;
    let mut found: Vec<IntersectionWitness> = (0..b.len() - 1)
        .into_par_iter()
        .flat_map_iter(|j| {
            let sb = seg(b, j);
            let (lo, hi) = sb.bbox();
            let mut cand: Vec<usize> = Vec::new();
            for cx in cell_range(lo[0], hi[0]) {
                for cy in cell_range(lo[1], hi[1]) {
                    if let Some(v) = grid.get(&(cx, cy)) {
                        cand.extend_from_slice(v);
                    }
                }
            }
            cand.sort_unstable();
            cand.dedup();
            let mut out = Vec::new();
            for i in cand {
                let sa = seg(a, i);
                for (dx, dy) in candidate_shifts(&sa, &sb) {
                    let q = sb.shifted(dx, dy);
                    let Some((al, be)) = line_params(&sa, &q) else { continue };
                    let a_ok = al >= 0.0 && (al < 1.0 || (i == last_a && al <= 1.0));
                    let b_ok = be >= 0.0 && (be < 1.0 || (j == last_b && be <= 1.0));
                    if a_ok && b_ok {
                        out.push(refine_crossing(a, b, i, j));
                    }
                }
            }
            out
        })
        .collect();
    found.retain(|w| w.angle >= angle_min);
    found.sort_by(|x, y| x.param_a.total_cmp(&y.param_a).then(x.param_b.total_cmp(&y.param_b)));
    found
}

fn torus_gap(p: [f64; 2], q: [f64; 2]) -> f64 {
    let dx = p[0] - q[0];
    let dy = p[1] - q[1];
    (dx - dx.round()).hypot(dy - dy.round())
}

/// Nested bisection of the two parameter brackets, keeping the half pair
/// whose chords still cross.
fn refine_crossing(a: &Curve, b: &Curve, i: usize, j: usize) -> IntersectionWitness {
    let (mut sa0, mut sa1) = (a.params[i], a.params[i + 1]);
    let (mut sb0, mut sb1) = (b.params[j], b.params[j + 1]);
    let (mut pa0, mut pa1) = (a.vertices[i], a.vertices[i + 1]);
    let (mut pb0, mut pb1) = (b.vertices[j], b.vertices[j + 1]);
    let exact_a = a.source.is_none();
    let exact_b = b.source.is_none();

    let chord_params = |pa0: [f64; 2], pa1: [f64; 2], pb0: [f64; 2], pb1: [f64; 2]| {
        let p = Seg { a: pa0, b: pa1 };
        let q0 = Seg { a: pb0, b: pb1 };
        let mid = [0.5 * (pa0[0] + pa1[0]), 0.5 * (pa0[1] + pa1[1])];
        let qm = [0.5 * (pb0[0] + pb1[0]), 0.5 * (pb0[1] + pb1[1])];
        let q = q0.shifted((mid[0] - qm[0]).round(), (mid[1] - qm[1]).round());
        line_params(&p, &q)
    };

    for _ in 0..80 {
        let la = seg_len(pa0, pa1);
        let lb = seg_len(pb0, pb1);
        if (la <= REFINE_CHORD || exact_a) && (lb <= REFINE_CHORD || exact_b) {
            break;
        }
        let (sam, pam) = if la > REFINE_CHORD && !exact_a {
            let s = 0.5 * (sa0 + sa1);
            (Some(s), a.eval(s).0)
        } else {
            (None, pa0)
        };
        let (sbm, pbm) = if lb > REFINE_CHORD && !exact_b {
            let s = 0.5 * (sb0 + sb1);
            (Some(s), b.eval(s).0)
        } else {
            (None, pb0)
        };
        let halves_a: Vec<(f64, f64, [f64; 2], [f64; 2])> = match sam {
            Some(s) => vec![(sa0, s, pa0, pam), (s, sa1, pam, pa1)],
            None => vec![(sa0, sa1, pa0, pa1)],
        };
        let halves_b: Vec<(f64, f64, [f64; 2], [f64; 2])> = match sbm {
            Some(s) => vec![(sb0, s, pb0, pbm), (s, sb1, pbm, pb1)],
            None => vec![(sb0, sb1, pb0, pb1)],
        };
        // pick the pair whose chord crossing is most interior
        let mut best: Option<(f64, usize, usize)> = None;
        for (ia, ha) in halves_a.iter().enumerate() {
            for (ib, hb) in halves_b.iter().enumerate() {
                if let Some((al, be)) = chord_params(ha.2, ha.3, hb.2, hb.3) {
                    let out = (-al).max(al - 1.0).max(-be).max(be - 1.0);
                    if best.map_or(true, |b| out < b.0) {
                        best = Some((out, ia, ib));
                    }
                }
            }
        }
        let Some((_, ia, ib)) = best else { break };
        (sa0, sa1, pa0, pa1) = halves_a[ia];
        (sb0, sb1, pb0, pb1) = halves_b[ib];
    }

    let (al, be) = chord_params(pa0, pa1, pb0, pb1).unwrap_or((0.5, 0.5));
    let (al, be) = (al.clamp(0.0, 1.0), be.clamp(0.0, 1.0));
    let param_a = sa0 + al * (sa1 - sa0);
    let param_b = sb0 + be * (sb1 - sb0);
    let (qa, ta) = a.eval(param_a);
    let (qb, tb) = b.eval(param_b);
    IntersectionWitness {
        point: TorusPoint::new(qa[0], qa[1]),
        angle: ta.line_angle(tb),
        param_a,
        param_b,
        residual: torus_gap(qa, qb),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Related,
    NotRelated,
    /// Growth was truncated before a crossing was found.
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HomoclinicResult {
    pub verdict: Verdict,
    pub angle_min: f64,
    /// `W⁺(p) ⋔ W⁻(q)`.
    pub witnesses_pq: Vec<IntersectionWitness>,
    /// `W⁺(q) ⋔ W⁻(p)`.
    pub witnesses_qp: Vec<IntersectionWitness>,
    /// Growth of `W⁺(p)`, `W⁻(q)`, `W⁺(q)`, `W⁻(p)`.
    pub growth: Vec<GrowthReport>,
}

impl HomoclinicResult {
    pub fn related(&self) -> bool {
        self.verdict == Verdict::Related
    }

    pub fn witnesses(&self) -> impl Iterator<Item = &IntersectionWitness> {
        self.witnesses_pq.iter().chain(&self.witnesses_qp)
    }
}

/// A point is admissible if it is in `X`, or a hyperbolic periodic point of
/// period at most 8.
fn admissible(params: &Params, p: TorusPoint) -> Result<bool> {
    let map = params.map();
    for n in 1..=8 {
        if let Ok(pp) = classify(&map, p, n) {
            return Ok(pp.stability_kind == StabilityKind::Hyperbolic);
        }
    }
    x_membership(params, p)
}

/// Grows `W⁺` forward and `W⁻` backward past length 4 at both points and
/// intersects them in both orders.
pub fn homoclinically_related(params: &Params, p: TorusPoint, q: TorusPoint) -> Result<HomoclinicResult> {
    homoclinically_related_with(params, p, q, 16, &GrowthConfig::default())
}

pub fn homoclinically_related_with(
    params: &Params,
    p: TorusPoint,
    q: TorusPoint,
    max_iter: usize,
    cfg: &GrowthConfig,
) -> Result<HomoclinicResult> {
    for pt in [p, q] {
        if !admissible(params, pt)? {
            return Err(Error::InvalidInput(format!(
                "({}, {}) is neither in X nor a hyperbolic periodic point",
                pt.x, pt.y
            )));
        }
    }
    let grow = |pt: TorusPoint, side: ManifoldSide| -> Result<(Curve, GrowthReport)> {
        let seed = seed_local_manifold(params, pt, side)?;
        grow_curve_with(params, &seed, side.growth_direction(), max_iter, 4.0, cfg)
    };
    let (up, rup) = grow(p, ManifoldSide::Unstable)?;
    let (sq, rsq) = grow(q, ManifoldSide::Stable)?;
    let (uq, ruq) = grow(q, ManifoldSide::Unstable)?;
    let (sp, rsp) = grow(p, ManifoldSide::Stable)?;
    let angle_min = default_angle_min(params);
    let wpq = find_transverse_intersections(&up, &sq, angle_min);
    let wqp = find_transverse_intersections(&uq, &sp, angle_min);
    let reached = |r: &GrowthReport| !r.truncated && r.first_iterate_length_gt4.is_some();
    let verdict = if !wpq.is_empty() && !wqp.is_empty() {
        Verdict::Related
    } else if [&rup, &rsq, &ruq, &rsp].iter().all(|r| reached(r)) {
        Verdict::NotRelated
    } else {
        Verdict::Inconclusive
    };
    Ok(HomoclinicResult {
        verdict,
        angle_min,
        witnesses_pq: wpq,
        witnesses_qp: wqp,
        growth: vec![rup, rsq, ruq, rsp],
    })
}
