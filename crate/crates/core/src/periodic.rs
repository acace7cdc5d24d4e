//! Census of `Fix(f^n)` by damped Newton iteration from a uniform seed grid,
//! with stability classification and a JSON-persistable database.
//!
//! "Period n" means fixed points of `f^n`, divisor periods included; the
//! least-period filter is opt-in through [`CensusConfig::least_period`].
//! Points are counted individually, not as orbits.

use std::collections::HashMap;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::map::{involution, torus_dist, Jacobian2, StandardMap, TangentVec, TorusPoint};

pub const NEWTON_TOL: f64 = 1e-11;
pub const DEDUP_TOL: f64 = 1e-6;
pub const MAX_NEWTON_STEPS: usize = 30;
pub const PERIODIC_TOL: f64 = 1e-9;
/// Census points near a double root of `f^n - Id` carry position errors far
/// above `newton_tol`, hence the loose trace window.
pub const PARABOLIC_TOL: f64 = 1e-6;
const MAX_HALVINGS: usize = 12;
const MAX_GRID: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StabilityKind {
    Hyperbolic,
    Elliptic,
    Parabolic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeriodicPoint {
    pub point: TorusPoint,
    pub n: usize,
    /// Trace of `Df^n` along the orbit.
    pub trace: f64,
    /// `(1/n) log` of the larger-modulus eigenvalue of `Df^n`; 0 unless hyperbolic.
    pub lambda: f64,
    pub stability_kind: StabilityKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CensusConfig {
    pub newton_tol: f64,
    pub dedup_tol: f64,
    pub max_steps: usize,
    pub parabolic_tol: f64,
    /// Keep only points whose least period is exactly `n`.
    pub least_period: bool,
}

impl Default for CensusConfig {
    fn default() -> Self {
        CensusConfig {
            newton_tol: NEWTON_TOL,
            dedup_tol: DEDUP_TOL,
            max_steps: MAX_NEWTON_STEPS,
            parabolic_tol: PARABOLIC_TOL,
            least_period: false,
        }
    }
}

/// Why seeds failed to produce a point.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscardStats {
    /// `Df^n - Id` numerically singular.
    pub singular: usize,
    /// Damping could not reduce the residual.
    pub stalled: usize,
    /// Step budget exhausted.
    pub max_iter: usize,
    /// Converged seeds merged into an existing point.
    pub duplicates: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodicDatabase {
    pub k: f64,
    pub n: usize,
    pub rho: f64,
    pub newton_tol: f64,
    pub dedup_tol: f64,
    pub grid_res: usize,
    pub seeds_used: usize,
    #[serde(default)]
    pub discarded: DiscardStats,
    #[serde(with = "point_records")]
    pub points: Vec<PeriodicPoint>,
}

/// On disk each point is `{"x", "y", "trace", "lambda", "kind"}`; `n` comes
/// from the enclosing database.
mod point_records {
    use super::*;
    use serde::{Deserializer, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Record {
        x: f64,
        y: f64,
        trace: f64,
        lambda: f64,
        kind: StabilityKind,
    }

    pub fn serialize<S: Serializer>(pts: &[PeriodicPoint], s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(pts.iter().map(|p| Record {
            x: p.point.x,
            y: p.point.y,
            trace: p.trace,
            lambda: p.lambda,
            kind: p.stability_kind,
        }))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<PeriodicPoint>, D::Error> {
        let recs: Vec<Record> = Vec::deserialize(d)?;
        Ok(recs
            .into_iter()
            .map(|r| PeriodicPoint {
                point: TorusPoint { x: r.x, y: r.y },
                n: 0,
                trace: r.trace,
                lambda: r.lambda,
                stability_kind: r.kind,
            })
            .collect())
    }
}

impl PeriodicDatabase {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("database serialises")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let mut db: PeriodicDatabase =
            serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("database JSON: {e}")))?;
        let n = db.n;
        db.points.iter_mut().for_each(|p| p.n = n);
        Ok(db)
    }

    pub fn save(&self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, self.to_json())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidInput(format!("reading {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// A cached database may stand in for a fresh census only if every
    /// setting that shapes the point set agrees exactly.
    pub fn matches(&self, k: f64, n: usize, grid_res: usize, cfg: &CensusConfig) -> bool {
        self.k == k
            && self.n == n
            && self.grid_res == grid_res
            && self.newton_tol == cfg.newton_tol
            && self.dedup_tol == cfg.dedup_tol
            && self.rho == 0.0
    }

    pub fn points_only(&self) -> Vec<TorusPoint> {
        self.points.iter().map(|p| p.point).collect()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

pub fn cache_file_name(k: f64, n: usize) -> String {
    format!("periodic_k{k}_n{n}.json")
}

/// `ceil(3 (4k)^(m/2))` with `m = max(n, 2)`, capped at 4096.
///
/// Fixed points of `f` all sit on the diagonal `y = x`, spaced about
/// `1/(4k)` apart, so a period-one census needs `O(k)` seeds per axis
/// rather than `O(√k)`.
pub fn default_grid_res(k: f64, n: usize) -> usize {
    let g = (3.0 * (4.0 * k).powf(n.max(2) as f64 / 2.0)).ceil();
    if g.is_finite() {
        (g as usize).clamp(2, MAX_GRID)
    } else {
        MAX_GRID
    }
}

/// Centered displacement `f^n(p) - p` and `Df^n(p)`.
fn displacement(map: &StandardMap, p: TorusPoint, n: usize) -> (TangentVec, Jacobian2) {
    let (z, jac) = map.iterate_with_jacobian(p, n);
    (p.displacement_to(z), jac)
}

pub fn periodic_residual(map: &StandardMap, p: TorusPoint, n: usize) -> f64 {
    torus_dist(map.iterate(p, n, crate::map::TimeDirection::Forward), p)
}

enum NewtonOutcome {
    Converged(TorusPoint, f64),
    Singular,
    Stalled,
    MaxIter,
}

/// Damped Newton on `d(p) = f^n(p) - p` (nearest lift) with `Df^n - Id`.
///
/// Converges when the displacement or the Newton correction is below
/// `tol`. The second test matters for large `|Df^n|`, where the nearest
/// double to a periodic point already carries a displacement of order
/// `|Df^n|·ε`.
fn newton(map: &StandardMap, seed: TorusPoint, n: usize, cfg: &CensusConfig) -> NewtonOutcome {
    let mut p = seed;
    let (mut d, mut jac) = displacement(map, p, n);
    let mut r = d.norm();
    // Keep stepping past `r <= tol` while the residual still drops: near a
    // double root (parabolic points) Newton is only linearly convergent and
    // the extra steps tighten the position by orders of magnitude.
    for _ in 0..cfg.max_steps {
        if r == 0.0 {
            return NewtonOutcome::Converged(p, r);
        }
        let a = Jacobian2::new(jac.a11 - 1.0, jac.a12, jac.a21, jac.a22 - 1.0);
        let det = a.det();
        let scale = 1.0 + jac.a11.abs() + jac.a12.abs() + jac.a21.abs() + jac.a22.abs();
        if det.abs() <= 1e-14 * scale || !det.is_finite() {
            return if r <= cfg.newton_tol {
                NewtonOutcome::Converged(p, r)
            } else {
                NewtonOutcome::Singular
            };
        }
        let inv = a.inverse().expect("non-singular");
        let mut step = -inv.apply(d);
        if step.norm() > 0.5 {
            step = step * (0.5 / step.norm());
        }
        if step.norm() <= cfg.newton_tol {
            return NewtonOutcome::Converged(p.translate(step), r);
        }
        let mut accepted = false;
        for _ in 0..MAX_HALVINGS {
            let q = p.translate(step);
            let (dq, jq) = displacement(map, q, n);
            let rq = dq.norm();
            if rq < r {
                p = q;
                d = dq;
                jac = jq;
                r = rq;
                accepted = true;
                break;
            }
            step = step * 0.5;
        }
        if !accepted {
            return if r <= cfg.newton_tol {
                NewtonOutcome::Converged(p, r)
            } else {
                NewtonOutcome::Stalled
            };
        }
    }
    if r <= cfg.newton_tol {
        NewtonOutcome::Converged(p, r)
    } else {
        NewtonOutcome::MaxIter
    }
}

fn kind_of(trace: f64, tol: f64) -> StabilityKind {
    let a = trace.abs();
    if (a - 2.0).abs() <= tol {
        StabilityKind::Parabolic
    } else if a > 2.0 {
        StabilityKind::Hyperbolic
    } else {
        StabilityKind::Elliptic
    }
}

fn classify_unchecked(map: &StandardMap, p: TorusPoint, n: usize, parabolic_tol: f64) -> PeriodicPoint {
    let (_, jac) = map.iterate_with_jacobian(p, n);
    let trace = jac.trace();
    let kind = kind_of(trace, parabolic_tol);
    let lambda = if kind == StabilityKind::Hyperbolic {
        let a = trace.abs();
        ((a + (a * a - 4.0).sqrt()) / 2.0).ln() / n as f64
    } else {
        0.0
    };
    PeriodicPoint {
        point: p,
        n,
        trace,
        lambda,
        stability_kind: kind,
    }
}

/// Stability data of a point of period `n` (verified to [`PERIODIC_TOL`]).
pub fn classify(map: &StandardMap, p: TorusPoint, n: usize) -> Result<PeriodicPoint> {
    classify_with_tol(map, p, n, PERIODIC_TOL)
}

pub fn classify_with_tol(map: &StandardMap, p: TorusPoint, n: usize, tol: f64) -> Result<PeriodicPoint> {
    if n == 0 {
        return Err(Error::InvalidInput("period must be >= 1".into()));
    }
    let residual = periodic_residual(map, p, n);
    if !(residual <= tol) {
        return Err(Error::NotPeriodic { residual, tol });
    }
    Ok(classify_unchecked(map, p, n, PARABOLIC_TOL))
}

/// Spatial hash over the torus for `dedup_tol`-neighbourhood queries.
struct PointIndex {
    cells: usize,
    map: HashMap<(usize, usize), Vec<usize>>,
}

impl PointIndex {
    fn new(tol: f64) -> Self {
        let cells = ((1.0 / tol.max(1e-12)) / 2.0).floor().clamp(1.0, 1e9) as usize;
        PointIndex {
            cells,
            map: HashMap::new(),
        }
    }

    fn cell(&self, p: TorusPoint) -> (usize, usize) {
        let c = self.cells as f64;
        (
            ((p.x * c) as usize).min(self.cells - 1),
            ((p.y * c) as usize).min(self.cells - 1),
        )
    }

    fn insert(&mut self, p: TorusPoint, idx: usize) {
        self.map.entry(self.cell(p)).or_default().push(idx);
    }

    fn near<'a>(&'a self, p: TorusPoint) -> impl Iterator<Item = usize> + 'a {
        let (cx, cy) = self.cell(p);
        let n = self.cells;
        let offs: [usize; 3] = [n - 1, 0, 1];
        offs.into_iter()
            .flat_map(move |dx| offs.into_iter().map(move |dy| ((cx + dx) % n, (cy + dy) % n)))
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .filter_map(move |c| self.map.get(&c))
            .flatten()
            .copied()
    }
}

struct Accumulator {
    points: Vec<(TorusPoint, f64)>,
    index: PointIndex,
    tol: f64,
}

impl Accumulator {
    fn new(tol: f64) -> Self {
        Accumulator {
            points: Vec::new(),
            index: PointIndex::new(tol),
            tol,
        }
    }

    fn find(&self, p: TorusPoint) -> Option<usize> {
        self.index
            .near(p)
            .find(|&i| torus_dist(self.points[i].0, p) < self.tol)
    }

    /// Returns `true` if `p` was new.
    fn offer(&mut self, p: TorusPoint, residual: f64) -> bool {
        match self.find(p) {
            Some(i) => {
                if residual < self.points[i].1 {
                    self.points[i] = (p, residual);
                    self.index.insert(p, i);
                }
                false
            }
            None => {
                let i = self.points.len();
                self.points.push((p, residual));
                self.index.insert(p, i);
                true
            }
        }
    }
}

fn sort_points(points: &mut [(TorusPoint, f64)]) {
    points.sort_by(|a, b| a.0.x.total_cmp(&b.0.x).then(a.0.y.total_cmp(&b.0.y)));
}

/// Newton census with default tolerances.
pub fn find_periodic(map: &StandardMap, n: usize, grid_res: usize) -> Result<PeriodicDatabase> {
    find_periodic_with(map, n, grid_res, &CensusConfig::default())
}

pub fn find_periodic_with(
    map: &StandardMap,
    n: usize,
    grid_res: usize,
    cfg: &CensusConfig,
) -> Result<PeriodicDatabase> {
    if n == 0 {
        return Err(Error::InvalidInput("period must be >= 1".into()));
    }
    if grid_res < 2 {
        return Err(Error::InvalidInput(format!("grid_res must be >= 2, got {grid_res}")));
    }
    let g = grid_res;
    let step = 1.0 / g as f64;
    let outcomes: Vec<NewtonOutcome> = (0..g * g)
        .into_par_iter()
        .map(|i| {
            let seed = TorusPoint::new((i / g) as f64 * step + 0.5 * step, (i % g) as f64 * step + 0.5 * step);
            newton(map, seed, n, cfg)
        })
        .collect();

    let mut stats = DiscardStats::default();
    let mut converged = Vec::new();
    for o in outcomes {
        match o {
            NewtonOutcome::Converged(p, r) => converged.push((p, r)),
            NewtonOutcome::Singular => stats.singular += 1,
            NewtonOutcome::Stalled => stats.stalled += 1,
            NewtonOutcome::MaxIter => stats.max_iter += 1,
        }
    }
    sort_points(&mut converged);

    let mut acc = Accumulator::new(cfg.dedup_tol);
    for (p, r) in converged {
        if !acc.offer(p, r) {
            stats.duplicates += 1;
        }
    }
    repair_closure(map, n, cfg, &mut acc);

    let mut pts = acc.points;
    sort_points(&mut pts);
    let mut points: Vec<PeriodicPoint> = pts
        .par_iter()
        .map(|&(p, _)| classify_unchecked(map, p, n, cfg.parabolic_tol))
        .collect();
    if cfg.least_period {
        let divisors: Vec<usize> = (1..n).filter(|d| n % d == 0).collect();
        points.retain(|pp| {
            divisors
                .iter()
                .all(|&d| periodic_residual(map, pp.point, d) >= cfg.dedup_tol)
        });
    }
    Ok(PeriodicDatabase {
        k: map.k,
        n,
        rho: 0.0,
        newton_tol: cfg.newton_tol,
        dedup_tol: cfg.dedup_tol,
        grid_res,
        seeds_used: g * g,
        discarded: stats,
        points,
    })
}

/// Insert missing `f`-images and involution images until the set is closed.
/// Each inserted image is re-polished by Newton from its computed position.
fn repair_closure(map: &StandardMap, n: usize, cfg: &CensusConfig, acc: &mut Accumulator) {
    let mut cursor = 0;
    while cursor < acc.points.len() {
        let p = acc.points[cursor].0;
        for q in [map.apply(p), involution(p)] {
            if acc.find(q).is_some() {
                continue;
            }
            if let NewtonOutcome::Converged(r, res) = newton(map, q, n, cfg) {
                if torus_dist(r, q) < cfg.dedup_tol {
                    acc.offer(r, res);
                    continue;
                }
            }
            // Newton drifted; keep the image itself, it is as accurate as `p` allows.
            let res = periodic_residual(map, q, n);
            acc.offer(q, res);
        }
        cursor += 1;
    }
}

/// Points of the database whose exponent is at least `rho`.
/// Negative `rho` behaves like 0: all hyperbolic points are kept.
pub fn filter_rho_hyperbolic(db: &PeriodicDatabase, rho: f64) -> PeriodicDatabase {
    let points = db
        .points
        .iter()
        .filter(|p| p.stability_kind == StabilityKind::Hyperbolic && p.lambda >= rho)
        .copied()
        .collect();
    PeriodicDatabase {
        rho: rho.max(0.0),
        points,
        ..db.clone()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub count: usize,
    pub closure_violations: usize,
    pub involution_violations: usize,
    /// Points failing `torus_dist(f^n p, p) <= 1e-9` on independent re-evaluation.
    pub periodicity_violations: usize,
    pub worst_residual: f64,
    /// `count / (4k)^n`.
    pub heuristic_ratio: f64,
    pub seeds_used: usize,
    pub discarded: DiscardStats,
}

pub fn audit_database(db: &PeriodicDatabase) -> AuditReport {
    let map = StandardMap { k: db.k };
    let mut acc = Accumulator::new(db.dedup_tol);
    for p in &db.points {
        acc.offer(p.point, 0.0);
    }
    let mut closure = 0;
    let mut inv = 0;
    let mut periodicity = 0;
    let mut worst: f64 = 0.0;
    for p in &db.points {
        if acc.find(map.apply(p.point)).is_none() {
            closure += 1;
        }
        if acc.find(involution(p.point)).is_none() {
            inv += 1;
        }
        let r = periodic_residual(&map, p.point, db.n);
        worst = worst.max(r);
        if !(r <= PERIODIC_TOL) {
            periodicity += 1;
        }
    }
    AuditReport {
        count: db.points.len(),
        closure_violations: closure,
        involution_violations: inv,
        periodicity_violations: periodicity,
        worst_residual: worst,
        heuristic_ratio: db.points.len() as f64 / (4.0 * db.k).powi(db.n as i32),
        seeds_used: db.seeds_used,
        discarded: db.discarded,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::sin_2pi;
    use std::f64::consts::TAU;

    /// Roots of `k sin(2πx) ∈ Z` on `[0, 1)` by bisection on the two
    /// monotone branches. Each branch takes its levels half-open so the
    /// tangencies at `x = 1/4, 3/4` are counted once.
    fn diagonal_roots(k: f64) -> Vec<f64> {
        let phi = |x: f64| k * (TAU * x).sin();
        let mut roots = Vec::new();
        // increasing on [-1/4, 1/4], levels in [-k, k)
        for level in (-k).ceil() as i64..=k.floor() as i64 {
            let l = level as f64;
            if l < k {
                roots.push(bisect(|x| phi(x) - l, -0.25, 0.25));
            }
            if l > -k {
                roots.push(bisect(|x| l - phi(x), 0.25, 0.75));
            }
        }
        let mut roots: Vec<f64> = roots
            .into_iter()
            .map(|x| if x.abs() < 1e-12 { 0.0 } else { x.rem_euclid(1.0) })
            .collect();
        roots.sort_by(f64::total_cmp);
        roots
    }

    /// Root of an increasing function on `[a, b]`.
    fn bisect(g: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
        for _ in 0..100 {
            let m = 0.5 * (a + b);
            if g(m) < 0.0 {
                a = m;
            } else {
                b = m;
            }
        }
        0.5 * (a + b)
    }

    #[test]
    fn oracle_counts() {
        assert_eq!(diagonal_roots(5.0).len(), 20);
        assert_eq!(diagonal_roots(10.0).len(), 40);
        assert_eq!(diagonal_roots(2.0).len(), 8);
        assert_eq!(diagonal_roots(20.0).len(), 80);
    }

    fn check_against_oracle(k: f64) {
        let map = StandardMap::new(k).unwrap();
        let db = find_periodic(&map, 1, default_grid_res(k, 1)).unwrap();
        let roots = diagonal_roots(k);
        assert_eq!(db.len(), roots.len(), "k = {k}");
        let mut xs: Vec<f64> = db.points.iter().map(|p| p.point.x).collect();
        xs.sort_by(f64::total_cmp);
        for (x, r) in xs.iter().zip(&roots) {
            assert!((x - r).abs() < 1e-6, "k = {k}: {x} vs {r}");
        }
        for p in &db.points {
            assert!(torus_dist(p.point, TorusPoint::new(p.point.x, p.point.x)) < 1e-6);
            assert!(periodic_residual(&map, p.point, 1) <= PERIODIC_TOL);
        }
    }

    #[test]
    fn fixed_point_census_matches_oracle() {
        for k in [2.0, 5.0, 10.0, 20.0] {
            check_against_oracle(k);
        }
    }

    #[test]
    fn lattice_points_present_for_all_periods() {
        let map = StandardMap::new(3.0).unwrap();
        for n in 1..=2 {
            let db = find_periodic(&map, n, default_grid_res(3.0, n)).unwrap();
            let pts = db.points_only();
            for q in [TorusPoint::ORIGIN, TorusPoint::new(0.5, 0.5)] {
                assert!(pts.iter().any(|&p| torus_dist(p, q) < 1e-9), "n = {n}");
            }
        }
    }

    #[test]
    fn classify_examples() {
        let m = StandardMap::new(5.0).unwrap();
        let pp = classify(&m, TorusPoint::ORIGIN, 1).unwrap();
        assert!((pp.trace - 33.4159).abs() < 1e-4);
        assert!((pp.lambda - 3.508).abs() < 1e-3);
        assert_eq!(pp.stability_kind, StabilityKind::Hyperbolic);

        let m = StandardMap::new(0.1).unwrap();
        let pp = classify(&m, TorusPoint::new(0.5, 0.5), 1).unwrap();
        assert!((pp.trace - (2.0 - TAU * 0.1)).abs() < 1e-12);
        assert!((pp.trace - 1.372).abs() < 1e-3);
        assert_eq!(pp.stability_kind, StabilityKind::Elliptic);
        assert_eq!(pp.lambda, 0.0);

        // k = 5, x = 1/4: trace exactly 2
        let m = StandardMap::new(5.0).unwrap();
        let pp = classify(&m, TorusPoint::new(0.25, 0.25), 1).unwrap();
        assert_eq!(pp.stability_kind, StabilityKind::Parabolic);
        assert_eq!(pp.lambda, 0.0);

        assert!(matches!(
            classify(&m, TorusPoint::new(0.1, 0.3), 1),
            Err(Error::NotPeriodic { .. })
        ));
    }

    #[test]
    fn rho_filter() {
        let map = StandardMap::new(5.0).unwrap();
        let db = find_periodic(&map, 1, default_grid_res(5.0, 1)).unwrap();
        let hyper = db
            .points
            .iter()
            .filter(|p| p.stability_kind == StabilityKind::Hyperbolic)
            .count();
        assert_eq!(filter_rho_hyperbolic(&db, 0.0).len(), hyper);
        let max_lambda = db.points.iter().map(|p| p.lambda).fold(0.0, f64::max);
        assert!(filter_rho_hyperbolic(&db, max_lambda + 1e-9).is_empty());

        let threshold = 2.0 * 1f64.cosh();
        let oracle = diagonal_roots(5.0)
            .into_iter()
            .filter(|&x| (TAU * 5.0 * (TAU * x).cos() + 2.0).abs() > threshold)
            .count();
        let f = filter_rho_hyperbolic(&db, 1.0);
        assert_eq!(f.len(), oracle);

        let mut last = usize::MAX;
        for rho in [0.0, 0.5, 1.0, 2.0, 3.0, 3.5] {
            let f = filter_rho_hyperbolic(&db, rho);
            assert!(f.len() <= last);
            last = f.len();
        }
    }

    #[test]
    fn audit_detects_missing_image() {
        let map = StandardMap::new(5.0).unwrap();
        let db = find_periodic(&map, 2, default_grid_res(5.0, 2)).unwrap();
        let rep = audit_database(&db);
        assert_eq!(rep.closure_violations, 0);
        assert_eq!(rep.involution_violations, 0);
        assert_eq!(rep.periodicity_violations, 0);

        // a point of least period 2 has an image distinct from itself
        let idx = db
            .points
            .iter()
            .position(|p| periodic_residual(&map, p.point, 1) > 1e-3)
            .unwrap();
        let mut broken = db.clone();
        broken.points.remove(idx);
        let rep = audit_database(&broken);
        assert!(rep.closure_violations >= 1);
    }

    #[test]
    fn database_invariants_period_two() {
        let map = StandardMap::new(5.0).unwrap();
        let db = find_periodic(&map, 2, default_grid_res(5.0, 2)).unwrap();
        for (i, a) in db.points.iter().enumerate() {
            for b in &db.points[i + 1..] {
                assert!(torus_dist(a.point, b.point) >= db.dedup_tol);
            }
            assert!(a.lambda >= 0.0);
            assert_eq!(a.lambda > 0.0, a.stability_kind == StabilityKind::Hyperbolic);
        }
        let ratio = audit_database(&db).heuristic_ratio;
        assert!((0.5..=2.0).contains(&ratio), "{ratio}");
    }

    #[test]
    fn least_period_filter() {
        let map = StandardMap::new(5.0).unwrap();
        let cfg = CensusConfig {
            least_period: true,
            ..CensusConfig::default()
        };
        let all = find_periodic(&map, 2, 40).unwrap();
        let least = find_periodic_with(&map, 2, 40, &cfg).unwrap();
        let fixed = find_periodic(&map, 1, 40).unwrap();
        assert_eq!(least.len() + fixed.len(), all.len());
    }

    #[test]
    fn json_round_trip_keeps_schema() {
        let map = StandardMap::new(5.0).unwrap();
        let db = find_periodic(&map, 1, 20).unwrap();
        let text = db.to_json();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        for key in ["k", "n", "rho", "newton_tol", "points"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        let p0 = &v["points"][0];
        for key in ["x", "y", "trace", "lambda", "kind"] {
            assert!(p0.get(key).is_some(), "{key}");
        }
        assert_eq!(PeriodicDatabase::from_json(&text).unwrap(), db);
        assert_eq!(cache_file_name(5.0, 3), "periodic_k5_n3.json");
        assert_eq!(cache_file_name(2.5, 1), "periodic_k2.5_n1.json");
    }

    #[test]
    fn bad_arguments() {
        let map = StandardMap::new(5.0).unwrap();
        assert!(find_periodic(&map, 0, 10).is_err());
        assert!(find_periodic(&map, 1, 1).is_err());
        assert_eq!(default_grid_res(5.0, 1), 60);
        assert_eq!(default_grid_res(5.0, 4), 1200);
        assert_eq!(default_grid_res(3000.0, 2), 4096);
        let _ = sin_2pi(0.0);
    }
}
