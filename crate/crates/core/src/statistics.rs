//! Statistics over point sets: entropy growth fits, empirical measures with
//! low-order Fourier coefficients, covering radius, Young's dimension
//! formula and box counting.

use std::collections::HashSet;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::map::{cos_2pi, sin_2pi, torus_dist, TorusPoint};
use crate::periodic::PeriodicPoint;

pub const DEFAULT_GRID: usize = 256;
pub const DEFAULT_MAX_FREQ: usize = 3;
pub const PROBE_GRID: usize = 512;
/// Atoms per partial sum; partial sums are then added in index order, so
/// Fourier sums do not depend on the thread count.
const CHUNK: usize = 1024;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyFit {
    pub counts: Vec<(usize, usize)>,
    /// Least-squares slope of `log count` against `n`, in nats.
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the fit in log space.
    pub residual: f64,
    /// `log(count) / n` at the largest `n`.
    pub log_count_over_n: f64,
}

fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    (slope, intercept, (rss / n).sqrt())
}

/// Fit of `log count` against `n`. Entries with count 0 are ignored.
pub fn entropy_fit(counts: &[(usize, usize)]) -> Result<EntropyFit> {
    let used: Vec<(usize, usize)> = counts.iter().copied().filter(|&(_, c)| c >= 1).collect();
    let distinct: HashSet<usize> = used.iter().map(|&(n, _)| n).collect();
    if distinct.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "entropy fit needs at least two distinct n with a positive count, got {}",
            distinct.len()
        )));
    }
    let xs: Vec<f64> = used.iter().map(|&(n, _)| n as f64).collect();
    let ys: Vec<f64> = used.iter().map(|&(_, c)| (c as f64).ln()).collect();
    let (slope, intercept, residual) = least_squares(&xs, &ys);
    let &(n_max, c_max) = used.iter().max_by_key(|&&(n, _)| n).expect("non-empty");
    Ok(EntropyFit {
        counts: counts.to_vec(),
        slope,
        intercept,
        residual,
        log_count_over_n: (c_max as f64).ln() / n_max as f64,
    })
}

/// Equal-weight measure on a finite set of atoms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalMeasure {
    pub grid_size: usize,
    /// Row-major `grid_size × grid_size` masses, `grid[i * G + j]` for the
    /// cell `[i/G, (i+1)/G) × [j/G, (j+1)/G)`.
    pub grid: Vec<f64>,
    pub max_freq: usize,
    /// `m̂(a, b)` at index `(a + A)(2A + 1) + (b + A)`.
    pub fourier: Vec<Complex64>,
    pub atom_count: usize,
}

impl EmpiricalMeasure {
    fn side(&self) -> usize {
        2 * self.max_freq + 1
    }

    fn index(&self, a: i64, b: i64) -> usize {
        let m = self.max_freq as i64;
        ((a + m) * self.side() as i64 + (b + m)) as usize
    }

    /// `m̂(a, b) = (1/N) Σ exp(-2πi (a x + b y))`.
    pub fn coef(&self, a: i64, b: i64) -> Complex64 {
        let m = self.max_freq as i64;
        assert!(a.abs() <= m && b.abs() <= m, "frequency ({a}, {b}) outside the box");
        self.fourier[self.index(a, b)]
    }

    pub fn total_mass(&self) -> f64 {
        self.grid.iter().sum()
    }

    /// `i,j,mass` rows for non-empty cells.
    pub fn grid_csv(&self) -> String {
        let g = self.grid_size;
        let mut out = String::from("i,j,mass\n");
        for (idx, &m) in self.grid.iter().enumerate() {
            if m > 0.0 {
                out.push_str(&format!("{},{},{}\n", idx / g, idx % g, m));
            }
        }
        out
    }

    /// `[{"a", "b", "re", "im"}, ...]`.
    pub fn coefficients_json(&self) -> String {
        let m = self.max_freq as i64;
        let rows: Vec<serde_json::Value> = (-m..=m)
            .flat_map(|a| (-m..=m).map(move |b| (a, b)))
            .map(|(a, b)| {
                let c = self.coef(a, b);
                serde_json::json!({ "a": a, "b": b, "re": c.re, "im": c.im })
            })
            .collect();
        serde_json::to_string_pretty(&rows).expect("coefficients serialise")
    }
}

pub fn empirical_measure(points: &[TorusPoint], grid: usize, max_freq: usize) -> Result<EmpiricalMeasure> {
    if points.is_empty() {
        return Err(Error::InvalidInput("empirical measure of an empty point set".into()));
    }
    if grid == 0 {
        return Err(Error::InvalidInput("grid must be >= 1".into()));
    }
    let n = points.len();
    let w = 1.0 / n as f64;
    let mut counts = vec![0usize; grid * grid];
    for p in points {
        let i = ((p.x * grid as f64) as usize).min(grid - 1);
        let j = ((p.y * grid as f64) as usize).min(grid - 1);
        counts[i * grid + j] += 1;
    }
    let grid_mass: Vec<f64> = counts.iter().map(|&c| c as f64 * w).collect();

    let m = max_freq as i64;
    let side = 2 * max_freq + 1;
    // half box: (a > 0) or (a == 0 and b >= 0); the rest by conjugation
    let half: Vec<(i64, i64)> = (0..=m)
        .flat_map(|a| (-m..=m).map(move |b| (a, b)))
        .filter(|&(a, b)| a > 0 || b >= 0)
        .collect();
    let partials: Vec<Vec<Complex64>> = points
        .par_chunks(CHUNK)
        .map(|chunk| {
            half.iter()
                .map(|&(a, b)| {
                    chunk.iter().fold(Complex64::new(0.0, 0.0), |acc, p| {
                        // reduce the phase exactly before the trig call
                        let t = (a as f64 * p.x).fract() + (b as f64 * p.y).fract();
                        acc + Complex64::new(cos_2pi(t), -sin_2pi(t))
                    })
                })
                .collect()
        })
        .collect();
    let mut fourier = vec![Complex64::new(0.0, 0.0); side * side];
    for (h, &(a, b)) in half.iter().enumerate() {
        let sum = partials.iter().fold(Complex64::new(0.0, 0.0), |acc, p| acc + p[h]);
        let c = sum * w;
        fourier[((a + m) * side as i64 + (b + m)) as usize] = c;
        fourier[((-a + m) * side as i64 + (-b + m)) as usize] = c.conj();
    }
    fourier[(m * side as i64 + m) as usize] = Complex64::new(1.0, 0.0);
    Ok(EmpiricalMeasure {
        grid_size: grid,
        grid: grid_mass,
        max_freq,
        fourier,
        atom_count: n,
    })
}

/// Measure of the atoms of a periodic database.
pub fn measure_of_atoms(atoms: &[PeriodicPoint], grid: usize, max_freq: usize) -> Result<EmpiricalMeasure> {
    let pts: Vec<TorusPoint> = atoms.iter().map(|p| p.point).collect();
    empirical_measure(&pts, grid, max_freq)
}

/// `max |m̂₁(a, b) - m̂₂(a, b)|` over the shared box.
pub fn measure_distance(m1: &EmpiricalMeasure, m2: &EmpiricalMeasure) -> Result<f64> {
    if m1.max_freq != m2.max_freq {
        return Err(Error::FrequencyMismatch(m1.max_freq, m2.max_freq));
    }
    Ok(m1
        .fourier
        .iter()
        .zip(&m2.fourier)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max))
}

/// Distance between `m` and its push-forward under `(x, y) ↦ (y, x)`,
/// whose coefficients are `m̂(b, a)`.
pub fn involution_defect(m: &EmpiricalMeasure) -> f64 {
    let a_max = m.max_freq as i64;
    let mut worst: f64 = 0.0;
    for a in -a_max..=a_max {
        for b in -a_max..=a_max {
            worst = worst.max((m.coef(a, b) - m.coef(b, a)).norm());
        }
    }
    worst
}

/// Uniform-grid index over the torus for nearest-point queries.
struct NearestIndex<'a> {
    cells: usize,
    buckets: Vec<Vec<usize>>,
    points: &'a [TorusPoint],
}

impl<'a> NearestIndex<'a> {
    fn new(points: &'a [TorusPoint]) -> Self {
        let cells = ((points.len() as f64).sqrt().ceil() as usize).clamp(1, 1024);
        let mut buckets = vec![Vec::new(); cells * cells];
        for (i, p) in points.iter().enumerate() {
            let (cx, cy) = Self::cell_of(cells, *p);
            buckets[cx * cells + cy].push(i);
        }
        NearestIndex { cells, buckets, points }
    }

    fn cell_of(cells: usize, p: TorusPoint) -> (usize, usize) {
        let c = cells as f64;
        (((p.x * c) as usize).min(cells - 1), ((p.y * c) as usize).min(cells - 1))
    }

    /// Distance to the nearest indexed point, by rings of cells. After ring
    /// `r` every unvisited point is at least `r / cells` away.
    fn nearest(&self, q: TorusPoint) -> f64 {
        let c = self.cells as i64;
        let (cx, cy) = Self::cell_of(self.cells, q);
        let (cx, cy) = (cx as i64, cy as i64);
        let mut best = f64::INFINITY;
        let mut r: i64 = 0;
        loop {
            for dx in -r..=r {
                for dy in -r..=r {
                    if dx.abs() != r && dy.abs() != r {
                        continue;
                    }
                    let bx = (cx + dx).rem_euclid(c) as usize;
                    let by = (cy + dy).rem_euclid(c) as usize;
                    for &i in &self.buckets[bx * self.cells + by] {
                        best = best.min(torus_dist(q, self.points[i]));
                    }
                }
            }
            if best <= r as f64 / c as f64 || 2 * r + 1 >= c {
                return best;
            }
            r += 1;
        }
    }
}

/// Covering radius over the `512 × 512` probe grid `(i/512, j/512)`, and
/// whether it is at most `epsilon`.
pub fn density_check(points: &[TorusPoint], epsilon: f64) -> Result<(bool, f64)> {
    if points.is_empty() {
        return Err(Error::InvalidInput("density check of an empty point set".into()));
    }
    if !(epsilon > 0.0) {
        return Err(Error::InvalidInput(format!("epsilon must be > 0, got {epsilon}")));
    }
    let r = covering_radius(points, PROBE_GRID);
    Ok((r <= epsilon, r))
}

pub fn covering_radius(points: &[TorusPoint], probes: usize) -> f64 {
    let index = NearestIndex::new(points);
    let step = 1.0 / probes as f64;
    (0..probes * probes)
        .into_par_iter()
        .map(|i| index.nearest(TorusPoint::new((i / probes) as f64 * step, (i % probes) as f64 * step)))
        .reduce(|| 0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionEstimate {
    pub h: f64,
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    pub dim: f64,
}

/// Young's formula `dim = h (1/λ⁺ - 1/λ⁻)`, gated by Ruelle's inequality
/// `h <= min(λ⁺, -λ⁻)`.
pub fn young_dimension(h: f64, lambda_plus: f64, lambda_minus: f64) -> Result<DimensionEstimate> {
    if !(lambda_plus > 0.0 && lambda_minus < 0.0 && h > 0.0) || !h.is_finite() {
        return Err(Error::InvalidInput(format!(
            "need h > 0 and lambda_plus > 0 > lambda_minus, got h = {h}, lambda = ({lambda_plus}, {lambda_minus})"
        )));
    }
    if h > lambda_plus.min(-lambda_minus) {
        return Err(Error::InconsistentInputs(format!(
            "Ruelle gate failed: h = {h} exceeds min(lambda_plus, -lambda_minus) = {}",
            lambda_plus.min(-lambda_minus)
        )));
    }
    Ok(DimensionEstimate {
        h,
        lambda_plus,
        lambda_minus,
        dim: h * (1.0 / lambda_plus - 1.0 / lambda_minus),
    })
}

/// Equal-weight mean exponent of hyperbolic atoms.
pub fn mean_lambda(atoms: &[PeriodicPoint]) -> Result<f64> {
    if atoms.is_empty() {
        return Err(Error::InsufficientData("no atoms to average".into()));
    }
    Ok(atoms.iter().map(|p| p.lambda).sum::<f64>() / atoms.len() as f64)
}

/// Least-squares slope of `log N(ε)` against `log(1/ε)`, where `N(ε)` is
/// the number of occupied `ε`-boxes.
pub fn box_counting(points: &[TorusPoint], scales: &[f64]) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::InvalidInput("box counting of an empty point set".into()));
    }
    let distinct: HashSet<u64> = scales.iter().map(|s| s.to_bits()).collect();
    if distinct.len() < 2 {
        return Err(Error::InsufficientData("box counting needs at least two scales".into()));
    }
    if let Some(s) = scales.iter().find(|&&s| !(s > 0.0 && s <= 1.0)) {
        return Err(Error::InvalidInput(format!("scales must lie in (0, 1], got {s}")));
    }
    let xs: Vec<f64> = scales.iter().map(|s| (1.0 / s).ln()).collect();
    let ys: Vec<f64> = scales
        .par_iter()
        .map(|&eps| {
            let boxes: HashSet<(u64, u64)> = points
                .iter()
                .map(|p| ((p.x / eps) as u64, (p.y / eps) as u64))
                .collect();
            (boxes.len() as f64).ln()
        })
        .collect();
    Ok(least_squares(&xs, &ys).0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::uniform_points;
    use proptest::prelude::*;
    use std::f64::consts::SQRT_2;

    #[test]
    fn exact_geometric_counts() {
        let k = 5.0_f64;
        let counts: Vec<(usize, usize)> = (1..=4).map(|n| (n, (4.0 * k).powi(n as i32) as usize)).collect();
        let fit = entropy_fit(&counts).unwrap();
        assert!((fit.slope - (4.0 * k).ln()).abs() < 1e-12);
        assert!(fit.residual < 1e-12);
        assert!((fit.log_count_over_n - 20f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn entropy_fit_needs_two_values_of_n() {
        assert!(matches!(entropy_fit(&[(3, 100)]), Err(Error::InsufficientData(_))));
        assert!(matches!(entropy_fit(&[(3, 100), (3, 90)]), Err(Error::InsufficientData(_))));
        assert!(matches!(entropy_fit(&[(3, 100), (4, 0)]), Err(Error::InsufficientData(_))));
        assert!(entropy_fit(&[(3, 100), (4, 1)]).is_ok());
    }

    #[test]
    fn single_atom_coefficients() {
        let m = empirical_measure(&[TorusPoint::ORIGIN], 16, 3).unwrap();
        for c in &m.fourier {
            assert_eq!(*c, Complex64::new(1.0, 0.0));
        }
        assert_eq!(m.total_mass(), 1.0);
        assert_eq!(m.atom_count, 1);
    }

    #[test]
    fn uniform_grid_cancels() {
        let g = 8;
        let pts: Vec<TorusPoint> = (0..g * g)
            .map(|i| TorusPoint::new((i / g) as f64 / g as f64, (i % g) as f64 / g as f64))
            .collect();
        let m = empirical_measure(&pts, g, 3).unwrap();
        for a in -3i64..=3 {
            for b in -3i64..=3 {
                let c = m.coef(a, b);
                if a == 0 && b == 0 {
                    assert_eq!(c, Complex64::new(1.0, 0.0));
                } else {
                    assert!(c.norm() < 1e-14, "({a},{b}) {c}");
                }
            }
        }
        assert!(m.grid.iter().all(|&w| (w - 1.0 / 64.0).abs() < 1e-15));
    }

    #[test]
    fn antipodal_atoms() {
        let a = empirical_measure(&[TorusPoint::ORIGIN], 4, 3).unwrap();
        let b = empirical_measure(&[TorusPoint::new(0.5, 0.5)], 4, 3).unwrap();
        assert!((measure_distance(&a, &b).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(measure_distance(&a, &a).unwrap(), 0.0);
        let c = empirical_measure(&[TorusPoint::ORIGIN], 4, 2).unwrap();
        assert!(matches!(measure_distance(&a, &c), Err(Error::FrequencyMismatch(3, 2))));
        assert!(empirical_measure(&[], 4, 3).is_err());
    }

    #[test]
    fn involution_defect_examples() {
        let diag: Vec<TorusPoint> = (0..37).map(|i| TorusPoint::new(i as f64 / 37.3, i as f64 / 37.3)).collect();
        assert_eq!(involution_defect(&empirical_measure(&diag, 16, 3).unwrap()), 0.0);
        let off = empirical_measure(&[TorusPoint::new(0.0, 0.5)], 16, 3).unwrap();
        assert!((involution_defect(&off) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn fourier_sums_are_reproducible() {
        let pts = uniform_points(3, 50_000);
        let a = empirical_measure(&pts, 64, 3).unwrap();
        let b = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| empirical_measure(&pts, 64, 3).unwrap());
        assert_eq!(a, b);
        assert!((a.total_mass() - 1.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn conjugate_symmetry(seed in 0u64..1000, n in 1usize..300) {
            let m = empirical_measure(&uniform_points(seed, n), 8, 3).unwrap();
            for a in -3i64..=3 {
                for b in -3i64..=3 {
                    prop_assert_eq!(m.coef(-a, -b), m.coef(a, b).conj());
                }
            }
            prop_assert_eq!(m.coef(0, 0), Complex64::new(1.0, 0.0));
            prop_assert!((m.total_mass() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn distance_is_symmetric(s1 in 0u64..100, s2 in 0u64..100) {
            let a = empirical_measure(&uniform_points(s1, 50), 8, 2).unwrap();
            let b = empirical_measure(&uniform_points(s2, 70), 8, 2).unwrap();
            prop_assert_eq!(measure_distance(&a, &b).unwrap(), measure_distance(&b, &a).unwrap());
        }

        #[test]
        fn nearest_index_matches_brute_force(seed in 0u64..500, n in 1usize..200) {
            let pts = uniform_points(seed, n);
            let idx = NearestIndex::new(&pts);
            for q in uniform_points(seed + 10_000, 50) {
                let brute = pts.iter().map(|&p| torus_dist(p, q)).fold(f64::INFINITY, f64::min);
                prop_assert_eq!(idx.nearest(q), brute);
            }
        }
    }

    #[test]
    fn covering_radius_examples() {
        let (ok, r) = density_check(&[TorusPoint::ORIGIN], 0.8).unwrap();
        assert!(ok);
        assert!((r - SQRT_2 / 2.0).abs() < 1e-12);
        let four: Vec<TorusPoint> = [(0.0, 0.0), (0.0, 0.5), (0.5, 0.0), (0.5, 0.5)]
            .iter()
            .map(|&(x, y)| TorusPoint::new(x, y))
            .collect();
        let (ok, r) = density_check(&four, 0.3).unwrap();
        assert!(!ok);
        assert!((r - SQRT_2 / 4.0).abs() < 1e-12);
        assert!(density_check(&[], 0.1).is_err());
        assert!(density_check(&four, 0.0).is_err());
    }

    #[test]
    fn young_examples() {
        assert_eq!(young_dimension(1.0, 1.0, -1.0).unwrap().dim, 2.0);
        let l = 20f64.ln();
        assert!((young_dimension(l, l, -l).unwrap().dim - 2.0).abs() < 1e-15);
        let d = young_dimension(2.99, 3.2, -3.2).unwrap();
        assert!((d.dim - 1.87).abs() < 0.005);
        assert!(matches!(young_dimension(3.5, 3.2, -3.2), Err(Error::InconsistentInputs(_))));
        assert!(matches!(young_dimension(1.0, -1.0, -1.0), Err(Error::InvalidInput(_))));
        assert!(matches!(young_dimension(0.0, 1.0, -1.0), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn box_counting_examples() {
        let g = 64;
        let grid: Vec<TorusPoint> = (0..g * g)
            .map(|i| TorusPoint::new(((i / g) as f64 + 0.5) / g as f64, ((i % g) as f64 + 0.5) / g as f64))
            .collect();
        let scales = [0.5, 0.25, 0.125, 1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0];
        assert!((box_counting(&grid, &scales).unwrap() - 2.0).abs() < 1e-12);
        let diag: Vec<TorusPoint> = (0..4096).map(|i| {
            let t = (i as f64 + 0.5) / 4096.0;
            TorusPoint::new(t, t)
        }).collect();
        assert!((box_counting(&diag, &scales).unwrap() - 1.0).abs() < 1e-12);
        assert!(matches!(box_counting(&diag, &[0.5]), Err(Error::InsufficientData(_))));
        assert!(box_counting(&diag, &[0.5, 0.0]).is_err());
    }
}
