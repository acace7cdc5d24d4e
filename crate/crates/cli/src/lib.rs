//! `stdmap` command-line driver.
//!
//! Every subcommand writes one document (JSON by default, CSV where the
//! output is a table) to standard output or `--out`. Failures produce
//! `{"error": <kind>, "message": <text>}` on standard error and a nonzero
//! exit code: 2 for usage errors, 3 for numerical failures, 4 when a
//! manifold computation was truncated and the answer is inconclusive.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use stdmap_core::cocycle::{lyapunov, pliss_times};
use stdmap_core::cones::{audit_cone_lemma, boundary_gap, classify_region, ConeLemma};
use stdmap_core::manifolds::{
    grow_curve, homoclinically_related_with, seed_local_manifold, GrowthConfig, ManifoldSide, Verdict,
};
use stdmap_core::periodic::{
    audit_database, cache_file_name, default_grid_res, filter_rho_hyperbolic, find_periodic_with, PeriodicDatabase,
};
use stdmap_core::sampling::uniform_points;
use stdmap_core::statistics::{
    density_check, entropy_fit, involution_defect, mean_lambda, measure_distance, measure_of_atoms, young_dimension,
    DEFAULT_GRID, DEFAULT_MAX_FREQ,
};
use stdmap_core::{Params, StandardMap, TimeDirection, TorusPoint};

pub mod config;

use config::{Format, Layer, RunConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;
pub const EXIT_INCONCLUSIVE: i32 = 4;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(stdmap_core::Error),
    Io(String),
}

impl From<stdmap_core::Error> for CliError {
    fn from(e: stdmap_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn code(&self) -> i32 {
        use stdmap_core::Error as E;
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Core(E::InvalidParameter(_) | E::InvalidInput(_)) => EXIT_USAGE,
            CliError::Core(_) | CliError::Io(_) => EXIT_NUMERIC,
        }
    }

    fn document(&self) -> String {
        let (kind, message) = match self {
            CliError::Usage(m) => ("usage", m.clone()),
            CliError::Core(e) => (e.kind(), e.to_string()),
            CliError::Io(m) => ("io", m.clone()),
        };
        format!("{}\n", json!({ "error": kind, "message": message }))
    }
}

/// Captured result of one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Parser, Debug)]
#[command(name = "stdmap", version, about = "Numerical experiments with the standard map family")]
struct Cli {
    #[command(flatten)]
    common: CommonArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct CommonArgs {
    /// Coupling constant.
    #[arg(long, global = true, allow_negative_numbers = true)]
    k: Option<f64>,
    /// Period, or number of iterates for `orbit`.
    #[arg(long, global = true)]
    n: Option<usize>,
    #[arg(long = "n-max", global = true)]
    n_max: Option<usize>,
    /// Hyperbolicity threshold for periodic points.
    #[arg(long, global = true)]
    rho: Option<f64>,
    /// Seeds per axis for the periodic census.
    #[arg(long, global = true)]
    grid: Option<usize>,
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long = "tol-newton", global = true)]
    tol_newton: Option<f64>,
    #[arg(long = "tol-dedup", global = true)]
    tol_dedup: Option<f64>,
    #[arg(long = "cache-dir", global = true)]
    cache_dir: Option<PathBuf>,
    /// Write the output here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Flat `key = value` file; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

impl CommonArgs {
    fn layer(&self) -> Layer {
        Layer {
            k: self.k,
            n: self.n,
            n_max: self.n_max,
            rho: self.rho,
            grid: self.grid,
            threads: self.threads,
            seed: self.seed,
            tol_newton: self.tol_newton,
            tol_dedup: self.tol_dedup,
            cache_dir: self.cache_dir.clone(),
            format: self.format,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SideArg {
    Stable,
    Unstable,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum LemmaArg {
    Invariance,
    Expansion,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Iterate a point.
    Orbit {
        #[arg(long, allow_negative_numbers = true)]
        x: f64,
        #[arg(long, allow_negative_numbers = true)]
        y: f64,
        #[arg(long)]
        backward: bool,
    },
    /// Largest Lyapunov exponent along one orbit or the median over random orbits.
    Lyapunov {
        #[arg(long, allow_negative_numbers = true, requires = "y")]
        x: Option<f64>,
        #[arg(long, allow_negative_numbers = true, requires = "x")]
        y: Option<f64>,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 100_000)]
        horizon: usize,
    },
    /// Pliss times of a finite sequence.
    Pliss {
        /// Comma-separated values.
        #[arg(long, allow_hyphen_values = true, conflicts_with = "input")]
        values: Option<String>,
        /// File with whitespace-separated values.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, allow_negative_numbers = true)]
        alpha1: f64,
        #[arg(long, allow_negative_numbers = true)]
        alpha2: f64,
        #[arg(long)]
        eps: f64,
    },
    /// Critical-region label of a point.
    Regions {
        #[arg(long, allow_negative_numbers = true)]
        x: f64,
        #[arg(long, allow_negative_numbers = true)]
        y: f64,
    },
    /// Monte Carlo audit of the cone estimates on G₂.
    ConeAudit {
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
        #[arg(long, value_enum)]
        lemma: Option<LemmaArg>,
    },
    /// Newton census of Fix(f^n).
    Periodic,
    /// Growth rate of the number of rho-hyperbolic periodic points.
    Entropy,
    /// Empirical measure of rho-hyperbolic points of period n.
    Mme {
        #[arg(long = "max-freq", default_value_t = DEFAULT_MAX_FREQ)]
        max_freq: usize,
        #[arg(long = "hist", default_value_t = DEFAULT_GRID)]
        hist: usize,
        /// Also report the distance to the measure of this period.
        #[arg(long)]
        compare: Option<usize>,
    },
    /// Covering radius of rho-hyperbolic points of period n.
    Density {
        /// Defaults to 8 k^(-1/3).
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Young's dimension formula, from given values or from a census.
    Dimension {
        #[arg(long, allow_negative_numbers = true)]
        h: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        lp: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        lm: Option<f64>,
    },
    /// Grow a local stable or unstable curve.
    Manifold {
        #[arg(long, allow_negative_numbers = true)]
        x: f64,
        #[arg(long, allow_negative_numbers = true)]
        y: f64,
        #[arg(long, value_enum, default_value = "unstable")]
        side: SideArg,
        #[arg(long = "max-iter", default_value_t = 16)]
        max_iter: usize,
        #[arg(long, default_value_t = 4.0)]
        target: f64,
    },
    /// Test whether two points are homoclinically related.
    Homoclinic {
        #[arg(long, allow_negative_numbers = true)]
        px: f64,
        #[arg(long, allow_negative_numbers = true)]
        py: f64,
        #[arg(long, allow_negative_numbers = true)]
        qx: f64,
        #[arg(long, allow_negative_numbers = true)]
        qy: f64,
        #[arg(long = "max-iter", default_value_t = 16)]
        max_iter: usize,
    },
    /// Census, entropy, measure, symmetry, density and dimension in one document.
    Report,
}

/// Parse `args` (program name first) and run the subcommand.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Outcome {
                    code: EXIT_OK,
                    stdout: e.to_string(),
                    stderr: String::new(),
                },
                _ => Outcome {
                    code: EXIT_USAGE,
                    stdout: String::new(),
                    stderr: CliError::Usage(e.to_string().trim().to_string()).document(),
                },
            };
        }
    };
    match execute(&cli) {
        Ok((text, code)) => {
            if let Some(path) = &cli.common.out {
                if let Err(e) = std::fs::write(path, &text) {
                    let err = CliError::Io(format!("writing {}: {e}", path.display()));
                    return Outcome {
                        code: err.code(),
                        stdout: String::new(),
                        stderr: err.document(),
                    };
                }
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: String::new(),
                }
            } else {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            }
        }
        Err(e) => Outcome {
            code: e.code(),
            stdout: String::new(),
            stderr: e.document(),
        },
    }
}

fn execute(cli: &Cli) -> Result<(String, i32), CliError> {
    let file = match &cli.common.config {
        Some(p) => Layer::parse_file(p)?,
        None => Layer::default(),
    };
    let cfg = RunConfig::resolve(cli.common.layer().over(file))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| CliError::Io(format!("thread pool: {e}")))?;
    pool.install(|| dispatch(&cli.command, &cfg))
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("output serialises");
    s.push('\n');
    s
}

fn ok_json<T: Serialize>(v: &T) -> Result<(String, i32), CliError> {
    Ok((to_json(v), EXIT_OK))
}

fn csv_unsupported(what: &str) -> CliError {
    CliError::Usage(format!("{what} has no CSV form; use --format json"))
}

fn params(cfg: &RunConfig) -> Result<Params, CliError> {
    Ok(Params::derive(cfg.k)?)
}

fn dispatch(cmd: &Command, cfg: &RunConfig) -> Result<(String, i32), CliError> {
    let csv = cfg.out_format == Format::Csv;
    match cmd {
        Command::Orbit { x, y, backward } => {
            let map = StandardMap::new(cfg.k)?;
            let dir = if *backward { TimeDirection::Backward } else { TimeDirection::Forward };
            let mut p = TorusPoint::new(*x, *y);
            let mut pts = vec![p];
            for _ in 0..cfg.n {
                p = map.step(p, dir);
                pts.push(p);
            }
            if csv {
                let mut out = String::from("i,x,y\n");
                for (i, q) in pts.iter().enumerate() {
                    writeln!(out, "{i},{},{}", q.x, q.y).unwrap();
                }
                Ok((out, EXIT_OK))
            } else {
                ok_json(&json!({ "k": cfg.k, "backward": backward, "points": pts }))
            }
        }
        Command::Lyapunov { x, y, samples, horizon } => {
            let map = StandardMap::new(cfg.k)?;
            let starts = match (x, y) {
                (Some(x), Some(y)) => vec![TorusPoint::new(*x, *y)],
                _ => uniform_points(cfg.seed, *samples),
            };
            let est: Vec<f64> = starts
                .par_iter()
                .map(|&p| lyapunov(&map, p, *horizon).map(|e| e.lambda_plus))
                .collect::<Result<_, _>>()?;
            let mut sorted = est.clone();
            sorted.sort_by(f64::total_cmp);
            let m = sorted.len();
            let median = if m % 2 == 1 { sorted[m / 2] } else { 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]) };
            if csv {
                let mut out = String::from("i,x,y,lambda_plus\n");
                for (i, (p, l)) in starts.iter().zip(&est).enumerate() {
                    writeln!(out, "{i},{},{},{l}", p.x, p.y).unwrap();
                }
                return Ok((out, EXIT_OK));
            }
            ok_json(&json!({
                "k": cfg.k,
                "horizon": horizon,
                "seed": cfg.seed,
                "orbits": m,
                "median_lambda_plus": median,
                "analytic_log_pi_k": (std::f64::consts::PI * cfg.k).ln(),
                "lambda_plus": est,
            }))
        }
        Command::Pliss { values, input, alpha1, alpha2, eps } => {
            let text = match (values, input) {
                (Some(v), _) => v.replace(',', " "),
                (None, Some(path)) => std::fs::read_to_string(path)
                    .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?,
                (None, None) => return Err(CliError::Usage("pliss needs --values or --input".into())),
            };
            let seq: Vec<f64> = text
                .split_whitespace()
                .map(|t| t.parse::<f64>().map_err(|_| CliError::Usage(format!("not a number: {t:?}"))))
                .collect::<Result<_, _>>()?;
            let out = pliss_times(&seq, *alpha1, *alpha2, *eps)?;
            if csv {
                return Err(csv_unsupported("pliss"));
            }
            ok_json(&json!({
                "len": seq.len(),
                "times": out.times,
                "density": out.density(seq.len()),
                "density_lower_bound": out.density_lower_bound,
            }))
        }
        Command::Regions { x, y } => {
            if csv {
                return Err(csv_unsupported("regions"));
            }
            let p = params(cfg)?;
            let pt = TorusPoint::new(*x, *y);
            ok_json(&json!({
                "k": cfg.k,
                "point": pt,
                "label": classify_region(&p, pt),
                "boundary_gap": boundary_gap(&p),
            }))
        }
        Command::ConeAudit { samples, lemma } => {
            if csv {
                return Err(csv_unsupported("cone-audit"));
            }
            let p = params(cfg)?;
            let lemmas = match lemma {
                Some(LemmaArg::Invariance) => vec![ConeLemma::Invariance],
                Some(LemmaArg::Expansion) => vec![ConeLemma::Expansion],
                None => vec![ConeLemma::Invariance, ConeLemma::Expansion],
            };
            let reports: Vec<_> = lemmas
                .into_iter()
                .flat_map(|l| [(l, TimeDirection::Forward), (l, TimeDirection::Backward)])
                .map(|(l, d)| audit_cone_lemma(&p, l, d, *samples, cfg.seed))
                .collect();
            ok_json(&json!({ "k": cfg.k, "seed": cfg.seed, "audits": reports }))
        }
        Command::Periodic => {
            let mut db = census(cfg, cfg.n)?;
            if let Some(rho) = cfg.rho_set {
                db = filter_rho_hyperbolic(&db, rho);
            }
            if csv {
                let mut out = String::from("x,y,trace,lambda,kind\n");
                for p in &db.points {
                    let kind = serde_json::to_value(p.stability_kind).unwrap();
                    writeln!(out, "{},{},{},{},{}", p.point.x, p.point.y, p.trace, p.lambda, kind.as_str().unwrap()).unwrap();
                }
                Ok((out, EXIT_OK))
            } else {
                Ok((db.to_json() + "\n", EXIT_OK))
            }
        }
        Command::Entropy => {
            if csv {
                return Err(csv_unsupported("entropy"));
            }
            let (counts, _) = rho_counts(cfg)?;
            let fit = entropy_fit(&counts)?;
            ok_json(&json!({ "k": cfg.k, "rho": cfg.rho(), "fit": fit }))
        }
        Command::Mme { max_freq, hist, compare } => {
            let db = filter_rho_hyperbolic(&census(cfg, cfg.n)?, cfg.rho());
            let m = measure_of_atoms(&db.points, *hist, *max_freq)?;
            if csv {
                return Ok((m.grid_csv(), EXIT_OK));
            }
            let distance = match compare {
                Some(n2) => {
                    let other = filter_rho_hyperbolic(&census(cfg, *n2)?, cfg.rho());
                    let m2 = measure_of_atoms(&other.points, *hist, *max_freq)?;
                    Some(measure_distance(&m, &m2)?)
                }
                None => None,
            };
            let coefficients: Value = serde_json::from_str(&m.coefficients_json()).expect("valid json");
            ok_json(&json!({
                "k": cfg.k,
                "n": cfg.n,
                "rho": cfg.rho(),
                "atoms": m.atom_count,
                "involution_defect": involution_defect(&m),
                "compare_n": compare,
                "distance": distance,
                "coefficients": coefficients,
            }))
        }
        Command::Density { epsilon } => {
            if csv {
                return Err(csv_unsupported("density"));
            }
            let eps = epsilon.unwrap_or(8.0 * cfg.k.powf(-1.0 / 3.0));
            let db = filter_rho_hyperbolic(&census(cfg, cfg.n)?, cfg.rho());
            let (dense, radius) = density_check(&db.points_only(), eps)?;
            ok_json(&json!({
                "k": cfg.k,
                "n": cfg.n,
                "rho": cfg.rho(),
                "points": db.len(),
                "epsilon": eps,
                "covering_radius": radius,
                "dense": dense,
            }))
        }
        Command::Dimension { h, lp, lm } => {
            if csv {
                return Err(csv_unsupported("dimension"));
            }
            let est = match (h, lp, lm) {
                (Some(h), Some(lp), Some(lm)) => young_dimension(*h, *lp, *lm)?,
                (None, None, None) => {
                    let (counts, top) = rho_counts(cfg)?;
                    let fit = entropy_fit(&counts)?;
                    let lam = mean_lambda(&top.points)?;
                    young_dimension(fit.slope, lam, -lam)?
                }
                _ => return Err(CliError::Usage("give all of --h, --lp, --lm or none of them".into())),
            };
            ok_json(&est)
        }
        Command::Manifold { x, y, side, max_iter, target } => {
            let p = params(cfg)?;
            let side = match side {
                SideArg::Stable => ManifoldSide::Stable,
                SideArg::Unstable => ManifoldSide::Unstable,
            };
            let seed = seed_local_manifold(&p, TorusPoint::new(*x, *y), side)?;
            let (curve, report) = grow_curve(&p, &seed, side.growth_direction(), *max_iter, *target)?;
            let code = if report.truncated { EXIT_INCONCLUSIVE } else { EXIT_OK };
            if csv {
                return Ok((curve.to_csv(), code));
            }
            Ok((to_json(&json!({ "k": cfg.k, "side": side, "vertices": curve.len(), "report": report })), code))
        }
        Command::Homoclinic { px, py, qx, qy, max_iter } => {
            if csv {
                return Err(csv_unsupported("homoclinic"));
            }
            let p = params(cfg)?;
            let r = homoclinically_related_with(
                &p,
                TorusPoint::new(*px, *py),
                TorusPoint::new(*qx, *qy),
                *max_iter,
                &GrowthConfig::default(),
            )?;
            let min_angle = r.witnesses().map(|w| w.angle).fold(f64::INFINITY, f64::min);
            let code = if r.verdict == Verdict::Inconclusive { EXIT_INCONCLUSIVE } else { EXIT_OK };
            Ok((
                to_json(&json!({
                    "k": cfg.k,
                    "verdict": r.verdict,
                    "related": r.related(),
                    "angle_min": r.angle_min,
                    "witnesses_pq": r.witnesses_pq.len(),
                    "witnesses_qp": r.witnesses_qp.len(),
                    "min_witness_angle": min_angle.is_finite().then_some(min_angle),
                    "result": r,
                })),
                code,
            ))
        }
        Command::Report => {
            if csv {
                return Err(csv_unsupported("report"));
            }
            report(cfg)
        }
    }
}

/// Census of `Fix(f^n)`, through the cache when `--cache-dir` is set.
fn census(cfg: &RunConfig, n: usize) -> Result<PeriodicDatabase, CliError> {
    if n == 0 {
        return Err(CliError::Usage("period must be >= 1".into()));
    }
    let map = StandardMap::new(cfg.k)?;
    let grid = cfg.grid_res.unwrap_or_else(|| default_grid_res(cfg.k, n));
    let ccfg = cfg.census();
    let path = cfg.cache_dir.as_ref().map(|d| d.join(cache_file_name(cfg.k, n)));
    if let Some(path) = &path {
        if path.exists() {
            let db = PeriodicDatabase::load(path)
                .map_err(|e| CliError::Io(format!("unreadable cache {}: {e}", path.display())))?;
            if db.matches(cfg.k, n, grid, &ccfg) {
                return Ok(db);
            }
        }
    }
    let db = find_periodic_with(&map, n, grid, &ccfg)?;
    if let Some(path) = &path {
        store(path, &db)?;
    }
    Ok(db)
}

fn store(path: &Path, db: &PeriodicDatabase) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("creating {}: {e}", dir.display())))?;
    }
    db.save(path)
        .map_err(|e| CliError::Io(format!("writing cache {}: {e}", path.display())))
}

/// `(n, #Per^ρ_n)` for `n = 1..=n_max` and the filtered top-period database.
fn rho_counts(cfg: &RunConfig) -> Result<(Vec<(usize, usize)>, PeriodicDatabase), CliError> {
    if cfg.n_max < 2 {
        return Err(CliError::Usage("n-max must be >= 2".into()));
    }
    let mut counts = Vec::new();
    let mut top = None;
    for n in 1..=cfg.n_max {
        let db = filter_rho_hyperbolic(&census(cfg, n)?, cfg.rho());
        counts.push((n, db.len()));
        top = Some(db);
    }
    Ok((counts, top.expect("n_max >= 2")))
}

fn report(cfg: &RunConfig) -> Result<(String, i32), CliError> {
    if cfg.n_max < 2 {
        return Err(CliError::Usage("n-max must be >= 2".into()));
    }
    let rho = cfg.rho();
    let mut per_n = Vec::new();
    let mut filtered = Vec::new();
    for n in 1..=cfg.n_max {
        let db = census(cfg, n)?;
        let audit = audit_database(&db);
        let f = filter_rho_hyperbolic(&db, rho);
        per_n.push(json!({
            "n": n,
            "grid_res": db.grid_res,
            "fix_count": db.len(),
            "rho_count": f.len(),
            "audit": audit,
        }));
        filtered.push(f);
    }
    let counts: Vec<(usize, usize)> = filtered.iter().enumerate().map(|(i, d)| (i + 1, d.len())).collect();
    let fit = entropy_fit(&counts)?;
    let top = filtered.last().expect("n_max >= 2");
    let prev = &filtered[filtered.len() - 2];
    let m_top = measure_of_atoms(&top.points, DEFAULT_GRID, DEFAULT_MAX_FREQ)?;
    let m_prev = measure_of_atoms(&prev.points, DEFAULT_GRID, DEFAULT_MAX_FREQ)?;
    let eps = 8.0 * cfg.k.powf(-1.0 / 3.0);
    let (dense, radius) = density_check(&top.points_only(), eps)?;
    let lam = mean_lambda(&top.points)?;
    let dimension = match young_dimension(fit.slope, lam, -lam) {
        Ok(d) => json!({ "ok": true, "estimate": d }),
        Err(e) => json!({ "ok": false, "error": e.kind(), "message": e.to_string() }),
    };
    ok_json(&json!({
        "k": cfg.k,
        "rho": rho,
        "n_max": cfg.n_max,
        "newton_tol": cfg.newton_tol,
        "dedup_tol": cfg.dedup_tol,
        "periodic": per_n,
        "entropy": fit,
        "mme": {
            "n": cfg.n_max,
            "max_freq": DEFAULT_MAX_FREQ,
            "distance_to_previous_period": measure_distance(&m_prev, &m_top)?,
            "involution_defect": involution_defect(&m_top),
        },
        "density": { "n": cfg.n_max, "epsilon": eps, "covering_radius": radius, "dense": dense },
        "dimension": dimension,
    }))
}
