//! Command-line driver: argument parsing, dispatch, and output formatting.
//!
//! Exit codes: 0 success, 1 a verification did not pass, 2 bad input or a
//! failed evaluation.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::cone::SimpleCone;
use crate::error::{Error, Result};
use crate::expr;
use crate::extrapolate::geometric_schedule;
use crate::lattice_sum::alpha_cone;
use crate::macdonald::{self, LimitConfig, LimitOrder, DEFAULT_TOLERANCE, ZERO_TOLERANCE};
use crate::oracle::{self, OracleMethod};
use crate::polytope::{read_polytope, vertex_simple_cones, vertex_tangent_cone, Polytope};
use crate::report::{complex_json, Report};
use crate::solid_angle::{
    default_ball_radius, solid_angle_exact_2d, solid_angle_exact_2d_l1, solid_angle_gaussian,
    solid_angle_mc, SolidAngleEstimate,
};
use crate::transforms::{ComplexPoint, DampedSumConfig, EpsSchedule};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "solidsum", version, about = "Solid-angle lattice sums over real polytopes")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

/// Options shared by every subcommand.
#[derive(Debug, Args)]
pub struct Common {
    /// Worker threads (falls back to SOLIDSUM_THREADS, then all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Write results here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, global = true)]
    pub format: Option<Format>,
    /// Norm exponent of the solid angles.
    #[arg(long, global = true, default_value_t = 2.0)]
    pub p: f64,
    /// Explicit eps schedule, comma separated and strictly decreasing.
    #[arg(long, global = true)]
    pub eps: Option<String>,
    #[arg(long, global = true, default_value_t = 0.5)]
    pub eps0: f64,
    /// Minimum number of eps levels.
    #[arg(long, global = true, default_value_t = 6)]
    pub levels: usize,
    /// Lattice truncation radius (sup norm); automatic when absent.
    #[arg(long, global = true)]
    pub radius: Option<usize>,
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Monte Carlo samples per solid angle.
    #[arg(long, global = true, default_value_t = 100_000)]
    pub samples: usize,
    /// Direction of approach for s -> 0, comma separated.
    #[arg(long, global = true)]
    pub direction: Option<String>,
    /// Sigma values for s -> 0, comma separated and strictly decreasing.
    #[arg(long, global = true)]
    pub sigma: Option<String>,
    #[arg(long, global = true)]
    pub fit_degree: Option<usize>,
    #[arg(long, value_enum, global = true, default_value_t = Order::EpsFirst)]
    pub limit_order: Order,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Order {
    EpsFirst,
    SigmaFirst,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AngleMethod {
    Auto,
    Exact,
    Mc,
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OracleKind {
    Auto,
    Exact,
    Mc,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solid angle of a cone at its apex.
    SolidAngle {
        #[arg(long)]
        polytope: Option<PathBuf>,
        /// Vertex of the polytope whose tangent cone is measured.
        #[arg(long)]
        vertex: Option<usize>,
        /// Cone generators as rows separated by ';', e.g. "1,0;0,1".
        #[arg(long)]
        generators: Option<String>,
        #[arg(long, value_enum, default_value_t = AngleMethod::Auto)]
        method: AngleMethod,
    },
    /// alpha(s) of a polytope (vertex cones vs lattice points) or of a cone.
    Alpha {
        #[arg(long)]
        polytope: Option<PathBuf>,
        #[arg(long)]
        generators: Option<String>,
        /// Apex of the cone given by --generators.
        #[arg(long)]
        apex: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        s: String,
    },
    /// A_P(t), or A_P(t, s) when --s is given.
    Macdonald {
        #[arg(long)]
        polytope: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        t: String,
        #[arg(long, allow_hyphen_values = true)]
        s: Option<String>,
    },
    /// A_P(t) over a list or range of dilations.
    MacdonaldSeries {
        #[arg(long)]
        polytope: PathBuf,
        /// Comma-separated dilations.
        #[arg(long, allow_hyphen_values = true)]
        t: Option<String>,
        /// start:stop:step, stop inclusive.
        #[arg(long, allow_hyphen_values = true)]
        t_range: Option<String>,
    },
    /// alpha_{v+K}(-s) = (-1)^d alpha_{-v+K}(s) for a simple cone.
    VerifyReciprocity {
        #[arg(long)]
        generators: String,
        /// Shift v (defaults to the origin).
        #[arg(long, allow_hyphen_values = true)]
        shift: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        s: String,
        /// Compare the damped sums at this single eps instead of extrapolating.
        #[arg(long)]
        at_eps: Option<f64>,
    },
    /// Lattice-point alpha_P(s) against the sum over vertex cones.
    VerifyBrion {
        #[arg(long)]
        polytope: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        s: String,
    },
    /// A_P(-t, s) = (-1)^d A_P(t, -s).
    VerifyMacdonald {
        #[arg(long)]
        polytope: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        t: String,
        #[arg(long, allow_hyphen_values = true)]
        s: String,
    },
    /// Signed tangent cones of all faces against the indicator of P.
    BrianchonGram {
        #[arg(long)]
        polytope: PathBuf,
        #[arg(long, default_value_t = 100)]
        points: usize,
    },
    /// A_P(0) = 0.
    Conjecture {
        #[arg(long)]
        polytope: PathBuf,
    },
    /// The sqrt(3) triangle: determinants, oracle comparison, limit ratios.
    TriangleExample {
        #[arg(long, allow_hyphen_values = true, default_value = "0.5,1.0,1.5")]
        t: String,
    },
    /// Brute-force A_P(t), or alpha_{tP}(s) when --s is given.
    Oracle {
        #[arg(long)]
        polytope: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        t: String,
        #[arg(long, allow_hyphen_values = true)]
        s: Option<String>,
        #[arg(long, value_enum, default_value_t = OracleKind::Auto)]
        method: OracleKind,
        /// Include the weight of every lattice point.
        #[arg(long)]
        weights: bool,
    },
}

/// What a subcommand produced.
enum Outcome {
    Data(Value),
    Check(Report),
    Csv(String),
}

/// Parses `argv` (program name first), runs, and writes to `out`/`err`.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = if code == EXIT_OK {
                write!(out, "{e}")
            } else {
                write!(err, "{e}")
            };
            return code;
        }
    };
    let threads = match thread_count(cli.common.threads) {
        Ok(n) => n,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_INPUT;
        }
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = match builder.build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: --threads: {e}");
            return EXIT_INPUT;
        }
    };
    let outcome = pool.install(|| execute(&cli));
    match outcome {
        Ok(outcome) => emit(&cli.common, outcome, out, err),
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INPUT
        }
    }
}

fn thread_count(flag: Option<usize>) -> Result<Option<usize>> {
    let n = match flag {
        Some(n) => Some(n),
        None => match std::env::var("SOLIDSUM_THREADS") {
            Ok(v) if !v.trim().is_empty() => Some(v.trim().parse::<usize>().map_err(|_| {
                Error::InvalidParameter(format!("SOLIDSUM_THREADS must be a positive integer, got {v:?}"))
            })?),
            _ => None,
        },
    };
    if n == Some(0) {
        return Err(Error::InvalidParameter("thread count (--threads or SOLIDSUM_THREADS) must be at least 1".into()));
    }
    Ok(n)
}

fn emit(common: &Common, outcome: Outcome, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let (text, code) = match outcome {
        Outcome::Data(v) => (pretty(&v), EXIT_OK),
        Outcome::Check(r) => {
            let code = if r.pass { EXIT_OK } else { EXIT_FAIL };
            (pretty(&r.to_json()), code)
        }
        Outcome::Csv(s) => (s, EXIT_OK),
    };
    let written = match &common.output {
        Some(path) => std::fs::write(path, &text).map_err(|e| format!("--output {}: {e}", path.display())),
        None => out.write_all(text.as_bytes()).map_err(|e| e.to_string()),
    };
    match written {
        Ok(()) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INPUT
        }
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

/// Same number formatting as the JSON output.
fn csv_row(e: &macdonald::LimitEstimate) -> String {
    let f = |x: f64| serde_json::to_string(&x).expect("finite floats serialize");
    format!("{},{},{}\n", f(e.t), f(e.value), f(e.error))
}

fn flag_err(flag: &str, e: Error) -> Error {
    Error::InvalidParameter(format!("--{flag}: {e}"))
}

/// Comma-separated reals; each item may be an expression such as `sqrt(2)`.
fn parse_reals(flag: &str, src: &str) -> Result<Vec<f64>> {
    src.split(',')
        .map(|part| expr::eval(part.trim()).map_err(|e| flag_err(flag, e)))
        .collect()
}

fn parse_real(flag: &str, src: &str) -> Result<f64> {
    let v = parse_reals(flag, src)?;
    match v.as_slice() {
        [x] => Ok(*x),
        _ => Err(Error::InvalidParameter(format!("--{flag} takes a single value, got {src:?}"))),
    }
}

fn parse_rows(flag: &str, src: &str) -> Result<Vec<Vec<f64>>> {
    src.split(';').map(|row| parse_reals(flag, row)).collect()
}

fn parse_point(flag: &str, src: &str) -> Result<ComplexPoint> {
    ComplexPoint::parse(src).map_err(|e| flag_err(flag, e))
}

fn parse_t_range(src: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = src.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::InvalidParameter(format!(
            "--t-range expects start:stop:step, got {src:?}"
        )));
    }
    let start = parse_real("t-range", parts[0])?;
    let stop = parse_real("t-range", parts[1])?;
    let step = parse_real("t-range", parts[2])?;
    if !(step > 0.0) || stop < start {
        return Err(Error::InvalidParameter(
            "--t-range needs step > 0 and stop >= start".into(),
        ));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|k| start + k as f64 * step).collect())
}

fn load(path: &PathBuf) -> Result<Polytope> {
    read_polytope(path).map_err(|e| Error::InvalidParameter(format!("--polytope {}: {e}", path.display())))
}

fn sum_config(c: &Common) -> Result<DampedSumConfig> {
    let mut cfg = DampedSumConfig::new(c.p).map_err(|e| flag_err("p", e))?;
    if !(c.eps0 > 0.0) {
        return Err(flag_err("eps0", Error::BadEpsilon(c.eps0)));
    }
    if c.levels < 2 {
        return Err(flag_err("levels", Error::ScheduleTooShort(c.levels)));
    }
    cfg.schedule = EpsSchedule::Adaptive {
        eps0: c.eps0,
        min_levels: c.levels,
    };
    if let Some(src) = &c.eps {
        cfg = cfg
            .with_schedule(parse_reals("eps", src)?)
            .map_err(|e| flag_err("eps", e))?;
    }
    if let Some(r) = c.radius {
        cfg = cfg.with_radius(r).map_err(|e| flag_err("radius", e))?;
    }
    Ok(cfg)
}

fn limit_config(c: &Common) -> Result<LimitConfig> {
    let mut lim = LimitConfig {
        seed: c.seed,
        fit_degree: c.fit_degree,
        order: match c.limit_order {
            Order::EpsFirst => LimitOrder::EpsThenSigma,
            Order::SigmaFirst => LimitOrder::SigmaThenEps,
        },
        ..Default::default()
    };
    if let Some(src) = &c.direction {
        lim.direction = Some(parse_reals("direction", src)?);
    }
    if let Some(src) = &c.sigma {
        let s = parse_reals("sigma", src)?;
        crate::extrapolate::validate_schedule(&s).map_err(|e| flag_err("sigma", e))?;
        lim.sigma_schedule = Some(s);
    }
    Ok(lim)
}

fn estimate_json(e: &SolidAngleEstimate) -> Value {
    json!({ "value": e.value, "std_error": e.std_error, "method": format!("{:?}", e.method) })
}

fn execute(cli: &Cli) -> Result<Outcome> {
    let c = &cli.common;
    let cfg = sum_config(c)?;
    let tolerance = c.tolerance.unwrap_or(DEFAULT_TOLERANCE);
    match &cli.command {
        Command::SolidAngle {
            polytope,
            vertex,
            generators,
            method,
        } => solid_angle_cmd(c, polytope.as_ref(), *vertex, generators.as_deref(), *method),
        Command::Alpha {
            polytope,
            generators,
            apex,
            s,
        } => {
            let s = parse_point("s", s)?;
            match (polytope, generators) {
                (Some(path), None) => {
                    let p = load(path)?;
                    let cones = macdonald::a_of_t_s(&p, 1.0, &s, &cfg)?;
                    let direct = oracle::alpha_oracle(&p, 1.0, &s, c.p, OracleMethod::Auto, c.samples, c.seed)?;
                    Ok(Outcome::Data(json!({
                        "s": s.0.iter().map(|&z| complex_json(z)).collect::<Vec<_>>(),
                        "cone_sum": cones.to_json(),
                        "lattice_sum": complex_json(direct.value),
                        "lattice_sum_std_error": direct.std_error,
                    })))
                }
                (None, Some(g)) => {
                    let gens = parse_rows("generators", g)?;
                    let d = gens.len();
                    let apex = match apex {
                        Some(a) => parse_reals("apex", a)?,
                        None => vec![0.0; d],
                    };
                    let k = SimpleCone::new(apex, gens)?;
                    let r = alpha_cone(&k, &s, &cfg)?;
                    Ok(Outcome::Data(json!({
                        "value": complex_json(r.value),
                        "error": r.error,
                        "eps_schedule": cfg.schedule_for(crate::lattice_sum::cone_gap(&k), d),
                    })))
                }
                _ => Err(Error::InvalidParameter(
                    "alpha needs exactly one of --polytope and --generators".into(),
                )),
            }
        }
        Command::Macdonald { polytope, t, s } => {
            let p = load(polytope)?;
            let t = parse_real("t", t)?;
            match s {
                Some(s) => {
                    let s = parse_point("s", s)?;
                    Ok(Outcome::Data(macdonald::a_of_t_s(&p, t, &s, &cfg)?.to_json()))
                }
                None => {
                    let est = macdonald::a_of_t(&p, t, &limit_config(c)?, &cfg)?;
                    if c.format == Some(Format::Csv) {
                        Ok(Outcome::Csv(format!("t,value,error\n{}", csv_row(&est))))
                    } else {
                        Ok(Outcome::Data(est.to_json()))
                    }
                }
            }
        }
        Command::MacdonaldSeries {
            polytope,
            t,
            t_range,
        } => {
            let p = load(polytope)?;
            let ts = match (t, t_range) {
                (Some(t), None) => parse_reals("t", t)?,
                (None, Some(r)) => parse_t_range(r)?,
                _ => {
                    return Err(Error::InvalidParameter(
                        "macdonald-series needs exactly one of --t and --t-range".into(),
                    ))
                }
            };
            let series = macdonald::a_of_t_series(&p, &ts, &limit_config(c)?, &cfg)?;
            if c.format == Some(Format::Json) {
                Ok(Outcome::Data(Value::Array(series.iter().map(|e| e.to_json()).collect())))
            } else {
                let mut csv = String::from("t,value,error\n");
                for e in &series {
                    csv.push_str(&csv_row(e));
                }
                Ok(Outcome::Csv(csv))
            }
        }
        Command::VerifyReciprocity {
            generators,
            shift,
            s,
            at_eps,
        } => {
            let gens = parse_rows("generators", generators)?;
            let d = gens.len();
            let v = match shift {
                Some(v) => parse_reals("shift", v)?,
                None => vec![0.0; d],
            };
            let s = parse_point("s", s)?;
            let k = SimpleCone::new(vec![0.0; d], gens)?;
            let report = match at_eps {
                Some(eps) => macdonald::verify_cone_reciprocity_at(&k, &v, &s, &cfg, *eps, c.tolerance.unwrap_or(1e-6))?,
                None => macdonald::verify_cone_reciprocity(&k, &v, &s, &cfg, c.tolerance.unwrap_or(1e-5))?,
            };
            Ok(Outcome::Check(report))
        }
        Command::VerifyBrion { polytope, s } => {
            let p = load(polytope)?;
            let s = parse_point("s", s)?;
            Ok(Outcome::Check(macdonald::verify_brion(&p, &s, &cfg, tolerance)?))
        }
        Command::VerifyMacdonald { polytope, t, s } => {
            let p = load(polytope)?;
            let t = parse_real("t", t)?;
            let s = parse_point("s", s)?;
            Ok(Outcome::Check(macdonald::verify_macdonald(&p, t, &s, &cfg, tolerance)?))
        }
        Command::BrianchonGram { polytope, points } => {
            let p = load(polytope)?;
            let (report, _) = macdonald::brianchon_gram_check(&p, *points, c.seed)?;
            Ok(Outcome::Check(report))
        }
        Command::Conjecture { polytope } => {
            let p = load(polytope)?;
            let tol = c.tolerance.unwrap_or(ZERO_TOLERANCE);
            Ok(Outcome::Check(macdonald::conjecture_check(&p, &cfg, &limit_config(c)?, tol)?))
        }
        Command::TriangleExample { t } => {
            let ts = parse_reals("t", t)?;
            Ok(Outcome::Check(macdonald::triangle_example(&ts, &cfg, &limit_config(c)?)?))
        }
        Command::Oracle {
            polytope,
            t,
            s,
            method,
            weights,
        } => {
            let p = load(polytope)?;
            let t = parse_real("t", t)?;
            let method = match method {
                OracleKind::Auto => OracleMethod::Auto,
                OracleKind::Exact => OracleMethod::Exact2D,
                OracleKind::Mc => OracleMethod::MC,
            };
            match s {
                Some(s) => {
                    let s = parse_point("s", s)?;
                    let r = oracle::alpha_oracle(&p, t, &s, c.p, method, c.samples, c.seed)?;
                    Ok(Outcome::Data(json!({
                        "t": t,
                        "value": complex_json(r.value),
                        "std_error": r.std_error,
                        "n_lattice_points": r.n_lattice_points,
                    })))
                }
                None => {
                    let mut r = oracle::a_t_oracle(&p, t, c.p, method, c.samples, c.seed)?;
                    if !weights {
                        r.per_point_weights = None;
                    }
                    let mut v = serde_json::to_value(&r)?;
                    if !weights {
                        v.as_object_mut().expect("object").remove("per_point_weights");
                    }
                    v["t"] = json!(t);
                    Ok(Outcome::Data(v))
                }
            }
        }
    }
}

fn solid_angle_cmd(
    c: &Common,
    polytope: Option<&PathBuf>,
    vertex: Option<usize>,
    generators: Option<&str>,
    method: AngleMethod,
) -> Result<Outcome> {
    let (apex, gens, body_radius) = match (polytope, generators) {
        (Some(path), None) => {
            let p = load(path)?;
            let i = vertex.ok_or_else(|| {
                Error::InvalidParameter("--polytope needs --vertex".into())
            })?;
            let cone = vertex_tangent_cone(&p, i)?;
            let r = default_ball_radius(&p, &cone.apex);
            (cone.apex.clone(), cone.generators.clone(), Some((p, i, r)))
        }
        (None, Some(g)) => {
            let gens = parse_rows("generators", g)?;
            (vec![0.0; gens.len()], gens, None)
        }
        _ => {
            return Err(Error::InvalidParameter(
                "solid-angle needs exactly one of --polytope and --generators".into(),
            ))
        }
    };
    let d = apex.len();
    let planar = d == 2 && gens.len() == 2 && (c.p == 1.0 || c.p == 2.0);
    let exact = || {
        if c.p == 2.0 {
            solid_angle_exact_2d(&gens)
        } else {
            solid_angle_exact_2d_l1(&gens)
        }
    };
    let estimate = match method {
        AngleMethod::Exact if !planar => {
            return Err(Error::UnsupportedCombination(
                "exact angles need a planar cone with two generators and p in {1, 2}".into(),
            ))
        }
        AngleMethod::Exact => exact()?,
        AngleMethod::Auto if planar => exact()?,
        AngleMethod::Auto | AngleMethod::Mc => {
            let cone = crate::cone::Cone::new(apex.clone(), gens.clone());
            // Rejects cones that are not pointed.
            cone.triangulate()?;
            match &body_radius {
                Some((p, _, r)) => solid_angle_mc(p, &apex, c.p, *r, c.samples, c.seed)?,
                None => solid_angle_mc(&cone, &apex, c.p, 1.0, c.samples, c.seed)?,
            }
        }
        AngleMethod::Gaussian => {
            let pieces = match &body_radius {
                Some((p, i, _)) => vertex_simple_cones(p, *i)?,
                None => crate::cone::triangulate_cone(&apex, &gens)?,
            };
            let schedule = match &c.eps {
                Some(src) => parse_reals("eps", src)?,
                None => geometric_schedule(c.eps0, c.levels),
            };
            let mut value = 0.0;
            let mut var = 0.0;
            for (j, k) in pieces.iter().enumerate() {
                let e = solid_angle_gaussian(k, &apex, c.p, &schedule, c.samples, c.seed.wrapping_add(j as u64))?;
                value += e.value;
                var += e.std_error * e.std_error;
            }
            SolidAngleEstimate {
                value,
                std_error: var.sqrt(),
                method: crate::solid_angle::Method::GaussianLimit,
            }
        }
    };
    let mut v = estimate_json(&estimate);
    v["apex"] = json!(apex);
    v["generators"] = json!(gens);
    v["p"] = json!(c.p);
    Ok(Outcome::Data(v))
}
