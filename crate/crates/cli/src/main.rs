mod input;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use geomatch::bottleneck::{bottleneck_search_many, decide_many, pd_bottleneck_matching};
use geomatch::cover::{box_cover, trivial_cover, BicliqueCover};
use geomatch::{
    max_matching_explicit, max_matching_implicit_traced, Error, Metric, Point, Range, Rational, Result, Scalar,
    SupplyDemand,
};
use input::Rows;
use serde_json::{json, Value};

/// Geometric many-to-many matching, bottleneck distances and persistence
/// diagram distances over compact biclique covers.
#[derive(Parser)]
#[command(name = "geomatch", version)]
struct Cli {
    /// Arithmetic; defaults to rational for n <= 1000 and float above.
    #[arg(long, global = true, value_enum)]
    numeric: Option<Numeric>,
    /// Seed for randomized pivot selection.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Numeric {
    Rational,
    Float,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Shape {
    Box,
    Disk,
    Trivial,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Integral,
    Real,
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricArg {
    Linf,
    L1,
    L2,
}

impl From<MetricArg> for Metric {
    fn from(m: MetricArg) -> Self {
        match m {
            MetricArg::Linf => Metric::Linf,
            MetricArg::L1 => Metric::L1,
            MetricArg::L2 => Metric::L2,
        }
    }
}

#[derive(clap::Args)]
struct Instance {
    /// Points CSV: x,y[,...coords][,supply]
    #[arg(long)]
    points: PathBuf,
    /// Ranges CSV: box,lo...,hi...[,demand] or disk,cx,cy,radius[,demand]
    #[arg(long)]
    ranges: PathBuf,
    /// Point dimension; defaults to the dimension of the first box, else 2.
    #[arg(long)]
    dim: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Build a biclique cover and report its size.
    Cover {
        #[command(flatten)]
        instance: Instance,
        /// Defaults to box when every range is a box, trivial otherwise.
        #[arg(long, value_enum)]
        shape: Option<Shape>,
        /// Write the cover in text form to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Maximum many-to-many matching.
    Match {
        #[command(flatten)]
        instance: Instance,
        #[arg(long, value_enum, default_value = "real")]
        mode: Mode,
        /// Use this cover file instead of building one.
        #[arg(long)]
        cover: Option<PathBuf>,
        /// Include the per-phase trace (real mode).
        #[arg(long)]
        trace: bool,
    },
    /// Bottleneck distance between two planar point sets.
    Bottleneck {
        /// Points CSV: x,y[,supply]
        #[arg(long)]
        red: PathBuf,
        /// Points CSV: x,y[,demand]
        #[arg(long)]
        blue: PathBuf,
        #[arg(long, value_enum, default_value = "linf")]
        metric: MetricArg,
        /// Only decide whether a matching within this distance exists.
        #[arg(long)]
        lambda: Option<String>,
    },
    /// Bottleneck distance between two persistence diagrams.
    Pd {
        /// Diagram CSV: birth,death
        dgm1: PathBuf,
        dgm2: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(v) => {
            println!("{}", serde_json::to_string_pretty(&v).expect("json values serialize"));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_input_error() { 2 } else { 3 })
        }
    }
}

const RATIONAL_LIMIT: usize = 1000;

fn run(cli: &Cli) -> Result<Value> {
    let files: Vec<&Path> = match &cli.command {
        Command::Cover { instance, .. } | Command::Match { instance, .. } => vec![&instance.points, &instance.ranges],
        Command::Bottleneck { red, blue, .. } => vec![red, blue],
        Command::Pd { dgm1, dgm2 } => vec![dgm1, dgm2],
    };
    let rows = files.iter().map(|p| Rows::read(p)).collect::<Result<Vec<_>>>()?;
    let n: usize = rows.iter().map(Rows::len).sum();
    let numeric = cli.numeric.unwrap_or(if n <= RATIONAL_LIMIT { Numeric::Rational } else { Numeric::Float });
    let (mut out, name) = match numeric {
        Numeric::Rational => (dispatch::<Rational>(cli, &rows)?, "rational"),
        Numeric::Float => (dispatch::<f64>(cli, &rows)?, "float"),
    };
    out["numeric"] = json!(name);
    Ok(out)
}

fn dispatch<S: Scalar>(cli: &Cli, rows: &[Rows]) -> Result<Value> {
    match &cli.command {
        Command::Cover { instance, shape, out } => cmd_cover::<S>(instance, &rows[0], &rows[1], *shape, out.as_deref()),
        Command::Match { instance, mode, cover, trace } => {
            cmd_match::<S>(instance, &rows[0], &rows[1], *mode, cover.as_deref(), *trace)
        }
        Command::Bottleneck { metric, lambda, .. } => {
            cmd_bottleneck::<S>(&rows[0], &rows[1], (*metric).into(), lambda.as_deref(), cli.seed)
        }
        Command::Pd { .. } => cmd_pd::<S>(&rows[0], &rows[1], cli.seed),
    }
}

struct Loaded<S> {
    points: Vec<Point<S>>,
    ranges: Vec<Range<S>>,
    sd: SupplyDemand<S>,
}

fn load<S: Scalar>(instance: &Instance, points: &Rows, ranges: &Rows) -> Result<Loaded<S>> {
    let dim = instance.dim.or_else(|| ranges.box_dim()).unwrap_or(2);
    let (points, supplies) = input::points(points, dim)?;
    let (ranges, demands) = input::ranges(ranges, dim)?;
    Ok(Loaded { points, ranges, sd: SupplyDemand::new(supplies, demands)? })
}

fn build_cover<S: Scalar>(points: &[Point<S>], ranges: &[Range<S>], shape: Option<Shape>) -> Result<BicliqueCover> {
    let all_boxes = ranges.iter().all(Range::is_box);
    match shape.unwrap_or(if all_boxes { Shape::Box } else { Shape::Trivial }) {
        Shape::Box => box_cover(points, ranges),
        Shape::Disk => {
            if ranges.iter().any(Range::is_box) {
                return Err(Error::InvalidInput("shape disk requires disk ranges".into()));
            }
            trivial_cover(points, ranges)
        }
        Shape::Trivial => trivial_cover(points, ranges),
    }
}

fn cmd_cover<S: Scalar>(instance: &Instance, p: &Rows, r: &Rows, shape: Option<Shape>, out: Option<&Path>) -> Result<Value> {
    let inst = load::<S>(instance, p, r)?;
    let c = build_cover(&inst.points, &inst.ranges, shape)?;
    if let Some(path) = out {
        std::fs::write(path, c.to_text())
            .map_err(|e| Error::InvalidInput(format!("cannot write {}: {e}", path.display())))?;
    }
    let n = inst.points.len() + inst.ranges.len();
    let log = (n as f64).log2();
    let normalized = (n >= 2).then(|| c.size() as f64 / (n as f64 * log * log));
    eprintln!("sigma={} parts={} n={n}", c.size(), c.num_parts());
    Ok(json!({
        "sigma": c.size(),
        "parts": c.num_parts(),
        "points": inst.points.len(),
        "ranges": inst.ranges.len(),
        "sigma_over_n_log2_sq": normalized,
    }))
}

fn cmd_match<S: Scalar>(
    instance: &Instance,
    p: &Rows,
    r: &Rows,
    mode: Mode,
    cover_file: Option<&Path>,
    trace: bool,
) -> Result<Value> {
    let inst = load::<S>(instance, p, r)?;
    let c = match cover_file {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
            BicliqueCover::from_text(&text, inst.points.len(), inst.ranges.len())?
        }
        None => build_cover(&inst.points, &inst.ranges, None)?,
    };
    let (m, phases) = match mode {
        Mode::Integral => {
            if !inst.sd.is_integral() {
                return Err(Error::InvalidInput("integral mode needs integral supplies and demands".into()));
            }
            (max_matching_explicit(&c, &inst.sd)?, None)
        }
        Mode::Real => {
            let (m, t) = max_matching_implicit_traced(&c, &inst.sd)?;
            (m, Some(t))
        }
    };
    m.check(&inst.points, &inst.ranges, &inst.sd).map_err(|e| Error::Internal(e.to_string()))?;
    let mut out = json!({
        "mode": if mode == Mode::Integral { "integral" } else { "real" },
        "value": m.value().to_json(),
        "target": inst.sd.target().to_json(),
        "triples": m.len(),
        "sigma": c.size(),
        "matching": m.to_json(),
    });
    if let (true, Some(phases)) = (trace, phases) {
        for ph in &phases {
            eprintln!("{ph}");
        }
        out["trace"] = phases
            .iter()
            .map(|ph| json!({ "t_level": ph.t_level, "pushed": ph.pushed.to_json(), "support": ph.support }))
            .collect();
    }
    Ok(out)
}

fn cmd_bottleneck<S: Scalar>(red: &Rows, blue: &Rows, metric: Metric, lambda: Option<&str>, seed: u64) -> Result<Value> {
    let (p, supplies) = input::points::<S>(red, 2)?;
    let (q, demands) = input::points::<S>(blue, 2)?;
    let sd = SupplyDemand::new(supplies, demands)?;
    let unit = sd.supplies().iter().chain(sd.demands()).all(|w| *w == S::one());
    if unit && p.len() != q.len() {
        return Err(Error::InvalidInput(format!("point sets differ in size: {} vs {}", p.len(), q.len())));
    }
    match lambda {
        Some(text) => {
            let l = S::parse_scalar(text).ok_or_else(|| Error::InvalidInput(format!("bad --lambda `{text}`")))?;
            let d = decide_many(&p, &q, &sd, metric, &l)?;
            Ok(json!({
                "metric": metric.name(),
                "lambda": l.to_json(),
                "feasible": d.feasible,
                "value": d.matching.value().to_json(),
                "matching": d.matching.to_json(),
            }))
        }
        None => Ok(bottleneck_search_many(&p, &q, &sd, metric, seed)?.to_json()),
    }
}

fn cmd_pd<S: Scalar>(a: &Rows, b: &Rows, seed: u64) -> Result<Value> {
    let x = input::diagram::<S>(a)?;
    let y = input::diagram::<S>(b)?;
    let (w, m) = pd_bottleneck_matching(&x, &y, seed)?;
    Ok(json!({ "w_inf": w.to_json(), "matching": m.to_json() }))
}
