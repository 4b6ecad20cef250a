use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use jetcount::extremal::{sharpness_report, SharpFamilySpec};
use jetcount::fit::{cascade, min_degree_vanishing};
use jetcount::io::{
    count_csv_rows, curve_to_value, parse_arrangement_json, parse_curve_json, parse_point,
    FORMAT_VERSION,
};
use jetcount::lift::{jet_at, LiftSystem};
use jetcount::tangency::{bound_scan, count_tangencies, tangency_order_at, ArrangementGenerator};
use jetcount::{Error, ErrorClass, PlaneCurve, TangencyOrder};

/// Exact jet lifts, tangency counts and vanishing-polynomial fits for plane curves.
#[derive(Parser, Debug)]
#[command(name = "jetcount", version)]
struct Cli {
    /// Worker threads for parallel stages (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Suppress progress messages on stderr.
    #[arg(long, global = true)]
    quiet: bool,
    /// Output file. Without it, output goes to `<JETCOUNT_OUT_DIR>/<command>.json`
    /// when that variable is set, and to stdout otherwise.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, env = "JETCOUNT_OUT_DIR", hide_env_values = true, global = true)]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Implicit-differentiation generators f, P_1, ..., P_k of a curve.
    Lift(LiftArgs),
    /// The k-jet of a curve at a smooth non-vertical point.
    Jet(JetArgs),
    /// Tangency order of two curves at a common point.
    Tangency(TangencyArgs),
    /// Count higher-order tangencies in an arrangement.
    Count(CountArgs),
    /// Build the sharp family over F_p and report its tangency count.
    Sharp(SharpArgs),
    /// Minimal-degree polynomial vanishing on the lifts of an arrangement.
    Fit(FitArgs),
    /// Tangency totals over a range of arrangement sizes.
    BoundScan(BoundScanArgs),
}

#[derive(Args, Debug, Serialize)]
struct LiftArgs {
    /// Curve JSON file.
    #[arg(long)]
    curve: PathBuf,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    k: u32,
}

#[derive(Args, Debug, Serialize)]
struct JetArgs {
    #[arg(long)]
    curve: PathBuf,
    /// Base point as `x,y`, e.g. `0,1` or `1/2,-3`.
    #[arg(long, allow_hyphen_values = true)]
    point: String,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    k: u32,
}

#[derive(Args, Debug, Serialize)]
struct TangencyArgs {
    #[arg(long)]
    first: PathBuf,
    #[arg(long)]
    second: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    point: String,
    /// Largest order examined.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    kmax: u32,
}

#[derive(Args, Debug, Serialize)]
struct CountArgs {
    /// Arrangement JSON file.
    #[arg(long)]
    arrangement: PathBuf,
    /// Tangency order; defaults to the one stored in the file.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    k: Option<u32>,
    /// Also write the per-point table as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct SharpArgs {
    #[arg(long)]
    p: u64,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    k: u32,
    /// First seed of the 1/4-subsample trials.
    #[arg(long, default_value_t = 0)]
    subsample_seed: u64,
    /// Number of subsample trials (seeds `S, S+1, ...`).
    #[arg(long, default_value_t = 0)]
    trials: u64,
    /// Write the full family as an arrangement document, one curve at a time.
    #[arg(long)]
    emit_arrangement: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct FitArgs {
    #[arg(long)]
    arrangement: PathBuf,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    k: Option<u32>,
    /// Also run the descent through the jet variables.
    #[arg(long)]
    cascade: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum GeneratorKind {
    Sharp,
    Random,
    Parallel,
}

#[derive(Args, Debug, Serialize)]
struct BoundScanArgs {
    #[arg(long, value_enum, default_value_t = GeneratorKind::Sharp)]
    generator: GeneratorKind,
    /// Field size; optional for the sharp generator, required otherwise.
    #[arg(long)]
    p: Option<u64>,
    /// Degree bound for the random and parallel generators.
    #[arg(long, default_value_t = 3)]
    max_deg: u32,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    k: u32,
    /// Comma-separated arrangement sizes.
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also write the table as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Debug)]
enum Failure {
    Core(Error),
    Io(PathBuf, io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Core(e) => match e.class() {
                ErrorClass::Parse => 2,
                ErrorClass::Precondition => 3,
                ErrorClass::FieldCapacity => 4,
                ErrorClass::Internal => 5,
            },
            Failure::Io(..) => 3,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Core(e) => write!(f, "{e}"),
            Failure::Io(path, e) => write!(f, "{}: {e}", path.display()),
        }
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

fn read(path: &Path) -> Outcome<String> {
    fs::read_to_string(path).map_err(|e| Failure::Io(path.to_path_buf(), e))
}

fn read_curve(path: &Path) -> Outcome<PlaneCurve> {
    Ok(parse_curve_json(&read(path)?)?)
}

struct Sink {
    out: Option<PathBuf>,
    quiet: bool,
    threads: Option<usize>,
}

impl Sink {
    fn note(&self, msg: &str) {
        if !self.quiet {
            eprintln!("{msg}");
        }
    }

    fn create(&self, path: &Path) -> Outcome<BufWriter<fs::File>> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).map_err(|e| Failure::Io(dir.to_path_buf(), e))?;
        }
        fs::File::create(path)
            .map(BufWriter::new)
            .map_err(|e| Failure::Io(path.to_path_buf(), e))
    }

    /// Writes `{format_version, command, config, result}`.
    fn emit(&self, command: &str, config: &impl Serialize, result: Value) -> Outcome<()> {
        let mut config = to_value(config);
        config["threads"] = to_value(self.threads);
        let doc = json!({
            "format_version": FORMAT_VERSION,
            "command": command,
            "config": config,
            "result": result,
        });
        let text = serde_json::to_string_pretty(&doc).expect("serializable output") + "\n";
        match &self.out {
            Some(path) => {
                let mut w = self.create(path)?;
                w.write_all(text.as_bytes())
                    .and_then(|_| w.flush())
                    .map_err(|e| Failure::Io(path.clone(), e))?;
                self.note(&format!("wrote {}", path.display()));
            }
            None => print!("{text}"),
        }
        Ok(())
    }

    fn write_csv(&self, path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Outcome<()> {
        let io_err = |e: csv::Error| Failure::Io(path.to_path_buf(), io::Error::other(e));
        let mut w = csv::Writer::from_writer(self.create(path)?);
        w.write_record(header).map_err(io_err)?;
        for row in rows {
            w.write_record(&row).map_err(io_err)?;
        }
        w.flush().map_err(|e| Failure::Io(path.to_path_buf(), e))?;
        self.note(&format!("wrote {}", path.display()));
        Ok(())
    }
}

fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).expect("serializable result")
}

fn run_lift(sink: &Sink, args: &LiftArgs) -> Outcome<()> {
    let curve = read_curve(&args.curve)?;
    let sys = LiftSystem::new(&curve, args.k as usize)?;
    let result = json!({
        "curve": curve.label(),
        "k": args.k,
        "generators": sys.generators(),
    });
    sink.emit("lift", args, result)
}

fn run_jet(sink: &Sink, args: &JetArgs) -> Outcome<()> {
    let curve = read_curve(&args.curve)?;
    let point = parse_point(curve.field(), &args.point)?;
    let jet = jet_at(&curve, &point, args.k as usize)?;
    sink.emit("jet", args, to_value(jet))
}

fn run_tangency(sink: &Sink, args: &TangencyArgs) -> Outcome<()> {
    let a = read_curve(&args.first)?;
    let b = read_curve(&args.second)?;
    let point = parse_point(a.field(), &args.point)?;
    let order = tangency_order_at(&a, &b, &point, args.kmax as usize)?;
    let result = match order {
        TangencyOrder::Order(m) => json!({ "order": m, "same_to_cutoff": false }),
        TangencyOrder::SameToCutoff => json!({ "order": null, "same_to_cutoff": true }),
    };
    sink.emit("tangency", args, result)
}

fn run_count(sink: &Sink, args: &CountArgs) -> Outcome<()> {
    let arr = parse_arrangement_json(&read(&args.arrangement)?)?.into_arrangement(args.k.map(|k| k as usize))?;
    let report = count_tangencies(&arr)?;
    if let Some(path) = &args.csv {
        let rows = count_csv_rows(&report)
            .into_iter()
            .map(|r| ["x", "y", "participants", "excluded"].iter().map(|c| r[c].clone()).collect());
        sink.write_csv(path, &["x", "y", "participants", "excluded"], rows)?;
    }
    sink.emit("count", args, to_value(&report))
}

/// Streams the family so memory stays proportional to one curve.
fn emit_family(sink: &Sink, spec: &SharpFamilySpec, path: &Path) -> Outcome<()> {
    let mut w = sink.create(path)?;
    let io_err = |e| Failure::Io(path.to_path_buf(), e);
    write!(
        w,
        "{{\"format_version\":{},\"field\":{},\"k\":{},\"curves\":[",
        to_value(FORMAT_VERSION),
        to_value(spec.field()),
        spec.k()
    )
    .map_err(io_err)?;
    for (i, curve) in spec.curves().enumerate() {
        let sep = if i == 0 { "\n" } else { ",\n" };
        write!(w, "{sep}{}", curve_to_value(&curve)).map_err(io_err)?;
    }
    writeln!(w, "\n]}}").map_err(io_err)?;
    w.flush().map_err(io_err)?;
    sink.note(&format!("wrote {}", path.display()));
    Ok(())
}

fn run_sharp(sink: &Sink, args: &SharpArgs) -> Outcome<()> {
    let spec = SharpFamilySpec::new(args.p, args.k as usize)?;
    if let Some(path) = &args.emit_arrangement {
        emit_family(sink, &spec, path)?;
    }
    let seeds: Vec<u64> = (0..args.trials).map(|t| args.subsample_seed.wrapping_add(t)).collect();
    let report = sharpness_report(&spec, &seeds)?;
    sink.emit("sharp", args, to_value(&report))
}

fn run_fit(sink: &Sink, args: &FitArgs) -> Outcome<()> {
    let file = parse_arrangement_json(&read(&args.arrangement)?)?;
    let k = args.k.map(|k| k as usize).or(file.k).ok_or(Error::InvalidOrder { min: 1, got: 0 })?;
    let result = if args.cascade {
        let trace = cascade(&file.curves, k)?;
        json!({ "fit": trace.steps[0].fit, "cascade": trace })
    } else {
        json!({ "fit": min_degree_vanishing(&file.curves, k)? })
    };
    sink.emit("fit", args, result)
}

fn run_bound_scan(sink: &Sink, args: &BoundScanArgs) -> Outcome<()> {
    let need_p = || {
        args.p
            .ok_or_else(|| Error::ConstraintViolated("--p is required for this generator".into()))
    };
    let generator = match args.generator {
        GeneratorKind::Sharp => ArrangementGenerator::SharpTruncation { p: args.p },
        GeneratorKind::Random => ArrangementGenerator::RandomGraphs {
            max_deg: args.max_deg,
            p: need_p()?,
        },
        GeneratorKind::Parallel => ArrangementGenerator::ParallelTranslates {
            base_deg: args.max_deg,
            p: need_p()?,
        },
    };
    let scan = bound_scan(&generator, &args.n, args.k as usize, args.seed)?;
    if let Some(path) = &args.csv {
        let rows = scan.rows.iter().map(|r| {
            vec![
                r.n.to_string(),
                r.total.to_string(),
                format!("{:.6}", r.reference),
                format!("{:.6}", r.ratio),
            ]
        });
        sink.write_csv(path, &["n", "total", "reference_approx", "ratio_approx"], rows)?;
    }
    sink.emit("bound-scan", args, to_value(&scan))
}

fn run(cli: Cli) -> Outcome<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Internal(e.to_string()))?;
    }
    let name = match &cli.command {
        Command::Lift(_) => "lift",
        Command::Jet(_) => "jet",
        Command::Tangency(_) => "tangency",
        Command::Count(_) => "count",
        Command::Sharp(_) => "sharp",
        Command::Fit(_) => "fit",
        Command::BoundScan(_) => "bound-scan",
    };
    let out = cli.out.or_else(|| cli.out_dir.map(|d| d.join(format!("{name}.json"))));
    let sink = Sink {
        out,
        quiet: cli.quiet,
        threads: cli.threads,
    };
    match &cli.command {
        Command::Lift(a) => run_lift(&sink, a),
        Command::Jet(a) => run_jet(&sink, a),
        Command::Tangency(a) => run_tangency(&sink, a),
        Command::Count(a) => run_count(&sink, a),
        Command::Sharp(a) => run_sharp(&sink, a),
        Command::Fit(a) => run_fit(&sink, a),
        Command::BoundScan(a) => run_bound_scan(&sink, a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.exit_code())
        }
    }
}
