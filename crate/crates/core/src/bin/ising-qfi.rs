use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use ising_qfi::asymptotics::{Curve, PrefactorCurve, DEFAULT_QUADRATURE_TOL};
use ising_qfi::fermion::max_variance;
use ising_qfi::fit::fit_power_law;
use ising_qfi::oracle::{n_max, MatrixModel, ModelKind};
use ising_qfi::product::{optimize, NelderMeadOptions, DEFAULT_RESTARTS};
use ising_qfi::table::{Cell, Table};
use ising_qfi::verify::{self, Level, VerifyConfig};
use ising_qfi::{Error, ModelParams, Target};

#[derive(Parser, Debug)]
#[command(name = "ising-qfi", version, about = "Quantum Fisher information of the transverse-field Ising chain")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Optimal-state (G) and GHZ (F) prefactors versus g.
    Gfunction(GfunctionArgs),
    /// Maximal generator variance over t² from the closed form.
    Maxvar(MaxvarArgs),
    /// Best product-state variance over t², with a power-law fit.
    ProductScan(ProductScanArgs),
    /// Cross-checks the closed forms against the matrix oracle.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    workers: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Which {
    #[value(name = "J", alias = "j")]
    J,
    #[value(name = "B", alias = "b")]
    B,
}

/// Parsed grid; a newtype so clap treats it as one value.
#[derive(Clone, Debug, PartialEq)]
struct Grid<T>(Vec<T>);

impl From<Which> for Target {
    fn from(w: Which) -> Self {
        match w {
            Which::J => Target::EstimateJ,
            Which::B => Target::EstimateB,
        }
    }
}

#[derive(Args, Debug)]
struct GfunctionArgs {
    /// Comma-separated g values.
    #[arg(long, value_parser = parse_g_list, conflicts_with = "g_range", allow_hyphen_values = true)]
    g: Option<Grid<f64>>,
    /// START:STOP:STEP, inclusive.
    #[arg(long, value_parser = parse_g_range, allow_hyphen_values = true)]
    g_range: Option<Grid<f64>>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct Physics {
    #[arg(long = "J", default_value_t = 1.0, allow_hyphen_values = true)]
    j: f64,
    #[arg(long = "B", default_value_t = 1.0, allow_hyphen_values = true)]
    b: f64,
    #[arg(long, default_value_t = 20.0, value_parser = parse_time)]
    t: f64,
    /// Single chain size.
    #[arg(long = "N", conflicts_with = "n_range", value_parser = clap::value_parser!(u64).range(2..))]
    n: Option<u64>,
    /// Inclusive chain-size range A:B.
    #[arg(long = "N-range", value_parser = parse_n_range)]
    n_range: Option<Grid<usize>>,
    #[arg(long, value_enum, default_value_t = Which::J)]
    which: Which,
}

impl Physics {
    fn grid(&self) -> Vec<usize> {
        match (self.n, &self.n_range) {
            (Some(n), _) => vec![n as usize],
            (None, Some(r)) => r.0.clone(),
            (None, None) => (2..=11).collect(),
        }
    }

    fn params(&self, n: usize) -> Result<ModelParams, Error> {
        ModelParams::new(n, self.j, self.b, self.t)
    }
}

#[derive(Args, Debug)]
struct MaxvarArgs {
    #[command(flatten)]
    physics: Physics,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct ProductScanArgs {
    #[command(flatten)]
    physics: Physics,
    #[arg(long, default_value = "spin-open", value_parser = parse_model)]
    model: ModelKind,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_RESTARTS, value_parser = parse_restarts)]
    restarts: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, default_value = "fast", value_parser = parse_level)]
    level: Level,
    /// Overrides the ω_k degeneracy cutoff of the degenerate-limit suite.
    #[arg(long, hide = true)]
    degeneracy_threshold: Option<f64>,
    #[command(flatten)]
    output: OutputArgs,
}

fn parse_g_list(s: &str) -> Result<Grid<f64>, String> {
    let gs = s
        .split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|e| format!("{v:?}: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    check_g(gs)
}

fn parse_g_range(s: &str) -> Result<Grid<f64>, String> {
    let parts: Vec<f64> = s
        .split(':')
        .map(|v| v.trim().parse::<f64>().map_err(|e| format!("{v:?}: {e}")))
        .collect::<Result<_, _>>()?;
    let [start, stop, step] = parts[..] else {
        return Err("expected START:STOP:STEP".into());
    };
    if step.is_nan() || stop.is_nan() || step <= 0.0 || stop < start {
        return Err("need STEP > 0 and STOP >= START".into());
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    if count > 1_000_000 {
        return Err(format!("grid of {count} points is too large"));
    }
    // Rounded to 12 decimals so 0.1 steps print as 0.3, not 0.30000000000000004.
    let gs = (0..count)
        .map(|i| {
            let g = start + i as f64 * step;
            format!("{g:.12}").parse::<f64>().unwrap_or(g)
        })
        .collect();
    check_g(gs)
}

fn check_g(gs: Vec<f64>) -> Result<Grid<f64>, String> {
    if gs.is_empty() {
        return Err("empty grid".into());
    }
    match gs.iter().find(|g| !g.is_finite() || **g < 0.0) {
        Some(g) => Err(format!("g must be finite and >= 0, got {g}")),
        None => Ok(Grid(gs)),
    }
}

fn parse_n_range(s: &str) -> Result<Grid<usize>, String> {
    let (a, b) = s.split_once(':').ok_or("expected A:B")?;
    let a: usize = a.trim().parse().map_err(|e| format!("{a:?}: {e}"))?;
    let b: usize = b.trim().parse().map_err(|e| format!("{b:?}: {e}"))?;
    if a < 2 || b < a {
        return Err(format!("need 2 <= A <= B, got {a}:{b}"));
    }
    Ok(Grid((a..=b).collect()))
}

fn parse_time(s: &str) -> Result<f64, String> {
    let t: f64 = s.parse().map_err(|e| format!("{s:?}: {e}"))?;
    if t.is_finite() && t >= 0.0 {
        Ok(t)
    } else {
        Err(format!("t must be finite and >= 0, got {s}"))
    }
}

fn parse_model(s: &str) -> Result<ModelKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_level(s: &str) -> Result<Level, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_restarts(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(r) if r >= 1 => Ok(r),
        _ => Err(format!("restarts must be a positive integer, got {s:?}")),
    }
}

/// Exit status plus message for failures after argument parsing.
struct Failure(u8, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::TooLarge { .. } => 3,
            Error::Domain(_) | Error::DimensionMismatch { .. } => 2,
            _ => 1,
        };
        Failure(code, e.to_string())
    }
}

fn pool(workers: u64) -> Result<rayon::ThreadPool, Failure> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers as usize)
        .build()
        .map_err(|e| Failure(1, format!("thread pool: {e}")))
}

fn emit(output: &OutputArgs, text: &str) -> Result<(), Failure> {
    match &output.out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure(2, format!("cannot write {}: {e}", path.display()))),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure(1, format!("stdout: {e}"))),
    }
}

fn render(output: &OutputArgs, table: &Table, extra: Option<(&str, serde_json::Value)>) -> String {
    match output.format {
        Format::Csv => {
            let mut s = table.to_csv();
            if let Some((key, value)) = extra {
                s.push('\n');
                s.push_str(&serde_json::to_string_pretty(&json!({ key: value })).expect("json"));
                s.push('\n');
            }
            s
        }
        Format::Json => {
            let mut doc = json!({ "rows": table.to_json_value() });
            if let Some((key, value)) = extra {
                doc[key] = value;
            }
            serde_json::to_string_pretty(&doc).expect("json") + "\n"
        }
    }
}

fn cmd_gfunction(args: &GfunctionArgs) -> Result<(), Failure> {
    let Grid(mut gs) = args
        .g
        .clone()
        .or_else(|| args.g_range.clone())
        .unwrap_or_else(|| parse_g_range("0:3:0.05").expect("default grid"));
    gs.sort_by(f64::total_cmp);
    let (g_curve, f_curve) = pool(args.output.workers)?.install(|| {
        Ok::<_, Error>((
            PrefactorCurve::sample(Curve::OptimalG, &gs, DEFAULT_QUADRATURE_TOL)?,
            PrefactorCurve::sample(Curve::GhzF, &gs, DEFAULT_QUADRATURE_TOL)?,
        ))
    })?;
    let mut table = Table::new(vec!["g", "G", "F"]);
    for ((g, big_g), (_, f)) in g_curve.grid.iter().zip(&f_curve.grid) {
        table.push(vec![Cell::Float(*g), Cell::Float(*big_g), Cell::Float(*f)]);
    }
    emit(&args.output, &render(&args.output, &table, None))
}

fn cmd_maxvar(args: &MaxvarArgs) -> Result<(), Failure> {
    let target = Target::from(args.physics.which);
    let mut table = Table::new(vec!["N", "variance_over_t2"]);
    for n in args.physics.grid() {
        let params = args.physics.params(n)?;
        let t2 = params.t() * params.t();
        let v = if t2 == 0.0 {
            0.0
        } else {
            max_variance(&params, target).variance / t2
        };
        table.push(vec![Cell::from(n), Cell::Float(v)]);
    }
    emit(&args.output, &render(&args.output, &table, None))
}

fn cmd_product_scan(args: &ProductScanArgs) -> Result<(), Failure> {
    let grid = args.physics.grid();
    let limit = n_max();
    if let Some(&n) = grid.iter().find(|&&n| n > limit) {
        return Err(Error::TooLarge { n, max: limit }.into());
    }
    let target = Target::from(args.physics.which);
    let pool = pool(args.output.workers)?;
    let opts = NelderMeadOptions::default();
    let mut table = Table::new(vec!["N", "best_variance_over_t2", "restarts_converged"]);
    let mut points = Vec::new();
    for n in grid {
        let params = args.physics.params(n)?;
        let model = MatrixModel::new(args.model, n)?;
        let run =
            pool.install(|| optimize(&params, target, &model, args.restarts, args.seed, &opts))?;
        let t2 = params.t() * params.t();
        let v = if t2 == 0.0 { 0.0 } else { run.best_variance / t2 };
        points.push((n as f64, v));
        table.push(vec![
            Cell::from(n),
            Cell::Float(v),
            Cell::from(run.restarts_converged()),
        ]);
    }
    let fit = match fit_power_law(&points) {
        Ok(f) => serde_json::to_value(f).expect("json"),
        Err(_) => serde_json::Value::Null,
    };
    emit(&args.output, &render(&args.output, &table, Some(("fit", fit))))
}

fn cmd_verify(args: &VerifyArgs) -> Result<(), Failure> {
    let config = VerifyConfig {
        level: args.level,
        eps_omega: args.degeneracy_threshold,
    };
    let report = pool(args.output.workers)?.install(|| verify::run(&config))?;
    let text = match args.output.format {
        Format::Csv => format!("{report}\n"),
        Format::Json => serde_json::to_string_pretty(&report).expect("json") + "\n",
    };
    emit(&args.output, &text)?;
    if report.passed() {
        Ok(())
    } else {
        Err(Failure(1, "verification failed".into()))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Gfunction(a) => cmd_gfunction(a),
        Command::Maxvar(a) => cmd_maxvar(a),
        Command::ProductScan(a) => cmd_product_scan(a),
        Command::Verify(a) => cmd_verify(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
