//! `capillum`: certified illumination bounds and constructions for cap
//! bodies in E³.
//!
//! Exit codes: 0 on success, 1 on a domain or verification failure
//! (including a bound M_t ≥ 3), 2 on I/O or parse errors.

use std::f64::consts::FRAC_PI_2;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use cap_illumination::cap_body::generate_random_body;
use cap_illumination::cover_measure::{chunk_rng, lune_area, union_case, union_measure, union_measure_mc, UnionCase};
use cap_illumination::formats::{self, Certificate, FormatError};
use cap_illumination::illuminator::{illuminate, verify_illumination, IlluminationError, DEFAULT_BUDGET};
use cap_illumination::ilp::{build_model_with, certify, solve_exact, solve_float, ConstraintForm};

#[derive(Parser, Debug)]
#[command(name = "capillum", version, about = "Illumination bounds for 3-dimensional cap bodies")]
struct Cli {
    /// Worker threads for parallel stages (default: all cores). Results do
    /// not depend on this value.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build, solve and certify the discretized bound M_t.
    Bound(BoundArgs),
    /// Evaluate σ(C_θ), the measure of the tetrahedral cap union.
    Measure(MeasureArgs),
    /// Find at most 6 illuminating directions for a cap body.
    Illuminate(IlluminateArgs),
    /// Check a direction set against a cap body.
    Verify(VerifyArgs),
    /// Write a random valid cap body.
    Generate(GenerateArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Exact,
    Float,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Form {
    Halved,
    Doubled,
}

impl From<Form> for ConstraintForm {
    fn from(f: Form) -> Self {
        match f {
            Form::Halved => ConstraintForm::Halved,
            Form::Doubled => ConstraintForm::Doubled,
        }
    }
}

#[derive(Args, Debug)]
struct BoundArgs {
    /// Number of intervals in the partition of [19π/180, π/2].
    #[arg(long, default_value_t = 250)]
    t: usize,
    /// Rounding denominator.
    #[arg(long = "D", default_value_t = 3000)]
    d: u64,
    #[arg(long, value_enum, default_value_t = Mode::Exact)]
    mode: Mode,
    /// Which quantity is rounded in the packing constraint.
    #[arg(long, value_enum, default_value_t = Form::Halved)]
    constraint_form: Form,
    /// Certificate path (default: standard output).
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct MeasureArgs {
    /// Cap radius θ in radians, 0 < θ ≤ π/2.
    #[arg(long, required_unless_present = "grid", conflicts_with = "grid")]
    theta: Option<f64>,
    /// Print a table at θ = k·(π/2)/N for k = 1..=N instead.
    #[arg(long)]
    grid: Option<u32>,
    /// Monte Carlo samples for the single-θ estimate (0 disables it).
    #[arg(long, default_value_t = 1_000_000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct IlluminateArgs {
    /// Cap-body JSON file.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of tetrahedron rotations to try.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// Direction-set path. When given, the verification report goes to
    /// standard output; otherwise the directions do.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    directions: PathBuf,
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Target number of caps; fewer are written if they do not fit.
    #[arg(long, default_value_t = 20)]
    count: usize,
    #[arg(long, default_value_t = 0.1)]
    radius_min: f64,
    #[arg(long, default_value_t = 1.0)]
    radius_max: f64,
    #[arg(long)]
    output: Option<PathBuf>,
}

/// A failed run and its exit code.
#[derive(Debug)]
enum Failure {
    Domain(anyhow::Error),
    Io(anyhow::Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Domain(_) => 1,
            Failure::Io(_) => 2,
        }
    }
}

impl From<FormatError> for Failure {
    fn from(e: FormatError) -> Self {
        // Anything wrong with an input file is a parse failure.
        match e {
            FormatError::Overflow(_) => Failure::Domain(e.into()),
            other => Failure::Io(other.into()),
        }
    }
}

fn domain<E: Into<anyhow::Error>>(e: E) -> Failure {
    Failure::Domain(e.into())
}

type Outcome = Result<ExitCode, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display())).map_err(Failure::Io)
}

fn emit(text: &str, path: Option<&Path>) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())).map_err(Failure::Io),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn exit_if(ok: bool) -> ExitCode {
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn bound(args: &BoundArgs) -> Outcome {
    if args.t == 0 || args.d == 0 {
        return Err(domain(anyhow!("--t and --D must be at least 1")));
    }
    match args.mode {
        Mode::Exact => {
            let form = ConstraintForm::from(args.constraint_form);
            let start = Instant::now();
            let model = build_model_with(args.t, args.d, form).map_err(domain)?;
            let built = start.elapsed();
            let sol = solve_exact(&model).map_err(domain)?;
            let report = certify(&sol, &model).map_err(domain)?;
            let cert = Certificate::exact(&report, form)?;
            emit(&cert.to_json(), args.output.as_deref())?;
            eprintln!(
                "M_{} = {} ≈ {:.6} (D = {}, {} form); floor = {}; M_t < 3: {}; directions ≤ {}",
                report.t,
                report.m_t,
                cert.m_t_approx,
                report.d,
                form.name(),
                report.floor_m_t,
                report.verdict_lt_3,
                report.directions_bound
            );
            eprintln!("model {:.2?}, total {:.2?}", built, start.elapsed());
            Ok(exit_if(report.verdict_lt_3))
        }
        Mode::Float => {
            let start = Instant::now();
            let sol = solve_float(args.t).map_err(domain)?;
            let cert = Certificate::float(args.t, &sol)?;
            emit(&cert.to_json(), args.output.as_deref())?;
            eprintln!(
                "M_{} ≈ {:.6} (floating point, not certified) in {:.2?}",
                args.t,
                cert.m_t_approx,
                start.elapsed()
            );
            Ok(ExitCode::SUCCESS)
        }
    }
}

#[derive(Serialize)]
struct McJson {
    estimate: f64,
    stderr: f64,
    samples: u64,
    seed: u64,
}

#[derive(Serialize)]
struct MeasureJson {
    theta: f64,
    case: u8,
    sigma: f64,
    lune_area: Option<f64>,
    monte_carlo: Option<McJson>,
}

fn measure_at(theta: f64) -> Result<(UnionCase, f64, Option<f64>), Failure> {
    let case = union_case(theta).map_err(domain)?;
    let sigma = union_measure(theta).map_err(domain)?;
    let lune = match case {
        UnionCase::Overlapping => Some(lune_area(theta).map_err(domain)?),
        _ => None,
    };
    Ok((case, sigma, lune))
}

fn measure(args: &MeasureArgs) -> Outcome {
    if let Some(n) = args.grid {
        if n == 0 {
            return Err(domain(anyhow!("--grid must be at least 1")));
        }
        let mut table = String::from("theta\tcase\tsigma\tlune_area\n");
        for k in 1..=n {
            let theta = FRAC_PI_2 * f64::from(k) / f64::from(n);
            let (case, sigma, lune) = measure_at(theta)?;
            let lune = lune.map_or_else(|| "-".to_string(), |a| format!("{a:.12}"));
            table.push_str(&format!("{theta:.12}\t{}\t{sigma:.12}\t{lune}\n", case as u8));
        }
        print!("{table}");
        return Ok(ExitCode::SUCCESS);
    }
    let theta = args.theta.expect("clap requires --theta without --grid");
    let (case, sigma, lune) = measure_at(theta)?;
    let monte_carlo = (args.samples > 0).then(|| {
        let mc = union_measure_mc(theta, args.samples, args.seed);
        McJson { estimate: mc.estimate, stderr: mc.stderr, samples: mc.samples, seed: args.seed }
    });
    let out = MeasureJson { theta, case: case as u8, sigma, lune_area: lune, monte_carlo };
    println!("{}", serde_json::to_string_pretty(&out).map_err(|e| Failure::Io(e.into()))?);
    if let Some(mc) = &out.monte_carlo {
        eprintln!("σ(C_θ) = {sigma:.12} (case {}); Monte Carlo {:.6} ± {:.6}", case as u8, mc.estimate, mc.stderr);
    }
    Ok(ExitCode::SUCCESS)
}

fn illuminate_cmd(args: &IlluminateArgs) -> Outcome {
    let body = formats::body_from_json(&read(&args.input)?)?;
    let out = match illuminate(&body, args.budget, args.seed) {
        Ok(out) => out,
        Err(e @ IlluminationError::SearchExhausted { .. }) => {
            eprintln!("{e}; try a larger --budget or another --seed");
            return Ok(ExitCode::from(1));
        }
        Err(e) => return Err(domain(e)),
    };
    let dirs = formats::directions_to_json(&out.directions);
    let report = formats::report_to_json(&out.report);
    match &args.output {
        Some(p) => {
            emit(&dirs, Some(p))?;
            print!("{report}");
        }
        None => print!("{dirs}"),
    }
    eprintln!(
        "{} caps, {} directions (rotation #{}, {} caps completed): {}",
        body.len(),
        out.directions.len(),
        out.search.sample_index,
        out.search.unlit.len(),
        out.report.verdict()
    );
    Ok(exit_if(out.report.illuminated))
}

fn verify(args: &VerifyArgs) -> Outcome {
    let body = formats::body_from_json(&read(&args.input)?)?;
    let dirs = formats::directions_from_json(&read(&args.directions)?)?;
    let report = verify_illumination(&body, &dirs);
    print!("{}", formats::report_to_json(&report));
    eprintln!("{}: {} unlit caps, hull_ok = {}", report.verdict(), report.unlit.len(), report.hull_ok);
    Ok(exit_if(report.illuminated))
}

fn generate(args: &GenerateArgs) -> Outcome {
    let (lo, hi) = (args.radius_min, args.radius_max);
    if !(lo > 0.0 && lo <= hi && hi < FRAC_PI_2 - formats::RADIUS_MARGIN) {
        return Err(domain(anyhow!("radius range [{lo}, {hi}] must satisfy 0 < min ≤ max < π/2")));
    }
    if args.count == 0 {
        return Err(domain(anyhow!("--count must be at least 1")));
    }
    let body = generate_random_body(&mut chunk_rng(args.seed, 0), args.count, (lo, hi));
    emit(&formats::body_to_json(&body), args.output.as_deref())?;
    eprintln!("generated {} of {} requested caps", body.len(), args.count);
    Ok(ExitCode::SUCCESS)
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Bound(a) => bound(a),
        Command::Measure(a) => measure(a),
        Command::Illuminate(a) => illuminate_cmd(a),
        Command::Verify(a) => verify(a),
        Command::Generate(a) => generate(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(code) => code,
        Err(f) => {
            let (Failure::Domain(e) | Failure::Io(e)) = &f;
            eprintln!("error: {e:#}");
            ExitCode::from(f.code())
        }
    }
}
