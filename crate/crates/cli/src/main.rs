//! `rfim-lab`: command-line driver for the random-field Ising laboratory.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use rfim_lab::animal::{flip_certificate, greedy_value_anneal, greedy_value_exact, AnimalClass, AnnealConfig};
use rfim_lab::bench::{
    fit_scaling, read_records, run_experiment, summarize, write_records, write_summary_csv, Experiment,
    ExperimentConfig, FitModel,
};
use rfim_lab::curve::suite::{run_suite, Suite};
use rfim_lab::curve::{nu, winding_number, CellMeasure, Curve};
use rfim_lab::field::{sample_field, DisorderField, LazyField};
use rfim_lab::geom::Point;
use rfim_lab::ising::{ground_state, Bc, Beta, Region};
use rfim_lab::polygrow::{init_growth, run, GrowthMode, GrowthParams};
use rfim_lab::Error;

#[derive(Parser, Debug)]
#[command(name = "rfim-lab", version, about = "Random-field Ising model laboratory")]
struct Cli {
    /// Master seed.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true, env = "RFIM_LAB_WORKERS")]
    workers: Option<usize>,
    /// Output file (stdout when absent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Experiment configuration in key=value form; replaces the grid flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample a disorder field and write its dump.
    Field {
        #[arg(long)]
        n: i64,
        #[arg(long, default_value_t = 1.0)]
        eps: f64,
    },
    /// Exact ground state on Λ_N.
    Ground {
        #[arg(long)]
        n: i64,
        #[arg(long, default_value_t = 1.0)]
        eps: f64,
        #[arg(long, value_enum, default_value_t = BcArg::Plus)]
        bc: BcArg,
        /// Read the field from a dump instead of sampling it.
        #[arg(long)]
        field: Option<PathBuf>,
    },
    /// Boundary influence at the origin, per sample.
    Mag(MagArgs),
    /// Correlation-length search.
    Psi(PsiArgs),
    /// Greedy lattice animals and flip certificates.
    Animal {
        #[command(subcommand)]
        action: Option<AnimalAction>,
    },
    /// Triangle-growing polygon construction.
    Grow(GrowArgs),
    /// Curve checks and evaluations.
    Curve {
        #[command(subcommand)]
        action: Option<CurveAction>,
    },
    /// Summarize a JSONL record file and fit a scaling model.
    Fit {
        #[arg(long)]
        records: PathBuf,
        /// logn34, psi43 or psi2; psi records get both psi models when absent.
        #[arg(long)]
        model: Option<FitModel>,
        /// Also write the per-cell summary CSV here.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BcArg {
    Plus,
    Minus,
}

#[derive(Args, Debug)]
struct MagArgs {
    #[arg(long, value_delimiter = ',', default_value = "4")]
    n: Vec<i64>,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    eps: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "inf")]
    beta: Vec<Beta>,
    #[arg(long, default_value_t = 100)]
    samples: usize,
    /// Write the per-cell summary CSV here.
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct PsiArgs {
    #[arg(long, value_delimiter = ',', default_value = "1")]
    eps: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "inf")]
    beta: Vec<Beta>,
    #[arg(long, value_delimiter = ',', default_value = "0.9")]
    m: Vec<f64>,
    /// Magnetization samples per tested box size.
    #[arg(long, default_value_t = 200)]
    samples: usize,
    #[arg(long, default_value_t = 64)]
    n_max: i64,
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum AnimalAction {
    /// Exhaustive search up to a size cap.
    Exact {
        #[command(flatten)]
        common: AnimalArgs,
        #[arg(long, default_value_t = 8)]
        max_size: usize,
    },
    /// Simulated annealing.
    Anneal {
        #[command(flatten)]
        common: AnimalArgs,
        #[arg(long)]
        max_size: Option<usize>,
        #[arg(long, default_value_t = 10_000)]
        budget: u64,
    },
    /// Plus component of the origin in the minus ground state, with its flip inequality checked.
    Certificate {
        #[arg(long)]
        n: i64,
        #[arg(long, default_value_t = 1.0)]
        eps: f64,
    },
}

#[derive(Args, Debug)]
struct AnimalArgs {
    #[arg(long)]
    n: i64,
    #[arg(long, default_value = "simply_connected")]
    class: AnimalClass,
    /// Only animals containing the origin.
    #[arg(long)]
    anchored: bool,
    #[arg(long)]
    field: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct GrowArgs {
    #[arg(long, default_value_t = 256)]
    n: i64,
    #[arg(long, default_value_t = 0.5)]
    eps: f64,
    #[arg(long, default_value_t = 0.5)]
    m: f64,
    #[arg(long, default_value = "lattice")]
    mode: GrowthMode,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    n_star: Option<usize>,
    /// Write the final polygon as `x y` lines.
    #[arg(long)]
    dump: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum CurveAction {
    /// Randomized identity checks; exits 2 on any violation.
    Check {
        #[arg(long)]
        suite: Suite,
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
    /// Winding number of a curve file around a point.
    Winding {
        #[arg(long)]
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        x: f64,
        #[arg(long, allow_hyphen_values = true)]
        y: f64,
    },
    /// ν of a curve file under signed area or the seeded Gaussian cells.
    Nu {
        #[arg(long)]
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = MeasureArg::Area)]
        measure: MeasureArg,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MeasureArg {
    Area,
    Field,
}

enum Failure {
    Violation(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Violation(_) => Failure::Violation(e.to_string()),
            e => Failure::Runtime(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn output(path: &Option<PathBuf>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn open(path: &Path) -> io::Result<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|e| io::Error::new(e.kind(), format!("{}: {e}", path.display())))
}

fn load_field(path: &Option<PathBuf>, n: i64, seed: u64, eps: f64) -> Result<DisorderField, Failure> {
    match path {
        Some(p) => Ok(DisorderField::read_dump(open(p)?)?),
        None => Ok(sample_field(n, seed, eps)),
    }
}

fn load_config(cli: &Cli, expected: &[Experiment]) -> Result<Option<ExperimentConfig>, Failure> {
    let Some(path) = &cli.config else {
        return Ok(None);
    };
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))?;
    let mut cfg = ExperimentConfig::parse(&text)?;
    if !expected.contains(&cfg.experiment) {
        return Err(Failure::Runtime(format!("configuration is for {}, not this command", cfg.experiment)));
    }
    if cli.workers.is_some() {
        cfg.workers = cli.workers;
    }
    if cli.out.is_some() {
        cfg.out = cli.out.clone();
    }
    Ok(Some(cfg))
}

fn run_batch(cfg: &ExperimentConfig, summary: Option<&Path>) -> Outcome {
    let start = Instant::now();
    let records = run_experiment(cfg)?;
    write_records(&records, output(&cfg.out)?)?;
    let failed = records.iter().filter(|r| r.error.is_some()).count();
    eprintln!("{} records ({failed} failed) in {:.1} s", records.len(), start.elapsed().as_secs_f64());
    if let Some(path) = summary {
        let rows = summarize(&records)?;
        write_summary_csv(cfg.experiment, &rows, BufWriter::new(File::create(path)?))?;
    }
    let violation = records.iter().find_map(|r| r.error.as_deref().filter(|e| e.starts_with("validator violation")));
    match violation {
        Some(e) => Err(Failure::Violation(e.to_string())),
        None => Ok(()),
    }
}

fn execute(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Field { n, eps } => {
            let field = sample_field(*n, cli.seed, *eps);
            let mut out = output(&cli.out)?;
            field.write_dump(&mut out)?;
            out.flush()?;
        }
        Command::Ground { n, eps, bc, field } => {
            let field = load_field(field, *n, cli.seed, *eps)?;
            let bc = match bc {
                BcArg::Plus => Bc::Plus,
                BcArg::Minus => Bc::Minus,
            };
            let n = field.half_width();
            let config = ground_state(&Region::square(n, bc), &field);
            let mut out = output(&cli.out)?;
            writeln!(out, "energy {:.17e}", config.energy())?;
            for y in (-n..=n).rev() {
                let row: String = (-n..=n)
                    .map(|x| if config.spin(rfim_lab::field::Site::new(x, y)) == Some(1) { '+' } else { '-' })
                    .collect();
                writeln!(out, "{row}")?;
            }
            out.flush()?;
        }
        Command::Mag(args) => {
            let cfg = match load_config(cli, &[Experiment::Mag])? {
                Some(cfg) => cfg,
                None => ExperimentConfig {
                    n: args.n.clone(),
                    eps: args.eps.clone(),
                    beta: args.beta.clone(),
                    samples: args.samples,
                    workers: cli.workers,
                    out: cli.out.clone(),
                    ..ExperimentConfig::new(Experiment::Mag, cli.seed)
                },
            };
            run_batch(&cfg, args.summary.as_deref())?;
        }
        Command::Psi(args) => {
            let cfg = match load_config(cli, &[Experiment::Psi])? {
                Some(cfg) => cfg,
                None => ExperimentConfig {
                    eps: args.eps.clone(),
                    beta: args.beta.clone(),
                    m: args.m.clone(),
                    mag_samples: args.samples,
                    n_max: args.n_max,
                    workers: cli.workers,
                    out: cli.out.clone(),
                    ..ExperimentConfig::new(Experiment::Psi, cli.seed)
                },
            };
            run_batch(&cfg, args.summary.as_deref())?;
        }
        Command::Animal { action } => match (action, load_config(cli, &[Experiment::AnimalScan])?) {
            (_, Some(cfg)) => run_batch(&cfg, None)?,
            (None, None) => return Err(Failure::Runtime("animal needs exact, anneal, certificate or --config".into())),
            (Some(AnimalAction::Exact { common, max_size }), None) => {
                let field = load_field(&common.field, common.n, cli.seed, 1.0)?;
                let res = greedy_value_exact(&field, *max_size, common.class, common.anchored)?;
                let mut out = output(&cli.out)?;
                write!(out, "{}", res.best.dump())?;
                out.flush()?;
            }
            (Some(AnimalAction::Anneal { common, max_size, budget }), None) => {
                let field = load_field(&common.field, common.n, cli.seed, 1.0)?;
                let config = AnnealConfig { anchored: common.anchored, max_size: *max_size, ..AnnealConfig::new(*budget, cli.seed, common.class) };
                let res = greedy_value_anneal(&field, &config)?;
                let mut out = output(&cli.out)?;
                write!(out, "{}", res.best.dump())?;
                out.flush()?;
            }
            (Some(AnimalAction::Certificate { n, eps }), None) => {
                let field = sample_field(*n, cli.seed, *eps);
                let mut out = output(&cli.out)?;
                match flip_certificate(&field)? {
                    Some(a) => write!(out, "{}", a.dump())?,
                    None => writeln!(out, "none")?,
                }
                out.flush()?;
            }
        },
        Command::Grow(args) => {
            if let Some(cfg) = load_config(cli, &[Experiment::GrowScan])? {
                return run_batch(&cfg, None);
            }
            let mut params = GrowthParams::new(args.n, args.eps, args.m, cli.seed, args.mode)?;
            if let Some(d) = args.delta {
                params = params.with_delta(d);
            }
            if let Some(k) = args.n_star {
                params = params.with_n_star(k);
            }
            let mut state = init_growth(params);
            let report = run(&mut state, &LazyField { seed: cli.seed })?;
            let mut out = output(&cli.out)?;
            serde_json::to_writer_pretty(&mut out, &report.to_json()).map_err(Error::from)?;
            writeln!(out)?;
            out.flush()?;
            if let Some(path) = &args.dump {
                std::fs::write(path, report.vertex_dump())?;
            }
        }
        Command::Curve { action } => match (action, load_config(cli, &[Experiment::CurveSuite])?) {
            (_, Some(cfg)) => run_batch(&cfg, None)?,
            (None, None) => return Err(Failure::Runtime("curve needs check, winding, nu or --config".into())),
            (Some(CurveAction::Check { suite, trials }), None) => {
                let rep = run_suite(*suite, *trials, cli.seed);
                let mut out = output(&cli.out)?;
                writeln!(
                    out,
                    "{}",
                    json!({"suite": suite.to_string(), "checks": rep.checks, "worst": rep.worst, "violations": rep.violations.len()})
                )?;
                for v in &rep.violations {
                    writeln!(out, "{v}")?;
                }
                out.flush()?;
                if !rep.violations.is_empty() {
                    return Err(Failure::Violation(format!("{} {suite} violations", rep.violations.len())));
                }
            }
            (Some(CurveAction::Winding { file, x, y }), None) => {
                let curve = Curve::read(open(file)?)?;
                let w = winding_number(Point::new(*x, *y), &curve)?;
                let mut out = output(&cli.out)?;
                writeln!(out, "{w}")?;
                out.flush()?;
            }
            (Some(CurveAction::Nu { file, measure }), None) => {
                let curve = Curve::read(open(file)?)?;
                let field = LazyField { seed: cli.seed };
                let mu = match measure {
                    MeasureArg::Area => CellMeasure::SignedArea,
                    MeasureArg::Field => CellMeasure::GaussianField(&field),
                };
                let mut out = output(&cli.out)?;
                writeln!(out, "{:.17e}", nu(&curve, mu))?;
                out.flush()?;
            }
        },
        Command::Fit { records, model, summary } => {
            let recs = read_records(open(records)?)?;
            let rows = summarize(&recs)?;
            let exp = recs[0].exp;
            if let Some(path) = summary {
                write_summary_csv(exp, &rows, BufWriter::new(File::create(path)?))?;
            }
            let models = match (model, exp) {
                (Some(m), _) => vec![*m],
                (None, Experiment::Psi) => vec![FitModel::PsiFourThirds, FitModel::PsiSquare],
                (None, Experiment::AnimalScan) => vec![FitModel::LogPowerThreeQuarters],
                (None, e) => return Err(Failure::Runtime(format!("no default model for {e} records; pass --model"))),
            };
            let mut out = output(&cli.out)?;
            for m in models {
                let fit = fit_scaling(&rows, m)?;
                writeln!(
                    out,
                    "{}",
                    json!({"model": m.label(), "coefficients": fit.coefficients, "r2": fit.r_squared, "residuals": fit.residuals})
                )?;
            }
            out.flush()?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Violation(msg)) => {
            eprintln!("violation: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
