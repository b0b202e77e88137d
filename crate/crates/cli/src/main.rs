mod bench;
mod report;
mod verify;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand};
use submod_linesearch::ground::FamilySpec;
use submod_linesearch::instance::{self, InstanceFile};
use submod_linesearch::{Error, Instance, Method, SfmMethod};

/// Exact line search over extended polymatroids.
#[derive(Parser, Debug)]
#[command(name = "linesearch", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve one instance and print λ*, a tight set and the counters.
    Solve {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, default_value = "dualcut")]
        method: Method,
        /// Tolerance of the minimum-norm-point phase before its exact polish.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Run every method and check that they agree exactly.
    #[command(group(ArgGroup::new("source").required(true).args(["instance", "random"])))]
    Verify {
        #[arg(long)]
        instance: Option<PathBuf>,
        #[arg(long, num_args = 4, value_names = ["FAMILY", "N", "COUNT", "SEED"])]
        random: Option<Vec<String>>,
    },
    /// Emit benchmark rows as CSV.
    Bench {
        /// `ladder-sweep[:COUNT:SEED]`, `worst-case[:D,D,..]`,
        /// `random:FAMILY:N:COUNT:SEED` or `payoff[:COUNT:SEED]`.
        #[arg(long, default_value = "")]
        suite: String,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Leave `wall_ns` empty so that reruns are byte-identical.
        #[arg(long)]
        no_timing: bool,
    },
    /// Write a seeded random instance file.
    Gen {
        #[arg(long)]
        family: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Explicit table in mask order, e.g. `0,2,2,3`.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        values: Option<Vec<i64>>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        direction: Option<Vec<i64>>,
    },
}

#[derive(Debug)]
pub enum Failure {
    Input(String),
    Solver(String),
    Mismatch(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 1,
            Failure::Solver(_) => 2,
            Failure::Mismatch(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Solver(m) | Failure::Mismatch(m) => m,
        }
    }

    /// A solver-side error; a failed base-polytope cross-check counts as a mismatch.
    pub fn from_solver(e: Error) -> Self {
        match e {
            Error::BaseVerificationMismatch(_) => Failure::Mismatch(e.to_string()),
            _ => Failure::Solver(format!("{}: {e}", report::error_kind(&e))),
        }
    }
}

pub type CliResult<T> = Result<T, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            ExitCode::from(failure.code())
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    init_threads()?;
    match cli.command {
        Command::Solve { instance, method, tol } => {
            let sfm = match tol {
                None => SfmMethod::default(),
                Some(t) if t.is_finite() && t > 0.0 => SfmMethod::Auto { tol: t },
                Some(t) => return Err(Failure::Input(format!("--tol must be positive, got {t}"))),
            };
            let loaded = load(&instance)?;
            let result = submod_linesearch::solve_with(&loaded.oracle, &loaded.direction, method, sfm)
                .map_err(Failure::from_solver)?;
            print!("{}", report::solve_report(&loaded, &result));
            Ok(())
        }
        Command::Verify { instance, random } => {
            let files = match (instance, random) {
                (Some(path), _) => vec![read_instance(&path)?],
                (None, Some(args)) => random_files(&args)?,
                (None, None) => unreachable!("clap requires a source"),
            };
            verify::run(&files)
        }
        Command::Bench { suite, out, no_timing } => {
            let suite = bench::Suite::parse(&suite)?;
            let rows = bench::run(&suite, !no_timing);
            bench::write(&rows, out.as_deref())
        }
        Command::Gen {
            family,
            n,
            seed,
            out,
            values,
            direction,
        } => {
            let file = gen(&family, n, seed, values, direction)?;
            let text = file.to_json();
            match out {
                Some(path) => std::fs::write(&path, text)
                    .map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display()))),
                None => {
                    print!("{text}");
                    Ok(())
                }
            }
        }
    }
}

fn init_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var("LINESEARCH_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| Failure::Input(format!("LINESEARCH_THREADS must be a positive integer, got '{raw}'")))?;
    // a pool built earlier in the process is fine to keep
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    Ok(())
}

fn read_instance(path: &Path) -> CliResult<InstanceFile> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?;
    InstanceFile::from_json(&text).map_err(|e| Failure::Input(e.to_string()))
}

fn load(path: &Path) -> CliResult<Instance> {
    read_instance(path)?.build().map_err(|e| Failure::Input(e.to_string()))
}

fn random_files(args: &[String]) -> CliResult<Vec<InstanceFile>> {
    let [family, n, count, seed] = args else {
        return Err(Failure::Input("--random takes FAMILY N COUNT SEED".into()));
    };
    let n = parse_arg::<usize>("N", n)?;
    let count = parse_arg::<usize>("COUNT", count)?;
    let seed = parse_arg::<u64>("SEED", seed)?;
    (0..count)
        .map(|k| instance::generate(family, n, instance::suite_seed(seed, family, k)))
        .collect::<Result<_, _>>()
        .map_err(|e| Failure::Input(e.to_string()))
}

pub fn parse_arg<T: std::str::FromStr>(name: &str, raw: &str) -> CliResult<T> {
    raw.trim()
        .parse()
        .map_err(|_| Failure::Input(format!("{name}: cannot parse '{raw}'")))
}

fn gen(
    family: &str,
    n: usize,
    seed: u64,
    values: Option<Vec<i64>>,
    direction: Option<Vec<i64>>,
) -> CliResult<InstanceFile> {
    let input = |e: Error| Failure::Input(e.to_string());
    let mut file = instance::generate(family, n, seed).map_err(input)?;
    if let Some(values) = values {
        if family != "explicit" {
            return Err(Failure::Input("--values only applies to the explicit family".into()));
        }
        file.function.family = FamilySpec::Explicit { values };
        file.function.seed = None;
    }
    if let Some(d) = direction {
        file.direction = d;
    }
    file.build().map_err(input)?;
    Ok(file)
}
