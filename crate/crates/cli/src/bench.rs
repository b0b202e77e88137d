use std::io::Write;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use submod_linesearch::ground::family::FAMILY_NAMES;
use submod_linesearch::ground::{make_family, FamilySpec};
use submod_linesearch::instance::{generate, suite_seed, InstanceFile, SUITE_MAX_N};
use submod_linesearch::newton::{self, ladder_spacing};
use submod_linesearch::rational::{format, int, ratio};
use submod_linesearch::{Direction, Error, LineSearchResult, Method, Oracle, Rational, Subset};

use crate::report::error_kind;
use crate::{parse_arg, CliResult, Failure};

pub const SCHEMA_VERSION: u32 = 1;

const HEADER: [&str; 17] = [
    "schema_version",
    "suite",
    "instance",
    "family",
    "n",
    "method",
    "status",
    "lambda_star",
    "oracle_calls",
    "sfm_calls",
    "engine_iterations",
    "newton_iterations",
    "warm_start_gap",
    "first_breakpoint",
    "breakpoint_check",
    "wall_ns",
    "detail",
];

const LADDER_MAX_N: usize = 10;
const LADDER_GAPS: usize = 5;
const DEFAULT_SEED: u64 = 42;

#[derive(Clone, Debug, PartialEq)]
pub enum Suite {
    Empty,
    LadderSweep { count: usize, seed: u64 },
    WorstCase { scales: Vec<i64> },
    Random { family: String, n: usize, count: usize, seed: u64 },
    Payoff { count: usize, seed: u64 },
}

#[derive(Clone, Debug, Serialize)]
pub struct BenchRecord {
    schema_version: u32,
    suite: &'static str,
    instance: String,
    family: String,
    n: usize,
    method: String,
    status: String,
    lambda_star: String,
    oracle_calls: Option<u64>,
    sfm_calls: Option<u64>,
    engine_iterations: Option<usize>,
    newton_iterations: Option<usize>,
    warm_start_gap: Option<usize>,
    first_breakpoint: Option<String>,
    breakpoint_check: Option<&'static str>,
    wall_ns: Option<u64>,
    detail: String,
}

impl Suite {
    pub fn parse(spec: &str) -> CliResult<Suite> {
        let spec = spec.trim();
        if spec.is_empty() {
            return Ok(Suite::Empty);
        }
        let parts: Vec<&str> = spec.split(':').collect();
        let bad = || Failure::Input(format!("unknown suite '{spec}'"));
        match parts.as_slice() {
            ["ladder-sweep"] => Ok(Suite::LadderSweep { count: 20, seed: DEFAULT_SEED }),
            ["ladder-sweep", count, seed] => Ok(Suite::LadderSweep {
                count: parse_arg("COUNT", count)?,
                seed: parse_arg("SEED", seed)?,
            }),
            ["worst-case"] => Ok(Suite::WorstCase { scales: vec![10, 100, 1000] }),
            ["worst-case", list] => {
                let scales = list
                    .split(',')
                    .map(|s| parse_arg::<i64>("D", s))
                    .collect::<CliResult<Vec<_>>>()?;
                if scales.iter().any(|&s| s < 1) {
                    return Err(Failure::Input("worst-case scales must be positive".into()));
                }
                Ok(Suite::WorstCase { scales })
            }
            ["random", family, n, count, seed] => {
                if !FAMILY_NAMES.contains(family) {
                    return Err(Failure::Input(format!("unknown family '{family}'")));
                }
                let n = parse_arg("N", n)?;
                if n == 0 {
                    return Err(Failure::Input("N must be at least 1".into()));
                }
                Ok(Suite::Random {
                    family: family.to_string(),
                    n,
                    count: parse_arg("COUNT", count)?,
                    seed: parse_arg("SEED", seed)?,
                })
            }
            ["payoff"] => Ok(Suite::Payoff { count: 100, seed: DEFAULT_SEED }),
            ["payoff", count, seed] => Ok(Suite::Payoff {
                count: parse_arg("COUNT", count)?,
                seed: parse_arg("SEED", seed)?,
            }),
            _ => Err(bad()),
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Suite::Empty => "",
            Suite::LadderSweep { .. } => "ladder-sweep",
            Suite::WorstCase { .. } => "worst-case",
            Suite::Random { .. } => "random",
            Suite::Payoff { .. } => "payoff",
        }
    }
}

/// One unit of work; rows come back in job order.
struct Job {
    id: String,
    family: String,
    f: Oracle,
    d: Direction,
    scale: Option<i64>,
}

pub fn run(suite: &Suite, timing: bool) -> Vec<BenchRecord> {
    let jobs = match jobs(suite) {
        Ok(jobs) => jobs,
        Err(row) => return vec![*row],
    };
    let name = suite.name();
    jobs.par_iter()
        .map(|job| match suite {
            Suite::LadderSweep { .. } => ladder_rows(name, job, timing),
            Suite::WorstCase { .. } => worst_case_rows(name, job, timing),
            Suite::Random { .. } => method_rows(name, job, &methods_for(job.f.n()), timing),
            Suite::Payoff { .. } => method_rows(name, job, &[Method::DualCut], timing),
            Suite::Empty => Vec::new(),
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

fn jobs(suite: &Suite) -> Result<Vec<Job>, Box<BenchRecord>> {
    let from_file = |id: String, file: InstanceFile| -> Result<Job, Box<BenchRecord>> {
        let family = file.family().to_string();
        let n = file.n;
        match file.build() {
            Ok(inst) => Ok(Job {
                id,
                family,
                f: inst.oracle,
                d: inst.direction,
                scale: None,
            }),
            Err(e) => Err(Box::new(error_row(suite.name(), &id, &family, n, "generate", &e))),
        }
    };
    match suite {
        Suite::Empty => Ok(Vec::new()),
        Suite::LadderSweep { count, seed } | Suite::Payoff { count, seed } => {
            let max_n = if matches!(suite, Suite::LadderSweep { .. }) { LADDER_MAX_N } else { SUITE_MAX_N };
            let mut jobs = Vec::new();
            for family in FAMILY_NAMES {
                for k in 0..*count {
                    let n = 1 + k % max_n;
                    let id = format!("{family}-{k}");
                    let file = generate(family, n, suite_seed(*seed, family, k))
                        .map_err(|e| Box::new(error_row(suite.name(), &id, family, n, "generate", &e)))?;
                    jobs.push(from_file(id, file)?);
                }
            }
            Ok(jobs)
        }
        Suite::Random { family, n, count, seed } => (0..*count)
            .map(|k| {
                let id = format!("{family}-{k}");
                let file = generate(family, *n, suite_seed(*seed, family, k))
                    .map_err(|e| Box::new(error_row(suite.name(), &id, family, *n, "generate", &e)))?;
                from_file(id, file)
            })
            .collect(),
        Suite::WorstCase { scales } => Ok(scales
            .iter()
            .map(|&big| Job {
                id: format!("D={big}"),
                family: "interval-geometric".into(),
                f: make_family(2, &FamilySpec::IntervalGeometric {}).expect("n = 2 always builds"),
                d: Direction::new(vec![big, 3 * big - 1]).expect("positive direction"),
                scale: Some(big),
            })
            .collect()),
    }
}

fn methods_for(n: usize) -> Vec<Method> {
    let mut methods = vec![Method::Newton, Method::Binary, Method::DualCut];
    if n <= SUITE_MAX_N {
        methods.insert(0, Method::BruteForce);
    }
    methods
}

fn method_rows(suite: &'static str, job: &Job, methods: &[Method], timing: bool) -> Vec<BenchRecord> {
    methods
        .iter()
        .map(|&m| {
            let start = Instant::now();
            let r = submod_linesearch::solve(&job.f, &job.d, m);
            row(suite, job, m.name(), r, elapsed(start, timing))
        })
        .collect()
}

fn ladder_rows(suite: &'static str, job: &Job, timing: bool) -> Vec<BenchRecord> {
    let star = match newton::brute_force(&job.f, &job.d) {
        Ok(r) => r.lambda_star,
        Err(e) => return vec![error_row(suite, &job.id, &job.family, job.f.n(), "brute-force", &e)],
    };
    let eps = ladder_spacing(&job.d);
    (1..=LADDER_GAPS)
        .map(|k| {
            let start_at = &star + &eps * int(k as i64) - &eps / int(2);
            let start = Instant::now();
            let r = newton::discrete_newton(&job.f, &job.d, &start_at);
            let mut rec = row(suite, job, "newton", r, elapsed(start, timing));
            rec.warm_start_gap = Some(k);
            rec
        })
        .collect()
}

fn worst_case_rows(suite: &'static str, job: &Job, timing: bool) -> Vec<BenchRecord> {
    let big = job.scale.expect("worst-case jobs carry D");
    let expected = ratio(12, 3 * big - 1);
    let found = first_breakpoint(&job.f, &job.d);
    let check = if found.as_ref() == Some(&expected) { "ok" } else { "mismatch" };
    method_rows(suite, job, &methods_for(2), timing)
        .into_iter()
        .map(|mut rec| {
            rec.first_breakpoint = Some(found.as_ref().map_or_else(|| "none".into(), format));
            rec.breakpoint_check = Some(check);
            rec
        })
        .collect()
}

/// The envelope's first breakpoint above `λ*`: where the largest tight set
/// at `λ*` stops being a minimizer.
fn first_breakpoint(f: &Oracle, d: &Direction) -> Option<Rational> {
    let star = newton::brute_force(f, d).ok()?.lambda_star;
    let n = f.n();
    let value = |s: Subset| Rational::from_integer(f.eval(s)) - &star * int(d.of(s));
    let top = Subset::all(n)
        .filter(|&s| value(s) == Rational::from_integer(0.into()))
        .max_by_key(|&s| (d.of(s), std::cmp::Reverse(s.bits())))?;
    Subset::all(n)
        .filter(|&t| d.of(t) > d.of(top))
        .map(|t| Rational::new(f.eval(t) - f.eval(top), (d.of(t) - d.of(top)).into()))
        .min()
}

fn elapsed(start: Instant, timing: bool) -> Option<u64> {
    timing.then(|| start.elapsed().as_nanos() as u64)
}

fn row(
    suite: &'static str,
    job: &Job,
    method: &str,
    r: Result<LineSearchResult, Error>,
    wall_ns: Option<u64>,
) -> BenchRecord {
    match r {
        Ok(r) => BenchRecord {
            schema_version: SCHEMA_VERSION,
            suite,
            instance: job.id.clone(),
            family: job.family.clone(),
            n: job.f.n(),
            method: method.to_string(),
            status: "ok".into(),
            lambda_star: format(&r.lambda_star),
            oracle_calls: Some(r.oracle_calls),
            sfm_calls: Some(r.sfm_calls),
            engine_iterations: r.engine.as_ref().map(|e| e.iterations),
            newton_iterations: r.newton.as_ref().map(|t| t.iterations()),
            warm_start_gap: None,
            first_breakpoint: None,
            breakpoint_check: None,
            wall_ns,
            detail: String::new(),
        },
        Err(e) => {
            let mut rec = error_row(suite, &job.id, &job.family, job.f.n(), method, &e);
            rec.wall_ns = wall_ns;
            rec
        }
    }
}

fn error_row(suite: &'static str, id: &str, family: &str, n: usize, method: &str, e: &Error) -> BenchRecord {
    BenchRecord {
        schema_version: SCHEMA_VERSION,
        suite,
        instance: id.to_string(),
        family: family.to_string(),
        n,
        method: method.to_string(),
        status: error_kind(e).to_string(),
        lambda_star: String::new(),
        oracle_calls: None,
        sfm_calls: None,
        engine_iterations: None,
        newton_iterations: None,
        warm_start_gap: None,
        first_breakpoint: None,
        breakpoint_check: None,
        wall_ns: None,
        detail: e.to_string(),
    }
}

pub fn write(rows: &[BenchRecord], out: Option<&Path>) -> CliResult<()> {
    let io = |e: std::io::Error| Failure::Input(format!("cannot write CSV: {e}"));
    let mut buf = Vec::new();
    {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(&mut buf);
        let csv_err = |e: csv::Error| Failure::Input(format!("cannot write CSV: {e}"));
        w.write_record(HEADER).map_err(csv_err)?;
        for r in rows {
            w.serialize(r).map_err(csv_err)?;
        }
        w.flush().map_err(io)?;
    }
    match out {
        Some(path) => std::fs::write(path, &buf).map_err(io),
        None => std::io::stdout().write_all(&buf).map_err(io),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_suites() {
        assert_eq!(Suite::parse("  ").unwrap(), Suite::Empty);
        assert_eq!(
            Suite::parse("worst-case:10,100").unwrap(),
            Suite::WorstCase { scales: vec![10, 100] }
        );
        assert_eq!(
            Suite::parse("random:coverage:8:3:7").unwrap(),
            Suite::Random {
                family: "coverage".into(),
                n: 8,
                count: 3,
                seed: 7
            }
        );
        assert!(Suite::parse("random:nope:8:3:7").is_err());
        assert!(Suite::parse("ladder").is_err());
        assert!(Suite::parse("worst-case:0").is_err());
    }

    #[test]
    fn worst_case_breakpoints() {
        for big in [10, 100, 1000] {
            let f = make_family(2, &FamilySpec::IntervalGeometric {}).unwrap();
            let d = Direction::new(vec![big, 3 * big - 1]).unwrap();
            assert_eq!(first_breakpoint(&f, &d), Some(ratio(12, 3 * big - 1)));
        }
    }

    #[test]
    fn header_matches_record() {
        let rows = run(&Suite::WorstCase { scales: vec![10] }, false);
        let mut buf = Vec::new();
        {
            let mut w = csv::Writer::from_writer(&mut buf);
            w.serialize(&rows[0]).unwrap();
        }
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next().unwrap(), HEADER.join(","));
    }
}
