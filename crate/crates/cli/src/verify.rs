use rayon::prelude::*;
use submod_linesearch::instance::{InstanceFile, SUITE_MAX_N};
use submod_linesearch::rational::format;
use submod_linesearch::{Error, LineSearchResult, Method, Rational, Subset};

use crate::report::error_kind;
use crate::{CliResult, Failure};

enum Verdict {
    Agree,
    /// Some method failed to run; no two results disagree.
    Errored(String),
    Mismatch(String),
}

struct Check {
    file: InstanceFile,
    lines: Vec<String>,
    verdict: Verdict,
}

pub fn run(files: &[InstanceFile]) -> CliResult<()> {
    let checks: Vec<Check> = files
        .par_iter()
        .map(check)
        .collect::<CliResult<_>>()?;

    let agree = checks.iter().filter(|c| matches!(c.verdict, Verdict::Agree)).count();
    let mut mismatch = None;
    let mut errored = None;
    for (k, c) in checks.iter().enumerate() {
        match &c.verdict {
            Verdict::Agree => {}
            Verdict::Errored(why) => {
                eprintln!("instance {k}: {why}");
                errored.get_or_insert_with(|| why.clone());
            }
            Verdict::Mismatch(why) => {
                eprintln!("instance {k}: mismatch: {why}");
                eprint!("{}", c.file.to_json());
                for line in &c.lines {
                    eprintln!("  {line}");
                }
                mismatch.get_or_insert_with(|| why.clone());
            }
        }
    }
    if let [only] = checks.as_slice() {
        println!("{}", only.lines.join(", "));
    }
    println!("{agree}/{} agree", checks.len());
    match (mismatch, errored) {
        (Some(why), _) => Err(Failure::Mismatch(why)),
        (None, Some(why)) => Err(Failure::Solver(why)),
        (None, None) => Ok(()),
    }
}

fn check(file: &InstanceFile) -> CliResult<Check> {
    let loaded = file.build().map_err(|e| Failure::Input(e.to_string()))?;
    let f = &loaded.oracle;
    let d = &loaded.direction;
    let n = f.n();

    let mut methods = vec![Method::Newton, Method::Binary, Method::DualCut];
    if n <= SUITE_MAX_N {
        methods.insert(0, Method::BruteForce);
    }
    let runs: Vec<(Method, Result<LineSearchResult, Error>)> = methods
        .into_iter()
        .map(|m| (m, submod_linesearch::solve(f, d, m)))
        .collect();

    let mut lines = Vec::new();
    let mut reference: Option<(Method, Rational)> = None;
    let mut mismatch = None;
    let mut errored = None;
    for (m, r) in &runs {
        match r {
            Ok(r) => {
                lines.push(format!("{m} {} on {}", format(&r.lambda_star), r.tight_set));
                if !tight(f, d, r.tight_set, &r.lambda_star) {
                    mismatch.get_or_insert_with(|| format!("{m} tight set {} is not tight", r.tight_set));
                }
                match &reference {
                    None => reference = Some((*m, r.lambda_star.clone())),
                    Some((base, value)) if *value != r.lambda_star => {
                        mismatch.get_or_insert_with(|| {
                            format!("{base} gives {} but {m} gives {}", format(value), format(&r.lambda_star))
                        });
                    }
                    Some(_) => {}
                }
            }
            Err(e) => {
                lines.push(format!("{m} failed: {e}"));
                errored.get_or_insert_with(|| format!("{m}: {}: {e}", error_kind(e)));
            }
        }
    }

    // the base-polytope search answers a different question; it must land on
    // a feasible point of the same line
    match submod_linesearch::solve(f, d, Method::Base) {
        Ok(b) => {
            lines.push(format!("base {}", format(&b.lambda_star)));
            if let Some((_, star)) = &reference {
                if b.lambda_star > *star {
                    mismatch.get_or_insert_with(|| {
                        format!("base gives {} above λ* = {}", format(&b.lambda_star), format(star))
                    });
                }
            }
        }
        Err(Error::InfeasibleBaseLineSearch(_)) => lines.push("base not applicable".into()),
        Err(e @ Error::BaseVerificationMismatch(_)) => {
            lines.push(format!("base failed: {e}"));
            mismatch.get_or_insert_with(|| e.to_string());
        }
        Err(e) => {
            lines.push(format!("base failed: {e}"));
            errored.get_or_insert_with(|| format!("base: {}: {e}", error_kind(&e)));
        }
    }

    let verdict = match (mismatch, errored) {
        (Some(why), _) => Verdict::Mismatch(why),
        (None, Some(why)) => Verdict::Errored(why),
        (None, None) => Verdict::Agree,
    };
    Ok(Check {
        file: file.clone(),
        lines,
        verdict,
    })
}

fn tight(f: &submod_linesearch::Oracle, d: &submod_linesearch::Direction, s: Subset, lambda: &Rational) -> bool {
    let ds = d.of(s);
    ds > 0 && Rational::from_integer(f.eval(s)) == lambda * Rational::from_integer(ds.into())
}
