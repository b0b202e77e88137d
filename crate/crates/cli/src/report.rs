use std::fmt::Write;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use submod_linesearch::rational::format;
use submod_linesearch::{Error, Instance, LineSearchResult, Rational};

const DECIMAL_PLACES: usize = 12;

pub fn solve_report(instance: &Instance, r: &LineSearchResult) -> String {
    let mut out = String::new();
    let f = &instance.oracle;
    let d = &instance.direction;
    let _ = writeln!(out, "family = {}", instance.file.family());
    let _ = writeln!(out, "n = {}", f.n());
    let _ = writeln!(out, "method = {}", r.method);
    let _ = writeln!(out, "lambda_star = {}", format(&r.lambda_star));
    let _ = writeln!(out, "lambda_decimal = {}", decimal(&r.lambda_star, DECIMAL_PLACES));
    let _ = writeln!(out, "tight set {}", r.tight_set);
    let _ = writeln!(
        out,
        "tight_check = f(S) {} = λ*·d(S) {}",
        f.eval(r.tight_set),
        format(&(&r.lambda_star * Rational::from_integer(d.of(r.tight_set).into())))
    );
    let x = r.dual_point(d);
    let xs: Vec<String> = x.iter().map(format).collect();
    let _ = writeln!(out, "dual_point = ({})", xs.join(", "));
    let _ = writeln!(out, "oracle_calls = {}", r.oracle_calls);
    let _ = writeln!(out, "sfm_calls = {}", r.sfm_calls);
    let _ = writeln!(out, "newton_iterations = {}", r.newton_iterations());
    if let Some(e) = &r.engine {
        let _ = writeln!(out, "engine_status = {:?}", e.status);
        let _ = writeln!(out, "engine_iterations = {}", e.iterations);
        let _ = writeln!(out, "engine_gap = {:e}", e.certified_gap);
        let _ = writeln!(out, "warm_start = {}", format(&e.lambda0));
    }
    out
}

/// `r` truncated toward zero to `places` digits.
pub fn decimal(r: &Rational, places: usize) -> String {
    let sign = if r.is_negative() { "-" } else { "" };
    let numer = r.numer().abs();
    let denom = r.denom().clone();
    let whole = &numer / &denom;
    let mut rem = &numer % &denom;
    let mut digits = String::with_capacity(places);
    let ten = BigInt::from(10);
    for _ in 0..places {
        if rem.is_zero() {
            break;
        }
        rem *= &ten;
        digits.push_str(&(&rem / &denom).to_string());
        rem %= &denom;
    }
    if digits.is_empty() {
        format!("{sign}{whole}")
    } else {
        format!("{sign}{whole}.{digits}")
    }
}

pub fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::NonSubmodular { .. } => "NonSubmodular",
        Error::EmptyNotZero => "EmptyNotZero",
        Error::NegativeValue(_) => "NegativeValue",
        Error::InvalidSpec(_) => "InvalidSpec",
        Error::InvalidDirection(_) => "InvalidDirection",
        Error::DimensionMismatch { .. } => "DimensionMismatch",
        Error::GroundSetTooLarge { .. } => "GroundSetTooLarge",
        Error::NotConverged { .. } => "NotConverged",
        Error::BadStart { .. } => "BadStart",
        Error::IterationCapExceeded { .. } => "IterationCapExceeded",
        Error::EngineBreakdown { .. } => "EngineBreakdown",
        Error::InfeasibleBaseLineSearch(_) => "InfeasibleBaseLineSearch",
        Error::BaseVerificationMismatch(_) => "BaseVerificationMismatch",
        Error::InvariantViolation(_) => "InvariantViolation",
    }
}
