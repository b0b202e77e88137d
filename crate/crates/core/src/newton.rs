//! Exact discrete Newton's method on the envelope
//! `g(λ) = min_S f(S) − λ·d(S)`, the bisection baseline, and the ladder
//! utilities.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::dualcut::EngineSummary;
use crate::ground::{check_enumerable, newton_scale, Direction, Oracle, Subset};
use crate::lovasz;
use crate::rational::{self, Rational};
use crate::sfm::{self, SfmMethod};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    BruteForce,
    Newton,
    Binary,
    DualCut,
    Base,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::BruteForce,
        Method::Newton,
        Method::Binary,
        Method::DualCut,
        Method::Base,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::BruteForce => "brute-force",
            Method::Newton => "newton",
            Method::Binary => "binary",
            Method::DualCut => "dualcut",
            Method::Base => "base",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidSpec(format!("unknown method '{s}'")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NewtonIterate {
    pub lambda: Rational,
    pub set: Subset,
    pub value: Rational,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct NewtonTrace {
    pub iterates: Vec<NewtonIterate>,
    pub sfm_calls: u64,
}

impl NewtonTrace {
    /// Number of `λ` updates.
    pub fn iterations(&self) -> usize {
        self.iterates.len().saturating_sub(1)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LineSearchResult {
    pub lambda_star: Rational,
    /// `f(S*) = λ*·d(S*)` with `d(S*) > 0`.
    pub tight_set: Subset,
    pub method: Method,
    pub newton: Option<NewtonTrace>,
    pub engine: Option<EngineSummary>,
    pub sfm_calls: u64,
    pub oracle_calls: u64,
}

impl LineSearchResult {
    pub fn newton_iterations(&self) -> usize {
        self.newton.as_ref().map_or(0, NewtonTrace::iterations)
    }

    /// `1_{S*}/d(S*)`, an optimal point of `min F(x)` over `d⊤x = 1, x ≥ 0`.
    pub fn dual_point(&self, d: &Direction) -> Vec<Rational> {
        let total = rational::int(d.of(self.tight_set));
        (0..d.len())
            .map(|i| {
                if self.tight_set.contains(i) {
                    total.recip()
                } else {
                    Rational::zero()
                }
            })
            .collect()
    }
}

/// `1/‖d‖₁²`, the minimum gap between distinct ratios `f(S)/d(S)`.
pub fn ladder_spacing(d: &Direction) -> Rational {
    let n1 = d.norm1();
    rational::ratio(1, n1 * n1)
}

/// `λ_S = f(S)/d(S)`, or `None` when `d(S) ≤ 0`.
pub fn ladder_value(f: &Oracle, d: &Direction, s: Subset) -> Option<Rational> {
    let ds = d.of(s);
    (ds > 0).then(|| Rational::new(f.eval(s), BigInt::from(ds)))
}

/// Cheapest upper bound on `λ*`: the best singleton ratio.
pub fn upper_bound(f: &Oracle, d: &Direction) -> Rational {
    d.positive_support()
        .map(|e| Rational::new(f.eval(Subset::singleton(e)), BigInt::from(d.get(e))))
        .min()
        .expect("direction has a positive entry")
}

/// `(g(λ), minimal minimizer)`, computed exactly through the integral oracle
/// `q·f − p·d`.
pub fn envelope(f: &Oracle, d: &Direction, lambda: &Rational) -> Result<(Rational, Subset)> {
    envelope_with(f, d, lambda, SfmMethod::default())
}

pub fn envelope_with(
    f: &Oracle,
    d: &Direction,
    lambda: &Rational,
    method: SfmMethod,
) -> Result<(Rational, Subset)> {
    d.check_len(f.n())?;
    let h = newton_scale(f, d, lambda);
    let r = sfm::minimize(&h, method)?;
    let value = Rational::new(r.min_value, lambda.denom().clone());
    Ok((value, r.minimal_minimizer))
}

/// Reference `λ* = min{f(S)/d(S) : d(S) > 0}` by enumeration (`n ≤ 20`).
pub fn brute_force(f: &Oracle, d: &Direction) -> Result<LineSearchResult> {
    let n = f.n();
    d.check_len(n)?;
    check_enumerable(n, 20)?;
    let before = f.calls();
    let mut best: Option<(Rational, Subset)> = None;
    for s in Subset::all(n) {
        if let Some(r) = ladder_value(f, d, s) {
            if best.as_ref().is_none_or(|(b, _)| r < *b) {
                best = Some((r, s));
            }
        }
    }
    let (lambda_star, tight_set) = best.expect("direction has a positive entry");
    Ok(LineSearchResult {
        lambda_star,
        tight_set,
        method: Method::BruteForce,
        newton: None,
        engine: None,
        sfm_calls: 0,
        oracle_calls: f.calls() - before,
    })
}

/// Discrete Newton from `λ0 ≥ λ*`.
pub fn discrete_newton(f: &Oracle, d: &Direction, lambda0: &Rational) -> Result<LineSearchResult> {
    discrete_newton_with(f, d, lambda0, SfmMethod::default())
}

pub fn discrete_newton_with(
    f: &Oracle,
    d: &Direction,
    lambda0: &Rational,
    method: SfmMethod,
) -> Result<LineSearchResult> {
    d.check_len(f.n())?;
    if lambda0.is_negative() {
        return Err(Error::BadStart { lambda0: rational::format(lambda0) });
    }
    let before = f.calls();
    let mut trace = NewtonTrace::default();
    let mut lambda = lambda0.clone();
    let mut previous: Option<Subset> = None;
    loop {
        let (value, set) = envelope_with(f, d, &lambda, method)?;
        trace.sfm_calls += 1;
        trace.iterates.push(NewtonIterate {
            lambda: lambda.clone(),
            set,
            value: value.clone(),
        });
        if !value.is_negative() {
            let tight_set = match previous {
                Some(s) => s,
                None => verify_start(f, d, &lambda, method, &mut trace)?,
            };
            return Ok(LineSearchResult {
                lambda_star: lambda,
                tight_set,
                method: Method::Newton,
                sfm_calls: trace.sfm_calls,
                newton: Some(trace),
                engine: None,
                oracle_calls: f.calls() - before,
            });
        }
        let next = ladder_value(f, d, set).ok_or_else(|| {
            Error::InvariantViolation(format!(
                "negative envelope at {set} with d(S) ≤ 0; the oracle is not nonnegative"
            ))
        })?;
        if next >= lambda {
            return Err(Error::InvariantViolation(format!(
                "Newton iterate did not decrease: {} -> {}",
                rational::format(&lambda),
                rational::format(&next)
            )));
        }
        previous = Some(set);
        lambda = next;
    }
}

/// `g(λ0) = 0` on the first step: `λ0` is `λ*` only if the envelope turns
/// negative within one ladder step and the set responsible sits at `λ0`.
fn verify_start(
    f: &Oracle,
    d: &Direction,
    lambda0: &Rational,
    method: SfmMethod,
    trace: &mut NewtonTrace,
) -> Result<Subset> {
    let bad = || Error::BadStart { lambda0: rational::format(lambda0) };
    let probe = lambda0 + ladder_spacing(d);
    let (value, set) = envelope_with(f, d, &probe, method)?;
    trace.sfm_calls += 1;
    if !value.is_negative() {
        return Err(bad());
    }
    match ladder_value(f, d, set) {
        Some(r) if r == *lambda0 => Ok(set),
        _ => Err(bad()),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BinarySearch {
    /// `λ̃ ≤ λ*` with `λ* ≤ λ̃ + eps`.
    pub lambda: Rational,
    pub iterations: usize,
}

/// `⌈log₂((hi − lo)/eps)⌉`, or 0 when `eps ≥ hi − lo`.
pub fn bisection_steps(lo: &Rational, hi: &Rational, eps: &Rational) -> usize {
    let mut width = hi - lo;
    let mut k = 0;
    while width > *eps {
        width /= rational::int(2);
        k += 1;
    }
    k
}

/// Feasibility bisection with one membership test per step.
pub fn binary_search(
    f: &Oracle,
    d: &Direction,
    lo: &Rational,
    hi: &Rational,
    eps: &Rational,
) -> Result<BinarySearch> {
    binary_search_with(f, d, lo, hi, eps, SfmMethod::default())
}

pub fn binary_search_with(
    f: &Oracle,
    d: &Direction,
    lo: &Rational,
    hi: &Rational,
    eps: &Rational,
    method: SfmMethod,
) -> Result<BinarySearch> {
    d.check_len(f.n())?;
    if !eps.is_positive() || lo > hi {
        return Err(Error::InvalidSpec(format!(
            "binary search needs lo ≤ hi and eps > 0, got [{}, {}] eps {}",
            rational::format(lo),
            rational::format(hi),
            rational::format(eps)
        )));
    }
    let steps = bisection_steps(lo, hi, eps);
    let (mut lo, mut hi) = (lo.clone(), hi.clone());
    for _ in 0..steps {
        let mid = (&lo + &hi) / rational::int(2);
        if sfm::membership(f, &d.scaled(&mid), method)?.inside {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(BinarySearch { lambda: lo, iterations: steps })
}

/// Bisection down to one ladder step followed by Newton, reported as a full
/// line-search result.
pub fn solve_binary(f: &Oracle, d: &Direction, eps: Option<&Rational>) -> Result<LineSearchResult> {
    solve_binary_with(f, d, eps, SfmMethod::default())
}

pub fn solve_binary_with(
    f: &Oracle,
    d: &Direction,
    eps: Option<&Rational>,
    method: SfmMethod,
) -> Result<LineSearchResult> {
    let before = f.calls();
    let eps = eps.cloned().unwrap_or_else(|| ladder_spacing(d));
    let hi = upper_bound(f, d);
    let b = binary_search_with(f, d, &Rational::zero(), &hi, &eps, method)?;
    let start = (&b.lambda + &eps).min(hi);
    let mut r = discrete_newton_with(f, d, &start, method)?;
    r.method = Method::Binary;
    r.sfm_calls += b.iterations as u64;
    r.oracle_calls = f.calls() - before;
    Ok(r)
}

/// Newton from the singleton upper bound.
pub fn solve_newton(f: &Oracle, d: &Direction) -> Result<LineSearchResult> {
    solve_newton_with(f, d, SfmMethod::default())
}

pub fn solve_newton_with(f: &Oracle, d: &Direction, method: SfmMethod) -> Result<LineSearchResult> {
    let before = f.calls();
    let mut r = discrete_newton_with(f, d, &upper_bound(f, d), method)?;
    r.oracle_calls = f.calls() - before;
    Ok(r)
}

/// `F(x)` for a rational point.
pub fn dual_value(f: &Oracle, x: &[Rational]) -> Rational {
    lovasz::evaluate(f, x)
}
