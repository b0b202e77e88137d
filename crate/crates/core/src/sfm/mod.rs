//! Submodular function minimization: exhaustive reference, Fujishige–Wolfe
//! minimum-norm-point workhorse, and `P(f)` membership on top of them.

mod brute;
mod mnp;

use num_bigint::BigInt;
use num_traits::Signed;

pub use brute::minimize_bruteforce;
pub use mnp::{minimize_mnp, run_mnp, MnpRun, MnpState, DEFAULT_TOL};

use crate::ground::{scaled_shift, Oracle, Subset};
use crate::rational::{self, Rational};
use crate::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SfmStats {
    pub oracle_calls: u64,
    pub major_cycles: usize,
    pub minor_cycles: usize,
    /// Set when minimum-norm-point failed to certify and enumeration took over.
    pub fell_back: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SfmResult {
    pub min_value: BigInt,
    pub minimal_minimizer: Subset,
    pub maximal_minimizer: Subset,
    /// `min_value` is proven exact.
    pub certified: bool,
    /// The two minimizers are proven to be the smallest and largest ones.
    pub extremal: bool,
    pub stats: SfmStats,
}

/// Which SFM routine to call.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SfmMethod {
    BruteForce,
    Mnp { tol: f64 },
    /// Minimum-norm point, falling back to enumeration for `n ≤ 20` when it
    /// cannot certify.
    Auto { tol: f64 },
}

impl Default for SfmMethod {
    fn default() -> Self {
        SfmMethod::Auto { tol: DEFAULT_TOL }
    }
}

/// Tiny ground sets are cheaper to enumerate than to run Wolfe on.
const ENUMERATE_BELOW: usize = 4;

pub fn minimize(f: &Oracle, method: SfmMethod) -> Result<SfmResult> {
    match method {
        SfmMethod::BruteForce => minimize_bruteforce(f),
        SfmMethod::Mnp { tol } => minimize_mnp(f, tol),
        SfmMethod::Auto { tol } => {
            if f.n() <= ENUMERATE_BELOW {
                return minimize_bruteforce(f);
            }
            match minimize_mnp(f, tol) {
                Err(Error::NotConverged { major_cycles }) if f.n() <= 20 => {
                    let mut r = minimize_bruteforce(f)?;
                    r.stats.fell_back = true;
                    r.stats.major_cycles += major_cycles;
                    Ok(r)
                }
                other => other,
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Membership {
    pub inside: bool,
    /// A set with `y(S) > f(S)` when outside.
    pub violating_set: Option<Subset>,
    /// `min_S f(S) − y(S)`.
    pub slack: Rational,
}

/// Decides `y ∈ P(f)` by minimizing `q·f − (q·y)` for the common denominator
/// `q` of `y`.
pub fn membership(f: &Oracle, y: &[Rational], method: SfmMethod) -> Result<Membership> {
    if y.len() != f.n() {
        return Err(Error::DimensionMismatch {
            expected: f.n(),
            got: y.len(),
        });
    }
    let q = rational::common_denominator(y);
    let qr = Rational::from_integer(q.clone());
    let w = y.iter().map(|v| (v * &qr).to_integer()).collect();
    let h = scaled_shift(f, q, w);
    let r = minimize(&h, method)?;
    let inside = !r.min_value.is_negative();
    Ok(Membership {
        inside,
        violating_set: (!inside).then_some(r.minimal_minimizer),
        slack: Rational::from_integer(r.min_value) / qr,
    })
}
