use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use super::Subset;
use crate::rational::{self, Rational};
use crate::{Error, Result};

/// An integral set function on `{0, …, n−1}`.
///
/// Implementors guarantee `eval(∅) = 0` and that `m_bound()` is an upper bound
/// on `max_S |f(S)|`. Submodularity is a contract checked by the constructors
/// and by the test suites, not on every call.
pub trait SetFunction: Send + Sync + fmt::Debug {
    fn n(&self) -> usize;

    fn eval(&self, s: Subset) -> BigInt;

    /// Floating-point value for the inner loops. Override when the family can
    /// avoid the big-integer round trip.
    fn eval_f64(&self, s: Subset) -> f64 {
        self.eval(s).to_f64().unwrap_or(f64::INFINITY)
    }

    fn m_bound(&self) -> BigInt;

    fn family(&self) -> String;
}

/// Shared, call-counting handle on an integral submodular function.
///
/// Clones share both the function and the counter.
#[derive(Clone)]
pub struct Oracle {
    func: Arc<dyn SetFunction>,
    calls: Arc<AtomicU64>,
    float_exact: bool,
}

impl Oracle {
    pub fn new(func: impl SetFunction + 'static) -> Self {
        let float_exact = func.m_bound().bits() < 53;
        Oracle {
            func: Arc::new(func),
            calls: Arc::new(AtomicU64::new(0)),
            float_exact,
        }
    }

    pub fn n(&self) -> usize {
        self.func.n()
    }

    pub fn eval(&self, s: Subset) -> BigInt {
        self.calls.fetch_add(1, Ordering::Relaxed);
        self.func.eval(s)
    }

    pub fn eval_f64(&self, s: Subset) -> f64 {
        self.calls.fetch_add(1, Ordering::Relaxed);
        self.func.eval_f64(s)
    }

    pub fn m_bound(&self) -> BigInt {
        self.func.m_bound()
    }

    pub fn family(&self) -> String {
        self.func.family()
    }

    /// Every value and every difference of two values is an exact `f64`.
    pub fn float_exact(&self) -> bool {
        self.float_exact
    }

    /// Number of evaluations made through this handle or its clones.
    pub fn calls(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }

    /// Full value table in mask order. Counts `2^n` calls.
    pub fn table(&self) -> Result<Vec<BigInt>> {
        check_enumerable(self.n(), 20)?;
        Ok(Subset::all(self.n()).map(|s| self.eval(s)).collect())
    }
}

impl fmt::Debug for Oracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Oracle")
            .field("func", &self.func)
            .field("calls", &self.calls())
            .finish()
    }
}

pub(crate) fn check_enumerable(n: usize, max: usize) -> Result<()> {
    if n > max {
        Err(Error::GroundSetTooLarge { n, max })
    } else {
        Ok(())
    }
}

/// Common read interface over integral and rational-valued set functions,
/// used by the Lovász extension routines.
pub trait SetOracle: Send + Sync {
    fn n(&self) -> usize;
    fn value_exact(&self, s: Subset) -> Rational;
    fn value_f64(&self, s: Subset) -> f64;
    /// Float differences of values are accurate; otherwise marginals must be
    /// taken exactly.
    fn float_exact(&self) -> bool;
}

impl SetOracle for Oracle {
    fn n(&self) -> usize {
        Oracle::n(self)
    }

    fn value_exact(&self, s: Subset) -> Rational {
        Rational::from_integer(self.eval(s))
    }

    fn value_f64(&self, s: Subset) -> f64 {
        self.eval_f64(s)
    }

    fn float_exact(&self) -> bool {
        self.float_exact
    }
}

/// Rational-valued set function: an integral oracle shifted by `eps` on every
/// nonempty set, so that `f_ε(∅) = 0` stays normalized.
#[derive(Clone, Debug)]
pub struct RealOracle {
    base: Oracle,
    eps: Rational,
    eps_f64: f64,
}

impl RealOracle {
    pub(crate) fn shifted(base: Oracle, eps: Rational) -> Self {
        let eps_f64 = rational::to_f64(&eps);
        RealOracle { base, eps, eps_f64 }
    }

    pub fn eval(&self, s: Subset) -> Rational {
        if s.is_empty() {
            return Rational::zero();
        }
        Rational::from_integer(self.base.eval(s)) + &self.eps
    }

    pub fn eps(&self) -> &Rational {
        &self.eps
    }

    pub fn base(&self) -> &Oracle {
        &self.base
    }
}

impl SetOracle for RealOracle {
    fn n(&self) -> usize {
        self.base.n()
    }

    fn value_exact(&self, s: Subset) -> Rational {
        self.eval(s)
    }

    fn value_f64(&self, s: Subset) -> f64 {
        if s.is_empty() {
            0.0
        } else {
            self.base.eval_f64(s) + self.eps_f64
        }
    }

    fn float_exact(&self) -> bool {
        self.base.float_exact()
    }
}

/// Integral line-search direction with at least one positive entry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Direction {
    d: Vec<i64>,
    norm1: i64,
}

impl Direction {
    pub fn new(d: Vec<i64>) -> Result<Self> {
        if !d.iter().any(|&v| v > 0) {
            return Err(Error::InvalidDirection(
                "at least one entry must be strictly positive".into(),
            ));
        }
        let norm1 = d
            .iter()
            .try_fold(0i64, |acc, v| acc.checked_add(v.checked_abs()?))
            .ok_or_else(|| Error::InvalidDirection("‖d‖₁ overflows i64".into()))?;
        Ok(Direction { d, norm1 })
    }

    pub fn len(&self) -> usize {
        self.d.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d.is_empty()
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.d
    }

    pub fn get(&self, i: usize) -> i64 {
        self.d[i]
    }

    pub fn norm1(&self) -> i64 {
        self.norm1
    }

    /// `d(S) = Σ_{i∈S} d_i`.
    pub fn of(&self, s: Subset) -> i64 {
        s.iter().map(|i| self.d[i]).sum()
    }

    pub fn positive_support(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.d.len()).filter(|&i| self.d[i] > 0)
    }

    /// `t·d` as an exact vector.
    pub fn scaled(&self, t: &Rational) -> Vec<Rational> {
        self.d.iter().map(|&v| t * rational::int(v)).collect()
    }

    pub(crate) fn check_len(&self, n: usize) -> Result<()> {
        if self.d.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: self.d.len(),
            });
        }
        Ok(())
    }
}

pub(crate) fn abs_sum(v: &[BigInt]) -> BigInt {
    v.iter().map(|x| x.abs()).sum()
}
