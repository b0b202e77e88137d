//! The dual route to `λ*`: minimize the Lovász extension over
//! `{x ≥ 0 : d⊤x = 1}` with cutting planes on a reduced domain, snap to an
//! exactly feasible rational point, and finish with a few Newton steps from
//! the resulting upper bound.

mod engine;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

pub use engine::{cutting_plane_minimize, iteration_cap, run_engine, CutEngineState, Domain, EngineStatus};

use crate::ground::{check_enumerable, infinity_norm, lift, perturb, Direction, Oracle, SetOracle, Subset};
use crate::lovasz;
use crate::newton::{self, LineSearchResult, Method, NewtonTrace};
use crate::rational::{self, Rational};
use crate::sfm::{self, SfmMethod};
use crate::{Error, Result};

/// The dual restricted to the `n − 1` non-pivot coordinates.
#[derive(Clone, Debug)]
pub struct ReducedProblem {
    pub pivot: usize,
    pub d: Direction,
    pub d_rest: Vec<i64>,
    pub d_rest_f64: Vec<f64>,
    /// `‖f‖∞`, raised to 1 for the identically zero function.
    pub m: BigInt,
    /// `1/‖d‖₁²`.
    pub eps: Rational,
    /// `2M/ε`.
    pub r_box: Rational,
    /// `ε/(2M²)`.
    pub alpha: Rational,
    /// Side of the box actually handed to the engine.
    pub box_radius: f64,
}

impl ReducedProblem {
    pub fn new(f: &Oracle, d: &Direction) -> Result<Self> {
        d.check_len(f.n())?;
        let pivot = (0..d.len())
            .max_by_key(|&i| (d.get(i), std::cmp::Reverse(i)))
            .expect("direction is nonempty");
        let m = infinity_norm(f).max(BigInt::one());
        let eps = newton::ladder_spacing(d);
        let mr = Rational::from_integer(m.clone());
        let r_box = rational::int(2) * &mr / &eps;
        let alpha = &eps / (rational::int(2) * &mr * &mr);
        let d_rest: Vec<i64> = (0..d.len()).filter(|&i| i != pivot).map(|i| d.get(i)).collect();
        // The optimum 1_S/d(S) has entries at most 1/d(S) ≤ 1. When every
        // remaining entry is positive, Ω itself caps z_i at 1/d_i.
        let omega_cap = if !d_rest.is_empty() && d_rest.iter().all(|&v| v > 0) {
            1.0 / *d_rest.iter().min().expect("nonempty") as f64
        } else {
            1.0
        };
        let box_radius = omega_cap.min(rational::to_f64(&r_box));
        Ok(ReducedProblem {
            pivot,
            d: d.clone(),
            d_rest_f64: d_rest.iter().map(|&v| v as f64).collect(),
            d_rest,
            m,
            eps,
            r_box,
            alpha,
            box_radius,
        })
    }

    pub fn omega_dim(&self) -> usize {
        self.d.len() - 1
    }

    fn d_p(&self) -> i64 {
        self.d.get(self.pivot)
    }

    /// `ln κ` for `κ = n·R/(α·minwidth(Ω))` with `minwidth(Ω) ≥ 1/‖d‖₁`.
    pub fn ln_kappa(&self) -> f64 {
        let n = Rational::from_integer(BigInt::from(self.d.len()));
        let kappa = n * &self.r_box * rational::int(self.d.norm1()) / &self.alpha;
        rational::ln_rational(&kappa)
    }

    fn expand<T: Clone>(&self, z: &[T], pivot_value: T) -> Vec<T> {
        assert_eq!(z.len(), self.omega_dim(), "reduced point has wrong dimension");
        let mut x = Vec::with_capacity(self.d.len());
        x.extend_from_slice(&z[..self.pivot]);
        x.push(pivot_value);
        x.extend_from_slice(&z[self.pivot..]);
        x
    }
}

/// `x = z ⊕ ζ_p(z)` with `ζ_p(z) = (1 − d_rest⊤z)/d_p`, exactly.
pub fn lift_point(z: &[Rational], prob: &ReducedProblem) -> Vec<Rational> {
    let dz = prob
        .d_rest
        .iter()
        .zip(z)
        .fold(Rational::zero(), |acc, (&a, b)| acc + rational::int(a) * b);
    let zeta = (Rational::one() - dz) / rational::int(prob.d_p());
    prob.expand(z, zeta)
}

pub fn lift_point_f64(z: &[f64], prob: &ReducedProblem) -> Vec<f64> {
    let dz: f64 = prob.d_rest_f64.iter().zip(z).map(|(a, b)| a * b).sum();
    prob.expand(z, (1.0 - dz) / prob.d_p() as f64)
}

/// `φ(z) = F(lift_point(z))` and its chain-rule subgradient
/// `v_i − (d_i/d_p)·v_p`.
pub fn phi<O: SetOracle + ?Sized>(f: &O, prob: &ReducedProblem, z: &[f64]) -> (f64, Vec<f64>) {
    let x = lift_point_f64(z, prob);
    let (value, vertex) = lovasz::evaluate_with_subgradient(f, &x);
    let vp = vertex.v[prob.pivot] / prob.d_p() as f64;
    let g = (0..x.len())
        .filter(|&i| i != prob.pivot)
        .map(|i| vertex.v[i] - prob.d.get(i) as f64 * vp)
        .collect();
    (value, g)
}

/// Exact counterpart of [`phi`].
pub fn phi_exact<O: SetOracle + ?Sized>(
    f: &O,
    prob: &ReducedProblem,
    z: &[Rational],
) -> (Rational, Vec<Rational>) {
    let x = lift_point(z, prob);
    let (value, vertex) = lovasz::evaluate_with_subgradient(f, &x);
    let vp = &vertex.v[prob.pivot] / rational::int(prob.d_p());
    let g = (0..x.len())
        .filter(|&i| i != prob.pivot)
        .map(|i| &vertex.v[i] - rational::int(prob.d.get(i)) * &vp)
        .collect();
    (value, g)
}

/// Exactly feasible rational point from a float one: clamp negatives, shrink
/// onto `d_rest⊤z ≤ 1` if needed, then lift.
pub fn snap(prob: &ReducedProblem, z: &[f64]) -> Vec<Rational> {
    let mut z: Vec<Rational> = z
        .iter()
        .map(|&v| if v > 0.0 { rational::from_f64(v) } else { Rational::zero() })
        .collect();
    let dz = prob
        .d_rest
        .iter()
        .zip(&z)
        .fold(Rational::zero(), |acc, (&a, b)| acc + rational::int(a) * b);
    if dz > Rational::one() {
        z.iter_mut().for_each(|v| *v = &*v / &dz);
    }
    lift_point(&z, prob)
}

/// What the float phase contributed to a dual solve.
#[derive(Clone, Debug, PartialEq)]
pub struct EngineSummary {
    pub status: EngineStatus,
    pub iterations: usize,
    pub best_value: f64,
    pub certified_gap: f64,
    /// The snapped dual point `x̂`.
    pub x_hat: Vec<Rational>,
    /// `F(x̂)`, an upper bound on `λ*`.
    pub dual_value: Rational,
    /// The Newton start actually used.
    pub lambda0: Rational,
}

impl EngineSummary {
    pub fn certified(&self) -> bool {
        matches!(self.status, EngineStatus::Converged | EngineStatus::Trivial)
    }
}

#[derive(Clone, Debug)]
pub struct DualOptions {
    /// Engine target gap as a fraction of `ε`.
    pub target_fraction: Rational,
    pub sfm: SfmMethod,
    pub iteration_cap: Option<usize>,
}

impl Default for DualOptions {
    fn default() -> Self {
        DualOptions {
            target_fraction: rational::ratio(1, 4),
            sfm: SfmMethod::default(),
            iteration_cap: None,
        }
    }
}

pub fn solve_dual(f: &Oracle, d: &Direction) -> Result<LineSearchResult> {
    solve_dual_with(f, d, &DualOptions::default())
}

pub fn solve_dual_with(f: &Oracle, d: &Direction, options: &DualOptions) -> Result<LineSearchResult> {
    let before = f.calls();
    let prob = ReducedProblem::new(f, d)?;
    if f.n() == 1 {
        let lambda = Rational::new(f.eval(Subset::singleton(0)), BigInt::from(d.get(0)));
        let summary = EngineSummary {
            status: EngineStatus::Trivial,
            iterations: 0,
            best_value: rational::to_f64(&lambda),
            certified_gap: 0.0,
            x_hat: vec![rational::ratio(1, d.get(0))],
            dual_value: lambda.clone(),
            lambda0: lambda.clone(),
        };
        return Ok(LineSearchResult {
            lambda_star: lambda,
            tight_set: Subset::singleton(0),
            method: Method::DualCut,
            newton: Some(NewtonTrace::default()),
            engine: Some(summary),
            sfm_calls: 0,
            oracle_calls: f.calls() - before,
        });
    }

    let f_eps = perturb(f, &prob.eps);
    let target = rational::to_f64(&(&prob.eps * &options.target_fraction));
    let cap = options.iteration_cap.unwrap_or_else(|| iteration_cap(&prob));
    let state = run_engine(&f_eps, &prob, Domain::Reduced, target, cap);

    let x_hat = snap(&prob, &state.best_point);
    let dual_value: Rational = lovasz::evaluate(f, &x_hat);
    // the grid keeps the Newton oracles' denominators small
    let n1 = BigInt::from(d.norm1());
    let grid = BigInt::from(4) * &n1 * &n1;
    let lambda0 = rational::ceil_to_grid(&dual_value, &grid).min(newton::upper_bound(f, d));

    let mut result = newton::discrete_newton_with(f, d, &lambda0, options.sfm)?;
    result.method = Method::DualCut;
    result.engine = Some(EngineSummary {
        status: state.status,
        iterations: state.iterations,
        best_value: state.best_value,
        certified_gap: state.certified_gap,
        x_hat,
        dual_value,
        lambda0,
    });
    result.oracle_calls = f.calls() - before;
    Ok(result)
}

/// Line search over `B(f)`: the only candidate is `λ = f(E)/d(E)`, confirmed
/// by a membership test. The engine is rerun on the unconstrained dual as a
/// cross-check.
pub fn solve_dual_base(f: &Oracle, d: &Direction) -> Result<LineSearchResult> {
    solve_dual_base_with(f, d, SfmMethod::default())
}

pub fn solve_dual_base_with(f: &Oracle, d: &Direction, method: SfmMethod) -> Result<LineSearchResult> {
    d.check_len(f.n())?;
    let before = f.calls();
    let n = f.n();
    let full = Subset::full(n);
    let fe = f.eval(full);
    let de = d.of(full);
    if de == 0 {
        if fe.is_zero() {
            let mut r = newton::solve_newton_with(f, d, method)?;
            r.method = Method::Base;
            r.oracle_calls = f.calls() - before;
            return Ok(r);
        }
        return Err(Error::InfeasibleBaseLineSearch(format!(
            "d(E) = 0 but f(E) = {fe}"
        )));
    }
    let lambda = Rational::new(fe, BigInt::from(de));
    if lambda.is_negative() {
        return Err(Error::InfeasibleBaseLineSearch(format!(
            "f(E)/d(E) = {} is negative",
            rational::format(&lambda)
        )));
    }
    let m = sfm::membership(f, &d.scaled(&lambda), method)?;
    if !m.inside {
        return Err(Error::InfeasibleBaseLineSearch(format!(
            "{}·d violates the constraint of {}",
            rational::format(&lambda),
            m.violating_set.unwrap_or(Subset::EMPTY)
        )));
    }

    let mut engine = None;
    if n > 1 {
        let prob = ReducedProblem::new(f, d)?;
        let target = rational::to_f64(&prob.eps) / 4.0;
        let state = run_engine(f, &prob, Domain::FreeBox, target, iteration_cap(&prob));
        let reference = rational::to_f64(&lambda);
        let slack = rational::to_f64(&prob.eps) + 1e-9 * reference.abs().max(1.0);
        if state.status == EngineStatus::Converged && (state.best_value - reference).abs() > slack {
            return Err(Error::BaseVerificationMismatch(format!(
                "engine reached {} but f(E)/d(E) = {}",
                state.best_value,
                rational::format(&lambda)
            )));
        }
        let x_hat: Vec<Rational> = lift_point(
            &state.best_point.iter().map(|&v| rational::from_f64(v)).collect::<Vec<_>>(),
            &prob,
        );
        let dual_value = lovasz::evaluate(f, &x_hat);
        engine = Some(EngineSummary {
            status: state.status,
            iterations: state.iterations,
            best_value: state.best_value,
            certified_gap: state.certified_gap,
            x_hat,
            dual_value,
            lambda0: lambda.clone(),
        });
    }
    Ok(LineSearchResult {
        lambda_star: lambda,
        tight_set: full,
        method: Method::Base,
        newton: None,
        engine,
        sfm_calls: 1,
        oracle_calls: f.calls() - before,
    })
}

/// Compares `max{λ1 : λ1·d̂ + λ2·e_{n+1} ∈ B(f̂(·;C))}` with `λ*` over `P(f)`,
/// both by enumeration. `λ2` is forced to `f(E) − λ1·d(E)` by the equality
/// constraint on the lifted ground set.
pub fn verify_lifting(f: &Oracle, d: &Direction, c: &BigInt) -> Result<bool> {
    let n = f.n();
    d.check_len(n)?;
    check_enumerable(n, 10)?;
    let lifted = lift(f, c);
    let top = Subset::full(n + 1);
    let fe = lifted.eval(top);
    let de = d.of(Subset::full(n));
    let mut upper: Option<Rational> = None;
    let mut lower: Option<Rational> = None;
    for s in Subset::all(n + 1) {
        if s == top {
            continue;
        }
        // λ1·d(S∩E) + [n+1 ∈ S]·(f(E) − λ1·d(E)) ≤ f̂(S)
        let inner = s.without(n);
        let (coef, rhs) = if s.contains(n) {
            (d.of(inner) - de, lifted.eval(s) - &fe)
        } else {
            (d.of(inner), lifted.eval(s))
        };
        let rhs = Rational::from_integer(rhs);
        match coef.signum() {
            1 => {
                let b = rhs / rational::int(coef);
                if upper.as_ref().is_none_or(|u| b < *u) {
                    upper = Some(b);
                }
            }
            -1 => {
                let b = rhs / rational::int(coef);
                if lower.as_ref().is_none_or(|l| b > *l) {
                    lower = Some(b);
                }
            }
            _ => {
                if rhs.is_negative() {
                    return Ok(false);
                }
            }
        }
    }
    let Some(left) = upper else {
        return Ok(false);
    };
    if lower.is_some_and(|l| l > left) {
        return Ok(false);
    }
    Ok(left == newton::brute_force(f, d)?.lambda_star)
}

/// `M‖d‖₁ + 1`, the smallest lifting constant the equivalence guarantees.
pub fn safe_lifting_constant(f: &Oracle, d: &Direction) -> BigInt {
    infinity_norm(f) * BigInt::from(d.norm1()) + BigInt::one()
}
