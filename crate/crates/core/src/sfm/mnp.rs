//! Fujishige–Wolfe minimum-norm point.
//!
//! A float phase does the bulk of the work. Its active orders then seed an
//! exact rational run of the same algorithm, which ends at the true
//! minimum-norm point `x*` of `B(f)`; `{x* < 0}` and `{x* ≤ 0}` are the
//! smallest and largest minimizers and `x*⁻(E)` is the minimum value.

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::{SfmResult, SfmStats};
use crate::ground::{Oracle, Subset};
use crate::lovasz::{ascending_order, dot, vertex_for_order, BaseVertex, GreedyOrder};
use crate::rational::{self, Rational};
use crate::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-10;

const DROP_WEIGHT: f64 = 1e-14;

#[derive(Clone, Debug)]
pub struct MnpState {
    pub active: Vec<BaseVertex<f64>>,
    pub weights: Vec<f64>,
    pub point: Vec<f64>,
}

impl MnpState {
    fn single(vertex: BaseVertex<f64>) -> Self {
        let point = vertex.v.clone();
        MnpState {
            active: vec![vertex],
            weights: vec![1.0],
            point,
        }
    }

    fn recompute_point(&mut self) {
        let n = self.point.len();
        self.point = (0..n)
            .map(|i| self.active.iter().zip(&self.weights).map(|(a, w)| w * a.v[i]).sum())
            .collect();
    }

    fn drop_small(&mut self) {
        let mut k = 0;
        while k < self.active.len() {
            if self.weights[k] <= DROP_WEIGHT {
                self.active.remove(k);
                self.weights.remove(k);
            } else {
                k += 1;
            }
        }
        let total: f64 = self.weights.iter().sum();
        self.weights.iter_mut().for_each(|w| *w /= total);
    }
}

/// Outcome of the float phase alone.
#[derive(Clone, Debug)]
pub struct MnpRun {
    pub state: MnpState,
    /// `‖x‖²` after every major cycle, in the scaled units of the run.
    pub norm_history: Vec<f64>,
    pub major_cycles: usize,
    pub minor_cycles: usize,
    /// The Wolfe gap dropped below `tol` (as opposed to stalling or the cap).
    pub converged: bool,
}

pub fn major_cycle_cap(n: usize) -> usize {
    10 * n.pow(3) + 1000
}

fn scale_of(f: &Oracle) -> f64 {
    rational::to_f64(&Rational::from_integer(f.m_bound())).max(1.0)
}

fn scaled_vertex(f: &Oracle, order: GreedyOrder, scale: f64) -> BaseVertex<f64> {
    let v = vertex_for_order::<f64, _>(f, &order).into_iter().map(|x| x / scale).collect();
    BaseVertex { order, v }
}

/// Weights of the affine minimum-norm point of the active vertices, or
/// `None` if the Gram system is numerically singular.
fn affine_weights(active: &[BaseVertex<f64>]) -> Option<Vec<f64>> {
    let k = active.len();
    let n = active[0].v.len();
    let v = DMatrix::from_fn(n, k, |i, j| active[j].v[i]);
    let gram = v.transpose() * &v;
    let c = (gram.trace() / k as f64).max(1.0);
    let g = gram.add_scalar(c);
    let chol = g.cholesky()?;
    let sol = chol.solve(&DVector::from_element(k, 1.0));
    let sum: f64 = sol.iter().sum();
    if !sum.is_finite() || sum.abs() < f64::MIN_POSITIVE {
        return None;
    }
    let alpha: Vec<f64> = sol.iter().map(|a| a / sum).collect();
    alpha.iter().all(|a| a.is_finite()).then_some(alpha)
}

fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|a| a * a).sum()
}

/// Float Wolfe iterations.
pub fn run_mnp(f: &Oracle, tol: f64) -> MnpRun {
    let n = f.n();
    let scale = scale_of(f);
    let identity = GreedyOrder { perm: (0..n).collect() };
    let mut state = MnpState::single(scaled_vertex(f, identity, scale));
    let mut run = MnpRun {
        state: state.clone(),
        norm_history: vec![norm2(&state.point)],
        major_cycles: 0,
        minor_cycles: 0,
        converged: false,
    };
    let cap = major_cycle_cap(n);
    while run.major_cycles < cap {
        run.major_cycles += 1;
        let x = state.point.clone();
        let q = scaled_vertex(f, ascending_order(&x), scale);
        let xx = norm2(&x);
        let width = state
            .active
            .iter()
            .map(|a| norm2(&a.v))
            .fold(norm2(&q.v), f64::max);
        if xx - dot(&x, &q.v) <= tol * width.max(1.0) {
            run.converged = true;
            break;
        }
        if state.active.iter().any(|a| a.v == q.v) || state.active.len() > n {
            break;
        }
        state.active.push(q);
        state.weights.push(0.0);
        loop {
            run.minor_cycles += 1;
            let Some(alpha) = affine_weights(&state.active) else {
                let best = state
                    .active
                    .iter()
                    .min_by(|a, b| norm2(&a.v).total_cmp(&norm2(&b.v)))
                    .cloned()
                    .expect("active set is never empty");
                state = MnpState::single(best);
                break;
            };
            if alpha.iter().all(|&a| a > DROP_WEIGHT) {
                state.weights = alpha;
                state.recompute_point();
                break;
            }
            let theta = state
                .weights
                .iter()
                .zip(&alpha)
                .filter(|(_, &a)| a <= DROP_WEIGHT)
                .map(|(&w, &a)| if w - a > 0.0 { w / (w - a) } else { 0.0 })
                .fold(1.0, f64::min);
            for (w, a) in state.weights.iter_mut().zip(&alpha) {
                *w = (1.0 - theta) * *w + theta * a;
            }
            state.drop_small();
            state.recompute_point();
            if state.active.len() <= 1 {
                break;
            }
        }
        run.norm_history.push(norm2(&state.point));
    }
    run.state = state;
    run
}

struct ExactVertex {
    v: Vec<Rational>,
}

fn exact_vertex(f: &Oracle, order: GreedyOrder) -> ExactVertex {
    ExactVertex {
        v: vertex_for_order::<Rational, _>(f, &order),
    }
}

/// Solves `[G 1; 1ᵀ 0][α; μ] = [0; 1]` exactly. `None` when the active
/// vertices are affinely dependent.
fn exact_affine_weights(active: &[ExactVertex]) -> Option<Vec<Rational>> {
    let k = active.len();
    let m = k + 1;
    let mut a: Vec<Vec<Rational>> = vec![vec![Rational::zero(); m + 1]; m];
    for i in 0..k {
        for j in i..k {
            let g = dot(&active[i].v, &active[j].v);
            a[i][j] = g.clone();
            a[j][i] = g;
        }
        a[i][k] = Rational::one();
        a[k][i] = Rational::one();
    }
    a[k][m] = Rational::one();
    for col in 0..m {
        let pivot = (col..m).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        let inv = a[col][col].recip();
        for c in col..=m {
            a[col][c] = &a[col][c] * &inv;
        }
        for r in 0..m {
            if r != col && !a[r][col].is_zero() {
                let factor = a[r][col].clone();
                for c in col..=m {
                    let t = &factor * &a[col][c];
                    a[r][c] -= t;
                }
            }
        }
    }
    Some((0..k).map(|i| a[i][m].clone()).collect())
}

fn combine(active: &[ExactVertex], weights: &[Rational], n: usize) -> Vec<Rational> {
    (0..n)
        .map(|i| {
            active
                .iter()
                .zip(weights)
                .fold(Rational::zero(), |acc, (a, w)| acc + w * &a.v[i])
        })
        .collect()
}

/// Exact Wolfe from the float active set. Returns the minimum-norm point.
fn exact_polish(f: &Oracle, float: &MnpState, cap: usize, stats: &mut SfmStats) -> Result<Vec<Rational>> {
    let n = f.n();
    let mut ranked: Vec<(f64, GreedyOrder)> = float
        .active
        .iter()
        .zip(&float.weights)
        .map(|(a, &w)| (w, a.order.clone()))
        .collect();
    ranked.sort_by(|a, b| b.0.total_cmp(&a.0));

    let mut active: Vec<ExactVertex> = Vec::new();
    let mut weights: Vec<Rational> = Vec::new();
    for (w, order) in ranked {
        let candidate = exact_vertex(f, order);
        active.push(candidate);
        if active.len() > 1 && exact_affine_weights(&active).is_none() {
            active.pop();
            continue;
        }
        weights.push(rational::from_f64(w.max(DROP_WEIGHT)));
    }
    let total = weights.iter().fold(Rational::zero(), |acc, w| acc + w);
    weights.iter_mut().for_each(|w| *w = &*w / &total);

    let mut major = 0;
    let mut pending_minor = true;
    loop {
        if pending_minor {
            loop {
                stats.minor_cycles += 1;
                let alpha = match exact_affine_weights(&active) {
                    Some(alpha) => alpha,
                    None => {
                        return Err(Error::InvariantViolation(
                            "exact corral became affinely dependent".into(),
                        ))
                    }
                };
                if alpha.iter().all(|a| a.is_positive()) {
                    weights = alpha;
                    break;
                }
                let theta = weights
                    .iter()
                    .zip(&alpha)
                    .filter(|(_, a)| !a.is_positive())
                    .map(|(w, a)| w / (w - a))
                    .min()
                    .expect("some weight is non-positive");
                let mut k = 0;
                let mut next = Vec::with_capacity(weights.len());
                for (w, a) in weights.iter().zip(&alpha) {
                    next.push((Rational::one() - &theta) * w + &theta * a);
                }
                weights = next;
                while k < active.len() {
                    if weights[k].is_zero() {
                        active.remove(k);
                        weights.remove(k);
                    } else {
                        k += 1;
                    }
                }
            }
        }
        let x = combine(&active, &weights, n);
        let q = exact_vertex(f, ascending_order(&x));
        if dot(&x, &q.v) >= dot(&x, &x) {
            return Ok(x);
        }
        major += 1;
        if major > cap {
            return Err(Error::NotConverged { major_cycles: stats.major_cycles + major });
        }
        active.push(q);
        weights.push(Rational::zero());
        pending_minor = true;
    }
}

/// Minimizes an integral submodular function with Wolfe's algorithm. The
/// result is always exact and extremal when it is returned at all.
pub fn minimize_mnp(f: &Oracle, tol: f64) -> Result<SfmResult> {
    let n = f.n();
    if n == 0 {
        return Err(Error::InvalidSpec("empty ground set".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidSpec(format!("tolerance must be positive, got {tol}")));
    }
    let before = f.calls();
    let run = run_mnp(f, tol);
    let mut stats = SfmStats {
        major_cycles: run.major_cycles,
        minor_cycles: run.minor_cycles,
        ..SfmStats::default()
    };
    let x = exact_polish(f, &run.state, major_cycle_cap(n), &mut stats)?;

    let minimal = Subset::from_elements((0..n).filter(|&i| x[i].is_negative()));
    let maximal = Subset::from_elements((0..n).filter(|&i| !x[i].is_positive()));
    let lower = x
        .iter()
        .filter(|v| v.is_negative())
        .fold(Rational::zero(), |acc, v| acc + v);
    let min_value = f.eval(minimal);
    let check: BigInt = f.eval(maximal);
    if Rational::from_integer(min_value.clone()) != lower || check != min_value {
        return Err(Error::InvariantViolation(format!(
            "minimum-norm point certificate failed: f({minimal}) = {min_value}, x⁻(E) = {lower}"
        )));
    }
    stats.oracle_calls = f.calls() - before;
    Ok(SfmResult {
        min_value,
        minimal_minimizer: minimal,
        maximal_minimizer: maximal,
        certified: true,
        extremal: true,
        stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ground::family::{random_direction, random_spec, FAMILY_NAMES};
    use crate::ground::{make_family, newton_scale, Direction, FamilySpec};
    use crate::rational::ratio;
    use crate::sfm::minimize_bruteforce;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn small_example_is_zero() {
        let f = make_family(2, &FamilySpec::Explicit { values: vec![0, 2, 2, 3] }).unwrap();
        let r = minimize_mnp(&f, DEFAULT_TOL).unwrap();
        assert_eq!(r.min_value, BigInt::zero());
        assert!(r.certified);
        assert_eq!(r.minimal_minimizer, Subset::EMPTY);
    }

    #[test]
    fn modular_function() {
        let w = [3i64, -2, 0, -5, 1];
        let zero = make_family(5, &FamilySpec::Explicit { values: vec![0; 32] }).unwrap();
        let h = crate::ground::scaled_shift(&zero, BigInt::one(), w.iter().map(|&v| BigInt::from(-v)).collect());
        let r = minimize_mnp(&h, DEFAULT_TOL).unwrap();
        assert_eq!(r.min_value, BigInt::from(-7));
        assert_eq!(r.minimal_minimizer, Subset::from_elements([1, 3]));
        assert_eq!(r.maximal_minimizer, Subset::from_elements([1, 2, 3]));
        assert!(r.stats.major_cycles <= 6);
    }

    #[test]
    fn matches_bruteforce_with_extremal_sets() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for family in FAMILY_NAMES {
            for n in 1..=10 {
                let f = make_family(n, &random_spec(family, n, &mut rng).unwrap()).unwrap();
                let d = Direction::new(random_direction(n, &mut rng)).unwrap();
                let lambda = ratio(rng.random_range(0..40), rng.random_range(1..9));
                let h = newton_scale(&f, &d, &lambda);
                let m = minimize_mnp(&h, DEFAULT_TOL).unwrap();
                let b = minimize_bruteforce(&h).unwrap();
                assert_eq!(m.min_value, b.min_value, "{family} n={n}");
                assert_eq!(m.minimal_minimizer, b.minimal_minimizer, "{family} n={n}");
                assert_eq!(m.maximal_minimizer, b.maximal_minimizer, "{family} n={n}");
            }
        }
    }

    #[test]
    fn huge_values_still_exact() {
        let f = make_family(12, &FamilySpec::IntervalGeometric {}).unwrap();
        let d = Direction::new((1..=12).map(|i| i * 3 - 1).collect()).unwrap();
        for lambda in [ratio(1, 1), ratio(4, 1), ratio(1 << 20, 3)] {
            let h = newton_scale(&f, &d, &lambda);
            let m = minimize_mnp(&h, DEFAULT_TOL).unwrap();
            assert_eq!(m.min_value, minimize_bruteforce(&h).unwrap().min_value);
        }
    }

    #[test]
    fn norm_non_increasing() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for family in FAMILY_NAMES {
            for n in 2..=12 {
                let f = make_family(n, &random_spec(family, n, &mut rng).unwrap()).unwrap();
                let d = Direction::new(random_direction(n, &mut rng)).unwrap();
                let h = newton_scale(&f, &d, &ratio(rng.random_range(1..20), 4));
                let run = run_mnp(&h, DEFAULT_TOL);
                for w in run.norm_history.windows(2) {
                    assert!(w[1] <= w[0] * (1.0 + 1e-9) + 1e-12, "{family} n={n}: {w:?}");
                }
                let total: f64 = run.state.weights.iter().sum();
                assert!((total - 1.0).abs() < 1e-9);
                assert!(run.state.weights.iter().all(|&w| w >= 0.0));
            }
        }
    }
}
