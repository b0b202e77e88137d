//! Ellipsoid-method cutting planes for `min φ` over the box-truncated
//! reduced domain.

use nalgebra::{DMatrix, DVector};

use super::{phi, ReducedProblem};
use crate::ground::SetOracle;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EngineStatus {
    /// The certified gap reached the target.
    Converged,
    IterationCap,
    /// The float localizer degenerated before the target was reached.
    Breakdown,
    /// Nothing to optimize (zero-dimensional domain).
    Trivial,
}

/// Which constraints the localizer must respect.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Domain {
    /// `z ≥ 0`, `d_rest⊤z ≤ 1`, `z ≤ R'`.
    Reduced,
    /// Only the symmetric box `|z_i| ≤ R'`, for the base-polytope problem.
    FreeBox,
}

#[derive(Clone, Debug)]
pub struct CutEngineState {
    pub center: Vec<f64>,
    pub shape: DMatrix<f64>,
    pub best_point: Vec<f64>,
    pub best_value: f64,
    pub lower_bound: f64,
    /// `best_value − lower_bound`.
    pub certified_gap: f64,
    pub iterations: usize,
    /// Largest single-step increase of `ln vol` seen (never positive in exact
    /// arithmetic).
    pub max_volume_increase: f64,
    pub status: EngineStatus,
}

/// `8·m²·ln κ + 1000` with `κ = n·R/(α·minwidth)` and `minwidth ≥ 1/‖d‖₁`.
pub fn iteration_cap(prob: &ReducedProblem) -> usize {
    let m = prob.omega_dim() as f64;
    let cap = 8.0 * m * m * prob.ln_kappa().max(1.0) + 1000.0;
    cap.min(1e9) as usize
}

/// Runs the engine and reports the state whatever the outcome.
pub fn run_engine<O: SetOracle + ?Sized>(
    f: &O,
    prob: &ReducedProblem,
    domain: Domain,
    target_gap: f64,
    cap: usize,
) -> CutEngineState {
    let m = prob.omega_dim();
    if m == 0 {
        let (value, _) = phi(f, prob, &[]);
        return CutEngineState {
            center: vec![],
            shape: DMatrix::zeros(0, 0),
            best_point: vec![],
            best_value: value,
            lower_bound: value,
            certified_gap: 0.0,
            iterations: 0,
            max_volume_increase: 0.0,
            status: EngineStatus::Trivial,
        };
    }
    if m == 1 {
        return bisect(f, prob, domain, target_gap, cap);
    }
    ellipsoid(f, prob, domain, target_gap, cap)
}

/// [`run_engine`] that turns anything but convergence into an error.
pub fn cutting_plane_minimize<O: SetOracle + ?Sized>(
    f: &O,
    prob: &ReducedProblem,
    target_gap: f64,
) -> Result<CutEngineState> {
    let cap = iteration_cap(prob);
    let state = run_engine(f, prob, Domain::Reduced, target_gap, cap);
    match state.status {
        EngineStatus::Converged | EngineStatus::Trivial => Ok(state),
        EngineStatus::IterationCap => Err(Error::IterationCapExceeded { cap }),
        EngineStatus::Breakdown => Err(Error::EngineBreakdown {
            iterations: state.iterations,
        }),
    }
}

/// A violated constraint `a⊤z ≤ b` at `z`, if any.
fn separating_cut(prob: &ReducedProblem, domain: Domain, z: &[f64]) -> Option<(Vec<f64>, f64)> {
    let m = z.len();
    let r = prob.box_radius;
    let unit = |i: usize, s: f64| {
        let mut a = vec![0.0; m];
        a[i] = s;
        a
    };
    match domain {
        Domain::Reduced => {
            if let Some(i) = (0..m).find(|&i| z[i] < 0.0) {
                return Some((unit(i, -1.0), 0.0));
            }
            let dz: f64 = prob.d_rest_f64.iter().zip(z).map(|(a, b)| a * b).sum();
            if dz > 1.0 {
                return Some((prob.d_rest_f64.clone(), 1.0));
            }
        }
        Domain::FreeBox => {
            if let Some(i) = (0..m).find(|&i| z[i] < -r) {
                return Some((unit(i, -1.0), r));
            }
        }
    }
    (0..m).find(|&i| z[i] > r).map(|i| (unit(i, 1.0), r))
}

fn initial_lower_bound(domain: Domain) -> f64 {
    match domain {
        // F ≥ 0 on the nonnegative orthant because f ≥ 0
        Domain::Reduced => 0.0,
        Domain::FreeBox => f64::NEG_INFINITY,
    }
}

fn ellipsoid<O: SetOracle + ?Sized>(
    f: &O,
    prob: &ReducedProblem,
    domain: Domain,
    target_gap: f64,
    cap: usize,
) -> CutEngineState {
    let m = prob.omega_dim();
    let mf = m as f64;
    let r = prob.box_radius;
    let (center, radius) = match domain {
        Domain::Reduced => (vec![r / 2.0; m], r * mf.sqrt()),
        Domain::FreeBox => (vec![0.0; m], 2.0 * r * mf.sqrt()),
    };
    let mut c = DVector::from_vec(center);
    let mut p = DMatrix::identity(m, m) * (radius * radius);
    let mut best_point = Vec::new();
    let mut best_value = f64::INFINITY;
    let mut lower = initial_lower_bound(domain);
    let mut log_volume = p.determinant().ln() / 2.0;
    let mut max_volume_increase = f64::NEG_INFINITY;
    let mut iterations = 0;
    let mut status = EngineStatus::IterationCap;

    while iterations < cap {
        iterations += 1;
        let z: Vec<f64> = c.iter().copied().collect();
        let (a, depth_num) = match separating_cut(prob, domain, &z) {
            Some((a, b)) => {
                let a = DVector::from_vec(a);
                let excess = a.dot(&c) - b;
                (a, excess)
            }
            None => {
                let (value, g) = phi(f, prob, &z);
                if value < best_value {
                    best_value = value;
                    best_point = z.clone();
                }
                let g = DVector::from_vec(g);
                let width = (g.dot(&(&p * &g))).max(0.0).sqrt();
                lower = lower.max(value - width);
                if best_value - lower <= target_gap || width == 0.0 {
                    if width == 0.0 {
                        lower = lower.max(value);
                    }
                    status = EngineStatus::Converged;
                    break;
                }
                (g, value - best_value)
            }
        };
        let pa = &p * &a;
        let apa = a.dot(&pa);
        if !(apa.is_finite() && apa > 0.0) {
            status = EngineStatus::Breakdown;
            break;
        }
        let s = apa.sqrt();
        let alpha = depth_num / s;
        if alpha >= 1.0 {
            status = EngineStatus::Breakdown;
            break;
        }
        let b = pa / s;
        let tau = (1.0 + mf * alpha) / (mf + 1.0);
        let sigma = 2.0 * (1.0 + mf * alpha) / ((mf + 1.0) * (1.0 + alpha));
        let delta = mf * mf * (1.0 - alpha * alpha) / (mf * mf - 1.0);
        c -= &b * tau;
        p = (&p - (&b * b.transpose()) * sigma) * delta;
        p = (&p + p.transpose()) * 0.5;
        let next = log_volume
            + 0.5 * (mf * delta.ln() + (1.0 - sigma).ln());
        if !next.is_finite() {
            status = EngineStatus::Breakdown;
            break;
        }
        max_volume_increase = max_volume_increase.max(next - log_volume);
        log_volume = next;
    }
    finish(
        c.iter().copied().collect(),
        p,
        best_point,
        best_value,
        lower,
        iterations,
        max_volume_increase,
        status,
    )
}

/// One-dimensional domain: interval bisection on the subgradient sign.
fn bisect<O: SetOracle + ?Sized>(
    f: &O,
    prob: &ReducedProblem,
    domain: Domain,
    target_gap: f64,
    cap: usize,
) -> CutEngineState {
    let r = prob.box_radius;
    let (mut lo, mut hi) = match domain {
        Domain::Reduced => {
            let dr = prob.d_rest_f64[0];
            (0.0, if dr > 0.0 { r.min(1.0 / dr) } else { r })
        }
        Domain::FreeBox => (-r, r),
    };
    let mut best_point = Vec::new();
    let mut best_value = f64::INFINITY;
    let mut lower = initial_lower_bound(domain);
    let mut cuts: Vec<(f64, f64, f64)> = Vec::new();
    let mut iterations = 0;
    let mut status = EngineStatus::IterationCap;
    let mut previous_width = hi - lo;
    let mut max_volume_increase = f64::NEG_INFINITY;
    while iterations < cap {
        iterations += 1;
        let z = 0.5 * (lo + hi);
        let (value, g) = phi(f, prob, &[z]);
        let g = g[0];
        if value < best_value {
            best_value = value;
            best_point = vec![z];
        }
        cuts.push((z, value, g));
        if g == 0.0 {
            lower = lower.max(value);
        } else if g > 0.0 {
            hi = z;
        } else {
            lo = z;
        }
        // every cut is a global underestimator; the minimizer stays in [lo, hi]
        for &(zk, vk, gk) in &cuts {
            lower = lower.max(vk + (gk * (lo - zk)).min(gk * (hi - zk)));
        }
        let width = hi - lo;
        max_volume_increase = max_volume_increase.max(width.ln() - previous_width.ln());
        previous_width = width;
        if best_value - lower <= target_gap || g == 0.0 {
            status = EngineStatus::Converged;
            break;
        }
        if width <= f64::EPSILON * hi.abs().max(lo.abs()).max(1.0) {
            status = EngineStatus::Breakdown;
            break;
        }
    }
    let mut shape = DMatrix::zeros(1, 1);
    shape[(0, 0)] = ((hi - lo) / 2.0).powi(2);
    finish(
        vec![0.5 * (lo + hi)],
        shape,
        best_point,
        best_value,
        lower,
        iterations,
        max_volume_increase,
        status,
    )
}

#[allow(clippy::too_many_arguments)]
fn finish(
    center: Vec<f64>,
    shape: DMatrix<f64>,
    best_point: Vec<f64>,
    best_value: f64,
    lower_bound: f64,
    iterations: usize,
    max_volume_increase: f64,
    mut status: EngineStatus,
) -> CutEngineState {
    if best_point.is_empty() {
        // never reached the feasible region
        status = EngineStatus::Breakdown;
    }
    let best_point = if best_point.is_empty() {
        vec![0.0; center.len()]
    } else {
        best_point
    };
    CutEngineState {
        center,
        shape,
        best_point,
        best_value,
        lower_bound,
        certified_gap: best_value - lower_bound,
        iterations,
        max_volume_increase,
        status,
    }
}
