//! Exact line search over extended polymatroids.
//!
//! Given an integral submodular function `f` with `f(∅) = 0` and `f ≥ 0`, and an
//! integral direction `d` with at least one positive entry, the solvers here find
//! the largest `λ` with `λ·d ∈ P(f)`, exactly, as a rational number.
//!
//! [`newton::discrete_newton`] iterates on the parametric envelope
//! `g(λ) = min_S f(S) − λ·d(S)`. [`dualcut::solve_dual`] minimizes the Lovász
//! extension over `{x ≥ 0, d·x = 1}` with an ellipsoid engine and rounds the
//! approximate optimum to the exact value on the integrality ladder.
//! [`newton::binary_search`] is the approximate bisection baseline, and
//! [`newton::brute_force`] enumerates for small ground sets.

pub mod dualcut;
pub mod error;
pub mod ground;
pub mod instance;
pub mod lovasz;
pub mod newton;
pub mod rational;
pub mod sfm;

pub use error::{Error, Result};
pub use ground::{Direction, Oracle, RealOracle, SetFunction, SetOracle, Subset};
pub use newton::{LineSearchResult, Method};
pub use rational::Rational;
pub use sfm::SfmMethod;
pub use instance::{Instance, InstanceFile};

/// Runs one line-search method on `f` and `d`.
pub fn solve(f: &Oracle, d: &Direction, method: Method) -> Result<LineSearchResult> {
    solve_with(f, d, method, SfmMethod::default())
}

/// [`solve`] with an explicit minimizer for the envelope and membership steps.
pub fn solve_with(f: &Oracle, d: &Direction, method: Method, sfm: SfmMethod) -> Result<LineSearchResult> {
    match method {
        Method::BruteForce => newton::brute_force(f, d),
        Method::Newton => newton::solve_newton_with(f, d, sfm),
        Method::Binary => newton::solve_binary_with(f, d, None, sfm),
        Method::DualCut => {
            let options = dualcut::DualOptions { sfm, ..Default::default() };
            dualcut::solve_dual_with(f, d, &options)
        }
        Method::Base => dualcut::solve_dual_base_with(f, d, sfm),
    }
}
