use super::{SfmResult, SfmStats};
use crate::ground::check_enumerable;
use crate::ground::{Oracle, Subset};
use crate::{Error, Result};

/// Exhaustive minimization over all `2^n` subsets (`n ≤ 20`).
///
/// Minimizers of a submodular function form a lattice, so the smallest and
/// largest ones are the intersection and union of all minimizers.
pub fn minimize_bruteforce(f: &Oracle) -> Result<SfmResult> {
    let n = f.n();
    check_enumerable(n, 20)?;
    let before = f.calls();
    let mut best = None;
    let mut minimal = Subset::full(n);
    let mut maximal = Subset::EMPTY;
    let mut minimizers = Vec::new();
    for s in Subset::all(n) {
        let v = f.eval(s);
        match &best {
            Some(b) if v > *b => continue,
            Some(b) if v == *b => {}
            _ => {
                best = Some(v);
                minimal = Subset::full(n);
                maximal = Subset::EMPTY;
                minimizers.clear();
            }
        }
        minimizers.push(s);
        minimal = minimal.intersection(s);
        maximal = maximal.union(s);
    }
    let min_value = best.expect("at least the empty set");
    let is_minimizer = |t: Subset| minimizers.binary_search(&t).is_ok();
    if !(is_minimizer(minimal) && is_minimizer(maximal)) {
        return Err(Error::InvariantViolation(
            "minimizers are not closed under union and intersection".into(),
        ));
    }
    Ok(SfmResult {
        min_value,
        minimal_minimizer: minimal,
        maximal_minimizer: maximal,
        certified: true,
        extremal: true,
        stats: SfmStats {
            oracle_calls: f.calls() - before,
            ..SfmStats::default()
        },
    })
}
