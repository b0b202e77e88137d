//! Ground sets, subsets, set-function oracles, built-in families and the
//! oracle-level constructions (lifting, perturbation, translation, scaling).

pub mod family;
mod oracle;
mod subset;
mod transform;

use num_bigint::BigInt;
use num_traits::Signed;

pub use family::{make_family, FamilySpec};
pub use oracle::{Direction, Oracle, RealOracle, SetFunction, SetOracle};
pub use subset::{Subset, MAX_GROUND};
pub use transform::{infinity_norm, lift, newton_scale, perturb, translate};
pub(crate) use oracle::check_enumerable;
pub(crate) use transform::scaled_shift;

use crate::{Error, Result};

/// Exhaustive check of `f(S+i) + f(S+j) ≥ f(S+i+j) + f(S)` over all `S` and
/// `i < j` outside `S`. Reports the first violating quadruple.
pub fn check_submodular(n: usize, f: impl Fn(Subset) -> BigInt) -> Result<()> {
    oracle::check_enumerable(n, family::MAX_EXPLICIT)?;
    let table: Vec<BigInt> = Subset::all(n).map(&f).collect();
    let at = |s: Subset| &table[s.bits() as usize];
    for s in Subset::all(n) {
        let outside: Vec<usize> = s.complement(n).iter().collect();
        for (a, &i) in outside.iter().enumerate() {
            let si = at(s.with(i));
            for &j in &outside[a + 1..] {
                if si + at(s.with(j)) < at(s.with(i).with(j)) + at(s) {
                    return Err(Error::NonSubmodular { set: s, i, j });
                }
            }
        }
    }
    Ok(())
}

pub fn check_nonnegative(n: usize, f: impl Fn(Subset) -> BigInt) -> Result<()> {
    oracle::check_enumerable(n, family::MAX_EXPLICIT)?;
    match Subset::all(n).find(|&s| f(s).is_negative()) {
        Some(s) => Err(Error::NegativeValue(s)),
        None => Ok(()),
    }
}
