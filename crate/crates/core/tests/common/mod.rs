#![allow(dead_code)]

use num_bigint::BigInt;
use proptest::prelude::*;
use submod_linesearch::ground::family::FAMILY_NAMES;
use submod_linesearch::instance::generate;
use submod_linesearch::{Direction, Oracle, Rational, Subset};

pub fn value(f: &Oracle, s: Subset) -> Rational {
    Rational::from_integer(f.eval(s))
}

pub fn d_of(d: &Direction, s: Subset) -> Rational {
    Rational::from_integer(BigInt::from(d.of(s)))
}

/// `min f(S)/d(S)` over `d(S) > 0`, straight from the table.
pub fn lambda_star(f: &Oracle, d: &Direction) -> Rational {
    Subset::all(f.n())
        .filter(|&s| d.of(s) > 0)
        .map(|s| value(f, s) / d_of(d, s))
        .min()
        .expect("d has a positive entry")
}

/// `min f(S) − λ·d(S)`.
pub fn envelope(f: &Oracle, d: &Direction, lambda: &Rational) -> Rational {
    Subset::all(f.n())
        .map(|s| value(f, s) - lambda * d_of(d, s))
        .min()
        .expect("nonempty lattice")
}

/// `y ∈ P(f)`: `y(S) ≤ f(S)` for every `S`.
pub fn inside(f: &Oracle, y: &[Rational]) -> bool {
    Subset::all(f.n()).all(|s| s.iter().fold(Rational::from_integer(0.into()), |acc, i| acc + &y[i]) <= value(f, s))
}

pub fn min_value(f: &Oracle) -> BigInt {
    Subset::all(f.n()).map(|s| f.eval(s)).min().expect("nonempty lattice")
}

/// A seeded instance of family `k mod 5` on `n` elements.
pub fn instance(k: usize, n: usize, seed: u64) -> (Oracle, Direction) {
    let file = generate(FAMILY_NAMES[k % FAMILY_NAMES.len()], n, seed).expect("generator succeeds");
    let inst = file.build().expect("generated instances build");
    (inst.oracle, inst.direction)
}

pub fn instances(max_n: usize) -> impl Strategy<Value = (Oracle, Direction)> {
    (0..FAMILY_NAMES.len(), 1..=max_n, any::<u64>()).prop_map(|(k, n, seed)| instance(k, n, seed))
}
