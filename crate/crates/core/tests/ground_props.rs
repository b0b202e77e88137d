mod common;

use std::collections::BTreeSet;

use common::{instances, value};
use num_bigint::BigInt;
use proptest::prelude::*;
use submod_linesearch::ground::{check_submodular, infinity_norm, lift, newton_scale, perturb, translate, MAX_GROUND};
use submod_linesearch::instance::{generate, InstanceFile};
use submod_linesearch::ground::family::FAMILY_NAMES;
use submod_linesearch::rational::{int, ratio};
use submod_linesearch::{Rational, Subset};

fn set_of(s: Subset) -> BTreeSet<usize> {
    s.iter().collect()
}

fn subsets() -> impl Strategy<Value = (usize, Subset, Subset)> {
    (1..=MAX_GROUND, any::<u64>(), any::<u64>()).prop_map(|(n, a, b)| {
        let full = Subset::full(n).bits();
        (n, Subset::from_bits(a & full), Subset::from_bits(b & full))
    })
}

proptest! {
    #[test]
    fn subset_algebra((n, a, b) in subsets()) {
        let (sa, sb) = (set_of(a), set_of(b));
        prop_assert_eq!(set_of(a.union(b)), &sa | &sb);
        prop_assert_eq!(set_of(a.intersection(b)), &sa & &sb);
        prop_assert_eq!(set_of(a.difference(b)), &sa - &sb);
        prop_assert_eq!(a.len(), sa.len());
        prop_assert_eq!(a.is_subset_of(b), sa.is_subset(&sb));
        let comp = a.complement(n);
        prop_assert!(comp.iter().all(|i| i < n));
        prop_assert_eq!(comp.len() + a.len(), n);
        prop_assert_eq!(Subset::from_elements(sa.iter().copied()), a);
        for i in 0..n {
            prop_assert_eq!(a.contains(i), sa.contains(&i));
            prop_assert!(a.with(i).contains(i) && !a.without(i).contains(i));
        }
    }

    #[test]
    fn families_are_normalized_submodular_and_nonnegative((f, _d) in instances(10)) {
        let n = f.n();
        prop_assert_eq!(f.eval(Subset::EMPTY), BigInt::from(0));
        prop_assert!(check_submodular(n, |s| f.eval(s)).is_ok());
        let m = f.m_bound();
        for s in Subset::all(n) {
            let v = f.eval(s);
            prop_assert!(v >= BigInt::from(0) && v <= m);
        }
    }

    #[test]
    fn newton_scale_composes((f, d) in instances(10), p in -60i64..60, q in 1i64..40) {
        let lambda = ratio(p, q);
        let (p, q) = (lambda.numer().clone(), lambda.denom().clone());
        let h = newton_scale(&f, &d, &lambda);
        let mut min = None::<BigInt>;
        for s in Subset::all(f.n()) {
            let expect = &q * f.eval(s) - &p * BigInt::from(d.of(s));
            prop_assert_eq!(h.eval(s), expect.clone());
            min = Some(min.map_or(expect.clone(), |m: BigInt| m.min(expect)));
        }
        prop_assert_eq!(
            Rational::new(min.unwrap(), q),
            common::envelope(&f, &d, &lambda)
        );
        prop_assert!(check_submodular(f.n(), |s| h.eval(s)).is_ok());
    }

    #[test]
    fn lift_is_submodular_above_the_threshold((f, d) in instances(8), extra in 0i64..5) {
        let c = infinity_norm(&f) * BigInt::from(d.norm1()) + 1 + extra;
        let g = lift(&f, &c);
        let n = f.n();
        prop_assert_eq!(g.n(), n + 1);
        prop_assert_eq!(g.eval(Subset::EMPTY), BigInt::from(0));
        prop_assert_eq!(g.eval(Subset::full(n + 1)), f.eval(Subset::full(n)));
        prop_assert_eq!(g.eval(Subset::singleton(n)), c.clone());
        prop_assert!(check_submodular(n + 1, |s| g.eval(s)).is_ok());
    }

    #[test]
    fn perturbation_keeps_normalization_and_submodularity((f, _d) in instances(8), k in 1i64..50) {
        let eps = ratio(1, k);
        let g = perturb(&f, &eps);
        prop_assert_eq!(g.eval(Subset::EMPTY), int(0));
        for s in Subset::all(f.n()).skip(1) {
            prop_assert_eq!(g.eval(s), value(&f, s) + &eps);
        }
        // exact quadruple test on the rational values
        let n = f.n();
        for s in Subset::all(n) {
            for i in (0..n).filter(|&i| !s.contains(i)) {
                for j in (i + 1..n).filter(|&j| !s.contains(j)) {
                    prop_assert!(g.eval(s.with(i)) + g.eval(s.with(j)) >= g.eval(s.with(i).with(j)) + g.eval(s));
                }
            }
        }
    }

    #[test]
    fn translation_by_a_feasible_point((f, _d) in instances(10), seed in any::<u64>()) {
        let n = f.n();
        // a greedy vertex of B(f) lies in P(f); shift it down a little
        let x: Vec<Rational> = submod_linesearch::lovasz::vertex_for_order(
            &f,
            &submod_linesearch::lovasz::greedy_order(&(0..n).map(|i| ((seed >> (i % 64)) & 7) as i64).collect::<Vec<_>>()),
        );
        let x0: Vec<i64> = x.iter().map(|v| i64::try_from(v.to_integer()).unwrap_or(0) - 1).collect();
        prop_assume!(common::inside(&f, &x0.iter().map(|&v| int(v)).collect::<Vec<_>>()));
        let g = translate(&f, &x0);
        for s in Subset::all(n) {
            let shift: i64 = s.iter().map(|i| x0[i]).sum();
            prop_assert_eq!(g.eval(s), f.eval(s) - shift);
            prop_assert!(g.eval(s) >= BigInt::from(0));
        }
    }

    #[test]
    fn call_counter_is_monotone((f, _d) in instances(8), picks in prop::collection::vec(any::<u64>(), 1..20)) {
        let full = Subset::full(f.n()).bits();
        let mut last = f.calls();
        for p in picks {
            f.eval(Subset::from_bits(p & full));
            let now = f.calls();
            prop_assert_eq!(now, last + 1);
            last = now;
        }
    }

    #[test]
    fn instance_files_round_trip(k in 0..FAMILY_NAMES.len(), n in 1usize..14, seed in any::<u64>()) {
        let file = generate(FAMILY_NAMES[k], n, seed).unwrap();
        let text = file.to_json();
        let back = InstanceFile::from_json(&text).unwrap();
        prop_assert_eq!(&back, &file);
        prop_assert_eq!(back.to_json(), text);
        prop_assert_eq!(generate(FAMILY_NAMES[k], n, seed).unwrap(), file);
    }
}

#[test]
fn infinity_norm_matches_enumeration() {
    for n in 1..=8 {
        for k in 0..FAMILY_NAMES.len() {
            let (f, _) = common::instance(k, n, 17 * n as u64 + k as u64);
            let max = Subset::all(n).map(|s| f.eval(s)).max().unwrap();
            assert_eq!(infinity_norm(&f), max);
        }
    }
}
