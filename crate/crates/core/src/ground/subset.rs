use std::fmt;

/// Largest ground set representable by a [`Subset`].
pub const MAX_GROUND: usize = 64;

/// A subset of `E = {0, …, n−1}` packed into one machine word.
///
/// Elements are 0-based internally and printed 1-based, e.g. `{1,3}`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subset(u64);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub fn from_bits(bits: u64) -> Self {
        Subset(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    /// The whole ground set `E` for `|E| = n`.
    pub fn full(n: usize) -> Self {
        assert!(n <= MAX_GROUND);
        if n == MAX_GROUND {
            Subset(u64::MAX)
        } else {
            Subset((1u64 << n) - 1)
        }
    }

    pub fn singleton(i: usize) -> Self {
        Subset(1u64 << i)
    }

    pub fn from_elements(elements: impl IntoIterator<Item = usize>) -> Self {
        elements
            .into_iter()
            .fold(Subset::EMPTY, |s, i| s.with(i))
    }

    pub fn contains(self, i: usize) -> bool {
        i < MAX_GROUND && self.0 >> i & 1 == 1
    }

    #[must_use]
    pub fn with(self, i: usize) -> Self {
        Subset(self.0 | 1u64 << i)
    }

    #[must_use]
    pub fn without(self, i: usize) -> Self {
        Subset(self.0 & !(1u64 << i))
    }

    pub fn union(self, other: Subset) -> Self {
        Subset(self.0 | other.0)
    }

    pub fn intersection(self, other: Subset) -> Self {
        Subset(self.0 & other.0)
    }

    pub fn difference(self, other: Subset) -> Self {
        Subset(self.0 & !other.0)
    }

    pub fn complement(self, n: usize) -> Self {
        Subset(!self.0 & Subset::full(n).0)
    }

    pub fn is_subset_of(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Elements in increasing order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut rest = self.0;
        std::iter::from_fn(move || {
            if rest == 0 {
                return None;
            }
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            Some(i)
        })
    }

    /// Every subset of `{0, …, n−1}` in mask order (mask value = index).
    pub fn all(n: usize) -> impl Iterator<Item = Subset> {
        assert!(n < MAX_GROUND, "cannot enumerate 2^{n} subsets");
        (0..1u64 << n).map(Subset)
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, i) in self.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", i + 1)?;
        }
        f.write_str("}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn as_set(s: Subset) -> BTreeSet<usize> {
        s.iter().collect()
    }

    #[test]
    fn display_is_one_based() {
        assert_eq!(Subset::from_elements([0, 2]).to_string(), "{1,3}");
        assert_eq!(Subset::EMPTY.to_string(), "{}");
    }

    #[test]
    fn full_edge_sizes() {
        assert_eq!(Subset::full(0), Subset::EMPTY);
        assert_eq!(Subset::full(3).bits(), 0b111);
        assert_eq!(Subset::full(64).len(), 64);
    }

    proptest! {
        #[test]
        fn algebra_matches_set_semantics(a in any::<u64>(), b in any::<u64>(), n in 1usize..64) {
            let mask = Subset::full(n).bits();
            let (a, b) = (Subset::from_bits(a & mask), Subset::from_bits(b & mask));
            let (sa, sb) = (as_set(a), as_set(b));
            prop_assert_eq!(as_set(a.union(b)), &sa | &sb);
            prop_assert_eq!(as_set(a.intersection(b)), &sa & &sb);
            prop_assert_eq!(as_set(a.difference(b)), &sa - &sb);
            prop_assert_eq!(a.len(), sa.len());
            prop_assert_eq!(a.complement(n).union(a), Subset::full(n));
            prop_assert!(a.complement(n).iter().all(|i| i < n));
            prop_assert_eq!(a.intersection(b).is_subset_of(a), true);
            prop_assert_eq!(Subset::from_elements(a.iter()), a);
        }
    }
}
