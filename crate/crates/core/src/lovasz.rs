//! Lovász extension and its subgradients via Edmonds' greedy algorithm.
//!
//! Works over exact rationals and over `f64` through [`Scalar`]. Ties in the
//! sort are always broken by ascending element index, so the chosen vertex is
//! deterministic.

use std::cmp::Ordering;
use std::ops::{Add, Mul, Sub};

use num_traits::Zero;

use crate::ground::{SetOracle, Subset};
use crate::rational::{self, Rational};

/// Number kind the greedy algorithm can run over.
pub trait Scalar:
    Clone + PartialOrd + Zero + for<'a> Add<&'a Self, Output = Self> + for<'a> Sub<&'a Self, Output = Self>
where
    for<'a> &'a Self: Mul<&'a Self, Output = Self>,
{
    fn value_of<O: SetOracle + ?Sized>(f: &O, s: Subset) -> Self;

    /// Greedy vertex for `order`; see [`vertex_for_order`].
    fn vertex<O: SetOracle + ?Sized>(f: &O, order: &GreedyOrder) -> Vec<Self>;
}

impl Scalar for f64 {
    fn value_of<O: SetOracle + ?Sized>(f: &O, s: Subset) -> Self {
        f.value_f64(s)
    }

    fn vertex<O: SetOracle + ?Sized>(f: &O, order: &GreedyOrder) -> Vec<Self> {
        if f.float_exact() {
            telescope(f, order)
        } else {
            // large values cancel in the marginals, so take them exactly
            telescope::<Rational, O>(f, order)
                .iter()
                .map(rational::to_f64)
                .collect()
        }
    }
}

impl Scalar for Rational {
    fn value_of<O: SetOracle + ?Sized>(f: &O, s: Subset) -> Self {
        f.value_exact(s)
    }

    fn vertex<O: SetOracle + ?Sized>(f: &O, order: &GreedyOrder) -> Vec<Self> {
        telescope(f, order)
    }
}

/// Permutation `π` sorting a point in decreasing order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GreedyOrder {
    pub perm: Vec<usize>,
}

impl GreedyOrder {
    /// `S_0 = ∅ ⊂ S_1 ⊂ … ⊂ S_n`.
    pub fn prefix_sets(&self) -> Vec<Subset> {
        std::iter::once(Subset::EMPTY)
            .chain(self.perm.iter().scan(Subset::EMPTY, |acc, &e| {
                *acc = acc.with(e);
                Some(*acc)
            }))
            .collect()
    }
}

/// Stable descending sort of `x`; equal entries keep ascending index order.
pub fn greedy_order<T: PartialOrd>(x: &[T]) -> GreedyOrder {
    let mut perm: Vec<usize> = (0..x.len()).collect();
    perm.sort_by(|&a, &b| x[b].partial_cmp(&x[a]).unwrap_or(Ordering::Equal));
    GreedyOrder { perm }
}

/// Ascending order, ties by ascending index. Its greedy vertex minimizes
/// `v·x` over the base polytope.
pub fn ascending_order<T: PartialOrd>(x: &[T]) -> GreedyOrder {
    let mut perm: Vec<usize> = (0..x.len()).collect();
    perm.sort_by(|&a, &b| x[a].partial_cmp(&x[b]).unwrap_or(Ordering::Equal));
    GreedyOrder { perm }
}

/// Greedy base vertex for a fixed order: `v_{π_i} = f(S_i) − f(S_{i−1})`.
/// Uses exactly `n` oracle calls (`f(∅) = 0` is not queried).
pub fn vertex_for_order<T, O>(f: &O, order: &GreedyOrder) -> Vec<T>
where
    T: Scalar,
    for<'a> &'a T: Mul<&'a T, Output = T>,
    O: SetOracle + ?Sized,
{
    T::vertex(f, order)
}

fn telescope<T, O>(f: &O, order: &GreedyOrder) -> Vec<T>
where
    T: Scalar,
    for<'a> &'a T: Mul<&'a T, Output = T>,
    O: SetOracle + ?Sized,
{
    let mut v = vec![T::zero(); order.perm.len()];
    let mut prev = T::zero();
    let mut acc = Subset::EMPTY;
    for &e in &order.perm {
        acc = acc.with(e);
        let cur = T::value_of(f, acc);
        v[e] = cur.clone() - &prev;
        prev = cur;
    }
    v
}

/// A subgradient of the Lovász extension, which is a vertex of `B(f)`.
#[derive(Clone, Debug, PartialEq)]
pub struct BaseVertex<T> {
    pub order: GreedyOrder,
    pub v: Vec<T>,
}

pub fn dot<T>(a: &[T], b: &[T]) -> T
where
    T: Scalar,
    for<'a> &'a T: Mul<&'a T, Output = T>,
{
    a.iter().zip(b).fold(T::zero(), |acc, (x, y)| acc + &(x * y))
}

/// `F(x) = Σ x_{π_i} (f(S_i) − f(S_{i−1}))`.
pub fn evaluate<T, O>(f: &O, x: &[T]) -> T
where
    T: Scalar,
    for<'a> &'a T: Mul<&'a T, Output = T>,
    O: SetOracle + ?Sized,
{
    evaluate_with_subgradient(f, x).0
}

pub fn subgradient<T, O>(f: &O, x: &[T]) -> BaseVertex<T>
where
    T: Scalar,
    for<'a> &'a T: Mul<&'a T, Output = T>,
    O: SetOracle + ?Sized,
{
    evaluate_with_subgradient(f, x).1
}

/// Value and subgradient from one greedy pass (`n` oracle calls).
pub fn evaluate_with_subgradient<T, O>(f: &O, x: &[T]) -> (T, BaseVertex<T>)
where
    T: Scalar,
    for<'a> &'a T: Mul<&'a T, Output = T>,
    O: SetOracle + ?Sized,
{
    assert_eq!(x.len(), f.n(), "point has wrong dimension");
    let order = greedy_order(x);
    let v = vertex_for_order(f, &order);
    (dot(&v, x), BaseVertex { order, v })
}
