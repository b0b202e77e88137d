//! Built-in submodular families and their instance-file encoding.

use num_bigint::BigInt;
use num_traits::Zero;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::oracle::check_enumerable;
use super::{check_nonnegative, check_submodular, Oracle, SetFunction, Subset};
use crate::{Error, Result};

/// Largest `n` accepted for an explicit value table.
pub const MAX_EXPLICIT: usize = 20;

/// Largest `n` for which clipped concave-plus-modular specs are validated.
const MAX_CLIP_VALIDATE: usize = 12;

/// Parameters of a built-in family, tagged by `"family"` in JSON.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FamilySpec {
    /// `2^n` values in mask order.
    Explicit { values: Vec<i64> },
    /// `sets[e]` lists the items covered by element `e`; `f(S)` is the weight of
    /// the items covered by `S`.
    Coverage {
        sets: Vec<Vec<usize>>,
        weights: Vec<i64>,
    },
    /// Directed cut: `f(S) = Σ cap(u, v)` over edges leaving `S`.
    GraphCut { edges: Vec<(usize, usize, i64)> },
    /// `f(S) = g(|S|) + w(S)`, clipped at zero when that stays submodular.
    ConcaveModular { concave: Vec<i64>, modular: Vec<i64> },
    /// Sum over the maximal intervals `[i, j]` of `S` (1-based) of
    /// `4^{j(j−1)/2} · 4^i`.
    IntervalGeometric {},
}

/// Family names as used on the command line and in instance files.
pub const FAMILY_NAMES: [&str; 5] = [
    "explicit",
    "coverage",
    "graph-cut",
    "concave-modular",
    "interval-geometric",
];

impl FamilySpec {
    pub fn name(&self) -> &'static str {
        match self {
            FamilySpec::Explicit { .. } => "explicit",
            FamilySpec::Coverage { .. } => "coverage",
            FamilySpec::GraphCut { .. } => "graph-cut",
            FamilySpec::ConcaveModular { .. } => "concave-modular",
            FamilySpec::IntervalGeometric {} => "interval-geometric",
        }
    }
}

/// Builds a validated oracle for a family on a ground set of size `n`.
pub fn make_family(n: usize, spec: &FamilySpec) -> Result<Oracle> {
    if n >= super::MAX_GROUND {
        return Err(Error::GroundSetTooLarge {
            n,
            max: super::MAX_GROUND - 1,
        });
    }
    Ok(match spec {
        FamilySpec::Explicit { values } => Oracle::new(Explicit::new(n, values.clone())?),
        FamilySpec::Coverage { sets, weights } => Oracle::new(Coverage::new(n, sets, weights)?),
        FamilySpec::GraphCut { edges } => Oracle::new(GraphCut::new(n, edges)?),
        FamilySpec::ConcaveModular { concave, modular } => {
            Oracle::new(ConcaveModular::new(n, concave.clone(), modular.clone())?)
        }
        FamilySpec::IntervalGeometric {} => Oracle::new(IntervalGeometric::new(n)),
    })
}

#[derive(Debug, Clone)]
pub struct Explicit {
    n: usize,
    values: Vec<i64>,
    max: i64,
}

impl Explicit {
    pub fn new(n: usize, values: Vec<i64>) -> Result<Self> {
        check_enumerable(n, MAX_EXPLICIT)?;
        if values.len() != 1 << n {
            return Err(Error::InvalidSpec(format!(
                "explicit table for n = {n} needs {} values, got {}",
                1u64 << n,
                values.len()
            )));
        }
        if values[0] != 0 {
            return Err(Error::EmptyNotZero);
        }
        if let Some(mask) = values.iter().position(|&v| v < 0) {
            return Err(Error::NegativeValue(Subset::from_bits(mask as u64)));
        }
        let max = values.iter().copied().max().unwrap_or(0);
        let table = Explicit { n, values, max };
        check_submodular(n, |s| BigInt::from(table.values[s.bits() as usize]))?;
        Ok(table)
    }
}

impl SetFunction for Explicit {
    fn n(&self) -> usize {
        self.n
    }
    fn eval(&self, s: Subset) -> BigInt {
        BigInt::from(self.values[s.bits() as usize])
    }
    fn eval_f64(&self, s: Subset) -> f64 {
        self.values[s.bits() as usize] as f64
    }
    fn m_bound(&self) -> BigInt {
        BigInt::from(self.max)
    }
    fn family(&self) -> String {
        "explicit".into()
    }
}

#[derive(Debug, Clone)]
pub struct Coverage {
    n: usize,
    covers: Vec<Vec<u64>>,
    weights: Vec<i64>,
    total: i64,
}

impl Coverage {
    pub fn new(n: usize, sets: &[Vec<usize>], weights: &[i64]) -> Result<Self> {
        if sets.len() != n {
            return Err(Error::InvalidSpec(format!(
                "coverage needs one item list per element ({n}), got {}",
                sets.len()
            )));
        }
        if let Some(w) = weights.iter().find(|&&w| w < 0) {
            return Err(Error::InvalidSpec(format!("negative item weight {w}")));
        }
        let words = weights.len().div_ceil(64);
        let mut covers = vec![vec![0u64; words]; n];
        for (e, items) in sets.iter().enumerate() {
            for &item in items {
                if item >= weights.len() {
                    return Err(Error::InvalidSpec(format!(
                        "element {e} covers unknown item {item}"
                    )));
                }
                covers[e][item / 64] |= 1 << (item % 64);
            }
        }
        let mut cov = Coverage {
            n,
            covers,
            weights: weights.to_vec(),
            total: 0,
        };
        // monotone, so the maximum is at E
        cov.total = cov.value(Subset::full(n));
        Ok(cov)
    }

    fn value(&self, s: Subset) -> i64 {
        let mut union = vec![0u64; self.weights.len().div_ceil(64)];
        for e in s.iter() {
            for (u, c) in union.iter_mut().zip(&self.covers[e]) {
                *u |= c;
            }
        }
        let mut total = 0;
        for (w, word) in union.iter().enumerate() {
            let mut bits = *word;
            while bits != 0 {
                total += self.weights[w * 64 + bits.trailing_zeros() as usize];
                bits &= bits - 1;
            }
        }
        total
    }
}

impl SetFunction for Coverage {
    fn n(&self) -> usize {
        self.n
    }
    fn eval(&self, s: Subset) -> BigInt {
        BigInt::from(self.value(s))
    }
    fn eval_f64(&self, s: Subset) -> f64 {
        self.value(s) as f64
    }
    fn m_bound(&self) -> BigInt {
        BigInt::from(self.total)
    }
    fn family(&self) -> String {
        "coverage".into()
    }
}

#[derive(Debug, Clone)]
pub struct GraphCut {
    n: usize,
    edges: Vec<(usize, usize, i64)>,
    bound: i64,
}

impl GraphCut {
    pub fn new(n: usize, edges: &[(usize, usize, i64)]) -> Result<Self> {
        for &(u, v, c) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidSpec(format!("edge ({u}, {v}) outside 0..{n}")));
            }
            if c < 0 {
                return Err(Error::InvalidSpec(format!("negative capacity {c} on ({u}, {v})")));
            }
        }
        let mut g = GraphCut {
            n,
            edges: edges.to_vec(),
            bound: edges.iter().map(|e| e.2).sum(),
        };
        if n <= 16 {
            g.bound = Subset::all(n).map(|s| g.value(s)).max().unwrap_or(0);
        }
        Ok(g)
    }

    fn value(&self, s: Subset) -> i64 {
        self.edges
            .iter()
            .filter(|&&(u, v, _)| s.contains(u) && !s.contains(v))
            .map(|e| e.2)
            .sum()
    }
}

impl SetFunction for GraphCut {
    fn n(&self) -> usize {
        self.n
    }
    fn eval(&self, s: Subset) -> BigInt {
        BigInt::from(self.value(s))
    }
    fn eval_f64(&self, s: Subset) -> f64 {
        self.value(s) as f64
    }
    fn m_bound(&self) -> BigInt {
        BigInt::from(self.bound)
    }
    fn family(&self) -> String {
        "graph-cut".into()
    }
}

#[derive(Debug, Clone)]
pub struct ConcaveModular {
    n: usize,
    concave: Vec<i64>,
    modular: Vec<i64>,
    clipped: bool,
    max: i64,
}

impl ConcaveModular {
    pub fn new(n: usize, concave: Vec<i64>, modular: Vec<i64>) -> Result<Self> {
        if concave.len() != n + 1 || modular.len() != n {
            return Err(Error::InvalidSpec(format!(
                "concave-modular for n = {n} needs {} concave and {n} modular values",
                n + 1
            )));
        }
        if concave[0] != 0 {
            return Err(Error::EmptyNotZero);
        }
        if concave.windows(3).any(|w| w[2] - w[1] > w[1] - w[0]) {
            return Err(Error::InvalidSpec(
                "concave sequence must have nonincreasing increments".into(),
            ));
        }
        let mut ascending = modular.clone();
        ascending.sort_unstable();
        let prefix = |vals: &mut dyn Iterator<Item = &i64>| -> Vec<i64> {
            std::iter::once(0)
                .chain(vals.scan(0, |acc, &v| {
                    *acc += v;
                    Some(*acc)
                }))
                .collect()
        };
        let low = prefix(&mut ascending.iter());
        let high = prefix(&mut ascending.iter().rev());
        let min = (0..=n).map(|k| concave[k] + low[k]).min().unwrap_or(0);
        let max = (0..=n).map(|k| concave[k] + high[k]).max().unwrap_or(0).max(0);
        let f = ConcaveModular {
            n,
            concave,
            modular,
            clipped: min < 0,
            max,
        };
        if f.clipped {
            if n > MAX_CLIP_VALIDATE {
                return Err(Error::InvalidSpec(format!(
                    "negative values need clipping, which is only validated for n ≤ {MAX_CLIP_VALIDATE}"
                )));
            }
            check_submodular(n, |s| BigInt::from(f.value(s))).map_err(|e| {
                Error::InvalidSpec(format!("clipping at zero breaks submodularity ({e})"))
            })?;
        }
        Ok(f)
    }

    fn value(&self, s: Subset) -> i64 {
        let v = self.concave[s.len()] + s.iter().map(|i| self.modular[i]).sum::<i64>();
        if self.clipped {
            v.max(0)
        } else {
            v
        }
    }
}

impl SetFunction for ConcaveModular {
    fn n(&self) -> usize {
        self.n
    }
    fn eval(&self, s: Subset) -> BigInt {
        BigInt::from(self.value(s))
    }
    fn eval_f64(&self, s: Subset) -> f64 {
        self.value(s) as f64
    }
    fn m_bound(&self) -> BigInt {
        BigInt::from(self.max)
    }
    fn family(&self) -> String {
        "concave-modular".into()
    }
}

/// Geometric interval function: exponentially growing values used to force
/// slow discrete Newton convergence.
#[derive(Debug, Clone)]
pub struct IntervalGeometric {
    n: usize,
    bound: BigInt,
}

impl IntervalGeometric {
    pub fn new(n: usize) -> Self {
        let mut f = IntervalGeometric {
            n,
            bound: BigInt::zero(),
        };
        f.bound = if n <= 16 {
            Subset::all(n).map(|s| f.exact(s)).max().unwrap_or_default()
        } else {
            // at most n intervals, each below 4^{n(n+1)/2}
            BigInt::from(n) << (n * (n + 1))
        };
        f
    }

    /// Base-4 exponents `j(j−1)/2 + i` of the maximal intervals, 1-based.
    fn exponents(s: Subset) -> impl Iterator<Item = usize> {
        let mut rest = s.bits();
        std::iter::from_fn(move || {
            if rest == 0 {
                return None;
            }
            let lo = rest.trailing_zeros() as usize;
            let run = (rest >> lo).trailing_ones() as usize;
            let hi = lo + run - 1;
            rest &= !(((1u128 << run) - 1) as u64) << lo;
            let (i, j) = (lo + 1, hi + 1);
            Some(j * (j - 1) / 2 + i)
        })
    }

    fn exact(&self, s: Subset) -> BigInt {
        Self::exponents(s).map(|k| BigInt::from(1) << (2 * k)).sum()
    }
}

impl SetFunction for IntervalGeometric {
    fn n(&self) -> usize {
        self.n
    }
    fn eval(&self, s: Subset) -> BigInt {
        self.exact(s)
    }
    fn eval_f64(&self, s: Subset) -> f64 {
        Self::exponents(s).map(|k| 2f64.powi(2 * k as i32)).sum()
    }
    fn m_bound(&self) -> BigInt {
        self.bound.clone()
    }
    fn family(&self) -> String {
        "interval-geometric".into()
    }
}

/// Draws random family parameters. Deterministic for a given RNG state.
pub fn random_spec(family: &str, n: usize, rng: &mut impl Rng) -> Result<FamilySpec> {
    Ok(match family {
        "explicit" => {
            check_enumerable(n, MAX_EXPLICIT)?;
            // budget-additive plus a sparse cut, tabulated
            let w: Vec<i64> = (0..n).map(|_| rng.random_range(0..6)).collect();
            let budget = rng.random_range(1..=w.iter().sum::<i64>().max(1));
            let edges = random_edges(n, 0.25, 1..4, rng);
            let cut = GraphCut::new(n, &edges)?;
            let values = Subset::all(n)
                .map(|s| s.iter().map(|i| w[i]).sum::<i64>().min(budget) + cut.value(s))
                .collect();
            FamilySpec::Explicit { values }
        }
        "coverage" => {
            let items = n + rng.random_range(0..n + 3);
            let weights = (0..items).map(|_| rng.random_range(1..10)).collect();
            let sets = (0..n)
                .map(|_| (0..items).filter(|_| rng.random_bool(0.3)).collect())
                .collect();
            FamilySpec::Coverage { sets, weights }
        }
        "graph-cut" => FamilySpec::GraphCut {
            edges: random_edges(n, 0.35, 1..7, rng),
        },
        "concave-modular" => {
            let mut inc: i64 = rng.random_range(0..12);
            let mut concave = vec![0i64];
            for _ in 0..n {
                concave.push(concave.last().unwrap() + inc);
                inc -= rng.random_range(0..4);
            }
            // concave with g(0) = 0 and g(n) ≥ 0 lies above zero
            if concave[n] < 0 {
                let t = (-concave[n] + n as i64 - 1) / n as i64;
                concave.iter_mut().enumerate().for_each(|(k, g)| *g += t * k as i64);
            }
            let modular: Vec<i64> = (0..n).map(|_| rng.random_range(-4..9)).collect();
            let shift = -modular.iter().copied().min().unwrap_or(0).min(0);
            concave.iter_mut().enumerate().for_each(|(k, g)| *g += shift * k as i64);
            FamilySpec::ConcaveModular { concave, modular }
        }
        "interval-geometric" => FamilySpec::IntervalGeometric {},
        other => return Err(Error::InvalidSpec(format!("unknown family {other:?}"))),
    })
}

fn random_edges(
    n: usize,
    density: f64,
    caps: std::ops::Range<i64>,
    rng: &mut impl Rng,
) -> Vec<(usize, usize, i64)> {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if u != v && rng.random_bool(density) {
                edges.push((u, v, rng.random_range(caps.clone())));
            }
        }
    }
    edges
}

/// Random direction with entries in `[-5, 7]` and at least one positive entry.
pub fn random_direction(n: usize, rng: &mut impl Rng) -> Vec<i64> {
    let mut d: Vec<i64> = (0..n)
        .map(|_| {
            if rng.random_bool(0.15) {
                0
            } else {
                rng.random_range(-5..=7)
            }
        })
        .collect();
    if !d.iter().any(|&v| v > 0) {
        let i = rng.random_range(0..n);
        d[i] = rng.random_range(1..=7);
    }
    d
}

/// Evaluates every subset to confirm the family contract (n ≤ 20).
pub fn validate_exhaustive(f: &Oracle) -> Result<()> {
    check_enumerable(f.n(), MAX_EXPLICIT)?;
    let table = f.table()?;
    if !table[0].is_zero() {
        return Err(Error::EmptyNotZero);
    }
    check_nonnegative(f.n(), |s| table[s.bits() as usize].clone())?;
    check_submodular(f.n(), |s| table[s.bits() as usize].clone())?;
    let max = table.iter().max().cloned().unwrap_or_default();
    if max > f.m_bound() {
        return Err(Error::InvariantViolation(format!(
            "m_bound {} below max value {max}",
            f.m_bound()
        )));
    }
    Ok(())
}

impl IntervalGeometric {
    /// Value of a single interval `[i, j]`, 1-based.
    pub fn interval_value(i: usize, j: usize) -> BigInt {
        BigInt::from(1) << (2 * (j * (j - 1) / 2 + i))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn s(e: &[usize]) -> Subset {
        Subset::from_elements(e.iter().map(|i| i - 1))
    }

    #[test]
    fn interval_geometric_values() {
        let f = make_family(3, &FamilySpec::IntervalGeometric {}).unwrap();
        assert_eq!(f.eval(s(&[1])), BigInt::from(4));
        assert_eq!(f.eval(s(&[1, 2])), BigInt::from(16));
        assert_eq!(f.eval(s(&[2])), BigInt::from(64));
        // {1,3}: [1,1] and [3,3] = 4 + 4^3·4^3
        assert_eq!(f.eval(s(&[1, 3])), BigInt::from(4 + 4096));
        assert_eq!(f.eval(s(&[1, 2, 3])), BigInt::from(4i64.pow(3) * 4));
        assert_eq!(f.eval_f64(s(&[1, 3])), 4100.0);
    }

    #[test]
    fn maximal_intervals_decomposition() {
        // {1,2,3,6,9,10} → [1,3], [6,6], [9,10]
        let set = s(&[1, 2, 3, 6, 9, 10]);
        let got: Vec<usize> = IntervalGeometric::exponents(set).collect();
        assert_eq!(got, vec![3 + 1, 15 + 6, 45 + 9]);
    }

    #[test]
    fn explicit_small_example_is_valid() {
        let f = make_family(2, &FamilySpec::Explicit { values: vec![0, 2, 2, 3] }).unwrap();
        assert_eq!(f.m_bound(), BigInt::from(3));
    }

    #[test]
    fn explicit_rejections() {
        let bad = make_family(2, &FamilySpec::Explicit { values: vec![0, 2, 2, 5] });
        assert!(matches!(bad, Err(Error::NonSubmodular { .. })));
        let bad = make_family(2, &FamilySpec::Explicit { values: vec![1, 2, 2, 3] });
        assert!(matches!(bad, Err(Error::EmptyNotZero)));
        let bad = make_family(2, &FamilySpec::Explicit { values: vec![0, -1, 2, 1] });
        assert!(matches!(bad, Err(Error::NegativeValue(_))));
        let bad = make_family(2, &FamilySpec::Explicit { values: vec![0, 1, 2] });
        assert!(matches!(bad, Err(Error::InvalidSpec(_))));
        assert!(matches!(
            make_family(21, &FamilySpec::Explicit { values: vec![] }),
            Err(Error::GroundSetTooLarge { .. })
        ));
    }

    #[test]
    fn concave_modular_clipping() {
        // g = (0, 1, 1), w = (-3, 5): f({1}) = -2 → clipped to 0
        let f = make_family(
            2,
            &FamilySpec::ConcaveModular {
                concave: vec![0, 1, 1],
                modular: vec![-3, 5],
            },
        )
        .unwrap();
        assert_eq!(f.eval(s(&[1])), BigInt::zero());
        assert_eq!(f.eval(s(&[2])), BigInt::from(6));
        assert_eq!(f.eval(s(&[1, 2])), BigInt::from(3));
        validate_exhaustive(&f).unwrap();

        // max(0, w(S)) with w = (-1, 1, 1): f({1,2}) + f({1,3}) = 0 < f({1,2,3}) + f({1}) = 1
        let bad = make_family(
            3,
            &FamilySpec::ConcaveModular {
                concave: vec![0, 0, 0, 0],
                modular: vec![-1, 1, 1],
            },
        );
        assert!(matches!(bad, Err(Error::InvalidSpec(_))), "{bad:?}");

        let not_concave = make_family(
            2,
            &FamilySpec::ConcaveModular {
                concave: vec![0, 1, 3],
                modular: vec![0, 0],
            },
        );
        assert!(not_concave.is_err());
    }

    #[test]
    fn coverage_and_cut_values() {
        let cov = make_family(
            2,
            &FamilySpec::Coverage {
                sets: vec![vec![0, 1], vec![1, 2]],
                weights: vec![3, 4, 5],
            },
        )
        .unwrap();
        assert_eq!(cov.eval(s(&[1])), BigInt::from(7));
        assert_eq!(cov.eval(s(&[1, 2])), BigInt::from(12));
        assert_eq!(cov.m_bound(), BigInt::from(12));

        let cut = make_family(3, &FamilySpec::GraphCut { edges: vec![(0, 1, 3), (1, 2, 2), (2, 0, 1)] })
            .unwrap();
        assert_eq!(cut.eval(s(&[1])), BigInt::from(3));
        assert_eq!(cut.eval(s(&[1, 2])), BigInt::from(2));
        assert_eq!(cut.eval(s(&[1, 2, 3])), BigInt::zero());
        assert!(make_family(2, &FamilySpec::GraphCut { edges: vec![(0, 5, 1)] }).is_err());
    }

    #[test]
    fn every_family_is_submodular_nonnegative_up_to_12() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for family in FAMILY_NAMES {
            for n in 1..=12 {
                for _ in 0..3 {
                    let spec = random_spec(family, n, &mut rng).unwrap();
                    let f = make_family(n, &spec).unwrap();
                    validate_exhaustive(&f)
                        .unwrap_or_else(|e| panic!("{family} n={n}: {e}"));
                }
            }
        }
    }

    #[test]
    fn json_encoding() {
        let spec = FamilySpec::GraphCut { edges: vec![(0, 1, 2)] };
        let text = serde_json::to_string(&spec).unwrap();
        assert_eq!(text, r#"{"family":"graph-cut","edges":[[0,1,2]]}"#);
        let back: FamilySpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back, spec);
        let ig: FamilySpec = serde_json::from_str(r#"{"family":"interval-geometric"}"#).unwrap();
        assert_eq!(ig, FamilySpec::IntervalGeometric {});
    }

    #[test]
    fn random_directions_have_positive_entry() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 1..10 {
            for _ in 0..50 {
                assert!(random_direction(n, &mut rng).iter().any(|&v| v > 0));
            }
        }
    }
}
