use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use super::oracle::abs_sum;
use super::{Direction, Oracle, RealOracle, SetFunction, Subset};
use crate::rational::Rational;

/// `f̂(·; C)` on `E ∪ {n}` (the new element is index `n`):
/// `f(S)` without the new element, `f(S∖{n}) + C` with it, and `f(E)` on the
/// whole lifted ground set.
pub fn lift(f: &Oracle, c: &BigInt) -> Oracle {
    assert!(c.is_positive(), "lifting constant must be positive");
    assert!(f.n() + 1 < super::MAX_GROUND);
    Oracle::new(Lifted {
        base: f.clone(),
        c: c.clone(),
    })
}

#[derive(Debug)]
struct Lifted {
    base: Oracle,
    c: BigInt,
}

impl SetFunction for Lifted {
    fn n(&self) -> usize {
        self.base.n() + 1
    }

    fn eval(&self, s: Subset) -> BigInt {
        let top = self.base.n();
        if !s.contains(top) {
            self.base.eval(s)
        } else if s == Subset::full(top + 1) {
            self.base.eval(Subset::full(top))
        } else {
            self.base.eval(s.without(top)) + &self.c
        }
    }

    fn m_bound(&self) -> BigInt {
        self.base.m_bound() + &self.c
    }

    fn family(&self) -> String {
        format!("lift({})", self.base.family())
    }
}

/// `f_ε(S) = f(S) + ε` for `S ≠ ∅`, `f_ε(∅) = 0`.
pub fn perturb(f: &Oracle, eps: &Rational) -> RealOracle {
    assert!(eps.is_positive(), "perturbation must be positive");
    RealOracle::shifted(f.clone(), eps.clone())
}

/// `f′(S) = f(S) − x0(S)`: moves the line-search origin to `x0`.
pub fn translate(f: &Oracle, x0: &[i64]) -> Oracle {
    assert_eq!(x0.len(), f.n());
    Oracle::new(Translated {
        base: f.clone(),
        x0: x0.iter().map(|&v| BigInt::from(v)).collect(),
    })
}

#[derive(Debug)]
struct Translated {
    base: Oracle,
    x0: Vec<BigInt>,
}

impl SetFunction for Translated {
    fn n(&self) -> usize {
        self.base.n()
    }

    fn eval(&self, s: Subset) -> BigInt {
        let shift: BigInt = s.iter().map(|i| &self.x0[i]).sum();
        self.base.eval(s) - shift
    }

    fn m_bound(&self) -> BigInt {
        self.base.m_bound() + abs_sum(&self.x0)
    }

    fn family(&self) -> String {
        format!("translate({})", self.base.family())
    }
}

/// The integral oracle `h(S) = q·f(S) − p·d(S)` for `λ = p/q`, so that
/// `min_S h(S) = q·g(λ)`.
pub fn newton_scale(f: &Oracle, d: &Direction, lambda: &Rational) -> Oracle {
    assert_eq!(d.len(), f.n());
    let p = lambda.numer();
    let w = d.as_slice().iter().map(|&v| p * BigInt::from(v)).collect();
    scaled_shift(f, lambda.denom().clone(), w)
}

/// `h(S) = q·f(S) − w(S)` for an integral modular `w`.
pub(crate) fn scaled_shift(f: &Oracle, q: BigInt, w: Vec<BigInt>) -> Oracle {
    assert_eq!(w.len(), f.n());
    let bound = &q * f.m_bound() + abs_sum(&w);
    // below 2^53 every partial sum is an exactly representable integer
    let float_exact = bound.bits() < 53;
    Oracle::new(ScaledShift {
        base: f.clone(),
        w_f64: w.iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).collect(),
        q_f64: q.to_f64().unwrap_or(f64::NAN),
        w,
        q,
        bound,
        float_exact,
    })
}

#[derive(Debug)]
struct ScaledShift {
    base: Oracle,
    q: BigInt,
    w: Vec<BigInt>,
    q_f64: f64,
    w_f64: Vec<f64>,
    bound: BigInt,
    float_exact: bool,
}

impl SetFunction for ScaledShift {
    fn n(&self) -> usize {
        self.base.n()
    }

    fn eval(&self, s: Subset) -> BigInt {
        let ws: BigInt = s.iter().map(|i| &self.w[i]).sum();
        &self.q * self.base.eval(s) - ws
    }

    fn eval_f64(&self, s: Subset) -> f64 {
        if self.float_exact {
            let ws: f64 = s.iter().map(|i| self.w_f64[i]).sum();
            self.q_f64 * self.base.eval_f64(s) - ws
        } else {
            // the difference can cancel far below either term
            self.eval(s).to_f64().unwrap_or(f64::INFINITY)
        }
    }

    fn m_bound(&self) -> BigInt {
        self.bound.clone()
    }

    fn family(&self) -> String {
        format!("scaled_shift({})", self.base.family())
    }
}

/// `‖f‖∞`: exact by enumeration for `n ≤ 20`, otherwise the family's bound.
pub fn infinity_norm(f: &Oracle) -> BigInt {
    if f.n() <= 20 {
        Subset::all(f.n())
            .map(|s| f.eval(s).abs())
            .max()
            .unwrap_or_else(BigInt::zero)
    } else {
        f.m_bound()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ground::family::{random_direction, random_spec, validate_exhaustive};
    use crate::ground::{check_nonnegative, check_submodular, make_family, FamilySpec};
    use crate::rational::ratio;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn small_f() -> Oracle {
        make_family(2, &FamilySpec::Explicit { values: vec![0, 2, 2, 3] }).unwrap()
    }

    fn s(e: &[usize]) -> Subset {
        Subset::from_elements(e.iter().map(|i| i - 1))
    }

    #[test]
    fn lift_cases() {
        let fh = lift(&small_f(), &BigInt::from(10));
        assert_eq!(fh.n(), 3);
        assert_eq!(fh.eval(Subset::EMPTY), BigInt::zero());
        assert_eq!(fh.eval(s(&[3])), BigInt::from(10));
        assert_eq!(fh.eval(s(&[1, 3])), BigInt::from(12));
        assert_eq!(fh.eval(s(&[1, 2, 3])), BigInt::from(3));
        assert_eq!(fh.eval(s(&[1, 2])), BigInt::from(3));
        assert_eq!(fh.m_bound(), BigInt::from(13));
    }

    #[test]
    fn lift_is_submodular_in_lemma_regime() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for family in crate::ground::family::FAMILY_NAMES {
            for n in 1..=8 {
                let f = make_family(n, &random_spec(family, n, &mut rng).unwrap()).unwrap();
                let d = Direction::new(random_direction(n, &mut rng)).unwrap();
                let c = infinity_norm(&f) * d.norm1() + 1;
                let fh = lift(&f, &c);
                check_submodular(n + 1, |t| fh.eval(t)).unwrap();
            }
        }
    }

    #[test]
    fn perturb_values() {
        let fe = perturb(&small_f(), &ratio(1, 49));
        assert_eq!(fe.eval(s(&[1])), ratio(99, 49));
        assert_eq!(fe.eval(Subset::EMPTY), Rational::zero());
    }

    #[test]
    fn perturb_preserves_submodularity() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 1..=8 {
            let f = make_family(n, &random_spec("coverage", n, &mut rng).unwrap()).unwrap();
            let eps = ratio(1, rng.random_range(1..100));
            let fe = perturb(&f, &eps);
            // scale by the denominator to reuse the integer checker
            let q = Rational::from_integer(eps.denom().clone());
            check_submodular(n, |t| (fe.eval(t) * &q).to_integer()).unwrap();
        }
    }

    #[test]
    fn translate_values() {
        let f = small_f();
        let same = translate(&f, &[0, 0]);
        for t in Subset::all(2) {
            assert_eq!(same.eval(t), f.eval(t));
        }
        let g = translate(&f, &[1, 1]);
        assert_eq!(g.eval(s(&[1])), BigInt::from(1));
        assert_eq!(g.eval(s(&[1, 2])), BigInt::from(1));
        assert_eq!(g.m_bound(), BigInt::from(5));
    }

    #[test]
    fn translate_by_point_of_polymatroid_stays_nonnegative() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for family in crate::ground::family::FAMILY_NAMES {
            for n in 1..=10 {
                let f = make_family(n, &random_spec(family, n, &mut rng).unwrap()).unwrap();
                // greedy vertex for a random order, pushed down: still in P(f)
                let mut order: Vec<usize> = (0..n).collect();
                for i in (1..n).rev() {
                    order.swap(i, rng.random_range(0..=i));
                }
                let mut prev = BigInt::zero();
                let mut acc = Subset::EMPTY;
                let mut x0 = vec![0i64; n];
                let mut fits = true;
                for &e in &order {
                    acc = acc.with(e);
                    let v = f.eval(acc);
                    match i64::try_from(&v - &prev) {
                        Ok(m) => x0[e] = m - rng.random_range(0..3),
                        Err(_) => fits = false,
                    }
                    prev = v;
                }
                if !fits {
                    continue;
                }
                let g = translate(&f, &x0);
                check_nonnegative(n, |t| g.eval(t)).unwrap();
                validate_exhaustive(&g).unwrap();
            }
        }
    }

    #[test]
    fn newton_scale_values() {
        let f = small_f();
        let d = Direction::new(vec![3, 4]).unwrap();
        let h0 = newton_scale(&f, &d, &Rational::zero());
        for t in Subset::all(2) {
            assert_eq!(h0.eval(t), f.eval(t));
        }
        let h = newton_scale(&f, &d, &ratio(1, 2));
        assert_eq!(h.eval(s(&[1, 2])), BigInt::from(-1));
        assert_eq!(h.eval_f64(s(&[1, 2])), -1.0);
        assert_eq!(h.m_bound(), BigInt::from(2 * 3 + 7));
    }

    #[test]
    fn newton_scale_matches_formula_and_envelope() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for family in crate::ground::family::FAMILY_NAMES {
            for n in 1..=12 {
                let f = make_family(n, &random_spec(family, n, &mut rng).unwrap()).unwrap();
                let d = Direction::new(random_direction(n, &mut rng)).unwrap();
                let lambda = ratio(rng.random_range(-20..40), rng.random_range(1..15));
                let h = newton_scale(&f, &d, &lambda);
                let q = Rational::from_integer(lambda.denom().clone());
                let mut brute = None::<Rational>;
                for t in Subset::all(n) {
                    let expect = Rational::from_integer(f.eval(t))
                        - &lambda * Rational::from_integer(d.of(t).into());
                    let got = Rational::from_integer(h.eval(t));
                    assert_eq!(got, &expect * &q);
                    brute = Some(match brute {
                        Some(b) if b <= expect => b,
                        _ => expect,
                    });
                }
                let min_h = Subset::all(n).map(|t| h.eval(t)).min().unwrap();
                assert_eq!(Rational::from_integer(min_h), brute.unwrap() * q);
            }
        }
    }

    #[test]
    fn infinity_norms() {
        assert_eq!(infinity_norm(&small_f()), BigInt::from(3));
        let zero = make_family(3, &FamilySpec::Explicit { values: vec![0; 8] }).unwrap();
        assert_eq!(infinity_norm(&zero), BigInt::zero());
        let ig = make_family(3, &FamilySpec::IntervalGeometric {}).unwrap();
        let brute = Subset::all(3).map(|t| ig.eval(t)).max().unwrap();
        // {3} alone: 4^3·4^3 = 4096 beats [1,3] = 256 and {1,3} = 4100
        assert_eq!(brute, BigInt::from(4100));
        assert_eq!(infinity_norm(&ig), brute);
    }
}
