//! Instance files and seeded random instances.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ground::family::{random_direction, random_spec, validate_exhaustive, MAX_EXPLICIT};
use crate::ground::{check_nonnegative, make_family, translate, Direction, FamilySpec, Oracle};
use crate::{Error, Result};

/// `{"n", "function": {"family", ...params, "seed"?}, "direction", "x0"?}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub n: usize,
    pub function: FunctionSpec,
    pub direction: Vec<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<Vec<i64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionSpec {
    #[serde(flatten)]
    pub family: FamilySpec,
    /// Seed the parameters were drawn with, if generated.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// A loaded instance: the oracle the line search runs on (already translated
/// by `x0`) and its direction.
#[derive(Clone, Debug)]
pub struct Instance {
    pub file: InstanceFile,
    pub oracle: Oracle,
    pub direction: Direction,
}

impl InstanceFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidSpec(format!("instance file: {e}")))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("instance files always serialize");
        s.push('\n');
        s
    }

    pub fn family(&self) -> &'static str {
        self.function.family.name()
    }

    pub fn build(&self) -> Result<Instance> {
        if self.direction.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: self.direction.len(),
            });
        }
        let direction = Direction::new(self.direction.clone())?;
        let base = make_family(self.n, &self.function.family)?;
        let oracle = match &self.x0 {
            None => base,
            Some(x0) => {
                if x0.len() != self.n {
                    return Err(Error::DimensionMismatch {
                        expected: self.n,
                        got: x0.len(),
                    });
                }
                let shifted = translate(&base, x0);
                if self.n <= MAX_EXPLICIT {
                    check_nonnegative(self.n, |s| shifted.eval(s)).map_err(|_| {
                        Error::InvalidDirection("x0 lies outside P(f)".into())
                    })?;
                }
                shifted
            }
        };
        Ok(Instance {
            file: self.clone(),
            oracle,
            direction,
        })
    }

    /// Exhaustive validation of the built oracle (n ≤ 20).
    pub fn validate(&self) -> Result<()> {
        validate_exhaustive(&self.build()?.oracle)
    }
}

/// A seeded random instance of one family.
pub fn generate(family: &str, n: usize, seed: u64) -> Result<InstanceFile> {
    if n == 0 {
        return Err(Error::InvalidSpec("n must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spec = random_spec(family, n, &mut rng)?;
    let direction = random_direction(n, &mut rng);
    Ok(InstanceFile {
        n,
        function: FunctionSpec {
            family: spec,
            seed: Some(seed),
        },
        direction,
        x0: None,
    })
}

/// Largest `n` in the standard random suites.
pub const SUITE_MAX_N: usize = 12;

/// Seed of instance `k` in a suite; distinct across families.
pub fn suite_seed(seed: u64, family: &str, k: usize) -> u64 {
    let tag = family.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0100_0000_01b3)
    });
    seed ^ tag ^ (k as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

/// `count` instances with `n` cycling through `1..=max_n`.
pub fn random_suite(family: &str, count: usize, max_n: usize, seed: u64) -> Result<Vec<InstanceFile>> {
    (0..count)
        .map(|k| generate(family, 1 + k % max_n, suite_seed(seed, family, k)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ground::family::FAMILY_NAMES;

    const SMALL: &str = r#"{"n": 2, "function": {"family": "explicit", "values": [0, 2, 2, 3]}, "direction": [3, 4]}"#;

    #[test]
    fn parses_small_instance() {
        let file = InstanceFile::from_json(SMALL).unwrap();
        assert_eq!(file.function.family, FamilySpec::Explicit { values: vec![0, 2, 2, 3] });
        assert_eq!(file.function.seed, None);
        let inst = file.build().unwrap();
        assert_eq!(inst.direction.as_slice(), &[3, 4]);
    }

    #[test]
    fn round_trips() {
        for family in FAMILY_NAMES {
            for n in [1, 4, 9] {
                let file = generate(family, n, 11).unwrap();
                let again = InstanceFile::from_json(&file.to_json()).unwrap();
                assert_eq!(again, file);
                assert_eq!(again.to_json(), file.to_json());
            }
        }
    }

    #[test]
    fn rejects_bad_files() {
        assert!(InstanceFile::from_json("{").is_err());
        assert!(InstanceFile::from_json(r#"{"n": 1, "function": {"family": "nope"}, "direction": [1]}"#).is_err());
        let unknown = r#"{"n": 2, "function": {"family": "explicit", "values": [0,2,2,3], "extra": 1}, "direction": [3, 4]}"#;
        assert!(InstanceFile::from_json(unknown).is_err());
        let short = InstanceFile::from_json(r#"{"n": 2, "function": {"family": "interval-geometric"}, "direction": [3]}"#).unwrap();
        assert!(short.build().is_err());
        let nonsub = InstanceFile::from_json(r#"{"n": 2, "function": {"family": "explicit", "values": [0,2,2,5]}, "direction": [1, 1]}"#).unwrap();
        assert!(matches!(nonsub.build(), Err(Error::NonSubmodular { .. })));
    }

    #[test]
    fn translation_applies() {
        let file = InstanceFile::from_json(
            r#"{"n": 2, "function": {"family": "explicit", "values": [0,2,2,3]}, "direction": [1, 1], "x0": [1, 1]}"#,
        )
        .unwrap();
        let inst = file.build().unwrap();
        assert_eq!(inst.oracle.eval(crate::Subset::full(2)), 1.into());
        let outside = InstanceFile { x0: Some(vec![3, 0]), ..file };
        assert!(outside.build().is_err());
    }

    #[test]
    fn suites_are_deterministic() {
        let a = random_suite("coverage", 30, SUITE_MAX_N, 5).unwrap();
        let b = random_suite("coverage", 30, SUITE_MAX_N, 5).unwrap();
        assert_eq!(a, b);
        assert_eq!(a[13].n, 2);
        assert_ne!(suite_seed(5, "coverage", 0), suite_seed(5, "graph-cut", 0));
    }
}
