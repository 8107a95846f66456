//! Problem files: an operator space given by a basis, optional lattices
//! for its module algebras, and optional sampling overrides.
//!
//! ```json
//! {
//!   "name": "jordan",
//!   "h1": 2, "h2": 2,
//!   "basis": [[["1", "0"], ["0", "1"]], [["0", "1"], ["0", "0"]]],
//!   "supplied_lat_a": ["zero", "e1", "full"],
//!   "supplied_lat_b_perp": ["zero", [["0", "1"]], "full"],
//!   "samples": { "seed": 7, "random_count": 20, "extra": [["1", "i"]] }
//! }
//! ```
//!
//! Matrices are lists of rows (`h2` rows of `h1` scalars). A subspace is a
//! shorthand string (`zero`, `full`, `e2`, `e1+e3`) or a list of spanning
//! vectors.

use serde::{Deserialize, Serialize};

use crate::bilattice::{BilatticeContext, SuppliedLattices};
use crate::error::{Error, Result};
use crate::matrix::{Matrix, Scalar};
use crate::operator_space::OperatorSpace;
use crate::reflexivity::SamplePlan;
use crate::subspace::Subspace;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SubspaceSpec {
    Named(String),
    Span(Vec<Vec<Scalar>>),
}

impl SubspaceSpec {
    pub fn resolve(&self, ambient: usize) -> Result<Subspace> {
        match self {
            SubspaceSpec::Named(text) => Subspace::parse_named(ambient, text),
            SubspaceSpec::Span(vectors) => Subspace::span(ambient, vectors.iter().cloned()),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub random_count: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub extra: Vec<Vec<Scalar>>,
}

/// The on-disk form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub h1: usize,
    pub h2: usize,
    pub basis: Vec<Vec<Vec<Scalar>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub supplied_lat_a: Option<Vec<SubspaceSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub supplied_lat_b_perp: Option<Vec<SubspaceSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<SampleOverrides>,
}

/// A validated problem.
#[derive(Clone, Debug)]
pub struct Problem {
    pub name: Option<String>,
    pub context: BilatticeContext,
    pub supplied: Option<SuppliedLattices>,
    pub samples: SampleOverrides,
}

impl ProblemFile {
    pub fn from_json(text: &str) -> Result<ProblemFile> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    pub fn to_problem(&self) -> Result<Problem> {
        let (h1, h2) = (self.h1, self.h2);
        if h1 == 0 || h2 == 0 {
            return Err(Error::Input("h1 and h2 must be positive".into()));
        }
        let mut matrices = Vec::with_capacity(self.basis.len());
        for (k, rows) in self.basis.iter().enumerate() {
            if rows.len() != h2 || rows.iter().any(|r| r.len() != h1) {
                return Err(Error::Input(format!(
                    "basis[{k}] must have {h2} rows of {h1} entries"
                )));
            }
            matrices.push(Matrix::from_rows(rows.clone())?);
        }
        let space = OperatorSpace::new(h1, h2, &matrices)?;
        let context = BilatticeContext::new(space);

        let supplied = match (&self.supplied_lat_a, &self.supplied_lat_b_perp) {
            (None, None) => None,
            (Some(a), Some(b)) => {
                let resolve =
                    |specs: &[SubspaceSpec], n: usize, field: &str| -> Result<Vec<Subspace>> {
                        specs
                            .iter()
                            .enumerate()
                            .map(|(k, s)| {
                                s.resolve(n)
                                    .map_err(|e| Error::Input(format!("{field}[{k}]: {e}")))
                            })
                            .collect()
                    };
                let lattices = SuppliedLattices {
                    lat_a: resolve(a, h1, "supplied_lat_a")?,
                    lat_b_perp: resolve(b, h2, "supplied_lat_b_perp")?,
                };
                validate_lattices(&context, &lattices)?;
                Some(lattices)
            }
            _ => {
                return Err(Error::Input(
                    "supplied_lat_a and supplied_lat_b_perp must be given together".into(),
                ))
            }
        };
        let samples = self.samples.clone().unwrap_or_default();
        for (k, v) in samples.extra.iter().enumerate() {
            if v.len() != h1 {
                return Err(Error::Input(format!(
                    "samples.extra[{k}] must have {h1} entries"
                )));
            }
        }
        Ok(Problem {
            name: self.name.clone(),
            context,
            supplied,
            samples,
        })
    }
}

fn validate_lattices(ctx: &BilatticeContext, lattices: &SuppliedLattices) -> Result<()> {
    for (k, p) in lattices.lat_a.iter().enumerate() {
        if !ctx.in_lat_a(p)? {
            return Err(Error::Input(format!(
                "supplied_lat_a[{k}] = {} is not invariant under A_M",
                p.label()
            )));
        }
    }
    for (k, q) in lattices.lat_b_perp.iter().enumerate() {
        if !ctx.in_lat_b_perp(q)? {
            return Err(Error::Input(format!(
                "supplied_lat_b_perp[{k}] = {} is not invariant under B_M*",
                q.label()
            )));
        }
    }
    let check = |lattice: &[Subspace], n: usize, field: &str| {
        crate::invariant::check_sublattice(n, lattice)
            .map_err(|r| Error::Input(format!("{field}: {r}")))
    };
    check(&lattices.lat_a, ctx.h1(), "supplied_lat_a")?;
    check(&lattices.lat_b_perp, ctx.h2(), "supplied_lat_b_perp")
}

impl Problem {
    pub fn parse(text: &str) -> Result<Problem> {
        ProblemFile::from_json(text)?.to_problem()
    }

    pub fn space(&self) -> &OperatorSpace {
        self.context.space()
    }

    /// The sample plan after applying file overrides, then command-line ones.
    pub fn plan(&self, seed: Option<u64>, random_count: Option<usize>) -> SamplePlan {
        let mut plan = SamplePlan::default();
        if let Some(s) = self.samples.seed {
            plan.seed = s;
        }
        if let Some(n) = self.samples.random_count {
            plan.random_count = n;
        }
        plan.extra = self.samples.extra.clone();
        if let Some(s) = seed {
            plan.seed = s;
        }
        if let Some(n) = random_count {
            plan.random_count = n;
        }
        plan
    }
}

pub struct Fixture {
    pub name: &'static str,
    pub source: &'static str,
}

pub const FIXTURES: &[Fixture] = &[
    Fixture {
        name: "zero",
        source: include_str!("../fixtures/zero.json"),
    },
    Fixture {
        name: "full",
        source: include_str!("../fixtures/full.json"),
    },
    Fixture {
        name: "scalars",
        source: include_str!("../fixtures/scalars.json"),
    },
    Fixture {
        name: "unit-e12",
        source: include_str!("../fixtures/unit-e12.json"),
    },
    Fixture {
        name: "jordan",
        source: include_str!("../fixtures/jordan.json"),
    },
    Fixture {
        name: "diag2",
        source: include_str!("../fixtures/diag2.json"),
    },
    Fixture {
        name: "uppertri3",
        source: include_str!("../fixtures/uppertri3.json"),
    },
    Fixture {
        name: "strict-upper3",
        source: include_str!("../fixtures/strict-upper3.json"),
    },
];

pub fn fixture_names() -> Vec<&'static str> {
    FIXTURES.iter().map(|f| f.name).collect()
}

pub fn fixture_source(name: &str) -> Result<&'static str> {
    FIXTURES
        .iter()
        .find(|f| f.name == name)
        .map(|f| f.source)
        .ok_or_else(|| {
            Error::Input(format!(
                "unknown fixture {name:?}; known: {}",
                fixture_names().join(", ")
            ))
        })
}

pub fn load_fixture(name: &str) -> Result<Problem> {
    Problem::parse(fixture_source(name)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_parse_to_documented_dims() {
        let expected = [
            ("zero", 2, 0),
            ("full", 2, 4),
            ("scalars", 2, 1),
            ("unit-e12", 2, 1),
            ("jordan", 2, 2),
            ("diag2", 2, 2),
            ("uppertri3", 3, 6),
            ("strict-upper3", 3, 3),
        ];
        assert_eq!(fixture_names().len(), expected.len());
        for (name, n, dim) in expected {
            let p = load_fixture(name).unwrap();
            assert_eq!(
                (p.space().h1(), p.space().h2(), p.space().dim()),
                (n, n, dim),
                "{name}"
            );
        }
        assert!(load_fixture("jordan").unwrap().supplied.is_some());
        assert!(load_fixture("nope").is_err());
    }

    #[test]
    fn round_trip() {
        for f in FIXTURES {
            let file = ProblemFile::from_json(f.source).unwrap();
            let again = ProblemFile::from_json(&serde_json::to_string(&file).unwrap()).unwrap();
            assert_eq!(file, again);
        }
    }

    #[test]
    fn parse_errors_carry_position() {
        let text =
            "{\n  \"h1\": 2,\n  \"h2\": 2,\n  \"basis\": [[[\"1\", \"x\"], [\"0\", \"0\"]]]\n}";
        match ProblemFile::from_json(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            ProblemFile::from_json("{\"h1\": 2,"),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn semantic_errors() {
        let bad_shape = r#"{"h1": 2, "h2": 2, "basis": [[["1", "0"]]]}"#;
        assert!(matches!(Problem::parse(bad_shape), Err(Error::Input(_))));
        let not_invariant = r#"{"h1": 2, "h2": 2, "basis": [[["1","0"],["0","1"]], [["0","1"],["0","0"]]],
            "supplied_lat_a": ["zero", "e2", "full"], "supplied_lat_b_perp": ["zero", "full"]}"#;
        let err = Problem::parse(not_invariant).unwrap_err();
        assert!(err.to_string().contains("supplied_lat_a[1]"));
        let half = r#"{"h1": 2, "h2": 2, "basis": [], "supplied_lat_a": ["zero", "full"]}"#;
        assert!(Problem::parse(half).is_err());
    }

    #[test]
    fn plan_overrides_layer() {
        let text = r#"{"h1": 2, "h2": 2, "basis": [], "samples": {"seed": 3, "random_count": 5, "extra": [["1", "i"]]}}"#;
        let p = Problem::parse(text).unwrap();
        let plan = p.plan(None, None);
        assert_eq!((plan.seed, plan.random_count, plan.extra.len()), (3, 5, 1));
        let plan = p.plan(Some(9), Some(0));
        assert_eq!((plan.seed, plan.random_count), (9, 0));
    }
}
