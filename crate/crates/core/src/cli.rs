//! Command implementations behind the `refspace` binary. Each command
//! returns its rendered output and exit code: 0 success, 1 input error,
//! 2 inconclusive verdict.

use std::fmt::Write as _;

use serde::Serialize;

use crate::bilattice::{
    enumerate_bil, phi, psi1, psi2, theta, BilatticeContext, FiniteBilattice, FiniteBilatticeJson,
    LatticeSource, PairJson,
};
use crate::error::{Error, Result};
use crate::invariant::DEFAULT_MAX_ENUM_DIM;
use crate::laws::{enlargement_laws, galois_laws, psi_laws, LawResult};
use crate::operator_space::{
    check_module_algebras, LawCheck, ModuleAlgebraReport, OperatorSpaceJson,
};
use crate::problem::{fixture_names, load_fixture, Problem};
use crate::reflexivity::{
    decide_reflexive, equivalence_check, DecideOptions, EquivalenceReport, Execution, Status,
    Verdict, VerdictJson,
};
use crate::subspace::{ProjectionPair, Subspace, SubspaceJson};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;

pub const DEFAULT_LAW_SAMPLES: usize = 200;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Format {
    #[default]
    Json,
    Text,
}

#[derive(Clone, Debug)]
pub struct Flags {
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub max_enum_dim: usize,
    pub format: Format,
    pub execution: Execution,
}

impl Default for Flags {
    fn default() -> Self {
        Flags {
            samples: None,
            seed: None,
            max_enum_dim: DEFAULT_MAX_ENUM_DIM,
            format: Format::Json,
            execution: Execution::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub output: String,
}

impl Outcome {
    pub fn error(e: &Error) -> Self {
        Outcome {
            code: EXIT_INPUT,
            output: format!("error: {e}\n"),
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn options(problem: &Problem, flags: &Flags) -> DecideOptions {
    DecideOptions {
        plan: problem.plan(flags.seed, flags.samples),
        supplied: problem.supplied.clone(),
        max_enum_dim: flags.max_enum_dim,
        execution: flags.execution,
    }
}

/// The enumerated `Bil(M)` when either lattice source applies.
fn bilattice_for(problem: &Problem, flags: &Flags) -> Result<Option<FiniteBilattice>> {
    let ctx = &problem.context;
    let source = match &problem.supplied {
        Some(s) => LatticeSource::Supplied(s.clone()),
        None if ctx.is_diagonal_containing() => LatticeSource::Diagonal {
            max_dim: flags.max_enum_dim,
        },
        None => return Ok(None),
    };
    enumerate_bil(ctx, &source).map(Some)
}

#[derive(Clone, Debug, Serialize)]
pub struct AnalyzeReport {
    pub name: Option<String>,
    pub h1: usize,
    pub h2: usize,
    pub m: OperatorSpaceJson,
    pub a_algebra: OperatorSpaceJson,
    pub b_algebra: OperatorSpaceJson,
    pub module_algebras: ModuleAlgebraReport,
    pub verdict: VerdictJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub equivalences: Option<EquivalenceReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bilattice: Option<FiniteBilatticeJson>,
}

pub fn analyze(problem: &Problem, flags: &Flags) -> Result<(AnalyzeReport, Verdict)> {
    let ctx = &problem.context;
    let verdict = decide_reflexive(ctx, &options(problem, flags))?;
    let equivalences = match verdict.bilattice {
        Some(_) => Some(equivalence_check(ctx, &verdict)?),
        None => None,
    };
    let m = ctx.space();
    let report = AnalyzeReport {
        name: problem.name.clone(),
        h1: m.h1(),
        h2: m.h2(),
        m: m.to_json(),
        a_algebra: ctx.a_algebra().to_json(),
        b_algebra: ctx.b_algebra().to_json(),
        module_algebras: check_module_algebras(m, verdict.status.reflexive()),
        verdict: verdict.to_json(),
        equivalences,
        bilattice: verdict.bilattice.as_ref().map(FiniteBilattice::to_json),
    };
    Ok((report, verdict))
}

fn law_line(out: &mut String, name: &str, check: &LawCheck) {
    let _ = match check {
        LawCheck::Pass => writeln!(out, "  PASS {name}"),
        LawCheck::Fail(d) => writeln!(out, "  FAIL {name}: {d}"),
        LawCheck::Skipped(d) => writeln!(out, "  SKIP {name}: {d}"),
    };
}

fn analyze_text(r: &AnalyzeReport) -> String {
    let mut out = String::new();
    if let Some(name) = &r.name {
        let _ = writeln!(out, "{name}");
    }
    let v = &r.verdict;
    let _ = writeln!(
        out,
        "shape: {}x{} (h1 = {}, h2 = {})",
        r.h2, r.h1, r.h1, r.h2
    );
    let _ = writeln!(
        out,
        "dim M = {}, dim A_M = {}, dim B_M = {}",
        r.m.dim, r.a_algebra.dim, r.b_algebra.dim
    );
    let _ = writeln!(
        out,
        "status: {}",
        serde_json::to_value(v.status)
            .unwrap()
            .as_str()
            .unwrap_or_default()
    );
    let _ = writeln!(
        out,
        "path: {}",
        serde_json::to_value(v.provenance.path)
            .unwrap()
            .as_str()
            .unwrap_or_default()
    );
    let _ = writeln!(out, "dim ref_space = {}", v.dim_ref_space);
    for w in &v.witnesses {
        let rows: Vec<String> = w
            .iter()
            .map(|row| format!("[{}]", row.join(", ")))
            .collect();
        let _ = writeln!(out, "witness: [{}]", rows.join(", "));
    }
    let _ = writeln!(out, "module algebra identities:");
    let ma = &r.module_algebras;
    law_line(&mut out, "adjoint_identity", &ma.adjoint_identity);
    law_line(
        &mut out,
        "annihilator_identities",
        &ma.annihilator_identities,
    );
    law_line(&mut out, "selfadjoint_c_star", &ma.selfadjoint_c_star);
    law_line(&mut out, "von_neumann", &ma.von_neumann);
    if let Some(eq) = &r.equivalences {
        let _ = writeln!(out, "characterizations of Op(Bil) (dim {}):", eq.dim_op_bil);
        for (name, c) in eq.checks() {
            law_line(&mut out, name, c);
        }
    }
    out
}

pub fn cmd_analyze(problem: &Problem, flags: &Flags) -> Outcome {
    match analyze(problem, flags) {
        Ok((report, verdict)) => Outcome {
            code: if verdict.status == Status::InconclusiveUpperBound {
                EXIT_INCONCLUSIVE
            } else {
                EXIT_OK
            },
            output: match flags.format {
                Format::Json => to_json(&report),
                Format::Text => analyze_text(&report),
            },
        },
        Err(e) => Outcome::error(&e),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PhiReport {
    pub p: SubspaceJson,
    pub phi: SubspaceJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi_by_join: Option<SubspaceJson>,
    pub psi1: PairJson,
}

#[derive(Clone, Debug, Serialize)]
pub struct ThetaReport {
    pub q: SubspaceJson,
    pub theta: SubspaceJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta_by_join: Option<SubspaceJson>,
    pub psi2: PairJson,
}

#[derive(Clone, Debug, Serialize)]
pub struct GaloisReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi: Option<PhiReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<ThetaReport>,
}

fn disagreement(map: &str, input: &Subspace, fixpoint: &Subspace, join: &Subspace) -> Error {
    Error::Input(format!(
        "{map}({}) disagrees between routes: fixpoint {} vs join {}",
        input.label(),
        fixpoint.label(),
        join.label()
    ))
}

pub fn galois(
    problem: &Problem,
    p: Option<&str>,
    q: Option<&str>,
    flags: &Flags,
) -> Result<GaloisReport> {
    if p.is_none() && q.is_none() {
        return Err(Error::Input("give --p, --q or both".into()));
    }
    let ctx: &BilatticeContext = &problem.context;
    let bil = bilattice_for(problem, flags).ok().flatten();
    let phi_report = match p {
        Some(text) => {
            let p = Subspace::parse_named(ctx.h1(), text)?;
            let fp = phi(&p, ctx)?;
            let by_join = match &bil {
                Some(b) if b.lat_a().contains(&p) => Some(b.phi_by_join(&p, ctx)?),
                _ => None,
            };
            if let Some(j) = &by_join {
                if *j != fp {
                    return Err(disagreement("phi", &p, &fp, j));
                }
            }
            let image = psi1(
                &ProjectionPair::new(p.clone(), Subspace::zero(ctx.h2())),
                ctx,
            )?;
            Some(PhiReport {
                p: p.to_json(),
                phi: fp.to_json(),
                phi_by_join: by_join.map(|s| s.to_json()),
                psi1: (&image).into(),
            })
        }
        None => None,
    };
    let theta_report = match q {
        Some(text) => {
            let q = Subspace::parse_named(ctx.h2(), text)?;
            let tq = theta(&q, ctx)?;
            let by_join = match &bil {
                Some(b) if b.lat_b_perp().contains(&q) => Some(b.theta_by_join(&q, ctx)?),
                _ => None,
            };
            if let Some(j) = &by_join {
                if *j != tq {
                    return Err(disagreement("theta", &q, &tq, j));
                }
            }
            let image = psi2(
                &ProjectionPair::new(Subspace::zero(ctx.h1()), q.clone()),
                ctx,
            )?;
            Some(ThetaReport {
                q: q.to_json(),
                theta: tq.to_json(),
                theta_by_join: by_join.map(|s| s.to_json()),
                psi2: (&image).into(),
            })
        }
        None => None,
    };
    Ok(GaloisReport {
        phi: phi_report,
        theta: theta_report,
    })
}

fn galois_text(r: &GaloisReport) -> String {
    let mut out = String::new();
    if let Some(x) = &r.phi {
        let _ = writeln!(out, "phi({}) = {}", x.p.label, x.phi.label);
        if let Some(j) = &x.phi_by_join {
            let _ = writeln!(out, "phi({}) by join = {}", x.p.label, j.label);
        }
        let _ = writeln!(out, "psi1 = ({}, {})", x.psi1.p.label, x.psi1.q.label);
    }
    if let Some(x) = &r.theta {
        let _ = writeln!(out, "theta({}) = {}", x.q.label, x.theta.label);
        if let Some(j) = &x.theta_by_join {
            let _ = writeln!(out, "theta({}) by join = {}", x.q.label, j.label);
        }
        let _ = writeln!(out, "psi2 = ({}, {})", x.psi2.p.label, x.psi2.q.label);
    }
    out
}

pub fn cmd_galois(problem: &Problem, p: Option<&str>, q: Option<&str>, flags: &Flags) -> Outcome {
    match galois(problem, p, q, flags) {
        Ok(report) => Outcome {
            code: EXIT_OK,
            output: match flags.format {
                Format::Json => to_json(&report),
                Format::Text => galois_text(&report),
            },
        },
        Err(e) => Outcome::error(&e),
    }
}

pub const SUITES: &[&str] = &[
    "module-algebras",
    "galois",
    "enlargement",
    "psi",
    "equivalences",
];

/// Short alternative names, in `SUITES` order.
pub const SUITE_ALIASES: &[&str] = &["prop23", "prop33", "lemma31", "cor34", "theo35"];

fn suite_name(name: &str) -> Option<&'static str> {
    SUITES
        .iter()
        .zip(SUITE_ALIASES)
        .find(|(s, a)| **s == name || **a == name)
        .map(|(s, _)| *s)
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub laws: Vec<LawResult>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub name: Option<String>,
    pub suites: Vec<SuiteReport>,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
}

fn skipped_suite(suite: &str, laws: &[&str], reason: &str) -> SuiteReport {
    SuiteReport {
        suite: suite.into(),
        laws: laws
            .iter()
            .map(|l| LawResult {
                law: (*l).into(),
                check: LawCheck::Skipped(reason.into()),
            })
            .collect(),
    }
}

pub fn check(problem: &Problem, suite: &str, flags: &Flags) -> Result<CheckReport> {
    let selected: Vec<&str> = match suite {
        "all" => SUITES.to_vec(),
        other => match suite_name(other) {
            Some(s) => vec![s],
            None => {
                return Err(Error::Input(format!(
                    "unknown suite {other:?}; known: {}, all",
                    SUITES.join(", ")
                )));
            }
        },
    };
    let ctx = &problem.context;
    let bil = bilattice_for(problem, flags)?;
    let no_bil = "bilattice not enumerable";
    let plan = problem.plan(flags.seed, flags.samples);
    let mut suites = Vec::new();
    for name in selected {
        let report = match name {
            "module-algebras" => {
                let reflexive = decide_reflexive(ctx, &options(problem, flags))?
                    .status
                    .reflexive();
                let r = check_module_algebras(ctx.space(), reflexive);
                SuiteReport {
                    suite: name.into(),
                    laws: vec![
                        LawResult {
                            law: "adjoint_identity".into(),
                            check: r.adjoint_identity,
                        },
                        LawResult {
                            law: "annihilator_identities".into(),
                            check: r.annihilator_identities,
                        },
                        LawResult {
                            law: "selfadjoint_c_star".into(),
                            check: r.selfadjoint_c_star,
                        },
                        LawResult {
                            law: "von_neumann".into(),
                            check: r.von_neumann,
                        },
                    ],
                }
            }
            "galois" => match &bil {
                Some(b) => SuiteReport {
                    suite: name.into(),
                    laws: galois_laws(ctx, b)?,
                },
                None => skipped_suite(
                    name,
                    &[
                        "antitone",
                        "gluing",
                        "join_reversal",
                        "inflation",
                        "triple_composition",
                    ],
                    no_bil,
                ),
            },
            "psi" => match &bil {
                Some(b) => SuiteReport {
                    suite: name.into(),
                    laws: psi_laws(ctx, b)?,
                },
                None => skipped_suite(
                    name,
                    &["psi_in_bil", "order_preserving", "equal_images"],
                    no_bil,
                ),
            },
            "enlargement" => {
                let count = flags.samples.unwrap_or(DEFAULT_LAW_SAMPLES);
                SuiteReport {
                    suite: name.into(),
                    laws: enlargement_laws(ctx, bil.as_ref(), count, plan.seed)?,
                }
            }
            "equivalences" => {
                let verdict = decide_reflexive(ctx, &options(problem, flags))?;
                match equivalence_check(ctx, &verdict) {
                    Ok(r) => SuiteReport {
                        suite: name.into(),
                        laws: r
                            .checks()
                            .iter()
                            .map(|(law, c)| LawResult {
                                law: (*law).into(),
                                check: (*c).clone(),
                            })
                            .collect(),
                    },
                    Err(_) => skipped_suite(
                        name,
                        &[
                            "psi_image",
                            "theta_graph",
                            "phi_graph",
                            "consistent_with_verdict",
                        ],
                        no_bil,
                    ),
                }
            }
            _ => unreachable!("suite names are validated above"),
        };
        suites.push(report);
    }
    let all = suites.iter().flat_map(|s| &s.laws);
    let passed = all.clone().filter(|l| l.check.is_pass()).count();
    let failed = all.clone().filter(|l| l.check.is_fail()).count();
    let skipped = all.count() - passed - failed;
    Ok(CheckReport {
        name: problem.name.clone(),
        suites,
        passed,
        failed,
        skipped,
    })
}

fn check_text(r: &CheckReport) -> String {
    let mut out = String::new();
    for s in &r.suites {
        let _ = writeln!(out, "{}:", s.suite);
        for l in &s.laws {
            law_line(&mut out, &l.law, &l.check);
        }
    }
    let _ = writeln!(
        out,
        "{} passed, {} failed, {} skipped",
        r.passed, r.failed, r.skipped
    );
    out
}

pub fn cmd_check(problem: &Problem, suite: &str, flags: &Flags) -> Outcome {
    match check(problem, suite, flags) {
        Ok(report) => Outcome {
            code: if report.failed == 0 {
                EXIT_OK
            } else {
                EXIT_INPUT
            },
            output: match flags.format {
                Format::Json => to_json(&report),
                Format::Text => check_text(&report),
            },
        },
        Err(e) => Outcome::error(&e),
    }
}

pub fn cmd_fixtures_list(flags: &Flags) -> Outcome {
    let names = fixture_names();
    let output = match flags.format {
        Format::Json => to_json(&names),
        Format::Text => names.iter().map(|n| format!("{n}\n")).collect(),
    };
    Outcome {
        code: EXIT_OK,
        output,
    }
}

pub fn cmd_fixtures_run(name: &str, flags: &Flags) -> Outcome {
    match load_fixture(name) {
        Ok(problem) => cmd_analyze(&problem, flags),
        Err(e) => Outcome::error(&e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixture(name: &str) -> Problem {
        load_fixture(name).unwrap()
    }

    fn quick() -> Flags {
        Flags {
            samples: Some(20),
            ..Flags::default()
        }
    }

    #[test]
    fn analyze_examples() {
        let (r, v) = analyze(&fixture("unit-e12"), &quick()).unwrap();
        assert_eq!(v.status, Status::ReflexiveExact);
        assert_eq!((r.m.dim, r.a_algebra.dim), (1, 3));

        let (_, v) = analyze(&fixture("jordan"), &quick()).unwrap();
        assert_eq!(v.status, Status::NonReflexiveExact);
        assert_eq!(v.witnesses, vec![crate::matrix::Matrix::unit(2, 2, 0, 0)]);

        let (r, v) = analyze(&fixture("zero"), &quick()).unwrap();
        assert_eq!(v.status, Status::ReflexiveExact);
        assert_eq!(r.a_algebra.dim, 4);
    }

    #[test]
    fn galois_examples() {
        let flags = Flags::default();
        let r = galois(&fixture("unit-e12"), Some("full"), Some("e2"), &flags).unwrap();
        let phi = r.phi.unwrap();
        assert_eq!(phi.phi.label, "e2");
        assert_eq!(phi.phi_by_join.unwrap().label, "e2");
        assert_eq!(r.theta.unwrap().theta.label, "full");
        for name in fixture_names() {
            let r = galois(&fixture(name), Some("zero"), None, &flags).unwrap();
            assert_eq!(r.phi.unwrap().phi.label, "full");
        }
        let out = cmd_galois(&fixture("unit-e12"), Some("e2"), None, &flags);
        assert_eq!(out.code, EXIT_INPUT);
        assert!(out.output.contains("not invariant"));
    }

    #[test]
    fn check_examples() {
        let flags = Flags::default();
        let r = check(&fixture("unit-e12"), "all", &flags).unwrap();
        assert_eq!((r.failed, r.skipped), (0, 2), "{r:?}");
        let r = check(&fixture("jordan"), "prop33", &flags).unwrap();
        assert_eq!((r.passed, r.failed), (5, 0));
        let r = check(&fixture("zero"), "equivalences", &flags).unwrap();
        assert_eq!((r.passed, r.failed), (4, 0));
        assert_eq!(cmd_check(&fixture("zero"), "nope", &flags).code, EXIT_INPUT);
    }

    #[test]
    fn fixture_commands() {
        let out = cmd_fixtures_list(&Flags {
            format: Format::Text,
            ..Flags::default()
        });
        assert_eq!(out.output.lines().count(), 8);
        let out = cmd_fixtures_run("diag2", &quick());
        assert_eq!(out.code, EXIT_OK);
        assert!(out.output.contains("\"status\": \"reflexive_exact\""));
        let out = cmd_fixtures_run("scalars", &quick());
        assert!(out
            .output
            .contains("\"status\": \"reflexive_certified_by_dim\""));
        assert_eq!(cmd_fixtures_run("nope", &quick()).code, EXIT_INPUT);
    }

    #[test]
    fn text_output() {
        let out = cmd_analyze(
            &fixture("jordan"),
            &Flags {
                format: Format::Text,
                ..quick()
            },
        );
        assert!(out.output.contains("status: non_reflexive_exact"));
        assert!(out.output.contains("witness: [[1, 0], [0, 0]]"));
    }
}
