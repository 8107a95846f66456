//! The reflexive cover `Ref(M) = {S : S·x ∈ M·x for all x}` and the
//! reflexivity decision.
//!
//! Two routes are available. When the bilattice can be materialized (both
//! module algebras contain the diagonal, or the caller supplies complete
//! lattices) `Ref(M) = Op(Bil(M))` is computed exactly. Otherwise the
//! defining condition is imposed at finitely many sample vectors, which
//! yields a space containing `Ref(M)`; if it already has the dimension of
//! `M` it equals `M`.

use rayon::prelude::*;
use serde::Serialize;

use crate::bilattice::{
    enumerate_bil, op_of, phi, psi1, theta, BilatticeContext, Completeness, FiniteBilattice,
    LatticeSource, SuppliedLattices,
};
use crate::error::{Error, Result};
use crate::invariant::{alg_of, is_invariant, GeneratorSet, DEFAULT_MAX_ENUM_DIM};
use crate::matrix::{unit_vector, Echelon, Matrix, Scalar, Vector};
use crate::operator_space::{matrix_json, LawCheck, OperatorSpace, OperatorSpaceJson};
use crate::sampling::{random_vector, stream_rng, DEFAULT_ENTRY_BOUND};
use crate::subspace::{ProjectionPair, Subspace};

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_RANDOM_COUNT: usize = 100;

/// Which vectors `x` the sampling route imposes `S·x ∈ M·x` at.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SamplePlan {
    pub seed: u64,
    pub random_count: usize,
    pub entry_bound: i64,
    /// `e_i` for every `i`.
    pub basis_vectors: bool,
    /// `e_i + e_j` for `i < j`.
    pub pairwise_sums: bool,
    /// `e_i + i·e_j` for `i ≠ j`.
    pub conjugate_mixes: bool,
    #[serde(skip)]
    pub extra: Vec<Vector>,
}

impl Default for SamplePlan {
    fn default() -> Self {
        SamplePlan {
            seed: DEFAULT_SEED,
            random_count: DEFAULT_RANDOM_COUNT,
            entry_bound: DEFAULT_ENTRY_BOUND,
            basis_vectors: true,
            pairwise_sums: true,
            conjugate_mixes: true,
            extra: Vec::new(),
        }
    }
}

impl SamplePlan {
    pub fn structured_only() -> Self {
        SamplePlan {
            random_count: 0,
            ..Self::default()
        }
    }

    pub fn random_only(seed: u64, random_count: usize) -> Self {
        SamplePlan {
            seed,
            random_count,
            basis_vectors: false,
            pairwise_sums: false,
            conjugate_mixes: false,
            ..Self::default()
        }
    }

    /// Structured vectors in a fixed order, followed by the extra vectors.
    pub fn structured_vectors(&self, n: usize) -> Result<Vec<Vector>> {
        let mut out = Vec::new();
        if self.basis_vectors {
            out.extend((0..n).map(|i| unit_vector(n, i)));
        }
        if self.pairwise_sums {
            for i in 0..n {
                for j in i + 1..n {
                    let mut v = unit_vector(n, i);
                    v[j] = Scalar::from_int(1);
                    out.push(v);
                }
            }
        }
        if self.conjugate_mixes {
            for i in 0..n {
                for j in (0..n).filter(|&j| j != i) {
                    let mut v = unit_vector(n, i);
                    v[j] = Scalar::i();
                    out.push(v);
                }
            }
        }
        for v in &self.extra {
            if v.len() != n {
                return Err(Error::shape("sample vector", n, v.len()));
            }
            out.push(v.clone());
        }
        Ok(out)
    }

    /// Random sample `index`, regenerated from `(seed, index)` alone.
    pub fn random_vector(&self, n: usize, index: usize) -> Vector {
        random_vector(
            &mut stream_rng(self.seed, index as u64),
            n,
            self.entry_bound,
        )
    }

    /// The whole sample stream: structured vectors, then random ones.
    pub fn vectors(&self, n: usize) -> Result<Vec<Vector>> {
        let mut out = self.structured_vectors(n)?;
        out.extend((0..self.random_count).map(|k| self.random_vector(n, k)));
        Ok(out)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Execution {
    Serial,
    #[default]
    Parallel,
}

/// `M·x = span{T·x : T ∈ M}`.
pub fn orbit(m: &OperatorSpace, x: &[Scalar]) -> Result<Subspace> {
    if x.len() != m.h1() {
        return Err(Error::shape("sample vector", m.h1(), x.len()));
    }
    Subspace::span(m.h2(), m.basis().iter().map(|t| t.mul_vec(x)))
}

/// Linear conditions on `vec(S)` equivalent to `S·x ∈ M·x`, in reduced
/// echelon form. Each row is `conj(w)ᵀ·(xᵀ ⊗ I)` for `w` in a basis of
/// `(M·x)^⊥`.
pub fn ref_constraints_at(x: &[Scalar], m: &OperatorSpace) -> Result<Vec<Vector>> {
    let complement = orbit(m, x)?.ortho_complement();
    let h2 = m.h2();
    let rows = complement.basis().iter().map(|w| {
        let mut row = Vec::with_capacity(x.len() * h2);
        for xj in x {
            row.extend(w.iter().map(|wk| xj * &wk.conj()));
        }
        row
    });
    Ok(Echelon::from_rows(m.h1() * h2, rows).into_rows())
}

fn space_from_constraints(m: &OperatorSpace, constraints: &Echelon) -> OperatorSpace {
    let basis: Vec<Matrix> = constraints
        .nullspace()
        .iter()
        .map(|v| Matrix::unvec(v, m.h2(), m.h1()).expect("vec length"))
        .collect();
    OperatorSpace::new(m.h1(), m.h2(), &basis).expect("shapes agree")
}

/// Counts describing a sampling run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SampleStats {
    pub structured: usize,
    pub random: usize,
    pub seed: u64,
    pub bound_dim: usize,
}

/// Intersection of the constraint sets over the sample stream: a space
/// containing `Ref(M)`.
pub fn ref_upper_bound(m: &OperatorSpace, plan: &SamplePlan) -> Result<OperatorSpace> {
    ref_upper_bound_with(m, plan, Execution::default()).map(|(bound, _)| bound)
}

pub fn ref_upper_bound_with(
    m: &OperatorSpace,
    plan: &SamplePlan,
    execution: Execution,
) -> Result<(OperatorSpace, SampleStats)> {
    let n = m.h1();
    let structured = plan.structured_vectors(n)?;
    let samples: Vec<Vector> = structured
        .iter()
        .cloned()
        .chain((0..plan.random_count).map(|k| plan.random_vector(n, k)))
        .collect();
    let blocks: Vec<Vec<Vector>> = match execution {
        Execution::Serial => samples
            .iter()
            .map(|x| ref_constraints_at(x, m))
            .collect::<Result<_>>()?,
        Execution::Parallel => samples
            .par_iter()
            .map(|x| ref_constraints_at(x, m))
            .collect::<Result<_>>()?,
    };
    let mut constraints = Echelon::empty(n * m.h2());
    for row in blocks.into_iter().flatten() {
        if constraints.is_full() {
            break;
        }
        constraints.insert(row);
    }
    let bound = space_from_constraints(m, &constraints);
    let stats = SampleStats {
        structured: structured.len(),
        random: plan.random_count,
        seed: plan.seed,
        bound_dim: bound.dim(),
    };
    Ok((bound, stats))
}

/// One-sided membership test of `S` in `Ref(M)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum Membership {
    /// `S·x ∉ M·x`, so `S ∉ Ref(M)`.
    CertifiedNotIn {
        #[serde(serialize_with = "serialize_vector")]
        witness: Vector,
    },
    /// No sample falsified membership.
    NotFalsified { samples: usize },
}

fn serialize_vector<S: serde::Serializer>(
    v: &Vector,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|z| z.to_string()))
}

pub fn ref_membership(s: &Matrix, m: &OperatorSpace, plan: &SamplePlan) -> Result<Membership> {
    if s.shape() != (m.h2(), m.h1()) {
        return Err(Error::shape(
            "ref membership",
            format!("{}x{}", m.h2(), m.h1()),
            format!("{}x{}", s.rows(), s.cols()),
        ));
    }
    let samples = plan.vectors(m.h1())?;
    for x in &samples {
        if !orbit(m, x)?.contains_vector(&s.mul_vec(x)) {
            return Ok(Membership::CertifiedNotIn { witness: x.clone() });
        }
    }
    Ok(Membership::NotFalsified {
        samples: samples.len(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    ReflexiveExact,
    NonReflexiveExact,
    ReflexiveCertifiedByDim,
    InconclusiveUpperBound,
}

impl Status {
    pub fn is_exact(self) -> bool {
        matches!(self, Status::ReflexiveExact | Status::NonReflexiveExact)
    }

    /// `Some(answer)` when the status settles reflexivity.
    pub fn reflexive(self) -> Option<bool> {
        match self {
            Status::ReflexiveExact | Status::ReflexiveCertifiedByDim => Some(true),
            Status::NonReflexiveExact => Some(false),
            Status::InconclusiveUpperBound => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Path {
    DiagonalEnumeration,
    SuppliedLattice,
    Sampling,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Provenance {
    pub path: Path,
    pub completeness: Option<Completeness>,
    /// Why the exact route was not taken, when it was not.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fallback_reason: Option<String>,
}

#[derive(Clone, Debug)]
pub struct Verdict {
    pub status: Status,
    pub m: OperatorSpace,
    /// `Ref(M)` on the exact route, a space containing it otherwise.
    pub ref_space: OperatorSpace,
    pub witnesses: Vec<Matrix>,
    pub provenance: Provenance,
    pub samples: SampleStats,
    pub bilattice: Option<FiniteBilattice>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerdictJson {
    pub status: Status,
    pub dim_m: usize,
    pub dim_ref_space: usize,
    pub ref_space: OperatorSpaceJson,
    pub witnesses: Vec<Vec<Vec<String>>>,
    pub provenance: Provenance,
    pub samples: SampleStats,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bilattice_pairs: Option<usize>,
}

impl Verdict {
    pub fn to_json(&self) -> VerdictJson {
        VerdictJson {
            status: self.status,
            dim_m: self.m.dim(),
            dim_ref_space: self.ref_space.dim(),
            ref_space: self.ref_space.to_json(),
            witnesses: self.witnesses.iter().map(matrix_json).collect(),
            provenance: self.provenance.clone(),
            samples: self.samples,
            bilattice_pairs: self.bilattice.as_ref().map(FiniteBilattice::len),
        }
    }
}

/// Options for [`decide_reflexive`].
#[derive(Clone, Debug)]
pub struct DecideOptions {
    pub plan: SamplePlan,
    pub supplied: Option<SuppliedLattices>,
    pub max_enum_dim: usize,
    pub execution: Execution,
}

impl Default for DecideOptions {
    fn default() -> Self {
        DecideOptions {
            plan: SamplePlan::default(),
            supplied: None,
            max_enum_dim: DEFAULT_MAX_ENUM_DIM,
            execution: Execution::default(),
        }
    }
}

/// Decides whether `M` is reflexive. Invalid supplied lattices are an
/// error; an unusable exact route degrades to sampling.
pub fn decide_reflexive(ctx: &BilatticeContext, options: &DecideOptions) -> Result<Verdict> {
    let m = ctx.space();
    let (bound, samples) = ref_upper_bound_with(m, &options.plan, options.execution)?;

    let (source, path) = match &options.supplied {
        Some(s) => (
            Some(LatticeSource::Supplied(s.clone())),
            Path::SuppliedLattice,
        ),
        None if ctx.is_diagonal_containing() => (
            Some(LatticeSource::Diagonal {
                max_dim: options.max_enum_dim,
            }),
            Path::DiagonalEnumeration,
        ),
        None => (None, Path::Sampling),
    };
    let fallback_reason;
    if let Some(source) = source {
        match enumerate_bil(ctx, &source) {
            Ok(bil) => {
                let ref_space = op_of(m.h1(), m.h2(), bil.pairs())?;
                let witnesses = ref_space.completion_modulo(m)?;
                let status = if witnesses.is_empty() {
                    Status::ReflexiveExact
                } else {
                    Status::NonReflexiveExact
                };
                return Ok(Verdict {
                    status,
                    m: m.clone(),
                    ref_space,
                    witnesses,
                    provenance: Provenance {
                        path,
                        completeness: Some(bil.completeness()),
                        fallback_reason: None,
                    },
                    samples,
                    bilattice: Some(bil),
                });
            }
            Err(e) if path == Path::SuppliedLattice => return Err(e),
            Err(e) => fallback_reason = Some(e.to_string()),
        }
    } else {
        fallback_reason =
            Some("A_M or B_M does not contain the diagonal and no lattices were supplied".into());
    }

    let (status, witnesses) = if bound.dim() == m.dim() {
        (Status::ReflexiveCertifiedByDim, Vec::new())
    } else {
        // every candidate already satisfies the plan; screen with fresh samples
        let screen = SamplePlan::random_only(
            options.plan.seed.wrapping_add(1),
            options.plan.random_count.max(1),
        );
        let mut kept = Vec::new();
        for w in bound.completion_modulo(m)? {
            if let Membership::NotFalsified { .. } = ref_membership(&w, m, &screen)? {
                kept.push(w);
            }
        }
        (Status::InconclusiveUpperBound, kept)
    };
    Ok(Verdict {
        status,
        m: m.clone(),
        ref_space: bound,
        witnesses,
        provenance: Provenance {
            path: Path::Sampling,
            completeness: None,
            fallback_reason,
        },
        samples,
        bilattice: None,
    })
}

/// The three characterizations of `Op(Bil(M))` by the Galois maps.
#[derive(Clone, Debug, Serialize)]
pub struct EquivalenceReport {
    pub dim_op_bil: usize,
    pub dim_m: usize,
    /// `Op({Ψ₁(x) : x ∈ Bil(M)}) = Op(Bil(M))`.
    pub psi_image: LawCheck,
    /// `Op({(θ(Q), Q)}) = Op(Bil(M))`.
    pub theta_graph: LawCheck,
    /// `Op({(P, φ(P))}) = Op(Bil(M))`.
    pub phi_graph: LawCheck,
    /// All three equal `M` iff the verdict is reflexive, and equal the
    /// exact `Ref(M)` otherwise.
    pub consistent_with_verdict: LawCheck,
}

impl EquivalenceReport {
    pub fn checks(&self) -> [(&'static str, &LawCheck); 4] {
        [
            ("psi_image", &self.psi_image),
            ("theta_graph", &self.theta_graph),
            ("phi_graph", &self.phi_graph),
            ("consistent_with_verdict", &self.consistent_with_verdict),
        ]
    }
}

/// Spaces cut out by the three characterizations, in report order.
pub fn characterization_spaces(
    ctx: &BilatticeContext,
    bil: &FiniteBilattice,
) -> Result<[OperatorSpace; 3]> {
    let (h1, h2) = (ctx.h1(), ctx.h2());
    let psi: Vec<ProjectionPair> = bil
        .pairs()
        .iter()
        .map(|x| psi1(x, ctx))
        .collect::<Result<_>>()?;
    let theta_graph: Vec<ProjectionPair> = bil
        .lat_b_perp()
        .iter()
        .map(|q| Ok(ProjectionPair::new(theta(q, ctx)?, q.clone())))
        .collect::<Result<_>>()?;
    let phi_graph: Vec<ProjectionPair> = bil
        .lat_a()
        .iter()
        .map(|p| Ok(ProjectionPair::new(p.clone(), phi(p, ctx)?)))
        .collect::<Result<_>>()?;
    Ok([
        op_of(h1, h2, &psi)?,
        op_of(h1, h2, &theta_graph)?,
        op_of(h1, h2, &phi_graph)?,
    ])
}

pub fn equivalence_check(ctx: &BilatticeContext, verdict: &Verdict) -> Result<EquivalenceReport> {
    let bil = verdict.bilattice.as_ref().ok_or_else(|| {
        Error::precondition(
            "equivalence check",
            "no enumerable bilattice for this space",
        )
    })?;
    let m = ctx.space();
    let op_bil = op_of(m.h1(), m.h2(), bil.pairs())?;
    let spaces = characterization_spaces(ctx, bil)?;
    let compare = |s: &OperatorSpace, name: &str| {
        LawCheck::from_bool(*s == op_bil, || {
            format!(
                "{name} gives dim {}, Op(Bil) has dim {}",
                s.dim(),
                op_bil.dim()
            )
        })
    };
    let all_equal = spaces.iter().all(|s| *s == op_bil);
    let consistent = match verdict.status {
        Status::ReflexiveExact => all_equal && op_bil == *m,
        Status::NonReflexiveExact => all_equal && op_bil == verdict.ref_space && op_bil != *m,
        _ => false,
    };
    Ok(EquivalenceReport {
        dim_op_bil: op_bil.dim(),
        dim_m: m.dim(),
        psi_image: compare(&spaces[0], "Psi_1 image"),
        theta_graph: compare(&spaces[1], "theta graph"),
        phi_graph: compare(&spaces[2], "phi graph"),
        consistent_with_verdict: LawCheck::from_bool(consistent, || {
            format!(
                "verdict {:?} with dim M = {}, dim Op(Bil) = {}",
                verdict.status,
                m.dim(),
                op_bil.dim()
            )
        }),
    })
}

/// Comparison of `Alg(L)` with the sampled bound on `Ref(A)` for a unital
/// algebra `A` and a family `L` of its invariant subspaces.
#[derive(Clone, Debug, Serialize)]
pub struct AlgLatReport {
    pub dim_algebra: usize,
    pub dim_alg_lat: usize,
    pub dim_ref_bound: usize,
    pub lattice_complete: bool,
    /// `Alg(L) = A`.
    pub alg_lat_equals_algebra: bool,
    /// `Ref(A) = Alg Lat(A)`, tested as `Alg(L) = bound` when `L` is complete.
    pub ref_equals_alg_lat: LawCheck,
    /// `Alg(L) ⊄ bound`, which proves `L` is not all of `Lat(A)`.
    pub incompleteness_certified: bool,
}

pub fn alg_lat_check(
    a: &OperatorSpace,
    lattice: &[Subspace],
    lattice_complete: bool,
    plan: &SamplePlan,
) -> Result<AlgLatReport> {
    if !a.is_square() || !a.contains_identity() {
        return Err(Error::precondition(
            "Alg Lat comparison",
            "the algebra must be square and contain the identity",
        ));
    }
    let gens = GeneratorSet::from_space(a)?;
    for w in lattice {
        if !is_invariant(w, &gens)? {
            return Err(Error::precondition(
                "Alg Lat comparison",
                format!("{} is not invariant", w.label()),
            ));
        }
    }
    let alg_lat = alg_of(a.h1(), lattice)?;
    let bound = ref_upper_bound(a, plan)?;
    let incompleteness_certified = !bound.contains_space(&alg_lat)?;
    let ref_equals_alg_lat = if lattice_complete {
        LawCheck::from_bool(alg_lat == bound, || {
            format!(
                "Alg Lat has dim {}, sampled Ref bound has dim {}",
                alg_lat.dim(),
                bound.dim()
            )
        })
    } else {
        LawCheck::Skipped("lattice not known to be complete".into())
    };
    Ok(AlgLatReport {
        dim_algebra: a.dim(),
        dim_alg_lat: alg_lat.dim(),
        dim_ref_bound: bound.dim(),
        lattice_complete,
        alg_lat_equals_algebra: alg_lat == *a,
        ref_equals_alg_lat,
        incompleteness_certified,
    })
}

/// `A_M` and `B_M` are reflexive: `Alg Lat(A_M) = A_M` and
/// `Alg Lat(B_M*) = B_M*` over the enumerated lattices.
pub fn module_algebras_reflexive(
    ctx: &BilatticeContext,
    bil: &FiniteBilattice,
) -> Result<LawCheck> {
    let a = alg_of(ctx.h1(), bil.lat_a())?;
    let b_star = alg_of(ctx.h2(), bil.lat_b_perp())?;
    let a_ok = a == *ctx.a_algebra();
    let b_ok = b_star == ctx.b_algebra().adjoint_space();
    Ok(LawCheck::from_bool(a_ok && b_ok, || {
        format!("Alg Lat(A_M) = A_M: {a_ok}; Alg Lat(B_M*) = B_M*: {b_ok}")
    }))
}

/// `Ref(A_M) ⊆ A_{Ref(M)}`, with `Ref(A_M)` replaced by its sampled bound,
/// so a pass is sound only when `ref_space` is exact or the bound is tight.
pub fn ref_of_a_within_a_of_ref(
    ctx: &BilatticeContext,
    verdict: &Verdict,
    plan: &SamplePlan,
) -> Result<LawCheck> {
    let bound = ref_upper_bound(ctx.a_algebra(), plan)?;
    let a_of_ref = verdict.ref_space.a_algebra();
    Ok(LawCheck::from_bool(
        a_of_ref.contains_space(&bound)?,
        || {
            format!(
                "Ref bound of A_M (dim {}) is not inside A_Ref(M) (dim {})",
                bound.dim(),
                a_of_ref.dim()
            )
        },
    ))
}
