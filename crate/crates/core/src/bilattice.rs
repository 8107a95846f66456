//! Bilattices of projection pairs attached to an operator space `M`, and
//! the Galois maps between `Lat(A_M)` and `Lat(B_M)^⊥`.
//!
//! `BIL(M)` is the set of pairs `(P, Q)` with `Q·T·P = 0` for all `T ∈ M`;
//! `Bil(M)` restricts it to `P ∈ Lat(A_M)` and `Q ∈ Lat(B_M)^⊥ = Lat(B_M*)`.
//!
//! `φ(P)` is the largest `Q` with `(P, Q) ∈ Bil(M)`. Since `(P, Q) ∈ BIL(M)`
//! exactly when `Q ⊆ (M·P)^⊥`, and joins of `B_M*`-invariant subspaces are
//! invariant, `φ(P)` is the largest `B_M*`-invariant subspace of `(M·P)^⊥`.
//! Dually `θ(Q)` is the largest `A_M`-invariant subspace of
//! `⋂_T T⁻¹(Q^⊥)`. Both are computed as fixpoints; the join definitions are
//! available on enumerated lattices as an independent cross-check.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::invariant::{
    check_sublattice, enumerate_coordinate_lat, is_invariant, largest_invariant_within,
    smallest_invariant_containing, spans_diagonal, GeneratorSet,
};
use crate::matrix::{Echelon, Matrix};
use crate::operator_space::OperatorSpace;
use crate::sampling::random_vector;
use crate::subspace::{ProjectionPair, Subspace, SubspaceJson};

/// `M` together with `A_M`, `B_M` and the generators acting on each side.
#[derive(Clone, Debug)]
pub struct BilatticeContext {
    m: OperatorSpace,
    a_alg: OperatorSpace,
    b_alg: OperatorSpace,
    a_gens: GeneratorSet,
    b_star_gens: GeneratorSet,
}

impl BilatticeContext {
    pub fn new(m: OperatorSpace) -> Self {
        let a_alg = m.a_algebra();
        let b_alg = m.b_algebra();
        Self::assemble(m, a_alg, b_alg)
    }

    /// Builds a context from precomputed algebras, verifying them.
    pub fn with_algebras(
        m: OperatorSpace,
        a_alg: OperatorSpace,
        b_alg: OperatorSpace,
    ) -> Result<Self> {
        if a_alg != m.a_algebra() {
            return Err(Error::precondition(
                "BilatticeContext",
                "supplied A_M differs from the computed one",
            ));
        }
        if b_alg != m.b_algebra() {
            return Err(Error::precondition(
                "BilatticeContext",
                "supplied B_M differs from the computed one",
            ));
        }
        Ok(Self::assemble(m, a_alg, b_alg))
    }

    fn assemble(m: OperatorSpace, a_alg: OperatorSpace, b_alg: OperatorSpace) -> Self {
        let a_gens = GeneratorSet::from_space(&a_alg).expect("A_M is square");
        let b_star_gens = GeneratorSet::from_space(&b_alg.adjoint_space()).expect("B_M is square");
        BilatticeContext {
            m,
            a_alg,
            b_alg,
            a_gens,
            b_star_gens,
        }
    }

    pub fn space(&self) -> &OperatorSpace {
        &self.m
    }

    pub fn a_algebra(&self) -> &OperatorSpace {
        &self.a_alg
    }

    pub fn b_algebra(&self) -> &OperatorSpace {
        &self.b_alg
    }

    pub fn a_generators(&self) -> &GeneratorSet {
        &self.a_gens
    }

    pub fn b_star_generators(&self) -> &GeneratorSet {
        &self.b_star_gens
    }

    pub fn h1(&self) -> usize {
        self.m.h1()
    }

    pub fn h2(&self) -> usize {
        self.m.h2()
    }

    /// Both algebras contain their diagonal, so both lattices consist of
    /// coordinate subspaces only.
    pub fn is_diagonal_containing(&self) -> bool {
        spans_diagonal(&self.a_gens) && spans_diagonal(&self.b_star_gens)
    }

    fn check_pair(&self, pair: &ProjectionPair, context: &'static str) -> Result<()> {
        if pair.dims() != (self.h1(), self.h2()) {
            return Err(Error::shape(
                context,
                format!("{:?}", (self.h1(), self.h2())),
                format!("{:?}", pair.dims()),
            ));
        }
        Ok(())
    }

    pub fn in_lat_a(&self, p: &Subspace) -> Result<bool> {
        is_invariant(p, &self.a_gens)
    }

    /// `Q ∈ Lat(B_M)^⊥`, tested as invariance under `B_M*`.
    pub fn in_lat_b_perp(&self, q: &Subspace) -> Result<bool> {
        is_invariant(q, &self.b_star_gens)
    }
}

/// `(P, Q) ∈ BIL(M)`: `Q·T·P = 0` for every basis element `T` of `M`.
pub fn annihilates(pair: &ProjectionPair, ctx: &BilatticeContext) -> Result<bool> {
    ctx.check_pair(pair, "BIL membership")?;
    if pair.p.is_zero() || pair.q.is_zero() {
        return Ok(true);
    }
    let p = pair.p.projection_matrix();
    let q = pair.q.projection_matrix();
    Ok(ctx.m.basis().iter().all(|t| (&(&q * t) * &p).is_zero()))
}

/// `(P, Q) ∈ Bil(M)`.
pub fn in_bil(pair: &ProjectionPair, ctx: &BilatticeContext) -> Result<bool> {
    Ok(annihilates(pair, ctx)? && ctx.in_lat_a(&pair.p)? && ctx.in_lat_b_perp(&pair.q)?)
}

/// `M·P = ⋁_T T·P`.
fn space_image(ctx: &BilatticeContext, p: &Subspace) -> Result<Subspace> {
    let mut image = Subspace::zero(ctx.h2());
    for t in ctx.m.basis() {
        image = image.sum(&Subspace::image(t, p)?)?;
    }
    Ok(image)
}

/// `⋂_T T⁻¹(W)`.
fn space_preimage(ctx: &BilatticeContext, w: &Subspace) -> Result<Subspace> {
    let mut pre = Subspace::full(ctx.h1());
    for t in ctx.m.basis() {
        pre = pre.intersect(&Subspace::preimage(t, w)?)?;
    }
    Ok(pre)
}

/// `φ : Lat(A_M) → Lat(B_M)^⊥`.
pub fn phi(p: &Subspace, ctx: &BilatticeContext) -> Result<Subspace> {
    if p.ambient_dim() != ctx.h1() {
        return Err(Error::shape("phi", ctx.h1(), p.ambient_dim()));
    }
    if !ctx.in_lat_a(p)? {
        return Err(Error::precondition(
            "phi",
            format!("{} is not invariant under A_M", p.label()),
        ));
    }
    let constraint = space_image(ctx, p)?.ortho_complement();
    largest_invariant_within(&ctx.b_star_gens, &constraint)
}

/// `θ : Lat(B_M)^⊥ → Lat(A_M)`.
pub fn theta(q: &Subspace, ctx: &BilatticeContext) -> Result<Subspace> {
    if q.ambient_dim() != ctx.h2() {
        return Err(Error::shape("theta", ctx.h2(), q.ambient_dim()));
    }
    if !ctx.in_lat_b_perp(q)? {
        return Err(Error::precondition(
            "theta",
            format!("{} is not invariant under B_M*", q.label()),
        ));
    }
    let constraint = space_preimage(ctx, &q.ortho_complement())?;
    largest_invariant_within(&ctx.a_gens, &constraint)
}

fn require_bil(pair: &ProjectionPair, ctx: &BilatticeContext, context: &'static str) -> Result<()> {
    if !in_bil(pair, ctx)? {
        return Err(Error::precondition(
            context,
            format!("{pair} is not in Bil(M)"),
        ));
    }
    Ok(())
}

/// `Ψ₁(P, Q) = (θφ(P), φ(P))`; ignores `Q`.
pub fn psi1(pair: &ProjectionPair, ctx: &BilatticeContext) -> Result<ProjectionPair> {
    require_bil(pair, ctx, "psi1")?;
    let q = phi(&pair.p, ctx)?;
    Ok(ProjectionPair::new(theta(&q, ctx)?, q))
}

/// `Ψ₂(P, Q) = (θ(Q), φθ(Q))`; ignores `P`.
pub fn psi2(pair: &ProjectionPair, ctx: &BilatticeContext) -> Result<ProjectionPair> {
    require_bil(pair, ctx, "psi2")?;
    let p = theta(&pair.q, ctx)?;
    let q = phi(&p, ctx)?;
    Ok(ProjectionPair::new(p, q))
}

/// Enlarges a `BIL(M)` pair to a `Bil(M)` pair dominating it in both
/// components: `P' = closure of A_M·P`, `Q' = closure of B_M*·Q`.
pub fn enlarge(pair: &ProjectionPair, ctx: &BilatticeContext) -> Result<ProjectionPair> {
    if !annihilates(pair, ctx)? {
        return Err(Error::precondition(
            "enlarge",
            format!("{pair} is not in BIL(M)"),
        ));
    }
    Ok(ProjectionPair::new(
        smallest_invariant_containing(&ctx.a_gens, &pair.p)?,
        smallest_invariant_containing(&ctx.b_star_gens, &pair.q)?,
    ))
}

/// `Op(F) = {T ∈ B(H₁, H₂) : Q·T·P = 0 for all (P, Q) ∈ F}`.
pub fn op_of(h1: usize, h2: usize, pairs: &[ProjectionPair]) -> Result<OperatorSpace> {
    let mut constraints = Echelon::empty(h1 * h2);
    for pair in pairs {
        if pair.dims() != (h1, h2) {
            return Err(Error::shape(
                "op_of",
                format!("{:?}", (h1, h2)),
                format!("{:?}", pair.dims()),
            ));
        }
        if pair.p.is_zero() || pair.q.is_zero() || constraints.is_full() {
            continue;
        }
        // vec(Q·T·P) = (Pᵀ ⊗ Q)·vec(T)
        let block = Matrix::kron(
            &pair.p.projection_matrix().transpose(),
            &pair.q.projection_matrix(),
        );
        for r in block.row_vectors() {
            constraints.insert(r);
        }
    }
    let basis: Vec<Matrix> = constraints
        .nullspace()
        .iter()
        .map(|v| Matrix::unvec(v, h2, h1).expect("vec length"))
        .collect();
    OperatorSpace::new(h1, h2, &basis)
}

/// How the lattices behind a finite bilattice were obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Completeness {
    /// Enumerated coordinate lattices of diagonal-containing algebras:
    /// provably all of `Lat(A_M)` and `Lat(B_M)^⊥`.
    ProvenDiagonal,
    /// Lattices supplied by the caller, who asserts they are complete.
    AssertedByCaller,
}

/// Caller-supplied `Lat(A_M)` and `Lat(B_M)^⊥`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuppliedLattices {
    pub lat_a: Vec<Subspace>,
    pub lat_b_perp: Vec<Subspace>,
}

/// Where to take the lattices from when materializing `Bil(M)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LatticeSource {
    /// Enumerate coordinate lattices; requires diagonal-containing algebras.
    Diagonal {
        max_dim: usize,
    },
    Supplied(SuppliedLattices),
}

/// A materialized `Bil(M)` with the lattices it was built from.
#[derive(Clone, Debug)]
pub struct FiniteBilattice {
    lat_a: Vec<Subspace>,
    lat_b_perp: Vec<Subspace>,
    pairs: Vec<ProjectionPair>,
    completeness: Completeness,
}

fn canonical_order(mut lattice: Vec<Subspace>) -> Vec<Subspace> {
    let key = |w: &Subspace| (w.coordinate_mask().is_none(), w.coordinate_mask(), w.dim());
    lattice.sort_by(|a, b| (key(a), a).cmp(&(key(b), b)));
    lattice.dedup();
    lattice
}

fn validate_supplied(
    lattice: &[Subspace],
    ambient: usize,
    gens: &GeneratorSet,
    name: &'static str,
) -> Result<()> {
    for w in lattice {
        if w.ambient_dim() != ambient {
            return Err(Error::shape(name, ambient, w.ambient_dim()));
        }
        if !is_invariant(w, gens)? {
            return Err(Error::precondition(
                name,
                format!("supplied element {} fails the invariance check", w.label()),
            ));
        }
    }
    check_sublattice(ambient, lattice).map_err(|reason| Error::precondition(name, reason))
}

/// Materializes `Bil(M)` over enumerated or supplied lattices, in canonical
/// order (lexicographic in the lattice orders of `P`, then `Q`).
pub fn enumerate_bil(ctx: &BilatticeContext, source: &LatticeSource) -> Result<FiniteBilattice> {
    let (lat_a, lat_b_perp, completeness) = match source {
        LatticeSource::Diagonal { max_dim } => {
            if !ctx.is_diagonal_containing() {
                return Err(Error::precondition(
                    "enumerate_bil",
                    "A_M or B_M does not contain the diagonal and no lattices were supplied",
                ));
            }
            (
                enumerate_coordinate_lat(&ctx.a_gens, *max_dim)?,
                enumerate_coordinate_lat(&ctx.b_star_gens, *max_dim)?,
                Completeness::ProvenDiagonal,
            )
        }
        LatticeSource::Supplied(s) => {
            validate_supplied(&s.lat_a, ctx.h1(), &ctx.a_gens, "supplied Lat(A_M)")?;
            validate_supplied(
                &s.lat_b_perp,
                ctx.h2(),
                &ctx.b_star_gens,
                "supplied Lat(B_M)^⊥",
            )?;
            (
                canonical_order(s.lat_a.clone()),
                canonical_order(s.lat_b_perp.clone()),
                Completeness::AssertedByCaller,
            )
        }
    };
    let mut pairs = Vec::new();
    for p in &lat_a {
        for q in &lat_b_perp {
            let pair = ProjectionPair::new(p.clone(), q.clone());
            if annihilates(&pair, ctx)? {
                pairs.push(pair);
            }
        }
    }
    Ok(FiniteBilattice {
        lat_a,
        lat_b_perp,
        pairs,
        completeness,
    })
}

impl FiniteBilattice {
    pub fn pairs(&self) -> &[ProjectionPair] {
        &self.pairs
    }

    pub fn lat_a(&self) -> &[Subspace] {
        &self.lat_a
    }

    pub fn lat_b_perp(&self) -> &[Subspace] {
        &self.lat_b_perp
    }

    pub fn completeness(&self) -> Completeness {
        self.completeness
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, pair: &ProjectionPair) -> bool {
        self.pairs.contains(pair)
    }

    /// Bilattice axioms: closure under pair join/meet and the three
    /// distinguished pairs `(0,0)`, `(0,I)`, `(I,0)`.
    pub fn check_axioms(&self) -> std::result::Result<(), String> {
        let (h1, h2) = match self.pairs.first() {
            Some(p) => p.dims(),
            None => return Err("empty bilattice".into()),
        };
        let (z1, f1, z2, f2) = (
            Subspace::zero(h1),
            Subspace::full(h1),
            Subspace::zero(h2),
            Subspace::full(h2),
        );
        for required in [
            ProjectionPair::new(z1.clone(), z2.clone()),
            ProjectionPair::new(z1, f2),
            ProjectionPair::new(f1, z2),
        ] {
            if !self.contains(&required) {
                return Err(format!("missing distinguished pair {required}"));
            }
        }
        for (k, a) in self.pairs.iter().enumerate() {
            for b in &self.pairs[k + 1..] {
                let join = a.join(b).map_err(|e| e.to_string())?;
                if !self.contains(&join) {
                    return Err(format!("not closed under join: {a} ∨ {b} = {join}"));
                }
                let meet = a.meet(b).map_err(|e| e.to_string())?;
                if !self.contains(&meet) {
                    return Err(format!("not closed under meet: {a} ∧ {b} = {meet}"));
                }
            }
        }
        Ok(())
    }

    /// `φ(P)` from its definition: the join of the enumerated `Q` pairing with `P`.
    pub fn phi_by_join(&self, p: &Subspace, ctx: &BilatticeContext) -> Result<Subspace> {
        let mut join = Subspace::zero(ctx.h2());
        for q in &self.lat_b_perp {
            if annihilates(&ProjectionPair::new(p.clone(), q.clone()), ctx)? {
                join = join.sum(q)?;
            }
        }
        Ok(join)
    }

    /// `θ(Q)` from its definition: the join of the enumerated `P` pairing with `Q`.
    pub fn theta_by_join(&self, q: &Subspace, ctx: &BilatticeContext) -> Result<Subspace> {
        let mut join = Subspace::zero(ctx.h1());
        for p in &self.lat_a {
            if annihilates(&ProjectionPair::new(p.clone(), q.clone()), ctx)? {
                join = join.sum(p)?;
            }
        }
        Ok(join)
    }

    pub fn to_json(&self) -> FiniteBilatticeJson {
        FiniteBilatticeJson {
            completeness: self.completeness,
            lat_a: self.lat_a.iter().map(Subspace::to_json).collect(),
            lat_b_perp: self.lat_b_perp.iter().map(Subspace::to_json).collect(),
            pairs: self.pairs.iter().map(PairJson::from).collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PairJson {
    pub p: SubspaceJson,
    pub q: SubspaceJson,
}

impl From<&ProjectionPair> for PairJson {
    fn from(x: &ProjectionPair) -> Self {
        PairJson {
            p: x.p.to_json(),
            q: x.q.to_json(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FiniteBilatticeJson {
    pub completeness: Completeness,
    pub lat_a: Vec<SubspaceJson>,
    pub lat_b_perp: Vec<SubspaceJson>,
    pub pairs: Vec<PairJson>,
}

/// Draws a pair in `BIL(M)`: a random `P` (coordinate or generic) and a
/// random subspace `Q` of `(M·P)^⊥`. Neither component need be invariant.
pub fn random_annihilating_pair<R: Rng + ?Sized>(
    ctx: &BilatticeContext,
    rng: &mut R,
) -> ProjectionPair {
    let (h1, h2) = (ctx.h1(), ctx.h2());
    let p = if rng.random_bool(0.3) {
        Subspace::coordinate(h1, rng.random_range(0..1u64 << h1))
    } else {
        let k = rng.random_range(0..=h1);
        Subspace::span(h1, (0..k).map(|_| random_vector(rng, h1, 3))).expect("ambient")
    };
    let room = space_image(ctx, &p).expect("ambient").ortho_complement();
    let k = rng.random_range(0..=room.dim());
    let q = Subspace::span(
        h2,
        (0..k).map(|_| {
            let coefficients = random_vector(rng, room.dim(), 3);
            let mut v = vec![crate::matrix::Scalar::default(); h2];
            for (c, b) in coefficients.iter().zip(room.basis()) {
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi += &(c * bi);
                }
            }
            v
        }),
    )
    .expect("ambient");
    ProjectionPair::new(p, q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Scalar;

    fn e(i: usize, j: usize) -> Matrix {
        Matrix::unit(2, 2, i - 1, j - 1)
    }

    fn c2(mask: u64) -> Subspace {
        Subspace::coordinate(2, mask)
    }

    fn pair(p: u64, q: u64) -> ProjectionPair {
        ProjectionPair::new(c2(p), c2(q))
    }

    fn unit_e12() -> BilatticeContext {
        BilatticeContext::new(OperatorSpace::new(2, 2, &[e(1, 2)]).unwrap())
    }

    fn jordan() -> (BilatticeContext, LatticeSource) {
        let ctx = BilatticeContext::new(
            OperatorSpace::new(2, 2, &[Matrix::identity(2), e(1, 2)]).unwrap(),
        );
        let source = LatticeSource::Supplied(SuppliedLattices {
            lat_a: vec![c2(0), c2(1), c2(3)],
            lat_b_perp: vec![c2(0), c2(2), c2(3)],
        });
        (ctx, source)
    }

    const DIAG: LatticeSource = LatticeSource::Diagonal { max_dim: 12 };

    #[test]
    fn big_bil_examples() {
        let ctx = unit_e12();
        for m in 0..4 {
            assert!(annihilates(&pair(0, m), &ctx).unwrap());
            assert!(annihilates(&pair(m, 0), &ctx).unwrap());
        }
        assert!(!annihilates(&pair(3, 3), &ctx).unwrap());
        assert!(annihilates(
            &pair(3, 3),
            &BilatticeContext::new(OperatorSpace::zero(2, 2))
        )
        .unwrap());
        assert!(annihilates(&pair(1, 2), &ctx).unwrap());
        assert!(annihilates(&ProjectionPair::new(c2(1), Subspace::zero(3)), &ctx).is_err());
    }

    #[test]
    fn small_bil_examples() {
        let ctx = unit_e12();
        assert!(in_bil(&pair(0, 0), &ctx).unwrap());
        assert!(in_bil(&pair(1, 2), &ctx).unwrap());
        assert!(in_bil(&pair(3, 2), &ctx).unwrap());
        assert!(!in_bil(&pair(3, 3), &ctx).unwrap());
        // (e2, 0) annihilates but e2 is not invariant under upper-triangular A_M
        assert!(annihilates(&pair(2, 0), &ctx).unwrap() && !in_bil(&pair(2, 0), &ctx).unwrap());
    }

    #[test]
    fn phi_examples() {
        let ctx = unit_e12();
        assert!(phi(&c2(0), &ctx).unwrap().is_full());
        assert!(phi(&c2(1), &ctx).unwrap().is_full());
        assert_eq!(phi(&c2(3), &ctx).unwrap(), c2(2));
        assert!(matches!(phi(&c2(2), &ctx), Err(Error::Precondition { .. })));
    }

    #[test]
    fn theta_examples() {
        let ctx = unit_e12();
        assert!(theta(&c2(0), &ctx).unwrap().is_full());
        assert!(theta(&c2(2), &ctx).unwrap().is_full());
        assert_eq!(theta(&c2(3), &ctx).unwrap(), c2(1));
        assert!(matches!(
            theta(&c2(1), &ctx),
            Err(Error::Precondition { .. })
        ));
        let full = BilatticeContext::new(OperatorSpace::full(2, 3));
        assert!(theta(&Subspace::full(3), &full).unwrap().is_zero());
        assert!(theta(&Subspace::zero(3), &full).unwrap().is_full());
        assert!(theta(&Subspace::coordinate(3, 0b010), &full).is_err());
    }

    #[test]
    fn psi_examples() {
        let ctx = unit_e12();
        assert_eq!(psi1(&pair(0, 0), &ctx).unwrap(), pair(1, 3));
        assert_eq!(psi2(&pair(0, 0), &ctx).unwrap(), pair(3, 2));
        let bil = enumerate_bil(&ctx, &DIAG).unwrap();
        for x in bil.pairs() {
            let y = psi1(x, &ctx).unwrap();
            assert_eq!(psi1(&y, &ctx).unwrap(), y);
        }
        assert!(psi1(&pair(3, 3), &ctx).is_err());
    }

    #[test]
    fn enlarge_examples() {
        let ctx = unit_e12();
        assert_eq!(enlarge(&pair(1, 2), &ctx).unwrap(), pair(1, 2));
        let diag = Subspace::span(2, [vec![Scalar::from_int(1), Scalar::from_int(1)]]).unwrap();
        let out = enlarge(&ProjectionPair::new(diag, c2(0)), &ctx).unwrap();
        assert_eq!(out, pair(3, 0));
        assert_eq!(enlarge(&pair(0, 0), &ctx).unwrap(), pair(0, 0));
        assert!(enlarge(&pair(3, 3), &ctx).is_err());
    }

    #[test]
    fn op_of_examples() {
        assert!(op_of(2, 2, &[pair(3, 3)]).unwrap().is_zero());
        assert!(op_of(2, 2, &[pair(0, 0), pair(0, 3), pair(3, 0)])
            .unwrap()
            .is_full());
        assert!(op_of(2, 2, &[]).unwrap().is_full());
        let ctx = unit_e12();
        let bil = enumerate_bil(&ctx, &DIAG).unwrap();
        assert_eq!(&op_of(2, 2, bil.pairs()).unwrap(), ctx.space());
    }

    #[test]
    fn enumerate_examples() {
        // M = {0}: A_M = B_M = B(C²) whose lattice is {0, I}
        let zero = BilatticeContext::new(OperatorSpace::zero(2, 2));
        assert_eq!(enumerate_bil(&zero, &DIAG).unwrap().len(), 4);

        let bil = enumerate_bil(&unit_e12(), &DIAG).unwrap();
        let expected = [pair(0, 0),
            pair(0, 2),
            pair(0, 3),
            pair(1, 0),
            pair(1, 2),
            pair(1, 3),
            pair(3, 0),
            pair(3, 2)];
        assert_eq!(bil.pairs(), &expected[..]);
        assert!(bil.check_axioms().is_ok());
        assert_eq!(bil.completeness(), Completeness::ProvenDiagonal);

        let full = BilatticeContext::new(OperatorSpace::full(2, 2));
        let bil = enumerate_bil(&full, &DIAG).unwrap();
        assert!(bil.pairs().iter().all(|x| x.p.is_zero() || x.q.is_zero()));
        assert_eq!(bil.len(), 3);
    }

    #[test]
    fn supplied_lattices() {
        let (ctx, source) = jordan();
        assert!(matches!(
            enumerate_bil(&ctx, &DIAG),
            Err(Error::Precondition { .. })
        ));
        let bil = enumerate_bil(&ctx, &source).unwrap();
        let expected = [pair(0, 0),
            pair(0, 2),
            pair(0, 3),
            pair(1, 0),
            pair(1, 2),
            pair(3, 0)];
        assert_eq!(bil.pairs(), &expected[..]);
        assert_eq!(bil.completeness(), Completeness::AssertedByCaller);
        assert!(bil.check_axioms().is_ok());

        let bad = LatticeSource::Supplied(SuppliedLattices {
            lat_a: vec![c2(0), c2(2), c2(3)],
            lat_b_perp: vec![c2(0), c2(3)],
        });
        assert!(enumerate_bil(&ctx, &bad).is_err());
        let not_closed = LatticeSource::Supplied(SuppliedLattices {
            lat_a: vec![c2(0), c2(1)],
            lat_b_perp: vec![c2(0), c2(3)],
        });
        assert!(enumerate_bil(&ctx, &not_closed).is_err());
    }

    #[test]
    fn join_route_agrees_with_fixpoint_route() {
        let (jctx, jsource) = jordan();
        let cases = vec![
            (unit_e12(), DIAG),
            (BilatticeContext::new(OperatorSpace::diagonal(3)), DIAG),
            (jctx, jsource),
        ];
        for (ctx, source) in cases {
            let bil = enumerate_bil(&ctx, &source).unwrap();
            for p in bil.lat_a() {
                assert_eq!(phi(p, &ctx).unwrap(), bil.phi_by_join(p, &ctx).unwrap());
            }
            for q in bil.lat_b_perp() {
                assert_eq!(theta(q, &ctx).unwrap(), bil.theta_by_join(q, &ctx).unwrap());
            }
        }
    }

    #[test]
    fn context_verifies_supplied_algebras() {
        let m = OperatorSpace::new(2, 2, &[e(1, 2)]).unwrap();
        let a = m.a_algebra();
        let b = m.b_algebra();
        assert!(BilatticeContext::with_algebras(m.clone(), a.clone(), b).is_ok());
        assert!(BilatticeContext::with_algebras(m, a, OperatorSpace::full(2, 2)).is_err());
    }

    #[test]
    fn random_pairs_annihilate() {
        let ctx = unit_e12();
        let mut rng = crate::sampling::stream_rng(1, 0);
        for _ in 0..30 {
            let x = random_annihilating_pair(&ctx, &mut rng);
            assert!(annihilates(&x, &ctx).unwrap());
        }
    }
}
