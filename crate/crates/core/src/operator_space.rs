//! Linear spaces of operators `M ⊆ B(H₁, H₂)` and the algebras built from
//! them: adjoints, products, trace-pairing annihilators, commutants, and the
//! largest algebras `A_M`, `B_M` over which `M` is a bimodule.
//!
//! A space is stored as the reduced row echelon basis of the vectorized
//! (column-stacked) members, so equality of spaces is structural equality.
//! All spaces here are finite dimensional, so every closure (norm, weak,
//! σ-weak) is the identity and `(M_⊥)^⊥ = M` holds unconditionally.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{Echelon, Matrix, Scalar, Vector};

/// A linear span of `h2 × h1` matrices (operators `H₁ → H₂`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OperatorSpace {
    h1: usize,
    h2: usize,
    vecs: Echelon,
    basis: Vec<Matrix>,
}

impl OperatorSpace {
    fn from_echelon(h1: usize, h2: usize, vecs: Echelon) -> Self {
        let basis = vecs
            .rows()
            .iter()
            .map(|v| Matrix::unvec(v, h2, h1).expect("vec length"))
            .collect();
        OperatorSpace {
            h1,
            h2,
            vecs,
            basis,
        }
    }

    fn from_vectors<I: IntoIterator<Item = Vector>>(h1: usize, h2: usize, vecs: I) -> Self {
        OperatorSpace::from_echelon(h1, h2, Echelon::from_rows(h1 * h2, vecs))
    }

    /// Span of `matrices`, each of shape `h2 × h1`.
    pub fn new(h1: usize, h2: usize, matrices: &[Matrix]) -> Result<Self> {
        for m in matrices {
            if m.shape() != (h2, h1) {
                return Err(Error::shape(
                    "OperatorSpace::new",
                    format!("{h2}x{h1}"),
                    format!("{}x{}", m.rows(), m.cols()),
                ));
            }
        }
        Ok(OperatorSpace::from_vectors(
            h1,
            h2,
            matrices.iter().map(Matrix::vec),
        ))
    }

    pub fn zero(h1: usize, h2: usize) -> Self {
        OperatorSpace::from_echelon(h1, h2, Echelon::empty(h1 * h2))
    }

    pub fn full(h1: usize, h2: usize) -> Self {
        OperatorSpace::from_echelon(h1, h2, Echelon::full(h1 * h2))
    }

    /// `span{I}` on `C^n`.
    pub fn scalars(n: usize) -> Self {
        OperatorSpace::new(n, n, &[Matrix::identity(n)]).expect("square identity")
    }

    /// Span of the matrix units `E_ij` for the given 0-based index pairs.
    pub fn pattern(h1: usize, h2: usize, cells: &[(usize, usize)]) -> Result<Self> {
        let mut units = Vec::with_capacity(cells.len());
        for &(i, j) in cells {
            if i >= h2 || j >= h1 {
                return Err(Error::shape(
                    "OperatorSpace::pattern",
                    format!("cell inside {h2}x{h1}"),
                    format!("({i},{j})"),
                ));
            }
            units.push(Matrix::unit(h2, h1, i, j));
        }
        OperatorSpace::new(h1, h2, &units)
    }

    /// All diagonal `n × n` matrices.
    pub fn diagonal(n: usize) -> Self {
        let cells: Vec<_> = (0..n).map(|i| (i, i)).collect();
        OperatorSpace::pattern(n, n, &cells).expect("diagonal cells")
    }

    pub fn h1(&self) -> usize {
        self.h1
    }

    pub fn h2(&self) -> usize {
        self.h2
    }

    pub fn is_square(&self) -> bool {
        self.h1 == self.h2
    }

    pub fn dim(&self) -> usize {
        self.vecs.rank()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn is_full(&self) -> bool {
        self.vecs.is_full()
    }

    /// Canonical basis; ordered by pivot of the vectorized form.
    pub fn basis(&self) -> &[Matrix] {
        &self.basis
    }

    pub fn vec_basis(&self) -> &[Vector] {
        self.vecs.rows()
    }

    fn check_member_shape(&self, t: &Matrix) -> Result<()> {
        if t.shape() != (self.h2, self.h1) {
            return Err(Error::shape(
                "operator membership",
                format!("{}x{}", self.h2, self.h1),
                format!("{}x{}", t.rows(), t.cols()),
            ));
        }
        Ok(())
    }

    /// Exact test `t ∈ M`.
    pub fn contains(&self, t: &Matrix) -> Result<bool> {
        self.check_member_shape(t)?;
        Ok(self.vecs.contains(&t.vec()))
    }

    fn check_same_shape(&self, other: &OperatorSpace, context: &'static str) -> Result<()> {
        if (self.h1, self.h2) != (other.h1, other.h2) {
            return Err(Error::shape(
                context,
                format!("B(C^{}, C^{})", self.h1, self.h2),
                format!("B(C^{}, C^{})", other.h1, other.h2),
            ));
        }
        Ok(())
    }

    /// `other ⊆ self`.
    pub fn contains_space(&self, other: &OperatorSpace) -> Result<bool> {
        self.check_same_shape(other, "space containment")?;
        Ok(other.vec_basis().iter().all(|v| self.vecs.contains(v)))
    }

    pub fn sum(&self, other: &OperatorSpace) -> Result<OperatorSpace> {
        self.check_same_shape(other, "space sum")?;
        let mut vecs = self.vecs.clone();
        for v in other.vec_basis() {
            vecs.insert(v.clone());
        }
        Ok(OperatorSpace::from_echelon(self.h1, self.h2, vecs))
    }

    /// Elements of `self`'s canonical basis that extend a basis of `sub`
    /// to one of `self`, in canonical order.
    pub fn completion_modulo(&self, sub: &OperatorSpace) -> Result<Vec<Matrix>> {
        self.check_same_shape(sub, "basis completion")?;
        let mut span = sub.vecs.clone();
        Ok(self
            .basis
            .iter()
            .zip(self.vec_basis())
            .filter(|(_, v)| span.insert((*v).clone()))
            .map(|(m, _)| m.clone())
            .collect())
    }

    /// `M* = {T* : T ∈ M} ⊆ B(H₂, H₁)`.
    pub fn adjoint_space(&self) -> OperatorSpace {
        OperatorSpace::from_vectors(
            self.h2,
            self.h1,
            self.basis.iter().map(|t| t.adjoint().vec()),
        )
    }

    pub fn is_selfadjoint(&self) -> bool {
        self.is_square() && self.adjoint_space() == *self
    }

    /// `span(UV)` for `U ⊆ B(H_b, H_c)` and `V ⊆ B(H_a, H_b)`.
    pub fn product_span(u: &OperatorSpace, v: &OperatorSpace) -> Result<OperatorSpace> {
        if u.h1 != v.h2 {
            return Err(Error::shape(
                "product_span",
                format!("inner dimension {}", u.h1),
                v.h2,
            ));
        }
        let mut vecs = Echelon::empty(v.h1 * u.h2);
        for t in &u.basis {
            for s in &v.basis {
                vecs.insert((t * s).vec());
                if vecs.is_full() {
                    return Ok(OperatorSpace::from_echelon(v.h1, u.h2, vecs));
                }
            }
        }
        Ok(OperatorSpace::from_echelon(v.h1, u.h2, vecs))
    }

    /// Orthogonal complement of the vectorized span; `tr(C·A*) = ⟨vec C, vec A⟩`.
    fn trace_orthogonal(&self) -> OperatorSpace {
        let width = self.h1 * self.h2;
        let conj_rows = self
            .vec_basis()
            .iter()
            .map(|v| v.iter().map(Scalar::conj).collect());
        let constraints = Echelon::from_rows(width, conj_rows);
        OperatorSpace::from_vectors(self.h1, self.h2, constraints.nullspace())
    }

    fn require_square(&self, context: &'static str) -> Result<()> {
        if !self.is_square() {
            return Err(Error::NonSquare {
                context,
                h1: self.h1,
                h2: self.h2,
            });
        }
        Ok(())
    }

    /// `M_⊥ = {C : tr(C·A*) = 0 for all A ∈ M}`.
    pub fn preannihilator(&self) -> Result<OperatorSpace> {
        self.require_square("preannihilator")?;
        Ok(self.trace_orthogonal())
    }

    /// `V^⊥ = {A : tr(C·A*) = 0 for all C ∈ V}`.
    pub fn annihilator(&self) -> Result<OperatorSpace> {
        self.require_square("annihilator")?;
        Ok(self.trace_orthogonal())
    }

    /// Solution space of `{X : vec(X) ↦ K_i·vec(X) lands in M for each i}`,
    /// where `X` has shape `rows × cols`.
    fn module_condition_space(&self, rows: usize, cols: usize, operators: &[Matrix]) -> Echelon {
        let width = rows * cols;
        let complement = self.trace_orthogonal();
        let mut constraints = Echelon::empty(width);
        if complement.is_zero() {
            return Echelon::full(width);
        }
        // ⟨K·vec X, w⟩ = 0 for each w ⊥ vec-span(M): rows are w^H·K
        let wh = Matrix::from_rows(
            complement
                .vec_basis()
                .iter()
                .map(|w| w.iter().map(Scalar::conj).collect())
                .collect(),
        )
        .expect("rectangular");
        for k in operators {
            let block = &wh * k;
            for r in block.row_vectors() {
                constraints.insert(r);
                if constraints.is_full() {
                    return Echelon::empty(width);
                }
            }
        }
        Echelon::from_rows(width, constraints.nullspace())
    }

    /// `A_M = {A ∈ B(H₁) : T·A ∈ M for all T ∈ M}`, via `vec(T·A) = (I ⊗ T)·vec(A)`.
    pub fn a_algebra(&self) -> OperatorSpace {
        let id = Matrix::identity(self.h1);
        let ops: Vec<Matrix> = self.basis.iter().map(|t| Matrix::kron(&id, t)).collect();
        OperatorSpace::from_echelon(
            self.h1,
            self.h1,
            self.module_condition_space(self.h1, self.h1, &ops),
        )
    }

    /// `B_M = {B ∈ B(H₂) : B·T ∈ M for all T ∈ M}`, via `vec(B·T) = (Tᵀ ⊗ I)·vec(B)`.
    pub fn b_algebra(&self) -> OperatorSpace {
        let id = Matrix::identity(self.h2);
        let ops: Vec<Matrix> = self
            .basis
            .iter()
            .map(|t| Matrix::kron(&t.transpose(), &id))
            .collect();
        OperatorSpace::from_echelon(
            self.h2,
            self.h2,
            self.module_condition_space(self.h2, self.h2, &ops),
        )
    }

    /// `{X : X·T = T·X for every T ∈ M}`.
    pub fn commutant(&self) -> Result<OperatorSpace> {
        self.require_square("commutant")?;
        let n = self.h1;
        let id = Matrix::identity(n);
        let mut constraints = Echelon::empty(n * n);
        for t in &self.basis {
            let k = &Matrix::kron(&id, t) - &Matrix::kron(&t.transpose(), &id);
            for r in k.row_vectors() {
                constraints.insert(r);
            }
        }
        Ok(OperatorSpace::from_vectors(n, n, constraints.nullspace()))
    }

    pub fn double_commutant(&self) -> Result<OperatorSpace> {
        self.commutant()?.commutant()
    }

    pub fn contains_identity(&self) -> bool {
        self.is_square() && self.vecs.contains(&Matrix::identity(self.h1).vec())
    }

    /// Closure under multiplication, checked on all pairwise basis products.
    pub fn is_multiplicatively_closed(&self) -> bool {
        self.is_square()
            && self.basis.iter().all(|a| {
                self.basis
                    .iter()
                    .all(|b| self.vecs.contains(&(a * b).vec()))
            })
    }

    pub fn is_unital_algebra(&self) -> bool {
        self.contains_identity() && self.is_multiplicatively_closed()
    }

    pub fn to_json(&self) -> OperatorSpaceJson {
        OperatorSpaceJson {
            h1: self.h1,
            h2: self.h2,
            dim: self.dim(),
            basis: self.basis.iter().map(matrix_json).collect(),
        }
    }
}

impl fmt::Display for OperatorSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "span{{")?;
        for (k, m) in self.basis.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{m}")?;
        }
        write!(f, "}} ⊆ B(C^{}, C^{})", self.h1, self.h2)
    }
}

/// Row-lists of scalar strings.
pub fn matrix_json(m: &Matrix) -> Vec<Vec<String>> {
    (0..m.rows())
        .map(|i| m.row(i).iter().map(ToString::to_string).collect())
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct OperatorSpaceJson {
    pub h1: usize,
    pub h2: usize,
    pub dim: usize,
    pub basis: Vec<Vec<Vec<String>>>,
}

/// Outcome of one law check in a report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", content = "detail", rename_all = "snake_case")]
pub enum LawCheck {
    Pass,
    Fail(String),
    Skipped(String),
}

impl LawCheck {
    pub fn from_bool(ok: bool, failure: impl FnOnce() -> String) -> Self {
        if ok {
            LawCheck::Pass
        } else {
            LawCheck::Fail(failure())
        }
    }

    pub fn is_pass(&self) -> bool {
        matches!(self, LawCheck::Pass)
    }

    pub fn is_fail(&self) -> bool {
        matches!(self, LawCheck::Fail(_))
    }
}

/// The four module-algebra identities for a space `M`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ModuleAlgebraReport {
    /// `(A_M)* = B_{M*}`.
    pub adjoint_identity: LawCheck,
    /// `A_M = (M*·M_⊥)^⊥` and `B_M = (M_⊥·M*)^⊥`.
    pub annihilator_identities: LawCheck,
    /// Selfadjoint `M`: `A_M = B_M` and `A_M` is star-closed.
    pub selfadjoint_c_star: LawCheck,
    /// Selfadjoint reflexive `M`: additionally `A_M = A_M''`.
    pub von_neumann: LawCheck,
    pub notes: Vec<String>,
}

impl ModuleAlgebraReport {
    pub fn all_pass_or_skipped(&self) -> bool {
        ![
            &self.adjoint_identity,
            &self.annihilator_identities,
            &self.selfadjoint_c_star,
            &self.von_neumann,
        ]
        .iter()
        .any(|c| c.is_fail())
    }
}

/// `A_M` recomputed from the annihilator route `(M*·M_⊥)^⊥`.
pub fn a_algebra_by_annihilator(m: &OperatorSpace) -> Result<OperatorSpace> {
    OperatorSpace::product_span(&m.adjoint_space(), &m.preannihilator()?)?.annihilator()
}

/// `B_M` recomputed from the annihilator route `(M_⊥·M*)^⊥`.
pub fn b_algebra_by_annihilator(m: &OperatorSpace) -> Result<OperatorSpace> {
    OperatorSpace::product_span(&m.preannihilator()?, &m.adjoint_space())?.annihilator()
}

/// Checks the module-algebra identities. `reflexive` is the caller's
/// decision about `M` (needed for the von Neumann check only).
pub fn check_module_algebras(m: &OperatorSpace, reflexive: Option<bool>) -> ModuleAlgebraReport {
    let a = m.a_algebra();
    let b = m.b_algebra();
    let adjoint_identity =
        LawCheck::from_bool(a.adjoint_space() == m.adjoint_space().b_algebra(), || {
            format!("(A_M)* = {} differs from B_(M*)", a.adjoint_space())
        });
    let mut notes = vec!["finite dimension: every operator space is σ-weakly closed".to_string()];
    if !m.is_square() {
        let skip =
            || LawCheck::Skipped(format!("non-square context (h1 = {}, h2 = {})", m.h1, m.h2));
        return ModuleAlgebraReport {
            adjoint_identity,
            annihilator_identities: skip(),
            selfadjoint_c_star: skip(),
            von_neumann: skip(),
            notes,
        };
    }

    let a_route = a_algebra_by_annihilator(m).expect("square");
    let b_route = b_algebra_by_annihilator(m).expect("square");
    let annihilator_identities = match (a_route == a, b_route == b) {
        (true, true) => LawCheck::Pass,
        (a_ok, b_ok) => LawCheck::Fail(format!(
            "A_M route agrees: {a_ok}; B_M route agrees: {b_ok}"
        )),
    };

    let selfadjoint = m.is_selfadjoint();
    let selfadjoint_c_star = if selfadjoint {
        let equal = a == b;
        let star_closed = a.adjoint_space() == a;
        LawCheck::from_bool(equal && star_closed, || {
            format!(
                "A_M = B_M: {equal}; A_M star-closed: {star_closed} (dim A_M = {}, dim B_M = {})",
                a.dim(),
                b.dim()
            )
        })
    } else {
        LawCheck::Skipped("M is not selfadjoint".into())
    };

    let von_neumann = match (selfadjoint, reflexive) {
        (false, _) => LawCheck::Skipped("M is not selfadjoint".into()),
        (true, None) => LawCheck::Skipped("reflexivity of M undecided".into()),
        (true, Some(false)) => LawCheck::Skipped("M is not reflexive".into()),
        (true, Some(true)) => {
            let bicommutant = a.double_commutant().expect("square");
            LawCheck::from_bool(a == b && bicommutant == a, || {
                format!(
                    "dim A_M = {}, dim B_M = {}, dim A_M'' = {}",
                    a.dim(),
                    b.dim(),
                    bicommutant.dim()
                )
            })
        }
    };
    if selfadjoint {
        notes
            .push("finite dimension: a star-closed unital algebra is a von Neumann algebra".into());
    }
    ModuleAlgebraReport {
        adjoint_identity,
        annihilator_identities,
        selfadjoint_c_star,
        von_neumann,
        notes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn e(i: usize, j: usize) -> Matrix {
        Matrix::unit(2, 2, i - 1, j - 1)
    }

    fn span2(ms: &[Matrix]) -> OperatorSpace {
        OperatorSpace::new(2, 2, ms).unwrap()
    }

    fn upper2() -> OperatorSpace {
        span2(&[e(1, 1), e(1, 2), e(2, 2)])
    }

    #[test]
    fn membership_examples() {
        let m = span2(&[Matrix::identity(2), e(1, 2)]);
        assert!(m.contains(&Matrix::zeros(2, 2)).unwrap());
        assert!(!m.contains(&e(1, 1)).unwrap());
        assert!(m.contains(&Matrix::identity(2)).unwrap());
        assert!(m.contains(&Matrix::zeros(3, 2)).is_err());
    }

    #[test]
    fn adjoint_examples() {
        assert_eq!(span2(&[e(1, 2)]).adjoint_space(), span2(&[e(2, 1)]));
        let d = OperatorSpace::diagonal(2);
        assert_eq!(d.adjoint_space(), d);
        let rect = OperatorSpace::new(2, 3, &[Matrix::unit(3, 2, 2, 0)]).unwrap();
        assert_eq!(rect.adjoint_space().adjoint_space(), rect);
    }

    #[test]
    fn product_examples() {
        let m = span2(&[Matrix::identity(2), e(1, 2)]);
        assert_eq!(
            OperatorSpace::product_span(&OperatorSpace::scalars(2), &m).unwrap(),
            m
        );
        assert_eq!(
            OperatorSpace::product_span(&span2(&[e(1, 2)]), &span2(&[e(2, 1)])).unwrap(),
            span2(&[e(1, 1)])
        );
        assert!(OperatorSpace::product_span(&m, &OperatorSpace::zero(2, 2))
            .unwrap()
            .is_zero());
    }

    #[test]
    fn annihilator_examples() {
        assert!(OperatorSpace::full(2, 2)
            .preannihilator()
            .unwrap()
            .is_zero());
        assert!(OperatorSpace::zero(2, 2)
            .preannihilator()
            .unwrap()
            .is_full());
        assert!(OperatorSpace::zero(2, 3).preannihilator().is_err());
        // span{E12}_⊥ = {C : C12 = 0}
        assert_eq!(
            span2(&[e(1, 2)]).preannihilator().unwrap(),
            span2(&[e(1, 1), e(2, 1), e(2, 2)])
        );
    }

    #[test]
    fn a_algebra_examples() {
        assert!(OperatorSpace::zero(2, 2).a_algebra().is_full());
        let m = span2(&[Matrix::identity(2), e(1, 2)]);
        assert_eq!(m.a_algebra(), m);
        assert_eq!(span2(&[e(1, 2)]).a_algebra(), upper2());
    }

    #[test]
    fn b_algebra_examples() {
        assert!(OperatorSpace::full(2, 2).b_algebra().is_full());
        assert_eq!(span2(&[e(1, 2)]).b_algebra(), upper2());
    }

    #[test]
    fn rectangular_module_algebras() {
        // M = span{E_31} ⊆ B(C², C³): T·A keeps only the first row of A
        let m = OperatorSpace::new(2, 3, &[Matrix::unit(3, 2, 2, 0)]).unwrap();
        let a = m.a_algebra();
        let b = m.b_algebra();
        assert_eq!(a.h1(), 2);
        assert_eq!(a.dim(), 3);
        assert_eq!(b.h1(), 3);
        assert_eq!(b.dim(), 7);
        assert!(a.is_unital_algebra() && b.is_unital_algebra());
    }

    #[test]
    fn commutant_examples() {
        assert_eq!(
            OperatorSpace::full(2, 2).commutant().unwrap(),
            OperatorSpace::scalars(2)
        );
        assert!(OperatorSpace::scalars(3).commutant().unwrap().is_full());
        let d = OperatorSpace::diagonal(3);
        assert_eq!(d.double_commutant().unwrap(), d);
    }

    #[test]
    fn module_algebra_report_examples() {
        let r = check_module_algebras(&OperatorSpace::diagonal(2), Some(true));
        assert!([
            &r.adjoint_identity,
            &r.annihilator_identities,
            &r.selfadjoint_c_star,
            &r.von_neumann
        ]
        .iter()
        .all(|c| c.is_pass()));

        let r = check_module_algebras(&span2(&[e(1, 2)]), Some(true));
        assert!(r.adjoint_identity.is_pass() && r.annihilator_identities.is_pass());
        assert!(matches!(r.selfadjoint_c_star, LawCheck::Skipped(_)));
        assert!(matches!(r.von_neumann, LawCheck::Skipped(_)));

        let r = check_module_algebras(&OperatorSpace::zero(2, 2), Some(true));
        assert!(r.all_pass_or_skipped());
        assert!(r.selfadjoint_c_star.is_pass());
    }

    #[test]
    fn literal_left_product_form_of_b_algebra_fails() {
        // (M·M_⊥)^⊥ is not B_M for M = span{E12}; the mirrored (M_⊥·M*)^⊥ is
        let m = span2(&[e(1, 2)]);
        let literal = OperatorSpace::product_span(&m, &m.preannihilator().unwrap())
            .unwrap()
            .annihilator()
            .unwrap();
        assert_ne!(literal, m.b_algebra());
        assert_eq!(literal, span2(&[e(2, 1), e(2, 2)]));
        assert_eq!(b_algebra_by_annihilator(&m).unwrap(), m.b_algebra());
    }

    #[test]
    fn selfadjoint_space_with_distinct_module_algebras() {
        // M = span{E11, E12, E21}: A_M is lower and B_M upper triangular
        let m = span2(&[e(1, 1), e(1, 2), e(2, 1)]);
        assert!(m.is_selfadjoint());
        assert_eq!(m.a_algebra(), span2(&[e(1, 1), e(2, 1), e(2, 2)]));
        assert_eq!(m.b_algebra(), upper2());
        let r = check_module_algebras(&m, Some(true));
        assert!(r.adjoint_identity.is_pass() && r.annihilator_identities.is_pass());
        assert!(r.selfadjoint_c_star.is_fail());
        assert!(r.von_neumann.is_fail());
    }

    fn small_matrix(n: usize) -> impl Strategy<Value = Matrix> {
        proptest::collection::vec((-2i64..=2, -1i64..=1), n * n).prop_map(move |xs| {
            let entries = xs
                .into_iter()
                .map(|(a, b)| Scalar::from_fractions(a, 1, b, 1))
                .collect();
            Matrix::new(n, n, entries).unwrap()
        })
    }

    /// Mix of sparse patterns (nontrivial module algebras) and dense spans.
    fn square_space() -> impl Strategy<Value = OperatorSpace> {
        (2usize..=3).prop_flat_map(|n| {
            let pattern =
                proptest::collection::vec(proptest::bool::ANY, n * n).prop_map(move |bits| {
                    let cells: Vec<_> = (0..n * n)
                        .filter(|&k| bits[k])
                        .map(|k| (k / n, k % n))
                        .collect();
                    OperatorSpace::pattern(n, n, &cells).unwrap()
                });
            let dense = proptest::collection::vec(small_matrix(n), 0..=3)
                .prop_map(move |ms| OperatorSpace::new(n, n, &ms).unwrap());
            prop_oneof![pattern, dense]
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn module_algebras_are_unital_and_bimodule(m in square_space()) {
            let a = m.a_algebra();
            let b = m.b_algebra();
            prop_assert!(a.is_unital_algebra());
            prop_assert!(b.is_unital_algebra());
            for t in m.basis() {
                for x in a.basis() {
                    for y in b.basis() {
                        prop_assert!(m.contains(&(&(y * t) * x)).unwrap());
                    }
                }
            }
        }

        #[test]
        fn annihilator_routes_agree(m in square_space()) {
            prop_assert_eq!(a_algebra_by_annihilator(&m).unwrap(), m.a_algebra());
            prop_assert_eq!(b_algebra_by_annihilator(&m).unwrap(), m.b_algebra());
        }

        #[test]
        fn adjoint_identity_and_biduality(m in square_space()) {
            prop_assert_eq!(m.a_algebra().adjoint_space(), m.adjoint_space().b_algebra());
            prop_assert_eq!(m.preannihilator().unwrap().annihilator().unwrap(), m.clone());
            prop_assert_eq!(m.adjoint_space().adjoint_space(), m);
        }
    }
}
