//! Invariant subspaces: invariance tests, the two extremal fixpoints, `Alg`
//! of a family of subspaces, and exact enumeration of `Lat` for algebras
//! containing the diagonal.
//!
//! The join of all `G`-invariant subspaces inside a subspace `W` is itself
//! invariant (joins of invariant subspaces are invariant), so it equals the
//! largest invariant subspace within `W`. [`largest_invariant_within`]
//! computes it as a terminating fixpoint; the Galois maps rely on this.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matrix::{Echelon, Matrix};
use crate::operator_space::OperatorSpace;
use crate::subspace::Subspace;

pub const DEFAULT_MAX_ENUM_DIM: usize = 12;
/// Absolute ceiling for coordinate enumeration (2^16 candidates).
pub const HARD_MAX_ENUM_DIM: usize = 16;

/// A finite set of square operators acting on `C^n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorSet {
    ambient_dim: usize,
    generators: Vec<Matrix>,
}

impl GeneratorSet {
    pub fn new(ambient_dim: usize, generators: Vec<Matrix>) -> Result<Self> {
        if let Some(bad) = generators
            .iter()
            .find(|g| g.shape() != (ambient_dim, ambient_dim))
        {
            return Err(Error::shape(
                "GeneratorSet::new",
                format!("{ambient_dim}x{ambient_dim}"),
                format!("{}x{}", bad.rows(), bad.cols()),
            ));
        }
        Ok(GeneratorSet {
            ambient_dim,
            generators,
        })
    }

    /// The canonical basis of a square operator space.
    pub fn from_space(space: &OperatorSpace) -> Result<Self> {
        if !space.is_square() {
            return Err(Error::NonSquare {
                context: "GeneratorSet::from_space",
                h1: space.h1(),
                h2: space.h2(),
            });
        }
        Ok(GeneratorSet {
            ambient_dim: space.h1(),
            generators: space.basis().to_vec(),
        })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn generators(&self) -> &[Matrix] {
        &self.generators
    }

    pub fn adjoint(&self) -> GeneratorSet {
        GeneratorSet {
            ambient_dim: self.ambient_dim,
            generators: self.generators.iter().map(Matrix::adjoint).collect(),
        }
    }

    pub fn span(&self) -> OperatorSpace {
        OperatorSpace::new(self.ambient_dim, self.ambient_dim, &self.generators)
            .expect("validated shapes")
    }

    fn check(&self, w: &Subspace, context: &'static str) -> Result<()> {
        if w.ambient_dim() != self.ambient_dim {
            return Err(Error::shape(context, self.ambient_dim, w.ambient_dim()));
        }
        Ok(())
    }
}

/// `T·w ⊆ w` for every generator (equivalently `P^⊥·T·P = 0`).
pub fn is_invariant(w: &Subspace, g: &GeneratorSet) -> Result<bool> {
    g.check(w, "is_invariant")?;
    if w.is_zero() || w.is_full() {
        return Ok(true);
    }
    Ok(g.generators
        .iter()
        .all(|t| w.basis().iter().all(|v| w.contains_vector(&t.mul_vec(v)))))
}

/// Least invariant subspace containing `w`: iterate `w ← w ∨ ⋁_T T·w`.
pub fn smallest_invariant_containing(g: &GeneratorSet, w: &Subspace) -> Result<Subspace> {
    g.check(w, "smallest_invariant_containing")?;
    let mut current = w.clone();
    loop {
        let mut next = current.clone();
        for t in &g.generators {
            next = next.sum(&Subspace::image(t, &current)?)?;
        }
        if next.dim() == current.dim() {
            return Ok(current);
        }
        current = next;
    }
}

/// Greatest invariant subspace inside `w`: iterate `w ← w ∧ ⋀_T T⁻¹(w)`.
pub fn largest_invariant_within(g: &GeneratorSet, w: &Subspace) -> Result<Subspace> {
    g.check(w, "largest_invariant_within")?;
    let mut current = w.clone();
    loop {
        let mut next = current.clone();
        for t in &g.generators {
            if next.is_zero() {
                break;
            }
            next = next.intersect(&Subspace::preimage(t, &current)?)?;
        }
        if next.dim() == current.dim() {
            return Ok(current);
        }
        current = next;
    }
}

/// `Alg(F) = {T : (I − P)·T·P = 0 for all P ∈ F}` on `C^n`.
pub fn alg_of(ambient_dim: usize, family: &[Subspace]) -> Result<OperatorSpace> {
    let n = ambient_dim;
    let mut constraints = Echelon::empty(n * n);
    let id = Matrix::identity(n);
    for w in family {
        if w.ambient_dim() != n {
            return Err(Error::shape("alg_of", n, w.ambient_dim()));
        }
        if w.is_zero() || w.is_full() {
            continue;
        }
        let p = w.projection_matrix();
        // vec((I − P)·T·P) = (Pᵀ ⊗ (I − P))·vec(T)
        let block = Matrix::kron(&p.transpose(), &(&id - &p));
        for r in block.row_vectors() {
            constraints.insert(r);
        }
    }
    let basis: Vec<Matrix> = constraints
        .nullspace()
        .iter()
        .map(|v| Matrix::unvec(v, n, n).expect("vec length"))
        .collect();
    OperatorSpace::new(n, n, &basis)
}

/// Invariance of the coordinate subspace `mask` read off the entry pattern:
/// no generator may map a coordinate inside the mask to one outside it.
fn coordinate_mask_invariant(mask: u64, g: &GeneratorSet) -> bool {
    let n = g.ambient_dim;
    g.generators.iter().all(|t| {
        (0..n).filter(|j| mask >> j & 1 == 1).all(|j| {
            (0..n)
                .filter(|i| mask >> i & 1 == 0)
                .all(|i| num_traits::Zero::is_zero(t.get(i, j)))
        })
    })
}

/// Whether the span of `g` contains every diagonal matrix unit `E_ii`.
pub fn spans_diagonal(g: &GeneratorSet) -> bool {
    let span = g.span();
    let n = g.ambient_dim;
    (0..n).all(|i| span.contains(&Matrix::unit(n, n, i, i)).expect("square"))
}

/// All invariant coordinate subspaces, in ascending mask order. When the
/// span of `g` contains the diagonal this is all of `Lat(span g)`.
pub fn enumerate_coordinate_lat(g: &GeneratorSet, max_dim: usize) -> Result<Vec<Subspace>> {
    let n = g.ambient_dim;
    let cap = max_dim.min(HARD_MAX_ENUM_DIM);
    if n > cap {
        return Err(Error::precondition(
            "enumerate_coordinate_lat",
            format!("ambient dimension {n} exceeds the enumeration cap {cap}"),
        ));
    }
    if !spans_diagonal(g) {
        return Err(Error::precondition(
            "enumerate_coordinate_lat",
            "the generators do not span the diagonal matrix units",
        ));
    }
    let masks: Vec<u64> = (0u64..1 << n)
        .into_par_iter()
        .filter(|&m| coordinate_mask_invariant(m, g))
        .collect();
    Ok(masks
        .into_iter()
        .map(|m| Subspace::coordinate(n, m))
        .collect())
}

/// Checks that `elements` contains `0` and the full space and is closed
/// under `∨` and `∧`; returns the first violation.
pub fn check_sublattice(
    ambient_dim: usize,
    elements: &[Subspace],
) -> std::result::Result<(), String> {
    let has = |s: &Subspace| elements.contains(s);
    if !has(&Subspace::zero(ambient_dim)) {
        return Err("lattice is missing the zero subspace".into());
    }
    if !has(&Subspace::full(ambient_dim)) {
        return Err("lattice is missing the full space".into());
    }
    for (k, a) in elements.iter().enumerate() {
        if a.ambient_dim() != ambient_dim {
            return Err(format!(
                "element {} lives in C^{}, expected C^{ambient_dim}",
                a.label(),
                a.ambient_dim()
            ));
        }
        for b in &elements[k + 1..] {
            let join = a.sum(b).map_err(|e| e.to_string())?;
            if !has(&join) {
                return Err(format!("not closed under join: {a} ∨ {b} = {join}"));
            }
            let meet = a.intersect(b).map_err(|e| e.to_string())?;
            if !has(&meet) {
                return Err(format!("not closed under meet: {a} ∧ {b} = {meet}"));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{Scalar, Vector};
    use proptest::prelude::*;

    fn e(n: usize, i: usize, j: usize) -> Matrix {
        Matrix::unit(n, n, i - 1, j - 1)
    }

    fn gens(n: usize, ms: Vec<Matrix>) -> GeneratorSet {
        GeneratorSet::new(n, ms).unwrap()
    }

    fn upper2() -> GeneratorSet {
        gens(2, vec![e(2, 1, 1), e(2, 1, 2), e(2, 2, 2)])
    }

    fn coord(n: usize, mask: u64) -> Subspace {
        Subspace::coordinate(n, mask)
    }

    #[test]
    fn invariance_examples() {
        let g = gens(2, vec![e(2, 2, 1), Matrix::from_ints(&[[1, 5], [2, 3]])]);
        assert!(is_invariant(&Subspace::zero(2), &g).unwrap());
        assert!(is_invariant(&Subspace::full(2), &g).unwrap());
        assert!(is_invariant(&coord(2, 0b01), &upper2()).unwrap());
        assert!(!is_invariant(&coord(2, 0b10), &gens(2, vec![e(2, 1, 2)])).unwrap());
        assert!(is_invariant(&coord(3, 0b1), &upper2()).is_err());
    }

    #[test]
    fn smallest_invariant_examples() {
        let w = Subspace::span(2, [vec![Scalar::from_int(1), Scalar::from_int(3)]]).unwrap();
        assert_eq!(
            smallest_invariant_containing(&gens(2, vec![Matrix::identity(2)]), &w).unwrap(),
            w
        );
        assert_eq!(
            smallest_invariant_containing(&gens(2, vec![e(2, 2, 1)]), &coord(2, 0b01)).unwrap(),
            Subspace::full(2)
        );
        assert!(smallest_invariant_containing(&upper2(), &Subspace::zero(2))
            .unwrap()
            .is_zero());
    }

    #[test]
    fn largest_invariant_examples() {
        let g = gens(2, vec![e(2, 2, 1), Matrix::from_ints(&[[1, 5], [2, 3]])]);
        assert!(largest_invariant_within(&g, &Subspace::full(2))
            .unwrap()
            .is_full());
        assert!(
            largest_invariant_within(&gens(2, vec![e(2, 2, 1)]), &coord(2, 0b01))
                .unwrap()
                .is_zero()
        );
        assert!(largest_invariant_within(&g, &Subspace::zero(2))
            .unwrap()
            .is_zero());
    }

    #[test]
    fn nilpotent_chain_needs_several_rounds() {
        // shift e1 → e2 → e3 → e4
        let shift = gens(4, vec![&(&e(4, 2, 1) + &e(4, 3, 2)) + &e(4, 4, 3)]);
        assert_eq!(
            smallest_invariant_containing(&shift, &coord(4, 0b0001)).unwrap(),
            Subspace::full(4)
        );
        assert_eq!(
            largest_invariant_within(&shift, &coord(4, 0b0111)).unwrap(),
            Subspace::zero(4)
        );
        assert_eq!(
            largest_invariant_within(&shift, &coord(4, 0b1110)).unwrap(),
            coord(4, 0b1110)
        );
    }

    #[test]
    fn alg_of_examples() {
        assert!(alg_of(2, &[Subspace::zero(2), Subspace::full(2)])
            .unwrap()
            .is_full());
        assert!(alg_of(2, &[]).unwrap().is_full());
        assert_eq!(alg_of(2, &[coord(2, 0b01)]).unwrap(), upper2().span());
        let all: Vec<_> = (0..4).map(|m| coord(2, m)).collect();
        assert_eq!(alg_of(2, &all).unwrap(), OperatorSpace::diagonal(2));
    }

    #[test]
    fn enumeration_examples() {
        let full = GeneratorSet::from_space(&OperatorSpace::full(2, 2)).unwrap();
        assert_eq!(
            enumerate_coordinate_lat(&full, 12).unwrap(),
            vec![Subspace::zero(2), Subspace::full(2)]
        );
        assert_eq!(
            enumerate_coordinate_lat(&upper2(), 12).unwrap(),
            vec![Subspace::zero(2), coord(2, 0b01), Subspace::full(2)]
        );
        let diag = GeneratorSet::from_space(&OperatorSpace::diagonal(2)).unwrap();
        assert_eq!(enumerate_coordinate_lat(&diag, 12).unwrap().len(), 4);
    }

    #[test]
    fn enumeration_preconditions() {
        let scalars = GeneratorSet::from_space(&OperatorSpace::scalars(2)).unwrap();
        assert!(matches!(
            enumerate_coordinate_lat(&scalars, 12),
            Err(Error::Precondition { .. })
        ));
        let diag = GeneratorSet::from_space(&OperatorSpace::diagonal(3)).unwrap();
        assert!(matches!(
            enumerate_coordinate_lat(&diag, 2),
            Err(Error::Precondition { .. })
        ));
    }

    #[test]
    fn enumeration_agrees_with_generic_invariance() {
        let g = GeneratorSet::from_space(
            &OperatorSpace::pattern(
                4,
                4,
                &[(0, 0), (1, 1), (2, 2), (3, 3), (0, 2), (1, 3), (0, 3)],
            )
            .unwrap(),
        )
        .unwrap();
        let lat = enumerate_coordinate_lat(&g, 12).unwrap();
        for mask in 0..16 {
            let w = coord(4, mask);
            assert_eq!(
                lat.contains(&w),
                is_invariant(&w, &g).unwrap(),
                "mask {mask:b}"
            );
        }
        assert!(check_sublattice(4, &lat).is_ok());
    }

    #[test]
    fn sublattice_violations_reported() {
        let missing_meet = vec![
            Subspace::zero(2),
            coord(2, 1),
            Subspace::span(2, [vec![1i64.into(), 1i64.into()]]).unwrap(),
        ];
        assert!(check_sublattice(2, &missing_meet).is_err());
        let ok = vec![Subspace::zero(2), coord(2, 1), Subspace::full(2)];
        assert!(check_sublattice(2, &ok).is_ok());
    }

    fn small_matrix(n: usize) -> impl Strategy<Value = Matrix> {
        proptest::collection::vec(-2i64..=2, n * n).prop_map(move |xs| {
            Matrix::new(n, n, xs.into_iter().map(Scalar::from_int).collect()).unwrap()
        })
    }

    /// Sparse generators so that nontrivial invariant subspaces occur.
    fn sparse_generators(n: usize) -> impl Strategy<Value = GeneratorSet> {
        proptest::collection::vec(
            (
                small_matrix(n),
                proptest::collection::vec(proptest::bool::weighted(0.3), n * n),
            ),
            1..=2,
        )
        .prop_map(move |raw| {
            let ms = raw
                .into_iter()
                .map(|(m, keep)| {
                    let entries = m
                        .entries()
                        .iter()
                        .zip(keep)
                        .map(|(x, k)| if k { x.clone() } else { Scalar::default() })
                        .collect();
                    Matrix::new(n, n, entries).unwrap()
                })
                .collect();
            GeneratorSet::new(n, ms).unwrap()
        })
    }

    fn subspace(n: usize) -> impl Strategy<Value = Subspace> {
        proptest::collection::vec(proptest::collection::vec(-1i64..=1, n), 0..=n).prop_map(
            move |vs| {
                Subspace::span(
                    n,
                    vs.into_iter()
                        .map(|v| v.into_iter().map(Scalar::from_int).collect::<Vector>()),
                )
                .unwrap()
            },
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn fixpoints_are_invariant_and_extremal(g in sparse_generators(3), w in subspace(3)) {
            let lo = smallest_invariant_containing(&g, &w).unwrap();
            let hi = largest_invariant_within(&g, &w).unwrap();
            prop_assert!(w.leq(&lo).unwrap() && hi.leq(&w).unwrap());
            prop_assert!(is_invariant(&lo, &g).unwrap() && is_invariant(&hi, &g).unwrap());
            // one more step is stationary
            for t in g.generators() {
                prop_assert!(Subspace::image(t, &lo).unwrap().leq(&lo).unwrap());
                prop_assert!(hi.leq(&Subspace::preimage(t, &hi).unwrap()).unwrap());
            }
            // adjoint duality: invariant complements
            prop_assert!(is_invariant(&lo.ortho_complement(), &g.adjoint()).unwrap());
            prop_assert!(is_invariant(&hi.ortho_complement(), &g.adjoint()).unwrap());
        }

        #[test]
        fn fixpoints_are_monotone(g in sparse_generators(3), a in subspace(3), b in subspace(3)) {
            let small = a.intersect(&b).unwrap();
            prop_assert!(smallest_invariant_containing(&g, &small).unwrap()
                .leq(&smallest_invariant_containing(&g, &a).unwrap()).unwrap());
            prop_assert!(largest_invariant_within(&g, &small).unwrap()
                .leq(&largest_invariant_within(&g, &a).unwrap()).unwrap());
        }

        #[test]
        fn alg_of_is_unital_and_inflates(ws in proptest::collection::vec(subspace(3), 0..3)) {
            let alg = alg_of(3, &ws).unwrap();
            prop_assert!(alg.is_unital_algebra());
            let g = GeneratorSet::from_space(&alg).unwrap();
            for w in &ws {
                prop_assert!(is_invariant(w, &g).unwrap());
            }
        }
    }
}
