//! Subspaces of `C^n` standing for orthogonal projections, and pairs of
//! them under the product order `(P₁,Q₁) ⪯ (P₂,Q₂) ⟺ P₁ ≤ P₂ ∧ Q₁ ≥ Q₂`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{inner, unit_vector, Echelon, Matrix, Scalar, Vector};

/// A subspace in canonical form: the RREF of any spanning set.
///
/// Two subspaces are equal exactly when their canonical bases are.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subspace {
    basis: Echelon,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Subspace {
            basis: Echelon::empty(ambient),
        }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace {
            basis: Echelon::full(ambient),
        }
    }

    pub fn span<I: IntoIterator<Item = Vector>>(ambient: usize, vectors: I) -> Result<Self> {
        let mut basis = Echelon::empty(ambient);
        for v in vectors {
            if v.len() != ambient {
                return Err(Error::shape("Subspace::span", ambient, v.len()));
            }
            basis.insert(v);
        }
        Ok(Subspace { basis })
    }

    /// Span of the standard basis vectors whose bits are set in `mask`
    /// (bit `k` is `e_{k+1}`).
    pub fn coordinate(ambient: usize, mask: u64) -> Self {
        assert!(
            ambient <= 64,
            "coordinate masks hold at most 64 coordinates"
        );
        let vectors = (0..ambient)
            .filter(|k| mask >> k & 1 == 1)
            .map(|k| unit_vector(ambient, k));
        Subspace {
            basis: Echelon::from_rows(ambient, vectors),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.width()
    }

    pub fn dim(&self) -> usize {
        self.basis.rank()
    }

    pub fn basis(&self) -> &[Vector] {
        self.basis.rows()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn is_full(&self) -> bool {
        self.basis.is_full()
    }

    pub fn contains_vector(&self, v: &[Scalar]) -> bool {
        self.basis.contains(v)
    }

    /// The coordinate mask when this is a span of standard basis vectors.
    pub fn coordinate_mask(&self) -> Option<u64> {
        if self.ambient_dim() > 64 {
            return None;
        }
        let mut mask = 0u64;
        for (p, row) in self.basis.pivots().iter().zip(self.basis.rows()) {
            if row
                .iter()
                .enumerate()
                .any(|(k, x)| k != *p && !num_traits::Zero::is_zero(x))
            {
                return None;
            }
            mask |= 1 << p;
        }
        Some(mask)
    }

    fn check_ambient(&self, other: &Subspace, context: &'static str) -> Result<()> {
        if self.ambient_dim() != other.ambient_dim() {
            return Err(Error::shape(
                context,
                self.ambient_dim(),
                other.ambient_dim(),
            ));
        }
        Ok(())
    }

    /// Join `u ∨ v`.
    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.check_ambient(other, "subspace sum")?;
        let mut basis = self.basis.clone();
        for v in other.basis() {
            basis.insert(v.clone());
        }
        Ok(Subspace { basis })
    }

    /// Meet `u ∧ v`, from the kernel of `[U | −V]`.
    pub fn intersect(&self, other: &Subspace) -> Result<Subspace> {
        self.check_ambient(other, "subspace intersection")?;
        if self.is_zero() || other.is_zero() {
            return Ok(Subspace::zero(self.ambient_dim()));
        }
        let n = self.ambient_dim();
        let k = self.dim();
        let mut columns: Vec<Vector> = self.basis().to_vec();
        columns.extend(other.basis().iter().map(|v| v.iter().map(|x| -x).collect()));
        let coefficients = Matrix::from_columns(n, &columns).nullspace();
        let vectors = coefficients.into_iter().map(|c| {
            let mut x = vec![Scalar::default(); n];
            for (coef, u) in c[..k].iter().zip(self.basis()) {
                for (xi, ui) in x.iter_mut().zip(u) {
                    *xi += &(coef * ui);
                }
            }
            x
        });
        Subspace::span(n, vectors)
    }

    /// `u^⊥` under `⟨x, y⟩ = Σ xᵢ·conj(yᵢ)`.
    pub fn ortho_complement(&self) -> Subspace {
        let n = self.ambient_dim();
        let rows = self
            .basis()
            .iter()
            .map(|u| u.iter().map(Scalar::conj).collect());
        let constraints = Echelon::from_rows(n, rows);
        Subspace {
            basis: Echelon::from_rows(n, constraints.nullspace()),
        }
    }

    /// Containment `u ⊆ v`, i.e. `P_u ≤ P_v`.
    pub fn leq(&self, other: &Subspace) -> Result<bool> {
        self.check_ambient(other, "subspace order")?;
        Ok(self.basis().iter().all(|v| other.contains_vector(v)))
    }

    /// `a·u`, the span of the images of a basis of `u`.
    pub fn image(a: &Matrix, u: &Subspace) -> Result<Subspace> {
        if a.cols() != u.ambient_dim() {
            return Err(Error::shape(
                "image",
                format!("{} columns", u.ambient_dim()),
                a.cols(),
            ));
        }
        Subspace::span(a.rows(), u.basis().iter().map(|v| a.mul_vec(v)))
    }

    /// `{x : a·x ∈ u}`.
    pub fn preimage(a: &Matrix, u: &Subspace) -> Result<Subspace> {
        if a.rows() != u.ambient_dim() {
            return Err(Error::shape(
                "preimage",
                format!("{} rows", u.ambient_dim()),
                a.rows(),
            ));
        }
        let n = a.cols();
        // x ∈ preimage ⟺ ⟨a·x, w⟩ = 0 for every w spanning u^⊥ ⟺ (w^H a) x = 0
        let complement = u.ortho_complement();
        let rows = complement.basis().iter().map(|w| {
            (0..n)
                .map(|j| {
                    let mut acc = Scalar::default();
                    for (i, wi) in w.iter().enumerate() {
                        acc += &(&wi.conj() * a.get(i, j));
                    }
                    acc
                })
                .collect::<Vector>()
        });
        let constraints = Echelon::from_rows(n, rows);
        Ok(Subspace {
            basis: Echelon::from_rows(n, constraints.nullspace()),
        })
    }

    /// The orthogonal projection onto `u`, as `B(BᴴB)⁻¹Bᴴ`.
    pub fn projection_matrix(&self) -> Matrix {
        let n = self.ambient_dim();
        if self.is_zero() {
            return Matrix::zeros(n, n);
        }
        if self.is_full() {
            return Matrix::identity(n);
        }
        let b = Matrix::from_columns(n, self.basis());
        let bh = b.adjoint();
        let gram_inv = (&bh * &b)
            .inverse()
            .expect("Gram matrix of a basis is invertible");
        &(&b * &gram_inv) * &bh
    }

    /// Parses `zero`, `full`, `e3`, or joins such as `e1+e3`.
    pub fn parse_named(ambient: usize, text: &str) -> Result<Subspace> {
        let text = text.trim();
        match text {
            "zero" | "0" => return Ok(Subspace::zero(ambient)),
            "full" | "I" => return Ok(Subspace::full(ambient)),
            _ => {}
        }
        let mut mask = 0u64;
        for part in text.split('+') {
            let index: usize = part
                .trim()
                .strip_prefix('e')
                .and_then(|d| d.parse().ok())
                .ok_or_else(|| Error::Input(format!("unrecognized subspace shorthand {text:?}")))?;
            if index == 0 || index > ambient || index > 64 {
                return Err(Error::Input(format!(
                    "coordinate e{index} out of range for C^{ambient}"
                )));
            }
            mask |= 1 << (index - 1);
        }
        Ok(Subspace::coordinate(ambient, mask))
    }

    /// Short label: `zero`, `full`, `e1+e3` for coordinate subspaces, else
    /// the list of basis vectors.
    pub fn label(&self) -> String {
        if self.is_zero() {
            return "zero".into();
        }
        if self.is_full() {
            return "full".into();
        }
        match self.coordinate_mask() {
            Some(mask) => (0..self.ambient_dim())
                .filter(|k| mask >> k & 1 == 1)
                .map(|k| format!("e{}", k + 1))
                .collect::<Vec<_>>()
                .join("+"),
            None => {
                let vs: Vec<String> = self
                    .basis()
                    .iter()
                    .map(|v| {
                        format!(
                            "({})",
                            v.iter()
                                .map(ToString::to_string)
                                .collect::<Vec<_>>()
                                .join(",")
                        )
                    })
                    .collect();
                format!("span{{{}}}", vs.join(", "))
            }
        }
    }

    pub fn to_json(&self) -> SubspaceJson {
        SubspaceJson {
            ambient: self.ambient_dim(),
            dim: self.dim(),
            label: self.label(),
            basis: self
                .basis()
                .iter()
                .map(|v| v.iter().map(ToString::to_string).collect())
                .collect(),
        }
    }
}

impl fmt::Display for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Serialized subspace: canonical basis vectors as scalar strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubspaceJson {
    pub ambient: usize,
    pub dim: usize,
    pub label: String,
    pub basis: Vec<Vec<String>>,
}

/// Orthogonality of two subspaces of the same space.
pub fn are_orthogonal(u: &Subspace, v: &Subspace) -> bool {
    u.basis().iter().all(|x| {
        v.basis()
            .iter()
            .all(|y| num_traits::Zero::is_zero(&inner(x, y)))
    })
}

/// A pair `(P, Q)` with `P` a subspace of `H₁` and `Q` a subspace of `H₂`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjectionPair {
    pub p: Subspace,
    pub q: Subspace,
}

impl ProjectionPair {
    pub fn new(p: Subspace, q: Subspace) -> Self {
        ProjectionPair { p, q }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.p.ambient_dim(), self.q.ambient_dim())
    }

    fn check(&self, other: &ProjectionPair, context: &'static str) -> Result<()> {
        if self.dims() != other.dims() {
            return Err(Error::shape(
                context,
                format!("{:?}", self.dims()),
                format!("{:?}", other.dims()),
            ));
        }
        Ok(())
    }

    /// `(P₁,Q₁) ⪯ (P₂,Q₂)`.
    pub fn leq(&self, other: &ProjectionPair) -> Result<bool> {
        self.check(other, "pair order")?;
        Ok(self.p.leq(&other.p)? && other.q.leq(&self.q)?)
    }

    /// `(P₁ ∨ P₂, Q₁ ∧ Q₂)`.
    pub fn join(&self, other: &ProjectionPair) -> Result<ProjectionPair> {
        self.check(other, "pair join")?;
        Ok(ProjectionPair {
            p: self.p.sum(&other.p)?,
            q: self.q.intersect(&other.q)?,
        })
    }

    /// `(P₁ ∧ P₂, Q₁ ∨ Q₂)`.
    pub fn meet(&self, other: &ProjectionPair) -> Result<ProjectionPair> {
        self.check(other, "pair meet")?;
        Ok(ProjectionPair {
            p: self.p.intersect(&other.p)?,
            q: self.q.sum(&other.q)?,
        })
    }
}

impl fmt::Display for ProjectionPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.p, self.q)
    }
}
