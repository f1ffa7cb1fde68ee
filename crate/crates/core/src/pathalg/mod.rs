//! The path algebra `P_K(E)` and its degree-truncated power series.
//!
//! An element is a finite combination `Σ a_γ γ` with `a_γ ∈ K_{[r(γ)]}`.
//! Power series are only ever handled through truncations carrying an
//! explicit degree `N`: the coefficients of all paths of length `≤ N` are
//! exact, everything longer is unknown.

mod matrix;

use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use crate::quiver::{ClassId, ComponentPoset, EdgeId, GraphFile, Path, Quiver, QuiverError, VertexId};
use crate::scalars::{format_combination, FieldTower, RatFn, ScalarError};

pub use matrix::AlgMatrix;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PathAlgError {
    #[error("coefficient `{coeff}` of `{path}` does not lie in K_{class}")]
    Membership {
        coeff: String,
        path: String,
        class: String,
    },
    #[error("matrix is not square ({rows}×{cols})")]
    NonSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is not invertible: its augmentation is singular at vertex `{0}`")]
    NotInvertible(String),
    #[error("truncation degree exhausted")]
    DegreeExhausted,
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error(transparent)]
    Quiver(#[from] QuiverError),
}

/// A finite `K`-linear combination of paths.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct PathElement {
    terms: BTreeMap<Path, RatFn>,
}

impl PathElement {
    pub fn zero() -> Self {
        PathElement::default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Path, &RatFn)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, p: &Path) -> RatFn {
        self.terms.get(p).cloned().unwrap_or_default()
    }

    /// Length of the longest path in the support.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(Path::len).max()
    }

    /// Length of the shortest path in the support.
    pub fn order(&self) -> Option<usize> {
        self.terms.keys().map(Path::len).min()
    }

    /// Terms whose path satisfies `keep`.
    pub fn filter(&self, keep: impl Fn(&Path) -> bool) -> PathElement {
        PathElement {
            terms: self
                .terms
                .iter()
                .filter(|(p, _)| keep(p))
                .map(|(p, c)| (p.clone(), c.clone()))
                .collect(),
        }
    }

    /// Drops all paths longer than `n`.
    pub fn truncated(&self, n: usize) -> PathElement {
        self.filter(|p| p.len() <= n)
    }

    fn add_term(&mut self, p: Path, c: RatFn) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(p) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let s = e.get() + &c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub(crate) fn from_raw(terms: impl IntoIterator<Item = (Path, RatFn)>) -> Self {
        let mut out = PathElement::zero();
        for (p, c) in terms {
            out.add_term(p, c);
        }
        out
    }

    pub fn add(&self, other: &PathElement) -> PathElement {
        let mut out = self.clone();
        for (p, c) in &other.terms {
            out.add_term(p.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> PathElement {
        PathElement {
            terms: self.terms.iter().map(|(p, c)| (p.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &PathElement) -> PathElement {
        let mut out = self.clone();
        for (p, c) in &other.terms {
            out.add_term(p.clone(), -c);
        }
        out
    }

    /// Concatenation product, keeping only paths of length `≤ max_len`.
    pub fn mul_bounded(&self, other: &PathElement, max_len: Option<usize>) -> PathElement {
        let mut out = PathElement::zero();
        if self.is_zero() || other.is_zero() {
            return out;
        }
        for (p, a) in &self.terms {
            if let Some(n) = max_len {
                if p.len() > n {
                    break;
                }
            }
            for (q, b) in &other.terms {
                if let Some(n) = max_len {
                    if p.len() + q.len() > n {
                        break;
                    }
                }
                if let Some(pq) = p.concat(q) {
                    out.add_term(pq, a * b);
                }
            }
        }
        out
    }

    pub fn mul(&self, other: &PathElement) -> PathElement {
        self.mul_bounded(other, None)
    }

    /// Multiplies every coefficient by `c`; membership is the caller's concern.
    pub(crate) fn scale_raw(&self, c: &RatFn) -> PathElement {
        if c.is_zero() {
            return PathElement::zero();
        }
        PathElement {
            terms: self.terms.iter().map(|(p, a)| (p.clone(), a * c)).collect(),
        }
    }
}

/// A power series known modulo paths of length `> degree`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesTruncation {
    degree: usize,
    elem: PathElement,
}

impl SeriesTruncation {
    pub fn new(elem: &PathElement, degree: usize) -> Self {
        SeriesTruncation {
            degree,
            elem: elem.truncated(degree),
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn element(&self) -> &PathElement {
        &self.elem
    }

    pub fn into_element(self) -> PathElement {
        self.elem
    }

    pub fn is_zero(&self) -> bool {
        self.elem.is_zero()
    }

    pub fn add(&self, other: &SeriesTruncation) -> SeriesTruncation {
        let d = self.degree.min(other.degree);
        SeriesTruncation::new(&self.elem.add(&other.elem), d)
    }

    pub fn sub(&self, other: &SeriesTruncation) -> SeriesTruncation {
        let d = self.degree.min(other.degree);
        SeriesTruncation::new(&self.elem.sub(&other.elem), d)
    }

    pub fn mul(&self, other: &SeriesTruncation) -> SeriesTruncation {
        let d = self.degree.min(other.degree);
        SeriesTruncation {
            degree: d,
            elem: self.elem.mul_bounded(&other.elem, Some(d)),
        }
    }

    /// Re-truncates at a lower degree.
    pub fn at_degree(&self, n: usize) -> SeriesTruncation {
        SeriesTruncation::new(&self.elem, n.min(self.degree))
    }

    /// Equality of the two series up to the smaller of the two degrees.
    pub fn agrees_with(&self, other: &SeriesTruncation) -> bool {
        let d = self.degree.min(other.degree);
        self.elem.truncated(d) == other.elem.truncated(d)
    }
}

/// An element of `𝓔 = ⊕ K_{[v]} v`, the image of the augmentation.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct AugValue {
    pub components: BTreeMap<VertexId, RatFn>,
}

impl AugValue {
    pub fn at(&self, v: VertexId) -> RatFn {
        self.components.get(&v).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }
}

struct Setting {
    quiver: Quiver,
    poset: ComponentPoset,
    tower: FieldTower,
}

/// The path algebra of a quiver over its poset of fields.
///
/// Cheap to clone; elements are plain values interpreted through this context.
#[derive(Clone)]
pub struct PathAlgebra {
    inner: Arc<Setting>,
}

impl std::fmt::Debug for PathAlgebra {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PathAlgebra")
            .field("vertices", &self.inner.quiver.num_vertices())
            .field("edges", &self.inner.quiver.num_edges())
            .finish()
    }
}

impl PathAlgebra {
    pub fn new(quiver: Quiver, poset: ComponentPoset) -> Result<Self, PathAlgError> {
        let tower = FieldTower::new(&poset)?;
        Ok(Self::with_tower(quiver, poset, tower))
    }

    pub fn with_tower(quiver: Quiver, poset: ComponentPoset, tower: FieldTower) -> Self {
        PathAlgebra {
            inner: Arc::new(Setting {
                quiver,
                poset,
                tower,
            }),
        }
    }

    pub fn from_graph(g: &GraphFile) -> Result<Self, PathAlgError> {
        let poset = g.condense()?;
        Self::new(g.quiver.clone(), poset)
    }

    pub fn quiver(&self) -> &Quiver {
        &self.inner.quiver
    }

    pub fn poset(&self) -> &ComponentPoset {
        &self.inner.poset
    }

    pub fn tower(&self) -> &FieldTower {
        &self.inner.tower
    }

    /// Class whose field holds the coefficient of `p`: `[r(p)]`.
    pub fn coefficient_class(&self, p: &Path) -> ClassId {
        self.poset().class_of(p.range())
    }

    pub fn check_coefficient(&self, p: &Path, c: &RatFn) -> Result<(), PathAlgError> {
        let class = self.coefficient_class(p);
        if self.tower().contains(class, c) {
            Ok(())
        } else {
            Err(PathAlgError::Membership {
                coeff: self.tower().display(c),
                path: p.display(self.quiver()),
                class: self.poset().name(class).to_string(),
            })
        }
    }

    /// Validates every coefficient against `K_{[r(γ)]}`.
    pub fn element(
        &self,
        terms: impl IntoIterator<Item = (Path, RatFn)>,
    ) -> Result<PathElement, PathAlgError> {
        let mut out = PathElement::zero();
        for (p, c) in terms {
            self.check_coefficient(&p, &c)?;
            out.add_term(p, c);
        }
        Ok(out)
    }

    pub fn check_element(&self, a: &PathElement) -> Result<(), PathAlgError> {
        a.terms().try_for_each(|(p, c)| self.check_coefficient(p, c))
    }

    pub fn path(&self, p: Path) -> PathElement {
        PathElement::from_raw([(p, RatFn::one())])
    }

    pub fn vertex(&self, v: VertexId) -> PathElement {
        self.path(Path::trivial(v))
    }

    pub fn edge(&self, e: EdgeId) -> PathElement {
        self.path(Path::edge(self.quiver(), e))
    }

    /// `c·γ`, checking `c ∈ K_{[r(γ)]}`.
    pub fn term(&self, c: RatFn, p: Path) -> Result<PathElement, PathAlgError> {
        self.element([(p, c)])
    }

    /// The unit `Σ_v v`.
    pub fn one(&self) -> PathElement {
        PathElement::from_raw(
            (0..self.quiver().num_vertices()).map(|v| (Path::trivial(v), RatFn::one())),
        )
    }

    /// `p_H = Σ_{v ∈ H} v`.
    pub fn idempotent(&self, vertices: impl IntoIterator<Item = VertexId>) -> PathElement {
        PathElement::from_raw(vertices.into_iter().map(|v| (Path::trivial(v), RatFn::one())))
    }

    /// `c·a`, checking that every resulting coefficient stays in its field.
    pub fn scale(&self, c: &RatFn, a: &PathElement) -> Result<PathElement, PathAlgError> {
        let out = a.scale_raw(c);
        self.check_element(&out)?;
        Ok(out)
    }

    pub fn mul(&self, a: &PathElement, b: &PathElement) -> PathElement {
        a.mul(b)
    }

    pub fn truncate(&self, a: &PathElement, n: usize) -> SeriesTruncation {
        SeriesTruncation::new(a, n)
    }

    /// `ε(a)`: the coefficients of trivial paths.
    pub fn augment(&self, a: &PathElement) -> AugValue {
        AugValue {
            components: a
                .terms()
                .filter(|(p, _)| p.is_trivial())
                .map(|(p, c)| (p.source(), c.clone()))
                .collect(),
        }
    }

    pub fn augmentation_element(&self, a: &PathElement) -> PathElement {
        a.filter(Path::is_trivial)
    }

    /// `δ̃_e`: the coefficient of `α` (with `s(α) = r(e)`) is that of `eα`.
    pub fn transduce_exact(&self, e: EdgeId, a: &PathElement) -> PathElement {
        let q = self.quiver();
        PathElement::from_raw(
            a.terms()
                .filter(|(p, _)| p.first_edge() == Some(e))
                .map(|(p, c)| (p.tail(q).expect("non-trivial path"), c.clone())),
        )
    }

    /// Series version of `δ̃_e`; the result is known to degree `N − 1`.
    pub fn transduce(
        &self,
        e: EdgeId,
        a: &SeriesTruncation,
    ) -> Result<SeriesTruncation, PathAlgError> {
        let d = a.degree.checked_sub(1).ok_or(PathAlgError::DegreeExhausted)?;
        Ok(SeriesTruncation::new(&self.transduce_exact(e, &a.elem), d))
    }

    /// `τ_e(a) = ε(a)_{s(e)} · r(e)`.
    pub fn tau_exact(&self, e: EdgeId, a: &PathElement) -> PathElement {
        let q = self.quiver();
        let c = a.coefficient(&Path::trivial(q.source(e)));
        PathElement::from_raw([(Path::trivial(q.range(e)), c)])
    }

    pub fn tau(&self, e: EdgeId, a: &SeriesTruncation) -> SeriesTruncation {
        SeriesTruncation::new(&self.tau_exact(e, &a.elem), a.degree)
    }

    /// Whether `δ̃_e(rs) = δ̃_e(r)s + τ_e(r)δ̃_e(s)` holds exactly.
    pub fn check_right_derivation(&self, e: EdgeId, r: &PathElement, s: &PathElement) -> bool {
        let lhs = self.transduce_exact(e, &r.mul(s));
        let rhs = self
            .transduce_exact(e, r)
            .mul(s)
            .add(&self.tau_exact(e, r).mul(&self.transduce_exact(e, s)));
        lhs == rhs
    }

    pub fn display(&self, a: &PathElement) -> String {
        let q = self.quiver();
        format_combination(self.tower(), a.terms().map(|(p, c)| (c, p.display(q))))
    }

    pub fn display_series(&self, a: &SeriesTruncation) -> String {
        format!("{} + O({})", self.display(&a.elem), a.degree + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::samples;

    fn toeplitz() -> PathAlgebra {
        PathAlgebra::from_graph(&samples::toeplitz()).unwrap()
    }

    fn xu(alg: &PathAlgebra) -> RatFn {
        RatFn::var(alg.poset().class_by_name("u").unwrap() as u32)
    }

    fn xv(alg: &PathAlgebra) -> RatFn {
        RatFn::var(alg.poset().class_by_name("v").unwrap() as u32)
    }

    fn p(alg: &PathAlgebra, edges: &[&str]) -> Path {
        alg.quiver().path(edges).unwrap()
    }

    #[test]
    fn product_moves_coefficient_downward() {
        let alg = toeplitz();
        let a = alg.term(xu(&alg), p(&alg, &["alpha"])).unwrap();
        let f = alg.path(p(&alg, &["f"]));
        let prod = alg.mul(&a, &f);
        assert_eq!(prod, alg.term(xu(&alg), p(&alg, &["alpha", "f"])).unwrap());
        alg.check_element(&prod).unwrap();
    }

    #[test]
    fn distinct_vertices_annihilate() {
        let alg = toeplitz();
        let q = alg.quiver();
        let (u, v) = (q.vertex("u").unwrap(), q.vertex("v").unwrap());
        assert!(alg.mul(&alg.vertex(u), &alg.vertex(v)).is_zero());
        assert_eq!(alg.mul(&alg.vertex(u), &alg.vertex(u)), alg.vertex(u));
        let a = alg.term(xu(&alg), p(&alg, &["alpha", "f"])).unwrap();
        assert_eq!(alg.mul(&a, &alg.one()), a);
        assert_eq!(alg.mul(&alg.one(), &a), a);
    }

    #[test]
    fn membership_is_enforced() {
        let alg = toeplitz();
        assert!(alg.term(xv(&alg), p(&alg, &["alpha"])).is_err());
        assert!(alg.term(xv(&alg), p(&alg, &["f"])).is_ok());
        assert!(alg.scale(&xv(&alg), &alg.one()).is_err());
    }

    #[test]
    fn transduction_examples() {
        let alg = toeplitz();
        let q = alg.quiver();
        let (alpha, f) = (q.edge("alpha").unwrap(), q.edge("f").unwrap());
        let v = q.vertex("v").unwrap();
        // δ̃_e(e) = r(e)
        assert_eq!(alg.transduce_exact(f, &alg.edge(f)), alg.vertex(v));
        // δ̃_α(x_u·αf + f) = x_u·f
        let a = alg
            .term(xu(&alg), p(&alg, &["alpha", "f"]))
            .unwrap()
            .add(&alg.edge(f));
        assert_eq!(
            alg.transduce_exact(alpha, &a),
            alg.term(xu(&alg), p(&alg, &["f"])).unwrap()
        );
        // τ_α(u + 3x_u·u + f) = (1 + 3x_u)·u
        let u = q.vertex("u").unwrap();
        let three_xu = &RatFn::from_i64(3) * &xu(&alg);
        let b = alg
            .vertex(u)
            .add(&alg.term(three_xu.clone(), Path::trivial(u)).unwrap())
            .add(&alg.edge(f));
        let expected = alg
            .term(&RatFn::one() + &three_xu, Path::trivial(u))
            .unwrap();
        assert_eq!(alg.tau_exact(alpha, &b), expected);
    }

    #[test]
    fn series_transduction_drops_one_degree() {
        let alg = toeplitz();
        let alpha = alg.quiver().edge("alpha").unwrap();
        let s = alg.truncate(&alg.edge(alpha), 3);
        let t = alg.transduce(alpha, &s).unwrap();
        assert_eq!(t.degree(), 2);
        assert!(alg.transduce(alpha, &alg.truncate(&alg.one(), 0)).is_err());
    }

    #[test]
    fn derivation_law_small_cases() {
        let alg = toeplitz();
        let q = alg.quiver();
        let f = q.edge("f").unwrap();
        let u = q.vertex("u").unwrap();
        let v = q.vertex("v").unwrap();
        assert!(alg.check_right_derivation(f, &alg.edge(f), &alg.vertex(v)));
        assert!(alg.check_right_derivation(f, &alg.vertex(u), &alg.edge(f)));
        let lhs = alg.transduce_exact(f, &alg.mul(&alg.vertex(u), &alg.edge(f)));
        assert_eq!(lhs, alg.vertex(v));
    }

    #[test]
    fn augmentation_is_multiplicative_on_samples() {
        let alg = toeplitz();
        let q = alg.quiver();
        let u = q.vertex("u").unwrap();
        let a = alg
            .term(xu(&alg), Path::trivial(u))
            .unwrap()
            .add(&alg.edge(q.edge("alpha").unwrap()));
        let b = alg.one().add(&alg.edge(q.edge("f").unwrap()));
        let ab = alg.augment(&alg.mul(&a, &b));
        assert_eq!(ab.at(u), xu(&alg));
        assert_eq!(ab.components.len(), 1);
    }

    #[test]
    fn display_sorted() {
        let alg = toeplitz();
        let q = alg.quiver();
        let a = alg
            .edge(q.edge("f").unwrap())
            .sub(&alg.term(RatFn::from_i64(2), Path::trivial(q.vertex("v").unwrap())).unwrap())
            .add(&alg.term(&xu(&alg) + &RatFn::one(), p(&alg, &["alpha", "f"])).unwrap());
        assert_eq!(alg.display(&a), "-2*v + f + (x_u + 1)*alpha.f");
    }
}
