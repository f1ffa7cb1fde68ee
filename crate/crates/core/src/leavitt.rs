//! The Leavitt path algebra `L_K(E)` over a poset of fields, in the normal
//! form `Σ a·γμ*`, plus an independent word-rewriting reducer used to
//! spot-check confluence.

use std::collections::BTreeMap;

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::pathalg::{PathAlgError, PathAlgebra, PathElement};
use crate::quiver::{EdgeId, Path, Quiver, VertexId};
use crate::scalars::{format_combination, Amalgamation, FieldTower, RatFn};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LeavittError {
    #[error("`{0}` is a sink")]
    SinkVertex(String),
    #[error("paths `{0}` and `{1}` have different ranges")]
    RangeMismatch(String, String),
    #[error("reduction ran out of fuel")]
    FuelExhausted,
    #[error(transparent)]
    PathAlg(#[from] PathAlgError),
}

type Result<T> = std::result::Result<T, LeavittError>;

/// `Σ a·γμ*`, keyed by `(γ, μ)` with `r(γ) = r(μ)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct LeavittElement {
    terms: BTreeMap<(Path, Path), RatFn>,
}

impl LeavittElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(Path, Path), &RatFn)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, gamma: &Path, mu: &Path) -> RatFn {
        self.terms
            .get(&(gamma.clone(), mu.clone()))
            .cloned()
            .unwrap_or_default()
    }

    /// Largest `|γ| + |μ|` in the support.
    pub fn degree(&self) -> usize {
        self.terms
            .keys()
            .map(|(g, m)| g.len() + m.len())
            .max()
            .unwrap_or(0)
    }

    fn add_raw(&mut self, key: (Path, Path), c: RatFn) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(key) {
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

    pub fn add(&self, other: &LeavittElement) -> LeavittElement {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_raw(k.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> LeavittElement {
        LeavittElement {
            terms: self.terms.iter().map(|(k, c)| (k.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &LeavittElement) -> LeavittElement {
        self.add(&other.neg())
    }

    /// The involution `a·γμ* ↦ a·μγ*`.
    pub fn star(&self) -> LeavittElement {
        LeavittElement {
            terms: self
                .terms
                .iter()
                .map(|((g, m), c)| ((m.clone(), g.clone()), c.clone()))
                .collect(),
        }
    }
}

/// One generator in a word: a vertex, an edge or a ghost edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Letter {
    Vertex(VertexId),
    Edge(EdgeId),
    Ghost(EdgeId),
}

enum Pair {
    /// Already in normal shape.
    Stable,
    Zero,
    Replace(Vec<Letter>),
}

/// Witness that `Rv ≅ ⊕ R·r(e_i)` at a regular vertex.
#[derive(Clone, Debug)]
pub struct ProjectiveWitness {
    pub vertex: VertexId,
    pub edges: Vec<EdgeId>,
    /// `Y·X`, which must equal `v`.
    pub row_times_column: LeavittElement,
    /// `X·Y`, which must equal `diag(r(e_i))`.
    pub column_times_row: Vec<Vec<LeavittElement>>,
    pub certified: bool,
}

/// One line of the relation report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RelationCheck {
    pub family: &'static str,
    pub instance: String,
    pub holds: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RelationReport {
    pub checks: Vec<RelationCheck>,
}

impl RelationReport {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn count(&self, family: &str) -> usize {
        self.checks.iter().filter(|c| c.family == family).count()
    }

    pub(crate) fn push(&mut self, family: &'static str, instance: String, holds: bool) {
        self.checks.push(RelationCheck {
            family,
            instance,
            holds,
        });
    }
}

/// The Leavitt path algebra of a quiver over its field tower.
#[derive(Clone, Debug)]
pub struct LeavittAlgebra {
    base: PathAlgebra,
    designated: Vec<Option<EdgeId>>,
}

impl LeavittAlgebra {
    pub fn new(base: PathAlgebra) -> Self {
        let q = base.quiver();
        let p = base.poset();
        // Prefer an edge that stays in the component of its source, so that
        // (CK2) never moves a coefficient into a smaller field.
        let designated = (0..q.num_vertices())
            .map(|v| {
                let out = q.out_edges(v);
                out.iter()
                    .rev()
                    .find(|&&e| p.class_of(q.range(e)) == p.class_of(v))
                    .or(out.last())
                    .copied()
            })
            .collect();
        LeavittAlgebra { base, designated }
    }

    pub fn base(&self) -> &PathAlgebra {
        &self.base
    }

    pub fn quiver(&self) -> &Quiver {
        self.base.quiver()
    }

    pub fn tower(&self) -> &FieldTower {
        self.base.tower()
    }

    /// The edge whose `ee*` is eliminated by (CK2) at `v`.
    pub fn designated_edge(&self, v: VertexId) -> Option<EdgeId> {
        self.designated[v]
    }

    /// `c·γμ*`, validated and normalized.
    pub fn term(&self, c: RatFn, gamma: Path, mu: Path) -> Result<LeavittElement> {
        let q = self.quiver();
        if gamma.range() != mu.range() {
            return Err(LeavittError::RangeMismatch(gamma.display(q), mu.display(q)));
        }
        self.base.check_coefficient(&gamma, &c)?;
        let mut out = LeavittElement::zero();
        self.push_normal(&mut out, gamma, mu, c);
        Ok(out)
    }

    /// `c·γμ*` without the membership check; ranges must agree.
    pub(crate) fn term_unchecked(&self, c: RatFn, gamma: Path, mu: Path) -> LeavittElement {
        let mut out = LeavittElement::zero();
        self.push_normal(&mut out, gamma, mu, c);
        out
    }

    fn unit_term(&self, gamma: Path, mu: Path) -> LeavittElement {
        let mut out = LeavittElement::zero();
        self.push_normal(&mut out, gamma, mu, RatFn::one());
        out
    }

    pub fn vertex(&self, v: VertexId) -> LeavittElement {
        self.unit_term(Path::trivial(v), Path::trivial(v))
    }

    pub fn edge(&self, e: EdgeId) -> LeavittElement {
        let q = self.quiver();
        self.unit_term(Path::edge(q, e), Path::trivial(q.range(e)))
    }

    pub fn ghost(&self, e: EdgeId) -> LeavittElement {
        let q = self.quiver();
        self.unit_term(Path::trivial(q.range(e)), Path::edge(q, e))
    }

    pub fn one(&self) -> LeavittElement {
        (0..self.quiver().num_vertices())
            .map(|v| self.vertex(v))
            .fold(LeavittElement::zero(), |a, b| a.add(&b))
    }

    /// The inclusion `P_K(E) → L_K(E)`.
    pub fn from_path_element(&self, a: &PathElement) -> LeavittElement {
        let mut out = LeavittElement::zero();
        for (p, c) in a.terms() {
            self.push_normal(&mut out, p.clone(), Path::trivial(p.range()), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &RatFn, a: &LeavittElement) -> Result<LeavittElement> {
        let mut out = LeavittElement::zero();
        for ((g, m), x) in a.terms() {
            let y = c * x;
            self.base.check_coefficient(g, &y)?;
            out.add_raw((g.clone(), m.clone()), y);
        }
        Ok(out)
    }

    pub fn check_element(&self, a: &LeavittElement) -> Result<()> {
        for ((g, _), c) in a.terms() {
            self.base.check_coefficient(g, c)?;
        }
        Ok(())
    }

    /// Adds `c·γμ*` to `out`, expanding designated tails by (CK2).
    fn push_normal(&self, out: &mut LeavittElement, gamma: Path, mu: Path, c: RatFn) {
        let q = self.quiver();
        let mut stack = vec![(gamma, mu, c)];
        while let Some((g, m, c)) = stack.pop() {
            match (g.last_edge(), m.last_edge()) {
                (Some(e), Some(f)) if e == f && self.designated[q.source(e)] == Some(e) => {
                    let (g0, m0) = (g.init(q).expect("nonempty"), m.init(q).expect("nonempty"));
                    for &other in q.out_edges(q.source(e)) {
                        if other == e {
                            continue;
                        }
                        let step = Path::edge(q, other);
                        let gx = g0.concat(&step).expect("composable");
                        let mx = m0.concat(&step).expect("composable");
                        out.add_raw((gx, mx), -&c);
                    }
                    stack.push((g0, m0, c));
                }
                _ => out.add_raw((g, m), c),
            }
        }
    }

    /// `(γμ*)(γ'ν*)` as a single normalized monomial, or nothing.
    fn mul_monomials(&self, out: &mut LeavittElement, a: (&Path, &Path, &RatFn), b: (&Path, &Path, &RatFn)) {
        let (g, m, x) = a;
        let (g2, n2, y) = b;
        if let Some(k) = g2.strip_prefix(m) {
            // μ*·μκ = κ
            let gk = g.concat(&k).expect("r(γ) = r(μ) = s(κ)");
            self.push_normal(out, gk, n2.clone(), x * y);
        } else if let Some(k) = m.strip_prefix(g2) {
            // (γ'κ)*·γ' = κ*
            let nk = n2.concat(&k).expect("r(ν) = r(γ') = s(κ)");
            self.push_normal(out, g.clone(), nk, x * y);
        }
    }

    pub fn mul(&self, a: &LeavittElement, b: &LeavittElement) -> LeavittElement {
        let mut out = LeavittElement::zero();
        for ((g, m), x) in a.terms() {
            for ((g2, n2), y) in b.terms() {
                self.mul_monomials(&mut out, (g, m, x), (g2, n2, y));
            }
        }
        out
    }

    pub fn mul_all(&self, factors: &[LeavittElement]) -> LeavittElement {
        factors
            .iter()
            .fold(self.one(), |acc, f| self.mul(&acc, f))
    }

    /// Coefficientwise `φ_{[r(γ)]}`, landing in `target` (the constant system).
    pub fn map_coefficients(&self, x: &LeavittElement, phi: &Amalgamation, target: &LeavittAlgebra) -> LeavittElement {
        let mut out = LeavittElement::zero();
        for ((g, m), c) in x.terms() {
            let class = self.base.coefficient_class(g);
            target.push_normal(&mut out, g.clone(), m.clone(), phi.apply(class, c));
        }
        out
    }

    /// The same quiver over the amalgamated constant field.
    pub fn amalgamated(&self) -> Result<(LeavittAlgebra, Amalgamation)> {
        let phi = self.tower().amalgamate();
        let tower = phi
            .constant_tower(self.base.poset())
            .map_err(PathAlgError::from)?;
        let base = PathAlgebra::with_tower(self.quiver().clone(), self.base.poset().clone(), tower);
        Ok((LeavittAlgebra::new(base), phi))
    }

    pub fn projective_witness(&self, v: VertexId) -> Result<ProjectiveWitness> {
        let q = self.quiver();
        if q.is_sink(v) {
            return Err(LeavittError::SinkVertex(q.vertex_name(v).to_string()));
        }
        let edges = q.out_edges(v).to_vec();
        let row_times_column = edges
            .iter()
            .map(|&e| self.mul(&self.edge(e), &self.ghost(e)))
            .fold(LeavittElement::zero(), |a, b| a.add(&b));
        let column_times_row: Vec<Vec<LeavittElement>> = edges
            .iter()
            .map(|&ei| {
                edges
                    .iter()
                    .map(|&ej| self.mul(&self.ghost(ei), &self.edge(ej)))
                    .collect()
            })
            .collect();
        let diag_ok = edges.iter().enumerate().all(|(i, &ei)| {
            edges.iter().enumerate().all(|(j, _)| {
                let expected = if i == j {
                    self.vertex(q.range(ei))
                } else {
                    LeavittElement::zero()
                };
                column_times_row[i][j] == expected
            })
        });
        let certified = diag_ok && row_times_column == self.vertex(v);
        Ok(ProjectiveWitness {
            vertex: v,
            edges,
            row_times_column,
            column_times_row,
            certified,
        })
    }

    /// Evaluates (V), (E1), (E2), (CK1) and (CK2) through normal-form arithmetic.
    pub fn check_defining_relations(&self) -> RelationReport {
        let q = self.quiver();
        let mut rep = RelationReport::default();
        let nv = q.num_vertices();
        let ne = q.num_edges();
        for v in 0..nv {
            for w in 0..nv {
                let lhs = self.mul(&self.vertex(v), &self.vertex(w));
                let rhs = if v == w { self.vertex(v) } else { LeavittElement::zero() };
                rep.push("V", format!("{}·{}", q.vertex_name(v), q.vertex_name(w)), lhs == rhs);
            }
        }
        for e in 0..ne {
            let (s, r) = (q.source(e), q.range(e));
            let name = q.edge_name(e);
            let ed = self.edge(e);
            let gh = self.ghost(e);
            let ok = self.mul(&self.vertex(s), &ed) == ed && self.mul(&ed, &self.vertex(r)) == ed;
            rep.push("E1", name.to_string(), ok);
            let ok = self.mul(&self.vertex(r), &gh) == gh && self.mul(&gh, &self.vertex(s)) == gh;
            rep.push("E2", name.to_string(), ok);
        }
        for e in 0..ne {
            for f in 0..ne {
                let lhs = self.mul(&self.ghost(e), &self.edge(f));
                let rhs = if e == f {
                    self.vertex(q.range(e))
                } else {
                    LeavittElement::zero()
                };
                rep.push("CK1", format!("~{}·{}", q.edge_name(e), q.edge_name(f)), lhs == rhs);
            }
        }
        for v in 0..nv {
            if q.is_sink(v) {
                continue;
            }
            let sum = q
                .out_edges(v)
                .iter()
                .map(|&e| self.mul(&self.edge(e), &self.ghost(e)))
                .fold(LeavittElement::zero(), |a, b| a.add(&b));
            rep.push("CK2", q.vertex_name(v).to_string(), sum == self.vertex(v));
        }
        rep
    }

    pub fn display_monomial(&self, gamma: &Path, mu: &Path) -> String {
        let q = self.quiver();
        if gamma.is_trivial() && mu.is_trivial() {
            return q.vertex_name(gamma.source()).to_string();
        }
        let mut parts: Vec<String> = gamma.edges().iter().map(|&e| q.edge_name(e).to_string()).collect();
        parts.extend(mu.edges().iter().rev().map(|&e| format!("~{}", q.edge_name(e))));
        parts.join(".")
    }

    pub fn display(&self, a: &LeavittElement) -> String {
        format_combination(
            self.tower(),
            a.terms().map(|((g, m), c)| (c, self.display_monomial(g, m))),
        )
    }

    // ---- word rewriting ------------------------------------------------

    /// The word `γ e_m*…e_1*` for `γμ*` with `μ = e_1…e_m`.
    pub fn word_of(&self, gamma: &Path, mu: &Path) -> Vec<Letter> {
        if gamma.is_trivial() && mu.is_trivial() {
            return vec![Letter::Vertex(gamma.source())];
        }
        let mut w: Vec<Letter> = gamma.edges().iter().map(|&e| Letter::Edge(e)).collect();
        w.extend(mu.edges().iter().rev().map(|&e| Letter::Ghost(e)));
        w
    }

    fn pair(&self, x: Letter, y: Letter) -> Pair {
        use Letter::*;
        let q = self.quiver();
        let keep = |ok: bool, l: Letter| if ok { Pair::Replace(vec![l]) } else { Pair::Zero };
        let stable = |ok: bool| if ok { Pair::Stable } else { Pair::Zero };
        match (x, y) {
            (Vertex(a), Vertex(b)) => keep(a == b, Vertex(a)),
            (Vertex(a), Edge(e)) => keep(a == q.source(e), Edge(e)),
            (Vertex(a), Ghost(e)) => keep(a == q.range(e), Ghost(e)),
            (Edge(e), Vertex(a)) => keep(q.range(e) == a, Edge(e)),
            (Ghost(e), Vertex(a)) => keep(q.source(e) == a, Ghost(e)),
            (Edge(e), Edge(f)) => stable(q.range(e) == q.source(f)),
            (Ghost(e), Ghost(f)) => stable(q.source(e) == q.range(f)),
            (Edge(e), Ghost(f)) => stable(q.range(e) == q.range(f)),
            (Ghost(e), Edge(f)) => keep(e == f, Vertex(q.range(e))),
        }
    }

    /// Converts an irreducible word back to `(γ, μ)`.
    fn pair_of_word(&self, w: &[Letter]) -> (Path, Path) {
        let q = self.quiver();
        if let [Letter::Vertex(v)] = w {
            return (Path::trivial(*v), Path::trivial(*v));
        }
        let edges: Vec<EdgeId> = w
            .iter()
            .filter_map(|l| if let Letter::Edge(e) = l { Some(*e) } else { None })
            .collect();
        let mut ghosts: Vec<EdgeId> = w
            .iter()
            .filter_map(|l| if let Letter::Ghost(e) = l { Some(*e) } else { None })
            .collect();
        ghosts.reverse();
        let anchor = edges
            .last()
            .map(|&e| q.range(e))
            .or_else(|| ghosts.last().map(|&e| q.range(e)))
            .expect("nonempty word");
        let mk = |es: Vec<EdgeId>| {
            if es.is_empty() {
                Path::trivial(anchor)
            } else {
                Path::from_edges(q, es).expect("stable word composes")
            }
        };
        (mk(edges), mk(ghosts))
    }

    /// Reduces a combination of words, choosing each redex at random.
    pub fn reduce_words<R: Rng>(
        &self,
        words: Vec<(RatFn, Vec<Letter>)>,
        rng: &mut R,
        mut fuel: usize,
    ) -> Result<LeavittElement> {
        let q = self.quiver();
        let mut pending = words;
        let mut out = LeavittElement::zero();
        while !pending.is_empty() {
            if fuel == 0 {
                return Err(LeavittError::FuelExhausted);
            }
            fuel -= 1;
            let idx = rng.gen_range(0..pending.len());
            let (c, w) = pending.swap_remove(idx);
            if c.is_zero() {
                continue;
            }
            let redexes: Vec<(usize, Pair)> = (0..w.len().saturating_sub(1))
                .filter_map(|i| match self.pair(w[i], w[i + 1]) {
                    Pair::Stable => None,
                    p => Some((i, p)),
                })
                .collect();
            if redexes.is_empty() {
                // (CK2) at the junction of γ and μ*
                let junction = w.windows(2).position(|p| {
                    matches!(p, [Letter::Edge(e), Letter::Ghost(f)]
                        if e == f && self.designated[q.source(*e)] == Some(*e))
                });
                match junction {
                    Some(i) => {
                        let Letter::Edge(e) = w[i] else { unreachable!() };
                        let v = q.source(e);
                        let splice = |mid: Vec<Letter>| {
                            let mut nw = w[..i].to_vec();
                            nw.extend(mid);
                            nw.extend_from_slice(&w[i + 2..]);
                            nw
                        };
                        pending.push((c.clone(), splice(vec![Letter::Vertex(v)])));
                        for &f in q.out_edges(v) {
                            if f != e {
                                pending.push((-&c, splice(vec![Letter::Edge(f), Letter::Ghost(f)])));
                            }
                        }
                    }
                    None => {
                        let key = self.pair_of_word(&w);
                        out.add_raw(key, c);
                    }
                }
                continue;
            }
            let pick = rng.gen_range(0..redexes.len());
            let (i, p) = redexes.into_iter().nth(pick).expect("in range");
            if let Pair::Replace(mid) = p {
                let mut nw = w[..i].to_vec();
                nw.extend(mid);
                nw.extend_from_slice(&w[i + 2..]);
                pending.push((c, nw));
            }
        }
        Ok(out)
    }

    /// `a·b` computed by concatenating words and rewriting in random order.
    pub fn mul_by_rewriting<R: Rng>(
        &self,
        a: &LeavittElement,
        b: &LeavittElement,
        rng: &mut R,
        fuel: usize,
    ) -> Result<LeavittElement> {
        let mut words = Vec::new();
        for ((g, m), x) in a.terms() {
            for ((g2, n2), y) in b.terms() {
                let mut w = self.word_of(g, m);
                w.extend(self.word_of(g2, n2));
                words.push((x * y, w));
            }
        }
        self.reduce_words(words, rng, fuel)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::samples;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rose() -> LeavittAlgebra {
        LeavittAlgebra::new(PathAlgebra::from_graph(&samples::rose2()).unwrap())
    }

    fn toeplitz() -> LeavittAlgebra {
        LeavittAlgebra::new(PathAlgebra::from_graph(&samples::toeplitz()).unwrap())
    }

    fn tree() -> LeavittAlgebra {
        LeavittAlgebra::new(PathAlgebra::from_graph(&samples::tree3()).unwrap())
    }

    #[test]
    fn ck1_on_rose() {
        let l = rose();
        let q = l.quiver();
        let (e1, e2) = (q.edge("e1").unwrap(), q.edge("e2").unwrap());
        let w = q.vertex("w").unwrap();
        assert_eq!(l.mul(&l.ghost(e1), &l.edge(e1)), l.vertex(w));
        assert!(l.mul(&l.ghost(e1), &l.edge(e2)).is_zero());
    }

    #[test]
    fn ck2_normal_form_on_rose() {
        let l = rose();
        let q = l.quiver();
        let (e1, e2) = (q.edge("e1").unwrap(), q.edge("e2").unwrap());
        let w = q.vertex("w").unwrap();
        assert_eq!(l.designated_edge(w), Some(e2));
        let x = l.mul(&l.edge(e2), &l.ghost(e2));
        assert_eq!(l.display(&x), "w - e1.~e1");
        let sum = l.mul(&l.edge(e1), &l.ghost(e1)).add(&x);
        assert_eq!(sum, l.vertex(w));
    }

    #[test]
    fn designated_edge_stays_in_component() {
        let l = toeplitz();
        let q = l.quiver();
        // s⁻¹(u) = (alpha, f) in file order, but f leaves u's component
        assert_eq!(l.designated_edge(q.vertex("u").unwrap()), Some(q.edge("alpha").unwrap()));
        assert_eq!(l.designated_edge(q.vertex("v").unwrap()), Some(q.edge("beta").unwrap()));
    }

    #[test]
    fn relations_hold() {
        for l in [rose(), toeplitz(), tree()] {
            let rep = l.check_defining_relations();
            assert!(rep.all_hold(), "{:?}", rep.checks.iter().filter(|c| !c.holds).collect::<Vec<_>>());
        }
        let r = rose().check_defining_relations();
        assert_eq!(r.count("CK1"), 4);
        assert_eq!(r.count("CK2"), 1);
    }

    #[test]
    fn isolated_vertex_only_has_v() {
        let g = crate::quiver::GraphFile::parse("vertex z\n").unwrap();
        let l = LeavittAlgebra::new(PathAlgebra::from_graph(&g).unwrap());
        let rep = l.check_defining_relations();
        assert!(rep.all_hold());
        assert_eq!(rep.checks.len(), rep.count("V"));
    }

    #[test]
    fn star_is_an_anti_involution() {
        let l = toeplitz();
        let q = l.quiver();
        let (alpha, f) = (q.edge("alpha").unwrap(), q.edge("f").unwrap());
        assert_eq!(l.edge(f).star(), l.ghost(f));
        let x = l.mul(&l.edge(alpha), &l.ghost(alpha)).add(&l.edge(f));
        let y = l.ghost(alpha).add(&l.mul(&l.edge(f), &l.ghost(f)));
        assert_eq!(x.star().star(), x);
        assert_eq!(l.mul(&x, &y).star(), l.mul(&y.star(), &x.star()));
    }

    #[test]
    fn witnesses() {
        let l = rose();
        let wv = l.quiver().vertex("w").unwrap();
        let w = l.projective_witness(wv).unwrap();
        assert!(w.certified);
        assert_eq!(w.row_times_column, l.vertex(wv));
        assert_eq!(w.column_times_row[0][0], l.vertex(wv));
        assert_eq!(w.column_times_row[1][1], l.vertex(wv));
        assert!(w.column_times_row[0][1].is_zero() && w.column_times_row[1][0].is_zero());
        let l = toeplitz();
        let q = l.quiver();
        let w = l.projective_witness(q.vertex("u").unwrap()).unwrap();
        assert!(w.certified);
        assert_eq!(w.column_times_row[1][1], l.vertex(q.vertex("v").unwrap()));
        let t = tree();
        assert!(matches!(
            t.projective_witness(t.quiver().vertex("q").unwrap()),
            Err(LeavittError::SinkVertex(_))
        ));
    }

    #[test]
    fn membership_checked() {
        let l = toeplitz();
        let q = l.quiver();
        let xv = RatFn::var(l.base().poset().class_by_name("v").unwrap() as u32);
        let alpha = q.path(&["alpha"]).unwrap();
        let u = Path::trivial(q.vertex("u").unwrap());
        assert!(l.term(xv.clone(), alpha.clone(), u.clone()).is_err());
        let f = q.path(&["f"]).unwrap();
        let v = Path::trivial(q.vertex("v").unwrap());
        let t = l.term(xv.clone(), f.clone(), v).unwrap();
        // x_v·f·f* — then (x_v f f*)·f = x_v f
        let ff = l.mul(&t, &l.ghost(q.edge("f").unwrap()));
        assert_eq!(l.mul(&ff, &l.edge(q.edge("f").unwrap())), t);
        l.check_element(&ff).unwrap();
        assert!(l.term(RatFn::one(), alpha, f).is_err());
    }

    #[test]
    fn rewriting_agrees_with_direct_product() {
        let l = tree();
        let q = l.quiver();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let gens: Vec<LeavittElement> = (0..q.num_edges())
            .flat_map(|e| [l.edge(e), l.ghost(e)])
            .chain((0..q.num_vertices()).map(|v| l.vertex(v)))
            .collect();
        for i in 0..gens.len() {
            for j in 0..gens.len() {
                let a = l.mul(&gens[i], &gens[(i + j) % gens.len()]).add(&gens[j]);
                let b = gens[(i * 3 + j) % gens.len()].add(&l.mul(&gens[j], &gens[i]));
                let direct = l.mul(&a, &b);
                let rw = l.mul_by_rewriting(&a, &b, &mut rng, 10_000).unwrap();
                assert_eq!(direct, rw);
            }
        }
    }

    #[test]
    fn amalgamated_map_is_multiplicative() {
        let l = toeplitz();
        let (target, phi) = l.amalgamated().unwrap();
        let q = l.quiver();
        let xv = RatFn::var(l.base().poset().class_by_name("v").unwrap() as u32);
        let beta = l.term(xv.clone(), q.path(&["beta"]).unwrap(), Path::trivial(q.vertex("v").unwrap())).unwrap();
        let f = l.edge(q.edge("f").unwrap());
        let a = l.add_one(&f);
        let prod = l.mul(&a, &beta);
        assert_eq!(
            l.map_coefficients(&prod, &phi, &target),
            target.mul(&l.map_coefficients(&a, &phi, &target), &l.map_coefficients(&beta, &phi, &target))
        );
        assert_eq!(l.map_coefficients(&l.one(), &phi, &target), target.one());
    }

    impl LeavittAlgebra {
        fn add_one(&self, x: &LeavittElement) -> LeavittElement {
            x.add(&self.one())
        }
    }
}
