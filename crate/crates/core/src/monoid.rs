//! The graph monoid `M(E)`: vertex multiplicities modulo `v = Σ_{s(e)=v} r(e)`.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;
use thiserror::Error;

use crate::leavitt::{LeavittAlgebra, LeavittError};
use crate::quiver::{Quiver, VertexId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MonoidError {
    #[error("no rewriting step at `{0}`")]
    NotApplicable(String),
    #[error("bad monoid literal `{0}`")]
    Parse(String),
}

/// A finitely supported vector of multiplicities indexed by vertices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct MonoidElement(pub Vec<u64>);

impl MonoidElement {
    pub fn zero(q: &Quiver) -> Self {
        MonoidElement(vec![0; q.num_vertices()])
    }

    pub fn generator(q: &Quiver, v: VertexId) -> Self {
        let mut m = Self::zero(q);
        m.0[v] = 1;
        m
    }

    pub fn add(&self, other: &MonoidElement) -> MonoidElement {
        MonoidElement(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn size(&self) -> u64 {
        self.0.iter().sum()
    }

    /// Parses `2u+3v`, `u + v` or `0`.
    pub fn parse(q: &Quiver, s: &str) -> Result<Self, MonoidError> {
        let mut out = Self::zero(q);
        let s = s.trim();
        if s == "0" {
            return Ok(out);
        }
        for part in s.split('+') {
            let part = part.trim();
            let split = part.find(|c: char| !c.is_ascii_digit()).unwrap_or(part.len());
            let (digits, name) = part.split_at(split);
            let name = name.trim_start_matches('*').trim();
            let k: u64 = if digits.is_empty() {
                1
            } else {
                digits.parse().map_err(|_| MonoidError::Parse(s.to_string()))?
            };
            let v = q.vertex(name).map_err(|_| MonoidError::Parse(s.to_string()))?;
            out.0[v] += k;
        }
        Ok(out)
    }

    pub fn display(&self, q: &Quiver) -> String {
        let parts: Vec<String> = self
            .0
            .iter()
            .enumerate()
            .filter(|(_, &k)| k > 0)
            .map(|(v, &k)| {
                if k == 1 {
                    q.vertex_name(v).to_string()
                } else {
                    format!("{k}{}", q.vertex_name(v))
                }
            })
            .collect();
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

/// `a − v + Σ_{s(e)=v} r(e)`.
pub fn step(q: &Quiver, a: &MonoidElement, v: VertexId) -> Result<MonoidElement, MonoidError> {
    if a.0[v] == 0 || q.is_sink(v) {
        return Err(MonoidError::NotApplicable(q.vertex_name(v).to_string()));
    }
    let mut out = a.clone();
    out.0[v] -= 1;
    for &e in q.out_edges(v) {
        out.0[q.range(e)] += 1;
    }
    Ok(out)
}

/// Limits for the bounded search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SearchBound {
    pub layers: usize,
    pub visited: usize,
}

impl Default for SearchBound {
    fn default() -> Self {
        SearchBound {
            layers: 12,
            visited: 100_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum MonoidVerdict {
    /// A common descendant, with the vertices rewritten from each side.
    Equal {
        witness: MonoidElement,
        steps_from_left: Vec<VertexId>,
        steps_from_right: Vec<VertexId>,
    },
    /// Both closures are finite, complete and disjoint.
    NotEqual,
    /// The bound was hit first.
    Unknown { visited: usize },
}

struct Closure {
    parent: HashMap<MonoidElement, Option<(MonoidElement, VertexId)>>,
    frontier: Vec<MonoidElement>,
    depth: HashMap<MonoidElement, usize>,
}

impl Closure {
    fn new(start: &MonoidElement) -> Self {
        let mut parent = HashMap::new();
        parent.insert(start.clone(), None);
        let mut depth = HashMap::new();
        depth.insert(start.clone(), 0);
        Closure {
            parent,
            frontier: vec![start.clone()],
            depth,
        }
    }

    fn complete(&self) -> bool {
        self.frontier.is_empty()
    }

    fn expand(&mut self, q: &Quiver) {
        let mut next = BTreeSet::new();
        for a in std::mem::take(&mut self.frontier) {
            let d = self.depth[&a];
            for v in 0..q.num_vertices() {
                if let Ok(b) = step(q, &a, v) {
                    if !self.parent.contains_key(&b) {
                        self.parent.insert(b.clone(), Some((a.clone(), v)));
                        self.depth.insert(b.clone(), d + 1);
                        next.insert(b);
                    }
                }
            }
        }
        self.frontier = next.into_iter().collect();
    }

    fn steps_to(&self, target: &MonoidElement) -> Vec<VertexId> {
        let mut out = Vec::new();
        let mut cur = target.clone();
        while let Some(Some((prev, v))) = self.parent.get(&cur) {
            out.push(*v);
            cur = prev.clone();
        }
        out.reverse();
        out
    }

    fn common_with(&self, other: &Closure) -> Option<MonoidElement> {
        self.parent
            .keys()
            .filter(|k| other.parent.contains_key(*k))
            .min_by_key(|k| (self.depth[*k] + other.depth[*k], (*k).clone()))
            .cloned()
    }
}

/// Replays a step sequence, returning the endpoint.
pub fn replay(q: &Quiver, start: &MonoidElement, steps: &[VertexId]) -> Result<MonoidElement, MonoidError> {
    steps.iter().try_fold(start.clone(), |a, &v| step(q, &a, v))
}

/// Bounded two-sided search for a common descendant.
pub fn mon_equal(q: &Quiver, a: &MonoidElement, b: &MonoidElement, bound: SearchBound) -> MonoidVerdict {
    let mut left = Closure::new(a);
    let mut right = Closure::new(b);
    for layer in 0..=bound.layers {
        if let Some(w) = left.common_with(&right) {
            return MonoidVerdict::Equal {
                steps_from_left: left.steps_to(&w),
                steps_from_right: right.steps_to(&w),
                witness: w,
            };
        }
        if left.complete() && right.complete() {
            return MonoidVerdict::NotEqual;
        }
        if layer == bound.layers || left.parent.len() + right.parent.len() >= bound.visited {
            break;
        }
        left.expand(q);
        right.expand(q);
    }
    MonoidVerdict::Unknown {
        visited: left.parent.len() + right.parent.len(),
    }
}

/// Generators, one relation per non-sink vertex, and the projective witness
/// for each relation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MonoidPresentation {
    pub generators: Vec<String>,
    /// `(v, Σ r(e))` for every vertex that emits edges.
    pub relations: Vec<(String, String)>,
    pub witnesses: BTreeMap<String, bool>,
    /// No relations at all: the monoid is `ℕ^d` with `d = |E⁰|`.
    pub free_rank: Option<usize>,
}

impl MonoidPresentation {
    pub fn all_witnessed(&self) -> bool {
        self.witnesses.values().all(|&b| b)
    }
}

/// The presentation alone; works for any quiver.
pub fn monoid_of_graph(q: &Quiver) -> MonoidPresentation {
    let relations: Vec<(String, String)> = (0..q.num_vertices())
        .filter(|&v| !q.is_sink(v))
        .map(|v| {
            let rhs = step(q, &MonoidElement::generator(q, v), v).expect("non-sink");
            (q.vertex_name(v).to_string(), rhs.display(q))
        })
        .collect();
    MonoidPresentation {
        generators: (0..q.num_vertices()).map(|v| q.vertex_name(v).to_string()).collect(),
        free_rank: relations.is_empty().then_some(q.num_vertices()),
        relations,
        witnesses: BTreeMap::new(),
    }
}

/// The presentation with each relation certified by a projective witness.
pub fn vmonoid_generators_check(leavitt: &LeavittAlgebra) -> Result<MonoidPresentation, LeavittError> {
    let q = leavitt.quiver();
    let mut p = monoid_of_graph(q);
    for v in (0..q.num_vertices()).filter(|&v| !q.is_sink(v)) {
        p.witnesses
            .insert(q.vertex_name(v).to_string(), leavitt.projective_witness(v)?.certified);
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pathalg::PathAlgebra;
    use crate::quiver::{samples, GraphFile};

    fn quiver(g: GraphFile) -> Quiver {
        g.quiver
    }

    #[test]
    fn steps() {
        let r = quiver(samples::rose2());
        let w = MonoidElement::parse(&r, "w").unwrap();
        assert_eq!(step(&r, &w, 0).unwrap().display(&r), "2w");
        let t = quiver(samples::toeplitz());
        let u = MonoidElement::parse(&t, "u").unwrap();
        assert_eq!(step(&t, &u, t.vertex("u").unwrap()).unwrap().display(&t), "u + v");
        let tr = quiver(samples::tree3());
        let qv = tr.vertex("q").unwrap();
        let x = MonoidElement::generator(&tr, qv);
        assert!(matches!(step(&tr, &x, qv), Err(MonoidError::NotApplicable(_))));
    }

    #[test]
    fn literals_roundtrip() {
        let t = quiver(samples::toeplitz());
        let a = MonoidElement::parse(&t, "2u+3v").unwrap();
        assert_eq!(a.0, vec![2, 3]);
        assert_eq!(a.display(&t), "2u + 3v");
        assert!(MonoidElement::parse(&t, "2x").is_err());
        assert_eq!(MonoidElement::parse(&t, "0").unwrap().display(&t), "0");
    }

    #[test]
    fn equality_examples() {
        let r = quiver(samples::rose2());
        let w = MonoidElement::parse(&r, "w").unwrap();
        let ww = MonoidElement::parse(&r, "2w").unwrap();
        match mon_equal(&r, &w, &ww, SearchBound::default()) {
            MonoidVerdict::Equal {
                witness,
                steps_from_left,
                steps_from_right,
            } => {
                assert_eq!(witness, ww);
                assert_eq!(steps_from_left.len(), 1);
                assert_eq!(replay(&r, &w, &steps_from_left).unwrap(), witness);
                assert_eq!(replay(&r, &ww, &steps_from_right).unwrap(), witness);
            }
            other => panic!("{other:?}"),
        }

        let one_loop = quiver(GraphFile::parse("vertex v\nedge a v v\n").unwrap());
        let v = MonoidElement::parse(&one_loop, "v").unwrap();
        let vv = MonoidElement::parse(&one_loop, "2v").unwrap();
        assert_eq!(mon_equal(&one_loop, &v, &vv, SearchBound::default()), MonoidVerdict::NotEqual);

        let t = quiver(samples::toeplitz());
        let u = MonoidElement::parse(&t, "u").unwrap();
        let uv = MonoidElement::parse(&t, "u+v").unwrap();
        assert!(matches!(mon_equal(&t, &u, &uv, SearchBound::default()), MonoidVerdict::Equal { .. }));
    }

    #[test]
    fn unknown_when_bound_is_hit() {
        // u and v are never identified in T, but u's closure is infinite
        let t = quiver(samples::toeplitz());
        let u = MonoidElement::parse(&t, "u").unwrap();
        let v = MonoidElement::parse(&t, "v").unwrap();
        let bound = SearchBound { layers: 4, visited: 1000 };
        assert!(matches!(mon_equal(&t, &u, &v, bound), MonoidVerdict::Unknown { .. }));
    }

    #[test]
    fn presentations() {
        let l = LeavittAlgebra::new(PathAlgebra::from_graph(&samples::rose2()).unwrap());
        let p = vmonoid_generators_check(&l).unwrap();
        assert_eq!(p.relations, vec![("w".to_string(), "2w".to_string())]);
        assert!(p.all_witnessed());
        let l = LeavittAlgebra::new(PathAlgebra::from_graph(&samples::toeplitz()).unwrap());
        let p = vmonoid_generators_check(&l).unwrap();
        assert_eq!(p.relations.len(), 2);
        assert_eq!(p.relations[1], ("v".to_string(), "v".to_string()));
        assert!(p.all_witnessed());
        let g = GraphFile::parse("vertex a\nvertex b\n").unwrap();
        let p = monoid_of_graph(&g.quiver);
        assert_eq!(p.free_rank, Some(2));
        assert!(p.relations.is_empty());
    }
}
