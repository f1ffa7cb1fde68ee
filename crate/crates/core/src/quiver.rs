//! Finite quivers, paths, and the component poset.
//!
//! Vertices and edges are identified by strings and stored in file order;
//! internally they are addressed by their position. A [`ComponentPoset`] is
//! the antisymmetrization of the vertex set under a pre-order compatible with
//! path reachability: by default the strongly connected components, or a
//! coarser user-supplied partition.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type VertexId = usize;
pub type EdgeId = usize;
pub type ClassId = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QuiverError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("unknown class `{0}`")]
    UnknownClass(String),
    #[error("duplicate identifier `{0}`")]
    Duplicate(String),
    #[error("edges `{0}` and `{1}` do not compose")]
    NotComposable(String, String),
    #[error("partition incompatible with reachability: {0}")]
    IncompatiblePartition(String),
    #[error("not a tree: {0}")]
    NotATree(TreeWitness),
    #[error("not a lower set: class `{missing}` lies below `{present}` but is missing")]
    NotLowerSet { present: String, missing: String },
    #[error("shape violation: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    ShapeViolation(Vec<ShapeViolation>),
}

/// Why a component poset fails to be a tree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum TreeWitness {
    /// Two distinct maximal classes.
    TwoMaxima(String, String),
    /// Two incomparable classes both above `below`.
    IncomparableAbove {
        below: String,
        first: String,
        second: String,
    },
    Empty,
}

impl fmt::Display for TreeWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TreeWitness::TwoMaxima(a, b) => write!(f, "two maximal classes `{a}` and `{b}`"),
            TreeWitness::IncomparableAbove {
                below,
                first,
                second,
            } => write!(
                f,
                "classes `{first}` and `{second}` are incomparable but both lie above `{below}`"
            ),
            TreeWitness::Empty => write!(f, "empty poset"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub name: String,
    pub source: VertexId,
    pub range: VertexId,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quiver {
    vertices: Vec<String>,
    edges: Vec<Edge>,
    vertex_index: HashMap<String, VertexId>,
    edge_index: HashMap<String, EdgeId>,
    out_edges: Vec<Vec<EdgeId>>,
}

impl Quiver {
    pub fn new<S: AsRef<str>>(vertices: &[S], edges: &[(S, S, S)]) -> Result<Self, QuiverError> {
        let mut q = Quiver {
            vertices: Vec::new(),
            edges: Vec::new(),
            vertex_index: HashMap::new(),
            edge_index: HashMap::new(),
            out_edges: Vec::new(),
        };
        for v in vertices {
            q.add_vertex(v.as_ref())?;
        }
        for (e, s, r) in edges {
            q.add_edge(e.as_ref(), s.as_ref(), r.as_ref())?;
        }
        Ok(q)
    }

    fn add_vertex(&mut self, name: &str) -> Result<VertexId, QuiverError> {
        if self.vertex_index.contains_key(name) || self.edge_index.contains_key(name) {
            return Err(QuiverError::Duplicate(name.to_string()));
        }
        let id = self.vertices.len();
        self.vertices.push(name.to_string());
        self.vertex_index.insert(name.to_string(), id);
        self.out_edges.push(Vec::new());
        Ok(id)
    }

    fn add_edge(&mut self, name: &str, src: &str, dst: &str) -> Result<EdgeId, QuiverError> {
        if self.vertex_index.contains_key(name) || self.edge_index.contains_key(name) {
            return Err(QuiverError::Duplicate(name.to_string()));
        }
        let source = self.vertex(src)?;
        let range = self.vertex(dst)?;
        let id = self.edges.len();
        self.edges.push(Edge {
            name: name.to_string(),
            source,
            range,
        });
        self.edge_index.insert(name.to_string(), id);
        self.out_edges[source].push(id);
        Ok(id)
    }

    pub fn vertex(&self, name: &str) -> Result<VertexId, QuiverError> {
        self.vertex_index
            .get(name)
            .copied()
            .ok_or_else(|| QuiverError::UnknownVertex(name.to_string()))
    }

    pub fn edge(&self, name: &str) -> Result<EdgeId, QuiverError> {
        self.edge_index
            .get(name)
            .copied()
            .ok_or_else(|| QuiverError::UnknownEdge(name.to_string()))
    }

    pub fn has_vertex(&self, name: &str) -> bool {
        self.vertex_index.contains_key(name)
    }

    pub fn has_edge(&self, name: &str) -> bool {
        self.edge_index.contains_key(name)
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_name(&self, v: VertexId) -> &str {
        &self.vertices[v]
    }

    pub fn edge_name(&self, e: EdgeId) -> &str {
        &self.edges[e].name
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn source(&self, e: EdgeId) -> VertexId {
        self.edges[e].source
    }

    pub fn range(&self, e: EdgeId) -> VertexId {
        self.edges[e].range
    }

    /// `s⁻¹(v)` in file order.
    pub fn out_edges(&self, v: VertexId) -> &[EdgeId] {
        &self.out_edges[v]
    }

    pub fn is_sink(&self, v: VertexId) -> bool {
        self.out_edges[v].is_empty()
    }

    /// `reach[v][w]` iff there is a path (possibly trivial) from `v` to `w`.
    pub fn reachability(&self) -> Vec<Vec<bool>> {
        let n = self.num_vertices();
        let mut reach = vec![vec![false; n]; n];
        for (start, row) in reach.iter_mut().enumerate() {
            let mut stack = vec![start];
            row[start] = true;
            while let Some(v) = stack.pop() {
                for &e in &self.out_edges[v] {
                    let w = self.edges[e].range;
                    if !row[w] {
                        row[w] = true;
                        stack.push(w);
                    }
                }
            }
        }
        reach
    }

    /// A vertex set is hereditary when no edge leaves it.
    pub fn is_hereditary(&self, set: &BTreeSet<VertexId>) -> bool {
        self.edges
            .iter()
            .all(|e| !set.contains(&e.source) || set.contains(&e.range))
    }

    /// All hereditary vertex subsets, including the empty set and `E⁰`.
    pub fn hereditary_subsets(&self) -> Vec<BTreeSet<VertexId>> {
        let n = self.num_vertices();
        assert!(n <= 20, "hereditary subset enumeration is exponential");
        (0u32..(1 << n))
            .map(|mask| (0..n).filter(|&v| mask & (1 << v) != 0).collect())
            .filter(|s| self.is_hereditary(s))
            .collect()
    }

    pub fn path(&self, edges: &[&str]) -> Result<Path, QuiverError> {
        let ids = edges
            .iter()
            .map(|e| self.edge(e))
            .collect::<Result<Vec<_>, _>>()?;
        Path::from_edges(self, ids)
    }

    pub fn trivial(&self, v: &str) -> Result<Path, QuiverError> {
        Ok(Path::trivial(self.vertex(v)?))
    }

    /// All paths of length at most `max_len`, shortest first.
    pub fn paths_up_to(&self, max_len: usize) -> Vec<Path> {
        let mut out: Vec<Path> = (0..self.num_vertices()).map(Path::trivial).collect();
        let mut frontier = out.clone();
        for _ in 0..max_len {
            let mut next = Vec::new();
            for p in &frontier {
                for &e in &self.out_edges[p.range()] {
                    next.push(p.then_edge(self, e));
                }
            }
            out.extend(next.iter().cloned());
            frontier = next;
        }
        out
    }
}

/// A path `e_1 ⋯ e_n` with `r(e_t) = s(e_{t+1})`, or a trivial path at a vertex.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Path {
    source: VertexId,
    range: VertexId,
    edges: Vec<EdgeId>,
}

impl Path {
    pub fn trivial(v: VertexId) -> Self {
        Path {
            source: v,
            range: v,
            edges: Vec::new(),
        }
    }

    pub fn edge(q: &Quiver, e: EdgeId) -> Self {
        Path {
            source: q.source(e),
            range: q.range(e),
            edges: vec![e],
        }
    }

    pub fn from_edges(q: &Quiver, edges: Vec<EdgeId>) -> Result<Self, QuiverError> {
        let Some(&first) = edges.first() else {
            return Err(QuiverError::Parse {
                line: 0,
                msg: "empty edge sequence".into(),
            });
        };
        for w in edges.windows(2) {
            if q.range(w[0]) != q.source(w[1]) {
                return Err(QuiverError::NotComposable(
                    q.edge_name(w[0]).to_string(),
                    q.edge_name(w[1]).to_string(),
                ));
            }
        }
        Ok(Path {
            source: q.source(first),
            range: q.range(*edges.last().unwrap()),
            edges,
        })
    }

    pub fn source(&self) -> VertexId {
        self.source
    }

    pub fn range(&self) -> VertexId {
        self.range
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    pub fn first_edge(&self) -> Option<EdgeId> {
        self.edges.first().copied()
    }

    pub fn last_edge(&self) -> Option<EdgeId> {
        self.edges.last().copied()
    }

    /// Concatenation `self · other`, or `None` if `r(self) ≠ s(other)`.
    pub fn concat(&self, other: &Path) -> Option<Path> {
        if self.range != other.source {
            return None;
        }
        let mut edges = self.edges.clone();
        edges.extend_from_slice(&other.edges);
        Some(Path {
            source: self.source,
            range: other.range,
            edges,
        })
    }

    fn then_edge(&self, q: &Quiver, e: EdgeId) -> Path {
        debug_assert_eq!(self.range, q.source(e));
        let mut edges = self.edges.clone();
        edges.push(e);
        Path {
            source: self.source,
            range: q.range(e),
            edges,
        }
    }

    /// If `self = prefix · rest`, returns `rest`.
    pub fn strip_prefix(&self, prefix: &Path) -> Option<Path> {
        if prefix.source != self.source || !self.edges.starts_with(&prefix.edges) {
            return None;
        }
        Some(Path {
            source: prefix.range,
            range: self.range,
            edges: self.edges[prefix.edges.len()..].to_vec(),
        })
    }

    /// Drops the first edge; `None` for trivial paths.
    pub fn tail(&self, q: &Quiver) -> Option<Path> {
        let first = self.first_edge()?;
        Some(Path {
            source: q.range(first),
            range: self.range,
            edges: self.edges[1..].to_vec(),
        })
    }

    /// Drops the last edge; `None` for trivial paths.
    pub fn init(&self, q: &Quiver) -> Option<Path> {
        let last = self.last_edge()?;
        Some(Path {
            source: self.source,
            range: q.source(last),
            edges: self.edges[..self.edges.len() - 1].to_vec(),
        })
    }

    /// All vertices visited, in order.
    pub fn vertices(&self, q: &Quiver) -> Vec<VertexId> {
        let mut out = vec![self.source];
        out.extend(self.edges.iter().map(|&e| q.range(e)));
        out
    }

    /// Dot-joined edge names, or the vertex name for a trivial path.
    pub fn display(&self, q: &Quiver) -> String {
        if self.edges.is_empty() {
            q.vertex_name(self.source).to_string()
        } else {
            self.edges
                .iter()
                .map(|&e| q.edge_name(e))
                .collect::<Vec<_>>()
                .join(".")
        }
    }
}

impl Ord for Path {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.edges.len(), self.source, &self.edges).cmp(&(
            other.edges.len(),
            other.source,
            &other.edges,
        ))
    }
}

impl PartialOrd for Path {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// A user-declared component partition plus extra order pairs `(greater, smaller)`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Partition {
    pub classes: Vec<(String, Vec<String>)>,
    pub order: Vec<(String, String)>,
}

/// The antisymmetrized vertex poset `I`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentPoset {
    names: Vec<String>,
    members: Vec<Vec<VertexId>>,
    class_of: Vec<ClassId>,
    /// `leq[i][j]` iff `i ≤ j`; reflexive and transitive.
    leq: Vec<Vec<bool>>,
}

/// Strongly connected components (or a compatible coarsening) ordered by reachability.
pub fn condense(q: &Quiver, partition: Option<&Partition>) -> Result<ComponentPoset, QuiverError> {
    let n = q.num_vertices();
    let reach = q.reachability();
    let (names, members): (Vec<String>, Vec<Vec<VertexId>>) = match partition {
        None => {
            let mut assigned = vec![false; n];
            let mut names = Vec::new();
            let mut members = Vec::new();
            for v in 0..n {
                if assigned[v] {
                    continue;
                }
                let class: Vec<VertexId> = (v..n)
                    .filter(|&w| reach[v][w] && reach[w][v])
                    .collect();
                for &w in &class {
                    assigned[w] = true;
                }
                names.push(q.vertex_name(v).to_string());
                members.push(class);
            }
            (names, members)
        }
        Some(p) => {
            let mut seen = vec![false; n];
            let mut names = Vec::new();
            let mut members = Vec::new();
            for (name, vs) in &p.classes {
                if names.contains(name) {
                    return Err(QuiverError::Duplicate(name.clone()));
                }
                let mut class = Vec::new();
                for v in vs {
                    let id = q.vertex(v)?;
                    if seen[id] {
                        return Err(QuiverError::IncompatiblePartition(format!(
                            "vertex `{v}` is assigned to two classes"
                        )));
                    }
                    seen[id] = true;
                    class.push(id);
                }
                class.sort_unstable();
                names.push(name.clone());
                members.push(class);
            }
            // undeclared vertices keep their strongly connected component
            for v in 0..n {
                if seen[v] {
                    continue;
                }
                let class: Vec<VertexId> = (v..n)
                    .filter(|&w| !seen[w] && reach[v][w] && reach[w][v])
                    .collect();
                for &w in &class {
                    seen[w] = true;
                }
                let name = q.vertex_name(v).to_string();
                if names.contains(&name) {
                    return Err(QuiverError::Duplicate(name));
                }
                names.push(name);
                members.push(class);
            }
            (names, members)
        }
    };

    let k = names.len();
    let mut class_of = vec![0; n];
    for (c, vs) in members.iter().enumerate() {
        for &v in vs {
            class_of[v] = c;
        }
    }
    let mut leq = vec![vec![false; k]; k];
    for (i, row) in leq.iter_mut().enumerate() {
        row[i] = true;
    }
    for e in q.edges() {
        let (s, r) = (class_of[e.source], class_of[e.range]);
        leq[r][s] = true;
    }
    if let Some(p) = partition {
        for (big, small) in &p.order {
            let b = names
                .iter()
                .position(|x| x == big)
                .ok_or_else(|| QuiverError::UnknownClass(big.clone()))?;
            let s = names
                .iter()
                .position(|x| x == small)
                .ok_or_else(|| QuiverError::UnknownClass(small.clone()))?;
            leq[s][b] = true;
        }
    }
    // transitive closure
    for m in 0..k {
        for i in 0..k {
            if leq[i][m] {
                for j in 0..k {
                    if leq[m][j] {
                        leq[i][j] = true;
                    }
                }
            }
        }
    }
    for i in 0..k {
        for j in (i + 1)..k {
            if leq[i][j] && leq[j][i] {
                return Err(QuiverError::IncompatiblePartition(format!(
                    "classes `{}` and `{}` are mutually reachable",
                    names[i], names[j]
                )));
            }
        }
    }
    Ok(ComponentPoset {
        names,
        members,
        class_of,
        leq,
    })
}

impl ComponentPoset {
    pub fn num_classes(&self) -> usize {
        self.names.len()
    }

    pub fn classes(&self) -> impl Iterator<Item = ClassId> {
        0..self.names.len()
    }

    pub fn name(&self, c: ClassId) -> &str {
        &self.names[c]
    }

    pub fn class_by_name(&self, name: &str) -> Result<ClassId, QuiverError> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| QuiverError::UnknownClass(name.to_string()))
    }

    pub fn members(&self, c: ClassId) -> &[VertexId] {
        &self.members[c]
    }

    pub fn class_of(&self, v: VertexId) -> ClassId {
        self.class_of[v]
    }

    pub fn leq(&self, i: ClassId, j: ClassId) -> bool {
        self.leq[i][j]
    }

    pub fn lt(&self, i: ClassId, j: ClassId) -> bool {
        i != j && self.leq[i][j]
    }

    pub fn comparable(&self, i: ClassId, j: ClassId) -> bool {
        self.leq[i][j] || self.leq[j][i]
    }

    pub fn maximal(&self) -> Vec<ClassId> {
        self.classes()
            .filter(|&i| !self.classes().any(|j| self.lt(i, j)))
            .collect()
    }

    pub fn minimal(&self) -> Vec<ClassId> {
        self.classes()
            .filter(|&i| !self.classes().any(|j| self.lt(j, i)))
            .collect()
    }

    pub fn is_minimal(&self, i: ClassId) -> bool {
        !self.classes().any(|j| self.lt(j, i))
    }

    /// The maximum class, if there is one.
    pub fn root(&self) -> Option<ClassId> {
        match self.maximal().as_slice() {
            [r] => Some(*r),
            _ => None,
        }
    }

    /// Classes `j` with `i ≤ j`.
    pub fn upper_set(&self, i: ClassId) -> Vec<ClassId> {
        self.classes().filter(|&j| self.leq(i, j)).collect()
    }

    /// The principal lower set `I↓i`.
    pub fn lower_set(&self, i: ClassId) -> BTreeSet<ClassId> {
        self.classes().filter(|&j| self.leq(j, i)).collect()
    }

    /// Maximal elements of `I↓i ∖ {i}`, the lower covers of `i`.
    pub fn lower_covers(&self, i: ClassId) -> Vec<ClassId> {
        self.classes()
            .filter(|&j| self.lt(j, i))
            .filter(|&j| !self.classes().any(|k| self.lt(j, k) && self.lt(k, i)))
            .collect()
    }

    pub fn is_lower_set(&self, set: &BTreeSet<ClassId>) -> Result<(), QuiverError> {
        for &i in set {
            for j in self.classes() {
                if self.leq(j, i) && !set.contains(&j) {
                    return Err(QuiverError::NotLowerSet {
                        present: self.names[i].clone(),
                        missing: self.names[j].clone(),
                    });
                }
            }
        }
        Ok(())
    }

    /// Maximal elements of a subset.
    pub fn maximal_in(&self, set: &BTreeSet<ClassId>) -> Vec<ClassId> {
        set.iter()
            .copied()
            .filter(|&i| !set.iter().any(|&j| self.lt(i, j)))
            .collect()
    }

    /// `E⁰_J = {v : [v] ∈ J}` for a lower set `J`.
    pub fn hereditary_vertices(&self, set: &BTreeSet<ClassId>) -> Result<BTreeSet<VertexId>, QuiverError> {
        self.is_lower_set(set)?;
        Ok(set
            .iter()
            .flat_map(|&c| self.members[c].iter().copied())
            .collect())
    }

    /// Unique maximum, and every `[i, i₀]` a chain.
    pub fn assert_tree(&self) -> Result<ClassId, QuiverError> {
        let maxima = self.maximal();
        match maxima.as_slice() {
            [] => return Err(QuiverError::NotATree(TreeWitness::Empty)),
            [_] => {}
            [a, b, ..] => {
                return Err(QuiverError::NotATree(TreeWitness::TwoMaxima(
                    self.names[*a].clone(),
                    self.names[*b].clone(),
                )))
            }
        }
        for i in self.classes() {
            let up = self.upper_set(i);
            for (x, &a) in up.iter().enumerate() {
                for &b in &up[x + 1..] {
                    if !self.comparable(a, b) {
                        return Err(QuiverError::NotATree(TreeWitness::IncomparableAbove {
                            below: self.names[i].clone(),
                            first: self.names[a].clone(),
                            second: self.names[b].clone(),
                        }));
                    }
                }
            }
        }
        Ok(maxima[0])
    }

    /// Edges with both endpoints in class `c`: the restriction graph `E[v]`.
    pub fn restriction_edges(&self, q: &Quiver, c: ClassId) -> Vec<EdgeId> {
        (0..q.num_edges())
            .filter(|&e| self.class_of[q.source(e)] == c && self.class_of[q.range(e)] == c)
            .collect()
    }
}

/// A failed clause of the free/regular shape conditions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ShapeViolation {
    pub class: String,
    pub clause: u8,
    pub reason: String,
}

impl fmt::Display for ShapeViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "class `{}` fails clause ({}): {}", self.class, self.clause, self.reason)
    }
}

/// The partition `I = I_free ⊔ I_reg` together with the restriction graphs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbpShape {
    pub free: BTreeSet<ClassId>,
    pub regular: BTreeSet<ClassId>,
    pub restriction: BTreeMap<ClassId, Vec<EdgeId>>,
    /// The loop `α^v` of each non-minimal free class.
    pub free_loops: BTreeMap<ClassId, (VertexId, EdgeId)>,
}

pub fn validate_abp_shape(
    q: &Quiver,
    p: &ComponentPoset,
    free: &BTreeSet<ClassId>,
    regular: &BTreeSet<ClassId>,
) -> Result<AbpShape, QuiverError> {
    let mut violations = Vec::new();
    let mut restriction = BTreeMap::new();
    let mut free_loops = BTreeMap::new();
    for c in p.classes() {
        let name = p.name(c).to_string();
        let edges = p.restriction_edges(q, c);
        match (free.contains(&c), regular.contains(&c)) {
            (true, true) => violations.push(ShapeViolation {
                class: name.clone(),
                clause: 1,
                reason: "declared both free and regular".into(),
            }),
            (false, false) => violations.push(ShapeViolation {
                class: name.clone(),
                clause: 1,
                reason: "declared neither free nor regular".into(),
            }),
            _ => {}
        }
        let minimal = p.is_minimal(c);
        if free.contains(&c) && !minimal {
            let members = p.members(c);
            if members.len() == 1 && edges.len() == 1 {
                free_loops.insert(c, (members[0], edges[0]));
            } else {
                violations.push(ShapeViolation {
                    class: name.clone(),
                    clause: 2,
                    reason: format!(
                        "non-minimal free class has {} vertices and {} internal edges, expected a single loop",
                        members.len(),
                        edges.len()
                    ),
                });
            }
        }
        if regular.contains(&c) && edges.len() < 2 {
            violations.push(ShapeViolation {
                class: name.clone(),
                clause: 3,
                reason: format!("regular class has {} internal edges, expected at least 2", edges.len()),
            });
        }
        if minimal && !regular.contains(&c) {
            let sinks = p.members(c).iter().all(|&v| q.is_sink(v));
            if !sinks {
                violations.push(ShapeViolation {
                    class: name.clone(),
                    clause: 4,
                    reason: "minimal class is neither a sink nor regular".into(),
                });
            }
        }
        restriction.insert(c, edges);
    }
    if !violations.is_empty() {
        return Err(QuiverError::ShapeViolation(violations));
    }
    Ok(AbpShape {
        free: free.clone(),
        regular: regular.clone(),
        restriction,
        free_loops,
    })
}

/// A parsed graph file: the quiver plus optional poset and shape annotations.
#[derive(Debug, Clone)]
pub struct GraphFile {
    pub quiver: Quiver,
    pub partition: Option<Partition>,
    pub free: Vec<String>,
    pub regular: Vec<String>,
}

impl GraphFile {
    /// Parses the line-oriented graph format:
    /// `vertex <id>`, `edge <id> <src> <dst>`, `component <class> <vertex>...`,
    /// `order <classA> > <classB>`, `free <class>`, `regular <class>`; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, QuiverError> {
        let mut vertices: Vec<String> = Vec::new();
        let mut edges: Vec<(String, String, String, usize)> = Vec::new();
        let mut partition = Partition::default();
        let mut has_partition = false;
        let mut free = Vec::new();
        let mut regular = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            let err = |msg: &str| QuiverError::Parse {
                line: line_no,
                msg: msg.to_string(),
            };
            match toks[0] {
                "vertex" => {
                    if toks.len() != 2 {
                        return Err(err("expected `vertex <id>`"));
                    }
                    vertices.push(toks[1].to_string());
                }
                "edge" => {
                    if toks.len() != 4 {
                        return Err(err("expected `edge <id> <src> <dst>`"));
                    }
                    edges.push((toks[1].into(), toks[2].into(), toks[3].into(), line_no));
                }
                "component" => {
                    if toks.len() < 3 {
                        return Err(err("expected `component <class> <vertex>...`"));
                    }
                    has_partition = true;
                    partition.classes.push((
                        toks[1].to_string(),
                        toks[2..].iter().map(|s| s.to_string()).collect(),
                    ));
                }
                "order" => {
                    if toks.len() != 4 || toks[2] != ">" {
                        return Err(err("expected `order <classA> > <classB>`"));
                    }
                    has_partition = true;
                    partition.order.push((toks[1].into(), toks[3].into()));
                }
                "free" | "regular" => {
                    if toks.len() < 2 {
                        return Err(err("expected a class name"));
                    }
                    let target = if toks[0] == "free" { &mut free } else { &mut regular };
                    target.extend(toks[1..].iter().map(|s| s.to_string()));
                }
                other => return Err(err(&format!("unknown declaration `{other}`"))),
            }
        }
        let mut q = Quiver::new::<&str>(&[], &[])?;
        for v in &vertices {
            q.add_vertex(v)?;
        }
        for (e, s, r, line) in &edges {
            q.add_edge(e, s, r).map_err(|err| QuiverError::Parse {
                line: *line,
                msg: err.to_string(),
            })?;
        }
        Ok(GraphFile {
            quiver: q,
            partition: has_partition.then_some(partition),
            free,
            regular,
        })
    }

    pub fn condense(&self) -> Result<ComponentPoset, QuiverError> {
        condense(&self.quiver, self.partition.as_ref())
    }

    pub fn has_shape_annotations(&self) -> bool {
        !self.free.is_empty() || !self.regular.is_empty()
    }

    pub fn shape_sets(
        &self,
        p: &ComponentPoset,
    ) -> Result<(BTreeSet<ClassId>, BTreeSet<ClassId>), QuiverError> {
        let lookup = |names: &[String]| {
            names
                .iter()
                .map(|n| p.class_by_name(n))
                .collect::<Result<BTreeSet<_>, _>>()
        };
        Ok((lookup(&self.free)?, lookup(&self.regular)?))
    }
}

/// Small graphs used throughout the examples and tests.
pub mod samples {
    use super::GraphFile;

    /// Toeplitz chain: loop `alpha` at `u`, edge `f: u → v`, loop `beta` at `v`.
    pub const TOEPLITZ: &str = "\
vertex u
vertex v
edge alpha u u
edge f u v
edge beta v v
";

    /// Rose with two petals at `w`.
    pub const ROSE2: &str = "\
vertex w
edge e1 w w
edge e2 w w
";

    /// Root `r` with loop `a` over two incomparable classes: `p` (two loops) and the sink `q`.
    pub const TREE3: &str = "\
vertex r
vertex p
vertex q
edge a r r
edge g r p
edge h r q
edge b1 p p
edge b2 p p
free r q
regular p
";

    /// Chain of three single-loop components `u > v > w`.
    pub const CHAIN3: &str = "\
vertex u
vertex v
vertex w
edge alpha u u
edge f u v
edge beta v v
edge g v w
edge gamma w w
";

    pub fn toeplitz() -> GraphFile {
        GraphFile::parse(TOEPLITZ).expect("valid sample")
    }

    pub fn rose2() -> GraphFile {
        GraphFile::parse(ROSE2).expect("valid sample")
    }

    pub fn tree3() -> GraphFile {
        GraphFile::parse(TREE3).expect("valid sample")
    }

    pub fn chain3() -> GraphFile {
        GraphFile::parse(CHAIN3).expect("valid sample")
    }
}
