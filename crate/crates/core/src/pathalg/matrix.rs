//! Matrices over the path algebra and their (truncated) inverses.

use crate::quiver::{Path, VertexId};
use crate::scalars::{invert_matrix, RatFn};

use super::{PathAlgError, PathAlgebra, PathElement};

/// A dense matrix with path-algebra entries.
///
/// Optional vertex tags record that entry `(i, j)` lives in `v_i P v_j`;
/// the identity of a tagged matrix is then `diag(v_i)`. `degree` is set for
/// matrices that are truncations of power series.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<PathElement>,
    row_tags: Option<Vec<VertexId>>,
    col_tags: Option<Vec<VertexId>>,
    degree: Option<usize>,
}

impl AlgMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        AlgMatrix {
            rows,
            cols,
            entries: vec![PathElement::zero(); rows * cols],
            row_tags: None,
            col_tags: None,
            degree: None,
        }
    }

    pub fn from_entries(
        rows: usize,
        cols: usize,
        entries: Vec<PathElement>,
    ) -> Result<Self, PathAlgError> {
        if entries.len() != rows * cols {
            return Err(PathAlgError::Dimension(format!(
                "{} entries for a {rows}×{cols} matrix",
                entries.len()
            )));
        }
        Ok(AlgMatrix {
            entries,
            ..AlgMatrix::zero(rows, cols)
        })
    }

    pub fn from_rows(rows: Vec<Vec<PathElement>>) -> Result<Self, PathAlgError> {
        let r = rows.len();
        let c = rows.first().map(Vec::len).unwrap_or(0);
        if rows.iter().any(|row| row.len() != c) {
            return Err(PathAlgError::Dimension("ragged rows".into()));
        }
        Self::from_entries(r, c, rows.into_iter().flatten().collect())
    }

    /// `Σ_v v` on the diagonal.
    pub fn identity(alg: &PathAlgebra, n: usize) -> Self {
        Self::diagonal(&vec![alg.one(); n])
    }

    /// `diag(v_1, …, v_n)`, tagged by the same vertices.
    pub fn tagged_identity(alg: &PathAlgebra, tags: &[VertexId]) -> Self {
        let d: Vec<_> = tags.iter().map(|&v| alg.vertex(v)).collect();
        Self::diagonal(&d).with_tags(tags.to_vec(), tags.to_vec())
    }

    pub fn diagonal(d: &[PathElement]) -> Self {
        let n = d.len();
        let mut m = AlgMatrix::zero(n, n);
        for (i, x) in d.iter().enumerate() {
            m.set(i, i, x.clone());
        }
        m
    }

    pub fn with_tags(mut self, row_tags: Vec<VertexId>, col_tags: Vec<VertexId>) -> Self {
        assert_eq!(row_tags.len(), self.rows);
        assert_eq!(col_tags.len(), self.cols);
        self.row_tags = Some(row_tags);
        self.col_tags = Some(col_tags);
        self
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row_tags(&self) -> Option<&[VertexId]> {
        self.row_tags.as_deref()
    }

    pub fn col_tags(&self) -> Option<&[VertexId]> {
        self.col_tags.as_deref()
    }

    pub fn degree(&self) -> Option<usize> {
        self.degree
    }

    pub fn get(&self, i: usize, j: usize) -> &PathElement {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: PathElement) {
        self.entries[i * self.cols + j] = x;
    }

    pub fn entries(&self) -> &[PathElement] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(PathElement::is_zero)
    }

    /// Longest path occurring in any entry.
    pub fn max_path_len(&self) -> usize {
        self.entries
            .iter()
            .filter_map(PathElement::degree)
            .max()
            .unwrap_or(0)
    }

    pub fn map(&self, f: impl Fn(&PathElement) -> PathElement) -> Self {
        AlgMatrix {
            entries: self.entries.iter().map(f).collect(),
            ..self.clone()
        }
    }

    /// Drops paths longer than `n` and records `n` as the known degree.
    pub fn truncated(&self, n: usize) -> Self {
        let n = self.degree.map_or(n, |d| d.min(n));
        let mut out = self.map(|x| x.truncated(n));
        out.degree = Some(n);
        out
    }

    /// `ε` applied entrywise.
    pub fn augmentation(&self) -> Self {
        let mut out = self.map(|x| x.filter(Path::is_trivial));
        out.degree = None;
        out
    }

    pub fn is_eps_zero(&self) -> bool {
        self.entries
            .iter()
            .all(|x| x.terms().all(|(p, _)| !p.is_trivial()))
    }

    fn same_shape(&self, other: &AlgMatrix, op: &str) -> Result<(), PathAlgError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(PathAlgError::Dimension(format!(
                "{op} of {}×{} and {}×{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    fn min_degree(a: Option<usize>, b: Option<usize>) -> Option<usize> {
        match (a, b) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, None) => x,
            (None, y) => y,
        }
    }

    pub fn add(&self, other: &AlgMatrix) -> Result<Self, PathAlgError> {
        self.same_shape(other, "sum")?;
        let degree = Self::min_degree(self.degree, other.degree);
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| {
                let s = a.add(b);
                match degree {
                    Some(n) => s.truncated(n),
                    None => s,
                }
            })
            .collect();
        Ok(AlgMatrix {
            entries,
            degree,
            ..self.clone()
        })
    }

    pub fn neg(&self) -> Self {
        self.map(PathElement::neg)
    }

    pub fn sub(&self, other: &AlgMatrix) -> Result<Self, PathAlgError> {
        self.add(&other.neg())
    }

    /// Matrix product; truncated when either factor is.
    pub fn mul(&self, other: &AlgMatrix) -> Result<Self, PathAlgError> {
        let degree = Self::min_degree(self.degree, other.degree);
        self.mul_bounded(other, degree)
    }

    /// Matrix product keeping only paths of length `≤ bound`.
    pub fn mul_bounded(&self, other: &AlgMatrix, bound: Option<usize>) -> Result<Self, PathAlgError> {
        if self.cols != other.rows {
            return Err(PathAlgError::Dimension(format!(
                "product of {}×{} and {}×{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = AlgMatrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * out.cols + j;
                    out.entries[idx] = out.entries[idx].add(&a.mul_bounded(b, bound));
                }
            }
        }
        out.row_tags = self.row_tags.clone();
        out.col_tags = other.col_tags.clone();
        out.degree = bound.or(Self::min_degree(self.degree, other.degree));
        Ok(out)
    }

    /// Left multiplication by a single algebra element.
    pub fn left_scale(&self, x: &PathElement) -> Self {
        self.map(|a| x.mul(a))
    }

    /// Rows `r0..r1`, columns `c0..c1`.
    pub fn block(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Self {
        let mut out = AlgMatrix::zero(rows.len(), cols.len());
        for (i, r) in rows.clone().enumerate() {
            for (j, c) in cols.clone().enumerate() {
                out.set(i, j, self.get(r, c).clone());
            }
        }
        out.row_tags = self.row_tags.as_ref().map(|t| t[rows].to_vec());
        out.col_tags = self.col_tags.as_ref().map(|t| t[cols].to_vec());
        out.degree = self.degree;
        out
    }

    /// Assembles a block matrix; `None` blocks are zero of the implied size.
    pub fn from_blocks(blocks: &[Vec<&AlgMatrix>]) -> Result<Self, PathAlgError> {
        let row_sizes: Vec<usize> = blocks.iter().map(|r| r[0].rows).collect();
        let col_sizes: Vec<usize> = blocks[0].iter().map(|b| b.cols).collect();
        let mut out = AlgMatrix::zero(row_sizes.iter().sum(), col_sizes.iter().sum());
        let mut r0 = 0;
        for (bi, brow) in blocks.iter().enumerate() {
            if brow.len() != col_sizes.len() {
                return Err(PathAlgError::Dimension("ragged block rows".into()));
            }
            let mut c0 = 0;
            for (bj, b) in brow.iter().enumerate() {
                if b.rows != row_sizes[bi] || b.cols != col_sizes[bj] {
                    return Err(PathAlgError::Dimension("block sizes disagree".into()));
                }
                for i in 0..b.rows {
                    for j in 0..b.cols {
                        out.set(r0 + i, c0 + j, b.get(i, j).clone());
                    }
                }
                c0 += b.cols;
            }
            r0 += row_sizes[bi];
        }
        Ok(out)
    }

    /// Agreement of all entries on paths of length `≤ n`.
    pub fn agrees_mod(&self, other: &AlgMatrix, n: usize) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self
                .entries
                .iter()
                .zip(&other.entries)
                .all(|(a, b)| a.truncated(n) == b.truncated(n))
    }

    /// The identity appropriate to this matrix: `diag(tag_i)` if tagged.
    pub fn identity_like(&self, alg: &PathAlgebra) -> Self {
        match &self.row_tags {
            Some(t) => Self::tagged_identity(alg, t),
            None => Self::identity(alg, self.rows),
        }
    }

    /// Index sets `(rows, cols)` that make up the `v`-block of `ε(M)`.
    fn vertex_block(&self, v: VertexId) -> (Vec<usize>, Vec<usize>) {
        let pick = |tags: &Option<Vec<VertexId>>, n: usize| match tags {
            Some(t) => (0..n).filter(|&i| t[i] == v).collect(),
            None => (0..n).collect(),
        };
        (pick(&self.row_tags, self.rows), pick(&self.col_tags, self.cols))
    }

    fn eps_block(&self, v: VertexId, rows: &[usize], cols: &[usize]) -> Vec<Vec<RatFn>> {
        let t = Path::trivial(v);
        rows.iter()
            .map(|&i| cols.iter().map(|&j| self.get(i, j).coefficient(&t)).collect())
            .collect()
    }

    /// Whether `ε(M)` is invertible, vertex by vertex.
    pub fn is_invertible(&self, alg: &PathAlgebra) -> Result<bool, PathAlgError> {
        if !self.is_square() {
            return Err(PathAlgError::NonSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok(self.eps_inverse(alg).is_ok())
    }

    /// `ε(M)⁻¹`, assembled from the inverses of the per-vertex blocks.
    fn eps_inverse(&self, alg: &PathAlgebra) -> Result<AlgMatrix, PathAlgError> {
        let q = alg.quiver();
        let mut out = AlgMatrix::zero(self.cols, self.rows);
        for v in 0..q.num_vertices() {
            let (rows, cols) = self.vertex_block(v);
            if rows.len() != cols.len() {
                return Err(PathAlgError::NotInvertible(q.vertex_name(v).to_string()));
            }
            if rows.is_empty() {
                continue;
            }
            let inv = invert_matrix(&self.eps_block(v, &rows, &cols))
                .ok_or_else(|| PathAlgError::NotInvertible(q.vertex_name(v).to_string()))?;
            for (a, &j) in cols.iter().enumerate() {
                for (b, &i) in rows.iter().enumerate() {
                    let x = PathElement::from_raw([(Path::trivial(v), inv[a][b].clone())]);
                    let idx = j * out.cols + i;
                    out.entries[idx] = out.entries[idx].add(&x);
                }
            }
        }
        out.row_tags = self.col_tags.clone();
        out.col_tags = self.row_tags.clone();
        Ok(out)
    }

    /// Inverse of `M` in the power-series matrices, known to degree `n`.
    ///
    /// Writes `M = E − C` with `E = ε(M)` and sums `Σ_k (E⁻¹C)^k E⁻¹`;
    /// since `ε(C) = 0`, terms with `k > n` vanish modulo paths longer than `n`.
    pub fn invert_eps_unit(&self, alg: &PathAlgebra, n: usize) -> Result<AlgMatrix, PathAlgError> {
        if !self.is_square() {
            return Err(PathAlgError::NonSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.degree.map_or(n, |d| d.min(n));
        let e_inv = self.eps_inverse(alg)?;
        let c = self.augmentation().sub(self)?;
        let step = e_inv.mul_bounded(&c, Some(n))?;
        let mut term = e_inv.truncated(n);
        let mut sum = term.clone();
        for _ in 0..n {
            term = step.mul_bounded(&term, Some(n))?;
            if term.is_zero() {
                break;
            }
            sum = sum.add(&term)?;
        }
        sum.row_tags = self.col_tags.clone();
        sum.col_tags = self.row_tags.clone();
        Ok(sum.truncated(n))
    }

    pub fn display(&self, alg: &PathAlgebra) -> String {
        let rows: Vec<String> = (0..self.rows)
            .map(|i| {
                let r: Vec<String> = (0..self.cols).map(|j| alg.display(self.get(i, j))).collect();
                format!("[{}]", r.join(", "))
            })
            .collect();
        format!("[{}]", rows.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::samples;

    fn rose() -> PathAlgebra {
        PathAlgebra::from_graph(&samples::rose2()).unwrap()
    }

    #[test]
    fn inverse_of_one_minus_loop() {
        let alg = rose();
        let e1 = alg.edge(alg.quiver().edge("e1").unwrap());
        let m = AlgMatrix::from_rows(vec![vec![alg.one().sub(&e1)]]).unwrap();
        let inv = m.invert_eps_unit(&alg, 4).unwrap();
        // 1 + e1 + e1² + e1³ + e1⁴
        assert_eq!(inv.get(0, 0).num_terms(), 5);
        let prod = m.mul(&inv).unwrap();
        assert!(prod.agrees_mod(&AlgMatrix::identity(&alg, 1), 4));
    }

    #[test]
    fn singular_augmentation_is_rejected() {
        let alg = rose();
        let e1 = alg.edge(alg.quiver().edge("e1").unwrap());
        let m = AlgMatrix::from_rows(vec![vec![alg.one().add(&e1), alg.one()], vec![alg.one(), alg.one()]]).unwrap();
        assert!(!m.is_invertible(&alg).unwrap());
        assert!(matches!(m.invert_eps_unit(&alg, 3), Err(PathAlgError::NotInvertible(_))));
        let rect = AlgMatrix::zero(1, 2);
        assert!(matches!(rect.is_invertible(&alg), Err(PathAlgError::NonSquare { .. })));
    }

    #[test]
    fn two_by_two_inverse() {
        let alg = rose();
        let q = alg.quiver();
        let (e1, e2) = (alg.edge(q.edge("e1").unwrap()), alg.edge(q.edge("e2").unwrap()));
        let two = alg.scale(&RatFn::from_i64(2), &alg.one()).unwrap();
        let m = AlgMatrix::from_rows(vec![vec![two, e1], vec![e2, alg.one()]]).unwrap();
        assert!(m.is_invertible(&alg).unwrap());
        let inv = m.invert_eps_unit(&alg, 5).unwrap();
        let id = AlgMatrix::identity(&alg, 2);
        assert!(m.mul(&inv).unwrap().agrees_mod(&id, 5));
        assert!(inv.mul(&m).unwrap().agrees_mod(&id, 5));
    }

    #[test]
    fn tagged_inverse_uses_vertex_blocks() {
        let alg = PathAlgebra::from_graph(&samples::toeplitz()).unwrap();
        let q = alg.quiver();
        let (u, v) = (q.vertex("u").unwrap(), q.vertex("v").unwrap());
        let f = alg.edge(q.edge("f").unwrap());
        // [[u, f], [0, v]] with tags (u, v)
        let m = AlgMatrix::from_rows(vec![
            vec![alg.vertex(u), f.clone()],
            vec![PathElement::zero(), alg.vertex(v)],
        ])
        .unwrap()
        .with_tags(vec![u, v], vec![u, v]);
        let inv = m.invert_eps_unit(&alg, 3).unwrap();
        assert_eq!(inv.get(0, 1), &f.neg());
        assert!(m.mul(&inv).unwrap().agrees_mod(&m.identity_like(&alg), 3));
    }

    #[test]
    fn lone_idempotent_needs_tags() {
        let alg = PathAlgebra::from_graph(&samples::toeplitz()).unwrap();
        let u = alg.quiver().vertex("u").unwrap();
        let m = AlgMatrix::diagonal(&[alg.vertex(u)]);
        // untagged, the identity is u + v, so [[u]] is singular
        assert!(!m.is_invertible(&alg).unwrap());
        let m = m.with_tags(vec![u], vec![u]);
        assert!(m.is_invertible(&alg).unwrap());
        let inv = m.invert_eps_unit(&alg, 3).unwrap();
        assert_eq!(inv.get(0, 0), &alg.vertex(u));
    }

    #[test]
    fn blocks_roundtrip() {
        let alg = rose();
        let id = AlgMatrix::identity(&alg, 2);
        let z = AlgMatrix::zero(2, 1);
        let zt = AlgMatrix::zero(1, 2);
        let one = AlgMatrix::identity(&alg, 1);
        let big = AlgMatrix::from_blocks(&[vec![&id, &z], vec![&zt, &one]]).unwrap();
        assert_eq!(big, AlgMatrix::identity(&alg, 3));
        assert_eq!(big.block(0..2, 0..2), id);
    }
}
