//! Rational series `λ(I − B)⁻¹ρ` and the factorization machinery behind
//! the rational closure: support splitting along a hereditary set, the
//! corner formula, the crossing-edge independence test and the recursive
//! membership certificate.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::pathalg::{AlgMatrix, PathAlgError, PathAlgebra, PathElement, SeriesTruncation};
use crate::quiver::{ClassId, EdgeId, Path, VertexId};
use crate::scalars::{rank, Monomial, Poly, RatFn, Var};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RatSeriesError {
    #[error("transition matrix has a nonzero constant term")]
    BadAugmentation,
    #[error("vertex set is not hereditary: `{0}` reaches outside it")]
    NotHereditary(String),
    #[error("corner formula disagrees with the direct corner mod degree {0}")]
    MismatchedCorner(usize),
    #[error("anchor mismatch: {0}")]
    AnchorMismatch(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error(transparent)]
    PathAlg(#[from] PathAlgError),
}

type Result<T> = std::result::Result<T, RatSeriesError>;

/// A linear representation `(λ, B, ρ)` of the series `λ(I − B)⁻¹ρ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinRep {
    lambda: AlgMatrix,
    trans: AlgMatrix,
    rho: AlgMatrix,
}

impl LinRep {
    pub fn new(lambda: AlgMatrix, trans: AlgMatrix, rho: AlgMatrix) -> Result<Self> {
        let n = trans.rows();
        if !trans.is_square() || lambda.rows() != 1 || lambda.cols() != n || rho.rows() != n || rho.cols() != 1 {
            return Err(RatSeriesError::Shape(format!(
                "λ {}×{}, B {}×{}, ρ {}×{}",
                lambda.rows(),
                lambda.cols(),
                trans.rows(),
                trans.cols(),
                rho.rows(),
                rho.cols()
            )));
        }
        if !trans.is_eps_zero() {
            return Err(RatSeriesError::BadAugmentation);
        }
        Ok(LinRep { lambda, trans, rho })
    }

    pub fn from_vecs(
        lambda: Vec<PathElement>,
        trans: Vec<Vec<PathElement>>,
        rho: Vec<PathElement>,
    ) -> Result<Self> {
        let n = lambda.len();
        let lambda = AlgMatrix::from_entries(1, n, lambda)?;
        let trans = if n == 0 {
            AlgMatrix::zero(0, 0)
        } else {
            AlgMatrix::from_rows(trans)?
        };
        let rho = AlgMatrix::from_entries(rho.len(), 1, rho)?;
        Self::new(lambda, trans, rho)
    }

    /// The zero series, of dimension 0.
    pub fn zero() -> Self {
        LinRep {
            lambda: AlgMatrix::zero(1, 0),
            trans: AlgMatrix::zero(0, 0),
            rho: AlgMatrix::zero(0, 1),
        }
    }

    /// A polynomial `c` as the 1-dimensional rep `(c, 0, 1)`.
    pub fn constant(alg: &PathAlgebra, c: PathElement) -> Self {
        LinRep {
            lambda: AlgMatrix::diagonal(&[c]),
            trans: AlgMatrix::zero(1, 1),
            rho: AlgMatrix::identity(alg, 1),
        }
    }

    /// `(1 − b)⁻¹` for a single element with `ε(b) = 0`.
    pub fn geometric(alg: &PathAlgebra, b: PathElement) -> Result<Self> {
        Self::new(
            AlgMatrix::identity(alg, 1),
            AlgMatrix::diagonal(&[b]),
            AlgMatrix::identity(alg, 1),
        )
    }

    pub fn dim(&self) -> usize {
        self.trans.rows()
    }

    pub fn lambda(&self) -> &AlgMatrix {
        &self.lambda
    }

    pub fn trans(&self) -> &AlgMatrix {
        &self.trans
    }

    pub fn rho(&self) -> &AlgMatrix {
        &self.rho
    }

    /// `λ·(Σ_{k≤N} B^k)·ρ` truncated at `N`; exact modulo paths longer than `N`.
    pub fn expand(&self, n: usize) -> SeriesTruncation {
        let bound = Some(n);
        let mut power = self.rho.truncated(n);
        let mut acc = power.clone();
        for _ in 0..n {
            power = self
                .trans
                .mul_bounded(&power, bound)
                .expect("shapes checked at construction");
            if power.is_zero() {
                break;
            }
            acc = acc.add(&power).expect("same shape");
        }
        let out = self.lambda.mul_bounded(&acc, bound).expect("shapes checked");
        let elem = if self.dim() == 0 {
            PathElement::zero()
        } else {
            out.get(0, 0).clone()
        };
        SeriesTruncation::new(&elem, n)
    }

    /// Drops states that are unreachable from `λ` or cannot reach `ρ`.
    pub fn trim(&self) -> LinRep {
        let n = self.dim();
        let mut fwd: Vec<bool> = (0..n).map(|i| !self.lambda.get(0, i).is_zero()).collect();
        let mut bwd: Vec<bool> = (0..n).map(|i| !self.rho.get(i, 0).is_zero()).collect();
        let mut changed = true;
        while changed {
            changed = false;
            for i in 0..n {
                for j in 0..n {
                    if self.trans.get(i, j).is_zero() {
                        continue;
                    }
                    if fwd[i] && !fwd[j] {
                        fwd[j] = true;
                        changed = true;
                    }
                    if bwd[j] && !bwd[i] {
                        bwd[i] = true;
                        changed = true;
                    }
                }
            }
        }
        let keep: Vec<usize> = (0..n).filter(|&i| fwd[i] && bwd[i]).collect();
        if keep.len() == n {
            return self.clone();
        }
        self.restrict_states(&keep)
    }

    fn restrict_states(&self, keep: &[usize]) -> LinRep {
        let m = keep.len();
        let mut lambda = AlgMatrix::zero(1, m);
        let mut trans = AlgMatrix::zero(m, m);
        let mut rho = AlgMatrix::zero(m, 1);
        for (a, &i) in keep.iter().enumerate() {
            lambda.set(0, a, self.lambda.get(0, i).clone());
            rho.set(a, 0, self.rho.get(i, 0).clone());
            for (b, &j) in keep.iter().enumerate() {
                trans.set(a, b, self.trans.get(i, j).clone());
            }
        }
        LinRep { lambda, trans, rho }
    }

    /// Applies `f` to every entry of `λ`, `B` and `ρ`.
    pub fn map_entries(&self, f: impl Fn(&PathElement) -> PathElement) -> LinRep {
        LinRep {
            lambda: self.lambda.map(&f),
            trans: self.trans.map(&f),
            rho: self.rho.map(&f),
        }
    }

    /// Corner `p x p` for an idempotent `p = Σ_{v∈S} v` with `S` hereditary.
    pub fn corner(&self, p: &PathElement) -> LinRep {
        self.map_entries(|a| p.mul(a).mul(p)).trim()
    }

    pub fn display(&self, alg: &PathAlgebra) -> String {
        format!(
            "λ = {}, B = {}, ρ = {}",
            self.lambda.display(alg),
            self.trans.display(alg),
            self.rho.display(alg)
        )
    }
}

/// Block-diagonal sum: expands to the sum of the expansions.
pub fn rep_add(r1: &LinRep, r2: &LinRep) -> LinRep {
    let (n1, n2) = (r1.dim(), r2.dim());
    let lambda = AlgMatrix::from_blocks(&[vec![&r1.lambda, &r2.lambda]]).expect("row blocks");
    let trans = AlgMatrix::from_blocks(&[
        vec![&r1.trans, &AlgMatrix::zero(n1, n2)],
        vec![&AlgMatrix::zero(n2, n1), &r2.trans],
    ])
    .expect("diagonal blocks");
    let rho = AlgMatrix::from_blocks(&[vec![&r1.rho], vec![&r2.rho]]).expect("column blocks");
    LinRep { lambda, trans, rho }
}

/// Negation of the series.
pub fn rep_neg(r: &LinRep) -> LinRep {
    LinRep {
        lambda: r.lambda.neg(),
        ..r.clone()
    }
}

/// Product of two series.
///
/// Uses `λ = (λ₁ 0)`, `B = [[B₁, ρ₁λ₂B₂], [0, B₂]]`, `ρ = (ρ₁λ₂ρ₂; ρ₂)`.
/// The cross block `ρ₁λ₂B₂` (rather than `ρ₁λ₂`) keeps `ε(B) = 0`.
pub fn rep_mul(r1: &LinRep, r2: &LinRep) -> LinRep {
    let (n1, n2) = (r1.dim(), r2.dim());
    let joint = r1.rho.mul(&r2.lambda).expect("n1×1 · 1×n2");
    let cross = joint.mul(&r2.trans).expect("n1×n2 · n2×n2");
    let top = joint.mul(&r2.rho).expect("n1×n2 · n2×1");
    let lambda = AlgMatrix::from_blocks(&[vec![&r1.lambda, &AlgMatrix::zero(1, n2)]]).expect("row");
    let trans = AlgMatrix::from_blocks(&[
        vec![&r1.trans, &cross],
        vec![&AlgMatrix::zero(n2, n1), &r2.trans],
    ])
    .expect("blocks");
    let rho = AlgMatrix::from_blocks(&[vec![&top], vec![&r2.rho]]).expect("column");
    LinRep { lambda, trans, rho }.trim()
}

/// Exact inverse of `p` in the corner `p_S P p_S`, with `S` the vertices
/// where `ε(p)` is nonzero: `p = E − C` gives `p⁻¹ = p_S(1 − E⁻¹C)⁻¹E⁻¹`.
pub fn invert_element(alg: &PathAlgebra, p: &PathElement) -> Result<LinRep> {
    let eps = alg.augment(p);
    let support: BTreeSet<VertexId> = eps.components.keys().copied().collect();
    let q = alg.quiver();
    if let Some((path, _)) = p
        .terms()
        .find(|(path, _)| !support.contains(&path.source()) || !support.contains(&path.range()))
    {
        return Err(RatSeriesError::PathAlg(PathAlgError::NotInvertible(
            q.vertex_name(if support.contains(&path.source()) { path.range() } else { path.source() })
                .to_string(),
        )));
    }
    let e_inv = PathElement::from_raw(eps.components.iter().map(|(&v, c)| {
        (Path::trivial(v), c.inv().expect("augmentation support is nonzero"))
    }));
    let c = alg.augmentation_element(p).sub(p);
    LinRep::new(
        AlgMatrix::diagonal(&[alg.idempotent(support)]),
        AlgMatrix::diagonal(&[e_inv.mul(&c)]),
        AlgMatrix::diagonal(&[e_inv]),
    )
}

fn check_hereditary(alg: &PathAlgebra, h: &BTreeSet<VertexId>) -> Result<()> {
    let q = alg.quiver();
    for &v in h {
        for &e in q.out_edges(v) {
            if !h.contains(&q.range(e)) {
                return Err(RatSeriesError::NotHereditary(q.vertex_name(v).to_string()));
            }
        }
    }
    Ok(())
}

/// `B = B₁ + B₂` by range of each path, and `B₂ = B₂′ + B₂″` by source.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportSplit {
    pub hereditary: BTreeSet<VertexId>,
    /// Paths ending outside `H`.
    pub outside: AlgMatrix,
    /// Paths ending in `H`.
    pub inside: AlgMatrix,
    /// Part of `inside` whose paths start outside `H` (crossing into it).
    pub crossing: AlgMatrix,
    /// Part of `inside` whose paths start in `H`.
    pub within: AlgMatrix,
}

impl SupportSplit {
    /// `B₂B₁ = 0`, `(B₂′)² = 0` and `B₂″B₂′ = 0`, all exactly.
    pub fn orthogonality_holds(&self) -> bool {
        let z = |m: AlgMatrix| m.is_zero();
        z(self.inside.mul(&self.outside).expect("square"))
            && z(self.crossing.mul(&self.crossing).expect("square"))
            && z(self.within.mul(&self.crossing).expect("square"))
    }

    /// `B = B₁ + B₂` and `B₂ = B₂′ + B₂″`.
    pub fn recombines_to(&self, b: &AlgMatrix) -> bool {
        let sum = self.outside.add(&self.inside).expect("square");
        let inner = self.crossing.add(&self.within).expect("square");
        &sum == b && inner == self.inside
    }
}

pub fn split_by_hereditary(
    alg: &PathAlgebra,
    b: &AlgMatrix,
    h: &BTreeSet<VertexId>,
) -> Result<SupportSplit> {
    check_hereditary(alg, h)?;
    if !b.is_eps_zero() {
        return Err(RatSeriesError::BadAugmentation);
    }
    let ends_in = |p: &Path| h.contains(&p.range());
    let starts_in = |p: &Path| h.contains(&p.source());
    let outside = b.map(|x| x.filter(|p| !ends_in(p)));
    let inside = b.map(|x| x.filter(|p| ends_in(p)));
    let crossing = inside.map(|x| x.filter(|p| !starts_in(p)));
    let within = inside.map(|x| x.filter(|p| starts_in(p)));
    Ok(SupportSplit {
        hereditary: h.clone(),
        outside,
        inside,
        crossing,
        within,
    })
}

fn one_minus(alg: &PathAlgebra, b: &AlgMatrix) -> AlgMatrix {
    AlgMatrix::identity(alg, b.rows()).sub(b).expect("square")
}

/// `(I − B)⁻¹` modulo paths longer than `n`.
pub fn inverse_one_minus(alg: &PathAlgebra, b: &AlgMatrix, n: usize) -> Result<AlgMatrix> {
    if !b.is_eps_zero() {
        return Err(RatSeriesError::BadAugmentation);
    }
    Ok(one_minus(alg, b).invert_eps_unit(alg, n)?)
}

/// Checks `(I−B)⁻¹ = (I−B₁)⁻¹(I−B₂)⁻¹` and
/// `(I−B)⁻¹ = (I−B₁)⁻¹ + (I−B₁)⁻¹B₂(I−B₂)⁻¹`, both mod degree `n`.
pub fn check_inverse_factorization(
    alg: &PathAlgebra,
    b: &AlgMatrix,
    h: &BTreeSet<VertexId>,
    n: usize,
) -> Result<bool> {
    let split = split_by_hereditary(alg, b, h)?;
    let whole = inverse_one_minus(alg, b, n)?;
    let s1 = inverse_one_minus(alg, &split.outside, n)?;
    let s2 = inverse_one_minus(alg, &split.inside, n)?;
    let product = s1.mul(&s2)?;
    let expanded = s1.add(&s1.mul(&split.inside)?.mul(&s2)?)?;
    Ok(whole.agrees_mod(&product, n) && whole.agrees_mod(&expanded, n))
}

/// Evaluates `p_Hλp_H·p_Hρp_H + p_Hλp_H·p_H B₂ p_H·(I−B₂″)⁻¹·p_Hρp_H` mod `n`
/// and checks it against the direct corner `p_H·x·p_H`.
pub fn corner_formula(
    alg: &PathAlgebra,
    x: &LinRep,
    h: &BTreeSet<VertexId>,
    n: usize,
) -> Result<SeriesTruncation> {
    let split = split_by_hereditary(alg, &x.trans, h)?;
    let p = alg.idempotent(h.iter().copied());
    let sandwich = |m: &AlgMatrix| m.map(|a| p.mul(a).mul(&p));
    let lam = sandwich(&x.lambda);
    let rho = sandwich(&x.rho);
    let b2 = sandwich(&split.inside);
    let inner = inverse_one_minus(alg, &split.within, n)?;
    let rhs = if x.dim() == 0 {
        PathElement::zero()
    } else {
        let direct = lam.mul_bounded(&rho, Some(n))?;
        let through = lam
            .mul_bounded(&b2, Some(n))?
            .mul_bounded(&inner, Some(n))?
            .mul_bounded(&rho, Some(n))?;
        direct.add(&through)?.get(0, 0).clone()
    };
    let rhs = SeriesTruncation::new(&rhs, n);
    let full = x.expand(n);
    let lhs = SeriesTruncation::new(&p.mul(full.element()).mul(&p), n);
    if lhs != rhs {
        return Err(RatSeriesError::MismatchedCorner(n));
    }
    Ok(rhs)
}

/// Outcome of the crossing-edge independence test.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CrossingCheck {
    /// Some `a_i·e` is nonzero.
    pub applicable: bool,
    /// The `b_i` are linearly independent over the root field (mod `N`).
    pub independent: bool,
    /// `Σ a_i e b_i ≠ 0` mod `N`.
    pub nonzero: bool,
}

impl CrossingCheck {
    /// The reported value: nonzero, and `false` when nothing applies.
    pub fn value(&self) -> bool {
        self.applicable && self.nonzero
    }

    /// Independence together with a nonzero `a_i·e` forces a nonzero sum.
    pub fn consistent(&self) -> bool {
        !(self.applicable && self.independent) || self.nonzero
    }
}

/// Rank over `ℚ(root_vars)` of a matrix whose entries may involve further
/// variables: clear one common denominator, then split every numerator by
/// monomials in the non-root variables.
pub fn rank_over_subfield(rows: &[Vec<RatFn>], root_vars: &BTreeSet<Var>) -> usize {
    let mut den = Poly::one();
    for c in rows.iter().flatten() {
        if c.is_zero() || c.denom().is_one() {
            continue;
        }
        let g = den.gcd(c.denom());
        den = den.mul(&c.denom().div_exact(&g).expect("gcd divides"));
    }
    let den = RatFn::from_poly(den);
    let mut cols: BTreeSet<(usize, Monomial)> = BTreeSet::new();
    let mut split_rows: Vec<BTreeMap<(usize, Monomial), Poly>> = Vec::new();
    for row in rows {
        let mut out: BTreeMap<(usize, Monomial), Poly> = BTreeMap::new();
        for (j, c) in row.iter().enumerate() {
            let num = c * &den;
            debug_assert!(num.is_polynomial());
            for (m, coef) in num.numer().terms() {
                let (inner, outer): (Vec<_>, Vec<_>) =
                    m.pairs().iter().partition(|(v, _)| root_vars.contains(v));
                let key = (j, Monomial::from_pairs(outer));
                let part = Poly::monomial(Monomial::from_pairs(inner), coef.clone());
                let slot = out.entry(key.clone()).or_insert_with(Poly::zero);
                *slot = slot.add(&part);
                cols.insert(key);
            }
        }
        split_rows.push(out);
    }
    let matrix: Vec<Vec<RatFn>> = split_rows
        .iter()
        .map(|r| {
            cols.iter()
                .map(|k| r.get(k).cloned().map(RatFn::from_poly).unwrap_or_default())
                .collect()
        })
        .collect();
    rank(&matrix)
}

/// Tests `Σ a_i e b_i ≠ 0` for a crossing edge `e`.
///
/// The `b_i` must start at `r(e)`; they are compared modulo paths longer
/// than `n`, and their independence is measured over the root field.
pub fn crossing_independence_check(
    alg: &PathAlgebra,
    e: EdgeId,
    a: &[PathElement],
    b: &[SeriesTruncation],
    n: usize,
) -> Result<CrossingCheck> {
    let q = alg.quiver();
    if a.len() != b.len() {
        return Err(RatSeriesError::AnchorMismatch(format!(
            "{} left factors but {} right factors",
            a.len(),
            b.len()
        )));
    }
    let anchor = q.range(e);
    for bi in b {
        if let Some((p, _)) = bi.element().terms().find(|(p, _)| p.source() != anchor) {
            return Err(RatSeriesError::AnchorMismatch(format!(
                "`{}` does not start at `{}`",
                p.display(q),
                q.vertex_name(anchor)
            )));
        }
    }
    let edge = alg.edge(e);
    let ae: Vec<PathElement> = a.iter().map(|x| x.mul(&edge)).collect();
    let applicable = ae.iter().any(|x| !x.is_zero());
    let n = b.iter().map(SeriesTruncation::degree).fold(n, usize::min);
    let mut sum = PathElement::zero();
    for (x, y) in ae.iter().zip(b) {
        sum = sum.add(&x.mul(y.element()));
    }
    // Every path of a_i·e has length ≥ 1, so b_i mod N contributes exactly mod N+1.
    let nonzero = !sum.truncated(n + 1).is_zero();
    let support: BTreeSet<&Path> = b.iter().flat_map(|y| y.element().terms().map(|(p, _)| p)).collect();
    let coeffs: Vec<Vec<RatFn>> = b
        .iter()
        .map(|y| support.iter().map(|p| y.element().coefficient(p)).collect())
        .collect();
    let root_vars = alg.tower().vars_of(alg.tower().root()).clone();
    let independent = rank_over_subfield(&coeffs, &root_vars) == b.len();
    Ok(CrossingCheck {
        applicable,
        independent,
        nonzero,
    })
}

/// Shape of a series relative to the root component.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SummandKind {
    /// Supported on paths inside the root component.
    RootOnly,
    /// Has paths leaving the root component.
    Mixed,
    /// Supported on paths below the root component.
    LowerOnly,
    Zero,
}

/// The decomposition `x = λ(I−B₁)⁻¹ρ + λ(I−B₁)⁻¹B₂(I−B₂)⁻¹ρ` at a class,
/// with the corners on each lower cover decomposed recursively.
#[derive(Clone, Debug)]
pub struct PratCertificate {
    pub class: ClassId,
    pub kind: SummandKind,
    pub depth: usize,
    /// `λ(I−B₁)⁻¹ρ`.
    pub upper: LinRep,
    /// `λ(I−B₁)⁻¹B₂(I−B₂)⁻¹ρ`.
    pub mixed: LinRep,
    /// Corners `p_k x p_k` for each lower cover `k`.
    pub children: Vec<PratCertificate>,
}

impl PratCertificate {
    /// Classes visited, in recursion order.
    pub fn classes(&self) -> Vec<ClassId> {
        let mut out = vec![self.class];
        for c in &self.children {
            out.extend(c.classes());
        }
        out
    }
}

/// Decomposes `x` along the tree of components, down from the root.
pub fn prat_membership_certificate(alg: &PathAlgebra, x: &LinRep, n: usize) -> Result<PratCertificate> {
    let root = alg.poset().assert_tree().map_err(PathAlgError::from)?;
    certificate_at(alg, x, root, n)
}

fn certificate_at(alg: &PathAlgebra, x: &LinRep, class: ClassId, n: usize) -> Result<PratCertificate> {
    let poset = alg.poset();
    let own: BTreeSet<VertexId> = poset.members(class).iter().copied().collect();
    let below: BTreeSet<VertexId> = poset
        .lower_set(class)
        .into_iter()
        .filter(|&c| c != class)
        .flat_map(|c| poset.members(c).iter().copied())
        .collect();
    let split = split_by_hereditary(alg, &x.trans, &below)?;
    let upper = LinRep {
        lambda: x.lambda.clone(),
        trans: split.outside.clone(),
        rho: x.rho.clone(),
    }
    .trim();
    let m = x.dim();
    let mixed = LinRep {
        lambda: AlgMatrix::from_blocks(&[vec![&x.lambda, &AlgMatrix::zero(1, m)]])?,
        trans: AlgMatrix::from_blocks(&[
            vec![&split.outside, &split.inside],
            vec![&AlgMatrix::zero(m, m), &split.inside],
        ])?,
        rho: AlgMatrix::from_blocks(&[vec![&AlgMatrix::zero(m, 1)], vec![&x.rho]])?,
    }
    .trim();

    let mut children = Vec::new();
    for k in poset.lower_covers(class) {
        let verts: Vec<VertexId> = poset
            .lower_set(k)
            .into_iter()
            .flat_map(|c| poset.members(c).iter().copied())
            .collect();
        let p = alg.idempotent(verts);
        children.push(certificate_at(alg, &x.corner(&p), k, n)?);
    }

    let support = x.expand(n);
    let kind = if support.is_zero() {
        SummandKind::Zero
    } else {
        let inside_own = |p: &Path| own.contains(&p.source()) && own.contains(&p.range());
        let inside_below = |p: &Path| below.contains(&p.source());
        let terms: Vec<&Path> = support.element().terms().map(|(p, _)| p).collect();
        if terms.iter().all(|p| inside_own(p)) {
            SummandKind::RootOnly
        } else if terms.iter().all(|p| inside_below(p)) {
            SummandKind::LowerOnly
        } else {
            SummandKind::Mixed
        }
    };
    let child_depth = children
        .iter()
        .filter(|c| c.kind != SummandKind::Zero)
        .map(|c| c.depth + 1)
        .max()
        .unwrap_or(0);
    let depth = child_depth.max(usize::from(kind == SummandKind::Mixed));
    Ok(PratCertificate {
        class,
        kind,
        depth,
        upper,
        mixed,
        children,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::samples;

    struct T {
        alg: PathAlgebra,
        u: VertexId,
        v: VertexId,
        alpha: PathElement,
        beta: PathElement,
        f: PathElement,
        xu: RatFn,
        xv: RatFn,
    }

    fn t() -> T {
        let alg = PathAlgebra::from_graph(&samples::toeplitz()).unwrap();
        let q = alg.quiver().clone();
        let xu = RatFn::var(alg.poset().class_by_name("u").unwrap() as u32);
        let xv = RatFn::var(alg.poset().class_by_name("v").unwrap() as u32);
        T {
            u: q.vertex("u").unwrap(),
            v: q.vertex("v").unwrap(),
            alpha: alg.edge(q.edge("alpha").unwrap()),
            beta: alg.edge(q.edge("beta").unwrap()),
            f: alg.edge(q.edge("f").unwrap()),
            alg,
            xu,
            xv,
        }
    }

    fn sc(t: &T, c: &RatFn, a: &PathElement) -> PathElement {
        t.alg.scale(c, a).unwrap()
    }

    #[test]
    fn geometric_expansion() {
        let t = t();
        let u = t.alg.vertex(t.u);
        let r = LinRep::from_vecs(vec![u.clone()], vec![vec![sc(&t, &t.xu, &t.alpha)]], vec![u.clone()]).unwrap();
        let a2 = t.alpha.mul(&t.alpha);
        let expected = u
            .add(&sc(&t, &t.xu, &t.alpha))
            .add(&sc(&t, &t.xu.pow(2), &a2));
        assert_eq!(r.expand(2).element(), &expected);

        let plain = LinRep::from_vecs(vec![u], vec![vec![PathElement::zero()]], vec![t.f.clone()]).unwrap();
        assert_eq!(plain.expand(5).element(), &t.f);
    }

    #[test]
    fn bad_augmentation_rejected() {
        let t = t();
        let u = t.alg.vertex(t.u);
        let r = LinRep::from_vecs(vec![u.clone()], vec![vec![u.clone()]], vec![u]);
        assert_eq!(r.unwrap_err(), RatSeriesError::BadAugmentation);
    }

    #[test]
    fn sum_and_product_reps() {
        let t = t();
        let u = t.alg.vertex(t.u);
        let geo = LinRep::from_vecs(vec![u.clone()], vec![vec![sc(&t, &t.xu, &t.alpha)]], vec![u.clone()]).unwrap();
        let plain = LinRep::from_vecs(vec![u.clone()], vec![vec![PathElement::zero()]], vec![t.f.clone()]).unwrap();
        let a2 = t.alpha.mul(&t.alpha);
        let sum = rep_add(&geo, &plain).expand(2);
        let expected = u
            .add(&t.f)
            .add(&sc(&t, &t.xu, &t.alpha))
            .add(&sc(&t, &t.xu.pow(2), &a2));
        assert_eq!(sum.element(), &expected);

        let sq = rep_mul(&geo, &geo).expand(2);
        let expected = u
            .add(&sc(&t, &(&RatFn::from_i64(2) * &t.xu), &t.alpha))
            .add(&sc(&t, &(&RatFn::from_i64(3) * &t.xu.pow(2)), &a2));
        assert_eq!(sq.element(), &expected);
        assert!(rep_mul(&geo, &LinRep::zero()).expand(4).is_zero());
        assert!(rep_mul(&geo, &geo).trans().is_eps_zero());
    }

    fn t_matrix(t: &T) -> AlgMatrix {
        AlgMatrix::from_rows(vec![
            vec![sc(t, &t.xu, &t.alpha), t.f.clone()],
            vec![PathElement::zero(), t.beta.clone()],
        ])
        .unwrap()
    }

    #[test]
    fn split_on_toeplitz() {
        let t = t();
        let b = t_matrix(&t);
        let h: BTreeSet<_> = [t.v].into();
        let s = split_by_hereditary(&t.alg, &b, &h).unwrap();
        assert_eq!(s.outside.get(0, 0), b.get(0, 0));
        assert!(s.outside.get(0, 1).is_zero());
        assert_eq!(s.inside.get(0, 1), &t.f);
        assert_eq!(s.inside.get(1, 1), &t.beta);
        assert_eq!(s.crossing.get(0, 1), &t.f);
        assert!(s.orthogonality_holds());
        assert!(s.recombines_to(&b));
        assert!(check_inverse_factorization(&t.alg, &b, &h, 5).unwrap());

        let bad: BTreeSet<_> = [t.u].into();
        assert!(matches!(split_by_hereditary(&t.alg, &b, &bad), Err(RatSeriesError::NotHereditary(_))));

        let all: BTreeSet<_> = [t.u, t.v].into();
        let s = split_by_hereditary(&t.alg, &b, &all).unwrap();
        assert!(s.outside.is_zero());
        assert_eq!(s.inside, b);
    }

    #[test]
    fn corner_on_toeplitz() {
        let t = t();
        let b = t_matrix(&t);
        let x = LinRep::new(
            AlgMatrix::from_rows(vec![vec![t.alg.vertex(t.u), PathElement::zero()]]).unwrap(),
            b.clone(),
            AlgMatrix::from_rows(vec![vec![PathElement::zero()], vec![t.alg.vertex(t.v)]]).unwrap(),
        )
        .unwrap();
        let h: BTreeSet<_> = [t.v].into();
        let c = corner_formula(&t.alg, &x, &h, 4).unwrap();
        // x starts at u, so its corner at v vanishes
        assert!(c.is_zero());
        assert!(corner_formula(&t.alg, &x, &BTreeSet::new(), 4).unwrap().is_zero());

        let y = LinRep::from_vecs(
            vec![t.alg.vertex(t.v)],
            vec![vec![sc(&t, &t.xv, &t.beta)]],
            vec![t.alg.vertex(t.v)],
        )
        .unwrap();
        assert_eq!(corner_formula(&t.alg, &y, &h, 4).unwrap(), y.expand(4));
    }

    #[test]
    fn crossing_examples() {
        let t = t();
        let fe = t.alg.quiver().edge("f").unwrap();
        let u = t.alg.vertex(t.u);
        let v = t.alg.vertex(t.v);
        let r = t.alg.check_element(&u);
        assert!(r.is_ok());
        let one = crossing_independence_check(&t.alg, fe, &[u.clone()], &[SeriesTruncation::new(&v, 4)], 4).unwrap();
        assert!(one.value() && one.independent);

        let xv_v = sc(&t, &t.xv, &v);
        let two = crossing_independence_check(
            &t.alg,
            fe,
            &[u.clone(), u.neg()],
            &[SeriesTruncation::new(&v, 4), SeriesTruncation::new(&xv_v, 4)],
            4,
        )
        .unwrap();
        assert!(two.independent && two.value() && two.consistent());

        let none = crossing_independence_check(&t.alg, fe, &[PathElement::zero()], &[SeriesTruncation::new(&v, 4)], 4).unwrap();
        assert!(!none.applicable && !none.value());

        let wrong = crossing_independence_check(&t.alg, fe, &[u.clone()], &[SeriesTruncation::new(&u, 4)], 4);
        assert!(matches!(wrong, Err(RatSeriesError::AnchorMismatch(_))));
    }

    #[test]
    fn rank_over_root_field() {
        // x1 is not in the root field ℚ(x0): (1, x1) has rank 2 as a column pair
        let root: BTreeSet<Var> = [0].into();
        let rows = vec![vec![RatFn::one()], vec![RatFn::var(1)]];
        assert_eq!(rank_over_subfield(&rows, &root), 2);
        let rows = vec![vec![RatFn::one()], vec![RatFn::var(0)]];
        assert_eq!(rank_over_subfield(&rows, &root), 1);
        let half = RatFn::one().div(&RatFn::var(1)).unwrap();
        let rows = vec![vec![half.clone(), RatFn::one()], vec![&half * &RatFn::var(0), RatFn::var(0)]];
        assert_eq!(rank_over_subfield(&rows, &root), 1);
    }

    #[test]
    fn certificates() {
        let t = t();
        let u = t.alg.vertex(t.u);
        let v = t.alg.vertex(t.v);
        let geo_u = LinRep::geometric(&t.alg, sc(&t, &t.xu, &t.alpha)).unwrap();
        let c = prat_membership_certificate(&t.alg, &rep_mul(&LinRep::constant(&t.alg, u.clone()), &geo_u), 6).unwrap();
        assert_eq!(c.kind, SummandKind::RootOnly);
        assert_eq!(c.depth, 0);

        let geo_v = LinRep::geometric(&t.alg, sc(&t, &t.xv, &t.beta)).unwrap();
        let x = rep_mul(&rep_mul(&geo_u, &LinRep::constant(&t.alg, t.f.clone())), &geo_v);
        let c = prat_membership_certificate(&t.alg, &x, 6).unwrap();
        assert_eq!(c.kind, SummandKind::Mixed);
        assert_eq!(c.depth, 1);
        let recombined = c.upper.expand(6).add(&c.mixed.expand(6));
        assert!(recombined.agrees_with(&x.expand(6)));

        let in_h = rep_mul(&LinRep::constant(&t.alg, v), &geo_v);
        let c = prat_membership_certificate(&t.alg, &in_h, 6).unwrap();
        assert_eq!(c.kind, SummandKind::LowerOnly);
        assert_eq!(c.children[0].kind, SummandKind::RootOnly);
    }
}
