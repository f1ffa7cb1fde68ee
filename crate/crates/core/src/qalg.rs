//! The regular algebra `Q_K(E)`: elements `Σ a_γ γ*` with rational series
//! coefficients, multiplied through the skew rule `e*·b = τ_e(b)e* + δ̃_e(b)`.
//! Also inversion of free-loop polynomials and the `Σ′` reduction.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::leavitt::{LeavittAlgebra, LeavittElement, RelationReport};
use crate::pathalg::{AlgMatrix, PathAlgError, PathAlgebra, PathElement};
use crate::quiver::{ClassId, EdgeId, Path, VertexId};
use crate::ratseries::{invert_element, rep_add, rep_mul, rep_neg, LinRep, RatSeriesError};
use crate::scalars::RatFn;

/// Default truncation degree for coefficient comparisons.
pub const DEFAULT_DEGREE: usize = 8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QAlgError {
    #[error("polynomial has zero constant term")]
    ZeroConstantTerm,
    #[error("component of `{0}` is not a single vertex with a single loop")]
    NotFreeLoopComponent(String),
    #[error("`{0}` is not a polynomial in the loop at `{1}`")]
    NotInCorner(String, String),
    #[error("coefficient of ghost path `{0}` is not anchored at its range")]
    Anchor(String),
    #[error(transparent)]
    RatSeries(#[from] RatSeriesError),
    #[error(transparent)]
    PathAlg(#[from] PathAlgError),
}

type Result<T> = std::result::Result<T, QAlgError>;

/// `Σ a_γ γ*` with each `a_γ` a rational series ending at `r(γ)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct QElement {
    terms: BTreeMap<Path, LinRep>,
}

impl QElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Path, &LinRep)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Structurally empty; use [`QAlgebra::is_zero_mod`] for value tests.
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, ghost: &Path) -> Option<&LinRep> {
        self.terms.get(ghost)
    }

    /// Adds `a·ghost*`.
    pub fn add_term(&mut self, ghost: Path, a: LinRep) {
        let a = a.trim();
        if a.dim() == 0 {
            return;
        }
        let merged = match self.terms.remove(&ghost) {
            Some(b) => rep_add(&b, &a).trim(),
            None => a,
        };
        if merged.dim() > 0 {
            self.terms.insert(ghost, merged);
        }
    }

    pub fn add(&self, other: &QElement) -> QElement {
        let mut out = self.clone();
        for (g, a) in &other.terms {
            out.add_term(g.clone(), a.clone());
        }
        out
    }

    pub fn neg(&self) -> QElement {
        QElement {
            terms: self.terms.iter().map(|(g, a)| (g.clone(), rep_neg(a))).collect(),
        }
    }

    pub fn sub(&self, other: &QElement) -> QElement {
        self.add(&other.neg())
    }

    /// Largest coefficient dimension, a rough size measure.
    pub fn max_dim(&self) -> usize {
        self.terms.values().map(LinRep::dim).max().unwrap_or(0)
    }
}

/// `δ̃_e(λ(I−B)⁻¹ρ) = [δ̃_e(λ) + τ_e(λ)δ̃_e(B)](I−B)⁻¹ρ + τ_e(λ)δ̃_e(ρ)`.
///
/// Keeps `B` and `ρ`; the last summand becomes a 1-dimensional constant block.
pub fn transduce_rep(alg: &PathAlgebra, e: EdgeId, r: &LinRep) -> Result<LinRep> {
    if !r.trans().is_eps_zero() {
        return Err(RatSeriesError::BadAugmentation.into());
    }
    let n = r.dim();
    if n == 0 {
        return Ok(LinRep::zero());
    }
    let strip = |m: &AlgMatrix| m.map(|a| alg.transduce_exact(e, a));
    let tau_lambda = r.lambda().map(|a| alg.tau_exact(e, a));
    let lambda = strip(r.lambda()).add(&tau_lambda.mul(&strip(r.trans()))?)?;
    let main = LinRep::new(lambda, r.trans().clone(), r.rho().clone())?;
    let correction = tau_lambda.mul(&strip(r.rho()))?.get(0, 0).clone();
    if correction.is_zero() {
        return Ok(main.trim());
    }
    Ok(rep_add(&main, &LinRep::constant(alg, correction)).trim())
}

/// `τ_e(a) = ε(a)_{s(e)}·r(e)` for a series.
fn tau_rep(alg: &PathAlgebra, e: EdgeId, r: &LinRep) -> PathElement {
    alg.tau_exact(e, r.expand(0).element())
}

/// Decomposition `A = A₀ + B + ΣA_k` relative to a class of the tree.
#[derive(Clone, Debug)]
pub struct SigmaPrimeDecomposition {
    pub class: ClassId,
    pub whole: AlgMatrix,
    /// Paths inside the top component.
    pub top: AlgMatrix,
    /// Paths leaving the top component.
    pub descending: AlgMatrix,
    /// One part per lower cover, each with its own decomposition.
    pub lower: Vec<SigmaPrimeDecomposition>,
}

impl SigmaPrimeDecomposition {
    fn lower_sum(&self) -> AlgMatrix {
        self.lower
            .iter()
            .fold(AlgMatrix::zero(self.whole.rows(), self.whole.cols()), |acc, d| {
                acc.add(&d.whole).expect("same shape")
            })
    }

    /// `A = A₀ + B + ΣA_k`, all parts ε-zero, and
    /// `(B + ΣA_k)A₀ = 0`, `(ΣA_k)B = 0`, `A_kA_k′ = 0`, `B² = 0`; recursively.
    pub fn identities_hold(&self) -> bool {
        let lower = self.lower_sum();
        let parts = self.top.add(&self.descending).and_then(|s| s.add(&lower));
        if parts.as_ref() != Ok(&self.whole) {
            return false;
        }
        let eps_ok = self.top.is_eps_zero() && self.descending.is_eps_zero() && lower.is_eps_zero();
        let z = |a: &AlgMatrix, b: &AlgMatrix| a.mul(b).map(|m| m.is_zero()).unwrap_or(false);
        let below = self.descending.add(&lower).expect("same shape");
        let mut ok = eps_ok
            && z(&below, &self.top)
            && z(&lower, &self.descending)
            && z(&self.descending, &self.descending);
        for (i, a) in self.lower.iter().enumerate() {
            for (j, b) in self.lower.iter().enumerate() {
                if i != j {
                    ok &= z(&a.whole, &b.whole);
                }
            }
            ok &= a.identities_hold();
        }
        ok
    }
}

/// `Q_K(E)` as normal forms over a path algebra.
#[derive(Clone, Debug)]
pub struct QAlgebra {
    base: PathAlgebra,
    leavitt: LeavittAlgebra,
}

impl QAlgebra {
    pub fn new(base: PathAlgebra) -> Self {
        QAlgebra {
            leavitt: LeavittAlgebra::new(base.clone()),
            base,
        }
    }

    pub fn base(&self) -> &PathAlgebra {
        &self.base
    }

    pub fn leavitt(&self) -> &LeavittAlgebra {
        &self.leavitt
    }

    fn single(&self, ghost: Path, a: PathElement) -> QElement {
        let mut out = QElement::zero();
        out.add_term(ghost, LinRep::constant(&self.base, a));
        out
    }

    pub fn vertex(&self, v: VertexId) -> QElement {
        self.single(Path::trivial(v), self.base.vertex(v))
    }

    pub fn edge(&self, e: EdgeId) -> QElement {
        let r = self.base.quiver().range(e);
        self.single(Path::trivial(r), self.base.edge(e))
    }

    pub fn ghost(&self, e: EdgeId) -> QElement {
        let q = self.base.quiver();
        self.single(Path::edge(q, e), self.base.vertex(q.range(e)))
    }

    pub fn one(&self) -> QElement {
        (0..self.base.quiver().num_vertices())
            .map(|v| self.vertex(v))
            .fold(QElement::zero(), |a, b| a.add(&b))
    }

    /// `γμ* ↦ {μ: cγ}`.
    pub fn from_leavitt(&self, x: &LeavittElement) -> QElement {
        let mut out = QElement::zero();
        for ((g, m), c) in x.terms() {
            out.add_term(m.clone(), LinRep::constant(&self.base, self.base.path(g.clone()).scale_raw(c)));
        }
        out
    }

    pub fn from_path_element(&self, a: &PathElement) -> QElement {
        self.from_leavitt(&self.leavitt.from_path_element(a))
    }

    /// A series `a` as `Σ_v (a·v) v*`.
    pub fn from_series(&self, a: &LinRep) -> QElement {
        let mut out = QElement::zero();
        for v in 0..self.base.quiver().num_vertices() {
            let pv = self.base.vertex(v);
            let av = LinRep::new(a.lambda().clone(), a.trans().clone(), a.rho().map(|x| x.mul(&pv)))
                .expect("same shape");
            out.add_term(Path::trivial(v), av);
        }
        out
    }

    /// Checks that every coefficient ends at the range of its ghost path (mod `n`).
    pub fn check_anchoring(&self, x: &QElement, n: usize) -> Result<()> {
        for (g, a) in x.terms() {
            if a.expand(n).element().terms().any(|(p, _)| p.range() != g.range()) {
                return Err(QAlgError::Anchor(g.display(self.base.quiver())));
            }
        }
        Ok(())
    }

    /// `e*·(b μ*) = τ_e(b)(μe)* + δ̃_e(b) μ*`.
    fn ghost_times(&self, e: EdgeId, y: &QElement) -> Result<QElement> {
        let q = self.base.quiver();
        let mut out = QElement::zero();
        for (mu, b) in y.terms() {
            let tau = tau_rep(&self.base, e, b);
            if !tau.is_zero() {
                if let Some(me) = mu.concat(&Path::edge(q, e)) {
                    out.add_term(me, LinRep::constant(&self.base, tau));
                }
            }
            out.add_term(mu.clone(), transduce_rep(&self.base, e, b)?);
        }
        Ok(out)
    }

    /// `(Σ a_γ γ*)·y = Σ a_γ·(γ* y)`.
    pub fn mul(&self, x: &QElement, y: &QElement) -> Result<QElement> {
        let mut out = QElement::zero();
        for (gamma, a) in x.terms() {
            let mut z = y.clone();
            // γ* = e_k*…e_1*: e_1* acts first
            for &e in gamma.edges() {
                z = self.ghost_times(e, &z)?;
                if z.is_empty() {
                    break;
                }
            }
            for (nu, c) in z.terms() {
                out.add_term(nu.clone(), rep_mul(a, c));
            }
        }
        Ok(out)
    }

    /// Expands every term `aμ*` by `aμ* = Σ_{s(e)=r(μ)} (ae)(μe)*` until all
    /// ghost paths have the common length or end at a sink; coefficients
    /// are truncated at `n`.
    pub fn frontier(&self, x: &QElement, depth: usize, n: usize) -> BTreeMap<Path, PathElement> {
        let q = self.base.quiver();
        let mut out: BTreeMap<Path, PathElement> = BTreeMap::new();
        let mut stack: Vec<(Path, PathElement)> = x
            .terms()
            .map(|(g, a)| (g.clone(), a.expand(n).into_element()))
            .collect();
        while let Some((g, a)) = stack.pop() {
            if a.is_zero() {
                continue;
            }
            let r = g.range();
            if g.len() >= depth || q.is_sink(r) {
                let slot = out.entry(g).or_default();
                *slot = slot.add(&a);
                continue;
            }
            for &e in q.out_edges(r) {
                let ae = a.mul_bounded(&self.base.edge(e), Some(n));
                let ge = g.concat(&Path::edge(q, e)).expect("composable");
                stack.push((ge, ae));
            }
        }
        out.retain(|_, a| !a.is_zero());
        out
    }

    /// `x ≡ 0` with coefficients compared modulo paths longer than `n`.
    pub fn is_zero_mod(&self, x: &QElement, n: usize) -> bool {
        let depth = x.terms().map(|(g, _)| g.len()).max().unwrap_or(0);
        self.frontier(x, depth, n).is_empty()
    }

    pub fn eq_mod(&self, x: &QElement, y: &QElement, n: usize) -> bool {
        self.is_zero_mod(&x.sub(y), n)
    }

    /// Drops terms whose coefficient vanishes mod `n`.
    pub fn prune(&self, x: &QElement, n: usize) -> QElement {
        QElement {
            terms: x
                .terms()
                .filter(|(_, a)| !a.expand(n).is_zero())
                .map(|(g, a)| (g.clone(), a.clone()))
                .collect(),
        }
    }

    /// The truncation `Σ (a_γ mod n)·γ*` in Leavitt normal form, and whether
    /// any coefficient visibly continues past degree `n`.
    pub fn truncated_leavitt(&self, x: &QElement, n: usize) -> (LeavittElement, bool) {
        let mut out = LeavittElement::zero();
        let mut cut = false;
        for (mu, a) in x.terms() {
            let long = a.expand(2 * n + 2);
            cut |= long.element().degree().is_some_and(|d| d > n);
            for (p, c) in long.element().truncated(n).terms() {
                out = out.add(&self.leavitt.term_unchecked(c.clone(), p.clone(), mu.clone()));
            }
        }
        (out, cut)
    }

    pub fn display(&self, x: &QElement, n: usize) -> String {
        let (l, cut) = self.truncated_leavitt(x, n);
        let s = self.leavitt.display(&l);
        if cut {
            format!("{s} + …")
        } else {
            s
        }
    }

    /// Relations (V)–(CK2) for the embedded generators, compared mod `n`.
    pub fn check_defining_relations(&self, n: usize) -> Result<RelationReport> {
        let q = self.base.quiver();
        let mut rep = RelationReport::default();
        let eq = |a: &QElement, b: &QElement| self.eq_mod(a, b, n);
        for v in 0..q.num_vertices() {
            for w in 0..q.num_vertices() {
                let lhs = self.mul(&self.vertex(v), &self.vertex(w))?;
                let rhs = if v == w { self.vertex(v) } else { QElement::zero() };
                rep.push("V", format!("{}·{}", q.vertex_name(v), q.vertex_name(w)), eq(&lhs, &rhs));
            }
        }
        for e in 0..q.num_edges() {
            let (s, r) = (q.source(e), q.range(e));
            let (ed, gh) = (self.edge(e), self.ghost(e));
            let ok = eq(&self.mul(&self.vertex(s), &ed)?, &ed) && eq(&self.mul(&ed, &self.vertex(r))?, &ed);
            rep.push("E1", q.edge_name(e).to_string(), ok);
            let ok = eq(&self.mul(&self.vertex(r), &gh)?, &gh) && eq(&self.mul(&gh, &self.vertex(s))?, &gh);
            rep.push("E2", q.edge_name(e).to_string(), ok);
        }
        for e in 0..q.num_edges() {
            for f in 0..q.num_edges() {
                let lhs = self.mul(&self.ghost(e), &self.edge(f))?;
                let rhs = if e == f { self.vertex(q.range(e)) } else { QElement::zero() };
                rep.push("CK1", format!("~{}·{}", q.edge_name(e), q.edge_name(f)), eq(&lhs, &rhs));
            }
        }
        for v in 0..q.num_vertices() {
            if q.is_sink(v) {
                continue;
            }
            let mut sum = QElement::zero();
            for &e in q.out_edges(v) {
                sum = sum.add(&self.mul(&self.edge(e), &self.ghost(e))?);
            }
            rep.push("CK2", q.vertex_name(v).to_string(), eq(&sum, &self.vertex(v)));
        }
        Ok(rep)
    }

    /// The single loop of a free component containing only `v`.
    fn free_loop(&self, v: VertexId) -> Result<EdgeId> {
        let q = self.base.quiver();
        let p = self.base.poset();
        let c = p.class_of(v);
        let loops = p.restriction_edges(q, c);
        match (p.members(c), loops.as_slice()) {
            ([_], [e]) => Ok(*e),
            _ => Err(QAlgError::NotFreeLoopComponent(q.vertex_name(v).to_string())),
        }
    }

    fn check_in_corner(&self, v: VertexId, alpha: EdgeId, p: &PathElement) -> Result<()> {
        let q = self.base.quiver();
        if let Some((path, _)) = p
            .terms()
            .find(|(path, _)| path.source() != v || path.edges().iter().any(|&e| e != alpha))
        {
            return Err(QAlgError::NotInCorner(path.display(q), q.vertex_name(v).to_string()));
        }
        Ok(())
    }

    /// `p(α)⁻¹` in `vQv` for `p ∈ K_{[v]}[α]` with `p(0) ≠ 0`, checked mod `n`.
    pub fn invert_free_polynomial(&self, v: VertexId, p: &PathElement, n: usize) -> Result<LinRep> {
        let alpha = self.free_loop(v)?;
        self.check_in_corner(v, alpha, p)?;
        self.base.check_element(p)?;
        if p.coefficient(&Path::trivial(v)).is_zero() {
            return Err(QAlgError::ZeroConstantTerm);
        }
        let inv = invert_element(&self.base, p)?;
        let series = inv.expand(n);
        let vv = self.base.vertex(v);
        let left = p.mul_bounded(series.element(), Some(n));
        let right = series.element().mul_bounded(p, Some(n));
        if left != vv || right != vv {
            return Err(PathAlgError::NotInvertible(self.base.quiver().vertex_name(v).to_string()).into());
        }
        Ok(inv)
    }

    /// `det(Iv − A′)` in the commutative corner `K_{[v]}[α]`; its constant
    /// term must be `v`.
    pub fn determinant_remark_check(&self, v: VertexId, a: &AlgMatrix) -> Result<PathElement> {
        let alpha = self.free_loop(v)?;
        if !a.is_square() {
            return Err(PathAlgError::NonSquare {
                rows: a.rows(),
                cols: a.cols(),
            }
            .into());
        }
        if !a.is_eps_zero() {
            return Err(RatSeriesError::BadAugmentation.into());
        }
        for x in a.entries() {
            self.check_in_corner(v, alpha, x)?;
        }
        let vv = self.base.vertex(v);
        let m = AlgMatrix::diagonal(&vec![vv.clone(); a.rows()]).sub(a)?;
        let det = determinant(&m, &(0..m.rows()).collect::<Vec<_>>(), &vv);
        if det.coefficient(&Path::trivial(v)) != RatFn::one() || det.order() != Some(0) {
            return Err(PathAlgError::NotInvertible(self.base.quiver().vertex_name(v).to_string()).into());
        }
        Ok(det)
    }

    /// Splits an ε-zero square matrix along the tree, from the root down.
    pub fn sigma_prime_decompose(&self, a: &AlgMatrix) -> Result<SigmaPrimeDecomposition> {
        if !a.is_square() {
            return Err(PathAlgError::NonSquare {
                rows: a.rows(),
                cols: a.cols(),
            }
            .into());
        }
        if !a.is_eps_zero() {
            return Err(RatSeriesError::BadAugmentation.into());
        }
        let root = self.base.poset().assert_tree().map_err(PathAlgError::from)?;
        Ok(self.decompose_at(a, root))
    }

    fn decompose_at(&self, a: &AlgMatrix, class: ClassId) -> SigmaPrimeDecomposition {
        let p = self.base.poset();
        let own: BTreeSet<VertexId> = p.members(class).iter().copied().collect();
        let top = a.map(|x| x.filter(|path| own.contains(&path.source()) && own.contains(&path.range())));
        let descending = a.map(|x| x.filter(|path| own.contains(&path.source()) && !own.contains(&path.range())));
        let lower = p
            .lower_covers(class)
            .into_iter()
            .map(|k| {
                let verts: BTreeSet<VertexId> = p
                    .lower_set(k)
                    .into_iter()
                    .flat_map(|c| p.members(c).iter().copied())
                    .collect();
                let part = a.map(|x| x.filter(|path| verts.contains(&path.source())));
                self.decompose_at(&part, k)
            })
            .collect();
        SigmaPrimeDecomposition {
            class,
            whole: a.clone(),
            top,
            descending,
            lower,
        }
    }

    /// `(I−A)⁻¹ = (I−A₀)⁻¹(I+B)Π(I−A_k)⁻¹` mod `n`, with `(I−B)⁻¹ = I+B`
    /// exactly, and the same recursively for every `A_k`.
    pub fn check_sigma_prime_factorization(&self, d: &SigmaPrimeDecomposition, n: usize) -> Result<bool> {
        let alg = &self.base;
        let size = d.whole.rows();
        let id = AlgMatrix::identity(alg, size);
        let inv = |m: &AlgMatrix| -> Result<AlgMatrix> { Ok(id.sub(m)?.invert_eps_unit(alg, n)?) };
        let whole = inv(&d.whole)?;
        let one_plus_b = id.add(&d.descending)?;
        // (I − B)(I + B) = I − B², exactly
        let exact = id.sub(&d.descending)?.mul(&one_plus_b)? == id;
        let mut lower_inv = id.truncated(n);
        for k in &d.lower {
            lower_inv = lower_inv.mul(&inv(&k.whole)?)?;
        }
        let lower_sum = d.lower_sum();
        let lower_ok = inv(&lower_sum)?.agrees_mod(&lower_inv, n);
        let rest = d.descending.add(&lower_sum)?;
        let step_ok = inv(&rest)?.agrees_mod(&one_plus_b.mul(&lower_inv)?, n);
        let chain = inv(&d.top)?.mul(&one_plus_b)?.mul(&lower_inv)?;
        let mut ok = exact && lower_ok && step_ok && whole.agrees_mod(&chain, n);
        for k in &d.lower {
            ok &= self.check_sigma_prime_factorization(k, n)?;
        }
        Ok(ok)
    }
}

/// Laplace expansion along the first remaining row; entries commute.
fn determinant(m: &AlgMatrix, cols: &[usize], unit: &PathElement) -> PathElement {
    let row = m.rows() - cols.len();
    if cols.is_empty() {
        return unit.clone();
    }
    let mut out = PathElement::zero();
    for (i, &c) in cols.iter().enumerate() {
        let x = m.get(row, c);
        if x.is_zero() {
            continue;
        }
        let rest: Vec<usize> = cols.iter().copied().filter(|&j| j != c).collect();
        let minor = x.mul(&determinant(m, &rest, unit));
        out = if i % 2 == 0 { out.add(&minor) } else { out.sub(&minor) };
    }
    out
}
