//! Seeded generators for the property suites.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::leavitt::{LeavittAlgebra, LeavittElement};
use crate::pathalg::{AlgMatrix, PathAlgebra, PathElement};
use crate::quiver::{ClassId, GraphFile, Path, VertexId};
use crate::ratseries::LinRep;
use crate::scalars::{FieldTower, Poly, RatFn};

pub type SuiteRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SuiteRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A small element of `K_i`: `c₀ + c₁x` for a variable of `K_i`, and now
/// and then divided by `1 + x`.
pub fn scalar<R: Rng>(rng: &mut R, tower: &FieldTower, i: ClassId) -> RatFn {
    let c0 = RatFn::from_i64(rng.gen_range(-3..=3));
    let vars: Vec<_> = tower.vars_of(i).iter().copied().collect();
    let Some(&x) = vars.choose(rng) else {
        return c0;
    };
    let c1 = RatFn::from_i64(rng.gen_range(-2..=2));
    let val = &c0 + &(&c1 * &RatFn::var(x));
    if rng.gen_bool(0.1) {
        let den = RatFn::from_poly(Poly::var(x).add(&Poly::one()));
        val.div(&den).expect("nonzero denominator")
    } else {
        val
    }
}

/// Like [`scalar`] but never zero.
pub fn nonzero_scalar<R: Rng>(rng: &mut R, tower: &FieldTower, i: ClassId) -> RatFn {
    loop {
        let c = scalar(rng, tower, i);
        if !c.is_zero() {
            return c;
        }
    }
}

/// Random combination of at most `terms` paths of length in `lengths`.
pub fn element<R: Rng>(
    rng: &mut R,
    alg: &PathAlgebra,
    lengths: std::ops::RangeInclusive<usize>,
    terms: usize,
) -> PathElement {
    let paths: Vec<Path> = alg
        .quiver()
        .paths_up_to(*lengths.end())
        .into_iter()
        .filter(|p| lengths.contains(&p.len()))
        .collect();
    let mut out = PathElement::zero();
    if paths.is_empty() {
        return out;
    }
    for _ in 0..rng.gen_range(0..=terms) {
        let p = paths.choose(rng).expect("nonempty").clone();
        let c = scalar(rng, alg.tower(), alg.coefficient_class(&p));
        out = out.add(&alg.term(c, p).expect("coefficient in its field"));
    }
    out
}

/// Element of degree ≤ `deg` with a bounded number of terms.
pub fn path_element<R: Rng>(rng: &mut R, alg: &PathAlgebra, deg: usize) -> PathElement {
    element(rng, alg, 0..=deg, 4)
}

/// `size × size` matrix with ε = 0 and entries of degree ≤ `deg`.
pub fn eps_zero_matrix<R: Rng>(rng: &mut R, alg: &PathAlgebra, size: usize, deg: usize) -> AlgMatrix {
    let entries = (0..size * size)
        .map(|_| if rng.gen_bool(0.4) { PathElement::zero() } else { element(rng, alg, 1..=deg.max(1), 2) })
        .collect();
    AlgMatrix::from_entries(size, size, entries).expect("square")
}

/// A representation of dimension `1..=max_dim` with entries of degree ≤ `deg`.
pub fn linrep<R: Rng>(rng: &mut R, alg: &PathAlgebra, max_dim: usize, deg: usize) -> LinRep {
    let d = rng.gen_range(1..=max_dim);
    let lambda = (0..d).map(|_| element(rng, alg, 0..=deg, 2)).collect();
    let rho = (0..d).map(|_| element(rng, alg, 0..=deg, 2)).collect();
    let b = eps_zero_matrix(rng, alg, d, deg);
    LinRep::new(
        AlgMatrix::from_entries(1, d, lambda).expect("row"),
        b,
        AlgMatrix::from_entries(d, 1, rho).expect("column"),
    )
    .expect("ε(B) = 0 by construction")
}

/// `Σ c γμ*` with `|γ|, |μ| ≤ deg` and `r(γ) = r(μ)`.
pub fn leavitt_element<R: Rng>(rng: &mut R, l: &LeavittAlgebra, deg: usize, terms: usize) -> LeavittElement {
    let alg = l.base();
    let paths = alg.quiver().paths_up_to(deg);
    let mut out = LeavittElement::zero();
    for _ in 0..rng.gen_range(1..=terms) {
        let g = paths.choose(rng).expect("vertices exist").clone();
        let ends: Vec<&Path> = paths.iter().filter(|m| m.range() == g.range()).collect();
        let m = (*ends.choose(rng).expect("γ itself ends there")).clone();
        let c = scalar(rng, alg.tower(), alg.coefficient_class(&g));
        out = out.add(&l.term(c, g, m).expect("coefficient in its field"));
    }
    out
}

/// `Σ c_k α^k` in the corner at `v` with a nonzero constant term.
pub fn free_polynomial<R: Rng>(rng: &mut R, alg: &PathAlgebra, v: VertexId, alpha: usize, deg: usize) -> PathElement {
    let class = alg.poset().class_of(v);
    let mut out = alg.vertex(v).scale_raw(&nonzero_scalar(rng, alg.tower(), class));
    let mut power = alg.vertex(v);
    for _ in 1..=deg {
        power = power.mul(&alg.edge(alpha));
        out = out.add(&power.scale_raw(&scalar(rng, alg.tower(), class)));
    }
    out
}

/// A tree of `size` single-loop components, each class hanging off an
/// earlier one.
pub fn tree_graph<R: Rng>(rng: &mut R, size: usize) -> GraphFile {
    let mut text = String::new();
    for i in 0..size {
        text.push_str(&format!("vertex c{i}\nedge l{i} c{i} c{i}\n"));
    }
    for i in 1..size {
        let parent = rng.gen_range(0..i);
        text.push_str(&format!("edge t{i} c{parent} c{i}\n"));
    }
    GraphFile::parse(&text).expect("generated graph parses")
}
