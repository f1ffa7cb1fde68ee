//! Randomized property suites shared by `plk verify` and the acceptance
//! tests. Each suite reports how many cases it ran and, on failure, the
//! first counterexample rendered as element literals.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::leavitt::LeavittAlgebra;
use crate::monoid::{mon_equal, vmonoid_generators_check, MonoidElement, MonoidVerdict, SearchBound};
use crate::pathalg::{AlgMatrix, PathAlgebra, PathElement, SeriesTruncation};
use crate::qalg::{transduce_rep, QAlgebra};
use crate::quiver::{ClassId, EdgeId, Path, Quiver, VertexId};
use crate::random::{self, SuiteRng};
use crate::ratseries::{check_inverse_factorization, corner_formula, inverse_one_minus, split_by_hereditary};
use crate::scalars::FieldTower;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteOutcome {
    pub suite: &'static str,
    pub cases: usize,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<String>,
}

impl SuiteOutcome {
    fn new(suite: &'static str) -> Self {
        SuiteOutcome { suite, cases: 0, passed: true, counterexample: None }
    }

    /// Records one case; keeps the first failure.
    fn record(&mut self, ok: bool, dump: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok && self.passed {
            self.passed = false;
            self.counterexample = Some(dump());
        }
    }

    fn fail(&mut self, msg: String) {
        self.record(false, || msg);
    }
}

/// Case counts per suite.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Budget {
    pub factorization: usize,
    pub corner: usize,
    pub derivation: usize,
    pub transduction: usize,
    pub sigma_prime: usize,
    pub free_inverse: usize,
    pub amalgamation: usize,
    pub confluence: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            factorization: 200,
            corner: 100,
            derivation: 500,
            transduction: 200,
            sigma_prime: 100,
            free_inverse: 50,
            amalgamation: 20,
            confluence: 300,
        }
    }
}

/// `Σ_{k ≤ n} B^k`, truncated at `n`.
pub fn neumann_inverse(alg: &PathAlgebra, b: &AlgMatrix, n: usize) -> AlgMatrix {
    let id = AlgMatrix::identity(alg, b.rows());
    let mut power = id.clone();
    let mut sum = id;
    for _ in 0..n {
        power = power.mul_bounded(b, Some(n)).expect("square");
        sum = sum.add(&power).expect("square");
    }
    sum.truncated(n)
}

/// Strips a leading `e` term by term, rebuilding each tail from its edge list.
pub fn strip_leading(alg: &PathAlgebra, e: EdgeId, a: &PathElement) -> PathElement {
    let q = alg.quiver();
    let mut out = PathElement::zero();
    for (p, c) in a.terms() {
        if p.edges().first() != Some(&e) {
            continue;
        }
        let rest = if p.len() == 1 {
            Path::trivial(q.range(e))
        } else {
            Path::from_edges(q, p.edges()[1..].to_vec()).expect("suffix of a path")
        };
        out = out.add(&alg.path(rest).scale_raw(c));
    }
    out
}

fn hereditary_label(q: &Quiver, h: &BTreeSet<VertexId>) -> String {
    let names: Vec<_> = h.iter().map(|&v| q.vertex_name(v)).collect();
    format!("{{{}}}", names.join(", "))
}

/// (V)–(CK2) in the Leavitt algebra and under the embedding into `Q`.
pub fn relations(q: &QAlgebra, n: usize) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("relations");
    let leavitt = q.leavitt().check_defining_relations();
    for c in &leavitt.checks {
        out.record(c.holds, || format!("leavitt {} at {}", c.family, c.instance));
    }
    match q.check_defining_relations(n) {
        Ok(rep) => {
            for c in &rep.checks {
                out.record(c.holds, || format!("q {} at {}", c.family, c.instance));
            }
        }
        Err(e) => out.fail(format!("q relations: {e}")),
    }
    out
}

/// Support splitting and the inverse factorization for every hereditary set.
pub fn factorization(alg: &PathAlgebra, rng: &mut SuiteRng, cases: usize, n: usize) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("factorization");
    let q = alg.quiver();
    let hs = q.hereditary_subsets();
    for _ in 0..cases {
        let size = rng.gen_range(1..=3);
        let b = random::eps_zero_matrix(rng, alg, size, 2);
        let oracle = neumann_inverse(alg, &b, n);
        let mut failure = match inverse_one_minus(alg, &b, n) {
            Ok(m) if m.agrees_mod(&oracle, n) => None,
            _ => Some("inverse disagrees with Σ B^k".to_string()),
        };
        for h in &hs {
            if failure.is_some() {
                break;
            }
            let split = split_by_hereditary(alg, &b, h);
            let shape_ok = split.as_ref().map(|s| s.orthogonality_holds() && s.recombines_to(&b)).unwrap_or(false);
            let fact_ok = check_inverse_factorization(alg, &b, h, n).unwrap_or(false);
            if !(shape_ok && fact_ok) {
                failure = Some(format!("H = {}", hereditary_label(q, h)));
            }
        }
        out.record(failure.is_none(), || format!("B = {}, {}", b.display(alg), failure.clone().unwrap_or_default()));
    }
    out
}

/// The corner formula against `p_H·(Σ λB^kρ)·p_H`.
pub fn corner(alg: &PathAlgebra, rng: &mut SuiteRng, cases: usize, n: usize) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("corner");
    let q = alg.quiver();
    let hs = q.hereditary_subsets();
    for _ in 0..cases {
        let x = random::linrep(rng, alg, 3, 2);
        let mid = neumann_inverse(alg, x.trans(), n);
        let series = x
            .lambda()
            .mul_bounded(&mid, Some(n))
            .and_then(|m| m.mul_bounded(x.rho(), Some(n)))
            .expect("shapes match")
            .get(0, 0)
            .clone();
        let mut ok = true;
        let mut bad = None;
        for h in &hs {
            let p = alg.idempotent(h.iter().copied());
            let direct = SeriesTruncation::new(&p.mul(&series).mul(&p), n);
            let good = corner_formula(alg, &x, h, n).map(|c| c == direct).unwrap_or(false);
            if !good && ok {
                ok = false;
                bad = Some(h.clone());
            }
        }
        out.record(ok, || {
            format!("x = {}, H = {}", x.display(alg), hereditary_label(q, bad.as_ref().expect("failed set")))
        });
    }
    out
}

/// `δ̃_e(rs) = δ̃_e(r)s + τ_e(r)δ̃_e(s)` for random pairs and every edge.
pub fn derivation(alg: &PathAlgebra, rng: &mut SuiteRng, cases: usize) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("derivation");
    let q = alg.quiver();
    for _ in 0..cases {
        let r = random::path_element(rng, alg, 3);
        let s = random::path_element(rng, alg, 3);
        let mut ok = true;
        for e in 0..q.num_edges() {
            let tau = r.coefficient(&Path::trivial(q.source(e)));
            let lhs = strip_leading(alg, e, &r.mul(&s));
            let rhs = strip_leading(alg, e, &r)
                .mul(&s)
                .add(&alg.vertex(q.range(e)).scale_raw(&tau).mul(&strip_leading(alg, e, &s)));
            ok &= alg.check_right_derivation(e, &r, &s) && lhs == rhs && alg.transduce_exact(e, &r) == strip_leading(alg, e, &r);
        }
        out.record(ok, || format!("r = {}, s = {}", alg.display(&r), alg.display(&s)));
    }
    out
}

/// `expand(transduce_rep(e, r), N−1)` against stripping `expand(r, N)`.
pub fn transduction(alg: &PathAlgebra, rng: &mut SuiteRng, cases: usize, n: usize) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("transduction");
    let q = alg.quiver();
    for _ in 0..cases {
        let r = random::linrep(rng, alg, 3, 2);
        let full = r.expand(n);
        let mut ok = true;
        for e in 0..q.num_edges() {
            let oracle = SeriesTruncation::new(&strip_leading(alg, e, full.element()), n - 1);
            let via_lib = alg.transduce(e, &full).map(|t| t == oracle).unwrap_or(false);
            let via_rep = transduce_rep(alg, e, &r).map(|t| t.expand(n - 1) == oracle).unwrap_or(false);
            ok &= via_lib && via_rep;
        }
        out.record(ok, || format!("r = {}", r.display(alg)));
    }
    out
}

/// Projective witnesses and `v ≡ Σ r(e)` at every regular vertex.
pub fn witnesses(l: &LeavittAlgebra, bound: SearchBound) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("witnesses");
    let q = l.quiver();
    for v in (0..q.num_vertices()).filter(|&v| !q.is_sink(v)) {
        let name = q.vertex_name(v);
        match l.projective_witness(v) {
            Ok(w) => {
                let yx = l.vertex(v) == w.row_times_column;
                out.record(w.certified && yx, || format!("projective witness at {name}"));
            }
            Err(e) => out.fail(format!("projective witness at {name}: {e}")),
        }
        let a = MonoidElement::generator(q, v);
        let b = q
            .out_edges(v)
            .iter()
            .fold(MonoidElement::zero(q), |acc, &e| acc.add(&MonoidElement::generator(q, q.range(e))));
        let depth_one = match mon_equal(q, &a, &b, bound) {
            MonoidVerdict::Equal { steps_from_left, steps_from_right, .. } => {
                steps_from_left.len() + steps_from_right.len() <= 1
            }
            _ => false,
        };
        out.record(depth_one, || format!("{name} ≢ {} at depth 1", b.display(q)));
    }
    match vmonoid_generators_check(l) {
        Ok(p) => out.record(p.all_witnessed(), || "presentation witnesses".into()),
        Err(e) => out.fail(format!("presentation: {e}")),
    }
    out
}

/// Σ′ decomposition identities and the inverse chain.
pub fn sigma_prime(q: &QAlgebra, rng: &mut SuiteRng, cases: usize, n: usize) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("sigma-prime");
    let alg = q.base();
    for _ in 0..cases {
        let size = rng.gen_range(1..=3);
        let a = random::eps_zero_matrix(rng, alg, size, 2);
        let ok = match q.sigma_prime_decompose(&a) {
            Ok(d) => d.identities_hold() && q.check_sigma_prime_factorization(&d, n).unwrap_or(false),
            Err(_) => false,
        };
        out.record(ok, || format!("A = {}", a.display(alg)));
    }
    out
}

/// Vertices whose component is a single vertex with a single loop.
pub fn free_loop_vertices(alg: &PathAlgebra) -> Vec<(VertexId, EdgeId)> {
    let q = alg.quiver();
    let p = alg.poset();
    p.classes()
        .filter_map(|c| {
            let members = p.members(c);
            let loops = p.restriction_edges(q, c);
            (members.len() == 1 && loops.len() == 1).then(|| (members[0], loops[0]))
        })
        .collect()
}

/// `p·p⁻¹ ≡ p⁻¹·p ≡ v` for random polynomials in a free loop.
pub fn free_inverse(q: &QAlgebra, rng: &mut SuiteRng, cases: usize, n: usize) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("free-inverse");
    let alg = q.base();
    let loops = free_loop_vertices(alg);
    if loops.is_empty() {
        return out;
    }
    for _ in 0..cases {
        let &(v, alpha) = &loops[rng.gen_range(0..loops.len())];
        let deg = rng.gen_range(0..=3);
        let p = random::free_polynomial(rng, alg, v, alpha, deg);
        let ok = match q.invert_free_polynomial(v, &p, n) {
            Ok(inv) => {
                let s = inv.expand(n);
                let vv = alg.vertex(v);
                p.mul(s.element()).truncated(n) == vv && s.element().mul(&p).truncated(n) == vv
            }
            Err(_) => false,
        };
        out.record(ok, || format!("p = {}", alg.display(&p)));
    }
    out
}

/// `φ_i|K_j = φ_j` for `i ≤ j`, and each `φ_i` is a ring map, on one tower.
pub fn amalgamation_squares(tower: &FieldTower, rng: &mut SuiteRng, samples: usize) -> Result<(), String> {
    let amal = tower.amalgamate();
    let k = tower.num_classes();
    for j in 0..k {
        for _ in 0..samples {
            let a = random::scalar(rng, tower, j);
            let b = random::scalar(rng, tower, j);
            for i in (0..k).filter(|&i| tower.leq(i, j)) {
                let fa = amal.apply(i, &a);
                let square = fa == amal.apply(j, &a);
                let ring = amal.apply(i, &(&a * &b)) == &fa * &amal.apply(i, &b)
                    && amal.apply(i, &(&a + &b)) == &fa + &amal.apply(i, &b);
                let lands = fa.vars().is_subset(&amal.vars);
                if !(square && ring && lands) {
                    let name = |c: ClassId| tower.class_name(c).to_string();
                    return Err(format!(
                        "square {} ≤ {} fails on a = {}, b = {}",
                        name(i),
                        name(j),
                        tower.display(&a),
                        tower.display(&b)
                    ));
                }
            }
        }
    }
    Ok(())
}

/// Amalgamation squares on the given tower and on random tree posets.
pub fn amalgamation(tower: Option<&FieldTower>, rng: &mut SuiteRng, cases: usize) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("amalgamation");
    if let Some(t) = tower {
        let r = amalgamation_squares(t, rng, 3);
        out.record(r.is_ok(), || r.clone().unwrap_err());
    }
    for _ in 0..cases {
        let size = rng.gen_range(1..=6);
        let g = random::tree_graph(rng, size);
        let r = g
            .condense()
            .map_err(|e| e.to_string())
            .and_then(|p| FieldTower::new(&p).map_err(|e| e.to_string()))
            .and_then(|t| amalgamation_squares(&t, rng, 3));
        out.record(r.is_ok(), || r.clone().unwrap_err());
    }
    out
}

/// Normal-form products against two independently seeded rewriting orders.
pub fn confluence(l: &LeavittAlgebra, rng: &mut SuiteRng, cases: usize) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("confluence");
    for _ in 0..cases {
        let a = random::leavitt_element(rng, l, 2, 3);
        let b = random::leavitt_element(rng, l, 2, 3);
        let expected = l.mul(&a, &b);
        let mut r1 = SuiteRng::seed_from_u64(rng.gen());
        let mut r2 = SuiteRng::seed_from_u64(rng.gen());
        let x = l.mul_by_rewriting(&a, &b, &mut r1, 100_000);
        let y = l.mul_by_rewriting(&a, &b, &mut r2, 100_000);
        let ok = matches!((&x, &y), (Ok(x), Ok(y)) if *x == expected && *y == expected);
        out.record(ok, || format!("a = {}, b = {}", l.display(&a), l.display(&b)));
    }
    out
}

/// `mon_equal` is reflexive and symmetric, and two one-step rewrites of a
/// random element meet again.
pub fn monoid(q: &Quiver, rng: &mut SuiteRng, cases: usize, bound: SearchBound) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("monoid");
    let regular: Vec<VertexId> = (0..q.num_vertices()).filter(|&v| !q.is_sink(v)).collect();
    for _ in 0..cases {
        let a = MonoidElement((0..q.num_vertices()).map(|_| rng.gen_range(0..=2)).collect());
        let b = MonoidElement((0..q.num_vertices()).map(|_| rng.gen_range(0..=2)).collect());
        let refl = matches!(mon_equal(q, &a, &a, bound), MonoidVerdict::Equal { .. });
        let ab = mon_equal(q, &a, &b, bound);
        let ba = mon_equal(q, &b, &a, bound);
        let same_kind = std::mem::discriminant(&ab) == std::mem::discriminant(&ba);
        let applicable: Vec<VertexId> = regular.iter().copied().filter(|&v| a.0[v] > 0).collect();
        let local = if applicable.len() >= 2 {
            let c = crate::monoid::step(q, &a, applicable[0]).expect("applicable");
            let d = crate::monoid::step(q, &a, applicable[1]).expect("applicable");
            !matches!(mon_equal(q, &c, &d, bound), MonoidVerdict::NotEqual)
        } else {
            true
        };
        out.record(refl && same_kind && local, || format!("a = {}, b = {}", a.display(q), b.display(q)));
    }
    out
}

/// Suite names in report order.
pub const SUITES: &[&str] = &[
    "relations",
    "factorization",
    "corner",
    "derivation",
    "transduction",
    "witnesses",
    "monoid",
    "sigma-prime",
    "free-inverse",
    "amalgamation",
    "confluence",
];

/// One suite by name. Each suite draws from its own stream derived from
/// `seed`, so a failure replays with the same seed and suite alone.
/// `None` for unknown names and for `sigma-prime` off a tree.
pub fn run_suite(
    q: &QAlgebra,
    suite: &str,
    seed: u64,
    n: usize,
    bound: SearchBound,
    budget: Budget,
) -> Option<SuiteOutcome> {
    let alg = q.base();
    let index = SUITES.iter().position(|s| *s == suite)? as u64;
    let mut rng = random::rng(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(index));
    let rng = &mut rng;
    Some(match suite {
        "relations" => relations(q, n),
        "factorization" => factorization(alg, rng, budget.factorization, n),
        "corner" => corner(alg, rng, budget.corner, n),
        "derivation" => derivation(alg, rng, budget.derivation),
        "transduction" => transduction(alg, rng, budget.transduction, n),
        "witnesses" => witnesses(q.leavitt(), bound),
        "monoid" => monoid(alg.quiver(), rng, 20, bound),
        "sigma-prime" if alg.poset().assert_tree().is_ok() => sigma_prime(q, rng, budget.sigma_prime, n),
        "free-inverse" => free_inverse(q, rng, budget.free_inverse, n),
        "amalgamation" => amalgamation(Some(alg.tower()), rng, budget.amalgamation),
        "confluence" => confluence(q.leavitt(), rng, budget.confluence),
        _ => return None,
    })
}

/// Every applicable suite on one graph, in [`SUITES`] order.
pub fn run_all(q: &QAlgebra, seed: u64, n: usize, bound: SearchBound, budget: Budget) -> Vec<SuiteOutcome> {
    SUITES
        .iter()
        .filter_map(|s| run_suite(q, s, seed, n, bound, budget))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::samples;

    fn small() -> Budget {
        Budget {
            factorization: 10,
            corner: 5,
            derivation: 20,
            transduction: 10,
            sigma_prime: 5,
            free_inverse: 5,
            amalgamation: 3,
            confluence: 10,
        }
    }

    #[test]
    fn toeplitz_passes_every_suite() {
        let q = QAlgebra::new(PathAlgebra::from_graph(&samples::toeplitz()).unwrap());
        for s in run_all(&q, 1, 6, SearchBound::default(), small()) {
            assert!(s.passed, "{s:?}");
        }
    }

    #[test]
    fn rose_passes_every_suite() {
        let q = QAlgebra::new(PathAlgebra::from_graph(&samples::rose2()).unwrap());
        for s in run_all(&q, 2, 6, SearchBound::default(), small()) {
            assert!(s.passed, "{s:?}");
        }
    }

    #[test]
    fn neumann_matches_geometric_series() {
        let alg = PathAlgebra::from_graph(&samples::toeplitz()).unwrap();
        let b = AlgMatrix::from_rows(vec![vec![alg.path(alg.quiver().path(&["alpha"]).unwrap())]]).unwrap();
        let inv = neumann_inverse(&alg, &b, 3);
        assert_eq!(alg.display(inv.get(0, 0)), "u + v + alpha + alpha.alpha + alpha.alpha.alpha");
    }

    #[test]
    fn failures_keep_the_first_counterexample() {
        let mut s = SuiteOutcome::new("x");
        s.record(true, || unreachable!());
        s.record(false, || "first".into());
        s.record(false, || "second".into());
        assert_eq!((s.cases, s.passed, s.counterexample.as_deref()), (3, false, Some("first")));
    }

    #[test]
    fn single_suites_replay_the_full_run() {
        let q = QAlgebra::new(PathAlgebra::from_graph(&samples::toeplitz()).unwrap());
        let all = run_all(&q, 9, 5, SearchBound::default(), small());
        let one = run_suite(&q, "corner", 9, 5, SearchBound::default(), small()).unwrap();
        assert_eq!(all.iter().find(|s| s.suite == "corner"), Some(&one));
        assert!(run_suite(&q, "nope", 9, 5, SearchBound::default(), small()).is_none());
    }
}
