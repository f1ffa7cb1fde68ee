//! Property tests for the algebraic invariants of each layer.
//!
//! Most strategies draw a seed and build values with the crate's own
//! generators, which keep every coefficient inside its field.

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::Rng;

use poset_leavitt::cli::{self, Command, RunConfig};
use poset_leavitt::leavitt::LeavittAlgebra;
use poset_leavitt::monoid::{mon_equal, replay, step, MonoidElement, MonoidVerdict, SearchBound};
use poset_leavitt::pathalg::{AlgMatrix, PathAlgebra};
use poset_leavitt::qalg::{transduce_rep, QAlgebra, QElement};
use poset_leavitt::quiver::{samples, GraphFile, Quiver};
use poset_leavitt::random::{self, SuiteRng};
use poset_leavitt::ratseries::{
    check_inverse_factorization, corner_formula, prat_membership_certificate, rep_add, rep_mul, split_by_hereditary,
};
use poset_leavitt::scalars::{FieldTower, Poly, RatFn};
use poset_leavitt::verify;

fn graphs() -> Vec<GraphFile> {
    vec![samples::toeplitz(), samples::rose2(), samples::tree3(), samples::chain3()]
}

fn alg_of(i: usize) -> PathAlgebra {
    PathAlgebra::from_graph(&graphs()[i % 4]).unwrap()
}

fn seeded(seed: u64) -> SuiteRng {
    random::rng(seed)
}

/// Random digraph text on `n` vertices from an edge list.
fn digraph(n: usize, edges: &[(usize, usize)]) -> GraphFile {
    let mut text = String::new();
    for v in 0..n {
        text.push_str(&format!("vertex v{v}\n"));
    }
    for (k, &(a, b)) in edges.iter().enumerate() {
        text.push_str(&format!("edge e{k} v{} v{}\n", a % n, b % n));
    }
    GraphFile::parse(&text).unwrap()
}

#[test]
fn coarser_partition_keeps_the_order() {
    // merging v and w in the chain is a valid coarsening
    let text = format!("{}component top u\ncomponent low v w\n", samples::CHAIN3);
    let p = GraphFile::parse(&text).unwrap().condense().unwrap();
    let fine = samples::chain3().condense().unwrap();
    let q = samples::chain3().quiver;
    for a in 0..q.num_vertices() {
        for b in 0..q.num_vertices() {
            if fine.leq(fine.class_of(a), fine.class_of(b)) {
                assert!(p.leq(p.class_of(a), p.class_of(b)));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // ---- quiver

    #[test]
    fn condensation_respects_reachability(n in 1usize..6, edges in prop::collection::vec((0usize..6, 0usize..6), 0..9)) {
        let g = digraph(n, &edges);
        let p = g.condense().unwrap();
        let reach = g.quiver.reachability();
        for a in 0..n {
            for b in 0..n {
                let (ca, cb) = (p.class_of(a), p.class_of(b));
                prop_assert_eq!(ca == cb, reach[a][b] && reach[b][a]);
                if reach[a][b] {
                    prop_assert!(p.leq(cb, ca));
                }
            }
        }
    }

    #[test]
    fn tree_branches_are_disjoint(seed: u64, size in 1usize..7) {
        let p = random::tree_graph(&mut seeded(seed), size).condense().unwrap();
        p.assert_tree().unwrap();
        for i in p.classes() {
            for j in p.classes() {
                if !p.comparable(i, j) {
                    prop_assert!(p.lower_set(i).is_disjoint(&p.lower_set(j)));
                }
            }
        }
    }

    #[test]
    fn lower_sets_split_over_maximal_elements(seed: u64, size in 1usize..7, picks in prop::collection::vec(0usize..6, 1..4)) {
        let p = random::tree_graph(&mut seeded(seed), size).condense().unwrap();
        let j: BTreeSet<_> = picks.iter().flat_map(|&k| p.lower_set(k % size)).collect();
        p.is_lower_set(&j).unwrap();
        let tops = p.maximal_in(&j);
        let mut union = BTreeSet::new();
        let mut total = 0;
        for &x in &tops {
            let l = p.lower_set(x);
            total += l.len();
            union.extend(l);
        }
        prop_assert_eq!(&union, &j);
        prop_assert_eq!(total, j.len());
    }

    // ---- scalars

    #[test]
    fn field_axioms(seed: u64) {
        let p = samples::chain3().condense().unwrap();
        let t = FieldTower::new(&p).unwrap();
        let w = t.class_by_name("w").unwrap();
        let mut r = seeded(seed);
        let (a, b, c) = (random::scalar(&mut r, &t, w), random::scalar(&mut r, &t, w), random::scalar(&mut r, &t, w));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        if let Some(ai) = a.inv() {
            prop_assert!((&a * &ai).is_one());
        }
    }

    #[test]
    fn normal_forms_are_unique(seed: u64, k in -4i64..5) {
        prop_assume!(k != 0);
        let p = samples::toeplitz().condense().unwrap();
        let t = FieldTower::new(&p).unwrap();
        let mut r = seeded(seed);
        let a = random::scalar(&mut r, &t, 1);
        let b = random::nonzero_scalar(&mut r, &t, 1);
        prop_assert_eq!((&a * &b).div(&b).unwrap(), a.clone());
        let scaled = RatFn::new(
            a.numer().mul(&Poly::from_i64(k)).mul(&Poly::var(0)),
            a.denom().mul(&Poly::from_i64(k)).mul(&Poly::var(0)),
        )
        .unwrap();
        prop_assert_eq!(scaled, a);
    }

    #[test]
    fn compatibility_squares(seed: u64, size in 1usize..7) {
        let mut r = seeded(seed);
        let p = random::tree_graph(&mut r, size).condense().unwrap();
        let t = FieldTower::new(&p).unwrap();
        let amal = t.amalgamate();
        for j in p.classes() {
            let s = t.scalar(random::scalar(&mut r, &t, j), j).unwrap();
            for i in p.classes().filter(|&i| t.leq(i, j)) {
                let down = t.coerce(&s, i).unwrap();
                prop_assert_eq!(amal.apply_scalar(&down), amal.apply_scalar(&s));
            }
        }
    }

    // ---- pathalg

    #[test]
    fn path_algebra_ring_laws(seed: u64, g in 0usize..4) {
        let alg = alg_of(g);
        let mut r = seeded(seed);
        let (a, b, c) = (random::path_element(&mut r, &alg, 4), random::path_element(&mut r, &alg, 4), random::path_element(&mut r, &alg, 4));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert_eq!(a.add(&b).mul(&c), a.mul(&c).add(&b.mul(&c)));
        alg.check_element(&a.mul(&b)).unwrap();
    }

    #[test]
    fn augmentation_is_multiplicative(seed: u64, g in 0usize..4) {
        let alg = alg_of(g);
        let mut r = seeded(seed);
        let (a, b) = (random::path_element(&mut r, &alg, 3), random::path_element(&mut r, &alg, 3));
        let (ea, eb) = (alg.augment(&a), alg.augment(&b));
        let (eab, esum) = (alg.augment(&a.mul(&b)), alg.augment(&a.add(&b)));
        for v in 0..alg.quiver().num_vertices() {
            prop_assert_eq!(eab.at(v), &ea.at(v) * &eb.at(v));
            prop_assert_eq!(esum.at(v), &ea.at(v) + &eb.at(v));
        }
    }

    #[test]
    fn transduction_closure_and_derivation(seed: u64, g in 0usize..4) {
        let alg = alg_of(g);
        let mut r = seeded(seed);
        let (a, b) = (random::path_element(&mut r, &alg, 3), random::path_element(&mut r, &alg, 3));
        for e in 0..alg.quiver().num_edges() {
            alg.check_element(&alg.transduce_exact(e, &a)).unwrap();
            prop_assert!(alg.check_right_derivation(e, &a, &b));
        }
    }

    #[test]
    fn eps_unit_inverse(seed: u64, g in 0usize..4, size in 1usize..4, n in 1usize..6) {
        let alg = alg_of(g);
        let mut r = seeded(seed);
        let root = alg.tower().root();
        let diag: Vec<_> = (0..size)
            .map(|_| alg.one().add(&alg.one()).add(&alg.scale(&random::nonzero_scalar(&mut r, alg.tower(), root), &alg.one()).unwrap()))
            .collect();
        prop_assume!(AlgMatrix::diagonal(&diag).is_invertible(&alg).unwrap());
        let m = AlgMatrix::diagonal(&diag).sub(&random::eps_zero_matrix(&mut r, &alg, size, 2)).unwrap();
        let inv = m.invert_eps_unit(&alg, n).unwrap();
        let id = AlgMatrix::identity(&alg, size);
        prop_assert!(m.mul_bounded(&inv, Some(n)).unwrap().agrees_mod(&id, n));
        prop_assert!(inv.mul_bounded(&m, Some(n)).unwrap().agrees_mod(&id, n));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    // ---- ratseries

    #[test]
    fn expansion_is_a_homomorphism(seed: u64, g in 0usize..4, n in 1usize..7) {
        let alg = alg_of(g);
        let mut r = seeded(seed);
        let (x, y) = (random::linrep(&mut r, &alg, 3, 2), random::linrep(&mut r, &alg, 3, 2));
        let (ex, ey) = (x.expand(n), y.expand(n));
        prop_assert_eq!(rep_add(&x, &y).expand(n), ex.add(&ey));
        prop_assert_eq!(rep_mul(&x, &y).expand(n), ex.mul(&ey));
    }

    #[test]
    fn support_splits_are_orthogonal(seed: u64, g in 0usize..4) {
        let alg = alg_of(g);
        let mut r = seeded(seed);
        let size = r.gen_range(1..=3);
        let b = random::eps_zero_matrix(&mut r, &alg, size, 2);
        for h in alg.quiver().hereditary_subsets() {
            let s = split_by_hereditary(&alg, &b, &h).unwrap();
            prop_assert!(s.orthogonality_holds());
            prop_assert!(s.recombines_to(&b));
            prop_assert!(check_inverse_factorization(&alg, &b, &h, 5).unwrap());
        }
    }

    #[test]
    fn corner_formula_matches(seed: u64, g in 0usize..4) {
        let alg = alg_of(g);
        let x = random::linrep(&mut seeded(seed), &alg, 3, 2);
        for h in alg.quiver().hereditary_subsets() {
            let p = alg.idempotent(h.iter().copied());
            let direct = x.corner(&p).expand(5);
            prop_assert_eq!(corner_formula(&alg, &x, &h, 5).unwrap(), direct);
        }
    }

    #[test]
    fn branch_summands_have_disjoint_supports(seed: u64) {
        let alg = alg_of(2);
        let x = random::linrep(&mut seeded(seed), &alg, 3, 2);
        let cert = prat_membership_certificate(&alg, &x, 5).unwrap();
        let supports: Vec<BTreeSet<_>> = cert
            .children
            .iter()
            .map(|c| rep_add(&c.upper, &c.mixed).expand(5).element().terms().map(|(p, _)| p.clone()).collect())
            .collect();
        for (i, a) in supports.iter().enumerate() {
            for b in &supports[i + 1..] {
                prop_assert!(a.is_disjoint(b));
            }
        }
    }

    // ---- leavitt

    #[test]
    fn rewriting_terminates_and_is_confluent(seed: u64, g in 0usize..3) {
        let l = LeavittAlgebra::new(alg_of(g));
        let mut r = seeded(seed);
        let (a, b) = (random::leavitt_element(&mut r, &l, 2, 3), random::leavitt_element(&mut r, &l, 2, 3));
        let expected = l.mul(&a, &b);
        let x = l.mul_by_rewriting(&a, &b, &mut seeded(seed ^ 1), 100_000).unwrap();
        let y = l.mul_by_rewriting(&a, &b, &mut seeded(seed ^ 2), 100_000).unwrap();
        prop_assert_eq!(&x, &expected);
        prop_assert_eq!(&y, &expected);
    }

    #[test]
    fn leavitt_associativity_and_membership(seed: u64, g in 0usize..4) {
        let l = LeavittAlgebra::new(alg_of(g));
        let mut r = seeded(seed);
        let (a, b, c) = (
            random::leavitt_element(&mut r, &l, 2, 3),
            random::leavitt_element(&mut r, &l, 2, 3),
            random::leavitt_element(&mut r, &l, 2, 3),
        );
        let left = l.mul(&l.mul(&a, &b), &c);
        prop_assert_eq!(&left, &l.mul(&a, &l.mul(&b, &c)));
        l.check_element(&left).unwrap();
        l.check_element(&a.star()).unwrap();
    }

    // ---- qalg

    #[test]
    fn transduce_rep_matches_series(seed: u64, g in 0usize..4, n in 1usize..7) {
        let alg = alg_of(g);
        let x = random::linrep(&mut seeded(seed), &alg, 3, 2);
        for e in 0..alg.quiver().num_edges() {
            let lhs = transduce_rep(&alg, e, &x).unwrap().expand(n - 1);
            prop_assert_eq!(lhs, alg.transduce(e, &x.expand(n)).unwrap());
        }
    }

    #[test]
    fn sigma_prime_identities(seed: u64, g in 0usize..4) {
        let q = QAlgebra::new(alg_of(g));
        let mut r = seeded(seed);
        let size = r.gen_range(1..=3);
        let a = random::eps_zero_matrix(&mut r, q.base(), size, 2);
        let d = q.sigma_prime_decompose(&a).unwrap();
        prop_assert!(d.identities_hold());
        prop_assert!(q.check_sigma_prime_factorization(&d, 5).unwrap());
    }

    #[test]
    fn free_polynomials_invert(seed: u64, g in prop::sample::select(vec![0usize, 2, 3]), n in 1usize..9) {
        let q = QAlgebra::new(alg_of(g));
        let mut r = seeded(seed);
        let loops = verify::free_loop_vertices(q.base());
        let (v, alpha) = loops[r.gen_range(0..loops.len())];
        let deg = r.gen_range(0..=3);
        let p = random::free_polynomial(&mut r, q.base(), v, alpha, deg);
        let inv = q.invert_free_polynomial(v, &p, n).unwrap().expand(n);
        let vv = q.base().vertex(v);
        prop_assert_eq!(p.mul(inv.element()).truncated(n), vv.clone());
        prop_assert_eq!(inv.element().mul(&p).truncated(n), vv);
    }
}

/// `Σ_γ from_series(r_γ)·γ*` with at most three terms.
fn random_q(q: &QAlgebra, r: &mut SuiteRng) -> QElement {
    let alg = q.base();
    let ghosts = alg.quiver().paths_up_to(1);
    let mut out = QElement::zero();
    for _ in 0..r.gen_range(1..=3) {
        let coeff = q.from_series(&random::linrep(r, alg, 2, 1));
        let g = &ghosts[r.gen_range(0..ghosts.len())];
        let mut ghost = q.vertex(g.range());
        for &e in g.edges() {
            ghost = q.mul(&q.ghost(e), &ghost).unwrap();
        }
        out = out.add(&q.mul(&coeff, &ghost).unwrap());
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn q_multiplication_is_associative(seed: u64, g in 0usize..2) {
        let q = QAlgebra::new(alg_of(g));
        let mut r = seeded(seed);
        let (x, y, z) = (random_q(&q, &mut r), random_q(&q, &mut r), random_q(&q, &mut r));
        let left = q.mul(&q.mul(&x, &y).unwrap(), &z).unwrap();
        let right = q.mul(&x, &q.mul(&y, &z).unwrap()).unwrap();
        prop_assert!(q.eq_mod(&left, &right, 4));
    }

    #[test]
    fn q_relations_hold(g in 0usize..4) {
        let q = QAlgebra::new(alg_of(g));
        prop_assert!(q.check_defining_relations(6).unwrap().all_hold());
    }

    // ---- cli

    #[test]
    fn identical_configs_give_identical_json(seed: u64) {
        let file = std::env::temp_dir().join(format!("plk-prop-{}.graph", std::process::id()));
        std::fs::write(&file, samples::TOEPLITZ).unwrap();
        let cfg = RunConfig {
            command: Command::Verify { file, suite: Some("derivation".into()) },
            degree: 6,
            bound: SearchBound::default(),
            json: true,
            seed,
        };
        prop_assert_eq!(cli::run(&cfg).render(true), cli::run(&cfg).render(true));
    }
}

// ---- monoid

fn random_monoid(q: &Quiver, r: &mut SuiteRng) -> MonoidElement {
    MonoidElement((0..q.num_vertices()).map(|_| r.gen_range(0..=2)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn one_step_is_found_at_depth_one(seed: u64, g in 0usize..4) {
        let q = graphs()[g].quiver.clone();
        let mut r = seeded(seed);
        let a = random_monoid(&q, &mut r);
        for v in (0..q.num_vertices()).filter(|&v| !q.is_sink(v) && a.0[v] > 0) {
            let b = step(&q, &a, v).unwrap();
            match mon_equal(&q, &a, &b, SearchBound::default()) {
                MonoidVerdict::Equal { steps_from_left, steps_from_right, .. } => {
                    prop_assert!(steps_from_left.len() + steps_from_right.len() <= 1);
                }
                other => prop_assert!(false, "{:?}", other),
            }
        }
    }

    #[test]
    fn mon_equal_is_reflexive_symmetric_and_certified(seed: u64, g in 0usize..4) {
        let q = graphs()[g].quiver.clone();
        let mut r = seeded(seed);
        let (a, b) = (random_monoid(&q, &mut r), random_monoid(&q, &mut r));
        let reflexive = matches!(mon_equal(&q, &a, &a, SearchBound::default()), MonoidVerdict::Equal { .. });
        prop_assert!(reflexive);
        let ab = mon_equal(&q, &a, &b, SearchBound::default());
        let ba = mon_equal(&q, &b, &a, SearchBound::default());
        prop_assert_eq!(std::mem::discriminant(&ab), std::mem::discriminant(&ba));
        if let MonoidVerdict::Equal { witness, steps_from_left, steps_from_right } = ab {
            prop_assert_eq!(replay(&q, &a, &steps_from_left).unwrap(), witness.clone());
            prop_assert_eq!(replay(&q, &b, &steps_from_right).unwrap(), witness);
        }
    }

    #[test]
    fn two_rewrites_meet_again(seed: u64, g in 0usize..4) {
        let q = graphs()[g].quiver.clone();
        let mut r = seeded(seed);
        let a = random_monoid(&q, &mut r);
        let live: Vec<_> = (0..q.num_vertices()).filter(|&v| !q.is_sink(v) && a.0[v] > 0).collect();
        prop_assume!(live.len() >= 2);
        let c = step(&q, &a, live[0]).unwrap();
        let d = step(&q, &a, live[1]).unwrap();
        let met = matches!(mon_equal(&q, &c, &d, SearchBound::default()), MonoidVerdict::Equal { .. });
        prop_assert!(met);
    }
}
