//! The regular algebra `Q`: series times ghosts, inverses in a free loop,
//! and the Σ′ split of a matrix.

use poset_leavitt::parse::{parse_expr, Evaluator};
use poset_leavitt::pathalg::PathAlgebra;
use poset_leavitt::qalg::QAlgebra;
use poset_leavitt::quiver::samples;

pub fn main() {
    let q = QAlgebra::new(PathAlgebra::from_graph(&samples::tree3()).unwrap());
    let ev = Evaluator::new(&q);

    let x = ev.eval_str("inv(r - x_r*a) . g . ~g").unwrap();
    println!("(r − x_r·a)⁻¹·g·~g ≈ {}", ev.display(&x, 3));

    let r = q.base().quiver().vertex("r").unwrap();
    let p = ev.path_element(&parse_expr("2*r - x_r*a + a.a").unwrap()).unwrap();
    let inv = q.invert_free_polynomial(r, &p, 8).unwrap();
    println!("(2 − x_r·a + a²)⁻¹ ≈ {}", q.base().display_series(&inv.expand(3)));

    let m = ev.eval_matrix(&parse_expr("[[a, g], [h, b1.b2]]").unwrap()).unwrap();
    let d = q.sigma_prime_decompose(&m).unwrap();
    assert!(d.identities_hold());
    assert!(q.check_sigma_prime_factorization(&d, 6).unwrap());
    println!("Σ′ split at {} with {} lower parts", q.base().poset().name(d.class), d.lower.len());
}
