//! Path-algebra arithmetic and the right transduction `δ̃_e`.

use poset_leavitt::pathalg::PathAlgebra;
use poset_leavitt::quiver::samples;
use poset_leavitt::scalars::RatFn;

pub fn main() {
    let alg = PathAlgebra::from_graph(&samples::toeplitz()).unwrap();
    let q = alg.quiver();
    let (alpha, f) = (q.edge("alpha").unwrap(), q.edge("f").unwrap());
    let u = q.vertex("u").unwrap();

    let xu = alg.tower().var(alg.poset().class_of(u)).value().clone();
    let r = alg.vertex(u).sub(&alg.scale(&xu, &alg.edge(alpha)).unwrap());
    let s = alg.edge(f).add(&alg.scale(&RatFn::from_i64(2), &alg.edge(alpha).mul(&alg.edge(f))).unwrap());
    let rs = alg.mul(&r, &s);
    println!("r·s = {}", alg.display(&rs));
    println!("δ̃_alpha(r·s) = {}", alg.display(&alg.transduce_exact(alpha, &rs)));

    for e in 0..q.num_edges() {
        assert!(alg.check_right_derivation(e, &r, &s));
    }
}
