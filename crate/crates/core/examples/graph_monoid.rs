//! The graph monoid: presentations and the bounded word problem.

use poset_leavitt::leavitt::LeavittAlgebra;
use poset_leavitt::monoid::{mon_equal, vmonoid_generators_check, MonoidElement, MonoidVerdict, SearchBound};
use poset_leavitt::pathalg::PathAlgebra;
use poset_leavitt::quiver::samples;

pub fn main() {
    let l = LeavittAlgebra::new(PathAlgebra::from_graph(&samples::toeplitz()).unwrap());
    let q = l.quiver();
    let p = vmonoid_generators_check(&l).unwrap();
    println!("relations: {:?}", p.relations);
    assert!(p.all_witnessed());

    let a = MonoidElement::parse(q, "u").unwrap();
    let b = MonoidElement::parse(q, "u+v").unwrap();
    match mon_equal(q, &a, &b, SearchBound::default()) {
        MonoidVerdict::Equal { witness, .. } => println!("u = u+v via {}", witness.display(q)),
        other => panic!("{other:?}"),
    }
}
