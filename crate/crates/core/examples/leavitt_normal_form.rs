//! Normal forms in the Leavitt algebra of the two-petal rose.

use poset_leavitt::leavitt::LeavittAlgebra;
use poset_leavitt::pathalg::PathAlgebra;
use poset_leavitt::quiver::samples;

pub fn main() {
    let l = LeavittAlgebra::new(PathAlgebra::from_graph(&samples::rose2()).unwrap());
    let q = l.quiver();
    let (e1, e2) = (q.edge("e1").unwrap(), q.edge("e2").unwrap());

    let x = l.mul(&l.edge(e2), &l.ghost(e2));
    println!("e2·~e2 = {}", l.display(&x));
    println!("~e1·e1 = {}", l.display(&l.mul(&l.ghost(e1), &l.edge(e1))));

    let report = l.check_defining_relations();
    println!("{} relation instances, all hold: {}", report.checks.len(), report.all_hold());
    assert!(report.all_hold());

    let w = l.projective_witness(q.vertex("w").unwrap()).unwrap();
    assert!(w.certified);
}
