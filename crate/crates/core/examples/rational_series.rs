//! Rational series: inverting `1 − x_u·alpha − f`, splitting along `{v}`
//! and the corner formula.

use std::collections::BTreeSet;

use poset_leavitt::parse::{Evaluator, Value};
use poset_leavitt::pathalg::PathAlgebra;
use poset_leavitt::qalg::QAlgebra;
use poset_leavitt::quiver::samples;
use poset_leavitt::ratseries::{check_inverse_factorization, corner_formula, split_by_hereditary};

pub fn main() {
    let q = QAlgebra::new(PathAlgebra::from_graph(&samples::toeplitz()).unwrap());
    let alg = q.base();
    let ev = Evaluator::new(&q);
    let Ok(Value::Rational(x)) = ev.eval_str("inv(1 - x_u*alpha - f)") else {
        unreachable!("a path element with invertible augmentation")
    };
    println!("x = {}", x.display(alg));
    println!("x ≈ {}", alg.display_series(&x.expand(3)));

    let v = alg.quiver().vertex("v").unwrap();
    let h = BTreeSet::from([v]);
    let split = split_by_hereditary(alg, x.trans(), &h).unwrap();
    assert!(split.orthogonality_holds());
    assert!(check_inverse_factorization(alg, x.trans(), &h, 6).unwrap());

    let corner = corner_formula(alg, &x, &h, 6).unwrap();
    println!("p_v·x·p_v ≈ {}", alg.display_series(&corner));
}
