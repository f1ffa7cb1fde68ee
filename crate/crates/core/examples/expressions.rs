//! Evaluating the expression language used by `plk eval`.

use poset_leavitt::parse::Evaluator;
use poset_leavitt::pathalg::PathAlgebra;
use poset_leavitt::qalg::QAlgebra;
use poset_leavitt::quiver::samples;

pub fn main() {
    let q = QAlgebra::new(PathAlgebra::from_graph(&samples::toeplitz()).unwrap());
    let ev = Evaluator::new(&q);
    for src in ["(x_u)*alpha.f + 2*v", "~alpha . alpha", "f . ~f", "inv(1 - x_u*alpha) . ~alpha"] {
        let v = ev.eval_str(src).unwrap();
        println!("{src:32} ↦ [{}] {}", v.kind(), ev.display(&v, 3));
    }
    let err = ev.eval_str("alpha . ").unwrap_err();
    println!("{err}");
}
