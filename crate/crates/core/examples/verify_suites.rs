//! Running the property suites on one graph with a fixed seed.

use poset_leavitt::monoid::SearchBound;
use poset_leavitt::pathalg::PathAlgebra;
use poset_leavitt::qalg::QAlgebra;
use poset_leavitt::quiver::samples;
use poset_leavitt::verify::{run_all, Budget};

pub fn main() {
    let q = QAlgebra::new(PathAlgebra::from_graph(&samples::chain3()).unwrap());
    let budget = Budget {
        factorization: 20,
        corner: 10,
        derivation: 50,
        transduction: 20,
        sigma_prime: 10,
        free_inverse: 10,
        amalgamation: 5,
        confluence: 30,
    };
    for s in run_all(&q, 7, 6, SearchBound::default(), budget) {
        println!("{} {} ({} cases)", if s.passed { "PASS" } else { "FAIL" }, s.suite, s.cases);
        assert!(s.passed, "{:?}", s.counterexample);
    }
}
