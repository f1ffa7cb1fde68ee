//! Fields over a tree of components, and their amalgamation into one field.

use poset_leavitt::quiver::samples;
use poset_leavitt::scalars::FieldTower;

pub fn main() {
    let poset = samples::chain3().condense().expect("chain condenses");
    let tower = FieldTower::new(&poset).expect("chain is a tree");
    let (u, w) = (tower.class_by_name("u").unwrap(), tower.class_by_name("w").unwrap());

    // K_u = ℚ(x_u) sits inside K_w = ℚ(x_u, x_v, x_w)
    let xu = tower.var(u);
    let xw = tower.var(w);
    let s = tower.add(&xu, &xw).unwrap();
    let t = tower.inv(&s).unwrap();
    println!("x_u + x_w = {}, inverse {}", tower.display(s.value()), tower.display(t.value()));
    assert_eq!(s.home(), w);

    let amal = tower.amalgamate();
    println!("amalgamated field has {} variables", amal.vars.len());
    for i in 0..tower.num_classes() {
        assert_eq!(amal.apply(i, xu.value()), amal.apply(u, xu.value()));
    }
}
