//! Condensing a graph into its component poset and checking the tree shape.

use poset_leavitt::quiver::{samples, validate_abp_shape, GraphFile};

pub fn main() {
    let g = samples::tree3();
    let poset = g.condense().unwrap();
    let root = poset.assert_tree().unwrap();
    println!("root {}, covers {:?}", poset.name(root), poset.lower_covers(root).iter().map(|&c| poset.name(c)).collect::<Vec<_>>());

    let (free, regular) = g.shape_sets(&poset).unwrap();
    let shape = validate_abp_shape(&g.quiver, &poset, &free, &regular).unwrap();
    println!("free loops: {:?}", shape.free_loops.values().map(|&(_, e)| g.quiver.edge_name(e)).collect::<Vec<_>>());

    let hereditary = g.quiver.hereditary_subsets();
    println!("{} hereditary vertex sets", hereditary.len());

    let forest = GraphFile::parse("vertex a\nvertex b\n").unwrap();
    let err = forest.condense().unwrap().assert_tree().unwrap_err();
    println!("{err}");
}
