//! Level sets, parity classes, B-sets and tiles of a small ternary tree.

use treemix::tree::Tree;

fn main() -> treemix::Result<()> {
    let t = Tree::new(3, 2)?;
    let dec = t.decompose(1)?;
    println!("d = {}, h = {}: {} internal vertices, {} boundary slots, {} edges", dec.d, dec.h, dec.n, dec.boundary_slots, dec.edges);
    for (i, l) in dec.levels.iter().enumerate() {
        println!("L_{i}: {l:?}");
    }
    println!("even: {:?}\nodd:  {:?}", dec.even, dec.odd);
    for (i, b) in dec.b_sets.iter().enumerate() {
        println!("B_{}^1: {b:?}", i + 1);
    }
    for tile in &dec.tiles {
        println!("T_{}: {} vertices in {} pieces", tile.j, tile.vertices.len(), tile.pieces.len());
    }
    Ok(())
}
