//! Labelings of typed ports, and pulling one back along a port map.

use rsm::automata::{alphabet_map, Alphabet};
use rsm::finset::Labelings;
use rsm::{FinMap, TypedFinSet};

fn main() {
    let alphabets = alphabet_map(&[Alphabet::range("bit", 2).unwrap(), Alphabet::range("trit", 3).unwrap()]).unwrap();
    let ports = TypedFinSet::new([("a", "bit"), ("b", "trit")]).unwrap();
    let space = Labelings::new(&ports, &alphabets).unwrap();
    // the last port varies fastest
    for (k, name) in space.elements().iter().enumerate() {
        println!("{k}: {name} = {:?}", space.tuple(k));
    }

    // reading port `a` twice pulls a labeling of {a, b} back to {x, y}
    let twice = TypedFinSet::new([("x", "bit"), ("y", "bit")]).unwrap();
    let f = FinMap::from_pairs(twice.base().clone(), ports.base().clone(), [("x", "a"), ("y", "a")]).unwrap();
    let pulled = Labelings::new(&twice, &alphabets).unwrap();
    let pull = pulled.pull_map(&f, &space).unwrap();
    for k in 0..space.elements().len() {
        println!("{} -> {}", space.elements().name(k), pulled.elements().name(pull.at(k)));
    }
}
