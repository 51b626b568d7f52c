//! The two finite limits the library is built on.

use rsm::finset::{pullback, pushout};
use rsm::{FinMap, FinSet};

fn main() {
    let s = FinSet::new(["s0", "s1", "s2"]).unwrap();
    let q = FinSet::new(["q0", "q1"]).unwrap();
    let m = FinSet::new(["even", "odd"]).unwrap();
    let p = FinMap::from_pairs(s, m.clone(), [("s0", "even"), ("s1", "odd"), ("s2", "even")]).unwrap();
    let i = FinMap::from_pairs(q, m, [("q0", "even"), ("q1", "even")]).unwrap();
    let pb = pullback(&p, &i).unwrap();
    println!("pullback: {:?}", pb.apex.iter().collect::<Vec<_>>());

    // glue two variables of A to one of B through the shared ports M
    let ports = FinSet::new(["u", "v"]).unwrap();
    let a = FinSet::new(["x", "y", "z"]).unwrap();
    let b = FinSet::new(["w"]).unwrap();
    let into_a = FinMap::from_pairs(ports.clone(), a, [("u", "x"), ("v", "y")]).unwrap();
    let into_b = FinMap::from_pairs(ports, b, [("u", "w"), ("v", "w")]).unwrap();
    let po = pushout(&into_a, &into_b).unwrap();
    println!("pushout: {:?}", po.apex.iter().collect::<Vec<_>>());
    for name in ["x", "y", "z"] {
        let k = po.inj1.dom().index_of(name).unwrap();
        println!("  {name} -> {}", po.apex.name(po.inj1.at(k)));
    }
}
