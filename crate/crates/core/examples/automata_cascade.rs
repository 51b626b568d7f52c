//! A blinker drives a mod-2 adder; the composite walks one 4-cycle.

use rsm::automata::{alphabet_map, Alphabet};
use rsm::sim;
use rsm::{act, Automaton, FinSet, Interface, RsmMorphism, Slot, TypedFinSet};

fn main() {
    let bits = alphabet_map(&[Alphabet::range("bit", 2).unwrap()]).unwrap();

    let iface = Interface::uniform(&["x"], &[], &[], "bit").unwrap();
    let mut adder = Automaton::builder(bits.clone(), FinSet::range(2), iface.clone()).unwrap();
    for (s, x) in [("0", "0"), ("0", "1"), ("1", "0"), ("1", "1")] {
        let next = ((s == "1") ^ (x == "1")) as u8;
        adder.transition(s, &[x], &[&next.to_string()]).unwrap();
    }
    let adder = adder.build().unwrap();

    let out = Interface::uniform(&[], &["o"], &[], "bit").unwrap();
    let mut blinker = Automaton::builder(bits, FinSet::range(2), out.clone()).unwrap();
    blinker
        .transition("0", &[], &["1"])
        .unwrap()
        .transition("1", &[], &["0"])
        .unwrap()
        .readout("0", &["0"])
        .unwrap()
        .readout("1", &["1"])
        .unwrap();
    let blinker = blinker.build().unwrap();

    let wiring = RsmMorphism::build(
        vec![Slot::new("adder", iface), Slot::new("sender", out)],
        Interface::unit(),
        &[("adder.x", "sender.o")],
        &[],
        TypedFinSet::empty(),
        &[],
        &[],
    )
    .unwrap();
    let composite = act(&wiring, &[adder.into(), blinker.into()]).unwrap();
    let a = composite.filling.as_automaton().unwrap();
    let g = sim::graph(a).unwrap();
    for (from, to) in g.named_edges() {
        println!("{from} -> {to}");
    }
    println!("{}", sim::summary(a).unwrap());
}
