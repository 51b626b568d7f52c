//! Sharing a 4-cycle with a 3-cycle strands some joint states.

use rsm::cli::Model;
use rsm::sim;

fn main() {
    let model = Model::load(include_str!("../fixtures/parity_4x3.json")).expect("fixture loads");
    let composite = model.compose().expect("wiring applies");
    let a = composite.as_automaton().expect("automaton");
    println!("states: {:?}", a.states().iter().collect::<Vec<_>>());
    println!("dead: {:?}", sim::dead_states(a));
    print!("{}", sim::graph(a).unwrap().to_dot());
}
