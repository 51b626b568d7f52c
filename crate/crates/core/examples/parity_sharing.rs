//! Two 4-cycles sharing their parity port: only the joint states that agree
//! survive, and they split into two orbits.

use rsm::cli::Model;
use rsm::sim;

fn main() {
    let model = Model::load(include_str!("../fixtures/parity_4x4.json")).expect("fixture loads");
    let composite = model.compose().expect("wiring applies");
    let a = composite.as_automaton().expect("automaton");
    let g = sim::graph(a).unwrap();
    for component in g.components() {
        let names: Vec<&str> = component.iter().map(|&s| a.states().name(s)).collect();
        println!("orbit: {}", names.join(" "));
    }
    println!("{}", sim::summary(a).unwrap());
}
