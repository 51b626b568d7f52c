//! Rabbits feed fox growth through a machine wire, while both populations
//! stay exposed as shared resources of the composite.

use rsm::cli::Model;

fn main() {
    let model = Model::load(include_str!("../fixtures/growth_cascade.json")).expect("fixture loads");
    let composite = model.compose().expect("wiring applies");
    let sys = composite.as_ode().expect("vector field");
    for v in sys.vars().iter() {
        println!("d{v}/dt = {}", sys.velocity(v).unwrap());
    }
    let exposed: Vec<_> = sys.interface().exposed().iter().map(|(p, _)| p).collect();
    println!("exposed: {exposed:?}");
}
