//! Four one-variable boxes glued into the predator-prey system.

use rsm::cli::Model;

fn main() {
    let model = Model::load(include_str!("../fixtures/lotka_volterra.json")).expect("fixture loads");
    let composite = model.compose().expect("wiring applies");
    let sys = composite.as_ode().expect("vector field");
    for v in sys.vars().iter() {
        println!("d{v}/dt = {}", sys.velocity(v).unwrap());
    }
    println!("parameters: {:?}", sys.params());
}
