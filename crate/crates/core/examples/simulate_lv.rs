//! Integrates the composed predator-prey system with RK4.

use rsm::cli::Model;
use rsm::sim::{integrate, Method};

fn main() {
    let model = Model::load(include_str!("../fixtures/lotka_volterra.json")).expect("fixture loads");
    let composite = model.compose().expect("wiring applies");
    let sys = composite.as_ode().expect("vector field");
    let traj = integrate(sys, &model.initial(), &model.parameters(), 20.0, 0.01, Method::Rk4).expect("integrates");
    for (k, t) in traj.times().iter().enumerate().step_by(200) {
        let row: Vec<String> = traj
            .vars()
            .iter()
            .map(|v| format!("{v}={:.4}", traj.series(v).unwrap()[k]))
            .collect();
        println!("t={t:5.2} {}", row.join(" "));
    }
}
