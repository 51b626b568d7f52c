//! Plugging wirings into the slots of another wiring gives the same system
//! as applying them in stages.

use rsm::cli::Model;
use rsm::rsm::act_in;
use rsm::wiring::substitute;

fn main() {
    let model = Model::load(include_str!("../fixtures/lotka_volterra_staged.json")).expect("fixture loads");
    let staged = model.compose().expect("wiring applies");

    let m = &model.morphisms;
    let plugged = substitute(&m["pool"], &[m["feed"].clone(), m["hunt"].clone()]).expect("slots match");
    let slots: Vec<&str> = plugged.morphism.domain.iter().map(|s| s.label.as_str()).collect();
    println!("substituted wiring slots: {slots:?}");

    let boxes: Vec<_> = ["rabbit_growth", "fox_growth", "fox_decline", "rabbit_decline"]
        .iter()
        .map(|b| model.boxes[*b].clone())
        .collect();
    let once = act_in(&model.doctrine, &plugged.morphism, &boxes).expect("wiring applies");

    // the one-shot variables are named after the substituted apex
    let (a, b) = (staged.as_ode().unwrap(), once.filling.as_ode().unwrap());
    for v in a.vars().iter() {
        println!("staged d{v}/dt = {}", a.velocity(v).unwrap());
    }
    for v in b.vars().iter() {
        println!("one-shot d{v}/dt = {}", b.velocity(v).unwrap());
    }
}
