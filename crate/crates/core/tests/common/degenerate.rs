//! Wirings that only wire or only share, compared with tensor-then-wire and
//! tensor-then-share done by hand.

use std::collections::BTreeMap;

use rsm::cli::model::ComposeExpr;
use rsm::cli::Model;
use rsm::rsm::{act_in, Doctrine, Trace};
use rsm::wiring::{PortCospan, Prism};
use rsm::{Automaton, FilledBox, FinMap, FinSet, Interface, OdeSystem, RsmMorphism};

/// `m` with its cospan replaced by the identity on inner exposed ports.
pub fn machine_part(m: &RsmMorphism) -> RsmMorphism {
    let (_, _, exposed) = m.inner_sums().unwrap();
    let codomain = Interface::new(
        m.codomain.inputs().clone(),
        m.codomain.outputs().clone(),
        exposed.clone(),
    )
    .unwrap();
    RsmMorphism {
        domain: m.domain.clone(),
        codomain,
        prism: m.prism.clone(),
        ports: PortCospan {
            inner: FinMap::identity(exposed.base()),
            outer: FinMap::identity(exposed.base()),
            apex: exposed,
        },
    }
}

/// `m` with its prism replaced by the identity: every inner input becomes an
/// outer input and every inner output an outer output.
pub fn sharing_part(m: &RsmMorphism) -> RsmMorphism {
    let (inputs, outputs, _) = m.inner_sums().unwrap();
    let codomain = Interface::new(inputs.clone(), outputs.clone(), m.codomain.exposed().clone()).unwrap();
    let sources = FinSet::new(outputs.base().iter().chain(inputs.base().iter())).unwrap();
    let phi_in = FinMap::from_indices(
        inputs.base().clone(),
        sources,
        (0..inputs.len()).map(|k| outputs.len() + k).collect(),
    )
    .unwrap();
    RsmMorphism {
        domain: m.domain.clone(),
        codomain,
        prism: Prism {
            phi_in,
            phi_out: FinMap::identity(outputs.base()),
        },
        ports: m.ports.clone(),
    }
}

fn labels(m: &RsmMorphism) -> Vec<&str> {
    m.domain.iter().map(|s| s.label.as_str()).collect()
}

/// Map defined by matching keys on both sides.
fn match_keys<K: Ord>(
    dom: &FinSet,
    cod: &FinSet,
    dom_key: impl Fn(usize) -> K,
    cod_key: impl Fn(usize) -> K,
) -> Option<FinMap> {
    let index: BTreeMap<K, usize> = (0..cod.len()).map(|y| (cod_key(y), y)).collect();
    if index.len() != cod.len() {
        return None;
    }
    let map = (0..dom.len())
        .map(|x| index.get(&dom_key(x)).copied())
        .collect::<Option<Vec<_>>>()?;
    let f = FinMap::from_indices(dom.clone(), cod.clone(), map).ok()?;
    f.is_bijection().then_some(f)
}

/// Acting by the machine part equals tensoring and wiring directly.
pub fn machine_recovered(doctrine: &Doctrine, m: &RsmMorphism, fillings: &[FilledBox]) -> bool {
    let mm = machine_part(m);
    let out = act_in(doctrine, &mm, fillings).unwrap();
    match (&out.filling, &out.trace) {
        (FilledBox::Ode(got), Trace::Ode { injections, .. }) => {
            let parts: Vec<(&str, &OdeSystem)> = labels(m)
                .into_iter()
                .zip(fillings.iter().map(|f| f.as_ode().unwrap()))
                .collect();
            let t = OdeSystem::tensor_labeled(&parts).unwrap();
            let direct = t.system.wire(&mm.prism, &mm.codomain).unwrap();
            let beta = assemble(direct.vars(), got.vars(), &t.injections, injections);
            beta.is_some_and(|b| direct.rename_vars(&b).unwrap() == *got)
        }
        (FilledBox::Automata(got), Trace::Automata { projections, .. }) => {
            let parts: Vec<(&str, &Automaton)> = labels(m)
                .into_iter()
                .zip(fillings.iter().map(|f| f.as_automaton().unwrap()))
                .collect();
            let t = Automaton::tensor_labeled(&parts).unwrap();
            let base = with_extra(doctrine, &t.automaton);
            let direct = base.wire(&mm.prism, &mm.codomain).unwrap();
            let beta = match_keys(
                direct.states(),
                got.states(),
                |x| t.projections.iter().map(|p| p.at(x)).collect::<Vec<_>>(),
                |y| projections.iter().map(|p| p.at(y)).collect::<Vec<_>>(),
            );
            beta.is_some_and(|b| direct.rename_states(&b).unwrap() == *got)
        }
        _ => false,
    }
}

/// Acting by the sharing part equals tensoring and sharing directly.
pub fn sharing_recovered(doctrine: &Doctrine, m: &RsmMorphism, fillings: &[FilledBox]) -> bool {
    let sm = sharing_part(m);
    let out = act_in(doctrine, &sm, fillings).unwrap();
    match (&out.filling, &out.trace) {
        (FilledBox::Ode(got), Trace::Ode { injections, .. }) => {
            let parts: Vec<(&str, &OdeSystem)> = labels(m)
                .into_iter()
                .zip(fillings.iter().map(|f| f.as_ode().unwrap()))
                .collect();
            let t = OdeSystem::tensor_labeled(&parts).unwrap();
            let shared = t.system.share(&m.ports).unwrap();
            let through: Vec<FinMap> = t.injections.iter().map(|j| j.then(&shared.quotient).unwrap()).collect();
            let beta = assemble(shared.system.vars(), got.vars(), &through, injections);
            beta.is_some_and(|b| shared.system.rename_vars(&b).unwrap() == *got)
        }
        (FilledBox::Automata(got), Trace::Automata { projections, apex }) => {
            let parts: Vec<(&str, &Automaton)> = labels(m)
                .into_iter()
                .zip(fillings.iter().map(|f| f.as_automaton().unwrap()))
                .collect();
            let t = Automaton::tensor_labeled(&parts).unwrap();
            let shared = with_extra(doctrine, &t.automaton).share(&m.ports).unwrap();
            let beta = match_keys(
                shared.automaton.states(),
                got.states(),
                |x| {
                    let s = shared.states.at(x);
                    (
                        t.projections.iter().map(|p| p.at(s)).collect::<Vec<_>>(),
                        shared.apex.at(x),
                    )
                },
                |y| (projections.iter().map(|p| p.at(y)).collect::<Vec<_>>(), apex.at(y)),
            );
            beta.is_some_and(|b| shared.automaton.rename_states(&b).unwrap() == *got)
        }
        _ => false,
    }
}

fn with_extra(doctrine: &Doctrine, a: &Automaton) -> Automaton {
    match doctrine {
        Doctrine::Automata(extra) => a.with_alphabets(extra).unwrap(),
        Doctrine::Ode => a.clone(),
    }
}

/// Bijection sending `from[k](v)` to `to[k](v)` for every part `k`.
fn assemble(dom: &FinSet, cod: &FinSet, from: &[FinMap], to: &[FinMap]) -> Option<FinMap> {
    let mut map = vec![None; dom.len()];
    for (f, g) in from.iter().zip(to) {
        for v in 0..f.dom().len() {
            match map[f.at(v)] {
                Some(y) if y != g.at(v) => return None,
                _ => map[f.at(v)] = Some(g.at(v)),
            }
        }
    }
    // shared ports that no variable reaches keep their names
    for (x, slot) in map.iter_mut().enumerate() {
        if slot.is_none() {
            *slot = cod.index_of(dom.name(x));
        }
    }
    let f = FinMap::from_indices(dom.clone(), cod.clone(), map.into_iter().collect::<Option<_>>()?).ok()?;
    f.is_bijection().then_some(f)
}

/// Every morphism application in the model's composition, with its fillings.
pub fn applications(model: &Model) -> Vec<(String, Vec<FilledBox>)> {
    fn walk(model: &Model, e: &ComposeExpr, out: &mut Vec<(String, Vec<FilledBox>)>) -> FilledBox {
        match e {
            ComposeExpr::Box(name) => model.boxes[name].clone(),
            ComposeExpr::Apply { morphism, args } => {
                let fillings: Vec<FilledBox> = args.iter().map(|a| walk(model, a, out)).collect();
                let result = act_in(&model.doctrine, &model.morphisms[morphism], &fillings).unwrap();
                out.push((morphism.clone(), fillings));
                result.filling
            }
        }
    }
    let mut out = Vec::new();
    walk(model, &model.file.compose, &mut out);
    out
}

/// Checks both degenerate cases on every application in a fixture; returns
/// the failures.
pub fn check_fixture(model: &Model) -> Vec<String> {
    let mut failures = Vec::new();
    for (name, fillings) in applications(model) {
        let m = &model.morphisms[&name];
        if !machine_recovered(&model.doctrine, m, &fillings) {
            failures.push(format!("{name}: machine part"));
        }
        if !sharing_recovered(&model.doctrine, m, &fillings) {
            failures.push(format!("{name}: sharing part"));
        }
    }
    failures
}

pub const FIXTURES: [&str; 8] = [
    "lotka_volterra.json",
    "lotka_volterra_staged.json",
    "growth_cascade.json",
    "decline_cascade.json",
    "automata_cascade.json",
    "parity_4x4.json",
    "parity_4x3.json",
    "unit.json",
];
