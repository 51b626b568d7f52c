#![allow(dead_code)]

pub mod degenerate;
pub mod props;

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use rsm::automata::{alphabet_map, Alphabet};
use rsm::cli::Model;
use rsm::expr::{PolyMap, Rational};
use rsm::ode::REAL;
use rsm::wiring::{PortCospan, Prism};
use rsm::{Automaton, FinMap, FinSet, Interface, OdeSystem, Polynomial, RsmMorphism, Slot, TypedFinSet};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn load(name: &str) -> Model {
    let text = std::fs::read_to_string(fixture(name)).unwrap();
    Model::load(&text).unwrap()
}

pub fn bits() -> BTreeMap<String, FinSet> {
    alphabet_map(&[Alphabet::range("bit", 2).unwrap()]).unwrap()
}

/// `n`-cycle exposing the parity of its state on port `p`.
pub fn cycle(n: usize) -> Automaton {
    let iface = Interface::uniform(&[], &[], &["p"], "bit").unwrap();
    let mut b = Automaton::builder(bits(), FinSet::range(n), iface).unwrap();
    for s in 0..n {
        b.transition(&s.to_string(), &[], &[&((s + 1) % n).to_string()])
            .unwrap()
            .observe(&s.to_string(), &[&(s % 2).to_string()])
            .unwrap();
    }
    b.build().unwrap()
}

/// The 2-cycle reading out its state on `o`.
pub fn blinker() -> Automaton {
    let iface = Interface::uniform(&[], &["o"], &[], "bit").unwrap();
    let mut b = Automaton::builder(bits(), FinSet::range(2), iface).unwrap();
    b.transition("0", &[], &["1"])
        .unwrap()
        .transition("1", &[], &["0"])
        .unwrap()
        .readout("0", &["0"])
        .unwrap()
        .readout("1", &["1"])
        .unwrap();
    b.build().unwrap()
}

/// Mod-2 adder: state plus input bit.
pub fn adder() -> Automaton {
    let iface = Interface::uniform(&["x"], &[], &[], "bit").unwrap();
    let mut b = Automaton::builder(bits(), FinSet::range(2), iface).unwrap();
    for r in 0..2 {
        for x in 0..2 {
            b.transition(&r.to_string(), &[&x.to_string()], &[&((r + x) % 2).to_string()])
                .unwrap();
        }
    }
    b.build().unwrap()
}

/// Wiring that feeds `adder.x` from `sender.o` and shares nothing.
pub fn cascade_wiring() -> RsmMorphism {
    RsmMorphism::build(
        vec![
            Slot::new("adder", adder().interface().clone()),
            Slot::new("sender", blinker().interface().clone()),
        ],
        Interface::unit(),
        &[("adder.x", "sender.o")],
        &[],
        TypedFinSet::empty(),
        &[],
        &[],
    )
    .unwrap()
}

/// Wiring that identifies the parity ports of two cycles.
pub fn parity_wiring() -> RsmMorphism {
    let iface = cycle(2).interface().clone();
    RsmMorphism::build(
        vec![Slot::new("left", iface.clone()), Slot::new("right", iface)],
        Interface::unit(),
        &[],
        &[],
        TypedFinSet::new([("q", "bit")]).unwrap(),
        &[("left.p", "q"), ("right.p", "q")],
        &[],
    )
    .unwrap()
}

/// Transitions of a closed automaton by state name.
pub fn edges(a: &Automaton) -> BTreeSet<(String, String)> {
    a.update_table()
        .iter()
        .enumerate()
        .flat_map(|(s, row)| {
            row.iter()
                .flatten()
                .map(move |&t| (a.states().name(s).to_string(), a.states().name(t).to_string()))
        })
        .collect()
}

pub fn pairs(list: &[(&str, &str)]) -> BTreeSet<(String, String)> {
    list.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
}

// ---- random generators ----

pub fn port_names(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|k| format!("{prefix}{k}")).collect()
}

fn typed(names: &[String], ty: &str) -> TypedFinSet {
    TypedFinSet::uniform(FinSet::new(names.iter().cloned()).unwrap(), ty)
}

pub fn random_interface(rng: &mut ChaCha8Rng, ty: &str, max: [usize; 3]) -> Interface {
    Interface::new(
        typed(&port_names("i", rng.gen_range(0..=max[0])), ty),
        typed(&port_names("o", rng.gen_range(0..=max[1])), ty),
        typed(&port_names("e", rng.gen_range(0..=max[2])), ty),
    )
    .unwrap()
}

/// Random automaton over bits with at most `max_states` states.
pub fn random_automaton(rng: &mut ChaCha8Rng, iface: &Interface, max_states: usize) -> Automaton {
    let n = rng.gen_range(1..=max_states);
    let size = |t: &TypedFinSet| 1usize << t.len();
    let inputs = size(iface.inputs());
    let update = (0..n)
        .map(|_| {
            (0..inputs)
                .map(|_| (0..n).filter(|_| rng.gen_bool(0.4)).collect())
                .collect()
        })
        .collect();
    let readout = (0..n).map(|_| rng.gen_range(0..size(iface.outputs()))).collect();
    let obs = (0..n).map(|_| rng.gen_range(0..size(iface.exposed()))).collect();
    Automaton::new(bits(), FinSet::range(n), iface.clone(), update, readout, obs).unwrap()
}

fn small_rational(rng: &mut ChaCha8Rng) -> Rational {
    Rational::new(rng.gen_range(-3i64..=3).into(), rng.gen_range(1i64..=2).into())
}

/// Random polynomial of low degree in `names`.
pub fn random_poly(rng: &mut ChaCha8Rng, names: &[String]) -> Polynomial {
    let mut p = Polynomial::zero();
    for _ in 0..rng.gen_range(0..=3) {
        let mut t = Polynomial::constant(small_rational(rng));
        for _ in 0..rng.gen_range(0..=2) {
            if let Some(n) = names.choose(rng) {
                t = &t * &Polynomial::var(n);
            }
        }
        p = &p + &t;
    }
    p
}

/// Random one- or two-variable system with real ports.
pub fn random_ode(rng: &mut ChaCha8Rng, iface: &Interface) -> OdeSystem {
    let vars: Vec<String> = port_names("x", rng.gen_range(1..=2));
    let var_set = FinSet::new(vars.iter().cloned()).unwrap();
    let mut field_names = vars.clone();
    field_names.extend(iface.inputs().base().iter().map(String::from));
    field_names.push("k".into());
    let field = PolyMap::new(
        var_set.clone(),
        vars.iter().map(|_| random_poly(rng, &field_names)).collect(),
    )
    .unwrap();
    let readout = PolyMap::new(
        iface.outputs().base().clone(),
        iface.outputs().iter().map(|_| random_poly(rng, &vars)).collect(),
    )
    .unwrap();
    let ports = FinMap::from_indices(
        iface.exposed().base().clone(),
        var_set.clone(),
        (0..iface.exposed().len())
            .map(|_| rng.gen_range(0..vars.len()))
            .collect(),
    )
    .unwrap();
    OdeSystem::new(var_set, ["k".to_string()].into(), field, readout, ports, iface.clone()).unwrap()
}

/// Random well-formed wiring from `domain` into `codomain`, all ports of type `ty`.
///
/// Outer outputs are only requested when some inner output exists to drive
/// them.
pub fn random_morphism(rng: &mut ChaCha8Rng, domain: Vec<Slot>, codomain: Interface, ty: &str) -> RsmMorphism {
    let q = |s: &Slot, p: &str| format!("{}.{}", s.label, p);
    let inner_inputs: Vec<String> = domain
        .iter()
        .flat_map(|s| s.interface.inputs().base().iter().map(|p| q(s, p)).collect::<Vec<_>>())
        .collect();
    let inner_outputs: Vec<String> = domain
        .iter()
        .flat_map(|s| s.interface.outputs().base().iter().map(|p| q(s, p)).collect::<Vec<_>>())
        .collect();
    let inner_exposed: Vec<String> = domain
        .iter()
        .flat_map(|s| s.interface.exposed().base().iter().map(|p| q(s, p)).collect::<Vec<_>>())
        .collect();
    let mut sources = inner_outputs.clone();
    sources.extend(codomain.inputs().base().iter().map(String::from));

    let codomain = if inner_outputs.is_empty() && !codomain.outputs().is_empty() {
        Interface::new(
            codomain.inputs().clone(),
            TypedFinSet::empty(),
            codomain.exposed().clone(),
        )
        .unwrap()
    } else {
        codomain
    };
    // an inner input with nowhere to come from makes the outer box grow one
    let codomain = if sources.is_empty() && !inner_inputs.is_empty() {
        sources.push("in".into());
        Interface::new(
            typed(&["in".into()], ty),
            codomain.outputs().clone(),
            codomain.exposed().clone(),
        )
        .unwrap()
    } else {
        codomain
    };

    let feeds: Vec<(String, String)> = inner_inputs
        .iter()
        .map(|i| (i.clone(), sources.choose(rng).unwrap().clone()))
        .collect();
    let drives: Vec<(String, String)> = codomain
        .outputs()
        .base()
        .iter()
        .map(|o| (o.to_string(), inner_outputs.choose(rng).unwrap().clone()))
        .collect();
    let needs_apex = !inner_exposed.is_empty() || !codomain.exposed().is_empty();
    let apex_names = port_names("q", rng.gen_range(usize::from(needs_apex)..=2));
    let inner: Vec<(String, String)> = inner_exposed
        .iter()
        .map(|e| (e.clone(), apex_names.choose(rng).unwrap().clone()))
        .collect();
    let outer: Vec<(String, String)> = codomain
        .exposed()
        .base()
        .iter()
        .map(|e| (e.to_string(), apex_names.choose(rng).unwrap().clone()))
        .collect();
    let m = RsmMorphism::build(
        domain,
        codomain,
        &as_refs(&feeds),
        &as_refs(&drives),
        typed(&apex_names, ty),
        &as_refs(&inner),
        &as_refs(&outer),
    )
    .unwrap();
    assert!(m.validate().is_empty(), "{:?}", m.validate());
    m
}

pub fn as_refs(v: &[(String, String)]) -> Vec<(&str, &str)> {
    v.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect()
}

/// Identity prism plus a given cospan: pure sharing.
pub fn sharing_only(domain: Vec<Slot>, codomain: Interface, cospan: PortCospan) -> RsmMorphism {
    let m = RsmMorphism::build(domain, codomain, &[], &[], TypedFinSet::empty(), &[], &[]).unwrap();
    RsmMorphism { ports: cospan, ..m }
}

/// Prism plus the identity cospan on exposed ports: pure machine wiring.
pub fn wiring_only(domain: Vec<Slot>, codomain: Interface, prism: Prism) -> RsmMorphism {
    let m = RsmMorphism::build(domain, codomain, &[], &[], TypedFinSet::empty(), &[], &[]).unwrap();
    RsmMorphism { prism, ..m }
}

pub fn real() -> &'static str {
    REAL
}
