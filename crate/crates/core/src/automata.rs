//! Non-deterministic automata with typed ports.
//!
//! Every port type names an [`Alphabet`]. Inputs, outputs and observations are
//! labelings of the corresponding port sets ([`Labelings`]), so an input
//! "letter" of a box is a tuple with one letter per input port. Update tables
//! are stored extensionally: one successor set per state and input tuple.
//!
//! Sharing keeps the pairs of a state and an apex labeling that agree on the
//! shared observations, and only allows moves into such pairs. Wiring reads
//! every fed input off the pre-update readout.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::finset::{pullback, tuple_name, FinMap, FinSet, FinSetError, Labelings, TypedFinSet};
use crate::wiring::{feed_sources, Interface, PortCospan, Prism, WiringError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AutomataError {
    #[error(transparent)]
    FinSet(#[from] FinSetError),
    #[error(transparent)]
    Wiring(#[from] WiringError),
    #[error("alphabet `{0}` has no letters")]
    EmptyAlphabet(String),
    #[error("alphabet `{0}` is declared twice with different letters")]
    AlphabetConflict(String),
    #[error("expected {expected} letters for {what}, got {found}")]
    TupleLength {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("state `{0}` has no {1}")]
    Missing(String, &'static str),
    #[error("port `{port}` of type `{expected}` is fed from type `{found}`")]
    TypeMismatch {
        port: String,
        expected: String,
        found: String,
    },
    #[error("{what} do not match: expected {expected}, found {found}")]
    Boundary {
        what: &'static str,
        expected: Box<FinSet>,
        found: Box<FinSet>,
    },
}

pub type Result<T> = std::result::Result<T, AutomataError>;

fn boundary(what: &'static str, expected: &FinSet, found: &FinSet) -> AutomataError {
    AutomataError::Boundary {
        what,
        expected: Box::new(expected.clone()),
        found: Box::new(found.clone()),
    }
}

/// A named, nonempty set of letters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    pub name: String,
    pub letters: FinSet,
}

impl Alphabet {
    pub fn new(name: impl Into<String>, letters: FinSet) -> Result<Self> {
        let name = name.into();
        if letters.is_empty() {
            return Err(AutomataError::EmptyAlphabet(name));
        }
        Ok(Self { name, letters })
    }

    /// Letters `0..n`.
    pub fn range(name: impl Into<String>, n: usize) -> Result<Self> {
        Self::new(name, FinSet::range(n))
    }
}

/// Collects alphabets by name.
pub fn alphabet_map<'a, I>(alphabets: I) -> Result<BTreeMap<String, FinSet>>
where
    I: IntoIterator<Item = &'a Alphabet>,
{
    let mut out = BTreeMap::new();
    for a in alphabets {
        if let Some(prev) = out.insert(a.name.clone(), a.letters.clone()) {
            if prev != a.letters {
                return Err(AutomataError::AlphabetConflict(a.name.clone()));
            }
        }
    }
    Ok(out)
}

/// An open automaton `(S, (u, r), p)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Automaton {
    alphabets: BTreeMap<String, FinSet>,
    states: FinSet,
    interface: Interface,
    inputs: Labelings,
    outputs: Labelings,
    observations: Labelings,
    update: Vec<Vec<BTreeSet<usize>>>,
    readout: Vec<usize>,
    obs: Vec<usize>,
}

struct Spaces {
    inputs: Labelings,
    outputs: Labelings,
    observations: Labelings,
}

impl Spaces {
    fn of(interface: &Interface, alphabets: &BTreeMap<String, FinSet>) -> Result<Self> {
        for set in [interface.inputs(), interface.outputs(), interface.exposed()] {
            for (_, ty) in set.iter() {
                match alphabets.get(ty) {
                    None => return Err(FinSetError::UnknownAlphabet(ty.to_string()).into()),
                    Some(a) if a.is_empty() => return Err(AutomataError::EmptyAlphabet(ty.to_string())),
                    Some(_) => {}
                }
            }
        }
        Ok(Self {
            inputs: Labelings::new(interface.inputs(), alphabets)?,
            outputs: Labelings::new(interface.outputs(), alphabets)?,
            observations: Labelings::new(interface.exposed(), alphabets)?,
        })
    }
}

fn letters_index(labelings: &Labelings, letters: &[&str], what: &'static str) -> Result<usize> {
    let ports = labelings.ports();
    if letters.len() != ports.len() {
        return Err(AutomataError::TupleLength {
            what,
            expected: ports.len(),
            found: letters.len(),
        });
    }
    let tuple = letters
        .iter()
        .enumerate()
        .map(|(k, l)| {
            let alphabet = labelings.alphabet(k);
            alphabet.index_of(l).ok_or_else(|| FinSetError::Unknown {
                elem: l.to_string(),
                set: Box::new(alphabet.clone()),
            })
        })
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(labelings.index_of(&tuple))
}

impl Automaton {
    /// Builds an automaton from index tables.
    ///
    /// `update[s][i]` is the successor set of state `s` on input labeling `i`,
    /// `readout[s]` an output labeling and `obs[s]` an observation labeling,
    /// all in the enumeration order of [`Labelings`].
    pub fn new(
        alphabets: BTreeMap<String, FinSet>,
        states: FinSet,
        interface: Interface,
        update: Vec<Vec<BTreeSet<usize>>>,
        readout: Vec<usize>,
        obs: Vec<usize>,
    ) -> Result<Self> {
        let spaces = Spaces::of(&interface, &alphabets)?;
        let n = states.len();
        let out_of_range = |index: usize, len: usize| FinSetError::OutOfRange { index, len };
        if update.len() != n || readout.len() != n || obs.len() != n {
            return Err(AutomataError::TupleLength {
                what: "state tables",
                expected: n,
                found: update.len().min(readout.len()).min(obs.len()),
            });
        }
        for row in &update {
            if row.len() != spaces.inputs.elements().len() {
                return Err(AutomataError::TupleLength {
                    what: "input labelings",
                    expected: spaces.inputs.elements().len(),
                    found: row.len(),
                });
            }
            if let Some(&t) = row.iter().flatten().find(|&&t| t >= n) {
                return Err(out_of_range(t, n).into());
            }
        }
        if let Some(&r) = readout.iter().find(|&&r| r >= spaces.outputs.elements().len()) {
            return Err(out_of_range(r, spaces.outputs.elements().len()).into());
        }
        if let Some(&o) = obs.iter().find(|&&o| o >= spaces.observations.elements().len()) {
            return Err(out_of_range(o, spaces.observations.elements().len()).into());
        }
        Ok(Self {
            alphabets,
            states,
            interface,
            inputs: spaces.inputs,
            outputs: spaces.outputs,
            observations: spaces.observations,
            update,
            readout,
            obs,
        })
    }

    /// Starts a name-based builder. Transitions that are never added are empty.
    pub fn builder(
        alphabets: BTreeMap<String, FinSet>,
        states: FinSet,
        interface: Interface,
    ) -> Result<AutomatonBuilder> {
        let spaces = Spaces::of(&interface, &alphabets)?;
        let n = states.len();
        let trivial = |l: &Labelings| (l.elements().len() == 1).then_some(0);
        Ok(AutomatonBuilder {
            update: vec![vec![BTreeSet::new(); spaces.inputs.elements().len()]; n],
            readout: vec![trivial(&spaces.outputs); n],
            obs: vec![trivial(&spaces.observations); n],
            alphabets,
            states,
            interface,
            spaces,
        })
    }

    /// One state, no ports, a self-loop.
    pub fn unit() -> Self {
        Self::new(
            BTreeMap::new(),
            FinSet::point(),
            Interface::unit(),
            vec![vec![BTreeSet::from([0])]],
            vec![0],
            vec![0],
        )
        .expect("unit automaton is well formed")
    }

    pub fn alphabets(&self) -> &BTreeMap<String, FinSet> {
        &self.alphabets
    }

    /// The same automaton with more alphabets available to later sharing.
    pub fn with_alphabets(&self, extra: &BTreeMap<String, FinSet>) -> Result<Automaton> {
        let mut out = self.clone();
        for (name, letters) in extra {
            if letters.is_empty() {
                return Err(AutomataError::EmptyAlphabet(name.clone()));
            }
            match out.alphabets.get(name) {
                Some(prev) if prev != letters => return Err(AutomataError::AlphabetConflict(name.clone())),
                _ => {
                    out.alphabets.insert(name.clone(), letters.clone());
                }
            }
        }
        Ok(out)
    }

    pub fn states(&self) -> &FinSet {
        &self.states
    }

    pub fn interface(&self) -> &Interface {
        &self.interface
    }

    /// Labelings of the input ports; the columns of the update table.
    pub fn input_space(&self) -> &Labelings {
        &self.inputs
    }

    pub fn output_space(&self) -> &Labelings {
        &self.outputs
    }

    pub fn observation_space(&self) -> &Labelings {
        &self.observations
    }

    pub fn successors(&self, state: usize, input: usize) -> &BTreeSet<usize> {
        &self.update[state][input]
    }

    pub fn update_table(&self) -> &[Vec<BTreeSet<usize>>] {
        &self.update
    }

    /// Output labeling read at a state.
    pub fn readout(&self, state: usize) -> usize {
        self.readout[state]
    }

    /// Observation labeling seen at a state.
    pub fn observation(&self, state: usize) -> usize {
        self.obs[state]
    }

    /// The observation map `p: S -> M` as a finite-set map.
    pub fn observation_map(&self) -> FinMap {
        FinMap::from_indices(
            self.states.clone(),
            self.observations.elements().clone(),
            self.obs.clone(),
        )
        .expect("observations were range checked")
    }

    /// Tensor of labelled automata. States are tuples of factor states, named
    /// `(s1,s2,...)`; a single factor keeps its state names.
    pub fn tensor_labeled(parts: &[(&str, &Automaton)]) -> Result<Tensored> {
        if parts.is_empty() {
            return Ok(Tensored {
                automaton: Automaton::unit(),
                projections: Vec::new(),
            });
        }
        let interface = Interface::tensor_labeled(parts.iter().map(|(l, a)| (*l, &a.interface)))?;
        let alphabets = alphabet_map(
            parts
                .iter()
                .flat_map(|(_, a)| a.alphabets.iter())
                .map(|(n, l)| Alphabet {
                    name: n.clone(),
                    letters: l.clone(),
                })
                .collect::<Vec<_>>()
                .iter(),
        )?;
        let spaces = Spaces::of(&interface, &alphabets)?;
        let factors: Vec<&Automaton> = parts.iter().map(|(_, a)| *a).collect();
        let tuples = product(&factors.iter().map(|a| a.states.len()).collect::<Vec<_>>());
        let states = FinSet::new(tuples.iter().map(|t| {
            let names: Vec<&str> = t.iter().zip(&factors).map(|(&s, a)| a.states.name(s)).collect();
            tuple_name(&names)
        }))?;
        let state_index =
            |t: &[usize]| -> usize { t.iter().zip(&factors).fold(0, |acc, (&s, a)| acc * a.states.len() + s) };
        let split = |space: &Labelings, of: fn(&Automaton) -> &Labelings, idx: usize| -> Vec<usize> {
            let tuple = space.tuple(idx);
            let mut at = 0;
            factors
                .iter()
                .map(|a| {
                    let own = of(a);
                    let k = own.ports().len();
                    let local = own.index_of(&tuple[at..at + k]);
                    at += k;
                    local
                })
                .collect()
        };
        let join = |space: &Labelings, of: fn(&Automaton) -> &Labelings, locals: &[usize]| -> usize {
            let tuple: Vec<usize> = factors
                .iter()
                .zip(locals)
                .flat_map(|(a, &l)| of(a).tuple(l).to_vec())
                .collect();
            space.index_of(&tuple)
        };
        let n_inputs = spaces.inputs.elements().len();
        let mut update = Vec::with_capacity(tuples.len());
        let mut readout = Vec::with_capacity(tuples.len());
        let mut obs = Vec::with_capacity(tuples.len());
        for t in &tuples {
            let row: Vec<BTreeSet<usize>> = (0..n_inputs)
                .map(|i| {
                    let locals = split(&spaces.inputs, |a| &a.inputs, i);
                    let sets: Vec<Vec<usize>> = factors
                        .iter()
                        .zip(t)
                        .zip(&locals)
                        .map(|((a, &s), &li)| a.update[s][li].iter().copied().collect())
                        .collect();
                    product_of(&sets).iter().map(|n| state_index(n)).collect()
                })
                .collect();
            update.push(row);
            let r: Vec<usize> = factors.iter().zip(t).map(|(a, &s)| a.readout[s]).collect();
            readout.push(join(&spaces.outputs, |a| &a.outputs, &r));
            let o: Vec<usize> = factors.iter().zip(t).map(|(a, &s)| a.obs[s]).collect();
            obs.push(join(&spaces.observations, |a| &a.observations, &o));
        }
        let projections = factors
            .iter()
            .enumerate()
            .map(|(k, a)| FinMap::from_indices(states.clone(), a.states.clone(), tuples.iter().map(|t| t[k]).collect()))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        let automaton = Automaton {
            alphabets,
            states,
            interface,
            inputs: spaces.inputs,
            outputs: spaces.outputs,
            observations: spaces.observations,
            update,
            readout,
            obs,
        };
        Ok(Tensored { automaton, projections })
    }

    /// Binary tensor with labels `l` and `r`.
    pub fn tensor(a: &Automaton, b: &Automaton) -> Result<Tensored> {
        Self::tensor_labeled(&[("l", a), ("r", b)])
    }

    /// Shares observations along a port cospan.
    ///
    /// The span of the action is obtained by pulling labelings back along
    /// both legs: `i: Label(Q) -> M` along the inner leg and
    /// `i': Label(Q) -> M'` along the outer one.
    pub fn share(&self, cospan: &PortCospan) -> Result<Shared> {
        let exposed = self.interface.exposed();
        if cospan.inner.dom() != exposed.base() {
            return Err(boundary("shared ports", exposed.base(), cospan.inner.dom()));
        }
        let outer_exposed = TypedFinSet::new(
            cospan
                .outer
                .dom()
                .iter()
                .enumerate()
                .map(|(k, m)| (m.to_string(), cospan.apex.type_at(cospan.outer.at(k)).to_string())),
        )?;
        if let Some(FinSetError::TypeMismatch { elem, expected, found }) =
            exposed.type_errors(&cospan.inner, &cospan.apex).into_iter().next()
        {
            return Err(AutomataError::TypeMismatch {
                port: elem,
                expected,
                found,
            });
        }
        let apex_space = Labelings::new(&cospan.apex, &self.alphabets)?;
        let outer_space = Labelings::new(&outer_exposed, &self.alphabets)?;
        let i = self.observations.pull_map(&cospan.inner, &apex_space)?;
        let i_prime = outer_space.pull_map(&cospan.outer, &apex_space)?;
        let interface = Interface::new(
            self.interface.inputs().clone(),
            self.interface.outputs().clone(),
            outer_exposed,
        )?;
        self.share_span(&i, &i_prime, interface)
    }

    /// Shares along a span `M <- Q -> M'` of finite sets, where `M` is the
    /// observation space and `M'` that of `interface.exposed`.
    pub fn share_span(&self, i: &FinMap, i_prime: &FinMap, interface: Interface) -> Result<Shared> {
        let spaces = Spaces::of(&interface, &self.alphabets)?;
        if i.cod() != self.observations.elements() {
            return Err(boundary("observations", self.observations.elements(), i.cod()));
        }
        if i_prime.cod() != spaces.observations.elements() {
            return Err(boundary(
                "outer observations",
                spaces.observations.elements(),
                i_prime.cod(),
            ));
        }
        if i.dom() != i_prime.dom() {
            return Err(boundary("span apex", i.dom(), i_prime.dom()));
        }
        let glued = pullback(&self.observation_map(), i)?;
        let by_s = glued.proj1.indices();
        let by_q = glued.proj2.indices();
        let index: BTreeMap<(usize, usize), usize> = by_s
            .iter()
            .zip(by_q)
            .enumerate()
            .map(|(k, (&s, &q))| ((s, q), k))
            .collect();
        let states = if i.is_injective() {
            FinSet::new(by_s.iter().map(|&s| self.states.name(s)))?
        } else {
            glued.apex.clone()
        };
        let index = &index;
        let compatible: Vec<Vec<usize>> = (0..self.states.len())
            .map(|s| (0..i.dom().len()).filter(|&q| i.at(q) == self.obs[s]).collect())
            .collect();
        let update = by_s
            .iter()
            .map(|&s| {
                self.update[s]
                    .iter()
                    .map(|next| {
                        next.iter()
                            .flat_map(|&t| compatible[t].iter().map(move |&q| index[&(t, q)]))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let automaton = Automaton {
            alphabets: self.alphabets.clone(),
            readout: by_s.iter().map(|&s| self.readout[s]).collect(),
            obs: by_q.iter().map(|&q| i_prime.at(q)).collect(),
            states: states.clone(),
            interface,
            inputs: spaces.inputs,
            outputs: spaces.outputs,
            observations: spaces.observations,
            update,
        };
        Ok(Shared {
            automaton,
            states: FinMap::from_indices(states.clone(), self.states.clone(), by_s.to_vec())?,
            apex: FinMap::from_indices(states, i.dom().clone(), by_q.to_vec())?,
        })
    }

    /// Feeds inputs per `prism`, reading inner outputs before the update.
    pub fn wire(&self, prism: &Prism, outer: &Interface) -> Result<Automaton> {
        let inputs = self.interface.inputs();
        let outputs = self.interface.outputs();
        let sources = feed_sources(outputs, outer)?;
        if prism.phi_in.dom() != inputs.base() {
            return Err(boundary("fed inputs", inputs.base(), prism.phi_in.dom()));
        }
        if prism.phi_in.cod() != sources.base() {
            return Err(boundary("feed sources", sources.base(), prism.phi_in.cod()));
        }
        if prism.phi_out.dom() != outer.outputs().base() {
            return Err(boundary("outer outputs", outer.outputs().base(), prism.phi_out.dom()));
        }
        if prism.phi_out.cod() != outputs.base() {
            return Err(boundary("driving outputs", outputs.base(), prism.phi_out.cod()));
        }
        let type_check = |dom: &TypedFinSet, f: &FinMap, cod: &TypedFinSet| -> Result<()> {
            match dom.type_errors(f, cod).into_iter().next() {
                Some(FinSetError::TypeMismatch { elem, expected, found }) => Err(AutomataError::TypeMismatch {
                    port: elem,
                    expected,
                    found,
                }),
                Some(e) => Err(e.into()),
                None => Ok(()),
            }
        };
        type_check(inputs, &prism.phi_in, &sources)?;
        type_check(outer.outputs(), &prism.phi_out, outputs)?;

        let interface = Interface::new(
            outer.inputs().clone(),
            outer.outputs().clone(),
            self.interface.exposed().clone(),
        )?;
        let spaces = Spaces::of(&interface, &self.alphabets)?;
        let n_out = outputs.len();
        let mut update = Vec::with_capacity(self.states.len());
        let mut readout = Vec::with_capacity(self.states.len());
        for s in 0..self.states.len() {
            let read = self.outputs.tuple(self.readout[s]);
            let row = (0..spaces.inputs.elements().len())
                .map(|y| {
                    let supplied = spaces.inputs.tuple(y);
                    let resolved: Vec<usize> = prism
                        .phi_in
                        .indices()
                        .iter()
                        .map(|&t| if t < n_out { read[t] } else { supplied[t - n_out] })
                        .collect();
                    self.update[s][self.inputs.index_of(&resolved)].clone()
                })
                .collect();
            update.push(row);
            let driven: Vec<usize> = prism.phi_out.indices().iter().map(|&o| read[o]).collect();
            readout.push(spaces.outputs.index_of(&driven));
        }
        Ok(Automaton {
            alphabets: self.alphabets.clone(),
            states: self.states.clone(),
            interface,
            inputs: spaces.inputs,
            outputs: spaces.outputs,
            observations: spaces.observations,
            update,
            readout,
            obs: self.obs.clone(),
        })
    }

    /// Renames states along a bijection `states -> new names`.
    pub fn rename_states(&self, bijection: &FinMap) -> Result<Automaton> {
        if bijection.dom() != &self.states || !bijection.is_bijection() {
            return Err(boundary("renamed states", &self.states, bijection.dom()));
        }
        let inverse = bijection.inverse().expect("checked bijective");
        let old = |n: usize| inverse.at(n);
        let new = |s: usize| bijection.at(s);
        let n = self.states.len();
        Ok(Automaton {
            update: (0..n)
                .map(|t| {
                    self.update[old(t)]
                        .iter()
                        .map(|set| set.iter().map(|&s| new(s)).collect())
                        .collect()
                })
                .collect(),
            readout: (0..n).map(|t| self.readout[old(t)]).collect(),
            obs: (0..n).map(|t| self.obs[old(t)]).collect(),
            states: bijection.cod().clone(),
            ..self.clone()
        })
    }

    /// States with no successor on any input.
    pub fn dead_states(&self) -> Vec<usize> {
        (0..self.states.len())
            .filter(|&s| self.update[s].iter().all(BTreeSet::is_empty))
            .collect()
    }
}

impl fmt::Display for Automaton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let inputs = self.inputs.elements();
        let trivial_in = self.inputs.ports().is_empty();
        for (s, row) in self.update.iter().enumerate() {
            for (i, next) in row.iter().enumerate() {
                let names: Vec<&str> = next.iter().map(|&t| self.states.name(t)).collect();
                if trivial_in {
                    writeln!(f, "{} -> {{{}}}", self.states.name(s), names.join(", "))?;
                } else {
                    writeln!(
                        f,
                        "{} -{}-> {{{}}}",
                        self.states.name(s),
                        inputs.name(i),
                        names.join(", ")
                    )?;
                }
            }
        }
        Ok(())
    }
}

/// Name-based construction of an [`Automaton`].
pub struct AutomatonBuilder {
    alphabets: BTreeMap<String, FinSet>,
    states: FinSet,
    interface: Interface,
    spaces: Spaces,
    update: Vec<Vec<BTreeSet<usize>>>,
    readout: Vec<Option<usize>>,
    obs: Vec<Option<usize>>,
}

impl AutomatonBuilder {
    /// Adds the successors `next` of `state` on input letters `input`, one
    /// letter per input port.
    pub fn transition(&mut self, state: &str, input: &[&str], next: &[&str]) -> Result<&mut Self> {
        let s = self.states.require(state)?;
        let i = letters_index(&self.spaces.inputs, input, "input ports")?;
        for t in next {
            let t = self.states.require(t)?;
            self.update[s][i].insert(t);
        }
        Ok(self)
    }

    /// Sets the letters read at the output ports of `state`.
    pub fn readout(&mut self, state: &str, letters: &[&str]) -> Result<&mut Self> {
        let s = self.states.require(state)?;
        self.readout[s] = Some(letters_index(&self.spaces.outputs, letters, "output ports")?);
        Ok(self)
    }

    /// Sets the letters observed at the exposed ports of `state`.
    pub fn observe(&mut self, state: &str, letters: &[&str]) -> Result<&mut Self> {
        let s = self.states.require(state)?;
        self.obs[s] = Some(letters_index(&self.spaces.observations, letters, "exposed ports")?);
        Ok(self)
    }

    pub fn build(self) -> Result<Automaton> {
        let total = |v: Vec<Option<usize>>, what: &'static str| -> Result<Vec<usize>> {
            v.into_iter()
                .enumerate()
                .map(|(s, x)| x.ok_or_else(|| AutomataError::Missing(self.states.name(s).to_string(), what)))
                .collect()
        };
        let readout = total(self.readout.clone(), "readout")?;
        let obs = total(self.obs.clone(), "observation")?;
        Automaton::new(self.alphabets, self.states, self.interface, self.update, readout, obs)
    }
}

/// A tensor product with the projection onto each factor's states.
#[derive(Clone, Debug)]
pub struct Tensored {
    pub automaton: Automaton,
    pub projections: Vec<FinMap>,
}

/// A shared automaton with the two legs of its state pullback.
#[derive(Clone, Debug)]
pub struct Shared {
    pub automaton: Automaton,
    /// New states onto old states.
    pub states: FinMap,
    /// New states onto apex labelings.
    pub apex: FinMap,
}

/// All index tuples below `sizes`, last coordinate fastest.
fn product(sizes: &[usize]) -> Vec<Vec<usize>> {
    let ranges: Vec<Vec<usize>> = sizes.iter().map(|&n| (0..n).collect()).collect();
    product_of(&ranges)
}

fn product_of(sets: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for set in sets {
        out = out
            .into_iter()
            .flat_map(|t: Vec<usize>| {
                set.iter().map(move |&x| {
                    let mut t = t.clone();
                    t.push(x);
                    t
                })
            })
            .collect();
    }
    out
}
