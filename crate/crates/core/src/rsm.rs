//! Acting with wirings on filled boxes.
//!
//! [`act`] applies one [`RsmMorphism`] to a filling of each of its inner
//! boxes: the fillings are tensored, then shared along the port cospan, then
//! wired along the prism. Alongside the composite it returns a [`Trace`]
//! relating the composite's state to the fillings and the apex, which is what
//! the functoriality checks use to line two composites up.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::automata::{AutomataError, Automaton};
use crate::finset::{label_pull, FinMap, FinSet, Labelings, TypedFinSet};
use crate::ode::{OdeError, OdeSystem};
use crate::wiring::{substitute, Diagnostic, Interface, RsmMorphism, WiringError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RsmError {
    #[error(transparent)]
    Ode(#[from] OdeError),
    #[error(transparent)]
    Automata(#[from] AutomataError),
    #[error(transparent)]
    Wiring(#[from] WiringError),
    #[error("cannot mix continuous and automaton fillings")]
    DoctrineMix,
    #[error("cannot tell the doctrine of a wiring with no inner boxes")]
    UnknownDoctrine,
    #[error("expected {expected} fillings, got {found}")]
    Arity { expected: usize, found: usize },
    #[error("filling of slot `{0}` does not have the slot's interface")]
    SlotInterface(String),
    #[error("wiring is invalid:\n{}", .0.iter().map(|d| format!("  {d}")).collect::<Vec<_>>().join("\n"))]
    Invalid(Vec<Diagnostic>),
}

pub type Result<T> = std::result::Result<T, RsmError>;

/// Which kind of system fills the boxes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Doctrine {
    Ode,
    /// Automata; the alphabets are those the apex of a nullary wiring may use.
    Automata(BTreeMap<String, FinSet>),
}

/// A box together with the system filling it.
// Both variants are large; boxing one would only move the allocation.
#[allow(clippy::large_enum_variant)]
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FilledBox {
    Ode(OdeSystem),
    Automata(Automaton),
}

impl FilledBox {
    pub fn interface(&self) -> &Interface {
        match self {
            FilledBox::Ode(s) => s.interface(),
            FilledBox::Automata(a) => a.interface(),
        }
    }

    pub fn as_ode(&self) -> Option<&OdeSystem> {
        match self {
            FilledBox::Ode(s) => Some(s),
            FilledBox::Automata(_) => None,
        }
    }

    pub fn as_automaton(&self) -> Option<&Automaton> {
        match self {
            FilledBox::Automata(a) => Some(a),
            FilledBox::Ode(_) => None,
        }
    }
}

impl From<OdeSystem> for FilledBox {
    fn from(s: OdeSystem) -> Self {
        FilledBox::Ode(s)
    }
}

impl From<Automaton> for FilledBox {
    fn from(a: Automaton) -> Self {
        FilledBox::Automata(a)
    }
}

/// How a composite's state is assembled from its parts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Trace {
    Ode {
        /// Variables of each filling into the composite's variables.
        injections: Vec<FinMap>,
        /// Apex ports into the composite's variables.
        apex: FinMap,
    },
    Automata {
        /// Composite states onto the states of each filling.
        projections: Vec<FinMap>,
        /// Composite states onto labelings of the apex.
        apex: FinMap,
    },
}

#[derive(Clone, Debug)]
pub struct Composite {
    pub filling: FilledBox,
    pub trace: Trace,
}

/// Applies `morphism` to `fillings`, inferring the doctrine from them.
pub fn act(morphism: &RsmMorphism, fillings: &[FilledBox]) -> Result<Composite> {
    let doctrine = match fillings.first() {
        None => return Err(RsmError::UnknownDoctrine),
        Some(FilledBox::Ode(_)) => Doctrine::Ode,
        Some(FilledBox::Automata(_)) => Doctrine::Automata(BTreeMap::new()),
    };
    act_in(&doctrine, morphism, fillings)
}

/// Applies `morphism` to `fillings`: tensor, then share, then wire.
pub fn act_in(doctrine: &Doctrine, morphism: &RsmMorphism, fillings: &[FilledBox]) -> Result<Composite> {
    let diagnostics = morphism.validate();
    if !diagnostics.is_empty() {
        return Err(RsmError::Invalid(diagnostics));
    }
    if fillings.len() != morphism.domain.len() {
        return Err(RsmError::Arity {
            expected: morphism.domain.len(),
            found: fillings.len(),
        });
    }
    for (slot, f) in morphism.domain.iter().zip(fillings) {
        if f.interface() != &slot.interface {
            return Err(RsmError::SlotInterface(slot.label.clone()));
        }
    }
    let labels: Vec<&str> = morphism.domain.iter().map(|s| s.label.as_str()).collect();
    match doctrine {
        Doctrine::Ode => {
            let systems = fillings
                .iter()
                .map(|f| f.as_ode().ok_or(RsmError::DoctrineMix))
                .collect::<Result<Vec<_>>>()?;
            let parts: Vec<(&str, &OdeSystem)> = labels.iter().copied().zip(systems).collect();
            let tensored = OdeSystem::tensor_labeled(&parts)?;
            let shared = tensored.system.share(&morphism.ports)?;
            let wired = shared.system.wire(&morphism.prism, &morphism.codomain)?;
            let injections = tensored
                .injections
                .iter()
                .map(|j| j.then(&shared.quotient))
                .collect::<std::result::Result<_, _>>()
                .map_err(OdeError::from)?;
            Ok(Composite {
                filling: FilledBox::Ode(wired),
                trace: Trace::Ode {
                    injections,
                    apex: shared.apex,
                },
            })
        }
        Doctrine::Automata(extra) => {
            let automata = fillings
                .iter()
                .map(|f| f.as_automaton().ok_or(RsmError::DoctrineMix))
                .collect::<Result<Vec<_>>>()?;
            let parts: Vec<(&str, &Automaton)> = labels.iter().copied().zip(automata).collect();
            let tensored = Automaton::tensor_labeled(&parts)?;
            let base = tensored.automaton.with_alphabets(extra)?;
            let shared = base.share(&morphism.ports)?;
            let wired = shared.automaton.wire(&morphism.prism, &morphism.codomain)?;
            let projections = tensored
                .projections
                .iter()
                .map(|p| shared.states.then(p))
                .collect::<std::result::Result<_, _>>()
                .map_err(AutomataError::from)?;
            Ok(Composite {
                filling: FilledBox::Automata(wired),
                trace: Trace::Automata {
                    projections,
                    apex: shared.apex,
                },
            })
        }
    }
}

/// Whether the identity wiring on `filled`'s interface gives `filled` back,
/// up to the renaming recorded in the trace.
pub fn act_identity_check(filled: &FilledBox) -> Result<bool> {
    let id = RsmMorphism::identity("box", filled.interface());
    let out = act(&id, std::slice::from_ref(filled))?;
    Ok(match (&out.filling, &out.trace, filled) {
        (FilledBox::Ode(res), Trace::Ode { injections, .. }, FilledBox::Ode(orig)) => {
            injections[0].is_bijection() && orig.rename_vars(&injections[0])? == *res
        }
        (FilledBox::Automata(res), Trace::Automata { projections, .. }, FilledBox::Automata(orig)) => {
            projections[0].is_bijection() && res.rename_states(&projections[0])? == *orig
        }
        _ => false,
    })
}

/// Whether acting by `inner` and then by the one-slot wiring `outer` agrees
/// with acting once by their substitution.
///
/// The two composites are related by a bijection assembled from the traces,
/// never by searching for an isomorphism; any inconsistency in that
/// assembly counts as a failure.
pub fn act_compose_check(inner: &RsmMorphism, outer: &RsmMorphism, fillings: &[FilledBox]) -> Result<bool> {
    let doctrine = match fillings.first() {
        Some(FilledBox::Automata(a)) => Doctrine::Automata(a.alphabets().clone()),
        _ => Doctrine::Ode,
    };
    let first = act_in(&doctrine, inner, fillings)?;
    let stepwise = act_in(&doctrine, outer, std::slice::from_ref(&first.filling))?;
    let sub = substitute(outer, std::slice::from_ref(inner))?;
    let direct = act_in(&doctrine, &sub.morphism, fillings)?;
    match (
        (&first.trace, &stepwise.trace, &direct.trace),
        (&stepwise.filling, &direct.filling),
    ) {
        (
            (
                Trace::Ode {
                    injections: inj1,
                    apex: apex1,
                },
                Trace::Ode {
                    injections: inj2,
                    apex: apex2,
                },
                Trace::Ode { injections, apex },
            ),
            (FilledBox::Ode(left), FilledBox::Ode(right)),
        ) => {
            let mut beta = Assignment::new(right.vars().len());
            let lift = &inj2[0];
            for (k, f) in injections.iter().enumerate() {
                for v in 0..f.dom().len() {
                    beta.set(f.at(v), lift.at(inj1[k].at(v)));
                }
            }
            for a in 0..sub.inner_apex.dom().len() {
                beta.set(apex.at(sub.inner_apex.at(a)), lift.at(apex1.at(a)));
            }
            for b in 0..sub.outer_apex.dom().len() {
                beta.set(apex.at(sub.outer_apex.at(b)), apex2.at(b));
            }
            let Some(beta) = beta.finish(right.vars(), left.vars()) else {
                return Ok(false);
            };
            Ok(right.rename_vars(&beta)? == *left)
        }
        (
            (
                Trace::Automata {
                    projections: proj1,
                    apex: apex1,
                },
                Trace::Automata {
                    projections: proj2,
                    apex: apex2,
                },
                Trace::Automata { projections, apex },
            ),
            (FilledBox::Automata(left), FilledBox::Automata(right)),
        ) => {
            let alphabets = left.alphabets();
            let space = |t: &TypedFinSet| Labelings::new(t, alphabets).map_err(AutomataError::from);
            let q1 = space(&inner.ports.apex)?;
            let q2 = space(&outer.ports.apex)?;
            let q = space(&sub.morphism.ports.apex)?;
            let left_sig = |s: usize| -> Vec<Vec<usize>> {
                let mid = proj2[0].at(s);
                let mut sig: Vec<Vec<usize>> = proj1.iter().map(|p| vec![p.at(mid)]).collect();
                sig.push(q1.tuple(apex1.at(mid)).to_vec());
                sig.push(q2.tuple(apex2.at(s)).to_vec());
                sig
            };
            let right_sig = |s: usize| -> Result<Vec<Vec<usize>>> {
                let mut sig: Vec<Vec<usize>> = projections.iter().map(|p| vec![p.at(s)]).collect();
                let letters = q.tuple(apex.at(s));
                let pull = |f: &FinMap| label_pull(f, letters).map_err(AutomataError::from);
                sig.push(pull(&sub.inner_apex)?);
                sig.push(pull(&sub.outer_apex)?);
                Ok(sig)
            };
            let by_sig: BTreeMap<Vec<Vec<usize>>, usize> = (0..left.states().len()).map(|s| (left_sig(s), s)).collect();
            if by_sig.len() != left.states().len() {
                return Ok(false);
            }
            let mut beta = Assignment::new(right.states().len());
            for s in 0..right.states().len() {
                match by_sig.get(&right_sig(s)?) {
                    Some(&l) => beta.set(s, l),
                    None => return Ok(false),
                }
            }
            let Some(beta) = beta.finish(right.states(), left.states()) else {
                return Ok(false);
            };
            Ok(right.rename_states(&beta)? == *left)
        }
        _ => Ok(false),
    }
}

/// A partial function being pinned down one point at a time.
struct Assignment {
    map: Vec<Option<usize>>,
    consistent: bool,
}

impl Assignment {
    fn new(n: usize) -> Self {
        Self {
            map: vec![None; n],
            consistent: true,
        }
    }

    fn set(&mut self, from: usize, to: usize) {
        match self.map[from] {
            Some(t) if t != to => self.consistent = false,
            _ => self.map[from] = Some(to),
        }
    }

    /// The assembled bijection, if the assignment is consistent, total and
    /// bijective.
    fn finish(self, dom: &FinSet, cod: &FinSet) -> Option<FinMap> {
        if !self.consistent {
            return None;
        }
        let map: Option<Vec<usize>> = self.map.into_iter().collect();
        let f = FinMap::from_indices(dom.clone(), cod.clone(), map?).ok()?;
        f.is_bijection().then_some(f)
    }
}
