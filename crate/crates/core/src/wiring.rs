//! Boxes and the wirings between them.
//!
//! A box has typed input, output and exposed ports ([`Interface`]). A wiring
//! from a list of inner boxes to one outer box ([`RsmMorphism`]) pairs a
//! machine-style [`Prism`] (who feeds each input, who drives each outer
//! output) with a [`PortCospan`] saying which exposed ports share a resource.
//!
//! Ports of the inner boxes are addressed through the sum of their
//! interfaces: inner port `p` of the slot labelled `a` is `a.p`. Outer ports
//! keep their plain names.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::finset::{compose_cospans, qualify, Cospan, FinMap, FinSet, FinSetError, TypedFinSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WiringError {
    #[error(transparent)]
    FinSet(#[from] FinSetError),
    #[error("port `{0}` appears more than once in an interface")]
    PortClash(String),
    #[error("slot label `{0}` is used twice")]
    SlotClash(String),
    #[error("expected {expected} inner morphisms, got {found}")]
    Arity { expected: usize, found: usize },
    #[error("codomain of inner morphism {slot} does not match slot `{label}`")]
    SlotMismatch { slot: usize, label: String },
    #[error("invalid wiring:\n{}", render(.0))]
    Invalid(Vec<Diagnostic>),
}

fn render(diags: &[Diagnostic]) -> String {
    diags.iter().map(|d| format!("  {d}")).collect::<Vec<_>>().join("\n")
}

pub type Result<T> = std::result::Result<T, WiringError>;

/// Input, output and exposed ports of a box.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Interface {
    inputs: TypedFinSet,
    outputs: TypedFinSet,
    exposed: TypedFinSet,
}

impl Interface {
    pub fn new(inputs: TypedFinSet, outputs: TypedFinSet, exposed: TypedFinSet) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for set in [&inputs, &outputs, &exposed] {
            for (name, _) in set.iter() {
                if !seen.insert(name.to_string()) {
                    return Err(WiringError::PortClash(name.to_string()));
                }
            }
        }
        Ok(Self {
            inputs,
            outputs,
            exposed,
        })
    }

    /// The box with no ports at all.
    pub fn unit() -> Self {
        Self::default()
    }

    /// Convenience constructor for boxes whose ports all carry one type.
    pub fn uniform(inputs: &[&str], outputs: &[&str], exposed: &[&str], ty: &str) -> Result<Self> {
        let typed = |names: &[&str]| -> Result<TypedFinSet> {
            Ok(TypedFinSet::uniform(FinSet::new(names.iter().copied())?, ty))
        };
        Self::new(typed(inputs)?, typed(outputs)?, typed(exposed)?)
    }

    pub fn inputs(&self) -> &TypedFinSet {
        &self.inputs
    }

    pub fn outputs(&self) -> &TypedFinSet {
        &self.outputs
    }

    pub fn exposed(&self) -> &TypedFinSet {
        &self.exposed
    }

    /// Labelled tensor: every port is prefixed with its box's label.
    pub fn tensor_labeled<'a, I>(parts: I) -> Result<Interface>
    where
        I: IntoIterator<Item = (&'a str, &'a Interface)> + Clone,
    {
        let inputs = TypedFinSet::sum(parts.clone().into_iter().map(|(l, i)| (l, &i.inputs)))?;
        let outputs = TypedFinSet::sum(parts.clone().into_iter().map(|(l, i)| (l, &i.outputs)))?;
        let exposed = TypedFinSet::sum(parts.into_iter().map(|(l, i)| (l, &i.exposed)))?;
        Interface::new(inputs, outputs, exposed)
    }

    /// Binary tensor with the provenance prefixes `l.` and `r.`.
    pub fn tensor(a: &Interface, b: &Interface) -> Interface {
        Self::tensor_labeled([("l", a), ("r", b)]).expect("prefixes keep the sides apart")
    }
}

/// One inner box of a wiring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Slot {
    pub label: String,
    pub interface: Interface,
}

impl Slot {
    pub fn new(label: impl Into<String>, interface: Interface) -> Self {
        Self {
            label: label.into(),
            interface,
        }
    }
}

/// Machine wiring: `phi_in` feeds each inner input from an inner output or an
/// outer input, `phi_out` drives each outer output from an inner output.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Prism {
    pub phi_in: FinMap,
    pub phi_out: FinMap,
}

/// Resource sharing: inner exposed ports and outer exposed ports land in a
/// common typed apex; ports landing together share one resource.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PortCospan {
    pub apex: TypedFinSet,
    pub inner: FinMap,
    pub outer: FinMap,
}

impl PortCospan {
    pub fn as_cospan(&self) -> std::result::Result<Cospan, FinSetError> {
        Cospan::new(self.inner.clone(), self.outer.clone())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum DiagnosticKind {
    /// An inner input, outer output or exposed port has no wire.
    Unassigned,
    /// A wire mentions a port the interfaces do not have.
    UnknownPort,
    /// A wire joins ports of different types.
    TypeMismatch,
    /// A leg's codomain is not the set it should land in.
    Boundary,
    /// Two slots share a label, or port sums clash.
    Naming,
}

/// One problem with a wiring, tied to the component and port it concerns.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    /// Which part of the morphism: `phi_in`, `phi_out`, `inner`, `outer`, `domain`.
    pub component: String,
    pub port: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}: {}", self.component, self.port, self.message)
    }
}

/// A morphism of the combined syntax: inner boxes `domain`, outer box
/// `codomain`, a prism and a port cospan between them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RsmMorphism {
    pub domain: Vec<Slot>,
    pub codomain: Interface,
    pub prism: Prism,
    pub ports: PortCospan,
}

/// Port sums of a list of slots, with per-slot offsets.
pub(crate) struct Sums {
    pub inputs: TypedFinSet,
    pub outputs: TypedFinSet,
    pub exposed: TypedFinSet,
    pub in_offset: Vec<usize>,
    pub out_offset: Vec<usize>,
}

impl Sums {
    pub fn of(slots: &[Slot]) -> Result<Self> {
        let mut labels = BTreeSet::new();
        for s in slots {
            if !labels.insert(s.label.as_str()) {
                return Err(WiringError::SlotClash(s.label.clone()));
            }
        }
        let offsets = |f: fn(&Interface) -> &TypedFinSet| -> Vec<usize> {
            slots
                .iter()
                .scan(0, |acc, s| {
                    let at = *acc;
                    *acc += f(&s.interface).len();
                    Some(at)
                })
                .collect()
        };
        let parts = || slots.iter().map(|s| (s.label.as_str(), &s.interface));
        let inputs = TypedFinSet::sum(parts().map(|(l, i)| (l, i.inputs())))?;
        let outputs = TypedFinSet::sum(parts().map(|(l, i)| (l, i.outputs())))?;
        let exposed = TypedFinSet::sum(parts().map(|(l, i)| (l, i.exposed())))?;
        Ok(Self {
            inputs,
            outputs,
            exposed,
            in_offset: offsets(Interface::inputs),
            out_offset: offsets(Interface::outputs),
        })
    }

    /// `(slot, local index)` of a global output index.
    pub fn output_slot(&self, global: usize) -> (usize, usize) {
        locate(&self.out_offset, global)
    }
}

fn locate(offsets: &[usize], global: usize) -> (usize, usize) {
    let slot = offsets.partition_point(|&o| o <= global) - 1;
    (slot, global - offsets[slot])
}

/// Where an inner input can be fed from: inner outputs, then outer inputs.
pub(crate) fn feed_sources(inner_outputs: &TypedFinSet, outer: &Interface) -> Result<TypedFinSet> {
    TypedFinSet::concat([inner_outputs, outer.inputs()]).map_err(|e| match e {
        FinSetError::Duplicate(name) => WiringError::PortClash(name),
        e => e.into(),
    })
}

/// Builds a map whose domain is the part of `expected` that `pairs`
/// mentions (in `expected` order) followed by any names `expected` lacks.
/// Totality and membership are left for [`RsmMorphism::validate`].
fn partial_map(expected: &FinSet, cod: &FinSet, pairs: &[(&str, &str)]) -> Result<FinMap> {
    let mut dom: Vec<&str> = expected.iter().filter(|e| pairs.iter().any(|(s, _)| s == e)).collect();
    dom.extend(pairs.iter().map(|(s, _)| *s).filter(|s| !expected.contains(s)));
    Ok(FinMap::from_pairs(
        FinSet::new(dom)?,
        cod.clone(),
        pairs.iter().copied(),
    )?)
}

impl RsmMorphism {
    /// Assembles a morphism from name pairs.
    ///
    /// * `feeds`: inner input `slot.port` to an inner output `slot.port` or an
    ///   outer input `port`;
    /// * `drives`: outer output to inner output;
    /// * `apex`: typed shared-resource ports;
    /// * `inner_ports` / `outer_ports`: exposed ports to apex ports.
    ///
    /// Only shape errors (unknown wire targets, duplicates) fail here; a
    /// missing or ill-typed wire is reported by [`validate`](Self::validate).
    pub fn build(
        domain: Vec<Slot>,
        codomain: Interface,
        feeds: &[(&str, &str)],
        drives: &[(&str, &str)],
        apex: TypedFinSet,
        inner_ports: &[(&str, &str)],
        outer_ports: &[(&str, &str)],
    ) -> Result<Self> {
        let sums = Sums::of(&domain)?;
        let sources = feed_sources(&sums.outputs, &codomain)?;
        let phi_in = partial_map(sums.inputs.base(), sources.base(), feeds)?;
        let phi_out = partial_map(codomain.outputs().base(), sums.outputs.base(), drives)?;
        let inner = partial_map(sums.exposed.base(), apex.base(), inner_ports)?;
        let outer = partial_map(codomain.exposed().base(), apex.base(), outer_ports)?;
        Ok(Self {
            domain,
            codomain,
            prism: Prism { phi_in, phi_out },
            ports: PortCospan { apex, inner, outer },
        })
    }

    /// The identity wiring on one box.
    pub fn identity(label: &str, interface: &Interface) -> Self {
        let feeds: Vec<(String, String)> = interface
            .inputs()
            .iter()
            .map(|(p, _)| (qualify(label, p), p.to_string()))
            .collect();
        let drives: Vec<(String, String)> = interface
            .outputs()
            .iter()
            .map(|(p, _)| (p.to_string(), qualify(label, p)))
            .collect();
        let inner: Vec<(String, String)> = interface
            .exposed()
            .iter()
            .map(|(p, _)| (qualify(label, p), p.to_string()))
            .collect();
        let outer: Vec<(String, String)> = interface
            .exposed()
            .iter()
            .map(|(p, _)| (p.to_string(), p.to_string()))
            .collect();
        Self::build(
            vec![Slot::new(label, interface.clone())],
            interface.clone(),
            &as_refs(&feeds),
            &as_refs(&drives),
            interface.exposed().clone(),
            &as_refs(&inner),
            &as_refs(&outer),
        )
        .expect("identity wiring is well formed")
    }

    pub fn inner_sums(&self) -> Result<(TypedFinSet, TypedFinSet, TypedFinSet)> {
        let s = Sums::of(&self.domain)?;
        Ok((s.inputs, s.outputs, s.exposed))
    }

    /// Every boundary and typing problem, or nothing if the morphism is sound.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        let sums = match Sums::of(&self.domain) {
            Ok(s) => s,
            Err(e) => {
                out.push(diag(DiagnosticKind::Naming, "domain", "", e.to_string()));
                return out;
            }
        };
        let sources = match feed_sources(&sums.outputs, &self.codomain) {
            Ok(s) => s,
            Err(e) => {
                out.push(diag(DiagnosticKind::Naming, "phi_in", "", e.to_string()));
                return out;
            }
        };
        check_leg(&mut out, "phi_in", &self.prism.phi_in, &sums.inputs, &sources);
        check_leg(
            &mut out,
            "phi_out",
            &self.prism.phi_out,
            self.codomain.outputs(),
            &sums.outputs,
        );
        check_leg(&mut out, "inner", &self.ports.inner, &sums.exposed, &self.ports.apex);
        check_leg(
            &mut out,
            "outer",
            &self.ports.outer,
            self.codomain.exposed(),
            &self.ports.apex,
        );
        out
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let diags = self.validate();
        if diags.is_empty() {
            Ok(())
        } else {
            Err(WiringError::Invalid(diags))
        }
    }
}

pub(crate) fn as_refs(pairs: &[(String, String)]) -> Vec<(&str, &str)> {
    pairs.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect()
}

fn diag(kind: DiagnosticKind, component: &str, port: &str, message: String) -> Diagnostic {
    Diagnostic {
        kind,
        component: component.to_string(),
        port: port.to_string(),
        message,
    }
}

fn check_leg(out: &mut Vec<Diagnostic>, component: &str, leg: &FinMap, dom: &TypedFinSet, cod: &TypedFinSet) {
    let before = out.len();
    if leg.cod() != cod.base() {
        out.push(diag(
            DiagnosticKind::Boundary,
            component,
            "",
            format!("lands in {} but should land in {}", leg.cod(), cod.base()),
        ));
        return;
    }
    for port in dom.base().iter() {
        if !leg.dom().contains(port) {
            out.push(diag(
                DiagnosticKind::Unassigned,
                component,
                port,
                "no wire assigned".to_string(),
            ));
        }
    }
    for (i, port) in leg.dom().iter().enumerate() {
        let Some(expected) = dom.type_of(port) else {
            out.push(diag(
                DiagnosticKind::UnknownPort,
                component,
                port,
                format!("not a port of {}", dom.base()),
            ));
            continue;
        };
        let target = cod.base().name(leg.at(i));
        let found = cod.type_at(leg.at(i));
        if expected != found {
            out.push(diag(
                DiagnosticKind::TypeMismatch,
                component,
                port,
                format!("type `{expected}` wired to `{target}` of type `{found}`"),
            ));
        }
    }
    if out.len() == before && leg.dom() != dom.base() {
        out.push(diag(
            DiagnosticKind::Boundary,
            component,
            "",
            format!("ports listed in a different order than {}", dom.base()),
        ));
    }
}

/// Result of operadic substitution, with the maps relating the apexes.
#[derive(Clone, Debug)]
pub struct Substitution {
    pub morphism: RsmMorphism,
    /// `Σⱼ Qⱼ -> Q`, the inner apexes (prefixed by outer slot label) into the
    /// composite apex.
    pub inner_apex: FinMap,
    /// `Q_outer -> Q`.
    pub outer_apex: FinMap,
}

/// Plugs `inner[j]` into slot `j` of `outer`.
///
/// Slots of the result are the inner slots in order. Their labels are kept
/// when distinct, otherwise every one is qualified as `outer_slot.inner_slot`.
pub fn substitute(outer: &RsmMorphism, inner: &[RsmMorphism]) -> Result<Substitution> {
    outer.ensure_valid()?;
    if inner.len() != outer.domain.len() {
        return Err(WiringError::Arity {
            expected: outer.domain.len(),
            found: inner.len(),
        });
    }
    for (j, (m, slot)) in inner.iter().zip(&outer.domain).enumerate() {
        m.ensure_valid()?;
        if m.codomain != slot.interface {
            return Err(WiringError::SlotMismatch {
                slot: j,
                label: slot.label.clone(),
            });
        }
    }

    let mut labels: Vec<String> = inner
        .iter()
        .flat_map(|m| m.domain.iter().map(|s| s.label.clone()))
        .collect();
    if labels.iter().collect::<BTreeSet<_>>().len() != labels.len() {
        labels = inner
            .iter()
            .zip(&outer.domain)
            .flat_map(|(m, o)| m.domain.iter().map(move |s| qualify(&o.label, &s.label)))
            .collect();
    }
    let domain: Vec<Slot> = inner
        .iter()
        .flat_map(|m| m.domain.iter())
        .zip(&labels)
        .map(|(s, l)| Slot::new(l.clone(), s.interface.clone()))
        .collect();
    let comp = Sums::of(&domain)?;
    let outer_sums = Sums::of(&outer.domain)?;
    let inner_sums: Vec<Sums> = inner.iter().map(|m| Sums::of(&m.domain)).collect::<Result<_>>()?;
    // first composite slot of each inner morphism
    let slot_base: Vec<usize> = inner
        .iter()
        .scan(0, |acc, m| {
            let at = *acc;
            *acc += m.domain.len();
            Some(at)
        })
        .collect();

    let comp_output = |j: usize, inner_global: usize| -> usize {
        let (k, o) = inner_sums[j].output_slot(inner_global);
        comp.out_offset[slot_base[j] + k] + o
    };
    // outer wire target -> composite feed source
    let through_outer = |u: usize| -> usize {
        let n_out = outer_sums.outputs.len();
        if u < n_out {
            let (j, o) = outer_sums.output_slot(u);
            comp_output(j, inner[j].prism.phi_out.at(o))
        } else {
            comp.outputs.len() + (u - n_out)
        }
    };

    let mut phi_in = Vec::with_capacity(comp.inputs.len());
    for (j, m) in inner.iter().enumerate() {
        let n_out = inner_sums[j].outputs.len();
        for g in 0..inner_sums[j].inputs.len() {
            let t = m.prism.phi_in.at(g);
            phi_in.push(if t < n_out {
                comp_output(j, t)
            } else {
                let y = t - n_out;
                through_outer(outer.prism.phi_in.at(outer_sums.in_offset[j] + y))
            });
        }
    }
    let phi_out: Vec<usize> = outer
        .prism
        .phi_out
        .indices()
        .iter()
        .map(|&u| {
            let (j, o) = outer_sums.output_slot(u);
            comp_output(j, inner[j].prism.phi_out.at(o))
        })
        .collect();
    let sources = feed_sources(&comp.outputs, &outer.codomain)?;
    let prism = Prism {
        phi_in: FinMap::from_indices(comp.inputs.base().clone(), sources.base().clone(), phi_in)?,
        phi_out: FinMap::from_indices(
            outer.codomain.outputs().base().clone(),
            comp.outputs.base().clone(),
            phi_out,
        )?,
    };

    let inner_cospans: Vec<Cospan> = inner
        .iter()
        .map(|m| m.ports.as_cospan())
        .collect::<std::result::Result<_, _>>()?;
    let summed = Cospan::sum(outer.domain.iter().map(|s| s.label.as_str()).zip(inner_cospans.iter()))?;
    let composed = compose_cospans(&summed, &outer.ports.as_cospan()?)?;
    let apex_set = composed.cospan.apex().clone();
    let mut apex_types: Vec<Option<String>> = vec![None; apex_set.len()];
    let inner_apex_types = inner
        .iter()
        .flat_map(|m| m.ports.apex.iter().map(|(_, t)| t.to_string()));
    for (k, ty) in inner_apex_types.enumerate() {
        apex_types[composed.middle.inj1.at(k)].get_or_insert(ty);
    }
    for (k, (_, ty)) in outer.ports.apex.iter().enumerate() {
        apex_types[composed.middle.inj2.at(k)].get_or_insert(ty.to_string());
    }
    let apex = TypedFinSet::new(
        apex_set
            .iter()
            .zip(apex_types)
            .map(|(n, t)| (n.to_string(), t.expect("every class has a member"))),
    )?;
    let ports = PortCospan {
        inner: FinMap::from_indices(
            comp.exposed.base().clone(),
            apex_set.clone(),
            composed.cospan.left().indices().to_vec(),
        )?,
        outer: composed.cospan.right().clone(),
        apex,
    };
    let morphism = RsmMorphism {
        domain,
        codomain: outer.codomain.clone(),
        prism,
        ports,
    };
    debug_assert!(morphism.validate().is_empty(), "{:?}", morphism.validate());
    Ok(Substitution {
        morphism,
        inner_apex: composed.middle.inj1,
        outer_apex: composed.middle.inj2,
    })
}
