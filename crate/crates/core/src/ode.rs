//! Continuous systems: polynomial vector fields on named real variables.
//!
//! A system is a set of state variables, a vector field whose components may
//! mention the variables, the box's input ports and parameters, a polynomial
//! readout for each output port, and a map sending each exposed port to the
//! variable it exposes. All ports are typed [`REAL`].
//!
//! Sharing glues variables by a pushout and adds their velocities; wiring
//! substitutes readouts for the inputs they feed.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::expr::{ExprError, PolyMap, Polynomial};
use crate::finset::{pushout, qualify, FinMap, FinSet, FinSetError, TypedFinSet};
use crate::wiring::{feed_sources, Interface, PortCospan, Prism, WiringError};

/// Port type of every continuous port.
pub const REAL: &str = "R";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OdeError {
    #[error(transparent)]
    FinSet(#[from] FinSetError),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Wiring(#[from] WiringError),
    #[error("port `{port}` has type `{ty}`, continuous ports must be `R`")]
    NotReal { port: String, ty: String },
    #[error("name `{0}` is used for more than one of variable, input and parameter")]
    NameClash(String),
    #[error("{what} do not match: expected {expected}, found {found}")]
    Boundary {
        what: &'static str,
        expected: Box<FinSet>,
        found: Box<FinSet>,
    },
    #[error("readout `{output}` depends on input `{input}`")]
    ReadoutUsesInput { output: String, input: String },
}

pub type Result<T> = std::result::Result<T, OdeError>;

/// An open continuous system `(S, (field, readout), ports)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OdeSystem {
    vars: FinSet,
    params: BTreeSet<String>,
    field: PolyMap,
    readout: PolyMap,
    ports: FinMap,
    interface: Interface,
}

fn boundary(what: &'static str, expected: &FinSet, found: &FinSet) -> OdeError {
    OdeError::Boundary {
        what,
        expected: Box::new(expected.clone()),
        found: Box::new(found.clone()),
    }
}

impl OdeSystem {
    pub fn new(
        vars: FinSet,
        params: BTreeSet<String>,
        field: PolyMap,
        readout: PolyMap,
        ports: FinMap,
        interface: Interface,
    ) -> Result<Self> {
        for set in [interface.inputs(), interface.outputs(), interface.exposed()] {
            if let Some((port, ty)) = set.iter().find(|(_, t)| *t != REAL) {
                return Err(OdeError::NotReal {
                    port: port.to_string(),
                    ty: ty.to_string(),
                });
            }
        }
        let inputs = interface.inputs().base();
        let mut names = BTreeSet::new();
        for n in vars
            .iter()
            .chain(inputs.iter())
            .chain(params.iter().map(String::as_str))
        {
            if !names.insert(n) {
                return Err(OdeError::NameClash(n.to_string()));
            }
        }
        if field.cod() != &vars {
            return Err(boundary("field components", &vars, field.cod()));
        }
        if readout.cod() != interface.outputs().base() {
            return Err(boundary(
                "readout components",
                interface.outputs().base(),
                readout.cod(),
            ));
        }
        if ports.dom() != interface.exposed().base() {
            return Err(boundary("exposed ports", interface.exposed().base(), ports.dom()));
        }
        if ports.cod() != &vars {
            return Err(boundary("port targets", &vars, ports.cod()));
        }
        field.check_names(|n| names.contains(n))?;
        for (out, p) in readout.iter() {
            if let Some(input) = p.names().into_iter().find(|n| inputs.contains(n)) {
                return Err(OdeError::ReadoutUsesInput {
                    output: out.to_string(),
                    input: input.to_string(),
                });
            }
        }
        readout.check_names(|n| vars.contains(n) || params.contains(n))?;
        Ok(Self {
            vars,
            params,
            field,
            readout,
            ports,
            interface,
        })
    }

    /// Closed system from `(variable, velocity)` pairs, exposing nothing.
    pub fn closed<I, S>(components: I, params: &[&str]) -> Result<Self>
    where
        I: IntoIterator<Item = (S, Polynomial)>,
        S: Into<String>,
    {
        let (names, polys): (Vec<String>, Vec<Polynomial>) = components.into_iter().map(|(s, p)| (s.into(), p)).unzip();
        let vars = FinSet::new(names)?;
        Self::new(
            vars.clone(),
            params.iter().map(|s| s.to_string()).collect(),
            PolyMap::new(vars.clone(), polys)?,
            PolyMap::empty(),
            FinMap::initial(&vars),
            Interface::unit(),
        )
    }

    /// The system with no variables and no ports.
    pub fn unit() -> Self {
        Self {
            vars: FinSet::empty(),
            params: BTreeSet::new(),
            field: PolyMap::empty(),
            readout: PolyMap::empty(),
            ports: FinMap::initial(&FinSet::empty()),
            interface: Interface::unit(),
        }
    }

    pub fn vars(&self) -> &FinSet {
        &self.vars
    }

    pub fn params(&self) -> &BTreeSet<String> {
        &self.params
    }

    pub fn field(&self) -> &PolyMap {
        &self.field
    }

    pub fn readout(&self) -> &PolyMap {
        &self.readout
    }

    pub fn ports(&self) -> &FinMap {
        &self.ports
    }

    pub fn interface(&self) -> &Interface {
        &self.interface
    }

    /// Velocity of one variable.
    pub fn velocity(&self, var: &str) -> Option<&Polynomial> {
        self.field.component(var)
    }

    /// Tensor of labelled systems. Variables and ports get the label as a
    /// prefix; parameters are model-wide and merge by name.
    pub fn tensor_labeled(parts: &[(&str, &OdeSystem)]) -> Result<Tensored> {
        let interface = Interface::tensor_labeled(parts.iter().map(|(l, s)| (*l, &s.interface)))?;
        let vars = FinSet::sum(parts.iter().map(|(l, s)| (*l, &s.vars)))?;
        let params: BTreeSet<String> = parts.iter().flat_map(|(_, s)| s.params.iter().cloned()).collect();
        let mut field = Vec::with_capacity(vars.len());
        let mut readout = Vec::new();
        let mut injections = Vec::with_capacity(parts.len());
        let mut offset = 0;
        for (label, sys) in parts {
            let local: BTreeSet<&str> = sys.vars.iter().chain(sys.interface.inputs().base().iter()).collect();
            let prefix = |n: &str| local.contains(n).then(|| qualify(label, n));
            field.extend(sys.field.components().iter().map(|p| p.rename(prefix)));
            readout.extend(sys.readout.components().iter().map(|p| p.rename(prefix)));
            injections.push(FinMap::from_indices(
                sys.vars.clone(),
                vars.clone(),
                (offset..offset + sys.vars.len()).collect(),
            )?);
            offset += sys.vars.len();
        }
        let ports = FinMap::sum(parts.iter().map(|(l, s)| (*l, &s.ports)))?;
        let ports = FinMap::from_indices(ports.dom().clone(), vars.clone(), ports.indices().to_vec())?;
        let system = OdeSystem::new(
            vars.clone(),
            params,
            PolyMap::new(vars, field)?,
            PolyMap::new(interface.outputs().base().clone(), readout)?,
            ports,
            interface,
        )?;
        Ok(Tensored { system, injections })
    }

    /// Binary tensor with labels `l` and `r`.
    pub fn tensor(a: &OdeSystem, b: &OdeSystem) -> Result<Tensored> {
        Self::tensor_labeled(&[("l", a), ("r", b)])
    }

    /// Glues variables along a port cospan and adds their velocities.
    ///
    /// The new variables are the pushout of the cospan's inner leg against the
    /// port map, so a shared apex port names the variable it creates and an
    /// unexposed variable keeps its name. Inputs and outputs are untouched;
    /// the exposed ports become the cospan's outer ports.
    pub fn share(&self, cospan: &PortCospan) -> Result<Shared> {
        let exposed = self.interface.exposed();
        if cospan.inner.dom() != exposed.base() {
            return Err(boundary("shared ports", exposed.base(), cospan.inner.dom()));
        }
        if cospan.inner.cod() != cospan.apex.base() || cospan.outer.cod() != cospan.apex.base() {
            return Err(boundary("cospan apex", cospan.apex.base(), cospan.inner.cod()));
        }
        if let Some(FinSetError::TypeMismatch { elem, found, .. }) =
            exposed.type_errors(&cospan.inner, &cospan.apex).into_iter().next()
        {
            return Err(OdeError::NotReal { port: elem, ty: found });
        }
        let glued = pushout(&cospan.inner, &self.ports)?;
        let quotient = glued.inj2;
        let apex = glued.inj1;
        let new_vars = glued.apex;

        let rename = |n: &str| self.vars.index_of(n).map(|i| new_vars.name(quotient.at(i)).to_string());
        let mut field = vec![Polynomial::zero(); new_vars.len()];
        for (i, p) in self.field.components().iter().enumerate() {
            let c = quotient.at(i);
            field[c] = &field[c] + &p.rename(rename);
        }
        let readout = self.readout.map_components(|p| p.rename(rename));
        let outer_exposed = TypedFinSet::new(
            cospan
                .outer
                .dom()
                .iter()
                .enumerate()
                .map(|(i, m)| (m.to_string(), cospan.apex.type_at(cospan.outer.at(i)).to_string())),
        )?;
        let interface = Interface::new(
            self.interface.inputs().clone(),
            self.interface.outputs().clone(),
            outer_exposed,
        )?;
        let system = OdeSystem::new(
            new_vars.clone(),
            self.params.clone(),
            PolyMap::new(new_vars, field)?,
            readout,
            cospan.outer.then(&apex)?,
            interface,
        )?;
        Ok(Shared { system, quotient, apex })
    }

    /// Feeds inputs per `prism` and reads outer outputs off inner ones.
    pub fn wire(&self, prism: &Prism, outer: &Interface) -> Result<OdeSystem> {
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
        let n_out = outputs.len();
        let feed: BTreeMap<String, Polynomial> = inputs
            .base()
            .iter()
            .enumerate()
            .map(|(i, x)| {
                let t = prism.phi_in.at(i);
                let p = if t < n_out {
                    self.readout.components()[t].clone()
                } else {
                    Polynomial::var(outer.inputs().base().name(t - n_out))
                };
                (x.to_string(), p)
            })
            .collect();
        let field = self.field.map_components(|p| p.substitute_map(&feed));
        let readout = PolyMap::new(
            outer.outputs().base().clone(),
            prism
                .phi_out
                .indices()
                .iter()
                .map(|&o| self.readout.components()[o].clone())
                .collect(),
        )?;
        let interface = Interface::new(
            outer.inputs().clone(),
            outer.outputs().clone(),
            self.interface.exposed().clone(),
        )?;
        OdeSystem::new(
            self.vars.clone(),
            self.params.clone(),
            field,
            readout,
            self.ports.clone(),
            interface,
        )
    }

    /// Renames variables along a bijection `vars -> new names`.
    pub fn rename_vars(&self, bijection: &FinMap) -> Result<OdeSystem> {
        if bijection.dom() != &self.vars || !bijection.is_bijection() {
            return Err(boundary("renamed variables", &self.vars, bijection.dom()));
        }
        let rename = |n: &str| bijection.apply(n).map(str::to_string);
        let new_vars = bijection.cod().clone();
        let mut field = vec![Polynomial::zero(); new_vars.len()];
        for (i, p) in self.field.components().iter().enumerate() {
            field[bijection.at(i)] = p.rename(rename);
        }
        OdeSystem::new(
            new_vars.clone(),
            self.params.clone(),
            PolyMap::new(new_vars, field)?,
            self.readout.map_components(|p| p.rename(rename)),
            self.ports.then(bijection)?,
            self.interface.clone(),
        )
    }
}

impl fmt::Display for OdeSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (v, p) in self.field.iter() {
            writeln!(f, "d{v}/dt = {p}")?;
        }
        for (o, p) in self.readout.iter() {
            writeln!(f, "{o} := {p}")?;
        }
        for (i, m) in self.ports.dom().iter().enumerate() {
            writeln!(f, "{m} -> {}", self.vars.name(self.ports.at(i)))?;
        }
        Ok(())
    }
}

/// A tensor product with the injection of each factor's variables.
#[derive(Clone, Debug)]
pub struct Tensored {
    pub system: OdeSystem,
    pub injections: Vec<FinMap>,
}

/// A shared system with the maps that built its variables.
#[derive(Clone, Debug)]
pub struct Shared {
    pub system: OdeSystem,
    /// Old variables onto new ones.
    pub quotient: FinMap,
    /// Apex ports into new variables.
    pub apex: FinMap,
}
