//! The JSON model format.
//!
//! ```json
//! {
//!   "doctrine": "ode",
//!   "parameters": { "beta": 0.5 },
//!   "boxes": {
//!     "growth": {
//!       "outputs": ["o"], "exposed": ["m"],
//!       "field": { "r": "beta*r" }, "readout": { "o": "r" }, "ports": { "m": "r" }
//!     }
//!   },
//!   "morphisms": { "...": { "domain": { "a": "growth" }, "codomain": { }, "phi_in": { } } },
//!   "compose": { "morphism": "...", "args": ["growth"] }
//! }
//! ```
//!
//! Ports are either a list of names (continuous models, type `R`) or an
//! object from name to type. Automaton boxes list `states`, an `update`
//! table of `{state, input, next}` rows, `readout` and `observe` tables from
//! state to letters. Rows missing from `update` mean no successor.

use std::collections::{BTreeMap, BTreeSet};

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::automata::{Alphabet, Automaton};
use crate::expr::{parse, PolyMap, Polynomial};
use crate::finset::{FinMap, FinSet, TypedFinSet};
use crate::ode::{OdeSystem, REAL};
use crate::rsm::{act_in, Doctrine, FilledBox, RsmError};
use crate::wiring::{as_refs, Interface, RsmMorphism, Slot};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DoctrineTag {
    Ode,
    Automata,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub doctrine: DoctrineTag,
    /// Parameter names with optional default values.
    #[serde(default, skip_serializing_if = "IndexMap::is_empty")]
    pub parameters: IndexMap<String, Option<f64>>,
    /// Default initial values of the composite's variables.
    #[serde(default, skip_serializing_if = "IndexMap::is_empty")]
    pub initial: IndexMap<String, f64>,
    #[serde(default, skip_serializing_if = "IndexMap::is_empty")]
    pub alphabets: IndexMap<String, Vec<String>>,
    #[serde(default, skip_serializing_if = "IndexMap::is_empty")]
    pub interfaces: IndexMap<String, InterfaceDef>,
    pub boxes: IndexMap<String, BoxDef>,
    #[serde(default, skip_serializing_if = "IndexMap::is_empty")]
    pub morphisms: IndexMap<String, MorphismDef>,
    pub compose: ComposeExpr,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Ports {
    Names(Vec<String>),
    Typed(IndexMap<String, String>),
}

impl Default for Ports {
    fn default() -> Self {
        Ports::Names(Vec::new())
    }
}

impl Ports {
    pub fn is_empty(&self) -> bool {
        match self {
            Ports::Names(v) => v.is_empty(),
            Ports::Typed(m) => m.is_empty(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterfaceDef {
    #[serde(default, skip_serializing_if = "Ports::is_empty")]
    pub inputs: Ports,
    #[serde(default, skip_serializing_if = "Ports::is_empty")]
    pub outputs: Ports,
    #[serde(default, skip_serializing_if = "Ports::is_empty")]
    pub exposed: Ports,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InterfaceRef {
    Named(String),
    Inline(InterfaceDef),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Readout {
    Polynomials(IndexMap<String, String>),
    Letters(IndexMap<String, Vec<String>>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Transition {
    pub state: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub input: Vec<String>,
    pub next: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxDef {
    #[serde(default, skip_serializing_if = "Ports::is_empty")]
    pub inputs: Ports,
    #[serde(default, skip_serializing_if = "Ports::is_empty")]
    pub outputs: Ports,
    #[serde(default, skip_serializing_if = "Ports::is_empty")]
    pub exposed: Ports,
    /// Continuous: velocity of each variable.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<IndexMap<String, String>>,
    /// Continuous: polynomial per output. Automata: letters per state.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub readout: Option<Readout>,
    /// Continuous: the variable each exposed port reads.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ports: Option<IndexMap<String, String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub states: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub update: Option<Vec<Transition>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observe: Option<IndexMap<String, Vec<String>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorphismDef {
    /// Slot label to interface, in slot order.
    pub domain: IndexMap<String, InterfaceRef>,
    pub codomain: InterfaceRef,
    #[serde(default, skip_serializing_if = "IndexMap::is_empty")]
    pub phi_in: IndexMap<String, String>,
    #[serde(default, skip_serializing_if = "IndexMap::is_empty")]
    pub phi_out: IndexMap<String, String>,
    #[serde(default, skip_serializing_if = "Ports::is_empty")]
    pub apex: Ports,
    #[serde(default, skip_serializing_if = "IndexMap::is_empty")]
    pub inner: IndexMap<String, String>,
    #[serde(default, skip_serializing_if = "IndexMap::is_empty")]
    pub outer: IndexMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComposeExpr {
    Box(String),
    Apply {
        morphism: String,
        #[serde(default)]
        args: Vec<ComposeExpr>,
    },
}

/// A problem at a JSON pointer into the model file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Located {
    pub pointer: String,
    pub message: String,
}

impl std::fmt::Display for Located {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.pointer.is_empty() {
            write!(f, "{}", self.message)
        } else {
            write!(f, "{}: {}", self.pointer, self.message)
        }
    }
}

/// Why a model could not be loaded.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LoadError {
    Parse(Vec<Located>),
    Invalid(Vec<Located>),
}

/// JSON pointer from reference tokens.
pub fn pointer<S: AsRef<str>>(tokens: &[S]) -> String {
    tokens
        .iter()
        .map(|t| format!("/{}", t.as_ref().replace('~', "~0").replace('/', "~1")))
        .collect()
}

fn at<S: AsRef<str>>(tokens: &[S], message: impl Into<String>) -> Located {
    Located {
        pointer: pointer(tokens),
        message: message.into(),
    }
}

pub fn parse_model(text: &str) -> Result<ModelFile, LoadError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let tokens: Vec<String> = e
            .path()
            .iter()
            .filter_map(|seg| match seg {
                serde_path_to_error::Segment::Seq { index } => Some(index.to_string()),
                serde_path_to_error::Segment::Map { key } => Some(key.clone()),
                serde_path_to_error::Segment::Enum { variant } => Some(variant.clone()),
                serde_path_to_error::Segment::Unknown => None,
            })
            .collect();
        LoadError::Parse(vec![at(&tokens, e.inner().to_string())])
    })
}

/// A model with every box, interface and morphism resolved.
#[derive(Clone, Debug)]
pub struct Model {
    pub file: ModelFile,
    pub doctrine: Doctrine,
    pub boxes: IndexMap<String, FilledBox>,
    pub morphisms: IndexMap<String, RsmMorphism>,
}

impl Model {
    pub fn load(text: &str) -> Result<Model, LoadError> {
        let file = parse_model(text)?;
        Resolver::new(file).run()
    }

    /// Default parameter values.
    pub fn parameters(&self) -> BTreeMap<String, f64> {
        self.file
            .parameters
            .iter()
            .filter_map(|(k, v)| v.map(|v| (k.clone(), v)))
            .collect()
    }

    pub fn initial(&self) -> BTreeMap<String, f64> {
        self.file.initial.iter().map(|(k, v)| (k.clone(), *v)).collect()
    }

    /// Evaluates the root composition.
    pub fn compose(&self) -> Result<FilledBox, RsmError> {
        self.eval(&self.file.compose)
    }

    fn eval(&self, expr: &ComposeExpr) -> Result<FilledBox, RsmError> {
        match expr {
            ComposeExpr::Box(name) => Ok(self.boxes[name].clone()),
            ComposeExpr::Apply { morphism, args } => {
                let fillings = args.iter().map(|a| self.eval(a)).collect::<Result<Vec<_>, _>>()?;
                Ok(act_in(&self.doctrine, &self.morphisms[morphism], &fillings)?.filling)
            }
        }
    }

    /// A model file holding `filled` as its only box, named `composite`.
    pub fn single_box_file(&self, filled: &FilledBox) -> ModelFile {
        let mut boxes = IndexMap::new();
        boxes.insert("composite".to_string(), box_def(filled));
        ModelFile {
            doctrine: self.file.doctrine,
            parameters: self.file.parameters.clone(),
            initial: self.file.initial.clone(),
            alphabets: self.file.alphabets.clone(),
            interfaces: IndexMap::new(),
            boxes,
            morphisms: IndexMap::new(),
            compose: ComposeExpr::Box("composite".to_string()),
        }
    }
}

/// Serializes a filled box back to its JSON form.
pub fn box_def(filled: &FilledBox) -> BoxDef {
    match filled {
        FilledBox::Ode(sys) => {
            let names = |t: &TypedFinSet| Ports::Names(t.base().iter().map(String::from).collect());
            let iface = sys.interface();
            BoxDef {
                inputs: names(iface.inputs()),
                outputs: names(iface.outputs()),
                exposed: names(iface.exposed()),
                field: Some(
                    sys.field()
                        .iter()
                        .map(|(v, p)| (v.to_string(), p.to_string()))
                        .collect(),
                ),
                readout: (!iface.outputs().is_empty()).then(|| {
                    Readout::Polynomials(
                        sys.readout()
                            .iter()
                            .map(|(o, p)| (o.to_string(), p.to_string()))
                            .collect(),
                    )
                }),
                ports: (!iface.exposed().is_empty()).then(|| {
                    sys.ports()
                        .dom()
                        .iter()
                        .enumerate()
                        .map(|(k, m)| (m.to_string(), sys.vars().name(sys.ports().at(k)).to_string()))
                        .collect()
                }),
                ..BoxDef::default()
            }
        }
        FilledBox::Automata(a) => {
            let typed =
                |t: &TypedFinSet| Ports::Typed(t.iter().map(|(p, ty)| (p.to_string(), ty.to_string())).collect());
            let iface = a.interface();
            let states = a.states();
            let letters = |space: &crate::finset::Labelings, idx: usize| -> Vec<String> {
                space
                    .tuple(idx)
                    .iter()
                    .enumerate()
                    .map(|(k, &l)| space.alphabet(k).name(l).to_string())
                    .collect()
            };
            let mut update = Vec::new();
            for (s, row) in a.update_table().iter().enumerate() {
                for (i, next) in row.iter().enumerate() {
                    if next.is_empty() {
                        continue;
                    }
                    update.push(Transition {
                        state: states.name(s).to_string(),
                        input: letters(a.input_space(), i),
                        next: next.iter().map(|&t| states.name(t).to_string()).collect(),
                    });
                }
            }
            let per_state = |f: &dyn Fn(usize) -> Vec<String>| -> IndexMap<String, Vec<String>> {
                (0..states.len()).map(|s| (states.name(s).to_string(), f(s))).collect()
            };
            BoxDef {
                inputs: typed(iface.inputs()),
                outputs: typed(iface.outputs()),
                exposed: typed(iface.exposed()),
                states: Some(states.iter().map(String::from).collect()),
                update: Some(update),
                readout: (!iface.outputs().is_empty())
                    .then(|| Readout::Letters(per_state(&|s| letters(a.output_space(), a.readout(s))))),
                observe: (!iface.exposed().is_empty())
                    .then(|| per_state(&|s| letters(a.observation_space(), a.observation(s)))),
                ..BoxDef::default()
            }
        }
    }
}

struct Resolver {
    file: ModelFile,
    parse_errors: Vec<Located>,
    errors: Vec<Located>,
    alphabets: BTreeMap<String, FinSet>,
}

impl Resolver {
    fn new(file: ModelFile) -> Self {
        Self {
            file,
            parse_errors: Vec::new(),
            errors: Vec::new(),
            alphabets: BTreeMap::new(),
        }
    }

    fn ode(&self) -> bool {
        self.file.doctrine == DoctrineTag::Ode
    }

    fn run(mut self) -> Result<Model, LoadError> {
        self.resolve_alphabets();
        let mut boxes = IndexMap::new();
        let names: Vec<String> = self.file.boxes.keys().cloned().collect();
        for name in &names {
            let def = self.file.boxes[name].clone();
            let built = if self.ode() {
                self.ode_box(name, &def).map(FilledBox::Ode)
            } else {
                self.automaton_box(name, &def).map(FilledBox::Automata)
            };
            if let Some(b) = built {
                boxes.insert(name.clone(), b);
            }
        }
        if !self.parse_errors.is_empty() {
            return Err(LoadError::Parse(self.parse_errors));
        }
        let mut interfaces: IndexMap<String, Interface> = IndexMap::new();
        let iface_names: Vec<String> = self.file.interfaces.keys().cloned().collect();
        for name in &iface_names {
            let def = self.file.interfaces[name].clone();
            if let Some(i) = self.interface(&["interfaces", name], &def) {
                interfaces.insert(name.clone(), i);
            }
        }
        for (name, b) in &boxes {
            interfaces.entry(name.clone()).or_insert_with(|| b.interface().clone());
        }
        let mut morphisms = IndexMap::new();
        let m_names: Vec<String> = self.file.morphisms.keys().cloned().collect();
        for name in &m_names {
            let def = self.file.morphisms[name].clone();
            if let Some(m) = self.morphism(name, &def, &interfaces) {
                morphisms.insert(name.clone(), m);
            }
        }
        let compose = self.file.compose.clone();
        self.check_expr(&compose, &mut vec!["compose".to_string()], &boxes, &morphisms);
        if !self.errors.is_empty() {
            return Err(LoadError::Invalid(self.errors));
        }
        let doctrine = if self.ode() {
            Doctrine::Ode
        } else {
            Doctrine::Automata(self.alphabets.clone())
        };
        Ok(Model {
            file: self.file,
            doctrine,
            boxes,
            morphisms,
        })
    }

    fn resolve_alphabets(&mut self) {
        if self.ode() && !self.file.alphabets.is_empty() {
            self.errors
                .push(at(&["alphabets"], "continuous models have no alphabets"));
        }
        for (name, letters) in self.file.alphabets.clone() {
            let built = FinSet::new(letters)
                .map_err(|e| e.to_string())
                .and_then(|set| Alphabet::new(&name, set).map_err(|e| e.to_string()));
            match built {
                Ok(a) => {
                    self.alphabets.insert(a.name, a.letters);
                }
                Err(e) => self.errors.push(at(&["alphabets", &name], e)),
            }
        }
    }

    fn ports(&mut self, path: &[&str], ports: &Ports) -> Option<TypedFinSet> {
        let pairs: Vec<(String, String)> = match ports {
            Ports::Names(names) if self.ode() => names.iter().map(|n| (n.clone(), REAL.to_string())).collect(),
            Ports::Names(names) if names.is_empty() => Vec::new(),
            Ports::Names(_) => {
                self.errors.push(at(
                    path,
                    "automaton ports need types: use an object from port to alphabet",
                ));
                return None;
            }
            Ports::Typed(map) => map.iter().map(|(k, v)| (k.clone(), v.clone())).collect(),
        };
        let mut ok = true;
        for (port, ty) in &pairs {
            let mut p = path.to_vec();
            p.push(port);
            if self.ode() && ty != REAL {
                self.errors
                    .push(at(&p, format!("continuous ports have type `{REAL}`, not `{ty}`")));
                ok = false;
            } else if !self.ode() && !self.alphabets.contains_key(ty) {
                self.errors.push(at(&p, format!("unknown alphabet `{ty}`")));
                ok = false;
            }
        }
        match TypedFinSet::new(pairs) {
            Ok(t) if ok => Some(t),
            Ok(_) => None,
            Err(e) => {
                self.errors.push(at(path, e.to_string()));
                None
            }
        }
    }

    fn interface(&mut self, path: &[&str], def: &InterfaceDef) -> Option<Interface> {
        self.interface_parts(path, &def.inputs, &def.outputs, &def.exposed)
    }

    fn interface_parts(
        &mut self,
        path: &[&str],
        inputs: &Ports,
        outputs: &Ports,
        exposed: &Ports,
    ) -> Option<Interface> {
        let sub = |k: &'static str| {
            let mut p = path.to_vec();
            p.push(k);
            p
        };
        let i = self.ports(&sub("inputs"), inputs);
        let o = self.ports(&sub("outputs"), outputs);
        let e = self.ports(&sub("exposed"), exposed);
        match Interface::new(i?, o?, e?) {
            Ok(iface) => Some(iface),
            Err(err) => {
                self.errors.push(at(path, err.to_string()));
                None
            }
        }
    }

    fn misplaced(&mut self, path: &[&str], present: &[(&str, bool)]) {
        for (key, is_present) in present {
            if *is_present {
                let mut p = path.to_vec();
                p.push(key);
                let kind = if self.ode() { "continuous" } else { "automaton" };
                self.errors.push(at(&p, format!("not a field of {kind} boxes")));
            }
        }
    }

    fn poly(&mut self, path: &[&str], text: &str) -> Option<Polynomial> {
        match parse(text) {
            Ok(p) => Some(p),
            Err(e) => {
                self.parse_errors.push(at(path, e.to_string()));
                None
            }
        }
    }

    fn ode_box(&mut self, name: &str, def: &BoxDef) -> Option<OdeSystem> {
        let base = ["boxes", name];
        self.misplaced(
            &base,
            &[
                ("states", def.states.is_some()),
                ("update", def.update.is_some()),
                ("observe", def.observe.is_some()),
            ],
        );
        let iface = self.interface_parts(&base, &def.inputs, &def.outputs, &def.exposed);
        let field_def = def.field.clone().unwrap_or_default();
        if def.field.is_none() {
            self.errors.push(at(&base, "missing `field`"));
        }
        let vars = match FinSet::new(field_def.keys().cloned()) {
            Ok(v) => v,
            Err(e) => {
                self.errors.push(at(&["boxes", name, "field"], e.to_string()));
                return None;
            }
        };
        let mut field = Vec::new();
        for (v, text) in &field_def {
            field.push(self.poly(&["boxes", name, "field", v], text));
        }
        let readout_def = match &def.readout {
            None => IndexMap::new(),
            Some(Readout::Polynomials(m)) => m.clone(),
            Some(Readout::Letters(_)) => {
                self.errors
                    .push(at(&["boxes", name, "readout"], "expected polynomials, one per output"));
                return None;
            }
        };
        let mut readout = Vec::new();
        for (o, text) in &readout_def {
            readout.push((o.clone(), self.poly(&["boxes", name, "readout", o], text)));
        }
        let iface = iface?;
        let field: Vec<Polynomial> = field.into_iter().collect::<Option<_>>()?;
        let readout: Vec<(String, Polynomial)> = readout
            .into_iter()
            .map(|(o, p)| p.map(|p| (o, p)))
            .collect::<Option<_>>()?;

        let declared: BTreeSet<&str> = self.file.parameters.keys().map(String::as_str).collect();
        let inputs = iface.inputs().base();
        let mut params = BTreeSet::new();
        let mut ok = true;
        let mut scan = |path: Vec<&str>, p: &Polynomial, allow_inputs: bool, errors: &mut Vec<Located>| {
            for n in p.names() {
                if vars.contains(n) || (allow_inputs && inputs.contains(n)) {
                    continue;
                }
                if declared.contains(n) {
                    params.insert(n.to_string());
                } else {
                    let what = if !allow_inputs && inputs.contains(n) {
                        format!("readout uses input `{n}`; readouts may only use variables and parameters")
                    } else {
                        format!("unknown name `{n}`: not a variable, input or declared parameter")
                    };
                    errors.push(at(&path, what));
                    ok = false;
                }
            }
        };
        for (v, p) in vars.iter().zip(&field) {
            scan(vec!["boxes", name, "field", v], p, true, &mut self.errors);
        }
        for (o, p) in &readout {
            scan(vec!["boxes", name, "readout", o.as_str()], p, false, &mut self.errors);
        }
        if !ok {
            return None;
        }
        let readout = match PolyMap::from_pairs(iface.outputs().base().clone(), readout) {
            Ok(r) => r,
            Err(e) => {
                self.errors.push(at(&["boxes", name, "readout"], e.to_string()));
                return None;
            }
        };
        let port_pairs = def.ports.clone().unwrap_or_default();
        let ports = match FinMap::from_pairs(iface.exposed().base().clone(), vars.clone(), port_pairs) {
            Ok(p) => p,
            Err(e) => {
                self.errors.push(at(&["boxes", name, "ports"], e.to_string()));
                return None;
            }
        };
        let field = PolyMap::new(vars.clone(), field).expect("one component per variable");
        match OdeSystem::new(vars, params, field, readout, ports, iface) {
            Ok(sys) => Some(sys),
            Err(e) => {
                self.errors.push(at(&base, e.to_string()));
                None
            }
        }
    }

    fn automaton_box(&mut self, name: &str, def: &BoxDef) -> Option<Automaton> {
        let base = ["boxes", name];
        self.misplaced(&base, &[("field", def.field.is_some()), ("ports", def.ports.is_some())]);
        let iface = self.interface_parts(&base, &def.inputs, &def.outputs, &def.exposed)?;
        let Some(states) = &def.states else {
            self.errors.push(at(&base, "missing `states`"));
            return None;
        };
        let states = match FinSet::new(states.iter().cloned()) {
            Ok(s) => s,
            Err(e) => {
                self.errors.push(at(&["boxes", name, "states"], e.to_string()));
                return None;
            }
        };
        let mut builder = match Automaton::builder(self.alphabets.clone(), states, iface) {
            Ok(b) => b,
            Err(e) => {
                self.errors.push(at(&base, e.to_string()));
                return None;
            }
        };
        let before = self.errors.len();
        for (k, row) in def.update.iter().flatten().enumerate() {
            let input: Vec<&str> = row.input.iter().map(String::as_str).collect();
            let next: Vec<&str> = row.next.iter().map(String::as_str).collect();
            if let Err(e) = builder.transition(&row.state, &input, &next) {
                self.errors
                    .push(at(&["boxes", name, "update", &k.to_string()], e.to_string()));
            }
        }
        match &def.readout {
            None => {}
            Some(Readout::Letters(map)) => {
                for (s, letters) in map {
                    let letters: Vec<&str> = letters.iter().map(String::as_str).collect();
                    if let Err(e) = builder.readout(s, &letters) {
                        self.errors.push(at(&["boxes", name, "readout", s], e.to_string()));
                    }
                }
            }
            Some(Readout::Polynomials(map)) if map.is_empty() => {}
            Some(Readout::Polynomials(_)) => {
                self.errors
                    .push(at(&["boxes", name, "readout"], "expected letters per state"));
            }
        }
        for (s, letters) in def.observe.iter().flatten() {
            let letters: Vec<&str> = letters.iter().map(String::as_str).collect();
            if let Err(e) = builder.observe(s, &letters) {
                self.errors.push(at(&["boxes", name, "observe", s], e.to_string()));
            }
        }
        if self.errors.len() != before {
            return None;
        }
        match builder.build() {
            Ok(a) => Some(a),
            Err(e) => {
                self.errors.push(at(&base, e.to_string()));
                None
            }
        }
    }

    fn interface_ref(
        &mut self,
        path: &[&str],
        r: &InterfaceRef,
        named: &IndexMap<String, Interface>,
    ) -> Option<Interface> {
        match r {
            InterfaceRef::Named(n) => match named.get(n) {
                Some(i) => Some(i.clone()),
                None => {
                    self.errors.push(at(path, format!("no interface or box named `{n}`")));
                    None
                }
            },
            InterfaceRef::Inline(def) => self.interface(path, def),
        }
    }

    fn morphism(&mut self, name: &str, def: &MorphismDef, named: &IndexMap<String, Interface>) -> Option<RsmMorphism> {
        let base = ["morphisms", name];
        let mut slots = Vec::new();
        for (label, r) in &def.domain {
            slots.push(
                self.interface_ref(&["morphisms", name, "domain", label], r, named)
                    .map(|i| Slot::new(label.clone(), i)),
            );
        }
        let codomain = self.interface_ref(&["morphisms", name, "codomain"], &def.codomain, named);
        let apex = self.ports(&["morphisms", name, "apex"], &def.apex);
        let slots: Vec<Slot> = slots.into_iter().collect::<Option<_>>()?;
        let (codomain, apex) = (codomain?, apex?);

        let labelled = || slots.iter().map(|s| (s.label.as_str(), &s.interface));
        let sums = match Interface::tensor_labeled(labelled()) {
            Ok(s) => s,
            Err(e) => {
                self.errors.push(at(&["morphisms", name, "domain"], e.to_string()));
                return None;
            }
        };
        let sources: BTreeSet<&str> = sums
            .outputs()
            .base()
            .iter()
            .chain(codomain.inputs().base().iter())
            .collect();
        let before = self.errors.len();
        let mut targets = |leg: &str, map: &IndexMap<String, String>, allowed: &dyn Fn(&str) -> bool| {
            for (k, v) in map {
                if !allowed(v) {
                    self.errors.push(at(
                        &["morphisms", name, leg, k],
                        format!("`{v}` is not a port this wire can reach"),
                    ));
                }
            }
        };
        targets("phi_in", &def.phi_in, &|v| sources.contains(v));
        targets("phi_out", &def.phi_out, &|v| sums.outputs().base().contains(v));
        targets("inner", &def.inner, &|v| apex.base().contains(v));
        targets("outer", &def.outer, &|v| apex.base().contains(v));
        if self.errors.len() != before {
            return None;
        }
        let refs = |m: &IndexMap<String, String>| -> Vec<(String, String)> {
            m.iter().map(|(a, b)| (a.clone(), b.clone())).collect()
        };
        let (feeds, drives, inner, outer) = (
            refs(&def.phi_in),
            refs(&def.phi_out),
            refs(&def.inner),
            refs(&def.outer),
        );
        let morphism = match RsmMorphism::build(
            slots,
            codomain,
            &as_refs(&feeds),
            &as_refs(&drives),
            apex,
            &as_refs(&inner),
            &as_refs(&outer),
        ) {
            Ok(m) => m,
            Err(e) => {
                self.errors.push(at(&base, e.to_string()));
                return None;
            }
        };
        let diagnostics = morphism.validate();
        if diagnostics.is_empty() {
            return Some(morphism);
        }
        for d in diagnostics {
            let mut p = vec!["morphisms", name, d.component.as_str()];
            if !d.port.is_empty() {
                p.push(&d.port);
            }
            self.errors.push(at(&p, d.message.clone()));
        }
        None
    }

    /// Interface produced by a composition expression, reporting problems.
    fn check_expr(
        &mut self,
        expr: &ComposeExpr,
        path: &mut Vec<String>,
        boxes: &IndexMap<String, FilledBox>,
        morphisms: &IndexMap<String, RsmMorphism>,
    ) -> Option<Interface> {
        match expr {
            ComposeExpr::Box(name) => match boxes.get(name) {
                Some(b) => Some(b.interface().clone()),
                None => {
                    if !self.file.boxes.contains_key(name) {
                        self.errors.push(at(path, format!("no box named `{name}`")));
                    }
                    None
                }
            },
            ComposeExpr::Apply { morphism, args } => {
                let m = morphisms.get(morphism);
                if m.is_none() && !self.file.morphisms.contains_key(morphism) {
                    path.push("morphism".into());
                    self.errors.push(at(path, format!("no morphism named `{morphism}`")));
                    path.pop();
                }
                path.push("args".into());
                let mut found = Vec::new();
                for (k, a) in args.iter().enumerate() {
                    path.push(k.to_string());
                    found.push(self.check_expr(a, path, boxes, morphisms));
                    path.pop();
                }
                path.pop();
                let m = m?;
                if args.len() != m.domain.len() {
                    path.push("args".into());
                    self.errors.push(at(
                        path,
                        format!("`{morphism}` takes {} boxes, got {}", m.domain.len(), args.len()),
                    ));
                    path.pop();
                    return None;
                }
                for (k, (slot, iface)) in m.domain.iter().zip(found).enumerate() {
                    if let Some(iface) = iface {
                        if iface != slot.interface {
                            path.extend(["args".to_string(), k.to_string()]);
                            self.errors.push(at(
                                path,
                                format!("does not have the interface of slot `{}`", slot.label),
                            ));
                            path.truncate(path.len() - 2);
                        }
                    }
                }
                Some(m.codomain.clone())
            }
        }
    }
}
