//! Running composites: fixed-step integration of continuous systems and
//! transition graphs of closed automata.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};
use std::str::FromStr;

use thiserror::Error;

use crate::automata::Automaton;
use crate::expr::{CompiledPoly, ExprError};
use crate::finset::{FinSet, UnionFind};
use crate::ode::OdeSystem;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("inputs {0:?} are not wired to anything")]
    FreeInputs(Vec<String>),
    #[error("step size must be positive and finite, got {0}")]
    BadStep(f64),
    #[error("end time must be non-negative and finite, got {0}")]
    BadHorizon(f64),
    #[error("no initial value for `{0}`")]
    MissingInitial(String),
    #[error("`{0}` is not a variable of the system")]
    UnknownVariable(String),
    #[error("no value for parameter `{0}`")]
    MissingParam(String),
    #[error("`{var}` became {value} at step {step}")]
    NonFinite { step: usize, var: String, value: f64 },
    #[error(transparent)]
    Expr(#[from] ExprError),
}

pub type Result<T> = std::result::Result<T, SimError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Euler,
    Rk4,
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "euler" => Ok(Method::Euler),
            "rk4" => Ok(Method::Rk4),
            other => Err(format!("unknown method `{other}`, expected euler or rk4")),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Euler => "euler",
            Method::Rk4 => "rk4",
        })
    }
}

/// Values of every variable on a uniform time grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    vars: Vec<String>,
    times: Vec<f64>,
    values: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// The whole series of one variable.
    pub fn series(&self, var: &str) -> Option<&[f64]> {
        let k = self.vars.iter().position(|v| v == var)?;
        Some(&self.values[k])
    }

    /// Value of `var` at the last grid point.
    pub fn last(&self, var: &str) -> Option<f64> {
        self.series(var).and_then(|s| s.last().copied())
    }

    /// Header `t,var1,var2,...`, then one row per grid point.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t");
        for v in &self.vars {
            out.push(',');
            out.push_str(v);
        }
        out.push('\n');
        for (k, t) in self.times.iter().enumerate() {
            write!(out, "{t}").unwrap();
            for series in &self.values {
                write!(out, ",{}", series[k]).unwrap();
            }
            out.push('\n');
        }
        out
    }
}

/// Number of steps of size `dt` that fit in `[0, t_end]`, forgiving the
/// rounding of `t_end / dt` just below an integer.
pub fn step_count(t_end: f64, dt: f64) -> usize {
    (t_end / dt + 1e-9).floor() as usize
}

/// Integrates a closed system from `x0` with fixed steps.
///
/// Parameters not mentioned by the system are ignored. The grid is
/// `k * dt` for `k = 0..=step_count(t_end, dt)`.
pub fn integrate(
    sys: &OdeSystem,
    x0: &BTreeMap<String, f64>,
    params: &BTreeMap<String, f64>,
    t_end: f64,
    dt: f64,
    method: Method,
) -> Result<Trajectory> {
    let inputs = sys.interface().inputs();
    if !inputs.is_empty() {
        return Err(SimError::FreeInputs(inputs.base().iter().map(String::from).collect()));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(SimError::BadStep(dt));
    }
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(SimError::BadHorizon(t_end));
    }
    let vars = sys.vars();
    if let Some(unknown) = x0.keys().find(|k| !vars.contains(k)) {
        return Err(SimError::UnknownVariable(unknown.clone()));
    }
    let mut state: Vec<f64> = vars
        .iter()
        .map(|v| {
            x0.get(v)
                .copied()
                .ok_or_else(|| SimError::MissingInitial(v.to_string()))
        })
        .collect::<Result<_>>()?;
    let n = vars.len();
    let param_names: Vec<&String> = sys.params().iter().collect();
    let mut fixed = Vec::with_capacity(param_names.len());
    for name in &param_names {
        let value = params
            .get(*name)
            .ok_or_else(|| SimError::MissingParam(name.to_string()))?;
        fixed.push(*value);
    }
    let slot = |name: &str| {
        vars.index_of(name)
            .or_else(|| param_names.iter().position(|p| *p == name).map(|k| n + k))
    };
    let field = sys
        .field()
        .components()
        .iter()
        .map(|p| CompiledPoly::new(p, slot))
        .collect::<std::result::Result<Vec<_>, _>>()?;

    let mut scratch = vec![0.0; n + fixed.len()];
    scratch[n..].copy_from_slice(&fixed);
    let mut eval = |x: &[f64], out: &mut [f64]| {
        scratch[..n].copy_from_slice(x);
        for (o, p) in out.iter_mut().zip(&field) {
            *o = p.eval(&scratch);
        }
    };

    let steps = step_count(t_end, dt);
    let mut times = Vec::with_capacity(steps + 1);
    let mut values: Vec<Vec<f64>> = (0..n).map(|_| Vec::with_capacity(steps + 1)).collect();
    let record = |values: &mut Vec<Vec<f64>>, x: &[f64]| {
        for (series, &v) in values.iter_mut().zip(x) {
            series.push(v);
        }
    };
    times.push(0.0);
    record(&mut values, &state);

    let (mut k1, mut k2, mut k3, mut k4) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let mut tmp = vec![0.0; n];
    for step in 1..=steps {
        match method {
            Method::Euler => {
                eval(&state, &mut k1);
                for i in 0..n {
                    state[i] += dt * k1[i];
                }
            }
            Method::Rk4 => {
                eval(&state, &mut k1);
                for i in 0..n {
                    tmp[i] = state[i] + 0.5 * dt * k1[i];
                }
                eval(&tmp, &mut k2);
                for i in 0..n {
                    tmp[i] = state[i] + 0.5 * dt * k2[i];
                }
                eval(&tmp, &mut k3);
                for i in 0..n {
                    tmp[i] = state[i] + dt * k3[i];
                }
                eval(&tmp, &mut k4);
                for i in 0..n {
                    state[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
                }
            }
        }
        if let Some(i) = state.iter().position(|v| !v.is_finite()) {
            return Err(SimError::NonFinite {
                step,
                var: vars.name(i).to_string(),
                value: state[i],
            });
        }
        times.push(step as f64 * dt);
        record(&mut values, &state);
    }
    Ok(Trajectory {
        vars: vars.iter().map(String::from).collect(),
        times,
        values,
    })
}

/// States and transitions of a closed automaton.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitionGraph {
    nodes: FinSet,
    edges: BTreeSet<(usize, usize)>,
}

impl TransitionGraph {
    pub fn new(nodes: FinSet, edges: BTreeSet<(usize, usize)>) -> Self {
        assert!(
            edges.iter().all(|&(a, b)| a < nodes.len() && b < nodes.len()),
            "edge endpoints must be nodes"
        );
        Self { nodes, edges }
    }

    pub fn nodes(&self) -> &FinSet {
        &self.nodes
    }

    pub fn edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.edges
    }

    /// Edges by node name.
    pub fn named_edges(&self) -> BTreeSet<(&str, &str)> {
        self.edges
            .iter()
            .map(|&(a, b)| (self.nodes.name(a), self.nodes.name(b)))
            .collect()
    }

    pub fn successors(&self, node: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges.range((node, 0)..(node + 1, 0)).map(|&(_, b)| b)
    }

    /// Weakly connected components, each sorted, ordered by least node.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut uf = UnionFind::new(self.nodes.len());
        for &(a, b) in &self.edges {
            uf.union(a, b);
        }
        let mut by_root: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for v in 0..self.nodes.len() {
            by_root.entry(uf.find(v)).or_default().push(v);
        }
        by_root.into_values().collect()
    }

    pub fn to_dot(&self) -> String {
        let quote = |s: &str| format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""));
        let mut out = String::from("digraph automaton {\n");
        for name in self.nodes.iter() {
            writeln!(out, "  {};", quote(name)).unwrap();
        }
        for &(a, b) in &self.edges {
            writeln!(out, "  {} -> {};", quote(self.nodes.name(a)), quote(self.nodes.name(b))).unwrap();
        }
        out.push_str("}\n");
        out
    }
}

/// Transition graph of an automaton without inputs.
pub fn graph(a: &Automaton) -> Result<TransitionGraph> {
    let inputs = a.interface().inputs();
    if !inputs.is_empty() {
        return Err(SimError::FreeInputs(inputs.base().iter().map(String::from).collect()));
    }
    let edges = a
        .update_table()
        .iter()
        .enumerate()
        .flat_map(|(s, row)| row[0].iter().map(move |&t| (s, t)))
        .collect();
    Ok(TransitionGraph::new(a.states().clone(), edges))
}

/// Names of the states with no successor on any input.
pub fn dead_states(a: &Automaton) -> Vec<String> {
    a.dead_states()
        .into_iter()
        .map(|s| a.states().name(s).to_string())
        .collect()
}

/// `states=N edges=E dead=[...] components=K`.
pub fn summary(a: &Automaton) -> Result<String> {
    let g = graph(a)?;
    Ok(format!(
        "states={} edges={} dead=[{}] components={}",
        g.nodes().len(),
        g.edges().len(),
        dead_states(a).join(","),
        g.components().len()
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse, PolyMap};

    fn growth(rate: &str) -> OdeSystem {
        OdeSystem::closed([("r", parse(rate).unwrap())], &["beta"]).unwrap()
    }

    fn at(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn rk4_hits_the_exponential() {
        let traj = integrate(
            &growth("beta*r"),
            &at(&[("r", 1.0)]),
            &at(&[("beta", 0.5)]),
            1.0,
            1e-3,
            Method::Rk4,
        )
        .unwrap();
        assert_eq!(traj.len(), 1001);
        assert!((traj.last("r").unwrap() - 0.5f64.exp()).abs() < 1e-6);
    }

    #[test]
    fn zero_field_is_constant() {
        let sys = OdeSystem::closed([("r", parse("0").unwrap())], &[]).unwrap();
        let traj = integrate(&sys, &at(&[("r", 3.0)]), &BTreeMap::new(), 0.5, 0.1, Method::Euler).unwrap();
        assert_eq!(traj.len(), 6);
        assert!(traj.series("r").unwrap().iter().all(|&v| v == 3.0));
        assert_eq!(traj.to_csv().lines().next(), Some("t,r"));
    }

    #[test]
    fn reports_errors() {
        let sys = growth("beta*r");
        let p = at(&[("beta", 1.0)]);
        assert_eq!(
            integrate(&sys, &BTreeMap::new(), &p, 1.0, 0.1, Method::Rk4),
            Err(SimError::MissingInitial("r".into()))
        );
        assert_eq!(
            integrate(&sys, &at(&[("r", 1.0)]), &BTreeMap::new(), 1.0, 0.1, Method::Rk4),
            Err(SimError::MissingParam("beta".into()))
        );
        assert!(matches!(
            integrate(&sys, &at(&[("r", 1.0)]), &p, 1.0, 0.0, Method::Rk4),
            Err(SimError::BadStep(_))
        ));
        let blowup = OdeSystem::closed([("r", parse("r^2").unwrap())], &[]).unwrap();
        let err = integrate(&blowup, &at(&[("r", 1.0)]), &p, 10.0, 0.5, Method::Euler).unwrap_err();
        assert!(matches!(err, SimError::NonFinite { .. }));
    }

    #[test]
    fn free_inputs_are_refused() {
        let vars = FinSet::new(["x"]).unwrap();
        let sys = OdeSystem::new(
            vars.clone(),
            BTreeSet::new(),
            PolyMap::from_pairs(vars.clone(), [("x", parse("u").unwrap())]).unwrap(),
            PolyMap::empty(),
            crate::finset::FinMap::initial(&vars),
            crate::wiring::Interface::uniform(&["u"], &[], &[], crate::ode::REAL).unwrap(),
        )
        .unwrap();
        let err = integrate(&sys, &at(&[("x", 0.0)]), &BTreeMap::new(), 1.0, 0.1, Method::Euler).unwrap_err();
        assert_eq!(err, SimError::FreeInputs(vec!["u".into()]));
    }

    #[test]
    fn unit_graph_is_a_loop() {
        let u = Automaton::unit();
        let g = graph(&u).unwrap();
        assert_eq!(g.edges().len(), 1);
        assert_eq!(summary(&u).unwrap(), "states=1 edges=1 dead=[] components=1");
        assert!(g.to_dot().contains("\"*\" -> \"*\";"));
    }

    #[test]
    fn components_of_empty_graph() {
        let g = TransitionGraph::new(FinSet::empty(), BTreeSet::new());
        assert!(g.components().is_empty());
        let two = TransitionGraph::new(FinSet::range(3), [(0, 2)].into());
        assert_eq!(two.components(), vec![vec![0, 2], vec![1]]);
        assert_eq!(two.successors(0).collect::<Vec<_>>(), [2]);
    }
}
