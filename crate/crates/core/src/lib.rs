//! Resource sharing machines.
//!
//! Open dynamical systems that can be composed two ways at once: as
//! machines, feeding outputs into inputs, and as resource sharers, gluing
//! systems along shared state. A wiring ([`wiring::RsmMorphism`]) carries
//! both kinds of connection, and [`rsm::act`] turns a list of filled boxes
//! into the composite system.
//!
//! Two kinds of system are supported:
//!
//! * [`ode::OdeSystem`]: polynomial vector fields on named real variables;
//!   sharing adds velocities along identified variables.
//! * [`automata::Automaton`]: non-deterministic automata; sharing restricts
//!   to joint states whose observations agree.
//!
//! [`sim`] integrates and analyses the results, and [`cli`] reads and writes
//! the JSON model format used by the `rsm` binary.

pub mod automata;
pub mod cli;
pub mod expr;
pub mod finset;
pub mod ode;
pub mod rsm;
pub mod sim;
pub mod wiring;

pub use automata::Automaton;
pub use expr::{parse, Polynomial};
pub use finset::{FinMap, FinSet, TypedFinSet};
pub use ode::OdeSystem;
pub use rsm::{act, FilledBox};
pub use wiring::{Interface, RsmMorphism, Slot};
