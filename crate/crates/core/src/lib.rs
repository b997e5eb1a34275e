//! Exact-arithmetic toolkit for universal artificial intelligence at desk
//! scale: joint and chronological semimeasures, finite Bayes mixtures, the
//! `env`/`dual` perspective maps, Solomonoff normalization, a frozen monotone
//! machine with budget-bounded program enumeration, expectimax agents, and
//! adversarial action sequences.
//!
//! All probability math uses [`Prob`], an exact nonnegative rational.

pub mod adversary;
pub mod agents;
pub mod alphabet;
pub mod config;
pub mod error;
pub mod history;
pub mod mixture;
pub mod prob;
pub mod semimeasure;
pub mod transforms;
pub mod utm;

pub use alphabet::{Action, ActionAlphabet, Interface, Percept, PerceptAlphabet, PerceptSymbol, Slot};
pub use error::{Result, UaiError};
pub use history::History;
pub use prob::Prob;
pub use semimeasure::{ChronEnv, JointSemimeasure, Policy, SharedEnv, SharedJoint, SharedPolicy};
