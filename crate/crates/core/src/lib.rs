//! Synchronized Predator-Prey benchmark engine.
//!
//! The crate bundles everything needed to study multi-agent synchronization
//! tasks at desk scale:
//!
//! * [`env`]: the seeded gridworld simulator with homogeneous and
//!   heterogeneous capture actions.
//! * [`oracle`]: an exact Q-value solver for tiny enumerable instances that
//!   decides whether a task has both synchronization-positive and
//!   synchronization-negative joint actions in some state.
//! * [`graph`]: coordination-graph factorizations and the Max-Plus joint
//!   action maximizer, with an exhaustive reference.
//! * [`nn`]: a small multi-layer perceptron with hand-written backprop and Adam.
//! * [`dcg`]: a factorized deep Q-learner that selects joint actions with Max-Plus.
//! * [`harness`]: experiment configs, presets, multi-seed runs and CSV output.

pub mod dcg;
pub mod env;
mod error;
pub mod game;
pub mod graph;
pub mod harness;
pub mod nn;
pub mod oracle;
pub mod seed;

pub use error::{Error, Result};
