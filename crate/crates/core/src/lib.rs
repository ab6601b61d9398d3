//! Bounds on the value of two-player non-local games.
//!
//! A [`Game`] is turned into its [`GameGraph`]: winning quadruples
//! `(x, y, a, b)` as vertices, with an edge between two quadruples whenever
//! one player would have to give two different answers to the same
//! question. The classical value is then an independence number, the
//! Lovász theta number of the same graph bounds the entangled value from
//! above, and quantum independent sets give entangled strategies.

pub mod classical;
pub mod dsl;
pub mod error;
pub mod game;
pub mod graph;
pub mod linalg;
pub mod mis;
pub mod par;
pub mod quantum;
pub mod report;
pub mod sdp;

pub use classical::{classical_value, classical_value_brute, ClassicalOptimum};
pub use error::{Error, Result};
pub use game::{ClassicalStrategy, Game, Quad};
pub use graph::{GameGraph, Graph};
pub use mis::{independence_number, weighted_independence, IndependenceResult};
pub use par::Exec;
pub use sdp::{lovasz_theta, quantum_upper_bound, weighted_theta, xor_tsirelson_value, ThetaResult};
