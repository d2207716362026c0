//! Simulator for one-round protocols in the referee model: every node of a
//! labelled graph sends one message computed from its own neighborhood, and
//! a central referee computes the answer from the message vector alone.
//!
//! The centerpiece is a frugal protocol that reconstructs graphs of
//! degeneracy at most `k` from `O(k^2 log n)`-bit power-sum summaries
//! ([`protocol`]), built on an exact encode/decode pair ([`codec`]). The
//! [`reductions`] module adds the gadget constructions that turn a decider
//! for squares, small diameter or triangles into a reconstruction protocol,
//! executable against exact-oracle deciders.

pub mod codec;
pub mod graph;
pub mod protocol;
pub mod reductions;
pub mod sim;

pub use graph::{LabelledGraph, VertexId};
pub use sim::{Message, OneRoundProtocol, Output, Transcript};
