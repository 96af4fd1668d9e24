//! Single-life world simulation and event-driven model discovery.
//!
//! The crate is organised around one agent living one life:
//!
//! - [`world`] holds ground-truth worlds (deterministic and oracle-driven),
//!   policies, the life runner and the adversarial creature stream.
//! - [`history`] represents what the agent recorded and turns it into
//!   local, full and approximate histories and visible-event firings.
//! - [`edm`] holds candidate event-driven models, their variables and the
//!   bridge from a recorded life to an event stream.
//! - [`inference`] turns one life into evidence: abridged models, trace
//!   statistics, findings, state estimates and the exhaustiveness test.
//! - [`compose`] builds synchronous products of models.
//! - [`evaluation`] scores lives and compares them under the quasiorder.
//!
//! All randomness is derived from a single seed through named sub-streams
//! (see [`seed`]), so every operation is replayable.

pub mod bundled;
pub mod compose;
pub mod edm;
pub mod error;
pub mod evaluation;
pub mod history;
pub mod inference;
pub mod label;
pub mod seed;
pub mod text;
pub mod world;

pub use error::{Error, Result};
pub use label::Label;
