//! Bilateral negotiation over a finite outcome set with strict ordinal
//! preferences, under the alternating-offers-with-vetoes protocol: each
//! offer is an outcome, a rejected outcome can never be offered again,
//! and the last remaining outcome is forced.
//!
//! The crate provides:
//!
//! * the protocol state machine and a policy-vs-policy engine
//!   ([`protocol`]);
//! * the subgame-perfect offering and response strategies, computable in
//!   linear time per decision ([`spe`]);
//! * the Rational Compromise bargaining rule and checks of its relation
//!   to the equilibrium result ([`rc`]);
//! * the no-information maxmin strategy, its heuristic refinement, and
//!   the informed-vs-uninformed best response ([`maxmin`]);
//! * exhaustive backward-induction solvers used as ground truth for all
//!   of the above ([`oracle`]);
//! * JSON file formats, seeded corpus generation, and batch verification
//!   ([`io`], [`corpus`], [`verify`]).

pub mod corpus;
pub mod io;
pub mod maxmin;
pub mod oracle;
pub mod protocol;
pub mod rc;
pub mod set;
pub mod spe;
pub mod types;
pub mod verify;

pub use protocol::{Action, Event, NegotiationState, Policy, ProtocolError, Transcript};
pub use set::OutcomeSet;
pub use types::{Instance, InstanceError, Outcome, Party, PreferenceOrder};
