//! The VAOV protocol state machine and the engine that plays two policies
//! against each other.
//!
//! Parties alternate offers; a rejected outcome is permanently vetoed and
//! can never be offered again, so a negotiation over m outcomes lasts at
//! most m rounds and the last remaining outcome is forced.

use crate::set::OutcomeSet;
use crate::types::{Instance, Outcome, Party};
use serde::{Deserialize, Serialize};

/// A move in the protocol. `Offer` is legal only with no offer pending;
/// `Accept`/`Reject` only while one is pending.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum Action {
    Offer(Outcome),
    Accept,
    Reject,
}

/// A recorded protocol event.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Event {
    pub round: u32,
    pub actor: Party,
    pub action: Action,
}

#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum ProtocolError {
    #[error("round {round}: outcome {outcome} was already offered and vetoed (no offer can be made twice)")]
    RepeatOffer { round: u32, outcome: Outcome },
    #[error("round {round}: cannot respond, no offer is pending")]
    NoPendingOffer { round: u32 },
    #[error("round {round}: cannot offer while an offer is pending")]
    OfferWhilePending { round: u32 },
    #[error("round {round}: the sole remaining outcome must be accepted")]
    MustAccept { round: u32 },
    #[error("round {round}: {party} returned an illegal action: {source}")]
    PolicyViolation {
        round: u32,
        party: Party,
        #[source]
        source: Box<ProtocolError>,
    },
    #[error("transcript replay diverged: recorded result {recorded}, replayed {replayed}")]
    ReplayMismatch { recorded: Outcome, replayed: Outcome },
    #[error("transcript ended before the negotiation terminated")]
    TruncatedTranscript,
}

/// Negotiation state at a single point of the game tree.
///
/// `mover` is the offering party of the current round; while an offer is
/// pending the acting party is `mover.other()`. The pending outcome stays
/// in `available` until it is rejected.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct NegotiationState {
    pub available: OutcomeSet,
    pub round: u32,
    pub mover: Party,
    pub pending_offer: Option<Outcome>,
    pub history: Vec<Event>,
}

/// Result of applying an action.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Transition {
    Ongoing(NegotiationState),
    Agreed {
        outcome: Outcome,
        history: Vec<Event>,
    },
}

impl NegotiationState {
    /// Initial state: round 1, everything available, the instance's first
    /// mover to act.
    pub fn initial(instance: &Instance) -> NegotiationState {
        NegotiationState {
            available: OutcomeSet::full(instance.m()),
            round: 1,
            mover: instance.first_mover(),
            pending_offer: None,
            history: Vec::new(),
        }
    }

    /// The party that must act now: the mover when no offer is pending,
    /// otherwise the responder.
    pub fn actor(&self) -> Party {
        if self.pending_offer.is_none() {
            self.mover
        } else {
            self.mover.other()
        }
    }

    /// All actions legal in this state.
    pub fn legal_actions(&self) -> Vec<Action> {
        match self.pending_offer {
            None => self.available.iter().map(Action::Offer).collect(),
            Some(_) if self.available.len() == 1 => vec![Action::Accept],
            Some(_) => vec![Action::Accept, Action::Reject],
        }
    }

    /// Applies one action, consuming the state.
    pub fn apply(mut self, action: Action) -> Result<Transition, ProtocolError> {
        match (action, self.pending_offer) {
            (Action::Offer(o), None) => {
                if !self.available.contains(o) {
                    return Err(ProtocolError::RepeatOffer {
                        round: self.round,
                        outcome: o,
                    });
                }
                self.history.push(Event {
                    round: self.round,
                    actor: self.mover,
                    action,
                });
                self.pending_offer = Some(o);
                Ok(Transition::Ongoing(self))
            }
            (Action::Offer(_), Some(_)) => {
                Err(ProtocolError::OfferWhilePending { round: self.round })
            }
            (Action::Accept, Some(o)) => {
                self.history.push(Event {
                    round: self.round,
                    actor: self.mover.other(),
                    action,
                });
                Ok(Transition::Agreed {
                    outcome: o,
                    history: self.history,
                })
            }
            (Action::Reject, Some(o)) => {
                if self.available.len() == 1 {
                    return Err(ProtocolError::MustAccept { round: self.round });
                }
                self.history.push(Event {
                    round: self.round,
                    actor: self.mover.other(),
                    action,
                });
                self.available.remove(o);
                self.pending_offer = None;
                self.round += 1;
                self.mover = self.mover.other();
                Ok(Transition::Ongoing(self))
            }
            (Action::Accept | Action::Reject, None) => {
                Err(ProtocolError::NoPendingOffer { round: self.round })
            }
        }
    }
}

/// A negotiation decision rule. Policies are queried only on states where
/// it is their party's turn to act; the acting party is `state.actor()`.
pub trait Policy {
    fn decide(&mut self, instance: &Instance, state: &NegotiationState) -> Action;
}

/// Full record of a finished negotiation.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Transcript {
    pub events: Vec<Event>,
    pub result: Outcome,
    pub seed: Option<u64>,
}

impl Transcript {
    /// Outcomes offered, in order.
    pub fn offers(&self) -> Vec<Outcome> {
        self.events
            .iter()
            .filter_map(|e| match e.action {
                Action::Offer(o) => Some(o),
                _ => None,
            })
            .collect()
    }

    /// Replays the recorded events through the state machine and checks
    /// that they reproduce the recorded result without any legality
    /// violation.
    pub fn replay(&self, instance: &Instance) -> Result<Outcome, ProtocolError> {
        let mut state = NegotiationState::initial(instance);
        for event in &self.events {
            match state.apply(event.action)? {
                Transition::Ongoing(next) => state = next,
                Transition::Agreed { outcome, .. } => {
                    if outcome != self.result {
                        return Err(ProtocolError::ReplayMismatch {
                            recorded: self.result,
                            replayed: outcome,
                        });
                    }
                    return Ok(outcome);
                }
            }
        }
        // No accept event: legal only when every proposal was rejected and a
        // single outcome remains forced.
        match state.available.sole_member() {
            Some(o) if o == self.result && state.pending_offer.is_none() => Ok(o),
            _ => Err(ProtocolError::TruncatedTranscript),
        }
    }
}

/// Drives the state machine to termination, querying each party's policy
/// in turn. `first` acts for the instance's first mover, `second` for the
/// other party.
///
/// When a single outcome remains the engine forces the final offer and its
/// acceptance itself, without querying either policy.
pub fn run(
    instance: &Instance,
    first: &mut dyn Policy,
    second: &mut dyn Policy,
) -> Result<Transcript, ProtocolError> {
    let first_mover = instance.first_mover();
    let mut state = NegotiationState::initial(instance);
    loop {
        let forced = state.available.len() == 1;
        let action = if forced {
            match state.pending_offer {
                None => Action::Offer(state.available.sole_member().expect("nonempty")),
                Some(_) => Action::Accept,
            }
        } else {
            let actor = state.actor();
            let policy: &mut dyn Policy = if actor == first_mover { first } else { second };
            policy.decide(instance, &state)
        };
        let round = state.round;
        let actor = state.actor();
        let step = state.apply(action).map_err(|source| {
            if forced {
                source
            } else {
                ProtocolError::PolicyViolation {
                    round,
                    party: actor,
                    source: Box::new(source),
                }
            }
        })?;
        match step {
            Transition::Ongoing(next) => state = next,
            Transition::Agreed { outcome, history } => {
                return Ok(Transcript {
                    events: history,
                    result: outcome,
                    seed: None,
                })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::Instance;

    fn example1() -> Instance {
        // ids: o1=0 .. o6=5
        Instance::from_rankings(&[5, 4, 3, 2, 1, 0], &[0, 2, 1, 5, 3, 4], Party::P1).unwrap()
    }

    struct Scripted(Vec<Action>);
    impl Policy for Scripted {
        fn decide(&mut self, _: &Instance, _: &NegotiationState) -> Action {
            self.0.remove(0)
        }
    }

    #[test]
    fn initial_state_shape() {
        let inst = example1();
        let s = NegotiationState::initial(&inst);
        assert_eq!(s.available.len(), 6);
        assert_eq!(s.round, 1);
        assert_eq!(s.mover, Party::P1);
        assert!(s.pending_offer.is_none());
        assert_eq!(s.legal_actions().len(), 6);
    }

    #[test]
    fn offer_then_reject_advances_round() {
        let inst = example1();
        let s = NegotiationState::initial(&inst);
        // Offer o5 (id 4), as the SPE strategy would.
        let s = match s.apply(Action::Offer(Outcome(4))).unwrap() {
            Transition::Ongoing(s) => s,
            _ => panic!("not terminal"),
        };
        assert_eq!(s.pending_offer, Some(Outcome(4)));
        assert_eq!(s.legal_actions(), vec![Action::Accept, Action::Reject]);
        let s = match s.apply(Action::Reject).unwrap() {
            Transition::Ongoing(s) => s,
            _ => panic!("not terminal"),
        };
        assert_eq!(s.round, 2);
        assert_eq!(s.mover, Party::P2);
        assert_eq!(s.available.len(), 5);
        assert!(!s.available.contains(Outcome(4)));
    }

    #[test]
    fn repeat_offer_is_rejected() {
        let inst = example1();
        let s = NegotiationState::initial(&inst);
        let s = match s.apply(Action::Offer(Outcome(4))).unwrap() {
            Transition::Ongoing(s) => s,
            _ => panic!(),
        };
        let s = match s.apply(Action::Reject).unwrap() {
            Transition::Ongoing(s) => s,
            _ => panic!(),
        };
        let err = s.apply(Action::Offer(Outcome(4))).unwrap_err();
        assert!(matches!(err, ProtocolError::RepeatOffer { round: 2, .. }));
    }

    #[test]
    fn respond_without_pending_is_rejected() {
        let inst = example1();
        let s = NegotiationState::initial(&inst);
        assert!(matches!(
            s.apply(Action::Accept).unwrap_err(),
            ProtocolError::NoPendingOffer { round: 1 }
        ));
    }

    #[test]
    fn forced_last_round_accept_only() {
        let inst = Instance::from_rankings(&[0, 1], &[1, 0], Party::P1).unwrap();
        let s = NegotiationState::initial(&inst);
        let s = match s.apply(Action::Offer(Outcome(0))).unwrap() {
            Transition::Ongoing(s) => s,
            _ => panic!(),
        };
        let s = match s.apply(Action::Reject).unwrap() {
            Transition::Ongoing(s) => s,
            _ => panic!(),
        };
        // Round 2, only o2 (id 1) remains.
        let s = match s.apply(Action::Offer(Outcome(1))).unwrap() {
            Transition::Ongoing(s) => s,
            _ => panic!(),
        };
        assert_eq!(s.legal_actions(), vec![Action::Accept]);
        let err = s.clone().apply(Action::Reject).unwrap_err();
        assert!(matches!(err, ProtocolError::MustAccept { round: 2 }));
        match s.apply(Action::Accept).unwrap() {
            Transition::Agreed { outcome, .. } => assert_eq!(outcome, Outcome(1)),
            _ => panic!("expected agreement"),
        }
    }

    #[test]
    fn single_outcome_instance_is_forced_without_queries() {
        let inst = Instance::from_rankings(&[0], &[0], Party::P1).unwrap();
        // Scripted policies with no actions: any query would panic.
        let mut a = Scripted(vec![]);
        let mut b = Scripted(vec![]);
        let t = run(&inst, &mut a, &mut b).unwrap();
        assert_eq!(t.result, Outcome(0));
        assert_eq!(t.replay(&inst).unwrap(), Outcome(0));
    }

    #[test]
    fn engine_reports_policy_violations() {
        let inst = example1();
        let mut bad = Scripted(vec![Action::Accept]);
        let mut other = Scripted(vec![]);
        let err = run(&inst, &mut bad, &mut other).unwrap_err();
        assert!(matches!(
            err,
            ProtocolError::PolicyViolation {
                round: 1,
                party: Party::P1,
                ..
            }
        ));
    }
}
