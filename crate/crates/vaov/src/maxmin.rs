//! The no-information maxmin strategy, its heuristic refinement, and the
//! informed party's best response in the asymmetric-information setting.

use crate::protocol::{Action, NegotiationState, Policy};
use crate::set::OutcomeSet;
use crate::spe::lower_set_sizes;
use crate::types::{Instance, Outcome, Party};

/// A party's round-t upper set: the available outcomes outside her lower
/// set, where the lower set uses the mover size when it is her turn to
/// offer and the responder size otherwise.
pub fn upper_set(state: &NegotiationState, instance: &Instance, party: Party) -> OutcomeSet {
    let n = state.available.len();
    let (mover_size, responder_size) = lower_set_sizes(n);
    let size = if party == state.mover { mover_size } else { responder_size };
    let order = instance.order(party);
    let mut lower = OutcomeSet::empty(instance.m());
    let mut taken = 0;
    for &o in order.ranking().iter().rev() {
        if taken == size {
            break;
        }
        if state.available.contains(o) {
            lower.insert(o);
            taken += 1;
        }
    }
    state.available.difference(&lower)
}

/// How the offering half of the maxmin strategy picks within the upper
/// set.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum MaxminMode {
    /// Any member works; the lowest id is used so play is reproducible.
    Arbitrary,
    /// The mover's most preferred member, which the other party accepts
    /// more often when she is also playing maxmin.
    Heuristic,
}

/// The maxmin offer: a member of the mover's upper set.
pub fn offer_maxmin(
    state: &NegotiationState,
    instance: &Instance,
    party: Party,
    mode: MaxminMode,
) -> Outcome {
    debug_assert_eq!(party, state.mover, "only the mover offers");
    let upper = upper_set(state, instance, party);
    match mode {
        MaxminMode::Arbitrary => upper.iter().next().expect("upper set is never empty"),
        MaxminMode::Heuristic => instance
            .order(party)
            .best_of(upper.iter())
            .expect("upper set is never empty"),
    }
}

/// The maxmin response: accept exactly the offers inside the responder's
/// upper set.
pub fn respond_maxmin(state: &NegotiationState, instance: &Instance, party: Party) -> Action {
    debug_assert_eq!(party, state.mover.other(), "only the responder responds");
    let pending = state.pending_offer.expect("response point requires a pending offer");
    if upper_set(state, instance, party).contains(pending) {
        Action::Accept
    } else {
        Action::Reject
    }
}

/// Engine policy for the maxmin strategy. Reads only the acting party's
/// own preference order.
pub struct MaxminPolicy {
    pub mode: MaxminMode,
}

impl MaxminPolicy {
    pub fn arbitrary() -> Self {
        Self {
            mode: MaxminMode::Arbitrary,
        }
    }

    pub fn heuristic() -> Self {
        Self {
            mode: MaxminMode::Heuristic,
        }
    }
}

impl Policy for MaxminPolicy {
    fn decide(&mut self, instance: &Instance, state: &NegotiationState) -> Action {
        match state.pending_offer {
            None => Action::Offer(offer_maxmin(state, instance, state.mover, self.mode)),
            Some(_) => respond_maxmin(state, instance, state.mover.other()),
        }
    }
}

/// Plain-function forms of the maxmin decision rule, usable as an
/// oracle `StateRule` (they read only the available set and the roles).
pub fn maxmin_rule_arbitrary(instance: &Instance, state: &NegotiationState) -> Action {
    MaxminPolicy::arbitrary().decide(instance, state)
}

pub fn maxmin_rule_heuristic(instance: &Instance, state: &NegotiationState) -> Action {
    MaxminPolicy::heuristic().decide(instance, state)
}

/// The informed party's best response when her opponent has no
/// information and therefore plays the maxmin strategy.
///
/// The opponent accepts exactly the offers in her round-1 upper set, so
/// the informed party offers — or holds out for — her own favorite member
/// of that set, adjusted for outcomes already vetoed.
pub struct InformedPolicy {
    informed: Party,
    /// U^null_1, computed once from the initial state.
    opponent_upper_round1: OutcomeSet,
}

impl InformedPolicy {
    pub fn new(instance: &Instance, informed: Party) -> Self {
        let initial = NegotiationState::initial(instance);
        let opponent_upper_round1 = upper_set(&initial, instance, informed.other());
        Self {
            informed,
            opponent_upper_round1,
        }
    }

    /// The informed party's target: her most preferred still-available
    /// member of the opponent's round-1 upper set.
    fn target(&self, instance: &Instance, state: &NegotiationState) -> Option<Outcome> {
        instance.order(self.informed).best_of(
            self.opponent_upper_round1
                .intersection(&state.available)
                .iter(),
        )
    }
}

impl Policy for InformedPolicy {
    fn decide(&mut self, instance: &Instance, state: &NegotiationState) -> Action {
        match state.pending_offer {
            None => match self.target(instance, state) {
                Some(target) => Action::Offer(target),
                // Every member of U^null_1 was vetoed (off-script play);
                // fall back to the maxmin heuristic offer.
                None => Action::Offer(offer_maxmin(state, instance, state.mover, MaxminMode::Heuristic)),
            },
            Some(pending) => match self.target(instance, state) {
                Some(target) if pending == target => Action::Accept,
                Some(_) => Action::Reject,
                None => respond_maxmin(state, instance, state.mover.other()),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::{run, Transition};
    use crate::spe::round_sets;
    use crate::types::Instance;

    fn example1() -> Instance {
        Instance::from_rankings(&[5, 4, 3, 2, 1, 0], &[0, 2, 1, 5, 3, 4], Party::P1).unwrap()
    }

    #[test]
    fn upper_set_m2_roles() {
        // p2 prefers o1 over o2 and responds in round 1.
        let inst = Instance::from_rankings(&[1, 0], &[0, 1], Party::P1).unwrap();
        let state = NegotiationState::initial(&inst);
        assert_eq!(
            upper_set(&state, &inst, Party::P2).iter().collect::<Vec<_>>(),
            vec![Outcome(0)]
        );
        // The mover's lower set is empty at m = 2, so her upper set is everything.
        assert_eq!(upper_set(&state, &inst, Party::P1).len(), 2);
    }

    #[test]
    fn upper_set_is_lower_set_complement() {
        let inst = example1();
        let state = NegotiationState::initial(&inst);
        let u2 = upper_set(&state, &inst, Party::P2);
        // O \ {o6, o4, o5} = {o1, o3, o2}.
        assert_eq!(
            u2.iter().collect::<Vec<_>>(),
            vec![Outcome(0), Outcome(1), Outcome(2)]
        );
        let sets = round_sets(&state, &inst);
        assert_eq!(u2, state.available.difference(&sets.l_responder));
    }

    #[test]
    fn heuristic_offer_is_own_top_available() {
        let inst = example1();
        let state = NegotiationState::initial(&inst);
        assert_eq!(
            offer_maxmin(&state, &inst, Party::P1, MaxminMode::Heuristic),
            Outcome(5) // p1's top outcome o6
        );
        // Arbitrary mode is deterministic across calls.
        let a = offer_maxmin(&state, &inst, Party::P1, MaxminMode::Arbitrary);
        let b = offer_maxmin(&state, &inst, Party::P1, MaxminMode::Arbitrary);
        assert_eq!(a, b);
    }

    #[test]
    fn respond_membership() {
        let inst = Instance::from_rankings(&[1, 0], &[0, 1], Party::P1).unwrap();
        let state = NegotiationState::initial(&inst);
        let offered_top = match state.clone().apply(Action::Offer(Outcome(0))).unwrap() {
            Transition::Ongoing(s) => s,
            _ => panic!(),
        };
        assert_eq!(respond_maxmin(&offered_top, &inst, Party::P2), Action::Accept);
        let offered_bottom = match state.apply(Action::Offer(Outcome(1))).unwrap() {
            Transition::Ongoing(s) => s,
            _ => panic!(),
        };
        assert_eq!(respond_maxmin(&offered_bottom, &inst, Party::P2), Action::Reject);
    }

    #[test]
    fn informed_first_gets_her_best_of_opponent_upper() {
        let inst = example1();
        // Informed p1 moves first; p2 plays maxmin.
        let informed = InformedPolicy::new(&inst, Party::P1);
        let expected = inst
            .order(Party::P1)
            .best_of(informed.opponent_upper_round1.iter())
            .unwrap();
        let mut a = InformedPolicy::new(&inst, Party::P1);
        let mut b = MaxminPolicy::arbitrary();
        let t = run(&inst, &mut a, &mut b).unwrap();
        assert_eq!(t.result, expected);
    }

    #[test]
    fn uninformed_first_offering_target_is_accepted() {
        // p2 is informed, p1 (uninformed, first mover) plays maxmin.
        let inst = example1();
        let mut first = MaxminPolicy::heuristic();
        let mut second = InformedPolicy::new(&inst, Party::P2);
        let t = run(&inst, &mut first, &mut second).unwrap();
        // The result is some member of p1's round-1 upper set (her maxmin
        // guarantee) and of p2's target chain.
        let u1 = upper_set(&NegotiationState::initial(&inst), &inst, Party::P1);
        assert!(u1.contains(t.result));
    }
}
