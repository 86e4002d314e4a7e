//! Subgame-perfect strategies: round-indexed lower sets, the offering and
//! response strategies, the continuation outcome, and the distance and
//! offer-count quantities used by the theorem checks.

use crate::protocol::{run, Action, NegotiationState, Policy, ProtocolError, Transcript};
use crate::set::OutcomeSet;
use crate::types::{Instance, Outcome, Party, PreferenceOrder};

/// The round-t partition of the available set.
///
/// `l_mover` / `l_responder` are the parties' lower sets, `intersection`
/// their overlap, `low` their union, and `jg` everything else. `jg` always
/// has exactly one more member than `intersection`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RoundSets {
    pub mover: Party,
    pub l_mover: OutcomeSet,
    pub l_responder: OutcomeSet,
    pub intersection: OutcomeSet,
    pub low: OutcomeSet,
    pub jg: OutcomeSet,
}

/// Lower-set sizes for an available set of size `n`: responder always gets
/// floor(n/2); the mover gets one fewer when n is even.
pub fn lower_set_sizes(n: usize) -> (usize, usize) {
    let responder = n / 2;
    let mover = if n % 2 == 1 { n / 2 } else { (n / 2).saturating_sub(1) };
    (mover, responder)
}

/// The `count` lowest-ranked available outcomes of `order`.
fn lowest_available(order: &PreferenceOrder, available: &OutcomeSet, count: usize) -> OutcomeSet {
    let mut set = OutcomeSet::empty(order.len());
    let mut taken = 0;
    for &o in order.ranking().iter().rev() {
        if taken == count {
            break;
        }
        if available.contains(o) {
            set.insert(o);
            taken += 1;
        }
    }
    debug_assert_eq!(taken, count);
    set
}

/// Computes the round sets for the state's current round. The sets are
/// defined at offer points; on a state with a pending offer this returns
/// the same round's sets (the pending outcome is still available).
pub fn round_sets(state: &NegotiationState, instance: &Instance) -> RoundSets {
    let n = state.available.len();
    let (mover_size, responder_size) = lower_set_sizes(n);
    let mover = state.mover;
    let l_mover = lowest_available(instance.order(mover), &state.available, mover_size);
    let l_responder = lowest_available(
        instance.order(mover.other()),
        &state.available,
        responder_size,
    );
    let intersection = l_mover.intersection(&l_responder);
    let low = l_mover.union(&l_responder);
    let jg = state.available.difference(&low);
    RoundSets {
        mover,
        l_mover,
        l_responder,
        intersection,
        low,
        jg,
    }
}

/// The SPE offer at this state: a member of the lower-set intersection
/// when it is nonempty, otherwise the responder's least preferred
/// available outcome.
///
/// When the intersection has several members the one ranked lowest by the
/// responder is offered; the SPE result is invariant to this choice, the
/// rule only pins transcripts down deterministically.
pub fn offer_spe(state: &NegotiationState, instance: &Instance) -> Outcome {
    debug_assert!(state.pending_offer.is_none(), "offer point expected");
    let sets = round_sets(state, instance);
    let responder_order = instance.order(state.mover.other());
    if sets.intersection.is_empty() {
        responder_order
            .worst_of(state.available.iter())
            .expect("available set is nonempty")
    } else {
        responder_order
            .worst_of(sets.intersection.iter())
            .expect("intersection is nonempty")
    }
}

/// Result of simulating the all-reject branch under the SPE offering
/// strategy until the lower-set intersection first becomes empty.
struct AllRejectSim {
    survivor: Outcome,
    offers: [u32; 2],
}

/// Simulates the branch where every offer follows the SPE offering
/// strategy and every offer is rejected, starting from (`available`,
/// `mover`). Once the intersection is empty the surviving outcome is fixed
/// (the singleton of the residual `jg` set), so the simulation stops there.
///
/// Lower sets are maintained incrementally via the set-evolution lemmas
/// rather than recomputed per round: one linear setup pass plus amortized
/// O(1) work per round, O(m) in total per invocation.
fn simulate_all_reject(instance: &Instance, available: &OutcomeSet, mover: Party) -> AllRejectSim {
    let m = instance.m();
    let n = available.len();
    debug_assert!(n >= 1);

    // Per-outcome state lives in one byte so every random access touches a
    // single small array (keeps the working set cache-resident at large m).
    const AVAIL: u8 = 1 << 0;
    const JG: u8 = 1 << 3;
    let low_bit = |party: Party| 1u8 << (1 + party.index());

    let mut flags = vec![0u8; m];
    for o in available.iter() {
        flags[o.index()] = AVAIL;
    }

    if n == 1 {
        return AllRejectSim {
            survivor: available.sole_member().expect("singleton"),
            offers: [0, 0],
        };
    }

    // Low bits: outcome is currently in that party's lower set. While an
    // outcome stays available its membership only ever switches on.
    let (mover_size, responder_size) = lower_set_sizes(n);
    for (party, size) in [(mover, mover_size), (mover.other(), responder_size)] {
        let mut taken = 0;
        for &o in instance.order(party).ranking().iter().rev() {
            if taken == size {
                break;
            }
            if flags[o.index()] & AVAIL != 0 {
                flags[o.index()] |= low_bit(party);
                taken += 1;
            }
        }
    }

    // Intersection members; stack order is irrelevant to the survivor.
    let both_low = low_bit(Party::P1) | low_bit(Party::P2);
    let mut stack: Vec<Outcome> = Vec::new();
    for o in available.iter() {
        match flags[o.index()] & both_low {
            f if f == both_low => stack.push(o),
            0 => flags[o.index()] |= JG,
            _ => {}
        }
    }

    // Frontier scan positions: each party's ranking is walked once from
    // the worst end across the whole simulation.
    let mut frontier = [m, m]; // next index to inspect is frontier - 1
    let mut offers = [0u32, 0u32];
    let mut turn = mover;

    while let Some(o) = stack.pop() {
        offers[turn.index()] += 1;
        flags[o.index()] = 0;

        // The outcome that newly joins the current mover's lower set: her
        // lowest-ranked available outcome currently outside it.
        let ranking = instance.order(turn).ranking();
        let entrant = loop {
            frontier[turn.index()] -= 1;
            let cand = ranking[frontier[turn.index()]];
            if flags[cand.index()] & (AVAIL | low_bit(turn)) == AVAIL {
                break cand;
            }
        };
        flags[entrant.index()] |= low_bit(turn);
        if flags[entrant.index()] & low_bit(turn.other()) != 0 {
            stack.push(entrant);
        } else {
            flags[entrant.index()] &= !JG;
        }
        turn = turn.other();
    }

    let survivor = flags
        .iter()
        .position(|&f| f & (AVAIL | JG) == AVAIL | JG)
        .map(|i| Outcome(i as u32))
        .expect("residual jg set is a singleton");
    AllRejectSim {
        survivor,
        offers,
    }
}

/// The continuation outcome o_a: the unique outcome left standing if,
/// with the pending offer rejected, every subsequent offer follows the
/// SPE offering strategy and is rejected until one outcome remains.
pub fn continuation_outcome(state: &NegotiationState, instance: &Instance) -> Outcome {
    let pending = state
        .pending_offer
        .expect("continuation outcome requires a pending offer");
    assert!(
        state.available.len() >= 2,
        "no continuation: the pending offer is the sole remaining outcome"
    );
    let mut rest = state.available.clone();
    rest.remove(pending);
    simulate_all_reject(instance, &rest, state.mover.other()).survivor
}

/// The SPE response: accept iff the pending offer is weakly preferred by
/// the responder to the continuation outcome. Equality cannot occur since
/// the pending offer is excluded from the continuation game, so the
/// comparison is effectively strict.
pub fn respond_spe(state: &NegotiationState, instance: &Instance) -> Action {
    let pending = state
        .pending_offer
        .expect("response point requires a pending offer");
    if state.available.len() == 1 {
        return Action::Accept;
    }
    let oa = continuation_outcome(state, instance);
    debug_assert_ne!(pending, oa, "pending offer is excluded from the continuation");
    let responder = instance.order(state.mover.other());
    if responder.weakly_prefers(pending, oa) {
        Action::Accept
    } else {
        Action::Reject
    }
}

/// The SPE policy: offers per the offering strategy, responds per the
/// response strategy. Well defined on every legal state, including
/// off-equilibrium histories.
pub struct SpePolicy;

impl Policy for SpePolicy {
    fn decide(&mut self, instance: &Instance, state: &NegotiationState) -> Action {
        match state.pending_offer {
            None => Action::Offer(offer_spe(state, instance)),
            Some(_) => respond_spe(state, instance),
        }
    }
}

/// Plays both SPE strategies against each other and returns the full
/// transcript.
pub fn spe_transcript(instance: &Instance) -> Transcript {
    run(instance, &mut SpePolicy, &mut SpePolicy).expect("SPE policies only emit legal actions")
}

/// The SPE result of the instance.
pub fn spe_result(instance: &Instance) -> Outcome {
    spe_transcript(instance).result
}

#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum SpeError {
    #[error("distance is undefined: {outcome} lies inside {party}'s round-{round} lower set")]
    DistanceUndefined {
        party: Party,
        outcome: Outcome,
        round: u32,
    },
}

/// The distance d: how many available outcomes outside `party`'s lower set
/// are weakly below `outcome` in her order. Defined only for outcomes
/// outside that lower set; calling it elsewhere is a domain error.
pub fn distance(
    instance: &Instance,
    party: Party,
    outcome: Outcome,
    state: &NegotiationState,
) -> Result<usize, SpeError> {
    let n = state.available.len();
    let (mover_size, responder_size) = lower_set_sizes(n);
    let size = if party == state.mover { mover_size } else { responder_size };
    let lower = lowest_available(instance.order(party), &state.available, size);
    if lower.contains(outcome) {
        return Err(SpeError::DistanceUndefined {
            party,
            outcome,
            round: state.round,
        });
    }
    let order = instance.order(party);
    Ok(state
        .available
        .iter()
        .filter(|&o| order.weakly_prefers(outcome, o) && !lower.contains(o))
        .count())
}

/// Offer counts (per party) under the SPE offering strategy with all
/// offers rejected, from round 1 until the first round with an empty
/// lower-set intersection.
pub fn offers_until_empty_intersection(instance: &Instance) -> (u32, u32) {
    let sim = simulate_all_reject(
        instance,
        &OutcomeSet::full(instance.m()),
        instance.first_mover(),
    );
    (sim.offers[0], sim.offers[1])
}

/// True iff no other available outcome is preferred to `o` by both
/// parties.
pub fn pareto_optimal(instance: &Instance, available: &OutcomeSet, o: Outcome) -> bool {
    let (p1, p2) = (instance.order(Party::P1), instance.order(Party::P2));
    !available
        .iter()
        .any(|x| x != o && p1.prefers(x, o) && p2.prefers(x, o))
}

/// Walks the full SPE trace of an instance, asserting the lemma-level
/// invariants at every round:
///
/// * |JG_t| = |I_t| + 1;
/// * lower-set size recurrences across each offer/reject transition;
/// * the three set-evolution laws, keyed on where the offer sat;
/// * the continuation outcome is in JG_t, Pareto optimal in the available
///   set, and equal to the final result along the equilibrium path;
/// * the final result lies outside Low_t at every round.
pub fn check_spe_trace(instance: &Instance) -> Result<Outcome, String> {
    let transcript = spe_transcript(instance);
    let result = transcript.result;
    let mut state = NegotiationState::initial(instance);

    for event in &transcript.events {
        if state.pending_offer.is_none() {
            let sets = round_sets(&state, instance);
            if sets.jg.len() != sets.intersection.len() + 1 {
                return Err(format!(
                    "round {}: |JG| = {} but |I| + 1 = {}",
                    state.round,
                    sets.jg.len(),
                    sets.intersection.len() + 1
                ));
            }
            if sets.low.contains(result) {
                return Err(format!(
                    "round {}: result {result} lies inside Low_t",
                    state.round
                ));
            }
            let offered = match event.action {
                Action::Offer(o) => o,
                other => return Err(format!("trace expected an offer, saw {other:?}")),
            };
            let after_offer = match state.clone().apply(event.action) {
                Ok(crate::protocol::Transition::Ongoing(s)) => s,
                _ => return Err("offer did not keep the negotiation ongoing".into()),
            };
            if after_offer.available.len() >= 2 {
                let oa = continuation_outcome(&after_offer, instance);
                if oa != result {
                    return Err(format!(
                        "round {}: continuation outcome {oa} differs from the trace result {result}",
                        state.round
                    ));
                }
                if !sets.jg.contains(oa) {
                    return Err(format!(
                        "round {}: continuation outcome {oa} is outside JG_t",
                        state.round
                    ));
                }
                if !pareto_optimal(instance, &state.available, oa) {
                    return Err(format!(
                        "round {}: continuation outcome {oa} is Pareto dominated",
                        state.round
                    ));
                }
            }
            // Set evolution across the coming reject, when one follows.
            let mut next = after_offer.clone();
            if next.available.len() >= 2 {
                next = match next.apply(Action::Reject) {
                    Ok(crate::protocol::Transition::Ongoing(s)) => s,
                    _ => return Err("reject did not keep the negotiation ongoing".into()),
                };
                let next_sets = round_sets(&next, instance);
                if next_sets.l_mover.len() + 1 != sets.l_responder.len()
                    || next_sets.l_responder.len() != sets.l_mover.len()
                {
                    return Err(format!(
                        "round {}: lower-set size recurrence violated",
                        state.round
                    ));
                }
                let mut without = sets.l_responder.clone();
                without.remove(offered);
                if sets.l_responder.contains(offered) && next_sets.l_mover != without {
                    return Err(format!(
                        "round {}: L_mover(t+1) != L_responder(t) \\ {{offer}}",
                        state.round
                    ));
                }
                if !sets.l_mover.contains(offered) {
                    if next_sets.l_responder != sets.l_mover {
                        return Err(format!(
                            "round {}: L_responder(t+1) != L_mover(t) after an outside offer",
                            state.round
                        ));
                    }
                } else {
                    let mut base = sets.l_mover.clone();
                    base.remove(offered);
                    if !base.is_subset(&next_sets.l_responder)
                        || next_sets.l_responder.difference(&base).len() != 1
                    {
                        return Err(format!(
                            "round {}: L_responder(t+1) is not L_mover(t) minus the offer plus one entrant",
                            state.round
                        ));
                    }
                }
            }
        }
        state = match state.apply(event.action) {
            Ok(crate::protocol::Transition::Ongoing(s)) => s,
            Ok(crate::protocol::Transition::Agreed { outcome, .. }) => {
                if outcome != result {
                    return Err("replayed agreement differs from the recorded result".into());
                }
                return Ok(result);
            }
            Err(e) => return Err(format!("trace replay hit a protocol error: {e}")),
        };
    }
    Err("trace ended without an agreement".into())
}

/// Replays a transcript, confirming legality and the recorded result.
pub fn replay_transcript(
    instance: &Instance,
    transcript: &Transcript,
) -> Result<Outcome, ProtocolError> {
    transcript.replay(instance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::Transition;

    // ids: o1=0 .. o6=5 throughout.
    fn example1() -> Instance {
        Instance::from_rankings(&[5, 4, 3, 2, 1, 0], &[0, 2, 1, 5, 3, 4], Party::P1).unwrap()
    }

    fn example2() -> Instance {
        Instance::from_rankings(&[5, 4, 3, 2, 1, 0], &[0, 2, 5, 1, 3, 4], Party::P1).unwrap()
    }

    fn ids(raw: &[u32]) -> Vec<Outcome> {
        raw.iter().map(|&i| Outcome(i)).collect()
    }

    fn offer(state: NegotiationState, o: u32) -> NegotiationState {
        match state.apply(Action::Offer(Outcome(o))).unwrap() {
            Transition::Ongoing(s) => s,
            _ => panic!("offer is not terminal"),
        }
    }

    #[test]
    fn example1_round1_sets() {
        let inst = example1();
        let sets = round_sets(&NegotiationState::initial(&inst), &inst);
        assert_eq!(sets.l_mover.iter().collect::<Vec<_>>(), ids(&[0, 1])); // {o2, o1}
        assert_eq!(sets.l_responder.iter().collect::<Vec<_>>(), ids(&[3, 4, 5])); // {o6, o4, o5}
        assert!(sets.intersection.is_empty());
        assert_eq!(sets.jg.len(), 1);
    }

    #[test]
    fn example2_round1_intersection() {
        let inst = example2();
        let sets = round_sets(&NegotiationState::initial(&inst), &inst);
        assert_eq!(sets.intersection.iter().collect::<Vec<_>>(), ids(&[1])); // {o2}
        assert_eq!(sets.jg.len(), 2);
    }

    #[test]
    fn m2_cardinalities() {
        let inst = Instance::from_rankings(&[0, 1], &[1, 0], Party::P1).unwrap();
        let sets = round_sets(&NegotiationState::initial(&inst), &inst);
        assert!(sets.l_mover.is_empty());
        assert_eq!(sets.l_responder.iter().collect::<Vec<_>>(), ids(&[0])); // responder's worst
        assert_eq!(sets.jg.len(), 1);
    }

    #[test]
    fn example1_offers_responders_worst() {
        let inst = example1();
        assert_eq!(offer_spe(&NegotiationState::initial(&inst), &inst), Outcome(4)); // o5
    }

    #[test]
    fn example2_offers_intersection_member() {
        let inst = example2();
        assert_eq!(offer_spe(&NegotiationState::initial(&inst), &inst), Outcome(1)); // o2
    }

    #[test]
    fn identical_orders_m4_offers_common_worst() {
        // L_mover = {worst}, L_responder = {3rd, worst}, so I = {worst}.
        let inst = Instance::from_rankings(&[0, 1, 2, 3], &[0, 1, 2, 3], Party::P1).unwrap();
        let state = NegotiationState::initial(&inst);
        let sets = round_sets(&state, &inst);
        assert_eq!(sets.intersection.iter().collect::<Vec<_>>(), ids(&[3]));
        assert_eq!(offer_spe(&state, &inst), Outcome(3));
    }

    #[test]
    fn continuation_outcomes_on_worked_examples() {
        let inst = example1();
        let state = offer(NegotiationState::initial(&inst), 4); // o5
        assert_eq!(continuation_outcome(&state, &inst), Outcome(2)); // o3

        let inst = example2();
        let state = offer(NegotiationState::initial(&inst), 1); // o2
        assert_eq!(continuation_outcome(&state, &inst), Outcome(5)); // o6
    }

    #[test]
    fn continuation_outcome_m2_base_case() {
        // Responder (p2) prefers o1 over o2; after Offer(o2) the survivor is o1.
        let inst = Instance::from_rankings(&[1, 0], &[0, 1], Party::P1).unwrap();
        let state = offer(NegotiationState::initial(&inst), 1);
        assert_eq!(continuation_outcome(&state, &inst), Outcome(0));
    }

    #[test]
    fn responses_on_worked_examples() {
        let inst = example1();
        let state = offer(NegotiationState::initial(&inst), 4);
        assert_eq!(respond_spe(&state, &inst), Action::Reject);

        let inst = example2();
        let state = offer(NegotiationState::initial(&inst), 1);
        assert_eq!(respond_spe(&state, &inst), Action::Reject);

        // An offer of the responder's top outcome is always accepted.
        let inst = example1();
        let state = offer(NegotiationState::initial(&inst), 0); // o1 = p2's best
        assert_eq!(respond_spe(&state, &inst), Action::Accept);
    }

    #[test]
    fn golden_traces() {
        let t = spe_transcript(&example1());
        assert_eq!(t.result, Outcome(2)); // o3
        assert_eq!(t.offers(), ids(&[4, 0, 3, 1, 5, 2])); // o5 o1 o4 o2 o6 o3

        let t = spe_transcript(&example2());
        assert_eq!(t.result, Outcome(5)); // o6
        assert_eq!(t.offers()[0], Outcome(1)); // first offer o2
    }

    #[test]
    fn theorem8_pair() {
        let a =
            Instance::from_rankings(&[5, 2, 3, 4, 1, 0], &[3, 4, 2, 5, 1, 0], Party::P1).unwrap();
        assert_eq!(spe_result(&a), Outcome(3)); // o4
        let b =
            Instance::from_rankings(&[5, 2, 1, 0, 4, 3], &[3, 4, 2, 5, 1, 0], Party::P1).unwrap();
        assert_eq!(spe_result(&b), Outcome(2)); // o3
        assert!(a.order(Party::P1).prefers(Outcome(2), Outcome(3)));
    }

    #[test]
    fn distances_on_worked_examples() {
        let inst = example1();
        let state = NegotiationState::initial(&inst);
        assert_eq!(distance(&inst, Party::P1, Outcome(2), &state), Ok(1));
        assert_eq!(distance(&inst, Party::P2, Outcome(2), &state), Ok(2));

        let inst = example2();
        let state = NegotiationState::initial(&inst);
        assert_eq!(distance(&inst, Party::P1, Outcome(5), &state), Ok(4));
        assert_eq!(distance(&inst, Party::P2, Outcome(5), &state), Ok(1));
        assert_eq!(distance(&inst, Party::P1, Outcome(2), &state), Ok(1));
        assert_eq!(distance(&inst, Party::P2, Outcome(2), &state), Ok(2));
    }

    #[test]
    fn distance_inside_lower_set_is_domain_error() {
        let inst = example1();
        let state = NegotiationState::initial(&inst);
        // o1 (id 0) is in p1's round-1 lower set.
        assert!(matches!(
            distance(&inst, Party::P1, Outcome(0), &state),
            Err(SpeError::DistanceUndefined { .. })
        ));
    }

    #[test]
    fn offer_counts_on_worked_examples() {
        assert_eq!(offers_until_empty_intersection(&example1()), (0, 0));
        assert_eq!(offers_until_empty_intersection(&example2()), (1, 0));
        // Identical orders, m = 2: the mover's lower set is empty.
        let inst = Instance::from_rankings(&[0, 1], &[0, 1], Party::P1).unwrap();
        assert_eq!(offers_until_empty_intersection(&inst), (0, 0));
    }

    #[test]
    fn continuation_unchanged_by_one_strategy_step() {
        // Lemma "the_same" on the Example 1 path.
        let inst = example1();
        let state = offer(NegotiationState::initial(&inst), 4);
        let oa = continuation_outcome(&state, &inst);
        let next = match state.apply(Action::Reject).unwrap() {
            Transition::Ongoing(s) => s,
            _ => panic!(),
        };
        let next_offer = offer_spe(&next, &inst);
        let next = offer(next, next_offer.0);
        assert_eq!(continuation_outcome(&next, &inst), oa);
    }

    #[test]
    fn trace_invariants_hold_on_worked_examples() {
        assert_eq!(check_spe_trace(&example1()), Ok(Outcome(2)));
        assert_eq!(check_spe_trace(&example2()), Ok(Outcome(5)));
    }
}
