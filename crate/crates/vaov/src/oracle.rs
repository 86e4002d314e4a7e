//! Ground-truth solvers by exhaustive backward induction over the subset
//! lattice: the SPE outcome with per-subgame optimal-offer sets, a
//! uniqueness self-check, and adversarial/minimax values for validating
//! the maxmin strategy.
//!
//! Subgame values are memoized on (available mask, mover) only: the payoff
//! of a negotiation is just the agreed outcome, so neither the round
//! number nor the path taken can affect a subgame's value.

use crate::protocol::{Action, NegotiationState, Policy};
use crate::set::OutcomeSet;
use crate::types::{Instance, Outcome, Party};
use std::collections::HashMap;

/// Largest universe the exhaustive solvers accept; the memo table has one
/// entry per (subset, mover) pair.
pub const MAX_ORACLE_M: usize = 20;

#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("instance has {m} outcomes; the exhaustive solver is capped at {MAX_ORACLE_M}")]
    TooLarge { m: usize },
}

/// Memo key: the set of still-available outcomes and whose turn it is to
/// offer.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct SolveKey {
    pub available: u64,
    pub mover: Party,
}

/// Value of one subgame: its unique SPE result and every offer that
/// attains it.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SolveEntry {
    pub value: Outcome,
    pub optimal_offers: Vec<Outcome>,
}

/// A solved instance: the root SPE result plus the full subgame table.
#[derive(Clone, Debug)]
pub struct SpeSolve {
    pub result: Outcome,
    pub table: HashMap<SolveKey, SolveEntry>,
}

fn check_capacity(instance: &Instance) -> Result<(), OracleError> {
    if instance.m() > MAX_ORACLE_M {
        Err(OracleError::TooLarge { m: instance.m() })
    } else {
        Ok(())
    }
}

fn mask_outcomes(mask: u64) -> impl Iterator<Item = Outcome> {
    let mut bits = mask;
    std::iter::from_fn(move || {
        if bits == 0 {
            None
        } else {
            let tz = bits.trailing_zeros();
            bits &= bits - 1;
            Some(Outcome(tz))
        }
    })
}

/// Backward induction over every reachable subgame.
pub fn solve_spe(instance: &Instance) -> Result<SpeSolve, OracleError> {
    check_capacity(instance)?;
    let full = if instance.m() == 64 {
        u64::MAX
    } else {
        (1u64 << instance.m()) - 1
    };
    let mut table = HashMap::new();
    let result = solve_rec(instance, full, instance.first_mover(), &mut table).value;
    Ok(SpeSolve { result, table })
}

fn solve_rec(
    instance: &Instance,
    mask: u64,
    mover: Party,
    table: &mut HashMap<SolveKey, SolveEntry>,
) -> SolveEntry {
    let key = SolveKey {
        available: mask,
        mover,
    };
    if let Some(entry) = table.get(&key) {
        return entry.clone();
    }
    let entry = if mask.count_ones() == 1 {
        let o = Outcome(mask.trailing_zeros());
        SolveEntry {
            value: o,
            optimal_offers: vec![o],
        }
    } else {
        let mover_order = instance.order(mover);
        let responder_order = instance.order(mover.other());
        let mut best: Option<(Outcome, Vec<Outcome>)> = None;
        for o in mask_outcomes(mask) {
            let rest = mask & !(1u64 << o.0);
            let continuation = solve_rec(instance, rest, mover.other(), table).value;
            // Strict orders and the offer's exclusion from the
            // continuation make a responder tie impossible.
            assert_ne!(o, continuation);
            let induced = if responder_order.prefers(o, continuation) {
                o
            } else {
                continuation
            };
            match &mut best {
                None => best = Some((induced, vec![o])),
                Some((value, offers)) => {
                    if induced == *value {
                        offers.push(o);
                    } else if mover_order.prefers(induced, *value) {
                        *value = induced;
                        *offers = vec![o];
                    }
                }
            }
        }
        let (value, optimal_offers) = best.expect("mask is nonempty");
        SolveEntry {
            value,
            optimal_offers,
        }
    };
    table.insert(key, entry.clone());
    entry
}

/// Re-derives, for every key in a finished solve, the result induced by
/// each recorded optimal offer, and confirms they all equal the stored
/// subgame value. Guards the solver against bookkeeping bugs and checks
/// the uniqueness of the SPE result per subgame.
pub fn verify_uniqueness(instance: &Instance) -> Result<bool, OracleError> {
    let solve = solve_spe(instance)?;
    for (key, entry) in &solve.table {
        if key.available.count_ones() == 1 {
            continue;
        }
        let responder = instance.order(key.mover.other());
        for &o in &entry.optimal_offers {
            let rest = key.available & !(1u64 << o.0);
            let continuation = solve.table[&SolveKey {
                available: rest,
                mover: key.mover.other(),
            }]
                .value;
            let induced = if responder.prefers(o, continuation) {
                o
            } else {
                continuation
            };
            if induced != entry.value {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// A deterministic decision rule that reads only the available set, the
/// mover, and the pending offer. Required for the adversarial solver so
/// that memoization on (available, mover) stays sound.
pub type StateRule = fn(&Instance, &NegotiationState) -> Action;

/// Minimax search where the adversary picks actions minimizing the focal
/// party's rank of the final outcome, ignoring her own stated preferences
/// entirely. The focal party either follows `focal_rule` (guarantee
/// check) or plays her own rank-maximizing best response (true minimax).
pub struct AdversarialSolver<'a> {
    instance: &'a Instance,
    focal: Party,
    focal_rule: Option<StateRule>,
    memo: HashMap<SolveKey, Outcome>,
}

impl<'a> AdversarialSolver<'a> {
    pub fn new(
        instance: &'a Instance,
        focal: Party,
        focal_rule: Option<StateRule>,
    ) -> Result<Self, OracleError> {
        check_capacity(instance)?;
        Ok(Self {
            instance,
            focal,
            focal_rule,
            memo: HashMap::new(),
        })
    }

    /// Worst-case negotiation result from the focal party's perspective,
    /// from the initial state.
    pub fn root_value(&mut self) -> Outcome {
        let m = self.instance.m();
        let full = if m == 64 { u64::MAX } else { (1u64 << m) - 1 };
        self.value(full, self.instance.first_mover())
    }

    /// Synthesizes the query state for a rule-driven focal decision. The
    /// round number is implied by how many outcomes are gone; the history
    /// is not reconstructible and is left empty, which is sound because a
    /// `StateRule` may not read it.
    fn query_state(&self, mask: u64, mover: Party, pending: Option<Outcome>) -> NegotiationState {
        let m = self.instance.m();
        let available = OutcomeSet::from_outcomes(m, mask_outcomes(mask));
        NegotiationState {
            round: (m - available.len() + 1) as u32,
            available,
            mover,
            pending_offer: pending,
            history: Vec::new(),
        }
    }

    fn value(&mut self, mask: u64, mover: Party) -> Outcome {
        let key = SolveKey {
            available: mask,
            mover,
        };
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        let v = if mask.count_ones() == 1 {
            Outcome(mask.trailing_zeros())
        } else if mover == self.focal {
            match self.focal_rule {
                Some(rule) => {
                    let state = self.query_state(mask, mover, None);
                    let offer = match rule(self.instance, &state) {
                        Action::Offer(o) => o,
                        other => panic!("focal rule returned {other:?} at an offer point"),
                    };
                    self.offer_result(mask, mover, offer)
                }
                None => {
                    let order = self.instance.order(self.focal);
                    mask_outcomes(mask)
                        .map(|o| self.offer_result(mask, mover, o))
                        .min_by_key(|&r| order.rank(r))
                        .expect("mask is nonempty")
                }
            }
        } else {
            // Adversary offers: minimize the focal party's rank.
            let order = self.instance.order(self.focal);
            mask_outcomes(mask)
                .map(|o| self.offer_result(mask, mover, o))
                .max_by_key(|&r| order.rank(r))
                .expect("mask is nonempty")
        };
        self.memo.insert(key, v);
        v
    }

    /// Result induced by `offer` at (mask, mover), with the responder
    /// acting per her role (focal rule, focal best response, or
    /// adversarial minimizer).
    fn offer_result(&mut self, mask: u64, mover: Party, offer: Outcome) -> Outcome {
        let rest = mask & !(1u64 << offer.0);
        if rest == 0 {
            return offer; // forced acceptance of the sole remaining outcome
        }
        let continuation = self.value(rest, mover.other());
        let responder = mover.other();
        let focal_order = self.instance.order(self.focal);
        if responder == self.focal {
            match self.focal_rule {
                Some(rule) => {
                    let state = self.query_state(mask, mover, Some(offer));
                    match rule(self.instance, &state) {
                        Action::Accept => offer,
                        Action::Reject => continuation,
                        Action::Offer(_) => panic!("focal rule offered at a response point"),
                    }
                }
                None => {
                    if focal_order.prefers(offer, continuation) {
                        offer
                    } else {
                        continuation
                    }
                }
            }
        } else if focal_order.prefers(continuation, offer) {
            // Adversary responder: accept exactly when that hurts focal.
            offer
        } else {
            continuation
        }
    }

    /// The adversary's minimizing action at a state (used to drive live
    /// play against a real opponent).
    pub fn adversary_action(&mut self, state: &NegotiationState) -> Action {
        let mask = state
            .available
            .mask64()
            .expect("adversarial play is capped at 64 outcomes");
        let focal_order = self.instance.order(self.focal);
        match state.pending_offer {
            Some(offer) => {
                if state.available.len() == 1 {
                    return Action::Accept;
                }
                let rest = mask & !(1u64 << offer.0);
                let continuation = self.value(rest, state.mover.other());
                if focal_order.prefers(continuation, offer) {
                    Action::Accept
                } else {
                    Action::Reject
                }
            }
            None => {
                let worst = mask_outcomes(mask)
                    .map(|o| (o, self.offer_result(mask, state.mover, o)))
                    .max_by_key(|&(_, r)| focal_order.rank(r))
                    .expect("available set is nonempty");
                Action::Offer(worst.0)
            }
        }
    }
}

/// Worst-case result for `focal` when the other party plays every line of
/// the game tree adversarially. With `focal_rule` set, the focal party is
/// locked to that rule; otherwise she best-responds (the true minimax
/// value).
pub fn adversarial_value(
    instance: &Instance,
    focal: Party,
    focal_rule: Option<StateRule>,
) -> Result<Outcome, OracleError> {
    Ok(AdversarialSolver::new(instance, focal, focal_rule)?.root_value())
}

/// An engine policy that plays the pure adversary against `victim`.
pub struct AdversaryPolicy<'a> {
    solver: AdversarialSolver<'a>,
}

impl<'a> AdversaryPolicy<'a> {
    /// `victim_rule`: what the adversary assumes the victim plays; `None`
    /// assumes a best-responding victim.
    pub fn new(
        instance: &'a Instance,
        victim: Party,
        victim_rule: Option<StateRule>,
    ) -> Result<Self, OracleError> {
        Ok(Self {
            solver: AdversarialSolver::new(instance, victim, victim_rule)?,
        })
    }
}

impl Policy for AdversaryPolicy<'_> {
    fn decide(&mut self, _instance: &Instance, state: &NegotiationState) -> Action {
        self.solver.adversary_action(state)
    }
}
