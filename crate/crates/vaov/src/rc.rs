//! The Rational Compromise bargaining rule and the machine checks of its
//! relationship to the protocol's SPE result.

use crate::set::OutcomeSet;
use crate::spe::{offers_until_empty_intersection, spe_result};
use crate::types::{Instance, Outcome, Party, PreferenceOrder};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// The RC set: the first nonempty intersection of the parties' top-v
/// sets, together with the depth v* at which it appeared.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RcResult {
    pub outcomes: OutcomeSet,
    pub v_star: usize,
}

/// Iteratively deepens v from 1 and returns the first nonempty top-v
/// intersection. Always terminates by v = m; the result has one or two
/// members and does not depend on who moves first.
pub fn rc_set(instance: &Instance) -> RcResult {
    let m = instance.m();
    let r1 = instance.order(Party::P1).ranking();
    let r2 = instance.order(Party::P2).ranking();
    let mut in_top1 = vec![false; m];
    let mut in_top2 = vec![false; m];
    for v in 1..=m {
        let (a, b) = (r1[v - 1], r2[v - 1]);
        in_top1[a.index()] = true;
        in_top2[b.index()] = true;
        let mut hits = OutcomeSet::empty(m);
        if in_top2[a.index()] {
            hits.insert(a);
        }
        if in_top1[b.index()] {
            hits.insert(b);
        }
        if !hits.is_empty() {
            return RcResult {
                outcomes: hits,
                v_star: v,
            };
        }
    }
    unreachable!("the top-m sets are the whole universe and must intersect")
}

/// One clause of the RC/SPE relation theorem: whether its hypothesis
/// applied here, and whether its conclusion held (vacuously true when the
/// hypothesis did not apply).
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub struct Clause {
    pub applicable: bool,
    pub pass: bool,
}

impl Clause {
    fn vacuous() -> Self {
        Clause {
            applicable: false,
            pass: true,
        }
    }

    fn checked(pass: bool) -> Self {
        Clause {
            applicable: true,
            pass,
        }
    }
}

/// Pass/fail record for every clause of the RC/SPE relation theorem on
/// one instance.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct RelationReport {
    /// o_eq is a member of RC.
    pub membership: Clause,
    /// Singleton RC pins the SPE result.
    pub singleton: Clause,
    /// When swapping the first mover changes the SPE result, RC is
    /// exactly the pair of results.
    pub swap_pair: Clause,
    /// Parity of m and of the offer counts forces |RC| = 1.
    pub parity: Clause,
    /// With |RC| = 2, the offer-count parity selects which member is the
    /// SPE result, ordered by the preferences of the mover/responder at
    /// the round where the intersection empties.
    pub two_element: Clause,
    pub o_eq: Outcome,
    pub o_eq_swapped: Outcome,
    pub rc: Vec<Outcome>,
    pub v_star: usize,
    pub offer_counts: (u32, u32),
}

impl RelationReport {
    pub fn all_pass(&self) -> bool {
        self.membership.pass
            && self.singleton.pass
            && self.swap_pair.pass
            && self.parity.pass
            && self.two_element.pass
    }
}

/// Checks every clause of the RC/SPE relation theorem on one instance.
pub fn verify_rc_relations(instance: &Instance) -> RelationReport {
    let m = instance.m();
    let rc = rc_set(instance);
    let rc_members: Vec<Outcome> = rc.outcomes.iter().collect();
    let o_eq = spe_result(instance);
    let swapped = instance.with_first_mover(instance.first_mover().other());
    let o_eq_swapped = spe_result(&swapped);
    let (l1, l2) = offers_until_empty_intersection(instance);
    let offers_total = l1 + l2;

    let membership = Clause::checked(rc.outcomes.contains(o_eq));

    let singleton = if rc_members.len() == 1 {
        Clause::checked(o_eq == rc_members[0])
    } else {
        Clause::vacuous()
    };

    let swap_pair = if o_eq != o_eq_swapped {
        Clause::checked(
            rc_members.len() == 2
                && rc.outcomes.contains(o_eq)
                && rc.outcomes.contains(o_eq_swapped),
        )
    } else {
        Clause::vacuous()
    };

    let parity_hypothesis = m % 2 != offers_total as usize % 2;
    let parity = if parity_hypothesis {
        Clause::checked(rc_members.len() == 1)
    } else {
        Clause::vacuous()
    };

    let two_element = if rc_members.len() == 2 {
        // Roles at the round where the intersection becomes empty: the
        // first mover offers at odd rounds, and that round's number is
        // one past the total offers made so far.
        let empty_round_mover = if offers_total % 2 == 0 {
            instance.first_mover()
        } else {
            instance.first_mover().other()
        };
        let other = rc_members.iter().copied().find(|&o| o != o_eq);
        match other {
            _ if !rc.outcomes.contains(o_eq) => Clause::checked(false),
            None => Clause::checked(false),
            Some(other) => {
                // The responder at that round carries the larger lower set,
                // so the other compromise candidate has already fallen into
                // it; the survivor is the one that responder prefers.
                let deciding = empty_round_mover.other();
                Clause::checked(instance.order(deciding).prefers(o_eq, other))
            }
        }
    } else {
        Clause::vacuous()
    };

    RelationReport {
        membership,
        singleton,
        swap_pair,
        parity,
        two_element,
        o_eq,
        o_eq_swapped,
        rc: rc_members,
        v_star: rc.v_star,
        offer_counts: (l1, l2),
    }
}

/// Extends an instance with `extra` fresh outcomes, each placed strictly
/// above the current SPE result in both parties' orders (at seeded
/// pseudo-random positions, not necessarily at the top). Restricted to
/// the old outcomes, both new orders preserve the old relative order, so
/// the extension satisfies the monotonicity premises by construction.
pub fn monotone_extension(instance: &Instance, extra: usize, seed: u64) -> Instance {
    assert!(extra >= 1);
    let o_eq = spe_result(instance);
    let m = instance.m();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut new_rankings: [Vec<Outcome>; 2] = [Vec::new(), Vec::new()];
    for party in [Party::P1, Party::P2] {
        let mut ranking: Vec<Outcome> = instance.order(party).ranking().to_vec();
        for fresh in 0..extra {
            let new_outcome = Outcome((m + fresh) as u32);
            let eq_pos = ranking.iter().position(|&o| o == o_eq).expect("o_eq present");
            // Any slot in 0..=eq_pos is strictly above o_eq.
            let slot = rng.gen_range(0..=eq_pos);
            ranking.insert(slot, new_outcome);
        }
        new_rankings[party.index()] = ranking;
    }
    let [r1, r2] = new_rankings;
    Instance::new(
        PreferenceOrder::new(r1).expect("extension stays a permutation"),
        PreferenceOrder::new(r2).expect("extension stays a permutation"),
        instance.first_mover(),
    )
    .expect("extension keeps a common universe")
}

/// Structural conditions of the monotonicity definition, asserted on an
/// extension produced from `base`.
pub fn extension_is_wellformed(base: &Instance, extended: &Instance, o_eq: Outcome) -> bool {
    let m = base.m();
    if extended.m() <= m {
        return false;
    }
    for party in [Party::P1, Party::P2] {
        let old = base.order(party);
        let new = extended.order(party);
        // Old outcomes keep their relative order.
        let restricted: Vec<Outcome> = new
            .ranking()
            .iter()
            .copied()
            .filter(|o| o.index() < m)
            .collect();
        if restricted != old.ranking() {
            return false;
        }
        // Every fresh outcome sits strictly above o_eq.
        for fresh in m..extended.m() {
            if !new.prefers(Outcome(fresh as u32), o_eq) {
                return false;
            }
        }
    }
    true
}
