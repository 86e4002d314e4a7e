//! Core domain types: outcomes, parties, preference orders, and instances.

use serde::{Deserialize, Serialize};

/// An outcome identified by a dense integer id in `[0, m)`.
///
/// External labels live only in the file-format layer; everything in the
/// core works with ids so that sets can be represented as bit blocks.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct Outcome(pub u32);

impl Outcome {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl std::fmt::Display for Outcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// One of the two negotiation parties.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum Party {
    #[serde(rename = "p1")]
    P1,
    #[serde(rename = "p2")]
    P2,
}

impl Party {
    #[inline]
    pub fn other(self) -> Party {
        match self {
            Party::P1 => Party::P2,
            Party::P2 => Party::P1,
        }
    }

    #[inline]
    pub fn index(self) -> usize {
        match self {
            Party::P1 => 0,
            Party::P2 => 1,
        }
    }
}

impl std::fmt::Display for Party {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Party::P1 => write!(f, "p1"),
            Party::P2 => write!(f, "p2"),
        }
    }
}

/// Errors raised while validating instances and preference orders.
#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum InstanceError {
    #[error("outcome set is empty (m = 0 is not a legal instance)")]
    EmptyOutcomeSet,
    #[error("{field}: ranking is not a permutation of 0..{m}")]
    NotAPermutation { field: &'static str, m: usize },
    #[error("preference orders cover different outcome universes ({m1} vs {m2})")]
    UniverseMismatch { m1: usize, m2: usize },
}

/// A strict total order over the outcome universe, best first.
///
/// `rank` is O(1); rank 0 is the most preferred outcome.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PreferenceOrder {
    ranking: Vec<Outcome>,
    rank_of: Vec<u32>,
}

impl PreferenceOrder {
    /// Builds an order from a best-to-worst ranking. Fails unless the
    /// ranking is a permutation of `0..m` (complete, no ties).
    pub fn new(ranking: Vec<Outcome>) -> Result<Self, InstanceError> {
        Self::with_field(ranking, "ranking")
    }

    pub(crate) fn with_field(
        ranking: Vec<Outcome>,
        field: &'static str,
    ) -> Result<Self, InstanceError> {
        let m = ranking.len();
        if m == 0 {
            return Err(InstanceError::EmptyOutcomeSet);
        }
        let mut rank_of = vec![u32::MAX; m];
        for (rank, o) in ranking.iter().enumerate() {
            let idx = o.index();
            if idx >= m || rank_of[idx] != u32::MAX {
                return Err(InstanceError::NotAPermutation { field, m });
            }
            rank_of[idx] = rank as u32;
        }
        Ok(Self { ranking, rank_of })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.ranking.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranking.is_empty()
    }

    /// Best-to-worst ranking.
    #[inline]
    pub fn ranking(&self) -> &[Outcome] {
        &self.ranking
    }

    /// Rank of an outcome; 0 is best.
    #[inline]
    pub fn rank(&self, o: Outcome) -> usize {
        self.rank_of[o.index()] as usize
    }

    /// Strict preference: does this party prefer `a` over `b`?
    #[inline]
    pub fn prefers(&self, a: Outcome, b: Outcome) -> bool {
        self.rank(a) < self.rank(b)
    }

    /// Weak preference (equality only for the identical outcome).
    #[inline]
    pub fn weakly_prefers(&self, a: Outcome, b: Outcome) -> bool {
        self.rank(a) <= self.rank(b)
    }

    /// Most preferred outcome among `iter`, if any.
    pub fn best_of<I: IntoIterator<Item = Outcome>>(&self, iter: I) -> Option<Outcome> {
        iter.into_iter().min_by_key(|o| self.rank(*o))
    }

    /// Least preferred outcome among `iter`, if any.
    pub fn worst_of<I: IntoIterator<Item = Outcome>>(&self, iter: I) -> Option<Outcome> {
        iter.into_iter().max_by_key(|o| self.rank(*o))
    }
}

/// A negotiation instance: the outcome universe, both parties' preference
/// orders, and which party makes the first offer.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Instance {
    m: usize,
    orders: [PreferenceOrder; 2],
    first_mover: Party,
}

impl Instance {
    pub fn new(
        order1: PreferenceOrder,
        order2: PreferenceOrder,
        first_mover: Party,
    ) -> Result<Self, InstanceError> {
        if order1.len() != order2.len() {
            return Err(InstanceError::UniverseMismatch {
                m1: order1.len(),
                m2: order2.len(),
            });
        }
        Ok(Self {
            m: order1.len(),
            orders: [order1, order2],
            first_mover,
        })
    }

    /// Convenience constructor from raw id rankings (best first).
    pub fn from_rankings(
        p1: &[u32],
        p2: &[u32],
        first_mover: Party,
    ) -> Result<Self, InstanceError> {
        let o1 = PreferenceOrder::with_field(p1.iter().map(|&i| Outcome(i)).collect(), "p1")?;
        let o2 = PreferenceOrder::with_field(p2.iter().map(|&i| Outcome(i)).collect(), "p2")?;
        Self::new(o1, o2, first_mover)
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn order(&self, party: Party) -> &PreferenceOrder {
        &self.orders[party.index()]
    }

    #[inline]
    pub fn first_mover(&self) -> Party {
        self.first_mover
    }

    /// The same instance with the other party moving first.
    pub fn with_first_mover(&self, first_mover: Party) -> Instance {
        let mut copy = self.clone();
        copy.first_mover = first_mover;
        copy
    }

    /// Every outcome of the universe, in id order.
    pub fn outcomes(&self) -> impl Iterator<Item = Outcome> {
        (0..self.m as u32).map(Outcome)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_permutation() {
        let err = PreferenceOrder::new(vec![Outcome(0), Outcome(0), Outcome(1)]).unwrap_err();
        assert!(matches!(err, InstanceError::NotAPermutation { .. }));
        let err = PreferenceOrder::new(vec![Outcome(1), Outcome(2)]).unwrap_err();
        assert!(matches!(err, InstanceError::NotAPermutation { .. }));
    }

    #[test]
    fn rejects_empty_universe() {
        assert_eq!(
            PreferenceOrder::new(vec![]).unwrap_err(),
            InstanceError::EmptyOutcomeSet
        );
    }

    #[test]
    fn rejects_mismatched_universes() {
        let o1 = PreferenceOrder::new(vec![Outcome(0), Outcome(1)]).unwrap();
        let o2 = PreferenceOrder::new(vec![Outcome(0)]).unwrap();
        assert!(matches!(
            Instance::new(o1, o2, Party::P1).unwrap_err(),
            InstanceError::UniverseMismatch { .. }
        ));
    }

    #[test]
    fn rank_is_inverse_of_ranking() {
        let ord = PreferenceOrder::new(vec![Outcome(2), Outcome(0), Outcome(1)]).unwrap();
        for (r, o) in ord.ranking().iter().enumerate() {
            assert_eq!(ord.rank(*o), r);
        }
        assert!(ord.prefers(Outcome(2), Outcome(1)));
        assert!(!ord.prefers(Outcome(1), Outcome(1)));
        assert!(ord.weakly_prefers(Outcome(1), Outcome(1)));
    }
}
