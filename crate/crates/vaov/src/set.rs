//! Outcome sets over a fixed universe, backed by 64-bit blocks.
//!
//! A single block covers universes up to 64 outcomes; larger universes
//! simply use more blocks, so the same type serves the desk-scale solvers
//! and the large-m performance checks.

use crate::types::Outcome;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct OutcomeSet {
    blocks: Vec<u64>,
    universe: usize,
    len: usize,
}

impl OutcomeSet {
    pub fn empty(universe: usize) -> Self {
        Self {
            blocks: vec![0; universe.div_ceil(64).max(1)],
            universe,
            len: 0,
        }
    }

    pub fn full(universe: usize) -> Self {
        let mut set = Self::empty(universe);
        for i in 0..universe {
            let (b, bit) = (i / 64, i % 64);
            set.blocks[b] |= 1 << bit;
        }
        set.len = universe;
        set
    }

    pub fn from_outcomes<I: IntoIterator<Item = Outcome>>(universe: usize, iter: I) -> Self {
        let mut set = Self::empty(universe);
        for o in iter {
            set.insert(o);
        }
        set
    }

    #[inline]
    pub fn universe(&self) -> usize {
        self.universe
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn contains(&self, o: Outcome) -> bool {
        let i = o.index();
        i < self.universe && self.blocks[i / 64] & (1 << (i % 64)) != 0
    }

    /// Inserts `o`; returns true if it was absent.
    pub fn insert(&mut self, o: Outcome) -> bool {
        let i = o.index();
        assert!(i < self.universe, "outcome {o} outside universe {}", self.universe);
        let mask = 1 << (i % 64);
        if self.blocks[i / 64] & mask == 0 {
            self.blocks[i / 64] |= mask;
            self.len += 1;
            true
        } else {
            false
        }
    }

    /// Removes `o`; returns true if it was present.
    pub fn remove(&mut self, o: Outcome) -> bool {
        let i = o.index();
        if i >= self.universe {
            return false;
        }
        let mask = 1 << (i % 64);
        if self.blocks[i / 64] & mask != 0 {
            self.blocks[i / 64] &= !mask;
            self.len -= 1;
            true
        } else {
            false
        }
    }

    /// Members in ascending id order.
    pub fn iter(&self) -> impl Iterator<Item = Outcome> + '_ {
        self.blocks.iter().enumerate().flat_map(|(bi, &block)| {
            let mut bits = block;
            std::iter::from_fn(move || {
                if bits == 0 {
                    None
                } else {
                    let tz = bits.trailing_zeros();
                    bits &= bits - 1;
                    Some(Outcome((bi * 64) as u32 + tz))
                }
            })
        })
    }

    /// The single member of a singleton set.
    pub fn sole_member(&self) -> Option<Outcome> {
        if self.len == 1 {
            self.iter().next()
        } else {
            None
        }
    }

    /// Bitmask form for universes of at most 64 outcomes.
    pub fn mask64(&self) -> Option<u64> {
        if self.universe <= 64 {
            Some(self.blocks[0])
        } else {
            None
        }
    }

    pub fn intersection(&self, other: &OutcomeSet) -> OutcomeSet {
        self.zip_with(other, |a, b| a & b)
    }

    pub fn union(&self, other: &OutcomeSet) -> OutcomeSet {
        self.zip_with(other, |a, b| a | b)
    }

    pub fn difference(&self, other: &OutcomeSet) -> OutcomeSet {
        self.zip_with(other, |a, b| a & !b)
    }

    pub fn is_subset(&self, other: &OutcomeSet) -> bool {
        self.blocks
            .iter()
            .zip(&other.blocks)
            .all(|(a, b)| a & !b == 0)
    }

    fn zip_with(&self, other: &OutcomeSet, f: impl Fn(u64, u64) -> u64) -> OutcomeSet {
        assert_eq!(self.universe, other.universe, "universe mismatch");
        let blocks: Vec<u64> = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(&a, &b)| f(a, b))
            .collect();
        let len = blocks.iter().map(|b| b.count_ones() as usize).sum();
        OutcomeSet {
            blocks,
            universe: self.universe,
            len,
        }
    }
}
