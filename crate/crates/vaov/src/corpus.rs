//! Seeded random-instance generation. All randomness flows through one
//! named generator (ChaCha8 seeded explicitly), so any corpus — and any
//! failure found in one — is reproducible byte for byte.

use crate::types::{Instance, Outcome, Party, PreferenceOrder};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A deterministic instance generator over universes of size `m`.
pub struct InstanceGen {
    m: usize,
    rng: ChaCha8Rng,
}

impl InstanceGen {
    pub fn new(m: usize, seed: u64) -> InstanceGen {
        assert!(m >= 1, "m must be at least 1");
        InstanceGen {
            m,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    fn random_order(&mut self) -> PreferenceOrder {
        let mut ids: Vec<Outcome> = (0..self.m as u32).map(Outcome).collect();
        ids.shuffle(&mut self.rng);
        PreferenceOrder::new(ids).expect("a shuffled id range is a permutation")
    }

    /// Next instance: two independent uniform random orders, first mover
    /// fixed to p1.
    pub fn next_instance(&mut self) -> Instance {
        let order1 = self.random_order();
        let order2 = self.random_order();
        Instance::new(order1, order2, Party::P1).expect("orders share the universe")
    }

    /// Next instance with a uniformly random first mover.
    pub fn next_instance_any_mover(&mut self) -> Instance {
        let mut instance = self.next_instance();
        if self.rng.gen() {
            instance = instance.with_first_mover(Party::P2);
        }
        instance
    }
}

/// Generates `count` instances of size `m` from `seed`.
pub fn generate(m: usize, count: usize, seed: u64) -> Vec<Instance> {
    let mut gen = InstanceGen::new(m, seed);
    (0..count).map(|_| gen.next_instance()).collect()
}
