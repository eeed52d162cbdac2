//! Indexable set of open pairs with O(1) insert, delete and uniform sampling.
//!
//! Members live in a dense vector; a position table indexed by pair rank
//! points back into it. Deletion swaps the last member into the hole.

use rand::Rng;

use crate::graph::Pair;

const ABSENT: u32 = u32::MAX;

#[derive(Clone, Debug)]
pub struct OpenPairSet {
    members: Vec<Pair>,
    position: Vec<u32>,
}

impl OpenPairSet {
    /// An empty set able to hold pairs of rank `0..capacity`.
    pub fn with_rank_capacity(capacity: usize) -> Self {
        assert!(capacity < ABSENT as usize, "pair ranks must fit in u32");
        OpenPairSet {
            members: Vec::with_capacity(capacity),
            position: vec![ABSENT; capacity],
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.members.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    #[inline]
    pub fn contains(&self, rank: usize) -> bool {
        self.position[rank] != ABSENT
    }

    /// Returns `false` if the pair was already a member.
    pub fn insert(&mut self, rank: usize, pair: Pair) -> bool {
        if self.contains(rank) {
            return false;
        }
        self.position[rank] = self.members.len() as u32;
        self.members.push(pair);
        true
    }

    /// Removes the pair with the given rank; `rank_of` maps the member moved
    /// into the vacated slot back to its rank. Returns `false` if absent.
    pub fn remove(&mut self, rank: usize, rank_of: impl Fn(Pair) -> usize) -> bool {
        let slot = self.position[rank];
        if slot == ABSENT {
            return false;
        }
        self.position[rank] = ABSENT;
        self.members.swap_remove(slot as usize);
        if let Some(&moved) = self.members.get(slot as usize) {
            self.position[rank_of(moved)] = slot;
        }
        true
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<Pair> {
        if self.members.is_empty() {
            None
        } else {
            Some(self.members[rng.gen_range(0..self.members.len())])
        }
    }

    pub fn as_slice(&self) -> &[Pair] {
        &self.members
    }

    /// Position table entry for a rank, `None` when absent.
    pub fn slot_of(&self, rank: usize) -> Option<usize> {
        let slot = self.position[rank];
        (slot != ABSENT).then_some(slot as usize)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeSet;

    fn rank(p: Pair) -> usize {
        (p.u * 100 + p.v) as usize
    }

    #[test]
    fn insert_remove_sample() {
        let mut set = OpenPairSet::with_rank_capacity(10_000);
        let a = Pair::new(1, 2);
        let b = Pair::new(3, 4);
        assert!(set.insert(rank(a), a));
        assert!(!set.insert(rank(a), a));
        assert!(set.insert(rank(b), b));
        assert!(set.remove(rank(a), rank));
        assert!(!set.remove(rank(a), rank));
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(set.sample(&mut rng), Some(b));
        assert!(set.remove(rank(b), rank));
        assert_eq!(set.sample(&mut rng), None);
    }

    proptest! {
        #[test]
        fn mirrors_a_btreeset(ops in proptest::collection::vec((0u32..20, 0u32..20, any::<bool>()), 0..200)) {
            let mut set = OpenPairSet::with_rank_capacity(10_000);
            let mut model = BTreeSet::new();
            for (a, b, ins) in ops {
                if a == b { continue; }
                let p = Pair::new(a, b);
                if ins {
                    prop_assert_eq!(set.insert(rank(p), p), model.insert(p));
                } else {
                    prop_assert_eq!(set.remove(rank(p), rank), model.remove(&p));
                }
                prop_assert_eq!(set.len(), model.len());
            }
            let members: BTreeSet<_> = set.as_slice().iter().copied().collect();
            prop_assert_eq!(&members, &model);
            for p in &model {
                prop_assert_eq!(set.as_slice()[set.slot_of(rank(*p)).unwrap()], *p);
            }
        }
    }
}
