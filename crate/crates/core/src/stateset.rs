use alloc::vec::Vec;
use core::fmt;

use crate::model::StateId;

/// A set of states of one model, stored as a bitset.
///
/// Ordering and equality are structural, so sets can key `BTreeMap`s during
/// subset exploration.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct StateSet {
    words: Vec<u64>,
}

impl StateSet {
    pub fn empty() -> Self {
        StateSet { words: Vec::new() }
    }

    pub fn singleton(state: StateId) -> Self {
        let mut set = StateSet::empty();
        set.insert(state);
        set
    }

    pub fn insert(&mut self, state: StateId) -> bool {
        let (word, bit) = (state.0 / 64, state.0 % 64);
        if self.words.len() <= word {
            self.words.resize(word + 1, 0);
        }
        let fresh = self.words[word] & (1 << bit) == 0;
        self.words[word] |= 1 << bit;
        fresh
    }

    pub fn contains(&self, state: StateId) -> bool {
        let (word, bit) = (state.0 / 64, state.0 % 64);
        self.words.get(word).is_some_and(|w| w & (1 << bit) != 0)
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_subset(&self, other: &StateSet) -> bool {
        self.words
            .iter()
            .enumerate()
            .all(|(i, w)| w & !other.words.get(i).copied().unwrap_or(0) == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = StateId> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            (0..64)
                .filter(move |b| w & (1u64 << b) != 0)
                .map(move |b| StateId(i * 64 + b))
        })
    }

    // Trailing zero words would break structural equality.
    fn normalize(&mut self) {
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
    }
}

impl FromIterator<StateId> for StateSet {
    fn from_iter<T: IntoIterator<Item = StateId>>(iter: T) -> Self {
        let mut set = StateSet::empty();
        for s in iter {
            set.insert(s);
        }
        set.normalize();
        set
    }
}

impl fmt::Debug for StateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter().map(|s| s.0)).finish()
    }
}
