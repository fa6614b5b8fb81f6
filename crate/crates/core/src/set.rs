//! Subsets of the state space [1..n], carrying their universe size so that
//! complements and comparisons are always well defined.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};

/// A subset of the states [1..n]. Immutable once built; the set algebra
/// returns fresh sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateSet {
    n: usize,
    members: BTreeSet<usize>,
}

impl StateSet {
    /// Collects `members`, rejecting anything outside [1..n]. Duplicates
    /// collapse silently.
    pub fn new(n: usize, members: impl IntoIterator<Item = usize>) -> Result<Self> {
        let members: BTreeSet<usize> = members.into_iter().collect();
        if let Some(&bad) = members.iter().find(|&&i| i < 1 || i > n) {
            return Err(Error::IndexOutOfRange {
                what: "state",
                index: bad,
                bound: n,
            });
        }
        Ok(StateSet { n, members })
    }

    pub fn empty(n: usize) -> Self {
        StateSet {
            n,
            members: BTreeSet::new(),
        }
    }

    pub fn full(n: usize) -> Self {
        StateSet {
            n,
            members: (1..=n).collect(),
        }
    }

    pub fn universe_size(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.members.contains(&i)
    }

    /// Members in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().copied()
    }

    /// Members as a sorted vector.
    pub fn indices(&self) -> Vec<usize> {
        self.members.iter().copied().collect()
    }

    pub fn complement(&self) -> StateSet {
        StateSet {
            n: self.n,
            members: (1..=self.n).filter(|i| !self.members.contains(i)).collect(),
        }
    }

    pub fn union(&self, other: &StateSet) -> StateSet {
        assert_eq!(self.n, other.n, "sets live in different universes");
        StateSet {
            n: self.n,
            members: self.members.union(&other.members).copied().collect(),
        }
    }

    pub fn intersection(&self, other: &StateSet) -> StateSet {
        assert_eq!(self.n, other.n, "sets live in different universes");
        StateSet {
            n: self.n,
            members: self.members.intersection(&other.members).copied().collect(),
        }
    }

    pub fn is_subset_of(&self, other: &StateSet) -> bool {
        assert_eq!(self.n, other.n, "sets live in different universes");
        self.members.is_subset(&other.members)
    }
}

impl fmt::Display for StateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (pos, i) in self.members.iter().enumerate() {
            if pos > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}
