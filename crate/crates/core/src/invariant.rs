//! Robustly invariant subsets: sets the system can never leave regardless
//! of switching, and the largest such subset inside a target set.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::lds::Lds;
use crate::set::StateSet;

/// True when the set is closed under every subnetwork map. By induction a
/// solution started inside then stays inside under arbitrary switching.
pub fn is_robustly_invariant(lds: &Lds, set: &StateSet) -> bool {
    assert_eq!(
        set.universe_size(),
        lds.state_count(),
        "set universe must match the system"
    );
    set.iter()
        .all(|x| (1..=lds.subnetwork_count()).all(|j| set.contains(lds.step_unchecked(x, j))))
}

/// Largest robustly invariant subset of `target`. Peels away states that can
/// escape in one step until nothing changes; the result contains every
/// robustly invariant subset of the target.
pub fn lris(lds: &Lds, target: &StateSet) -> StateSet {
    lris_with_rounds(lds, target).0
}

/// `lris` plus the number of shrinking rounds it took, for diagnostics.
/// Every round removes at least one state, so rounds never exceed |target|.
pub fn lris_with_rounds(lds: &Lds, target: &StateSet) -> (StateSet, usize) {
    assert_eq!(
        target.universe_size(),
        lds.state_count(),
        "set universe must match the system"
    );
    let m = lds.subnetwork_count();
    let mut current: BTreeSet<usize> = target.iter().collect();
    let mut rounds = 0;
    loop {
        let next: BTreeSet<usize> = current
            .iter()
            .copied()
            .filter(|&x| (1..=m).all(|j| current.contains(&lds.step_unchecked(x, j))))
            .collect();
        if next.len() == current.len() {
            let result = StateSet::new(lds.state_count(), current)
                .expect("members came from a validated set");
            return (result, rounds);
        }
        current = next;
        rounds += 1;
    }
}

/// Default cap on |target| for the exponential brute-force search.
pub const DEFAULT_BRUTEFORCE_CAP: usize = 16;

/// Oracle form of `lris`: the union of every robustly invariant subset of
/// `target`, found by checking all 2^|target| subsets outright.
pub fn lris_bruteforce(lds: &Lds, target: &StateSet) -> Result<StateSet> {
    lris_bruteforce_capped(lds, target, DEFAULT_BRUTEFORCE_CAP)
}

/// `lris_bruteforce` with an explicit cap on |target|.
pub fn lris_bruteforce_capped(lds: &Lds, target: &StateSet, cap: usize) -> Result<StateSet> {
    assert_eq!(
        target.universe_size(),
        lds.state_count(),
        "set universe must match the system"
    );
    let members: Vec<usize> = target.iter().collect();
    if members.len() > cap {
        return Err(Error::CapExceeded {
            what: "brute-force invariant subset search",
            required: members.len() as u128,
            cap: cap as u128,
        });
    }
    let n = lds.state_count();
    let m = lds.subnetwork_count();
    let mut in_subset = vec![false; n + 1];
    let mut union: BTreeSet<usize> = BTreeSet::new();
    for mask in 0u64..(1u64 << members.len()) {
        for (bit, &s) in members.iter().enumerate() {
            in_subset[s] = mask >> bit & 1 == 1;
        }
        let invariant = members.iter().enumerate().all(|(bit, &x)| {
            mask >> bit & 1 == 0 || (1..=m).all(|j| in_subset[lds.step_unchecked(x, j)])
        });
        if invariant {
            union.extend(
                members
                    .iter()
                    .enumerate()
                    .filter(|&(bit, _)| mask >> bit & 1 == 1)
                    .map(|(_, &s)| s),
            );
        }
    }
    Ok(StateSet::new(n, union).expect("members came from a validated set"))
}
