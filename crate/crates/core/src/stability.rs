//! The four set-stability deciders with machine-checkable witnesses, exact
//! reachable-pattern ratios, the transition matrix under random switching,
//! and the consolidated analysis report.
//!
//! All deciders reduce to reachability facts, so a single Boolean closure
//! per call settles every verdict; failures come with a concrete state (and
//! where one exists, a labeled path) demonstrating the violation.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::invariant::lris;
use crate::lds::Lds;
use crate::reach::{
    count_matrix_power, diagonal_set, find_path, reachability_matrix_bool, BoolMatrix, LabeledPath,
    RationalMatrix,
};
use crate::set::StateSet;

/// Why a decider failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WitnessKind {
    /// A state outside the reference set can return to itself, so some
    /// switching signal keeps a solution outside forever.
    #[serde(rename = "self-reachable-in-complement")]
    SelfReachableInComplement,
    /// A state outside the reference set stays reachable from a
    /// self-reachable state, so excursions outside recur arbitrarily late.
    #[serde(rename = "complement-reachable-from-C0")]
    ComplementReachableFromC0,
    /// A state has no path into the largest robustly invariant subset, so
    /// its ratio of absorbed switching words cannot tend to one.
    #[serde(rename = "no-path-to-lris")]
    NoPathToLris,
}

/// Machine-checkable counterexample: the offending state or pair, plus a
/// concrete labeled path realizing the violation when one exists.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub kind: WitnessKind,
    /// One state, or (source, destination) for reachability violations.
    pub states: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<LabeledPath>,
}

/// Outcome of one decider. A witness is present exactly when the property
/// fails.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub holds: bool,
    pub witness: Option<Witness>,
}

impl Verdict {
    fn pass() -> Self {
        Verdict {
            holds: true,
            witness: None,
        }
    }

    fn fail(witness: Witness) -> Self {
        Verdict {
            holds: false,
            witness: Some(witness),
        }
    }
}

fn check_universe(lds: &Lds, target: &StateSet) {
    assert_eq!(
        target.universe_size(),
        lds.state_count(),
        "target universe must match the system"
    );
}

/// Robust stability with respect to `target`: every solution under every
/// switching signal eventually enters and stays. Holds iff no state outside
/// the target lies on a loop.
pub fn is_robustly_stable(lds: &Lds, target: &StateSet) -> Verdict {
    check_universe(lds, target);
    let r = reachability_matrix_bool(lds);
    robust_verdict(lds, target, &r)
}

fn robust_verdict(lds: &Lds, target: &StateSet, r: &BoolMatrix) -> Verdict {
    for i in target.complement().iter() {
        if r.get(i, i) {
            let path = find_path(lds, i, i)
                .expect("indices are in range")
                .expect("a positive diagonal entry means a loop exists");
            return Verdict::fail(Witness {
                kind: WitnessKind::SelfReachableInComplement,
                states: vec![i],
                path: Some(path),
            });
        }
    }
    Verdict::pass()
}

/// Uniform robust stability: one entry deadline works for all initial
/// states and all signals. Holds iff no state outside the target is
/// reachable from any self-reachable state.
pub fn is_uniformly_robustly_stable(lds: &Lds, target: &StateSet) -> Verdict {
    check_universe(lds, target);
    let r = reachability_matrix_bool(lds);
    let c0 = diagonal_set(lds.state_count(), &r);
    uniform_verdict(lds, target, &r, &c0)
}

fn uniform_verdict(lds: &Lds, target: &StateSet, r: &BoolMatrix, c0: &StateSet) -> Verdict {
    let complement = target.complement();
    for j in c0.iter() {
        for i in complement.iter() {
            if r.get(i, j) {
                let path = find_path(lds, j, i)
                    .expect("indices are in range")
                    .expect("a set reachability bit means a path exists");
                return Verdict::fail(Witness {
                    kind: WitnessKind::ComplementReachableFromC0,
                    states: vec![j, i],
                    path: Some(path),
                });
            }
        }
    }
    Verdict::pass()
}

/// Asymptotic stability with ratio one: for every initial state the
/// fraction of length-k switching words whose endpoint lies in the target
/// tends to one. Holds iff the largest robustly invariant subset of the
/// target is nonempty and reachable from every state.
pub fn is_asymptotically_ratio_one(lds: &Lds, target: &StateSet) -> Verdict {
    check_universe(lds, target);
    let r = reachability_matrix_bool(lds);
    let core = lris(lds, target);
    asymptotic_verdict(lds, &core, &r)
}

fn asymptotic_verdict(lds: &Lds, invariant_core: &StateSet, r: &BoolMatrix) -> Verdict {
    // an empty core fails at the first state checked, since no state can
    // have a path into an empty set
    for j in 1..=lds.state_count() {
        let absorbed = invariant_core.contains(j) || invariant_core.iter().any(|i| r.get(i, j));
        if !absorbed {
            return Verdict::fail(Witness {
                kind: WitnessKind::NoPathToLris,
                states: vec![j],
                path: None,
            });
        }
    }
    Verdict::pass()
}

/// Finite-time stability with ratio one: the ratio reaches exactly one at
/// some finite step and stays there. Equivalent to uniform robust
/// stability; this decider evaluates both that reduction and the
/// no-loops-outside-the-invariant-core criterion, and errors out if the two
/// ever disagree (which would mean a bug here, not bad input).
pub fn is_finite_time_ratio_one(lds: &Lds, target: &StateSet) -> Result<Verdict> {
    check_universe(lds, target);
    let r = reachability_matrix_bool(lds);
    let c0 = diagonal_set(lds.state_count(), &r);
    let core = lris(lds, target);
    finite_time_verdict(lds, target, &r, &c0, &core)
}

fn finite_time_verdict(
    lds: &Lds,
    target: &StateSet,
    r: &BoolMatrix,
    c0: &StateSet,
    invariant_core: &StateSet,
) -> Result<Verdict> {
    let uniform = uniform_verdict(lds, target, r, c0);
    let no_loops_outside = (1..=lds.state_count())
        .filter(|&i| !invariant_core.contains(i))
        .all(|i| !r.get(i, i));
    if uniform.holds != no_loops_outside {
        return Err(Error::CriteriaDisagree(format!(
            "finite-time ratio-one criteria disagree: uniform-stability route says {} but \
             the loops-outside-the-invariant-core route says {}",
            uniform.holds, no_loops_outside
        )));
    }
    Ok(uniform)
}

/// Exact k-step reachable-pattern ratio from `x0` into `target`: the number
/// of length-k switching words whose endpoint lies in the target, over m^k.
pub fn ratio(lds: &Lds, x0: usize, target: &StateSet, k: usize) -> Result<BigRational> {
    check_universe(lds, target);
    assert!(k >= 1, "the step count must be at least 1");
    if x0 < 1 || x0 > lds.state_count() {
        return Err(Error::IndexOutOfRange {
            what: "state",
            index: x0,
            bound: lds.state_count(),
        });
    }
    Ok(ratio_from_power(
        lds,
        x0,
        target,
        k,
        &count_matrix_power(lds, k),
    ))
}

fn ratio_from_power(
    lds: &Lds,
    x0: usize,
    target: &StateSet,
    k: usize,
    power: &crate::reach::CountMatrix,
) -> BigRational {
    let mut hits = BigUint::zero();
    for i in target.iter() {
        hits += power.entry(i, x0);
    }
    let words = BigInt::from(lds.subnetwork_count()).pow(k as u32);
    BigRational::new(BigInt::from(hits), words)
}

/// The reachable-pattern ratios of every initial state at a common step k.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatioVector {
    k: usize,
    values: Vec<BigRational>,
}

impl RatioVector {
    pub fn k(&self) -> usize {
        self.k
    }

    /// Ratio for initial state `x0` (1-based).
    pub fn value(&self, x0: usize) -> &BigRational {
        &self.values[x0 - 1]
    }

    /// All ratios in initial-state order.
    pub fn values(&self) -> &[BigRational] {
        &self.values
    }

    pub fn all_one(&self) -> bool {
        self.values.iter().all(BigRational::is_one)
    }
}

/// `ratio` for all initial states at once, sharing one matrix power.
pub fn ratio_vector(lds: &Lds, target: &StateSet, k: usize) -> RatioVector {
    check_universe(lds, target);
    assert!(k >= 1, "the step count must be at least 1");
    let power = count_matrix_power(lds, k);
    let values = (1..=lds.state_count())
        .map(|x0| ratio_from_power(lds, x0, target, k, &power))
        .collect();
    RatioVector { k, values }
}

/// Smallest k in [1..k_max] at which every initial state's ratio equals one,
/// if any. For an invariant target the ratio never decreases with k, so the
/// value returned is the step from which the ratio stays at one; for other
/// targets it is only the first saturation point.
pub fn first_saturation_step(lds: &Lds, target: &StateSet, k_max: usize) -> Option<usize> {
    (1..=k_max).find(|&k| ratio_vector(lds, target, k).all_one())
}

pub(crate) fn validate_pdv(m: usize, pdv: &[BigRational]) -> Result<()> {
    if pdv.len() != m {
        return Err(Error::InvalidDistribution(format!(
            "{} probabilities for {} subnetworks",
            pdv.len(),
            m
        )));
    }
    if pdv.iter().any(|p| *p <= BigRational::zero()) {
        return Err(Error::InvalidDistribution(
            "every probability must be positive".into(),
        ));
    }
    let sum: BigRational = pdv.iter().sum();
    if !sum.is_one() {
        return Err(Error::InvalidDistribution(format!(
            "probabilities sum to {sum}, expected 1"
        )));
    }
    Ok(())
}

/// Column-stochastic matrix with exact rational entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StochasticMatrix(RationalMatrix);

impl StochasticMatrix {
    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    /// Entry at 1-based (i, j): the probability of moving to i from j in
    /// one step.
    pub fn entry(&self, i: usize, j: usize) -> &BigRational {
        self.0.entry(i, j)
    }

    pub fn as_matrix(&self) -> &RationalMatrix {
        &self.0
    }
}

/// One-step transition probability matrix of the system under i.i.d. random
/// switching with distribution `pdv` over subnetworks: the pdv-weighted sum
/// of the subnetwork matrices. Under the uniform distribution this is the
/// one-step count matrix divided by m, and any positive distribution leaves
/// the zero/nonzero pattern unchanged.
pub fn pls_tpm(lds: &Lds, pdv: &[BigRational]) -> Result<StochasticMatrix> {
    validate_pdv(lds.subnetwork_count(), pdv)?;
    let n = lds.state_count();
    let mut out = RationalMatrix::zeros(n);
    for (idx, p) in pdv.iter().enumerate() {
        let t = lds.transition(idx + 1);
        for x in 1..=n {
            out.add(t.col(x), x, p.clone());
        }
    }
    Ok(StochasticMatrix(out))
}

/// Witnesses for whichever verdicts failed.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessSet {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub robust: Option<Witness>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub uniform: Option<Witness>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub asymptotic_ratio_one: Option<Witness>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub finite_time_ratio_one: Option<Witness>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub robust_wrt_lris: Option<Witness>,
}

/// Consolidated verdicts for one system and target set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub robust: bool,
    pub uniform: bool,
    pub asymptotic_ratio_one: bool,
    pub finite_time_ratio_one: bool,
    /// Self-reachable states, ascending.
    pub self_reachable: Vec<usize>,
    /// Largest robustly invariant subset of the target, ascending.
    pub lris: Vec<usize>,
    /// Robust stability taking that subset itself as the reference set.
    pub robust_wrt_lris: bool,
    pub witnesses: WitnessSet,
}

/// The implications that must hold between verdicts of one report; all of
/// them are theorems, so a false flag means an implementation bug.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConsistencyFlags {
    pub uniform_implies_robust: bool,
    pub robust_implies_asymptotic: bool,
    pub uniform_iff_finite_time: bool,
    pub uniform_iff_robust_wrt_lris: bool,
}

impl ConsistencyFlags {
    pub fn all_hold(&self) -> bool {
        self.uniform_implies_robust
            && self.robust_implies_asymptotic
            && self.uniform_iff_finite_time
            && self.uniform_iff_robust_wrt_lris
    }
}

impl StabilityReport {
    pub fn consistency(&self) -> ConsistencyFlags {
        ConsistencyFlags {
            uniform_implies_robust: !self.uniform || self.robust,
            robust_implies_asymptotic: !self.robust || self.asymptotic_ratio_one,
            uniform_iff_finite_time: self.uniform == self.finite_time_ratio_one,
            uniform_iff_robust_wrt_lris: self.uniform == self.robust_wrt_lris,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Run every decider over one shared reachability closure and package the
/// verdicts with their witnesses.
pub fn analyze(lds: &Lds, target: &StateSet) -> Result<StabilityReport> {
    check_universe(lds, target);
    let r = reachability_matrix_bool(lds);
    let c0 = diagonal_set(lds.state_count(), &r);
    let core = lris(lds, target);
    let robust = robust_verdict(lds, target, &r);
    let uniform = uniform_verdict(lds, target, &r, &c0);
    let asymptotic = asymptotic_verdict(lds, &core, &r);
    let finite_time = finite_time_verdict(lds, target, &r, &c0, &core)?;
    let robust_wrt_lris = robust_verdict(lds, &core, &r);
    Ok(StabilityReport {
        robust: robust.holds,
        uniform: uniform.holds,
        asymptotic_ratio_one: asymptotic.holds,
        finite_time_ratio_one: finite_time.holds,
        self_reachable: c0.indices(),
        lris: core.indices(),
        robust_wrt_lris: robust_wrt_lris.holds,
        witnesses: WitnessSet {
            robust: robust.witness,
            uniform: uniform.witness,
            asymptotic_ratio_one: asymptotic.witness,
            finite_time_ratio_one: finite_time.witness,
            robust_wrt_lris: robust_wrt_lris.witness,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lds::parse_network;

    fn fixture(text: &str) -> (Lds, StateSet) {
        let net = parse_network(text).unwrap();
        let target = net.target.clone().unwrap();
        (net.lds, target)
    }

    fn rational(num: i64, den: i64) -> BigRational {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    #[test]
    fn e1_is_robust_but_not_uniform() {
        let (lds, target) = fixture(crate::fixtures::E1);
        let robust = is_robustly_stable(&lds, &target);
        assert!(robust.holds);
        assert!(robust.witness.is_none());
        let uniform = is_uniformly_robustly_stable(&lds, &target);
        assert!(!uniform.holds);
        let w = uniform.witness.unwrap();
        assert_eq!(w.kind, WitnessKind::ComplementReachableFromC0);
        assert_eq!(w.states, vec![3, 5]);
        assert_eq!(w.path.unwrap().to_string(), "3 -(2)-> 5");
        assert!(is_asymptotically_ratio_one(&lds, &target).holds);
        assert!(!is_finite_time_ratio_one(&lds, &target).unwrap().holds);
    }

    #[test]
    fn e2_satisfies_everything() {
        let (lds, target) = fixture(crate::fixtures::E2);
        assert!(is_robustly_stable(&lds, &target).holds);
        assert!(is_uniformly_robustly_stable(&lds, &target).holds);
        assert!(is_asymptotically_ratio_one(&lds, &target).holds);
        assert!(is_finite_time_ratio_one(&lds, &target).unwrap().holds);
    }

    #[test]
    fn e3_fails_robustness_with_the_short_loop() {
        let (lds, target) = fixture(crate::fixtures::E3);
        let robust = is_robustly_stable(&lds, &target);
        assert!(!robust.holds);
        let w = robust.witness.unwrap();
        assert_eq!(w.kind, WitnessKind::SelfReachableInComplement);
        assert_eq!(w.states, vec![2]);
        assert_eq!(w.path.unwrap().to_string(), "2 -(1)-> 3 -(1)-> 2");
        assert!(is_asymptotically_ratio_one(&lds, &target).holds);
    }

    #[test]
    fn asymptotic_fails_with_an_unreachable_or_empty_core() {
        // two states, two fixed points; target {1} is invariant but state 2
        // never reaches it
        let lds = Lds::new(
            2,
            vec![crate::stp::LogicMatrix::new(2, vec![1, 2]).unwrap()],
        )
        .unwrap();
        let verdict = is_asymptotically_ratio_one(&lds, &StateSet::new(2, vec![1]).unwrap());
        assert!(!verdict.holds);
        let w = verdict.witness.unwrap();
        assert_eq!(w.kind, WitnessKind::NoPathToLris);
        assert_eq!(w.states, vec![2]);
        // an empty target has an empty core; the first state witnesses it
        let verdict = is_asymptotically_ratio_one(&lds, &StateSet::empty(2));
        assert!(!verdict.holds);
        assert_eq!(verdict.witness.unwrap().states, vec![1]);
    }

    #[test]
    fn ratios_match_hand_counted_words() {
        let (lds, target) = fixture(crate::fixtures::E1);
        // from state 1: one step reaches {2, 5}, neither in the target
        assert_eq!(ratio(&lds, 1, &target, 1).unwrap(), BigRational::zero());
        // two steps reach 3, 5, 8, 6; words (1,2) lands on 5 outside
        assert_eq!(ratio(&lds, 1, &target, 2).unwrap(), rational(3, 4));
        // from state 6 everything stays inside {6, 7}
        assert!(ratio(&lds, 6, &target, 5).unwrap().is_one());
        assert!(ratio(&lds, 9, &target, 1).is_err());
    }

    #[test]
    fn ratio_vector_shares_the_power() {
        let (lds, target) = fixture(crate::fixtures::E2);
        for k in [1, 3, 7] {
            let v = ratio_vector(&lds, &target, k);
            assert_eq!(v.k(), k);
            for x0 in 1..=8 {
                assert_eq!(*v.value(x0), ratio(&lds, x0, &target, k).unwrap());
            }
        }
    }

    #[test]
    fn e2_ratios_saturate_for_the_invariant_core() {
        let (lds, target) = fixture(crate::fixtures::E2);
        let core = lris(&lds, &target);
        let k = first_saturation_step(&lds, &core, 16).expect("e2 absorbs everything");
        assert!(k <= 16);
        assert!(ratio_vector(&lds, &core, k).all_one());
        if k > 1 {
            assert!(!ratio_vector(&lds, &core, k - 1).all_one());
        }
        // e1 never saturates: state 5 outside the core is reachable forever
        let (e1, m1) = fixture(crate::fixtures::E1);
        let core1 = lris(&e1, &m1);
        assert_eq!(first_saturation_step(&e1, &core1, 32), None);
    }

    #[test]
    fn tpm_is_column_stochastic_and_uniform_case_matches_counts() {
        let (lds, _) = fixture(crate::fixtures::E1);
        let uniform = vec![rational(1, 2), rational(1, 2)];
        let tpm = pls_tpm(&lds, &uniform).unwrap();
        let q = crate::reach::count_matrix(&lds);
        for j in 1..=8 {
            let mut sum = BigRational::zero();
            for i in 1..=8 {
                sum += tpm.entry(i, j);
                let scaled = tpm.entry(i, j) * BigRational::from_integer(BigInt::from(2));
                assert_eq!(
                    scaled,
                    BigRational::from_integer(BigInt::from(q.entry(i, j).clone()))
                );
            }
            assert!(sum.is_one(), "column {j} sums to {sum}");
        }
        // a skewed distribution keeps the pattern
        let skewed = vec![rational(1, 4), rational(3, 4)];
        let tpm2 = pls_tpm(&lds, &skewed).unwrap();
        for i in 1..=8 {
            for j in 1..=8 {
                assert_eq!(tpm.entry(i, j).is_zero(), tpm2.entry(i, j).is_zero());
            }
        }
    }

    #[test]
    fn tpm_rejects_bad_distributions() {
        let (lds, _) = fixture(crate::fixtures::E1);
        let cases = [
            vec![rational(1, 2)],
            vec![rational(1, 2), rational(1, 3)],
            vec![rational(3, 2), rational(-1, 2)],
            vec![rational(1, 1), rational(0, 1)],
        ];
        for pdv in cases {
            assert!(matches!(
                pls_tpm(&lds, &pdv),
                Err(Error::InvalidDistribution(_))
            ));
        }
    }

    #[test]
    fn analyze_packages_consistent_reports() {
        let (lds, target) = fixture(crate::fixtures::E1);
        let report = analyze(&lds, &target).unwrap();
        assert!(report.robust);
        assert!(!report.uniform);
        assert!(report.asymptotic_ratio_one);
        assert!(!report.finite_time_ratio_one);
        assert_eq!(report.self_reachable, vec![3, 4, 6, 7]);
        assert_eq!(report.lris, vec![6, 7, 8]);
        assert!(!report.robust_wrt_lris);
        assert!(report.witnesses.robust.is_none());
        assert!(report.witnesses.uniform.is_some());
        assert!(report.consistency().all_hold());
    }

    #[test]
    fn report_json_round_trips() {
        let (lds, target) = fixture(crate::fixtures::E3);
        let report = analyze(&lds, &target).unwrap();
        let json = report.to_json();
        assert_eq!(StabilityReport::from_json(&json).unwrap(), report);
        // kind strings are stable across the wire
        assert!(json.contains("\"self-reachable-in-complement\""));
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(value["robust"], serde_json::Value::Bool(false));
        assert_eq!(value["witnesses"]["robust"]["states"][0], 2);
    }
}
