//! Acceptance gate: one test per criterion, each printing its own
//! pass line. The first four pin the worked examples; the rest are
//! oracle and property checks over seeded random systems.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use ldstab::invariant::{lris, lris_bruteforce};
use ldstab::lds::Lds;
use ldstab::oracle::{monte_carlo_ratio, verify_counts, Xorshift64Star};
use ldstab::reach::{count_matrix, reachability_matrix_weighted};
use ldstab::stability::{
    analyze, first_saturation_step, is_robustly_stable, is_uniformly_robustly_stable, ratio,
    ratio_vector, WitnessKind,
};
use ldstab::stp::LogicMatrix;
use ldstab::{parse_network, StateSet};

fn fixture(text: &str) -> (Lds, StateSet) {
    let net = parse_network(text).unwrap();
    let target = net.target.unwrap();
    (net.lds, target)
}

fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Random system with n in 1..=n_max states and m in 1..=m_max subnetworks.
fn random_lds(rng: &mut Xorshift64Star, n_max: usize, m_max: usize) -> Lds {
    let n = rng.next_index(n_max);
    let m = rng.next_index(m_max);
    let maps = (0..m)
        .map(|_| {
            let cols = (0..n).map(|_| rng.next_index(n)).collect();
            LogicMatrix::new(n, cols).unwrap()
        })
        .collect();
    Lds::new(n, maps).unwrap()
}

/// Random nonempty target over 1..=n, by independent coin flips per state.
fn random_target(rng: &mut Xorshift64Star, n: usize) -> StateSet {
    let mut members: Vec<usize> = (1..=n).filter(|_| rng.next_index(2) == 1).collect();
    if members.is_empty() {
        members.push(rng.next_index(n));
    }
    StateSet::new(n, members).unwrap()
}

#[test]
fn c01_example_1_verdicts_and_sets() {
    let (lds, target) = fixture(ldstab::fixtures::E1);
    let report = analyze(&lds, &target).unwrap();
    assert!(report.robust);
    assert!(!report.uniform);
    assert!(report.asymptotic_ratio_one);
    assert!(!report.finite_time_ratio_one);
    assert_eq!(report.self_reachable, vec![3, 4, 6, 7]);
    assert_eq!(report.lris, vec![6, 7, 8]);
    assert!(!report.robust_wrt_lris);
    println!("criterion 1 (example 1 verdicts and sets): PASS");
}

#[test]
fn c02_example_1_weighted_reachability_matrix() {
    let (lds, _) = fixture(ldstab::fixtures::E1);
    let r = reachability_matrix_weighted(&lds);
    // entries in hundredths, row-major
    let printed: [[i64; 8]; 8] = [
        [0, 0, 0, 0, 0, 0, 0, 0],
        [50, 0, 0, 0, 0, 0, 0, 0],
        [47, 94, 94, 188, 0, 0, 0, 0],
        [22, 47, 94, 94, 0, 0, 0, 0],
        [97, 97, 94, 94, 0, 0, 0, 0],
        [206, 198, 184, 151, 278, 245, 278, 278],
        [330, 318, 288, 230, 472, 555, 522, 522],
        [48, 47, 47, 44, 50, 0, 0, 0],
    ];
    let tolerance = rational(5, 1000);
    for i in 1..=8 {
        for j in 1..=8 {
            let diff = (r.entry(i, j) - rational(printed[i - 1][j - 1], 100)).abs();
            assert!(
                diff <= tolerance,
                "entry ({i}, {j}) is {}, printed {}",
                r.entry(i, j),
                printed[i - 1][j - 1]
            );
        }
    }
    println!("criterion 2 (example 1 weighted reachability matrix): PASS");
}

#[test]
fn c03_example_2_verdicts_and_sets() {
    let (lds, target) = fixture(ldstab::fixtures::E2);
    let report = analyze(&lds, &target).unwrap();
    assert!(report.robust);
    assert!(report.uniform);
    assert!(report.asymptotic_ratio_one);
    assert!(report.finite_time_ratio_one);
    assert_eq!(report.self_reachable, vec![6, 7]);
    assert_eq!(report.lris, vec![6, 7, 8]);
    assert!(report.robust_wrt_lris);
    println!("criterion 3 (example 2 verdicts and sets): PASS");
}

#[test]
fn c04_example_3_verdicts_and_witness_loop() {
    let (lds, target) = fixture(ldstab::fixtures::E3);
    let report = analyze(&lds, &target).unwrap();
    assert!(!report.robust);
    assert!(report.asymptotic_ratio_one);
    assert_eq!(report.self_reachable, vec![2, 3, 6, 7]);
    assert_eq!(report.lris, vec![4, 6, 7, 8]);
    let witness = report.witnesses.robust.unwrap();
    assert_eq!(witness.kind, WitnessKind::SelfReachableInComplement);
    assert_eq!(witness.states, vec![2]);
    assert_eq!(witness.path.unwrap().to_string(), "2 -(1)-> 3 -(1)-> 2");
    println!("criterion 4 (example 3 verdicts and witness loop): PASS");
}

#[test]
fn c05_enumeration_matches_matrix_powers() {
    for text in [
        ldstab::fixtures::E1,
        ldstab::fixtures::E2,
        ldstab::fixtures::E3,
    ] {
        let (lds, _) = fixture(text);
        for k in 1..=6 {
            let report = verify_counts(&lds, k).unwrap();
            assert!(
                report.equal,
                "fixture mismatch at k={k}: {:?}",
                report.first_mismatch
            );
        }
    }
    let mut rng = Xorshift64Star::new(0xACC5);
    for case in 0..100 {
        let lds = random_lds(&mut rng, 6, 3);
        for k in 1..=6 {
            let report = verify_counts(&lds, k).unwrap();
            assert!(
                report.equal,
                "case {case} mismatch at k={k}: {:?}",
                report.first_mismatch
            );
        }
    }
    println!("criterion 5 (pattern enumeration vs matrix powers): PASS");
}

#[test]
fn c06_lris_matches_bruteforce() {
    let mut rng = Xorshift64Star::new(0xACC6);
    for case in 0..100 {
        let lds = random_lds(&mut rng, 12, 3);
        let target = random_target(&mut rng, lds.state_count());
        let fast = lris(&lds, &target);
        let slow = lris_bruteforce(&lds, &target).unwrap();
        assert_eq!(fast, slow, "case {case} disagrees on target {target}");
    }
    println!("criterion 6 (shrinking fixpoint vs subset enumeration): PASS");
}

#[test]
fn c07_implication_lattice_never_breaks() {
    let mut rng = Xorshift64Star::new(0xACC7);
    for case in 0..300 {
        // every third case pins a singleton target, every third a single
        // subnetwork, so both special equivalences get real coverage
        let lds = if case % 3 == 1 {
            random_lds(&mut rng, 10, 1)
        } else {
            random_lds(&mut rng, 10, 3)
        };
        let n = lds.state_count();
        let target = if case % 3 == 0 {
            StateSet::new(n, [rng.next_index(n)]).unwrap()
        } else {
            random_target(&mut rng, n)
        };

        let report = analyze(&lds, &target).unwrap();
        let flags = report.consistency();
        assert!(flags.all_hold(), "case {case} broke the lattice: {flags:?}");

        // uniform w.r.t. the target, robust w.r.t. its invariant core, and
        // uniform w.r.t. that core are one and the same property
        let core = lris(&lds, &target);
        let uniform_m = is_uniformly_robustly_stable(&lds, &target).holds;
        let robust_core = is_robustly_stable(&lds, &core).holds;
        let uniform_core = is_uniformly_robustly_stable(&lds, &core).holds;
        assert_eq!(uniform_m, robust_core, "case {case}");
        assert_eq!(uniform_m, uniform_core, "case {case}");

        if target.len() == 1 || lds.subnetwork_count() == 1 {
            assert_eq!(report.robust, report.uniform, "case {case}");
        }
    }
    println!("criterion 7 (implication lattice on 300 random systems): PASS");
}

#[test]
fn c08_column_stochasticity_and_ratio_bounds() {
    let mut systems: Vec<(Lds, StateSet)> = [
        ldstab::fixtures::E1,
        ldstab::fixtures::E2,
        ldstab::fixtures::E3,
    ]
    .iter()
    .map(|text| fixture(text))
    .collect();
    let mut rng = Xorshift64Star::new(0xACC8);
    for _ in 0..20 {
        let lds = random_lds(&mut rng, 8, 3);
        let target = random_target(&mut rng, lds.state_count());
        systems.push((lds, target));
    }
    for (lds, target) in &systems {
        let m = BigUint::from(lds.subnetwork_count());
        let q = count_matrix(lds);
        let mut power = q.clone();
        for k in 1..=8u32 {
            let words = m.pow(k);
            for j in 1..=lds.state_count() {
                assert_eq!(power.column_sum(j), words, "column {j} at k={k}");
            }
            power = power.mul(&q);
        }
        for k in 1..=16 {
            for value in ratio_vector(lds, target, k).values() {
                assert!(*value >= BigRational::zero() && *value <= BigRational::one());
            }
        }
    }
    println!("criterion 8 (exact column stochasticity and ratio bounds): PASS");
}

#[test]
fn c09_ratios_into_the_invariant_core_never_decrease() {
    for (name, text) in [
        ("e1", ldstab::fixtures::E1),
        ("e2", ldstab::fixtures::E2),
        ("e3", ldstab::fixtures::E3),
    ] {
        let (lds, target) = fixture(text);
        let core = lris(&lds, &target);
        let mut previous: Option<Vec<BigRational>> = None;
        for k in 1..=64 {
            let current = ratio_vector(&lds, &core, k).values().to_vec();
            if let Some(prev) = &previous {
                for (x0, (now, before)) in current.iter().zip(prev).enumerate() {
                    assert!(
                        now >= before,
                        "{name}: ratio from state {} fell between k={} and k={k}",
                        x0 + 1,
                        k - 1
                    );
                }
            }
            previous = Some(current);
        }
        if name == "e2" {
            let saturation = first_saturation_step(&lds, &core, 64)
                .expect("every e2 state absorbs into the core");
            assert!(saturation <= 16, "e2 saturates at k={saturation}");
            println!("criterion 9: e2 ratios reach one for every state at k={saturation}");
        }
    }
    println!("criterion 9 (monotone absorption into the invariant core): PASS");
}

#[test]
fn c10_monte_carlo_agrees_with_exact_ratios() {
    let (lds, target) = fixture(ldstab::fixtures::E3);
    for x0 in [1, 5] {
        let exact = ratio(&lds, x0, &target, 20).unwrap();
        let estimate = monte_carlo_ratio(&lds, x0, &target, 20, 10_000, 2026).unwrap();
        let gap = (estimate.estimate.clone() - &exact).abs().to_f64().unwrap();
        assert!(
            gap <= 3.0 * estimate.std_error,
            "x0={x0}: estimate {} vs exact {exact} (gap {gap}, 3se {})",
            estimate.estimate,
            3.0 * estimate.std_error
        );
    }
    println!("criterion 10 (Monte Carlo within three standard errors): PASS");
}
