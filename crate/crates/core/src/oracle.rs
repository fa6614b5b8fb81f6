//! Independent verification of the matrix machinery: explicit enumeration of
//! every switching pattern, and seeded Monte Carlo simulation under i.i.d.
//! random switching.
//!
//! Nothing here touches the count-matrix algebra beyond comparing against
//! it, so agreement between the two routes is meaningful evidence.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::lds::{Lds, Trajectory};
use crate::reach::{count_matrix_power, CountMatrix};
use crate::set::StateSet;
use crate::stability::validate_pdv;

/// Deterministic xorshift64* generator: state update
/// `x ^= x >> 12; x ^= x << 25; x ^= x >> 27`, output `x * 0x2545F4914F6CDD1D`
/// (wrapping). A zero seed is replaced by 0x9E3779B97F4A7C15, since the
/// all-zero state is a fixed point of the recurrence. The algorithm is part
/// of this crate's contract so that seeded runs reproduce bit for bit on any
/// platform or reimplementation.
#[derive(Debug, Clone)]
pub struct Xorshift64Star {
    state: u64,
}

impl Xorshift64Star {
    pub fn new(seed: u64) -> Self {
        Xorshift64Star {
            state: if seed == 0 {
                0x9E37_79B9_7F4A_7C15
            } else {
                seed
            },
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.state;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.state = x;
        x.wrapping_mul(0x2545_F491_4F6C_DD1D)
    }

    /// Uniform-ish index in [1..bound] by the multiply-high trick. The bias
    /// is at most bound/2^64, far below anything the tests could observe.
    pub fn next_index(&mut self, bound: usize) -> usize {
        assert!(bound >= 1);
        ((self.next_u64() as u128 * bound as u128) >> 64) as usize + 1
    }
}

/// Cumulative sums of a validated distribution; the last entry is exactly 1.
fn cumulative_sums(pdv: &[BigRational]) -> Vec<BigRational> {
    let mut acc = BigRational::zero();
    pdv.iter()
        .map(|p| {
            acc += p;
            acc.clone()
        })
        .collect()
}

/// Draw a 1-based index from a finite distribution given its cumulative
/// sums: the draw becomes the exact rational u = draw / 2^64 in [0, 1), and
/// the first index whose cumulative weight exceeds u wins.
fn sample_index(rng: &mut Xorshift64Star, cumulative: &[BigRational]) -> usize {
    let u = BigRational::new(BigInt::from(rng.next_u64()), BigInt::one() << 64);
    for (idx, bound) in cumulative.iter().enumerate() {
        if u < *bound {
            return idx + 1;
        }
    }
    // u < 1 and the last cumulative sum is exactly 1, so the loop returns
    unreachable!("cumulative sums must end at 1")
}

/// Default cap on the number of switching patterns enumerated per initial
/// state.
pub const DEFAULT_PATTERN_CAP: u128 = 10_000_000;

/// Count, for every (initial, final) state pair, the length-k switching
/// words connecting them, by running each word rather than by any matrix
/// algebra. Lexicographic depth-first over the word tree, reusing the
/// shared prefix of consecutive words, so the work is one map application
/// per word-tree edge.
pub fn enumerate_pattern_counts(lds: &Lds, k: usize) -> Result<CountMatrix> {
    enumerate_pattern_counts_capped(lds, k, DEFAULT_PATTERN_CAP)
}

/// `enumerate_pattern_counts` with an explicit cap on m^k.
pub fn enumerate_pattern_counts_capped(lds: &Lds, k: usize, cap: u128) -> Result<CountMatrix> {
    assert!(k >= 1, "the word length must be at least 1");
    let m = lds.subnetwork_count();
    let words = u32::try_from(k)
        .ok()
        .and_then(|k| (m as u128).checked_pow(k))
        .unwrap_or(u128::MAX);
    if words > cap {
        return Err(Error::CapExceeded {
            what: "switching-pattern enumeration",
            required: words,
            cap,
        });
    }
    let n = lds.state_count();
    let mut counts = vec![0u64; n * n];
    for x0 in 1..=n {
        let mut states = vec![x0; k + 1];
        let mut choice = vec![1usize; k];
        let mut depth = 0;
        'words: loop {
            while depth < k {
                states[depth + 1] = lds.step_unchecked(states[depth], choice[depth]);
                depth += 1;
            }
            counts[(states[k] - 1) * n + (x0 - 1)] += 1;
            loop {
                if depth == 0 {
                    break 'words;
                }
                depth -= 1;
                if choice[depth] < m {
                    choice[depth] += 1;
                    break;
                }
                choice[depth] = 1;
            }
        }
    }
    let mut out = CountMatrix::zeros(n);
    for i in 1..=n {
        for j in 1..=n {
            let c = counts[(i - 1) * n + (j - 1)];
            if c > 0 {
                out.set(i, j, BigUint::from(c));
            }
        }
    }
    Ok(out)
}

/// First disagreeing entry between the two counting routes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub row: usize,
    pub col: usize,
    pub enumerated: BigUint,
    pub matrix_power: BigUint,
}

/// Entrywise comparison of enumerated counts against the k-th matrix power.
#[derive(Debug, Clone)]
pub struct OracleReport {
    pub k: usize,
    pub enumerated: CountMatrix,
    pub matrix_power: CountMatrix,
    pub equal: bool,
    pub first_mismatch: Option<Mismatch>,
}

/// Run both counting routes at word length k and compare every entry.
pub fn verify_counts(lds: &Lds, k: usize) -> Result<OracleReport> {
    verify_counts_capped(lds, k, DEFAULT_PATTERN_CAP)
}

/// `verify_counts` with an explicit cap on m^k.
pub fn verify_counts_capped(lds: &Lds, k: usize, cap: u128) -> Result<OracleReport> {
    let enumerated = enumerate_pattern_counts_capped(lds, k, cap)?;
    let matrix_power = count_matrix_power(lds, k);
    let n = lds.state_count();
    let mut first_mismatch = None;
    'scan: for i in 1..=n {
        for j in 1..=n {
            if enumerated.entry(i, j) != matrix_power.entry(i, j) {
                first_mismatch = Some(Mismatch {
                    row: i,
                    col: j,
                    enumerated: enumerated.entry(i, j).clone(),
                    matrix_power: matrix_power.entry(i, j).clone(),
                });
                break 'scan;
            }
        }
    }
    Ok(OracleReport {
        k,
        equal: first_mismatch.is_none(),
        first_mismatch,
        enumerated,
        matrix_power,
    })
}

/// Run one trajectory under i.i.d. random switching drawn from `pdv` with
/// the seeded generator; equal seeds give equal trajectories.
pub fn simulate_random(
    lds: &Lds,
    x0: usize,
    pdv: &[BigRational],
    horizon: usize,
    seed: u64,
) -> Result<Trajectory> {
    validate_pdv(lds.subnetwork_count(), pdv)?;
    if x0 < 1 || x0 > lds.state_count() {
        return Err(Error::IndexOutOfRange {
            what: "state",
            index: x0,
            bound: lds.state_count(),
        });
    }
    let cumulative = cumulative_sums(pdv);
    let mut rng = Xorshift64Star::new(seed);
    let mut states = Vec::with_capacity(horizon + 1);
    states.push(x0);
    let mut x = x0;
    for _ in 0..horizon {
        x = lds.step_unchecked(x, sample_index(&mut rng, &cumulative));
        states.push(x);
    }
    Ok(Trajectory::from_states(states))
}

/// Monte Carlo estimate of a k-step reachable-pattern ratio.
#[derive(Debug, Clone)]
pub struct MonteCarloEstimate {
    pub hits: u64,
    pub samples: u64,
    /// hits / samples, exact.
    pub estimate: BigRational,
    /// Binomial standard error sqrt(p(1-p)/samples) of the estimate.
    pub std_error: f64,
}

/// Estimate the k-step reachable-pattern ratio from `x0` into `target` by
/// sampling switching words uniformly. The estimate converges on the exact
/// `ratio` value: a uniformly sampled word is a uniformly sampled pattern.
pub fn monte_carlo_ratio(
    lds: &Lds,
    x0: usize,
    target: &StateSet,
    k: usize,
    samples: u64,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    assert_eq!(
        target.universe_size(),
        lds.state_count(),
        "target universe must match the system"
    );
    if k == 0 || samples == 0 {
        return Err(Error::InvalidArgument(
            "both the step count and the sample count must be at least 1".into(),
        ));
    }
    if x0 < 1 || x0 > lds.state_count() {
        return Err(Error::IndexOutOfRange {
            what: "state",
            index: x0,
            bound: lds.state_count(),
        });
    }
    let m = lds.subnetwork_count();
    let uniform = vec![BigRational::new(BigInt::one(), BigInt::from(m)); m];
    let cumulative = cumulative_sums(&uniform);
    let mut rng = Xorshift64Star::new(seed);
    let mut hits = 0u64;
    for _ in 0..samples {
        let mut x = x0;
        for _ in 0..k {
            x = lds.step_unchecked(x, sample_index(&mut rng, &cumulative));
        }
        if target.contains(x) {
            hits += 1;
        }
    }
    let p = hits as f64 / samples as f64;
    Ok(MonteCarloEstimate {
        hits,
        samples,
        estimate: BigRational::new(BigInt::from(hits), BigInt::from(samples)),
        std_error: (p * (1.0 - p) / samples as f64).sqrt(),
    })
}
