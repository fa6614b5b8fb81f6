//! Reachability machinery: the exact pattern-count matrix and its powers,
//! the Boolean reachability closure, self-reachable states, shortest labeled
//! paths, and DOT export of the state transition graph.

use std::collections::BTreeMap;
use std::fmt;
use std::fmt::Write as _;

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lds::Lds;
use crate::set::StateSet;

/// Square matrix of exact pattern counts: entry (i, j) of the k-th power of
/// the one-step matrix is the number of length-k switching words driving
/// state j to state i.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountMatrix {
    n: usize,
    entries: Vec<BigUint>,
}

impl CountMatrix {
    pub fn zeros(n: usize) -> Self {
        assert!(n >= 1);
        CountMatrix {
            n,
            entries: vec![BigUint::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.entries[i * n + i] = BigUint::one();
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Entry at 1-based (i, j).
    pub fn entry(&self, i: usize, j: usize) -> &BigUint {
        assert!((1..=self.n).contains(&i) && (1..=self.n).contains(&j));
        &self.entries[(i - 1) * self.n + (j - 1)]
    }

    pub(crate) fn set(&mut self, i: usize, j: usize, value: BigUint) {
        self.entries[(i - 1) * self.n + (j - 1)] = value;
    }

    fn add_one(&mut self, i: usize, j: usize) {
        self.entries[(i - 1) * self.n + (j - 1)] += 1u32;
    }

    pub fn mul(&self, other: &CountMatrix) -> CountMatrix {
        assert_eq!(self.n, other.n, "dimensions must agree");
        let n = self.n;
        let mut out = CountMatrix::zeros(n);
        for i in 0..n {
            for l in 0..n {
                let a = &self.entries[i * n + l];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = &other.entries[l * n + j];
                    if b.is_zero() {
                        continue;
                    }
                    out.entries[i * n + j] += a * b;
                }
            }
        }
        out
    }

    /// k-th power by binary exponentiation; the 0-th power is the identity.
    pub fn pow(&self, k: usize) -> CountMatrix {
        let mut result = CountMatrix::identity(self.n);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Sum of column j (1-based). For the k-th power of the one-step matrix
    /// this is exactly m^k: every switching word sends j somewhere.
    pub fn column_sum(&self, j: usize) -> BigUint {
        assert!((1..=self.n).contains(&j));
        let mut sum = BigUint::zero();
        for i in 0..self.n {
            sum += &self.entries[i * self.n + (j - 1)];
        }
        sum
    }

    /// Zero/nonzero pattern as a bit matrix.
    pub fn pattern(&self) -> BoolMatrix {
        let mut out = BoolMatrix::zeros(self.n);
        for i in 1..=self.n {
            for j in 1..=self.n {
                if !self.entry(i, j).is_zero() {
                    out.set(i, j);
                }
            }
        }
        out
    }
}

/// One-step pattern counts: the entrywise sum of the subnetwork transition
/// matrices. Entry (y, x) counts the subnetworks sending x to y, so every
/// column sums to m.
pub fn count_matrix(lds: &Lds) -> CountMatrix {
    let n = lds.state_count();
    let mut q = CountMatrix::zeros(n);
    for j in 1..=lds.subnetwork_count() {
        for x in 1..=n {
            q.add_one(lds.step_unchecked(x, j), x);
        }
    }
    q
}

/// Exact k-th power of the one-step pattern counts.
pub fn count_matrix_power(lds: &Lds, k: usize) -> CountMatrix {
    assert!(k >= 1, "the power must be at least 1");
    count_matrix(lds).pow(k)
}

/// Square bit matrix, one u64 word block per row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoolMatrix {
    n: usize,
    words_per_row: usize,
    words: Vec<u64>,
}

impl BoolMatrix {
    pub fn zeros(n: usize) -> Self {
        assert!(n >= 1);
        let words_per_row = n.div_ceil(64);
        BoolMatrix {
            n,
            words_per_row,
            words: vec![0; n * words_per_row],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Bit at 1-based (i, j).
    pub fn get(&self, i: usize, j: usize) -> bool {
        assert!((1..=self.n).contains(&i) && (1..=self.n).contains(&j));
        let (i, j) = (i - 1, j - 1);
        self.words[i * self.words_per_row + j / 64] >> (j % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, j: usize) {
        assert!((1..=self.n).contains(&i) && (1..=self.n).contains(&j));
        let (i, j) = (i - 1, j - 1);
        self.words[i * self.words_per_row + j / 64] |= 1 << (j % 64);
    }

    /// Merge `other` into `self`; reports whether any bit was new.
    fn or_assign(&mut self, other: &BoolMatrix) -> bool {
        assert_eq!(self.n, other.n);
        let mut changed = false;
        for (w, &o) in self.words.iter_mut().zip(&other.words) {
            let merged = *w | o;
            changed |= merged != *w;
            *w = merged;
        }
        changed
    }

    /// Boolean matrix product: row i of the result is the word-wise OR of
    /// the rows of `other` selected by the set bits of row i of `self`.
    pub fn mul(&self, other: &BoolMatrix) -> BoolMatrix {
        assert_eq!(self.n, other.n, "dimensions must agree");
        let mut out = BoolMatrix::zeros(self.n);
        let wpr = self.words_per_row;
        for i in 0..self.n {
            for jw in 0..wpr {
                let mut bits = self.words[i * wpr + jw];
                while bits != 0 {
                    let j = jw * 64 + bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    let (dst, src) = (i * wpr, j * wpr);
                    for w in 0..wpr {
                        out.words[dst + w] |= other.words[src + w];
                    }
                }
            }
        }
        out
    }
}

/// Boolean reachability closure: bit (i, j) set iff state i is reachable
/// from state j in at least one and at most n steps. Accumulates powers of
/// the one-step pattern in the Boolean semiring, stopping early once a power
/// adds no new pairs; monotonicity of the Boolean product guarantees no
/// later power can add any either.
pub fn reachability_matrix_bool(lds: &Lds) -> BoolMatrix {
    let step = count_matrix(lds).pattern();
    let mut reach = step.clone();
    let mut power = step.clone();
    for _ in 2..=lds.state_count() {
        power = power.mul(&step);
        if !reach.or_assign(&power) {
            break;
        }
    }
    reach
}

/// Square matrix of exact rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    n: usize,
    entries: Vec<BigRational>,
}

impl RationalMatrix {
    pub fn zeros(n: usize) -> Self {
        assert!(n >= 1);
        RationalMatrix {
            n,
            entries: vec![BigRational::zero(); n * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Entry at 1-based (i, j).
    pub fn entry(&self, i: usize, j: usize) -> &BigRational {
        assert!((1..=self.n).contains(&i) && (1..=self.n).contains(&j));
        &self.entries[(i - 1) * self.n + (j - 1)]
    }

    pub(crate) fn add(&mut self, i: usize, j: usize, value: BigRational) {
        self.entries[(i - 1) * self.n + (j - 1)] += value;
    }
}

/// Exact weighted reachability matrix: the sum over k in [1..n] of the k-th
/// power of (one-step counts / m). Diagnostic companion of the Boolean
/// closure; positive entries of one are exactly the set bits of the other.
pub fn reachability_matrix_weighted(lds: &Lds) -> RationalMatrix {
    reachability_matrix_weighted_upto(lds, lds.state_count())
}

/// The same sum truncated after `k_max` powers. Truncation depth changes
/// the magnitudes but, from depth n on, never the zero/nonzero pattern.
pub fn reachability_matrix_weighted_upto(lds: &Lds, k_max: usize) -> RationalMatrix {
    let n = lds.state_count();
    let q = count_matrix(lds);
    let m = BigInt::from(lds.subnetwork_count());
    let mut out = RationalMatrix::zeros(n);
    let mut power = CountMatrix::identity(n);
    let mut denom = BigInt::one();
    for _ in 1..=k_max {
        power = power.mul(&q);
        denom = &denom * &m;
        for i in 1..=n {
            for j in 1..=n {
                let c = power.entry(i, j);
                if !c.is_zero() {
                    out.add(
                        i,
                        j,
                        BigRational::new(BigInt::from(c.clone()), denom.clone()),
                    );
                }
            }
        }
    }
    out
}

/// States lying on at least one loop: the positive diagonal of the
/// reachability closure.
pub fn self_reachable_set(lds: &Lds) -> StateSet {
    let r = reachability_matrix_bool(lds);
    diagonal_set(lds.state_count(), &r)
}

pub(crate) fn diagonal_set(n: usize, r: &BoolMatrix) -> StateSet {
    StateSet::new(n, (1..=n).filter(|&i| r.get(i, i))).expect("diagonal indices are in range")
}

/// Whether `to` is reachable from `from`; with `k` given, in exactly k steps
/// (k must be at least 1).
pub fn is_reachable(lds: &Lds, from: usize, to: usize, k: Option<usize>) -> Result<bool> {
    let n = lds.state_count();
    for (what, idx) in [("source state", from), ("destination state", to)] {
        if idx < 1 || idx > n {
            return Err(Error::IndexOutOfRange {
                what,
                index: idx,
                bound: n,
            });
        }
    }
    Ok(match k {
        Some(k) => {
            assert!(k >= 1, "step count must be at least 1");
            !count_matrix_power(lds, k).entry(to, from).is_zero()
        }
        None => reachability_matrix_bool(lds).get(to, from),
    })
}

/// State transition graph: one edge per (from, to) pair realized by at least
/// one subnetwork, labeled with all realizing subnetworks in order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stg {
    n: usize,
    edges: BTreeMap<(usize, usize), Vec<usize>>,
}

/// Build the state transition graph of the system.
pub fn stg(lds: &Lds) -> Stg {
    let mut edges: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for j in 1..=lds.subnetwork_count() {
        for x in 1..=lds.state_count() {
            edges
                .entry((x, lds.step_unchecked(x, j)))
                .or_default()
                .push(j);
        }
    }
    Stg {
        n: lds.state_count(),
        edges,
    }
}

impl Stg {
    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges in (from, to) order with their sorted subnetwork labels.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, &[usize])> {
        self.edges
            .iter()
            .map(|(&(x, y), labels)| (x, y, labels.as_slice()))
    }

    pub fn labels(&self, from: usize, to: usize) -> &[usize] {
        self.edges
            .get(&(from, to))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }
}

/// One traversed edge of a walk: the subnetwork applied and the state it
/// leads to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathStep {
    pub subnetwork: usize,
    pub state: usize,
}

/// A concrete labeled walk, replayable against the system step by step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledPath {
    pub start: usize,
    pub steps: Vec<PathStep>,
}

impl LabeledPath {
    pub fn end(&self) -> usize {
        self.steps.last().map_or(self.start, |s| s.state)
    }

    pub fn step_count(&self) -> usize {
        self.steps.len()
    }

    /// True when every recorded step matches the system's transition maps.
    pub fn replays_on(&self, lds: &Lds) -> bool {
        let mut x = self.start;
        for s in &self.steps {
            match lds.step(x, s.subnetwork) {
                Ok(y) if y == s.state => x = y,
                _ => return false,
            }
        }
        true
    }
}

impl fmt::Display for LabeledPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.start)?;
        for s in &self.steps {
            write!(f, " -({})-> {}", s.subnetwork, s.state)?;
        }
        Ok(())
    }
}

/// Per-state successor map keeping the lowest label per (from, to) pair.
fn min_label_adjacency(lds: &Lds) -> Vec<BTreeMap<usize, usize>> {
    let mut adj = vec![BTreeMap::new(); lds.state_count() + 1];
    for j in (1..=lds.subnetwork_count()).rev() {
        for (x, successors) in adj.iter_mut().enumerate().skip(1) {
            successors.insert(lds.step_unchecked(x, j), j);
        }
    }
    adj
}

/// Breadth-first distances and predecessors from `src` over a min-label
/// adjacency, scanning successors in ascending state order.
fn bfs(adj: &[BTreeMap<usize, usize>], src: usize) -> (Vec<usize>, Vec<Option<(usize, usize)>>) {
    let n = adj.len() - 1;
    let mut dist = vec![usize::MAX; n + 1];
    let mut pred: Vec<Option<(usize, usize)>> = vec![None; n + 1];
    let mut queue = std::collections::VecDeque::new();
    dist[src] = 0;
    queue.push_back(src);
    while let Some(x) = queue.pop_front() {
        for (&y, &label) in &adj[x] {
            if dist[y] == usize::MAX {
                dist[y] = dist[x] + 1;
                pred[y] = Some((x, label));
                queue.push_back(y);
            }
        }
    }
    (dist, pred)
}

fn rebuild(pred: &[Option<(usize, usize)>], src: usize, dst: usize) -> LabeledPath {
    let mut steps = Vec::new();
    let mut x = dst;
    while x != src || steps.is_empty() {
        let (prev, label) = pred[x].expect("every reached state has a predecessor");
        steps.push(PathStep {
            subnetwork: label,
            state: x,
        });
        x = prev;
        if x == src {
            break;
        }
    }
    steps.reverse();
    LabeledPath { start: src, steps }
}

/// Shortest labeled path from `from` to `to`, or `None` when unreachable.
/// For `from == to` the result is a shortest loop of at least one step.
/// Fully deterministic: breadth-first search visiting successors in state
/// order, lowest subnetwork label on every chosen edge, and loops closed
/// through the lowest-index admissible predecessor.
pub fn find_path(lds: &Lds, from: usize, to: usize) -> Result<Option<LabeledPath>> {
    let n = lds.state_count();
    for (what, idx) in [("source state", from), ("destination state", to)] {
        if idx < 1 || idx > n {
            return Err(Error::IndexOutOfRange {
                what,
                index: idx,
                bound: n,
            });
        }
    }
    let adj = min_label_adjacency(lds);
    let (dist, pred) = bfs(&adj, from);
    if from != to {
        if dist[to] == usize::MAX {
            return Ok(None);
        }
        return Ok(Some(rebuild(&pred, from, to)));
    }
    // shortest closed walk: best incoming edge of `from` among reached tails
    let mut best: Option<(usize, usize, usize)> = None; // (loop length, tail, label)
    for u in 1..=n {
        if dist[u] == usize::MAX {
            continue;
        }
        if let Some(&label) = adj[u].get(&from) {
            let candidate = (dist[u] + 1, u, label);
            if best.is_none_or(|b| candidate < b) {
                best = Some(candidate);
            }
        }
    }
    let Some((_, tail, label)) = best else {
        return Ok(None);
    };
    let mut path = if tail == from {
        LabeledPath {
            start: from,
            steps: Vec::new(),
        }
    } else {
        rebuild(&pred, from, tail)
    };
    path.steps.push(PathStep {
        subnetwork: label,
        state: from,
    });
    Ok(Some(path))
}

/// Node-membership highlights for DOT export.
#[derive(Debug, Default, Clone, Copy)]
pub struct DotHighlights<'a> {
    /// Filled nodes.
    pub target: Option<&'a StateSet>,
    /// Red-bordered nodes.
    pub self_reachable: Option<&'a StateSet>,
    /// Double-bordered nodes.
    pub lris: Option<&'a StateSet>,
}

/// Render the state transition graph as DOT. Byte-deterministic: nodes in
/// ascending order, one edge per (from, to) pair with merged labels, ordered
/// by source then destination.
pub fn stg_dot(lds: &Lds, name: Option<&str>, highlights: DotHighlights<'_>) -> String {
    let graph = stg(lds);
    let mut out = String::new();
    let name = name
        .unwrap_or("stg")
        .replace('\\', "\\\\")
        .replace('"', "\\\"");
    writeln!(out, "digraph \"{name}\" {{").unwrap();
    writeln!(out, "  rankdir=LR;").unwrap();
    writeln!(out, "  node [shape=circle];").unwrap();
    for v in 1..=lds.state_count() {
        let mut attrs: Vec<&str> = Vec::new();
        if highlights.target.is_some_and(|s| s.contains(v)) {
            attrs.push("style=filled");
            attrs.push("fillcolor=palegreen");
        }
        if highlights.self_reachable.is_some_and(|s| s.contains(v)) {
            attrs.push("color=red");
            attrs.push("penwidth=2");
        }
        if highlights.lris.is_some_and(|s| s.contains(v)) {
            attrs.push("peripheries=2");
        }
        if attrs.is_empty() {
            writeln!(out, "  {v};").unwrap();
        } else {
            writeln!(out, "  {v} [{}];", attrs.join(", ")).unwrap();
        }
    }
    for (x, y, labels) in graph.edges() {
        let label = labels
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(",");
        writeln!(out, "  {x} -> {y} [label=\"{label}\"];").unwrap();
    }
    writeln!(out, "}}").unwrap();
    out
}

/// Render an exact rational with a fixed number of decimal places, ties
/// rounding up (1.875 at two places prints as 1.88).
pub fn decimal_string(value: &BigRational, places: usize) -> String {
    let scale = BigInt::from(10u8).pow(places as u32);
    let scaled = value * BigRational::from_integer(scale);
    let half = BigRational::new(BigInt::one(), BigInt::from(2u8));
    let rounded = (scaled + half).floor().to_integer();
    let negative = rounded.sign() == Sign::Minus;
    let digits = rounded.magnitude().to_string();
    let mut body = if digits.len() <= places {
        format!("0.{}{}", "0".repeat(places - digits.len()), digits)
    } else if places == 0 {
        digits
    } else {
        let split = digits.len() - places;
        format!("{}.{}", &digits[..split], &digits[split..])
    };
    if negative {
        body.insert(0, '-');
    }
    body
}
