//! The switched system model: n states, m subnetworks, each subnetwork a
//! logic matrix acting by column selection. Also network-document parsing,
//! global-matrix construction from per-node update rules, switching signals,
//! and trajectory execution.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::set::StateSet;
use crate::stp::{structural_matrix, LogicMatrix};

/// A logic dynamical system under switching: x(t+1) = L_{σ(t)} x(t) with
/// states the basis indices [1..n] and σ(t) picking one of m subnetwork
/// transition matrices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lds {
    n: usize,
    transitions: Vec<LogicMatrix>,
}

impl Lds {
    /// Requires at least one subnetwork and square n-by-n matrices
    /// throughout.
    pub fn new(n: usize, transitions: Vec<LogicMatrix>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidNetwork("state space must be nonempty".into()));
        }
        if transitions.is_empty() {
            return Err(Error::InvalidNetwork(
                "at least one subnetwork is required".into(),
            ));
        }
        for (j, t) in transitions.iter().enumerate() {
            if t.dim() != n || t.col_count() != n {
                return Err(Error::InvalidNetwork(format!(
                    "subnetwork {} is {}x{}, expected {n}x{n}",
                    j + 1,
                    t.dim(),
                    t.col_count()
                )));
            }
        }
        Ok(Lds { n, transitions })
    }

    /// Number of states n.
    pub fn state_count(&self) -> usize {
        self.n
    }

    /// Number of subnetworks m.
    pub fn subnetwork_count(&self) -> usize {
        self.transitions.len()
    }

    /// Transition matrix of subnetwork j (1-based).
    pub fn transition(&self, j: usize) -> &LogicMatrix {
        &self.transitions[j - 1]
    }

    pub fn transitions(&self) -> &[LogicMatrix] {
        &self.transitions
    }

    /// One step from state x under subnetwork j: column x of L_j.
    pub fn step(&self, x: usize, j: usize) -> Result<usize> {
        if x < 1 || x > self.n {
            return Err(Error::IndexOutOfRange {
                what: "state",
                index: x,
                bound: self.n,
            });
        }
        if j < 1 || j > self.transitions.len() {
            return Err(Error::IndexOutOfRange {
                what: "subnetwork",
                index: j,
                bound: self.transitions.len(),
            });
        }
        Ok(self.transitions[j - 1].col(x))
    }

    /// `step` without range checks, for loops that have already validated.
    pub(crate) fn step_unchecked(&self, x: usize, j: usize) -> usize {
        self.transitions[j - 1].col(x)
    }

    /// Run `horizon` steps from `x0` under `signal`, recording every visited
    /// state (horizon + 1 entries).
    pub fn trajectory(
        &self,
        x0: usize,
        signal: &SwitchingSignal,
        horizon: usize,
    ) -> Result<Trajectory> {
        if x0 < 1 || x0 > self.n {
            return Err(Error::IndexOutOfRange {
                what: "state",
                index: x0,
                bound: self.n,
            });
        }
        let mut states = Vec::with_capacity(horizon + 1);
        states.push(x0);
        let mut x = x0;
        for t in 0..horizon {
            let j = signal.get(t).ok_or(Error::SignalTooShort {
                needed: horizon,
                available: t,
            })?;
            x = self.step(x, j)?;
            states.push(x);
        }
        Ok(Trajectory { states })
    }
}

/// The subnetwork choice at each time step. A finite word ends; a periodic
/// word repeats forever.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SwitchingSignal {
    Finite(Vec<usize>),
    Periodic(Vec<usize>),
}

impl SwitchingSignal {
    /// The signal that always selects subnetwork j.
    pub fn constant(j: usize) -> Self {
        SwitchingSignal::Periodic(vec![j])
    }

    /// Subnetwork selected at time t, if defined there.
    pub fn get(&self, t: usize) -> Option<usize> {
        match self {
            SwitchingSignal::Finite(word) => word.get(t).copied(),
            SwitchingSignal::Periodic(word) if word.is_empty() => None,
            SwitchingSignal::Periodic(word) => Some(word[t % word.len()]),
        }
    }
}

/// A recorded run; `states()[0]` is the initial state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trajectory {
    states: Vec<usize>,
}

impl Trajectory {
    pub(crate) fn from_states(states: Vec<usize>) -> Self {
        assert!(!states.is_empty());
        Trajectory { states }
    }

    pub fn states(&self) -> &[usize] {
        &self.states
    }

    pub fn start(&self) -> usize {
        self.states[0]
    }

    pub fn end(&self) -> usize {
        *self.states.last().expect("trajectories are nonempty")
    }

    /// Number of steps taken (one less than the number of recorded states).
    pub fn step_count(&self) -> usize {
        self.states.len() - 1
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct NetworkDoc {
    n: usize,
    m: usize,
    maps: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    target: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
}

/// A parsed network document: the system plus its optional bundled target
/// set and display name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Network {
    pub lds: Lds,
    pub target: Option<StateSet>,
    pub name: Option<String>,
}

/// Parse a network document: `{"n", "m", "maps", "target"?, "name"?}` with
/// each map the column-index list of one subnetwork matrix.
pub fn parse_network(text: &str) -> Result<Network> {
    let doc: NetworkDoc = serde_json::from_str(text)?;
    if doc.n == 0 {
        return Err(Error::InvalidNetwork("n must be at least 1".into()));
    }
    if doc.m == 0 {
        return Err(Error::InvalidNetwork("m must be at least 1".into()));
    }
    if doc.maps.len() != doc.m {
        return Err(Error::InvalidNetwork(format!(
            "m is {} but {} maps are given",
            doc.m,
            doc.maps.len()
        )));
    }
    let mut transitions = Vec::with_capacity(doc.m);
    for (j, map) in doc.maps.iter().enumerate() {
        if map.len() != doc.n {
            return Err(Error::InvalidNetwork(format!(
                "map {} has {} entries, expected n = {}",
                j + 1,
                map.len(),
                doc.n
            )));
        }
        let matrix = LogicMatrix::new(doc.n, map.clone()).map_err(|e| match e {
            Error::IndexOutOfRange { index, .. } => Error::InvalidNetwork(format!(
                "map {} contains index {} outside [1..{}]",
                j + 1,
                index,
                doc.n
            )),
            other => other,
        })?;
        transitions.push(matrix);
    }
    let lds = Lds::new(doc.n, transitions)?;
    let target = match doc.target {
        Some(indices) => Some(StateSet::new(doc.n, indices).map_err(|e| match e {
            Error::IndexOutOfRange { index, .. } => Error::InvalidNetwork(format!(
                "target contains index {index} outside [1..{}]",
                doc.n
            )),
            other => other,
        })?),
        None => None,
    };
    Ok(Network {
        lds,
        target,
        name: doc.name,
    })
}

/// Serialize back to document form; the result parses to an equal network.
pub fn serialize_network(network: &Network) -> String {
    let doc = NetworkDoc {
        n: network.lds.state_count(),
        m: network.lds.subnetwork_count(),
        maps: network
            .lds
            .transitions()
            .iter()
            .map(|t| t.col_indices().to_vec())
            .collect(),
        target: network.target.as_ref().map(|t| t.indices()),
        name: network.name.clone(),
    };
    serde_json::to_string(&doc).expect("network documents always serialize")
}

/// Update rule of one node: its own logic domain size and its truth table
/// over the domains of all nodes, in node order.
#[derive(Debug, Clone)]
pub struct NodeFunction {
    pub domain: usize,
    pub table: HashMap<Vec<u64>, u64>,
}

/// Default cap on the global state-space size built from node functions.
pub const DEFAULT_STATE_CAP: usize = 1 << 20;

/// Compose per-node update rules into the global one-step transition matrix:
/// the Khatri-Rao product of the per-node structural matrices, a square
/// logic matrix over n = product of the node domain sizes.
pub fn from_node_functions(nodes: &[NodeFunction]) -> Result<LogicMatrix> {
    from_node_functions_capped(nodes, DEFAULT_STATE_CAP)
}

/// `from_node_functions` with an explicit cap on n.
pub fn from_node_functions_capped(nodes: &[NodeFunction], state_cap: usize) -> Result<LogicMatrix> {
    assert!(!nodes.is_empty(), "at least one node required");
    let mut n: u128 = 1;
    for node in nodes {
        assert!(node.domain >= 1, "node domains must be nonempty");
        n = n.saturating_mul(node.domain as u128);
    }
    if n > state_cap as u128 {
        return Err(Error::CapExceeded {
            what: "global state space",
            required: n,
            cap: state_cap as u128,
        });
    }
    let domains: Vec<usize> = nodes.iter().map(|f| f.domain).collect();
    let mut global: Option<LogicMatrix> = None;
    for node in nodes {
        let factor = structural_matrix(&domains, node.domain, &node.table)?;
        global = Some(match global {
            None => factor,
            Some(g) => g.khatri_rao(&factor)?,
        });
    }
    Ok(global.expect("nodes is nonempty"))
}
