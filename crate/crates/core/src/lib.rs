//! Set stability of logic dynamical systems under uncertain switching.
//!
//! A system here is a finite state space [1..n] together with m transition
//! maps ("subnetworks"); at every step an unknown switching signal picks
//! which map fires. Given a target set of states, this crate decides, by
//! exact reachability calculus rather than simulation:
//!
//! * **robust stability**: every solution under every signal eventually
//!   enters and stays in the target;
//! * **uniform robust stability**: additionally one entry deadline works for
//!   all initial states and signals;
//! * **asymptotic ratio-one stability**: the fraction of length-k switching
//!   words whose endpoint lies in the target tends to one for every start;
//! * **finite-time ratio-one stability**: that fraction reaches exactly one
//!   at some finite step.
//!
//! Failed verdicts carry machine-checkable witnesses (a state on an escaping
//! loop, a concrete labeled path, or a state cut off from the invariant
//! core). All kernel arithmetic is exact: pattern counts are big integers,
//! ratios are big rationals, and floating point appears only when rendering
//! and in Monte Carlo error bars.
//!
//! ```
//! use ldstab::{analyze, parse_network};
//!
//! let net = parse_network(ldstab::fixtures::E2).unwrap();
//! let target = net.target.clone().unwrap();
//! let report = analyze(&net.lds, &target).unwrap();
//! assert!(report.robust && report.uniform);
//! assert_eq!(report.lris, vec![6, 7, 8]);
//! ```
//!
//! The `oracle` module re-derives pattern counts by brute-force enumeration
//! of switching words and estimates ratios by seeded Monte Carlo; the test
//! suite holds the fast matrix route and the oracle route against each
//! other.

pub mod error;
pub mod invariant;
pub mod lds;
pub mod oracle;
pub mod reach;
pub mod set;
pub mod stability;
pub mod stp;

pub use error::{Error, Result};
pub use lds::{parse_network, serialize_network, Lds, Network, SwitchingSignal, Trajectory};
pub use set::StateSet;
pub use stability::{analyze, StabilityReport};

/// Bundled example networks, ready for `parse_network`.
pub mod fixtures {
    /// Eight states, two subnetworks; robustly stable but not uniformly so.
    pub const E1: &str = include_str!("../fixtures/e1.json");
    /// A one-column tweak of E1 that satisfies all four stability notions.
    pub const E2: &str = include_str!("../fixtures/e2.json");
    /// Fails robustness through a loop outside the target, yet still
    /// asymptotically ratio-one.
    pub const E3: &str = include_str!("../fixtures/e3.json");
}
