//! Phase-estimation limits for path-symmetric entangled probes
//! `|φ⟩|0⟩ + |0⟩|φ⟩` in a lossy Mach-Zehnder interferometer.
//!
//! The crate is organised bottom-up:
//!
//! * [`fock`] truncated single- and two-mode Fock-space linear algebra,
//! * [`probes`] component families and the normalized two-mode probe,
//! * [`metrology`] quantum Fisher information and Cramér-Rao bounds,
//! * [`interferometer`] parity and photon-counting sensitivities under loss,
//! * [`study`] the optimal-N scan and the random-component study,
//! * [`generation`] heralded state-generation circuits,
//! * [`oracles`] brute-force reference implementations used by the tests.

pub mod error;
pub mod fock;
pub mod generation;
pub mod interferometer;
pub mod metrology;
pub mod oracles;
pub mod probes;
pub mod study;

mod special;

pub use error::{Error, Result};
pub use fock::{FockVector, TruncationPolicy, TwoModeState};
pub use interferometer::{MeasurementConfig, OutcomePmf, PhiGrid, SensitivityCurve};
pub use metrology::{PhaseGenerator, QfiReport};
pub use num_complex::Complex64;
pub use probes::{PathSymmetricProbe, ProbeSpec};
