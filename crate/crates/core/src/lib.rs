//! Photon-subtracted squeezed thermal states: closed forms and a
//! truncated-Fock oracle to check them against.
//!
//! Wigner values follow the half-normalized convention `∫ W d²α = 1/2`
//! throughout, with `α = (q + ip)/√2`.

pub mod closedform;
pub mod compare;
pub mod error;
pub mod fockoracle;
pub mod grid;
pub mod polylib;
pub mod states;

pub use closedform::{EvolvedWigner, MandelReport, PhasePoint, Pssts, QuasiKind, QuasiProbValue};
pub use error::{Error, Result};
pub use states::{ChannelParams, DerivedCoeffs, EvolvedCoeffs, StateParams};
