//! Brute-force reference built in a truncated number basis.
//!
//! Nothing here reuses the closed-form machinery: states come from explicit
//! matrices (thermal diagonal, matrix-exponential squeezing, banded
//! annihilation) and observables from traces against them.

mod build;
mod convolution;
mod density;
mod master;
mod parity;
mod squeeze;

pub use build::{
    build_pssts, build_pssts_at, coherent_vector, fidelity_oracle, husimi, observable_moments,
    Moments, PsstsOracle, TruncationPolicy, MAX_DIM,
};
pub use convolution::{gaussian_convolution_wf, kernel_width, OUTSIDE_TOL};
pub use density::{annihilate_both_sides, build_thermal, trace_distance, FockDensityMatrix};
pub use master::{environment_dim, evolve_master, Evolution, STEP_TOL};
pub use parity::{wigner_displaced_parity, DisplacedParity};
pub use squeeze::{build_squeeze, expm, trusted_block, unitarity_defect, UNITARITY_TOL};
