//! Channel evolution as a Gaussian smoothing of the initial Wigner function,
//!
//! ```text
//! W(ζ, t) = 2/((2𝔑+1)𝒯) ∫ d²α/π exp[-2|ζ - α e^{-κt}|² / ((2𝔑+1)𝒯)] W(α, 0)
//! ```
//!
//! evaluated as a trapezoid sum over a sampled initial function.

use std::f64::consts::PI;

use crate::closedform::PhasePoint;
use crate::error::{Error, Result};
use crate::grid::PhaseGrid;
use crate::states::ChannelParams;

pub const OUTSIDE_TOL: f64 = 1e-8;

/// Kernel standard deviation per quadrature in `α` units, for sizing grids.
pub fn kernel_width(channel: &ChannelParams) -> f64 {
    let spread = (2.0 * channel.nth() + 1.0) * -(-2.0 * channel.kappa_t()).exp_m1();
    (spread / 4.0).sqrt() * channel.kappa_t().exp()
}

pub fn gaussian_convolution_wf(
    initial: &PhaseGrid,
    channel: &ChannelParams,
    target: PhasePoint,
) -> Result<f64> {
    let kt = channel.kappa_t();
    if kt <= 0.0 {
        return Err(Error::InvalidParameter(
            "convolution needs kappa_t > 0".into(),
        ));
    }
    let spread = (2.0 * channel.nth() + 1.0) * -(-2.0 * kt).exp_m1();
    let decay = (-kt).exp();
    let zeta = target.alpha();
    let spec = initial.spec();
    let mut total = 0.0;
    let mut kernel_mass = 0.0;
    for (k, (pt, w0)) in initial.iter().enumerate() {
        let kernel =
            2.0 / spread * (-2.0 * (zeta - pt.alpha() * decay).norm_sqr() / spread).exp() / PI;
        let weight = spec.weight(k);
        total += kernel * w0 * weight;
        kernel_mass += kernel * weight;
    }
    // As a density in α the kernel integrates to e^{2κt}. Its missing mass
    // only matters in proportion to how much of W(α, 0) reaches the edge.
    let lost = (1.0 - kernel_mass * (-2.0 * kt).exp()).abs();
    let outside_mass = lost * edge_fraction(initial);
    if outside_mass > OUTSIDE_TOL {
        return Err(Error::GridTooSmall { outside_mass });
    }
    Ok(total)
}

/// Largest `|W|` on the grid boundary relative to the largest overall.
fn edge_fraction(grid: &PhaseGrid) -> f64 {
    let spec = grid.spec();
    let (nq, np) = (spec.nq(), spec.np());
    let values = grid.values();
    let peak = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if peak == 0.0 {
        return 0.0;
    }
    let edge = values
        .iter()
        .enumerate()
        .filter(|(k, _)| {
            let (i, j) = (k / np, k % np);
            i == 0 || j == 0 || i + 1 == nq || j + 1 == np
        })
        .fold(0.0f64, |m, (_, v)| m.max(v.abs()));
    edge / peak
}
