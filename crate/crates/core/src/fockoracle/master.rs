//! RK4 integration of the thermal-channel master equation
//!
//! ```text
//! dρ/dτ = (𝔑+1)(2aρa† - a†aρ - ρa†a) + 𝔑(2a†ρa - aa†ρ - ρaa†),   τ = κt
//! ```
//!
//! with truncated ladder operators, so the generator stays trace
//! preserving inside the truncation.

use nalgebra::DMatrix;

use super::density::{trace_distance, FockDensityMatrix};
use crate::error::{Error, Result};

pub const STEP_TOL: f64 = 1e-7;
const MAX_HALVINGS: u32 = 10;

#[derive(Debug, Clone)]
pub struct Evolution {
    pub state: FockDensityMatrix,
    /// Step that met the halving test.
    pub dt: f64,
    /// Trace distance between the last two step sizes.
    pub step_distance: f64,
}

/// Levels needed for the channel's own thermal state to lose less than
/// `1e-14` of its population to truncation.
pub fn environment_dim(nth: f64) -> usize {
    if nth == 0.0 {
        return 2;
    }
    let ratio = nth / (nth + 1.0);
    ((1e-14f64).ln() / ratio.ln()).ceil() as usize + 1
}

fn generator(rho: &DMatrix<f64>, nth: f64) -> DMatrix<f64> {
    let d = rho.nrows();
    let loss = nth + 1.0;
    DMatrix::from_fn(d, d, |j, k| {
        let (jf, kf) = (j as f64, k as f64);
        let mut v = 0.0;
        // 2(𝔑+1) aρa†
        if j + 1 < d && k + 1 < d {
            v += 2.0 * loss * ((jf + 1.0) * (kf + 1.0)).sqrt() * rho[(j + 1, k + 1)];
        }
        // 2𝔑 a†ρa
        if j > 0 && k > 0 {
            v += 2.0 * nth * (jf * kf).sqrt() * rho[(j - 1, k - 1)];
        }
        // truncated aa† has (n+1) on the diagonal except 0 at the top level
        let up = |n: usize| if n + 1 < d { n as f64 + 1.0 } else { 0.0 };
        v - (loss * (jf + kf) + nth * (up(j) + up(k))) * rho[(j, k)]
    })
}

fn integrate(rho0: &DMatrix<f64>, nth: f64, t_end: f64, steps: usize) -> DMatrix<f64> {
    let dt = t_end / steps as f64;
    let mut rho = rho0.clone();
    for _ in 0..steps {
        let k1 = generator(&rho, nth);
        let k2 = generator(&(&rho + &k1 * (dt / 2.0)), nth);
        let k3 = generator(&(&rho + &k2 * (dt / 2.0)), nth);
        let k4 = generator(&(&rho + &k3 * dt), nth);
        rho += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
        let t = rho.transpose();
        rho = (rho + t) * 0.5;
    }
    rho
}

/// Evolves to `κt = t_end`. The state is embedded in enough levels for the
/// environment's thermal tail; `dt` (default: a stability-limited guess)
/// is halved until halving no longer moves the result by `STEP_TOL`.
pub fn evolve_master(
    state: &FockDensityMatrix,
    nth: f64,
    t_end: f64,
    dt: Option<f64>,
) -> Result<Evolution> {
    if !(t_end >= 0.0 && t_end.is_finite()) || !(nth >= 0.0 && nth.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "t_end = {t_end}, nth = {nth}"
        )));
    }
    if t_end == 0.0 {
        return Ok(Evolution {
            state: state.clone(),
            dt: 0.0,
            step_distance: 0.0,
        });
    }
    let start = state.embed(state.dim().max(environment_dim(nth)));
    let d = start.dim() as f64;
    let rate = (2.0 * nth + 1.0) * 2.0 * d + 2.0 * nth + 1.0;
    let dt0 = dt.unwrap_or((0.05f64).min(1.0 / rate));
    let mut steps = (t_end / dt0).ceil().max(1.0) as usize;

    let mut coarse = integrate(start.matrix(), nth, t_end, steps);
    let mut distance = f64::INFINITY;
    for _ in 0..MAX_HALVINGS {
        steps *= 2;
        let fine = integrate(start.matrix(), nth, t_end, steps);
        distance = trace_distance(
            &FockDensityMatrix::new(coarse, 0.0),
            &FockDensityMatrix::new(fine.clone(), 0.0),
        );
        if distance < STEP_TOL {
            let trace_drift = (fine.trace() - start.trace()).abs();
            if trace_drift > 1e-8 {
                return Err(Error::InvariantViolation(format!(
                    "trace drifted by {trace_drift:.3e}"
                )));
            }
            return Ok(Evolution {
                state: FockDensityMatrix::new(fine, start.trace_deficit),
                dt: t_end / steps as f64,
                step_distance: distance,
            });
        }
        coarse = fine;
    }
    Err(Error::StepSizeTooCoarse {
        dt: t_end / steps as f64,
        distance,
    })
}
