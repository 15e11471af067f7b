use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::density::{annihilate_both_sides, build_thermal, FockDensityMatrix};
use super::squeeze::{build_squeeze, padded_dim};
use crate::error::{Error, Result};
use crate::states::StateParams;

pub const MAX_DIM: usize = 512;

/// How the oracle grows its truncation until the subtraction norm settles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationPolicy {
    pub initial_dim: usize,
    pub growth_factor: f64,
    /// Relative change in `C_m` between successive dims that counts as
    /// converged. The top quarter of the final state must also hold less
    /// than this much population.
    pub tolerance: f64,
    pub max_dim: usize,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        Self {
            initial_dim: 16,
            growth_factor: 1.5,
            tolerance: 1e-12,
            max_dim: MAX_DIM,
        }
    }
}

impl TruncationPolicy {
    pub fn validate(&self) -> Result<()> {
        if self.initial_dim < 2
            || self.growth_factor.is_nan()
            || self.growth_factor <= 1.0
            || self.tolerance.is_nan()
            || self.tolerance <= 0.0
        {
            return Err(Error::InvalidParameter(format!(
                "bad truncation policy {self:?}"
            )));
        }
        if self.max_dim > MAX_DIM || self.max_dim < 2 {
            return Err(Error::InvalidParameter(format!(
                "max_dim must be in [2, {MAX_DIM}]"
            )));
        }
        Ok(())
    }

    /// `initial_dim`, raised to the `4(n̄+1)(m+1)e^{2r}` floor and capped by
    /// `max_dim`.
    pub fn start_dim(&self, params: &StateParams) -> usize {
        let floor =
            4.0 * (params.nbar() + 1.0) * (params.m() as f64 + 1.0) * (2.0 * params.r()).exp();
        self.initial_dim
            .max(floor.ceil() as usize)
            .min(self.max_dim)
    }

    fn next_dim(&self, dim: usize) -> usize {
        ((dim as f64 * self.growth_factor).ceil() as usize)
            .max(dim + 1)
            .min(self.max_dim)
    }
}

/// Photon-subtracted state assembled in the number basis.
#[derive(Debug, Clone)]
pub struct PsstsOracle {
    pub params: StateParams,
    /// Normalized `a^m ρ_s a†^m / C_m`.
    pub state: FockDensityMatrix,
    /// `S ρ_c S†` on the same dim.
    pub squeezed_thermal: FockDensityMatrix,
    /// Trace of `a^m ρ_s a†^m` before normalization.
    pub cm_estimate: f64,
    /// Each dim tried and the `C_m` it produced.
    pub dim_trace: Vec<(usize, f64)>,
}

impl PsstsOracle {
    pub fn dim(&self) -> usize {
        self.state.dim()
    }
}

fn build_at(
    params: &StateParams,
    dim: usize,
) -> Result<(FockDensityMatrix, FockDensityMatrix, f64)> {
    let m = params.m() as usize;
    let inner = dim + m;
    let work = padded_dim(inner);
    let s = build_squeeze(params.r(), work)?;
    let thermal = build_thermal(params.nbar(), work);
    let rows = s.rows(0, inner);
    let weighted = DMatrix::from_fn(inner, work, |i, j| rows[(i, j)] * thermal.matrix()[(j, j)]);
    let mut rho_s = &weighted * rows.transpose();
    symmetrize(&mut rho_s);

    let mut sub = rho_s.clone();
    for _ in 0..m {
        sub = annihilate_both_sides(&sub);
    }
    let cm = sub.trace();
    let rho_s = rho_s.view((0, 0), (dim, dim)).into_owned();
    let deficit_s = 1.0 - rho_s.trace();
    let deficit = 1.0 - cm;
    Ok((
        FockDensityMatrix::new(sub / cm, deficit),
        FockDensityMatrix::new(rho_s, deficit_s),
        cm,
    ))
}

fn symmetrize(m: &mut DMatrix<f64>) {
    let t = m.transpose();
    *m += t;
    *m *= 0.5;
}

fn top_quarter_mass(state: &FockDensityMatrix) -> f64 {
    let d = state.diagonal();
    d[d.len() - d.len() / 4..].iter().sum()
}

/// Builds `a^m S ρ_c S† a†^m` directly from matrices, growing the dim
/// until `C_m` stops moving.
pub fn build_pssts(params: &StateParams, policy: &TruncationPolicy) -> Result<PsstsOracle> {
    policy.validate()?;
    let mut dim = policy.start_dim(params);
    let mut trace = Vec::new();
    let mut previous: Option<f64> = None;
    loop {
        match build_at(params, dim) {
            Ok((state, squeezed_thermal, cm)) => {
                trace.push((dim, cm));
                let settled = previous.is_some_and(|p| ((cm - p) / cm).abs() < policy.tolerance);
                if settled && top_quarter_mass(&state) < policy.tolerance {
                    return Ok(PsstsOracle {
                        params: *params,
                        state,
                        squeezed_thermal,
                        cm_estimate: cm,
                        dim_trace: trace,
                    });
                }
                previous = Some(cm);
            }
            Err(Error::UnitarityLoss { .. }) => trace.push((dim, f64::NAN)),
            Err(e) => return Err(e),
        }
        if dim >= policy.max_dim {
            return Err(Error::MaxDimExceeded { trace });
        }
        dim = policy.next_dim(dim);
    }
}

/// Same construction at one fixed dim, with no convergence loop.
pub fn build_pssts_at(params: &StateParams, dim: usize) -> Result<PsstsOracle> {
    let (state, squeezed_thermal, cm) = build_at(params, dim)?;
    Ok(PsstsOracle {
        params: *params,
        state,
        squeezed_thermal,
        cm_estimate: cm,
        dim_trace: vec![(dim, cm)],
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Moments {
    pub mean: f64,
    pub second_factorial: f64,
    pub pnd: Vec<f64>,
}

impl Moments {
    /// Zero for the vacuum, where the ratio is `0/0`.
    pub fn mandel_q(&self) -> f64 {
        if self.mean == 0.0 {
            return 0.0;
        }
        self.second_factorial / self.mean - self.mean
    }
}

/// `tr(ρ a†a)`, `tr(ρ a†²a²)` and the diagonal.
pub fn observable_moments(state: &FockDensityMatrix) -> Moments {
    let pnd = state.diagonal();
    let mean = pnd.iter().enumerate().map(|(n, p)| n as f64 * p).sum();
    let second_factorial = pnd
        .iter()
        .enumerate()
        .map(|(n, p)| (n * n.saturating_sub(1)) as f64 * p)
        .sum();
    Moments {
        mean,
        second_factorial,
        pnd,
    }
}

/// Normalized coherent-state amplitudes `e^{-|α|²/2} α^n / √n!`.
pub fn coherent_vector(alpha: C64, dim: usize) -> Vec<C64> {
    let mut v = Vec::with_capacity(dim);
    let mut c = C64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
    for n in 0..dim {
        v.push(c);
        c *= alpha / ((n + 1) as f64).sqrt();
    }
    v
}

/// `⟨α|ρ|α⟩ / π`.
pub fn husimi(state: &FockDensityMatrix, alpha: C64) -> f64 {
    let dim = state.dim();
    let c = coherent_vector(alpha, dim);
    let re = DVector::from_iterator(dim, c.iter().map(|z| z.re));
    let im = DVector::from_iterator(dim, c.iter().map(|z| z.im));
    let rho = state.matrix();
    // ρ is real symmetric, so c†ρc = reᵀρre + imᵀρim
    (re.dot(&(rho * &re)) + im.dot(&(rho * &im))) / PI
}

/// `tr(ρ_s ρ) / tr(ρ_s²)` from explicit matrices.
pub fn fidelity_oracle(oracle: &PsstsOracle) -> Result<f64> {
    let rho_s = oracle.squeezed_thermal.matrix();
    let purity = rho_s.component_mul(rho_s).sum();
    let want = 1.0 / (2.0 * oracle.params.nbar() + 1.0);
    if (purity - want).abs() > 1e-8 {
        return Err(Error::InvariantViolation(format!(
            "tr(rho_s^2) = {purity}, expected 1/(2nbar+1) = {want}"
        )));
    }
    Ok(rho_s.component_mul(oracle.state.matrix()).sum() / purity)
}
