//! Rectangular phase-space grids and reductions over them.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::closedform::PhasePoint;
use crate::error::{Error, Result};

pub const MAX_POINTS: usize = 4_000_000;

/// Axis-aligned sampling in `(q, p)`; `α = (q + ip)/√2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGridSpec")]
pub struct GridSpec {
    q_min: f64,
    q_max: f64,
    p_min: f64,
    p_max: f64,
    nq: usize,
    np: usize,
}

#[derive(Deserialize)]
struct RawGridSpec {
    q_min: f64,
    q_max: f64,
    p_min: f64,
    p_max: f64,
    nq: usize,
    np: usize,
}

impl TryFrom<RawGridSpec> for GridSpec {
    type Error = Error;

    fn try_from(raw: RawGridSpec) -> Result<Self> {
        GridSpec::new(raw.q_min, raw.q_max, raw.p_min, raw.p_max, raw.nq, raw.np)
    }
}

impl GridSpec {
    pub fn new(
        q_min: f64,
        q_max: f64,
        p_min: f64,
        p_max: f64,
        nq: usize,
        np: usize,
    ) -> Result<Self> {
        let finite = [q_min, q_max, p_min, p_max].iter().all(|v| v.is_finite());
        if !finite || q_max <= q_min || p_max <= p_min {
            return Err(Error::InvalidParameter(format!(
                "grid bounds must be finite and increasing: q [{q_min}, {q_max}], p [{p_min}, {p_max}]"
            )));
        }
        if nq < 2 || np < 2 || nq.saturating_mul(np) > MAX_POINTS {
            return Err(Error::InvalidParameter(format!(
                "grid needs 2 <= nq, np and nq*np <= {MAX_POINTS}, got {nq} x {np}"
            )));
        }
        let corner = q_min
            .abs()
            .max(q_max.abs())
            .hypot(p_min.abs().max(p_max.abs()))
            / 2f64.sqrt();
        if corner > PhasePoint::MAX_ABS {
            return Err(Error::InvalidParameter(format!(
                "grid reaches |alpha| = {corner:.3}, beyond {}",
                PhasePoint::MAX_ABS
            )));
        }
        Ok(Self {
            q_min,
            q_max,
            p_min,
            p_max,
            nq,
            np,
        })
    }

    /// `[-half, half]²` with `n` points per side.
    pub fn square(half: f64, n: usize) -> Result<Self> {
        Self::new(-half, half, -half, half, n, n)
    }

    pub fn nq(&self) -> usize {
        self.nq
    }

    pub fn np(&self) -> usize {
        self.np
    }

    pub fn len(&self) -> usize {
        self.nq * self.np
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dq(&self) -> f64 {
        (self.q_max - self.q_min) / (self.nq - 1) as f64
    }

    pub fn dp(&self) -> f64 {
        (self.p_max - self.p_min) / (self.np - 1) as f64
    }

    pub fn q(&self, i: usize) -> f64 {
        if i + 1 == self.nq {
            self.q_max
        } else {
            self.q_min + i as f64 * self.dq()
        }
    }

    pub fn p(&self, j: usize) -> f64 {
        if j + 1 == self.np {
            self.p_max
        } else {
            self.p_min + j as f64 * self.dp()
        }
    }

    /// Points in storage order: `q` slowest, `p` fastest.
    pub fn point(&self, k: usize) -> PhasePoint {
        let (i, j) = (k / self.np, k % self.np);
        PhasePoint::from_qp(self.q(i), self.p(j)).expect("bounds checked at construction")
    }

    /// Trapezoid weight of point `k` in the `d²α = dq dp / 2` measure.
    pub fn weight(&self, k: usize) -> f64 {
        let (i, j) = (k / self.np, k % self.np);
        let wq = if i == 0 || i + 1 == self.nq { 0.5 } else { 1.0 };
        let wp = if j == 0 || j + 1 == self.np { 0.5 } else { 1.0 };
        wq * wp * self.dq() * self.dp() / 2.0
    }

    pub fn evaluate<F>(&self, f: F) -> PhaseGrid
    where
        F: Fn(PhasePoint) -> f64 + Sync,
    {
        let values = (0..self.len())
            .into_par_iter()
            .map(|k| f(self.point(k)))
            .collect();
        PhaseGrid {
            spec: *self,
            values,
        }
    }

    pub fn try_evaluate<F>(&self, f: F) -> Result<PhaseGrid>
    where
        F: Fn(PhasePoint) -> Result<f64> + Sync,
    {
        let values = (0..self.len())
            .into_par_iter()
            .map(|k| f(self.point(k)))
            .collect::<Result<_>>()?;
        Ok(PhaseGrid {
            spec: *self,
            values,
        })
    }
}

/// A real field sampled on a [`GridSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseGrid {
    spec: GridSpec,
    values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSummary {
    pub min: f64,
    pub argmin_q: f64,
    pub argmin_p: f64,
    pub max: f64,
    pub integral: f64,
    pub negative_volume: f64,
}

impl PhaseGrid {
    pub fn from_values(spec: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != spec.len() {
            return Err(Error::InvalidParameter(format!(
                "{} values for a grid of {} points",
                values.len(),
                spec.len()
            )));
        }
        Ok(Self { spec, values })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = (PhasePoint, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(|(k, &v)| (self.spec.point(k), v))
    }

    /// Trapezoid integral in `d²α`.
    pub fn integral(&self) -> f64 {
        self.values
            .iter()
            .enumerate()
            .map(|(k, v)| v * self.spec.weight(k))
            .sum()
    }

    /// `∫ |W| d²α` restricted to where the field is negative.
    pub fn negative_volume(&self) -> f64 {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, v)| **v < 0.0)
            .map(|(k, v)| -v * self.spec.weight(k))
            .sum()
    }

    pub fn summary(&self) -> GridSummary {
        let (kmin, min) = self
            .values
            .iter()
            .copied()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("grids have at least four points");
        let max = self
            .values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        let at = self.spec.point(kmin);
        GridSummary {
            min,
            argmin_q: at.q(),
            argmin_p: at.p(),
            max,
            integral: self.integral(),
            negative_volume: self.negative_volume(),
        }
    }
}
