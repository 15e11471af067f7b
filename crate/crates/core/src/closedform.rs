//! Closed-form observables of the photon-subtracted squeezed thermal state.
//!
//! Wigner values use the half-normalized convention `∫ W d²α = 1/2`, which
//! is what the Wigner operator `Δ(α) = (1/π) :exp[-2(a† - α*)(a - α)]:`
//! gives. Husimi values carry the usual `1/π` and integrate to 1.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::polylib::{factorial, hermite, laguerre, legendre_scaled, rising_ratio};
use crate::states::{self, ChannelParams, DerivedCoeffs, EvolvedCoeffs, StateParams};

/// A phase-space location `α = (q + ip)/√2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhasePoint {
    alpha: C64,
}

impl PhasePoint {
    pub const MAX_ABS: f64 = 20.0;

    pub fn new(alpha: C64) -> Result<Self> {
        if alpha.norm().is_nan() || alpha.norm() > Self::MAX_ABS {
            return Err(Error::InvalidParameter(format!(
                "|alpha| = {} exceeds {}",
                alpha.norm(),
                Self::MAX_ABS
            )));
        }
        Ok(Self { alpha })
    }

    pub fn from_qp(q: f64, p: f64) -> Result<Self> {
        Self::new(C64::new(q, p) / 2f64.sqrt())
    }

    pub fn origin() -> Self {
        Self {
            alpha: C64::new(0.0, 0.0),
        }
    }

    pub fn alpha(&self) -> C64 {
        self.alpha
    }

    pub fn q(&self) -> f64 {
        self.alpha.re * 2f64.sqrt()
    }

    pub fn p(&self) -> f64 {
        self.alpha.im * 2f64.sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum QuasiKind {
    Wigner,
    Husimi,
    GlauberP,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuasiProbValue {
    pub value: f64,
    pub kind: QuasiKind,
}

/// Mandel parameter with the reading the value supports.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MandelReport {
    pub q: f64,
    pub sub_poissonian: bool,
    /// Set when `Q_M ≥ 0`: a non-negative Mandel parameter does not make the
    /// state classical.
    pub caveat: Option<&'static str>,
}

const POSITIVE_Q_CAVEAT: &str =
    "Q_M >= 0 does not imply classicality; check Wigner negativity instead";

/// Closed-form evaluator for one state. Construction caches the derived
/// coefficients and `C_m`; every method is a pure function of those.
#[derive(Debug, Clone, Copy)]
pub struct Pssts {
    params: StateParams,
    coeffs: DerivedCoeffs,
    cm: f64,
}

impl Pssts {
    pub fn new(params: StateParams) -> Self {
        let coeffs = states::derive(&params);
        let cm = cm_from(&coeffs, params.m() as usize);
        Self { params, coeffs, cm }
    }

    pub fn params(&self) -> &StateParams {
        &self.params
    }

    pub fn coeffs(&self) -> &DerivedCoeffs {
        &self.coeffs
    }

    fn m(&self) -> usize {
        self.params.m() as usize
    }

    /// `C_m = Tr(a^m ρ_s a^{†m}) = m! · D^{m/2} P_m(B/√D)`, evaluated in the
    /// real-sum form.
    pub fn normalization(&self) -> f64 {
        self.cm
    }

    /// `⟨a†a⟩ = C_{m+1} / C_m`.
    pub fn mean_photon(&self) -> f64 {
        cm_from(&self.coeffs, self.m() + 1) / self.cm
    }

    /// `⟨a†²a²⟩ = C_{m+2} / C_m`.
    pub fn second_moment(&self) -> f64 {
        cm_from(&self.coeffs, self.m() + 2) / self.cm
    }

    /// `C_{m+2}/C_{m+1} - C_{m+1}/C_m`, taken as 0 for the vacuum where the
    /// first ratio is `0/0`.
    pub fn mandel_q(&self) -> f64 {
        let m = self.m();
        let c1 = cm_from(&self.coeffs, m + 1);
        if c1 == 0.0 {
            return 0.0;
        }
        let c2 = cm_from(&self.coeffs, m + 2);
        c2 / c1 - c1 / self.cm
    }

    pub fn mandel_report(&self) -> MandelReport {
        let q = self.mandel_q();
        MandelReport {
            q,
            sub_poissonian: q < 0.0,
            caveat: (q >= 0.0).then_some(POSITIVE_Q_CAVEAT),
        }
    }

    /// Probability of `n` photons.
    pub fn pnd(&self, n: usize) -> f64 {
        let m = self.m();
        let nbar = self.params.nbar();
        if self.params.is_unsqueezed() {
            if nbar == 0.0 {
                return if n == 0 { 1.0 } else { 0.0 };
            }
            // C(m+n, n) n̄^n / (n̄+1)^{m+n+1}
            let binom = rising_ratio(n, m) / factorial(m);
            let ln = n as f64 * nbar.ln() - (m + n + 1) as f64 * nbar.ln_1p();
            return binom * ln.exp();
        }
        let c = &self.coeffs;
        rising_ratio(n, m) * legendre_scaled(m + n, c.pnd_cross, c.pnd_discriminant)
            / (c.tau_product().sqrt() * self.cm)
    }

    pub fn pnd_table(&self, n_max: usize) -> Vec<f64> {
        (0..=n_max).map(|n| self.pnd(n)).collect()
    }

    /// Glauber–Sudarshan P density. Only defined as an ordinary function
    /// when the Gaussian envelope is decaying in every direction.
    pub fn p_function(&self, point: PhasePoint) -> Result<f64> {
        let c = &self.coeffs;
        let d = c.discriminant;
        let w = 2.0 * self.params.nbar() + 1.0;
        let squeezed_width = w * (-2.0 * self.params.r()).exp();
        if !(d > 0.0 && squeezed_width > 1.0) {
            return Err(Error::NonRegularP {
                discriminant: d,
                squeezed_width,
            });
        }
        let a = point.alpha;
        let tau_sum = c.tau1_sq + c.tau2_sq;
        let tau_diff = c.tau1_sq - c.tau2_sq;
        let exponent =
            (2.0 - tau_sum) / (2.0 * d) * a.norm_sqr() + tau_diff / (4.0 * d) * 2.0 * (a * a).re;
        let p0 = exponent.exp() / d.sqrt();
        Ok(a.norm_sqr().powi(self.m() as i32) * p0 / self.cm)
    }

    /// Husimi function `⟨α|ρ|α⟩ / π`.
    pub fn q_function(&self, point: PhasePoint) -> f64 {
        let c = &self.coeffs;
        let a = point.alpha;
        let t = c.tau_product();
        let q0 = (-(c.tau1_sq + c.tau2_sq) / (2.0 * t) * a.norm_sqr()
            + (c.tau1_sq - c.tau2_sq) / (4.0 * t) * 2.0 * (a * a).re)
            .exp()
            / (PI * t.sqrt());
        let m = self.m();
        if m == 0 {
            return q0;
        }
        let cross = c.pnd_cross;
        let sum = match c.husimi_ratio {
            Some(ratio) if !self.params.is_unsqueezed() => {
                let pair = c.husimi_pair;
                let z = C64::new(0.0, -pair.sqrt()) * (ratio * a.conj() + a);
                hermite_sum(m, cross, pair, z)
            }
            _ => polynomial_sum(m, cross, (cross * a.norm()).powi(2)),
        };
        sum / self.cm * q0
    }

    /// Wigner function, half-normalized.
    pub fn wigner(&self, point: PhasePoint) -> f64 {
        let a = point.alpha;
        let m = self.m();
        let nbar = self.params.nbar();
        let w = 2.0 * nbar + 1.0;
        if self.params.is_unsqueezed() {
            let x = a.norm_sqr();
            return (-2.0 * x / w).exp() * laguerre(m, -4.0 * nbar * x / w)
                / (PI * w.powi(m as i32 + 1));
        }
        let w0 = self.wigner_gaussian(a);
        if m == 0 {
            return w0;
        }
        let r = self.params.r();
        let sh2 = (2.0 * r).sinh();
        let excess = nbar - r.sinh().powi(2);
        let beta = (2.0 * a.conj() * excess + a * sh2) / C64::new(0.0, (w * sh2).sqrt());
        let fm = factorial(m);
        let mut total = C64::new(0.0, 0.0);
        for l in 0..=m {
            let k = m - l;
            let weight = 4f64.powi(l as i32) * excess.powi(l as i32)
                / (factorial(l) * factorial(k).powi(2) * sh2.powi(l as i32));
            total += weight * hermite(k, beta) * hermite(k, beta.conj());
        }
        debug_assert!(total.im.abs() <= 1e-10 * total.norm() + f64::MIN_POSITIVE);
        let prefactor =
            fm * fm * sh2.powi(m as i32) / (4f64.powi(m as i32) * w.powi(m as i32) * self.cm);
        prefactor * total.re * w0
    }

    /// Single-subtraction Wigner function from its quadratic closed form;
    /// `None` unless `m = 1`.
    pub fn wigner_single_subtracted(&self, point: PhasePoint) -> Option<f64> {
        if self.m() != 1 {
            return None;
        }
        let a = point.alpha;
        let nbar = self.params.nbar();
        let r = self.params.r();
        let w = 2.0 * nbar + 1.0;
        let b = self.coeffs.cross_weight;
        let excess = nbar - r.sinh().powi(2);
        let shifted = 2.0 * a.conj() * excess + a * (2.0 * r).sinh();
        let f1 = shifted.norm_sqr() / (w * w * b) + excess / (w * b);
        Some(f1 * self.wigner_gaussian(a))
    }

    /// Wigner function of the squeezed thermal state before subtraction.
    fn wigner_gaussian(&self, a: C64) -> f64 {
        let c = &self.coeffs;
        let w = 2.0 * self.params.nbar() + 1.0;
        (-2.0 * c.wigner_diag * a.norm_sqr() + c.wigner_pair * 2.0 * (a * a).re).exp() / (PI * w)
    }

    pub fn evolve(&self, channel: &ChannelParams) -> Result<EvolvedWigner> {
        Ok(EvolvedWigner {
            state: *self,
            coeffs: states::derive_evolved(&self.params, channel)?,
        })
    }

    pub fn wigner_evolved(&self, channel: &ChannelParams, point: PhasePoint) -> Result<f64> {
        Ok(self.evolve(channel)?.value(point))
    }

    /// `tr(ρ_s ρ) / tr(ρ_s²)` between the subtracted state and its squeezed
    /// thermal parent.
    pub fn fidelity(&self) -> f64 {
        let c = &self.coeffs;
        let m = self.m();
        legendre_scaled(m, c.overlap_cross, c.overlap_discriminant)
            / legendre_scaled(m, c.cross_weight, c.discriminant)
    }

    pub fn quasi(&self, kind: QuasiKind, point: PhasePoint) -> Result<QuasiProbValue> {
        let value = match kind {
            QuasiKind::Wigner => self.wigner(point),
            QuasiKind::Husimi => self.q_function(point),
            QuasiKind::GlauberP => self.p_function(point)?,
        };
        Ok(QuasiProbValue { value, kind })
    }
}

/// Wigner function after the thermal channel, for a fixed `κt` and `𝔑`.
#[derive(Debug, Clone, Copy)]
pub struct EvolvedWigner {
    state: Pssts,
    coeffs: EvolvedCoeffs,
}

impl EvolvedWigner {
    /// Rebuilds the evaluator around caller-supplied coefficients.
    pub fn from_parts(state: Pssts, coeffs: EvolvedCoeffs) -> Self {
        Self { state, coeffs }
    }

    pub fn coeffs(&self) -> &EvolvedCoeffs {
        &self.coeffs
    }

    pub fn value(&self, point: PhasePoint) -> f64 {
        let e = &self.coeffs;
        let z = point.alpha;
        let envelope = (-e.radial * z.norm_sqr() + e.quadratic * 2.0 * (z * z).re).exp()
            * e.inv_width
            / (PI * e.envelope_norm);
        let m = self.state.m();
        if m == 0 {
            return envelope;
        }
        let omega = e.omega(z);
        let sum = if self.state.params.is_unsqueezed() || e.pair <= 0.0 {
            polynomial_sum(m, e.cross, omega.norm_sqr())
        } else {
            let arg = omega / C64::new(0.0, 2.0 * e.pair.sqrt());
            hermite_sum(m, e.cross, e.pair, arg)
        };
        sum / self.state.cm * envelope
    }
}

/// `Σ_l (m!)² cross^l pair^{m-l} / (l! ((m-l)!)²) · H_{m-l}(z) H_{m-l}(z*)`,
/// the `2m`-th mixed derivative of `exp[cross·kt + ω*k + ωt + pair(k²+t²)]`
/// once the linear coefficient is folded into the Hermite argument `z`.
fn hermite_sum(m: usize, cross: f64, pair: f64, z: C64) -> f64 {
    let fm = factorial(m);
    let mut total = C64::new(0.0, 0.0);
    for l in 0..=m {
        let k = m - l;
        let weight = fm * fm * cross.powi(l as i32) * pair.powi(k as i32)
            / (factorial(l) * factorial(k).powi(2));
        total += weight * hermite(k, z) * hermite(k, z.conj());
    }
    debug_assert!(total.im.abs() <= 1e-10 * total.norm() + f64::MIN_POSITIVE);
    total.re
}

/// `pair → 0` limit of [`hermite_sum`]: `Σ_l (m!)² cross^l |ω|^{2(m-l)} / (l! ((m-l)!)²)`.
fn polynomial_sum(m: usize, cross: f64, linear_abs_sq: f64) -> f64 {
    let fm = factorial(m);
    (0..=m)
        .map(|l| {
            let k = m - l;
            fm * fm * cross.powi(l as i32) * linear_abs_sq.powi(k as i32)
                / (factorial(l) * factorial(k).powi(2))
        })
        .sum()
}

fn cm_from(coeffs: &DerivedCoeffs, m: usize) -> f64 {
    factorial(m) * legendre_scaled(m, coeffs.cross_weight, coeffs.discriminant)
}

pub fn normalization_cm(params: &StateParams) -> f64 {
    Pssts::new(*params).normalization()
}

pub fn mean_photon(params: &StateParams) -> f64 {
    Pssts::new(*params).mean_photon()
}

pub fn second_moment(params: &StateParams) -> f64 {
    Pssts::new(*params).second_moment()
}

pub fn mandel_q(params: &StateParams) -> f64 {
    Pssts::new(*params).mandel_q()
}

pub fn pnd(params: &StateParams, n: usize) -> f64 {
    Pssts::new(*params).pnd(n)
}

pub fn p_function(params: &StateParams, point: PhasePoint) -> Result<f64> {
    Pssts::new(*params).p_function(point)
}

pub fn q_function(params: &StateParams, point: PhasePoint) -> f64 {
    Pssts::new(*params).q_function(point)
}

pub fn wigner(params: &StateParams, point: PhasePoint) -> f64 {
    Pssts::new(*params).wigner(point)
}

pub fn wigner_evolved(
    params: &StateParams,
    channel: &ChannelParams,
    point: PhasePoint,
) -> Result<f64> {
    Pssts::new(*params).wigner_evolved(channel, point)
}

pub fn fidelity(params: &StateParams) -> f64 {
    Pssts::new(*params).fidelity()
}

/// Channel time beyond which the single-subtracted Wigner function is no
/// longer negative at the origin.
///
/// `None` when `n̄ > sinh²r`: the origin is not negative even at `t = 0`.
/// Exactly at `n̄ = sinh²r` the threshold is `0`.
pub fn threshold_time(params: &StateParams, nth: f64) -> Option<f64> {
    let nbar = params.nbar();
    let r = params.r();
    let sh_sq = r.sinh().powi(2);
    let excess = nbar - sh_sq;
    if excess > 0.0 {
        return None;
    }
    if excess == 0.0 {
        return Some(0.0);
    }
    let ratio = (2.0 * nbar + 1.0) / (2.0 * nth + 1.0) * excess / (nbar * (2.0 * r).cosh() + sh_sq);
    Some(0.5 * (-ratio).ln_1p())
}

/// Long-time Wigner function: the thermal state of the environment.
pub fn thermal_limit_wigner(nth: f64, point: PhasePoint) -> f64 {
    let width = 2.0 * nth + 1.0;
    (-2.0 * point.alpha.norm_sqr() / width).exp() / (PI * width)
}
