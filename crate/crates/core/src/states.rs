//! Parameter types and every derived coefficient the closed forms share.
//!
//! A photon-subtracted squeezed thermal state is fixed by the thermal mean
//! photon number `n̄`, the squeezing parameter `r` and the number `m` of
//! subtracted photons. All downstream evaluators read their constants from
//! [`DerivedCoeffs`] (and [`EvolvedCoeffs`] for the thermal channel), so the
//! algebra is written once.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest accepted squeezing parameter.
pub const R_MAX: f64 = 3.0;

/// Below this `r` the evaluators dispatch to the unsqueezed (thermal) forms,
/// which avoid the `1/sinh 2r` factors of the general expressions.
pub const THERMAL_ROUTE_R: f64 = 1e-12;

/// Smallest channel time accepted by the evolved evaluators.
pub const MIN_KAPPA_T: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawStateParams")]
pub struct StateParams {
    nbar: f64,
    r: f64,
    m: u32,
}

#[derive(Deserialize)]
struct RawStateParams {
    nbar: f64,
    r: f64,
    m: u32,
}

impl TryFrom<RawStateParams> for StateParams {
    type Error = Error;

    fn try_from(raw: RawStateParams) -> Result<Self> {
        StateParams::new(raw.nbar, raw.r, raw.m)
    }
}

impl StateParams {
    pub fn new(nbar: f64, r: f64, m: u32) -> Result<Self> {
        if !(nbar.is_finite() && nbar >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "nbar must be finite and >= 0, got {nbar}"
            )));
        }
        if !(r.is_finite() && (0.0..=R_MAX).contains(&r)) {
            return Err(Error::InvalidParameter(format!(
                "r must lie in [0, {R_MAX}], got {r}"
            )));
        }
        if nbar == 0.0 && r == 0.0 && m > 0 {
            return Err(Error::AnnihilatedVacuum { m });
        }
        Ok(Self { nbar, r, m })
    }

    /// Builds the state from the Boltzmann exponent `σ = -ħω/kT < 0`, using
    /// `n̄ = 1 / (e^{-σ} - 1)`.
    pub fn from_sigma(sigma: f64, r: f64, m: u32) -> Result<Self> {
        if !(sigma.is_finite() && sigma < 0.0) {
            return Err(Error::InvalidParameter(format!(
                "sigma must be negative, got {sigma}"
            )));
        }
        Self::new(1.0 / (-sigma).exp_m1(), r, m)
    }

    pub fn nbar(&self) -> f64 {
        self.nbar
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// Same `n̄` and `r` with a different subtraction count.
    pub fn with_m(&self, m: u32) -> Result<Self> {
        Self::new(self.nbar, self.r, m)
    }

    pub fn is_unsqueezed(&self) -> bool {
        self.r < THERMAL_ROUTE_R
    }
}

/// Thermal channel: dimensionless decay time `κt` and environment photon
/// number `𝔑`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawChannelParams")]
pub struct ChannelParams {
    kappa_t: f64,
    nth: f64,
}

#[derive(Deserialize)]
struct RawChannelParams {
    kappa_t: f64,
    nth: f64,
}

impl TryFrom<RawChannelParams> for ChannelParams {
    type Error = Error;

    fn try_from(raw: RawChannelParams) -> Result<Self> {
        ChannelParams::new(raw.kappa_t, raw.nth)
    }
}

impl ChannelParams {
    pub fn new(kappa_t: f64, nth: f64) -> Result<Self> {
        if !(kappa_t.is_finite() && kappa_t >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "kappa_t must be >= 0, got {kappa_t}"
            )));
        }
        if !(nth.is_finite() && nth >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "nth must be >= 0, got {nth}"
            )));
        }
        Ok(Self { kappa_t, nth })
    }

    pub fn kappa_t(&self) -> f64 {
        self.kappa_t
    }

    pub fn nth(&self) -> f64 {
        self.nth
    }
}

/// Every constant of the closed forms, as a function of `(n̄, r)`.
///
/// With `w = 2n̄ + 1` and `T = τ₁²τ₂² = n̄² + w cosh²r`:
///
/// | field | value |
/// |---|---|
/// | `tau1_sq`, `tau2_sq` | `(w e^{±2r} + 1)/2`, the normal-ordered Gaussian widths |
/// | `pair_weight` | `w sinh 2r / 4`, weight of `k² + s²` in the normalization generator |
/// | `cross_weight` | `n̄ + w sinh²r`, weight of `ks` (also `C₁`) |
/// | `discriminant` | `n̄² − w sinh²r = cross² − 4 pair²` |
/// | `pnd_cross`, `pnd_pair` | `n̄(n̄+1)/T`, `w sinh 2r/(4T)` |
/// | `pnd_discriminant` | `discriminant / T` |
/// | `wigner_diag`, `wigner_cross`, `wigner_pair` | `cosh 2r / w`, `(n̄ − sinh²r)/w`, `sinh 2r / w` |
/// | `husimi_pair` | `w sinh 2r/(4T)` |
/// | `husimi_ratio` | `2n̄(n̄+1)/(w sinh 2r)`, `None` at `r = 0` |
/// | `overlap_cross`, `overlap_pair` | `n̄(n̄+1) cosh 2r / w`, `(2n̄² + 2n̄ + 1) sinh 2r / (4w)` |
/// | `overlap_discriminant` | `n̄²(n̄+1)²/w² − sinh²r cosh²r` |
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivedCoeffs {
    pub tau1_sq: f64,
    pub tau2_sq: f64,
    pub pnd_cross: f64,
    pub pnd_pair: f64,
    pub pnd_discriminant: f64,
    pub pair_weight: f64,
    pub cross_weight: f64,
    pub discriminant: f64,
    pub wigner_diag: f64,
    pub wigner_cross: f64,
    pub wigner_pair: f64,
    pub husimi_pair: f64,
    pub husimi_ratio: Option<f64>,
    pub overlap_cross: f64,
    pub overlap_pair: f64,
    pub overlap_discriminant: f64,
}

impl DerivedCoeffs {
    pub fn tau_product(&self) -> f64 {
        self.tau1_sq * self.tau2_sq
    }
}

pub fn derive(params: &StateParams) -> DerivedCoeffs {
    let nbar = params.nbar;
    let r = params.r;
    let w = 2.0 * nbar + 1.0;
    let sh = r.sinh();
    let ch = r.cosh();
    let sh2 = (2.0 * r).sinh();
    let ch2 = (2.0 * r).cosh();
    let tau1_sq = (w * (2.0 * r).exp() + 1.0) / 2.0;
    let tau2_sq = (w * (-2.0 * r).exp() + 1.0) / 2.0;
    let tprod = nbar * nbar + w * ch * ch;
    let occupancy = nbar * (nbar + 1.0);
    let discriminant = nbar * nbar - w * sh * sh;

    DerivedCoeffs {
        tau1_sq,
        tau2_sq,
        pnd_cross: occupancy / tprod,
        pnd_pair: w * sh2 / (4.0 * tprod),
        pnd_discriminant: discriminant / tprod,
        pair_weight: w * sh2 / 4.0,
        cross_weight: nbar + w * sh * sh,
        discriminant,
        wigner_diag: ch2 / w,
        wigner_cross: (nbar - sh * sh) / w,
        wigner_pair: sh2 / w,
        husimi_pair: w * sh2 / (4.0 * tprod),
        husimi_ratio: (r > 0.0).then(|| 2.0 * occupancy / (w * sh2)),
        overlap_cross: occupancy * ch2 / w,
        overlap_pair: (2.0 * occupancy + 1.0) * sh2 / (4.0 * w),
        overlap_discriminant: occupancy * occupancy / (w * w) - sh * sh * ch * ch,
    }
}

/// Time-dependent constants of the Wigner function after the thermal channel.
///
/// With `e = e^{-κt}`, `𝒯 = 1 − e²` and the static `g₀, g₁, g₂`
/// (`wigner_diag`, `wigner_cross`, `wigner_pair`):
///
/// * `kernel_overlap` `g₃ = 2e / ((2𝔑+1)𝒯)`
/// * `gauss_det` `G = (g₀ + g₃e/2)² − g₂²`
/// * `pair` `Δ₁ = g₂ (1 + g₃e/2)² / (4G)`
/// * `radial` `Δ₂ = 2/((2𝔑+1)𝒯) − g₃² (g₀ + g₃e/2) / (2G)`
/// * `cross` `χ = (1 + g₃e/2) [g₀ + g₁g₃e − 1/(2n̄+1)²] / (2G)`
/// * `omega_scale` `2e / (2𝔑𝒯 + 1)`, so that `ω(ζ) = omega_scale · (χζ + 2Δ₁ζ*)`
///
/// `Δ₂` is stored in the algebraically equal form `c (h g₀ − g₂²)/G` with
/// `c = 2/((2𝔑+1)𝒯)`, `h = g₀ + g₃e/2`, which has no cancellation as
/// `κt → 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvolvedCoeffs {
    pub decay: f64,
    pub decay_weight: f64,
    pub kernel_overlap: f64,
    pub gauss_det: f64,
    pub pair: f64,
    pub radial: f64,
    pub cross: f64,
    pub omega_scale: f64,
    /// Coefficient of `ζ² + ζ*²` in the Gaussian envelope, `g₂g₃²/(4G)`.
    pub quadratic: f64,
    /// `(2𝔑+1)𝒯√G`; tends to 1 as `κt → 0`.
    pub envelope_norm: f64,
    /// `1 / (2n̄+1)`, carried for the envelope prefactor.
    pub inv_width: f64,
}

impl EvolvedCoeffs {
    pub fn omega(&self, zeta: C64) -> C64 {
        self.omega_scale * (self.cross * zeta + 2.0 * self.pair * zeta.conj())
    }
}

pub fn derive_evolved(params: &StateParams, channel: &ChannelParams) -> Result<EvolvedCoeffs> {
    let kt = channel.kappa_t;
    if kt < MIN_KAPPA_T {
        return Err(Error::UnevolvedTime { kappa_t: kt });
    }
    let base = derive(params);
    let (g0, g1, g2) = (base.wigner_diag, base.wigner_cross, base.wigner_pair);
    let w = 2.0 * params.nbar + 1.0;
    let noise = 2.0 * channel.nth + 1.0;

    let decay = (-kt).exp();
    let decay_weight = -(-2.0 * kt).exp_m1();
    let spread = 2.0 / (noise * decay_weight);
    let g3 = spread * decay;
    let half = g3 * decay / 2.0;
    let h = g0 + half;
    let gauss_det = (h - g2) * (h + g2);

    Ok(EvolvedCoeffs {
        decay,
        decay_weight,
        kernel_overlap: g3,
        gauss_det,
        pair: g2 * (1.0 + half).powi(2) / (4.0 * gauss_det),
        radial: spread * (h * g0 - g2 * g2) / gauss_det,
        cross: (1.0 + half) * (g0 + g1 * g3 * decay - 1.0 / (w * w)) / (2.0 * gauss_det),
        omega_scale: 2.0 * decay / (2.0 * channel.nth * decay_weight + 1.0),
        quadratic: g2 * g3 * g3 / (4.0 * gauss_det),
        envelope_norm: noise * decay_weight * gauss_det.sqrt(),
        inv_width: 1.0 / w,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(nbar: f64, r: f64, m: u32) -> StateParams {
        StateParams::new(nbar, r, m).unwrap()
    }

    #[test]
    fn construction_rejects_out_of_range() {
        assert!(StateParams::new(-0.1, 0.2, 1).is_err());
        assert!(StateParams::new(0.1, -0.2, 1).is_err());
        assert!(StateParams::new(0.1, 3.5, 1).is_err());
        assert!(StateParams::new(f64::NAN, 0.2, 1).is_err());
        assert_eq!(
            StateParams::new(0.0, 0.0, 2),
            Err(Error::AnnihilatedVacuum { m: 2 })
        );
        assert!(StateParams::new(0.0, 0.0, 0).is_ok());
        assert!(ChannelParams::new(-1.0, 0.0).is_err());
        assert!(ChannelParams::new(1.0, -0.5).is_err());
    }

    #[test]
    fn sigma_constructor_gives_bose_occupancy() {
        let sigma = -0.7;
        let p = StateParams::from_sigma(sigma, 0.1, 1).unwrap();
        assert!((p.nbar() - 1.0 / ((0.7f64).exp() - 1.0)).abs() < 1e-14);
        assert!(StateParams::from_sigma(0.5, 0.1, 1).is_err());
    }

    #[test]
    fn vacuum_coefficients() {
        let c = derive(&params(0.0, 0.0, 0));
        assert_eq!(c.tau1_sq, 1.0);
        assert_eq!(c.tau2_sq, 1.0);
        assert_eq!(c.pnd_cross, 0.0);
        assert_eq!(c.pnd_pair, 0.0);
        assert_eq!(c.cross_weight, 0.0);
        assert_eq!(c.discriminant, 0.0);
    }

    #[test]
    fn thermal_coefficients() {
        let c = derive(&params(1.0, 0.0, 0));
        assert_eq!(c.cross_weight, 1.0);
        assert_eq!(c.discriminant, 1.0);
        assert_eq!(c.pair_weight, 0.0);
        assert!((c.pnd_discriminant - 0.25).abs() < 1e-15);
        assert!(c.husimi_ratio.is_none());
    }

    #[test]
    fn squeezed_example() {
        let c = derive(&params(1.0, 0.5, 1));
        let b = (3.0 * 1f64.cosh() - 1.0) / 2.0;
        assert!((c.cross_weight - b).abs() < 1e-14);
        assert!((c.cross_weight - 1.81462).abs() < 1e-5);
        let sh = 0.5f64.sinh();
        assert!((c.discriminant - (1.0 - 3.0 * sh * sh)).abs() < 1e-15);
    }

    #[test]
    fn evolved_rejects_zero_time() {
        let p = params(0.05, 0.3, 1);
        for kt in [0.0, 1e-10] {
            let ch = ChannelParams::new(kt, 0.0).unwrap();
            assert!(matches!(
                derive_evolved(&p, &ch),
                Err(Error::UnevolvedTime { .. })
            ));
        }
    }

    #[test]
    fn evolved_short_time_limits() {
        let p = params(0.05, 0.3, 1);
        let c = derive(&p);
        let ch = ChannelParams::new(1e-6, 0.0).unwrap();
        let e = derive_evolved(&p, &ch).unwrap();
        assert!((e.radial - 2.0 * c.wigner_diag).abs() < 1e-4);
        assert!((e.envelope_norm - 1.0).abs() < 1e-4);
        assert!((e.quadratic - c.wigner_pair).abs() < 1e-4);
        assert!((e.pair - c.wigner_pair / 4.0).abs() < 1e-4);
        assert!((e.cross - c.wigner_cross).abs() < 1e-4);
        let z = C64::new(0.3, -0.7);
        let limit = 2.0 * c.wigner_cross * z + c.wigner_pair * z.conj();
        assert!((e.omega(z) - limit).norm() < 1e-4);
    }

    #[test]
    fn evolved_long_time_limits() {
        let p = params(0.3, 0.6, 2);
        let ch = ChannelParams::new(50.0, 0.4).unwrap();
        let e = derive_evolved(&p, &ch).unwrap();
        let (n, r) = (0.3f64, 0.6f64);
        let w = 2.0 * n + 1.0;
        assert!((e.cross - (n * (2.0 * r).cosh() + r.sinh().powi(2))).abs() < 1e-12);
        assert!((e.pair - w * (2.0 * r).sinh() / 4.0).abs() < 1e-12);
        assert!(e.omega(C64::new(1.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn stable_radial_matches_literal_form() {
        let p = params(0.4, 0.7, 1);
        let c = derive(&p);
        for &(kt, nth) in &[(0.05, 0.0), (0.3, 0.5), (2.0, 1.5)] {
            let e = derive_evolved(&p, &ChannelParams::new(kt, nth).unwrap()).unwrap();
            let spread = 2.0 / ((2.0 * nth + 1.0) * e.decay_weight);
            let literal = spread
                - e.kernel_overlap.powi(2) / (2.0 * e.gauss_det)
                    * (c.wigner_diag + e.kernel_overlap * e.decay / 2.0);
            assert!((e.radial - literal).abs() < 1e-10 * literal.abs().max(1.0));
        }
    }
}
