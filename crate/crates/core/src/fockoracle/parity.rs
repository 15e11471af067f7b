//! Wigner values as displaced-parity expectations,
//! `W(α) = (1/π) tr[ρ D(α) Π D†(α)]`.
//!
//! With `α = i|α|e^{iφ}`, `D(α) = R(φ) exp(i|α|X) R(φ)†` where
//! `X = a + a†` and `R(φ) = e^{iφ a†a}`. Parity anticommutes with `X`, so
//! `D Π D† = R(φ) exp(2i|α|X) Π R(φ)†`. `X` is diagonalized once and the
//! state is folded onto each eigenvector by diagonal offset `j - k`, which
//! is all the phase `φ` acts on.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;

use super::density::FockDensityMatrix;
use crate::error::{Error, Result};

pub struct DisplacedParity {
    dim: usize,
    /// `offsets[(a, δ)] = Σ_{j-k=δ} (-1)^j Q_{ja} ρ_{jk} Q_{ka}`, with `δ`
    /// shifted by `dim - 1`.
    offsets: DMatrix<f64>,
    eigenvalues: Vec<f64>,
    max_alpha: f64,
}

impl DisplacedParity {
    /// Trusted displacement radius for a state on `dim` levels.
    pub fn limit(dim: usize) -> f64 {
        0.5 * (dim as f64).sqrt()
    }

    /// Smallest dim whose trusted radius covers `max_alpha`.
    pub fn dim_for(max_alpha: f64) -> usize {
        (4.0 * max_alpha * max_alpha).ceil() as usize
    }

    /// Prepares evaluation for points with `|α| ≤ max_alpha`.
    pub fn new(state: &FockDensityMatrix, max_alpha: f64) -> Result<Self> {
        let dim = state.dim();
        let limit = Self::limit(dim);
        if max_alpha > limit {
            return Err(Error::DisplacementOutOfRange {
                alpha_abs: max_alpha,
                limit,
            });
        }
        // exp(2i|α|X) moves population by about 2|α| in amplitude
        let reach = (dim as f64).sqrt() + 2.0 * max_alpha + 6.0;
        let work = ((reach * reach).ceil() as usize).max(dim + dim / 4 + 16);
        let x = DMatrix::from_fn(work, work, |j, k| {
            if j + 1 == k {
                (k as f64).sqrt()
            } else if k + 1 == j {
                (j as f64).sqrt()
            } else {
                0.0
            }
        });
        let eig = SymmetricEigen::new(x);
        let rows = eig.eigenvectors.rows(0, dim);
        // eigenvectors living entirely above the state's levels contribute
        // nothing
        let keep: Vec<usize> = (0..work)
            .filter(|&a| rows.column(a).norm_squared() > 1e-30)
            .collect();

        let rho = state.matrix();
        let width = 2 * dim - 1;
        let mut offsets = DMatrix::zeros(keep.len(), width);
        let mut acc = vec![0.0; width];
        for (row, &a) in keep.iter().enumerate() {
            let q = rows.column(a);
            let signed: Vec<f64> = (0..dim)
                .map(|j| if j % 2 == 0 { q[j] } else { -q[j] })
                .collect();
            acc.iter_mut().for_each(|v| *v = 0.0);
            for k in 0..dim {
                let qk = q[k];
                let col = rho.column(k);
                let base = dim - 1 - k;
                for j in 0..dim {
                    acc[base + j] += signed[j] * col[j] * qk;
                }
            }
            for (d, v) in acc.iter().enumerate() {
                offsets[(row, d)] = *v;
            }
        }
        Ok(Self {
            dim,
            offsets,
            eigenvalues: keep.iter().map(|&a| eig.eigenvalues[a]).collect(),
            max_alpha,
        })
    }

    pub fn wigner(&self, alpha: C64) -> Result<f64> {
        let radius = alpha.norm();
        if radius > self.max_alpha * (1.0 + 1e-12) {
            return Err(Error::DisplacementOutOfRange {
                alpha_abs: radius,
                limit: self.max_alpha,
            });
        }
        let phi = if radius > 0.0 {
            alpha.arg() - FRAC_PI_2
        } else {
            0.0
        };
        // ρ' = R(φ)† ρ R(φ) carries e^{-iφ(j-k)} on offset j - k
        let shift = self.dim as f64 - 1.0;
        let phase: Vec<C64> = (0..self.offsets.ncols())
            .map(|d| C64::from_polar(1.0, -phi * (d as f64 - shift)))
            .collect();
        let mut total = C64::new(0.0, 0.0);
        for (a, &lambda) in self.eigenvalues.iter().enumerate() {
            let mut s = C64::new(0.0, 0.0);
            for (d, p) in phase.iter().enumerate() {
                s += p * self.offsets[(a, d)];
            }
            total += s * C64::from_polar(1.0, 2.0 * radius * lambda);
        }
        let value = total / PI;
        if value.im.abs() > 1e-10 {
            return Err(Error::InvariantViolation(format!(
                "Wigner imaginary residue {:.3e}",
                value.im
            )));
        }
        Ok(value.re)
    }
}

/// One-off displaced-parity Wigner value.
pub fn wigner_displaced_parity(state: &FockDensityMatrix, alpha: C64) -> Result<f64> {
    DisplacedParity::new(state, alpha.norm())?.wigner(alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fockoracle::density::build_thermal;
    use crate::polylib::laguerre;

    /// Wigner function of `|n⟩⟨n|` from the textbook Laguerre form.
    fn fock_wigner(n: usize, alpha: C64) -> f64 {
        let x = alpha.norm_sqr();
        let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
        sign * (-2.0 * x).exp() * laguerre(n, 4.0 * x) / PI
    }

    #[test]
    fn vacuum_and_thermal_at_origin() {
        let vac = FockDensityMatrix::vacuum(16);
        assert!(
            (wigner_displaced_parity(&vac, C64::new(0.0, 0.0)).unwrap() - 1.0 / PI).abs() < 1e-15
        );
        let th = build_thermal(1.0, 80);
        assert!(
            (wigner_displaced_parity(&th, C64::new(0.0, 0.0)).unwrap() - 1.0 / (3.0 * PI)).abs()
                < 1e-15
        );
    }

    #[test]
    fn fock_states_match_laguerre_form() {
        let dim = 40;
        let oracle_points = [
            C64::new(0.3, 0.0),
            C64::new(-1.1, 0.7),
            C64::new(0.0, -2.4),
            C64::new(2.1, 2.0),
        ];
        for n in [0, 1, 2, 5, 9] {
            let mut rho = DMatrix::zeros(dim, dim);
            rho[(n, n)] = 1.0;
            let dp = DisplacedParity::new(&FockDensityMatrix::new(rho, 0.0), 3.0).unwrap();
            for &a in &oracle_points {
                let got = dp.wigner(a).unwrap();
                let want = fock_wigner(n, a);
                assert!((got - want).abs() < 1e-12, "n={n} a={a}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn coherence_is_phase_sensitive() {
        // (|0⟩ + |1⟩)/√2: W(α) = (2|α|² + 2 Re α) e^{-2|α|²} / π
        let dim = 24;
        let mut rho = DMatrix::zeros(dim, dim);
        rho[(0, 0)] = 0.5;
        rho[(1, 1)] = 0.5;
        rho[(0, 1)] = 0.5;
        rho[(1, 0)] = 0.5;
        let dp = DisplacedParity::new(&FockDensityMatrix::new(rho, 0.0), 2.0).unwrap();
        for &a in &[C64::new(0.5, 0.0), C64::new(0.0, 0.5), C64::new(-0.4, 0.3)] {
            let diag = 0.5 * (fock_wigner(0, a) + fock_wigner(1, a));
            let cross = 2.0 * a.re * (-2.0 * a.norm_sqr()).exp() / PI;
            assert!(
                (dp.wigner(a).unwrap() - (diag + cross)).abs() < 1e-13,
                "a={a}"
            );
        }
    }

    #[test]
    fn rejects_far_points() {
        let vac = FockDensityMatrix::vacuum(16);
        assert!(matches!(
            wigner_displaced_parity(&vac, C64::new(2.5, 0.0)),
            Err(Error::DisplacementOutOfRange { .. })
        ));
    }
}
