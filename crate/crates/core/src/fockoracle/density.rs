use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// A density matrix in the first `dim` number states.
///
/// Entries are real: every state built here comes from a real squeezing
/// parameter and phase-insensitive dynamics, so all number-basis elements
/// are real and the matrix is real symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct FockDensityMatrix {
    rho: DMatrix<f64>,
    /// `1 - trace` of the matrix as first built, before any renormalization.
    pub trace_deficit: f64,
}

impl FockDensityMatrix {
    pub fn new(rho: DMatrix<f64>, trace_deficit: f64) -> Self {
        assert!(rho.is_square(), "density matrix must be square");
        Self { rho, trace_deficit }
    }

    pub fn vacuum(dim: usize) -> Self {
        let mut rho = DMatrix::zeros(dim, dim);
        rho[(0, 0)] = 1.0;
        Self {
            rho,
            trace_deficit: 0.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.rho
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.rho
    }

    pub fn trace(&self) -> f64 {
        self.rho.trace()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        self.rho.diagonal().iter().copied().collect()
    }

    pub fn purity(&self) -> f64 {
        self.rho.component_mul(&self.rho).sum()
    }

    /// Zero-padded copy with `dim` levels; `dim` must not be smaller.
    pub fn embed(&self, dim: usize) -> Self {
        assert!(
            dim >= self.dim(),
            "embed cannot shrink {} -> {dim}",
            self.dim()
        );
        let mut rho = DMatrix::zeros(dim, dim);
        rho.view_mut((0, 0), (self.dim(), self.dim()))
            .copy_from(&self.rho);
        Self {
            rho,
            trace_deficit: self.trace_deficit,
        }
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        SymmetricEigen::new(self.rho.clone())
            .eigenvalues
            .iter()
            .copied()
            .collect()
    }

    /// Symmetry to 1e-12, eigenvalues above -1e-10, purity at most 1 + 1e-10.
    pub fn check_invariants(&self) -> Result<()> {
        let asym = (&self.rho - self.rho.transpose()).amax();
        if asym > 1e-12 {
            return Err(Error::InvariantViolation(format!("asymmetry {asym:.3e}")));
        }
        let lowest = self.eigenvalues().into_iter().fold(f64::INFINITY, f64::min);
        if lowest < -1e-10 {
            return Err(Error::InvariantViolation(format!(
                "eigenvalue {lowest:.3e}"
            )));
        }
        let purity = self.purity();
        if purity > 1.0 + 1e-10 {
            return Err(Error::InvariantViolation(format!("purity {purity}")));
        }
        Ok(())
    }
}

/// `½ Σ |λ_i(ρ - σ)|`, comparing over the larger of the two dims.
pub fn trace_distance(a: &FockDensityMatrix, b: &FockDensityMatrix) -> f64 {
    let dim = a.dim().max(b.dim());
    let diff = a.embed(dim).rho - b.embed(dim).rho;
    0.5 * SymmetricEigen::new(diff)
        .eigenvalues
        .iter()
        .map(|l| l.abs())
        .sum::<f64>()
}

/// Thermal state with mean `nbar`, diagonal `n̄^n / (n̄+1)^{n+1}`.
/// The missing tail `(n̄/(n̄+1))^dim` is recorded, not renormalized away.
pub fn build_thermal(nbar: f64, dim: usize) -> FockDensityMatrix {
    assert!(dim >= 2, "dim must be at least 2");
    let ratio = nbar / (nbar + 1.0);
    let mut rho = DMatrix::zeros(dim, dim);
    let mut p = 1.0 / (nbar + 1.0);
    for n in 0..dim {
        rho[(n, n)] = p;
        p *= ratio;
    }
    FockDensityMatrix {
        rho,
        trace_deficit: ratio.powi(dim as i32),
    }
}

/// `a ρ a†` with the truncated annihilation operator; the result is one
/// level smaller because its top row and column would be zero.
pub fn annihilate_both_sides(rho: &DMatrix<f64>) -> DMatrix<f64> {
    let d = rho.nrows() - 1;
    DMatrix::from_fn(d, d, |j, k| {
        (((j + 1) * (k + 1)) as f64).sqrt() * rho[(j + 1, k + 1)]
    })
}
