use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Allowed `‖S†S - I‖_max` on the inner half of the reported block.
pub const UNITARITY_TOL: f64 = 1e-8;

/// Working dim used before cropping back to `dim`.
pub fn padded_dim(dim: usize) -> usize {
    (dim * 5).div_ceil(4)
}

/// `exp(g)` by scaling and squaring around a Taylor series.
pub fn expm(g: &DMatrix<f64>) -> DMatrix<f64> {
    let n = g.nrows();
    let norm = g
        .column_iter()
        .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scaled = g / 2f64.powi(squarings as i32);

    let mut result = DMatrix::identity(n, n);
    let mut term = DMatrix::identity(n, n);
    for k in 1..=30 {
        term = &term * &scaled / k as f64;
        result += &term;
        if term.amax() < 1e-18 {
            break;
        }
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

/// Truncated squeeze operator `exp[r(a†² - a²)/2]` on `dim` levels.
///
/// The generator only couples levels of equal parity, so the even and odd
/// sublattices are exponentiated separately on a padded working dim and the
/// result is cropped. Fails if the trusted inner block (see
/// [`trusted_block`]) is no longer unitary.
pub fn build_squeeze(r: f64, dim: usize) -> Result<DMatrix<f64>> {
    assert!(dim >= 2, "dim must be at least 2");
    let work = padded_dim(dim);
    let mut s = DMatrix::zeros(work, work);
    for parity in 0..2 {
        let levels: Vec<usize> = (parity..work).step_by(2).collect();
        let len = levels.len();
        let mut g = DMatrix::zeros(len, len);
        for i in 0..len.saturating_sub(1) {
            let n = levels[i];
            // ⟨n+2| a†² |n⟩ = √((n+1)(n+2))
            let c = 0.5 * r * (((n + 1) * (n + 2)) as f64).sqrt();
            g[(i + 1, i)] = c;
            g[(i, i + 1)] = -c;
        }
        let block = expm(&g);
        for (bi, &ni) in levels.iter().enumerate() {
            for (bj, &nj) in levels.iter().enumerate() {
                s[(ni, nj)] = block[(bi, bj)];
            }
        }
    }
    let s = s.view((0, 0), (dim, dim)).into_owned();
    let defect = unitarity_defect(&s, trusted_block(r, dim));
    if defect > UNITARITY_TOL {
        return Err(Error::UnitarityLoss { dim, defect });
    }
    Ok(s)
}

/// Columns whose image should stay inside `dim` levels: squeezing
/// stretches `|n⟩` out to roughly `n e^{2r}` photons, so this is half of
/// `dim e^{-2r}`.
pub fn trusted_block(r: f64, dim: usize) -> usize {
    ((dim as f64 * (-2.0 * r).exp() / 2.0) as usize).clamp(1, dim)
}

/// `max |(S†S - I)_{jk}|` over the first `block` columns.
pub fn unitarity_defect(s: &DMatrix<f64>, block: usize) -> f64 {
    let cols = s.columns(0, block);
    let gram = cols.transpose() * cols;
    (gram - DMatrix::identity(block, block)).amax()
}
