//! Special polynomials and Gaussian generating-function derivatives.
//!
//! Everything closed-form in this crate eventually reduces to one of the
//! routines here: Legendre (plain and in the scaled `d^{m/2} P_m(b/√d)`
//! form), physicists' Hermite at complex argument, Laguerre, and the mixed
//! derivative of a two-variable Gaussian.

use num_complex::Complex64 as C64;

/// `n!` as a double. Exact through `22!`, correctly rounded products beyond.
pub fn factorial(n: usize) -> f64 {
    (2..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// `ln n!` by accumulation of logarithms; finite for any `n`.
pub fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// `(m + n)! / n!`, accumulated as a product so it stays finite well past
/// the point where the individual factorials overflow.
pub fn rising_ratio(n: usize, m: usize) -> f64 {
    (n + 1..=n + m).fold(1.0, |acc, k| acc * k as f64)
}

/// Legendre polynomial `P_m(x)` by the Bonnet recurrence
/// `(k+1) P_{k+1} = (2k+1) x P_k - k P_{k-1}`. Valid for any real `x`.
pub fn legendre(m: usize, x: f64) -> f64 {
    if m == 0 {
        return 1.0;
    }
    let (mut prev, mut cur) = (1.0, x);
    for k in 1..m {
        let k = k as f64;
        let next = ((2.0 * k + 1.0) * x * cur - k * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Scaled Legendre value `d^{m/2} P_m(b / √d)` in its manifestly real form
///
/// ```text
/// Σ_{l=0}^{⌊m/2⌋} m! / (4^l (l!)² (m-2l)!) · b^{m-2l} (b² - d)^l
/// ```
///
/// This stays real (and continuous) for `d ≤ 0`. The coefficients are built
/// by their term ratio, so nothing overflows for large `m`.
pub fn legendre_scaled(m: usize, b: f64, d: f64) -> f64 {
    let gap = b * b - d;
    let mut coeff = 1.0;
    let mut sum = 0.0;
    for l in 0..=m / 2 {
        if l > 0 {
            let top = (m - 2 * l + 2) * (m - 2 * l + 1);
            coeff *= top as f64 / (4 * l * l) as f64;
        }
        sum += coeff * b.powi((m - 2 * l) as i32) * gap.powi(l as i32);
    }
    sum
}

/// Physicists' Hermite polynomial `H_n(z)` at complex argument, by
/// `H_{k+1} = 2z H_k - 2k H_{k-1}`.
pub fn hermite(n: usize, z: C64) -> C64 {
    if n == 0 {
        return C64::new(1.0, 0.0);
    }
    let (mut prev, mut cur) = (C64::new(1.0, 0.0), 2.0 * z);
    for k in 1..n {
        let next = 2.0 * z * cur - 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Laguerre polynomial `L_m(x)` by `(k+1) L_{k+1} = (2k+1-x) L_k - k L_{k-1}`.
pub fn laguerre(m: usize, x: f64) -> f64 {
    if m == 0 {
        return 1.0;
    }
    let (mut prev, mut cur) = (1.0, 1.0 - x);
    for k in 1..m {
        let k = k as f64;
        let next = ((2.0 * k + 1.0 - x) * cur - k * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// `∂^{2m}/∂k^m ∂s^m exp[a_quad (k² + s²) + b_cross k s]` at `k = s = 0`.
///
/// Computed from the triple series of the exponential: a term
/// `a^{p+q} b^j k^{2p+j} s^{2q+j} / (p! q! j!)` survives the derivative
/// only when both exponents equal `m`, and then contributes `(m!)²` times
/// its coefficient. No Legendre identity is used here.
pub fn double_derivative_gaussian(m: usize, a_quad: f64, b_cross: f64) -> f64 {
    let mut sum = 0.0;
    for p in 0..=m / 2 {
        for q in 0..=m / 2 {
            for j in 0..=m {
                if 2 * p + j != m || 2 * q + j != m {
                    continue;
                }
                let ln_den = ln_factorial(p) + ln_factorial(q) + ln_factorial(j);
                sum += a_quad.powi((p + q) as i32) * b_cross.powi(j as i32) * (-ln_den).exp();
            }
        }
    }
    let fm = factorial(m);
    fm * fm * sum
}
