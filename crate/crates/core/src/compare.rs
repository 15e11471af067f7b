//! Closed form against the Fock oracle, one parameter set at a time.

use serde::Serialize;

use crate::closedform::{PhasePoint, Pssts};
use crate::error::Result;
use crate::fockoracle::{self, DisplacedParity, PsstsOracle, TruncationPolicy};
use crate::grid::GridSpec;
use crate::states::{ChannelParams, StateParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
}

impl Tolerance {
    pub const ORACLE: Tolerance = Tolerance {
        rel: 1e-7,
        abs: 1e-9,
    };

    pub fn allowed(&self, reference: f64) -> f64 {
        (self.rel * reference.abs()).max(self.abs)
    }
}

/// Worst disagreement over one family of values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub count: usize,
    pub max_abs_err: f64,
    /// Largest `|closed - oracle| / allowed`; at most 1 to pass.
    pub worst_ratio: f64,
    pub passed: bool,
}

impl Check {
    pub fn from_pairs(
        name: &str,
        pairs: impl IntoIterator<Item = (f64, f64)>,
        tol: Tolerance,
    ) -> Self {
        let mut count = 0;
        let mut max_abs_err = 0.0f64;
        let mut worst_ratio = 0.0f64;
        for (closed, oracle) in pairs {
            let err = (closed - oracle).abs();
            count += 1;
            max_abs_err = max_abs_err.max(err);
            // NaN on either side must fail
            let ratio = if err.is_nan() {
                f64::INFINITY
            } else {
                err / tol.allowed(oracle)
            };
            worst_ratio = worst_ratio.max(ratio);
        }
        Self {
            name: name.to_string(),
            count,
            max_abs_err,
            worst_ratio,
            passed: worst_ratio <= 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub params: StateParams,
    pub dim: usize,
    pub dim_trace: Vec<(usize, f64)>,
    pub checks: Vec<Check>,
}

impl ComparisonReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompareOptions {
    pub policy: TruncationPolicy,
    pub grid: GridSpec,
    pub n_max: usize,
    pub tolerance: Tolerance,
}

impl Default for CompareOptions {
    fn default() -> Self {
        Self {
            policy: TruncationPolicy::default(),
            grid: GridSpec::square(3.0, 21).expect("static grid"),
            n_max: 40,
            tolerance: Tolerance::ORACLE,
        }
    }
}

fn grid_radius(grid: &GridSpec) -> f64 {
    (0..grid.len())
        .map(|k| grid.point(k).alpha().norm())
        .fold(0.0, f64::max)
}

/// Every stationary observable: `C_m`, moments, Mandel Q, PND, fidelity,
/// Husimi and Wigner on the grid.
pub fn compare_state(params: &StateParams, opts: &CompareOptions) -> Result<ComparisonReport> {
    let oracle = fockoracle::build_pssts(params, &opts.policy)?;
    compare_with_oracle(params, &oracle, opts)
}

pub fn compare_with_oracle(
    params: &StateParams,
    oracle: &PsstsOracle,
    opts: &CompareOptions,
) -> Result<ComparisonReport> {
    let closed = Pssts::new(*params);
    let tol = opts.tolerance;
    let moments = fockoracle::observable_moments(&oracle.state);
    let mut checks = vec![
        Check::from_pairs(
            "normalization",
            [(closed.normalization(), oracle.cm_estimate)],
            tol,
        ),
        Check::from_pairs("mean_photon", [(closed.mean_photon(), moments.mean)], tol),
        Check::from_pairs(
            "second_moment",
            [(closed.second_moment(), moments.second_factorial)],
            tol,
        ),
        Check::from_pairs("mandel_q", [(closed.mandel_q(), moments.mandel_q())], tol),
    ];
    let pnd = (0..=opts.n_max).map(|n| (closed.pnd(n), moments.pnd.get(n).copied().unwrap_or(0.0)));
    checks.push(Check::from_pairs("pnd", pnd, tol));
    checks.push(Check::from_pairs(
        "fidelity",
        [(closed.fidelity(), fockoracle::fidelity_oracle(oracle)?)],
        tol,
    ));

    let points: Vec<PhasePoint> = (0..opts.grid.len()).map(|k| opts.grid.point(k)).collect();
    let husimi = points.iter().map(|p| {
        (
            closed.q_function(*p),
            fockoracle::husimi(&oracle.state, p.alpha()),
        )
    });
    checks.push(Check::from_pairs("husimi", husimi, tol));

    let radius = grid_radius(&opts.grid);
    let readout = oracle
        .state
        .embed(oracle.dim().max(DisplacedParity::dim_for(radius)));
    let parity = DisplacedParity::new(&readout, radius)?;
    let wigner = points
        .iter()
        .map(|p| Ok((closed.wigner(*p), parity.wigner(p.alpha())?)))
        .collect::<Result<Vec<_>>>()?;
    checks.push(Check::from_pairs("wigner", wigner, tol));

    Ok(ComparisonReport {
        params: *params,
        dim: oracle.dim(),
        dim_trace: oracle.dim_trace.clone(),
        checks,
    })
}

/// Closed-form evolved Wigner values against master-equation evolution of
/// the oracle state, read out by displaced parity.
pub fn compare_evolved(
    params: &StateParams,
    channel: &ChannelParams,
    probes: &[PhasePoint],
    oracle: &PsstsOracle,
    tol: Tolerance,
) -> Result<Check> {
    let evolved = fockoracle::evolve_master(&oracle.state, channel.nth(), channel.kappa_t(), None)?;
    let radius = probes.iter().map(|p| p.alpha().norm()).fold(0.0, f64::max);
    let readout = evolved
        .state
        .embed(evolved.state.dim().max(DisplacedParity::dim_for(radius)));
    let parity = DisplacedParity::new(&readout, radius)?;
    let closed = Pssts::new(*params).evolve(channel)?;
    let pairs = probes
        .iter()
        .map(|p| Ok((closed.value(*p), parity.wigner(p.alpha())?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Check::from_pairs("wigner_evolved", pairs, tol))
}
