use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pssts::grid::GridSpec;
use pssts::{ChannelParams, Error, Result, StateParams};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(
    name = "pssts",
    version,
    about = "Photon-subtracted squeezed thermal states: tables, grids and oracle checks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Write here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Record wall-clock time in the metadata (makes output non-reproducible).
    #[arg(long, global = true)]
    pub timings: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Photon-number distribution P(n) for n = 0..=n_max.
    Pnd {
        #[command(flatten)]
        state: StateArgs,
        #[arg(long, default_value_t = 30)]
        n_max: usize,
    },
    /// Mandel Q against squeezing for several subtraction numbers.
    MandelSweep {
        #[arg(long, allow_negative_numbers = true, default_value_t = 0.1)]
        nbar: f64,
        #[command(flatten)]
        sweep: SweepArgs,
        #[arg(long, value_delimiter = ',', default_value = "1,2,3,4")]
        m: Vec<u32>,
    },
    /// Wigner function on a phase-space grid, optionally after the thermal channel.
    Wigner {
        #[command(flatten)]
        state: StateArgs,
        #[arg(long, default_value = "-3,3,-3,3,101,101", allow_hyphen_values = true, value_parser = parse_grid)]
        grid: GridSpec,
        #[command(flatten)]
        channel: ChannelArgs,
        /// Also write the JSON summary here.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Channel time after which the single-subtracted origin value turns non-negative.
    Threshold {
        #[arg(long, allow_negative_numbers = true, default_value_t = 0.1)]
        nbar: f64,
        #[arg(long, allow_negative_numbers = true, default_value_t = 0.5)]
        r: f64,
        #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
        nth: f64,
    },
    /// Fidelity with the unsubtracted state against squeezing.
    FidelitySweep {
        #[arg(long, allow_negative_numbers = true, default_value_t = 0.2)]
        nbar: f64,
        #[command(flatten)]
        sweep: SweepArgs,
        #[arg(long, value_delimiter = ',', default_value = "0,1,2,3,4,5,10,15,19,20")]
        m: Vec<u32>,
    },
    /// Closed form against the truncated Fock-space oracle for one state.
    OracleCompare {
        #[command(flatten)]
        state: StateArgs,
        #[command(flatten)]
        channel: ChannelArgs,
        #[arg(long, default_value_t = pssts::fockoracle::MAX_DIM)]
        max_dim: usize,
    },
    /// Re-run the parameters embedded in an earlier output file.
    Rerun { file: PathBuf },
}

#[derive(Debug, Clone, Copy, Args)]
pub struct StateArgs {
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.1)]
    pub nbar: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.5)]
    pub r: f64,
    #[arg(long, default_value_t = 1)]
    pub m: u32,
}

impl StateArgs {
    fn params(self) -> Result<StateParams> {
        StateParams::new(self.nbar, self.r, self.m)
    }
}

#[derive(Debug, Clone, Copy, Args)]
pub struct ChannelArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub kappa_t: Option<f64>,
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
    pub nth: f64,
}

impl ChannelArgs {
    fn params(self) -> Result<Option<ChannelParams>> {
        self.kappa_t
            .map(|kt| ChannelParams::new(kt, self.nth))
            .transpose()
    }
}

#[derive(Debug, Clone, Copy, Args)]
pub struct SweepArgs {
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
    pub r_min: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = 1.0)]
    pub r_max: f64,
    #[arg(long, default_value_t = 101)]
    pub r_steps: usize,
}

/// Evenly spaced squeezing values, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RSweep {
    pub r_min: f64,
    pub r_max: f64,
    pub r_steps: usize,
}

impl RSweep {
    pub fn new(r_min: f64, r_max: f64, r_steps: usize) -> Result<Self> {
        if !(r_min >= 0.0 && r_max >= r_min && r_max <= 3.0) || r_steps < 2 {
            return Err(Error::InvalidParameter(format!(
                "r sweep needs 0 <= r_min <= r_max <= 3 and at least 2 steps, got [{r_min}, {r_max}] x {r_steps}"
            )));
        }
        Ok(Self {
            r_min,
            r_max,
            r_steps,
        })
    }

    pub fn values(&self) -> Vec<f64> {
        let span = self.r_max - self.r_min;
        let last = (self.r_steps - 1) as f64;
        (0..self.r_steps)
            .map(|i| self.r_min + span * i as f64 / last)
            .collect()
    }
}

/// Everything needed to reproduce one output; echoed into every file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Request {
    Pnd {
        state: StateParams,
        n_max: usize,
    },
    MandelSweep {
        nbar: f64,
        sweep: RSweep,
        m: Vec<u32>,
    },
    Wigner {
        state: StateParams,
        grid: GridSpec,
        channel: Option<ChannelParams>,
    },
    Threshold {
        nbar: f64,
        r: f64,
        nth: f64,
    },
    FidelitySweep {
        nbar: f64,
        sweep: RSweep,
        m: Vec<u32>,
    },
    OracleCompare {
        state: StateParams,
        channel: Option<ChannelParams>,
        max_dim: usize,
    },
}

fn check_nbar(nbar: f64) -> Result<()> {
    StateParams::new(nbar, 0.0, 0).map(|_| ())
}

fn check_m(m: &[u32]) -> Result<()> {
    if m.is_empty() {
        return Err(Error::InvalidParameter("need at least one m".into()));
    }
    Ok(())
}

impl Request {
    /// Validates the parsed flags. `None` for `rerun`, which reads its
    /// request from a file.
    pub fn from_command(command: &Command) -> Result<Option<Self>> {
        let request = match *command {
            Command::Pnd { state, n_max } => Request::Pnd {
                state: state.params()?,
                n_max,
            },
            Command::MandelSweep { nbar, sweep, ref m } => {
                check_nbar(nbar)?;
                check_m(m)?;
                Request::MandelSweep {
                    nbar,
                    sweep: RSweep::new(sweep.r_min, sweep.r_max, sweep.r_steps)?,
                    m: m.clone(),
                }
            }
            Command::Wigner {
                state,
                grid,
                channel,
                ..
            } => Request::Wigner {
                state: state.params()?,
                grid,
                channel: channel.params()?,
            },
            Command::Threshold { nbar, r, nth } => {
                StateParams::new(nbar, r, 1)?;
                ChannelParams::new(0.0, nth)?;
                Request::Threshold { nbar, r, nth }
            }
            Command::FidelitySweep { nbar, sweep, ref m } => {
                check_nbar(nbar)?;
                check_m(m)?;
                Request::FidelitySweep {
                    nbar,
                    sweep: RSweep::new(sweep.r_min, sweep.r_max, sweep.r_steps)?,
                    m: m.clone(),
                }
            }
            Command::OracleCompare {
                state,
                channel,
                max_dim,
            } => Request::OracleCompare {
                state: state.params()?,
                channel: channel.params()?,
                max_dim,
            },
            Command::Rerun { .. } => return Ok(None),
        };
        Ok(Some(request))
    }
}

/// `qmin,qmax,pmin,pmax,nq,np` or `half,n` for a square.
pub fn parse_grid(s: &str) -> std::result::Result<GridSpec, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let float = |i: usize| {
        parts[i]
            .parse::<f64>()
            .map_err(|e| format!("grid field {}: {e}", i + 1))
    };
    let count = |i: usize| {
        parts[i]
            .parse::<usize>()
            .map_err(|e| format!("grid field {}: {e}", i + 1))
    };
    let spec = match parts.len() {
        2 => GridSpec::square(float(0)?, count(1)?),
        6 => GridSpec::new(
            float(0)?,
            float(1)?,
            float(2)?,
            float(3)?,
            count(4)?,
            count(5)?,
        ),
        _ => return Err("expected qmin,qmax,pmin,pmax,nq,np or half,n".into()),
    };
    spec.map_err(|e| e.to_string())
}
