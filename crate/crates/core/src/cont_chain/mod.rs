//! Chains of continuous functions `f_d : X -> [0, 2]` on a metric space, one
//! for each `d` in a dense set `D`, with `f_d < f_e` whenever `d ≺ e`.
//!
//! `f_d` is the sum over levels `n` of `ψ^n_d`, the bumps of those centers of
//! the `2^(2-n)`-separated net `D_n` that precede `d`. All arithmetic is exact.

mod chain;
mod nets;
mod space;

use thiserror::Error;

pub use chain::{build_chain, eval_f, format_eval, witness_points, ContChain, ContValue, EvalMode, PairCheck, Witnesses};
pub use nets::{build_nets, phi, pow2, psi, radius, separation, SeparatedNets};
pub use space::{fmt_ratio, MetricSpaceDesc, MetricViolation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ContError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("missing distance between points {0} and {1}")]
    MissingDistance(usize, usize),
    #[error("no point {0}")]
    UnknownPoint(usize),
    #[error("point {0} is not in the dense set")]
    NotDense(usize),
    #[error("FAIL {0}")]
    Metric(MetricViolation),
    #[error("point {point} is not a center at level {level}")]
    NotInNet { level: u32, point: usize },
    #[error("level {0} has not been built")]
    LevelNotBuilt(u32),
    #[error("locality violated at level {level}: point {point} is near centers {} and {}", centers.0, centers.1)]
    Locality {
        level: u32,
        point: usize,
        centers: (usize, usize),
    },
    #[error("no witness for consecutive pairs {0:?}")]
    NoWitness(Vec<usize>),
}
