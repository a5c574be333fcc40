//! Numerical evaluation of the closed-form model: mode-selection
//! probability, Laplace transforms of every interference component, outage
//! probabilities, area spectral efficiency and spectrum partitioning.

mod ase;
mod laplace;
mod mode;
mod outage;

use thiserror::Error;

use crate::quadrature::{QuadError, QuadSettings};

pub use ase::{
    ase, ase_from_outages, optimal_partition_greedy, optimal_partition_proportional_fair, proportional_fair_objective,
    rate_densities, RateDensities,
};
pub use laplace::{laplace, laplace_exponent, LaplaceKind};
pub use mode::{p_d2d, ModeSelection};
pub use outage::{
    outage, outage_cellular, outage_cellular_dc_pinned, outage_d2d, outage_with_beam_error, outage_with_gain,
    OutageResult,
};

pub use crate::stochgeom::q_function;

/// How the cluster interference Laplace transforms are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClusterForm {
    /// Full probability generating functional of the cluster process.
    Exact,
    /// First-order expansion of the inner exponential.
    Approx,
}

/// Serving-BS association used by the mode-selection probability and by the
/// cellular outage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    /// Sum over the LOS and NLOS candidates without accounting for the
    /// competing candidate of the other type.
    Printed,
    /// Each branch weighted by the probability that its candidate has the
    /// smaller path loss, so the branches partition the event space.
    Partitioned,
}

impl Variant {
    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Printed => "printed",
            Variant::Partitioned => "partitioned",
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "printed" => Ok(Variant::Printed),
            "partitioned" => Ok(Variant::Partitioned),
            other => Err(format!("unknown variant `{other}` (expected printed|partitioned)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisSettings {
    pub quad: QuadSettings,
    pub cluster_form: ClusterForm,
    pub variant: Variant,
}

impl Default for AnalysisSettings {
    fn default() -> Self {
        Self {
            quad: QuadSettings::default(),
            cluster_form: ClusterForm::Exact,
            variant: Variant::Partitioned,
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum AnalysisError {
    #[error(transparent)]
    Quadrature(#[from] QuadError),
    #[error("intra-cluster Laplace transform needs the conditioning distance w0")]
    MissingW0,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("{0}")]
    Degenerate(String),
}
