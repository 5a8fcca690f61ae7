//! Solvable geometries that supply S-matrices and Friedrichs spectra.

mod cone;
mod spectrum;
mod sphere;
mod torus;
mod truncated;

pub use cone::{
    cone_entry, cone_entry_derivative, cone_leading, cone_s_matrix, InfiniteCone, LeadingTerm,
};
pub use spectrum::{SpectrumEntry, SpectrumList};
pub use sphere::{sphere_distinguished_param, sphere_s0_block, SphereConfig, SphereModel};
pub use torus::{TorusLattice, TorusModel};
pub use truncated::{g_gram, GProfile, TruncatedCone};

use serde::{Deserialize, Serialize};

use crate::channels::ChannelSet;
use crate::error::{Error, Result};
use crate::linalg::CMatrix;

/// What a model can compute beyond `S(λ)` for `λ < 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Capabilities {
    /// `S(λ)` is available for real `λ < 0`.
    pub negative_lambda: bool,
    /// Meromorphic continuation of `S` to real `λ > 0`.
    pub supports_positive_lambda: bool,
    /// `S₀₀(0)` is defined on log channels.
    pub has_s0_log_channel: bool,
    /// The Friedrichs spectrum can be enumerated.
    pub has_spectrum: bool,
    /// `s_matrix_derivative` is analytic rather than a finite difference.
    pub analytic_derivative: bool,
}

/// `S(0)` restricted to the entries where the limit exists.
#[derive(Clone, Debug, PartialEq)]
pub struct ZeroLimit {
    pub values: CMatrix,
    pub defined: Vec<Vec<bool>>,
}

impl ZeroLimit {
    pub fn fully_defined(values: CMatrix) -> Self {
        let n = values.nrows();
        Self {
            values,
            defined: vec![vec![true; n]; n],
        }
    }

    pub fn is_defined(&self, i: usize, j: usize) -> bool {
        self.defined[i][j]
    }
}

/// Contract for a solvable geometry.
pub trait SpectralModel: Send + Sync {
    fn channel_set(&self) -> &ChannelSet;

    fn capabilities(&self) -> Capabilities;

    /// `S(λ)` for real `λ` in the model's admissible set.
    fn s_matrix(&self, lambda: f64) -> Result<CMatrix>;

    /// `dS/dλ`; defaults to a five-point central difference.
    fn s_matrix_derivative(&self, lambda: f64) -> Result<CMatrix> {
        let h = 1e-5f64.max(1e-5 * lambda.abs());
        if lambda < 0.0 && !self.capabilities().supports_positive_lambda && lambda + 2.0 * h >= 0.0
        {
            return Err(Error::Unsupported(format!(
                "finite-difference derivative at λ = {lambda} would cross λ = 0"
            )));
        }
        let s = |x: f64| self.s_matrix(x);
        let d = (s(lambda - 2.0 * h)? - s(lambda + 2.0 * h)?
            + (s(lambda + h)? - s(lambda - h)?).scale(8.0))
        .unscale(12.0 * h);
        Ok(d)
    }

    fn s_matrix_at_zero(&self) -> Result<ZeroLimit>;

    /// Friedrichs eigenvalues up to `max` with multiplicities.
    fn friedrichs_eigenvalues(&self, max: f64) -> Result<SpectrumList>;

    /// Friedrichs eigenvalues whose eigenfunctions couple to any of the given
    /// channels; these are the possible poles of the corresponding S entries.
    fn coupled_friedrichs_eigenvalues(&self, channels: &[usize], max: f64) -> Result<SpectrumList>;

    /// `dim ker Δ_F`.
    fn friedrichs_kernel_dim(&self) -> usize;

    fn description(&self) -> ModelSpec;
}

/// Serializable model description, tagged by `type`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ModelSpec {
    Cone {
        angle: f64,
    },
    #[serde(alias = "truncated-cone")]
    TruncatedCone {
        angle: f64,
        radius: f64,
    },
    Torus {
        v1: [f64; 2],
        v2: [f64; 2],
    },
    Sphere {
        points: Vec<[f64; 2]>,
    },
}

impl ModelSpec {
    pub fn build(&self) -> Result<Box<dyn SpectralModel>> {
        Ok(match self {
            ModelSpec::Cone { angle } => Box::new(InfiniteCone::new(*angle)?),
            ModelSpec::TruncatedCone { angle, radius } => {
                Box::new(TruncatedCone::new(*angle, *radius)?)
            }
            ModelSpec::Torus { v1, v2 } => Box::new(TorusModel::new(TorusLattice::new(*v1, *v2)?)),
            ModelSpec::Sphere { points } => {
                let z: Vec<_> = points
                    .iter()
                    .map(|p| num_complex::Complex64::new(p[0], p[1]))
                    .collect();
                Box::new(SphereModel::new(SphereConfig::new(z)?)?)
            }
        })
    }
}
