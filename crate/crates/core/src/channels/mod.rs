//! Channel bookkeeping for conical points and the `(P, Q)` description of
//! self-adjoint extensions.

mod bc;

pub(crate) use bc::require_valid;
pub use bc::{
    block_decompose, friedrichs_bc, is_regular, rotation_bc, rotation_bc_on, same_extension,
    validate_bc, BcValidity, BlockDecomposition, ExtensionBC,
};

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A conical point with its total angle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConePoint {
    pub id: usize,
    pub angle: f64,
}

/// Channel label: a conical point and an angular index `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ChannelId {
    pub point: usize,
    pub k: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Channel {
    pub id: ChannelId,
    /// `ν = 2πk/θ_p`; zero for the logarithmic channel.
    pub nu: f64,
    /// Prefactor of the channel in the local expansion: `√(2θ_p)` for the
    /// log channel, `√(2|ν|θ_p)` otherwise.
    pub c_nu: f64,
}

impl Channel {
    pub fn is_log(&self) -> bool {
        self.id.k == 0
    }

    /// Normalization under which `Ṡ_νν` equals the L² norm of `G_ν`:
    /// `1/√(2|ν|θ_p)`. Not defined for the log channel.
    pub fn gram_constant(&self, angle: f64) -> Option<f64> {
        if self.is_log() {
            None
        } else {
            Some(1.0 / (2.0 * self.nu.abs() * angle).sqrt())
        }
    }
}

/// Conical points and their channels, ordered point-major then by `k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelSet {
    points: Vec<ConePoint>,
    channels: Vec<Channel>,
}

impl ChannelSet {
    /// Builds the channel list for points given by their angles; point ids
    /// are the positions in `angles`.
    pub fn new(angles: &[f64]) -> Result<Self> {
        let mut points = Vec::with_capacity(angles.len());
        let mut channels = Vec::new();
        for (id, &angle) in angles.iter().enumerate() {
            if !(angle > 0.0) || !angle.is_finite() {
                return Err(Error::domain(
                    "ChannelSet::new",
                    "angle",
                    angle,
                    "cone angles must be positive",
                ));
            }
            points.push(ConePoint { id, angle });
            let kmax = max_k(angle);
            for k in -kmax..=kmax {
                let nu = 2.0 * PI * k as f64 / angle;
                let c_nu = if k == 0 {
                    (2.0 * angle).sqrt()
                } else {
                    (2.0 * nu.abs() * angle).sqrt()
                };
                channels.push(Channel {
                    id: ChannelId { point: id, k },
                    nu,
                    c_nu,
                });
            }
        }
        Ok(Self { points, channels })
    }

    pub fn len(&self) -> usize {
        self.channels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.channels.is_empty()
    }

    pub fn points(&self) -> &[ConePoint] {
        &self.points
    }

    pub fn channels(&self) -> &[Channel] {
        &self.channels
    }

    pub fn channel(&self, i: usize) -> &Channel {
        &self.channels[i]
    }

    pub fn angle_of(&self, point: usize) -> f64 {
        self.points[point].angle
    }

    pub fn index_of(&self, id: ChannelId) -> Option<usize> {
        self.channels.iter().position(|c| c.id == id)
    }

    pub fn log_channels(&self) -> impl Iterator<Item = usize> + '_ {
        self.channels
            .iter()
            .enumerate()
            .filter(|(_, c)| c.is_log())
            .map(|(i, _)| i)
    }
}

/// Largest `k` with `|k| < θ/(2π)`.
fn max_k(angle: f64) -> i64 {
    let r = angle / (2.0 * PI);
    let f = r.floor();
    // exact multiples of 2π exclude the boundary value
    let k = if (r - f).abs() < 1e-12 { f - 1.0 } else { f };
    k.max(0.0) as i64
}

/// Incoming and outgoing channel coefficients `(A⁻, A⁺)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientVector {
    pub minus: Vec<Complex64>,
    pub plus: Vec<Complex64>,
}

impl CoefficientVector {
    pub fn new(cs: &ChannelSet, minus: Vec<Complex64>, plus: Vec<Complex64>) -> Result<Self> {
        if minus.len() != cs.len() || plus.len() != cs.len() {
            return Err(Error::DimensionMismatch(format!(
                "coefficient vectors of length {}/{} for {} channels",
                minus.len(),
                plus.len(),
                cs.len()
            )));
        }
        Ok(Self { minus, plus })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn channel_counts() {
        let cs = ChannelSet::new(&[2.0 * PI]).unwrap();
        assert_eq!(cs.len(), 1);
        let cs = ChannelSet::new(&[4.0 * PI, PI]).unwrap();
        let ks: Vec<_> = cs.channels().iter().map(|c| (c.id.point, c.id.k)).collect();
        assert_eq!(ks, vec![(0, -1), (0, 0), (0, 1), (1, 0)]);
        assert!((cs.channel(2).nu - 0.5).abs() < 1e-15);
        let cs = ChannelSet::new(&[3.0 * PI]).unwrap();
        assert!((cs.channel(2).nu - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn constants() {
        let cs = ChannelSet::new(&[4.0 * PI]).unwrap();
        let c = cs.channel(2);
        assert!((c.c_nu - (4.0 * PI).sqrt()).abs() < 1e-14);
        assert!((c.gram_constant(4.0 * PI).unwrap() * c.c_nu - 1.0).abs() < 1e-14);
        assert!((cs.channel(1).c_nu - (8.0 * PI).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_angle() {
        assert!(ChannelSet::new(&[0.0]).is_err());
    }
}
