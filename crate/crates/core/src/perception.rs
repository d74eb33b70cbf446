//! Stimulus and percept distances for qubit states, and the warping a
//! measurement induces between them.
//!
//! Stimuli are pure states compared by great-circle arc on the Bloch sphere,
//! normalized so orthogonal states sit at distance 1. Percepts are their
//! decohered images on the measurement diameter, compared by trace distance
//! (half the Euclidean distance between Bloch vectors).

use serde::{Deserialize, Serialize};

use crate::blochcore::{decohere, to_bloch, BlochVector, MeasurementBasis, PureState};
use crate::{Error, Result, Tolerances};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WarpingKind {
    Contraction,
    Dilation,
    Neutral,
}

impl WarpingKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            WarpingKind::Contraction => "contraction",
            WarpingKind::Dilation => "dilation",
            WarpingKind::Neutral => "neutral",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct WarpingReport {
    pub d_stimuli: f64,
    pub d_percepts: f64,
    pub kind: WarpingKind,
}

impl WarpingReport {
    pub fn new(d_stimuli: f64, d_percepts: f64) -> Self {
        let tol = Tolerances::DEFAULT.neutral;
        let kind = if d_percepts > d_stimuli + tol {
            WarpingKind::Dilation
        } else if d_percepts < d_stimuli - tol {
            WarpingKind::Contraction
        } else {
            WarpingKind::Neutral
        };
        Self {
            d_stimuli,
            d_percepts,
            kind,
        }
    }
}

fn require_qubit(v: &BlochVector) -> Result<()> {
    if v.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: v.dim(),
        });
    }
    Ok(())
}

/// `arccos(a·b)/π` for pure qubit Bloch vectors; equals `|θ_B − θ_A|/π`
/// when the azimuths coincide.
pub fn d_pure(a: &BlochVector, b: &BlochVector) -> Result<f64> {
    require_qubit(a)?;
    require_qubit(b)?;
    for v in [a, b] {
        let norm = v.norm();
        if (norm - 1.0).abs() > Tolerances::DEFAULT.bloch {
            return Err(Error::NotPure(norm));
        }
    }
    let cos = (a.dot(b) / (a.norm() * b.norm())).clamp(-1.0, 1.0);
    Ok(cos.acos() / std::f64::consts::PI)
}

/// Half the Euclidean distance between qubit Bloch vectors, i.e. the trace
/// distance of the corresponding operator-states.
pub fn d_density(x: &BlochVector, y: &BlochVector) -> Result<f64> {
    require_qubit(x)?;
    require_qubit(y)?;
    Ok(0.5 * x.distance(y))
}

pub fn warping(a: &PureState, b: &PureState, basis: &MeasurementBasis) -> Result<WarpingReport> {
    if basis.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: basis.dim(),
        });
    }
    let d_stimuli = d_pure(&to_bloch(&a.projector()), &to_bloch(&b.projector()))?;
    let pa = decohere(a, basis)?.on_simplex;
    let pb = decohere(b, basis)?.on_simplex;
    Ok(WarpingReport::new(d_stimuli, d_density(&pa, &pb)?))
}
