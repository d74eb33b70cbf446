use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::gellmann::generators;
use super::state::{min_eigenvalue, OperatorState};
use crate::{Error, Result, Tolerances, C64};

/// Real `(N²−1)`-dimensional representative of an `N`-level state.
///
/// Pure states lie on the unit sphere, mixed states strictly inside.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BlochRepr", into = "BlochRepr")]
pub struct BlochVector {
    dim: usize,
    components: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct BlochRepr {
    dim: usize,
    components: Vec<f64>,
}

impl TryFrom<BlochRepr> for BlochVector {
    type Error = Error;

    fn try_from(repr: BlochRepr) -> Result<Self> {
        BlochVector::new(repr.dim, repr.components)
    }
}

impl From<BlochVector> for BlochRepr {
    fn from(v: BlochVector) -> Self {
        BlochRepr {
            dim: v.dim,
            components: v.components,
        }
    }
}

/// `√(2(N−1)/N)`: the generator-coefficient norm of a pure state.
fn pure_radius(n: usize) -> f64 {
    (2.0 * (n as f64 - 1.0) / n as f64).sqrt()
}

impl BlochVector {
    pub fn new(dim: usize, components: Vec<f64>) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidInput(format!("dimension must be at least 2, got {dim}")));
        }
        if components.len() != dim * dim - 1 {
            return Err(Error::DimensionMismatch {
                expected: dim * dim - 1,
                found: components.len(),
            });
        }
        let v = Self { dim, components };
        let norm = v.norm();
        if norm > 1.0 + Tolerances::DEFAULT.bloch {
            return Err(Error::NotAState(format!("Bloch norm {norm} exceeds 1")));
        }
        Ok(v)
    }

    /// The centre of the ball, image of `𝕀/N`.
    pub fn origin(dim: usize) -> Self {
        Self {
            dim,
            components: vec![0.0; dim * dim - 1],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn components(&self) -> &[f64] {
        &self.components
    }

    pub fn norm(&self) -> f64 {
        self.components.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn dot(&self, other: &BlochVector) -> f64 {
        self.components.iter().zip(&other.components).map(|(a, b)| a * b).sum()
    }

    pub fn distance(&self, other: &BlochVector) -> f64 {
        self.components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    /// `Σ wᵢ·vᵢ` over vectors of a common dimension.
    pub fn weighted_sum(weights: &[f64], vectors: &[BlochVector]) -> Result<BlochVector> {
        let first = vectors
            .first()
            .ok_or_else(|| Error::InvalidInput("empty vector list".into()))?;
        if weights.len() != vectors.len() {
            return Err(Error::DimensionMismatch {
                expected: vectors.len(),
                found: weights.len(),
            });
        }
        let mut acc = vec![0.0; first.components.len()];
        for (w, v) in weights.iter().zip(vectors) {
            if v.dim != first.dim {
                return Err(Error::DimensionMismatch {
                    expected: first.dim,
                    found: v.dim,
                });
            }
            for (a, c) in acc.iter_mut().zip(&v.components) {
                *a += w * c;
            }
        }
        BlochVector::new(first.dim, acc)
    }
}

/// Expansion of `ρ − 𝕀/N` over the generalized Gell-Mann generators, scaled
/// so that pure states have unit norm.
pub fn to_bloch(state: &OperatorState) -> BlochVector {
    let n = state.dim();
    let scale = 1.0 / pure_radius(n);
    let components = generators(n)
        .iter()
        .map(|g| g.expectation(state.matrix()) * scale)
        .collect();
    BlochVector { dim: n, components }
}

/// Inverse of [`to_bloch`]. Fails with [`Error::NotAState`] when the
/// reconstructed matrix is not positive semidefinite, which happens for
/// `N > 2` even inside the unit ball.
pub fn from_bloch(r: &BlochVector) -> Result<OperatorState> {
    let n = r.dim;
    let mut m = DMatrix::<C64>::identity(n, n) / C64::from(n as f64);
    let scale = 0.5 * pure_radius(n);
    for (g, &c) in generators(n).iter().zip(&r.components) {
        g.accumulate(scale * c, &mut m);
    }
    let min_eig = min_eigenvalue(&m);
    if min_eig < -Tolerances::DEFAULT.eigenvalue {
        return Err(Error::NotAState(format!(
            "Bloch vector maps to a matrix with eigenvalue {min_eig:e}"
        )));
    }
    Ok(OperatorState::from_matrix_unchecked(m))
}
