use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::bloch::{to_bloch, BlochVector};
use super::state::{OperatorState, PureState};
use crate::{Error, Result, Tolerances, C64};

/// Orthonormal, nondegenerate set of `N` outcome eigenstates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BasisRepr", into = "BasisRepr")]
pub struct MeasurementBasis {
    eigenstates: Vec<PureState>,
}

#[derive(Serialize, Deserialize)]
struct BasisRepr {
    eigenstates: Vec<PureState>,
}

impl TryFrom<BasisRepr> for MeasurementBasis {
    type Error = Error;

    fn try_from(repr: BasisRepr) -> Result<Self> {
        MeasurementBasis::new(repr.eigenstates)
    }
}

impl From<MeasurementBasis> for BasisRepr {
    fn from(b: MeasurementBasis) -> Self {
        BasisRepr {
            eigenstates: b.eigenstates,
        }
    }
}

impl MeasurementBasis {
    pub fn new(eigenstates: Vec<PureState>) -> Result<Self> {
        let n = eigenstates.len();
        if n < 2 {
            return Err(Error::InvalidInput(format!("a basis needs at least 2 states, got {n}")));
        }
        if let Some(bad) = eigenstates.iter().find(|s| s.dim() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: bad.dim(),
            });
        }
        let tol = Tolerances::DEFAULT.orthogonality;
        for i in 0..n {
            for j in i + 1..n {
                let ip = eigenstates[i].inner(&eigenstates[j])?.norm();
                if ip > tol {
                    return Err(Error::InvalidInput(format!(
                        "eigenstates {i} and {j} are not orthogonal (|⟨i|j⟩| = {ip:e})"
                    )));
                }
            }
        }
        Ok(Self { eigenstates })
    }

    /// Computational basis `e₁, …, e_N`.
    pub fn computational(n: usize) -> Result<Self> {
        (0..n)
            .map(|k| PureState::basis(n, k))
            .collect::<Result<Vec<_>>>()
            .and_then(Self::new)
    }

    /// Basis whose eigenstates are the columns of `unitary`.
    pub fn from_columns(unitary: &DMatrix<C64>) -> Result<Self> {
        let states = unitary
            .column_iter()
            .map(|c| PureState::new(c.iter().copied().collect()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(states)
    }

    pub fn dim(&self) -> usize {
        self.eigenstates.len()
    }

    pub fn eigenstates(&self) -> &[PureState] {
        &self.eigenstates
    }

    pub fn eigenstate(&self, index: usize) -> &PureState {
        &self.eigenstates[index]
    }

    fn check_dim(&self, n: usize) -> Result<()> {
        if n != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: n,
            });
        }
        Ok(())
    }
}

/// Vertices of the measurement membrane: Bloch images of the eigenstates.
///
/// Vertices are unit vectors with pairwise dot product `−1/(N−1)`, so they
/// span a regular `(N−1)`-simplex centred at the origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimplexGeometry {
    dim: usize,
    vertices: Vec<BlochVector>,
}

impl SimplexGeometry {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[BlochVector] {
        &self.vertices
    }

    pub fn centroid(&self) -> Vec<f64> {
        let len = self.vertices[0].components().len();
        let mut c = vec![0.0; len];
        for v in &self.vertices {
            for (a, x) in c.iter_mut().zip(v.components()) {
                *a += x / self.dim as f64;
            }
        }
        c
    }

    /// Affine coordinates of `point` with respect to the vertices, solved by
    /// least squares on `[V; 1ᵀ] λ = [x; 1]`.
    pub fn barycentric(&self, point: &BlochVector) -> Result<Vec<f64>> {
        if point.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: point.dim(),
            });
        }
        let rows = point.components().len() + 1;
        let n = self.dim;
        let a = DMatrix::from_fn(rows, n, |r, c| {
            if r + 1 == rows {
                1.0
            } else {
                self.vertices[c].components()[r]
            }
        });
        let mut rhs: Vec<f64> = point.components().to_vec();
        rhs.push(1.0);
        let b = DVector::from_vec(rhs);
        let normal = a.transpose() * &a;
        let proj = a.transpose() * b;
        let sol = normal
            .lu()
            .solve(&proj)
            .ok_or_else(|| Error::InvalidInput("degenerate simplex".into()))?;
        Ok(sol.iter().copied().collect())
    }
}

/// `pᵢ = |⟨ψᵢ|ψ⟩|²`, renormalized to absorb rounding.
pub fn born_probabilities(state: &PureState, basis: &MeasurementBasis) -> Result<Vec<f64>> {
    basis.check_dim(state.dim())?;
    let raw: Vec<f64> = basis
        .eigenstates
        .iter()
        .map(|e| e.inner(state).map(|z| z.norm_sqr()))
        .collect::<Result<_>>()?;
    let total: f64 = raw.iter().sum();
    Ok(raw.into_iter().map(|p| p / total).collect())
}

pub fn measurement_simplex(basis: &MeasurementBasis) -> SimplexGeometry {
    SimplexGeometry {
        dim: basis.dim(),
        vertices: basis.eigenstates.iter().map(|e| to_bloch(&e.projector())).collect(),
    }
}

/// Result of projecting a state onto the measurement simplex.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Decoherence {
    pub probabilities: Vec<f64>,
    pub on_simplex: BlochVector,
    pub percept: OperatorState,
}

/// Drops the off-diagonal elements of `|ψ⟩⟨ψ|` in the measurement basis.
pub fn decohere(state: &PureState, basis: &MeasurementBasis) -> Result<Decoherence> {
    let probabilities = born_probabilities(state, basis)?;
    let simplex = measurement_simplex(basis);
    let on_simplex = BlochVector::weighted_sum(&probabilities, simplex.vertices())?;
    let percept = mixture(&probabilities, basis);
    Ok(Decoherence {
        probabilities,
        on_simplex,
        percept,
    })
}

/// `Σᵢ ⟨ψᵢ|ρ|ψᵢ⟩ |ψᵢ⟩⟨ψᵢ|` for an operator-state `ρ`.
pub fn decohere_operator(rho: &OperatorState, basis: &MeasurementBasis) -> Result<OperatorState> {
    basis.check_dim(rho.dim())?;
    let weights: Vec<f64> = basis
        .eigenstates
        .iter()
        .map(|e| {
            let v = e.amplitudes();
            v.dotc(&(rho.matrix() * v)).re
        })
        .collect();
    Ok(mixture(&weights, basis))
}

fn mixture(weights: &[f64], basis: &MeasurementBasis) -> OperatorState {
    let n = basis.dim();
    let mut m = DMatrix::<C64>::zeros(n, n);
    for (w, e) in weights.iter().zip(&basis.eigenstates) {
        m += e.projector().matrix() * C64::from(*w);
    }
    OperatorState::from_matrix_unchecked(m)
}
