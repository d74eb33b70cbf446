use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::{Error, Result, Tolerances, C64};

/// Normalized complex amplitude vector of an `N`-level system, `N >= 2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PureStateRepr", into = "PureStateRepr")]
pub struct PureState {
    amplitudes: DVector<C64>,
}

#[derive(Serialize, Deserialize)]
struct PureStateRepr {
    dim: usize,
    amplitudes: Vec<C64>,
}

impl TryFrom<PureStateRepr> for PureState {
    type Error = Error;

    fn try_from(repr: PureStateRepr) -> Result<Self> {
        if repr.amplitudes.len() != repr.dim {
            return Err(Error::DimensionMismatch {
                expected: repr.dim,
                found: repr.amplitudes.len(),
            });
        }
        PureState::new(repr.amplitudes)
    }
}

impl From<PureState> for PureStateRepr {
    fn from(state: PureState) -> Self {
        PureStateRepr {
            dim: state.dim(),
            amplitudes: state.amplitudes.iter().copied().collect(),
        }
    }
}

impl PureState {
    /// Validates that `amplitudes` has unit norm.
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        Self::with_tolerances(amplitudes, &Tolerances::DEFAULT)
    }

    pub fn with_tolerances(amplitudes: Vec<C64>, tol: &Tolerances) -> Result<Self> {
        if amplitudes.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "state dimension must be at least 2, got {}",
                amplitudes.len()
            )));
        }
        let amplitudes = DVector::from_vec(amplitudes);
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > tol.state {
            return Err(Error::NotAState(format!("amplitude norm {norm} is not 1")));
        }
        Ok(Self { amplitudes })
    }

    /// Divides `amplitudes` by their norm.
    pub fn normalized(amplitudes: Vec<C64>) -> Result<Self> {
        let v = DVector::from_vec(amplitudes);
        let norm = v.norm();
        if norm < 1e-12 {
            return Err(Error::ZeroVector(norm));
        }
        Self::new((v / C64::from(norm)).iter().copied().collect())
    }

    /// The `k`-th computational basis vector of dimension `n`.
    pub fn basis(n: usize, k: usize) -> Result<Self> {
        if k >= n {
            return Err(Error::InvalidInput(format!(
                "basis index {k} out of range for dimension {n}"
            )));
        }
        let mut amps = vec![C64::new(0.0, 0.0); n];
        amps[k] = C64::new(1.0, 0.0);
        Self::new(amps)
    }

    /// Equal-weight superposition of all computational basis vectors.
    pub fn equal_superposition(n: usize) -> Result<Self> {
        let a = 1.0 / (n as f64).sqrt();
        Self::new(vec![C64::new(a, 0.0); n])
    }

    /// Qubit state with Bloch polar angle `theta` and azimuth `phi`.
    pub fn qubit(theta: f64, phi: f64) -> Self {
        let (s, c) = (theta / 2.0).sin_cos();
        Self {
            amplitudes: DVector::from_vec(vec![C64::new(c, 0.0), C64::from_polar(s, phi)]),
        }
    }

    pub(crate) fn from_vector_unchecked(amplitudes: DVector<C64>) -> Self {
        Self { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    /// Tensor product with `other`, `self` as the first factor.
    pub fn tensor(&self, other: &PureState) -> PureState {
        Self {
            amplitudes: self.amplitudes.kronecker(&other.amplitudes),
        }
    }

    /// `|ψ⟩⟨ψ|`
    pub fn projector(&self) -> OperatorState {
        OperatorState {
            matrix: &self.amplitudes * self.amplitudes.adjoint(),
        }
    }
}

/// Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "OperatorStateRepr", into = "OperatorStateRepr")]
pub struct OperatorState {
    matrix: DMatrix<C64>,
}

#[derive(Serialize, Deserialize)]
struct OperatorStateRepr {
    dim: usize,
    matrix: Vec<Vec<C64>>,
}

impl TryFrom<OperatorStateRepr> for OperatorState {
    type Error = Error;

    fn try_from(repr: OperatorStateRepr) -> Result<Self> {
        let n = repr.dim;
        if repr.matrix.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: repr.matrix.len(),
            });
        }
        if let Some(row) = repr.matrix.iter().find(|row| row.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: row.len(),
            });
        }
        OperatorState::new(DMatrix::from_fn(n, n, |i, j| repr.matrix[i][j]))
    }
}

impl From<OperatorState> for OperatorStateRepr {
    fn from(state: OperatorState) -> Self {
        let n = state.dim();
        OperatorStateRepr {
            dim: n,
            matrix: (0..n).map(|i| (0..n).map(|j| state.matrix[(i, j)]).collect()).collect(),
        }
    }
}

impl OperatorState {
    pub fn new(matrix: DMatrix<C64>) -> Result<Self> {
        Self::with_tolerances(matrix, &Tolerances::DEFAULT)
    }

    pub fn with_tolerances(matrix: DMatrix<C64>, tol: &Tolerances) -> Result<Self> {
        let n = matrix.nrows();
        if n != matrix.ncols() {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: matrix.ncols(),
            });
        }
        if n < 2 {
            return Err(Error::InvalidInput(format!(
                "state dimension must be at least 2, got {n}"
            )));
        }
        let asym = (&matrix - matrix.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if asym > tol.state {
            return Err(Error::NotAState(format!(
                "matrix is not Hermitian (deviation {asym:e})"
            )));
        }
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > tol.state || trace.im.abs() > tol.state {
            return Err(Error::NotAState(format!("trace {trace} is not 1")));
        }
        let min_eig = min_eigenvalue(&matrix);
        if min_eig < -tol.eigenvalue {
            return Err(Error::NotAState(format!("negative eigenvalue {min_eig:e}")));
        }
        Ok(Self { matrix })
    }

    /// The maximally mixed state `𝕀/n`.
    pub fn maximally_mixed(n: usize) -> Self {
        Self {
            matrix: DMatrix::identity(n, n) / C64::from(n as f64),
        }
    }

    pub(crate) fn from_matrix_unchecked(matrix: DMatrix<C64>) -> Self {
        Self { matrix }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    /// `tr(ρ²)`
    pub fn purity(&self) -> f64 {
        // tr(ρ²) = Σ |ρ_ij|² for Hermitian ρ
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `tr(ρ·op)`
    pub fn expectation(&self, op: &DMatrix<C64>) -> C64 {
        let n = self.dim();
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..n {
            for k in 0..n {
                acc += self.matrix[(i, k)] * op[(k, i)];
            }
        }
        acc
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut eig: Vec<f64> = self.matrix.clone().symmetric_eigenvalues().iter().copied().collect();
        eig.sort_by(f64::total_cmp);
        eig
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &OperatorState) -> f64 {
        (&self.matrix - &other.matrix)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

pub(crate) fn min_eigenvalue(matrix: &DMatrix<C64>) -> f64 {
    let herm = (matrix + matrix.adjoint()) * C64::from(0.5);
    herm.symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}
