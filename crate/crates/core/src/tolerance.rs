//! Numerical tolerances shared by all modules.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "camelCase")]
pub struct Tolerances {
    /// Norm of a pure-state amplitude vector, trace and hermiticity of an operator-state.
    pub state: f64,
    /// Smallest admissible eigenvalue of an operator-state.
    pub eigenvalue: f64,
    /// Bloch-norm bound and pure-state unit norm.
    pub bloch: f64,
    /// Orthonormality of measurement bases and unit direction vectors.
    pub orthogonality: f64,
    /// Barycentric break-point sums.
    pub barycentric: f64,
    /// Width of the neutral band when classifying warping or interference.
    pub neutral: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        state: 1e-12,
        eigenvalue: 1e-10,
        bloch: 1e-10,
        orthogonality: 1e-10,
        barycentric: 1e-12,
        neutral: 1e-12,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}
