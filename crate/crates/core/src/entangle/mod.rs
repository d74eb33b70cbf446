//! Two-qubit states: entangled superpositions, the tripartite Bloch
//! decomposition `r = (1/√3) r_A ⊕ (1/√3) r_B ⊕ r_corr`, CHSH correlations
//! and marginal-law checks on joint-outcome tables.

mod tables;

pub use tables::{
    load_counts_csv, marginal_deviations, no_signaling_check, no_signaling_check_counts, table_from_state,
    CountViolation, JointCounts, JointProbabilityTable, MarginalComparison, Setting, Violation,
};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::blochcore::gellmann::generators;
use crate::blochcore::{OperatorState, PureState};
use crate::{Error, Result, Tolerances, C64};

pub type Direction = [f64; 3];

/// Single-qubit Bloch vectors of both parties plus the correlation tensor
/// `rCorr_ij = tr(ρ σᵢ⊗σⱼ)/√3`, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TripartiteBloch {
    pub r_a: [f64; 3],
    pub r_b: [f64; 3],
    pub r_corr: [f64; 9],
}

impl TripartiteBloch {
    /// `(1/3)|r_A|² + (1/3)|r_B|² + |r_corr|²`, equal to `(4 tr ρ² − 1)/3`.
    pub fn weighted_norm_sq(&self) -> f64 {
        let sq = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>();
        sq(&self.r_a) / 3.0 + sq(&self.r_b) / 3.0 + sq(&self.r_corr)
    }

    pub fn corr_norm(&self) -> f64 {
        self.r_corr.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// The 15 components of the concatenated vector.
    pub fn concatenated(&self) -> Vec<f64> {
        let s = 1.0 / 3f64.sqrt();
        self.r_a
            .iter()
            .chain(&self.r_b)
            .map(|x| x * s)
            .chain(self.r_corr.iter().copied())
            .collect()
    }
}

pub(crate) fn pauli() -> [DMatrix<C64>; 3] {
    let g = generators(2);
    [g[0].matrix(2), g[1].matrix(2), g[2].matrix(2)]
}

fn spin_along(u: &Direction) -> DMatrix<C64> {
    let [x, y, z] = pauli();
    x * C64::from(u[0]) + y * C64::from(u[1]) + z * C64::from(u[2])
}

pub(crate) fn check_unit(u: &Direction) -> Result<()> {
    let norm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > Tolerances::DEFAULT.orthogonality {
        return Err(Error::NotUnitVector(norm));
    }
    Ok(())
}

fn require_two_qubits(rho: &OperatorState) -> Result<()> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: rho.dim(),
        });
    }
    Ok(())
}

/// Normalized `a1·ψ⊗φ + a2·φ⊗ψ`, subsystem A as the first factor.
pub fn compose_entangled(psi: &PureState, phi: &PureState, a1: C64, a2: C64) -> Result<PureState> {
    for s in [psi, phi] {
        if s.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: s.dim(),
            });
        }
    }
    let v = psi.tensor(phi).amplitudes() * a1 + phi.tensor(psi).amplitudes() * a2;
    let norm = v.norm();
    if norm < 1e-12 {
        return Err(Error::ZeroVector(norm));
    }
    PureState::normalized(v.iter().copied().collect())
}

/// `(|01⟩ − |10⟩)/√2`
pub fn singlet() -> PureState {
    let e0 = PureState::basis(2, 0).expect("valid basis index");
    let e1 = PureState::basis(2, 1).expect("valid basis index");
    let h = std::f64::consts::FRAC_1_SQRT_2;
    compose_entangled(&e0, &e1, C64::new(h, 0.0), C64::new(-h, 0.0)).expect("nonzero combination")
}

pub fn decompose(rho: &OperatorState) -> Result<TripartiteBloch> {
    require_two_qubits(rho)?;
    let sigma = pauli();
    let id = DMatrix::<C64>::identity(2, 2);
    let mut r_a = [0.0; 3];
    let mut r_b = [0.0; 3];
    let mut r_corr = [0.0; 9];
    let scale = 1.0 / 3f64.sqrt();
    for i in 0..3 {
        r_a[i] = rho.expectation(&sigma[i].kronecker(&id)).re;
        r_b[i] = rho.expectation(&id.kronecker(&sigma[i])).re;
        for j in 0..3 {
            r_corr[3 * i + j] = rho.expectation(&sigma[i].kronecker(&sigma[j])).re * scale;
        }
    }
    Ok(TripartiteBloch { r_a, r_b, r_corr })
}

/// Frobenius distance between `r_corr` and the product prediction `r_A r_Bᵀ/√3`.
pub fn product_residual(t: &TripartiteBloch) -> f64 {
    let scale = 1.0 / 3f64.sqrt();
    let mut acc = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            let d = t.r_corr[3 * i + j] - t.r_a[i] * t.r_b[j] * scale;
            acc += d * d;
        }
    }
    acc.sqrt()
}

pub fn is_product_correlation(t: &TripartiteBloch, tol: f64) -> bool {
    product_residual(t) < tol
}

/// `E(u, v) = tr(ρ (u·σ)⊗(v·σ))`
pub fn correlation(rho: &OperatorState, u: &Direction, v: &Direction) -> Result<f64> {
    require_two_qubits(rho)?;
    check_unit(u)?;
    check_unit(v)?;
    Ok(rho.expectation(&spin_along(u).kronecker(&spin_along(v))).re)
}

/// Correlations keyed by setting pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Correlations {
    #[serde(rename = "AB")]
    pub ab: f64,
    #[serde(rename = "AB'")]
    pub ab_prime: f64,
    #[serde(rename = "A'B")]
    pub a_prime_b: f64,
    #[serde(rename = "A'B'")]
    pub a_prime_b_prime: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChshReport {
    #[serde(rename = "E")]
    pub e: Correlations,
    /// `E(A,B) + E(A,B') + E(A',B) − E(A',B')`
    #[serde(rename = "S")]
    pub s: f64,
}

pub fn chsh(
    rho: &OperatorState,
    a: &Direction,
    a_prime: &Direction,
    b: &Direction,
    b_prime: &Direction,
) -> Result<ChshReport> {
    let e = Correlations {
        ab: correlation(rho, a, b)?,
        ab_prime: correlation(rho, a, b_prime)?,
        a_prime_b: correlation(rho, a_prime, b)?,
        a_prime_b_prime: correlation(rho, a_prime, b_prime)?,
    };
    Ok(ChshReport {
        s: e.ab + e.ab_prime + e.a_prime_b - e.a_prime_b_prime,
        e,
    })
}

/// Settings reaching `S = 2√2` on the singlet: `a = z`, `a' = x`, and `b`,
/// `b'` along the two 45° diagonals of the xz-plane, oriented so that every
/// term of `S` contributes positively.
pub fn optimal_singlet_settings() -> [Direction; 4] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    [[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [-h, 0.0, -h], [h, 0.0, -h]]
}

/// Unit vector in the xz-plane at `angle` radians from `z` towards `x`.
pub fn xz_direction(angle: f64) -> Direction {
    let (s, c) = angle.sin_cos();
    [s, 0.0, c]
}
