//! Random states and bases for property checks and demonstrations.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::blochcore::{MeasurementBasis, OperatorState, PureState};
use crate::C64;

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-distributed pure state.
pub fn pure_state<R: Rng + ?Sized>(n: usize, rng: &mut R) -> PureState {
    let v = DVector::from_fn(n, |_, _| gaussian(rng));
    let norm = v.norm();
    PureState::from_vector_unchecked(v / C64::from(norm))
}

/// Operator-state `G G† / tr(G G†)` for a complex Ginibre matrix `G`.
pub fn operator_state<R: Rng + ?Sized>(n: usize, rng: &mut R) -> OperatorState {
    let g = DMatrix::from_fn(n, n, |_, _| gaussian(rng));
    let m = &g * g.adjoint();
    let m = (&m + m.adjoint()) * C64::from(0.5);
    let tr = m.trace().re;
    OperatorState::from_matrix_unchecked(m / C64::from(tr))
}

/// Orthonormal basis from Gram-Schmidt on Gaussian vectors.
pub fn basis<R: Rng + ?Sized>(n: usize, rng: &mut R) -> MeasurementBasis {
    let mut cols: Vec<DVector<C64>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v = DVector::from_fn(n, |_, _| gaussian(rng));
        // two passes keep orthogonality at machine precision
        for _ in 0..2 {
            for c in &cols {
                let proj = c.dotc(&v);
                v -= c * proj;
            }
        }
        let norm = v.norm();
        if norm > 1e-6 {
            cols.push(v / C64::from(norm));
        }
    }
    let states = cols.into_iter().map(PureState::from_vector_unchecked).collect();
    MeasurementBasis::new(states).expect("Gram-Schmidt output is orthonormal")
}
