//! The hidden-measurement mechanism.
//!
//! A state first decoheres onto the measurement simplex (point `n∥` with
//! barycentric coordinates equal to the Born probabilities). The simplex is
//! then split into `N` sub-regions `Aᵢ = conv({n∥} ∪ {vⱼ : j ≠ i})`. The
//! membrane breaks at a uniformly distributed point `λ`; the sub-region that
//! contains `λ` detaches and the state collapses onto vertex `i`.

mod rng;

pub use rng::RngStream;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::Exp1;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::blochcore::{
    born_probabilities, decohere, decohere_operator, measurement_simplex, to_bloch, BlochVector, MeasurementBasis,
    PureState,
};
use crate::{Error, Result, Tolerances};

/// Barycentric coordinates of the break point `λ` over the simplex vertices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct BreakPoint {
    barycentric: Vec<f64>,
}

impl TryFrom<Vec<f64>> for BreakPoint {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        BreakPoint::new(v)
    }
}

impl From<BreakPoint> for Vec<f64> {
    fn from(b: BreakPoint) -> Self {
        b.barycentric
    }
}

impl BreakPoint {
    pub fn new(barycentric: Vec<f64>) -> Result<Self> {
        check_distribution(&barycentric, Tolerances::DEFAULT.barycentric)?;
        Ok(Self { barycentric })
    }

    pub fn coordinates(&self) -> &[f64] {
        &self.barycentric
    }

    pub fn dim(&self) -> usize {
        self.barycentric.len()
    }
}

fn check_distribution(v: &[f64], tol: f64) -> Result<()> {
    if v.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "need at least 2 coordinates, got {}",
            v.len()
        )));
    }
    if let Some(x) = v.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
        return Err(Error::InvalidInput(format!(
            "coordinate {x} is not a nonnegative number"
        )));
    }
    let sum: f64 = v.iter().sum();
    if (sum - 1.0).abs() > tol {
        return Err(Error::InvalidInput(format!("coordinates sum to {sum}, not 1")));
    }
    Ok(())
}

/// Draws `λ` uniformly over the `(N−1)`-simplex by normalizing `N`
/// independent unit exponentials (a flat Dirichlet).
pub fn sample_break_point_with<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<BreakPoint> {
    if dim < 2 {
        return Err(Error::InvalidInput(format!("dimension must be at least 2, got {dim}")));
    }
    let draws: Vec<f64> = (0..dim).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = draws.iter().sum();
    Ok(BreakPoint {
        barycentric: draws.into_iter().map(|x| x / total).collect(),
    })
}

/// [`sample_break_point_with`] on a fresh generator for `stream`.
pub fn sample_break_point(dim: usize, stream: &RngStream) -> Result<BreakPoint> {
    sample_break_point_with(dim, &mut stream.generator())
}

/// Index of the sub-region containing `λ`.
///
/// `λ ∈ Aᵢ` exactly when vertex `i` has the smallest ratio `λᵢ/pᵢ`: writing
/// `λ = t·p + c` with `c ≥ 0` supported off vertex `i` forces `t = λᵢ/pᵢ`,
/// and `c ≥ 0` requires that ratio to be minimal. Zero probabilities give an
/// infinite ratio; ties go to the lowest index. A unit-mass `p` returns its
/// support regardless of `λ`.
pub fn subregion_of(lambda: &BreakPoint, probabilities: &[f64]) -> Result<usize> {
    if probabilities.len() != lambda.dim() {
        return Err(Error::DimensionMismatch {
            expected: lambda.dim(),
            found: probabilities.len(),
        });
    }
    check_distribution(probabilities, 1e-9)?;
    if let Some(i) = probabilities.iter().position(|&p| p == 1.0) {
        return Ok(i);
    }
    let mut best = 0;
    let mut best_ratio = f64::INFINITY;
    for (i, (&l, &p)) in lambda.barycentric.iter().zip(probabilities).enumerate() {
        let ratio = if p > 0.0 { l / p } else { f64::INFINITY };
        if ratio < best_ratio {
            best = i;
            best_ratio = ratio;
        }
    }
    Ok(best)
}

/// Full record of one decohere, break and collapse run.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CollapseTrace {
    pub initial: BlochVector,
    pub on_simplex: BlochVector,
    pub break_point: BreakPoint,
    pub outcome_index: usize,
    pub outcome_state: PureState,
}

pub fn collapse(state: &PureState, basis: &MeasurementBasis, stream: &RngStream) -> Result<CollapseTrace> {
    let d = decohere(state, basis)?;
    let break_point = sample_break_point(basis.dim(), stream)?;
    let outcome_index = subregion_of(&break_point, &d.probabilities)?;
    Ok(CollapseTrace {
        initial: to_bloch(&state.projector()),
        on_simplex: d.on_simplex,
        break_point,
        outcome_index,
        outcome_state: basis.eigenstate(outcome_index).clone(),
    })
}

/// One row of a Monte Carlo batch.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchRun {
    pub run: u64,
    pub outcome: usize,
    pub lambda: BreakPoint,
}

/// Runs `runs` collapses, run `r` on substream `(seed, r)`.
pub fn collapse_batch(state: &PureState, basis: &MeasurementBasis, seed: u64, runs: u64) -> Result<Vec<BatchRun>> {
    let probabilities = born_probabilities(state, basis)?;
    let n = basis.dim();
    (0..runs)
        .into_par_iter()
        .map(|run| {
            let lambda = sample_break_point(n, &RngStream::new(seed, run))?;
            let outcome = subregion_of(&lambda, &probabilities)?;
            Ok(BatchRun { run, outcome, lambda })
        })
        .collect()
}

/// Outcome counts of [`collapse_batch`] without materializing the runs.
pub fn outcome_counts(state: &PureState, basis: &MeasurementBasis, seed: u64, runs: u64) -> Result<Vec<u64>> {
    let probabilities = born_probabilities(state, basis)?;
    let n = basis.dim();
    (0..runs)
        .into_par_iter()
        .map(|run| {
            let lambda = sample_break_point(n, &RngStream::new(seed, run))?;
            subregion_of(&lambda, &probabilities)
        })
        .try_fold(
            || vec![0u64; n],
            |mut acc, outcome| {
                acc[outcome?] += 1;
                Ok(acc)
            },
        )
        .try_reduce(
            || vec![0u64; n],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                Ok(a)
            },
        )
}

/// Normalized `(N−1)`-volumes of the sub-regions `Aᵢ`, measured directly in
/// the Bloch embedding through Gram determinants of edge vectors.
///
/// `n∥` is taken from the dephased operator-state, not from the Born
/// weights, so this is an independent route to the outcome probabilities.
pub fn exact_outcome_measures(state: &PureState, basis: &MeasurementBasis) -> Result<Vec<f64>> {
    if state.dim() != basis.dim() {
        return Err(Error::DimensionMismatch {
            expected: basis.dim(),
            found: state.dim(),
        });
    }
    let simplex = measurement_simplex(basis);
    let center = to_bloch(&decohere_operator(&state.projector(), basis)?);
    let vertices: Vec<&[f64]> = simplex.vertices().iter().map(|v| v.components()).collect();
    let full = simplex_volume(&vertices);
    let measures = (0..vertices.len())
        .map(|i| {
            let mut region = vertices.clone();
            region[i] = center.components();
            simplex_volume(&region) / full
        })
        .collect();
    Ok(measures)
}

/// `√det(EᵀE)` for the edge matrix `E` of a simplex given by its vertices.
/// The common `1/(N−1)!` factor cancels in ratios and is omitted.
fn simplex_volume(vertices: &[&[f64]]) -> f64 {
    let k = vertices.len() - 1;
    let ambient = vertices[0].len();
    let edges = DMatrix::from_fn(ambient, k, |r, c| vertices[c + 1][r] - vertices[0][r]);
    let gram = edges.transpose() * edges;
    gram.determinant().max(0.0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn bp(v: &[f64]) -> BreakPoint {
        BreakPoint::new(v.to_vec()).unwrap()
    }

    #[test]
    fn vertex_break_detaches_that_anchor() {
        // breaking at n₁ sends the particle to n₂
        assert_eq!(subregion_of(&bp(&[1.0, 0.0]), &[0.6, 0.4]).unwrap(), 1);
        assert_eq!(subregion_of(&bp(&[1.0, 0.0, 0.0]), &[0.2, 0.3, 0.5]).unwrap(), 1);
    }

    #[test]
    fn break_at_center_ties_low() {
        let p = [0.2, 0.3, 0.5];
        assert_eq!(subregion_of(&bp(&p), &p).unwrap(), 0);
    }

    #[test]
    fn interval_split() {
        // A₁ is the segment of length p₁ adjacent to vertex 2
        assert_eq!(subregion_of(&bp(&[0.25, 0.75]), &[0.75, 0.25]).unwrap(), 0);
        assert_eq!(subregion_of(&bp(&[0.8, 0.2]), &[0.75, 0.25]).unwrap(), 1);
    }

    #[test]
    fn unit_mass_ignores_lambda() {
        assert_eq!(subregion_of(&bp(&[0.9, 0.05, 0.05]), &[0.0, 0.0, 1.0]).unwrap(), 2);
    }

    #[test]
    fn zero_probability_never_selected() {
        assert_eq!(subregion_of(&bp(&[0.0, 0.5, 0.5]), &[0.0, 0.5, 0.5]).unwrap(), 1);
    }

    #[test]
    fn rejects_malformed() {
        assert!(BreakPoint::new(vec![0.5, 0.6]).is_err());
        assert!(BreakPoint::new(vec![-0.1, 1.1]).is_err());
        assert!(subregion_of(&bp(&[0.5, 0.5]), &[0.5, 0.6]).is_err());
        assert!(subregion_of(&bp(&[0.5, 0.5]), &[0.5, 0.25, 0.25]).is_err());
        assert!(sample_break_point(1, &RngStream::new(0, 0)).is_err());
    }

    #[test]
    fn break_points_are_valid() {
        for i in 0..1000 {
            let b = sample_break_point(4, &RngStream::new(9, i)).unwrap();
            assert!(BreakPoint::new(b.coordinates().to_vec()).is_ok());
        }
    }

    #[test]
    fn eigenstate_always_collapses_to_itself() {
        let basis = MeasurementBasis::computational(3).unwrap();
        let psi = PureState::basis(3, 2).unwrap();
        for i in 0..200 {
            let t = collapse(&psi, &basis, &RngStream::new(5, i)).unwrap();
            assert_eq!(t.outcome_index, 2);
            assert_eq!(t.outcome_state, psi);
        }
    }

    #[test]
    fn trace_is_consistent() {
        let basis = MeasurementBasis::computational(2).unwrap();
        let psi = PureState::qubit(PI / 3.0, 0.4);
        let t = collapse(&psi, &basis, &RngStream::new(1, 2)).unwrap();
        assert_eq!(t.on_simplex, decohere(&psi, &basis).unwrap().on_simplex);
        assert!((t.initial.norm() - 1.0).abs() < 1e-12);
        assert_eq!(&t.outcome_state, basis.eigenstate(t.outcome_index));
        let json = serde_json::to_value(&t).unwrap();
        assert!(json.get("breakPoint").is_some() && json.get("outcomeIndex").is_some());
    }

    #[test]
    fn exact_measures_match_examples() {
        let basis = MeasurementBasis::computational(2).unwrap();
        let m = exact_outcome_measures(&PureState::qubit(PI / 3.0, 0.0), &basis).unwrap();
        let split = (1.0 + (PI / 3.0).cos()) / 2.0;
        assert!((m[0] - split).abs() < 1e-12 && (m[1] - (1.0 - split)).abs() < 1e-12);

        let basis = MeasurementBasis::computational(3).unwrap();
        let m = exact_outcome_measures(&PureState::equal_superposition(3).unwrap(), &basis).unwrap();
        assert!(m.iter().all(|x| (x - 1.0 / 3.0).abs() < 1e-12));

        let m = exact_outcome_measures(&PureState::basis(3, 1).unwrap(), &basis).unwrap();
        assert!((m[1] - 1.0).abs() < 1e-12 && m[0].abs() < 1e-12 && m[2].abs() < 1e-12);
    }

    #[test]
    fn batch_matches_single_collapse() {
        let basis = MeasurementBasis::computational(3).unwrap();
        let psi = PureState::equal_superposition(3).unwrap();
        let batch = collapse_batch(&psi, &basis, 11, 50).unwrap();
        for row in &batch {
            let t = collapse(&psi, &basis, &RngStream::new(11, row.run)).unwrap();
            assert_eq!(t.outcome_index, row.outcome);
            assert_eq!(t.break_point, row.lambda);
        }
        let counts = outcome_counts(&psi, &basis, 11, 50).unwrap();
        for (k, c) in counts.iter().enumerate() {
            assert_eq!(*c as usize, batch.iter().filter(|r| r.outcome == k).count());
        }
    }
}
