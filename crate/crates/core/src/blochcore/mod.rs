//! State representations, measurement simplexes, Born probabilities and
//! decoherence onto the simplex.

mod basis;
mod bloch;
pub mod gellmann;
mod state;

pub use basis::{
    born_probabilities, decohere, decohere_operator, measurement_simplex, Decoherence, MeasurementBasis,
    SimplexGeometry,
};
pub use bloch::{from_bloch, to_bloch, BlochVector};
pub use state::{OperatorState, PureState};
