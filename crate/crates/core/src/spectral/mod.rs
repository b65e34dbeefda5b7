//! Forced fractional evolution for finite spectral decompositions, and a
//! Fourier-symbol solver for the field Cauchy problem on a periodic lattice.

mod lattice;
mod operator;

pub use lattice::{
    evolve_field, evolve_field_with, z2_symbol, FieldMetadata, LatticeField, ZeroMode,
};
pub use operator::{
    evolve_operator, geometric_schedule, limiting_amplitude_operator, FiniteSpectralOperator,
    LimitingAmplitudeReport, ResidualPoint,
};
