//! End-to-end numerical checks of the limiting-amplitude principle in R³,
//! pointwise stabilization of the homogeneous problem, and subordination to
//! the heat equation.

mod ball;
mod forced;
mod green;
mod source;
mod stabilization;
mod subordination;

pub use ball::{ball_average, BallAverageMethod, BallAverageReport};
pub use forced::{
    fit_uniform_kernel_bound, forced_solution_r3, forcing_kernel, forcing_kernel_samples, initial_value_part, initial_velocity_part, limiting_amplitude_r3,
    uniform_kernel_violations, CauchyData, RatioPoint,
};
pub use green::{green_convolution, green_function, green_function_r3};
pub use source::{CompactSource, SourceKind};
pub use stabilization::{
    radial_center_value, required_torus_length, stabilization_run, InitialData, ProbeSeries,
    StabilizationReport, StabilizationRoute,
};
pub use subordination::{required_span, subordination_transform};
