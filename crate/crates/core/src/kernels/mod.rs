//! Fundamental-solution kernels of the fractional diffusion-wave equation
//! in R^n: the forcing kernel Γ_{α,n}, the initial-value kernel Z₁ = H_α,
//! their transforms, and fitted pointwise envelopes.

mod bounds;
mod fhalf;
mod gamma;
mod table;
mod z1;

pub use bounds::{
    bound_violations, envelope, fit_bound, BoundKind, BoundParams, BoundSample, EnvelopeInputs,
};
pub use fhalf::f_alpha_half;
pub use gamma::{
    fourier_gamma_transform, fourier_gamma_transform_check, gamma_kernel, gamma_kernel_with,
    laplace_gamma_transform, laplace_gamma_transform_quadrature, KernelPath, TransformCheck,
};
pub use table::{KernelKind, RadialKernel};
pub use z1::{z1_closed_form, z1_closed_form_derivative, z1_kernel, z1_radial_derivative, z2_closed_form};
