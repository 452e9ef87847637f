//! Radially parallel sections of a vector bundle with a linear connection.
//!
//! Given connection coefficients `Γ_{ij}^s` on a coordinate box around `p = 0`
//! and an initial value `ξ_p`, the section `ξ` parallel along every ray from
//! the origin is obtained by integrating a linear ODE along each ray. The
//! [`verify`] module checks the defining properties of the result numerically.

pub mod cli;
pub mod connection;
pub mod error;
pub mod expr;
pub mod integrator;
pub mod linalg;
pub mod radial;
pub mod verify;

pub use connection::{
    make_builtin, BuiltinParams, BundleSpec, ConnectionField, Domain, Family, FiberVector, Metric,
};
pub use error::{Error, Result};
pub use integrator::{integrate_linear, IntegratorConfig, Method, Solution};
pub use radial::{
    curve_transport, polar_transport, pullback_transport, radial_frame, radial_section_grid,
    radial_transport, radial_transport_partial, RadialTransportResult,
};
pub use verify::{run_suite, CheckReport, SuiteConfig, Verdict};
