//! Radially parallel sections.
//!
//! For an endpoint `z` the coordinates `y(t, z)` of the section transported
//! along `t ↦ t·z` satisfy
//!
//! ```text
//! ∂y/∂t = f(t, y, z) = −Σ_i z_i M_i(t·z) y,    y(0, z) = ξ_p,
//! ```
//!
//! and the radial section is `ξ(z) = y(1, z)`. The same endpoint map is also
//! reachable as polar transport along a unit direction, and as transport
//! along the interval factor of the bundle pulled back by `μ(t, x) = t·x`;
//! both routes are implemented separately so they can be compared.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::connection::{ConnectionField, FiberVector};
use crate::error::{Error, Result};
use crate::integrator::{integrate_linear, IntegratorConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct RadialTransportResult {
    pub z: Vec<f64>,
    pub y_final: FiberVector,
    pub error_estimate: f64,
    pub steps: usize,
    /// `(t, y(t, z))` at the requested sample times, when asked for.
    pub trajectory: Option<Vec<(f64, FiberVector)>>,
}

fn check_fiber(field: &ConnectionField, y0: &FiberVector) -> Result<()> {
    if y0.len() != field.k() {
        return Err(Error::Shape(format!(
            "fiber vector has {} components, rank is {}",
            y0.len(),
            field.k()
        )));
    }
    Ok(())
}

fn scaled(z: &[f64], t: f64) -> Vec<f64> {
    z.iter().map(|v| t * v).collect()
}

/// The matrix `A(t) = −Σ_i z_i M_i(t·z)` of the radial system.
fn radial_matrix(field: &ConnectionField, z: &[f64], t: f64) -> Result<DMatrix<f64>> {
    Ok(-field.contract(&scaled(z, t), z)?)
}

/// `f(t, y, z) = −Σ_i z_i M_i(t·z) y`.
pub fn rhs(t: f64, y: &FiberVector, z: &[f64], field: &ConnectionField) -> Result<FiberVector> {
    check_fiber(field, y)?;
    Ok(radial_matrix(field, z, t)? * y)
}

fn transport_to(
    field: &ConnectionField,
    z: &[f64],
    y0: &FiberVector,
    t: f64,
    cfg: &IntegratorConfig,
) -> Result<crate::integrator::Solution> {
    check_fiber(field, y0)?;
    field.domain().check(z)?;
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidParameter(format!(
            "t must lie in [0, 1], got {t}"
        )));
    }
    integrate_linear(|s| radial_matrix(field, z, s), y0, 0.0, t, cfg)
}

/// Transports `y0` from the origin to `z` along the ray; `y_final = y(1, z)`.
pub fn radial_transport(
    field: &ConnectionField,
    z: &[f64],
    y0: &FiberVector,
    cfg: &IntegratorConfig,
) -> Result<RadialTransportResult> {
    let sol = transport_to(field, z, y0, 1.0, cfg)?;
    Ok(RadialTransportResult {
        z: z.to_vec(),
        y_final: sol.y,
        error_estimate: sol.error_estimate,
        steps: sol.steps,
        trajectory: None,
    })
}

/// As [`radial_transport`], additionally recording `y(t, z)` at each of
/// `samples` (values in `[0, 1]`, any order). The integration is split at the
/// sample times, so `y_final` may differ from the unsampled run at the level
/// of the integrator tolerance.
pub fn radial_transport_sampled(
    field: &ConnectionField,
    z: &[f64],
    y0: &FiberVector,
    samples: &[f64],
    cfg: &IntegratorConfig,
) -> Result<RadialTransportResult> {
    check_fiber(field, y0)?;
    field.domain().check(z)?;
    let mut times = samples.to_vec();
    if let Some(bad) = times.iter().find(|t| !(0.0..=1.0).contains(*t)) {
        return Err(Error::InvalidParameter(format!(
            "sample time {bad} outside [0, 1]"
        )));
    }
    times.sort_by(f64::total_cmp);
    let mut trajectory = Vec::with_capacity(times.len());
    let (mut t, mut y) = (0.0, y0.clone());
    let (mut error_estimate, mut steps) = (0.0, 0);
    for &ts in times.iter().chain(std::iter::once(&1.0)) {
        let sol = integrate_linear(|s| radial_matrix(field, z, s), &y, t, ts, cfg)?;
        error_estimate += sol.error_estimate;
        steps += sol.steps;
        t = ts;
        y = sol.y;
        if trajectory.len() < times.len() {
            trajectory.push((t, y.clone()));
        }
    }
    Ok(RadialTransportResult {
        z: z.to_vec(),
        y_final: y,
        error_estimate,
        steps,
        trajectory: Some(trajectory),
    })
}

/// `y(t, z)`: transport along the first fraction `t` of the ray to `z`.
pub fn radial_transport_partial(
    field: &ConnectionField,
    z: &[f64],
    y0: &FiberVector,
    t: f64,
    cfg: &IntegratorConfig,
) -> Result<FiberVector> {
    Ok(transport_to(field, z, y0, t, cfg)?.y)
}

/// `P(z)`: column `j` is the transport of the `j`-th basis vector, so the
/// columns form the radially parallel frame written in the coordinate frame.
pub fn radial_frame(
    field: &ConnectionField,
    z: &[f64],
    cfg: &IntegratorConfig,
) -> Result<DMatrix<f64>> {
    let k = field.k();
    let mut frame = DMatrix::zeros(k, k);
    for j in 0..k {
        let mut e = DVector::zeros(k);
        e[j] = 1.0;
        let col = radial_transport(field, z, &e, cfg)?.y_final;
        frame.set_column(j, &col);
    }
    Ok(frame)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SectionSample {
    pub z: Vec<f64>,
    pub xi: FiberVector,
}

/// Evaluates `ξ(z) = y(1, z)` at every grid point, in parallel on the current
/// rayon pool. Output order matches `grid`. The first failing point (in grid
/// order) is reported with its coordinates.
pub fn radial_section_grid(
    field: &ConnectionField,
    y0: &FiberVector,
    grid: &[Vec<f64>],
    cfg: &IntegratorConfig,
) -> Result<Vec<SectionSample>> {
    check_fiber(field, y0)?;
    let results: Vec<Result<SectionSample>> = grid
        .par_iter()
        .map(|z| {
            radial_transport(field, z, y0, cfg)
                .map(|r| SectionSample {
                    z: z.clone(),
                    xi: r.y_final,
                })
                .map_err(|e| Error::AtPoint {
                    point: z.clone(),
                    source: Box::new(e),
                })
        })
        .collect();
    results.into_iter().collect()
}

/// Parallel transport along a piecewise-linear path. Each segment is traversed
/// at unit speed, `y' = −Σ_i u_i M_i(a + s u) y` for `s ∈ [0, |b − a|]`.
pub fn curve_transport(
    field: &ConnectionField,
    curve: &[Vec<f64>],
    y0: &FiberVector,
    cfg: &IntegratorConfig,
) -> Result<FiberVector> {
    check_fiber(field, y0)?;
    for p in curve {
        field.domain().check(p)?;
    }
    let mut y = y0.clone();
    for seg in curve.windows(2) {
        let (a, b) = (&seg[0], &seg[1]);
        let delta: Vec<f64> = b.iter().zip(a).map(|(b, a)| b - a).collect();
        let length = delta.iter().map(|d| d * d).sum::<f64>().sqrt();
        if length == 0.0 {
            continue;
        }
        let u: Vec<f64> = delta.iter().map(|d| d / length).collect();
        let point = |s: f64| -> Vec<f64> {
            let frac = s / length;
            a.iter().zip(&delta).map(|(a, d)| a + frac * d).collect()
        };
        y = integrate_linear(
            |s| Ok(-field.contract(&point(s), &u)?),
            &y,
            0.0,
            length,
            cfg,
        )?
        .y;
    }
    Ok(y)
}

/// Transport along the ray of unit direction `u` out to radius `r`:
/// `y' = −Σ_i u_i M_i(s·u) y` on `s ∈ [0, r]`.
pub fn polar_transport(
    field: &ConnectionField,
    u: &[f64],
    r: f64,
    y0: &FiberVector,
    cfg: &IntegratorConfig,
) -> Result<FiberVector> {
    check_fiber(field, y0)?;
    if u.len() != field.n() {
        return Err(Error::Shape(format!(
            "direction has {} components, base dimension is {}",
            u.len(),
            field.n()
        )));
    }
    let norm = u.iter().map(|v| v * v).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::NotUnitDirection { norm });
    }
    if !(r >= 0.0 && r.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "radius must be non-negative, got {r}"
        )));
    }
    field.domain().check(&scaled(u, r))?;
    Ok(integrate_linear(|s| Ok(-field.contract(&scaled(u, s), u)?), y0, 0.0, r, cfg)?.y)
}

/// Coefficient matrices of the connection pulled back to `[0, 1] × Rⁿ` by
/// `μ(t, x) = t·x`, at `(t, x)`. Entry 0 is the `dt` component
/// `Σ_i x_i M_i(t·x)`; entry `i + 1` is the `dx_i` component `t·M_i(t·x)`.
pub fn pullback_coefficients(
    field: &ConnectionField,
    t: f64,
    x: &[f64],
) -> Result<Vec<DMatrix<f64>>> {
    let mats = field.coefficients_at(&scaled(x, t))?;
    let mut dt = DMatrix::zeros(field.k(), field.k());
    for (m, &xi) in mats.iter().zip(x) {
        dt += m * xi;
    }
    let mut out = Vec::with_capacity(mats.len() + 1);
    out.push(dt);
    out.extend(mats.into_iter().map(|m| m * t));
    Ok(out)
}

/// Transport in the pulled-back bundle along the interval factor, from
/// `(0, x)` to `(1, x)`. The initial condition lives on the slice `{0} × Rⁿ`.
pub fn pullback_transport(
    field: &ConnectionField,
    x: &[f64],
    y0: &FiberVector,
    cfg: &IntegratorConfig,
) -> Result<FiberVector> {
    check_fiber(field, y0)?;
    field.domain().check(x)?;
    let coefficient = |t: f64| -> Result<DMatrix<f64>> {
        let mut mats = pullback_coefficients(field, t, x)?;
        Ok(-mats.swap_remove(0))
    };
    Ok(integrate_linear(coefficient, y0, 0.0, 1.0, cfg)?.y)
}
