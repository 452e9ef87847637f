//! Numerical checks of the radial construction.
//!
//! Each check samples the computed radial section and measures one property:
//! the covariant derivative along the radial field, the scaling identity
//! `y(1, t·z) = y(t, z)`, finite-difference smoothness at the origin, the
//! vanishing radial coefficient in the transported frame, and metric
//! preservation. All derivatives are second-order central differences.

mod report;

pub use report::{CheckReport, Measurement, Relation, SampleRecord, Verdict};

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::connection::{ConnectionField, Domain, FiberVector};
use crate::error::{Error, Result};
use crate::integrator::IntegratorConfig;
use crate::linalg::{invert_with_condition, least_squares};
use crate::radial::{radial_frame, radial_transport, radial_transport_partial};

fn shifted(z: &[f64], axis: usize, delta: f64) -> Vec<f64> {
    let mut p = z.to_vec();
    p[axis] += delta;
    p
}

fn along(v: &[f64], s: f64) -> Vec<f64> {
    v.iter().map(|x| s * x).collect()
}

fn section(
    field: &ConnectionField,
    z: &[f64],
    y0: &FiberVector,
    cfg: &IntegratorConfig,
) -> Result<FiberVector> {
    Ok(radial_transport(field, z, y0, cfg)?.y_final)
}

fn check_step(h: f64) -> Result<()> {
    if h > 0.0 && h.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "step must be positive, got {h}"
        )))
    }
}

fn check_stencil(domain: &Domain, z: &[f64], h: f64) -> Result<()> {
    domain.check(z)?;
    for i in 0..z.len() {
        domain.check(&shifted(z, i, h))?;
        domain.check(&shifted(z, i, -h))?;
    }
    Ok(())
}

/// Uniform point in the box scaled by `shrink`, optionally restricted to `|z| ≤ max_norm`.
pub(crate) fn sample_point<R: Rng>(
    rng: &mut R,
    domain: &Domain,
    shrink: f64,
    max_norm: Option<f64>,
) -> Vec<f64> {
    loop {
        let z: Vec<f64> = domain
            .lower()
            .iter()
            .zip(domain.upper())
            .map(|(&lo, &hi)| {
                if hi > lo {
                    rng.gen_range(shrink * lo..=shrink * hi)
                } else {
                    0.0
                }
            })
            .collect();
        match max_norm {
            Some(r) if z.iter().map(|v| v * v).sum::<f64>().sqrt() > r => continue,
            _ => return z,
        }
    }
}

fn sample_fiber<R: Rng>(rng: &mut R, k: usize) -> FiberVector {
    DVector::from_fn(k, |_, _| rng.gen_range(-1.0..=1.0))
}

fn sample_unit<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-3 && norm <= 1.0 {
            return v.iter().map(|x| x / norm).collect();
        }
    }
}

/// Coordinates of `(∇_{∂/∂ρ} ξ)(z)` for the radial section `ξ` through `y0`:
/// `Σ_i z_i [D_i ξ(z) + M_i(z) ξ(z)]` with `D_i` the central difference of step `h`.
/// Terms with `z_i = 0` are dropped, so the residual at the origin is exactly zero.
pub fn radial_residual(
    field: &ConnectionField,
    z: &[f64],
    y0: &FiberVector,
    h: f64,
    cfg: &IntegratorConfig,
) -> Result<FiberVector> {
    check_step(h)?;
    check_stencil(field.domain(), z, h)?;
    let mut residual = DVector::zeros(field.k());
    if z.iter().all(|&v| v == 0.0) {
        return Ok(residual);
    }
    let xi = section(field, z, y0, cfg)?;
    let mats = field.coefficients_at(z)?;
    for (i, &zi) in z.iter().enumerate() {
        if zi == 0.0 {
            continue;
        }
        let forward = section(field, &shifted(z, i, h), y0, cfg)?;
        let backward = section(field, &shifted(z, i, -h), y0, cfg)?;
        let derivative = (forward - backward) / (2.0 * h);
        residual += (derivative + &mats[i] * &xi) * zi;
    }
    Ok(residual)
}

/// `max |y(1, t·z) − y(t, z)|`.
pub fn scaling_deviation(
    field: &ConnectionField,
    z: &[f64],
    t: f64,
    y0: &FiberVector,
    cfg: &IntegratorConfig,
) -> Result<f64> {
    let shortened = radial_transport(field, &along(z, t), y0, cfg)?.y_final;
    let partial = radial_transport_partial(field, z, y0, t, cfg)?;
    Ok((shortened - partial).amax())
}

/// Draws `samples` random `(z, t, y0)` and reports the largest scaling deviation.
pub fn scaling_identity_check(
    field: &ConnectionField,
    samples: usize,
    seed: u64,
    bound: f64,
    cfg: &IntegratorConfig,
) -> CheckReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = CheckReport::new("scaling_identity", bound)
        .param("samples", samples)
        .param("seed", seed);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let z = sample_point(&mut rng, field.domain(), 1.0, None);
        let t: f64 = rng.gen_range(0.0..=1.0);
        let y0 = sample_fiber(&mut rng, field.k());
        let mut point = z.clone();
        point.push(t);
        match scaling_deviation(field, &z, t, &y0, cfg) {
            Ok(d) => {
                worst = worst.max(d);
                report.sample("z,t", &point, d);
            }
            Err(e) => report.sample_error("z,t", &point, e),
        }
    }
    report.measure(Measurement::at_most("max_deviation", worst, bound));
    report.finish()
}

/// Convergence order implied by errors `e_coarse`, `e_fine` at steps `h_coarse > h_fine`.
pub fn convergence_order(e_coarse: f64, e_fine: f64, h_coarse: f64, h_fine: f64) -> f64 {
    (e_coarse / e_fine).ln() / (h_coarse / h_fine).ln()
}

/// Bounds and steps for [`radial_residual_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualCheck {
    pub coarse_step: f64,
    pub fine_step: f64,
    pub bound: f64,
    pub min_order: f64,
    /// A coarse residual at or below `max(floor, 100 · integrator tolerance)` is
    /// at integrator noise level (for instance when the section is quadratic in
    /// `z`, so the central difference is exact) and is exempt from the order test.
    pub floor: f64,
}

impl Default for ResidualCheck {
    fn default() -> Self {
        ResidualCheck {
            coarse_step: 1e-3,
            fine_step: 1e-4,
            bound: 1e-6,
            min_order: 1.8,
            floor: 1e-10,
        }
    }
}

/// Radial residual at random points for two steps: the fine residual must be
/// within `bound` and the pair must show the order of a central difference.
pub fn radial_residual_check(
    field: &ConnectionField,
    samples: usize,
    seed: u64,
    spec: &ResidualCheck,
    cfg: &IntegratorConfig,
) -> CheckReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let floor = spec.floor.max(100.0 * cfg.tolerance());
    let mut report = CheckReport::new("radial_residual", spec.bound)
        .param("samples", samples)
        .param("seed", seed)
        .param("coarse_step", spec.coarse_step)
        .param("fine_step", spec.fine_step)
        .param("floor", floor);
    let mut worst_fine: f64 = 0.0;
    let mut worst_order = f64::INFINITY;
    let mut worst_floor_exempt: f64 = 0.0;
    for _ in 0..samples {
        let z = sample_point(&mut rng, field.domain(), 0.9, None);
        let y0 = sample_fiber(&mut rng, field.k());
        let pair = radial_residual(field, &z, &y0, spec.coarse_step, cfg).and_then(|c| {
            radial_residual(field, &z, &y0, spec.fine_step, cfg).map(|f| (c.amax(), f.amax()))
        });
        match pair {
            Ok((coarse, fine)) => {
                worst_fine = worst_fine.max(fine);
                if coarse > floor {
                    let order = convergence_order(coarse, fine, spec.coarse_step, spec.fine_step);
                    worst_order = worst_order.min(order);
                    report.sample("order", &z, order);
                } else {
                    worst_floor_exempt = worst_floor_exempt.max(coarse);
                }
                report.sample("fine_residual", &z, fine);
            }
            Err(e) => report.sample_error("residual", &z, e),
        }
    }
    report.measure(Measurement::at_most(
        "max_fine_residual",
        worst_fine,
        spec.bound,
    ));
    if worst_order.is_finite() {
        report.measure(Measurement::at_least(
            "min_order",
            worst_order,
            spec.min_order,
        ));
    }
    report.measure(Measurement::at_most(
        "max_converged_coarse_residual",
        worst_floor_exempt,
        floor,
    ));
    report.finish()
}

/// Central-difference derivative of `z ↦ y(1, z)` at the origin along `v`.
pub fn directional_derivative(
    field: &ConnectionField,
    y0: &FiberVector,
    v: &[f64],
    h: f64,
    cfg: &IntegratorConfig,
) -> Result<FiberVector> {
    check_step(h)?;
    let forward = section(field, &along(v, h), y0, cfg)?;
    let backward = section(field, &along(v, -h), y0, cfg)?;
    Ok((forward - backward) / (2.0 * h))
}

fn axis(n: usize, i: usize) -> Vec<f64> {
    let mut e = vec![0.0; n];
    e[i] = 1.0;
    e
}

/// `∂_i y(1, ·)` at the origin by central difference.
pub fn origin_derivative(
    field: &ConnectionField,
    y0: &FiberVector,
    i: usize,
    h: f64,
    cfg: &IntegratorConfig,
) -> Result<FiberVector> {
    directional_derivative(field, y0, &axis(field.n(), i), h, cfg)
}

/// Richardson-extrapolated derivative from steps `h` and `h/2` (fourth order).
pub fn richardson(
    field: &ConnectionField,
    y0: &FiberVector,
    v: &[f64],
    h: f64,
    cfg: &IntegratorConfig,
) -> Result<FiberVector> {
    let coarse = directional_derivative(field, y0, v, h, cfg)?;
    let fine = directional_derivative(field, y0, v, 0.5 * h, cfg)?;
    Ok((fine * 4.0 - coarse) / 3.0)
}

/// `∂_i² y(1, ·)` at the origin.
pub fn origin_second_derivative(
    field: &ConnectionField,
    y0: &FiberVector,
    i: usize,
    h: f64,
    cfg: &IntegratorConfig,
) -> Result<FiberVector> {
    check_step(h)?;
    let e = axis(field.n(), i);
    let forward = section(field, &along(&e, h), y0, cfg)?;
    let center = section(field, &vec![0.0; field.n()], y0, cfg)?;
    let backward = section(field, &along(&e, -h), y0, cfg)?;
    Ok((forward - center * 2.0 + backward) / (h * h))
}

/// Nested central difference at the origin: step `hi` along axis `i` of the
/// step-`hj` difference along axis `j`.
pub fn mixed_derivative(
    field: &ConnectionField,
    y0: &FiberVector,
    i: usize,
    j: usize,
    hi: f64,
    hj: f64,
    cfg: &IntegratorConfig,
) -> Result<FiberVector> {
    check_step(hi)?;
    check_step(hj)?;
    let n = field.n();
    let at = |si: f64, sj: f64| {
        let mut p = vec![0.0; n];
        p[i] += si;
        p[j] += sj;
        section(field, &p, y0, cfg)
    };
    let inner_plus = (at(hi, hj)? - at(hi, -hj)?) / (2.0 * hj);
    let inner_minus = (at(-hi, hj)? - at(-hi, -hj)?) / (2.0 * hj);
    Ok((inner_plus - inner_minus) / (2.0 * hi))
}

/// Steps, directions, and bounds for [`smoothness_probe`].
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothnessConfig {
    /// Strictly decreasing finite-difference steps; at least three.
    pub steps: Vec<f64>,
    /// Unit directions for the linearity test.
    pub directions: Vec<Vec<f64>>,
    pub min_order: f64,
    pub directional_bound: f64,
    pub mixed_bound: f64,
    /// Successive-difference changes below this count as converged.
    pub floor: f64,
    /// Use Richardson-extrapolated first derivatives in the linearity test.
    pub richardson: bool,
}

impl SmoothnessConfig {
    pub fn new(n: usize, directions: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        SmoothnessConfig {
            steps: vec![1e-2, 5e-3, 2.5e-3, 1.25e-3],
            directions: (0..directions).map(|_| sample_unit(&mut rng, n)).collect(),
            min_order: 1.8,
            directional_bound: 1e-6,
            mixed_bound: 1e-5,
            floor: 1e-10,
            richardson: false,
        }
    }
}

/// Finite-difference evidence that `z ↦ y(1, z)` is smooth at the origin:
/// (a) axis derivatives converge at second order as the step shrinks,
/// (b) directional derivatives equal the Jacobian applied to the direction,
/// (c) nested mixed differences agree when the axis order is swapped.
pub fn smoothness_probe(
    field: &ConnectionField,
    y0: &FiberVector,
    probe: &SmoothnessConfig,
    cfg: &IntegratorConfig,
) -> CheckReport {
    let n = field.n();
    let mut report = CheckReport::new("smoothness", probe.directional_bound)
        .param("steps", probe.steps.clone())
        .param("directions", probe.directions.len())
        .param("richardson", probe.richardson)
        .param("floor", probe.floor);
    let decreasing = probe.steps.windows(2).all(|w| w[0] > w[1] && w[1] > 0.0);
    if probe.steps.len() < 3 || !decreasing {
        report.sample_error(
            "steps",
            &probe.steps,
            "need at least three strictly decreasing positive steps",
        );
        return report.finish();
    }
    let origin = vec![0.0; n];

    // (a) convergence of axis derivatives
    let mut jacobian_cols: Vec<FiberVector> = Vec::with_capacity(n);
    for i in 0..n {
        let estimates: Result<Vec<FiberVector>> = probe
            .steps
            .iter()
            .map(|&h| origin_derivative(field, y0, i, h, cfg))
            .collect();
        let estimates = match estimates {
            Ok(v) => v,
            Err(e) => {
                report.sample_error(format!("axis_{}", i + 1), &origin, e);
                continue;
            }
        };
        let changes: Vec<f64> = estimates
            .windows(2)
            .map(|w| (&w[0] - &w[1]).amax())
            .collect();
        let mut worst_order = f64::INFINITY;
        for m in 0..changes.len() - 1 {
            if changes[m] <= probe.floor {
                continue;
            }
            let order = convergence_order(
                changes[m],
                changes[m + 1],
                probe.steps[m],
                probe.steps[m + 1],
            );
            worst_order = worst_order.min(order);
        }
        let label = format!("axis_{}", i + 1);
        if worst_order.is_finite() {
            report.sample(format!("{label}_order"), &axis(n, i), worst_order);
            report.measure(Measurement::at_least(
                format!("order_{label}"),
                worst_order,
                probe.min_order,
            ));
        } else {
            let largest = changes.iter().copied().fold(0.0, f64::max);
            report.measure(Measurement::at_most(
                format!("converged_change_{label}"),
                largest,
                probe.floor,
            ));
        }
        let h = *probe.steps.last().expect("checked non-empty");
        let col = if probe.richardson {
            richardson(field, y0, &axis(n, i), h, cfg)
        } else {
            Ok(estimates.last().expect("non-empty").clone())
        };
        match col {
            Ok(c) => jacobian_cols.push(c),
            Err(e) => report.sample_error(label, &origin, e),
        }
    }

    // (b) linearity of the derivative
    if jacobian_cols.len() == n {
        let jacobian = DMatrix::from_columns(&jacobian_cols);
        let h = *probe.steps.last().expect("checked non-empty");
        let mut worst: f64 = 0.0;
        for v in &probe.directions {
            let est = if probe.richardson {
                richardson(field, y0, v, h, cfg)
            } else {
                directional_derivative(field, y0, v, h, cfg)
            };
            match est {
                Ok(d) => {
                    let gap = (d - &jacobian * DVector::from_column_slice(v)).amax();
                    worst = worst.max(gap);
                    report.sample("direction", v, gap);
                }
                Err(e) => report.sample_error("direction", v, e),
            }
        }
        report.measure(Measurement::at_most(
            "max_directional_gap",
            worst,
            probe.directional_bound,
        ));
    }

    // (c) symmetry of mixed second differences
    let h = *probe.steps.last().expect("checked non-empty");
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let pair = mixed_derivative(field, y0, i, j, h, 0.5 * h, cfg)
                .and_then(|a| mixed_derivative(field, y0, j, i, h, 0.5 * h, cfg).map(|b| (a, b)));
            let point = [i as f64 + 1.0, j as f64 + 1.0];
            match pair {
                Ok((a, b)) => {
                    let gap = (a - b).amax();
                    worst = worst.max(gap);
                    report.sample("mixed_axes", &point, gap);
                }
                Err(e) => report.sample_error("mixed_axes", &point, e),
            }
        }
    }
    report.measure(Measurement::at_most(
        "max_mixed_asymmetry",
        worst,
        probe.mixed_bound,
    ));
    report.finish()
}

/// The connection expressed in the radially parallel frame at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeReport {
    /// `‖Σ_i z_i Γ̃_i(z)‖` (Frobenius).
    pub value: f64,
    /// 1-norm condition estimate of the frame `P(z)`.
    pub condition: f64,
    /// `Γ̃_i = P⁻¹ (D_i P + M_i P)` for every axis.
    pub connection_in_frame: Vec<DMatrix<f64>>,
    /// `Σ_i z_i Γ̃_i(z)`.
    pub radial_combination: DMatrix<f64>,
}

/// Transforms the connection into the radially transported frame and measures
/// its radial component, which vanishes for an exactly parallel frame.
pub fn radial_gauge_check(
    field: &ConnectionField,
    z: &[f64],
    h: f64,
    cfg: &IntegratorConfig,
) -> Result<GaugeReport> {
    check_step(h)?;
    check_stencil(field.domain(), z, h)?;
    let k = field.k();
    let frame = radial_frame(field, z, cfg)?;
    let (inverse, condition) = invert_with_condition(&frame)?;
    let mats = field.coefficients_at(z)?;
    let mut connection_in_frame = Vec::with_capacity(z.len());
    let mut radial_combination = DMatrix::zeros(k, k);
    for (i, &zi) in z.iter().enumerate() {
        let forward = radial_frame(field, &shifted(z, i, h), cfg)?;
        let backward = radial_frame(field, &shifted(z, i, -h), cfg)?;
        let derivative = (forward - backward) / (2.0 * h);
        let gauged = &inverse * (derivative + &mats[i] * &frame);
        if zi != 0.0 {
            radial_combination += &gauged * zi;
        }
        connection_in_frame.push(gauged);
    }
    Ok(GaugeReport {
        value: radial_combination.norm(),
        condition,
        connection_in_frame,
        radial_combination,
    })
}

/// Least-squares linear model `Γ̃_i(z) ≈ C_i + Σ_l z_l B_il` near the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeFit {
    /// `max |C_i[s, j]|`.
    pub constant_term: f64,
    /// `slopes[i][l] = B_il ≈ ∂_l Γ̃_i(0)`.
    pub slopes: Vec<Vec<DMatrix<f64>>>,
    /// `curvature[i][l] = F_il(0)` for comparison with the slopes; zero on the diagonal.
    pub curvature: Vec<Vec<DMatrix<f64>>>,
}

/// Fits the gauge-transformed connection on `pairs` antipodal point pairs in
/// the ball of radius `radius`.
#[allow(clippy::needless_range_loop)]
pub fn gauge_taylor_fit(
    field: &ConnectionField,
    radius: f64,
    pairs: usize,
    h: f64,
    seed: u64,
    cfg: &IntegratorConfig,
) -> Result<GaugeFit> {
    let (n, k) = (field.n(), field.k());
    if pairs == 0 || 2 * pairs < n + 1 {
        return Err(Error::InvalidParameter(format!(
            "need at least {} points for the fit",
            n + 1
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(2 * pairs);
    for _ in 0..pairs {
        let u = sample_unit(&mut rng, n);
        let r = radius * rng.gen_range(0.2..=1.0);
        points.push(along(&u, r));
        points.push(along(&u, -r));
    }
    let reports: Vec<GaugeReport> = points
        .iter()
        .map(|z| radial_gauge_check(field, z, h, cfg))
        .collect::<Result<_>>()?;
    let design = DMatrix::from_fn(points.len(), n + 1, |row, col| {
        if col == 0 {
            1.0
        } else {
            points[row][col - 1]
        }
    });
    let mut constant_term: f64 = 0.0;
    let mut slopes = vec![vec![DMatrix::zeros(k, k); n]; n];
    for i in 0..n {
        for s in 0..k {
            for j in 0..k {
                let rhs = DVector::from_iterator(
                    points.len(),
                    reports.iter().map(|r| r.connection_in_frame[i][(s, j)]),
                );
                let beta = least_squares(&design, &rhs)?;
                constant_term = constant_term.max(beta[0].abs());
                for l in 0..n {
                    slopes[i][l][(s, j)] = beta[l + 1];
                }
            }
        }
    }
    let origin = vec![0.0; n];
    let mut curvature = vec![vec![DMatrix::zeros(k, k); n]; n];
    for i in 0..n {
        for l in 0..n {
            if i != l {
                curvature[i][l] = field.curvature_at(&origin, i, l, h)?;
            }
        }
    }
    Ok(GaugeFit {
        constant_term,
        slopes,
        curvature,
    })
}

/// Settings for [`radial_gauge_report`].
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeCheck {
    pub step: f64,
    pub bound: f64,
    pub fit_radius: f64,
    pub fit_pairs: usize,
    pub fit_bound: f64,
}

impl Default for GaugeCheck {
    fn default() -> Self {
        GaugeCheck {
            step: 1e-4,
            bound: 1e-6,
            fit_radius: 5e-4,
            fit_pairs: 8,
            fit_bound: 1e-6,
        }
    }
}

/// Radial gauge residual at random points plus the Taylor fit at the origin.
pub fn radial_gauge_report(
    field: &ConnectionField,
    samples: usize,
    seed: u64,
    spec: &GaugeCheck,
    cfg: &IntegratorConfig,
) -> CheckReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = CheckReport::new("radial_gauge", spec.bound)
        .param("samples", samples)
        .param("seed", seed)
        .param("step", spec.step)
        .param("fit_radius", spec.fit_radius)
        .param("fit_points", 2 * spec.fit_pairs);
    let mut worst: f64 = 0.0;
    let mut worst_condition: f64 = 0.0;
    for _ in 0..samples {
        let z = sample_point(&mut rng, field.domain(), 0.9, None);
        match radial_gauge_check(field, &z, spec.step, cfg) {
            Ok(g) => {
                worst = worst.max(g.value);
                worst_condition = worst_condition.max(g.condition);
                report.sample("z", &z, g.value);
            }
            Err(e) => report.sample_error("z", &z, e),
        }
    }
    report.measure(Measurement::at_most(
        "max_radial_component",
        worst,
        spec.bound,
    ));
    report = report.param("max_condition", worst_condition);
    match gauge_taylor_fit(
        field,
        spec.fit_radius,
        spec.fit_pairs,
        spec.step,
        seed ^ 0xF17,
        cfg,
    ) {
        Ok(fit) => {
            report.measure(Measurement::at_most(
                "fit_constant_term",
                fit.constant_term,
                spec.fit_bound,
            ));
            let slopes: Vec<Vec<Vec<Vec<f64>>>> = fit
                .slopes
                .iter()
                .map(|row| row.iter().map(matrix_rows).collect())
                .collect();
            let curvature: Vec<Vec<Vec<Vec<f64>>>> = fit
                .curvature
                .iter()
                .map(|row| row.iter().map(matrix_rows).collect())
                .collect();
            report = report
                .param("fit_slopes", serde_json::json!(slopes))
                .param("curvature_at_origin", serde_json::json!(curvature));
        }
        Err(e) => report.sample_error("fit", &[0.0], e),
    }
    report.finish()
}

/// Row-major nested vectors.
pub fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

/// `|g(ξ, ξ)(z) − g(ξ_p, ξ_p)(0)|` for the radial section through `y0`.
pub fn metric_deviation(
    field: &ConnectionField,
    z: &[f64],
    y0: &FiberVector,
    cfg: &IntegratorConfig,
) -> Result<f64> {
    let g0 = field.metric_at(&vec![0.0; field.n()])?;
    let gz = field.metric_at(z)?;
    let xi = section(field, z, y0, cfg)?;
    let before = y0.dot(&(&g0 * y0));
    let after = xi.dot(&(&gz * &xi));
    Ok((after - before).abs())
}

/// Metric preservation at random `(z, y0)`; `max_norm` optionally restricts `|z|`.
pub fn metric_compat_check(
    field: &ConnectionField,
    samples: usize,
    seed: u64,
    bound: f64,
    max_norm: Option<f64>,
    cfg: &IntegratorConfig,
) -> CheckReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = CheckReport::new("metric_compat", bound)
        .param("samples", samples)
        .param("seed", seed);
    if field.metric().is_none() {
        report.sample_error("metric", &[], Error::MissingMetric);
        return report.finish();
    }
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let z = sample_point(&mut rng, field.domain(), 1.0, max_norm);
        let y0 = sample_fiber(&mut rng, field.k());
        match metric_deviation(field, &z, &y0, cfg) {
            Ok(d) => {
                worst = worst.max(d);
                report.sample("z", &z, d);
            }
            Err(e) => report.sample_error("z", &z, e),
        }
    }
    report.measure(Measurement::at_most("max_norm_change", worst, bound));
    report.finish()
}

/// Evaluates every coefficient on a `per_axis^n` lattice plus the origin.
pub fn domain_probe(field: &ConnectionField, per_axis: usize) -> CheckReport {
    let n = field.n();
    let per_axis = per_axis.max(2);
    let mut report = CheckReport::new("domain_probe", 0.0).param("per_axis", per_axis);
    let domain = field.domain();
    let total = per_axis.pow(n as u32);
    let mut points = vec![vec![0.0; n]];
    for idx in 0..total {
        let mut rem = idx;
        let mut p = vec![0.0; n];
        for a in (0..n).rev() {
            let m = rem % per_axis;
            rem /= per_axis;
            let (lo, hi) = (domain.lower()[a], domain.upper()[a]);
            p[a] = lo + (hi - lo) * (m as f64 / (per_axis - 1) as f64);
        }
        points.push(p);
    }
    for p in &points {
        if let Err(e) = field.coefficients_at(p) {
            report.sample_error("z", p, e);
        }
    }
    report = report.param("points", points.len());
    report.finish()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    DomainProbe,
    ScalingIdentity,
    RadialResidual,
    Smoothness,
    RadialGauge,
    MetricCompat,
}

impl CheckKind {
    pub const ALL: [CheckKind; 6] = [
        CheckKind::DomainProbe,
        CheckKind::ScalingIdentity,
        CheckKind::RadialResidual,
        CheckKind::Smoothness,
        CheckKind::RadialGauge,
        CheckKind::MetricCompat,
    ];

    fn seed_offset(self) -> u64 {
        match self {
            CheckKind::DomainProbe => 0,
            CheckKind::ScalingIdentity => 1,
            CheckKind::RadialResidual => 2,
            CheckKind::Smoothness => 3,
            CheckKind::RadialGauge => 4,
            CheckKind::MetricCompat => 5,
        }
    }
}

/// Which checks to run, with sample counts and bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    pub seed: u64,
    pub samples: usize,
    /// `None` runs every applicable check.
    pub checks: Option<Vec<CheckKind>>,
    pub scaling_bound: f64,
    pub residual_steps: [f64; 2],
    pub residual_bound: f64,
    pub residual_floor: f64,
    pub min_order: f64,
    pub smoothness_steps: Vec<f64>,
    pub directions: usize,
    pub directional_bound: f64,
    pub mixed_bound: f64,
    pub richardson: bool,
    pub gauge_step: f64,
    pub gauge_bound: f64,
    pub fit_radius: f64,
    pub fit_pairs: usize,
    pub fit_bound: f64,
    pub metric_bound: f64,
    pub metric_max_norm: Option<f64>,
    pub lattice: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        let residual = ResidualCheck::default();
        let gauge = GaugeCheck::default();
        SuiteConfig {
            seed: 0,
            samples: 20,
            checks: None,
            scaling_bound: 1e-9,
            residual_steps: [residual.coarse_step, residual.fine_step],
            residual_bound: residual.bound,
            residual_floor: residual.floor,
            min_order: residual.min_order,
            smoothness_steps: vec![1e-2, 5e-3, 2.5e-3, 1.25e-3],
            directions: 20,
            directional_bound: 1e-6,
            mixed_bound: 1e-5,
            richardson: false,
            gauge_step: gauge.step,
            gauge_bound: gauge.bound,
            fit_radius: gauge.fit_radius,
            fit_pairs: gauge.fit_pairs,
            fit_bound: gauge.fit_bound,
            metric_bound: 1e-8,
            metric_max_norm: None,
            lattice: 9,
        }
    }
}

fn run_check(
    kind: CheckKind,
    field: &ConnectionField,
    y0: &FiberVector,
    suite: &SuiteConfig,
    cfg: &IntegratorConfig,
) -> CheckReport {
    let seed = suite
        .seed
        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(kind.seed_offset());
    match kind {
        CheckKind::DomainProbe => domain_probe(field, suite.lattice),
        CheckKind::ScalingIdentity => {
            scaling_identity_check(field, suite.samples, seed, suite.scaling_bound, cfg)
        }
        CheckKind::RadialResidual => {
            let spec = ResidualCheck {
                coarse_step: suite.residual_steps[0],
                fine_step: suite.residual_steps[1],
                bound: suite.residual_bound,
                min_order: suite.min_order,
                floor: suite.residual_floor,
            };
            radial_residual_check(field, suite.samples, seed, &spec, cfg)
        }
        CheckKind::Smoothness => {
            let mut probe = SmoothnessConfig::new(field.n(), suite.directions, seed);
            probe.steps = suite.smoothness_steps.clone();
            probe.min_order = suite.min_order;
            probe.directional_bound = suite.directional_bound;
            probe.mixed_bound = suite.mixed_bound;
            probe.richardson = suite.richardson;
            smoothness_probe(field, y0, &probe, cfg).param("seed", seed)
        }
        CheckKind::RadialGauge => {
            let spec = GaugeCheck {
                step: suite.gauge_step,
                bound: suite.gauge_bound,
                fit_radius: suite.fit_radius,
                fit_pairs: suite.fit_pairs,
                fit_bound: suite.fit_bound,
            };
            radial_gauge_report(field, suite.samples, seed, &spec, cfg)
        }
        CheckKind::MetricCompat => metric_compat_check(
            field,
            suite.samples,
            seed,
            suite.metric_bound,
            suite.metric_max_norm,
            cfg,
        ),
    }
}

/// Runs the configured checks (concurrently) and aggregates them. The report
/// depends only on the inputs, not on scheduling. Failures inside a check are
/// recorded in that check's report.
pub fn run_suite(
    field: &ConnectionField,
    y0: &FiberVector,
    suite: &SuiteConfig,
    cfg: &IntegratorConfig,
) -> CheckReport {
    let kinds: Vec<CheckKind> = match &suite.checks {
        Some(list) => list.clone(),
        None => CheckKind::ALL
            .into_iter()
            .filter(|k| *k != CheckKind::MetricCompat || field.metric().is_some())
            .collect(),
    };
    let mut report = CheckReport::new("suite", 0.0)
        .param("seed", suite.seed)
        .param("family", field.family().name())
        .param("n", field.n())
        .param("k", field.k())
        .param("samples", suite.samples);
    if y0.len() != field.k() {
        report.sample_error(
            "initial",
            y0.as_slice(),
            Error::Shape(format!(
                "initial vector has {} components, rank is {}",
                y0.len(),
                field.k()
            )),
        );
        return report.finish();
    }
    report.checks = kinds
        .par_iter()
        .map(|&kind| run_check(kind, field, y0, suite, cfg))
        .collect();
    let failed = report.checks.iter().filter(|c| !c.passed()).count();
    report.measure(Measurement::at_most("failed_checks", failed as f64, 0.0));
    report.finish()
}
