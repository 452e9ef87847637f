//! Explicit solvers for linear systems `y' = A(t) y`.
//!
//! Two independent schemes are provided so results can be cross-checked:
//! classical fixed-step RK4 and the adaptive Dormand–Prince 5(4) pair.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Classical fourth-order Runge–Kutta on a uniform grid.
    Rk4,
    /// Dormand–Prince 5(4) with embedded error control.
    Rk45,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratorConfig {
    pub method: Method,
    /// Number of RK4 steps over the whole interval.
    pub steps: usize,
    pub atol: f64,
    pub rtol: f64,
    pub max_steps: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            method: Method::Rk45,
            steps: 256,
            atol: 1e-12,
            rtol: 1e-10,
            max_steps: 1_000_000,
        }
    }
}

impl IntegratorConfig {
    pub fn rk4(steps: usize) -> Self {
        IntegratorConfig {
            method: Method::Rk4,
            steps,
            ..Default::default()
        }
    }

    pub fn rk45(atol: f64, rtol: f64) -> Self {
        IntegratorConfig {
            method: Method::Rk45,
            atol,
            rtol,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.atol > 0.0 && self.rtol > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "tolerances must be positive (atol = {}, rtol = {})",
                self.atol, self.rtol
            )));
        }
        if self.steps == 0 || self.max_steps == 0 {
            return Err(Error::InvalidParameter(
                "step counts must be at least 1".into(),
            ));
        }
        Ok(())
    }

    /// Representative accuracy of one solve, used to scale comparison bounds.
    pub fn tolerance(&self) -> f64 {
        self.atol.max(self.rtol)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub y: DVector<f64>,
    /// Adaptive: sum of accepted local error estimates (max-norm).
    /// RK4: Richardson estimate from a half-resolution run.
    pub error_estimate: f64,
    pub steps: usize,
}

/// Integrates `y' = A(t) y` from `t0` to `t1`.
///
/// `t0 == t1` returns `y0` unchanged. `A` is only sampled inside `[t0, t1]`.
pub fn integrate_linear<F>(
    mut a: F,
    y0: &DVector<f64>,
    t0: f64,
    t1: f64,
    cfg: &IntegratorConfig,
) -> Result<Solution>
where
    F: FnMut(f64) -> Result<DMatrix<f64>>,
{
    cfg.validate()?;
    if t0.partial_cmp(&t1).is_none_or(|o| o.is_gt()) {
        return Err(Error::InvalidParameter(format!(
            "need t0 <= t1, got [{t0}, {t1}]"
        )));
    }
    if y0.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite { t: t0 });
    }
    if t0 == t1 {
        return Ok(Solution {
            y: y0.clone(),
            error_estimate: 0.0,
            steps: 0,
        });
    }
    match cfg.method {
        Method::Rk4 => {
            let fine = rk4(&mut a, y0, t0, t1, cfg.steps)?;
            let coarse_steps = if cfg.steps >= 2 { cfg.steps / 2 } else { 2 };
            let coarse = rk4(&mut a, y0, t0, t1, coarse_steps)?;
            let ratio = cfg.steps as f64 / coarse_steps as f64;
            let diff = (&fine - &coarse).amax();
            let error_estimate = diff / (ratio.powi(4) - 1.0).abs();
            Ok(Solution {
                y: fine,
                error_estimate,
                steps: cfg.steps,
            })
        }
        Method::Rk45 => dopri5(&mut a, y0, t0, t1, cfg),
    }
}

fn rk4<F>(a: &mut F, y0: &DVector<f64>, t0: f64, t1: f64, steps: usize) -> Result<DVector<f64>>
where
    F: FnMut(f64) -> Result<DMatrix<f64>>,
{
    let span = t1 - t0;
    let h = span / steps as f64;
    let mut y = y0.clone();
    let mut a_start = a(t0)?;
    for i in 0..steps {
        let t = t0 + span * (i as f64 / steps as f64);
        let t_end = if i + 1 == steps {
            t1
        } else {
            t0 + span * ((i + 1) as f64 / steps as f64)
        };
        let a_mid = a((t + 0.5 * h).min(t1))?;
        let a_end = a(t_end)?;
        let k1 = &a_start * &y;
        let k2 = &a_mid * (&y + &k1 * (0.5 * h));
        let k3 = &a_mid * (&y + &k2 * (0.5 * h));
        let k4 = &a_end * (&y + &k3 * h);
        y += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { t: t_end });
        }
        a_start = a_end;
    }
    Ok(y)
}

// Dormand–Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A2: [f64; 1] = [1.0 / 5.0];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [
    19372.0 / 6561.0,
    -25360.0 / 2187.0,
    64448.0 / 6561.0,
    -212.0 / 729.0,
];
const A6: [f64; 5] = [
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
];
/// Fifth-order weights (also the last stage row, FSAL).
const B: [f64; 6] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
];
/// Difference between fifth- and fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 5.0;

fn combine(y: &DVector<f64>, h: f64, coeffs: &[f64], ks: &[DVector<f64>]) -> DVector<f64> {
    let mut out = y.clone();
    for (c, k) in coeffs.iter().zip(ks) {
        if *c != 0.0 {
            out.axpy(h * c, k, 1.0);
        }
    }
    out
}

fn scaled_norm(
    v: &DVector<f64>,
    y: &DVector<f64>,
    y_new: &DVector<f64>,
    cfg: &IntegratorConfig,
) -> f64 {
    v.iter()
        .zip(y.iter().zip(y_new.iter()))
        .map(|(e, (a, b))| e.abs() / (cfg.atol + cfg.rtol * a.abs().max(b.abs())))
        .fold(0.0, f64::max)
}

fn initial_step<F>(
    a: &mut F,
    y0: &DVector<f64>,
    f0: &DVector<f64>,
    t0: f64,
    span: f64,
    cfg: &IntegratorConfig,
) -> Result<f64>
where
    F: FnMut(f64) -> Result<DMatrix<f64>>,
{
    let d0 = scaled_norm(y0, y0, y0, cfg);
    let d1 = scaled_norm(f0, y0, y0, cfg);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    let h0 = h0.min(span);
    let y1 = y0 + f0 * h0;
    let f1 = a(t0 + h0)? * &y1;
    let d2 = scaled_norm(&(f1 - f0), y0, y0, cfg) / h0;
    let dmax = d1.max(d2);
    let h1 = if dmax <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / dmax).powf(1.0 / 5.0)
    };
    Ok((100.0 * h0).min(h1).min(span))
}

fn dopri5<F>(
    a: &mut F,
    y0: &DVector<f64>,
    t0: f64,
    t1: f64,
    cfg: &IntegratorConfig,
) -> Result<Solution>
where
    F: FnMut(f64) -> Result<DMatrix<f64>>,
{
    let span = t1 - t0;
    let mut t = t0;
    let mut y = y0.clone();
    let mut k1 = a(t0)? * &y;
    let mut h = initial_step(a, &y, &k1, t0, span, cfg)?;
    let mut accepted = 0usize;
    let mut attempts = 0usize;
    let mut error_sum = 0.0;
    let mut rejected_last = false;

    while t < t1 {
        if attempts >= cfg.max_steps {
            return Err(Error::MaxStepsExceeded {
                max_steps: cfg.max_steps,
                t,
            });
        }
        attempts += 1;
        let last = t + h >= t1;
        if last {
            h = t1 - t;
        }
        if h <= 1e-14 * t.abs().max(1.0) {
            return Err(Error::StepSizeUnderflow { t });
        }
        let t_new = if last { t1 } else { t + h };
        let stage_time = |c: f64| (t + c * h).min(t1);

        let mut ks: Vec<DVector<f64>> = Vec::with_capacity(7);
        ks.push(k1.clone());
        for (stage, row) in [&A2[..], &A3[..], &A4[..], &A5[..]].into_iter().enumerate() {
            let ys = combine(&y, h, row, &ks);
            ks.push(a(stage_time(C[stage + 1]))? * ys);
        }
        let ys = combine(&y, h, &A6, &ks);
        let a_end = a(t_new)?;
        ks.push(&a_end * ys);
        let y_new = combine(&y, h, &B, &ks);
        if y_new.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { t: t_new });
        }
        let k7 = &a_end * &y_new;
        ks.push(k7);

        let err_vec = combine(&DVector::zeros(y.len()), h, &E, &ks);
        let err = scaled_norm(&err_vec, &y, &y_new, cfg);

        let mut factor = if err == 0.0 {
            FAC_MAX
        } else {
            (SAFETY * err.powf(-1.0 / 5.0)).clamp(FAC_MIN, FAC_MAX)
        };

        if err <= 1.0 {
            t = t_new;
            y = y_new;
            k1 = ks.pop().expect("seven stages");
            accepted += 1;
            error_sum += err_vec.amax();
            if rejected_last {
                factor = factor.min(1.0);
            }
            rejected_last = false;
        } else {
            rejected_last = true;
        }
        h *= factor;
    }
    Ok(Solution {
        y,
        error_estimate: error_sum,
        steps: accepted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar(a: f64) -> impl FnMut(f64) -> Result<DMatrix<f64>> {
        move |_| Ok(DMatrix::from_element(1, 1, a))
    }

    fn one(v: f64) -> DVector<f64> {
        DVector::from_element(1, v)
    }

    #[test]
    fn zero_field_is_identity() {
        let y0 = DVector::from_vec(vec![1.5, -2.0, 0.25]);
        for cfg in [IntegratorConfig::default(), IntegratorConfig::rk4(16)] {
            let sol = integrate_linear(|_| Ok(DMatrix::zeros(3, 3)), &y0, 0.0, 1.0, &cfg).unwrap();
            assert_eq!(sol.y, y0);
        }
    }

    #[test]
    fn empty_interval() {
        let sol = integrate_linear(
            scalar(3.0),
            &one(2.0),
            0.5,
            0.5,
            &IntegratorConfig::default(),
        )
        .unwrap();
        assert_eq!(sol.y, one(2.0));
        assert_eq!(sol.steps, 0);
    }

    #[test]
    fn scalar_exponential() {
        for a in [-2.0, -0.3, 0.7, 1.9] {
            let want = f64::exp(a) * 1.25;
            let sol = integrate_linear(
                scalar(a),
                &one(1.25),
                0.0,
                1.0,
                &IntegratorConfig::default(),
            )
            .unwrap();
            assert!(((sol.y[0] - want) / want).abs() < 1e-10, "a = {a}");
            assert!(sol.steps > 0);
        }
    }

    #[test]
    fn time_dependent_coefficient() {
        // ∫_0^1 2t dt = 1
        let sol = integrate_linear(
            |t| Ok(DMatrix::from_element(1, 1, 2.0 * t)),
            &one(1.0),
            0.0,
            1.0,
            &IntegratorConfig::default(),
        )
        .unwrap();
        assert!(((sol.y[0] - std::f64::consts::E) / std::f64::consts::E).abs() < 1e-10);
    }

    #[test]
    fn rk4_error_estimate_tracks_true_error() {
        let sol =
            integrate_linear(scalar(1.0), &one(1.0), 0.0, 1.0, &IntegratorConfig::rk4(16)).unwrap();
        let err = (sol.y[0] - std::f64::consts::E).abs();
        assert!(sol.error_estimate > 0.3 * err && sol.error_estimate < 3.0 * err);
    }

    #[test]
    fn rejects_bad_input() {
        let cfg = IntegratorConfig {
            atol: 0.0,
            ..Default::default()
        };
        assert!(integrate_linear(scalar(1.0), &one(1.0), 0.0, 1.0, &cfg).is_err());
        let cfg = IntegratorConfig::default();
        assert!(integrate_linear(scalar(1.0), &one(1.0), 1.0, 0.0, &cfg).is_err());
        assert!(integrate_linear(scalar(1.0), &one(f64::NAN), 0.0, 1.0, &cfg).is_err());
    }

    #[test]
    fn step_budget_is_enforced() {
        let cfg = IntegratorConfig {
            max_steps: 3,
            ..Default::default()
        };
        let err = integrate_linear(scalar(30.0), &one(1.0), 0.0, 1.0, &cfg).unwrap_err();
        assert!(matches!(err, Error::MaxStepsExceeded { max_steps: 3, .. }));
    }

    #[test]
    fn blow_up_is_reported() {
        let err = integrate_linear(scalar(1e80), &one(1.0), 0.0, 1.0, &IntegratorConfig::rk4(4))
            .unwrap_err();
        assert!(matches!(err, Error::NonFinite { .. }));
    }

    #[test]
    fn coefficient_errors_propagate() {
        let err = integrate_linear(
            |_| Err(Error::MissingMetric),
            &one(1.0),
            0.0,
            1.0,
            &IntegratorConfig::default(),
        )
        .unwrap_err();
        assert_eq!(err, Error::MissingMetric);
    }
}
