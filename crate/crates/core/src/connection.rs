//! Connections on a trivialized bundle over one coordinate box.
//!
//! A connection is stored through its coefficient matrices `M_i(z)`, one per
//! base axis, with `M_i[(s, j)] = Γ_{ij}^s(z)` so that `(M_i y)^s = Σ_j Γ_{ij}^s y^j`.
//! The frame is the identity trivialization: a section is its coordinate vector.

use nalgebra::{DMatrix, DVector};
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::expr::{self, Expr};

/// Coordinates of a fiber element in the frame `(σ_1, …, σ_k)`.
pub type FiberVector = DVector<f64>;

/// Axis-aligned box containing the origin. Boxes containing 0 are star-shaped about 0.
#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Domain {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() || lower.is_empty() {
            return Err(Error::Shape(format!(
                "domain bounds have lengths {} and {}",
                lower.len(),
                upper.len()
            )));
        }
        for (axis, (&lo, &hi)) in lower.iter().zip(&upper).enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo <= 0.0 && hi >= 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "domain axis {} is [{lo}, {hi}]; it must be finite and contain 0",
                    axis + 1
                )));
            }
        }
        Ok(Domain { lower, upper })
    }

    /// The box `[-half_width, half_width]^n`.
    pub fn symmetric(n: usize, half_width: f64) -> Result<Self> {
        Domain::new(vec![-half_width; n], vec![half_width; n])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    /// Largest half-extent over the axes.
    pub fn half_width(&self) -> f64 {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(lo, hi)| 0.5 * (hi - lo))
            .fold(0.0, f64::max)
    }

    pub fn contains(&self, z: &[f64]) -> bool {
        self.check(z).is_ok()
    }

    /// Errors name the first violated bound. A relative slack of 1e-12 absorbs
    /// rounding in points computed as `a + t (b - a)`.
    pub fn check(&self, z: &[f64]) -> Result<()> {
        if z.len() != self.dim() {
            return Err(Error::Shape(format!(
                "point has {} coordinates, base dimension is {}",
                z.len(),
                self.dim()
            )));
        }
        for (axis, ((&v, &lo), &hi)) in z.iter().zip(&self.lower).zip(&self.upper).enumerate() {
            let slack = |b: f64| 1e-12 * b.abs().max(1.0);
            if v.is_nan() || v < lo - slack(lo) {
                return Err(self.violation(z, axis, v, lo, false));
            }
            if v > hi + slack(hi) {
                return Err(self.violation(z, axis, v, hi, true));
            }
        }
        Ok(())
    }

    fn violation(&self, z: &[f64], axis: usize, value: f64, bound: f64, upper: bool) -> Error {
        Error::OutsideDomain {
            point: z.to_vec(),
            axis: axis + 1,
            value,
            bound,
            upper,
        }
    }
}

/// Base dimension, fiber rank, and the coordinate box `U` around `p = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct BundleSpec {
    pub n: usize,
    pub k: usize,
    pub domain: Domain,
}

impl BundleSpec {
    pub fn new(n: usize, k: usize, domain: Domain) -> Result<Self> {
        if n == 0 || k == 0 {
            return Err(Error::Shape(format!(
                "need n >= 1 and k >= 1, got n = {n}, k = {k}"
            )));
        }
        if domain.dim() != n {
            return Err(Error::Shape(format!(
                "domain has dimension {}, base dimension is {n}",
                domain.dim()
            )));
        }
        Ok(BundleSpec { n, k, domain })
    }
}

/// Which constructor produced a field. Used for reporting and to pick checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Flat,
    Constant,
    AbelianPoly,
    SphereLeviCivita,
    Rotation,
    Expressions,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Flat => "flat",
            Family::Constant => "constant",
            Family::AbelianPoly => "abelian_poly",
            Family::SphereLeviCivita => "sphere_levicivita",
            Family::Rotation => "rotation",
            Family::Expressions => "expressions",
        }
    }
}

#[derive(Debug, Clone)]
enum Coefficients {
    Zero,
    Constant(Vec<DMatrix<f64>>),
    /// Indexed `[i][s][j]`.
    Expressions(Vec<Vec<Vec<Expr>>>),
    Sphere {
        radius: f64,
    },
}

/// Fiber metric attached to a connection, used only by compatibility checks.
#[derive(Debug, Clone)]
pub enum Metric {
    Euclidean,
    /// Round sphere of the given radius in a stereographic chart:
    /// `g = (2R² / (R² + |z|²))² δ`.
    Sphere {
        radius: f64,
    },
    /// `k × k` expressions indexed `[a][b]`.
    Expressions(Vec<Vec<Expr>>),
}

/// Parameters accepted by [`make_builtin`]. Each family reads only its own fields.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BuiltinParams {
    /// `constant`: `n` matrices indexed `[i][s][j]`.
    pub matrices: Option<Vec<Vec<Vec<f64>>>>,
    /// `abelian_poly`: one expression per base axis.
    pub exprs: Option<Vec<String>>,
    /// `rotation`: angular rate.
    pub omega: Option<f64>,
    /// `sphere_levicivita`: sphere radius.
    pub radius: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct ConnectionField {
    spec: BundleSpec,
    family: Family,
    coefficients: Coefficients,
    metric: Option<Metric>,
}

/// `J = [[0, -1], [1, 0]]`.
pub fn rotation_generator() -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0])
}

impl ConnectionField {
    pub fn flat(spec: BundleSpec) -> Self {
        ConnectionField {
            spec,
            family: Family::Flat,
            coefficients: Coefficients::Zero,
            metric: None,
        }
    }

    pub fn constant(spec: BundleSpec, matrices: Vec<DMatrix<f64>>) -> Result<Self> {
        if matrices.len() != spec.n {
            return Err(Error::Shape(format!(
                "expected {} constant matrices, got {}",
                spec.n,
                matrices.len()
            )));
        }
        for (i, m) in matrices.iter().enumerate() {
            if m.shape() != (spec.k, spec.k) {
                return Err(Error::Shape(format!(
                    "matrix {} has shape {:?}, expected ({k}, {k})",
                    i + 1,
                    m.shape(),
                    k = spec.k
                )));
            }
            if m.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "matrix {} is not finite",
                    i + 1
                )));
            }
        }
        Ok(ConnectionField {
            spec,
            family: Family::Constant,
            coefficients: Coefficients::Constant(matrices),
            metric: None,
        })
    }

    /// `n × k × k` expression strings indexed `[i][s][j]`.
    pub fn from_expressions<S: AsRef<str>>(
        spec: BundleSpec,
        sources: &[Vec<Vec<S>>],
    ) -> Result<Self> {
        let (n, k) = (spec.n, spec.k);
        if sources.len() != n {
            return Err(Error::Shape(format!(
                "expression array has {} blocks, expected n = {n}",
                sources.len()
            )));
        }
        let mut gamma = Vec::with_capacity(n);
        for (i, block) in sources.iter().enumerate() {
            if block.len() != k || block.iter().any(|row| row.len() != k) {
                return Err(Error::Shape(format!(
                    "expression block {} is not {k} x {k}",
                    i + 1
                )));
            }
            let mut parsed = Vec::with_capacity(k);
            for (s, row) in block.iter().enumerate() {
                let mut parsed_row = Vec::with_capacity(k);
                for (j, src) in row.iter().enumerate() {
                    let e = expr::parse(src.as_ref(), n).map_err(|source| Error::Parse {
                        label: format!("gamma[{i}][{s}][{j}]"),
                        source,
                    })?;
                    parsed_row.push(e);
                }
                parsed.push(parsed_row);
            }
            gamma.push(parsed);
        }
        Ok(ConnectionField {
            spec,
            family: Family::Expressions,
            coefficients: Coefficients::Expressions(gamma),
            metric: None,
        })
    }

    /// Line bundle (`k = 1`) with `Γ_i` given by one expression per axis.
    pub fn abelian_poly<S: AsRef<str>>(domain: Domain, exprs: &[S]) -> Result<Self> {
        let n = domain.dim();
        let spec = BundleSpec::new(n, 1, domain)?;
        if exprs.len() != n {
            return Err(Error::Shape(format!(
                "abelian_poly needs {n} expressions, got {}",
                exprs.len()
            )));
        }
        let sources: Vec<Vec<Vec<&str>>> = exprs.iter().map(|e| vec![vec![e.as_ref()]]).collect();
        let mut field = ConnectionField::from_expressions(spec, &sources)?;
        field.family = Family::AbelianPoly;
        Ok(field)
    }

    /// Levi-Civita connection of the round sphere of radius `radius` in a
    /// stereographic chart (`n = k = 2`), with its metric attached.
    pub fn sphere_levicivita(domain: Domain, radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "radius must be positive, got {radius}"
            )));
        }
        let spec = BundleSpec::new(2, 2, domain)?;
        Ok(ConnectionField {
            spec,
            family: Family::SphereLeviCivita,
            coefficients: Coefficients::Sphere { radius },
            metric: Some(Metric::Sphere { radius }),
        })
    }

    /// `M_1 = 0`, `M_2 = ω J` on a rank-2 bundle over the plane.
    pub fn rotation(domain: Domain, omega: f64) -> Result<Self> {
        if !omega.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "omega must be finite, got {omega}"
            )));
        }
        let spec = BundleSpec::new(2, 2, domain)?;
        let mats = vec![DMatrix::zeros(2, 2), rotation_generator() * omega];
        let mut field = ConnectionField::constant(spec, mats)?;
        field.family = Family::Rotation;
        Ok(field)
    }

    pub fn with_metric(mut self, metric: Metric) -> Result<Self> {
        if let Metric::Expressions(rows) = &metric {
            let k = self.spec.k;
            if rows.len() != k || rows.iter().any(|r| r.len() != k) {
                return Err(Error::Shape(format!("metric must be {k} x {k}")));
            }
            if rows
                .iter()
                .flatten()
                .any(|e| e.max_variable() > self.spec.n)
            {
                return Err(Error::Shape("metric uses a variable beyond n".into()));
            }
        }
        if let Metric::Sphere { .. } = metric {
            if self.spec.k != 2 || self.spec.n != 2 {
                return Err(Error::Shape("sphere metric needs n = k = 2".into()));
            }
        }
        self.metric = Some(metric);
        Ok(self)
    }

    pub fn spec(&self) -> &BundleSpec {
        &self.spec
    }

    pub fn n(&self) -> usize {
        self.spec.n
    }

    pub fn k(&self) -> usize {
        self.spec.k
    }

    pub fn domain(&self) -> &Domain {
        &self.spec.domain
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn metric(&self) -> Option<&Metric> {
        self.metric.as_ref()
    }

    /// Finite-difference step used when none is given: `1e-4 ×` the domain half-width.
    pub fn default_step(&self) -> f64 {
        1e-4 * self.domain().half_width()
    }

    /// The matrices `M_1(z), …, M_n(z)`.
    pub fn coefficients_at(&self, z: &[f64]) -> Result<Vec<DMatrix<f64>>> {
        self.domain().check(z)?;
        let (n, k) = (self.n(), self.k());
        match &self.coefficients {
            Coefficients::Zero => Ok(vec![DMatrix::zeros(k, k); n]),
            Coefficients::Constant(mats) => Ok(mats.clone()),
            Coefficients::Expressions(gamma) => gamma
                .iter()
                .map(|block| {
                    let mut m = DMatrix::zeros(k, k);
                    for (s, row) in block.iter().enumerate() {
                        for (j, e) in row.iter().enumerate() {
                            m[(s, j)] = e.eval(z).map_err(|source| Error::Eval {
                                point: z.to_vec(),
                                source,
                            })?;
                        }
                    }
                    Ok(m)
                })
                .collect(),
            Coefficients::Sphere { radius } => Ok(sphere_christoffels(z, *radius)),
        }
    }

    /// `Σ_i w_i M_i(z)`, skipping axes with zero weight.
    pub fn contract(&self, z: &[f64], weights: &[f64]) -> Result<DMatrix<f64>> {
        let mats = self.coefficients_at(z)?;
        let mut out = DMatrix::zeros(self.k(), self.k());
        for (m, &w) in mats.iter().zip(weights) {
            if w != 0.0 {
                out += m * w;
            }
        }
        Ok(out)
    }

    pub fn metric_at(&self, z: &[f64]) -> Result<DMatrix<f64>> {
        self.domain().check(z)?;
        let k = self.k();
        match self.metric.as_ref().ok_or(Error::MissingMetric)? {
            Metric::Euclidean => Ok(DMatrix::identity(k, k)),
            Metric::Sphere { radius } => {
                let r2 = radius * radius;
                let lambda = 2.0 * r2 / (r2 + z[0] * z[0] + z[1] * z[1]);
                Ok(DMatrix::identity(2, 2) * (lambda * lambda))
            }
            Metric::Expressions(rows) => {
                let mut g = DMatrix::zeros(k, k);
                for (a, row) in rows.iter().enumerate() {
                    for (b, e) in row.iter().enumerate() {
                        g[(a, b)] = e.eval(z).map_err(|source| Error::Eval {
                            point: z.to_vec(),
                            source,
                        })?;
                    }
                }
                Ok(g)
            }
        }
    }

    /// `F_ij = ∂_i M_j − ∂_j M_i + [M_i, M_j]` with central differences of step `h`.
    /// Axes are 0-based. Swapping `i` and `j` negates the result exactly.
    pub fn curvature_at(&self, z: &[f64], i: usize, j: usize, h: f64) -> Result<DMatrix<f64>> {
        let n = self.n();
        if i >= n || j >= n || i == j {
            return Err(Error::InvalidParameter(format!(
                "curvature needs two distinct axes below {n}, got {i} and {j}"
            )));
        }
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "step must be positive, got {h}"
            )));
        }
        let shifted = |axis: usize, delta: f64| {
            let mut p = z.to_vec();
            p[axis] += delta;
            p
        };
        let d_i_mj = (&self.coefficients_at(&shifted(i, h))?[j]
            - &self.coefficients_at(&shifted(i, -h))?[j])
            / (2.0 * h);
        let d_j_mi = (&self.coefficients_at(&shifted(j, h))?[i]
            - &self.coefficients_at(&shifted(j, -h))?[i])
            / (2.0 * h);
        let m = self.coefficients_at(z)?;
        let commutator = &m[i] * &m[j] - &m[j] * &m[i];
        Ok((d_i_mj - d_j_mi) + commutator)
    }
}

/// Christoffel symbols of `g = e^{2φ} δ`, `φ = ln(2R² / (R² + |z|²))`:
/// `Γ^s_ij = δ_sj ∂_iφ + δ_si ∂_jφ − δ_ij ∂_sφ`.
fn sphere_christoffels(z: &[f64], radius: f64) -> Vec<DMatrix<f64>> {
    let denom = radius * radius + z[0] * z[0] + z[1] * z[1];
    let dphi = [-2.0 * z[0] / denom, -2.0 * z[1] / denom];
    (0..2)
        .map(|i| {
            DMatrix::from_fn(2, 2, |s, j| {
                let mut v = 0.0;
                if s == j {
                    v += dphi[i];
                }
                if s == i {
                    v += dphi[j];
                }
                if i == j {
                    v -= dphi[s];
                }
                v
            })
        })
        .collect()
}

/// Builds one of the named families: `flat`, `constant`, `abelian_poly`,
/// `sphere_levicivita`, `rotation`.
pub fn make_builtin(
    name: &str,
    n: usize,
    k: usize,
    domain: Domain,
    params: &BuiltinParams,
) -> Result<ConnectionField> {
    let need_shape = |want_n: usize, want_k: usize| {
        if n != want_n || k != want_k {
            Err(Error::Shape(format!(
                "{name} needs n = {want_n}, k = {want_k}; got n = {n}, k = {k}"
            )))
        } else {
            Ok(())
        }
    };
    match name {
        "flat" => Ok(ConnectionField::flat(BundleSpec::new(n, k, domain)?)),
        "constant" => {
            let raw = params
                .matrices
                .as_ref()
                .ok_or_else(|| Error::InvalidParameter("constant needs `matrices`".into()))?;
            let mut mats = Vec::with_capacity(raw.len());
            for (i, rows) in raw.iter().enumerate() {
                if rows.len() != k || rows.iter().any(|r| r.len() != k) {
                    return Err(Error::Shape(format!("matrix {} is not {k} x {k}", i + 1)));
                }
                mats.push(DMatrix::from_fn(k, k, |s, j| rows[s][j]));
            }
            ConnectionField::constant(BundleSpec::new(n, k, domain)?, mats)
        }
        "abelian_poly" => {
            need_shape(n, 1)?;
            let exprs = params
                .exprs
                .as_ref()
                .ok_or_else(|| Error::InvalidParameter("abelian_poly needs `exprs`".into()))?;
            if domain.dim() != n {
                return Err(Error::Shape(format!(
                    "domain dimension {} != n = {n}",
                    domain.dim()
                )));
            }
            ConnectionField::abelian_poly(domain, exprs)
        }
        "sphere_levicivita" => {
            need_shape(2, 2)?;
            ConnectionField::sphere_levicivita(domain, params.radius.unwrap_or(1.0))
        }
        "rotation" => {
            need_shape(2, 2)?;
            ConnectionField::rotation(domain, params.omega.unwrap_or(1.0))
        }
        other => Err(Error::UnknownFamily(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_box(n: usize) -> Domain {
        Domain::symmetric(n, 1.0).unwrap()
    }

    #[test]
    fn domain_must_contain_origin() {
        assert!(Domain::new(vec![0.1], vec![1.0]).is_err());
        assert!(Domain::new(vec![-1.0, -1.0], vec![1.0]).is_err());
        let d = Domain::new(vec![-1.0, -0.5], vec![2.0, 0.5]).unwrap();
        assert!(d.contains(&[1.9, -0.5]));
        match d.check(&[0.0, 0.7]) {
            Err(Error::OutsideDomain {
                axis, bound, upper, ..
            }) => {
                assert_eq!((axis, bound, upper), (2, 0.5, true));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(d.half_width(), 1.5);
    }

    #[test]
    fn flat_is_zero() {
        let f = make_builtin("flat", 3, 2, unit_box(3), &BuiltinParams::default()).unwrap();
        for m in f.coefficients_at(&[0.3, -0.2, 0.9]).unwrap() {
            assert_eq!(m, DMatrix::zeros(2, 2));
        }
    }

    #[test]
    fn constant_is_position_independent() {
        let params = BuiltinParams {
            matrices: Some(vec![
                vec![vec![1.0, 2.0], vec![3.0, 4.0]],
                vec![vec![0.0, -1.0], vec![1.0, 0.5]],
            ]),
            ..Default::default()
        };
        let f = make_builtin("constant", 2, 2, unit_box(2), &params).unwrap();
        let a = f.coefficients_at(&[0.1, 0.2]).unwrap();
        let b = f.coefficients_at(&[-0.9, 0.4]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a[0][(1, 0)], 3.0);
    }

    #[test]
    fn abelian_poly_evaluates() {
        let params = BuiltinParams {
            exprs: Some(vec!["-x2".into(), "x1".into()]),
            ..Default::default()
        };
        let f = make_builtin(
            "abelian_poly",
            2,
            1,
            Domain::symmetric(2, 3.0).unwrap(),
            &params,
        )
        .unwrap();
        let m = f.coefficients_at(&[1.0, 2.0]).unwrap();
        assert_eq!(m[0][(0, 0)], -2.0);
        assert_eq!(m[1][(0, 0)], 1.0);
    }

    #[test]
    fn builtin_errors() {
        let p = BuiltinParams::default();
        assert_eq!(
            make_builtin("torus", 2, 2, unit_box(2), &p).unwrap_err(),
            Error::UnknownFamily("torus".into())
        );
        assert!(matches!(
            make_builtin("rotation", 3, 2, unit_box(3), &p),
            Err(Error::Shape(_))
        ));
        assert!(matches!(
            make_builtin("constant", 2, 2, unit_box(2), &p),
            Err(Error::InvalidParameter(_))
        ));
        let bad = BuiltinParams {
            matrices: Some(vec![vec![vec![1.0]]]),
            ..Default::default()
        };
        assert!(matches!(
            make_builtin("constant", 2, 1, unit_box(2), &bad),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn expression_errors_surface() {
        let spec = BundleSpec::new(1, 1, unit_box(1)).unwrap();
        let err = ConnectionField::from_expressions(spec.clone(), &[vec![vec!["x2"]]]).unwrap_err();
        assert!(matches!(err, Error::Parse { .. }));
        let f = ConnectionField::from_expressions(spec, &[vec![vec!["1/x1"]]]).unwrap();
        assert!(matches!(f.coefficients_at(&[0.0]), Err(Error::Eval { .. })));
        assert!(matches!(
            f.coefficients_at(&[2.0]),
            Err(Error::OutsideDomain { .. })
        ));
    }

    #[test]
    fn curvature_of_simple_fields() {
        let flat = ConnectionField::flat(BundleSpec::new(2, 3, unit_box(2)).unwrap());
        assert_eq!(
            flat.curvature_at(&[0.1, 0.2], 0, 1, 1e-3).unwrap(),
            DMatrix::zeros(3, 3)
        );

        let c1 = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        let c2 = DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 1.0, 0.0]);
        let spec = BundleSpec::new(2, 2, unit_box(2)).unwrap();
        let f = ConnectionField::constant(spec, vec![c1.clone(), c2.clone()]).unwrap();
        let got = f.curvature_at(&[0.3, 0.3], 0, 1, 1e-4).unwrap();
        assert_eq!(got, &c1 * &c2 - &c2 * &c1);

        // ∂_1Γ_2 − ∂_2Γ_1 = 1 − (−1)
        let ab = ConnectionField::abelian_poly(unit_box(2), &["-x2", "x1"]).unwrap();
        let f12 = ab.curvature_at(&[0.2, -0.4], 0, 1, 1e-4).unwrap();
        assert!((f12[(0, 0)] - 2.0).abs() < 1e-8);
        assert!(ab.curvature_at(&[0.0, 0.0], 0, 0, 1e-4).is_err());
    }

    #[test]
    fn sphere_metric_at_origin() {
        let s = ConnectionField::sphere_levicivita(unit_box(2), 1.0).unwrap();
        assert_eq!(
            s.metric_at(&[0.0, 0.0]).unwrap(),
            DMatrix::identity(2, 2) * 4.0
        );
        for m in s.coefficients_at(&[0.0, 0.0]).unwrap() {
            assert_eq!(m, DMatrix::zeros(2, 2));
        }
        let flat = ConnectionField::flat(BundleSpec::new(2, 2, unit_box(2)).unwrap());
        assert_eq!(
            flat.metric_at(&[0.0, 0.0]).unwrap_err(),
            Error::MissingMetric
        );
    }

    #[test]
    fn default_step_scales_with_domain() {
        let f = ConnectionField::flat(
            BundleSpec::new(1, 1, Domain::symmetric(1, 2.0).unwrap()).unwrap(),
        );
        assert_eq!(f.default_step(), 2e-4);
    }
}
