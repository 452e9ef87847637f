//! JSON run configuration.
//!
//! ```json
//! {
//!   "bundle": { "n": 2, "k": 2, "domain": { "min": [-1, -1], "max": [1, 1] } },
//!   "connection": { "builtin": "rotation", "params": { "omega": 1.0 } },
//!   "initial": [1, 0],
//!   "integrator": { "method": "rk45", "atol": 1e-12, "rtol": 1e-10 },
//!   "grid": { "axes": [ { "min": -1, "max": 1, "count": 3 }, { "min": -1, "max": 1, "count": 3 } ] },
//!   "checks": { "seed": 7, "samples": 20 },
//!   "output": { "grid_csv": "grid.csv", "check_json": "report.json" }
//! }
//! ```
//!
//! Instead of `builtin`, a connection may give `expressions`, an `n × k × k`
//! array of strings indexed `[i][s][j]`, and optionally a `metric`: either
//! `"euclidean"` or a `k × k` array of expression strings.

use std::path::{Path, PathBuf};

use nalgebra::DVector;
use serde::Deserialize;

use crate::connection::{
    make_builtin, BuiltinParams, BundleSpec, ConnectionField, Domain, FiberVector, Metric,
};
use crate::error::{Error, Result};
use crate::expr;
use crate::integrator::IntegratorConfig;
use crate::verify::SuiteConfig;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainBlock {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BundleBlock {
    pub n: usize,
    pub k: usize,
    pub domain: DomainBlock,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum MetricBlock {
    Named(String),
    Expressions(Vec<Vec<String>>),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConnectionBlock {
    pub builtin: Option<String>,
    #[serde(default)]
    pub params: BuiltinParams,
    pub expressions: Option<Vec<Vec<Vec<String>>>>,
    pub metric: Option<MetricBlock>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisBlock {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridBlock {
    pub axes: Vec<AxisBlock>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    pub grid_csv: Option<PathBuf>,
    pub check_json: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub bundle: BundleBlock,
    pub connection: ConnectionBlock,
    pub initial: Vec<f64>,
    #[serde(default)]
    pub integrator: IntegratorConfig,
    pub grid: Option<GridBlock>,
    #[serde(default)]
    pub checks: SuiteConfig,
    #[serde(default)]
    pub output: OutputBlock,
}

/// A validated configuration.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub field: ConnectionField,
    pub initial: FiberVector,
    pub integrator: IntegratorConfig,
    pub grid: Option<Vec<Vec<f64>>>,
    pub checks: SuiteConfig,
    pub output: OutputBlock,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidParameter(format!("config: {e}")))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidParameter(format!("cannot read {}: {e}", path.display())))?;
        RunConfig::from_json(&text)
    }

    pub fn load(self) -> Result<Loaded> {
        let BundleBlock { n, k, domain } = self.bundle;
        let domain = Domain::new(domain.min, domain.max)?;
        let conn = self.connection;
        let field = match (&conn.builtin, &conn.expressions) {
            (Some(name), None) => make_builtin(name, n, k, domain.clone(), &conn.params)?,
            (None, Some(exprs)) => {
                ConnectionField::from_expressions(BundleSpec::new(n, k, domain.clone())?, exprs)?
            }
            _ => {
                return Err(Error::InvalidParameter(
                    "connection needs exactly one of `builtin` or `expressions`".into(),
                ))
            }
        };
        let field = match conn.metric {
            None => field,
            Some(MetricBlock::Named(name)) if name == "euclidean" => {
                field.with_metric(Metric::Euclidean)?
            }
            Some(MetricBlock::Named(name)) => {
                return Err(Error::InvalidParameter(format!("unknown metric '{name}'")))
            }
            Some(MetricBlock::Expressions(rows)) => {
                let parsed = rows
                    .iter()
                    .enumerate()
                    .map(|(a, row)| {
                        row.iter()
                            .enumerate()
                            .map(|(b, src)| {
                                expr::parse(src, n).map_err(|source| Error::Parse {
                                    label: format!("metric[{a}][{b}]"),
                                    source,
                                })
                            })
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()?;
                field.with_metric(Metric::Expressions(parsed))?
            }
        };
        if self.initial.len() != k {
            return Err(Error::Shape(format!(
                "initial vector has {} components, k = {k}",
                self.initial.len()
            )));
        }
        self.integrator.validate()?;
        let grid = match self.grid {
            None => None,
            Some(g) => Some(grid_points(&g, &domain)?),
        };
        Ok(Loaded {
            field,
            initial: DVector::from_vec(self.initial),
            integrator: self.integrator,
            grid,
            checks: self.checks,
            output: self.output,
        })
    }
}

/// Grid points in lexicographic index order, last axis fastest.
pub fn grid_points(grid: &GridBlock, domain: &Domain) -> Result<Vec<Vec<f64>>> {
    if grid.axes.len() != domain.dim() {
        return Err(Error::Shape(format!(
            "grid has {} axes, base dimension is {}",
            grid.axes.len(),
            domain.dim()
        )));
    }
    let values: Vec<Vec<f64>> = grid
        .axes
        .iter()
        .enumerate()
        .map(|(a, ax)| {
            if ax.count == 0 || ax.min.partial_cmp(&ax.max).is_none_or(|o| o.is_gt()) {
                return Err(Error::InvalidParameter(format!(
                    "grid axis {} needs count >= 1 and min <= max",
                    a + 1
                )));
            }
            Ok((0..ax.count)
                .map(|i| {
                    if ax.count == 1 {
                        ax.min
                    } else {
                        ax.min + (ax.max - ax.min) * (i as f64 / (ax.count - 1) as f64)
                    }
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    let mut points = vec![Vec::new()];
    for axis in &values {
        points = points
            .into_iter()
            .flat_map(|prefix: Vec<f64>| {
                axis.iter().map(move |&v| {
                    let mut p = prefix.clone();
                    p.push(v);
                    p
                })
            })
            .collect();
    }
    for p in &points {
        domain.check(p)?;
    }
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;

    const ROTATION: &str = r#"{
        "bundle": { "n": 2, "k": 2, "domain": { "min": [-1, -1], "max": [1, 1] } },
        "connection": { "builtin": "rotation", "params": { "omega": 1.0 } },
        "initial": [1, 0],
        "grid": { "axes": [ { "min": -1, "max": 1, "count": 2 }, { "min": 0, "max": 1, "count": 3 } ] }
    }"#;

    #[test]
    fn loads_builtin() {
        let loaded = RunConfig::from_json(ROTATION).unwrap().load().unwrap();
        assert_eq!(loaded.field.family(), crate::connection::Family::Rotation);
        let grid = loaded.grid.unwrap();
        assert_eq!(grid.len(), 6);
        assert_eq!(grid[0], vec![-1.0, 0.0]);
        assert_eq!(grid[1], vec![-1.0, 0.5]);
        assert_eq!(grid[3], vec![1.0, 0.0]);
    }

    #[test]
    fn loads_expressions_with_metric() {
        let text = r#"{
            "bundle": { "n": 1, "k": 1, "domain": { "min": [-2], "max": [2] } },
            "connection": { "expressions": [[["x1"]]], "metric": [["1"]] },
            "initial": [1]
        }"#;
        let loaded = RunConfig::from_json(text).unwrap().load().unwrap();
        assert!(loaded.field.metric().is_some());
    }

    #[test]
    fn rejects_inconsistent_shapes() {
        let bad_initial = ROTATION.replace("[1, 0]", "[1, 0, 0]");
        assert!(matches!(
            RunConfig::from_json(&bad_initial).unwrap().load(),
            Err(Error::Shape(_))
        ));
        let outside = ROTATION.replace(r#""min": 0, "max": 1"#, r#""min": 0, "max": 2"#);
        assert!(matches!(
            RunConfig::from_json(&outside).unwrap().load(),
            Err(Error::OutsideDomain { .. })
        ));
        let both = ROTATION.replace(
            r#""builtin": "rotation","#,
            r#""builtin": "rotation", "expressions": [],"#,
        );
        assert!(RunConfig::from_json(&both).unwrap().load().is_err());
        assert!(RunConfig::from_json("{}").is_err());
    }
}
