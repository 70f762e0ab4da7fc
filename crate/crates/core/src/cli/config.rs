//! JSON experiment documents.
//!
//! ```json
//! {
//!   "p": 2.0,
//!   "c": { "radius": 10.0, "dim": 2 },
//!   "maps": [
//!     { "type": "segment_contraction", "center": [0, 0], "beta": 0.5 },
//!     { "type": "projection", "set": { "lower": [-5, -5], "upper": [5, 5],
//!                                      "halfspaces": [{ "normal": [1, 1], "offset": 1 }] } },
//!     { "type": "affine", "m": [[0.5, 0], [0, 0.5]], "t": [0, 0], "fixed_point": [0, 0] }
//!   ],
//!   "bifunction": { "type": "convex_cost", "q": [[2, 0], [0, 2]], "c": [0, 0] },
//!   "weights": { "a0": 0.5 },
//!   "r": 1.0,
//!   "x0": [5, 3],
//!   "stop_tol": 1e-8,
//!   "max_outer": 500,
//!   "variant": "multivalued_pt",
//!   "solver": { "tol": 1e-9 },
//!   "output": { "format": "csv", "path": "trace.csv", "log_y_n": false }
//! }
//! ```
//!
//! `weights` is either `{ "a0": .. }` or an explicit list `[a_0, a_1, …]`;
//! lists not summing to 1 are renormalized with a warning. Every field except
//! `p`, `c`, `maps` and `x0` has a default.

use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::algorithm::{normalize_weights, AlgorithmConfig, RSchedule, Variant, WeightSchedule};
use crate::convex::{BoxBounds, HalfSpace, Polyhedron, SolverSettings};
use crate::equilibrium::Bifunction;
use crate::error::{Error, Result};
use crate::mappings::{MultivaluedMap, SelectFrom};
use crate::space::{Dual, LpSpace, Primal};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub p: f64,
    pub c: SetSpec,
    pub maps: Vec<MapSpec>,
    #[serde(default)]
    pub bifunction: BifunctionSpec,
    #[serde(default)]
    pub weights: WeightsSpec,
    #[serde(default = "default_r")]
    pub r: f64,
    pub x0: Vec<f64>,
    #[serde(default = "default_stop_tol")]
    pub stop_tol: f64,
    #[serde(default = "default_max_outer")]
    pub max_outer: usize,
    #[serde(default)]
    pub variant: Variant,
    #[serde(default)]
    pub solver: SolverSettings,
    #[serde(default)]
    pub output: OutputSpec,
}

fn default_r() -> f64 {
    1.0
}

fn default_stop_tol() -> f64 {
    1e-8
}

fn default_max_outer() -> usize {
    1000
}

/// A box, given either as `lower`/`upper` or as `radius` with `dim`, plus
/// optional half-spaces.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upper: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub halfspaces: Vec<HalfSpaceSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HalfSpaceSpec {
    pub normal: Vec<f64>,
    pub offset: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum MapSpec {
    SegmentContraction {
        center: Vec<f64>,
        beta: f64,
        #[serde(default)]
        select_from: SelectFrom,
    },
    Projection {
        set: SetSpec,
    },
    Affine {
        m: Vec<Vec<f64>>,
        t: Vec<f64>,
        fixed_point: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum BifunctionSpec {
    #[default]
    Zero,
    ConvexCost {
        q: Vec<Vec<f64>>,
        c: Vec<f64>,
    },
    MonotoneOperator {
        a: Vec<Vec<f64>>,
        b: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WeightsSpec {
    Uniform { a0: f64 },
    List(Vec<f64>),
}

impl Default for WeightsSpec {
    fn default() -> Self {
        WeightsSpec::Uniform { a0: 0.5 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub log_y_n: bool,
}

fn config_err(field: &str, reason: impl std::fmt::Display) -> Error {
    Error::Config(format!("`{field}`: {reason}"))
}

fn matrix(rows: &[Vec<f64>], field: &str) -> Result<DMatrix<f64>> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(config_err(field, "must be a square matrix given as rows"));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

fn primal(v: &[f64], field: &str) -> Result<Primal> {
    Primal::try_new(v.to_vec()).map_err(|e| config_err(field, e))
}

fn dual(v: &[f64], field: &str) -> Result<Dual> {
    Dual::try_new(v.to_vec()).map_err(|e| config_err(field, e))
}

impl SetSpec {
    pub fn build(&self, field: &str, settings: &SolverSettings) -> Result<Polyhedron> {
        let bounds = match (&self.lower, &self.upper, self.radius, self.dim) {
            (Some(l), Some(u), None, _) => BoxBounds::new(l.clone(), u.clone()),
            (None, None, Some(r), Some(d)) => BoxBounds::cube(d, r),
            _ => {
                return Err(config_err(
                    field,
                    "give either `lower` and `upper`, or `radius` and `dim`",
                ))
            }
        }
        .map_err(|e| config_err(field, e))?;
        let halfspaces = self
            .halfspaces
            .iter()
            .map(|h| HalfSpace::new(dual(&h.normal, field)?, h.offset))
            .collect::<Result<Vec<_>>>()
            .map_err(|e| config_err(field, e))?;
        Polyhedron::with_halfspaces(bounds, halfspaces, settings).map_err(|e| config_err(field, e))
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Validates the document and assembles the iteration's configuration.
    pub fn build(&self) -> Result<AlgorithmConfig> {
        let settings = self.solver;
        settings.validate().map_err(|e| config_err("solver", e))?;
        let space = LpSpace::new(self.x0.len(), self.p).map_err(|e| config_err("p", e))?;
        let c = self.c.build("c", &settings)?;
        let x0 = primal(&self.x0, "x0")?;

        let maps = self
            .maps
            .iter()
            .enumerate()
            .map(|(i, spec)| {
                self.build_map(&space, spec, &settings)
                    .map_err(|e| config_err(&format!("maps[{i}]"), e))
            })
            .collect::<Result<Vec<_>>>()?;

        let f = match &self.bifunction {
            BifunctionSpec::Zero => Bifunction::Zero,
            BifunctionSpec::ConvexCost { q, c } => {
                { Bifunction::convex_cost(matrix(q, "bifunction.q")?, dual(c, "bifunction.c")?) }
                    .map_err(|e| config_err("bifunction", e))?
            }
            BifunctionSpec::MonotoneOperator { a, b } => {
                Bifunction::monotone_operator(matrix(a, "bifunction.a")?, dual(b, "bifunction.b")?)
            }
            .map_err(|e| config_err("bifunction", e))?,
        };

        let weights = match &self.weights {
            WeightsSpec::Uniform { a0 } => WeightSchedule::Uniform { a0: *a0 },
            WeightsSpec::List(w) => {
                let mut w = w.clone();
                let sum = normalize_weights(&mut w).map_err(|e| config_err("weights", e))?;
                if sum != 1.0 {
                    log::warn!("weights sum to {sum}; renormalized to {w:?}");
                }
                WeightSchedule::Constant(w)
            }
        };
        if !(self.r > 0.0 && self.r.is_finite()) {
            return Err(config_err("r", format!("must be positive, got {}", self.r)));
        }

        let mut config = AlgorithmConfig::new(space, c, maps, x0);
        config.f = f;
        config.weights = weights;
        config.r = RSchedule::Constant(self.r);
        config.stop_tol = self.stop_tol;
        config.max_outer = self.max_outer;
        config.variant = self.variant;
        config.settings = settings;
        config.log_y = self.output.log_y_n;
        config.validate().map_err(|e| match e {
            Error::InvalidParameter { name, reason } => config_err(name, reason),
            other => other,
        })?;
        Ok(config)
    }

    fn build_map(
        &self,
        space: &LpSpace,
        spec: &MapSpec,
        settings: &SolverSettings,
    ) -> Result<MultivaluedMap> {
        match spec {
            MapSpec::SegmentContraction {
                center,
                beta,
                select_from,
            } => Ok(
                MultivaluedMap::segment_contraction(primal(center, "center")?, *beta)?
                    .with_selection(*select_from),
            ),
            MapSpec::Projection { set } => {
                Ok(MultivaluedMap::projection(set.build("set", settings)?))
            }
            MapSpec::Affine { m, t, fixed_point } => MultivaluedMap::affine(
                space,
                matrix(m, "m")?,
                t.clone(),
                primal(fixed_point, "fixed_point")?,
            ),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"{
        "p": 2.0,
        "c": { "radius": 10.0, "dim": 2 },
        "maps": [{ "type": "segment_contraction", "center": [0, 0], "beta": 0.5 }],
        "x0": [5, 3]
    }"#;

    fn with(field: &str, value: &str) -> String {
        let mut v: serde_json::Value = serde_json::from_str(BASE).unwrap();
        v[field] = serde_json::from_str(value).unwrap();
        v.to_string()
    }

    #[test]
    fn defaults_fill_in() {
        let cfg = ExperimentConfig::from_json(BASE).unwrap();
        assert_eq!(cfg.r, 1.0);
        assert_eq!(cfg.weights, WeightsSpec::Uniform { a0: 0.5 });
        let built = cfg.build().unwrap();
        assert_eq!(built.max_outer, 1000);
    }

    #[test]
    fn weight_list_is_renormalized() {
        let cfg = ExperimentConfig::from_json(&with("weights", "[2, 2]")).unwrap();
        let built = cfg.build().unwrap();
        assert_eq!(built.weights.at(0, 1).unwrap(), vec![0.5, 0.5]);
    }

    #[test]
    fn nonpositive_r_names_the_field() {
        let err = ExperimentConfig::from_json(&with("r", "0"))
            .unwrap()
            .build()
            .unwrap_err();
        assert!(err.to_string().contains("`r`"), "{err}");
    }

    #[test]
    fn unknown_fields_and_bad_sets_are_rejected() {
        assert!(ExperimentConfig::from_json(&with("bogus", "1")).is_err());
        let err = ExperimentConfig::from_json(&with("c", r#"{"radius": 1.0}"#))
            .unwrap()
            .build()
            .unwrap_err();
        assert!(err.to_string().contains("`c`"), "{err}");
        let err = ExperimentConfig::from_json(&with("x0", "[50, 0]"))
            .unwrap()
            .build()
            .unwrap_err();
        assert!(err.to_string().contains("`x0`"), "{err}");
    }

    #[test]
    fn map_errors_carry_their_index() {
        let cfg = with(
            "maps",
            r#"[{ "type": "segment_contraction", "center": [0, 0], "beta": 0.5 },
                { "type": "segment_contraction", "center": [0, 0], "beta": 1.5 }]"#,
        );
        let err = ExperimentConfig::from_json(&cfg)
            .unwrap()
            .build()
            .unwrap_err();
        assert!(err.to_string().contains("maps[1]"), "{err}");
    }
}
