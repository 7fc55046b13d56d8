//! JSON descriptions of surfaces and potentials, shared by the CLI and the
//! browser demo.
//!
//! Surface: {"kind": "constant_curvature", "K": 1.0, "C1": 0.0, "C2": 1.0}
//!        | {"kind": "torus", "major": 2.0, "minor": 1.0}
//!        | {"kind": "custom", "f_expr": "2+cos(u)", "domain": [0.0, 6.2832]}
//! Potential: {"kind": "gravitational", "a": 1.0}
//!          | {"kind": "harmonic", "k": 0.5}
//!          | {"kind": "custom", "V_expr": "-1/u"}
//!
//! All angles are radians; lengths are dimensionless.

use crate::error::{Error, Result};
use crate::geometry::SurfaceOfRevolution;
use crate::potentials::CentralPotential;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

fn default_minor() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SurfaceSpec {
    ConstantCurvature {
        #[serde(rename = "K")]
        k: f64,
        #[serde(rename = "C1")]
        c1: f64,
        #[serde(rename = "C2")]
        c2: f64,
    },
    Torus {
        major: f64,
        #[serde(default = "default_minor")]
        minor: f64,
    },
    Custom {
        f_expr: String,
        domain: [f64; 2],
    },
}

impl SurfaceSpec {
    pub fn build(&self) -> Result<SurfaceOfRevolution> {
        match self {
            SurfaceSpec::ConstantCurvature { k, c1, c2 } => {
                SurfaceOfRevolution::constant_curvature(*k, *c1, *c2)
            }
            SurfaceSpec::Torus { major, minor } => SurfaceOfRevolution::torus(*major, *minor),
            SurfaceSpec::Custom { f_expr, domain } => {
                SurfaceOfRevolution::custom(f_expr, (domain[0], domain[1]))
            }
        }
    }

    pub fn sphere() -> Self {
        SurfaceSpec::ConstantCurvature {
            k: 1.0,
            c1: 0.0,
            c2: 1.0,
        }
    }

    pub fn plane() -> Self {
        SurfaceSpec::ConstantCurvature {
            k: 0.0,
            c1: 1.0,
            c2: 0.0,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("surface spec: {e}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialSpec {
    Gravitational {
        a: f64,
    },
    Harmonic {
        k: f64,
    },
    Custom {
        #[serde(rename = "V_expr")]
        v_expr: String,
    },
}

impl PotentialSpec {
    pub fn build(&self, surface: &Arc<SurfaceOfRevolution>) -> Result<CentralPotential> {
        match self {
            PotentialSpec::Gravitational { a } => CentralPotential::gravitational(*a, surface),
            PotentialSpec::Harmonic { k } => CentralPotential::harmonic(*k, surface),
            PotentialSpec::Custom { v_expr } => CentralPotential::custom(v_expr),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("potential spec: {e}")))
    }
}
