//! JSON body specification files.
//!
//! ```json
//! {"dim": 2, "type": "ellipsoid", "semi_axes": [2, 1], "rotation": [[0, -1], [1, 0]]}
//! {"dim": 3, "type": "perturbed_ball", "mode": "zonal3", "epsilon": 0.1}
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::shapes::{point, SphericalHarmonic};
use super::{Mat3, SupportBody};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BodyType {
    Ball,
    Ellipsoid,
    PerturbedBall,
}

/// Angular mode of a planar perturbation, or a harmonic id in ℝ³.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModeSpec {
    Order(u32),
    Harmonic(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BodyFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub dim: usize,
    #[serde(rename = "type")]
    pub kind: BodyType,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub semi_axes: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rotation: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<ModeSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub translate: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::BodyFile(msg.into())
}

impl BodyFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| invalid(e.to_string()))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| invalid(format!("{}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| invalid(format!("{}: {e}", path.display())))
    }

    /// Reads and builds a body labelled by its `id`, or else the file stem.
    pub fn load(path: &Path) -> Result<SupportBody> {
        let spec = Self::read(path)?;
        let body = spec.build()?;
        Ok(match &spec.id {
            Some(_) => body,
            None => {
                let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("body");
                body.with_label(stem)
            }
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("body files serialize")
    }

    pub fn build(&self) -> Result<SupportBody> {
        let dim = self.dim;
        if dim != 2 && dim != 3 {
            return Err(Error::UnsupportedDimension(dim));
        }
        let mut body = match self.kind {
            BodyType::Ball => SupportBody::ball(dim, self.radius.unwrap_or(1.0))?,
            BodyType::Ellipsoid => match (&self.matrix, &self.semi_axes) {
                (Some(m), None) => SupportBody::ellipsoid(dim, m)?,
                (None, Some(a)) => {
                    if a.len() != dim {
                        return Err(invalid(format!("semi_axes must have {dim} entries")));
                    }
                    SupportBody::ellipsoid_from_axes(a)?
                }
                _ => return Err(invalid("ellipsoid needs exactly one of `matrix` or `semi_axes`")),
            },
            BodyType::PerturbedBall => {
                let epsilon = self.epsilon.ok_or_else(|| invalid("perturbed_ball needs `epsilon`"))?;
                match (dim, &self.mode) {
                    (2, Some(ModeSpec::Order(l))) => SupportBody::perturbed_circle(*l, epsilon)?,
                    (2, None) => SupportBody::perturbed_circle(3, epsilon)?,
                    (3, Some(ModeSpec::Harmonic(id))) => {
                        let h = SphericalHarmonic::from_id(id)
                            .ok_or_else(|| invalid(format!("unknown harmonic `{id}`")))?;
                        SupportBody::perturbed_sphere(h, epsilon)?
                    }
                    (3, None) => SupportBody::perturbed_sphere(SphericalHarmonic::Zonal3, epsilon)?,
                    (_, Some(m)) => return Err(invalid(format!("mode {m:?} does not fit dimension {dim}"))),
                    _ => unreachable!("dimension checked above"),
                }
            }
        };
        if let Some(rows) = &self.rotation {
            body = body.rotated(&square(dim, rows)?)?;
        }
        if let Some(t) = &self.translate {
            if t.len() != dim {
                return Err(invalid(format!("translate must have {dim} entries")));
            }
            body = body.translated(&point(t));
        }
        if let Some(id) = &self.id {
            body = body.with_label(id.clone());
        }
        Ok(body)
    }
}

fn spec(id: &str, dim: usize, kind: BodyType, provenance: &str) -> BodyFile {
    BodyFile {
        id: Some(id.to_string()),
        dim,
        kind,
        radius: None,
        matrix: None,
        semi_axes: None,
        rotation: None,
        mode: None,
        epsilon: None,
        translate: None,
        provenance: Some(provenance.to_string()),
    }
}

/// The canonical test corpus: unit balls, three ellipsoids and three
/// perturbed balls.
pub fn canonical_corpus() -> Vec<BodyFile> {
    let ellipsoid = |id: &str, axes: &[f64]| BodyFile {
        semi_axes: Some(axes.to_vec()),
        ..spec(id, axes.len(), BodyType::Ellipsoid, "closed-form ellipsoid; Petty ratio (prod a_i)^-2")
    };
    let perturbed = |id: &str, dim: usize, mode: ModeSpec, epsilon: f64| BodyFile {
        mode: Some(mode),
        epsilon: Some(epsilon),
        ..spec(id, dim, BodyType::PerturbedBall, "non-ellipsoidal C2+ body; strict-inequality probe")
    };
    vec![
        BodyFile {
            radius: Some(1.0),
            ..spec("ball2", 2, BodyType::Ball, "unit disk; constant curvature")
        },
        BodyFile {
            radius: Some(1.0),
            ..spec("ball3", 3, BodyType::Ball, "unit ball; constant curvature")
        },
        ellipsoid("ellipse_2_1", &[2.0, 1.0]),
        ellipsoid("ellipse_3_1", &[3.0, 1.0]),
        ellipsoid("ellipsoid_2_1_1", &[2.0, 1.0, 1.0]),
        perturbed("perturbed_circle_002", 2, ModeSpec::Order(3), 0.02),
        perturbed("perturbed_circle_005", 2, ModeSpec::Order(3), 0.05),
        perturbed("perturbed_sphere_010", 3, ModeSpec::Harmonic(SphericalHarmonic::Zonal3.id().to_string()), 0.1),
    ]
}

/// Writes the canonical corpus as `<id>.json` files and returns the paths.
pub fn write_corpus(dir: &Path) -> Result<Vec<std::path::PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut paths = Vec::new();
    for spec in canonical_corpus() {
        let path = dir.join(format!("{}.json", spec.id.as_deref().unwrap_or("body")));
        std::fs::write(&path, spec.to_json() + "\n")?;
        paths.push(path);
    }
    Ok(paths)
}

/// Loads every `*.json` body in `dir`, in file-name order.
pub fn load_corpus(dir: &Path) -> Result<Vec<SupportBody>> {
    let mut paths: Vec<_> = std::fs::read_dir(dir)
        .map_err(|e| invalid(format!("{}: {e}", dir.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(invalid(format!("no body files in {}", dir.display())));
    }
    paths.iter().map(|p| BodyFile::load(p)).collect()
}

fn square(dim: usize, rows: &[Vec<f64>]) -> Result<Mat3> {
    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
        return Err(invalid(format!("rotation must be {dim}x{dim}")));
    }
    let mut m = Mat3::identity();
    for (i, row) in rows.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            m[(i, j)] = *v;
        }
    }
    Ok(m)
}
