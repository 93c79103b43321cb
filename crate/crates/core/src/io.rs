//! JSON documents for packings and trial reports.
//!
//! A packing document looks like
//!
//! ```json
//! {
//!   "version": "idcp/1",
//!   "vertices": [{"id": 0}, {"id": 1}, {"id": 2}],
//!   "faces": [[0, 1, 2]],
//!   "eta": {"0-1": 1.0, "0-2": 1.0, "1-2": 1.0},
//!   "radii_hyp": {"0": 0.5, "1": 0.5, "2": 0.5}
//! }
//! ```
//!
//! with optional `geometry`, `radii_euc`, `labels_u`, `layout` (`"id": [x, y]`)
//! and `metadata` (`regime`, `seed`). Boundary flags in `vertices` are
//! recomputed from the faces.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::harness::{Regime, TrialReport};
use crate::hypgeom::{hyp_to_euc_circle, HyperbolicCircle, Point};
use crate::mesh::{
    label_to_radius, EdgeKey, Geometry, MeshError, RadiusAssignment, Triangulation, VertexId,
    WeightAssignment,
};
use crate::solver::DiskLayout;

pub const FORMAT_VERSION: &str = "idcp/1";

/// Relative tolerance when a document gives the same radius twice.
pub const CONSISTENCY_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: String,
        source: std::io::Error,
    },
    #[error("parse error at line {line}, column {column}, field `{field}`: {message}")]
    Parse {
        field: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unsupported document version {0:?}, expected {FORMAT_VERSION:?}")]
    Version(String),
    #[error("vertex {0} is listed twice")]
    DuplicateVertex(VertexId),
    #[error("face {face} uses unknown vertex {vertex}")]
    UnknownFaceVertex { face: usize, vertex: VertexId },
    #[error("vertex {0} belongs to no face")]
    UnusedVertex(VertexId),
    #[error("eta on edge {edge} is {value}: eta must exceed -1")]
    EtaOutOfRange { edge: EdgeKey, value: f64 },
    #[error("{field} disagrees with the radii at vertex {vertex}")]
    Inconsistent {
        field: &'static str,
        vertex: VertexId,
    },
    #[error("{0}")]
    Geometry(String),
    #[error("layout position of vertex {vertex} is not inside the unit disk")]
    LayoutOutsideDisk { vertex: VertexId },
    #[error("document has no radii or labels")]
    MissingRadii,
    #[error("document has no layout")]
    MissingLayout,
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexEntry {
    pub id: VertexId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary: Option<bool>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Metadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regime: Option<Regime>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// Raw document as it appears on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PackingDocument {
    pub version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geometry: Option<Geometry>,
    pub vertices: Vec<VertexEntry>,
    pub faces: Vec<[VertexId; 3]>,
    pub eta: BTreeMap<EdgeKey, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radii_hyp: Option<BTreeMap<VertexId, f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radii_euc: Option<BTreeMap<VertexId, f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels_u: Option<BTreeMap<VertexId, f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layout: Option<BTreeMap<VertexId, [f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<Metadata>,
}

/// Validated packing.
#[derive(Debug, Clone, PartialEq)]
pub struct Packing {
    pub tri: Triangulation,
    pub eta: WeightAssignment,
    pub geometry: Geometry,
    pub radii: Option<RadiusAssignment>,
    /// Vertex centers: hyperbolic centers in the disk, or Euclidean centers.
    pub layout: Option<BTreeMap<VertexId, Point>>,
    pub metadata: Option<Metadata>,
}

impl Packing {
    pub fn new(tri: Triangulation, eta: WeightAssignment, radii: RadiusAssignment) -> Self {
        Packing {
            tri,
            eta,
            geometry: radii.geometry,
            radii: Some(radii),
            layout: None,
            metadata: None,
        }
    }

    pub fn with_layout(mut self, layout: &DiskLayout) -> Self {
        self.layout = Some(layout.positions.clone());
        self
    }

    pub fn radii(&self) -> Result<&RadiusAssignment, IoError> {
        self.radii.as_ref().ok_or(IoError::MissingRadii)
    }

    pub fn layout(&self) -> Result<&BTreeMap<VertexId, Point>, IoError> {
        match &self.layout {
            Some(l) if !l.is_empty() => Ok(l),
            _ => Err(IoError::MissingLayout),
        }
    }

    /// Euclidean radii of the vertex circles as drawn in the plane.
    pub fn euclidean_image_radii(&self) -> Result<BTreeMap<VertexId, f64>, IoError> {
        let radii = self.radii()?;
        let layout = self.layout()?;
        radii
            .iter()
            .map(|(v, r)| {
                let euc = match self.geometry {
                    Geometry::Euclidean => r,
                    Geometry::Hyperbolic => {
                        let hc = HyperbolicCircle::new(layout[&v], r)
                            .and_then(|c| hyp_to_euc_circle(&c))
                            .map_err(|e| IoError::Geometry(e.to_string()))?;
                        hc.radius
                    }
                };
                Ok((v, euc))
            })
            .collect()
    }

    pub fn to_document(&self) -> PackingDocument {
        let vertices = self
            .tri
            .vertices()
            .iter()
            .map(|v| VertexEntry {
                id: v.id,
                boundary: Some(v.boundary),
            })
            .collect();
        let (mut radii_hyp, mut radii_euc, mut labels_u) = (None, None, None);
        if let Some(r) = &self.radii {
            let map = r.as_map().clone();
            match self.geometry {
                Geometry::Hyperbolic => radii_hyp = Some(map),
                Geometry::Euclidean => radii_euc = Some(map),
            }
            labels_u = Some(r.to_labels().as_map().clone());
        }
        PackingDocument {
            version: FORMAT_VERSION.to_string(),
            geometry: Some(self.geometry),
            vertices,
            faces: self.tri.faces().to_vec(),
            eta: self.eta.as_map().clone(),
            radii_hyp,
            radii_euc,
            labels_u,
            layout: self
                .layout
                .as_ref()
                .map(|l| l.iter().map(|(&v, p)| (v, [p.re, p.im])).collect()),
            metadata: self.metadata.clone(),
        }
    }
}

impl PackingDocument {
    /// Checks cross-field consistency and builds the validated packing.
    pub fn validate(&self) -> Result<Packing, IoError> {
        if self.version != FORMAT_VERSION {
            return Err(IoError::Version(self.version.clone()));
        }
        let mut ids = BTreeSet::new();
        for v in &self.vertices {
            if !ids.insert(v.id) {
                return Err(IoError::DuplicateVertex(v.id));
            }
        }
        for (fi, f) in self.faces.iter().enumerate() {
            if let Some(&vertex) = f.iter().find(|v| !ids.contains(v)) {
                return Err(IoError::UnknownFaceVertex { face: fi, vertex });
            }
        }
        let tri = Triangulation::from_faces(&self.faces)?;
        if let Some(&v) = ids.iter().find(|&&v| !tri.contains_vertex(v)) {
            return Err(IoError::UnusedVertex(v));
        }
        for (&edge, &value) in &self.eta {
            if !(value > -1.0) {
                return Err(IoError::EtaOutOfRange { edge, value });
            }
        }
        let eta = WeightAssignment::new(&tri, self.eta.clone())?;

        let geometry =
            self.geometry
                .unwrap_or(if self.radii_euc.is_some() && self.radii_hyp.is_none() {
                    Geometry::Euclidean
                } else {
                    Geometry::Hyperbolic
                });
        let primary = match geometry {
            Geometry::Hyperbolic => &self.radii_hyp,
            Geometry::Euclidean => &self.radii_euc,
        };
        let radii = match (primary, &self.labels_u) {
            (Some(r), labels) => {
                let radii = RadiusAssignment::new(&tri, geometry, r.clone())?;
                if let Some(u) = labels {
                    check_labels(&radii, u)?;
                }
                Some(radii)
            }
            (None, Some(u)) => {
                let r = u
                    .iter()
                    .map(|(&v, &x)| (v, label_to_radius(geometry, x)))
                    .collect();
                Some(RadiusAssignment::new(&tri, geometry, r)?)
            }
            (None, None) => None,
        };

        let layout = match &self.layout {
            None => None,
            Some(raw) => {
                let mut out = BTreeMap::new();
                for (&v, &[x, y]) in raw {
                    if !tri.contains_vertex(v) {
                        return Err(MeshError::UnknownVertex(v).into());
                    }
                    let p = Point::new(x, y);
                    let inside = p.norm() < 1.0 || geometry == Geometry::Euclidean;
                    if !inside || !p.re.is_finite() || !p.im.is_finite() {
                        return Err(IoError::LayoutOutsideDisk { vertex: v });
                    }
                    out.insert(v, p);
                }
                if let Some(v) = tri.vertex_ids().find(|v| !out.contains_key(v)) {
                    return Err(MeshError::MissingVertex(v).into());
                }
                Some(out)
            }
        };

        let packing = Packing {
            tri,
            eta,
            geometry,
            radii,
            layout,
            metadata: self.metadata.clone(),
        };
        if geometry == Geometry::Hyperbolic {
            if let Some(euc) = &self.radii_euc {
                // Euclidean images of the hyperbolic circles under the layout
                let images = packing.euclidean_image_radii()?;
                for (v, &r) in euc {
                    if !images.get(v).is_some_and(|&x| close(x, r)) {
                        return Err(IoError::Inconsistent {
                            field: "radii_euc",
                            vertex: *v,
                        });
                    }
                }
            }
        }
        Ok(packing)
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= CONSISTENCY_TOL * a.abs().max(b.abs()).max(1.0)
}

fn check_labels(radii: &RadiusAssignment, labels: &BTreeMap<VertexId, f64>) -> Result<(), IoError> {
    let derived = radii.to_labels();
    for (&v, &u) in labels {
        if !derived.as_map().get(&v).is_some_and(|&x| close(x, u)) {
            return Err(IoError::Inconsistent {
                field: "labels_u",
                vertex: v,
            });
        }
    }
    if labels.len() != derived.as_map().len() {
        return Err(IoError::Inconsistent {
            field: "labels_u",
            vertex: derived
                .as_map()
                .keys()
                .copied()
                .find(|v| !labels.contains_key(v))
                .unwrap_or_default(),
        });
    }
    Ok(())
}

/// Parses a document with field-path and line/column diagnostics.
pub fn parse_document(text: &str) -> Result<PackingDocument, IoError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let field = e.path().to_string();
        let inner = e.into_inner();
        IoError::Parse {
            field,
            line: inner.line(),
            column: inner.column(),
            message: inner.to_string(),
        }
    })
}

pub fn parse_packing(text: &str) -> Result<Packing, IoError> {
    parse_document(text)?.validate()
}

/// Pretty-printed JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String, IoError> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn load(path: impl AsRef<Path>) -> Result<Packing, IoError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| IoError::Read {
        path: path.display().to_string(),
        source,
    })?;
    parse_packing(&text)
}

pub fn save(path: impl AsRef<Path>, packing: &Packing) -> Result<(), IoError> {
    write_text(path, &to_json(&packing.to_document())?)
}

pub fn write_text(path: impl AsRef<Path>, text: &str) -> Result<(), IoError> {
    let path = path.as_ref();
    fs::write(path, text).map_err(|source| IoError::Write {
        path: path.display().to_string(),
        source,
    })
}

/// Machine-readable output of `verify`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportDocument<'a> {
    pub version: &'static str,
    pub reports: &'a [TrialReport],
    pub violations: usize,
}

impl<'a> ReportDocument<'a> {
    pub fn new(reports: &'a [TrialReport]) -> Self {
        ReportDocument {
            version: FORMAT_VERSION,
            reports,
            violations: reports.iter().map(|r| r.violation_count).sum(),
        }
    }
}
