//! Combinatorial triangulated surfaces carrying per-edge inversive distance
//! weights and per-vertex radii.
//!
//! A [`Triangulation`] is built from oriented vertex triples. Edges, edge/face
//! incidence and boundary flags are derived from the faces alone.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Vertex identifier as it appears in input faces.
pub type VertexId = usize;

/// Tolerance used by the regular-weight test.
pub const REGULARITY_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeshError {
    #[error("triangulation has no faces")]
    Empty,
    #[error("face {face} repeats vertex {vertex}")]
    RepeatedVertex { face: usize, vertex: VertexId },
    #[error("face {face} duplicates face {first} (same vertex set)")]
    DuplicateFace { face: usize, first: usize },
    #[error("edge {edge} has more than two incident faces")]
    NonManifoldEdge { edge: EdgeKey },
    #[error("edge {edge} is traversed in the same direction by both incident faces")]
    InconsistentOrientation { edge: EdgeKey },
    #[error("complex is disconnected ({components} components)")]
    Disconnected { components: usize },
    #[error("star polygon needs at least 3 sides, got {0}")]
    TooFewSides(usize),
    #[error("hexagonal disk needs at least one ring, got {0}")]
    TooFewRings(usize),
    #[error("weight on edge {edge} is {value}, must exceed -1")]
    WeightOutOfRange { edge: EdgeKey, value: f64 },
    #[error("no weight for edge {0}")]
    MissingWeight(EdgeKey),
    #[error("weight given for {0}, which is not an edge of the triangulation")]
    UnknownEdge(EdgeKey),
    #[error("radius at vertex {vertex} is {value}, must be positive")]
    NonPositiveRadius { vertex: VertexId, value: f64 },
    #[error("no value for vertex {0}")]
    MissingVertex(VertexId),
    #[error("value given for unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("label at vertex {vertex} is {value}, hyperbolic labels must be negative")]
    LabelOutOfRange { vertex: VertexId, value: f64 },
}

/// Unordered vertex pair stored as `(min, max)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeKey(VertexId, VertexId);

impl EdgeKey {
    /// Canonical key for the edge between `a` and `b`.
    pub fn new(a: VertexId, b: VertexId) -> Self {
        if a <= b {
            EdgeKey(a, b)
        } else {
            EdgeKey(b, a)
        }
    }

    pub fn lo(&self) -> VertexId {
        self.0
    }

    pub fn hi(&self) -> VertexId {
        self.1
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.0 == v || self.1 == v
    }
}

impl fmt::Display for EdgeKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.0, self.1)
    }
}

impl FromStr for EdgeKey {
    type Err = String;

    /// Parses `"i-j"`, in either order.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, b) = s
            .split_once('-')
            .ok_or_else(|| format!("edge key {s:?} is not of the form \"i-j\""))?;
        let parse = |t: &str| {
            t.trim()
                .parse::<VertexId>()
                .map_err(|_| format!("edge key {s:?} has a non-integer endpoint"))
        };
        Ok(EdgeKey::new(parse(a)?, parse(b)?))
    }
}

impl Serialize for EdgeKey {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for EdgeKey {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vertex {
    pub id: VertexId,
    pub boundary: bool,
}

/// Faces incident to one edge, as indices into [`Triangulation::faces`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeFaces {
    Boundary(usize),
    Interior(usize, usize),
}

impl EdgeFaces {
    pub fn is_interior(&self) -> bool {
        matches!(self, EdgeFaces::Interior(..))
    }

    pub fn faces(&self) -> impl Iterator<Item = usize> {
        let (a, b) = match *self {
            EdgeFaces::Boundary(f) => (f, None),
            EdgeFaces::Interior(f, g) => (f, Some(g)),
        };
        std::iter::once(a).chain(b)
    }
}

/// A connected, oriented, combinatorial triangulated surface.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Triangulation {
    vertices: Vec<Vertex>,
    faces: Vec<[VertexId; 3]>,
    #[serde(skip)]
    edges: BTreeMap<EdgeKey, EdgeFaces>,
}

impl Triangulation {
    /// Builds and validates a triangulation from oriented faces.
    pub fn from_faces(raw_faces: &[[VertexId; 3]]) -> Result<Self, MeshError> {
        if raw_faces.is_empty() {
            return Err(MeshError::Empty);
        }
        let mut seen: HashMap<[VertexId; 3], usize> = HashMap::new();
        // directed edge -> face, used for orientation consistency
        let mut directed: HashMap<(VertexId, VertexId), usize> = HashMap::new();
        let mut incidence: BTreeMap<EdgeKey, Vec<usize>> = BTreeMap::new();

        for (fi, f) in raw_faces.iter().enumerate() {
            if f[0] == f[1] || f[0] == f[2] {
                return Err(MeshError::RepeatedVertex {
                    face: fi,
                    vertex: f[0],
                });
            }
            if f[1] == f[2] {
                return Err(MeshError::RepeatedVertex {
                    face: fi,
                    vertex: f[1],
                });
            }
            let mut sorted = *f;
            sorted.sort_unstable();
            if let Some(&first) = seen.get(&sorted) {
                return Err(MeshError::DuplicateFace { face: fi, first });
            }
            seen.insert(sorted, fi);

            for k in 0..3 {
                let (a, b) = (f[k], f[(k + 1) % 3]);
                let key = EdgeKey::new(a, b);
                if directed.insert((a, b), fi).is_some() {
                    return Err(MeshError::InconsistentOrientation { edge: key });
                }
                let inc = incidence.entry(key).or_default();
                inc.push(fi);
                if inc.len() > 2 {
                    return Err(MeshError::NonManifoldEdge { edge: key });
                }
            }
        }

        let edges: BTreeMap<EdgeKey, EdgeFaces> = incidence
            .into_iter()
            .map(|(k, v)| {
                let ef = match v.as_slice() {
                    [f] => EdgeFaces::Boundary(*f),
                    [f, g] => EdgeFaces::Interior(*f, *g),
                    _ => unreachable!("incidence bounded above"),
                };
                (k, ef)
            })
            .collect();

        let mut ids: BTreeSet<VertexId> = BTreeSet::new();
        for f in raw_faces {
            ids.extend(f.iter().copied());
        }
        let on_boundary: BTreeSet<VertexId> = edges
            .iter()
            .filter(|(_, ef)| !ef.is_interior())
            .flat_map(|(k, _)| [k.lo(), k.hi()])
            .collect();
        let vertices: Vec<Vertex> = ids
            .iter()
            .map(|&id| Vertex {
                id,
                boundary: on_boundary.contains(&id),
            })
            .collect();

        let tri = Triangulation {
            vertices,
            faces: raw_faces.to_vec(),
            edges,
        };
        let components = tri.count_components();
        if components != 1 {
            return Err(MeshError::Disconnected { components });
        }
        Ok(tri)
    }

    fn count_components(&self) -> usize {
        let index: HashMap<VertexId, usize> = self
            .vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (v.id, i))
            .collect();
        let mut parent: Vec<usize> = (0..self.vertices.len()).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for key in self.edges.keys() {
            let a = find(&mut parent, index[&key.lo()]);
            let b = find(&mut parent, index[&key.hi()]);
            if a != b {
                parent[a] = b;
            }
        }
        (0..parent.len())
            .filter(|&i| find(&mut parent, i) == i)
            .count()
    }

    /// Star triangulation of an `n`-gon: centre `0`, boundary cycle `1..=n`.
    pub fn star_polygon(n: usize) -> Result<Self, MeshError> {
        if n < 3 {
            return Err(MeshError::TooFewSides(n));
        }
        let faces: Vec<[VertexId; 3]> = (1..=n).map(|i| [0, i, i % n + 1]).collect();
        Self::from_faces(&faces)
    }

    /// Patch of the regular triangular lattice made of `rings` hexagonal rings
    /// around vertex `0`. Vertices are numbered ring by ring, counterclockwise
    /// starting from the positive x direction.
    pub fn hex_disk(rings: usize) -> Result<Self, MeshError> {
        if rings < 1 {
            return Err(MeshError::TooFewRings(rings));
        }
        let k = rings as i64;
        let ring = |q: i64, r: i64| q.abs().max(r.abs()).max((q + r).abs());
        let mut points: Vec<(i64, i64)> = Vec::new();
        for q in -k..=k {
            for r in -k..=k {
                if ring(q, r) <= k {
                    points.push((q, r));
                }
            }
        }
        let angle = |&(q, r): &(i64, i64)| {
            let (x, y) = (q as f64 + 0.5 * r as f64, r as f64 * 3f64.sqrt() / 2.0);
            let a = y.atan2(x);
            if a < -1e-9 {
                a + std::f64::consts::TAU
            } else {
                a.max(0.0)
            }
        };
        points.sort_by(|a, b| {
            ring(a.0, a.1)
                .cmp(&ring(b.0, b.1))
                .then(angle(a).total_cmp(&angle(b)))
        });
        let id: HashMap<(i64, i64), VertexId> =
            points.iter().enumerate().map(|(i, &p)| (p, i)).collect();

        let mut faces = Vec::new();
        for q in -k - 1..=k {
            for r in -k - 1..=k {
                let up = [(q, r), (q + 1, r), (q, r + 1)];
                let down = [(q + 1, r), (q + 1, r + 1), (q, r + 1)];
                for tri in [up, down] {
                    if let (Some(&a), Some(&b), Some(&c)) =
                        (id.get(&tri[0]), id.get(&tri[1]), id.get(&tri[2]))
                    {
                        faces.push([a, b, c]);
                    }
                }
            }
        }
        Self::from_faces(&faces)
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex_ids(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices.iter().map(|v| v.id)
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn faces(&self) -> &[[VertexId; 3]] {
        &self.faces
    }

    pub fn edges(&self) -> &BTreeMap<EdgeKey, EdgeFaces> {
        &self.edges
    }

    pub fn contains_vertex(&self, v: VertexId) -> bool {
        self.vertices.binary_search_by_key(&v, |x| x.id).is_ok()
    }

    pub fn is_boundary(&self, v: VertexId) -> Option<bool> {
        self.vertices
            .binary_search_by_key(&v, |x| x.id)
            .ok()
            .map(|i| self.vertices[i].boundary)
    }

    pub fn interior_vertices(&self) -> Vec<VertexId> {
        self.vertices
            .iter()
            .filter(|v| !v.boundary)
            .map(|v| v.id)
            .collect()
    }

    pub fn boundary_vertices(&self) -> Vec<VertexId> {
        self.vertices
            .iter()
            .filter(|v| v.boundary)
            .map(|v| v.id)
            .collect()
    }

    /// Vertices sharing an edge with `v`, in increasing id order.
    pub fn neighbors(&self, v: VertexId) -> Vec<VertexId> {
        self.edges
            .keys()
            .filter(|k| k.contains(v))
            .map(|k| if k.lo() == v { k.hi() } else { k.lo() })
            .collect()
    }

    /// Interior edges with their two opposite vertices: `(edge, k, l)` where
    /// `k` is the apex of the first incident face and `l` of the second.
    pub fn interior_edges(&self) -> Vec<(EdgeKey, VertexId, VertexId)> {
        self.edges
            .iter()
            .filter_map(|(&key, ef)| match *ef {
                EdgeFaces::Interior(f, g) => Some((key, self.apex(f, key), self.apex(g, key))),
                EdgeFaces::Boundary(_) => None,
            })
            .collect()
    }

    /// The vertex of face `f` not on `edge`.
    pub fn apex(&self, f: usize, edge: EdgeKey) -> VertexId {
        *self.faces[f]
            .iter()
            .find(|&&v| !edge.contains(v))
            .expect("edge belongs to face")
    }
}

/// Per-edge inversive distances, every value in `(-1, +inf)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightAssignment {
    eta: BTreeMap<EdgeKey, f64>,
}

impl WeightAssignment {
    /// Validates that `eta` is defined on exactly the edges of `tri` and
    /// every value exceeds -1.
    pub fn new(tri: &Triangulation, eta: BTreeMap<EdgeKey, f64>) -> Result<Self, MeshError> {
        for (&edge, &value) in &eta {
            if !tri.edges.contains_key(&edge) {
                return Err(MeshError::UnknownEdge(edge));
            }
            if !(value > -1.0) || !value.is_finite() {
                return Err(MeshError::WeightOutOfRange { edge, value });
            }
        }
        if let Some(&missing) = tri.edges.keys().find(|k| !eta.contains_key(k)) {
            return Err(MeshError::MissingWeight(missing));
        }
        Ok(WeightAssignment { eta })
    }

    pub fn uniform(tri: &Triangulation, value: f64) -> Result<Self, MeshError> {
        Self::new(tri, tri.edges.keys().map(|&k| (k, value)).collect())
    }

    pub fn get(&self, a: VertexId, b: VertexId) -> f64 {
        self.eta[&EdgeKey::new(a, b)]
    }

    pub fn try_get(&self, a: VertexId, b: VertexId) -> Option<f64> {
        self.eta.get(&EdgeKey::new(a, b)).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (EdgeKey, f64)> + '_ {
        self.eta.iter().map(|(&k, &v)| (k, v))
    }

    pub fn as_map(&self) -> &BTreeMap<EdgeKey, f64> {
        &self.eta
    }
}

/// Which background geometry a radius or metric refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Geometry {
    Euclidean,
    Hyperbolic,
}

/// Per-vertex radii, tagged with their geometry. All values positive.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadiusAssignment {
    pub geometry: Geometry,
    radii: BTreeMap<VertexId, f64>,
}

impl RadiusAssignment {
    pub fn new(
        tri: &Triangulation,
        geometry: Geometry,
        radii: BTreeMap<VertexId, f64>,
    ) -> Result<Self, MeshError> {
        check_vertex_domain(tri, &radii)?;
        for (&vertex, &value) in &radii {
            if !(value > 0.0) || !value.is_finite() {
                return Err(MeshError::NonPositiveRadius { vertex, value });
            }
        }
        Ok(RadiusAssignment { geometry, radii })
    }

    pub fn uniform(tri: &Triangulation, geometry: Geometry, value: f64) -> Result<Self, MeshError> {
        Self::new(
            tri,
            geometry,
            tri.vertex_ids().map(|v| (v, value)).collect(),
        )
    }

    pub fn get(&self, v: VertexId) -> f64 {
        self.radii[&v]
    }

    pub fn iter(&self) -> impl Iterator<Item = (VertexId, f64)> + '_ {
        self.radii.iter().map(|(&k, &v)| (k, v))
    }

    pub fn as_map(&self) -> &BTreeMap<VertexId, f64> {
        &self.radii
    }

    /// Labels in the convention of the radius geometry:
    /// `ln tanh(r/2)` for hyperbolic radii, `ln R` for Euclidean ones.
    pub fn to_labels(&self) -> LabelAssignment {
        let labels = self
            .radii
            .iter()
            .map(|(&v, &r)| (v, radius_to_label(self.geometry, r)))
            .collect();
        LabelAssignment {
            geometry: self.geometry,
            labels,
        }
    }
}

/// Per-vertex labels: `u = ln tanh(r/2) < 0` (hyperbolic) or `u = ln R`
/// (Euclidean).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LabelAssignment {
    pub geometry: Geometry,
    labels: BTreeMap<VertexId, f64>,
}

impl LabelAssignment {
    pub fn new(
        tri: &Triangulation,
        geometry: Geometry,
        labels: BTreeMap<VertexId, f64>,
    ) -> Result<Self, MeshError> {
        check_vertex_domain(tri, &labels)?;
        Self::from_map(geometry, labels)
    }

    /// Labels without a domain check against a triangulation.
    pub fn from_map(
        geometry: Geometry,
        labels: BTreeMap<VertexId, f64>,
    ) -> Result<Self, MeshError> {
        for (&vertex, &value) in &labels {
            let ok = value.is_finite() && (geometry == Geometry::Euclidean || value < 0.0);
            if !ok {
                return Err(MeshError::LabelOutOfRange { vertex, value });
            }
        }
        Ok(LabelAssignment { geometry, labels })
    }

    pub fn get(&self, v: VertexId) -> f64 {
        self.labels[&v]
    }

    pub fn iter(&self) -> impl Iterator<Item = (VertexId, f64)> + '_ {
        self.labels.iter().map(|(&k, &v)| (k, v))
    }

    pub fn as_map(&self) -> &BTreeMap<VertexId, f64> {
        &self.labels
    }

    /// Inverse of [`RadiusAssignment::to_labels`]: `r = 2 artanh(e^u)` or `R = e^u`.
    pub fn to_radii(&self) -> RadiusAssignment {
        let radii = self
            .labels
            .iter()
            .map(|(&v, &u)| (v, label_to_radius(self.geometry, u)))
            .collect();
        RadiusAssignment {
            geometry: self.geometry,
            radii,
        }
    }
}

/// `ln tanh(r/2)` (hyperbolic) or `ln R` (Euclidean).
pub fn radius_to_label(geometry: Geometry, r: f64) -> f64 {
    match geometry {
        Geometry::Hyperbolic => (r / 2.0).tanh().ln(),
        Geometry::Euclidean => r.ln(),
    }
}

/// `2 artanh(e^u)` (hyperbolic) or `e^u` (Euclidean).
pub fn label_to_radius(geometry: Geometry, u: f64) -> f64 {
    match geometry {
        Geometry::Hyperbolic => 2.0 * u.exp().atanh(),
        Geometry::Euclidean => u.exp(),
    }
}

fn check_vertex_domain(
    tri: &Triangulation,
    map: &BTreeMap<VertexId, f64>,
) -> Result<(), MeshError> {
    if let Some(&v) = map.keys().find(|&&v| !tri.contains_vertex(v)) {
        return Err(MeshError::UnknownVertex(v));
    }
    if let Some(v) = tri.vertex_ids().find(|v| !map.contains_key(v)) {
        return Err(MeshError::MissingVertex(v));
    }
    Ok(())
}

/// Outcome of a per-face or per-edge weight check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightReport {
    pub pass: bool,
    /// Faces violating the structure condition, or faces of offending edge
    /// pairs for the regularity test.
    pub offending_faces: Vec<usize>,
    pub offending_edges: Vec<EdgeKey>,
}

/// Structure condition `eta_ij + eta_jk * eta_ik >= 0` (all three cyclic
/// versions) on every face, evaluated without slack.
pub fn check_structure_condition(tri: &Triangulation, eta: &WeightAssignment) -> WeightReport {
    let offending_faces: Vec<usize> = tri
        .faces()
        .iter()
        .enumerate()
        .filter(|(_, f)| {
            !face_satisfies_structure_condition(
                eta.get(f[0], f[1]),
                eta.get(f[1], f[2]),
                eta.get(f[0], f[2]),
            )
        })
        .map(|(i, _)| i)
        .collect();
    WeightReport {
        pass: offending_faces.is_empty(),
        offending_faces,
        offending_edges: Vec::new(),
    }
}

/// The three structure inequalities for one face.
pub fn face_satisfies_structure_condition(eta_ij: f64, eta_jk: f64, eta_ik: f64) -> bool {
    eta_ij + eta_jk * eta_ik >= 0.0
        && eta_jk + eta_ij * eta_ik >= 0.0
        && eta_ik + eta_ij * eta_jk >= 0.0
}

/// Regular-weight test. Only interior edges (two incident faces) are
/// examined; an edge `12` with apexes `3`, `4` is exceptional when
/// `eta_12 = 1`, `eta_13 = -eta_23` and `eta_14 = -eta_24`, each up to
/// [`REGULARITY_TOL`].
pub fn check_regular_weight(tri: &Triangulation, eta: &WeightAssignment) -> WeightReport {
    let mut offending_edges = Vec::new();
    let mut offending_faces = Vec::new();
    for (edge, ef) in tri.edges() {
        let EdgeFaces::Interior(f, g) = *ef else {
            continue;
        };
        let (v1, v2) = (edge.lo(), edge.hi());
        let (v3, v4) = (tri.apex(f, *edge), tri.apex(g, *edge));
        let exceptional = (eta.get(v1, v2) - 1.0).abs() <= REGULARITY_TOL
            && (eta.get(v1, v3) + eta.get(v2, v3)).abs() <= REGULARITY_TOL
            && (eta.get(v1, v4) + eta.get(v2, v4)).abs() <= REGULARITY_TOL;
        if exceptional {
            offending_edges.push(*edge);
            offending_faces.extend([f, g]);
        }
    }
    WeightReport {
        pass: offending_edges.is_empty(),
        offending_faces,
        offending_edges,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_face() {
        let t = Triangulation::from_faces(&[[0, 1, 2]]).unwrap();
        assert_eq!(t.num_vertices(), 3);
        assert!(t.vertices().iter().all(|v| v.boundary));
        assert_eq!(t.edges().len(), 3);
        assert!(t.edges().values().all(|ef| !ef.is_interior()));
    }

    #[test]
    fn hexagonal_star_from_raw_faces() {
        let faces: Vec<[usize; 3]> = (1..=6).map(|i| [0, i, i % 6 + 1]).collect();
        let t = Triangulation::from_faces(&faces).unwrap();
        assert_eq!(t.is_boundary(0), Some(false));
        for v in 1..=6 {
            assert_eq!(t.is_boundary(v), Some(true));
        }
    }

    #[test]
    fn rejects_degenerate_inputs() {
        assert!(matches!(
            Triangulation::from_faces(&[[0, 1, 2], [0, 2, 1]]),
            Err(MeshError::DuplicateFace { .. })
        ));
        assert!(matches!(
            Triangulation::from_faces(&[[0, 1, 1]]),
            Err(MeshError::RepeatedVertex { .. })
        ));
        assert!(matches!(
            Triangulation::from_faces(&[[0, 1, 2], [3, 4, 5]]),
            Err(MeshError::Disconnected { components: 2 })
        ));
        assert!(matches!(
            Triangulation::from_faces(&[[0, 1, 2], [1, 0, 3], [0, 1, 4]]),
            Err(MeshError::InconsistentOrientation { .. }) | Err(MeshError::NonManifoldEdge { .. })
        ));
        assert!(matches!(
            Triangulation::from_faces(&[[0, 1, 2], [0, 1, 3]]),
            Err(MeshError::InconsistentOrientation { .. })
        ));
        assert_eq!(Triangulation::from_faces(&[]), Err(MeshError::Empty));
    }

    #[test]
    fn fan_with_three_faces_on_one_edge_is_rejected() {
        // orientations chosen so that only the incidence count is wrong
        let r = Triangulation::from_faces(&[[0, 1, 2], [1, 0, 3], [4, 0, 1]]);
        assert!(r.is_err());
    }

    #[test]
    fn star_polygon_counts() {
        let t = Triangulation::star_polygon(3).unwrap();
        assert_eq!(t.num_vertices(), 4);
        assert_eq!(t.faces().len(), 3);
        assert_eq!(t.interior_vertices(), vec![0]);

        let t6 = Triangulation::star_polygon(6).unwrap();
        assert_eq!(t6.faces().len(), 6);
        assert_eq!(t6.boundary_vertices(), (1..=6).collect::<Vec<_>>());
        assert_eq!(
            Triangulation::star_polygon(2),
            Err(MeshError::TooFewSides(2))
        );
    }

    #[test]
    fn hex_disk_counts() {
        let t1 = Triangulation::hex_disk(1).unwrap();
        assert_eq!((t1.num_vertices(), t1.faces().len()), (7, 6));
        assert_eq!(t1.interior_vertices(), vec![0]);
        for k in 1..=5usize {
            let t = Triangulation::hex_disk(k).unwrap();
            assert_eq!(t.num_vertices(), 3 * k * k + 3 * k + 1);
            assert_eq!(t.faces().len(), 6 * k * k);
            // inner rings are interior
            let inner = 3 * (k - 1) * (k - 1) + 3 * (k - 1) + 1;
            assert_eq!(t.interior_vertices().len(), inner);
        }
        assert_eq!(Triangulation::hex_disk(0), Err(MeshError::TooFewRings(0)));
    }

    /// Lattice-point and triangle count by direct enumeration over a
    /// bounding box, independent of the generator's construction.
    #[test]
    fn hex_disk_matches_enumeration() {
        for k in [2i64, 3] {
            let inside = |q: i64, r: i64| q.abs() <= k && r.abs() <= k && (q + r).abs() <= k;
            let mut pts = 0;
            let mut tris = 0;
            for q in -k - 1..=k + 1 {
                for r in -k - 1..=k + 1 {
                    if inside(q, r) {
                        pts += 1;
                    }
                    if inside(q, r) && inside(q + 1, r) && inside(q, r + 1) {
                        tris += 1;
                    }
                    if inside(q + 1, r) && inside(q + 1, r + 1) && inside(q, r + 1) {
                        tris += 1;
                    }
                }
            }
            let t = Triangulation::hex_disk(k as usize).unwrap();
            assert_eq!(t.num_vertices(), pts);
            assert_eq!(t.faces().len(), tris);
        }
        let t2 = Triangulation::hex_disk(2).unwrap();
        assert_eq!(
            (
                t2.num_vertices(),
                t2.faces().len(),
                t2.interior_vertices().len()
            ),
            (19, 24, 7)
        );
        let t3 = Triangulation::hex_disk(3).unwrap();
        assert_eq!((t3.num_vertices(), t3.faces().len()), (37, 54));
    }

    #[test]
    fn edge_key_is_symmetric() {
        assert_eq!(EdgeKey::new(3, 7), EdgeKey::new(7, 3));
        let t = Triangulation::star_polygon(4).unwrap();
        let eta = WeightAssignment::uniform(&t, 0.5).unwrap();
        assert_eq!(eta.get(0, 2), eta.get(2, 0));
    }

    #[test]
    fn weights_are_validated() {
        let t = Triangulation::from_faces(&[[0, 1, 2]]).unwrap();
        assert!(matches!(
            WeightAssignment::uniform(&t, -1.0),
            Err(MeshError::WeightOutOfRange { .. })
        ));
        let mut m: BTreeMap<EdgeKey, f64> = t.edges().keys().map(|&k| (k, 0.0)).collect();
        m.remove(&EdgeKey::new(0, 1));
        assert!(matches!(
            WeightAssignment::new(&t, m.clone()),
            Err(MeshError::MissingWeight(_))
        ));
        m.insert(EdgeKey::new(0, 1), 0.0);
        m.insert(EdgeKey::new(0, 9), 0.0);
        assert!(matches!(
            WeightAssignment::new(&t, m),
            Err(MeshError::UnknownEdge(_))
        ));
    }

    #[test]
    fn radii_and_labels_round_trip() {
        let t = Triangulation::star_polygon(5).unwrap();
        let radii: BTreeMap<_, _> = t.vertex_ids().map(|v| (v, 0.1 + 0.2 * v as f64)).collect();
        let r = RadiusAssignment::new(&t, Geometry::Hyperbolic, radii).unwrap();
        let u = r.to_labels();
        assert!(u.iter().all(|(_, x)| x < 0.0));
        let back = u.to_radii();
        for (v, x) in r.iter() {
            assert!((back.get(v) - x).abs() < 1e-13);
        }
        assert!(matches!(
            RadiusAssignment::uniform(&t, Geometry::Euclidean, 0.0),
            Err(MeshError::NonPositiveRadius { .. })
        ));
        assert!(matches!(
            LabelAssignment::from_map(Geometry::Hyperbolic, [(0, 0.1)].into()),
            Err(MeshError::LabelOutOfRange { .. })
        ));
    }

    fn single_face_eta(a: f64, b: f64, c: f64) -> (Triangulation, WeightAssignment) {
        let t = Triangulation::from_faces(&[[0, 1, 2]]).unwrap();
        let m = [
            (EdgeKey::new(0, 1), a),
            (EdgeKey::new(1, 2), b),
            (EdgeKey::new(0, 2), c),
        ]
        .into();
        let eta = WeightAssignment::new(&t, m).unwrap();
        (t, eta)
    }

    #[test]
    fn structure_condition_examples() {
        let t = Triangulation::hex_disk(2).unwrap();
        assert!(check_structure_condition(&t, &WeightAssignment::uniform(&t, 1.0).unwrap()).pass);
        assert!(check_structure_condition(&t, &WeightAssignment::uniform(&t, 0.0).unwrap()).pass);

        // 0.5 + 0.9 * (-0.9) = -0.31
        let (t, eta) = single_face_eta(0.5, 0.9, -0.9);
        let rep = check_structure_condition(&t, &eta);
        assert!(!rep.pass);
        assert_eq!(rep.offending_faces, vec![0]);
    }

    #[test]
    fn regular_weight_examples() {
        // two faces sharing edge 1-2 with apexes 3 and 4
        let t = Triangulation::from_faces(&[[1, 2, 3], [2, 1, 4]]).unwrap();
        let mut m: BTreeMap<EdgeKey, f64> = t.edges().keys().map(|&k| (k, 0.0)).collect();
        m.insert(EdgeKey::new(1, 2), 1.0);
        let eta = WeightAssignment::new(&t, m.clone()).unwrap();
        let rep = check_regular_weight(&t, &eta);
        assert!(!rep.pass);
        assert_eq!(rep.offending_edges, vec![EdgeKey::new(1, 2)]);

        m.insert(EdgeKey::new(1, 2), 0.999);
        assert!(check_regular_weight(&t, &WeightAssignment::new(&t, m).unwrap()).pass);

        let hex = Triangulation::hex_disk(2).unwrap();
        assert!(check_regular_weight(&hex, &WeightAssignment::uniform(&hex, 1.0).unwrap()).pass);
        assert!(check_regular_weight(&hex, &WeightAssignment::uniform(&hex, 0.5).unwrap()).pass);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn structure_condition_ignores_vertex_order(a in -0.99f64..3.0, b in -0.99f64..3.0, c in -0.99f64..3.0) {
                let base = face_satisfies_structure_condition(a, b, c);
                prop_assert_eq!(base, face_satisfies_structure_condition(b, c, a));
                prop_assert_eq!(base, face_satisfies_structure_condition(c, a, b));
                prop_assert_eq!(base, face_satisfies_structure_condition(a, c, b));
                prop_assert_eq!(base, face_satisfies_structure_condition(b, a, c));
            }
        }
    }
}
