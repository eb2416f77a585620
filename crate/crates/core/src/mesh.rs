//! Indexed triangle meshes, their metadata and combinatorial topology.

use std::collections::{BTreeMap, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vec3 = nalgebra::Vector3<f64>;

/// Global vertical direction.
pub fn e3() -> Vec3 {
    Vec3::new(0.0, 0.0, 1.0)
}

/// Which way the unit normal points relative to the triangle winding.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum Orientation {
    /// ν follows the right-hand rule of each triangle's winding.
    #[default]
    Winding,
    /// ν is the negated right-hand-rule normal.
    Reversed,
}

impl Orientation {
    pub fn sign(self) -> f64 {
        match self {
            Orientation::Winding => 1.0,
            Orientation::Reversed => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Orientation::Winding => Orientation::Reversed,
            Orientation::Reversed => Orientation::Winding,
        }
    }
}

/// Closed half-space `{x : <normal, x> <= offset}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HalfSpace {
    pub normal: [f64; 3],
    pub offset: f64,
}

impl HalfSpace {
    pub fn new(normal: Vec3, offset: f64) -> Self {
        let n = normal.normalize();
        let scale = normal.norm();
        HalfSpace {
            normal: [n.x, n.y, n.z],
            offset: offset / scale,
        }
    }

    pub fn normal(&self) -> Vec3 {
        Vec3::from(self.normal)
    }

    /// Signed distance from `x` to the bounding plane, positive inside.
    pub fn depth(&self, x: &Vec3) -> f64 {
        self.offset - self.normal().dot(x)
    }
}

/// Description of what part of the complete surface a finite mesh represents.
///
/// The mesh contains the complete surface intersected with the region
/// cut out by `half_spaces`; everything omitted lies outside that region.
/// `area_growth` bounds `Area(Σ ∩ B_R(x)) / R²` for the complete surface.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Truncation {
    pub half_spaces: Vec<HalfSpace>,
    pub area_growth: f64,
}

impl Truncation {
    /// Distance from `x` to the complement of the covered region (0 outside).
    pub fn clearance(&self, x: &Vec3) -> f64 {
        self.half_spaces
            .iter()
            .map(|h| h.depth(x))
            .fold(f64::INFINITY, f64::min)
            .max(0.0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
pub struct MeshMeta {
    pub generator: String,
    pub params: BTreeMap<String, f64>,
    pub height_cap: Option<f64>,
    pub truncation: Option<Truncation>,
    /// Generator produces a translating soliton.
    pub translator: bool,
    pub simply_connected: bool,
    /// Strip width of the projection, for slab generators.
    pub strip_width: Option<f64>,
    pub orientation_convention: String,
}

#[derive(Clone, Debug)]
pub struct SurfaceMesh {
    pub vertices: Vec<Vec3>,
    pub triangles: Vec<[usize; 3]>,
    pub orientation: Orientation,
    pub meta: MeshMeta,
}

impl SurfaceMesh {
    pub fn new(vertices: Vec<Vec3>, triangles: Vec<[usize; 3]>) -> Self {
        SurfaceMesh {
            vertices,
            triangles,
            orientation: Orientation::Winding,
            meta: MeshMeta::default(),
        }
    }

    /// Triangulates a structured `nu × nv` vertex grid; vertex `(i, j)` is
    /// `position(i, j)` and sits at index `j * nu + i`. The winding normal
    /// follows `∂_i × ∂_j`.
    pub fn from_grid(nu: usize, nv: usize, mut position: impl FnMut(usize, usize) -> Vec3) -> Self {
        let mut vertices = Vec::with_capacity(nu * nv);
        for j in 0..nv {
            for i in 0..nu {
                vertices.push(position(i, j));
            }
        }
        let mut triangles = Vec::with_capacity(2 * nu.saturating_sub(1) * nv.saturating_sub(1));
        for j in 0..nv.saturating_sub(1) {
            for i in 0..nu.saturating_sub(1) {
                let v00 = j * nu + i;
                let v10 = v00 + 1;
                let v01 = v00 + nu;
                let v11 = v01 + 1;
                triangles.push([v00, v10, v11]);
                triangles.push([v00, v11, v01]);
            }
        }
        SurfaceMesh::new(vertices, triangles)
    }

    pub fn with_meta(mut self, meta: MeshMeta) -> Self {
        self.meta = meta;
        self
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn bbox(&self) -> (Vec3, Vec3) {
        let mut lo = Vec3::repeat(f64::INFINITY);
        let mut hi = Vec3::repeat(f64::NEG_INFINITY);
        for v in &self.vertices {
            lo = lo.inf(v);
            hi = hi.sup(v);
        }
        (lo, hi)
    }

    pub fn bbox_diagonal(&self) -> f64 {
        if self.vertices.is_empty() {
            return 0.0;
        }
        let (lo, hi) = self.bbox();
        (hi - lo).norm()
    }

    /// Right-hand-rule cross product of a triangle (twice its vector area).
    pub fn triangle_cross(&self, t: usize) -> Vec3 {
        let [a, b, c] = self.triangles[t];
        let (pa, pb, pc) = (self.vertices[a], self.vertices[b], self.vertices[c]);
        (pb - pa).cross(&(pc - pa))
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        0.5 * self.triangle_cross(t).norm()
    }

    pub fn total_area(&self) -> f64 {
        (0..self.triangles.len()).map(|t| self.triangle_area(t)).sum()
    }

    pub fn mean_edge_length(&self) -> f64 {
        let mut sum = 0.0;
        let mut n = 0usize;
        for tri in &self.triangles {
            for k in 0..3 {
                sum += (self.vertices[tri[k]] - self.vertices[tri[(k + 1) % 3]]).norm();
                n += 1;
            }
        }
        if n == 0 {
            0.0
        } else {
            sum / n as f64
        }
    }

    /// Area-weighted vertex normals, oriented by `self.orientation`.
    pub fn vertex_normals(&self) -> Vec<Vec3> {
        let mut normals = vec![Vec3::zeros(); self.vertices.len()];
        for (t, tri) in self.triangles.iter().enumerate() {
            let c = self.triangle_cross(t);
            for &v in tri {
                normals[v] += c;
            }
        }
        let s = self.orientation.sign();
        for n in &mut normals {
            let len = n.norm();
            if len > 0.0 {
                *n *= s / len;
            }
        }
        normals
    }

    /// Same surface with the opposite unit normal.
    pub fn flipped(&self) -> Self {
        let mut m = self.clone();
        m.orientation = self.orientation.flipped();
        m
    }

    /// Checks index validity, non-degeneracy, edge-manifoldness and
    /// consistent orientation.
    pub fn validate(&self) -> Result<()> {
        let n = self.vertices.len();
        for (t, tri) in self.triangles.iter().enumerate() {
            for &i in tri {
                if i >= n {
                    return Err(Error::IndexOutOfRange {
                        triangle: t,
                        index: i,
                        count: n,
                    });
                }
            }
        }
        let diag = self.bbox_diagonal();
        let threshold = 1e-12 * diag * diag;
        for t in 0..self.triangles.len() {
            let area = self.triangle_area(t);
            if !(area > threshold) {
                return Err(Error::DegenerateTriangle {
                    triangle: t,
                    area,
                    threshold,
                });
            }
        }
        let mut directed: HashMap<(usize, usize), usize> = HashMap::new();
        for (t, tri) in self.triangles.iter().enumerate() {
            for k in 0..3 {
                let e = (tri[k], tri[(k + 1) % 3]);
                if e.0 == e.1 {
                    return Err(Error::NonManifoldMesh(format!("triangle {t} repeats a vertex")));
                }
                if let Some(other) = directed.insert(e, t) {
                    return Err(Error::NonManifoldMesh(format!(
                        "directed edge {:?} used by triangles {other} and {t} (inconsistent orientation or more than two triangles)",
                        e
                    )));
                }
            }
        }
        Ok(())
    }

    /// Disjoint union; truncation regions are intersected and area-growth
    /// constants added.
    pub fn union(&self, other: &SurfaceMesh) -> SurfaceMesh {
        let offset = self.vertices.len();
        let mut vertices = self.vertices.clone();
        vertices.extend_from_slice(&other.vertices);
        let mut triangles = self.triangles.clone();
        let flip = self.orientation != other.orientation;
        triangles.extend(other.triangles.iter().map(|&[a, b, c]| {
            if flip {
                [a + offset, c + offset, b + offset]
            } else {
                [a + offset, b + offset, c + offset]
            }
        }));
        let truncation = match (&self.meta.truncation, &other.meta.truncation) {
            (Some(a), Some(b)) => {
                let mut hs = a.half_spaces.clone();
                hs.extend_from_slice(&b.half_spaces);
                Some(Truncation {
                    half_spaces: hs,
                    area_growth: a.area_growth + b.area_growth,
                })
            }
            _ => None,
        };
        let meta = MeshMeta {
            generator: format!("union({},{})", self.meta.generator, other.meta.generator),
            params: BTreeMap::new(),
            height_cap: match (self.meta.height_cap, other.meta.height_cap) {
                (Some(a), Some(b)) => Some(a.min(b)),
                (a, b) => a.or(b),
            },
            truncation,
            translator: self.meta.translator && other.meta.translator,
            simply_connected: false,
            strip_width: None,
            orientation_convention: self.meta.orientation_convention.clone(),
        };
        SurfaceMesh {
            vertices,
            triangles,
            orientation: self.orientation,
            meta,
        }
    }

    pub fn topology(&self) -> Topology {
        Topology::build(self)
    }
}

/// Adjacency data derived from the triangle list.
#[derive(Clone, Debug)]
pub struct Topology {
    pub neighbors: Vec<Vec<usize>>,
    pub vertex_triangles: Vec<Vec<usize>>,
    /// Unique undirected edges `[lo, hi]`.
    pub edges: Vec<[usize; 2]>,
    pub edge_triangles: Vec<Vec<usize>>,
    pub edge_index: HashMap<(usize, usize), usize>,
    pub boundary_vertex: Vec<bool>,
    /// Number of edge hops to the nearest boundary vertex (`usize::MAX` on closed meshes).
    pub boundary_distance: Vec<usize>,
}

impl Topology {
    pub fn build(mesh: &SurfaceMesh) -> Self {
        let n = mesh.vertices.len();
        let mut vertex_triangles = vec![Vec::new(); n];
        let mut edge_index: HashMap<(usize, usize), usize> = HashMap::new();
        let mut edges = Vec::new();
        let mut edge_triangles: Vec<Vec<usize>> = Vec::new();
        for (t, tri) in mesh.triangles.iter().enumerate() {
            for k in 0..3 {
                vertex_triangles[tri[k]].push(t);
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                let key = (a.min(b), a.max(b));
                let idx = *edge_index.entry(key).or_insert_with(|| {
                    edges.push([key.0, key.1]);
                    edge_triangles.push(Vec::new());
                    edges.len() - 1
                });
                edge_triangles[idx].push(t);
            }
        }
        let mut neighbors = vec![Vec::new(); n];
        let mut boundary_vertex = vec![false; n];
        for (e, &[a, b]) in edges.iter().enumerate() {
            neighbors[a].push(b);
            neighbors[b].push(a);
            if edge_triangles[e].len() == 1 {
                boundary_vertex[a] = true;
                boundary_vertex[b] = true;
            }
        }
        for nb in &mut neighbors {
            nb.sort_unstable();
        }
        let mut boundary_distance = vec![usize::MAX; n];
        let mut queue = VecDeque::new();
        for v in 0..n {
            if boundary_vertex[v] {
                boundary_distance[v] = 0;
                queue.push_back(v);
            }
        }
        while let Some(v) = queue.pop_front() {
            let d = boundary_distance[v] + 1;
            for &w in &neighbors[v] {
                if boundary_distance[w] == usize::MAX {
                    boundary_distance[w] = d;
                    queue.push_back(w);
                }
            }
        }
        Topology {
            neighbors,
            vertex_triangles,
            edges,
            edge_triangles,
            edge_index,
            boundary_vertex,
            boundary_distance,
        }
    }

    /// Vertices within `k` edge hops of `v`, excluding `v` itself.
    pub fn ring(&self, v: usize, k: usize) -> Vec<usize> {
        let mut seen = vec![v];
        let mut frontier = vec![v];
        for _ in 0..k {
            let mut next = Vec::new();
            for &u in &frontier {
                for &w in &self.neighbors[u] {
                    if !seen.contains(&w) {
                        seen.push(w);
                        next.push(w);
                    }
                }
            }
            frontier = next;
        }
        seen.remove(0);
        seen
    }

    /// True when `v` is at least `rings + 1` hops from every boundary vertex.
    pub fn is_interior(&self, v: usize, rings: usize) -> bool {
        self.boundary_distance[v] > rings
    }

    pub fn edge(&self, a: usize, b: usize) -> Option<usize> {
        self.edge_index.get(&(a.min(b), a.max(b))).copied()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> SurfaceMesh {
        SurfaceMesh::from_grid(5, 5, |i, j| Vec3::new(i as f64, j as f64, 0.0))
    }

    #[test]
    fn grid_is_valid_and_upward() {
        let m = square();
        m.validate().unwrap();
        assert_eq!(m.triangles.len(), 32);
        for n in m.vertex_normals() {
            assert!((n - e3()).norm() < 1e-14);
        }
        assert!((m.total_area() - 16.0).abs() < 1e-12);
    }

    #[test]
    fn boundary_distance_counts_rings() {
        let m = square();
        let topo = m.topology();
        assert_eq!(topo.boundary_distance[12], 2);
        assert_eq!(topo.boundary_distance[6], 1);
        assert_eq!(topo.boundary_distance[0], 0);
        assert!(topo.is_interior(12, 1));
        assert!(!topo.is_interior(12, 2));
    }

    #[test]
    fn detects_bad_index_and_orientation() {
        let mut m = square();
        m.triangles[3] = [0, 1, 99];
        assert!(matches!(m.validate(), Err(Error::IndexOutOfRange { .. })));
        let mut m = square();
        let [a, b, c] = m.triangles[3];
        m.triangles[3] = [a, c, b];
        assert!(matches!(m.validate(), Err(Error::NonManifoldMesh(_))));
    }

    #[test]
    fn detects_degenerate_triangle() {
        let mut m = square();
        m.vertices.push(Vec3::new(10.0, 10.0, 0.0));
        m.triangles.push([24, 25, 25]);
        assert!(m.validate().is_err());
    }

    #[test]
    fn truncation_clearance() {
        let t = Truncation {
            half_spaces: vec![
                HalfSpace::new(Vec3::new(0.0, 0.0, 2.0), 10.0),
                HalfSpace::new(Vec3::new(0.0, 1.0, 0.0), 3.0),
            ],
            area_growth: 1.0,
        };
        assert!((t.clearance(&Vec3::zeros()) - 3.0).abs() < 1e-14);
        assert_eq!(t.clearance(&Vec3::new(0.0, 0.0, 7.0)), 0.0);
    }
}
