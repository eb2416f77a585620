//! Zero level sets of piecewise-linear vertex fields on triangle meshes.

use std::collections::{HashMap, HashSet};

use crate::mesh::{SurfaceMesh, Topology, Vec3};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub(crate) enum NodeKey {
    Vertex(usize),
    Edge(usize, usize),
}

/// Nodes and segments of the zero set.
#[derive(Clone, Debug, Default)]
pub(crate) struct SegmentGraph {
    pub keys: Vec<NodeKey>,
    pub positions: Vec<Vec3>,
    /// Edge parameter `s` of crossing nodes (`x = (1−s) a + s b`).
    pub params: Vec<f64>,
    /// Node lies on the mesh boundary.
    pub on_boundary: Vec<bool>,
    pub segments: Vec<(usize, usize)>,
}

impl SegmentGraph {
    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.keys.len()];
        for &(a, b) in &self.segments {
            d[a] += 1;
            d[b] += 1;
        }
        d
    }

    pub fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.keys.len()];
        for (s, &(a, b)) in self.segments.iter().enumerate() {
            adj[a].push((b, s));
            adj[b].push((a, s));
        }
        adj
    }
}

struct Builder<'a> {
    mesh: &'a SurfaceMesh,
    topo: &'a Topology,
    f: Vec<f64>,
    graph: SegmentGraph,
    index: HashMap<NodeKey, usize>,
    seen: HashSet<(usize, usize)>,
}

impl Builder<'_> {
    fn node(&mut self, key: NodeKey) -> usize {
        if let Some(&n) = self.index.get(&key) {
            return n;
        }
        let (pos, s, boundary) = match key {
            NodeKey::Vertex(v) => (self.mesh.vertices[v], 0.0, self.topo.boundary_vertex[v]),
            NodeKey::Edge(a, b) => {
                let (fa, fb) = (self.f[a], self.f[b]);
                let s = fa / (fa - fb);
                let p = self.mesh.vertices[a] * (1.0 - s) + self.mesh.vertices[b] * s;
                let e = self.topo.edge(a, b).unwrap();
                (p, s, self.topo.edge_triangles[e].len() == 1)
            }
        };
        let n = self.graph.keys.len();
        self.graph.keys.push(key);
        self.graph.positions.push(pos);
        self.graph.params.push(s);
        self.graph.on_boundary.push(boundary);
        self.index.insert(key, n);
        n
    }

    fn segment(&mut self, a: NodeKey, b: NodeKey) {
        let (na, nb) = (self.node(a), self.node(b));
        if na != nb && self.seen.insert((na.min(nb), na.max(nb))) {
            self.graph.segments.push((na, nb));
        }
    }
}

fn crossing(a: usize, b: usize) -> NodeKey {
    NodeKey::Edge(a.min(b), a.max(b))
}

/// Zero set of `values` (snapped to 0 where `|value| < snap`), restricted to
/// triangles with `mask[t]` when a mask is given.
pub(crate) fn zero_set(
    mesh: &SurfaceMesh,
    topo: &Topology,
    values: &[f64],
    snap: f64,
    mask: Option<&[bool]>,
) -> SegmentGraph {
    let f: Vec<f64> = values.iter().map(|&v| if v.abs() < snap { 0.0 } else { v }).collect();
    let active = |t: usize| mask.map_or(true, |m| m[t]);
    let mut b = Builder {
        mesh,
        topo,
        f,
        graph: SegmentGraph::default(),
        index: HashMap::new(),
        seen: HashSet::new(),
    };
    for (t, tri) in mesh.triangles.iter().enumerate() {
        if !active(t) {
            continue;
        }
        let fv = tri.map(|v| b.f[v]);
        let zeros = fv.iter().filter(|&&x| x == 0.0).count();
        match zeros {
            0 => {
                let mut cuts = Vec::with_capacity(2);
                for k in 0..3 {
                    let (p, q) = (k, (k + 1) % 3);
                    if fv[p] * fv[q] < 0.0 {
                        cuts.push(crossing(tri[p], tri[q]));
                    }
                }
                if cuts.len() == 2 {
                    b.segment(cuts[0], cuts[1]);
                }
            }
            1 => {
                let z = (0..3).find(|&k| fv[k] == 0.0).unwrap();
                let (p, q) = ((z + 1) % 3, (z + 2) % 3);
                if fv[p] * fv[q] < 0.0 {
                    b.segment(NodeKey::Vertex(tri[z]), crossing(tri[p], tri[q]));
                }
            }
            _ => {}
        }
    }
    // Edges with both ends on the set belong to it when they separate the
    // two sides (or lie on the border of the active region).
    for (e, &[u, v]) in topo.edges.iter().enumerate() {
        if b.f[u] != 0.0 || b.f[v] != 0.0 {
            continue;
        }
        let opposite: Vec<f64> = topo.edge_triangles[e]
            .iter()
            .filter(|&&t| active(t))
            .map(|&t| {
                let w = mesh.triangles[t].iter().copied().find(|&w| w != u && w != v).unwrap();
                b.f[w]
            })
            .collect();
        let keep = match opposite.as_slice() {
            [a] => *a != 0.0,
            [a, c] => a * c < 0.0,
            _ => false,
        };
        if keep {
            b.segment(NodeKey::Vertex(u), NodeKey::Vertex(v));
        }
    }
    b.graph
}
