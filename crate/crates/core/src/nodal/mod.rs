//! Plane sections `Σ ∩ P`, their arcs and singular points, the set
//! `{H = 0}`, and the elliptic identities satisfied on translators.

mod level_set;
mod residuals;

use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use residuals::{extract_h_zero, h_equation_residual, nodal_pde_residual, HZeroReport, NodalResidual};

use crate::error::{invalid, Error, Result};
use crate::mesh::{SurfaceMesh, Topology, Vec3};
use level_set::{zero_set, SegmentGraph};

/// Default snapping tolerance, in units of the mean edge length.
pub const SNAP_TOL: f64 = 1e-6;
/// Radius of the circle used to count rays at a junction, in mean edge lengths.
const RAY_RADIUS: f64 = 3.0;

/// The plane `{x : ⟨V, x − p⟩ = 0}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlaneSpec {
    pub p: [f64; 3],
    pub v: [f64; 3],
}

impl PlaneSpec {
    pub fn new(p: Vec3, v: Vec3) -> Result<Self> {
        let n = v.norm();
        if !(n > 0.0 && n.is_finite()) || !p.iter().all(|x| x.is_finite()) {
            return Err(invalid("plane needs a finite base point and a nonzero normal"));
        }
        let v = v / n;
        Ok(PlaneSpec {
            p: [p.x, p.y, p.z],
            v: [v.x, v.y, v.z],
        })
    }

    /// A plane containing the vertical direction.
    pub fn vertical(p: Vec3, v: Vec3) -> Result<Self> {
        let s = Self::new(p, v)?;
        if !(s.v[2].abs() < 1e-12) {
            return Err(invalid(format!("normal {:?} is not horizontal", s.v)));
        }
        Ok(s)
    }

    pub fn normal(&self) -> Vec3 {
        Vec3::from(self.v)
    }

    pub fn base(&self) -> Vec3 {
        Vec3::from(self.p)
    }

    pub fn is_vertical(&self) -> bool {
        self.v[2].abs() < 1e-12
    }

    /// `⟨V, x − p⟩`.
    pub fn eval(&self, x: &Vec3) -> f64 {
        self.normal().dot(&(x - self.base()))
    }
}

impl FromStr for PlaneSpec {
    type Err = Error;

    /// Accepts `x1=c`, `x2=c` or `x3=c`.
    fn from_str(s: &str) -> Result<Self> {
        let (lhs, rhs) = s
            .split_once('=')
            .ok_or_else(|| invalid(format!("plane {s:?} is not of the form xk=c")))?;
        let c: f64 = rhs.trim().parse().map_err(|_| invalid(format!("bad plane offset in {s:?}")))?;
        let axis = match lhs.trim() {
            "x1" => 0,
            "x2" => 1,
            "x3" => 2,
            other => return Err(invalid(format!("unknown plane axis {other:?}"))),
        };
        let mut v = Vec3::zeros();
        v[axis] = 1.0;
        Self::new(v * c, v)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Arc {
    pub points: Vec<[f64; 3]>,
    pub closed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingularPoint {
    pub point: [f64; 3],
    /// Vanishing order: half the number of rays.
    pub multiplicity: usize,
    pub rays: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodalSet {
    pub arcs: Vec<Arc>,
    pub singular_points: Vec<SingularPoint>,
    /// Arc indices of each connected component.
    pub components: Vec<Vec<usize>>,
    /// Component contains a cycle.
    pub loop_flags: Vec<bool>,
    /// Section graph with each singular cluster contracted to one node.
    pub graph_nodes: Vec<[f64; 3]>,
    pub graph_edges: Vec<(usize, usize)>,
    /// Component index of each graph node.
    pub node_component: Vec<usize>,
}

impl NodalSet {
    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    pub fn point_count(&self) -> usize {
        self.arcs.iter().map(|a| a.points.len()).sum()
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

fn union(parent: &mut [usize], a: usize, b: usize) {
    let (ra, rb) = (find(parent, a), find(parent, b));
    if ra != rb {
        parent[ra.max(rb)] = ra.min(rb);
    }
}

/// Turns a segment graph into arcs, singular points and components.
///
/// Rays are counted as the segments crossing a sphere of radius `3h` about
/// each node. Nodes seeing at least four rays are grouped by proximity and
/// each group becomes one singular point, placed at the member closest to
/// the group centroid and counted there. Counting at a distance is robust to lattice
/// configurations where linear interpolation attaches the first segment of
/// a ray to a neighbouring vertex instead of the junction.
pub(crate) fn assemble(graph: &SegmentGraph, h: f64) -> NodalSet {
    let n = graph.keys.len();
    let deg = graph.degrees();
    let adj = graph.adjacency();
    let rho = RAY_RADIUS * h;

    let rays_at = |x: &Vec3| {
        let inside: Vec<bool> = graph.positions.iter().map(|p| (p - x).norm() < rho).collect();
        graph.segments.iter().filter(|&&(a, b)| inside[a] != inside[b]).count()
    };
    let counts: Vec<usize> = (0..n).map(|k| if deg[k] > 0 { rays_at(&graph.positions[k]) } else { 0 }).collect();
    let hot: Vec<usize> = (0..n).filter(|&k| counts[k] >= 4).collect();
    let mut cluster_of = vec![usize::MAX; n];
    let mut singular_points = Vec::new();
    let mut centers = Vec::new();
    let mut group_of_hot = vec![usize::MAX; hot.len()];
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for i in 0..hot.len() {
        if group_of_hot[i] != usize::MAX {
            continue;
        }
        let g = groups.len();
        group_of_hot[i] = g;
        let mut members = vec![hot[i]];
        let mut queue = vec![i];
        while let Some(a) = queue.pop() {
            for b in 0..hot.len() {
                if group_of_hot[b] == usize::MAX && (graph.positions[hot[a]] - graph.positions[hot[b]]).norm() < rho {
                    group_of_hot[b] = g;
                    members.push(hot[b]);
                    queue.push(b);
                }
            }
        }
        groups.push(members);
    }
    for members in groups {
        let centroid = members.iter().fold(Vec3::zeros(), |s, &k| s + graph.positions[k]) / members.len() as f64;
        let c = *members
            .iter()
            .min_by(|&&a, &&b| {
                (graph.positions[a] - centroid)
                    .norm()
                    .total_cmp(&(graph.positions[b] - centroid).norm())
                    .then(a.cmp(&b))
            })
            .unwrap();
        let best = counts[c];
        let x = graph.positions[c];
        let id = singular_points.len();
        for k in 0..n {
            if cluster_of[k] == usize::MAX && (graph.positions[k] - x).norm() < rho {
                cluster_of[k] = id;
            }
        }
        singular_points.push(SingularPoint {
            point: [x.x, x.y, x.z],
            multiplicity: best / 2,
            rays: best,
        });
        centers.push(c);
    }

    // Arcs: maximal chains between nodes of degree ≠ 2, then closed loops.
    let mut used = vec![false; graph.segments.len()];
    let mut arcs = Vec::new();
    let mut arc_start = Vec::new();
    let walk = |start: usize, first: usize, used: &mut Vec<bool>| -> (Vec<usize>, bool) {
        let mut chain = vec![start];
        let mut cur = start;
        let mut seg = first;
        loop {
            used[seg] = true;
            let (a, b) = graph.segments[seg];
            let next = if a == cur { b } else { a };
            chain.push(next);
            if next == start {
                return (chain, true);
            }
            if deg[next] != 2 {
                return (chain, false);
            }
            match adj[next].iter().find(|&&(_, s)| !used[s]) {
                Some(&(_, s)) => {
                    cur = next;
                    seg = s;
                }
                None => return (chain, false),
            }
        }
    };
    for k in 0..n {
        if deg[k] == 2 {
            continue;
        }
        for &(_, s) in &adj[k] {
            if !used[s] {
                let (chain, closed) = walk(k, s, &mut used);
                arc_start.push(chain[0]);
                arcs.push(Arc {
                    points: chain.iter().map(|&i| graph.positions[i].into()).collect(),
                    closed,
                });
            }
        }
    }
    for s in 0..graph.segments.len() {
        if !used[s] {
            let start = graph.segments[s].0;
            let (chain, closed) = walk(start, s, &mut used);
            arc_start.push(start);
            arcs.push(Arc {
                points: chain.iter().map(|&i| graph.positions[i].into()).collect(),
                closed,
            });
        }
    }

    // Contracted graph: every node inside a singular cluster maps to it.
    let mut rep = vec![usize::MAX; n];
    let mut graph_nodes = Vec::new();
    for &c in &centers {
        rep[c] = graph_nodes.len();
        graph_nodes.push(graph.positions[c].into());
    }
    for k in 0..n {
        if rep[k] != usize::MAX {
            continue;
        }
        rep[k] = if cluster_of[k] != usize::MAX {
            rep[centers[cluster_of[k]]]
        } else {
            graph_nodes.push(graph.positions[k].into());
            graph_nodes.len() - 1
        };
    }
    let graph_edges: Vec<(usize, usize)> = graph
        .segments
        .iter()
        .map(|&(a, b)| (rep[a], rep[b]))
        .filter(|(a, b)| a != b)
        .collect();
    let m = graph_nodes.len();
    let mut parent: Vec<usize> = (0..m).collect();
    for &(a, b) in &graph_edges {
        union(&mut parent, a, b);
    }
    let mut comp_id = vec![usize::MAX; m];
    let mut comp_count = 0;
    let mut node_component = vec![0; m];
    for v in 0..m {
        let r = find(&mut parent, v);
        if comp_id[r] == usize::MAX {
            comp_id[r] = comp_count;
            comp_count += 1;
        }
        node_component[v] = comp_id[r];
    }
    let mut comp_nodes = vec![0usize; comp_count];
    let mut comp_edges = vec![0usize; comp_count];
    for v in 0..m {
        comp_nodes[node_component[v]] += 1;
    }
    for &(a, _) in &graph_edges {
        comp_edges[node_component[a]] += 1;
    }
    // Components that contain at least one arc, renumbered densely.
    let mut components: Vec<Vec<usize>> = Vec::new();
    let mut dense = vec![usize::MAX; comp_count];
    let mut loop_flags = Vec::new();
    for (ai, &s) in arc_start.iter().enumerate() {
        let c = node_component[rep[s]];
        if dense[c] == usize::MAX {
            dense[c] = components.len();
            components.push(Vec::new());
            loop_flags.push(comp_edges[c] + 1 > comp_nodes[c]);
        }
        components[dense[c]].push(ai);
    }
    let node_component = node_component
        .iter()
        .map(|&c| if dense[c] == usize::MAX { usize::MAX } else { dense[c] })
        .collect();
    NodalSet {
        arcs,
        singular_points,
        components,
        loop_flags,
        graph_nodes,
        graph_edges,
        node_component,
    }
}

/// `Σ ∩ P` as arcs of edge-interpolated points. Vertices with
/// `|⟨V, x − p⟩| < tol·h` are snapped onto the plane (`h` = mean edge length).
pub fn plane_section(mesh: &SurfaceMesh, plane: &PlaneSpec, tol: f64) -> Result<NodalSet> {
    mesh.validate()?;
    let topo = mesh.topology();
    let h = mesh.mean_edge_length();
    let values: Vec<f64> = mesh.vertices.iter().map(|x| plane.eval(x)).collect();
    let graph = zero_set(mesh, &topo, &values, tol * h, None);
    if graph.segments.is_empty() {
        return Err(Error::SectionEmpty);
    }
    Ok(assemble(&graph, h))
}

pub(crate) fn topology_and_h(mesh: &SurfaceMesh) -> (Topology, f64) {
    (mesh.topology(), mesh.mean_edge_length())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContractibilityReport {
    pub acyclic: bool,
    /// One vertex chain per cyclic component.
    pub cycles: Vec<Vec<[f64; 3]>>,
    pub host_simply_connected: bool,
    /// False when a simply connected host produced a cycle.
    pub consistent: bool,
}

/// Looks for cycles in every component of the (contracted) section graph.
pub fn contractibility_check(nodal: &NodalSet, mesh: &SurfaceMesh) -> ContractibilityReport {
    let m = nodal.graph_nodes.len();
    let mut adj = vec![Vec::new(); m];
    for (e, &(a, b)) in nodal.graph_edges.iter().enumerate() {
        adj[a].push((b, e));
        adj[b].push((a, e));
    }
    let mut state = vec![0u8; m];
    let mut parent = vec![(usize::MAX, usize::MAX); m];
    let mut cycles = Vec::new();
    for root in 0..m {
        if state[root] != 0 {
            continue;
        }
        let mut found = None;
        let mut stack = vec![root];
        state[root] = 1;
        while let Some(v) = stack.pop() {
            for &(w, e) in &adj[v] {
                if e == parent[v].1 {
                    continue;
                }
                if state[w] == 0 {
                    state[w] = 1;
                    parent[w] = (v, e);
                    stack.push(w);
                } else if found.is_none() {
                    found = Some((v, w));
                }
            }
        }
        if let Some((v, w)) = found {
            // Both endpoints hang off the DFS forest; join their paths.
            let path_to_root = |mut x: usize| {
                let mut p = vec![x];
                while parent[x].0 != usize::MAX {
                    x = parent[x].0;
                    p.push(x);
                }
                p
            };
            let pv = path_to_root(v);
            let pw = path_to_root(w);
            let common = pv.iter().find(|x| pw.contains(x)).copied().unwrap_or(root);
            let mut chain: Vec<usize> = pv.iter().copied().take_while(|&x| x != common).collect();
            chain.push(common);
            let tail: Vec<usize> = pw.iter().copied().take_while(|&x| x != common).collect();
            chain.extend(tail.into_iter().rev());
            cycles.push(chain.iter().map(|&i| nodal.graph_nodes[i]).collect());
        }
    }
    let acyclic = cycles.is_empty();
    let host = mesh.meta.simply_connected;
    ContractibilityReport {
        acyclic,
        cycles,
        host_simply_connected: host,
        consistent: acyclic || !host,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{make_grim_reaper, make_saddle_test, make_torus, SaddleKind, StripSpec};

    fn tangent_plane() -> PlaneSpec {
        PlaneSpec::new(Vec3::zeros(), Vec3::z()).unwrap()
    }

    #[test]
    fn saddle_multiplicities() {
        for (kind, m) in [(SaddleKind::Quadratic, 2), (SaddleKind::Monkey, 3)] {
            let mesh = make_saddle_test(kind, 1.0, 0.05).unwrap();
            let set = plane_section(&mesh, &tangent_plane(), SNAP_TOL).unwrap();
            assert_eq!(set.singular_points.len(), 1, "{kind:?}");
            let sp = &set.singular_points[0];
            assert_eq!(sp.multiplicity, m);
            assert_eq!(sp.rays, 2 * m);
            assert!(Vec3::from(sp.point).norm() < 1e-12);
            assert_eq!(set.components.len(), 1);
            assert!(contractibility_check(&set, &mesh).acyclic);
        }
    }

    #[test]
    fn grim_reaper_profile_is_one_arc() {
        let spec = StripSpec::grim_reaper(2.0, 0.1, 4.0).unwrap();
        let mesh = make_grim_reaper(&spec, 0.0).unwrap();
        for offset in [0.0, 0.037] {
            let plane = PlaneSpec::vertical(Vec3::new(0.0, offset, 0.0), Vec3::y()).unwrap();
            let set = plane_section(&mesh, &plane, SNAP_TOL).unwrap();
            assert_eq!(set.arcs.len(), 1);
            assert!(set.singular_points.is_empty());
            assert!(!set.arcs[0].closed);
            for p in &set.arcs[0].points {
                assert!(plane.eval(&Vec3::from(*p)).abs() < SNAP_TOL * mesh.mean_edge_length());
            }
            let report = contractibility_check(&set, &mesh);
            assert!(report.acyclic && report.consistent);
        }
    }

    #[test]
    fn torus_section_has_loops() {
        let mesh = make_torus(2.0, 0.7, 0.1).unwrap();
        let plane = PlaneSpec::vertical(Vec3::zeros(), Vec3::new(0.3, 1.0, 0.0)).unwrap();
        let set = plane_section(&mesh, &plane, SNAP_TOL).unwrap();
        assert_eq!(set.components.len(), 2);
        assert!(set.loop_flags.iter().all(|&f| f));
        let report = contractibility_check(&set, &mesh);
        assert!(!report.acyclic);
        assert_eq!(report.cycles.len(), 2);
        assert!(report.cycles.iter().all(|c| c.len() > 10));
    }

    #[test]
    fn plane_parsing_and_errors() {
        let p: PlaneSpec = "x2=0.5".parse().unwrap();
        assert_eq!(p.v, [0.0, 1.0, 0.0]);
        assert_eq!(p.eval(&Vec3::new(3.0, 0.5, 7.0)), 0.0);
        assert!("y=1".parse::<PlaneSpec>().is_err());
        assert!(PlaneSpec::vertical(Vec3::zeros(), Vec3::new(0.0, 1.0, 0.1)).is_err());
        let spec = StripSpec::grim_reaper(2.0, 0.1, 4.0).unwrap();
        let mesh = make_grim_reaper(&spec, 0.0).unwrap();
        let far = PlaneSpec::vertical(Vec3::new(0.0, 50.0, 0.0), Vec3::y()).unwrap();
        assert!(matches!(plane_section(&mesh, &far, SNAP_TOL), Err(Error::SectionEmpty)));
    }
}
