use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::mesh::{MeshMeta, Orientation, SurfaceMesh, Vec3};
use crate::models::DOWNWARD_GRAPH;

/// Axis-aligned rectangle `[x_min, x_max] × [y_min, y_max]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Rect {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Self {
        Rect {
            x_min,
            x_max,
            y_min,
            y_max,
        }
    }

    /// `[−a, a] × [−b, b]`.
    pub fn centered(a: f64, b: f64) -> Self {
        Rect::new(-a, a, -b, b)
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }
}

/// Heights of a graph on a uniform grid. Node `(i, j)` sits at
/// `(x_min + i·hx, y_min + j·hy)` and is stored at `j·nx + i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphPatch {
    pub domain: Rect,
    pub nx: usize,
    pub ny: usize,
    pub hx: f64,
    pub hy: f64,
    pub u: Vec<f64>,
    /// Nodes carrying prescribed (Dirichlet) values.
    pub fixed: Vec<bool>,
}

impl GraphPatch {
    /// Grid over `domain` with spacing close to `h`; the outer ring is fixed.
    pub fn new(domain: Rect, h: f64) -> Self {
        let nx = (domain.width() / h).round().max(2.0) as usize + 1;
        let ny = (domain.height() / h).round().max(2.0) as usize + 1;
        Self::with_nodes(domain, nx, ny)
    }

    pub fn with_nodes(domain: Rect, nx: usize, ny: usize) -> Self {
        let mut fixed = vec![false; nx * ny];
        for j in 0..ny {
            for i in 0..nx {
                fixed[j * nx + i] = i == 0 || j == 0 || i == nx - 1 || j == ny - 1;
            }
        }
        GraphPatch {
            domain,
            nx,
            ny,
            hx: domain.width() / (nx - 1) as f64,
            hy: domain.height() / (ny - 1) as f64,
            u: vec![0.0; nx * ny],
            fixed,
        }
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        if i + 1 == self.nx {
            self.domain.x_max
        } else {
            self.domain.x_min + i as f64 * self.hx
        }
    }

    #[inline]
    pub fn y(&self, j: usize) -> f64 {
        if j + 1 == self.ny {
            self.domain.y_max
        } else {
            self.domain.y_min + j as f64 * self.hy
        }
    }

    pub fn node_count(&self) -> usize {
        self.nx * self.ny
    }

    /// Sets every fixed node from `g(x, y)`.
    pub fn set_boundary(&mut self, g: impl Fn(f64, f64) -> f64) {
        for j in 0..self.ny {
            for i in 0..self.nx {
                let k = self.idx(i, j);
                if self.fixed[k] {
                    self.u[k] = g(self.x(i), self.y(j));
                }
            }
        }
    }

    /// Sets every node from `g(x, y)`.
    pub fn fill(&mut self, g: impl Fn(f64, f64) -> f64) {
        for j in 0..self.ny {
            for i in 0..self.nx {
                let k = self.idx(i, j);
                self.u[k] = g(self.x(i), self.y(j));
            }
        }
    }

    /// Free nodes `(i, j)` at least `margin` grid lines from every side.
    pub fn inner_nodes(&self, margin: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        let (nx, ny) = (self.nx, self.ny);
        (margin.min(ny)..ny.saturating_sub(margin))
            .flat_map(move |j| (margin.min(nx)..nx.saturating_sub(margin)).map(move |i| (i, j)))
            .filter(move |&(i, j)| !self.fixed[j * nx + i])
    }

    /// Triangulated graph with the downward translator normal.
    pub fn to_mesh(&self) -> SurfaceMesh {
        let mut mesh = SurfaceMesh::from_grid(self.nx, self.ny, |i, j| {
            Vec3::new(self.x(i), self.y(j), self.u[self.idx(i, j)])
        });
        mesh.orientation = Orientation::Reversed;
        mesh.meta = MeshMeta {
            generator: "graph-patch".into(),
            translator: true,
            simply_connected: true,
            orientation_convention: DOWNWARD_GRAPH.into(),
            ..MeshMeta::default()
        };
        mesh
    }

    /// `i,j,x,y,u,fixed` rows.
    pub fn to_csv(&self) -> String {
        let mut s = String::with_capacity(self.node_count() * 48);
        s.push_str("i,j,x,y,u,fixed\n");
        for j in 0..self.ny {
            for i in 0..self.nx {
                let k = self.idx(i, j);
                let _ = writeln!(s, "{i},{j},{},{},{},{}", self.x(i), self.y(j), self.u[k], u8::from(self.fixed[k]));
            }
        }
        s
    }
}
