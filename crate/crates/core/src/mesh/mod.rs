//! Conforming P1 triangulations of convex planar domains.
//!
//! A [`Mesh`] stores vertices, CCW triangles and a boundary mask, plus the
//! generating [`DomainSpec`] when known (imported meshes may lack it, in
//! which case the triangulated polygon itself is the domain).  Stored
//! metadata:
//!
//! * `h_max` / `h_min` — longest and shortest edge of the triangulation;
//! * `area_deficit` — exact domain area minus the triangulated area (the
//!   inscribed-polygon error for curved boundaries);
//!
//! Invariants enforced at construction:
//!
//! * triangle vertex indices are in range and areas are strictly positive
//!   (CCW orientation);
//! * conformity: every edge is shared by one or two triangles, never more;
//! * edges on the topological boundary have both endpoints flagged as
//!   boundary vertices, and every flagged vertex lies on a boundary edge;
//! * when the domain is known, boundary vertices lie on ∂Ω to within
//!   `1e-12 · diam(Ω)`.

use std::collections::HashMap;
use std::sync::OnceLock;

use crate::geometry::{barycentric, signed_area2, Point};

mod build;
mod domain;
mod io;
mod refine;

pub use build::build_mesh;
pub use domain::{DomainKind, DomainSpec};
pub use io::{mesh_from_reader, mesh_to_string, read_mesh, write_mesh};
pub use refine::{refine, GradingSpec, RefineOptions};

/// Errors from mesh construction, refinement and I/O.
#[derive(Debug, thiserror::Error)]
pub enum MeshError {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("polygon is not strictly convex at vertex {index} ({x}, {y})")]
    NonconvexPolygon { index: usize, x: f64, y: f64 },
    #[error("target h {target_h} too coarse for domain of diameter {diameter} (need target_h < diameter/4)")]
    TargetTooCoarse { target_h: f64, diameter: f64 },
    #[error("target h must be positive and finite, got {0}")]
    InvalidTargetH(f64),
    #[error("triangle {index} is degenerate or negatively oriented (doubled signed area {area2})")]
    DegenerateTriangle { index: usize, area2: f64 },
    #[error("triangle {index} references vertex {vertex} out of range ({nvertices} vertices)")]
    IndexOutOfRange {
        index: usize,
        vertex: usize,
        nvertices: usize,
    },
    #[error("edge ({a}, {b}) is shared by {count} triangles; conforming meshes allow at most 2")]
    NonconformingEdge { a: usize, b: usize, count: usize },
    #[error("boundary flags inconsistent at vertex {vertex}: {reason}")]
    BoundaryFlag { vertex: usize, reason: String },
    #[error("boundary vertex {vertex} at ({x}, {y}) is {distance} away from the domain boundary (tolerance {tolerance})")]
    BoundaryOffCurve {
        vertex: usize,
        x: f64,
        y: f64,
        distance: f64,
        tolerance: f64,
    },
    #[error("invalid grading: {0}")]
    InvalidGrading(String),
    #[error("refinement would exceed the vertex cap of {cap} vertices; coarsen inner_h or raise RefineOptions::max_vertices")]
    VertexCapExceeded { cap: usize },
    #[error("mesh file {path} could not be accessed: {source}")]
    Io {
        path: std::path::PathBuf,
        source: std::io::Error,
    },
    #[error("mesh parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("mesh parse error in {path} at line {line}: {message}")]
    ParseIn {
        path: std::path::PathBuf,
        line: usize,
        message: String,
    },
}

/// A conforming triangulation.  Construct through [`build_mesh`], [`refine`]
/// or [`Mesh::new`] (which validates the invariants above).
#[derive(Debug)]
pub struct Mesh {
    vertices: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    boundary: Vec<bool>,
    domain: Option<DomainSpec>,
    h_max: f64,
    h_min: f64,
    area_sum: f64,
    locator: OnceLock<Locator>,
    boundary_edges: OnceLock<Vec<(usize, usize)>>,
}

impl Clone for Mesh {
    fn clone(&self) -> Self {
        Mesh {
            vertices: self.vertices.clone(),
            triangles: self.triangles.clone(),
            boundary: self.boundary.clone(),
            domain: self.domain.clone(),
            h_max: self.h_max,
            h_min: self.h_min,
            area_sum: self.area_sum,
            locator: OnceLock::new(),
            boundary_edges: OnceLock::new(),
        }
    }
}

impl Mesh {
    /// Validating constructor.  `domain` may be `None` for imported meshes.
    pub fn new(
        vertices: Vec<Point>,
        triangles: Vec<[usize; 3]>,
        boundary: Vec<bool>,
        domain: Option<DomainSpec>,
    ) -> Result<Self, MeshError> {
        let n = vertices.len();
        if boundary.len() != n {
            return Err(MeshError::BoundaryFlag {
                vertex: boundary.len().min(n),
                reason: format!(
                    "boundary mask has {} entries for {} vertices",
                    boundary.len(),
                    n
                ),
            });
        }

        let mut area_sum = 0.0;
        for (index, tri) in triangles.iter().enumerate() {
            for &v in tri {
                if v >= n {
                    return Err(MeshError::IndexOutOfRange {
                        index,
                        vertex: v,
                        nvertices: n,
                    });
                }
            }
            let area2 = signed_area2(vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]);
            if !(area2 > 0.0) {
                return Err(MeshError::DegenerateTriangle { index, area2 });
            }
            area_sum += 0.5 * area2;
        }

        // Conformity: count how many triangles use each undirected edge.
        let mut edge_use: HashMap<(usize, usize), usize> = HashMap::new();
        for tri in &triangles {
            for e in 0..3 {
                let a = tri[e];
                let b = tri[(e + 1) % 3];
                let key = (a.min(b), a.max(b));
                *edge_use.entry(key).or_insert(0) += 1;
            }
        }
        let mut on_boundary_edge = vec![false; n];
        let mut h_max = 0.0f64;
        let mut h_min = f64::INFINITY;
        for (&(a, b), &count) in &edge_use {
            if count > 2 {
                return Err(MeshError::NonconformingEdge { a, b, count });
            }
            let len = vertices[a].dist(vertices[b]);
            h_max = h_max.max(len);
            h_min = h_min.min(len);
            if count == 1 {
                on_boundary_edge[a] = true;
                on_boundary_edge[b] = true;
            }
        }
        for v in 0..n {
            if on_boundary_edge[v] && !boundary[v] {
                return Err(MeshError::BoundaryFlag {
                    vertex: v,
                    reason: "vertex lies on a boundary edge but is not flagged".into(),
                });
            }
            if boundary[v] && !on_boundary_edge[v] {
                return Err(MeshError::BoundaryFlag {
                    vertex: v,
                    reason: "vertex is flagged boundary but touches no boundary edge".into(),
                });
            }
        }

        if let Some(dom) = &domain {
            let tol = 1e-12 * dom.diameter();
            for v in 0..n {
                if boundary[v] {
                    let dist = dom.boundary_distance(vertices[v]);
                    if dist > tol {
                        return Err(MeshError::BoundaryOffCurve {
                            vertex: v,
                            x: vertices[v].x,
                            y: vertices[v].y,
                            distance: dist,
                            tolerance: tol,
                        });
                    }
                }
            }
        }

        Ok(Mesh {
            vertices,
            triangles,
            boundary,
            domain,
            h_max,
            h_min,
            area_sum,
            locator: OnceLock::new(),
            boundary_edges: OnceLock::new(),
        })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    /// Boundary mask: `true` for vertices on ∂Ω (Dirichlet nodes).
    pub fn boundary(&self) -> &[bool] {
        &self.boundary
    }

    pub fn domain(&self) -> Option<&DomainSpec> {
        self.domain.as_ref()
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_triangles(&self) -> usize {
        self.triangles.len()
    }

    /// Longest edge of the triangulation.
    pub fn h_max(&self) -> f64 {
        self.h_max
    }

    /// Shortest edge of the triangulation.
    pub fn h_min(&self) -> f64 {
        self.h_min
    }

    /// Total area of the triangles (the inscribed polygon's area).
    pub fn area_sum(&self) -> f64 {
        self.area_sum
    }

    /// Exact domain area minus triangulated area; `None` without a domain.
    /// Nonnegative (up to roundoff) for convex domains.
    pub fn area_deficit(&self) -> Option<f64> {
        self.domain.as_ref().map(|d| d.area() - self.area_sum)
    }

    /// Vertex coordinates of triangle `t`.
    pub fn triangle_points(&self, t: usize) -> [Point; 3] {
        let [a, b, c] = self.triangles[t];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangle_points(t);
        0.5 * signed_area2(a, b, c)
    }

    pub fn triangle_barycenter(&self, t: usize) -> Point {
        let [a, b, c] = self.triangle_points(t);
        (a + b + c).scale(1.0 / 3.0)
    }

    /// Edges on the topological boundary (each used by exactly one triangle),
    /// sorted for determinism.
    pub fn boundary_edge_list(&self) -> &[(usize, usize)] {
        self.boundary_edges.get_or_init(|| {
            let mut edge_use: HashMap<(usize, usize), usize> = HashMap::new();
            for tri in &self.triangles {
                for e in 0..3 {
                    let a = tri[e];
                    let b = tri[(e + 1) % 3];
                    let key = (a.min(b), a.max(b));
                    *edge_use.entry(key).or_insert(0) += 1;
                }
            }
            let mut edges: Vec<(usize, usize)> = edge_use
                .into_iter()
                .filter_map(|(e, c)| (c == 1).then_some(e))
                .collect();
            edges.sort_unstable();
            edges
        })
    }

    /// Distance from `q` to ∂Ω: uses the exact domain when available, else
    /// the distance to the mesh's own boundary edges.
    pub fn boundary_distance(&self, q: Point) -> f64 {
        if let Some(dom) = &self.domain {
            dom.boundary_distance(q)
        } else {
            let mut best = f64::INFINITY;
            for &(a, b) in self.boundary_edge_list() {
                best = best.min(crate::geometry::segment_distance(
                    q,
                    self.vertices[a],
                    self.vertices[b],
                ));
            }
            best
        }
    }

    /// Largest edge length among triangles intersecting the disk
    /// `B(center, radius)`; `None` when no triangle comes that close.
    /// This is the "local h" used to decide whether a concentration window
    /// is resolved.
    pub fn local_h_near(&self, center: Point, radius: f64) -> Option<f64> {
        let mut best: Option<f64> = None;
        for t in 0..self.triangles.len() {
            let [a, b, c] = self.triangle_points(t);
            let near = point_triangle_distance(center, a, b, c) <= radius;
            if near {
                let h = a.dist(b).max(b.dist(c)).max(c.dist(a));
                best = Some(best.map_or(h, |x: f64| x.max(h)));
            }
        }
        best
    }

    /// The symmetry center used for symmetric constructions (domain center,
    /// or the origin when the domain is unknown).
    pub fn symmetry_center(&self) -> Point {
        self.domain.as_ref().map_or(Point::default(), |d| d.center())
    }

    /// Whether the vertex set is symmetric under both reflections
    /// `x ↦ (2c_x - x, y)` and `x ↦ (x, 2c_y - y)` about the symmetry center,
    /// with coordinates compared after rounding to `1e-12 · diam`.
    pub fn is_vertex_symmetric(&self) -> bool {
        let c = self.symmetry_center();
        let diam = self
            .domain
            .as_ref()
            .map_or_else(|| self.h_max * 64.0, |d| d.diameter());
        let tol = 1e-12 * diam;
        let key = |p: Point| {
            (
                ((p.x - c.x) / tol).round() as i64,
                ((p.y - c.y) / tol).round() as i64,
            )
        };
        let mut set = std::collections::HashSet::with_capacity(self.vertices.len() * 2);
        for &v in &self.vertices {
            set.insert(key(v));
        }
        self.vertices.iter().all(|&v| {
            let d = v - c;
            set.contains(&key(c + Point::new(-d.x, d.y)))
                && set.contains(&key(c + Point::new(d.x, -d.y)))
        })
    }

    /// Locate the triangle containing `q`, returning its index and the
    /// barycentric weights of `q` in it.  Points outside the triangulation
    /// return `None`.
    pub fn locate(&self, q: Point) -> Option<(usize, [f64; 3])> {
        let loc = self.locator.get_or_init(|| Locator::build(self));
        loc.locate(self, q)
    }

    /// P1 interpolation of nodal `values` at `q`.
    pub fn interpolate(&self, values: &[f64], q: Point) -> Option<f64> {
        let (t, w) = self.locate(q)?;
        let [a, b, c] = self.triangles[t];
        Some(w[0] * values[a] + w[1] * values[b] + w[2] * values[c])
    }

    /// Constant gradient of the P1 field `values` on triangle `t`.
    pub fn gradient_on(&self, t: usize, values: &[f64]) -> Point {
        let [ia, ib, ic] = self.triangles[t];
        let [a, b, c] = self.triangle_points(t);
        let area2 = signed_area2(a, b, c);
        // ∇λ_a = (c - b)ᵖᵉʳᵖ / (2|T|), cyclically; perp = rotate +90°.
        let ga = (c - b).perp().scale(1.0 / area2);
        let gb = (a - c).perp().scale(1.0 / area2);
        let gc = (b - a).perp().scale(1.0 / area2);
        ga.scale(values[ia]) + gb.scale(values[ib]) + gc.scale(values[ic])
    }
}

/// Distance from a point to a (closed) triangle; zero inside.
fn point_triangle_distance(q: Point, a: Point, b: Point, c: Point) -> f64 {
    let (wa, wb, wc) = {
        let area2 = signed_area2(a, b, c);
        (
            signed_area2(q, b, c) / area2,
            signed_area2(a, q, c) / area2,
            signed_area2(a, b, q) / area2,
        )
    };
    if wa >= 0.0 && wb >= 0.0 && wc >= 0.0 {
        return 0.0;
    }
    crate::geometry::segment_distance(q, a, b)
        .min(crate::geometry::segment_distance(q, b, c))
        .min(crate::geometry::segment_distance(q, c, a))
}

/// Uniform-grid spatial index over triangle bounding boxes.
#[derive(Debug)]
struct Locator {
    x0: f64,
    y0: f64,
    cell: f64,
    nx: usize,
    ny: usize,
    buckets: Vec<Vec<u32>>,
}

impl Locator {
    fn build(mesh: &Mesh) -> Locator {
        let mut min = Point::new(f64::INFINITY, f64::INFINITY);
        let mut max = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for v in &mesh.vertices {
            min.x = min.x.min(v.x);
            min.y = min.y.min(v.y);
            max.x = max.x.max(v.x);
            max.y = max.y.max(v.y);
        }
        let width = (max.x - min.x).max(1e-300);
        let height = (max.y - min.y).max(1e-300);
        // Aim for a few triangles per cell on quasi-uniform meshes; graded
        // meshes overfill cells near the focus, which only costs scan time.
        let target_cells = (mesh.n_triangles() as f64).max(1.0);
        let cell = ((width * height / target_cells).sqrt()).max(1e-12 * width.max(height));
        let nx = ((width / cell).ceil() as usize + 1).min(2048);
        let ny = ((height / cell).ceil() as usize + 1).min(2048);
        let cell = (width / nx as f64).max(height / ny as f64).max(1e-300);
        let mut buckets = vec![Vec::new(); nx * ny];
        for (t, _) in mesh.triangles.iter().enumerate() {
            let [a, b, c] = mesh.triangle_points(t);
            let bx0 = a.x.min(b.x).min(c.x);
            let bx1 = a.x.max(b.x).max(c.x);
            let by0 = a.y.min(b.y).min(c.y);
            let by1 = a.y.max(b.y).max(c.y);
            let i0 = (((bx0 - min.x) / cell).floor() as isize).clamp(0, nx as isize - 1) as usize;
            let i1 = (((bx1 - min.x) / cell).floor() as isize).clamp(0, nx as isize - 1) as usize;
            let j0 = (((by0 - min.y) / cell).floor() as isize).clamp(0, ny as isize - 1) as usize;
            let j1 = (((by1 - min.y) / cell).floor() as isize).clamp(0, ny as isize - 1) as usize;
            for j in j0..=j1 {
                for i in i0..=i1 {
                    buckets[j * nx + i].push(t as u32);
                }
            }
        }
        Locator {
            x0: min.x,
            y0: min.y,
            cell,
            nx,
            ny,
            buckets,
        }
    }

    fn locate(&self, mesh: &Mesh, q: Point) -> Option<(usize, [f64; 3])> {
        const TOL: f64 = -1e-10;
        let i = (((q.x - self.x0) / self.cell).floor() as isize).clamp(0, self.nx as isize - 1);
        let j = (((q.y - self.y0) / self.cell).floor() as isize).clamp(0, self.ny as isize - 1);
        // Search the containing cell first, then one ring of neighbours.
        for ring in 0..2isize {
            let mut best: Option<(usize, [f64; 3], f64)> = None;
            for dj in -ring..=ring {
                for di in -ring..=ring {
                    if di.abs() != ring && dj.abs() != ring {
                        continue; // interior of the ring was already scanned
                    }
                    let ii = i + di;
                    let jj = j + dj;
                    if ii < 0 || jj < 0 || ii >= self.nx as isize || jj >= self.ny as isize {
                        continue;
                    }
                    for &t in &self.buckets[jj as usize * self.nx + ii as usize] {
                        let t = t as usize;
                        let [a, b, c] = mesh.triangle_points(t);
                        let (wa, wb, wc) = barycentric(q, a, b, c);
                        let worst = wa.min(wb).min(wc);
                        if worst >= TOL {
                            return Some((t, [wa, wb, wc]));
                        }
                        if best.map_or(true, |(_, _, bw)| worst > bw) {
                            best = Some((t, [wa, wb, wc], worst));
                        }
                    }
                }
            }
            // Accept a slightly-outside match (roundoff at shared edges).
            if let Some((t, w, worst)) = best {
                if worst >= -1e-7 {
                    return Some((t, w));
                }
            }
        }
        // Slow fallback: full scan (points far outside return None).
        let mut best: Option<(usize, [f64; 3], f64)> = None;
        for t in 0..mesh.triangles.len() {
            let [a, b, c] = mesh.triangle_points(t);
            let (wa, wb, wc) = barycentric(q, a, b, c);
            let worst = wa.min(wb).min(wc);
            if best.map_or(true, |(_, _, bw)| worst > bw) {
                best = Some((t, [wa, wb, wc], worst));
            }
        }
        match best {
            Some((t, w, worst)) if worst >= -1e-7 => Some((t, w)),
            _ => None,
        }
    }
}
