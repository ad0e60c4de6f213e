//! Simplicial meshes of intervals, polygons and disks.
//!
//! A [`Mesh`] is immutable once built. Refinement produces a new mesh that
//! keeps a reference to its parent together with the edge each new node
//! bisects, which is all that is needed to prolongate nodal vectors.

mod io;
mod locate;
mod mesher;

use std::collections::HashMap;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use io::{read_mesh, write_mesh};
pub use mesher::{make_disk_mesh, make_interval, make_polygon_mesh, make_rectangle};

/// A point in the plane. One-dimensional meshes keep `y = 0`.
pub type Point = [f64; 2];

/// Minimum interior angle every generated triangle must satisfy.
pub const MIN_ANGLE_DEG: f64 = 20.0;

/// Two boundary edge directions closer than this (radians) meet at a
/// smooth point rather than a corner.
pub const CORNER_ANGLE_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Domain {
    Interval { a: f64, b: f64 },
    /// Counterclockwise simple polygon.
    Polygon { vertices: Vec<Point> },
    /// Exact circle, discretized by the inscribed regular polygon with
    /// `sides` vertices (the first one at angle zero).
    Disk { center: Point, radius: f64, sides: usize },
}

impl Domain {
    pub fn dim(&self) -> usize {
        match self {
            Domain::Interval { .. } => 1,
            _ => 2,
        }
    }

    /// Vertices of the polygon the mesh actually covers (2D only).
    pub fn outline(&self) -> Vec<Point> {
        match self {
            Domain::Interval { a, b } => vec![[*a, 0.0], [*b, 0.0]],
            Domain::Polygon { vertices } => vertices.clone(),
            Domain::Disk { center, radius, sides } => (0..*sides)
                .map(|i| {
                    let t = 2.0 * std::f64::consts::PI * i as f64 / *sides as f64;
                    [center[0] + radius * t.cos(), center[1] + radius * t.sin()]
                })
                .collect(),
        }
    }

    /// Measure of the discretized domain (interval length or polygon area).
    pub fn measure(&self) -> f64 {
        match self {
            Domain::Interval { a, b } => b - a,
            _ => polygon_area(&self.outline()),
        }
    }

    pub fn bounding_box(&self) -> (Point, Point) {
        let pts = self.outline();
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for p in &pts {
            for c in 0..2 {
                lo[c] = lo[c].min(p[c]);
                hi[c] = hi[c].max(p[c]);
            }
        }
        (lo, hi)
    }

    pub fn diameter(&self) -> f64 {
        let (lo, hi) = self.bounding_box();
        ((hi[0] - lo[0]).powi(2) + (hi[1] - lo[1]).powi(2)).sqrt()
    }

    /// Point-in-domain test for the discretized domain (boundary counts as inside).
    pub fn contains(&self, p: Point) -> bool {
        match self {
            Domain::Interval { a, b } => p[0] >= *a && p[0] <= *b,
            _ => point_in_polygon(&self.outline(), p),
        }
    }

    /// Distance from the origin to the convex hull of the domain.
    pub fn hull_distance_to_origin(&self) -> f64 {
        match self {
            Domain::Interval { a, b } => {
                if *a <= 0.0 && *b >= 0.0 {
                    0.0
                } else {
                    a.abs().min(b.abs())
                }
            }
            Domain::Disk { center, radius, .. } => (norm(*center) - radius).max(0.0),
            Domain::Polygon { vertices } => {
                let hull = convex_hull(vertices);
                if point_in_polygon(&hull, [0.0, 0.0]) {
                    return 0.0;
                }
                (0..hull.len())
                    .map(|i| segment_distance([0.0, 0.0], hull[i], hull[(i + 1) % hull.len()]))
                    .fold(f64::INFINITY, f64::min)
            }
        }
    }

    /// Largest distance from the origin to a point of the domain.
    pub fn circumradius_about_origin(&self) -> f64 {
        match self {
            Domain::Disk { center, radius, .. } => norm(*center) + radius,
            _ => self.outline().iter().map(|p| norm(*p)).fold(0.0, f64::max),
        }
    }

    pub fn is_convex(&self) -> bool {
        match self {
            Domain::Interval { .. } | Domain::Disk { .. } => true,
            Domain::Polygon { vertices } => {
                let n = vertices.len();
                (0..n).all(|i| {
                    let a = vertices[i];
                    let b = vertices[(i + 1) % n];
                    let c = vertices[(i + 2) % n];
                    cross(sub(b, a), sub(c, b)) >= -1e-12 * self.diameter().powi(2)
                })
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Cells {
    Segments(Vec<[usize; 2]>),
    Triangles(Vec<[usize; 3]>),
}

/// A boundary facet with its outward unit normal. In 1D both entries of
/// `nodes` are the same endpoint.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryFacet {
    pub nodes: [usize; 2],
    pub normal: Point,
}

/// Curvature data at a smooth boundary point: principal curvature `kappa`,
/// the outward normal used, and `B = K + tr(K) nu nu^T` with `K = kappa tau tau^T`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundaryCurvature {
    pub facet: usize,
    pub kappa: f64,
    pub normal: Point,
    pub b: [[f64; 2]; 2],
}

impl BoundaryCurvature {
    pub fn quadratic_form(&self, v: Point) -> f64 {
        let b = &self.b;
        v[0] * (b[0][0] * v[0] + b[0][1] * v[1]) + v[1] * (b[1][0] * v[0] + b[1][1] * v[1])
    }
}

#[derive(Clone, Debug)]
pub struct Mesh {
    dim: usize,
    nodes: Vec<Point>,
    cells: Cells,
    boundary_nodes: Vec<usize>,
    is_boundary: Vec<bool>,
    facets: Vec<BoundaryFacet>,
    h: f64,
    domain: Domain,
    level: usize,
    parent: Option<Arc<Mesh>>,
    /// For each node added by refinement, the parent edge it bisects.
    midpoint_parents: Vec<[usize; 2]>,
    grid: OnceLock<locate::CellGrid>,
}

impl Mesh {
    /// Builds a mesh from raw data. Triangles are reoriented counterclockwise,
    /// boundary facets and normals are derived from the cell connectivity.
    pub fn from_parts(domain: Domain, nodes: Vec<Point>, cells: Cells) -> Result<Mesh> {
        let dim = domain.dim();
        let (cells, facets) = match cells {
            Cells::Segments(segs) => {
                if dim != 1 {
                    return Err(Error::Geometry("segments given for a 2D domain".into()));
                }
                let facets = segment_facets(&nodes, &segs)?;
                (Cells::Segments(segs), facets)
            }
            Cells::Triangles(mut tris) => {
                if dim != 2 {
                    return Err(Error::Geometry("triangles given for a 1D domain".into()));
                }
                for t in tris.iter_mut() {
                    let area = signed_area(nodes[t[0]], nodes[t[1]], nodes[t[2]]);
                    if area == 0.0 {
                        return Err(Error::Geometry(format!("degenerate triangle {t:?}")));
                    }
                    if area < 0.0 {
                        t.swap(1, 2);
                    }
                }
                let facets = triangle_facets(&nodes, &tris)?;
                (Cells::Triangles(tris), facets)
            }
        };
        let mut is_boundary = vec![false; nodes.len()];
        for f in &facets {
            is_boundary[f.nodes[0]] = true;
            is_boundary[f.nodes[1]] = true;
        }
        let boundary_nodes = (0..nodes.len()).filter(|&i| is_boundary[i]).collect();
        let mut mesh = Mesh {
            dim,
            nodes,
            cells,
            boundary_nodes,
            is_boundary,
            facets,
            h: 0.0,
            domain,
            level: 0,
            parent: None,
            midpoint_parents: Vec::new(),
            grid: OnceLock::new(),
        };
        mesh.h = (0..mesh.n_cells()).map(|e| mesh.cell_diameter(e)).fold(0.0, f64::max);
        Ok(mesh)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nodes(&self) -> &[Point] {
        &self.nodes
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn cells(&self) -> &Cells {
        &self.cells
    }

    pub fn n_cells(&self) -> usize {
        match &self.cells {
            Cells::Segments(s) => s.len(),
            Cells::Triangles(t) => t.len(),
        }
    }

    pub fn cell(&self, e: usize) -> &[usize] {
        match &self.cells {
            Cells::Segments(s) => &s[e],
            Cells::Triangles(t) => &t[e],
        }
    }

    pub fn boundary_nodes(&self) -> &[usize] {
        &self.boundary_nodes
    }

    pub fn is_boundary_node(&self, i: usize) -> bool {
        self.is_boundary[i]
    }

    pub fn interior_nodes(&self) -> Vec<usize> {
        (0..self.n_nodes()).filter(|&i| !self.is_boundary[i]).collect()
    }

    pub fn facets(&self) -> &[BoundaryFacet] {
        &self.facets
    }

    /// Maximum element diameter.
    pub fn mesh_size(&self) -> f64 {
        self.h
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    /// Number of uniform refinements separating this mesh from its root.
    pub fn level(&self) -> usize {
        self.level
    }

    pub fn parent(&self) -> Option<&Arc<Mesh>> {
        self.parent.as_ref()
    }

    pub fn describe(&self) -> String {
        let kind = match &self.domain {
            Domain::Interval { .. } => "interval",
            Domain::Polygon { .. } => "polygon",
            Domain::Disk { .. } => "disk",
        };
        format!("{kind}[nodes={},cells={},h={:.4e},level={}]", self.n_nodes(), self.n_cells(), self.h, self.level)
    }

    pub fn cell_measure(&self, e: usize) -> f64 {
        let c = self.cell(e);
        match self.dim {
            1 => (self.nodes[c[1]][0] - self.nodes[c[0]][0]).abs(),
            _ => signed_area(self.nodes[c[0]], self.nodes[c[1]], self.nodes[c[2]]),
        }
    }

    pub fn total_measure(&self) -> f64 {
        (0..self.n_cells()).map(|e| self.cell_measure(e)).sum()
    }

    pub fn cell_centroid(&self, e: usize) -> Point {
        let c = self.cell(e);
        let k = c.len() as f64;
        let mut p = [0.0; 2];
        for &i in c {
            p[0] += self.nodes[i][0] / k;
            p[1] += self.nodes[i][1] / k;
        }
        p
    }

    pub fn cell_diameter(&self, e: usize) -> f64 {
        let c = self.cell(e);
        let mut d: f64 = 0.0;
        for i in 0..c.len() {
            for j in i + 1..c.len() {
                d = d.max(dist(self.nodes[c[i]], self.nodes[c[j]]));
            }
        }
        d
    }

    /// Smallest interior angle over all triangles, in degrees (180 in 1D).
    pub fn min_angle_deg(&self) -> f64 {
        match &self.cells {
            Cells::Segments(_) => 180.0,
            Cells::Triangles(tris) => tris
                .iter()
                .map(|t| triangle_min_angle([self.nodes[t[0]], self.nodes[t[1]], self.nodes[t[2]]]))
                .fold(180.0, f64::min),
        }
    }

    /// Gradients of the barycentric (P1 hat) functions on cell `e`; constant per cell.
    pub fn shape_gradients(&self, e: usize) -> Vec<Point> {
        let c = self.cell(e);
        match self.dim {
            1 => {
                let len = self.nodes[c[1]][0] - self.nodes[c[0]][0];
                vec![[-1.0 / len, 0.0], [1.0 / len, 0.0]]
            }
            _ => {
                let [p0, p1, p2] = [self.nodes[c[0]], self.nodes[c[1]], self.nodes[c[2]]];
                let two_area = 2.0 * signed_area(p0, p1, p2);
                vec![
                    [(p1[1] - p2[1]) / two_area, (p2[0] - p1[0]) / two_area],
                    [(p2[1] - p0[1]) / two_area, (p0[0] - p2[0]) / two_area],
                    [(p0[1] - p1[1]) / two_area, (p1[0] - p0[0]) / two_area],
                ]
            }
        }
    }

    /// Unique undirected edges `(min, max)` in first-seen order.
    pub fn edges(&self) -> Vec<[usize; 2]> {
        let mut seen = HashMap::new();
        let mut out = Vec::new();
        for e in 0..self.n_cells() {
            let c = self.cell(e);
            for i in 0..c.len() {
                let j = (i + 1) % c.len();
                if c.len() == 2 && i == 1 {
                    break;
                }
                let key = [c[i].min(c[j]), c[i].max(c[j])];
                if seen.insert(key, ()).is_none() {
                    out.push(key);
                }
            }
        }
        out
    }

    /// Euler characteristic `V - E + F` (F counts cells in 2D).
    pub fn euler_characteristic(&self) -> i64 {
        match self.dim {
            1 => self.n_nodes() as i64 - self.n_cells() as i64,
            _ => self.n_nodes() as i64 - self.edges().len() as i64 + self.n_cells() as i64,
        }
    }

    /// Uniform refinement: segments are bisected, triangles split in four by
    /// their edge midpoints. The parent node numbering is kept as a prefix.
    pub fn refine(self: &Arc<Self>) -> Mesh {
        let mut nodes = self.nodes.clone();
        let mut midpoint_parents = Vec::new();
        let mut mids: HashMap<[usize; 2], usize> = HashMap::new();
        let mut midpoint = |a: usize, b: usize, nodes: &mut Vec<Point>| -> usize {
            let key = [a.min(b), a.max(b)];
            *mids.entry(key).or_insert_with(|| {
                let (pa, pb) = (nodes[a], nodes[b]);
                nodes.push([0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])]);
                midpoint_parents.push(key);
                nodes.len() - 1
            })
        };
        let cells = match &self.cells {
            Cells::Segments(segs) => {
                let mut out = Vec::with_capacity(2 * segs.len());
                for s in segs {
                    let m = midpoint(s[0], s[1], &mut nodes);
                    out.push([s[0], m]);
                    out.push([m, s[1]]);
                }
                Cells::Segments(out)
            }
            Cells::Triangles(tris) => {
                let mut out = Vec::with_capacity(4 * tris.len());
                for t in tris {
                    let ab = midpoint(t[0], t[1], &mut nodes);
                    let bc = midpoint(t[1], t[2], &mut nodes);
                    let ca = midpoint(t[2], t[0], &mut nodes);
                    out.push([t[0], ab, ca]);
                    out.push([ab, t[1], bc]);
                    out.push([ca, bc, t[2]]);
                    out.push([ab, bc, ca]);
                }
                Cells::Triangles(out)
            }
        };
        let mut child = Mesh::from_parts(self.domain.clone(), nodes, cells)
            .expect("refinement of a valid mesh is valid");
        child.level = self.level + 1;
        child.parent = Some(Arc::clone(self));
        child.midpoint_parents = midpoint_parents;
        child
    }

    /// Interpolates a nodal vector of the parent mesh onto this mesh (exact
    /// for P1 functions, since the spaces are nested).
    pub fn prolongate(&self, parent_values: &[f64]) -> Result<Vec<f64>> {
        let parent = self
            .parent
            .as_ref()
            .ok_or_else(|| Error::InvalidInput("mesh has no parent".into()))?;
        if parent_values.len() != parent.n_nodes() {
            return Err(Error::InvalidInput(format!(
                "expected {} parent values, got {}",
                parent.n_nodes(),
                parent_values.len()
            )));
        }
        let mut out = parent_values.to_vec();
        out.reserve(self.midpoint_parents.len());
        for &[a, b] in &self.midpoint_parents {
            out.push(0.5 * (out[a] + out[b]));
        }
        Ok(out)
    }

    /// Polygon vertices (node indices) where the boundary direction turns.
    pub fn corner_points(&self) -> Vec<Point> {
        match &self.domain {
            Domain::Polygon { vertices } => {
                let n = vertices.len();
                (0..n)
                    .filter(|&i| {
                        let prev = sub(vertices[i], vertices[(i + n - 1) % n]);
                        let next = sub(vertices[(i + 1) % n], vertices[i]);
                        let turn = cross(prev, next).atan2(dot(prev, next)).abs();
                        turn > CORNER_ANGLE_TOL
                    })
                    .map(|i| vertices[i])
                    .collect()
            }
            _ => Vec::new(),
        }
    }

    /// Curvature at a boundary point. Disk meshes answer with the exact
    /// circle; polygon edges are flat; polygon corners are rejected.
    pub fn curvature_at(&self, p: Point) -> Result<BoundaryCurvature> {
        let tol = 1e-9 * self.domain.diameter().max(1e-300);
        let facet = self
            .facets
            .iter()
            .enumerate()
            .map(|(i, f)| (i, segment_distance(p, self.nodes[f.nodes[0]], self.nodes[f.nodes[1]])))
            .filter(|&(_, d)| d <= tol)
            .map(|(i, _)| i)
            .next()
            .ok_or_else(|| Error::Geometry(format!("point {p:?} is not on the boundary")))?;
        match &self.domain {
            Domain::Interval { .. } => Ok(BoundaryCurvature {
                facet,
                kappa: 0.0,
                normal: self.facets[facet].normal,
                b: [[0.0; 2]; 2],
            }),
            Domain::Polygon { .. } => {
                if self.corner_points().iter().any(|&c| dist(c, p) <= tol) {
                    return Err(Error::Corner(p));
                }
                Ok(BoundaryCurvature {
                    facet,
                    kappa: 0.0,
                    normal: self.facets[facet].normal,
                    b: [[0.0; 2]; 2],
                })
            }
            Domain::Disk { center, radius, .. } => {
                let r = sub(p, *center);
                let nu = scale(r, 1.0 / norm(r));
                let tau = [-nu[1], nu[0]];
                let kappa = 1.0 / radius;
                let mut b = [[0.0; 2]; 2];
                for i in 0..2 {
                    for j in 0..2 {
                        // K = kappa tau tau^T, tr K = kappa
                        b[i][j] = kappa * tau[i] * tau[j] + kappa * nu[i] * nu[j];
                    }
                }
                Ok(BoundaryCurvature { facet, kappa, normal: nu, b })
            }
        }
    }

    /// Index of a cell containing `p`, if any.
    pub fn locate(&self, p: Point) -> Option<usize> {
        let eps = 1e-12;
        let grid = self.grid.get_or_init(|| locate::CellGrid::build(self));
        grid.candidates(p).iter().copied().find(|&e| {
            let lam = self.barycentric(e, p);
            lam.iter().all(|&l| l >= -eps)
        })
    }

    /// Cell containing `p`, or failing that the cell whose barycentric
    /// coordinates at `p` are least negative (for points just outside).
    pub fn locate_nearest(&self, p: Point) -> usize {
        if let Some(e) = self.locate(p) {
            return e;
        }
        (0..self.n_cells())
            .map(|e| (e, self.barycentric(e, p).into_iter().fold(f64::INFINITY, f64::min)))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(e, _)| e)
            .unwrap_or(0)
    }

    /// Barycentric coordinates of `p` with respect to cell `e`.
    pub fn barycentric(&self, e: usize, p: Point) -> Vec<f64> {
        let c = self.cell(e);
        match self.dim {
            1 => {
                let (x0, x1) = (self.nodes[c[0]][0], self.nodes[c[1]][0]);
                let t = (p[0] - x0) / (x1 - x0);
                vec![1.0 - t, t]
            }
            _ => {
                let [a, b, cc] = [self.nodes[c[0]], self.nodes[c[1]], self.nodes[c[2]]];
                let area = signed_area(a, b, cc);
                vec![
                    signed_area(p, b, cc) / area,
                    signed_area(a, p, cc) / area,
                    signed_area(a, b, p) / area,
                ]
            }
        }
    }

    /// Evaluates the P1 interpolant of nodal `values` at `p`.
    pub fn interpolate(&self, values: &[f64], p: Point) -> Option<f64> {
        let e = self.locate(p)?;
        let lam = self.barycentric(e, p);
        Some(self.cell(e).iter().zip(&lam).map(|(&i, l)| values[i] * l).sum())
    }

    /// Checks the structural invariants: positive measures, angle bound,
    /// edge incidence, unit normals, measure conservation.
    pub fn check_invariants(&self) -> Result<()> {
        for e in 0..self.n_cells() {
            if self.cell_measure(e) <= 0.0 {
                return Err(Error::Geometry(format!("cell {e} has non-positive measure")));
            }
        }
        if self.dim == 2 && self.min_angle_deg() < MIN_ANGLE_DEG - 1e-9 {
            return Err(Error::Geometry(format!("minimum angle {:.3} deg below bound", self.min_angle_deg())));
        }
        for f in &self.facets {
            if (norm(f.normal) - 1.0).abs() > 1e-12 {
                return Err(Error::Geometry("non-unit facet normal".into()));
            }
        }
        if self.dim == 2 {
            let mut count: HashMap<[usize; 2], usize> = HashMap::new();
            for e in 0..self.n_cells() {
                let c = self.cell(e);
                for i in 0..3 {
                    let (a, b) = (c[i], c[(i + 1) % 3]);
                    *count.entry([a.min(b), a.max(b)]).or_default() += 1;
                }
            }
            let boundary: usize = count.values().filter(|&&v| v == 1).count();
            if count.values().any(|&v| v > 2) || boundary != self.facets.len() {
                return Err(Error::Geometry("edge incidence is not manifold".into()));
            }
        }
        let rel = (self.total_measure() - self.domain.measure()).abs() / self.domain.measure();
        if rel > 1e-12 {
            return Err(Error::Geometry(format!("measure mismatch {rel:e}")));
        }
        Ok(())
    }
}

fn segment_facets(nodes: &[Point], segs: &[[usize; 2]]) -> Result<Vec<BoundaryFacet>> {
    let mut degree = vec![0usize; nodes.len()];
    for s in segs {
        if nodes[s[1]][0] <= nodes[s[0]][0] {
            return Err(Error::Geometry(format!("segment {s:?} is not left-to-right")));
        }
        degree[s[0]] += 1;
        degree[s[1]] += 1;
    }
    let ends: Vec<usize> = (0..nodes.len()).filter(|&i| degree[i] == 1).collect();
    if ends.len() != 2 {
        return Err(Error::Geometry("interval mesh must have exactly two endpoints".into()));
    }
    let (lo, hi) = if nodes[ends[0]][0] < nodes[ends[1]][0] { (ends[0], ends[1]) } else { (ends[1], ends[0]) };
    Ok(vec![
        BoundaryFacet { nodes: [lo, lo], normal: [-1.0, 0.0] },
        BoundaryFacet { nodes: [hi, hi], normal: [1.0, 0.0] },
    ])
}

fn triangle_facets(nodes: &[Point], tris: &[[usize; 3]]) -> Result<Vec<BoundaryFacet>> {
    // directed edges of CCW triangles; a boundary edge has no reverse twin
    let mut directed: HashMap<[usize; 2], usize> = HashMap::new();
    let mut order = Vec::new();
    for t in tris {
        for i in 0..3 {
            let key = [t[i], t[(i + 1) % 3]];
            if directed.insert(key, 1).is_some() {
                return Err(Error::Geometry(format!("edge {key:?} used twice with the same orientation")));
            }
            order.push(key);
        }
    }
    let mut facets = Vec::new();
    for [a, b] in order {
        if !directed.contains_key(&[b, a]) {
            let d = sub(nodes[b], nodes[a]);
            let len = norm(d);
            facets.push(BoundaryFacet { nodes: [a, b], normal: [d[1] / len, -d[0] / len] });
        }
    }
    Ok(facets)
}

pub(crate) fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

pub(crate) fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

pub(crate) fn cross(a: Point, b: Point) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

pub(crate) fn scale(a: Point, s: f64) -> Point {
    [a[0] * s, a[1] * s]
}

pub(crate) fn norm(a: Point) -> f64 {
    a[0].hypot(a[1])
}

pub(crate) fn dist(a: Point, b: Point) -> f64 {
    norm(sub(a, b))
}

pub(crate) fn signed_area(a: Point, b: Point, c: Point) -> f64 {
    0.5 * cross(sub(b, a), sub(c, a))
}

pub(crate) fn polygon_area(pts: &[Point]) -> f64 {
    let n = pts.len();
    0.5 * (0..n).map(|i| cross(pts[i], pts[(i + 1) % n])).sum::<f64>()
}

pub(crate) fn segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let ab = sub(b, a);
    let len2 = dot(ab, ab);
    let t = if len2 == 0.0 { 0.0 } else { (dot(sub(p, a), ab) / len2).clamp(0.0, 1.0) };
    dist(p, [a[0] + t * ab[0], a[1] + t * ab[1]])
}

/// Crossing-number test; points on an edge count as inside.
pub(crate) fn point_in_polygon(poly: &[Point], p: Point) -> bool {
    let n = poly.len();
    let scale = poly.iter().map(|q| norm(*q)).fold(1.0, f64::max);
    if (0..n).any(|i| segment_distance(p, poly[i], poly[(i + 1) % n]) <= 1e-13 * scale) {
        return true;
    }
    let mut inside = false;
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        if (a[1] > p[1]) != (b[1] > p[1]) {
            let x = a[0] + (p[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
            if p[0] < x {
                inside = !inside;
            }
        }
    }
    inside
}

pub(crate) fn distance_to_polygon_boundary(poly: &[Point], p: Point) -> f64 {
    let n = poly.len();
    (0..n).map(|i| segment_distance(p, poly[i], poly[(i + 1) % n])).fold(f64::INFINITY, f64::min)
}

fn convex_hull(pts: &[Point]) -> Vec<Point> {
    let mut p: Vec<Point> = pts.to_vec();
    p.sort_by(|a, b| a.partial_cmp(b).unwrap());
    p.dedup();
    if p.len() < 3 {
        return p;
    }
    let mut lower: Vec<Point> = Vec::new();
    for &q in &p {
        while lower.len() >= 2 && cross(sub(lower[lower.len() - 1], lower[lower.len() - 2]), sub(q, lower[lower.len() - 1])) <= 0.0 {
            lower.pop();
        }
        lower.push(q);
    }
    let mut upper: Vec<Point> = Vec::new();
    for &q in p.iter().rev() {
        while upper.len() >= 2 && cross(sub(upper[upper.len() - 1], upper[upper.len() - 2]), sub(q, upper[upper.len() - 1])) <= 0.0 {
            upper.pop();
        }
        upper.push(q);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

pub(crate) fn triangle_min_angle(p: [Point; 3]) -> f64 {
    let mut best: f64 = 180.0;
    for i in 0..3 {
        let a = sub(p[(i + 1) % 3], p[i]);
        let b = sub(p[(i + 2) % 3], p[i]);
        let ang = cross(a, b).abs().atan2(dot(a, b)).to_degrees();
        best = best.min(ang);
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square() -> Vec<Point> {
        vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]
    }

    #[test]
    fn refine_interval_doubles_segments() {
        let m = Arc::new(make_interval(0.0, 1.0, 4).unwrap());
        let r = m.refine();
        assert_eq!(r.n_cells(), 8);
        assert_eq!(r.n_nodes(), 9);
        assert!((r.mesh_size() - 0.125).abs() < 1e-15);
        assert_eq!(r.boundary_nodes().len(), 2);
    }

    #[test]
    fn refine_quadruples_triangles_and_nests() {
        let m = Arc::new(make_polygon_mesh(&unit_square(), 0.5).unwrap());
        let r = m.refine();
        assert_eq!(r.n_cells(), 4 * m.n_cells());
        assert_eq!(&r.nodes()[..m.n_nodes()], m.nodes());
        assert!((r.mesh_size() - 0.5 * m.mesh_size()).abs() < 1e-14);
        assert!((r.total_measure() - 1.0).abs() < 1e-12);
        r.check_invariants().unwrap();
        let rr = Arc::new(r).refine();
        assert!((rr.mesh_size() - 0.25 * m.mesh_size()).abs() < 1e-14);
    }

    #[test]
    fn prolongation_is_exact_for_linear_functions() {
        let m = Arc::new(make_polygon_mesh(&unit_square(), 0.4).unwrap());
        let r = m.refine();
        let f = |p: Point| 2.0 * p[0] - 3.0 * p[1] + 0.5;
        let coarse: Vec<f64> = m.nodes().iter().map(|&p| f(p)).collect();
        let fine = r.prolongate(&coarse).unwrap();
        for (p, v) in r.nodes().iter().zip(&fine) {
            assert!((f(*p) - v).abs() < 1e-13);
        }
    }

    #[test]
    fn edge_incidence_and_outward_normals() {
        let m = make_polygon_mesh(&unit_square(), 0.3).unwrap();
        m.check_invariants().unwrap();
        let c = [0.5, 0.5];
        for f in m.facets() {
            let (a, b) = (m.nodes()[f.nodes[0]], m.nodes()[f.nodes[1]]);
            let mid = [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
            assert!(dot(f.normal, sub(mid, c)) > 0.0);
        }
        let perimeter: f64 = m.facets().iter().map(|f| dist(m.nodes()[f.nodes[0]], m.nodes()[f.nodes[1]])).sum();
        assert!((perimeter - 4.0).abs() < 1e-12);
        assert_eq!(m.euler_characteristic(), 1);
    }

    #[test]
    fn curvature_on_unit_disk() {
        let m = make_disk_mesh([0.0, 0.0], 1.0, 0.2).unwrap();
        for f in m.facets().iter().take(7) {
            let p = m.nodes()[f.nodes[0]];
            let k = m.curvature_at(p).unwrap();
            assert!((k.kappa - 1.0).abs() < 1e-15);
            assert!((k.quadratic_form([1.0, 0.0]) - 1.0).abs() < 1e-12);
            assert!((k.quadratic_form([0.6, 0.8]) - 1.0).abs() < 1e-12);
            assert!((k.b[0][1] - k.b[1][0]).abs() < 1e-15);
        }
    }

    #[test]
    fn curvature_on_circle_of_radius_two() {
        let m = make_disk_mesh([1.0, -1.0], 2.0, 0.3).unwrap();
        let f = &m.facets()[3];
        let p = m.nodes()[f.nodes[0]];
        let k = m.curvature_at(p).unwrap();
        let b = [3.0, 4.0];
        assert!((k.quadratic_form(b) - 25.0 / 2.0).abs() < 1e-12);
    }

    #[test]
    fn square_edges_are_flat_and_corners_rejected() {
        let m = make_polygon_mesh(&unit_square(), 0.25).unwrap();
        let k = m.curvature_at([0.5, 0.0]).unwrap();
        assert_eq!(k.b, [[0.0; 2]; 2]);
        assert_eq!(k.kappa, 0.0);
        assert!(matches!(m.curvature_at([1.0, 1.0]), Err(Error::Corner(_))));
        assert!(m.curvature_at([0.5, 0.5]).is_err());
    }

    #[test]
    fn hull_distance_and_convexity() {
        let d = Domain::Polygon { vertices: vec![[1.0, 1.0], [2.0, 1.0], [2.0, 2.0], [1.0, 2.0]] };
        assert!((d.hull_distance_to_origin() - 2f64.sqrt()).abs() < 1e-15);
        assert!((d.circumradius_about_origin() - 8f64.sqrt()).abs() < 1e-15);
        assert!(d.is_convex());
        let l = Domain::Polygon {
            vertices: vec![[0.0, 0.0], [2.0, 0.0], [2.0, 1.0], [1.0, 1.0], [1.0, 2.0], [0.0, 2.0]],
        };
        assert!(!l.is_convex());
    }
}
