use spade::{ConstrainedDelaunayTriangulation, Point2, Triangulation};

use super::{
    cross, dist, distance_to_polygon_boundary, point_in_polygon, polygon_area, sub,
    Cells, Domain, Mesh, Point, MIN_ANGLE_DEG,
};
use crate::error::{Error, Result};

/// Uniform mesh of `[a, b]` with `n` segments.
pub fn make_interval(a: f64, b: f64, n: usize) -> Result<Mesh> {
    if !(a < b) {
        return Err(Error::Geometry(format!("interval requires a < b, got [{a}, {b}]")));
    }
    if n < 2 {
        return Err(Error::Geometry(format!("interval needs at least 2 elements, got {n}")));
    }
    let nodes = (0..=n)
        .map(|i| {
            let t = i as f64 / n as f64;
            // exact endpoints
            let x = if i == n { b } else { a + t * (b - a) };
            [x, 0.0]
        })
        .collect();
    let segs = (0..n).map(|i| [i, i + 1]).collect();
    Mesh::from_parts(Domain::Interval { a, b }, nodes, Cells::Segments(segs))
}

/// Axis-aligned rectangle `[x0, x1] x [y0, y1]`.
pub fn make_rectangle(x0: f64, x1: f64, y0: f64, y1: f64, target_h: f64) -> Result<Mesh> {
    make_polygon_mesh(&[[x0, y0], [x1, y0], [x1, y1], [x0, y1]], target_h)
}

/// Triangulates a simple polygon: boundary points spaced evenly along each
/// edge, Steiner points on an equilateral lattice kept clear of the boundary,
/// then a constrained Delaunay triangulation. A handful of lattice spacings
/// and clearances are tried in a fixed order until the angle and size bounds hold.
pub fn make_polygon_mesh(vertices: &[Point], target_h: f64) -> Result<Mesh> {
    let poly = normalize_polygon(vertices)?;
    if !(target_h > 0.0) {
        return Err(Error::Geometry(format!("target_h must be positive, got {target_h}")));
    }
    mesh_polygon(Domain::Polygon { vertices: poly.clone() }, &poly, target_h, false)
}

/// Disk as its inscribed regular polygon; the exact radius is kept on the
/// domain so curvature queries see the true circle.
pub fn make_disk_mesh(center: Point, radius: f64, target_h: f64) -> Result<Mesh> {
    if !(radius > 0.0) {
        return Err(Error::Geometry(format!("disk radius must be positive, got {radius}")));
    }
    if !(target_h > 0.0) {
        return Err(Error::Geometry(format!("target_h must be positive, got {target_h}")));
    }
    let spacing = LATTICE_FACTORS[0] * target_h;
    let sides = ((2.0 * std::f64::consts::PI * radius / spacing).ceil() as usize).max(8);
    let domain = Domain::Disk { center, radius, sides };
    let poly = domain.outline();
    mesh_polygon(domain, &poly, target_h, true)
}

const LATTICE_FACTORS: [f64; 4] = [0.7, 0.6, 0.5, 0.4];
const CLEARANCES: [f64; 4] = [0.5, 0.4, 0.6, 0.35];

fn mesh_polygon(domain: Domain, poly: &[Point], target_h: f64, keep_edges: bool) -> Result<Mesh> {
    let mut best_angle: f64 = 0.0;
    for &factor in &LATTICE_FACTORS {
        for &clearance in &CLEARANCES {
            let spacing = factor * target_h;
            let (mut points, n_boundary) = seed_points(poly, spacing, clearance, keep_edges);
            let Ok(mut mesh) = triangulate(&domain, poly, &points, n_boundary) else {
                continue;
            };
            for _ in 0..SMOOTHING_ROUNDS {
                smooth_interior(&mesh, &mut points, n_boundary);
                match triangulate(&domain, poly, &points, n_boundary) {
                    Ok(m) => mesh = m,
                    Err(_) => break,
                }
            }
            let angle = mesh.min_angle_deg();
            best_angle = best_angle.max(angle);
            if angle >= MIN_ANGLE_DEG && mesh.mesh_size() <= target_h {
                return Ok(mesh);
            }
        }
    }
    Err(Error::Geometry(format!(
        "could not reach the {MIN_ANGLE_DEG} degree angle bound (best {best_angle:.2}) at target_h = {target_h}"
    )))
}

const SMOOTHING_ROUNDS: usize = 3;

/// One Jacobi sweep of Laplacian smoothing on the Steiner points.
fn smooth_interior(mesh: &Mesh, points: &mut [Point], n_boundary: usize) {
    let mut sum = vec![[0.0; 2]; points.len()];
    let mut count = vec![0usize; points.len()];
    for [a, b] in mesh.edges() {
        for (i, j) in [(a, b), (b, a)] {
            sum[i][0] += points[j][0];
            sum[i][1] += points[j][1];
            count[i] += 1;
        }
    }
    for i in n_boundary..points.len() {
        if count[i] > 0 {
            points[i] = [sum[i][0] / count[i] as f64, sum[i][1] / count[i] as f64];
        }
    }
}

/// Boundary points first (in polygon order), then interior lattice points.
fn seed_points(poly: &[Point], spacing: f64, clearance: f64, keep_edges: bool) -> (Vec<Point>, usize) {
    let n = poly.len();
    let mut points = Vec::new();
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        let m = if keep_edges { 1 } else { ((dist(a, b) / spacing) - 1e-9).ceil().max(1.0) as usize };
        for k in 0..m {
            let t = k as f64 / m as f64;
            points.push([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
        }
    }
    let n_boundary = points.len();

    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in poly {
        for c in 0..2 {
            lo[c] = lo[c].min(p[c]);
            hi[c] = hi[c].max(p[c]);
        }
    }
    let center = [0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1])];
    let dy = spacing * 3f64.sqrt() / 2.0;
    let rows = ((hi[1] - lo[1]) / dy / 2.0).ceil() as i64 + 1;
    let cols = ((hi[0] - lo[0]) / spacing / 2.0).ceil() as i64 + 1;
    let min_gap = clearance * spacing;
    for j in -rows..=rows {
        let y = center[1] + j as f64 * dy;
        let shift = if j.rem_euclid(2) == 1 { 0.5 } else { 0.0 };
        for i in -cols..=cols {
            let x = center[0] + (i as f64 + shift) * spacing;
            let p = [x, y];
            if point_in_polygon(poly, p) && distance_to_polygon_boundary(poly, p) >= min_gap {
                points.push(p);
            }
        }
    }
    (points, n_boundary)
}

fn triangulate(domain: &Domain, poly: &[Point], points: &[Point], n_boundary: usize) -> Result<Mesh> {
    let mut cdt: ConstrainedDelaunayTriangulation<Point2<f64>> = ConstrainedDelaunayTriangulation::new();
    let mut handles = Vec::with_capacity(points.len());
    for p in points {
        let h = cdt
            .insert(Point2::new(p[0], p[1]))
            .map_err(|e| Error::Geometry(format!("triangulation insert failed: {e:?}")))?;
        handles.push(h);
    }
    if cdt.num_vertices() != points.len() {
        return Err(Error::Geometry("duplicate seed points".into()));
    }
    let mut index_of = vec![usize::MAX; points.len()];
    for (i, h) in handles.iter().enumerate() {
        index_of[h.index()] = i;
    }
    for i in 0..n_boundary {
        let (a, b) = (handles[i], handles[(i + 1) % n_boundary]);
        if cdt.can_add_constraint(a, b) {
            cdt.add_constraint(a, b);
        } else {
            return Err(Error::Geometry("boundary constraint crosses another".into()));
        }
    }
    // faces reachable from the hull without crossing a constraint are outside
    let mut outside = std::collections::HashSet::new();
    let mut stack = Vec::new();
    for face in cdt.inner_faces() {
        for e in face.adjacent_edges() {
            if e.rev().face().is_outer() && !e.is_constraint_edge() && outside.insert(face.fix().index()) {
                stack.push(face.fix());
            }
        }
    }
    while let Some(f) = stack.pop() {
        for e in cdt.face(f).adjacent_edges() {
            if e.is_constraint_edge() {
                continue;
            }
            if let Some(nb) = e.rev().face().as_inner() {
                if outside.insert(nb.fix().index()) {
                    stack.push(nb.fix());
                }
            }
        }
    }
    let mut tris = Vec::new();
    for face in cdt.inner_faces() {
        if outside.contains(&face.fix().index()) {
            continue;
        }
        let v = face.vertices();
        tris.push([index_of[v[0].fix().index()], index_of[v[1].fix().index()], index_of[v[2].fix().index()]]);
    }
    let mesh = Mesh::from_parts(domain.clone(), points.to_vec(), Cells::Triangles(tris))?;
    if mesh.facets().len() != n_boundary {
        return Err(Error::Geometry("triangulation does not conform to the boundary".into()));
    }
    let rel = (mesh.total_measure() - polygon_area(poly)).abs() / polygon_area(poly);
    if rel > 1e-12 {
        return Err(Error::Geometry(format!("triangulation area mismatch {rel:e}")));
    }
    Ok(mesh)
}

/// Drops repeated vertices, orients counterclockwise, rejects degenerate or
/// self-intersecting outlines.
fn normalize_polygon(vertices: &[Point]) -> Result<Vec<Point>> {
    let mut poly: Vec<Point> = Vec::with_capacity(vertices.len());
    for &v in vertices {
        if !(v[0].is_finite() && v[1].is_finite()) {
            return Err(Error::Geometry("non-finite polygon vertex".into()));
        }
        if poly.last().map_or(true, |&p| p != v) {
            poly.push(v);
        }
    }
    while poly.len() > 1 && poly.first() == poly.last() {
        poly.pop();
    }
    if poly.len() < 3 {
        return Err(Error::Geometry("polygon needs at least three distinct vertices".into()));
    }
    let scale = poly.iter().map(|p| p[0].abs().max(p[1].abs())).fold(1e-300, f64::max);
    let area = polygon_area(&poly);
    if area.abs() <= 1e-12 * scale * scale {
        return Err(Error::Geometry("polygon is degenerate (zero area)".into()));
    }
    if area < 0.0 {
        poly.reverse();
    }
    let n = poly.len();
    for i in 0..n {
        for j in i + 1..n {
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if !adjacent && segments_intersect(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n]) {
                return Err(Error::Geometry(format!("polygon edges {i} and {j} intersect")));
            }
        }
    }
    Ok(poly)
}

fn segments_intersect(a: Point, b: Point, c: Point, d: Point) -> bool {
    let o = |p: Point, q: Point, r: Point| cross(sub(q, p), sub(r, p));
    let (d1, d2, d3, d4) = (o(c, d, a), o(c, d, b), o(a, b, c), o(a, b, d));
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    let on = |p: Point, q: Point, r: Point| {
        o(p, q, r) == 0.0
            && r[0] >= p[0].min(q[0])
            && r[0] <= p[0].max(q[0])
            && r[1] >= p[1].min(q[1])
            && r[1] <= p[1].max(q[1])
    };
    on(c, d, a) || on(c, d, b) || on(a, b, c) || on(a, b, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn interval_nodes() {
        let m = make_interval(0.0, 1.0, 4).unwrap();
        let xs: Vec<f64> = m.nodes().iter().map(|p| p[0]).collect();
        assert_eq!(xs, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(m.n_cells(), 4);
        assert_eq!(m.boundary_nodes(), &[0, 4]);
        let m = make_interval(0.0, PI, 2).unwrap();
        assert_eq!(m.nodes()[1][0], PI / 2.0);
        assert_eq!(m.nodes()[2][0], PI);
    }

    #[test]
    fn interval_rejects_bad_input() {
        assert!(make_interval(1.0, 0.0, 4).is_err());
        assert!(make_interval(0.0, 1.0, 1).is_err());
    }

    #[test]
    fn unit_square_area_and_quality() {
        let m = make_rectangle(0.0, 1.0, 0.0, 1.0, 0.5).unwrap();
        assert!((m.total_measure() - 1.0).abs() < 1e-12);
        assert!(m.mesh_size() <= 0.5);
        assert!(m.min_angle_deg() >= 20.0);
        m.check_invariants().unwrap();
    }

    #[test]
    fn equilateral_triangle_area() {
        let m = make_polygon_mesh(&[[0.0, 0.0], [1.0, 0.0], [0.5, 3f64.sqrt() / 2.0]], 0.2).unwrap();
        assert!((m.total_measure() - 3f64.sqrt() / 4.0).abs() < 1e-12);
        m.check_invariants().unwrap();
    }

    #[test]
    fn collinear_and_self_intersecting_rejected() {
        assert!(make_polygon_mesh(&[[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]], 0.5).is_err());
        let bowtie = [[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]];
        assert!(make_polygon_mesh(&bowtie, 0.2).is_err());
    }

    #[test]
    fn clockwise_input_is_reoriented() {
        let m = make_polygon_mesh(&[[0.0, 0.0], [0.0, 1.0], [1.0, 1.0], [1.0, 0.0]], 0.3).unwrap();
        assert!((m.total_measure() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn nonconvex_l_shape() {
        let l = [[0.0, 0.0], [2.0, 0.0], [2.0, 1.0], [1.0, 1.0], [1.0, 2.0], [0.0, 2.0]];
        let m = make_polygon_mesh(&l, 0.25).unwrap();
        assert!((m.total_measure() - 3.0).abs() < 1e-12);
        m.check_invariants().unwrap();
    }

    #[test]
    fn disk_area_matches_inscribed_polygon() {
        let m = make_disk_mesh([0.0, 0.0], 1.0, 0.1).unwrap();
        let Domain::Disk { sides, .. } = m.domain() else { panic!() };
        let n = *sides as f64;
        let exact = 0.5 * n * (2.0 * PI / n).sin();
        assert!((m.total_measure() - exact).abs() < 1e-12);
        assert!(m.total_measure() >= 3.13 && m.total_measure() <= PI);
        m.check_invariants().unwrap();
        for &i in m.boundary_nodes() {
            let p = m.nodes()[i];
            assert!((p[0].hypot(p[1]) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn disk_scaling() {
        let a = make_disk_mesh([0.0, 0.0], 1.0, 0.2).unwrap();
        let b = make_disk_mesh([0.0, 0.0], 2.0, 0.4).unwrap();
        assert!((b.total_measure() - 4.0 * a.total_measure()).abs() < 1e-12);
        assert!(make_disk_mesh([0.0, 0.0], 0.0, 0.1).is_err());
    }

    #[test]
    fn meshing_is_deterministic() {
        let a = make_disk_mesh([0.3, 0.1], 1.0, 0.15).unwrap();
        let b = make_disk_mesh([0.3, 0.1], 1.0, 0.15).unwrap();
        assert_eq!(a.nodes(), b.nodes());
        assert_eq!(a.cells(), b.cells());
    }
}
