//! Deterministic low-discrepancy sample points.

use crate::geometry::{Domain, Mesh, Point};

/// Default number of Halton points drawn inside a domain.
pub const DEFAULT_SAMPLES: usize = 500;

/// Radical inverse of `i` in base `b`.
pub fn radical_inverse(mut i: u64, b: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    let inv = 1.0 / b as f64;
    while i > 0 {
        f *= inv;
        r += f * (i % b) as f64;
        i /= b;
    }
    r
}

/// `count` Halton (2,3) points of the bounding box that lie strictly inside
/// `domain` and satisfy `accept`. Points closer than `margin` to the box edge
/// are skipped so that finite-difference stencils stay inside.
pub fn halton_points(domain: &Domain, count: usize, accept: impl Fn(Point) -> bool) -> Vec<Point> {
    let (lo, hi) = domain.bounding_box();
    let mut out = Vec::with_capacity(count);
    let mut i = 1u64;
    let cap = 1000 * count as u64 + 10_000;
    while out.len() < count && i < cap {
        let p = if domain.dim() == 1 {
            [lo[0] + (hi[0] - lo[0]) * radical_inverse(i, 2), 0.0]
        } else {
            [
                lo[0] + (hi[0] - lo[0]) * radical_inverse(i, 2),
                lo[1] + (hi[1] - lo[1]) * radical_inverse(i, 3),
            ]
        };
        i += 1;
        if domain.contains(p) && accept(p) {
            out.push(p);
        }
    }
    out
}

/// Halton points plus every cell centroid of `mesh`.
pub fn sample_points(mesh: &Mesh, count: usize, accept: impl Fn(Point) -> bool) -> Vec<Point> {
    let mut pts = halton_points(mesh.domain(), count, &accept);
    pts.extend((0..mesh.n_cells()).map(|e| mesh.cell_centroid(e)).filter(|p| accept(*p)));
    pts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::make_rectangle;

    #[test]
    fn radical_inverse_values() {
        assert_eq!(radical_inverse(1, 2), 0.5);
        assert_eq!(radical_inverse(3, 2), 0.75);
        assert!((radical_inverse(5, 3) - (2.0 / 3.0 + 1.0 / 9.0)).abs() < 1e-15);
    }

    #[test]
    fn samples_are_inside_and_deterministic() {
        let m = make_rectangle(0.0, 2.0, 0.0, 1.0, 0.5).unwrap();
        let a = sample_points(&m, 100, |_| true);
        let b = sample_points(&m, 100, |_| true);
        assert_eq!(a, b);
        assert_eq!(a.len(), 100 + m.n_cells());
        assert!(a.iter().all(|p| (0.0..=2.0).contains(&p[0]) && (0.0..=1.0).contains(&p[1])));
    }
}
