//! Central finite differences with one-sided fallback where a stencil point
//! would leave the admissible set.

use crate::geometry::Point;
use crate::linalg::Mat2;

fn shift(p: Point, b: Point, t: f64) -> Point {
    [p[0] + t * b[0], p[1] + t * b[1]]
}

/// First derivative of `f` along `b` at `p`.
pub fn directional(f: &dyn Fn(Point) -> f64, p: Point, b: Point, s: f64, ok: &dyn Fn(Point) -> bool) -> f64 {
    let (fwd, bwd) = (ok(shift(p, b, s)), ok(shift(p, b, -s)));
    if fwd && bwd || !fwd && !bwd {
        (f(shift(p, b, s)) - f(shift(p, b, -s))) / (2.0 * s)
    } else {
        let d = if fwd { 1.0 } else { -1.0 };
        d * (-3.0 * f(p) + 4.0 * f(shift(p, b, d * s)) - f(shift(p, b, 2.0 * d * s))) / (2.0 * s)
    }
}

/// Second derivative `b^T D^2 f b` at `p`.
pub fn second_directional(f: &dyn Fn(Point) -> f64, p: Point, b: Point, s: f64, ok: &dyn Fn(Point) -> bool) -> f64 {
    let (fwd, bwd) = (ok(shift(p, b, s)), ok(shift(p, b, -s)));
    if fwd && bwd || !fwd && !bwd {
        (f(shift(p, b, s)) - 2.0 * f(p) + f(shift(p, b, -s))) / (s * s)
    } else {
        let d = if fwd { 1.0 } else { -1.0 };
        (2.0 * f(p) - 5.0 * f(shift(p, b, d * s)) + 4.0 * f(shift(p, b, 2.0 * d * s))
            - f(shift(p, b, 3.0 * d * s)))
            / (s * s)
    }
}

pub fn gradient(f: &dyn Fn(Point) -> f64, p: Point, s: f64, dim: usize, ok: &dyn Fn(Point) -> bool) -> Point {
    let gx = directional(f, p, [1.0, 0.0], s, ok);
    let gy = if dim == 2 { directional(f, p, [0.0, 1.0], s, ok) } else { 0.0 };
    [gx, gy]
}

pub fn hessian(f: &dyn Fn(Point) -> f64, p: Point, s: f64, dim: usize, ok: &dyn Fn(Point) -> bool) -> Mat2 {
    let hxx = second_directional(f, p, [1.0, 0.0], s, ok);
    if dim == 1 {
        return [[hxx, 0.0], [0.0, 0.0]];
    }
    let hyy = second_directional(f, p, [0.0, 1.0], s, ok);
    let dp = second_directional(f, p, [1.0, 1.0], s, ok);
    let dm = second_directional(f, p, [1.0, -1.0], s, ok);
    let hxy = 0.25 * (dp - dm);
    [[hxx, hxy], [hxy, hyy]]
}

/// Five-point Laplacian.
pub fn laplacian(f: &dyn Fn(Point) -> f64, p: Point, s: f64, ok: &dyn Fn(Point) -> bool) -> f64 {
    second_directional(f, p, [1.0, 0.0], s, ok) + second_directional(f, p, [0.0, 1.0], s, ok)
}
