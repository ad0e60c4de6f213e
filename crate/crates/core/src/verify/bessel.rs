//! First zeros of `J_0` and `J_1'` by bisection on truncated power series.

use serde::Serialize;

/// Bracket width at which bisection stops.
pub const BESSEL_TOL: f64 = 1e-10;
const TERMS: usize = 30;

/// `sum_m (-1)^m c_m (x/2)^(2m)` with `c_m` given by `coef(m)` (as a
/// ratio updated termwise to avoid factorial overflow).
fn series(x: f64, first: f64, ratio: impl Fn(usize) -> f64) -> f64 {
    let q = -(x * x) / 4.0;
    let mut term = first;
    let mut sum = term;
    for m in 1..TERMS {
        term *= q * ratio(m);
        sum += term;
    }
    sum
}

pub fn bessel_j0(x: f64) -> f64 {
    // c_m = 1 / (m!)^2
    series(x, 1.0, |m| 1.0 / (m * m) as f64)
}

pub fn bessel_j1(x: f64) -> f64 {
    // (x/2) / (m! (m+1)!)
    0.5 * x * series(x, 1.0, |m| 1.0 / (m * (m + 1)) as f64)
}

/// `J_1'(x) = sum_m (-1)^m (2m+1)/2 (x/2)^(2m) / (m! (m+1)!)`.
pub fn bessel_j1_prime(x: f64) -> f64 {
    let q = -(x * x) / 4.0;
    let mut base = 1.0; // (x/2)^(2m) (-1)^m / (m! (m+1)!)
    let mut sum = 0.5;
    for m in 1..TERMS {
        base *= q / (m * (m + 1)) as f64;
        sum += base * (2 * m + 1) as f64 / 2.0;
    }
    sum
}

/// A root with its bracket and the disagreement with a rerun at a much
/// tighter tolerance.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct BesselZero {
    pub value: f64,
    pub bracket: (f64, f64),
    pub tolerance: f64,
    pub rerun_difference: f64,
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut flo = f(lo);
    assert!(flo * f(hi) < 0.0, "bracket [{lo}, {hi}] does not change sign");
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn zero(f: impl Fn(f64) -> f64 + Copy, bracket: (f64, f64)) -> BesselZero {
    let value = bisect(f, bracket.0, bracket.1, BESSEL_TOL);
    let tight = bisect(f, bracket.0, bracket.1, 1e-15);
    BesselZero { value, bracket, tolerance: BESSEL_TOL, rerun_difference: (value - tight).abs() }
}

/// `j_{0,1}`, bracketed in `[2, 3]`.
pub fn first_zero_j0() -> BesselZero {
    zero(bessel_j0, (2.0, 3.0))
}

/// `j'_{1,1}`, bracketed in `[1.5, 2]`.
pub fn first_zero_j1_prime() -> BesselZero {
    zero(bessel_j1_prime, (1.5, 2.0))
}
