//! Quadrature rules on the reference segment and triangle, in barycentric
//! coordinates with weights summing to one.

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct Rule {
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    pub degree: usize,
}

fn sym3(a: f64) -> [[f64; 3]; 3] {
    let b = 1.0 - 2.0 * a;
    [[a, a, b], [a, b, a], [b, a, a]]
}

/// Triangle rule exact for polynomials of degree `order` (2, 4 or 5; other
/// orders round up).
pub fn triangle(order: usize) -> Result<Rule> {
    let mut points = Vec::new();
    let mut weights = Vec::new();
    let mut push = |a: f64, w: f64| {
        for p in sym3(a) {
            points.push(p.to_vec());
            weights.push(w);
        }
    };
    let degree = match order {
        0..=2 => {
            push(1.0 / 6.0, 1.0 / 3.0);
            2
        }
        3 | 4 => {
            push(0.445948490915965, 0.223381589678011);
            push(0.091576213509771, 0.109951743655322);
            4
        }
        5 => {
            let r = 15f64.sqrt();
            push((6.0 - r) / 21.0, (155.0 - r) / 1200.0);
            push((6.0 + r) / 21.0, (155.0 + r) / 1200.0);
            points.push(vec![1.0 / 3.0; 3]);
            weights.push(0.225);
            5
        }
        _ => return Err(Error::InvalidInput(format!("quadrature order {order} not supported (max 5)"))),
    };
    Ok(Rule { points, weights, degree })
}

/// Gauss rule on a segment: 2 points (degree 3) up to order 3, 3 points
/// (degree 5) up to order 5.
pub fn segment(order: usize) -> Result<Rule> {
    let (nodes, w, degree): (Vec<f64>, Vec<f64>, usize) = match order {
        0..=3 => {
            let t = 0.5 / 3f64.sqrt();
            (vec![0.5 - t, 0.5 + t], vec![0.5, 0.5], 3)
        }
        4 | 5 => {
            let t = 0.5 * (0.6f64).sqrt();
            (vec![0.5 - t, 0.5, 0.5 + t], vec![5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0], 5)
        }
        _ => return Err(Error::InvalidInput(format!("quadrature order {order} not supported (max 5)"))),
    };
    Ok(Rule { points: nodes.iter().map(|&s| vec![1.0 - s, s]).collect(), weights: w, degree })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: u32) -> f64 {
        (1..=n).map(|k| k as f64).product()
    }

    #[test]
    fn triangle_rules_integrate_monomials() {
        for order in [2, 4, 5] {
            let rule = triangle(order).unwrap();
            assert!((rule.weights.iter().sum::<f64>() - 1.0).abs() < 1e-14);
            for a in 0..=rule.degree as u32 {
                for b in 0..=(rule.degree as u32 - a) {
                    // average over the reference triangle: 2 a! b! / (a+b+2)!
                    let exact = 2.0 * factorial(a) * factorial(b) / factorial(a + b + 2);
                    let q: f64 = rule
                        .points
                        .iter()
                        .zip(&rule.weights)
                        .map(|(p, w)| w * p[1].powi(a as i32) * p[2].powi(b as i32))
                        .sum();
                    assert!((q - exact).abs() < 1e-13, "order {order} x^{a} y^{b}: {q} vs {exact}");
                }
            }
        }
        assert!(triangle(6).is_err());
    }

    #[test]
    fn segment_rules_integrate_monomials() {
        for order in [2, 4] {
            let rule = segment(order).unwrap();
            for a in 0..=rule.degree as i32 {
                let q: f64 = rule.points.iter().zip(&rule.weights).map(|(p, w)| w * p[1].powi(a)).sum();
                assert!((q - 1.0 / (a as f64 + 1.0)).abs() < 1e-14);
            }
        }
    }
}
