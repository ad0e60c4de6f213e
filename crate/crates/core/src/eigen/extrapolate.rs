//! Richardson extrapolation of eigenvalues over nested meshes.

use std::sync::Arc;

use serde::Serialize;

use super::Spectrum;
use crate::error::{Error, Result};

/// An eigenvalue extrapolated from three nested meshes.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExtrapolatedValue {
    pub value: f64,
    /// Bound on `|value - limit|` from the extrapolation model.
    pub error_estimate: f64,
    /// `log2((v_h - v_{h/2}) / (v_{h/2} - v_{h/4}))`; absent when undefined.
    pub observed_order: Option<f64>,
    /// Raw values, coarsest first.
    pub raw: Vec<f64>,
    /// Set when the triple is not monotonically convergent.
    pub flagged: bool,
}

impl ExtrapolatedValue {
    /// A value known without discretization (error zero).
    pub fn exact(value: f64) -> ExtrapolatedValue {
        ExtrapolatedValue { value, error_estimate: 0.0, observed_order: None, raw: vec![value], flagged: false }
    }

    /// A single-mesh value with an externally supplied error bar.
    pub fn with_error(value: f64, error: f64) -> ExtrapolatedValue {
        ExtrapolatedValue { value, error_estimate: error, observed_order: None, raw: vec![value], flagged: false }
    }

    pub fn finest(&self) -> f64 {
        *self.raw.last().unwrap_or(&self.value)
    }
}

/// Order-2 Richardson extrapolation of values on `h, h/2, h/4`.
///
/// The error bar is the size of the correction `|value - v_{h/4}|` plus its
/// disagreement with the correction at the observed order. Non-monotone triples are
/// flagged and return the finest value with the largest increment as error.
pub fn extrapolate(values: [f64; 3]) -> ExtrapolatedValue {
    let [v1, v2, v4] = values;
    let d1 = v1 - v2;
    let d2 = v2 - v4;
    let raw = values.to_vec();
    if d1 == 0.0 && d2 == 0.0 {
        return ExtrapolatedValue { value: v4, error_estimate: 0.0, observed_order: None, raw, flagged: false };
    }
    if d1 * d2 <= 0.0 || d2.abs() >= d1.abs() {
        let order = if d1 * d2 > 0.0 { Some((d1 / d2).log2()) } else { None };
        return ExtrapolatedValue {
            value: v4,
            error_estimate: d1.abs().max(d2.abs()),
            observed_order: order,
            raw,
            flagged: true,
        };
    }
    let p = (d1 / d2).log2();
    let at = |q: f64| v4 - d2 / (2f64.powf(q) - 1.0);
    let value = at(2.0);
    let error = (value - v4).abs() + (value - at(p)).abs();
    ExtrapolatedValue { value, error_estimate: error, observed_order: Some(p), raw, flagged: false }
}

/// Cosine between two vectors.
fn correlation(a: &[f64], b: &[f64]) -> f64 {
    let ab: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let aa: f64 = a.iter().map(|x| x * x).sum();
    let bb: f64 = b.iter().map(|x| x * x).sum();
    if aa == 0.0 || bb == 0.0 {
        0.0
    } else {
        ab.abs() / (aa * bb).sqrt()
    }
}

/// Index on `coarse` of the eigenvalue matching index `k` on `fine`, found
/// by correlating prolongated coarse eigenvectors (within a window of
/// indices, whole clusters counted as one) with eigenvector `k`. Falls back
/// to `k` when the meshes are not nested.
fn match_index(coarse: &Spectrum, fine: &Spectrum, k: usize) -> usize {
    let (Some(cm), Some(fm)) = (coarse.mesh(), fine.mesh()) else { return k };
    let nested = fm.parent().is_some_and(|p| Arc::ptr_eq(p, cm));
    if !nested || k >= coarse.len() {
        return k.min(coarse.len().saturating_sub(1));
    }
    let target = fine.nodal(k);
    let lo = k.saturating_sub(3);
    let hi = (k + 4).min(coarse.len());
    let mut best = (k, -1.0);
    for i in lo..hi {
        let Ok(p) = fm.prolongate(&coarse.nodal(i)) else { return k };
        // project onto the whole cluster so that rotations within a
        // degenerate eigenspace do not matter
        let mut c2 = 0.0;
        for j in lo..hi {
            if coarse.cluster_ids[j] == coarse.cluster_ids[i] {
                let Ok(q) = fm.prolongate(&coarse.nodal(j)) else { return k };
                c2 += correlation(&q, &target).powi(2);
            }
        }
        let c = c2.sqrt().max(correlation(&p, &target));
        if c > best.1 + 1e-9 {
            best = (i, c);
        }
    }
    // prefer the index itself inside a matched cluster
    if coarse.cluster_ids.get(k) == coarse.cluster_ids.get(best.0) {
        k
    } else {
        best.0
    }
}

/// Raw values of eigenvalue `k` (0-based on the finest spectrum) traced
/// back through three nested spectra, coarsest first, and extrapolated.
pub fn track_eigenvalue(spectra: [&Spectrum; 3], k: usize) -> Result<ExtrapolatedValue> {
    let [s1, s2, s4] = spectra;
    if k >= s4.len() {
        return Err(Error::InvalidInput(format!("eigenvalue index {k} beyond the {} computed", s4.len())));
    }
    let i2 = match_index(s2, s4, k);
    let i1 = match_index(s1, s2, i2);
    if i1 >= s1.len() || i2 >= s2.len() {
        return Err(Error::InvalidInput(format!("eigenvalue index {k} not computed on coarse meshes")));
    }
    Ok(extrapolate([s1.value(i1), s2.value(i2), s4.value(k)]))
}
