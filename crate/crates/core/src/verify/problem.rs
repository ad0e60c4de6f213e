//! Problem descriptions and the nested-mesh solve shared by the checks.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::eigen::{solve_lowest, Spectrum};
use crate::error::{Error, Result};
use crate::fem::{assemble_both, OperatorPair, DEFAULT_QUADRATURE};
use crate::fields::CoefficientSet;
use crate::geometry::{make_disk_mesh, make_interval, make_polygon_mesh, Domain, Mesh, Point};

/// Geometric description of a domain, from which meshes at any resolution
/// can be produced.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DomainSpec {
    Interval { a: f64, b: f64 },
    Rect { x0: f64, x1: f64, y0: f64, y1: f64 },
    Disk { center: Point, radius: f64 },
    Polygon { vertices: Vec<Point> },
}

impl DomainSpec {
    pub fn unit_square() -> DomainSpec {
        DomainSpec::Rect { x0: 0.0, x1: 1.0, y0: 0.0, y1: 1.0 }
    }

    pub fn dim(&self) -> usize {
        match self {
            DomainSpec::Interval { .. } => 1,
            _ => 2,
        }
    }

    /// Mesh with (roughly) the given size.
    pub fn mesh(&self, h: f64) -> Result<Mesh> {
        match self {
            DomainSpec::Interval { a, b } => {
                let n = ((b - a) / h).round().max(2.0) as usize;
                make_interval(*a, *b, n)
            }
            DomainSpec::Rect { x0, x1, y0, y1 } => {
                make_polygon_mesh(&[[*x0, *y0], [*x1, *y0], [*x1, *y1], [*x0, *y1]], h)
            }
            DomainSpec::Disk { center, radius } => make_disk_mesh(*center, *radius, h),
            DomainSpec::Polygon { vertices } => make_polygon_mesh(vertices, h),
        }
    }

    /// The exact domain (for a disk, the circle with the sides of a mesh at
    /// size `h`).
    pub fn domain(&self, h: f64) -> Result<Domain> {
        Ok(self.mesh(h)?.domain().clone())
    }

    /// `levels` meshes with sizes `h, h/2, ...`: nested uniform refinements,
    /// except for disks, which are remeshed so the boundary keeps
    /// approaching the circle.
    pub fn meshes(&self, h: f64, levels: usize) -> Result<Vec<Arc<Mesh>>> {
        if levels == 0 {
            return Err(Error::InvalidInput("at least one mesh level is required".into()));
        }
        let mut out: Vec<Arc<Mesh>> = vec![Arc::new(self.mesh(h)?)];
        for l in 1..levels {
            let next = match self {
                DomainSpec::Disk { .. } => self.mesh(h / f64::powi(2.0, l as i32))?,
                _ => out[l - 1].refine(),
            };
            out.push(Arc::new(next));
        }
        Ok(out)
    }
}

/// Domain, coefficients and discretization of one experiment.
#[derive(Clone, Debug)]
pub struct Problem {
    pub domain: DomainSpec,
    pub coeffs: CoefficientSet,
    /// Coarsest mesh size.
    pub h: f64,
    pub quadrature: usize,
}

impl Problem {
    pub fn new(domain: DomainSpec, coeffs: CoefficientSet, h: f64) -> Problem {
        Problem { domain, coeffs, h, quadrature: DEFAULT_QUADRATURE }
    }
}

/// Dirichlet and Neumann spectra on a sequence of meshes, coarsest first.
#[derive(Clone, Debug)]
pub struct Ladder {
    pub meshes: Vec<Arc<Mesh>>,
    pub dirichlet_pairs: Vec<OperatorPair>,
    pub neumann_pairs: Vec<OperatorPair>,
    pub dirichlet: Vec<Spectrum>,
    pub neumann: Vec<Spectrum>,
}

impl Ladder {
    pub fn levels(&self) -> usize {
        self.meshes.len()
    }

    /// The three finest Dirichlet spectra.
    pub fn dirichlet_triple(&self) -> Result<[&Spectrum; 3]> {
        triple(&self.dirichlet)
    }

    pub fn neumann_triple(&self) -> Result<[&Spectrum; 3]> {
        triple(&self.neumann)
    }

    pub fn finest_dirichlet(&self) -> &Spectrum {
        self.dirichlet.last().expect("ladder has at least one level")
    }

    pub fn finest_neumann(&self) -> &Spectrum {
        self.neumann.last().expect("ladder has at least one level")
    }

    pub fn finest_neumann_pair(&self) -> &OperatorPair {
        self.neumann_pairs.last().expect("ladder has at least one level")
    }

    /// Largest `mu_k - lambda_k` (relative to `max(|lambda_k|, 1)`) over
    /// all levels and shared indices; non-positive when the discrete
    /// inequality `mu_k <= lambda_k` holds everywhere.
    pub fn trivial_inequality_excess(&self, up_to: usize) -> f64 {
        let mut worst = f64::NEG_INFINITY;
        for (d, n) in self.dirichlet.iter().zip(&self.neumann) {
            for k in 0..up_to.min(d.len()).min(n.len()) {
                worst = worst.max((n.value(k) - d.value(k)) / d.value(k).abs().max(1.0));
            }
        }
        worst
    }
}

fn triple(s: &[Spectrum]) -> Result<[&Spectrum; 3]> {
    match s {
        [.., a, b, c] => Ok([a, b, c]),
        _ => Err(Error::InvalidInput(format!("extrapolation needs three mesh levels, have {}", s.len()))),
    }
}

/// Solves `count` Dirichlet and Neumann eigenpairs (capped by the number
/// of unknowns) on each of `levels` meshes, levels in parallel.
pub fn solve_ladder(problem: &Problem, levels: usize, count: usize) -> Result<Ladder> {
    let meshes = problem.domain.meshes(problem.h, levels)?;
    let solved: Vec<(OperatorPair, OperatorPair, Spectrum, Spectrum)> = meshes
        .par_iter()
        .map(|m| -> Result<_> {
            let (dir, neu) = assemble_both(m, &problem.coeffs, problem.quadrature)?;
            let ds = solve_lowest(&dir, count.min(dir.dim()))?;
            let ns = solve_lowest(&neu, count.min(neu.dim()))?;
            Ok((dir, neu, ds, ns))
        })
        .collect::<Result<_>>()?;
    let mut ladder = Ladder {
        meshes,
        dirichlet_pairs: Vec::new(),
        neumann_pairs: Vec::new(),
        dirichlet: Vec::new(),
        neumann: Vec::new(),
    };
    for (dp, np, ds, ns) in solved {
        ladder.dirichlet_pairs.push(dp);
        ladder.neumann_pairs.push(np);
        ladder.dirichlet.push(ds);
        ladder.neumann.push(ns);
    }
    Ok(ladder)
}
