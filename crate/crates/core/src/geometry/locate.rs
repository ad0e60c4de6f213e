//! Uniform bucket grid for point location.

use super::{Mesh, Point};

#[derive(Clone, Debug)]
pub(crate) struct CellGrid {
    origin: Point,
    cell: [f64; 2],
    dims: [usize; 2],
    buckets: Vec<Vec<usize>>,
}

impl CellGrid {
    pub(crate) fn build(mesh: &Mesh) -> CellGrid {
        let n = mesh.n_cells().max(1);
        let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for p in mesh.nodes() {
            for c in 0..2 {
                lo[c] = lo[c].min(p[c]);
                hi[c] = hi[c].max(p[c]);
            }
        }
        let side = (n as f64).sqrt().ceil() as usize;
        let dims = if mesh.dim() == 1 { [n, 1] } else { [side, side] };
        let cell = [
            ((hi[0] - lo[0]) / dims[0] as f64).max(1e-300),
            ((hi[1] - lo[1]) / dims[1] as f64).max(1e-300),
        ];
        let mut grid = CellGrid { origin: lo, cell, dims, buckets: vec![Vec::new(); dims[0] * dims[1]] };
        for e in 0..mesh.n_cells() {
            let (mut clo, mut chi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
            for &i in mesh.cell(e) {
                let p = mesh.nodes()[i];
                for c in 0..2 {
                    clo[c] = clo[c].min(p[c]);
                    chi[c] = chi[c].max(p[c]);
                }
            }
            let a = grid.index(clo);
            let b = grid.index(chi);
            for ix in a[0]..=b[0] {
                for iy in a[1]..=b[1] {
                    grid.buckets[iy * dims[0] + ix].push(e);
                }
            }
        }
        grid
    }

    fn index(&self, p: Point) -> [usize; 2] {
        let mut out = [0; 2];
        for c in 0..2 {
            let t = ((p[c] - self.origin[c]) / self.cell[c]).floor();
            out[c] = if t < 0.0 { 0 } else { (t as usize).min(self.dims[c] - 1) };
        }
        out
    }

    pub(crate) fn candidates(&self, p: Point) -> &[usize] {
        let [ix, iy] = self.index(p);
        &self.buckets[iy * self.dims[0] + ix]
    }
}
