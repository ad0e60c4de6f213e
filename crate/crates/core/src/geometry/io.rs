//! Line-oriented mesh text format.
//!
//! ```text
//! # domain <interval a b | polygon x0 y0 x1 y1 ... | disk cx cy r sides>
//! DIM N_NODES N_ELEMS
//! <N_NODES coordinate lines>
//! <N_ELEMS element lines (node indices)>
//! <boundary facet lines: node indices then outward normal>
//! ```
//!
//! Comment lines start with `#`. The optional `# domain` line restores the
//! domain description (exact radius for disks); without it the domain is
//! taken to be the boundary polygon of the mesh.

use std::fmt::Write as _;

use super::{Cells, Domain, Mesh};
use crate::error::{Error, Result};

pub fn write_mesh(mesh: &Mesh) -> String {
    let mut out = String::new();
    match mesh.domain() {
        Domain::Interval { a, b } => writeln!(out, "# domain interval {a} {b}").unwrap(),
        Domain::Polygon { vertices } => {
            let coords: Vec<String> = vertices.iter().map(|p| format!("{} {}", p[0], p[1])).collect();
            writeln!(out, "# domain polygon {}", coords.join(" ")).unwrap();
        }
        Domain::Disk { center, radius, sides } => {
            writeln!(out, "# domain disk {} {} {radius} {sides}", center[0], center[1]).unwrap()
        }
    }
    writeln!(out, "{} {} {}", mesh.dim(), mesh.n_nodes(), mesh.n_cells()).unwrap();
    for p in mesh.nodes() {
        match mesh.dim() {
            1 => writeln!(out, "{}", p[0]).unwrap(),
            _ => writeln!(out, "{} {}", p[0], p[1]).unwrap(),
        }
    }
    for e in 0..mesh.n_cells() {
        let c: Vec<String> = mesh.cell(e).iter().map(|i| i.to_string()).collect();
        writeln!(out, "{}", c.join(" ")).unwrap();
    }
    for f in mesh.facets() {
        match mesh.dim() {
            1 => writeln!(out, "{} {}", f.nodes[0], f.normal[0]).unwrap(),
            _ => writeln!(out, "{} {} {} {}", f.nodes[0], f.nodes[1], f.normal[0], f.normal[1]).unwrap(),
        }
    }
    out
}

pub fn read_mesh(text: &str) -> Result<Mesh> {
    let err = |line: usize, message: String| Error::Config { line, message };
    let mut domain: Option<Domain> = None;
    let mut lines = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if let Some(rest) = line.strip_prefix('#') {
            let toks: Vec<&str> = rest.split_whitespace().collect();
            if toks.first() == Some(&"domain") {
                domain = Some(parse_domain(&toks[1..]).map_err(|m| err(no + 1, m))?);
            }
            continue;
        }
        if !line.is_empty() {
            lines.push((no + 1, line));
        }
    }
    let mut it = lines.into_iter();
    let (hno, header) = it.next().ok_or_else(|| err(1, "missing header".into()))?;
    let head: Vec<usize> = parse_all(header).map_err(|m| err(hno, m))?;
    let [dim, n_nodes, n_elems] = head[..] else {
        return Err(err(hno, "header must be `DIM N_NODES N_ELEMS`".into()));
    };
    if dim != 1 && dim != 2 {
        return Err(err(hno, format!("unsupported dimension {dim}")));
    }
    let mut nodes = Vec::with_capacity(n_nodes);
    for _ in 0..n_nodes {
        let (no, l) = it.next().ok_or_else(|| err(hno, "truncated node list".into()))?;
        let v: Vec<f64> = parse_all(l).map_err(|m| err(no, m))?;
        if v.len() != dim {
            return Err(err(no, format!("expected {dim} coordinates")));
        }
        nodes.push([v[0], if dim == 2 { v[1] } else { 0.0 }]);
    }
    let mut elems = Vec::with_capacity(n_elems);
    for _ in 0..n_elems {
        let (no, l) = it.next().ok_or_else(|| err(hno, "truncated element list".into()))?;
        let v: Vec<usize> = parse_all(l).map_err(|m| err(no, m))?;
        if v.len() != dim + 1 || v.iter().any(|&i| i >= n_nodes) {
            return Err(err(no, "bad element line".into()));
        }
        elems.push(v);
    }
    // facet lines are derived data; validate their count only
    let n_facets = it.count();
    let cells = if dim == 1 {
        Cells::Segments(elems.iter().map(|v| [v[0], v[1]]).collect())
    } else {
        Cells::Triangles(elems.iter().map(|v| [v[0], v[1], v[2]]).collect())
    };
    let domain = match domain {
        Some(d) => d,
        None => infer_domain(dim, &nodes, &cells)?,
    };
    let mesh = Mesh::from_parts(domain, nodes, cells)?;
    if n_facets != 0 && n_facets != mesh.facets().len() {
        return Err(err(hno, format!("expected {} facet lines, found {n_facets}", mesh.facets().len())));
    }
    Ok(mesh)
}

fn parse_all<T: std::str::FromStr>(line: &str) -> std::result::Result<Vec<T>, String> {
    line.split_whitespace()
        .map(|t| t.parse::<T>().map_err(|_| format!("cannot parse `{t}`")))
        .collect()
}

fn parse_domain(toks: &[&str]) -> std::result::Result<Domain, String> {
    let nums: Vec<f64> = toks.iter().skip(1).map(|t| t.parse::<f64>().map_err(|_| format!("bad number `{t}`"))).collect::<std::result::Result<_, _>>()?;
    match toks.first().copied() {
        Some("interval") if nums.len() == 2 => Ok(Domain::Interval { a: nums[0], b: nums[1] }),
        Some("polygon") if nums.len() >= 6 && nums.len() % 2 == 0 => {
            Ok(Domain::Polygon { vertices: nums.chunks(2).map(|c| [c[0], c[1]]).collect() })
        }
        Some("disk") if nums.len() == 4 => {
            Ok(Domain::Disk { center: [nums[0], nums[1]], radius: nums[2], sides: nums[3] as usize })
        }
        _ => Err("unrecognized domain line".into()),
    }
}

fn infer_domain(dim: usize, nodes: &[super::Point], cells: &Cells) -> Result<Domain> {
    if dim == 1 {
        let a = nodes.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
        let b = nodes.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
        return Ok(Domain::Interval { a, b });
    }
    // walk the boundary loop of a provisional mesh
    let provisional = Mesh::from_parts(
        Domain::Polygon { vertices: vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]] },
        nodes.to_vec(),
        cells.clone(),
    )?;
    let facets = provisional.facets();
    let mut next = std::collections::HashMap::new();
    for f in facets {
        next.insert(f.nodes[0], f.nodes[1]);
    }
    let start = facets[0].nodes[0];
    let mut loop_nodes = vec![start];
    let mut cur = next[&start];
    while cur != start {
        loop_nodes.push(cur);
        cur = *next
            .get(&cur)
            .ok_or_else(|| Error::Geometry("boundary is not a single closed loop".into()))?;
        if loop_nodes.len() > facets.len() {
            return Err(Error::Geometry("boundary is not a single closed loop".into()));
        }
    }
    if loop_nodes.len() != facets.len() {
        return Err(Error::Geometry("mesh boundary has several components".into()));
    }
    Ok(Domain::Polygon { vertices: loop_nodes.iter().map(|&i| nodes[i]).collect() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_disk_mesh, make_interval, make_rectangle};

    #[test]
    fn roundtrip_preserves_mesh() {
        for mesh in [
            make_interval(0.0, 2.0, 5).unwrap(),
            make_rectangle(0.0, 1.0, 0.0, 2.0, 0.4).unwrap(),
            make_disk_mesh([0.5, 0.5], 1.5, 0.5).unwrap(),
        ] {
            let text = write_mesh(&mesh);
            let back = read_mesh(&text).unwrap();
            assert_eq!(back.nodes(), mesh.nodes());
            assert_eq!(back.cells(), mesh.cells());
            assert_eq!(back.domain(), mesh.domain());
            assert_eq!(write_mesh(&back), text);
        }
    }

    #[test]
    fn header_layout() {
        let text = write_mesh(&make_interval(0.0, 1.0, 2).unwrap());
        let body: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(body, vec!["1 3 2", "0", "0.5", "1", "0 1", "1 2", "0 -1", "2 1"]);
    }

    #[test]
    fn domain_inferred_without_comment() {
        let mesh = make_rectangle(0.0, 1.0, 0.0, 1.0, 0.5).unwrap();
        let text: String = write_mesh(&mesh).lines().skip(1).map(|l| format!("{l}\n")).collect();
        let back = read_mesh(&text).unwrap();
        assert!((back.domain().measure() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn malformed_input_reports_line() {
        let err = read_mesh("2 3 1\n0 0\n1 0\n").unwrap_err();
        assert!(matches!(err, Error::Config { .. }));
        let err = read_mesh("2 3 1\n0 0\n1 x\n0 1\n0 1 2\n").unwrap_err();
        assert!(matches!(err, Error::Config { line: 3, .. }));
    }
}
