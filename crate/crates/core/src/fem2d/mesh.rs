//! Ring-structured triangulations of the disk `|x| < R` and the annulus
//! `R < |x| < R_out`, glued along the interface circle with doubled vertices.
//!
//! Text format, one record per line (`#` starts a comment):
//!
//! ```text
//! v x y                              vertex coordinates
//! t i j k region                     triangle, region `i` (inner) or `e` (outer)
//! e i_inner i_outer j_inner j_outer region
//! ```
//!
//! An `e` line is an interface edge from geometric node 1 to node 2, listing
//! the inner and outer copy of each node followed by the coupling-region index.
//! Vertex indices are zero-based in file order. The outer boundary is
//! recovered from the triangles on import.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const MIN_ANGLE_DEG: f64 = 20.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeshError {
    #[error("invalid mesh parameters: {0}")]
    InvalidParameters(String),
    #[error("minimum angle {min_angle_deg:.3}° is below {MIN_ANGLE_DEG}°")]
    MeshQualityFailure { min_angle_deg: f64 },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("inconsistent mesh: {0}")]
    Inconsistent(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Inner,
    Outer,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Triangle {
    pub v: [usize; 3],
    pub side: Side,
}

/// Interface edge between geometric nodes 0 and 1, with both trace copies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct InterfaceEdge {
    pub inner: [usize; 2],
    pub outer: [usize; 2],
    /// Index of the coupling region on this arc.
    pub region: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterfaceMesh {
    pub vertices: Vec<[f64; 2]>,
    pub triangles: Vec<Triangle>,
    pub interface_edges: Vec<InterfaceEdge>,
    pub outer_boundary: Vec<[usize; 2]>,
    pub r: f64,
    pub r_out: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeshStats {
    pub vertices: usize,
    pub triangles: usize,
    pub interface_nodes: usize,
    pub interface_edges: usize,
    pub boundary_edges: usize,
    pub min_angle_deg: f64,
    pub max_interface_edge: f64,
    pub max_edge: f64,
    pub interface_perimeter: f64,
}

/// Local mesh-size law `s(r) = min(h_max, h + (g − 1)|r − R|)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grading {
    pub h_interface: f64,
    pub growth: f64,
    pub h_max: f64,
}

impl Grading {
    pub fn uniform(h: f64) -> Self {
        Self {
            h_interface: h,
            growth: 1.0,
            h_max: h,
        }
    }

    fn size(&self, r: f64, r_sigma: f64) -> f64 {
        (self.h_interface + (self.growth - 1.0) * (r - r_sigma).abs()).min(self.h_max)
    }
}

/// Quasi-uniform mesh with target edge length `h_target`.
pub fn build_mesh(r: f64, r_out: f64, h_target: f64) -> Result<InterfaceMesh, MeshError> {
    build_graded_mesh(r, r_out, Grading::uniform(h_target))
}

/// Mesh whose edge length grows away from the interface according to `grading`.
pub fn build_graded_mesh(r: f64, r_out: f64, grading: Grading) -> Result<InterfaceMesh, MeshError> {
    if !(r > 0.0 && r_out > r && r_out.is_finite()) {
        return Err(MeshError::InvalidParameters(format!("need 0 < R < R_out, got {r}, {r_out}")));
    }
    let Grading { h_interface, growth, h_max } = grading;
    if !(h_interface > 0.0 && h_interface < r && growth >= 1.0 && h_max >= h_interface) {
        return Err(MeshError::InvalidParameters(format!(
            "need 0 < h < R, growth >= 1, h_max >= h; got h = {h_interface}, growth = {growth}, h_max = {h_max}"
        )));
    }
    let gap = |x: f64| grading.size(x, r) * 3f64.sqrt() / 2.0;

    // Inner radii from R down to the centre, rescaled to end exactly at 0.
    let mut inner_gaps = Vec::new();
    let mut x = r;
    while x > 0.0 {
        let g = gap(x);
        inner_gaps.push(g);
        x -= g;
    }
    if inner_gaps.len() > 1 && x < -0.5 * inner_gaps.last().copied().unwrap_or(0.0) {
        let last = inner_gaps.pop().unwrap();
        x += last;
    }
    let scale = r / (r - x);
    let mut inner_radii = vec![r];
    let mut acc = r;
    for g in &inner_gaps[..inner_gaps.len() - 1] {
        acc -= g * scale;
        inner_radii.push(acc);
    }
    inner_radii.reverse(); // innermost ring first, R last

    let mut outer_gaps = Vec::new();
    let mut y = r;
    while y < r_out {
        let g = gap(y);
        outer_gaps.push(g);
        y += g;
    }
    if outer_gaps.len() > 1 && y - r_out > 0.5 * outer_gaps.last().copied().unwrap_or(0.0) {
        let last = outer_gaps.pop().unwrap();
        y -= last;
    }
    let scale = (r_out - r) / (y - r);
    let mut outer_radii = vec![r];
    let mut acc = r;
    for g in &outer_gaps {
        acc += g * scale;
        outer_radii.push(acc);
    }
    *outer_radii.last_mut().unwrap() = r_out;

    let ring_count = |rad: f64| ((2.0 * PI * rad / grading.size(rad, r)).round() as usize).max(6);

    let mut vertices: Vec<[f64; 2]> = vec![[0.0, 0.0]];
    let mut triangles = Vec::new();
    let mut rings: Vec<Vec<usize>> = Vec::new();
    let push_ring = |vertices: &mut Vec<[f64; 2]>, rad: f64, n: usize, offset: f64| -> Vec<usize> {
        (0..n)
            .map(|k| {
                let t = offset + 2.0 * PI * k as f64 / n as f64;
                vertices.push([rad * t.cos(), rad * t.sin()]);
                vertices.len() - 1
            })
            .collect()
    };

    let n_sigma = ring_count(r);
    for (idx, &rad) in inner_radii.iter().enumerate() {
        let n = if idx + 1 == inner_radii.len() { n_sigma } else { ring_count(rad) };
        let offset = if idx % 2 == 1 { PI / n as f64 } else { 0.0 };
        rings.push(push_ring(&mut vertices, rad, n, offset));
    }
    // Centre fan.
    let first = &rings[0];
    for k in 0..first.len() {
        triangles.push(Triangle {
            v: [0, first[k], first[(k + 1) % first.len()]],
            side: Side::Inner,
        });
    }
    for w in 0..rings.len() - 1 {
        zipper(&vertices, &rings[w], &rings[w + 1], Side::Inner, &mut triangles);
    }
    let inner_sigma = rings.last().unwrap().clone();
    let sigma_offset = if (inner_radii.len() - 1) % 2 == 1 { PI / n_sigma as f64 } else { 0.0 };
    let outer_sigma = push_ring(&mut vertices, r, n_sigma, sigma_offset);
    let mut prev = outer_sigma.clone();
    let parity = inner_radii.len() - 1;
    for (idx, &rad) in outer_radii.iter().enumerate().skip(1) {
        let n = ring_count(rad);
        let offset = if (parity + idx) % 2 == 1 { PI / n as f64 } else { 0.0 };
        let ring = push_ring(&mut vertices, rad, n, offset);
        zipper(&vertices, &prev, &ring, Side::Outer, &mut triangles);
        prev = ring;
    }
    let interface_edges = (0..n_sigma)
        .map(|k| InterfaceEdge {
            inner: [inner_sigma[k], inner_sigma[(k + 1) % n_sigma]],
            outer: [outer_sigma[k], outer_sigma[(k + 1) % n_sigma]],
            region: 0,
        })
        .collect();
    let outer_boundary = (0..prev.len()).map(|k| [prev[k], prev[(k + 1) % prev.len()]]).collect();
    let mesh = InterfaceMesh {
        vertices,
        triangles,
        interface_edges,
        outer_boundary,
        r,
        r_out,
    };
    let min_angle = mesh.min_angle_deg();
    if min_angle < MIN_ANGLE_DEG {
        return Err(MeshError::MeshQualityFailure { min_angle_deg: min_angle });
    }
    Ok(mesh)
}

fn angle_of(p: [f64; 2]) -> f64 {
    p[1].atan2(p[0])
}

fn orient(vertices: &[[f64; 2]], v: [usize; 3]) -> [usize; 3] {
    let [a, b, c] = v.map(|i| vertices[i]);
    let det = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
    if det < 0.0 {
        [v[0], v[2], v[1]]
    } else {
        v
    }
}

/// Triangulates the strip between two concentric rings by always advancing the
/// ring whose next vertex has the smaller polar angle.
fn zipper(vertices: &[[f64; 2]], lower: &[usize], upper: &[usize], side: Side, out: &mut Vec<Triangle>) {
    let (na, nb) = (lower.len(), upper.len());
    let a0 = angle_of(vertices[lower[0]]);
    let unwrap = |t: f64| {
        let mut u = t;
        while u < a0 - PI {
            u += 2.0 * PI;
        }
        while u >= a0 + PI {
            u -= 2.0 * PI;
        }
        u
    };
    let (j0, b0) = (0..nb)
        .map(|j| (j, unwrap(angle_of(vertices[upper[j]]))))
        .min_by(|x, y| (x.1 - a0).abs().total_cmp(&(y.1 - a0).abs()))
        .unwrap();
    let da = 2.0 * PI / na as f64;
    let db = 2.0 * PI / nb as f64;
    let (mut i, mut j) = (0usize, 0usize);
    while i < na || j < nb {
        let next_a = a0 + (i + 1) as f64 * da;
        let next_b = b0 + (j + 1) as f64 * db;
        let advance_a = j == nb || (i < na && next_a < next_b);
        let (ai, bj) = (lower[i % na], upper[(j0 + j) % nb]);
        let tri = if advance_a {
            let t = [ai, lower[(i + 1) % na], bj];
            i += 1;
            t
        } else {
            let t = [ai, upper[(j0 + j + 1) % nb], bj];
            j += 1;
            t
        };
        out.push(Triangle {
            v: orient(vertices, tri),
            side,
        });
    }
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

fn triangle_angles(p: [[f64; 2]; 3]) -> [f64; 3] {
    let l = [dist(p[1], p[2]), dist(p[2], p[0]), dist(p[0], p[1])];
    let ang = |a: f64, b: f64, c: f64| ((b * b + c * c - a * a) / (2.0 * b * c)).clamp(-1.0, 1.0).acos();
    [ang(l[0], l[1], l[2]), ang(l[1], l[2], l[0]), ang(l[2], l[0], l[1])]
}

impl InterfaceMesh {
    pub fn triangle_points(&self, t: &Triangle) -> [[f64; 2]; 3] {
        t.v.map(|i| self.vertices[i])
    }

    pub fn min_angle_deg(&self) -> f64 {
        self.triangles
            .iter()
            .flat_map(|t| triangle_angles(self.triangle_points(t)))
            .fold(PI, f64::min)
            .to_degrees()
    }

    pub fn max_edge(&self) -> f64 {
        self.triangles
            .iter()
            .map(|t| {
                let p = self.triangle_points(t);
                dist(p[0], p[1]).max(dist(p[1], p[2])).max(dist(p[2], p[0]))
            })
            .fold(0.0, f64::max)
    }

    pub fn max_interface_edge(&self) -> f64 {
        self.interface_edges
            .iter()
            .map(|e| dist(self.vertices[e.inner[0]], self.vertices[e.inner[1]]))
            .fold(0.0, f64::max)
    }

    pub fn interface_perimeter(&self) -> f64 {
        self.interface_edges
            .iter()
            .map(|e| dist(self.vertices[e.inner[0]], self.vertices[e.inner[1]]))
            .sum()
    }

    /// Inner/outer copy pairs of every interface node, in edge order.
    pub fn interface_pairs(&self) -> Vec<(usize, usize)> {
        self.interface_edges.iter().map(|e| (e.inner[0], e.outer[0])).collect()
    }

    pub fn stats(&self) -> MeshStats {
        MeshStats {
            vertices: self.vertices.len(),
            triangles: self.triangles.len(),
            interface_nodes: self.interface_pairs().len(),
            interface_edges: self.interface_edges.len(),
            boundary_edges: self.outer_boundary.len(),
            min_angle_deg: self.min_angle_deg(),
            max_interface_edge: self.max_interface_edge(),
            max_edge: self.max_edge(),
            interface_perimeter: self.interface_perimeter(),
        }
    }

    /// Assigns arc regions from the polar angle (in `(−π, π]`) of each edge midpoint.
    pub fn tag_arcs(&mut self, region_of_angle: impl Fn(f64) -> usize) {
        for e in &mut self.interface_edges {
            let (a, b) = (self.vertices[e.inner[0]], self.vertices[e.inner[1]]);
            e.region = region_of_angle(angle_of([0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]));
        }
    }

    /// Red refinement: every triangle splits into four through its edge midpoints.
    ///
    /// With `project`, new interface and outer-boundary vertices are moved onto
    /// their circles; without it the refined P1 space contains the coarse one.
    pub fn refine(&self, project: bool) -> InterfaceMesh {
        let mut vertices = self.vertices.clone();
        let mut midpoints: HashMap<(usize, usize), usize> = HashMap::new();
        let mut midpoint = |a: usize, b: usize, vertices: &mut Vec<[f64; 2]>| -> usize {
            let key = (a.min(b), a.max(b));
            *midpoints.entry(key).or_insert_with(|| {
                let (p, q) = (vertices[a], vertices[b]);
                vertices.push([0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])]);
                vertices.len() - 1
            })
        };
        let mut triangles = Vec::with_capacity(4 * self.triangles.len());
        for t in &self.triangles {
            let [a, b, c] = t.v;
            let ab = midpoint(a, b, &mut vertices);
            let bc = midpoint(b, c, &mut vertices);
            let ca = midpoint(c, a, &mut vertices);
            for v in [[a, ab, ca], [ab, b, bc], [ca, bc, c], [ab, bc, ca]] {
                triangles.push(Triangle { v, side: t.side });
            }
        }
        let mut interface_edges = Vec::with_capacity(2 * self.interface_edges.len());
        for e in &self.interface_edges {
            let mi = midpoint(e.inner[0], e.inner[1], &mut vertices);
            let mo = midpoint(e.outer[0], e.outer[1], &mut vertices);
            if project {
                for m in [mi, mo] {
                    let p = vertices[m];
                    let s = self.r / (p[0] * p[0] + p[1] * p[1]).sqrt();
                    vertices[m] = [p[0] * s, p[1] * s];
                }
            }
            interface_edges.push(InterfaceEdge {
                inner: [e.inner[0], mi],
                outer: [e.outer[0], mo],
                region: e.region,
            });
            interface_edges.push(InterfaceEdge {
                inner: [mi, e.inner[1]],
                outer: [mo, e.outer[1]],
                region: e.region,
            });
        }
        let mut outer_boundary = Vec::with_capacity(2 * self.outer_boundary.len());
        for &[a, b] in &self.outer_boundary {
            let m = midpoint(a, b, &mut vertices);
            if project {
                let p = vertices[m];
                let s = self.r_out / (p[0] * p[0] + p[1] * p[1]).sqrt();
                vertices[m] = [p[0] * s, p[1] * s];
            }
            outer_boundary.push([a, m]);
            outer_boundary.push([m, b]);
        }
        InterfaceMesh {
            vertices,
            triangles,
            interface_edges,
            outer_boundary,
            r: self.r,
            r_out: self.r_out,
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# interface mesh: {} vertices, {} triangles", self.vertices.len(), self.triangles.len());
        for v in &self.vertices {
            let _ = writeln!(s, "v {:?} {:?}", v[0], v[1]);
        }
        for t in &self.triangles {
            let tag = match t.side {
                Side::Inner => "i",
                Side::Outer => "e",
            };
            let _ = writeln!(s, "t {} {} {} {tag}", t.v[0], t.v[1], t.v[2]);
        }
        for e in &self.interface_edges {
            let _ = writeln!(s, "e {} {} {} {} {}", e.inner[0], e.outer[0], e.inner[1], e.outer[1], e.region);
        }
        s
    }

    pub fn from_text(text: &str) -> Result<InterfaceMesh, MeshError> {
        let mut vertices = Vec::new();
        let mut triangles = Vec::new();
        let mut interface_edges = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let fields: Vec<&str> = content.split_whitespace().collect();
            let err = |message: String| MeshError::Parse { line, message };
            let parse_f = |s: &str| s.parse::<f64>().map_err(|e| err(format!("bad number {s:?}: {e}")));
            let parse_u = |s: &str| s.parse::<usize>().map_err(|e| err(format!("bad index {s:?}: {e}")));
            match (fields[0], fields.len()) {
                ("v", 3) => vertices.push([parse_f(fields[1])?, parse_f(fields[2])?]),
                ("t", 5) => {
                    let side = match fields[4] {
                        "i" => Side::Inner,
                        "e" => Side::Outer,
                        other => return Err(err(format!("triangle region must be i or e, got {other:?}"))),
                    };
                    triangles.push(Triangle {
                        v: [parse_u(fields[1])?, parse_u(fields[2])?, parse_u(fields[3])?],
                        side,
                    });
                }
                ("e", 6) => interface_edges.push(InterfaceEdge {
                    inner: [parse_u(fields[1])?, parse_u(fields[3])?],
                    outer: [parse_u(fields[2])?, parse_u(fields[4])?],
                    region: parse_u(fields[5])?,
                }),
                (tag, len) => return Err(err(format!("unrecognised record {tag:?} with {len} fields"))),
            }
        }
        let n = vertices.len();
        let in_range = triangles.iter().all(|t| t.v.iter().all(|&i| i < n))
            && interface_edges.iter().all(|e| e.inner.iter().chain(&e.outer).all(|&i| i < n));
        if !in_range {
            return Err(MeshError::Inconsistent("vertex index out of range".into()));
        }
        if interface_edges.is_empty() {
            return Err(MeshError::Inconsistent("no interface edges".into()));
        }
        let norm = |p: [f64; 2]| (p[0] * p[0] + p[1] * p[1]).sqrt();
        let r = interface_edges.iter().map(|e| norm(vertices[e.inner[0]])).sum::<f64>() / interface_edges.len() as f64;
        let r_out = vertices.iter().map(|&p| norm(p)).fold(0.0, f64::max);

        // Boundary edges: used by exactly one triangle and not on the interface.
        let mut edge_use: HashMap<(usize, usize), (usize, [usize; 2])> = HashMap::new();
        for t in &triangles {
            for k in 0..3 {
                let (a, b) = (t.v[k], t.v[(k + 1) % 3]);
                edge_use.entry((a.min(b), a.max(b))).or_insert((0, [a, b])).0 += 1;
            }
        }
        let mut interface_keys = std::collections::HashSet::new();
        for e in &interface_edges {
            for [a, b] in [e.inner, e.outer] {
                interface_keys.insert((a.min(b), a.max(b)));
            }
        }
        let mut outer_boundary: Vec<[usize; 2]> = edge_use
            .iter()
            .filter(|(k, (count, _))| *count == 1 && !interface_keys.contains(k))
            .map(|(_, (_, e))| *e)
            .collect();
        outer_boundary.sort();
        Ok(InterfaceMesh {
            vertices,
            triangles,
            interface_edges,
            outer_boundary,
            r,
            r_out,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_mesh_structure() {
        let m = build_mesh(1.0, 4.0, 0.1).unwrap();
        let s = m.stats();
        // Area π·16 covered by triangles of area ≈ √3/4·h².
        let expected = PI * 16.0 / (3f64.sqrt() / 4.0 * 0.01);
        assert!((s.triangles as f64) > 0.6 * expected && (s.triangles as f64) < 1.6 * expected, "{s:?}");
        assert!(s.min_angle_deg >= MIN_ANGLE_DEG);
        assert!(s.max_interface_edge <= 0.1 * 1.05);
        // Every interface node carries two distinct vertices at the same point.
        for (i, o) in m.interface_pairs() {
            assert_ne!(i, o);
            assert_eq!(m.vertices[i], m.vertices[o]);
        }
        let inner_used: std::collections::HashSet<usize> = m
            .triangles
            .iter()
            .filter(|t| t.side == Side::Inner)
            .flat_map(|t| t.v)
            .collect();
        for e in &m.interface_edges {
            assert!(inner_used.contains(&e.inner[0]) && !inner_used.contains(&e.outer[0]));
        }
    }

    #[test]
    fn perimeter_converges_quadratically() {
        let err = |h: f64| (build_mesh(1.0, 2.0, h).unwrap().interface_perimeter() - 2.0 * PI).abs();
        let (e1, e2) = (err(0.2), err(0.1));
        assert!(e1 < 0.2 * 0.2 && e2 < 0.1 * 0.1);
        assert!(e1 / e2 > 3.0);
    }

    #[test]
    fn triangles_are_positively_oriented_and_cover_the_disk() {
        let m = build_graded_mesh(
            1.0,
            5.0,
            Grading {
                h_interface: 0.1,
                growth: 1.3,
                h_max: 0.6,
            },
        )
        .unwrap();
        let mut area = 0.0;
        for t in &m.triangles {
            let [a, b, c] = m.triangle_points(t);
            let det = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
            assert!(det > 0.0);
            area += 0.5 * det;
        }
        assert!((area - PI * 25.0).abs() < 0.05 * PI * 25.0);
        assert!(m.min_angle_deg() >= MIN_ANGLE_DEG);
    }

    #[test]
    fn refinement_keeps_doubling_and_nests() {
        let m = build_mesh(1.0, 2.0, 0.25).unwrap();
        let f = m.refine(false);
        assert_eq!(f.triangles.len(), 4 * m.triangles.len());
        assert_eq!(f.interface_edges.len(), 2 * m.interface_edges.len());
        assert_eq!(f.outer_boundary.len(), 2 * m.outer_boundary.len());
        for (i, o) in f.interface_pairs() {
            assert_ne!(i, o);
            assert_eq!(f.vertices[i], f.vertices[o]);
        }
        let p = m.refine(true);
        for (i, _) in p.interface_pairs() {
            let v = p.vertices[i];
            assert!(((v[0] * v[0] + v[1] * v[1]).sqrt() - 1.0).abs() < 1e-14);
        }
        assert!(p.min_angle_deg() >= MIN_ANGLE_DEG);
    }

    #[test]
    fn text_round_trip() {
        let mut m = build_mesh(1.0, 2.0, 0.3).unwrap();
        m.tag_arcs(|t| usize::from(t > 0.0));
        let back = InterfaceMesh::from_text(&m.to_text()).unwrap();
        assert_eq!(back.vertices, m.vertices);
        assert_eq!(back.triangles, m.triangles);
        assert_eq!(back.interface_edges, m.interface_edges);
        let mut a = back.outer_boundary.clone();
        let mut b = m.outer_boundary.clone();
        a.sort();
        b.sort();
        assert_eq!(a, b);
        assert!((back.r - 1.0).abs() < 1e-12 && (back.r_out - 2.0).abs() < 1e-12);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        match InterfaceMesh::from_text("v 0 0\nt 0 1\n") {
            Err(MeshError::Parse { line: 2, .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(InterfaceMesh::from_text("v 0 0\nt 0 0 7 i\ne 0 0 0 0 0\n").is_err());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(build_mesh(1.0, 0.5, 0.1).is_err());
        assert!(build_mesh(1.0, 2.0, 0.0).is_err());
    }
}
