//! P1 assembly of the interface quadratic form on an [`InterfaceMesh`].
//!
//! `K` holds `∫|∇f|²` over both sides minus the interface term
//! `∫_Σ ⟨Θ (f_i, f_e), (f_i, f_e)⟩`, integrated edgewise with two-point Gauss
//! quadrature (exact for linear traces against constant Θ). On Σ₀ arcs the
//! trace constraint is eliminated through a per-vertex map `x_full = P x`.

use std::collections::{BTreeMap, HashMap};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::mesh::{InterfaceMesh, Side};
use super::FemError;
use crate::coupling::{Coupling, CouplingField, SurfacePart};
use crate::radial::OuterBc;

/// Compressed sparse rows with sorted, duplicate-free columns.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub cols: Vec<usize>,
    pub vals: Vec<Complex64>,
}

impl CsrMatrix {
    /// Sums duplicates in a fixed (sorted) order.
    pub fn from_triplets(n: usize, mut triplets: Vec<(usize, usize, Complex64)>) -> Self {
        triplets.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0; n + 1];
        let mut cols = Vec::with_capacity(triplets.len());
        let mut vals: Vec<Complex64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            if last == Some((r, c)) {
                *vals.last_mut().unwrap() += v;
            } else {
                cols.push(c);
                vals.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self { n, row_ptr, cols, vals }
    }

    /// Keeps the upper-triangle contributions of a full Hermitian triplet list
    /// and mirrors them with conjugation, so the result is exactly Hermitian
    /// with a real diagonal.
    pub fn hermitian_from_triplets(n: usize, triplets: Vec<(usize, usize, Complex64)>) -> Self {
        let upper: Vec<(usize, usize, Complex64)> = triplets.into_iter().filter(|&(r, c, _)| r <= c).collect();
        let folded = Self::from_triplets(n, upper);
        let mut full = Vec::with_capacity(2 * folded.nnz());
        for (r, c, v) in folded.triplets() {
            if r == c {
                full.push((r, c, Complex64::new(v.re, 0.0)));
            } else {
                full.push((r, c, v));
                full.push((c, r, v.conj()));
            }
        }
        Self::from_triplets(n, full)
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        let range = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.cols[range.clone()].binary_search(&c) {
            Ok(k) => self.vals[range.start + k],
            Err(_) => Complex64::new(0.0, 0.0),
        }
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        (0..self.n)
            .map(|r| {
                (self.row_ptr[r]..self.row_ptr[r + 1])
                    .map(|k| self.vals[k] * x[self.cols[k]])
                    .sum()
            })
            .collect()
    }

    /// `max |A_rc − conj(A_cr)|`.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for r in 0..self.n {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                let c = self.cols[k];
                worst = worst.max((self.vals[k] - self.get(c, r).conj()).norm());
            }
        }
        worst
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        (0..self.n).flat_map(move |r| (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (r, self.cols[k], self.vals[k])))
    }

    /// `self + s·other` on the union pattern.
    pub fn add_scaled(&self, s: f64, other: &CsrMatrix) -> CsrMatrix {
        let trips = self.triplets().chain(other.triplets().map(|(r, c, v)| (r, c, v * s))).collect();
        CsrMatrix::from_triplets(self.n, trips)
    }

    pub fn max_abs_diff(&self, other: &CsrMatrix) -> f64 {
        let diff = self.add_scaled(-1.0, other);
        diff.vals.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// Where a full-mesh vertex lives in the reduced space: `f_v = coefficient · x[reduced]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DofEntry {
    pub reduced: usize,
    pub coefficient: Complex64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssembledPencil {
    pub k: CsrMatrix,
    pub m: CsrMatrix,
    /// Per mesh vertex; `None` for Dirichlet-constrained vertices.
    pub dof_map: Vec<Option<DofEntry>>,
    pub eliminated: usize,
    /// Largest top eigenvalue of Θ over the interface regions.
    pub theta_max: f64,
}

impl AssembledPencil {
    pub fn size(&self) -> usize {
        self.k.n
    }

    /// Nodal values on the full mesh from a reduced vector.
    pub fn expand(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.dof_map
            .iter()
            .map(|e| e.map_or(Complex64::new(0.0, 0.0), |e| e.coefficient * x[e.reduced]))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AssemblyOptions {
    pub outer_bc: OuterBc,
}

impl Default for AssemblyOptions {
    fn default() -> Self {
        Self {
            outer_bc: OuterBc::Neumann,
        }
    }
}

fn triangle_matrices(p: [[f64; 2]; 3]) -> ([[f64; 3]; 3], [[f64; 3]; 3]) {
    let b = [p[1][1] - p[2][1], p[2][1] - p[0][1], p[0][1] - p[1][1]];
    let c = [p[2][0] - p[1][0], p[0][0] - p[2][0], p[1][0] - p[0][0]];
    let area = 0.5 * (c[2] * b[1] - c[1] * b[2]).abs();
    let mut stiff = [[0.0; 3]; 3];
    let mut mass = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            stiff[i][j] = (b[i] * b[j] + c[i] * c[j]) / (4.0 * area);
            mass[i][j] = area / 12.0 * if i == j { 2.0 } else { 1.0 };
        }
    }
    (stiff, mass)
}

/// `∫_edge φ_a φ_b` by two-point Gauss quadrature.
fn edge_mass(length: f64) -> [[f64; 2]; 2] {
    let g = 0.5 / 3f64.sqrt();
    let pts = [0.5 - g, 0.5 + g];
    let mut e = [[0.0; 2]; 2];
    for t in pts {
        let phi = [1.0 - t, t];
        for a in 0..2 {
            for b in 0..2 {
                e[a][b] += 0.5 * length * phi[a] * phi[b];
            }
        }
    }
    e
}

fn edge_len(mesh: &InterfaceMesh, a: usize, b: usize) -> f64 {
    let (p, q) = (mesh.vertices[a], mesh.vertices[b]);
    ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt()
}

fn region_coupling(field: &CouplingField, region: usize) -> Result<Coupling, FemError> {
    field
        .region(region)
        .map(|r| r.coupling)
        .map_err(|_| FemError::UnknownRegionTag(region))
}

/// Per-vertex reduction: Σ₀ constraints and Dirichlet vertices.
fn build_dof_map(mesh: &InterfaceMesh, field: &CouplingField, opts: &AssemblyOptions) -> Result<(Vec<Option<DofEntry>>, usize), FemError> {
    let n = mesh.vertices.len();
    // (inner, outer) node pair → constraint coefficients (c_i, c_e).
    let mut constraints: BTreeMap<(usize, usize), (Complex64, Complex64)> = BTreeMap::new();
    for e in &mesh.interface_edges {
        let c = region_coupling(field, e.region)?;
        if c.part() != SurfacePart::SigmaZero {
            continue;
        }
        let (ci, ce) = c.trace_constraint();
        if ci.norm() == 0.0 && ce.norm() == 0.0 {
            return Err(FemError::ConstraintDegenerate { region: e.region });
        }
        for k in 0..2 {
            let key = (e.inner[k], e.outer[k]);
            if let Some(&(pi, pe)) = constraints.get(&key) {
                // Same constraint up to scaling: pi·ce = pe·ci.
                if (pi * ce - pe * ci).norm() > 1e-14 * (pi.norm() + pe.norm()) * (ci.norm() + ce.norm()) {
                    return Err(FemError::ConflictingConstraint { vertex: key.0 });
                }
            } else {
                constraints.insert(key, (ci, ce));
            }
        }
    }
    let mut boundary = vec![false; n];
    if opts.outer_bc == OuterBc::Dirichlet {
        for &[a, b] in &mesh.outer_boundary {
            boundary[a] = true;
            boundary[b] = true;
        }
    }
    // eliminated vertex → (kept vertex, coefficient)
    let mut tied: HashMap<usize, (usize, Complex64)> = HashMap::new();
    for (&(vi, vo), &(ci, ce)) in &constraints {
        if ce.norm() >= ci.norm() {
            tied.insert(vo, (vi, ci / ce));
        } else {
            tied.insert(vi, (vo, ce / ci));
        }
    }
    let one = Complex64::new(1.0, 0.0);
    let mut map: Vec<Option<DofEntry>> = vec![None; n];
    let mut next = 0;
    for v in 0..n {
        if boundary[v] || tied.contains_key(&v) {
            continue;
        }
        map[v] = Some(DofEntry {
            reduced: next,
            coefficient: one,
        });
        next += 1;
    }
    for (&v, &(keep, coef)) in &tied {
        if !boundary[v] {
            map[v] = map[keep].map(|e| DofEntry {
                reduced: e.reduced,
                coefficient: coef * e.coefficient,
            });
        }
    }
    Ok((map, next))
}

/// Assembles `(K, M)` for the doubled-trace form with Neumann outer boundary.
pub fn assemble(field: &CouplingField, mesh: &InterfaceMesh) -> Result<AssembledPencil, FemError> {
    assemble_with(field, mesh, &AssemblyOptions::default())
}

pub fn assemble_with(field: &CouplingField, mesh: &InterfaceMesh, opts: &AssemblyOptions) -> Result<AssembledPencil, FemError> {
    let (dof_map, n_red) = build_dof_map(mesh, field, opts)?;
    let mut kt = Vec::with_capacity(9 * mesh.triangles.len() + 16 * mesh.interface_edges.len());
    let mut mt = Vec::with_capacity(9 * mesh.triangles.len());
    let push = |out: &mut Vec<(usize, usize, Complex64)>, a: usize, b: usize, v: Complex64| {
        if let (Some(ea), Some(eb)) = (dof_map[a], dof_map[b]) {
            let w = ea.coefficient.conj() * v * eb.coefficient;
            if w != Complex64::new(0.0, 0.0) {
                out.push((ea.reduced, eb.reduced, w));
            }
        }
    };
    for t in &mesh.triangles {
        let (s, m) = triangle_matrices(mesh.triangle_points(t));
        for i in 0..3 {
            for j in 0..3 {
                push(&mut kt, t.v[i], t.v[j], Complex64::new(s[i][j], 0.0));
                push(&mut mt, t.v[i], t.v[j], Complex64::new(m[i][j], 0.0));
            }
        }
    }
    let mut theta_max: f64 = 0.0;
    for e in &mesh.interface_edges {
        let theta = region_coupling(field, e.region)?.theta();
        theta_max = theta_max.max(theta.eigenvalues().1);
        let em = edge_mass(edge_len(mesh, e.inner[0], e.inner[1]));
        let trace = [e.inner, e.outer];
        for p in 0..2 {
            for q in 0..2 {
                let t = theta.get(p, q);
                for a in 0..2 {
                    for b in 0..2 {
                        push(&mut kt, trace[p][a], trace[q][b], -t * em[a][b]);
                    }
                }
            }
        }
    }
    let eliminated = dof_map.iter().filter(|e| e.is_some()).count() - n_red;
    Ok(AssembledPencil {
        k: CsrMatrix::hermitian_from_triplets(n_red, kt),
        m: CsrMatrix::hermitian_from_triplets(n_red, mt),
        dof_map,
        eliminated,
        theta_max,
    })
}

/// Reference assembly of the δ form `∫|∇f|² − ∫_Σ α|f|²` with one trace per
/// interface node (outer copies identified with inner ones). The numbering
/// matches [`assemble`] for a γ = 0 Σ₀ field.
pub fn assemble_single_trace_delta(alphas: &[f64], mesh: &InterfaceMesh) -> Result<AssembledPencil, FemError> {
    let n = mesh.vertices.len();
    let mut merged: Vec<usize> = (0..n).collect();
    for e in &mesh.interface_edges {
        for k in 0..2 {
            merged[e.outer[k]] = e.inner[k];
        }
    }
    let mut index = vec![usize::MAX; n];
    let mut next = 0;
    for v in 0..n {
        if merged[v] == v {
            index[v] = next;
            next += 1;
        }
    }
    let one = Complex64::new(1.0, 0.0);
    let dof_map: Vec<Option<DofEntry>> = (0..n)
        .map(|v| {
            Some(DofEntry {
                reduced: index[merged[v]],
                coefficient: one,
            })
        })
        .collect();
    let mut kt = Vec::new();
    let mut mt = Vec::new();
    for t in &mesh.triangles {
        let (s, m) = triangle_matrices(mesh.triangle_points(t));
        let idx = t.v.map(|v| index[merged[v]]);
        for i in 0..3 {
            for j in 0..3 {
                kt.push((idx[i], idx[j], Complex64::new(s[i][j], 0.0)));
                mt.push((idx[i], idx[j], Complex64::new(m[i][j], 0.0)));
            }
        }
    }
    let mut theta_max: f64 = 0.0;
    for e in &mesh.interface_edges {
        let alpha = *alphas.get(e.region).ok_or(FemError::UnknownRegionTag(e.region))?;
        theta_max = theta_max.max(alpha / 2.0);
        let em = edge_mass(edge_len(mesh, e.inner[0], e.inner[1]));
        let idx = e.inner.map(|v| index[v]);
        for a in 0..2 {
            for b in 0..2 {
                kt.push((idx[a], idx[b], Complex64::new(-alpha * em[a][b], 0.0)));
            }
        }
    }
    Ok(AssembledPencil {
        k: CsrMatrix::hermitian_from_triplets(next, kt),
        m: CsrMatrix::hermitian_from_triplets(next, mt),
        dof_map,
        eliminated: n - next,
        theta_max,
    })
}

/// Splits a full-mesh nodal vector into its inner and outer side.
pub fn side_of_vertices(mesh: &InterfaceMesh) -> Vec<Side> {
    let mut side = vec![Side::Inner; mesh.vertices.len()];
    for t in &mesh.triangles {
        for &v in &t.v {
            side[v] = t.side;
        }
    }
    side
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coupling::{validate_coupling, RawRegion};
    use crate::fem2d::mesh::build_mesh;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zero_coupling_gives_single_domain_laplacian() {
        let mesh = build_mesh(1.0, 2.0, 0.3).unwrap();
        let free = CouplingField::uniform(Coupling::delta(0.0)).unwrap();
        let p = assemble(&free, &mesh).unwrap();
        let reference = assemble_single_trace_delta(&[0.0], &mesh).unwrap();
        assert_eq!(p.size(), reference.size());
        assert!(p.k.max_abs_diff(&reference.k) < 1e-14);
        assert!(p.m.max_abs_diff(&reference.m) < 1e-15);
        // Constants lie in the kernel.
        let ones = vec![c(1.0, 0.0); p.size()];
        let r = p.k.mul_vec(&ones);
        assert!(r.iter().all(|v| v.norm() < 1e-12));
    }

    #[test]
    fn delta_prime_edge_blocks() {
        let mesh = build_mesh(1.0, 2.0, 0.4).unwrap();
        let field = CouplingField::uniform(Coupling::delta_prime(2.0)).unwrap();
        let p = assemble(&field, &mesh).unwrap();
        let e = mesh.interface_edges[0];
        let em = edge_mass(edge_len(&mesh, e.inner[0], e.inner[1]));
        // Θ = [[1/2, −1/2], [−1/2, 1/2]]; inner and outer vertices share no triangle,
        // so cross entries come from the interface term alone.
        let red = |v: usize| p.dof_map[v].unwrap().reduced;
        assert!((p.k.get(red(e.inner[0]), red(e.outer[1])) - c(0.5 * em[0][1], 0.0)).norm() < 1e-15);
        assert!((p.k.get(red(e.outer[0]), red(e.inner[1])) - c(0.5 * em[0][1], 0.0)).norm() < 1e-15);
        assert_eq!(p.eliminated, 0);
    }

    #[test]
    fn complex_gamma_assembly_is_hermitian() {
        let mesh = build_mesh(1.0, 2.0, 0.3).unwrap();
        for coupling in [Coupling::new(1.0, 1.0, c(0.0, 1.0)), Coupling::new(1.0, 0.0, c(0.0, 1.0))] {
            let p = assemble(&CouplingField::uniform(coupling).unwrap(), &mesh).unwrap();
            assert_eq!(p.k.hermitian_defect(), 0.0);
            assert_eq!(p.m.hermitian_defect(), 0.0);
        }
    }

    #[test]
    fn gamma_two_kills_one_trace() {
        let mesh = build_mesh(1.0, 2.0, 0.4).unwrap();
        // γ = −2: c_i = 0, so the constraint forces f_e = 0 on Σ.
        let p = assemble(&CouplingField::uniform(Coupling::new(1.0, 0.0, c(-2.0, 0.0))).unwrap(), &mesh).unwrap();
        for (_, o) in mesh.interface_pairs() {
            assert_eq!(p.dof_map[o].unwrap().coefficient, c(0.0, 0.0));
        }
        let q = assemble(&CouplingField::uniform(Coupling::new(1.0, 0.0, c(2.0, 0.0))).unwrap(), &mesh).unwrap();
        for (i, _) in mesh.interface_pairs() {
            assert_eq!(q.dof_map[i].unwrap().coefficient, c(0.0, 0.0));
        }
    }

    #[test]
    fn unknown_region_and_conflicts() {
        let mut mesh = build_mesh(1.0, 2.0, 0.4).unwrap();
        mesh.tag_arcs(|t| usize::from(t > 0.0));
        let one = CouplingField::uniform(Coupling::delta(1.0)).unwrap();
        assert!(matches!(assemble(&one, &mesh), Err(FemError::UnknownRegionTag(1))));
        let raw = [
            RawRegion::new("a", c(1.0, 0.0), 0.0, c(0.0, 0.0), SurfacePart::SigmaZero),
            RawRegion::new("b", c(1.0, 0.0), 0.0, c(1.0, 0.0), SurfacePart::SigmaZero),
        ];
        let two = validate_coupling(&raw).unwrap();
        assert!(matches!(assemble(&two, &mesh), Err(FemError::ConflictingConstraint { .. })));
        let raw_ok = [
            RawRegion::new("a", c(1.0, 0.0), 0.0, c(0.0, 0.0), SurfacePart::SigmaZero),
            RawRegion::new("b", c(0.0, 0.0), 2.0, c(0.0, 0.0), SurfacePart::SigmaBeta),
        ];
        assert!(assemble(&validate_coupling(&raw_ok).unwrap(), &mesh).is_ok());
    }

    #[test]
    fn dirichlet_removes_boundary_vertices() {
        let mesh = build_mesh(1.0, 2.0, 0.4).unwrap();
        let f = CouplingField::uniform(Coupling::delta(1.0)).unwrap();
        let n = assemble(&f, &mesh).unwrap().size();
        let d = assemble_with(&f, &mesh, &AssemblyOptions { outer_bc: OuterBc::Dirichlet }).unwrap().size();
        assert_eq!(n - d, mesh.outer_boundary.len());
    }
}
