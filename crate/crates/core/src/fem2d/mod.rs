//! P1 finite elements for the interface form on a disk/annulus pair in 2-D.

pub mod assemble;
pub mod eigen;
pub mod mesh;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use assemble::{assemble, assemble_single_trace_delta, assemble_with, AssembledPencil, AssemblyOptions, CsrMatrix};
pub use eigen::{lowest_eigenpairs, lowest_eigenpairs_with, EigenDiagnostics, EigenOptions, EigenPair};
pub use mesh::{build_graded_mesh, build_mesh, Grading, InterfaceMesh, MeshError};

use crate::coupling::CouplingField;
use crate::radial::OuterBc;
use crate::report::{convergence_from_levels, ConvergenceLevel, SpectrumReport};

/// Eigenvalues above `−NEGATIVE_CUTOFF` are treated as zero.
pub const NEGATIVE_CUTOFF: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FemError {
    #[error("mesh: {0}")]
    Mesh(#[from] MeshError),
    #[error("interface edge refers to unknown coupling region {0}")]
    UnknownRegionTag(usize),
    #[error("both trace-constraint coefficients vanish on region {region}")]
    ConstraintDegenerate { region: usize },
    #[error("incompatible trace constraints meet at vertex {vertex}")]
    ConflictingConstraint { vertex: usize },
    #[error("mass matrix is not positive definite")]
    MassNotDefinite,
    #[error("factorisation failed: {0}")]
    Factorization(String),
    #[error("eigensolver did not converge: {converged}/{wanted} pairs after {restarts} restarts (worst residual {worst_residual:e})")]
    ConvergenceFailure {
        restarts: usize,
        converged: usize,
        wanted: usize,
        worst_residual: f64,
    },
}

/// All eigenvalues below `−NEGATIVE_CUTOFF`, ascending, plus the solver diagnostics.
pub fn negative_eigenvalues(pencil: &AssembledPencil, opts: &EigenOptions) -> Result<(Vec<f64>, EigenDiagnostics), FemError> {
    let mut count = 4;
    loop {
        let (pairs, diag) = lowest_eigenpairs_with(pencil, count, opts)?;
        let values: Vec<f64> = pairs.iter().map(|p| p.value).collect();
        let all_negative = values.last().is_some_and(|&v| v < -NEGATIVE_CUTOFF);
        if !all_negative || count >= pencil.size() {
            let neg = values.into_iter().filter(|&v| v < -NEGATIVE_CUTOFF).collect();
            return Ok((neg, diag));
        }
        count *= 2;
    }
}

/// Mesh family and ladder settings for [`negative_spectrum_fem_with`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FemOptions {
    /// Growth and cap of the element size away from the interface.
    pub growth: f64,
    pub h_max: f64,
    pub refinements: usize,
    pub outer_bc: OuterBc,
    /// Also solve on the coarsest mesh with `2 R_out` to measure truncation.
    pub truncation_check: bool,
    pub eigen: EigenOptions,
}

impl Default for FemOptions {
    fn default() -> Self {
        Self {
            growth: 1.25,
            h_max: 0.5,
            refinements: 2,
            outer_bc: OuterBc::Neumann,
            truncation_check: true,
            eigen: EigenOptions::default(),
        }
    }
}

/// The coarse mesh of the ladder: graded from `h` at the interface.
pub fn ladder_base_mesh(r: f64, r_out: f64, h: f64, opts: &FemOptions) -> Result<InterfaceMesh, FemError> {
    Ok(build_graded_mesh(
        r,
        r_out,
        Grading {
            h_interface: h,
            growth: opts.growth,
            h_max: opts.h_max.max(h),
        },
    )?)
}

/// Splits the interface into `n` equal angular sectors, region `j` covering
/// angles in `[2πj/n, 2π(j+1)/n)`.
pub fn tag_equal_sectors(mesh: &mut InterfaceMesh, n: usize) {
    let n = n.max(1);
    let tau = 2.0 * std::f64::consts::PI;
    mesh.tag_arcs(|t| ((t.rem_euclid(tau) / tau * n as f64).floor() as usize).min(n - 1));
}

/// Negative spectrum on `h, h/2, …` (red refinement) with Richardson estimates.
/// A field with several regions is laid out by [`tag_equal_sectors`].
pub fn negative_spectrum_fem(field: &CouplingField, r: f64, r_out: f64, h: f64, count: usize) -> Result<SpectrumReport, FemError> {
    negative_spectrum_fem_with(field, r, r_out, h, count, &FemOptions::default())
}

pub fn negative_spectrum_fem_with(
    field: &CouplingField,
    r: f64,
    r_out: f64,
    h: f64,
    count: usize,
    opts: &FemOptions,
) -> Result<SpectrumReport, FemError> {
    let assembly = AssemblyOptions { outer_bc: opts.outer_bc };
    let mut mesh = ladder_base_mesh(r, r_out, h, opts)?;
    tag_equal_sectors(&mut mesh, field.regions().len());
    let mut levels = Vec::new();
    let mut notes = Vec::new();
    let mut max_residual: f64 = 0.0;
    for level in 0..=opts.refinements {
        if level > 0 {
            mesh = mesh.refine(true);
        }
        let pencil = assemble_with(field, &mesh, &assembly)?;
        let (neg, diag) = negative_eigenvalues(&pencil, &opts.eigen)?;
        max_residual = max_residual.max(diag.max_residual);
        let hl = h / f64::powi(2.0, level as i32);
        notes.push(format!("level {level}: h = {hl}, dofs = {}, negative = {}", pencil.size(), neg.len()));
        levels.push(ConvergenceLevel {
            label: format!("h={hl}"),
            h: hl,
            eigenvalues: neg.into_iter().take(count.max(1)).collect(),
        });
    }
    let finest = levels.last().map(|l| l.eigenvalues.clone()).unwrap_or_default();
    let conv = convergence_from_levels(levels);
    let mut report = SpectrumReport::new("fem2d", finest);
    if opts.truncation_check {
        let mut wide = ladder_base_mesh(r, 2.0 * r_out, h, opts)?;
        tag_equal_sectors(&mut wide, field.regions().len());
        let pencil = assemble_with(field, &wide, &assembly)?;
        let (neg, _) = negative_eigenvalues(&pencil, &opts.eigen)?;
        let coarse = &conv.levels[0].eigenvalues;
        let shift = match (neg.first(), coarse.first()) {
            (Some(a), Some(b)) => (a - b).abs(),
            _ => 0.0,
        };
        notes.push(format!(
            "truncation: {} negative with R_out = {}, {} with 2 R_out; |Δλ₁| = {shift:e}",
            coarse.len(),
            r_out,
            neg.len()
        ));
    }
    report.convergence = Some(conv);
    report.notes = notes;
    report.tolerances.push(("eigen_tol".into(), opts.eigen.tol));
    report.tolerances.push(("max_residual".into(), max_residual));
    report.tolerances.push(("negative_cutoff".into(), NEGATIVE_CUTOFF));
    Ok(report)
}
