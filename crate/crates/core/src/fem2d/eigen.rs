//! Lowest eigenpairs of the Hermitian-definite pencil `K x = λ M x`.
//!
//! Small pencils go through a dense Cholesky reduction. Larger ones use a
//! shift-invert block Krylov method: `σ` is certified below the spectrum by a
//! successful sparse Cholesky factorisation of `K − σM`, Krylov blocks of
//! `(K − σM)^{−1} M` are M-orthonormalised (twice, against locked vectors and
//! the current basis), and Rayleigh–Ritz on `Qᴴ K Q` yields Ritz pairs.
//! Converged pairs are locked and the iteration restarts from the unconverged
//! Ritz vectors.

use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::{Mat, Side};
use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::assemble::{AssembledPencil, CsrMatrix};
use super::FemError;

/// Pencils up to this size are solved densely.
pub const DENSE_LIMIT: usize = 300;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenOptions {
    /// Relative residual target `‖Kx − λMx‖ ≤ tol · max(‖Kx‖, s‖Mx‖)`.
    pub tol: f64,
    pub block: usize,
    pub max_basis: usize,
    pub max_restarts: usize,
    pub seed: u64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            block: 4,
            max_basis: 64,
            max_restarts: 60,
            seed: 0x5eed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenPair {
    pub value: f64,
    /// M-normalised reduced vector.
    pub vector: Vec<Complex64>,
    /// `‖Kx − λMx‖ / max(‖Kx‖, s‖Mx‖)`.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct EigenDiagnostics {
    pub method: String,
    pub shift: f64,
    pub factorizations: usize,
    pub restarts: usize,
    pub max_residual: f64,
}

type Vector = Vec<Complex64>;

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn axpy(y: &mut [Complex64], s: Complex64, x: &[Complex64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += s * xi;
    }
}

fn residual_of(k: &CsrMatrix, m: &CsrMatrix, lambda: f64, x: &[Complex64]) -> (f64, f64, f64) {
    let kx = k.mul_vec(x);
    let mx = m.mul_vec(x);
    let r: f64 = kx
        .iter()
        .zip(&mx)
        .map(|(a, b)| (a - b * lambda).norm_sqr())
        .sum::<f64>()
        .sqrt();
    (r, norm(&kx), norm(&mx))
}

/// Residual scale `max(‖Kx‖, s‖Mx‖)`. For `λ ≈ 0` the plain `‖Kx‖` scale is
/// unattainable in floating point; `s` is the magnitude of the initial shift.
fn residual_scale(kx: f64, mx: f64, s: f64) -> f64 {
    kx.max(s * mx).max(f64::MIN_POSITIVE)
}

fn scale_of(pencil: &AssembledPencil) -> f64 {
    shift_guess(pencil).abs().max(1.0)
}

/// The `count` algebraically smallest eigenpairs, ascending.
pub fn lowest_eigenpairs(pencil: &AssembledPencil, count: usize) -> Result<(Vec<EigenPair>, EigenDiagnostics), FemError> {
    lowest_eigenpairs_with(pencil, count, &EigenOptions::default())
}

pub fn lowest_eigenpairs_with(
    pencil: &AssembledPencil,
    count: usize,
    opts: &EigenOptions,
) -> Result<(Vec<EigenPair>, EigenDiagnostics), FemError> {
    let n = pencil.size();
    let count = count.min(n);
    if count == 0 {
        return Ok((Vec::new(), EigenDiagnostics::default()));
    }
    if n <= DENSE_LIMIT {
        return dense_eigenpairs(pencil, count);
    }
    krylov_eigenpairs(pencil, count, opts)
}

fn to_dense(a: &CsrMatrix) -> DMatrix<Complex64> {
    let mut d = DMatrix::zeros(a.n, a.n);
    for (r, c, v) in a.triplets() {
        d[(r, c)] += v;
    }
    d
}

fn dense_eigenpairs(pencil: &AssembledPencil, count: usize) -> Result<(Vec<EigenPair>, EigenDiagnostics), FemError> {
    let k = to_dense(&pencil.k);
    let m = to_dense(&pencil.m);
    let chol = nalgebra::Cholesky::new(m).ok_or(FemError::MassNotDefinite)?;
    let l = chol.l();
    let linv_k = l.solve_lower_triangular(&k).ok_or(FemError::MassNotDefinite)?;
    let c = l
        .solve_lower_triangular(&linv_k.adjoint())
        .ok_or(FemError::MassNotDefinite)?
        .adjoint();
    let c = (&c + c.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(c);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let lt = l.adjoint();
    let s = scale_of(pencil);
    let mut pairs = Vec::with_capacity(count);
    let mut max_residual: f64 = 0.0;
    for &j in order.iter().take(count) {
        let y = eig.eigenvectors.column(j).into_owned();
        let x = lt.solve_upper_triangular(&y).ok_or(FemError::MassNotDefinite)?;
        let x: Vec<Complex64> = x.iter().copied().collect();
        let lambda = eig.eigenvalues[j];
        let (r, kx, mx) = residual_of(&pencil.k, &pencil.m, lambda, &x);
        let rel = r / residual_scale(kx, mx, s);
        max_residual = max_residual.max(rel);
        pairs.push(EigenPair {
            value: lambda,
            vector: x,
            residual: rel,
        });
    }
    Ok((
        pairs,
        EigenDiagnostics {
            method: "dense".into(),
            shift: f64::NAN,
            factorizations: 1,
            restarts: 0,
            max_residual,
        },
    ))
}

struct ShiftInvert {
    llt: faer::sparse::linalg::solvers::Llt<usize, Complex64>,
    shift: f64,
    factorizations: usize,
}

fn shifted_matrix(k: &CsrMatrix, m: &CsrMatrix, shift: f64) -> Result<SparseColMat<usize, Complex64>, FemError> {
    let triplets: Vec<Triplet<usize, usize, Complex64>> = k
        .triplets()
        .chain(m.triplets().map(|(r, c, v)| (r, c, v * -shift)))
        .filter(|&(r, c, _)| r >= c)
        .map(|(r, c, v)| Triplet::new(r, c, v))
        .collect();
    SparseColMat::try_new_from_triplets(k.n, k.n, &triplets).map_err(|e| FemError::Factorization(format!("{e:?}")))
}

/// Lowers `σ` from `initial` until `K − σM` admits a Cholesky factorisation.
fn certified_shift(pencil: &AssembledPencil, initial: f64) -> Result<ShiftInvert, FemError> {
    let mut shift = initial;
    for attempt in 1..=80 {
        let a = shifted_matrix(&pencil.k, &pencil.m, shift)?;
        match a.sp_cholesky(Side::Lower) {
            Ok(llt) => {
                return Ok(ShiftInvert {
                    llt,
                    shift,
                    factorizations: attempt,
                })
            }
            Err(_) => shift = 2.0 * shift - 1.0,
        }
    }
    Err(FemError::Factorization(format!("no definite shift found down to {shift}")))
}

/// Initial shift: the planar-type bound `−(θ² + θ)` pushed a little further down.
fn shift_guess(pencil: &AssembledPencil) -> f64 {
    let t = pencil.theta_max.max(0.0);
    -(1.25 * (t * t + t) + 0.5)
}

fn krylov_eigenpairs(pencil: &AssembledPencil, count: usize, opts: &EigenOptions) -> Result<(Vec<EigenPair>, EigenDiagnostics), FemError> {
    let n = pencil.size();
    let si = certified_shift(pencil, shift_guess(pencil))?;
    let scale = scale_of(pencil);
    let block = opts.block.max(1);
    let max_basis = opts.max_basis.max(3 * block).max(2 * count + 2 * block).min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let random_vec = |rng: &mut ChaCha8Rng| -> Vector {
        (0..n)
            .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect()
    };

    // Locked pairs: (λ, x, Mx).
    let mut locked: Vec<(f64, Vector, Vector)> = Vec::new();
    let mut start: Vec<Vector> = (0..block).map(|_| random_vec(&mut rng)).collect();
    let mut restarts = 0;
    let mut worst_seen = f64::INFINITY;

    while locked.len() < count {
        if restarts >= opts.max_restarts {
            return Err(FemError::ConvergenceFailure {
                restarts,
                converged: locked.len(),
                wanted: count,
                worst_residual: worst_seen,
            });
        }
        restarts += 1;
        let mut q: Vec<Vector> = Vec::new();
        let mut mq: Vec<Vector> = Vec::new();
        let mut current = orthonormalize(&pencil.m, &locked, &mut q, &mut mq, start);
        while !current.is_empty() && q.len() < max_basis {
            let room = max_basis - q.len();
            let mut next = Vec::with_capacity(current.len().min(room));
            let mut rhs = Mat::<Complex64>::zeros(n, current.len().min(room));
            for (j, v) in current.iter().take(room).enumerate() {
                let mv = pencil.m.mul_vec(v);
                for i in 0..n {
                    rhs[(i, j)] = mv[i];
                }
            }
            si.llt.solve_in_place(rhs.as_mut());
            for j in 0..rhs.ncols() {
                next.push((0..n).map(|i| rhs[(i, j)]).collect());
            }
            current = orthonormalize(&pencil.m, &locked, &mut q, &mut mq, next);
        }
        if q.is_empty() {
            // The start block was swallowed by the locked space; draw fresh vectors.
            start = (0..block).map(|_| random_vec(&mut rng)).collect();
            continue;
        }
        let kq: Vec<Vector> = q.iter().map(|v| pencil.k.mul_vec(v)).collect();
        let dim = q.len();
        let mut h = DMatrix::<Complex64>::zeros(dim, dim);
        for i in 0..dim {
            for j in i..dim {
                let v = dot(&q[i], &kq[j]);
                h[(i, j)] = v;
                h[(j, i)] = v.conj();
            }
            h[(i, i)] = Complex64::new(h[(i, i)].re, 0.0);
        }
        let eig = SymmetricEigen::new(h);
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

        let wanted = count - locked.len();
        let mut unconverged = Vec::new();
        let mut newly_locked = Vec::new();
        worst_seen = 0.0;
        for &j in order.iter().take(wanted + block) {
            let theta = eig.eigenvalues[j];
            let y = eig.eigenvectors.column(j);
            let mut x = vec![Complex64::new(0.0, 0.0); n];
            let mut kx = vec![Complex64::new(0.0, 0.0); n];
            let mut mx = vec![Complex64::new(0.0, 0.0); n];
            for c in 0..dim {
                axpy(&mut x, y[c], &q[c]);
                axpy(&mut kx, y[c], &kq[c]);
                axpy(&mut mx, y[c], &mq[c]);
            }
            let r: f64 = kx.iter().zip(&mx).map(|(a, b)| (a - b * theta).norm_sqr()).sum::<f64>().sqrt();
            let (nk, nm) = (norm(&kx), norm(&mx));
            // Only a converged prefix is locked, so no lower pair is skipped.
            let rel = r / residual_scale(nk, nm, scale);
            if unconverged.is_empty() && newly_locked.len() < wanted && rel <= opts.tol {
                newly_locked.push((theta, x, mx));
            } else {
                worst_seen = worst_seen.max(rel);
                unconverged.push(x);
            }
        }
        locked.extend(newly_locked);
        start = unconverged;
        while start.len() < block {
            start.push(random_vec(&mut rng));
        }
    }

    locked.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut pairs = Vec::with_capacity(count);
    let mut max_residual: f64 = 0.0;
    for (lambda, x, _) in locked.into_iter().take(count) {
        let (r, kx, mx) = residual_of(&pencil.k, &pencil.m, lambda, &x);
        let rel = r / residual_scale(kx, mx, scale);
        max_residual = max_residual.max(rel);
        pairs.push(EigenPair {
            value: lambda,
            vector: x,
            residual: rel,
        });
    }
    Ok((
        pairs,
        EigenDiagnostics {
            method: "shift-invert block Krylov".into(),
            shift: si.shift,
            factorizations: si.factorizations,
            restarts,
            max_residual,
        },
    ))
}

/// M-orthonormalises `block` against the locked vectors and the basis `q`,
/// appends the survivors to `q`/`mq` and returns them.
fn orthonormalize(
    m: &CsrMatrix,
    locked: &[(f64, Vector, Vector)],
    q: &mut Vec<Vector>,
    mq: &mut Vec<Vector>,
    block: Vec<Vector>,
) -> Vec<Vector> {
    let mut out = Vec::new();
    for mut v in block {
        let mut mv = m.mul_vec(&v);
        let start_norm = dot(&v, &mv).re.max(0.0).sqrt();
        if start_norm == 0.0 {
            continue;
        }
        for _ in 0..2 {
            for (_, x, mx) in locked {
                let c = dot(mx, &v);
                axpy(&mut v, -c, x);
            }
            for (x, mx) in q.iter().zip(mq.iter()) {
                let c = dot(mx, &v);
                axpy(&mut v, -c, x);
            }
            mv = m.mul_vec(&v);
        }
        let nv = dot(&v, &mv).re.max(0.0).sqrt();
        if nv <= 1e-10 * start_norm {
            continue;
        }
        let s = Complex64::new(1.0 / nv, 0.0);
        v.iter_mut().for_each(|x| *x *= s);
        mv.iter_mut().for_each(|x| *x *= s);
        q.push(v.clone());
        mq.push(mv);
        out.push(v);
    }
    out
}

/// Max deviation of `XᴴMX` from the identity.
pub fn m_orthonormality_defect(m: &CsrMatrix, pairs: &[EigenPair]) -> f64 {
    let mx: Vec<Vector> = pairs.iter().map(|p| m.mul_vec(&p.vector)).collect();
    let mut worst: f64 = 0.0;
    for (i, p) in pairs.iter().enumerate() {
        for (j, mxj) in mx.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((dot(&p.vector, mxj) - Complex64::new(target, 0.0)).norm());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coupling::{Coupling, CouplingField};
    use crate::fem2d::assemble::assemble;
    use crate::fem2d::mesh::build_mesh;

    #[test]
    fn free_neumann_ground_state_is_constant() {
        let mesh = build_mesh(1.0, 2.0, 0.2).unwrap();
        let p = assemble(&CouplingField::uniform(Coupling::delta(0.0)).unwrap(), &mesh).unwrap();
        assert!(p.size() > DENSE_LIMIT);
        let (pairs, _) = lowest_eigenpairs(&p, 3).unwrap();
        assert!(pairs[0].value.abs() < 1e-10);
        let x = &pairs[0].vector;
        let first = x[0];
        assert!(x.iter().all(|v| (v - first).norm() < 1e-8 * first.norm()));
    }

    #[test]
    fn dense_and_krylov_agree() {
        let mesh = build_mesh(1.0, 2.0, 0.35).unwrap();
        let field = CouplingField::uniform(Coupling::new(1.0, 1.0, Complex64::new(0.0, 1.0))).unwrap();
        let p = assemble(&field, &mesh).unwrap();
        assert!(p.size() <= DENSE_LIMIT);
        let (dense, _) = dense_eigenpairs(&p, 5).unwrap();
        let (kry, diag) = krylov_eigenpairs(&p, 5, &EigenOptions::default()).unwrap();
        assert!(diag.shift < dense[0].value);
        for (a, b) in dense.iter().zip(&kry) {
            assert!((a.value - b.value).abs() < 1e-9 * a.value.abs().max(1.0), "{} vs {}", a.value, b.value);
        }
    }

    #[test]
    fn solver_contract() {
        let mesh = build_mesh(1.0, 3.0, 0.2).unwrap();
        let field = CouplingField::uniform(Coupling::delta(3.0)).unwrap();
        let p = assemble(&field, &mesh).unwrap();
        let (pairs, diag) = lowest_eigenpairs(&p, 5).unwrap();
        assert!(pairs.windows(2).all(|w| w[0].value <= w[1].value));
        assert!(m_orthonormality_defect(&p.m, &pairs) <= 1e-10);
        for pr in &pairs {
            if pr.value.abs() > 1e-6 {
                assert!(pr.residual <= 1e-8, "residual {}", pr.residual);
            }
        }
        assert!(diag.max_residual.is_finite());
    }

    #[test]
    fn krylov_keeps_the_zero_eigenvalue_of_a_jump_coupling() {
        // δ′ has an exact zero mode (equal constants on both sides) between
        // a negative eigenvalue and a nearly degenerate pair.
        let mesh = crate::fem2d::mesh::build_graded_mesh(
            1.0,
            4.0,
            crate::fem2d::mesh::Grading {
                h_interface: 0.25,
                growth: 1.25,
                h_max: 0.5,
            },
        )
        .unwrap();
        let p = assemble(&CouplingField::uniform(Coupling::delta_prime(4.0)).unwrap(), &mesh).unwrap();
        let (dense, _) = dense_eigenpairs(&p, 6).unwrap();
        for tol in [1e-8, 1e-10] {
            let opts = EigenOptions { tol, ..EigenOptions::default() };
            let (kry, diag) = krylov_eigenpairs(&p, 6, &opts).unwrap();
            for (a, b) in dense.iter().zip(&kry) {
                assert!((a.value - b.value).abs() < 1e-9, "tol {tol}: {} vs {}", a.value, b.value);
            }
            assert!(diag.max_residual <= tol);
        }
    }
}
