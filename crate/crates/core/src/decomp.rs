//! Complex dense factorizations via Jacobi iterations: one-sided Jacobi SVD
//! (paper convention `A = U D W`, right factor not adjointed), two-sided
//! Jacobi Hermitian eigendecomposition with gap clustering, polar
//! decomposition, operator norm, PSD test, inverse.

use crate::matrix::{C64, ComplexMatrix, LinalgError};

const MAX_SWEEPS: usize = 60;
const JACOBI_EPS: f64 = 1e-15;

/// Full SVD `A = left * diag(singulars) * right` with square unitary factors.
#[derive(Debug, Clone)]
pub struct SvdFactors {
    pub left: ComplexMatrix,
    pub singulars: Vec<f64>,
    pub right: ComplexMatrix,
}

impl SvdFactors {
    /// Reassemble `left * diag(singulars) * right`.
    pub fn reassemble(&self) -> ComplexMatrix {
        let (n, m) = (self.left.rows(), self.right.rows());
        let mut sd = ComplexMatrix::zeros(n, m);
        for (i, &s) in self.singulars.iter().enumerate() {
            sd[(i, i)] = C64::new(s, 0.0);
        }
        &(&self.left * &sd) * &self.right
    }

    pub fn sigma_min(&self) -> f64 {
        self.singulars.last().copied().unwrap_or(0.0)
    }

    pub fn sigma_max(&self) -> f64 {
        self.singulars.first().copied().unwrap_or(0.0)
    }
}

/// Spectral decomposition of a Hermitian matrix with near-degenerate
/// eigenvalues merged into clusters.
#[derive(Debug, Clone)]
pub struct HermEig {
    /// `(eigenvalue, orthogonal projector)` pairs, eigenvalues ascending.
    pub clusters: Vec<(f64, ComplexMatrix)>,
    /// Orthonormal eigenbasis, columns sorted by ascending eigenvalue.
    pub basis: ComplexMatrix,
    /// All eigenvalues ascending (before clustering).
    pub eigenvalues: Vec<f64>,
    /// Column ranges of `basis` belonging to each cluster.
    pub cluster_ranges: Vec<std::ops::Range<usize>>,
}

impl HermEig {
    pub fn reassemble(&self) -> ComplexMatrix {
        let n = self.basis.rows();
        let mut out = ComplexMatrix::zeros(n, n);
        for (lam, proj) in &self.clusters {
            out = &out + &proj.scale_re(*lam);
        }
        out
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    /// Apply a real function to the matrix through its spectral decomposition.
    pub fn map_eigenvalues(&self, mut f: impl FnMut(f64) -> f64) -> ComplexMatrix {
        let n = self.basis.rows();
        let mut out = ComplexMatrix::zeros(n, n);
        for (lam, proj) in &self.clusters {
            out = &out + &proj.scale_re(f(*lam));
        }
        out
    }
}

/// 2x2 Hermitian Jacobi rotation `G = [[c, s], [-s e^{-i phi}, c e^{-i phi}]]`
/// diagonalizing `[[app, apq], [apq*, aqq]]` under `G* M G`, where
/// `apq = |apq| e^{i phi}`. Returns `(c, s, e^{-i phi})`.
fn jacobi_rotation(app: f64, aqq: f64, apq: C64) -> (f64, f64, C64) {
    let abs_pq = apq.norm();
    let phase_conj = apq.conj() / abs_pq;
    let tau = (aqq - app) / (2.0 * abs_pq);
    let t = if tau == 0.0 {
        1.0
    } else {
        tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    (c, t * c, phase_conj)
}

fn offdiag_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Raw Hermitian Jacobi eigendecomposition: `A = V diag(eigs) V*`,
/// eigenvalues ascending.
pub fn hermitian_eigen(a: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix), LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    a.check_finite()?;
    let n = a.rows();
    if n == 0 {
        return Ok((vec![], ComplexMatrix::zeros(0, 0)));
    }
    let scale = a.frobenius_norm().max(f64::MIN_POSITIVE);
    let mut m = a.clone();
    // symmetrize to kill roundoff-level asymmetry; callers gate on hermitian_defect
    let adj = m.adjoint();
    m = (&m + &adj).scale_re(0.5);
    let mut v = ComplexMatrix::identity(n);

    for sweep in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq.norm() <= JACOBI_EPS * scale {
                    continue;
                }
                rotated = true;
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                // A <- G* A G, V <- V G
                let (c, s, phase_conj) = jacobi_rotation(app, aqq, apq);
                let g21 = phase_conj * (-s);
                let g22 = phase_conj * c;
                // columns of A
                for i in 0..n {
                    let aip = m[(i, p)];
                    let aiq = m[(i, q)];
                    m[(i, p)] = aip * c + aiq * g21;
                    m[(i, q)] = aip * s + aiq * g22;
                }
                // rows of A (G* from the left)
                for j in 0..n {
                    let apj = m[(p, j)];
                    let aqj = m[(q, j)];
                    m[(p, j)] = apj * c + aqj * g21.conj();
                    m[(q, j)] = apj * s + aqj * g22.conj();
                }
                // eigenvector columns
                for i in 0..n {
                    let vip = v[(i, p)];
                    let viq = v[(i, q)];
                    v[(i, p)] = vip * c + viq * g21;
                    v[(i, q)] = vip * s + viq * g22;
                }
            }
        }
        if !rotated {
            break;
        }
        if sweep == MAX_SWEEPS - 1 {
            return Err(LinalgError::NonConvergence {
                sweeps: MAX_SWEEPS,
                residual: offdiag_norm(&m),
            });
        }
    }

    let mut idx: Vec<usize> = (0..n).collect();
    let eigs: Vec<f64> = (0..n).map(|i| m[(i, i)].re).collect();
    idx.sort_by(|&i, &j| eigs[i].partial_cmp(&eigs[j]).unwrap());
    let sorted_eigs: Vec<f64> = idx.iter().map(|&i| eigs[i]).collect();
    let sorted_v = ComplexMatrix::from_fn(n, n, |i, j| v[(i, idx[j])]);
    Ok((sorted_eigs, sorted_v))
}

/// Hermitian eigendecomposition with agglomerative clustering: consecutive
/// sorted eigenvalues closer than `cluster_tol` share one projector.
pub fn herm_eig(a: &ComplexMatrix, cluster_tol: f64) -> Result<HermEig, LinalgError> {
    let defect = a.hermitian_defect();
    let gate = 1e-10 * a.frobenius_norm().max(1.0);
    if defect > gate {
        return Err(LinalgError::NotHermitian { defect });
    }
    let (eigs, v) = hermitian_eigen(a)?;
    let n = eigs.len();
    let mut clusters = Vec::new();
    let mut ranges = Vec::new();
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (eigs[end] - eigs[end - 1]).abs() <= cluster_tol {
            end += 1;
        }
        let mut proj = ComplexMatrix::zeros(n, n);
        for k in start..end {
            let col = v.column(k);
            for i in 0..n {
                for j in 0..n {
                    let incr = col[i] * col[j].conj();
                    let cur = proj[(i, j)];
                    proj[(i, j)] = cur + incr;
                }
            }
        }
        let lam = eigs[start..end].iter().sum::<f64>() / (end - start) as f64;
        clusters.push((lam, proj));
        ranges.push(start..end);
        start = end;
    }
    Ok(HermEig {
        clusters,
        basis: v,
        eigenvalues: eigs,
        cluster_ranges: ranges,
    })
}

/// One-sided Jacobi SVD with full square unitary factors.
/// Convention: `A = left * diag(singulars) * right` (right NOT adjointed),
/// singular values descending.
pub fn svd(a: &ComplexMatrix) -> Result<SvdFactors, LinalgError> {
    a.check_finite()?;
    let (n, m) = (a.rows(), a.cols());
    if n >= m {
        svd_tall(a)
    } else {
        // A = (A*)* : factorize the tall adjoint and swap roles
        let f = svd_tall(&a.adjoint())?;
        // A* = L S R  =>  A = R* S L*  => left = R*, right = L*
        Ok(SvdFactors {
            left: f.right.adjoint(),
            singulars: f.singulars,
            right: f.left.adjoint(),
        })
    }
}

fn svd_tall(a: &ComplexMatrix) -> Result<SvdFactors, LinalgError> {
    let (n, m) = (a.rows(), a.cols());
    let mut b = a.clone();
    let mut v = ComplexMatrix::identity(m);
    let scale = a.frobenius_norm();
    if scale == 0.0 {
        // zero matrix: arbitrary unitary factors
        return Ok(SvdFactors {
            left: ComplexMatrix::identity(n),
            singulars: vec![0.0; m],
            right: ComplexMatrix::identity(m),
        });
    }

    let mut converged = false;
    for _sweep in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..m {
            for q in (p + 1)..m {
                let mut app = 0.0;
                let mut aqq = 0.0;
                let mut apq = C64::new(0.0, 0.0);
                for i in 0..n {
                    let bp = b[(i, p)];
                    let bq = b[(i, q)];
                    app += bp.norm_sqr();
                    aqq += bq.norm_sqr();
                    apq += bp.conj() * bq;
                }
                if apq.norm() <= JACOBI_EPS * (app * aqq).sqrt() + f64::MIN_POSITIVE {
                    continue;
                }
                rotated = true;
                let (c, s, phase_conj) = jacobi_rotation(app, aqq, apq);
                let g21 = phase_conj * (-s);
                let g22 = phase_conj * c;
                for i in 0..n {
                    let bp = b[(i, p)];
                    let bq = b[(i, q)];
                    b[(i, p)] = bp * c + bq * g21;
                    b[(i, q)] = bp * s + bq * g22;
                }
                for i in 0..m {
                    let vp = v[(i, p)];
                    let vq = v[(i, q)];
                    v[(i, p)] = vp * c + vq * g21;
                    v[(i, q)] = vp * s + vq * g22;
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        let g = &b.adjoint() * &b;
        return Err(LinalgError::NonConvergence {
            sweeps: MAX_SWEEPS,
            residual: offdiag_norm(&g),
        });
    }

    // singular values and left vectors from the rotated columns
    let mut sig: Vec<(f64, usize)> = (0..m)
        .map(|j| {
            let nrm = b.column(j).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            (nrm, j)
        })
        .collect();
    sig.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap());

    let tiny = 1e-14 * scale;
    let mut left = ComplexMatrix::zeros(n, n);
    let mut right_v = ComplexMatrix::zeros(m, m);
    let mut singulars = Vec::with_capacity(m);
    let mut filled = 0usize;
    for (rank, &(s, j)) in sig.iter().enumerate() {
        singulars.push(s);
        right_v.set_column(rank, &v.column(j));
        if s > tiny {
            let col: Vec<C64> = b.column(j).iter().map(|z| z / s).collect();
            left.set_column(rank, &col);
            filled = rank + 1;
        }
    }
    complete_orthonormal(&mut left, filled);

    Ok(SvdFactors {
        left,
        singulars,
        right: right_v.adjoint(),
    })
}

/// Fill columns `filled..n` with an orthonormal completion of the first
/// `filled` columns, using canonical basis vectors (deterministic).
fn complete_orthonormal(u: &mut ComplexMatrix, filled: usize) {
    let n = u.rows();
    let mut have = filled;
    let mut next_canonical = 0usize;
    while have < n {
        // pick the canonical vector with the largest residual
        let mut best: Option<(f64, Vec<C64>)> = None;
        for k in next_canonical..n {
            let mut x = vec![C64::new(0.0, 0.0); n];
            x[k] = C64::new(1.0, 0.0);
            for j in 0..have {
                let col = u.column(j);
                let inner: C64 = col.iter().zip(x.iter()).map(|(a, b)| a.conj() * b).sum();
                for i in 0..n {
                    x[i] -= inner * col[i];
                }
            }
            let nrm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if best.as_ref().map_or(true, |(bn, _)| nrm > *bn) {
                best = Some((nrm, x));
            }
            if nrm > 0.9 {
                break;
            }
        }
        let (_, mut x) = best.expect("orthonormal completion failed");
        // re-orthogonalize once more for stability
        for j in 0..have {
            let col = u.column(j);
            let inner: C64 = col.iter().zip(x.iter()).map(|(a, b)| a.conj() * b).sum();
            for i in 0..n {
                x[i] -= inner * col[i];
            }
        }
        let nrm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in &mut x {
            *z /= nrm;
        }
        u.set_column(have, &x);
        have += 1;
        next_canonical = 0;
    }
}

/// Operator (spectral) norm: the largest singular value.
pub fn op_norm(a: &ComplexMatrix) -> f64 {
    match svd(a) {
        Ok(f) => f.sigma_max(),
        Err(_) => f64::NAN,
    }
}

/// Polar decomposition `A = unitary * positive` with
/// `positive = (A*A)^{1/2}`. Requires `sigma_min > tol`.
pub fn polar(a: &ComplexMatrix, tol: f64) -> Result<(ComplexMatrix, ComplexMatrix), LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let f = svd(a)?;
    let smin = f.sigma_min();
    if smin <= tol {
        return Err(LinalgError::Singular { sigma_min: smin });
    }
    // A = L S R with R = V*; unitary = L R, positive = R* S R
    let unitary = &f.left * &f.right;
    let sd = ComplexMatrix::real_diag(&f.singulars);
    let positive = &(&f.right.adjoint() * &sd) * &f.right;
    Ok((unitary, positive))
}

/// Inverse through the SVD; errors on numerically singular input.
pub fn inverse(a: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let f = svd(a)?;
    let smin = f.sigma_min();
    if smin <= tol * f.sigma_max().max(1.0) {
        return Err(LinalgError::Singular { sigma_min: smin });
    }
    let inv_s = ComplexMatrix::real_diag(&f.singulars.iter().map(|s| 1.0 / s).collect::<Vec<_>>());
    // A^{-1} = R^{-1} S^{-1} L^{-1} = R* S^{-1} L*
    Ok(&(&f.right.adjoint() * &inv_s) * &f.left.adjoint())
}

/// PSD test: Hermitian within `tol` and min eigenvalue >= -tol.
pub fn is_psd(a: &ComplexMatrix, tol: f64) -> bool {
    if !a.is_square() || a.hermitian_defect() > tol {
        return false;
    }
    let sym = (&a.adjoint() + a).scale_re(0.5);
    match hermitian_eigen(&sym) {
        Ok((eigs, _)) => eigs.first().map_or(true, |&e| e >= -tol),
        Err(_) => false,
    }
}

/// Deterministic power-iteration estimate of the largest singular value of a
/// linear map given by matvec closures. Independent of [`svd`]; used as a
/// cross-check oracle and for operators too large to factorize densely.
pub fn power_norm_matvec(
    dim: usize,
    apply: impl Fn(&[C64]) -> Vec<C64>,
    apply_adjoint: impl Fn(&[C64]) -> Vec<C64>,
    max_iters: usize,
    rel_tol: f64,
) -> f64 {
    if dim == 0 {
        return 0.0;
    }
    // fixed pseudo-random start vector (linear congruential, seed-free determinism)
    let mut state = 0x9E3779B97F4A7C15u64;
    let mut x: Vec<C64> = (0..dim)
        .map(|_| {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let re = ((state >> 11) as f64) / (1u64 << 53) as f64 - 0.5;
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let im = ((state >> 11) as f64) / (1u64 << 53) as f64 - 0.5;
            C64::new(re, im)
        })
        .collect();
    let nrm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in &mut x {
        *z /= nrm;
    }
    let mut est = 0.0;
    for _ in 0..max_iters {
        // sigma estimate: ||A x|| with x normalized; refine x <- A*(Ax)/||..||
        let y = apply(&x);
        let ny = y.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if ny == 0.0 {
            return 0.0;
        }
        let z = apply_adjoint(&y);
        let nz = z.iter().map(|w| w.norm_sqr()).sum::<f64>().sqrt();
        if nz == 0.0 {
            return ny;
        }
        x = z.iter().map(|w| w / nz).collect();
        if (ny - est).abs() <= rel_tol * ny {
            return ny.max(est);
        }
        est = ny;
    }
    est
}

/// Power-iteration operator-norm estimate for a dense matrix.
pub fn power_norm_estimate(a: &ComplexMatrix, max_iters: usize, rel_tol: f64) -> f64 {
    if a.rows() == 0 || a.cols() == 0 {
        return 0.0;
    }
    power_norm_matvec(
        a.cols(),
        |x| a.matvec(x),
        |y| a.adjoint_matvec(y),
        max_iters,
        rel_tol,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{haar_unitary, seeded_rng, standard_complex_gaussian};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn svd_of_diagonal_is_trivial() {
        let a = ComplexMatrix::real_diag(&[3.0, 1.0]);
        let f = svd(&a).unwrap();
        assert!((f.singulars[0] - 3.0).abs() < 1e-14);
        assert!((f.singulars[1] - 1.0).abs() < 1e-14);
        assert!((&f.reassemble() - &a).max_abs() < 1e-14);
    }

    #[test]
    fn svd_of_unitary_has_unit_singulars() {
        let u = haar_unitary(5, 42).unwrap();
        let f = svd(&u).unwrap();
        for s in &f.singulars {
            assert!((s - 1.0).abs() < 1e-12, "singular value {} != 1", s);
        }
    }

    #[test]
    fn svd_reassembly_random_4x4() {
        // reassembly oracle: A = U S W within 1e-10 * ||A||
        let mut rng = seeded_rng(7);
        let a = standard_complex_gaussian(4, 4, &mut rng);
        let f = svd(&a).unwrap();
        let err = (&f.reassemble() - &a).max_abs();
        assert!(err <= 1e-10 * a.frobenius_norm(), "reassembly error {}", err);
        assert!(f.left.isometry_defect() < 1e-12);
        assert!(f.right.isometry_defect() < 1e-12);
        // descending order
        for w in f.singulars.windows(2) {
            assert!(w[0] >= w[1]);
        }
    }

    #[test]
    fn svd_wide_and_tall_full_factors() {
        let mut rng = seeded_rng(11);
        for (n, m) in [(3usize, 7usize), (7, 3), (5, 5)] {
            let a = standard_complex_gaussian(n, m, &mut rng);
            let f = svd(&a).unwrap();
            assert_eq!(f.left.rows(), n);
            assert_eq!(f.left.cols(), n);
            assert_eq!(f.right.rows(), m);
            assert_eq!(f.right.cols(), m);
            assert!(f.left.isometry_defect() < 1e-12);
            assert!(f.right.isometry_defect() < 1e-12);
            assert!((&f.reassemble() - &a).max_abs() < 1e-11 * a.frobenius_norm().max(1.0));
        }
    }

    #[test]
    fn svd_rank_deficient_completes_left_factor() {
        // rank-1 3x3
        let a = ComplexMatrix::from_fn(3, 3, |i, j| c((i + 1) as f64 * (j + 1) as f64, 0.0));
        let f = svd(&a).unwrap();
        assert!(f.left.isometry_defect() < 1e-12);
        assert!((&f.reassemble() - &a).max_abs() < 1e-12 * a.frobenius_norm());
        assert!(f.singulars[1].abs() < 1e-12);
    }

    #[test]
    fn polar_of_unitary_and_positive() {
        let u = haar_unitary(4, 3).unwrap();
        let (w, p) = polar(&u, 1e-10).unwrap();
        assert!((&w - &u).max_abs() < 1e-11);
        assert!((&p - &ComplexMatrix::identity(4)).max_abs() < 1e-11);

        let pd = ComplexMatrix::real_diag(&[2.0, 0.5, 1.0]);
        let (w2, p2) = polar(&pd, 1e-10).unwrap();
        assert!((&w2 - &ComplexMatrix::identity(3)).max_abs() < 1e-11);
        assert!((&p2 - &pd).max_abs() < 1e-11);
    }

    #[test]
    fn polar_frozen_example() {
        // direct (A*A)^{1/2} oracle: A = [[0,2],[1,0]], A*A = diag(1,4),
        // positive = diag(1,2), unitary = A * positive^{-1} = [[0,1],[1,0]]
        let a = ComplexMatrix::from_rows(vec![
            vec![c(0.0, 0.0), c(2.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 0.0)],
        ])
        .unwrap();
        let (u, p) = polar(&a, 1e-10).unwrap();
        let expect_p = ComplexMatrix::real_diag(&[1.0, 2.0]);
        let expect_u = ComplexMatrix::from_rows(vec![
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 0.0)],
        ])
        .unwrap();
        assert!((&p - &expect_p).max_abs() < 1e-12);
        assert!((&u - &expect_u).max_abs() < 1e-12);
    }

    #[test]
    fn polar_rejects_singular() {
        let a = ComplexMatrix::real_diag(&[1.0, 0.0]);
        match polar(&a, 1e-10) {
            Err(LinalgError::Singular { sigma_min }) => assert!(sigma_min < 1e-12),
            other => panic!("expected Singular, got {:?}", other.map(|_| ())),
        }
    }

    #[test]
    fn herm_eig_clusters_degenerate() {
        let a = ComplexMatrix::real_diag(&[1.0, 1.0, 2.0]);
        let e = herm_eig(&a, 1e-8).unwrap();
        assert_eq!(e.clusters.len(), 2);
        let r0 = e.clusters[0].1.trace().re;
        let r1 = e.clusters[1].1.trace().re;
        assert!((r0 - 2.0).abs() < 1e-12, "rank of first projector");
        assert!((r1 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn herm_eig_pauli_x() {
        let a = ComplexMatrix::from_rows(vec![
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 0.0)],
        ])
        .unwrap();
        let e = herm_eig(&a, 1e-8).unwrap();
        assert!((e.eigenvalues[0] + 1.0).abs() < 1e-14);
        assert!((e.eigenvalues[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn herm_eig_projector_algebra_random() {
        let mut rng = seeded_rng(23);
        let g = standard_complex_gaussian(5, 5, &mut rng);
        let a = (&g + &g.adjoint()).scale_re(0.5);
        let e = herm_eig(&a, 1e-8).unwrap();
        // reassembly oracle
        assert!((&e.reassemble() - &a).max_abs() <= 1e-10 * a.frobenius_norm());
        // projector algebra
        let n = a.rows();
        let mut sum = ComplexMatrix::zeros(n, n);
        for (i, (_, pi)) in e.clusters.iter().enumerate() {
            assert!(pi.hermitian_defect() < 1e-10);
            assert!((&(pi * pi) - pi).max_abs() < 1e-10, "idempotent");
            for (j, (_, pj)) in e.clusters.iter().enumerate() {
                if i != j {
                    assert!((pi * pj).max_abs() < 1e-10, "orthogonal");
                }
            }
            sum = &sum + pi;
        }
        assert!((&sum - &ComplexMatrix::identity(n)).max_abs() < 1e-10);
    }

    #[test]
    fn herm_eig_rejects_nonhermitian() {
        let a = ComplexMatrix::from_rows(vec![
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(2.0, 0.0), c(0.0, 0.0)],
        ])
        .unwrap();
        assert!(matches!(
            herm_eig(&a, 1e-8),
            Err(LinalgError::NotHermitian { .. })
        ));
    }

    #[test]
    fn op_norm_examples() {
        assert!((op_norm(&ComplexMatrix::identity(4)) - 1.0).abs() < 1e-13);
        let d = ComplexMatrix::real_diag(&[2.0, -3.0]);
        assert!((op_norm(&d) - 3.0).abs() < 1e-13);
        // power-iteration oracle
        let mut rng = seeded_rng(5);
        let a = standard_complex_gaussian(6, 6, &mut rng);
        let power = power_norm_estimate(&a, 5000, 1e-12);
        assert!(
            (op_norm(&a) - power).abs() < 1e-8 * power.max(1.0),
            "svd {} vs power {}",
            op_norm(&a),
            power
        );
    }

    #[test]
    fn is_psd_examples() {
        assert!(is_psd(&ComplexMatrix::identity(3), 1e-10));
        let a = ComplexMatrix::from_rows(vec![
            vec![c(1.0, 0.0), c(2.0, 0.0)],
            vec![c(2.0, 0.0), c(1.0, 0.0)],
        ])
        .unwrap();
        assert!(!is_psd(&a, 1e-10), "eigenvalue -1 present");
        // Gram construction oracle
        let mut rng = seeded_rng(9);
        let b = standard_complex_gaussian(4, 4, &mut rng);
        assert!(is_psd(&(&b.adjoint() * &b), 1e-10));
    }

    #[test]
    fn inverse_roundtrip() {
        let mut rng = seeded_rng(31);
        let a = standard_complex_gaussian(5, 5, &mut rng);
        let ainv = inverse(&a, 1e-12).unwrap();
        assert!((&(&a * &ainv) - &ComplexMatrix::identity(5)).max_abs() < 1e-10);
    }
}
