//! Unitary dilation of a strict contraction through a boundary-unitary
//! analytic matrix function `F(z) = U D(z) W` with Blaschke factors on the
//! diagonal, its truncated Hardy-space multiplication operator, and the
//! intertwining check `M_F* V = V T*`.

use crate::annulus::LambdaMap;
use crate::decomp::{op_norm, svd};
use crate::fourier;
use crate::matrix::{C64, ComplexMatrix, LinalgError};
use crate::TolerancePolicy;
use serde::Serialize;
use std::collections::BTreeMap;

/// Scalar analytic map placed on the diagonal of a frame factorization.
#[derive(Debug, Clone)]
pub enum ScalarMap {
    /// Disc automorphism `b(z) = (lambda - z)/(1 - lambda z)`, `0 <= lambda < 1`.
    Blaschke { lambda: f64 },
    /// Annulus-valued covering map `pi_lambda` with `pi_lambda(0) = lambda`.
    Annulus(LambdaMap),
}

impl ScalarMap {
    pub fn eval(&self, z: C64) -> Result<C64, LinalgError> {
        match self {
            ScalarMap::Blaschke { lambda } => {
                let l = C64::new(*lambda, 0.0);
                Ok((l - z) / (C64::new(1.0, 0.0) - l * z))
            }
            ScalarMap::Annulus(map) => map.eval(z),
        }
    }

    pub fn at_zero(&self) -> f64 {
        match self {
            ScalarMap::Blaschke { lambda } => *lambda,
            ScalarMap::Annulus(map) => map.lambda,
        }
    }
}

/// Blaschke factor `b_lambda`; requires `0 <= lambda < 1`.
pub fn blaschke(lambda: f64) -> Result<ScalarMap, LinalgError> {
    if !(0.0..1.0).contains(&lambda) {
        return Err(LinalgError::InvalidArgument(format!(
            "Blaschke parameter must lie in [0, 1), got {}",
            lambda
        )));
    }
    Ok(ScalarMap::Blaschke { lambda })
}

/// `F(z) = left_frame . diag(map_i(z)) . right_frame`.
#[derive(Debug, Clone)]
pub struct AnalyticMatrixFunction {
    pub left_frame: ComplexMatrix,
    pub diagonal_fns: Vec<ScalarMap>,
    pub right_frame: ComplexMatrix,
}

impl AnalyticMatrixFunction {
    pub fn dim(&self) -> usize {
        self.left_frame.rows()
    }

    pub fn eval(&self, z: C64) -> Result<ComplexMatrix, LinalgError> {
        let vals: Result<Vec<C64>, _> = self.diagonal_fns.iter().map(|f| f.eval(z)).collect();
        let d = ComplexMatrix::diag(&vals?);
        Ok(&(&self.left_frame * &d) * &self.right_frame)
    }

    pub fn at_zero(&self) -> ComplexMatrix {
        let d = ComplexMatrix::real_diag(
            &self.diagonal_fns.iter().map(|f| f.at_zero()).collect::<Vec<_>>(),
        );
        &(&self.left_frame * &d) * &self.right_frame
    }

    /// `F(z)^{-1} = right* diag(1/f_i(z)) left*`; valid because both frames
    /// are unitary in every construction here and the diagonal maps are
    /// zero-free wherever this is called.
    pub fn eval_inverse(&self, z: C64) -> Result<ComplexMatrix, LinalgError> {
        let vals: Result<Vec<C64>, _> = self.diagonal_fns.iter().map(|f| f.eval(z)).collect();
        let inv: Vec<C64> = vals?
            .into_iter()
            .map(|v| C64::new(1.0, 0.0) / v)
            .collect();
        let d = ComplexMatrix::diag(&inv);
        Ok(&(&self.right_frame.adjoint() * &d) * &self.left_frame.adjoint())
    }

    /// Max of `||F(zeta)*F(zeta) - I||_F` over `samples` boundary points.
    pub fn boundary_unitarity_defect(&self, samples: usize) -> Result<f64, LinalgError> {
        let mut worst: f64 = 0.0;
        for theta in fourier::offset_angles(samples) {
            let f = self.eval(C64::from_polar(1.0, theta))?;
            worst = worst.max(f.isometry_defect());
        }
        Ok(worst)
    }
}

/// Nelson's construction: `F(z) = U D(z) W` from the SVD `T = U D W`,
/// with `D(z)` the diagonal of Blaschke factors at the singular values.
/// Requires `||T|| < 1 - 1e-8`.
pub fn nelson_disc(t: &ComplexMatrix) -> Result<AnalyticMatrixFunction, LinalgError> {
    if !t.is_square() {
        return Err(LinalgError::NotSquare {
            rows: t.rows(),
            cols: t.cols(),
        });
    }
    let norm = op_norm(t);
    if !(norm < 1.0 - 1e-8) {
        return Err(LinalgError::InvalidArgument(format!(
            "nelson_disc needs a strict contraction, ||T|| = {}",
            norm
        )));
    }
    let f = svd(t)?;
    let maps: Result<Vec<ScalarMap>, _> = f.singulars.iter().map(|&s| blaschke(s)).collect();
    Ok(AnalyticMatrixFunction {
        left_frame: f.left,
        diagonal_fns: maps?,
        right_frame: f.right,
    })
}

/// Taylor coefficients `c_0..c_K` of an analytic matrix function by
/// quadrature on the circle `|z| = rho` with `M` points (`M >= 4K`).
pub fn taylor_coeffs(
    f: &AnalyticMatrixFunction,
    k_max: usize,
    rho: f64,
    m: usize,
) -> Result<Vec<ComplexMatrix>, LinalgError> {
    if !(0.0 < rho && rho < 1.0) {
        return Err(LinalgError::InvalidArgument(format!("rho must be in (0,1), got {}", rho)));
    }
    if m < 4 * k_max.max(1) {
        return Err(LinalgError::InvalidArgument(format!(
            "need M >= 4K, got M = {}, K = {}",
            m, k_max
        )));
    }
    let samples: Result<Vec<ComplexMatrix>, _> = fourier::offset_circle(rho, m)
        .into_iter()
        .map(|z| f.eval(z))
        .collect();
    Ok(fourier::matrix_coeffs(&samples?, rho, 0, k_max as i64))
}

/// Finite block-Toeplitz/Laurent section of a multiplication operator.
/// Mode j of the underlying function space is hosted by block row/column
/// `j - n_lo`; `block(j,k) = coeff(j-k)` (missing coefficients are zero).
#[derive(Debug, Clone)]
pub struct TruncatedMultiplier {
    pub n_lo: i64,
    pub n_hi: i64,
    pub block_coeffs: BTreeMap<i64, ComplexMatrix>,
    pub block_dim: usize,
    /// Mode hosting the copy of the constants (always 0 here).
    pub embed_index: i64,
}

impl TruncatedMultiplier {
    pub fn modes(&self) -> i64 {
        self.n_hi - self.n_lo + 1
    }

    pub fn total_dim(&self) -> usize {
        (self.modes() as usize) * self.block_dim
    }

    pub fn coeff(&self, k: i64) -> ComplexMatrix {
        self.block_coeffs
            .get(&k)
            .cloned()
            .unwrap_or_else(|| ComplexMatrix::zeros(self.block_dim, self.block_dim))
    }

    /// Dense block-Toeplitz assembly.
    pub fn assemble(&self) -> ComplexMatrix {
        let modes = self.modes() as usize;
        let n = self.block_dim;
        let mut out = ComplexMatrix::zeros(modes * n, modes * n);
        for jr in 0..modes {
            for kc in 0..modes {
                let lag = jr as i64 - kc as i64;
                if let Some(c) = self.block_coeffs.get(&lag) {
                    out.set_block(jr * n, kc * n, c);
                }
            }
        }
        out
    }

    /// Isometric embedding of C^n at the mode `embed_index`.
    pub fn embedding(&self) -> ComplexMatrix {
        let modes = self.modes() as usize;
        let n = self.block_dim;
        let offset = (self.embed_index - self.n_lo) as usize;
        let mut v = ComplexMatrix::zeros(modes * n, n);
        for i in 0..n {
            v[(offset * n + i, i)] = C64::new(1.0, 0.0);
        }
        v
    }

    /// `M* V` computed blockwise: block j equals `coeff(-j)*` at mode j.
    pub fn adjoint_times_embedding(&self) -> ComplexMatrix {
        let modes = self.modes() as usize;
        let n = self.block_dim;
        let mut out = ComplexMatrix::zeros(modes * n, n);
        for jr in 0..modes {
            let mode = self.n_lo + jr as i64;
            let lag = self.embed_index - mode;
            if let Some(c) = self.block_coeffs.get(&lag) {
                out.set_block(jr * n, 0, &c.adjoint());
            }
        }
        out
    }
}

/// Assembles the analytic (lower-triangular) Toeplitz section on modes 0..N.
pub fn hardy_multiplier(
    f: &AnalyticMatrixFunction,
    n_modes: usize,
    rho: f64,
    m: usize,
) -> Result<TruncatedMultiplier, LinalgError> {
    let coeffs = taylor_coeffs(f, n_modes, rho, m)?;
    let block_coeffs: BTreeMap<i64, ComplexMatrix> = coeffs
        .into_iter()
        .enumerate()
        .map(|(k, c)| (k as i64, c))
        .collect();
    Ok(TruncatedMultiplier {
        n_lo: 0,
        n_hi: n_modes as i64,
        block_coeffs,
        block_dim: f.dim(),
        embed_index: 0,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SznagyReport {
    pub dim: usize,
    pub modes: usize,
    pub f0_error: f64,
    pub boundary_unitarity_defect: f64,
    /// `||M_F* V - V T*||`
    pub intertwining_residual: f64,
    /// `||(M_F* M_F - I)`restricted to modes `0..low_modes`
    pub low_mode_isometry_defect: f64,
    pub low_modes: usize,
    pub passed: bool,
}

/// Runs the disc dilation pipeline and verifies the lift identities.
pub fn verify_sznagy(
    t: &ComplexMatrix,
    n_modes: usize,
    policy: &TolerancePolicy,
) -> Result<SznagyReport, LinalgError> {
    let m = (4 * (n_modes + 1)).max(512);
    let f = nelson_disc(t)?;
    let f0_error = (&f.at_zero() - t).max_abs();
    let boundary = f.boundary_unitarity_defect(64)?;
    let mult = hardy_multiplier(&f, n_modes, 0.9, m)?;
    // M_F* V - V T*: only the mode-0 block is nonzero, so compare c_0* to T*.
    let mfv = mult.adjoint_times_embedding();
    let n = t.rows();
    let mut vt = ComplexMatrix::zeros(mult.total_dim(), n);
    vt.set_block(0, 0, &t.adjoint());
    let intertwining = op_norm(&(&mfv - &vt));

    // near-isometry on low modes: leakage is confined to the top modes where
    // the coefficient tail was cut. Pick the largest restriction whose
    // tail-sum bound stays under the quadrature tolerance.
    let norms: Vec<f64> = (0..=n_modes as i64).map(|k| op_norm(&mult.coeff(k))).collect();
    let total: f64 = norms.iter().sum();
    let mut tail = 0.0;
    let mut low_modes = 0usize;
    for l in 1..=(n_modes + 1) {
        tail += norms[n_modes + 1 - l];
        if tail * total * (l as f64) > 0.5 * policy.quadrature_tol {
            break;
        }
        low_modes = l;
    }
    let gram_defect = low_mode_isometry_defect(&mult, low_modes);

    let passed = f0_error <= 1e-12
        && boundary <= 1e-10
        && intertwining <= policy.quadrature_tol.max(1e-8);
    Ok(SznagyReport {
        dim: n,
        modes: n_modes,
        f0_error,
        boundary_unitarity_defect: boundary,
        intertwining_residual: intertwining,
        low_mode_isometry_defect: gram_defect,
        low_modes,
        passed,
    })
}

/// `|| (M* M - I) `restricted to the first `low_modes` block rows/cols.
pub fn low_mode_isometry_defect(mult: &TruncatedMultiplier, low_modes: usize) -> f64 {
    if low_modes == 0 {
        return 0.0;
    }
    let n = mult.block_dim;
    let modes = mult.modes() as usize;
    let low = low_modes.min(modes);
    let mut defect = ComplexMatrix::zeros(low * n, low * n);
    for a in 0..low {
        for b in 0..low {
            // sum over retained output modes m: coeff(m-a)* coeff(m-b)
            let mut g = ComplexMatrix::zeros(n, n);
            for mm in 0..modes {
                let ca = mult.coeff(mm as i64 + mult.n_lo - (a as i64 + mult.n_lo));
                let cb = mult.coeff(mm as i64 + mult.n_lo - (b as i64 + mult.n_lo));
                g = &g + &(&ca.adjoint() * &cb);
            }
            if a == b {
                g = &g - &ComplexMatrix::identity(n);
            }
            defect.set_block(a * n, b * n, &g);
        }
    }
    op_norm(&defect)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::random_contraction;

    #[test]
    fn blaschke_examples() {
        // b_0(z) = -z
        let b0 = blaschke(0.0).unwrap();
        let z = C64::new(0.3, -0.4);
        assert!((b0.eval(z).unwrap() + z).norm() < 1e-15);
        // b_lambda(lambda) = 0
        let bl = blaschke(0.6).unwrap();
        assert!(bl.eval(C64::new(0.6, 0.0)).unwrap().norm() < 1e-15);
        // |b(e^{i})| = 1
        let b3 = blaschke(0.3).unwrap();
        let on_circle = b3.eval(C64::from_polar(1.0, 1.0)).unwrap();
        assert!((on_circle.norm() - 1.0).abs() < 1e-14);
        assert!(blaschke(1.0).is_err());
    }

    #[test]
    fn nelson_disc_zero_matrix() {
        // T = 0: F(z) = -z UW, a modulus-1 scalar times a unitary
        let t = ComplexMatrix::zeros(3, 3);
        let f = nelson_disc(&t).unwrap();
        assert!(f.at_zero().max_abs() < 1e-14);
        let z = C64::new(0.5, 0.2);
        let fz = f.eval(z).unwrap();
        // F(z)/(-z) should be unitary
        let u = fz.scale(C64::new(-1.0, 0.0) / z);
        assert!(u.isometry_defect() < 1e-12);
    }

    #[test]
    fn nelson_disc_scalar() {
        let t = ComplexMatrix::real_diag(&[0.55]);
        let f = nelson_disc(&t).unwrap();
        assert!((f.at_zero()[(0, 0)] - C64::new(0.55, 0.0)).norm() < 1e-13);
        let b = f.eval(C64::from_polar(1.0, 0.7)).unwrap();
        assert!((b[(0, 0)].norm() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn nelson_disc_random_3x3() {
        let t = random_contraction(3, 0.2, 0.8, 17).unwrap();
        let f = nelson_disc(&t).unwrap();
        assert!((&f.at_zero() - &t).max_abs() <= 1e-12);
        assert!(f.boundary_unitarity_defect(64).unwrap() <= 1e-10);
        // contractivity at 200 interior points (maximum principle)
        use rand::Rng;
        let mut rng = crate::random::seeded_rng(18);
        for _ in 0..200 {
            let z = C64::from_polar(rng.gen_range(0.0..0.999), rng.gen_range(0.0..6.283));
            assert!(op_norm(&f.eval(z).unwrap()) <= 1.0 + 1e-10);
        }
    }

    #[test]
    fn nelson_disc_rejects_non_contraction() {
        let t = ComplexMatrix::identity(2);
        assert!(nelson_disc(&t).is_err());
    }

    #[test]
    fn taylor_coeffs_examples() {
        // F = b_0 (scalar -z): c_1 = -1, others tiny
        let f = AnalyticMatrixFunction {
            left_frame: ComplexMatrix::identity(1),
            diagonal_fns: vec![blaschke(0.0).unwrap()],
            right_frame: ComplexMatrix::identity(1),
        };
        let c = taylor_coeffs(&f, 4, 0.8, 64).unwrap();
        assert!(c[0].max_abs() < 1e-12);
        assert!((c[1][(0, 0)] + C64::new(1.0, 0.0)).norm() < 1e-12);
        assert!(c[2].max_abs() < 1e-12);
        // c_0 = F(0) = lambda for a Blaschke factor
        let fl = AnalyticMatrixFunction {
            left_frame: ComplexMatrix::identity(1),
            diagonal_fns: vec![blaschke(0.37).unwrap()],
            right_frame: ComplexMatrix::identity(1),
        };
        let cl = taylor_coeffs(&fl, 4, 0.8, 64).unwrap();
        assert!((cl[0][(0, 0)] - C64::new(0.37, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn taylor_coeffs_grid_refinement() {
        let t = random_contraction(3, 0.3, 0.8, 29).unwrap();
        let f = nelson_disc(&t).unwrap();
        let c1 = taylor_coeffs(&f, 16, 0.9, 256).unwrap();
        let c2 = taylor_coeffs(&f, 16, 0.9, 1024).unwrap();
        for (a, b) in c1.iter().zip(c2.iter()) {
            assert!((a - b).max_abs() <= 1e-10);
        }
    }

    #[test]
    fn hardy_multiplier_structure() {
        let fz = AnalyticMatrixFunction {
            left_frame: ComplexMatrix::identity(2).scale_re(-1.0),
            diagonal_fns: vec![blaschke(0.0).unwrap(), blaschke(0.0).unwrap()],
            right_frame: ComplexMatrix::identity(2),
        };
        // F = z I (since -1 * (-z) = z)
        let mult = hardy_multiplier(&fz, 4, 0.8, 64).unwrap();
        let a = mult.assemble();
        // block subdiagonal shift: block(j+1, j) = I
        for j in 0..4usize {
            let blk = a.block((j + 1) * 2, j * 2, 2, 2);
            assert!((&blk - &ComplexMatrix::identity(2)).max_abs() < 1e-12);
        }
        assert!(a.block(0, 2, 2, 2).max_abs() < 1e-12, "upper blocks vanish");

        // constant symbol: block diagonal section
        let u = crate::random::haar_unitary(2, 4).unwrap();
        let mut coeffs = BTreeMap::new();
        coeffs.insert(0i64, u.clone());
        let const_mult = TruncatedMultiplier {
            n_lo: 0,
            n_hi: 3,
            block_coeffs: coeffs,
            block_dim: 2,
            embed_index: 0,
        };
        let ca = const_mult.assemble();
        for j in 0..4usize {
            assert!((&ca.block(j * 2, j * 2, 2, 2) - &u).max_abs() < 1e-15);
            if j > 0 {
                assert!(ca.block(j * 2, 0, 2, 2).max_abs() < 1e-15);
            }
        }
    }

    #[test]
    fn verify_sznagy_examples() {
        let policy = TolerancePolicy::default();
        // T = 0
        let rep0 = verify_sznagy(&ComplexMatrix::zeros(2, 2), 16, &policy).unwrap();
        assert!(rep0.passed, "{:?}", rep0);
        // scalar
        let reps = verify_sznagy(&ComplexMatrix::real_diag(&[0.41]), 16, &policy).unwrap();
        assert!(reps.passed);
        // random 4x4 contraction at N = 64
        let t = random_contraction(4, 0.2, 0.75, 55).unwrap();
        let rep = verify_sznagy(&t, 64, &policy).unwrap();
        assert!(rep.f0_error <= 1e-12);
        assert!(rep.boundary_unitarity_defect <= 1e-10);
        assert!(rep.intertwining_residual <= 1e-8, "residual {}", rep.intertwining_residual);
    }

    #[test]
    fn low_mode_isometry_leakage_confined_to_top() {
        let policy = TolerancePolicy::default();
        let t = random_contraction(3, 0.3, 0.7, 66).unwrap();
        let f = nelson_disc(&t).unwrap();
        let mult = hardy_multiplier(&f, 64, 0.9, 512).unwrap();
        // ||T|| <= 0.7 so coefficients decay ~ 0.7^k; modes up to N-55 are clean
        let defect = low_mode_isometry_defect(&mult, 10);
        assert!(defect <= 1e-8, "low-mode defect {}", defect);
        let _ = policy;
    }
}
