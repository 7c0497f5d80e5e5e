//! Seeded sampling. All randomness in the crate flows through ChaCha8 keyed
//! by a caller-owned `u64` seed, so every construction is reproducible across
//! platforms and runs.

use crate::decomp;
use crate::matrix::{C64, ComplexMatrix, LinalgError};
use crate::membership::AnnulusParam;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub type SeededRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// i.i.d. standard complex Gaussian entries (Ginibre ensemble).
pub fn standard_complex_gaussian(rows: usize, cols: usize, rng: &mut SeededRng) -> ComplexMatrix {
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re * inv_sqrt2, im * inv_sqrt2)
    })
}

/// Haar-distributed unitary: QR of a seeded complex Gaussian by modified
/// Gram-Schmidt, with the triangular factor's diagonal phases absorbed into
/// the orthonormal columns.
pub fn haar_unitary(n: usize, seed: u64) -> Result<ComplexMatrix, LinalgError> {
    if n == 0 {
        return Err(LinalgError::InvalidArgument("haar_unitary needs n >= 1".into()));
    }
    let mut rng = seeded_rng(seed);
    haar_unitary_with(n, &mut rng)
}

pub fn haar_unitary_with(n: usize, rng: &mut SeededRng) -> Result<ComplexMatrix, LinalgError> {
    let a = standard_complex_gaussian(n, n, rng);
    let mut q = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        let mut v = a.column(j);
        // two Gram-Schmidt passes
        for _ in 0..2 {
            for k in 0..j {
                let col = q.column(k);
                let inner: C64 = col.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
                for i in 0..n {
                    v[i] -= inner * col[i];
                }
            }
        }
        // r_jj before normalization: projection of the original column onto v
        let nrm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if nrm < 1e-200 {
            return Err(LinalgError::Singular { sigma_min: nrm });
        }
        for z in &mut v {
            *z /= nrm;
        }
        // phase fix: make the implicit r_jj = <v, a_j> real positive
        let aj = a.column(j);
        let rjj: C64 = v.iter().zip(aj.iter()).map(|(u, b)| u.conj() * b).sum();
        let phase = rjj / rjj.norm();
        for z in &mut v {
            *z *= phase;
        }
        q.set_column(j, &v);
    }
    Ok(q)
}

/// Random invertible strict contraction: Haar frames around singular values
/// drawn uniformly from `[lo, hi]` with `0 < lo <= hi < 1`.
pub fn random_contraction(
    n: usize,
    lo: f64,
    hi: f64,
    seed: u64,
) -> Result<ComplexMatrix, LinalgError> {
    if !(0.0 < lo && lo <= hi && hi < 1.0) {
        return Err(LinalgError::InvalidArgument(format!(
            "need 0 < lo <= hi < 1, got [{}, {}]",
            lo, hi
        )));
    }
    let mut rng = seeded_rng(seed);
    let u = haar_unitary_with(n, &mut rng)?;
    let w = haar_unitary_with(n, &mut rng)?;
    let s: Vec<f64> = (0..n).map(|_| rng.gen_range(lo..=hi)).collect();
    Ok(&(&u * &ComplexMatrix::real_diag(&s)) * &w)
}

/// Random member of the quantum annulus: singular values in
/// `[r + margin, 1/r - margin]`.
pub fn random_qa_member(
    n: usize,
    param: &AnnulusParam,
    margin: f64,
    seed: u64,
) -> Result<ComplexMatrix, LinalgError> {
    let lo = param.r + margin;
    let hi = 1.0 / param.r - margin;
    if lo >= hi {
        return Err(LinalgError::InvalidArgument(format!(
            "margin {} too large for r = {}",
            margin, param.r
        )));
    }
    let mut rng = seeded_rng(seed);
    let u = haar_unitary_with(n, &mut rng)?;
    let w = haar_unitary_with(n, &mut rng)?;
    let s: Vec<f64> = (0..n).map(|_| rng.gen_range(lo..=hi)).collect();
    Ok(&(&u * &ComplexMatrix::real_diag(&s)) * &w)
}

/// Random element of the dilation boundary: `U diag(r I_p, r^{-1} I_{n-p})`.
pub fn random_script_qa(
    n: usize,
    p: usize,
    param: &AnnulusParam,
    seed: u64,
) -> Result<ComplexMatrix, LinalgError> {
    if p > n {
        return Err(LinalgError::InvalidArgument(format!("p = {} > n = {}", p, n)));
    }
    let u = haar_unitary(n, seed)?;
    let mut d = vec![param.r; p];
    d.extend(vec![1.0 / param.r; n - p]);
    Ok(&u * &ComplexMatrix::real_diag(&d))
}

/// Isometric embedding of C^k into C^n (k <= n) with Haar-random range:
/// the first k columns of a Haar unitary.
pub fn random_isometry(n: usize, k: usize, seed: u64) -> Result<ComplexMatrix, LinalgError> {
    if k > n {
        return Err(LinalgError::InvalidArgument(format!("k = {} > n = {}", k, n)));
    }
    let u = haar_unitary(n, seed)?;
    Ok(u.block(0, 0, n, k))
}

/// Sanity helper used by tests: `||U*U - I||`.
pub fn unitarity_defect(u: &ComplexMatrix) -> f64 {
    decomp::op_norm(&(&(&u.adjoint() * u) - &ComplexMatrix::identity(u.cols())))
}
