//! Isometric lift of a tuple of doubly commuting invertible strict
//! contractions: polar factors `T_j = U_j D_j`, simultaneous spectral
//! clustering of the commuting positive parts, Blaschke interpolation
//! `D_j(z) = sum_a b_{j,a}(z) P_a`, and the pointwise double-commutation,
//! boundary-unitarity and intertwining checks for `F_j(z) = U_j D_j(z)`.

use crate::decomp::{herm_eig, op_norm, polar, HermEig};
use crate::disc::{blaschke, hardy_multiplier, AnalyticMatrixFunction, ScalarMap};
use crate::matrix::{C64, ComplexMatrix, LinalgError};
use crate::random::{haar_unitary_with, seeded_rng};
use crate::TolerancePolicy;
use rand::Rng;
use serde::Serialize;

/// Internal seed for the random linear combination used to split joint
/// eigenspaces; fixed so the construction is a pure function of its inputs.
const COMBO_SEED: u64 = 0x5EED_C0DE;

#[derive(Debug, Clone, Serialize)]
pub struct DcLiftReport {
    pub tuple_len: usize,
    pub dim: usize,
    pub joint_clusters: usize,
    /// max over j of the a-posteriori reassembly `||D_j - sum_a lam_{j,a} P_a||`.
    pub joint_reassembly_defect: f64,
    /// max over sampled (z, w), j != k of `||F_j(z) F_k(w) - F_k(w) F_j(z)||`
    /// and the starred variant.
    pub double_commutation_defect: f64,
    pub boundary_unitarity_defect: f64,
    /// max over j of `||M_j* V - V T_j*||` through the Hardy truncation.
    pub intertwining_residual: f64,
    pub passed: bool,
}

/// The constructed lift data.
pub struct DcLift {
    pub unitaries: Vec<ComplexMatrix>,
    pub positives: Vec<ComplexMatrix>,
    pub joint_projectors: Vec<ComplexMatrix>,
    /// `lambdas[j][a]` = eigenvalue of `D_j` on joint cluster `a`.
    pub lambdas: Vec<Vec<f64>>,
    pub fs: Vec<DcFunction>,
    pub dim: usize,
}

/// `F_j(z) = U_j . sum_a b_{j,a}(z) P_a` (not a frame-diagonal form, since the
/// joint projectors need not be rank one).
pub struct DcFunction {
    pub unitary: ComplexMatrix,
    pub maps: Vec<ScalarMap>,
    pub projectors: Vec<ComplexMatrix>,
}

impl DcFunction {
    pub fn eval(&self, z: C64) -> Result<ComplexMatrix, LinalgError> {
        let n = self.unitary.rows();
        let mut d = ComplexMatrix::zeros(n, n);
        for (map, p) in self.maps.iter().zip(self.projectors.iter()) {
            d = &d + &p.scale(map.eval(z)?);
        }
        Ok(&self.unitary * &d)
    }

    pub fn at_zero(&self) -> ComplexMatrix {
        let n = self.unitary.rows();
        let mut d = ComplexMatrix::zeros(n, n);
        for (map, p) in self.maps.iter().zip(self.projectors.iter()) {
            d = &d + &p.scale_re(map.at_zero());
        }
        &self.unitary * &d
    }

    /// View as an [`AnalyticMatrixFunction`] by diagonalizing in the joint
    /// eigenbasis: columns grouped per cluster.
    pub fn to_frame_form(&self, basis: &HermEig) -> AnalyticMatrixFunction {
        let mut maps = Vec::new();
        for (range, map) in basis.cluster_ranges.iter().zip(self.maps.iter()) {
            for _ in range.clone() {
                maps.push(map.clone());
            }
        }
        AnalyticMatrixFunction {
            left_frame: &self.unitary * &basis.basis,
            diagonal_fns: maps,
            right_frame: basis.basis.adjoint(),
        }
    }
}

/// Worst commutator norms `(plain, starred)` over all pairs.
pub fn commutation_defects(ts: &[ComplexMatrix]) -> (f64, f64) {
    let mut plain: f64 = 0.0;
    let mut starred: f64 = 0.0;
    for j in 0..ts.len() {
        for k in 0..ts.len() {
            if j == k {
                continue;
            }
            plain = plain.max(op_norm(&(&(&ts[j] * &ts[k]) - &(&ts[k] * &ts[j]))));
            starred = starred.max(op_norm(
                &(&(&ts[j].adjoint() * &ts[k]) - &(&ts[k] * &ts[j].adjoint())),
            ));
        }
    }
    (plain, starred)
}

fn joint_basis(positives: &[ComplexMatrix], policy: &TolerancePolicy) -> Result<HermEig, LinalgError> {
    let n = positives[0].rows();
    let mut rng = seeded_rng(COMBO_SEED);
    let mut combo = ComplexMatrix::zeros(n, n);
    for p in positives.iter() {
        let c: f64 = rng.gen_range(0.5..1.5);
        combo = &combo + &p.scale_re(c);
    }
    herm_eig(&combo, policy.cluster_tol)
}

/// Builds the lift functions for a doubly commuting tuple.
pub fn build_dc_lift(ts: &[ComplexMatrix], policy: &TolerancePolicy) -> Result<DcLift, LinalgError> {
    let d = ts.len();
    if d == 0 {
        return Err(LinalgError::InvalidArgument("need at least one operator".into()));
    }
    let n = ts[0].rows();
    for t in ts {
        if !t.is_square() || t.rows() != n {
            return Err(LinalgError::ShapeMismatch(
                "tuple entries must be square of equal size".into(),
            ));
        }
        let norm = op_norm(t);
        if !(norm < 1.0 - 1e-8) {
            return Err(LinalgError::InvalidArgument(format!(
                "each T_j must be a strict contraction, got norm {}",
                norm
            )));
        }
    }
    let (plain, starred) = commutation_defects(ts);
    let tol = policy.algebraic_tol.max(1e-10);
    if plain > tol || starred > tol {
        return Err(LinalgError::InvalidArgument(format!(
            "tuple is not doubly commuting: ||[T_j,T_k]|| = {:.3e}, ||[T_j*,T_k]|| = {:.3e}",
            plain, starred
        )));
    }

    let mut unitaries = Vec::with_capacity(d);
    let mut positives = Vec::with_capacity(d);
    for t in ts {
        let (u, p) = polar(t, 1e-12)?;
        unitaries.push(u);
        positives.push(p);
    }

    // joint spectral clustering through a seeded generic combination
    let eig = joint_basis(&positives, policy)?;

    let mut lambdas: Vec<Vec<f64>> = vec![Vec::new(); d];
    for (_, proj) in &eig.clusters {
        let rank = proj.trace().re;
        for (j, dj) in positives.iter().enumerate() {
            let lam = (dj * proj).trace().re / rank;
            lambdas[j].push(lam);
        }
    }
    // a-posteriori reassembly check catches unlucky combinations
    let mut reassembly: f64 = 0.0;
    for (j, dj) in positives.iter().enumerate() {
        let mut acc = ComplexMatrix::zeros(n, n);
        for (a, (_, proj)) in eig.clusters.iter().enumerate() {
            acc = &acc + &proj.scale_re(lambdas[j][a]);
        }
        reassembly = reassembly.max(op_norm(&(&acc - dj)));
    }
    if reassembly > 100.0 * policy.cluster_tol {
        return Err(LinalgError::InvalidArgument(format!(
            "joint diagonalization failed: reassembly defect {:.3e}",
            reassembly
        )));
    }

    let joint_projectors: Vec<ComplexMatrix> =
        eig.clusters.iter().map(|(_, p)| p.clone()).collect();
    let mut fs = Vec::with_capacity(d);
    for j in 0..d {
        let maps: Result<Vec<_>, _> = lambdas[j]
            .iter()
            .map(|&lam| blaschke(lam.clamp(0.0, 1.0 - 1e-12)))
            .collect();
        fs.push(DcFunction {
            unitary: unitaries[j].clone(),
            maps: maps?,
            projectors: joint_projectors.clone(),
        });
    }
    Ok(DcLift {
        unitaries,
        positives,
        joint_projectors,
        lambdas,
        fs,
        dim: n,
    })
}

/// Full pipeline: build the lift and verify its identities.
pub fn nelson_doubly_commuting(
    ts: &[ComplexMatrix],
    n_modes: usize,
    policy: &TolerancePolicy,
) -> Result<DcLiftReport, LinalgError> {
    let lift = build_dc_lift(ts, policy)?;
    let d = ts.len();
    let n = lift.dim;

    let mut reassembly: f64 = 0.0;
    for (j, dj) in lift.positives.iter().enumerate() {
        let mut acc = ComplexMatrix::zeros(n, n);
        for (a, proj) in lift.joint_projectors.iter().enumerate() {
            acc = &acc + &proj.scale_re(lift.lambdas[j][a]);
        }
        reassembly = reassembly.max(op_norm(&(&acc - dj)));
    }

    // pointwise double commutation at 20 seeded interior pairs
    let mut rng = seeded_rng(COMBO_SEED ^ 0xABCD);
    let mut commutation: f64 = 0.0;
    for _ in 0..20 {
        let z = C64::from_polar(rng.gen_range(0.0..0.98), rng.gen_range(0.0..6.2831853));
        let w = C64::from_polar(rng.gen_range(0.0..0.98), rng.gen_range(0.0..6.2831853));
        for j in 0..d {
            for k in 0..d {
                if j == k {
                    continue;
                }
                let fj = lift.fs[j].eval(z)?;
                let fk = lift.fs[k].eval(w)?;
                commutation = commutation.max(op_norm(&(&(&fj * &fk) - &(&fk * &fj))));
                commutation =
                    commutation.max(op_norm(&(&(&fj.adjoint() * &fk) - &(&fk * &fj.adjoint()))));
            }
        }
    }

    // boundary unitarity of each F_j
    let mut boundary: f64 = 0.0;
    for f in &lift.fs {
        for theta in crate::fourier::offset_angles(64) {
            let v = f.eval(C64::from_polar(1.0, theta))?;
            boundary = boundary.max(v.isometry_defect());
        }
    }

    // intertwining through the Hardy truncation: M_j* V = V T_j*
    let basis = joint_basis(&lift.positives, policy)?;
    let m_quad = (4 * (n_modes + 1)).max(512);
    let mut intertwining: f64 = 0.0;
    for (j, t) in ts.iter().enumerate() {
        let frame = lift.fs[j].to_frame_form(&basis);
        let mult = hardy_multiplier(&frame, n_modes, 0.9, m_quad)?;
        intertwining = intertwining.max(op_norm(&(&mult.coeff(0) - t)));
    }

    let passed = reassembly <= 100.0 * policy.cluster_tol
        && commutation <= 1e-12_f64.max(policy.algebraic_tol)
        && boundary <= 1e-10
        && intertwining <= policy.quadrature_tol.max(1e-8);
    Ok(DcLiftReport {
        tuple_len: d,
        dim: n,
        joint_clusters: lift.joint_projectors.len(),
        joint_reassembly_defect: reassembly,
        double_commutation_defect: commutation,
        boundary_unitarity_defect: boundary,
        intertwining_residual: intertwining,
        passed,
    })
}

/// Tensor-product generator of doubly commuting tuples:
/// `T_1 = A (x) I, T_2 = I (x) B, ...` with random invertible strict
/// contractions on each factor. `dims` gives the factor dimensions.
pub fn gen_doubly_commuting(seed: u64, dims: &[usize]) -> Result<Vec<ComplexMatrix>, LinalgError> {
    if dims.is_empty() {
        return Err(LinalgError::InvalidArgument("dims must be nonempty".into()));
    }
    let mut rng = seeded_rng(seed);
    let mut factors = Vec::with_capacity(dims.len());
    for &nj in dims {
        let u = haar_unitary_with(nj, &mut rng)?;
        let w = haar_unitary_with(nj, &mut rng)?;
        let s: Vec<f64> = (0..nj).map(|_| rng.gen_range(0.25..0.85)).collect();
        factors.push(&(&u * &ComplexMatrix::real_diag(&s)) * &w);
    }
    if dims.len() == 1 {
        return Ok(factors);
    }
    let total: usize = dims.iter().product();
    let mut out = Vec::with_capacity(dims.len());
    for (j, a) in factors.iter().enumerate() {
        let before: usize = dims[..j].iter().product();
        let after: usize = dims[j + 1..].iter().product();
        let m = ComplexMatrix::identity(before)
            .kron(a)
            .kron(&ComplexMatrix::identity(after));
        debug_assert_eq!(m.rows(), total);
        out.push(m);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::random_contraction;

    #[test]
    fn d1_reduces_to_sznagy_on_invertible_input() {
        let policy = TolerancePolicy::default();
        let t = random_contraction(3, 0.3, 0.8, 91).unwrap();
        let rep = nelson_doubly_commuting(&[t.clone()], 32, &policy).unwrap();
        assert!(rep.passed, "{:?}", rep);
        let direct = crate::disc::verify_sznagy(&t, 32, &policy).unwrap();
        assert!(rep.intertwining_residual <= 1e-8);
        assert!(direct.intertwining_residual <= 1e-8);
    }

    #[test]
    fn tensor_pair_passes_all_checks() {
        let policy = TolerancePolicy::default();
        let ts = gen_doubly_commuting(7, &[2, 3]).unwrap();
        assert_eq!(ts.len(), 2);
        assert_eq!(ts[0].rows(), 6);
        let rep = nelson_doubly_commuting(&ts, 24, &policy).unwrap();
        assert!(rep.passed, "{:?}", rep);
        assert!(rep.double_commutation_defect <= 1e-12);
        assert!(rep.boundary_unitarity_defect <= 1e-10);
    }

    #[test]
    fn generator_is_deterministic() {
        let a = gen_doubly_commuting(3, &[2, 2]).unwrap();
        let b = gen_doubly_commuting(3, &[2, 2]).unwrap();
        for (x, y) in a.iter().zip(b.iter()) {
            assert!((x - y).max_abs() == 0.0);
        }
        let c = gen_doubly_commuting(4, &[2, 2]).unwrap();
        assert!((&a[0] - &c[0]).max_abs() > 1e-6);
    }

    #[test]
    fn commuting_but_not_doubly_commuting_rejected() {
        // pinned counterexample: both upper-triangular Toeplitz (they
        // commute), but T1* T2 != T2 T1*
        let policy = TolerancePolicy::default();
        let t1 = ComplexMatrix::from_rows(vec![
            vec![C64::new(0.5, 0.0), C64::new(0.2, 0.0)],
            vec![C64::new(0.0, 0.0), C64::new(0.5, 0.0)],
        ])
        .unwrap();
        let t2 = ComplexMatrix::from_rows(vec![
            vec![C64::new(0.4, 0.0), C64::new(0.3, 0.0)],
            vec![C64::new(0.0, 0.0), C64::new(0.4, 0.0)],
        ])
        .unwrap();
        let (plain, starred) = commutation_defects(&[t1.clone(), t2.clone()]);
        assert!(plain < 1e-15, "they commute");
        assert!(starred > 1e-3, "they do not doubly commute");
        assert!(nelson_doubly_commuting(&[t1, t2], 16, &policy).is_err());
    }

    #[test]
    fn degenerate_spectra_are_clustered_jointly() {
        // A (x) I and I (x) B have systematically degenerate positive parts
        let policy = TolerancePolicy::default();
        let ts = gen_doubly_commuting(19, &[3, 2]).unwrap();
        let lift = build_dc_lift(&ts, &policy).unwrap();
        // one joint cluster per (i, j) eigenpair of a generic tensor pair
        assert_eq!(lift.joint_projectors.len(), 6);
        let rep = nelson_doubly_commuting(&ts, 16, &policy).unwrap();
        assert!(rep.joint_reassembly_defect <= 1e-6, "{:?}", rep);
    }
}
