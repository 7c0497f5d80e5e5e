//! Membership oracles and defect operators for the quantum annulus QA_r, the
//! Pick annulus PA_r, and their dilation boundaries (script QA/PA/SA), plus
//! the hereditary dilation check and an extremality witness.

use crate::decomp::{self, herm_eig, inverse, op_norm, svd};
use crate::matrix::{C64, ComplexMatrix, LinalgError};
use crate::TolerancePolicy;
use serde::{Deserialize, Serialize};

/// Annulus radius r in (0,1) with the derived constants
/// `mu = r^-2 + r^2`, `nu = r^-2 - r^2`, `L = ln(1/r)`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct AnnulusParam {
    pub r: f64,
    pub mu: f64,
    pub nu: f64,
    pub half_width: f64,
}

impl AnnulusParam {
    pub fn new(r: f64) -> Result<Self, LinalgError> {
        if !(0.0 < r && r < 1.0) {
            return Err(LinalgError::InvalidArgument(format!(
                "annulus radius must satisfy 0 < r < 1, got {}",
                r
            )));
        }
        let r2 = r * r;
        Ok(AnnulusParam {
            r,
            mu: 1.0 / r2 + r2,
            nu: 1.0 / r2 - r2,
            half_width: (1.0 / r).ln(),
        })
    }

    pub fn outer(&self) -> f64 {
        1.0 / self.r
    }
}

/// Everything the `membership` CLI verb reports for one operator.
#[derive(Debug, Clone, Serialize)]
pub struct MembershipReport {
    pub dim: usize,
    pub r: f64,
    pub tol: f64,
    pub qa: bool,
    pub script_qa: bool,
    pub pa: bool,
    pub script_pa: bool,
    pub script_sa: bool,
    pub op_norm: f64,
    pub inv_norm: f64,
    pub qa_defect_norm: f64,
    pub qa_defect_min_eig: f64,
    pub pick_defect_min_eig: f64,
    pub script_pa_projection_defect: f64,
    pub normality_defect: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_plus: Option<crate::matrix::MatrixJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_minus: Option<crate::matrix::MatrixJson>,
}

/// Norm test: `||T|| <= 1/r + tol` and `||T^-1|| <= 1/r + tol`.
pub fn in_qa(t: &ComplexMatrix, param: &AnnulusParam, tol: f64) -> Result<bool, LinalgError> {
    let tinv = inverse(t, 1e-14)?;
    let bound = param.outer() + tol;
    Ok(op_norm(t) <= bound && op_norm(&tinv) <= bound)
}

/// `mu I - T*T - T^{-1} T^{-*}`, PSD exactly on QA_r.
pub fn qa_defect(t: &ComplexMatrix, param: &AnnulusParam) -> Result<ComplexMatrix, LinalgError> {
    let tinv = inverse(t, 1e-14)?;
    let n = t.rows();
    let mu_i = ComplexMatrix::identity(n).scale_re(param.mu);
    let tt = &t.adjoint() * t;
    let ss = &tinv * &tinv.adjoint();
    Ok(&(&mu_i - &tt) - &ss)
}

/// Boundary test: `||qa_defect|| <= tol`. On success recovers the projections
/// `P_plus` (eigenvalues of T*T near r^2) and `P_minus` (near r^-2), split at
/// the geometric midpoint 1.
pub fn in_script_qa(
    t: &ComplexMatrix,
    param: &AnnulusParam,
    tol: f64,
) -> Result<(bool, Option<(ComplexMatrix, ComplexMatrix)>), LinalgError> {
    let defect = qa_defect(t, param)?;
    if op_norm(&defect) > tol {
        return Ok((false, None));
    }
    let gram = &t.adjoint() * t;
    let eig = herm_eig(&gram, 1e-12)?;
    let n = t.rows();
    let mut p_plus = ComplexMatrix::zeros(n, n);
    let mut p_minus = ComplexMatrix::zeros(n, n);
    // defect eigenvalues f(a) = mu - a - 1/a vanish only at a = r^{\pm 2};
    // |f| <= tol forces |a - r^{\pm2}| <= 2 tol / (1 - r^4) near each root
    let eig_tol = (2.0 * tol / (1.0 - param.r.powi(4))).max(1e-12);
    let r2 = param.r * param.r;
    for (lam, proj) in &eig.clusters {
        if *lam < 1.0 {
            if (lam - r2).abs() > eig_tol {
                return Err(LinalgError::InvalidArgument(format!(
                    "internal consistency: T*T eigenvalue {} is neither r^2 = {} nor r^-2 = {}",
                    lam,
                    r2,
                    1.0 / r2
                )));
            }
            p_plus = &p_plus + proj;
        } else {
            if (lam - 1.0 / r2).abs() > eig_tol {
                return Err(LinalgError::InvalidArgument(format!(
                    "internal consistency: T*T eigenvalue {} is neither r^2 = {} nor r^-2 = {}",
                    lam,
                    r2,
                    1.0 / r2
                )));
            }
            p_minus = &p_minus + proj;
        }
    }
    Ok((true, Some((p_plus, p_minus))))
}

/// Pick-kernel defect `(1/nu)(mu I - T*T - T^{-*} T^{-1})`; PA_r membership
/// is positivity of this operator.
pub fn pick_defect(t: &ComplexMatrix, param: &AnnulusParam) -> Result<ComplexMatrix, LinalgError> {
    let tinv = inverse(t, 1e-14)?;
    let n = t.rows();
    let mu_i = ComplexMatrix::identity(n).scale_re(param.mu);
    let tt = &t.adjoint() * t;
    let ss = &tinv.adjoint() * &tinv;
    Ok((&(&mu_i - &tt) - &ss).scale_re(1.0 / param.nu))
}

/// Flipped variant `(1/nu)(mu I - J J* - J^{-1} J^{-*})`; equals
/// `pick_defect(J*)`.
pub fn pick_defect_flipped(
    j: &ComplexMatrix,
    param: &AnnulusParam,
) -> Result<ComplexMatrix, LinalgError> {
    let jinv = inverse(j, 1e-14)?;
    let n = j.rows();
    let mu_i = ComplexMatrix::identity(n).scale_re(param.mu);
    let tt = j * &j.adjoint();
    let ss = &jinv * &jinv.adjoint();
    Ok((&(&mu_i - &tt) - &ss).scale_re(1.0 / param.nu))
}

pub fn in_pa(t: &ComplexMatrix, param: &AnnulusParam, tol: f64) -> Result<bool, LinalgError> {
    Ok(decomp::is_psd(&pick_defect(t, param)?, tol))
}

/// Script-PA test: the Pick defect equals the negated flipped defect and is
/// an orthogonal projection, both within tol.
pub fn in_script_pa(j: &ComplexMatrix, param: &AnnulusParam, tol: f64) -> Result<bool, LinalgError> {
    let p = pick_defect(j, param)?;
    let pf = pick_defect_flipped(j, param)?;
    let sym = op_norm(&(&p + &pf));
    let herm = op_norm(&(&p - &p.adjoint()));
    let idem = op_norm(&(&(&p * &p) - &p));
    Ok(sym <= tol && herm <= tol && idem <= tol)
}

/// Script-SA test: normal with every eigenvalue modulus within tol of
/// r or 1/r. For normal operators the singular values are exactly the
/// eigenvalue moduli, so no general eigensolver is required.
pub fn in_script_sa(t: &ComplexMatrix, param: &AnnulusParam, tol: f64) -> Result<bool, LinalgError> {
    let comm = &(&t.adjoint() * t) - &(t * &t.adjoint());
    if op_norm(&comm) > tol {
        return Ok(false);
    }
    let f = svd(t)?;
    Ok(f.singulars.iter().all(|&s| {
        (s - param.r).abs() <= tol || (s - param.outer()).abs() <= tol
    }))
}

/// `||T*T - TT*||`, zero exactly for normal operators.
pub fn normality_defect(t: &ComplexMatrix) -> f64 {
    op_norm(&(&(&t.adjoint() * t) - &(t * &t.adjoint())))
}

/// Full report across all five collections.
pub fn membership_report(
    t: &ComplexMatrix,
    param: &AnnulusParam,
    tol: f64,
) -> Result<MembershipReport, LinalgError> {
    if !t.is_square() {
        return Err(LinalgError::NotSquare {
            rows: t.rows(),
            cols: t.cols(),
        });
    }
    let tinv = inverse(t, 1e-14)?;
    let qa_d = qa_defect(t, param)?;
    let pick_d = pick_defect(t, param)?;
    let qa = in_qa(t, param, tol)?;
    let (script_qa, projections) = in_script_qa(t, param, tol)?;
    let pa = decomp::is_psd(&pick_d, tol);
    let script_pa = in_script_pa(t, param, tol)?;
    let script_sa = in_script_sa(t, param, tol)?;
    let qa_eig = herm_eig(&(&qa_d + &qa_d.adjoint()).scale_re(0.5), 1e-12)?;
    let pick_eig = herm_eig(&(&pick_d + &pick_d.adjoint()).scale_re(0.5), 1e-12)?;
    let proj_defect = {
        let p = &pick_d;
        op_norm(&(&(p * p) - p))
    };
    Ok(MembershipReport {
        dim: t.rows(),
        r: param.r,
        tol,
        qa,
        script_qa,
        pa,
        script_pa,
        script_sa,
        op_norm: op_norm(t),
        inv_norm: op_norm(&tinv),
        qa_defect_norm: op_norm(&qa_d),
        qa_defect_min_eig: qa_eig.min_eigenvalue(),
        pick_defect_min_eig: pick_eig.min_eigenvalue(),
        script_pa_projection_defect: proj_defect,
        normality_defect: normality_defect(t),
        p_plus: projections.as_ref().map(|(p, _)| p.to_json()),
        p_minus: projections.as_ref().map(|(_, m)| m.to_json()),
    })
}

/// Step-by-step verification of the hereditary inequality chain for a
/// dilation triple `T = V*JV`, `T^{-1} = V*J^{-1}V`.
#[derive(Debug, Clone, Serialize)]
pub struct HereditaryReport {
    pub isometry_defect: f64,
    pub compression_defect: f64,
    pub inverse_compression_defect: f64,
    /// min eigenvalue of `V*J*JV - V*J*V V*JV` (must be >= -tol)
    pub gap_forward: f64,
    /// min eigenvalue of the same gap for the inverses
    pub gap_inverse: f64,
    /// min eigenvalue of `pick_defect(T) - V* pick_defect(J) V`
    pub gap_total: f64,
    pub passed: bool,
}

pub fn hereditary_dilation_check(
    t: &ComplexMatrix,
    j: &ComplexMatrix,
    v: &ComplexMatrix,
    param: &AnnulusParam,
    tol: f64,
) -> Result<HereditaryReport, LinalgError> {
    let iso = v.isometry_defect();
    if iso > tol {
        return Err(LinalgError::InvalidArgument(format!(
            "V is not an isometry: ||V*V - I|| = {:.3e}",
            iso
        )));
    }
    let jinv = inverse(j, 1e-14)?;
    let tinv = inverse(t, 1e-14)?;
    let comp = op_norm(&(&(&v.adjoint() * &(j * v)) - t));
    let comp_inv = op_norm(&(&(&v.adjoint() * &(&jinv * v)) - &tinv));
    if comp > tol || comp_inv > tol {
        return Ok(HereditaryReport {
            isometry_defect: iso,
            compression_defect: comp,
            inverse_compression_defect: comp_inv,
            gap_forward: f64::NAN,
            gap_inverse: f64::NAN,
            gap_total: f64::NAN,
            passed: false,
        });
    }
    let min_eig = |m: &ComplexMatrix| -> Result<f64, LinalgError> {
        let sym = (&m.adjoint() + m).scale_re(0.5);
        Ok(herm_eig(&sym, 1e-12)?.min_eigenvalue())
    };
    // forward gap: V*J*JV - (V*J*V)(V*JV) >= 0 since VV* <= I
    let jv = j * v;
    let tjv = &v.adjoint() * &jv;
    let g1 = &(&jv.adjoint() * &jv) - &(&tjv.adjoint() * &tjv);
    // inverse gap
    let jiv = &jinv * v;
    let tjiv = &v.adjoint() * &jiv;
    let g2 = &(&jiv.adjoint() * &jiv) - &(&tjiv.adjoint() * &tjiv);
    // total: pick_defect(T) - V* pick_defect(J) V
    let g3 = &pick_defect(t, param)? - &(&v.adjoint() * &(&pick_defect(j, param)? * v));
    let gap_forward = min_eig(&g1)?;
    let gap_inverse = min_eig(&g2)?;
    let gap_total = min_eig(&g3)?;
    let passed = gap_forward >= -tol && gap_inverse >= -tol && gap_total >= -tol;
    Ok(HereditaryReport {
        isometry_defect: iso,
        compression_defect: comp,
        inverse_compression_defect: comp_inv,
        gap_forward,
        gap_inverse,
        gap_total,
        passed,
    })
}

/// Extremality witness for a dilation triple `(J, F, V)`: validates that
/// `F` is on the dilation boundary, that the compression identities hold for
/// n = +-1, and then measures how far the range of `V` is from reducing `F`.
#[derive(Debug, Clone, Serialize)]
pub struct ExtremalityWitness {
    pub valid_triple: bool,
    pub f_boundary_defect: f64,
    pub compression_defect: f64,
    pub reduction_forward: f64,
    pub reduction_adjoint: f64,
    pub reduces: bool,
}

pub fn extremality_witness(
    j: &ComplexMatrix,
    f: &ComplexMatrix,
    v: &ComplexMatrix,
    param: &AnnulusParam,
    policy: &TolerancePolicy,
) -> Result<ExtremalityWitness, LinalgError> {
    let tol = policy.algebraic_tol;
    let mut valid = v.isometry_defect() <= tol;
    let f_defect = op_norm(&qa_defect(f, param)?);
    // F must be in QA_r (boundary not required of F, membership is)
    let f_in_qa = in_qa(f, param, tol)?;
    valid = valid && f_in_qa;
    let finv = inverse(f, 1e-14)?;
    let jinv = inverse(j, 1e-14)?;
    let c1 = op_norm(&(&(&v.adjoint() * &(f * v)) - j));
    let c2 = op_norm(&(&(&v.adjoint() * &(&finv * v)) - &jinv));
    let comp = c1.max(c2);
    valid = valid && comp <= tol;
    let n = f.rows();
    let proj_compl = &ComplexMatrix::identity(n) - &(v * &v.adjoint());
    let fwd = op_norm(&(&proj_compl * &(f * v)));
    let adj = op_norm(&(&proj_compl * &(&f.adjoint() * v)));
    Ok(ExtremalityWitness {
        valid_triple: valid,
        f_boundary_defect: f_defect,
        compression_defect: comp,
        reduction_forward: fwd,
        reduction_adjoint: adj,
        reduces: fwd <= tol && adj <= tol,
    })
}

/// Builds a trivial dilation of `J`: `F = Q (J + X) Q*` on the direct sum,
/// V = Q restricted to the first summand. Returns `(F, V)`.
pub fn trivial_dilation(
    j: &ComplexMatrix,
    x: &ComplexMatrix,
    q: &ComplexMatrix,
) -> (ComplexMatrix, ComplexMatrix) {
    let big = j.direct_sum(x);
    let f = &(q * &big) * &q.adjoint();
    let n = j.rows();
    let total = big.rows();
    let embed = ComplexMatrix::from_fn(total, n, |i, k| {
        if i == k {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let v = q * &embed;
    (f, v)
}
