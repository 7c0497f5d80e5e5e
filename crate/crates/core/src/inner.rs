//! Inner functions on the annulus `A_q = {q < |z| < 1}`: the bilateral
//! Jordan-Kronecker series `f(a, t) = sum_n a^n / (1 - t q^{2n})` with
//! certified truncation tails, single-zero factors `B_w`, normalized
//! products `psi_W`, and the Laurent-polynomial family
//! `f_n(z) = (z^n + q^n z^-n)/(1 + q^n)`.
//!
//! Conventions (numerically verified):
//! the nome is `q^2`; `f(., t)` vanishes exactly on `q^{2Z}/t`, so the
//! single-zero factor at `w` is `B_w(z) = f(z conj(w), q^2/|w|^2)` and has
//! constant modulus on each boundary circle with ratio `|w|/q`. A zero
//! multiset with `prod |w_j| = q^K` balances the two circles through
//! `tau(z) = z^{m-K} prod B_{w_j}(z)`, `psi_W = tau / tau(1)`.

use crate::matrix::{C64, LinalgError};
use serde::Serialize;

const POLE_GUARD: f64 = 1e-6;
const MAX_TERMS: usize = 2_000_000;

/// Annulus `{q < |z| < 1}`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AnnulusQ {
    pub q: f64,
}

impl AnnulusQ {
    pub fn new(q: f64) -> Result<Self, LinalgError> {
        if !(0.0 < q && q < 1.0) {
            return Err(LinalgError::InvalidArgument(format!(
                "annulus parameter must satisfy 0 < q < 1, got {}",
                q
            )));
        }
        Ok(AnnulusQ { q })
    }
}

/// A series value with its certified truncation tail.
#[derive(Debug, Clone, Copy)]
pub struct SeriesValue {
    pub value: C64,
    pub tail_bound: f64,
    pub terms_used: usize,
}

/// Jordan-Kronecker series with nome `q^2`, truncated symmetrically with
/// both geometric tails certified below `tail_tol`.
/// Domain: `q^2 < |alpha| < 1`, `q^2 (1 + guard) <= t < 1`.
pub fn jk(alpha: C64, t: f64, q: f64, tail_tol: f64) -> Result<SeriesValue, LinalgError> {
    let q2 = q * q;
    let a = alpha.norm();
    if !(a > q2 && a < 1.0) {
        return Err(LinalgError::InvalidArgument(format!(
            "|alpha| = {} outside the convergence annulus ({}, 1)",
            a, q2
        )));
    }
    if !(t < 1.0 && t >= q2 * (1.0 + POLE_GUARD)) {
        return Err(LinalgError::InvalidArgument(format!(
            "t = {} outside [q^2 (1+{:.0e}), 1) = [{}, 1)",
            t,
            POLE_GUARD,
            q2 * (1.0 + POLE_GUARD)
        )));
    }
    if tail_tol <= 0.0 {
        return Err(LinalgError::InvalidArgument("tail_tol must be positive".into()));
    }
    // closed-form truncation levels from the geometric tail bounds
    let half = 0.5 * tail_tol;
    let plus_rhs = half * (1.0 - a) * (1.0 - t * q2);
    let n_plus = ((plus_rhs.ln() / a.ln()).ceil() as i64).max(4) as usize;
    let ratio_minus = q2 / a;
    let minus_rhs = half * (1.0 - ratio_minus) * (t - q2);
    let n_minus = ((minus_rhs.ln() / ratio_minus.ln()).ceil() as i64).max(4) as usize;
    let n = n_plus.max(n_minus);
    if n > MAX_TERMS {
        return Err(LinalgError::NonConvergence {
            sweeps: n,
            residual: tail_tol,
        });
    }

    let mut sum = C64::new(1.0 / (1.0 - t), 0.0); // n = 0 term
    // positive side
    let mut an = C64::new(1.0, 0.0);
    let mut q2n = 1.0f64;
    for _ in 1..=n {
        an *= alpha;
        q2n *= q2;
        sum += an / C64::new(1.0 - t * q2n, 0.0);
    }
    // negative side: a^{-k}/(1 - t q^{-2k}) = (q^2/alpha)^k / (q^{2k} - t)
    let mut rk = C64::new(1.0, 0.0);
    let mut q2k = 1.0f64;
    for _ in 1..=n {
        rk *= C64::new(q2, 0.0) / alpha;
        q2k *= q2;
        sum += rk / C64::new(q2k - t, 0.0);
    }
    // tails at the chosen N (exact geometric formulas)
    let tail_plus = a.powi(n as i32 + 1) / ((1.0 - a) * (1.0 - t * q2));
    let tail_minus = ratio_minus.powi(n as i32 + 1) / ((1.0 - ratio_minus) * (t - q2));
    Ok(SeriesValue {
        value: sum,
        tail_bound: tail_plus + tail_minus,
        terms_used: 2 * n + 1,
    })
}

/// `n`-th term of the series, exposed for the term-level identities.
pub fn jk_term(n: i64, alpha: C64, t: f64, q: f64) -> C64 {
    let q2n = (q * q).powi(n as i32);
    alpha.powi(n as i32) / C64::new(1.0 - t * q2n, 0.0)
}

/// Single-zero factor: vanishes exactly at `w` (and its `q^{2Z}` translates
/// outside the annulus), constant modulus on each boundary circle.
pub fn b_w(z: C64, w: C64, q: f64, tail_tol: f64) -> Result<SeriesValue, LinalgError> {
    let aw = w.norm();
    let t = q * q / (aw * aw);
    jk(z * w.conj(), t, q, tail_tol)
}

/// Zero multiset with its certified product-modulus exponent.
#[derive(Debug, Clone, Serialize)]
pub struct InnerSpec {
    pub q: f64,
    pub zeros: Vec<(f64, f64)>,
    /// Integer with `|prod w_j| = q^k`.
    pub k: i64,
    /// `|ln prod|w| - k ln q|`, the acceptance residual.
    pub residual: f64,
    /// min over zeros of distance to the two boundary circles.
    pub boundary_margin: f64,
}

impl InnerSpec {
    pub fn zeros_c64(&self) -> Vec<C64> {
        self.zeros.iter().map(|&(re, im)| C64::new(re, im)).collect()
    }
}

/// Finds the integer `k` minimizing `|ln prod|w_j| - k ln q|`; accepts when
/// the residual is below `tol`.
pub fn validate_zero_set(zeros: &[C64], q: f64, tol: f64) -> Result<InnerSpec, LinalgError> {
    AnnulusQ::new(q)?;
    if zeros.is_empty() {
        return Err(LinalgError::InvalidArgument("zero set must be nonempty".into()));
    }
    let mut margin = f64::INFINITY;
    let mut log_prod = 0.0;
    for w in zeros {
        let a = w.norm();
        if !(a >= q && a <= 1.0) {
            return Err(LinalgError::InvalidArgument(format!(
                "zero with modulus {} outside [q, 1] = [{}, 1]",
                a, q
            )));
        }
        margin = margin.min((a - q).min(1.0 - a));
        log_prod += a.ln();
    }
    let k_real = log_prod / q.ln();
    let k = k_real.round() as i64;
    let residual = (log_prod - k as f64 * q.ln()).abs();
    if residual > tol {
        return Err(LinalgError::InvalidArgument(format!(
            "product modulus {:.6} is not an integer power of q: nearest k = {}, residual {:.3e}",
            log_prod.exp(),
            k,
            residual
        )));
    }
    Ok(InnerSpec {
        q,
        zeros: zeros.iter().map(|w| (w.re, w.im)).collect(),
        k,
        residual,
        boundary_margin: margin,
    })
}

/// Normalized inner function `psi_W = tau / tau(1)` with
/// `tau(z) = z^{m-k} prod_j B_{w_j}(z)`.
pub struct PsiW {
    pub spec: InnerSpec,
    tau_at_one: C64,
}

/// Builds the inner function; requires strictly interior zeros and a
/// normalization point away from the zero set.
pub fn psi_w(spec: &InnerSpec) -> Result<PsiW, LinalgError> {
    if spec.boundary_margin <= 0.0 {
        return Err(LinalgError::InvalidArgument(
            "psi_W needs zeros strictly inside the annulus (positive margin)".into(),
        ));
    }
    for &(re, im) in &spec.zeros {
        if (C64::new(re, im) - C64::new(1.0, 0.0)).norm() < 1e-12 {
            return Err(LinalgError::InvalidArgument(
                "normalization point z = 1 lies in the zero set; rotate W first".into(),
            ));
        }
    }
    let mut psi = PsiW {
        spec: spec.clone(),
        tau_at_one: C64::new(1.0, 0.0),
    };
    let at_one = psi.tau(C64::new(1.0, 0.0), 1e-14)?;
    if at_one.value.norm() < 1e-13 {
        return Err(LinalgError::InvalidArgument(
            "tau(1) vanishes; rotate the zero set".into(),
        ));
    }
    psi.tau_at_one = at_one.value;
    Ok(psi)
}

impl PsiW {
    fn tau(&self, z: C64, tail_tol: f64) -> Result<SeriesValue, LinalgError> {
        let m = self.spec.zeros.len() as i64;
        let expo = (m - self.spec.k) as i32;
        let mut value = z.powi(expo);
        let mut rel_err: f64 = 0.0;
        let mut terms = 0usize;
        for w in self.spec.zeros_c64() {
            let b = b_w(z, w, self.spec.q, tail_tol)?;
            let bn = b.value.norm();
            if bn > 0.0 {
                rel_err += b.tail_bound / bn;
            } else {
                rel_err = f64::INFINITY;
            }
            terms += b.terms_used;
            value *= b.value;
        }
        let tail = if rel_err.is_finite() {
            value.norm() * rel_err
        } else {
            // a factor vanished: absolute tails add
            tail_tol * self.spec.zeros.len() as f64
        };
        Ok(SeriesValue {
            value,
            tail_bound: tail,
            terms_used: terms,
        })
    }

    /// Evaluates `psi_W(z)` with a certified series tail.
    pub fn eval(&self, z: C64, tail_tol: f64) -> Result<SeriesValue, LinalgError> {
        let t = self.tau(z, tail_tol)?;
        Ok(SeriesValue {
            value: t.value / self.tau_at_one,
            tail_bound: t.tail_bound / self.tau_at_one.norm(),
            terms_used: t.terms_used,
        })
    }

    /// Max over `samples` points per circle of `||psi| - 1|`.
    pub fn boundary_modulus_defect(&self, samples: usize, tail_tol: f64) -> Result<f64, LinalgError> {
        let mut worst: f64 = 0.0;
        for theta in crate::fourier::offset_angles(samples) {
            for radius in [1.0, self.spec.q] {
                let v = self.eval(C64::from_polar(radius, theta), tail_tol)?;
                worst = worst.max((v.value.norm() - 1.0).abs());
            }
        }
        Ok(worst)
    }

    /// Winding number of `psi` around a small circle centered at `center`.
    pub fn winding_count(&self, center: C64, radius: f64, samples: usize) -> Result<i64, LinalgError> {
        let mut total = 0.0;
        let mut prev = self
            .eval(center + C64::new(radius, 0.0), 1e-10)?
            .value;
        for j in 1..=samples {
            let theta = 2.0 * std::f64::consts::PI * j as f64 / samples as f64;
            let v = self.eval(center + C64::from_polar(radius, theta), 1e-10)?.value;
            let mut d = (v / prev).arg();
            if d > std::f64::consts::PI {
                d -= 2.0 * std::f64::consts::PI;
            }
            total += d;
            prev = v;
        }
        Ok((total / (2.0 * std::f64::consts::PI)).round() as i64)
    }
}

/// `f_n(z) = (z^n + q^n z^{-n}) / (1 + q^n)`: Laurent polynomial, sup-norm 1
/// on the closed annulus, attained at z = 1.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TsikalasF {
    pub n: u32,
    pub q: f64,
}

pub fn tsikalas_f(n: u32, q: f64) -> Result<TsikalasF, LinalgError> {
    AnnulusQ::new(q)?;
    if n == 0 {
        return Err(LinalgError::InvalidArgument("need n >= 1".into()));
    }
    Ok(TsikalasF { n, q })
}

impl TsikalasF {
    pub fn eval(&self, z: C64) -> Result<C64, LinalgError> {
        if z.norm() == 0.0 {
            return Err(LinalgError::InvalidArgument("f_n is singular at z = 0".into()));
        }
        let zn = z.powi(self.n as i32);
        let qn = self.q.powi(self.n as i32);
        Ok((zn + qn / zn) / C64::new(1.0 + qn, 0.0))
    }

    /// The two nonzero Laurent coefficients `(c_n, c_{-n})`.
    pub fn laurent_pair(&self) -> (f64, f64) {
        let qn = self.q.powi(self.n as i32);
        (1.0 / (1.0 + qn), qn / (1.0 + qn))
    }
}

/// Laurent coefficients `c_{-k_max}..c_{k_max}` of a scalar function by
/// quadrature on one circle inside its analyticity annulus.
pub fn laurent_coeffs(
    f: impl Fn(C64) -> Result<C64, LinalgError>,
    radius: f64,
    k_max: usize,
    m: usize,
) -> Result<Vec<C64>, LinalgError> {
    if m < 4 * k_max.max(1) {
        return Err(LinalgError::InvalidArgument(format!(
            "need M >= 4K, got M = {}, K = {}",
            m, k_max
        )));
    }
    let samples: Result<Vec<C64>, _> = crate::fourier::offset_circle(radius, m)
        .into_iter()
        .map(f)
        .collect();
    Ok(crate::fourier::scalar_coeffs(
        &samples?,
        radius,
        -(k_max as i64),
        k_max as i64,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jk_term_identity_and_domain() {
        // n = 0 term is 1/(1-t)
        let t = 0.3;
        assert!((jk_term(0, C64::new(0.5, 0.0), t, 0.5) - C64::new(1.0 / 0.7, 0.0)).norm() < 1e-15);
        // domain errors
        assert!(jk(C64::new(0.1, 0.0), 0.5, 0.5, 1e-10).is_err(), "|alpha| < q^2");
        assert!(jk(C64::new(0.5, 0.0), 0.25, 0.5, 1e-10).is_err(), "t at the pole guard");
    }

    #[test]
    fn jk_refinement_stability() {
        // coarse and fine truncations agree within the certified tails
        let q: f64 = 0.5;
        let alpha = C64::from_polar(0.5, 0.9);
        let t = 0.5;
        let coarse = jk(alpha, t, q, 1e-6).unwrap();
        let fine = jk(alpha, t, q, 1e-14).unwrap();
        assert!(
            (coarse.value - fine.value).norm() <= coarse.tail_bound + fine.tail_bound,
            "difference {} exceeds certified tails {}",
            (coarse.value - fine.value).norm(),
            coarse.tail_bound + fine.tail_bound
        );
        assert!(fine.terms_used > coarse.terms_used);
    }

    #[test]
    fn jk_conjugation_symmetry() {
        let q: f64 = 0.45;
        let alpha = C64::from_polar(0.6, 1.3);
        let t = 0.7;
        let a = jk(alpha, t, q, 1e-12).unwrap().value;
        let b = jk(alpha.conj(), t, q, 1e-12).unwrap().value;
        assert!((a.conj() - b).norm() < 1e-12);
    }

    #[test]
    fn jk_zero_location() {
        // f(., t) vanishes at alpha = q^2/t and NOT at alpha = t (generic t)
        let q: f64 = 0.5;
        let t = 0.6;
        let at_zero = jk(C64::new(q * q / t, 0.0), t, q, 1e-12).unwrap();
        assert!(at_zero.value.norm() < 1e-10, "zero at q^2/t: {}", at_zero.value);
        let elsewhere = jk(C64::new(t, 0.0), t, q, 1e-12).unwrap();
        assert!(elsewhere.value.norm() > 0.1, "no zero at t: {}", elsewhere.value);
    }

    #[test]
    fn b_w_vanishes_at_w_and_constant_boundary_modulus() {
        let q: f64 = 0.5;
        let w = C64::from_polar(0.7, 1.0);
        let at_w = b_w(w, w, q, 1e-12).unwrap();
        assert!(at_w.value.norm() <= 1e-8, "B_w(w) = {}", at_w.value);

        for radius in [1.0, q] {
            let vals: Vec<f64> = crate::fourier::offset_angles(256)
                .into_iter()
                .map(|th| b_w(C64::from_polar(radius, th), w, q, 1e-12).unwrap().value.norm())
                .collect();
            let mean = vals.iter().sum::<f64>() / vals.len() as f64;
            let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / vals.len() as f64;
            assert!(var <= 1e-8, "modulus variance {} on radius {}", var, radius);
        }
        // modulus ratio between circles is |w|/q
        let outer = b_w(C64::new(1.0, 0.0), w, q, 1e-12).unwrap().value.norm();
        let inner = b_w(C64::new(q, 0.0), w, q, 1e-12).unwrap().value.norm();
        assert!((inner / outer - w.norm() / q).abs() < 1e-9);
    }

    #[test]
    fn validate_zero_set_examples() {
        let q: f64 = 0.5;
        // W = {q}: k = 1 (arithmetic only; margin is zero)
        let s1 = validate_zero_set(&[C64::new(q, 0.0)], q, 1e-9).unwrap();
        assert_eq!(s1.k, 1);
        assert!(s1.boundary_margin.abs() < 1e-15);
        // moduli multiplying to q: k = 1
        let rq = q.sqrt();
        let s2 = validate_zero_set(
            &[C64::new(rq, 0.0), C64::from_polar(rq, 2.0)],
            q,
            1e-9,
        )
        .unwrap();
        assert_eq!(s2.k, 1);
        // W = {0.8}: nearest k = 0, residual ln 0.8
        let err = validate_zero_set(&[C64::new(0.8, 0.0)], q, 1e-9);
        match err {
            Err(LinalgError::InvalidArgument(msg)) => {
                assert!(msg.contains("nearest k = 0"), "{}", msg);
            }
            other => panic!("expected rejection, got {:?}", other.map(|_| ())),
        }
    }

    #[test]
    fn psi_w_normalization_boundary_and_zeros() {
        let q: f64 = 0.5;
        let rq = q.sqrt();
        let zeros = [C64::from_polar(rq, 0.7), C64::from_polar(rq, 2.1)];
        let spec = validate_zero_set(&zeros, q, 1e-9).unwrap();
        let psi = psi_w(&spec).unwrap();
        // psi(1) = 1 by normalization, up to the certified series tails
        let at_one = psi.eval(C64::new(1.0, 0.0), 1e-12).unwrap();
        assert!(
            (at_one.value - C64::new(1.0, 0.0)).norm() <= at_one.tail_bound + 1e-13,
            "psi(1) = {}",
            at_one.value
        );
        // |psi| = 1 on both circles
        let defect = psi.boundary_modulus_defect(256, 1e-12).unwrap();
        assert!(defect <= 1e-6, "boundary modulus defect {}", defect);
        // zeros with winding count one
        for w in &zeros {
            let v = psi.eval(*w, 1e-12).unwrap();
            assert!(v.value.norm() <= 1e-6, "psi(w) = {}", v.value);
            let wind = psi.winding_count(*w, 0.02, 64).unwrap();
            assert_eq!(wind, 1);
        }
        // interior bound (maximum principle)
        for theta in crate::fourier::offset_angles(16) {
            let v = psi.eval(C64::from_polar(0.7, theta), 1e-10).unwrap();
            assert!(v.value.norm() <= 1.0 + 1e-8);
        }
    }

    #[test]
    fn psi_w_double_zero_multiplicity() {
        let q: f64 = 0.5;
        // double zero at modulus q^{1/2} each: product q^2... use k = 2:
        // w repeated twice with |w|^2 = q^2 => |w| = q... that is boundary;
        // instead zeros {a, a} with a^2 = q (k = 1)
        let a = C64::from_polar(q.sqrt(), 1.1);
        let spec = validate_zero_set(&[a, a], q, 1e-9).unwrap();
        assert_eq!(spec.k, 1);
        let psi = psi_w(&spec).unwrap();
        let wind = psi.winding_count(a, 0.02, 128).unwrap();
        assert_eq!(wind, 2, "double zero counts twice");
    }

    #[test]
    fn psi_rejects_boundary_zeros() {
        let q: f64 = 0.5;
        let spec = validate_zero_set(&[C64::new(q, 0.0)], q, 1e-9).unwrap();
        assert!(psi_w(&spec).is_err(), "margin zero");
    }

    #[test]
    fn tsikalas_examples() {
        let q: f64 = 0.5;
        let f1 = tsikalas_f(1, q).unwrap();
        assert!((f1.eval(C64::new(1.0, 0.0)).unwrap() - C64::new(1.0, 0.0)).norm() < 1e-15);
        // |f_1| <= 1 on both circles, equality at theta = 0 on the outer one
        let mut max_outer: f64 = 0.0;
        for theta in crate::fourier::offset_angles(512) {
            let vo = f1.eval(C64::from_polar(1.0, theta)).unwrap().norm();
            let vi = f1.eval(C64::from_polar(q, theta)).unwrap().norm();
            assert!(vo <= 1.0 + 1e-12);
            assert!(vi <= 1.0 + 1e-12);
            max_outer = max_outer.max(vo);
        }
        assert!((f1.eval(C64::new(1.0, 0.0)).unwrap().norm() - 1.0).abs() < 1e-15);
        assert!(max_outer > 0.999, "sup attained near theta = 0");
        assert!(tsikalas_f(0, q).is_err());
    }

    #[test]
    fn laurent_coeffs_examples() {
        let q: f64 = 0.5;
        // f_n: exactly two nonzero coefficients
        let f2 = tsikalas_f(2, q).unwrap();
        let coeffs = laurent_coeffs(|z| f2.eval(z), 0.8, 6, 64).unwrap();
        let (cp, cm) = f2.laurent_pair();
        let get = |k: i64| coeffs[(k + 6) as usize];
        assert!((get(2) - C64::new(cp, 0.0)).norm() < 1e-12);
        assert!((get(-2) - C64::new(cm, 0.0)).norm() < 1e-12);
        for k in [-6i64, -4, -1, 0, 1, 3, 5] {
            assert!(get(k).norm() < 1e-12, "lag {} should vanish", k);
        }
        // c_0 matches the direct mean
        let rq = q.sqrt();
        let zeros = [C64::from_polar(rq, 0.4), C64::from_polar(rq, 3.0)];
        let spec = validate_zero_set(&zeros, q, 1e-9).unwrap();
        let psi = psi_w(&spec).unwrap();
        let pc = laurent_coeffs(|z| psi.eval(z, 1e-12).map(|v| v.value), 0.75, 8, 128).unwrap();
        let pts = crate::fourier::offset_circle(0.75, 128);
        let mean: C64 = pts
            .iter()
            .map(|&z| psi.eval(z, 1e-12).unwrap().value)
            .sum::<C64>()
            / C64::new(128.0, 0.0);
        assert!((pc[8] - mean).norm() < 1e-12);
        // geometric decay of psi coefficients away from lag 0
        let tail_hi = pc[16].norm();
        let mid_hi = pc[12].norm();
        assert!(tail_hi < mid_hi, "coefficients decay: {} < {}", tail_hi, mid_hi);
    }

    #[test]
    fn convex_combinations_stay_contractive() {
        // convex combinations of certified inner functions have sup-norm <= 1
        // on the sampled boundary
        let q: f64 = 0.45;
        let rq = q.sqrt();
        let s1 = validate_zero_set(&[C64::from_polar(rq, 0.3), C64::from_polar(rq, 1.9)], q, 1e-9)
            .unwrap();
        let s2 = validate_zero_set(&[C64::from_polar(rq, 4.0), C64::from_polar(rq, 5.5)], q, 1e-9)
            .unwrap();
        let p1 = psi_w(&s1).unwrap();
        let p2 = psi_w(&s2).unwrap();
        for theta in crate::fourier::offset_angles(128) {
            for radius in [1.0, q] {
                let z = C64::from_polar(radius, theta);
                let v = p1.eval(z, 1e-10).unwrap().value.scale(0.4)
                    + p2.eval(z, 1e-10).unwrap().value.scale(0.6);
                assert!(v.norm() <= 1.0 + 1e-6);
            }
        }
    }
}
