//! The universal covering of the annulus A_r = {r < |z| < 1/r} by the unit
//! disc, realized through the strip chart
//! `g(z) = i (2L/pi) Log((1+z)/(1-z))`, `L = ln(1/r)`, and the normalized
//! maps `pi_lambda` with `pi_lambda(0) = lambda`.
//!
//! `pi = exp . g` sends 0 to 1 and the two open half-circles to the two
//! boundary circles. The normalization moves 0 to lambda with the disc
//! automorphism `phi_b(z) = (z + ib)/(1 - ibz)` along the imaginary axis,
//! which makes the two boundary arcs lambda-dependent; the arc endpoints are
//! `phi_b^{-1}(+-1)`.

use crate::matrix::{C64, LinalgError};
use crate::membership::AnnulusParam;
use serde::Serialize;

/// The base covering map with its orientation convention recorded at
/// construction time (which half-circle maps to modulus r).
#[derive(Debug, Clone)]
pub struct CoveringMap {
    pub param: AnnulusParam,
    /// Modulus attained on the upper open half-circle (r by this chart).
    pub upper_arc_modulus: f64,
}

impl CoveringMap {
    pub fn new(param: AnnulusParam) -> Self {
        // probe just inside the upper arc rather than assuming the convention
        let probe = C64::from_polar(0.999999, std::f64::consts::FRAC_PI_2);
        let modulus = covering(probe, &param).expect("probe point is regular").norm();
        let upper = if (modulus - param.r).abs() < (modulus - param.outer()).abs() {
            param.r
        } else {
            param.outer()
        };
        CoveringMap {
            param,
            upper_arc_modulus: upper,
        }
    }

    pub fn eval(&self, z: C64) -> Result<C64, LinalgError> {
        covering(z, &self.param)
    }
}

/// Strip chart `g(z) = i (2L/pi) Log((1+z)/(1-z))`, mapping the disc
/// conformally onto the vertical strip `|Re| < L`. Singular at z = +-1.
pub fn strip_chart(z: C64, param: &AnnulusParam) -> Result<C64, LinalgError> {
    if (z - C64::new(1.0, 0.0)).norm() < 1e-14 || (z + C64::new(1.0, 0.0)).norm() < 1e-14 {
        return Err(LinalgError::InvalidArgument(format!(
            "strip chart is singular at z = {}",
            z
        )));
    }
    let w = (C64::new(1.0, 0.0) + z) / (C64::new(1.0, 0.0) - z);
    let log = C64::new(w.norm().ln(), w.arg());
    let l = param.half_width;
    Ok(C64::new(0.0, 2.0 * l / std::f64::consts::PI) * log)
}

/// Inverse of the strip chart: `z = (E - 1)/(E + 1)` with
/// `E = exp(-i pi w / (2L))`.
pub fn strip_chart_inverse(w: C64, param: &AnnulusParam) -> C64 {
    let l = param.half_width;
    let e = (C64::new(0.0, -std::f64::consts::PI / (2.0 * l)) * w).exp();
    (e - C64::new(1.0, 0.0)) / (e + C64::new(1.0, 0.0))
}

/// The covering `pi(z) = exp(g(z))`: disc onto the annulus, `pi(0) = 1`.
pub fn covering(z: C64, param: &AnnulusParam) -> Result<C64, LinalgError> {
    Ok(strip_chart(z, param)?.exp())
}

/// Normalized covering with `pi_lambda(0) = lambda` and lambda-dependent
/// boundary arcs.
#[derive(Debug, Clone, Serialize)]
pub struct LambdaMap {
    pub lambda: f64,
    /// Automorphism parameter `b = -tan(pi ln(lambda) / (4L))`, in (-1, 1).
    pub b: f64,
    pub param: AnnulusParam,
    /// Angle of `phi_b^{-1}(+1)`, one endpoint of the modulus-r arc.
    pub arc_start: f64,
    /// Angle of `phi_b^{-1}(-1)`, the other endpoint.
    pub arc_end: f64,
}

/// Disc automorphism `phi_b(z) = (z + ib)/(1 - ibz)` for real b in (-1,1).
pub fn phi_b(z: C64, b: f64) -> C64 {
    let ib = C64::new(0.0, b);
    (z + ib) / (C64::new(1.0, 0.0) - ib * z)
}

pub fn phi_b_inverse(w: C64, b: f64) -> C64 {
    let ib = C64::new(0.0, b);
    (w - ib) / (C64::new(1.0, 0.0) + ib * w)
}

/// Builds the lambda-normalized covering map. Requires
/// `lambda in (r + delta, 1/r - delta)`.
pub fn lambda_lift(lambda: f64, param: &AnnulusParam, delta: f64) -> Result<LambdaMap, LinalgError> {
    if !(lambda > param.r + delta && lambda < param.outer() - delta) {
        return Err(LinalgError::InvalidArgument(format!(
            "lambda = {} outside ({}, {}) with margin {}",
            lambda,
            param.r,
            param.outer(),
            delta
        )));
    }
    let l = param.half_width;
    let b = -(std::f64::consts::PI * lambda.ln() / (4.0 * l)).tan();
    let start = phi_b_inverse(C64::new(1.0, 0.0), b).arg();
    let end = phi_b_inverse(C64::new(-1.0, 0.0), b).arg();
    Ok(LambdaMap {
        lambda,
        b,
        param: *param,
        arc_start: start,
        arc_end: end,
    })
}

impl LambdaMap {
    pub fn eval(&self, z: C64) -> Result<C64, LinalgError> {
        covering(phi_b(z, self.b), &self.param)
    }

    /// Measure fraction of the modulus-r arc seen from 0 (harmonic measure).
    /// Analytically equal to `(L - ln lambda)/(2L)`.
    pub fn harmonic_measure_r_arc(&self) -> f64 {
        let mut span = self.arc_end - self.arc_start;
        if span < 0.0 {
            span += 2.0 * std::f64::consts::PI;
        }
        span / (2.0 * std::f64::consts::PI)
    }

    /// True if `e^{i theta}` lies on the (open) modulus-r arc.
    pub fn theta_on_r_arc(&self, theta: f64) -> bool {
        // the r-arc is the preimage of the upper half-circle
        phi_b(C64::from_polar(1.0, theta), self.b).im > 0.0
    }

    /// Angular distance from `theta` to the nearest arc endpoint.
    pub fn endpoint_distance(&self, theta: f64) -> f64 {
        let d = |a: f64, b: f64| {
            let two_pi = 2.0 * std::f64::consts::PI;
            let mut diff = (a - b).rem_euclid(two_pi);
            if diff > std::f64::consts::PI {
                diff = two_pi - diff;
            }
            diff
        };
        d(theta, self.arc_start).min(d(theta, self.arc_end))
    }
}

/// One classified boundary sample of a [`LambdaMap`].
#[derive(Debug, Clone, Serialize)]
pub struct BoundarySample {
    pub theta: f64,
    pub re: f64,
    pub im: f64,
    pub modulus: f64,
    /// r, 1/r, or NaN when the sample is inside an exclusion window.
    pub arc_class: f64,
    pub excluded: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundaryPartition {
    /// (start, end) angles of the modulus-r arc, counterclockwise.
    pub r_arc: (f64, f64),
    /// (start, end) of the complementary modulus-1/r arc.
    pub outer_arc: (f64, f64),
    pub samples: Vec<BoundarySample>,
    /// Worst classification error over non-excluded samples.
    pub max_classification_error: f64,
}

/// Classifies `m` uniform boundary samples (offset grid), excluding windows
/// of angular radius `eps` around the two endpoints.
pub fn boundary_partition(
    map: &LambdaMap,
    m: usize,
    eps: f64,
) -> Result<BoundaryPartition, LinalgError> {
    let mut samples = Vec::with_capacity(m);
    let mut max_err: f64 = 0.0;
    for theta in crate::fourier::offset_angles(m) {
        let z = C64::from_polar(1.0, theta);
        let val = map.eval(z)?;
        let excluded = map.endpoint_distance(theta) < eps;
        let on_r = map.theta_on_r_arc(theta);
        let target = if on_r { map.param.r } else { map.param.outer() };
        if !excluded {
            max_err = max_err.max((val.norm() - target).abs());
        }
        samples.push(BoundarySample {
            theta,
            re: val.re,
            im: val.im,
            modulus: val.norm(),
            arc_class: if excluded { f64::NAN } else { target },
            excluded,
        });
    }
    Ok(BoundaryPartition {
        r_arc: (map.arc_start, map.arc_end),
        outer_arc: (map.arc_end, map.arc_start),
        samples,
        max_classification_error: max_err,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn param() -> AnnulusParam {
        AnnulusParam::new(0.5).unwrap()
    }

    #[test]
    fn strip_chart_examples() {
        let p = param();
        // g(0) = 0
        assert!(strip_chart(C64::new(0.0, 0.0), &p).unwrap().norm() < 1e-15);
        // g(it) real: -(4L/pi) arctan t  (direct complex-arithmetic oracle)
        let l = p.half_width;
        for t in [0.3, -0.7, 0.95] {
            let g = strip_chart(C64::new(0.0, t), &p).unwrap();
            let expect = -(4.0 * l / std::f64::consts::PI) * t.atan();
            assert!(g.im.abs() < 1e-14);
            assert!((g.re - expect).abs() < 1e-14);
        }
        // Re g = 0 on the real segment (symmetry oracle)
        for x in [-0.9, -0.2, 0.4, 0.8] {
            let g = strip_chart(C64::new(x, 0.0), &p).unwrap();
            assert!(g.re.abs() < 1e-14);
        }
        assert!(strip_chart(C64::new(1.0, 0.0), &p).is_err());
        assert!(strip_chart(C64::new(-1.0, 0.0), &p).is_err());
    }

    #[test]
    fn covering_examples() {
        let p = param();
        // pi(0) = 1
        let at0 = covering(C64::new(0.0, 0.0), &p).unwrap();
        assert!((at0 - C64::new(1.0, 0.0)).norm() < 1e-15);
        // |pi(x)| = 1 on the real segment
        for x in [-0.8, 0.1, 0.7] {
            assert!((covering(C64::new(x, 0.0), &p).unwrap().norm() - 1.0).abs() < 1e-14);
        }
        // limit sampling oracle: |pi(0.99 i)| near r, |pi(-0.99i)| near 1/r
        let up = covering(C64::new(0.0, 0.99), &p).unwrap().norm();
        let down = covering(C64::new(0.0, -0.99), &p).unwrap().norm();
        assert!((up - p.r).abs() < 0.02, "upper probe {} ~ r", up);
        assert!((down - p.outer()).abs() < 0.06, "lower probe {} ~ 1/r", down);
        // range confinement
        let mut rng = crate::random::seeded_rng(1);
        use rand::Rng;
        for _ in 0..500 {
            let rad: f64 = rng.gen_range(0.0..0.999);
            let ang: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let v = covering(C64::from_polar(rad, ang), &p).unwrap().norm();
            assert!(v >= p.r - 1e-12 && v <= p.outer() + 1e-12);
        }
    }

    #[test]
    fn covering_orientation_recorded() {
        let p = param();
        let cov = CoveringMap::new(p);
        assert_eq!(cov.upper_arc_modulus, p.r, "this chart sends the upper arc to modulus r");
    }

    #[test]
    fn deck_periodicity() {
        let p = param();
        for z in [C64::new(0.3, 0.2), C64::new(-0.5, 0.4), C64::new(0.0, -0.6)] {
            let g = strip_chart(z, &p).unwrap();
            let z2 = strip_chart_inverse(g + C64::new(0.0, 2.0 * std::f64::consts::PI), &p);
            assert!(z2.norm() < 1.0, "deck translate stays in the disc");
            let v1 = covering(z, &p).unwrap();
            let v2 = covering(z2, &p).unwrap();
            // the translate accumulates at the singular point +1, where the
            // chart loses ~6 digits to cancellation
            assert!(
                (v1 - v2).norm() < 1e-8,
                "pi(z) = pi(z') under deck translation: {} vs {}",
                v1,
                v2
            );
        }
    }

    #[test]
    fn automorphism_is_unimodular_on_circle() {
        for b in [-0.9, -0.5, 0.0, 0.3, 0.85] {
            for theta in crate::fourier::offset_angles(32) {
                let w = phi_b(C64::from_polar(1.0, theta), b);
                assert!((w.norm() - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn lambda_lift_examples() {
        let p = param();
        // lambda = 1: b = 0, pi_1 = pi
        let m1 = lambda_lift(1.0, &p, 1e-6).unwrap();
        assert!(m1.b.abs() < 1e-15);
        assert!((m1.eval(C64::new(0.0, 0.0)).unwrap() - C64::new(1.0, 0.0)).norm() < 1e-14);
        // endpoints for b = 0 are +-1
        assert!(m1.arc_start.abs() < 1e-14);
        assert!((m1.arc_end.abs() - std::f64::consts::PI).abs() < 1e-14);
        // direct evaluation oracle: pi_lambda(0) = lambda
        let lam = 0.5f64.sqrt();
        let ml = lambda_lift(lam, &p, 1e-6).unwrap();
        let v = ml.eval(C64::new(0.0, 0.0)).unwrap();
        assert!((v - C64::new(lam, 0.0)).norm() < 1e-10, "pi_lam(0) = {}", v);
        // harmonic measure of the r-arc at lambda = 1 is 1/2
        assert!((m1.harmonic_measure_r_arc() - 0.5).abs() < 1e-10);
        // margin error
        assert!(lambda_lift(p.r, &p, 1e-6).is_err());
        assert!(lambda_lift(p.outer(), &p, 1e-6).is_err());
    }

    #[test]
    fn harmonic_measure_matches_formula_and_mean_value() {
        let p = param();
        let l = p.half_width;
        for lam in [0.6, 0.9, 1.0, 1.3, 1.9] {
            let map = lambda_lift(lam, &p, 1e-9).unwrap();
            let omega = map.harmonic_measure_r_arc();
            let expect = (l - lam.ln()) / (2.0 * l);
            assert!(
                (omega - expect).abs() < 1e-10,
                "harmonic measure {} vs formula {}",
                omega,
                expect
            );
            // mean-value identity with exact arc measures:
            // mean of ln|pi_lambda| = -L omega + L (1 - omega) = ln lambda
            let mean = -l * omega + l * (1.0 - omega);
            assert!((mean - lam.ln()).abs() < 1e-10);
        }
    }

    #[test]
    fn boundary_partition_classifies_samples() {
        let p = param();
        let map = lambda_lift(1.2, &p, 1e-9).unwrap();
        let part = boundary_partition(&map, 1024, 1e-3).unwrap();
        assert!(
            part.max_classification_error <= 1e-8,
            "classification error {}",
            part.max_classification_error
        );
        // arc measures sum to 2 pi by construction; spot-check via counting
        let counted_r = part
            .samples
            .iter()
            .filter(|s| !s.excluded && (s.arc_class - p.r).abs() < 1e-12)
            .count();
        let expect = map.harmonic_measure_r_arc() * 1024.0;
        assert!((counted_r as f64 - expect).abs() < 8.0, "sample count tracks arc measure");
    }

    #[test]
    fn range_confinement_for_lambda_maps() {
        let p = param();
        use rand::Rng;
        let mut rng = crate::random::seeded_rng(2);
        let map = lambda_lift(1.4, &p, 1e-9).unwrap();
        for _ in 0..500 {
            let rad: f64 = rng.gen_range(0.0..0.999);
            let ang: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let v = map.eval(C64::from_polar(rad, ang)).unwrap().norm();
            assert!(v >= p.r - 1e-12 && v <= p.outer() + 1e-12);
        }
    }
}
