//! The scalar bound curve for the two-term Milin functional over typically
//! real schlicht functions.
//!
//! `F(λ) = 2(λ² e^{-2λ} + 1/2)² + (λ+1)² e^{-2λ}` bounds `2|γ2|² + |γ1|²`,
//! and `M(λ) = F(λ) - 3/2 = 2λ⁴e^{-4λ} + (3λ²+2λ+1)e^{-2λ} - 1`. Its interior
//! maximum is the root of `g(λ) = 4e^{-2λ}(λ² - λ³) - 3λ + 1` on `[0, 1]`;
//! indeed `M'(λ) = 2λ e^{-2λ} g(λ)`.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundCurvePoint {
    pub lambda: f64,
    /// Upper bound for `2|γ2|² + |γ1|²`.
    pub f: f64,
    /// The same bound shifted to the Milin normalization, `F - 3/2`.
    pub m: f64,
}

pub fn bound_f(lambda: f64) -> f64 {
    let e2 = (-2.0 * lambda).exp();
    let inner = lambda * lambda * e2 + 0.5;
    2.0 * inner * inner + (lambda + 1.0).powi(2) * e2
}

pub fn bound_m(lambda: f64) -> f64 {
    let e2 = (-2.0 * lambda).exp();
    2.0 * lambda.powi(4) * e2 * e2 + (3.0 * lambda * lambda + 2.0 * lambda + 1.0) * e2 - 1.0
}

pub fn curve_point(lambda: f64) -> BoundCurvePoint {
    BoundCurvePoint {
        lambda,
        f: bound_f(lambda),
        m: bound_m(lambda),
    }
}

pub fn stationarity_residual(lambda: f64) -> Result<f64> {
    if lambda < 0.0 || lambda.is_nan() {
        return Err(Error::NegativeLambda(lambda));
    }
    Ok(residual(lambda))
}

fn residual(lambda: f64) -> f64 {
    4.0 * (-2.0 * lambda).exp() * (lambda * lambda - lambda.powi(3)) - 3.0 * lambda + 1.0
}

const BRACKET: (f64, f64) = (0.0, 1.0);

/// Root of the stationarity equation by bisection on `[0, 1]`.
///
/// Stops once the bracket is no wider than `tol` and the residual at the
/// returned point is at most `tol` in modulus.
pub fn solve_lambda0(tol: f64) -> Result<f64> {
    if !(tol > 0.0 && tol <= 1e-6) {
        return Err(Error::InvalidTolerance(tol));
    }
    let (mut lo, mut hi) = BRACKET;
    let (g_lo, g_hi) = (residual(lo), residual(hi));
    assert!(g_lo > 0.0 && g_hi < 0.0, "no sign change on [0, 1]");
    loop {
        let mid = 0.5 * (lo + hi);
        let g_mid = residual(mid);
        if (hi - lo <= tol && g_mid.abs() <= tol) || g_mid == 0.0 || mid == lo || mid == hi {
            return Ok(mid);
        }
        if g_mid > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

/// `(λ0, M(λ0))`.
pub fn milin_lower_bound() -> (f64, f64) {
    let lambda0 = solve_lambda0(1e-12).expect("fixed tolerance is valid");
    (lambda0, bound_m(lambda0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn residual_endpoints() {
        assert_eq!(stationarity_residual(0.0).unwrap(), 1.0);
        assert!((stationarity_residual(1.0).unwrap() + 2.0).abs() < 1e-15);
        assert!(stationarity_residual(0.390_045_68).unwrap().abs() <= 1e-7);
        assert!(matches!(
            stationarity_residual(-0.1),
            Err(Error::NegativeLambda(_))
        ));
    }

    #[test]
    fn tolerance_is_validated() {
        assert!(solve_lambda0(0.0).is_err());
        assert!(solve_lambda0(1e-5).is_err());
        assert!(solve_lambda0(f64::NAN).is_err());
        assert!(solve_lambda0(1e-6).is_ok());
    }

    #[test]
    fn root_and_bound() {
        let (l0, b) = milin_lower_bound();
        assert!((l0 - 0.390_045_68).abs() < 1e-8, "{l0}");
        assert!((b - 0.034_856_11).abs() < 1e-8, "{b}");
        assert!(residual(l0).abs() <= 1e-12);
        assert!(bound_m(l0 + 1e-3) < b && bound_m(l0 - 1e-3) < b);
        assert_eq!(bound_m(0.0), 0.0);
    }

    #[test]
    fn coarse_tolerance_still_brackets() {
        for tol in [1e-6, 1e-9, 1e-12] {
            let l = solve_lambda0(tol).unwrap();
            assert!(residual(l).abs() <= tol);
            assert!((l - 0.390_045_68).abs() <= tol.max(1e-8));
        }
    }

    #[test]
    fn forms_agree() {
        for i in 0..=5000 {
            let lambda = 5.0 * i as f64 / 5000.0;
            let p = curve_point(lambda);
            assert!((p.f - 1.5 - p.m).abs() <= 1e-13);
        }
    }

    #[test]
    fn derivative_is_proportional_to_residual() {
        let h = 1e-6;
        let (l0, _) = milin_lower_bound();
        let slope = |l: f64| (bound_m(l + h) - bound_m(l - h)) / (2.0 * h);
        assert!(slope(l0).abs() <= 1e-6);
        for i in 1..100 {
            let l = i as f64 / 100.0;
            let predicted = 2.0 * l * (-2.0 * l).exp() * residual(l);
            assert!((slope(l) - predicted).abs() <= 1e-8, "lambda {l}");
        }
    }

    #[test]
    fn single_sign_change_on_bracket() {
        let mut prev = residual(0.0);
        let mut changes = 0;
        for i in 1..=1000 {
            let g = residual(i as f64 * 1e-3);
            assert!(g < prev);
            if (g < 0.0) != (prev < 0.0) {
                changes += 1;
            }
            prev = g;
        }
        assert_eq!(changes, 1);
    }
}
