//! Exact evaluation of the coefficient recursion
//!
//! ```text
//! g_1 ≡ 1,   g_n(x) = -∫_0^x Σ_{k=1}^{n-1} 2k t^{n-k-1} g_k(t) μ(t)^{n-k} dt,   a_n = g_n(1)
//! ```
//!
//! for a step driver `μ`. On each subinterval the driver is constant, so every
//! integrand is a polynomial and `g_n` is integrated in closed form, one
//! interval at a time. Polynomials are stored in the local variable
//! `u = x - x_left` of their interval.
//!
//! This is independent of the closed forms in [`crate::coefficients`] and is
//! used to check them, and to reach orders beyond four.

use num_complex::Complex64;

use crate::driver::StepDriver;
use crate::error::{Error, Result};

const MAX_SUBINTERVALS_FOR_HIGH_ORDER: usize = 1_000_000;
const HIGH_ORDER: usize = 8;

type Poly = Vec<Complex64>;

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

fn horner(p: &[Complex64], u: f64) -> Complex64 {
    p.iter().rev().fold(zero(), |acc, &c| acc * u + c)
}

/// Binomial rows `0..=n`.
fn pascal(n: usize) -> Vec<Vec<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    for p in 0..=n {
        let mut row = vec![1.0; p + 1];
        for i in 1..p {
            row[i] = rows[p - 1][i - 1] + rows[p - 1][i];
        }
        rows.push(row);
    }
    rows
}

/// `(x0 + u)^p` as a polynomial in `u`.
fn shifted_power(p: usize, x0: f64, binom: &[Vec<f64>]) -> Vec<f64> {
    (0..=p)
        .map(|i| binom[p][i] * x0.powi((p - i) as i32))
        .collect()
}

/// Polynomials of `g_1, …, g_N` on one subinterval, given the values of
/// `g_n` at the left endpoint.
fn integrate_interval(
    order: usize,
    x0: f64,
    c: Complex64,
    left_values: &[Complex64],
    binom: &[Vec<f64>],
) -> Vec<Poly> {
    let mut c_pow = vec![Complex64::new(1.0, 0.0); order];
    for p in 1..order {
        c_pow[p] = c_pow[p - 1] * c;
    }
    let t_pow: Vec<Vec<f64>> = (0..order).map(|p| shifted_power(p, x0, binom)).collect();

    // polys[n] is g_n for n >= 1; index 0 unused
    let mut polys: Vec<Poly> = vec![Vec::new(); order + 1];
    polys[1] = vec![Complex64::new(1.0, 0.0)];
    for n in 2..=order {
        let mut integrand = vec![zero(); n - 1];
        for k in 1..n {
            let scale = -2.0 * k as f64 * c_pow[n - k];
            let tp = &t_pow[n - k - 1];
            for (i, &ti) in tp.iter().enumerate() {
                for (j, &gj) in polys[k].iter().enumerate() {
                    integrand[i + j] += scale * ti * gj;
                }
            }
        }
        let mut g = Vec::with_capacity(n);
        g.push(left_values[n]);
        g.extend(
            integrand
                .iter()
                .enumerate()
                .map(|(i, &coef)| coef / (i + 1) as f64),
        );
        polys[n] = g;
    }
    polys
}

fn check_order(m: usize, order: usize) -> Result<()> {
    if order < 2 {
        return Err(Error::InvalidOrder(order));
    }
    if m > MAX_SUBINTERVALS_FOR_HIGH_ORDER && order > HIGH_ORDER {
        return Err(Error::ResourceLimit { m, order });
    }
    Ok(())
}

/// Piecewise-polynomial representation of `g_1, …, g_N` on every subinterval.
#[derive(Debug, Clone)]
pub struct PiecewisePolyState {
    m: usize,
    order: usize,
    /// `polys[k][n]`: coefficients of `g_n` on `I_{k+1}` in `u = x - k/m`.
    polys: Vec<Vec<Poly>>,
}

impl PiecewisePolyState {
    pub fn build(d: &StepDriver, order: usize) -> Result<Self> {
        check_order(d.m(), order)?;
        let m = d.m();
        let h = 1.0 / m as f64;
        let binom = pascal(order);
        let mut left = vec![zero(); order + 1];
        let mut polys = Vec::with_capacity(m);
        for (idx, c) in d.steps().into_iter().enumerate() {
            let x0 = idx as f64 * h;
            let local = integrate_interval(order, x0, c, &left, &binom);
            for n in 2..=order {
                left[n] = horner(&local[n], h);
            }
            polys.push(local);
        }
        Ok(Self { m, order, polys })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Coefficients of `g_n` on the 0-based subinterval `k`.
    pub fn segment(&self, k: usize, n: usize) -> &[Complex64] {
        &self.polys[k][n]
    }

    /// `g_n(x)` for `x ∈ [0, 1]`.
    pub fn eval(&self, n: usize, x: f64) -> Result<Complex64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::OutOfDomain(x));
        }
        if n == 0 || n > self.order {
            return Err(Error::InvalidOrder(n));
        }
        let k = ((self.m as f64 * x).floor() as usize).min(self.m - 1);
        let u = x - k as f64 / self.m as f64;
        Ok(horner(&self.polys[k][n], u))
    }

    /// `a_n = g_n(1)`.
    pub fn coefficient(&self, n: usize) -> Complex64 {
        horner(&self.polys[self.m - 1][n], 1.0 / self.m as f64)
    }
}

/// Coefficients `(a_2, …, a_N)` from the exact recursion.
///
/// Runs in `O(m N³)` time and `O(N²)` memory.
pub fn coeffs_upto(d: &StepDriver, order: usize) -> Result<Vec<Complex64>> {
    check_order(d.m(), order)?;
    let h = 1.0 / d.m() as f64;
    let binom = pascal(order);
    let mut left = vec![zero(); order + 1];
    for (idx, c) in d.steps().into_iter().enumerate() {
        let local = integrate_interval(order, idx as f64 * h, c, &left, &binom);
        for n in 2..=order {
            left[n] = horner(&local[n], h);
        }
    }
    Ok(left.split_off(2))
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_PI_2, PI, TAU};

    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;

    #[test]
    fn koebe_up_to_six() {
        let a = coeffs_upto(&StepDriver::constant(13, PI).unwrap(), 6).unwrap();
        for (i, z) in a.iter().enumerate() {
            assert!((z - Complex64::new((i + 2) as f64, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn rotated_koebe_closed_form() {
        let a = coeffs_upto(&StepDriver::new(&[FRAC_PI_2]).unwrap(), 5).unwrap();
        assert!((a[3] - Complex64::new(5.0, 0.0)).norm() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let phi = rng.gen_range(0.0..TAU);
            let m = rng.gen_range(1..30);
            let c = Complex64::cis(phi);
            let a = coeffs_upto(&StepDriver::constant(m, phi).unwrap(), 8).unwrap();
            for (i, z) in a.iter().enumerate() {
                let n = i + 2;
                let expected = n as f64 * (-c).powu(n as u32 - 1);
                assert!((z - expected).norm() < 1e-12, "n = {n}");
            }
        }
    }

    #[test]
    fn order_checks() {
        let d = StepDriver::new(&[0.0]).unwrap();
        assert!(matches!(coeffs_upto(&d, 1), Err(Error::InvalidOrder(1))));
        let big = StepDriver::constant(MAX_SUBINTERVALS_FOR_HIGH_ORDER + 1, 0.0).unwrap();
        assert!(matches!(
            coeffs_upto(&big, 9),
            Err(Error::ResourceLimit { .. })
        ));
    }

    #[test]
    fn state_is_continuous_and_vanishes_at_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let angles: Vec<f64> = (0..25).map(|_| rng.gen_range(0.0..TAU)).collect();
        let d = StepDriver::new(&angles).unwrap();
        let state = PiecewisePolyState::build(&d, 7).unwrap();
        let h = 1.0 / 25.0;
        for n in 1..=7 {
            for k in 0..25 {
                assert_eq!(state.segment(k, 1), &[Complex64::new(1.0, 0.0)]);
                if k + 1 < 25 {
                    let right_end = horner(state.segment(k, n), h);
                    let next_start = state.segment(k + 1, n)[0];
                    let scale = right_end.norm().max(1.0);
                    assert!((right_end - next_start).norm() <= 1e-12 * scale);
                }
            }
            if n >= 2 {
                assert_eq!(state.eval(n, 0.0).unwrap(), Complex64::new(0.0, 0.0));
            } else {
                assert_eq!(state.eval(1, 0.7).unwrap(), Complex64::new(1.0, 0.0));
            }
        }
        let rolled = coeffs_upto(&d, 7).unwrap();
        for n in 2..=7 {
            assert_eq!(state.coefficient(n), rolled[n - 2]);
            assert!((state.eval(n, 1.0).unwrap() - rolled[n - 2]).norm() < 1e-14);
        }
    }

    #[test]
    fn second_coefficient_path_matches_integral() {
        // g_2(x) = -2 ∫_0^x s(t) dt, piecewise linear
        let d = StepDriver::new(&[0.4, 2.2, 5.1]).unwrap();
        let state = PiecewisePolyState::build(&d, 2).unwrap();
        let steps = d.steps();
        let x = 0.5;
        let expected = -2.0 * (steps[0] / 3.0 + steps[1] * (0.5 - 1.0 / 3.0));
        assert!((state.eval(2, x).unwrap() - expected).norm() < 1e-15);
    }
}
