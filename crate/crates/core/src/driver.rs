//! Unimodular step functions on the equidistant partition of `[0, 1]`.
//!
//! A driver with `m` steps takes the value `c_k = exp(i φ_k)` on
//! `I_k = [(k-1)/m, k/m)` for `k < m` and on the closed last interval
//! `I_m = [(m-1)/m, 1]`. Through the substitution `x = e^{-t}` the same
//! function drives the Loewner equation on `t ∈ [0, ∞)`.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Reduces an angle to `[0, 2π)`.
pub fn wrap_angle(phi: f64) -> f64 {
    let r = phi.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if r >= TAU {
        0.0
    } else {
        r
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepDriver {
    angles: Vec<f64>,
}

impl StepDriver {
    /// Builds a driver from angles in radians, reducing them to `[0, 2π)`.
    pub fn new(angles: &[f64]) -> Result<Self> {
        if angles.is_empty() {
            return Err(Error::EmptyDriver);
        }
        if let Some((index, &value)) = angles.iter().enumerate().find(|(_, a)| !a.is_finite()) {
            return Err(Error::NonFiniteAngle { index, value });
        }
        Ok(Self {
            angles: angles.iter().copied().map(wrap_angle).collect(),
        })
    }

    /// The constant driver `c_k ≡ exp(i φ)`.
    pub fn constant(m: usize, phi: f64) -> Result<Self> {
        Self::new(&vec![phi; m])
    }

    /// Number of subintervals.
    pub fn m(&self) -> usize {
        self.angles.len()
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn into_angles(self) -> Vec<f64> {
        self.angles
    }

    /// Step values `c_1, …, c_m`.
    pub fn steps(&self) -> Vec<Complex64> {
        self.angles.iter().map(|&phi| Complex64::cis(phi)).collect()
    }

    /// Index (0-based) of the subinterval containing `x`.
    pub fn interval_index(&self, x: f64) -> Result<usize> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::OutOfDomain(x));
        }
        let m = self.m();
        // floor(m x) with the last interval closed at 1, corrected against the
        // rounded breakpoints k/m so that refinement never moves a point
        let mf = m as f64;
        let mut k = ((mf * x).floor() as usize).min(m - 1);
        if k > 0 && x < k as f64 / mf {
            k -= 1;
        } else if k + 1 < m && x >= (k + 1) as f64 / mf {
            k += 1;
        }
        Ok(k)
    }

    /// Value `s(x)` of the step function.
    pub fn eval(&self, x: f64) -> Result<Complex64> {
        let k = self.interval_index(x)?;
        Ok(Complex64::cis(self.angles[k]))
    }

    /// Re-expresses the driver on `factor · m` subintervals by repeating each
    /// angle. The generating function is unchanged.
    pub fn refine(&self, factor: usize) -> Result<Self> {
        if factor < 1 {
            return Err(Error::InvalidFactor);
        }
        let angles = self
            .angles
            .iter()
            .flat_map(|&a| std::iter::repeat_n(a, factor))
            .collect();
        Ok(Self { angles })
    }

    /// Shifts every angle by `theta` (a global rotation of the driver).
    pub fn rotated(&self, theta: f64) -> Self {
        Self {
            angles: self.angles.iter().map(|&a| wrap_angle(a + theta)).collect(),
        }
    }

    /// Negates every angle; the generated coefficients are conjugated.
    pub fn conjugated(&self) -> Self {
        Self {
            angles: self.angles.iter().map(|&a| wrap_angle(-a)).collect(),
        }
    }
}
