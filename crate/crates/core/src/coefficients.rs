//! Closed-form second, third and fourth coefficients of the schlicht function
//! generated by a step driver, and their derivatives with respect to the
//! driver angles.
//!
//! With `c_k = exp(i φ_k)` and `c_0 = 0`:
//!
//! ```text
//! a2 = -(2/m) Σ c_k
//! a3 = a2² - Σ (2k-1)/m² c_k²
//! a4 = 3 a2 a3 - 2 a2³ - (2/m³) Σ c_k² (k² c_k + (2k-1) Σ_{j<k} c_j)
//! ```

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::driver::StepDriver;

pub use crate::piecewise::{coeffs_upto, PiecewisePolyState};

/// Taylor coefficients `(a2, a3, a4)` of `f(z) = z + a2 z² + a3 z³ + a4 z⁴ + …`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientTriple {
    pub a2: Complex64,
    pub a3: Complex64,
    pub a4: Complex64,
}

impl CoefficientTriple {
    pub fn new(a2: Complex64, a3: Complex64, a4: Complex64) -> Self {
        Self { a2, a3, a4 }
    }

    /// The Koebe function `z / (1 - z)²`.
    pub fn koebe() -> Self {
        Self::new(2.0.into(), 3.0.into(), 4.0.into())
    }

    pub fn to_array(self) -> [Complex64; 3] {
        [self.a2, self.a3, self.a4]
    }

    pub fn from_array(a: [Complex64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    pub fn conj(self) -> Self {
        Self::new(self.a2.conj(), self.a3.conj(), self.a4.conj())
    }

    /// Largest componentwise modulus of the difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.to_array()
            .iter()
            .zip(other.to_array().iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Partial derivatives `∂a_j/∂φ_k`, one row per coefficient `a2, a3, a4`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffJacobian {
    pub rows: [Vec<Complex64>; 3],
}

impl CoeffJacobian {
    pub fn m(&self) -> usize {
        self.rows[0].len()
    }

    pub fn column(&self, k: usize) -> [Complex64; 3] {
        [self.rows[0][k], self.rows[1][k], self.rows[2][k]]
    }
}

/// Intermediate sums shared by the value and the derivative.
struct Sums {
    steps: Vec<Complex64>,
    a2: Complex64,
    a3: Complex64,
    a4: Complex64,
}

fn sums_from_steps(steps: Vec<Complex64>) -> Sums {
    let m = steps.len() as f64;
    let mut total = Complex64::new(0.0, 0.0);
    let mut weighted_sq = Complex64::new(0.0, 0.0);
    let mut tail = Complex64::new(0.0, 0.0);
    for (idx, &c) in steps.iter().enumerate() {
        let k = (idx + 1) as f64;
        let c2 = c * c;
        // `total` holds Σ_{j<k} c_j here
        tail += c2 * (k * k * c + (2.0 * k - 1.0) * total);
        weighted_sq += (2.0 * k - 1.0) * c2;
        total += c;
    }
    let a2 = -2.0 / m * total;
    let a3 = a2 * a2 - weighted_sq / (m * m);
    let a4 = 3.0 * a2 * a3 - 2.0 * a2 * a2 * a2 - 2.0 / (m * m * m) * tail;
    Sums { steps, a2, a3, a4 }
}

/// Closed-form `(a2, a3, a4)` for a step driver.
pub fn coeffs_234(d: &StepDriver) -> CoefficientTriple {
    let s = sums_from_steps(d.steps());
    CoefficientTriple::new(s.a2, s.a3, s.a4)
}

/// Coefficients together with their angle Jacobian, in `O(m)`.
pub fn coeffs_234_with_jacobian(d: &StepDriver) -> (CoefficientTriple, CoeffJacobian) {
    let s = sums_from_steps(d.steps());
    let n = s.steps.len();
    let m = n as f64;
    let i = Complex64::i();

    // suffix[l] = Σ_{k>l} (2k-1) c_k² (1-based k, 0-based l)
    let mut suffix = vec![Complex64::new(0.0, 0.0); n];
    let mut acc = Complex64::new(0.0, 0.0);
    for idx in (0..n).rev() {
        suffix[idx] = acc;
        let k = (idx + 1) as f64;
        acc += (2.0 * k - 1.0) * s.steps[idx] * s.steps[idx];
    }

    let mut d2 = Vec::with_capacity(n);
    let mut d3 = Vec::with_capacity(n);
    let mut d4 = Vec::with_capacity(n);
    let mut prefix = Complex64::new(0.0, 0.0);
    for (idx, &c) in s.steps.iter().enumerate() {
        let k = (idx + 1) as f64;
        let c2 = c * c;
        let da2 = -2.0 / m * i * c;
        let da3 = 2.0 * s.a2 * da2 - (2.0 * k - 1.0) / (m * m) * 2.0 * i * c2;
        let dtail = 3.0 * i * k * k * c2 * c
            + 2.0 * i * (2.0 * k - 1.0) * c2 * prefix
            + i * c * suffix[idx];
        let da4 = 3.0 * (da2 * s.a3 + s.a2 * da3)
            - 6.0 * s.a2 * s.a2 * da2
            - 2.0 / (m * m * m) * dtail;
        d2.push(da2);
        d3.push(da3);
        d4.push(da4);
        prefix += c;
    }
    (
        CoefficientTriple::new(s.a2, s.a3, s.a4),
        CoeffJacobian { rows: [d2, d3, d4] },
    )
}

/// Angle Jacobian of [`coeffs_234`].
pub fn grad_coeffs_234(d: &StepDriver) -> CoeffJacobian {
    coeffs_234_with_jacobian(d).1
}

impl Add for CoefficientTriple {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.a2 + o.a2, self.a3 + o.a3, self.a4 + o.a4)
    }
}

impl Sub for CoefficientTriple {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.a2 - o.a2, self.a3 - o.a3, self.a4 - o.a4)
    }
}

impl Mul<f64> for CoefficientTriple {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Self::new(self.a2 * s, self.a3 * s, self.a4 * s)
    }
}
