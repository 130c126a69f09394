//! Real objectives on `(a2, a3, a4)` and their gradients with respect to the
//! driver angles.
//!
//! Gradients on the coefficient side are carried as `∂f/∂Re a + i ∂f/∂Im a`
//! for each coefficient, so that the angle gradient is
//! `∂f/∂φ_k = Σ_j Re(conj(G_j) ∂a_j/∂φ_k)`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;

use crate::coefficients::{coeffs_234_with_jacobian, CoeffJacobian, CoefficientTriple};
use crate::driver::StepDriver;
use crate::error::{Error, Result};

/// Logarithmic coefficients: `log(f(z)/z) = 2 Σ γ_n zⁿ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogCoefficients {
    pub gamma1: Complex64,
    pub gamma2: Complex64,
    pub gamma3: Complex64,
}

pub fn log_coeffs(t: &CoefficientTriple) -> LogCoefficients {
    let (a2, a3, a4) = (t.a2, t.a3, t.a4);
    LogCoefficients {
        gamma1: a2 / 2.0,
        gamma2: (a3 - a2 * a2 / 2.0) / 2.0,
        gamma3: (a4 - a2 * a3 + a2 * a2 * a2 / 3.0) / 2.0,
    }
}

/// Step used by finite-difference gradients of user objectives.
pub const FD_STEP: f64 = 1e-6;

type EvalFn = dyn Fn(&CoefficientTriple) -> f64 + Send + Sync;

/// A user-supplied objective on `(a2, a3, a4)`; its gradient is taken by
/// central differences on the real and imaginary parts.
#[derive(Clone)]
pub struct CustomFunctional {
    name: String,
    eval: Arc<EvalFn>,
}

impl CustomFunctional {
    pub fn new(
        name: impl Into<String>,
        eval: impl Fn(&CoefficientTriple) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            eval: Arc::new(eval),
        }
    }
}

impl fmt::Debug for CustomFunctional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomFunctional")
            .field("name", &self.name)
            .finish_non_exhaustive()
    }
}

#[derive(Debug, Clone)]
pub enum Functional {
    /// `|γ1|² + 2|γ2|² - 3/2`
    Milin2,
    /// `|γ1|² + 2|γ2|² + 3|γ3|² - 11/6`
    Milin3,
    /// `½ |a3 - a2²/4|`, fifth coefficient of the odd function `√f(z²)`
    Odd5,
    /// `|a4/2 - a3 a2/4 + a2³/16|`, seventh coefficient of `√f(z²)`
    Odd7,
    Custom(CustomFunctional),
}

impl Functional {
    pub const BUILTIN: [&'static str; 4] = ["milin2", "milin3", "odd5", "odd7"];

    pub fn builtins() -> [Functional; 4] {
        [
            Functional::Milin2,
            Functional::Milin3,
            Functional::Odd5,
            Functional::Odd7,
        ]
    }

    pub fn name(&self) -> &str {
        match self {
            Functional::Milin2 => "milin2",
            Functional::Milin3 => "milin3",
            Functional::Odd5 => "odd5",
            Functional::Odd7 => "odd7",
            Functional::Custom(c) => &c.name,
        }
    }

    pub fn eval(&self, t: &CoefficientTriple) -> f64 {
        match self {
            Functional::Milin2 => {
                let g = log_coeffs(t);
                g.gamma1.norm_sqr() + 2.0 * g.gamma2.norm_sqr() - 1.5
            }
            Functional::Milin3 => {
                let g = log_coeffs(t);
                g.gamma1.norm_sqr() + 2.0 * g.gamma2.norm_sqr() + 3.0 * g.gamma3.norm_sqr()
                    - 11.0 / 6.0
            }
            Functional::Odd5 => 0.5 * odd5_inner(t).norm(),
            Functional::Odd7 => odd7_inner(t).norm(),
            Functional::Custom(c) => (c.eval)(t),
        }
    }

    /// `∂f/∂Re a_j + i ∂f/∂Im a_j` for `j = 2, 3, 4`.
    pub fn coefficient_gradient(&self, t: &CoefficientTriple) -> [Complex64; 3] {
        let zero = Complex64::new(0.0, 0.0);
        let (a2, a3) = (t.a2, t.a3);
        match self {
            Functional::Milin2 | Functional::Milin3 => {
                let g = log_coeffs(t);
                let half = Complex64::new(0.5, 0.0);
                let mut grad = [zero; 3];
                accumulate_sq(&mut grad, 1.0, g.gamma1, [half, zero, zero]);
                accumulate_sq(&mut grad, 2.0, g.gamma2, [-a2 / 2.0, half, zero]);
                if matches!(self, Functional::Milin3) {
                    let d2 = (a2 * a2 - a3) / 2.0;
                    accumulate_sq(&mut grad, 3.0, g.gamma3, [d2, -a2 / 2.0, half]);
                }
                grad
            }
            Functional::Odd5 => {
                let mut grad = [zero; 3];
                accumulate_abs(&mut grad, 0.5, odd5_inner(t), [-a2 / 2.0, 1.0.into(), zero]);
                grad
            }
            Functional::Odd7 => {
                let mut grad = [zero; 3];
                let d2 = -a3 / 4.0 + 3.0 * a2 * a2 / 16.0;
                accumulate_abs(&mut grad, 1.0, odd7_inner(t), [d2, -a2 / 4.0, 0.5.into()]);
                grad
            }
            Functional::Custom(c) => central_difference(&*c.eval, t),
        }
    }

    /// Value and angle gradient at a driver.
    pub fn value_and_gradient(&self, d: &StepDriver) -> (f64, Vec<f64>) {
        let (t, jac) = coeffs_234_with_jacobian(d);
        let value = self.eval(&t);
        (value, self.chain(&t, &jac))
    }

    /// Angle gradient of `eval ∘ coeffs_234`.
    pub fn grad(&self, d: &StepDriver) -> Vec<f64> {
        self.value_and_gradient(d).1
    }

    /// Pulls a coefficient-side gradient back through the angle Jacobian.
    pub fn chain(&self, t: &CoefficientTriple, jac: &CoeffJacobian) -> Vec<f64> {
        let g = self.coefficient_gradient(t);
        (0..jac.m())
            .map(|k| {
                jac.column(k)
                    .iter()
                    .zip(&g)
                    .map(|(dj, gj)| (gj.conj() * dj).re)
                    .sum()
            })
            .collect()
    }
}

impl FromStr for Functional {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "milin2" => Ok(Functional::Milin2),
            "milin3" => Ok(Functional::Milin3),
            "odd5" => Ok(Functional::Odd5),
            "odd7" => Ok(Functional::Odd7),
            other => Err(Error::UnknownFunctional(other.to_string())),
        }
    }
}

impl fmt::Display for Functional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub fn eval_functional(spec: &Functional, t: &CoefficientTriple) -> f64 {
    spec.eval(t)
}

pub fn grad_functional(spec: &Functional, d: &StepDriver) -> Vec<f64> {
    spec.grad(d)
}

fn odd5_inner(t: &CoefficientTriple) -> Complex64 {
    t.a3 - t.a2 * t.a2 / 4.0
}

fn odd7_inner(t: &CoefficientTriple) -> Complex64 {
    t.a4 / 2.0 - t.a3 * t.a2 / 4.0 + t.a2 * t.a2 * t.a2 / 16.0
}

/// Adds the gradient of `weight |w|²` where `w` is holomorphic in the
/// coefficients with complex derivatives `dw`.
fn accumulate_sq(grad: &mut [Complex64; 3], weight: f64, w: Complex64, dw: [Complex64; 3]) {
    for (g, d) in grad.iter_mut().zip(dw) {
        *g += 2.0 * weight * w * d.conj();
    }
}

/// Same for `weight |w|`; zero at `w = 0`.
fn accumulate_abs(grad: &mut [Complex64; 3], weight: f64, w: Complex64, dw: [Complex64; 3]) {
    let r = w.norm();
    if r == 0.0 {
        return;
    }
    for (g, d) in grad.iter_mut().zip(dw) {
        *g += weight * w / r * d.conj();
    }
}

fn central_difference(eval: &EvalFn, t: &CoefficientTriple) -> [Complex64; 3] {
    let base = t.to_array();
    let mut grad = [Complex64::new(0.0, 0.0); 3];
    for j in 0..3 {
        for (dir, unit) in [Complex64::new(1.0, 0.0), Complex64::i()].into_iter().enumerate() {
            let mut plus = base;
            let mut minus = base;
            plus[j] += FD_STEP * unit;
            minus[j] -= FD_STEP * unit;
            let slope = (eval(&CoefficientTriple::from_array(plus))
                - eval(&CoefficientTriple::from_array(minus)))
                / (2.0 * FD_STEP);
            if dir == 0 {
                grad[j].re = slope;
            } else {
                grad[j].im = slope;
            }
        }
    }
    grad
}
