//! Reference drivers.

use crate::driver::StepDriver;

/// A 20-step driver whose odd seventh coefficient exceeds `1090/1083`,
/// the maximum over typically real odd functions.
pub const COUNTEREXAMPLE_ANGLES: [f64; 20] = [
    3.180, 3.185, 3.189, 3.195, 3.203, 3.212, 3.224, 3.241, 3.268, 3.315, //
    3.536, 3.835, 2.770, 2.686, 2.600, 2.306, 3.000, 3.039, 3.062, 3.078,
];

pub const TYPICALLY_REAL_ODD7: f64 = 1090.0 / 1083.0;

pub fn counterexample_driver() -> StepDriver {
    StepDriver::new(&COUNTEREXAMPLE_ANGLES).expect("fixture angles are finite")
}
