//! Fixed inputs shared by the criterion benches.

use rnm_core::{Complex, Polynomial};

/// Monic polynomial of the given degree whose roots sit on a slightly
/// perturbed circle, so no two are close.
pub fn circle_polynomial(degree: usize) -> Polynomial {
    let roots: Vec<Complex> = (0..degree)
        .map(|j| {
            let angle = std::f64::consts::TAU * (j as f64 + 0.25) / degree as f64;
            Complex::from_polar(0.6 + 0.05 * (j % 3) as f64, angle)
        })
        .collect();
    Polynomial::from_roots(&roots).expect("nonempty root list")
}

pub fn smale_cubic() -> Polynomial {
    Polynomial::from_real(&[2.0, -2.0, 0.0, 1.0]).expect("valid coefficients")
}

pub fn cube_roots_of_unity() -> Polynomial {
    Polynomial::from_real(&[-1.0, 0.0, 0.0, 1.0]).expect("valid coefficients")
}
