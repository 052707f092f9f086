//! Quadrature oracle for w(z) from its defining Cauchy-type integral
//!
//!   w(z) = (1/(pi i)) \int e^{-t^2} / (t - z) dt
//!
//! over a horizontal contour running left to right below the pole t = z.
//! Used as an independent reference for [`faddeeva_w`]; shares no code with
//! the production evaluation beyond complex arithmetic.
//!
//! Contour realization:
//!  - Im z >= 1/2: the real axis already passes below the pole.
//!  - |Im z| < 1/2: the line Im t = Im z - 1, a fixed unit distance below the
//!    pole, so the integrand stays smooth; no pole is crossed relative to the
//!    defining contour.
//!  - Im z <= -1/2: the real axis passes above the pole, so the crossing is
//!    compensated by the explicit residue term 2 exp(-z^2).

use crate::error::Result;
use crate::quad::integrate_complex;
use num_complex::Complex64;

use super::faddeeva::faddeeva_w;

/// Adaptive quadrature of the defining contour integral of w.
///
/// Validated for |z| <= 30; relative accuracy target 1e-10. Fails with a
/// quadrature error if the refinement budget is exhausted (e.g. when the
/// residue term overflows deep in the lower half-plane).
pub fn w_contour_oracle(z: Complex64) -> Result<Complex64> {
    let (shift, residue) = if z.im >= 0.5 {
        (0.0, Complex64::new(0.0, 0.0))
    } else if z.im > -0.5 {
        (z.im - 1.0, Complex64::new(0.0, 0.0))
    } else {
        (0.0, 2.0 * (-z * z).exp())
    };
    if !residue.is_finite() {
        return Err(crate::error::Error::QuadratureNotConverged {
            estimate: f64::INFINITY,
            segments: 0,
        });
    }
    // Truncation: on the line Im t = shift the numerator magnitude is
    // exp(shift^2 - u^2); beyond |u| = |shift| + 9 the remainder is below
    // 1e-30 relative to the Gaussian mass.
    let reach = shift.abs() + 9.0;
    let (lo, hi) = (-reach.max(9.0), reach.max(9.0));
    let line = Complex64::new(0.0, shift);
    let f = |u: f64| {
        let t = Complex64::new(u, 0.0) + line;
        (-t * t).exp() / (t - z)
    };
    let r = integrate_complex(f, lo, hi, 1e-12, 1e-16, 4000)?;
    let value = r.value / Complex64::new(0.0, std::f64::consts::PI) + residue;
    if !value.is_finite() {
        return Err(crate::error::Error::QuadratureNotConverged {
            estimate: f64::INFINITY,
            segments: 0,
        });
    }
    Ok(value)
}

/// Relative disagreement between the production w and the contour oracle.
pub fn oracle_relative_deviation(z: Complex64) -> Result<f64> {
    let a = faddeeva_w(z);
    let b = w_contour_oracle(z)?;
    Ok((a - b).norm() / b.norm())
}
