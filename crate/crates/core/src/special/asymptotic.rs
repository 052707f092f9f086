//! Large-order asymptotics of w^{(n-1)} with the argument scaled like
//! mu*sqrt(2n) (Plancherel-Rotach regime) and at fixed argument.
//!
//! The scaled-argument leading term is
//!
//!   w^{(n-1)}(mu sqrt(2n)) ~ sqrt(2/n)^n (n-1)! (-1)^{n-1}
//!       / (sqrt(pi) sqrt(1 - phi^2))
//!       * exp(-n/2 (phi - 2 mu)^2) / phi^{n-1},
//!
//! with phi the inverse Zoukowski map on the branch with phi(0) = i. The
//! n-dependent prefactors overflow doubles past n ~ 170, so results carry a
//! separate natural-log magnitude.

use crate::error::{Error, Result};
use crate::util::ln_factorial_table;
use num_complex::Complex64;

use super::derivatives::{w_derivative_table, DirectionHint};

/// Validated parameter window for the scaled asymptotics; the theory only
/// guarantees some neighbourhood of 0 and this radius is what the error-decay
/// suite certifies.
pub const PR_MU_WINDOW: f64 = 0.3;

/// Leading asymptotic term in scaled form: the true value is
/// `value * exp(log_scale)` with `|value|` kept near 1.
#[derive(Debug, Clone, Copy)]
pub struct PlancherelRotachResult {
    pub mu: Complex64,
    pub n: usize,
    /// Unit-magnitude mantissa of the leading term.
    pub value: Complex64,
    pub phi_mu: Complex64,
    /// Natural log of the factored-out magnitude.
    pub log_scale: f64,
}

impl PlancherelRotachResult {
    /// Relative deviation from a reference value given in scaled form as a
    /// unit-modulus phase and an ln-magnitude.
    pub fn relative_error_to(&self, ref_phase: Complex64, ref_ln_abs: f64) -> f64 {
        let ln_ratio = self.value.norm().ln() + self.log_scale - ref_ln_abs;
        let ratio = (self.value / self.value.norm()) / ref_phase * ln_ratio.exp();
        (ratio - 1.0).norm()
    }
}

/// Inverse Zoukowski map phi(mu) = mu + sqrt(mu^2 - 1) on the branch that is
/// continuous near 0 with phi(0) = i; satisfies phi + 1/phi = 2 mu exactly.
///
/// Fails with a branch-cut proximity flag when mu^2 is within 1e-12 of 1,
/// where the branch derivative blows up.
pub fn zoukowski_phi(mu: Complex64) -> Result<Complex64> {
    if !mu.is_finite() {
        return Err(Error::InvalidArgument("mu must be finite".into()));
    }
    let disc = 1.0 - mu * mu;
    if disc.norm() < 1e-12 {
        return Err(Error::BranchCutProximity { dist: disc.norm() });
    }
    Ok(mu + Complex64::new(0.0, 1.0) * disc.sqrt())
}

/// Scaled-argument leading term for w^{(n-1)}(mu sqrt(2n)).
pub fn plancherel_rotach_w(mu: Complex64, n: usize) -> Result<PlancherelRotachResult> {
    if n < 2 {
        return Err(Error::InvalidArgument("n must be >= 2".into()));
    }
    if mu.norm() > PR_MU_WINDOW {
        return Err(Error::DomainError(format!(
            "|mu| = {:.3} outside the validated window {}",
            mu.norm(),
            PR_MU_WINDOW
        )));
    }
    let phi = zoukowski_phi(mu)?;
    let nf = n as f64;
    let ln_fact = ln_factorial(n - 1);
    // complex log of the full expression; Re -> log_scale, Im -> phase
    let mut log_total = Complex64::new(
        0.5 * nf * (2.0 / nf).ln() + ln_fact - 0.5 * std::f64::consts::PI.ln(),
        std::f64::consts::PI * ((n - 1) % 2) as f64, // (-1)^{n-1}
    );
    log_total -= 0.5 * (1.0 - phi * phi).ln();
    let d = phi - 2.0 * mu;
    log_total -= 0.5 * nf * d * d;
    log_total -= (nf - 1.0) * phi.ln();
    let phase = log_total.im.rem_euclid(2.0 * std::f64::consts::PI);
    Ok(PlancherelRotachResult {
        mu,
        n,
        value: Complex64::new(phase.cos(), phase.sin()),
        phi_mu: phi,
        log_scale: log_total.re,
    })
}

/// Fixed-argument leading term,
/// w^{(n-1)}(z) ~ sqrt(2/n)^n (n-1)! i^{n-1} exp(n/2 + i z sqrt(2n) - z^2/2) / sqrt(2 pi).
pub fn w_fixed_z_asymptotic(z: Complex64, n: usize) -> Result<PlancherelRotachResult> {
    if n < 2 {
        return Err(Error::InvalidArgument("n must be >= 2".into()));
    }
    if z.norm() > 5.0 {
        return Err(Error::DomainError(format!(
            "|z| = {:.3} outside the validated window 5",
            z.norm()
        )));
    }
    let nf = n as f64;
    let mut log_total = Complex64::new(
        0.5 * nf * (2.0 / nf).ln() + ln_factorial(n - 1) + 0.5 * nf
            - 0.5 * (2.0 * std::f64::consts::PI).ln(),
        0.5 * std::f64::consts::PI * ((n - 1) % 4) as f64, // i^{n-1}
    );
    log_total += Complex64::new(0.0, 1.0) * z * (2.0 * nf).sqrt() - z * z / 2.0;
    let phase = log_total.im.rem_euclid(2.0 * std::f64::consts::PI);
    let phi = zoukowski_phi(z / (2.0 * nf).sqrt())?;
    Ok(PlancherelRotachResult {
        mu: z / (2.0 * nf).sqrt(),
        n,
        value: Complex64::new(phase.cos(), phase.sin()),
        phi_mu: phi,
        log_scale: log_total.re,
    })
}

/// Measured relative error of the scaled-argument leading term against the
/// exact derivative table at z = mu sqrt(2n).
pub fn pr_relative_error(mu: Complex64, n: usize) -> Result<f64> {
    let approx = plancherel_rotach_w(mu, n)?;
    let z = mu * (2.0 * n as f64).sqrt();
    let table = w_derivative_table(z, n - 1, DirectionHint::Auto)?;
    Ok(approx.relative_error_to(
        table.mantissa(n - 1) / table.mantissa(n - 1).norm(),
        table.ln_abs(n - 1),
    ))
}

/// Measured relative error of the fixed-argument leading term.
pub fn fixed_z_relative_error(z: Complex64, n: usize) -> Result<f64> {
    let approx = w_fixed_z_asymptotic(z, n)?;
    let table = w_derivative_table(z, n - 1, DirectionHint::Auto)?;
    Ok(approx.relative_error_to(
        table.mantissa(n - 1) / table.mantissa(n - 1).norm(),
        table.ln_abs(n - 1),
    ))
}

fn ln_factorial(k: usize) -> f64 {
    // small table sizes dominate usage; the cumulative form keeps full
    // precision at any order
    ln_factorial_table(k)[k]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_at_origin_is_i() {
        let p = zoukowski_phi(Complex64::new(0.0, 0.0)).unwrap();
        assert!((p - Complex64::new(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn phi_at_tenth() {
        // mu + sqrt(mu^2-1) with branch tracking: 0.1 + 0.99498743...i
        let p = zoukowski_phi(Complex64::new(0.1, 0.0)).unwrap();
        assert!((p - Complex64::new(0.1, 0.994987437106619954)).norm() < 1e-15);
    }

    #[test]
    fn phi_small_argument_expansion() {
        // phi(z) = i + z - i z^2/2 + O(z^4) at z = 1e-2
        let z = Complex64::new(1e-2, 0.0);
        let p = zoukowski_phi(z).unwrap();
        let approx = Complex64::new(0.0, 1.0) + z - Complex64::new(0.0, 0.5) * z * z;
        assert!((p - approx).norm() < 5e-8);
    }

    #[test]
    fn phi_identity_holds() {
        let p = zoukowski_phi(Complex64::new(0.21, -0.13)).unwrap();
        let mu2 = p + 1.0 / p;
        assert!((mu2 - Complex64::new(0.42, -0.26)).norm() < 1e-14);
    }

    #[test]
    fn branch_cut_proximity_flagged() {
        let r = zoukowski_phi(Complex64::new(1.0, 0.0));
        assert!(matches!(r, Err(Error::BranchCutProximity { .. })));
    }

    #[test]
    fn window_enforced() {
        let r = plancherel_rotach_w(Complex64::new(0.4, 0.0), 100);
        assert!(matches!(r, Err(Error::DomainError(_))));
    }

    #[test]
    fn scaled_and_fixed_forms_coincide_at_zero() {
        // Corollary form at z = 0 is the scaled form at mu = 0.
        let a = plancherel_rotach_w(Complex64::new(0.0, 0.0), 137).unwrap();
        let b = w_fixed_z_asymptotic(Complex64::new(0.0, 0.0), 137).unwrap();
        assert!((a.log_scale - b.log_scale).abs() < 1e-9);
        assert!((a.value - b.value).norm() < 1e-9);
    }

    #[test]
    fn fixed_z_successive_phase_at_origin() {
        // ratio of consecutive leading terms at z = 0 carries phase pi/2
        let a = w_fixed_z_asymptotic(Complex64::new(0.0, 0.0), 51).unwrap();
        let b = w_fixed_z_asymptotic(Complex64::new(0.0, 0.0), 52).unwrap();
        let dphase = (b.value / a.value).arg() - 0.5 * std::f64::consts::PI;
        // compare phases of the mantissas only; magnitudes live in log_scale
        let wrapped = (dphase + std::f64::consts::PI).rem_euclid(2.0 * std::f64::consts::PI)
            - std::f64::consts::PI;
        assert!(wrapped.abs() < 1e-9, "{wrapped}");
    }

    #[test]
    fn leading_term_near_exact_at_large_order() {
        // mu = 0, n = 200: measured error well under the 1/sqrt(n) envelope
        let err = pr_relative_error(Complex64::new(0.0, 0.0), 200).unwrap();
        assert!(err <= 1.0 / (200.0f64).sqrt(), "err = {err:.3e}");
        assert!(err < 1e-3, "err = {err:.3e}");
        // fixed z = 0, n = 200: below 10%
        let err = fixed_z_relative_error(Complex64::new(0.0, 0.0), 200).unwrap();
        assert!(err < 0.10);
    }
}
