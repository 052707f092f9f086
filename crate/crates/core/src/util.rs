//! Small numeric helpers shared across the crate.

use num_complex::Complex64;

/// Compensated (Kahan) accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    carry: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

/// Compensated complex accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanComplex {
    re: KahanSum,
    im: KahanSum,
}

impl KahanComplex {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

/// Cumulative table of ln(k!) for k = 0..=n, Kahan-compensated so the
/// accumulated rounding stays at the few-ulp level even for n ~ 1e6.
pub fn ln_factorial_table(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = KahanSum::new();
    out.push(0.0);
    for k in 1..=n {
        acc.add((k as f64).ln());
        out.push(acc.value());
    }
    out
}

/// Least-squares fit of y ~ a + b*x. Returns (a, b, rms residual).
pub fn fit_affine(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    let det = n * sxx - sx * sx;
    let b = (n * sxy - sx * sy) / det;
    let a = (sy - b * sx) / n;
    let rms = (xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - (a + b * x);
            r * r
        })
        .sum::<f64>()
        / n)
        .sqrt();
    (a, b, rms)
}

/// Slope of the log-log regression of ys against xs.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    fit_affine(&lx, &ly).1
}

/// Neville extrapolation of (x_i, y_i) to x = 0.
///
/// Returns the extrapolated value together with the distance between the last
/// two diagonal entries of the tableau, which serves as the consistency-based
/// error estimate.
pub fn neville_with_estimate(xs: &[f64], ys: &[Complex64]) -> (Complex64, f64) {
    let n = xs.len();
    assert!(n >= 2 && n == ys.len());
    let mut rows: Vec<Vec<Complex64>> = vec![ys.to_vec()];
    for j in 1..n {
        let prev = &rows[j - 1];
        let mut cur = Vec::with_capacity(n - j);
        for i in 0..n - j {
            let num = xs[i] * prev[i + 1] - xs[i + j] * prev[i];
            cur.push(num / (xs[i] - xs[i + j]));
        }
        rows.push(cur);
    }
    let best = rows[n - 1][0];
    let prev = rows[n - 2][0];
    (best, (best - prev).norm())
}

/// Format a float with 17 significant digits, enough to round-trip f64.
pub fn fmt_g17(x: f64) -> String {
    format!("{:.16e}", x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kahan_beats_naive_on_harmonic_tail() {
        let mut k = KahanSum::new();
        for i in 1..=1_000_000u64 {
            k.add(1.0 / i as f64);
        }
        // reference value of H_1e6 to 15 digits
        assert!((k.value() - 14.392726722865724).abs() < 1e-12);
    }

    #[test]
    fn ln_factorial_matches_direct_products() {
        let t = ln_factorial_table(20);
        let mut f = 1.0f64;
        for k in 1..=20 {
            f *= k as f64;
            assert!((t[k] - f.ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn affine_fit_recovers_exact_line() {
        let xs: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 - 0.5 * x).collect();
        let (a, b, rms) = fit_affine(&xs, &ys);
        assert!((a - 3.0).abs() < 1e-12 && (b + 0.5).abs() < 1e-12 && rms < 1e-12);
    }

    #[test]
    fn neville_extrapolates_polynomial_exactly() {
        // y(x) = 2 + x + 4x^3 sampled at four nodes extrapolates to exactly 2.
        let xs = [0.4, 0.2, 0.1, 0.05];
        let ys: Vec<Complex64> = xs
            .iter()
            .map(|&x| Complex64::new(2.0 + x + 4.0 * x * x * x, 0.0))
            .collect();
        let (v, err) = neville_with_estimate(&xs, &ys);
        assert!((v.re - 2.0).abs() < 1e-13, "{v} {err}");
    }

    #[test]
    fn g17_round_trips() {
        for &x in &[0.1, std::f64::consts::PI, 1.0 / 3.0, 2.5e-300, -7.1e200] {
            let s = fmt_g17(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{s}");
        }
    }
}
