//! Independent ground truth: the spectral measure of the N x N truncation,
//! computed by an implicit-shift QL sweep on the symmetric tridiagonal matrix
//! that accumulates only the first row of the orthogonal transform. The
//! squared first components are the weights of the truncated spectral
//! measure, which converges to the operator's measure; comparisons against
//! the reconstructed density happen at CDF level.

use crate::error::{Error, Result};
use crate::jacobi::JacobiOperator;
use crate::quad::{integrate_complex, integrate_real};
use num_complex::Complex64;

/// Eigenvalue/weight pairs of a truncated operator: the measure
/// sum_k weights[k] delta(nodes[k]).
#[derive(Debug, Clone)]
pub struct DiscreteMeasure {
    /// Strictly increasing eigenvalues of the truncation.
    pub nodes: Vec<f64>,
    /// Squared first components of the normalized eigenvectors; sum to 1.
    pub weights: Vec<f64>,
    pub size: usize,
    cumulative: Vec<f64>,
}

impl DiscreteMeasure {
    fn new(mut pairs: Vec<(f64, f64)>) -> Self {
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let nodes: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        let weights: Vec<f64> = pairs.iter().map(|p| p.1).collect();
        let mut cumulative = Vec::with_capacity(weights.len());
        let mut acc = 0.0;
        for w in &weights {
            acc += w;
            cumulative.push(acc);
        }
        let size = nodes.len();
        Self {
            nodes,
            weights,
            size,
            cumulative,
        }
    }

    /// Right-continuous distribution function: total weight of nodes <= x.
    pub fn cdf(&self, x: f64) -> f64 {
        match self
            .nodes
            .binary_search_by(|n| n.partial_cmp(&x).unwrap())
        {
            Ok(mut i) => {
                // land on the last of equal nodes
                while i + 1 < self.size && self.nodes[i + 1] <= x {
                    i += 1;
                }
                self.cumulative[i]
            }
            Err(0) => 0.0,
            Err(i) => self.cumulative[i - 1],
        }
    }

    pub fn support(&self) -> (f64, f64) {
        (self.nodes[0], self.nodes[self.size - 1])
    }
}

/// Spectral measure of the N x N leading principal submatrix.
pub fn truncated_measure(op: &JacobiOperator, n: usize) -> Result<DiscreteMeasure> {
    if n == 0 || n > 20_000 {
        return Err(Error::InvalidArgument(
            "truncation size must lie in 1..=20000".into(),
        ));
    }
    if n > op.horizon() {
        return Err(Error::IndexCoverage(format!(
            "truncation {} exceeds operator horizon {}",
            n,
            op.horizon()
        )));
    }
    let mut diag: Vec<f64> = (1..=n).map(|k| op.b(k)).collect();
    let mut off: Vec<f64> = (1..n).map(|k| op.a(k)).collect();
    let mut first_row = vec![0.0; n];
    first_row[0] = 1.0;
    tridiag_ql_first_row(&mut diag, &mut off, &mut first_row)?;
    let pairs: Vec<(f64, f64)> = diag
        .into_iter()
        .zip(first_row.into_iter().map(|z| z * z))
        .collect();
    Ok(DiscreteMeasure::new(pairs))
}

/// Implicit-shift QL with Wilkinson shift on a symmetric tridiagonal matrix,
/// rotating a single accumulation row along with the matrix. On return `d`
/// holds the eigenvalues (unsorted) and `z` the first components of the
/// corresponding normalized eigenvectors.
fn tridiag_ql_first_row(d: &mut [f64], e: &mut [f64], z: &mut [f64]) -> Result<()> {
    let n = d.len();
    if n == 1 {
        return Ok(());
    }
    let mut work = vec![0.0f64; n];
    work[..n - 1].copy_from_slice(e);
    let eps = f64::EPSILON;
    for l in 0..n {
        let mut iter = 0usize;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if work[m].abs() <= eps * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::EigensolverStuck { index: l });
            }
            // Wilkinson shift from the leading 2x2
            let mut g = (d[l + 1] - d[l]) / (2.0 * work[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + work[l] / (g + r.copysign(g));
            let mut s = 1.0f64;
            let mut c = 1.0f64;
            let mut p = 0.0f64;
            let mut underflow = false;
            for i in (l..m).rev() {
                let mut f = s * work[i];
                let b = c * work[i];
                r = f.hypot(g);
                work[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    work[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                // rotate the accumulation row in columns (i, i+1)
                f = z[i + 1];
                z[i + 1] = s * z[i] + c * f;
                z[i] = c * z[i] - s * f;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            work[l] = g;
            work[m] = 0.0;
        }
    }
    Ok(())
}

/// Largest CDF deviation over `grid` between a discrete measure and the
/// integral of `density`. Grid points are nudged at least 1e-9 away from the
/// atoms so the right-continuous convention is unambiguous, and must lie
/// strictly inside the support hull of the measure.
pub fn cdf_compare<F: Fn(f64) -> f64>(
    measure: &DiscreteMeasure,
    density: F,
    grid: &[f64],
) -> Result<f64> {
    let (lo_node, hi_node) = measure.support();
    let mut xs: Vec<f64> = Vec::with_capacity(grid.len());
    for &x in grid {
        if x <= lo_node || x >= hi_node {
            return Err(Error::InvalidArgument(format!(
                "grid point {x} outside the measure support ({lo_node:.3}, {hi_node:.3})"
            )));
        }
        xs.push(nudge_off_nodes(measure, x));
    }
    let mut sorted = xs.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    // integrate the density left to right, reusing the accumulated prefix
    let start = sorted[0].min(-10.0) - 2.0;
    let mut acc = 0.0;
    let mut prev = start;
    let mut integral_at = std::collections::BTreeMap::new();
    for &x in &sorted {
        if x > prev {
            let (seg, _) = integrate_real(&density, prev, x, 1e-7, 1e-9, 2000)?;
            acc += seg;
            prev = x;
        }
        integral_at.insert(x.to_bits(), acc);
    }
    let mut worst = 0.0f64;
    for &x in &xs {
        let cdf_density = integral_at[&x.to_bits()];
        let dev = (measure.cdf(x) - cdf_density).abs();
        worst = worst.max(dev);
    }
    Ok(worst)
}

fn nudge_off_nodes(measure: &DiscreteMeasure, x: f64) -> f64 {
    let mut y = x;
    for _ in 0..8 {
        let near = match measure
            .nodes
            .binary_search_by(|n| n.partial_cmp(&y).unwrap())
        {
            Ok(i) => Some(i),
            Err(i) => {
                let mut close = None;
                if i < measure.size && (measure.nodes[i] - y).abs() < 1e-9 {
                    close = Some(i);
                }
                if i > 0 && (y - measure.nodes[i - 1]).abs() < 1e-9 {
                    close = Some(i - 1);
                }
                close
            }
        };
        match near {
            None => return y,
            Some(_) => y += 1e-9,
        }
    }
    y
}

/// Cauchy transform of a density at lambda off the real axis,
/// m(lambda) = int density(x) / (x - lambda) dx, for Im lambda >= 0.05.
///
/// Integrates over doubling windows until the increment is negligible, so
/// densities with Gaussian-type decay need no explicit support bounds.
pub fn herglotz_quadrature<F: Fn(f64) -> f64>(density: F, lambda: Complex64) -> Result<Complex64> {
    if lambda.im < 0.05 {
        return Err(Error::DomainError(
            "Im lambda must be >= 0.05 to keep the pole away from the contour".into(),
        ));
    }
    let f = |x: f64| Complex64::new(density(x), 0.0) / (Complex64::new(x, 0.0) - lambda);
    let mut total = integrate_complex(f, -8.0, 8.0, 1e-10, 1e-13, 4000)?.value;
    let mut reach = 8.0f64;
    loop {
        let left = integrate_complex(f, -2.0 * reach, -reach, 1e-8, 1e-14, 2000)?.value;
        let right = integrate_complex(f, reach, 2.0 * reach, 1e-8, 1e-14, 2000)?.value;
        total += left + right;
        reach *= 2.0;
        if (left.norm() + right.norm()) < 1e-12 * total.norm().max(1e-6) || reach > 128.0 {
            break;
        }
    }
    Ok(total)
}

/// One step of inverse iteration at `shift` on the truncation of `op`,
/// returning the relative residual ||T v - shift v|| / ||v||. Used to verify
/// solver eigenvalues independently.
pub fn inverse_iteration_residual(op: &JacobiOperator, n: usize, shift: f64) -> Result<f64> {
    if n < 2 || n > op.horizon() {
        return Err(Error::InvalidArgument("bad truncation size".into()));
    }
    let diag: Vec<f64> = (1..=n).map(|k| op.b(k)).collect();
    let off: Vec<f64> = (1..n).map(|k| op.a(k)).collect();
    // deterministic seed vector
    let mut v: Vec<f64> = (0..n)
        .map(|i| (0.3 + 0.7 * ((i * 2654435761) % 1000) as f64 / 1000.0) * if i % 2 == 0 { 1.0 } else { -1.0 })
        .collect();
    normalize(&mut v);
    for _ in 0..3 {
        v = solve_shifted_tridiag(&diag, &off, shift, &v)?;
        normalize(&mut v);
    }
    // residual of the eigen equation
    let mut res = 0.0f64;
    for i in 0..n {
        let mut t = (diag[i] - shift) * v[i];
        if i > 0 {
            t += off[i - 1] * v[i - 1];
        }
        if i + 1 < n {
            t += off[i] * v[i + 1];
        }
        res += t * t;
    }
    Ok(res.sqrt())
}

fn normalize(v: &mut [f64]) {
    let n: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
}

/// Solve (T - shift I) x = b for tridiagonal T by elimination with partial
/// pivoting between adjacent rows (two superdiagonals appear after swaps).
fn solve_shifted_tridiag(diag: &[f64], off: &[f64], shift: f64, b: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    let scale: f64 = diag
        .iter()
        .chain(off.iter())
        .fold(0.0f64, |m, &v| m.max(v.abs()))
        .max(1.0);
    let tiny = f64::EPSILON * scale;
    let mut d: Vec<f64> = diag.iter().map(|v| v - shift).collect();
    let mut du = vec![0.0f64; n]; // first superdiagonal
    let mut du2 = vec![0.0f64; n]; // second superdiagonal (filled by swaps)
    du[..n - 1].copy_from_slice(off);
    let mut rhs = b.to_vec();
    for i in 0..n - 1 {
        let sub = off[i];
        if d[i].abs() >= sub.abs() {
            let pivot = if d[i] == 0.0 { tiny } else { d[i] };
            let fact = sub / pivot;
            d[i] = pivot;
            d[i + 1] -= fact * du[i];
            rhs[i + 1] -= fact * rhs[i];
        } else {
            // swap rows i and i+1
            let fact = d[i] / sub;
            d[i] = sub;
            let tmp = d[i + 1];
            d[i + 1] = du[i] - fact * tmp;
            du[i] = tmp;
            if i + 1 < n - 1 {
                du2[i] = du[i + 1];
                du[i + 1] *= -fact;
            }
            rhs.swap(i, i + 1);
            rhs[i + 1] -= fact * rhs[i];
        }
    }
    if d[n - 1] == 0.0 {
        d[n - 1] = tiny;
    }
    let mut x = vec![0.0f64; n];
    x[n - 1] = rhs[n - 1] / d[n - 1];
    if n >= 2 {
        x[n - 2] = (rhs[n - 2] - du[n - 2] * x[n - 1]) / d[n - 2];
    }
    for i in (0..n.saturating_sub(2)).rev() {
        x[i] = (rhs[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / d[i];
    }
    Ok(x)
}
