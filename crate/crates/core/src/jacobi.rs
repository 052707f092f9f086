//! Perturbed operator model: weight sequences a_n = sqrt(n) + c_n and a real
//! diagonal b_n, the summability check
//!
//!   sum_n ( |c_n|/n + (|c_{n+1} - c_n| + |b_n|)/sqrt(n) ) < infinity,
//!
//! the perturbation expression Lambda (the difference between the perturbed
//! and free tridiagonal actions), and the forward solver for the polynomials
//! of the first and second kind.

use crate::error::{Error, Result};
use crate::freeop::{guard_growth, SequenceKind, SolutionSequence};
use crate::util::KahanSum;
use num_complex::Complex64;

/// Behaviour of a tabulated family past the end of its table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailRule {
    /// The sequence is declared to vanish beyond the table.
    Zero,
    /// Nothing is known beyond the table; admissibility stays inconclusive.
    Unknown,
}

/// Parametric rule n -> c_n (or n -> b_n).
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    Zero,
    /// Constant value; never admissible unless zero, kept for rejection tests.
    Const(f64),
    /// amplitude * n^{-exponent}, exponent > 0.
    Power { amplitude: f64, exponent: f64 },
    /// sqrt(n + shift) - sqrt(n).
    SqrtShift { shift: f64 },
    /// Finitely many explicit leading values, zero afterwards.
    Finite(Vec<f64>),
    /// Values read from a file, with a declared tail rule.
    Tabulated { values: Vec<f64>, tail: TailRule },
    /// c-family of a cropped operator: sqrt(n+1) - sqrt(n) + inner(n+1).
    CroppedWeight(Box<Family>),
    /// b-family of a cropped operator: inner(n+1).
    ShiftedByOne(Box<Family>),
}

impl Family {
    pub fn eval(&self, n: usize) -> f64 {
        debug_assert!(n >= 1);
        let nf = n as f64;
        match self {
            Family::Zero => 0.0,
            Family::Const(v) => *v,
            Family::Power { amplitude, exponent } => {
                if (*exponent - 0.5).abs() < 1e-15 {
                    amplitude / nf.sqrt()
                } else if (*exponent - 1.0).abs() < 1e-15 {
                    amplitude / nf
                } else {
                    amplitude * nf.powf(-exponent)
                }
            }
            Family::SqrtShift { shift } => (nf + shift).sqrt() - nf.sqrt(),
            Family::Finite(v) => v.get(n - 1).copied().unwrap_or(0.0),
            Family::Tabulated { values, .. } => values.get(n - 1).copied().unwrap_or(0.0),
            Family::CroppedWeight(inner) => {
                ((nf + 1.0).sqrt() - nf.sqrt()) + inner.eval(n + 1)
            }
            Family::ShiftedByOne(inner) => inner.eval(n + 1),
        }
    }

    /// Analytic convergence verdict of this family's contribution to the
    /// admissibility series, where one is available: Some(true) convergent,
    /// Some(false) divergent, None unknown (tabulated without a tail rule).
    fn analytic_verdict(&self, as_weight: bool) -> Option<bool> {
        match self {
            Family::Zero => Some(true),
            Family::Const(v) => Some(*v == 0.0),
            Family::Power { amplitude, exponent } => {
                if *amplitude == 0.0 {
                    Some(true)
                } else if as_weight {
                    // |c_n|/n ~ n^{-1-p} and differences ~ n^{-p-3/2}: any p>0
                    Some(*exponent > 0.0)
                } else {
                    // sum |b_n| / sqrt(n) = sum n^{-q-1/2}
                    Some(*exponent > 0.5)
                }
            }
            Family::SqrtShift { shift } => {
                if *shift == 0.0 {
                    Some(true)
                } else if as_weight {
                    Some(true) // c_n ~ k/(2 sqrt n): terms ~ n^{-3/2}
                } else {
                    Some(false) // b_n/sqrt(n) ~ k/(2n) diverges
                }
            }
            Family::Finite(_) => Some(true),
            Family::Tabulated { tail, .. } => match tail {
                TailRule::Zero => Some(true),
                TailRule::Unknown => None,
            },
            Family::CroppedWeight(inner) => match inner.analytic_verdict(as_weight) {
                Some(true) => Some(true),
                other => other, // sqrt-shift part alone converges
            },
            Family::ShiftedByOne(inner) => inner.analytic_verdict(as_weight),
        }
    }

    /// Upper bound for the tail (from index N+1 on) of this family's
    /// contribution to the admissibility series, when analytically available.
    fn analytic_tail(&self, n: usize, as_weight: bool) -> Option<f64> {
        let nf = n as f64;
        match self {
            Family::Zero => Some(0.0),
            Family::Const(v) => {
                if *v == 0.0 {
                    Some(0.0)
                } else {
                    None
                }
            }
            Family::Power { amplitude, exponent } => {
                let a = amplitude.abs();
                let p = *exponent;
                if a == 0.0 {
                    return Some(0.0);
                }
                if as_weight {
                    // sum_{k>N} a k^{-1-p} <= a N^{-p}/p ; difference part
                    // sum a p k^{-p-3/2} <= a p N^{-p-1/2}/(p+1/2)
                    Some(a * nf.powf(-p) / p + a * p * nf.powf(-p - 0.5) / (p + 0.5))
                } else if p > 0.5 {
                    Some(a * nf.powf(0.5 - p) / (p - 0.5))
                } else {
                    None
                }
            }
            Family::SqrtShift { shift } => {
                let k = shift.abs();
                if as_weight {
                    // |c_k|/k <= s/(2 k^{3/2}); |dc_k| <= s/(4 k^{3/2})
                    Some(k * nf.powf(-0.5) + 0.25 * k / nf)
                } else {
                    if k == 0.0 {
                        Some(0.0)
                    } else {
                        None
                    }
                }
            }
            Family::Finite(v) => {
                if n >= v.len() {
                    Some(0.0)
                } else {
                    None
                }
            }
            Family::Tabulated { values, tail } => match tail {
                TailRule::Zero if n >= values.len() => Some(0.0),
                _ => None,
            },
            Family::CroppedWeight(inner) => {
                let shift_part = Family::SqrtShift { shift: 1.0 }.analytic_tail(n, as_weight)?;
                let inner_part = inner.analytic_tail(n, as_weight)?;
                Some(shift_part + inner_part)
            }
            Family::ShiftedByOne(inner) => inner.analytic_tail(n, as_weight),
        }
    }
}

/// Defines c_n = a_n - sqrt(n) and the diagonal b_n.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationSpec {
    pub c: Family,
    pub b: Family,
    pub description: String,
}

impl PerturbationSpec {
    pub fn new(c: Family, b: Family, description: impl Into<String>) -> Self {
        Self {
            c,
            b,
            description: description.into(),
        }
    }

    pub fn free() -> Self {
        Self::new(Family::Zero, Family::Zero, "free operator")
    }

    pub fn c_at(&self, n: usize) -> f64 {
        self.c.eval(n)
    }

    pub fn b_at(&self, n: usize) -> f64 {
        self.b.eval(n)
    }

    pub fn a_at(&self, n: usize) -> f64 {
        (n as f64).sqrt() + self.c_at(n)
    }

    /// Spec of the operator with the first row and column removed:
    /// a'_n = a_{n+1}, b'_n = b_{n+1}, so c'_n = sqrt(n+1) - sqrt(n) + c_{n+1}.
    pub fn cropped(&self) -> Self {
        Self {
            c: Family::CroppedWeight(Box::new(self.c.clone())),
            b: Family::ShiftedByOne(Box::new(self.b.clone())),
            description: format!("{} (cropped)", self.description),
        }
    }

    /// Summand of the admissibility series at index n.
    pub fn admissibility_summand(&self, n: usize) -> f64 {
        let nf = n as f64;
        let c_n = self.c_at(n);
        let c_next = self.c_at(n + 1);
        let b_n = self.b_at(n);
        c_n.abs() / nf + ((c_next - c_n).abs() + b_n.abs()) / nf.sqrt()
    }
}

/// Verdict and evidence of the admissibility check.
#[derive(Debug, Clone)]
pub struct AdmissibilityReport {
    pub passes: bool,
    /// Partial sum of the admissibility series up to the horizon.
    pub partial_sum: f64,
    /// Analytic bound for the remainder past the horizon, when available.
    pub tail_bound: Option<f64>,
    /// Whether c_n / sqrt(n) trends to zero.
    pub small_o_check: bool,
    /// Analytic convergence verdict, when one exists for the families.
    pub analytic: Option<bool>,
    /// Whether the partial sums saturated numerically over the last decade.
    pub saturated: bool,
    /// Neither analytic nor saturation evidence resolved the verdict.
    pub inconclusive: bool,
}

/// Check the summability conditions up to `horizon` (>= 1000).
pub fn check_conditions(spec: &PerturbationSpec, horizon: usize) -> Result<AdmissibilityReport> {
    if horizon < 1000 {
        return Err(Error::InvalidArgument(
            "admissibility horizon must be >= 1000".into(),
        ));
    }
    let mut sum = KahanSum::new();
    let mut sum_at_decade_start = 0.0;
    let decade_start = horizon - horizon / 10;
    for n in 1..=horizon {
        if n == decade_start {
            sum_at_decade_start = sum.value();
        }
        sum.add(spec.admissibility_summand(n));
    }
    let partial_sum = sum.value();
    let increment = partial_sum - sum_at_decade_start;
    let saturated = increment <= 1e-9 * partial_sum.max(1e-300);

    let analytic = match (
        spec.c.analytic_verdict(true),
        spec.b.analytic_verdict(false),
    ) {
        (Some(a), Some(b)) => Some(a && b),
        _ => None,
    };
    let tail_bound = match (
        spec.c.analytic_tail(horizon, true),
        spec.b.analytic_tail(horizon, false),
    ) {
        (Some(a), Some(b)) => Some(a + b),
        _ => None,
    };

    // c_n = o(sqrt n): compare |c_n|/sqrt(n) averaged over the last decade
    // against the decade two octaves earlier, or accept an analytic family.
    let small_o_check = match &spec.c {
        Family::Zero | Family::Finite(_) | Family::SqrtShift { .. } => true,
        Family::Power { amplitude, exponent } => *amplitude == 0.0 || *exponent > -0.5,
        Family::Const(v) => *v == 0.0,
        _ => {
            let avg = |lo: usize, hi: usize| {
                let mut s = 0.0;
                for n in lo..hi {
                    s += spec.c_at(n).abs() / (n as f64).sqrt();
                }
                s / (hi - lo) as f64
            };
            let late = avg(decade_start, horizon);
            let early = avg(horizon / 4, horizon / 4 + horizon / 10);
            late <= 0.9 * early || late < 1e-12
        }
    };

    let passes = match analytic {
        Some(v) => v && small_o_check,
        None => saturated && small_o_check,
    };
    let inconclusive = analytic.is_none() && !saturated;
    Ok(AdmissibilityReport {
        passes,
        partial_sum,
        tail_bound,
        small_o_check,
        analytic,
        saturated,
        inconclusive,
    })
}

/// Operator with cached coefficient prefix.
#[derive(Debug, Clone)]
pub struct JacobiOperator {
    pub spec: PerturbationSpec,
    horizon: usize,
    a: Vec<f64>,
    b: Vec<f64>,
    c: Vec<f64>,
    /// The Carleman condition sum 1/a_n = infinity holds automatically for
    /// weights of the shape sqrt(n) + o(sqrt n); recorded for reporting.
    pub carleman_divergent: bool,
}

/// Build the operator, verifying positivity of every cached weight.
pub fn build_operator(spec: &PerturbationSpec, horizon: usize) -> Result<JacobiOperator> {
    if horizon < 10 {
        return Err(Error::InvalidArgument("horizon must be >= 10".into()));
    }
    let mut a = Vec::with_capacity(horizon);
    let mut b = Vec::with_capacity(horizon);
    let mut c = Vec::with_capacity(horizon);
    for n in 1..=horizon {
        let cn = spec.c_at(n);
        let an = (n as f64).sqrt() + cn;
        if !(an > 0.0) {
            return Err(Error::NonPositiveWeight { index: n, value: an });
        }
        a.push(an);
        b.push(spec.b_at(n));
        c.push(cn);
    }
    Ok(JacobiOperator {
        spec: spec.clone(),
        horizon,
        a,
        b,
        c,
        carleman_divergent: true,
    })
}

impl JacobiOperator {
    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// a_n, 1-based, panics past the horizon.
    pub fn a(&self, n: usize) -> f64 {
        self.a[n - 1]
    }

    pub fn b(&self, n: usize) -> f64 {
        self.b[n - 1]
    }

    pub fn c(&self, n: usize) -> f64 {
        self.c[n - 1]
    }

    /// Weight prefix a_1..a_n as a slice for Wronskian evaluation.
    pub fn weight_prefix(&self, n: usize) -> &[f64] {
        &self.a[..n]
    }

    pub fn cropped(&self, horizon: usize) -> Result<JacobiOperator> {
        build_operator(&self.spec.cropped(), horizon)
    }

    /// Tridiagonal action (J u)_n for a finitely-supported u given as a slice
    /// with u[k] = u_{k+1}; entries outside the slice are zero.
    pub fn apply(&self, u: &[Complex64], n: usize) -> Complex64 {
        let get = |i: usize| -> Complex64 {
            if i >= 1 && i <= u.len() {
                u[i - 1]
            } else {
                Complex64::new(0.0, 0.0)
            }
        };
        if n == 1 {
            self.b(1) * get(1) + self.a(1) * get(2)
        } else {
            self.a(n - 1) * get(n - 1) + self.b(n) * get(n) + self.a(n) * get(n + 1)
        }
    }
}

/// Free tridiagonal action with weights sqrt(n), zero diagonal.
pub fn apply_free(u: &[Complex64], n: usize) -> Complex64 {
    let get = |i: usize| -> Complex64 {
        if i >= 1 && i <= u.len() {
            u[i - 1]
        } else {
            Complex64::new(0.0, 0.0)
        }
    };
    if n == 1 {
        get(2)
    } else {
        ((n - 1) as f64).sqrt() * get(n - 1) + (n as f64).sqrt() * get(n + 1)
    }
}

/// The perturbation Lambda = J - J0 applied to a solution sequence:
/// (Lambda u)_1 = b_1 u_1 + c_1 u_2,
/// (Lambda u)_n = c_{n-1} u_{n-1} + b_n u_n + c_n u_{n+1} for n >= 2.
///
/// Returns entries 1..=n_max; `u` must cover 1..=n_max+1.
pub fn apply_lambda(
    op: &JacobiOperator,
    u: &SolutionSequence,
    n_max: usize,
) -> Result<Vec<Complex64>> {
    if u.start_index != 1 || !u.covers(n_max + 1) {
        return Err(Error::IndexCoverage(format!(
            "sequence must cover 1..={}",
            n_max + 1
        )));
    }
    if n_max > op.horizon() {
        return Err(Error::IndexCoverage(format!(
            "n_max {} exceeds operator horizon {}",
            n_max,
            op.horizon()
        )));
    }
    let mut out = Vec::with_capacity(n_max);
    out.push(op.b(1) * u.value(1) + op.c(1) * u.value(2));
    for n in 2..=n_max {
        out.push(op.c(n - 1) * u.value(n - 1) + op.b(n) * u.value(n) + op.c(n) * u.value(n + 1));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolyKind {
    First,
    Second,
}

/// Forward recurrence for the polynomials of the first (P_1 = 1,
/// P_2 = (lambda - b_1)/a_1) or second kind (Q_1 = 0, Q_2 = 1/a_1).
pub fn solve_recurrence(
    op: &JacobiOperator,
    lambda: Complex64,
    kind: PolyKind,
    n_max: usize,
) -> Result<SolutionSequence> {
    if n_max < 2 {
        return Err(Error::InvalidArgument("n_max must be >= 2".into()));
    }
    if n_max > op.horizon() {
        return Err(Error::IndexCoverage(format!(
            "n_max {} exceeds operator horizon {}",
            n_max,
            op.horizon()
        )));
    }
    guard_growth(lambda, n_max)?;
    let mut v = Vec::with_capacity(n_max);
    match kind {
        PolyKind::First => {
            v.push(Complex64::new(1.0, 0.0));
            v.push((lambda - op.b(1)) / op.a(1));
        }
        PolyKind::Second => {
            v.push(Complex64::new(0.0, 0.0));
            v.push(Complex64::new(1.0 / op.a(1), 0.0));
        }
    }
    for n in 2..n_max {
        let next = ((lambda - op.b(n)) * v[n - 1] - op.a(n - 1) * v[n - 2]) / op.a(n);
        v.push(next);
    }
    Ok(SolutionSequence {
        lambda,
        start_index: 1,
        values: v,
        kind: match kind {
            PolyKind::First => SequenceKind::P,
            PolyKind::Second => SequenceKind::Q,
        },
    })
}

/// Parse a perturbation table: one line per index, `n c_n b_n`, 1-based and
/// contiguous. Returns the (c, b) family pair with the given tail rule.
pub fn parse_perturbation_file(text: &str, tail: TailRule) -> Result<(Family, Family)> {
    let mut cs = Vec::new();
    let mut bs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected `n c_n b_n`, found {} fields", fields.len()),
            });
        }
        let n: usize = fields[0].parse().map_err(|_| Error::Parse {
            line: line_no,
            message: format!("bad index `{}`", fields[0]),
        })?;
        if n != cs.len() + 1 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("indices must be 1-based contiguous; expected {}", cs.len() + 1),
            });
        }
        let c: f64 = fields[1].parse().map_err(|_| Error::Parse {
            line: line_no,
            message: format!("bad c value `{}`", fields[1]),
        })?;
        let b: f64 = fields[2].parse().map_err(|_| Error::Parse {
            line: line_no,
            message: format!("bad b value `{}`", fields[2]),
        })?;
        cs.push(c);
        bs.push(b);
    }
    if cs.is_empty() {
        return Err(Error::Parse {
            line: 0,
            message: "empty perturbation table".into(),
        });
    }
    Ok((
        Family::Tabulated { values: cs, tail },
        Family::Tabulated { values: bs, tail },
    ))
}
