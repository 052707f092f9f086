//! Adaptive Gauss-Kronrod quadrature for complex-valued integrands of a real
//! variable. 15-point Kronrod rule with 7-point Gauss embedding, globally
//! adaptive bisection of the worst segment.

use crate::error::{Error, Result};
use num_complex::Complex64;

// QUADPACK qk15 nodes and weights.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: Complex64,
    pub abs_error: f64,
    pub evaluations: usize,
}

fn qk15_complex<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        let fsum = f1 + f2;
        kronrod += fsum * WGK[j];
        if j % 2 == 1 {
            gauss += fsum * WG[j / 2];
        }
    }
    let err = ((kronrod - gauss) * half).norm();
    (kronrod * half, err)
}

/// Integrate `f` over `[a, b]` to the requested absolute/relative tolerance.
///
/// Bisects the segment with the largest error estimate until the summed
/// estimate satisfies the tolerance or the segment budget is exhausted.
pub fn integrate_complex<F: Fn(f64) -> Complex64>(
    f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
    max_segments: usize,
) -> Result<QuadResult> {
    struct Seg {
        a: f64,
        b: f64,
        value: Complex64,
        err: f64,
    }
    let (v0, e0) = qk15_complex(&f, a, b);
    let mut segs = vec![Seg {
        a,
        b,
        value: v0,
        err: e0,
    }];
    let mut evals = 15usize;
    loop {
        let mut total = Complex64::new(0.0, 0.0);
        let mut err = 0.0;
        let mut worst = 0usize;
        let mut worst_err = -1.0;
        for (i, s) in segs.iter().enumerate() {
            total += s.value;
            err += s.err;
            if s.err > worst_err {
                worst_err = s.err;
                worst = i;
            }
        }
        let bound = abs_tol.max(rel_tol * total.norm());
        if err <= bound {
            return Ok(QuadResult {
                value: total,
                abs_error: err,
                evaluations: evals,
            });
        }
        if segs.len() >= max_segments {
            return Err(Error::QuadratureNotConverged {
                estimate: err,
                segments: segs.len(),
            });
        }
        let Seg { a, b, .. } = segs.swap_remove(worst);
        let mid = 0.5 * (a + b);
        let (v1, e1) = qk15_complex(&f, a, mid);
        let (v2, e2) = qk15_complex(&f, mid, b);
        evals += 30;
        segs.push(Seg {
            a,
            b: mid,
            value: v1,
            err: e1,
        });
        segs.push(Seg {
            a: mid,
            b,
            value: v2,
            err: e2,
        });
    }
}

/// Real-valued convenience wrapper around [`integrate_complex`].
pub fn integrate_real<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
    max_segments: usize,
) -> Result<(f64, f64)> {
    let r = integrate_complex(
        |x| Complex64::new(f(x), 0.0),
        a,
        b,
        rel_tol,
        abs_tol,
        max_segments,
    )?;
    Ok((r.value.re, r.abs_error))
}
