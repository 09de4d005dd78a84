//! Globally adaptive Gauss-Kronrod (7/15) quadrature on finite intervals.
//!
//! The integrand is fallible because most integrands here evaluate a profile
//! through a root solve.

use crate::error::{Result, SolitonError};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadratureOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-13,
            rel_tol: 1e-12,
            max_subdivisions: 2000,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadratureResult {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

fn kronrod15<F>(f: &mut F, lo: f64, hi: f64) -> Result<Segment>
where
    F: FnMut(f64) -> Result<f64>,
{
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center)?;
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let pair = f(center - dx)? + f(center + dx)?;
        kronrod += w * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Ok(Segment {
        lo,
        hi,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    })
}

/// Integrates `f` over `[lo, hi]`. Reversed limits flip the sign.
pub fn integrate<F>(mut f: F, lo: f64, hi: f64, opts: QuadratureOptions) -> Result<QuadratureResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    if lo == hi {
        return Ok(QuadratureResult {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        });
    }
    if hi < lo {
        let r = integrate(f, hi, lo, opts)?;
        return Ok(QuadratureResult {
            value: -r.value,
            ..r
        });
    }
    if !lo.is_finite() || !hi.is_finite() {
        return Err(SolitonError::Domain(format!(
            "quadrature limits must be finite, got [{lo}, {hi}]"
        )));
    }

    let mut segments = vec![kronrod15(&mut f, lo, hi)?];
    let mut evaluations = 15;
    loop {
        let value: f64 = segments.iter().map(|s| s.value).sum();
        let error: f64 = segments.iter().map(|s| s.error).sum();
        let target = opts.abs_tol.max(opts.rel_tol * value.abs());
        if error <= target {
            return Ok(QuadratureResult {
                value,
                error,
                evaluations,
            });
        }
        if segments.len() >= opts.max_subdivisions {
            return Err(SolitonError::Quadrature { lo, hi, error });
        }
        let (worst, _) = segments
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.error.total_cmp(&b.1.error))
            .expect("non-empty segment list");
        let seg = segments.swap_remove(worst);
        let mid = 0.5 * (seg.lo + seg.hi);
        if mid <= seg.lo || mid >= seg.hi {
            // Interval exhausted at floating-point resolution.
            return Err(SolitonError::Quadrature { lo, hi, error });
        }
        segments.push(kronrod15(&mut f, seg.lo, mid)?);
        segments.push(kronrod15(&mut f, mid, seg.hi)?);
        evaluations += 30;
    }
}
