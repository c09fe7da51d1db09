//! Adaptive Gauss-Kronrod (G10/K21) quadrature for complex-valued integrands.

use num_complex::Complex64;

use crate::error::{Error, Result};

// Kronrod abscissae; odd indices are the 10-point Gauss nodes.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_1,
    0.973_906_528_517_171_7,
    0.930_157_491_355_708_2,
    0.865_063_366_688_984_5,
    0.780_817_726_586_416_9,
    0.679_409_568_299_024_4,
    0.562_757_134_668_604_7,
    0.433_395_394_129_247_2,
    0.294_392_862_701_460_2,
    0.148_874_338_981_631_22,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874,
    0.032_558_162_307_964_725,
    0.054_755_896_574_351_995,
    0.075_039_674_810_919_96,
    0.093_125_454_583_697_6,
    0.109_387_158_802_297_64,
    0.123_491_976_262_065_84,
    0.134_709_217_311_473_34,
    0.142_775_938_577_060_09,
    0.147_739_104_901_338_49,
    0.149_445_554_002_916_9,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_14,
    0.149_451_349_150_580_6,
    0.219_086_362_515_982_04,
    0.269_266_719_309_996_35,
    0.295_524_224_714_752_87,
];

/// Maximum number of live subintervals before giving up.
pub const DEFAULT_MAX_SEGMENTS: usize = 4000;

#[derive(Debug, Clone, Copy)]
pub struct QuadratureResult {
    pub value: Complex64,
    pub error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

fn gauss_kronrod<F>(f: &F, a: f64, b: f64) -> Segment
where
    F: Fn(f64) -> Complex64,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[10];
    let mut gauss = Complex64::new(0.0, 0.0);
    for i in 0..10 {
        let dx = half * XGK[i];
        let pair = f(center - dx) + f(center + dx);
        kronrod += pair * WGK[i];
        if i % 2 == 1 {
            gauss += pair * WG[i / 2];
        }
    }
    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).norm();
    Segment { a, b, value, error }
}

/// Integrates `f` over `[a, b]` until the summed error estimate is at most `tol`.
///
/// The interval is pre-split into `initial_panels` equal pieces, which keeps
/// oscillatory integrands at roughly one period per panel from the start.
pub fn integrate<F>(f: F, a: f64, b: f64, tol: f64, initial_panels: usize) -> Result<QuadratureResult>
where
    F: Fn(f64) -> Complex64,
{
    integrate_with_budget(f, a, b, tol, initial_panels, DEFAULT_MAX_SEGMENTS)
}

pub fn integrate_with_budget<F>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
    initial_panels: usize,
    max_segments: usize,
) -> Result<QuadratureResult>
where
    F: Fn(f64) -> Complex64,
{
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(Error::domain(format!("quadrature tolerance must be positive, got {tol}")));
    }
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::domain("quadrature bounds must be finite"));
    }
    if a == b {
        return Ok(QuadratureResult { value: Complex64::new(0.0, 0.0), error: 0.0, evaluations: 0 });
    }
    let panels = initial_panels.max(1);
    let width = (b - a) / panels as f64;
    let mut segments: Vec<Segment> = (0..panels)
        .map(|i| {
            let lo = a + width * i as f64;
            let hi = if i + 1 == panels { b } else { a + width * (i + 1) as f64 };
            gauss_kronrod(&f, lo, hi)
        })
        .collect();
    let mut evaluations = 21 * panels;

    loop {
        let error: f64 = segments.iter().map(|s| s.error).sum();
        if error <= tol {
            let value = segments.iter().fold(Complex64::new(0.0, 0.0), |acc, s| acc + s.value);
            return Ok(QuadratureResult { value, error, evaluations });
        }
        if segments.len() >= max_segments {
            return Err(Error::Numeric {
                message: format!("subinterval budget {max_segments} exhausted on [{a}, {b}]"),
                estimate: error,
            });
        }
        let (worst, _) =
            segments.iter().enumerate().max_by(|x, y| x.1.error.total_cmp(&y.1.error)).expect("at least one segment");
        let seg = segments.swap_remove(worst);
        let mid = 0.5 * (seg.a + seg.b);
        if mid <= seg.a || mid >= seg.b {
            return Err(Error::Numeric {
                message: "subinterval below floating-point resolution".into(),
                estimate: error,
            });
        }
        segments.push(gauss_kronrod(&f, seg.a, mid));
        segments.push(gauss_kronrod(&f, mid, seg.b));
        evaluations += 42;
    }
}
