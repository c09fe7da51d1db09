//! Truncated Parseval sums and the combined orthonormal-basis verdict.
//!
//! For an orthonormal basis `Σ |⟨f, π(λ)g⟩|² = ‖f‖²`. A finite truncation can
//! only approach this from below, so the sums are reported as evidence while
//! the verdict itself is orthogonality plus windowed tiling.

use std::collections::HashMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ortho::{check_orthogonality_with, OrthoOptions, OrthoReport};
use crate::quadrature;
use crate::sets::{BoxRegion, StructuredSet};
use crate::stft::{segment_transform, Window};
use crate::tiling::{check_tiling_with, CoverageReport};

/// Coefficient integrals against a smooth test function use this absolute tolerance.
pub const COEFFICIENT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TestFunctionKind {
    /// Indicator of the box `[lo, hi]`.
    CubeIndicator { lo: Vec<f64>, hi: Vec<f64> },
    /// `Π exp(-(x_i - c_i)² / (2 w²))` restricted to `|x_i - c_i| <= cutoff · w`.
    GaussianLike { center: Vec<f64>, width: f64, cutoff: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestFunction {
    pub id: String,
    pub kind: TestFunctionKind,
    pub norm_sq: f64,
}

impl TestFunction {
    pub fn cube_indicator(id: impl Into<String>, lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.is_empty() || lo.len() != hi.len() || lo.iter().zip(&hi).any(|(a, b)| !(a < b) || !b.is_finite()) {
            return Err(Error::domain(format!("invalid indicator box {lo:?}..{hi:?}")));
        }
        let norm_sq = lo.iter().zip(&hi).map(|(a, b)| b - a).product();
        Ok(TestFunction { id: id.into(), kind: TestFunctionKind::CubeIndicator { lo, hi }, norm_sq })
    }

    pub fn gaussian_like(id: impl Into<String>, center: Vec<f64>, width: f64, cutoff: f64) -> Result<Self> {
        if center.is_empty() || !(width > 0.0) || !(cutoff > 0.0) || center.iter().any(|c| !c.is_finite()) {
            return Err(Error::domain("gaussian test function needs a center, width > 0 and cutoff > 0"));
        }
        let r = quadrature::integrate(
            |x| Complex64::new((-(x * x) / (width * width)).exp(), 0.0),
            -cutoff * width,
            cutoff * width,
            1e-14,
            4,
        )?;
        let norm_sq = r.value.re.powi(center.len() as i32);
        Ok(TestFunction { id: id.into(), kind: TestFunctionKind::GaussianLike { center, width, cutoff }, norm_sq })
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            TestFunctionKind::CubeIndicator { lo, .. } => lo.len(),
            TestFunctionKind::GaussianLike { center, .. } => center.len(),
        }
    }

    /// Support `[lo, hi]` along coordinate `i`.
    fn support(&self, i: usize) -> (f64, f64) {
        match &self.kind {
            TestFunctionKind::CubeIndicator { lo, hi } => (lo[i], hi[i]),
            TestFunctionKind::GaussianLike { center, width, cutoff } => {
                (center[i] - cutoff * width, center[i] + cutoff * width)
            }
        }
    }

    fn value_1d(&self, i: usize, x: f64) -> f64 {
        match &self.kind {
            TestFunctionKind::CubeIndicator { .. } => 1.0,
            TestFunctionKind::GaussianLike { center, width, .. } => {
                let u = (x - center[i]) / width;
                (-0.5 * u * u).exp()
            }
        }
    }

    /// Smallest box in `R^{2d}` holding every coefficient that can be non-zero
    /// against the cube window with `|λ|_∞ <= freq_radius`.
    pub fn truncation_box(&self, freq_radius: f64) -> Result<BoxRegion> {
        let d = self.dim();
        let mut lo = Vec::with_capacity(2 * d);
        let mut hi = Vec::with_capacity(2 * d);
        for i in 0..d {
            let (a, b) = self.support(i);
            lo.push(a - 1.0);
            hi.push(b);
        }
        lo.extend(std::iter::repeat_n(-freq_radius, d));
        // frequencies at exactly +freq_radius belong to the truncation
        hi.extend(std::iter::repeat_n(freq_radius * (1.0 + f64::EPSILON) + 1e-9, d));
        BoxRegion::new(lo, hi)
    }
}

/// The default evidence suite in dimension `d`.
pub fn default_test_suite(d: usize) -> Result<Vec<TestFunction>> {
    Ok(vec![
        TestFunction::cube_indicator("unit_cube", vec![0.0; d], vec![1.0; d])?,
        TestFunction::cube_indicator("cube_0.3_0.8", vec![0.3; d], vec![0.8; d])?,
        TestFunction::gaussian_like("gaussian_0.5_0.2", vec![0.5; d], 0.2, 3.0)?,
    ])
}

/// Neumaier's compensated sum.
#[derive(Debug, Default, Clone, Copy)]
struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

fn window_value_1d(w: &Window, x: f64) -> f64 {
    match w {
        Window::UnitCube { .. } => {
            if (0.0..=1.0).contains(&x) {
                1.0
            } else {
                0.0
            }
        }
        Window::HyperbolicSecant => 1.0 / (2.0 * x).cosh(),
    }
}

struct Coefficients<'a> {
    f: &'a TestFunction,
    w: &'a Window,
    memo: HashMap<(usize, u64, u64), Complex64>,
}

impl Coefficients<'_> {
    /// `∫ f_i(x) g_1(x - t) e^{-2πiνx} dx` along coordinate `i`.
    fn coordinate(&mut self, i: usize, t: f64, nu: f64) -> Result<Complex64> {
        let (a, b) = self.f.support(i);
        let (lo, hi) = match self.w {
            Window::UnitCube { .. } => (a.max(t), b.min(t + 1.0)),
            Window::HyperbolicSecant => (a, b),
        };
        if lo >= hi {
            return Ok(Complex64::new(0.0, 0.0));
        }
        if self.w.is_cube() && matches!(self.f.kind, TestFunctionKind::CubeIndicator { .. }) {
            return Ok(segment_transform(lo, hi, nu));
        }
        let key = (i, t.to_bits(), nu.to_bits());
        if let Some(v) = self.memo.get(&key) {
            return Ok(*v);
        }
        let (f, w) = (self.f, self.w);
        let panels = ((hi - lo) * (nu.abs() + 1.0)).ceil() as usize;
        let r = quadrature::integrate(
            |x| {
                Complex64::from_polar(
                    f.value_1d(i, x) * window_value_1d(w, x - t),
                    -2.0 * std::f64::consts::PI * nu * x,
                )
            },
            lo,
            hi,
            COEFFICIENT_TOL,
            panels.max(1),
        )?;
        self.memo.insert(key, r.value);
        Ok(r.value)
    }

    fn squared(&mut self, p: &[f64]) -> Result<f64> {
        let d = p.len() / 2;
        let mut acc = 1.0;
        for i in 0..d {
            let c = self.coordinate(i, p[i], p[d + i])?;
            acc *= c.norm_sqr();
            if acc == 0.0 {
                break;
            }
        }
        Ok(acc)
    }
}

fn check_shapes(f: &TestFunction, set: &StructuredSet, w: &Window, trunc: &BoxRegion) -> Result<()> {
    let d = w.dim();
    if f.dim() != d || set.dim() != 2 * d || trunc.dim() != 2 * d {
        return Err(Error::domain(format!(
            "dimension mismatch: window {d}, test function {}, set {}, box {}",
            f.dim(),
            set.dim(),
            trunc.dim()
        )));
    }
    if w.is_cube() {
        for i in 0..d {
            let (a, b) = f.support(i);
            if trunc.lo()[i] > a - 1.0 || trunc.hi()[i] < b {
                return Err(Error::domain(format!(
                    "truncation box must cover the test function's support inflated by 1 in time (coordinate {i})"
                )));
            }
        }
    }
    Ok(())
}

/// `Σ_{λ ∈ Λ ∩ trunc} |⟨f, π(λ)g⟩|²`.
pub fn parseval_sum(f: &TestFunction, set: &StructuredSet, w: &Window, trunc: &BoxRegion) -> Result<f64> {
    Ok(parseval_shells(f, set, w, trunc, &[f64::INFINITY])?[0].1)
}

/// Partial Parseval sums over the frequency shells `|λ|_∞ <= r` for each requested radius.
pub fn parseval_shells(
    f: &TestFunction,
    set: &StructuredSet,
    w: &Window,
    trunc: &BoxRegion,
    radii: &[f64],
) -> Result<Vec<(f64, f64)>> {
    check_shapes(f, set, w, trunc)?;
    let d = w.dim();
    let mut sorted: Vec<f64> = radii.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut bins = vec![CompensatedSum::default(); sorted.len()];
    let mut coefs = Coefficients { f, w, memo: HashMap::new() };
    let mut failure = None;
    set.visit(trunc, &mut |p| {
        if failure.is_some() {
            return;
        }
        match coefs.squared(p) {
            Ok(v) if v > 0.0 => {
                let r = p[d..].iter().fold(0.0_f64, |m, x| m.max(x.abs()));
                let k = sorted.partition_point(|&s| s < r - 1e-9);
                if k < bins.len() {
                    bins[k].add(v);
                }
            }
            Ok(_) => {}
            Err(e) => failure = Some(e),
        }
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    let mut acc = CompensatedSum::default();
    let mut cumulative = Vec::with_capacity(bins.len());
    for b in &bins {
        acc.add(b.value());
        cumulative.push(acc.value());
    }
    // report in the caller's order
    Ok(radii
        .iter()
        .map(|r| {
            let k = sorted.iter().position(|s| s == r).expect("radius present");
            (*r, cumulative[k])
        })
        .collect())
}

/// `radius,value` rows.
pub fn shells_to_csv(rows: &[(f64, f64)]) -> String {
    let mut s = String::from("radius,value\n");
    for (r, v) in rows {
        s.push_str(&format!("{r},{v}\n"));
    }
    s
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParsevalRatio {
    pub id: String,
    pub sum: f64,
    pub norm_sq: f64,
    pub ratio: f64,
    pub freq_radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OnbVerdict {
    pub ortho: bool,
    pub orthogonality: OrthoReport,
    pub tiling: CoverageReport,
    pub parseval_ratios: Vec<ParsevalRatio>,
    pub verdict: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OnbOptions {
    pub ortho: OrthoOptions,
    /// Frequency truncation `|λ|_∞ <= freq_radius` for the Parseval sums.
    pub freq_radius: f64,
}

impl Default for OnbOptions {
    fn default() -> Self {
        OnbOptions { ortho: OrthoOptions::default(), freq_radius: 64.0 }
    }
}

/// Orthogonality and windowed tiling on `bx`, with Parseval sums as evidence.
pub fn check_onb(
    set: &StructuredSet,
    w: &Window,
    tests: &[TestFunction],
    bx: &BoxRegion,
    opts: OnbOptions,
) -> Result<OnbVerdict> {
    if !w.is_cube() {
        return Err(Error::UnsupportedWindow(
            "the tiling criterion is established for the unit cube window only".into(),
        ));
    }
    let orthogonality = check_orthogonality_with(set, w, bx, opts.ortho)?;
    let pts = set.enumerate(bx)?;
    let tiling = check_tiling_with(&pts, bx, opts.ortho.eps_int)?;
    let mut parseval_ratios = Vec::with_capacity(tests.len());
    for f in tests {
        let trunc = f.truncation_box(opts.freq_radius)?;
        let sum = parseval_sum(f, set, w, &trunc)?;
        parseval_ratios.push(ParsevalRatio {
            id: f.id.clone(),
            sum,
            norm_sq: f.norm_sq,
            ratio: sum / f.norm_sq,
            freq_radius: opts.freq_radius,
        });
    }
    let verdict = orthogonality.verdict && tiling.is_tiling();
    Ok(OnbVerdict { ortho: orthogonality.verdict, orthogonality, tiling, parseval_ratios, verdict })
}
