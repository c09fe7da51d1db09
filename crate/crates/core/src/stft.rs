//! Short-time Fourier transform of the supported windows against themselves.
//!
//! The transform follows the convention
//! `V_g f(t, ν) = ∫ f(x) conj(g(x - t)) e^{-2πiνx} dx`, so that `V_g g(0, 0) = ‖g‖² = 1`.
//! For the unit cube the transform is separable and each coordinate reduces to the
//! integral of `e^{-2πiνx}` over the overlap of `[0, 1]` and `[t, t + 1]`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature;

/// Default tolerance for deciding that a real number is an integer.
pub const DEFAULT_INT_TOL: f64 = 1e-9;

/// Below this frequency the segment integral switches to its Taylor series.
pub const SMALL_FREQUENCY: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Window {
    /// `χ_[0,1]^d`.
    UnitCube { dim: usize },
    /// `sech(2x)`, one-dimensional.
    HyperbolicSecant,
}

impl Window {
    pub fn unit_cube(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::domain("unit cube window needs dimension >= 1"));
        }
        Ok(Window::UnitCube { dim })
    }

    pub fn dim(&self) -> usize {
        match *self {
            Window::UnitCube { dim } => dim,
            Window::HyperbolicSecant => 1,
        }
    }

    pub fn is_cube(&self) -> bool {
        matches!(self, Window::UnitCube { .. })
    }

    fn check_args(&self, t: &[f64], nu: &[f64]) -> Result<()> {
        if let Window::UnitCube { dim: 0 } = self {
            return Err(Error::domain("unit cube window needs dimension >= 1"));
        }
        if t.len() != self.dim() || nu.len() != self.dim() {
            return Err(Error::domain(format!(
                "window has dimension {}, got time vector of length {} and frequency vector of length {}",
                self.dim(),
                t.len(),
                nu.len()
            )));
        }
        check_finite(t)?;
        check_finite(nu)
    }
}

fn check_finite(values: &[f64]) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::domain(format!("non-finite input {values:?}")))
    }
}

/// `|x - round(x)| <= eps` with `round(x) != 0`.
pub fn is_nonzero_integer(x: f64, eps: f64) -> bool {
    let r = x.round();
    r != 0.0 && (x - r).abs() <= eps
}

pub fn is_integer(x: f64, eps: f64) -> bool {
    (x - x.round()).abs() <= eps
}

/// `∫_a^b e^{-2πiνx} dx` for `a <= b`.
pub fn segment_transform(a: f64, b: f64, nu: f64) -> Complex64 {
    let len = b - a;
    if len <= 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    if nu.abs() < SMALL_FREQUENCY {
        // Σ_{k<6} (-2πiν)^k (b^{k+1} - a^{k+1}) / (k+1)!
        let z = Complex64::new(0.0, -2.0 * PI * nu);
        let mut sum = Complex64::new(0.0, 0.0);
        let mut zk = Complex64::new(1.0, 0.0);
        let mut fact = 1.0;
        let (mut ap, mut bp) = (a, b);
        for k in 0..6 {
            fact *= (k + 1) as f64;
            sum += zk * ((bp - ap) / fact);
            zk *= z;
            ap *= a;
            bp *= b;
        }
        return sum;
    }
    let half_phase = PI * nu * len;
    let mid = 0.5 * (a + b);
    Complex64::from_polar(len * half_phase.sin() / half_phase, -2.0 * PI * nu * mid)
}

/// Overlap of `[0, 1]` with `[t, t + 1]`, if it has positive length.
fn cube_overlap(t: f64) -> Option<(f64, f64)> {
    if t.abs() >= 1.0 {
        return None;
    }
    Some((t.max(0.0), (1.0 + t).min(1.0)))
}

/// `V_{g_1} g_1(t, ν)` for `g_1 = χ_[0,1]`.
pub fn stft_1d(t: f64, nu: f64) -> Result<Complex64> {
    if !t.is_finite() || !nu.is_finite() {
        return Err(Error::domain(format!("non-finite input ({t}, {nu})")));
    }
    Ok(match cube_overlap(t) {
        None => Complex64::new(0.0, 0.0),
        Some((a, b)) => segment_transform(a, b, nu),
    })
}

/// `V_{g_d} g_d(t, ν)` as the product of the coordinate transforms.
pub fn stft_nd(t: &[f64], nu: &[f64]) -> Result<Complex64> {
    if t.is_empty() || t.len() != nu.len() {
        return Err(Error::domain(format!(
            "time and frequency vectors must have equal positive length, got {} and {}",
            t.len(),
            nu.len()
        )));
    }
    t.iter().zip(nu).try_fold(Complex64::new(1.0, 0.0), |acc, (&ti, &vi)| Ok(acc * stft_1d(ti, vi)?))
}

/// `x / sinh(x)`, continuous at zero.
fn x_over_sinh(x: f64) -> f64 {
    let ax = x.abs();
    if ax < 1e-8 {
        1.0
    } else if ax > 30.0 {
        2.0 * ax * (-ax).exp()
    } else {
        ax / ax.sinh()
    }
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0
    } else {
        x.sin() / x
    }
}

/// `|V_g g(t, ν)|` for the secant window `g(x) = 2 / (e^{2x} + e^{-2x})`.
///
/// Only the magnitude is exposed.
pub fn secant_stft_magnitude(t: f64, nu: f64) -> Result<f64> {
    if !t.is_finite() || !nu.is_finite() {
        return Err(Error::domain(format!("non-finite input ({t}, {nu})")));
    }
    let a = x_over_sinh(2.0 * t);
    let b = x_over_sinh(PI * PI * nu / 2.0);
    Ok(a * b * sinc(PI * nu * t).abs())
}

/// Magnitude of the window's self-transform, closed form.
pub fn stft_magnitude(w: &Window, t: &[f64], nu: &[f64]) -> Result<f64> {
    w.check_args(t, nu)?;
    match w {
        Window::UnitCube { .. } => Ok(stft_nd(t, nu)?.norm()),
        Window::HyperbolicSecant => secant_stft_magnitude(t[0], nu[0]),
    }
}

/// Exact zero-set predicate with integer tolerance `eps`.
///
/// Points within `eps` of the zero variety count as zeros.
pub fn in_zero_set_with(w: &Window, t: &[f64], nu: &[f64], eps: f64) -> Result<bool> {
    w.check_args(t, nu)?;
    Ok(match w {
        Window::UnitCube { .. } => {
            let tmax = t.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
            tmax >= 1.0 - eps || t.iter().zip(nu).any(|(&ti, &vi)| is_nonzero_integer(vi * (1.0 - ti.abs()), eps))
        }
        Window::HyperbolicSecant => is_nonzero_integer(t[0] * nu[0], eps),
    })
}

pub fn in_zero_set(w: &Window, t: &[f64], nu: &[f64]) -> Result<bool> {
    in_zero_set_with(w, t, nu, DEFAULT_INT_TOL)
}

fn secant(x: f64) -> f64 {
    let ax = 2.0 * x.abs();
    // 2 / (e^{2x} + e^{-2x}) without overflow
    let e = (-ax).exp();
    2.0 * e / (1.0 + e * e)
}

/// Quadrature evaluation of `V_g g(t, ν)` from the defining integral.
///
/// Independent of the closed forms; used to cross-check them. For the unit
/// cube the integrand is separable and each coordinate is integrated over
/// `[0, 1]`, split at the jumps of the shifted indicator.
pub fn stft_quadrature(w: &Window, t: &[f64], nu: &[f64], tol: f64) -> Result<Complex64> {
    w.check_args(t, nu)?;
    if !(tol > 0.0) {
        return Err(Error::domain(format!("tolerance must be positive, got {tol}")));
    }
    match w {
        Window::UnitCube { dim } => {
            let per_coord = tol / *dim as f64;
            let mut acc = Complex64::new(1.0, 0.0);
            for (&ti, &vi) in t.iter().zip(nu) {
                acc *= cube_coordinate_quadrature(ti, vi, per_coord)?;
            }
            Ok(acc)
        }
        Window::HyperbolicSecant => {
            let (tt, v) = (t[0], nu[0]);
            let reach = (20.0 / tol).ln() / 2.0 + 1.0;
            let a = tt.min(0.0) - reach;
            let b = tt.max(0.0) + reach;
            let panels = ((b - a) * (v.abs() + 1.0)).ceil() as usize;
            let r = quadrature::integrate(
                |x| Complex64::from_polar(secant(x) * secant(x - tt), -2.0 * PI * v * x),
                a,
                b,
                0.5 * tol,
                panels,
            )?;
            Ok(r.value)
        }
    }
}

fn indicator_unit(x: f64) -> f64 {
    if (0.0..=1.0).contains(&x) {
        1.0
    } else {
        0.0
    }
}

fn cube_coordinate_quadrature(t: f64, nu: f64, tol: f64) -> Result<Complex64> {
    let mut cuts = vec![0.0, 1.0];
    for c in [t, t + 1.0] {
        if c > 0.0 && c < 1.0 {
            cuts.push(c);
        }
    }
    cuts.sort_by(f64::total_cmp);
    let pieces = cuts.len() - 1;
    let mut acc = Complex64::new(0.0, 0.0);
    for win in cuts.windows(2) {
        let (a, b) = (win[0], win[1]);
        let mid = 0.5 * (a + b);
        // The shifted indicator is constant on each piece.
        if indicator_unit(mid - t) == 0.0 {
            continue;
        }
        let panels = ((b - a) * nu.abs() * 2.0).ceil() as usize + 1;
        let r = quadrature::integrate(
            |x| Complex64::from_polar(indicator_unit(x), -2.0 * PI * nu * x),
            a,
            b,
            tol / pieces as f64,
            panels,
        )?;
        acc += r.value;
    }
    Ok(acc)
}
