//! Mutual orthogonality of a windowed Gabor system.
//!
//! Two time-frequency shifts `π(p)g` and `π(q)g` are orthogonal exactly when
//! `q - p` lies in the zero set of `V_g g`, so the check runs over differences
//! of enumerated points and never integrates except to annotate failures.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sets::{lex_cmp, BoxRegion, Point, StructuredSet, TfPoint};
use crate::stft::{in_zero_set_with, stft_quadrature, Window, DEFAULT_INT_TOL};
use crate::tiling::MAX_WITNESSES;

/// Tolerance used to annotate violations with a quadrature magnitude.
pub const DEFAULT_QUAD_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub p: TfPoint,
    pub q: TfPoint,
    /// `q - p`.
    pub difference: TfPoint,
    /// `|⟨π(p)g, π(q)g⟩|` by quadrature.
    pub inner_product: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrthoReport {
    pub verdict: bool,
    /// At most 100 violating pairs, smallest absolute difference first.
    ///
    /// Ties go to the difference with non-negative components, then to the smaller `p`.
    pub violations: Vec<Violation>,
    pub violation_count: usize,
    pub points: usize,
    pub pairs_checked: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrthoOptions {
    pub eps_int: f64,
    pub quad_tol: f64,
}

impl Default for OrthoOptions {
    fn default() -> Self {
        OrthoOptions { eps_int: DEFAULT_INT_TOL, quad_tol: DEFAULT_QUAD_TOL }
    }
}

pub fn check_orthogonality(set: &StructuredSet, w: &Window, bx: &BoxRegion) -> Result<OrthoReport> {
    check_orthogonality_with(set, w, bx, OrthoOptions::default())
}

pub fn check_orthogonality_with(
    set: &StructuredSet,
    w: &Window,
    bx: &BoxRegion,
    opts: OrthoOptions,
) -> Result<OrthoReport> {
    if set.dim() != 2 * w.dim() {
        return Err(Error::domain(format!("set lives in R^{} but the window needs R^{}", set.dim(), 2 * w.dim())));
    }
    let pts = set.enumerate(bx)?;
    check_points_orthogonality(&pts, w, opts)
}

/// Pairwise zero-set test on an explicit list of points in `R^{2d}`.
pub fn check_points_orthogonality(points: &[Point], w: &Window, opts: OrthoOptions) -> Result<OrthoReport> {
    let d = w.dim();
    if let Some(p) = points.iter().find(|p| p.len() != 2 * d) {
        return Err(Error::domain(format!("point {p:?} does not have dimension {}", 2 * d)));
    }
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| lex_cmp(a, b));
    pts.dedup();

    // For the cube, pairs with max |Δt| >= 1 are orthogonal by disjoint supports;
    // bucket the time parts so only neighboring cells are compared.
    let buckets: Option<HashMap<Vec<i64>, Vec<usize>>> = w.is_cube().then(|| {
        let mut m: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
        for (i, p) in pts.iter().enumerate() {
            m.entry(p[..d].iter().map(|x| x.floor() as i64).collect()).or_default().push(i);
        }
        m
    });

    let per_point: Vec<Result<(usize, Vec<usize>)>> = (0..pts.len())
        .into_par_iter()
        .map(|i| {
            let p = &pts[i];
            let mut candidates: Vec<usize> = match &buckets {
                Some(m) => {
                    let base: Vec<i64> = p[..d].iter().map(|x| x.floor() as i64).collect();
                    let mut out = Vec::new();
                    let mut key = vec![0i64; d];
                    for code in 0..3usize.pow(d as u32) {
                        let mut c = code;
                        for (k, slot) in key.iter_mut().enumerate() {
                            *slot = base[k] + (c % 3) as i64 - 1;
                            c /= 3;
                        }
                        if let Some(v) = m.get(&key) {
                            out.extend(v.iter().copied().filter(|&j| j > i));
                        }
                    }
                    out
                }
                None => (i + 1..pts.len()).collect(),
            };
            candidates.sort_unstable();
            let mut bad = Vec::new();
            for &j in &candidates {
                let q = &pts[j];
                let dt: Vec<f64> = (0..d).map(|k| q[k] - p[k]).collect();
                let dl: Vec<f64> = (0..d).map(|k| q[d + k] - p[d + k]).collect();
                if !in_zero_set_with(w, &dt, &dl, opts.eps_int)? {
                    bad.push(j);
                }
            }
            Ok((candidates.len(), bad))
        })
        .collect();

    let mut pairs_checked = 0;
    let mut bad_pairs = Vec::new();
    for r in per_point.into_iter().enumerate() {
        let (i, res) = r;
        let (checked, bad) = res?;
        pairs_checked += checked;
        bad_pairs.extend(bad.into_iter().map(|j| (i, j)));
    }
    let violation_count = bad_pairs.len();
    let diff = |&(i, j): &(usize, usize)| -> Vec<f64> { pts[j].iter().zip(&pts[i]).map(|(a, b)| a - b).collect() };
    let key = |a: &(usize, usize), b: &(usize, usize)| {
        let (da, db) = (diff(a), diff(b));
        let abs_a: Vec<f64> = da.iter().map(|x| x.abs()).collect();
        let abs_b: Vec<f64> = db.iter().map(|x| x.abs()).collect();
        lex_cmp(&abs_a, &abs_b).then_with(|| lex_cmp(&db, &da)).then_with(|| a.cmp(b))
    };
    bad_pairs.sort_by(key);
    bad_pairs.truncate(MAX_WITNESSES);
    let violations = bad_pairs
        .into_iter()
        .map(|(i, j)| {
            let p = TfPoint::from_flat(&pts[i])?;
            let q = TfPoint::from_flat(&pts[j])?;
            let inner_product = verify_pair_quadrature(&p, &q, w, opts.quad_tol)?;
            let difference = TfPoint {
                t: q.t.iter().zip(&p.t).map(|(a, b)| a - b).collect(),
                lambda: q.lambda.iter().zip(&p.lambda).map(|(a, b)| a - b).collect(),
            };
            Ok(Violation { p, q, difference, inner_product })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(OrthoReport { verdict: violations.is_empty(), violations, violation_count, points: pts.len(), pairs_checked })
}

/// `|⟨π(p)g, π(q)g⟩|` by quadrature.
///
/// The inner product equals `V_g g(q.t - p.t, q.λ - p.λ)` up to a unimodular factor.
pub fn verify_pair_quadrature(p: &TfPoint, q: &TfPoint, w: &Window, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::domain(format!("tolerance must be positive, got {tol}")));
    }
    if p.t.len() != w.dim() || q.t.len() != w.dim() || p.lambda.len() != w.dim() || q.lambda.len() != w.dim() {
        return Err(Error::domain("point dimension does not match the window"));
    }
    let dt: Vec<f64> = q.t.iter().zip(&p.t).map(|(a, b)| a - b).collect();
    let dl: Vec<f64> = q.lambda.iter().zip(&p.lambda).map(|(a, b)| a - b).collect();
    Ok(stft_quadrature(w, &dt, &dl, tol)?.norm())
}
