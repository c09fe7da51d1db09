//! Structure recognition for verified orthonormal-basis sets.
//!
//! In dimension one a verified set is recognized as standard. In dimension two
//! it is matched against the strip form (horizontal or vertical) and its
//! parameters are extracted strip by strip. All results describe the observed
//! window only; indices outside it keep their defaults and are not asserted.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ortho::{check_points_orthogonality, OrthoOptions};
use crate::sets::{
    cell_key, dedup_within, frac, lex_cmp, make_2d_theorem, make_standard, BoxRegion, IndexedParam, Point, SetTable,
    StripAxis, StructuredSet, TwoDTheorem, SWAP_TIME_FREQ,
};
use crate::stft::{is_integer, Window, DEFAULT_INT_TOL};
use crate::tiling::{check_tiling_with, recognize_unchecked, Recognition, RecognizedAxis};

/// Points of `points` (in `R^{2d}`) whose time part lies in `a`.
fn with_time_in<'a>(points: &'a [Point], a: &'a BoxRegion) -> impl Iterator<Item = &'a Point> + 'a {
    let d = a.dim();
    points.iter().filter(move |p| a.contains(&p[..d]))
}

/// `Γ(A)`: frequencies carried by points whose time part lies in `a`.
pub fn gamma_points(points: &[Point], a: &BoxRegion) -> Vec<Point> {
    let d = a.dim();
    dedup_within(with_time_in(points, a).map(|p| p[d..].to_vec()).collect(), DEFAULT_INT_TOL)
}

/// `T_A(λ)`: time points in `a` carrying the frequency `lambda`.
///
/// For a half-open unit square `a` a verified basis has at most one such point;
/// more than one is reported as an invariant violation.
pub fn t_slice_points(points: &[Point], a: &BoxRegion, lambda: &[f64]) -> Result<Vec<Point>> {
    let d = a.dim();
    if lambda.len() != d {
        return Err(Error::domain("frequency point dimension does not match the time region"));
    }
    let out = dedup_within(
        with_time_in(points, a)
            .filter(|p| p[d..].iter().zip(lambda).all(|(x, y)| (x - y).abs() <= DEFAULT_INT_TOL))
            .map(|p| p[..d].to_vec())
            .collect(),
        DEFAULT_INT_TOL,
    );
    let unit = a.lo().iter().zip(a.hi()).all(|(l, h)| (h - l - 1.0).abs() <= DEFAULT_INT_TOL);
    if unit && out.len() > 1 {
        return Err(Error::InvariantViolation(format!(
            "{} time points over one unit cell carry the frequency {lambda:?}: {out:?}",
            out.len()
        )));
    }
    Ok(out)
}

fn slice_box(a: &BoxRegion, freq_window: &BoxRegion) -> Result<BoxRegion> {
    if a.dim() != freq_window.dim() {
        return Err(Error::domain("time region and frequency window dimensions differ"));
    }
    Ok(a.concat(freq_window))
}

/// `Γ(A)` over the frequency window `freq_window`.
pub fn gamma(set: &StructuredSet, a: &BoxRegion, freq_window: &BoxRegion) -> Result<Vec<Point>> {
    let pts = set.enumerate(&slice_box(a, freq_window)?)?;
    Ok(gamma_points(&pts, a))
}

pub fn t_slice(set: &StructuredSet, a: &BoxRegion, lambda: &[f64]) -> Result<Vec<Point>> {
    let window = BoxRegion::new(
        lambda.iter().map(|x| x - 2.0 * DEFAULT_INT_TOL).collect(),
        lambda.iter().map(|x| x + 2.0 * DEFAULT_INT_TOL).collect(),
    )?;
    let pts = set.enumerate(&slice_box(a, &window)?)?;
    t_slice_points(&pts, a, lambda)
}

fn split_dims(d: usize, m: usize) -> (Vec<usize>, Vec<usize>) {
    ((0..m).chain(d..d + m).collect(), (m..d).chain(d + m..2 * d).collect())
}

fn check_split(dim: usize, m: usize) -> Result<usize> {
    let d = dim / 2;
    if !dim.is_multiple_of(2) || m == 0 || m >= d {
        return Err(Error::domain(format!("need 1 <= m < d, got m = {m} with d = {d}")));
    }
    Ok(d)
}

/// `Π₁(Λ)`: the `(s, λ)` parts of points in `R^{2(m+n)}`.
pub fn project_points(points: &[Point], d: usize, m: usize) -> Vec<Point> {
    let (base, _) = split_dims(d, m);
    dedup_within(points.iter().map(|p| base.iter().map(|&i| p[i]).collect()).collect(), DEFAULT_INT_TOL)
}

/// `Λ(C)`: the `(t, ν)` parts of points whose `(s, λ)` part lies in `c`.
pub fn restrict_points(points: &[Point], d: usize, c: &BoxRegion) -> Vec<Point> {
    let m = c.dim() / 2;
    let (base, child) = split_dims(d, m);
    dedup_within(
        points
            .iter()
            .filter(|p| c.contains(&base.iter().map(|&i| p[i]).collect::<Vec<_>>()))
            .map(|p| child.iter().map(|&i| p[i]).collect())
            .collect(),
        DEFAULT_INT_TOL,
    )
}

pub fn project_tf(set: &StructuredSet, m: usize, bx: &BoxRegion) -> Result<Vec<Point>> {
    let d = check_split(set.dim(), m)?;
    Ok(project_points(&set.enumerate(bx)?, d, m))
}

pub fn restrict(set: &StructuredSet, c: &BoxRegion, bx: &BoxRegion) -> Result<Vec<Point>> {
    let d = check_split(set.dim(), c.dim() / 2)?;
    if !c.dim().is_multiple_of(2) {
        return Err(Error::domain("restriction cube must live in an even-dimensional space"));
    }
    Ok(restrict_points(&set.enumerate(bx)?, d, c))
}

/// First position where two sorted point lists differ by more than `eps`.
fn first_difference(a: &[Point], b: &[Point], eps: f64) -> Option<Point> {
    for (p, q) in a.iter().zip(b) {
        if p.iter().zip(q).any(|(x, y)| (x - y).abs() > eps) {
            return Some(if lex_cmp(p, q).is_lt() { p.clone() } else { q.clone() });
        }
    }
    match a.len().cmp(&b.len()) {
        std::cmp::Ordering::Less => Some(b[a.len()].clone()),
        std::cmp::Ordering::Greater => Some(a[b.len()].clone()),
        std::cmp::Ordering::Equal => None,
    }
}

fn require_basis(points: &[Point], bx: &BoxRegion, d: usize, eps: f64) -> Result<()> {
    let tiling = check_tiling_with(points, bx, eps)?;
    if !tiling.is_tiling() {
        return Err(Error::Precondition(format!("input does not tile the window ({:?})", tiling.verdict)));
    }
    require_orthogonal(points, d, eps)
}

fn require_orthogonal(points: &[Point], d: usize, eps: f64) -> Result<()> {
    let ortho = check_points_orthogonality(
        points,
        &Window::unit_cube(d)?,
        OrthoOptions { eps_int: eps, ..Default::default() },
    )?;
    if let Some(v) = ortho.violations.first() {
        return Err(Error::Precondition(format!("input is not orthogonal: difference {:?}", v.difference)));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification1D {
    pub form: String,
    /// `J = Z + time_offset`.
    pub time_offset: f64,
    /// Spectrum offsets `b_t`, keyed by the integer cell of `t`.
    pub spectra_offsets: IndexedParam,
    pub set: StructuredSet,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum Outcome1D {
    Standard(Classification1D),
    /// The underlying tiling has the rows form; `witness` is a difference outside the zero set.
    Failure {
        witness: Point,
        reason: String,
    },
}

pub fn classify_1d(set: &StructuredSet, bx: &BoxRegion) -> Result<Outcome1D> {
    if set.dim() != 2 || bx.dim() != 2 {
        return Err(Error::domain("one-dimensional classification needs a set in R²"));
    }
    classify_1d_points(&set.enumerate(bx)?, bx, DEFAULT_INT_TOL)
}

pub fn classify_1d_points(points: &[Point], bx: &BoxRegion, eps: f64) -> Result<Outcome1D> {
    let tiling = check_tiling_with(points, bx, eps)?;
    if !tiling.is_tiling() {
        return Err(Error::Precondition(format!("input does not tile the window ({:?})", tiling.verdict)));
    }
    let structure = match recognize_unchecked(points, &tiling.region, eps) {
        Recognition::Recognized(s) => s,
        Recognition::Unrecognized { p, q } => {
            return Err(Error::Consistency(format!("tiling not in rows or columns form: {p:?}, {q:?}")));
        }
    };
    if structure.axis == RecognizedAxis::Rows {
        // strips k-1, k with a non-integer offset difference
        let ks: Vec<i64> = {
            let mut v: Vec<i64> = points.iter().map(|p| (p[1] - structure.anchor[1]).round() as i64).collect();
            v.sort_unstable();
            v.dedup();
            v
        };
        for pair in ks.windows(2) {
            let (a, b) = (structure.offsets.get(&[pair[0]]), structure.offsets.get(&[pair[1]]));
            let shift = frac(b - a, eps);
            if pair[1] - pair[0] == 1 && shift != 0.0 {
                return Ok(Outcome1D::Failure {
                    witness: vec![shift, 1.0],
                    reason: format!(
                        "rows form: strips {} and {} are offset by {shift}, and {shift}·1 is not an integer",
                        pair[0], pair[1]
                    ),
                });
            }
        }
        return Err(Error::Consistency("rows form with no adjacent offset change".into()));
    }
    require_orthogonal(points, 1, eps)?;
    let (time_offset, spectra_offsets) = match &structure.set {
        StructuredSet::Lattice { offset, .. } => (offset[0], IndexedParam::constant(offset[1])),
        StructuredSet::CubeTiling2D { strip_shift, offsets, .. } => (*strip_shift, offsets.clone()),
        other => return Err(Error::Consistency(format!("unexpected recognized set {other}"))),
    };
    let mut cells: Vec<i64> = points.iter().map(|p| cell_key(&p[..1])[0]).collect();
    cells.sort_unstable();
    cells.dedup();
    let spectra = SetTable::from_entries(
        Some(StructuredSet::shifted_lattice(vec![spectra_offsets.default])),
        cells.iter().map(|&k| (vec![k], StructuredSet::shifted_lattice(vec![spectra_offsets.get(&[k])]))),
    );
    let set = make_standard(1, StructuredSet::shifted_lattice(vec![time_offset]), spectra)?.canonical();
    let rebuilt = set.enumerate(bx)?;
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| lex_cmp(a, b));
    if let Some(p) = first_difference(&sorted, &rebuilt, eps) {
        return Err(Error::Consistency(format!("reconstruction differs at {p:?}")));
    }
    Ok(Outcome1D::Standard(Classification1D {
        form: "standard".into(),
        time_offset,
        spectra_offsets: spectra_offsets.canonical(),
        set,
    }))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TileSpectrum {
    pub m: i64,
    pub n: i64,
    pub axis: RecognizedAxis,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification2D {
    pub axis: StripAxis,
    /// `strip_form` always; `standard` as well when every observed strip is tiling-type.
    pub labels: Vec<String>,
    /// Both axes fit the data (all time coordinates are congruent mod 1 in both directions).
    pub degenerate: bool,
    /// Observed overlap-type strips `J`.
    pub overlap_strips: Vec<i64>,
    /// Observed tiling-type strips `J′`.
    pub tiling_strips: Vec<i64>,
    pub tile_spectra: Vec<TileSpectrum>,
    pub observed_dependence: ParamDependence,
    /// Lexicographically smallest observed point.
    pub anchor: Point,
    pub params: TwoDTheorem,
    pub set: StructuredSet,
}

/// Indices that the overlap-strip parameters were seen to vary in.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamDependence {
    /// Subset of `["n", "k"]` for `t_{n,k}`.
    pub shift: Vec<String>,
    /// Subset of `["k", "m", "n"]` for `μ_{k,m,n}`.
    pub freq_offset: Vec<String>,
}

/// Names of the key positions in which two otherwise equal keys carry different values.
fn varying_indices(table: &IndexedParam, names: &[&str], eps: f64) -> Vec<String> {
    let mut out = Vec::new();
    for (i, name) in names.iter().enumerate() {
        let mut groups: BTreeMap<Vec<i64>, f64> = BTreeMap::new();
        let varies = table.table.iter().any(|(key, &v)| {
            let mut rest = key.clone();
            rest.remove(i);
            let first = *groups.entry(rest).or_insert(v);
            (first - v).abs() > eps
        });
        if varies {
            out.push(name.to_string());
        }
    }
    out
}

fn swap(p: &[f64]) -> Point {
    SWAP_TIME_FREQ.iter().map(|&i| p[i]).collect()
}

struct Extraction {
    params: TwoDTheorem,
    tiles: Vec<TileSpectrum>,
}

/// Reads horizontal-form parameters off points already in horizontal coordinates.
fn extract_horizontal(points: &[Point], bx: &BoxRegion, eps: f64) -> std::result::Result<Extraction, String> {
    let first = points.first().ok_or("no points in the window")?;
    let strip_shift = frac(first[1], eps);
    let mut strips: BTreeMap<i64, Vec<&Point>> = BTreeMap::new();
    for p in points {
        if !is_integer(p[1] - strip_shift, eps) {
            return Err(format!("point {p:?} is off the strips at offset {strip_shift}"));
        }
        strips.entry((p[1] - strip_shift).round() as i64).or_default().push(p);
    }
    let freq_box = bx.select(&[2, 3]);
    let freq_region = freq_box.shrunk(1.0).ok_or("frequency window too small")?;
    let mut params = TwoDTheorem::trivial(StripAxis::Horizontal);
    params.strip_shift = strip_shift;
    let mut tiles = Vec::new();
    for (&n, pts) in &strips {
        let offsets = dedup_within(pts.iter().map(|p| vec![frac(p[0], eps)]).collect(), eps);
        if offsets.len() > 1 {
            params.overlap_strips.insert(n);
            let nu = frac(pts[0][3], eps);
            for p in pts {
                if !is_integer(p[3] - nu, eps) {
                    return Err(format!("strip {n}: frequency rows are not congruent mod 1 ({} vs {nu})", p[3]));
                }
            }
            params.strip_freq.set(vec![n], nu);
            let mut row_shift: BTreeMap<i64, f64> = BTreeMap::new();
            let mut cell_offset: BTreeMap<(i64, i64), f64> = BTreeMap::new();
            for p in pts {
                let k = (p[3] - nu).round() as i64;
                let t = *row_shift.entry(k).or_insert_with(|| frac(p[0], eps));
                if !is_integer(p[0] - t, eps) {
                    return Err(format!("strip {n}, row {k}: time offsets {t} and {} differ", frac(p[0], eps)));
                }
                let m = (p[0] - t).round() as i64;
                let mu = *cell_offset.entry((k, m)).or_insert_with(|| frac(p[2], eps));
                if !is_integer(p[2] - mu, eps) {
                    return Err(format!("strip {n}, row {k}, cell {m}: frequency offsets differ"));
                }
            }
            for (k, t) in row_shift {
                params.shift.set(vec![n, k], t);
            }
            for ((k, m), mu) in cell_offset {
                params.freq_offset.set(vec![k, m, n], mu);
            }
        } else {
            params.tiling_strips.insert(n);
            let t = offsets[0][0];
            params.tile_shift.set(vec![n], t);
            let mut cells: BTreeMap<i64, Vec<Point>> = BTreeMap::new();
            for p in pts {
                cells.entry((p[0] - t).round() as i64).or_default().push(vec![p[2], p[3]]);
            }
            for (m, spectrum) in cells {
                let report = check_tiling_with(&spectrum, &freq_box, eps).map_err(|e| e.to_string())?;
                if !report.is_tiling() {
                    return Err(format!("strip {n}, cell {m}: spectrum does not tile ({:?})", report.verdict));
                }
                match recognize_unchecked(&spectrum, &freq_region, eps) {
                    Recognition::Recognized(s) => {
                        tiles.push(TileSpectrum { m, n, axis: s.axis });
                        params.tile_spectra.table.insert(vec![m, n], s.set);
                    }
                    Recognition::Unrecognized { p, q } => {
                        return Err(format!("strip {n}, cell {m}: spectrum is not a square tiling ({p:?}, {q:?})"));
                    }
                }
            }
        }
    }
    Ok(Extraction { params, tiles })
}

pub fn classify_2d(set: &StructuredSet, bx: &BoxRegion) -> Result<Classification2D> {
    if set.dim() != 4 || bx.dim() != 4 {
        return Err(Error::domain("two-dimensional classification needs a set in R⁴"));
    }
    classify_2d_points(&set.enumerate(bx)?, bx, DEFAULT_INT_TOL)
}

pub fn classify_2d_points(points: &[Point], bx: &BoxRegion, eps: f64) -> Result<Classification2D> {
    require_basis(points, bx, 2, eps)?;
    let mut sorted = dedup_within(points.to_vec(), eps);
    sorted.sort_by(|a, b| lex_cmp(a, b));
    let anchor = sorted.first().cloned().ok_or_else(|| Error::Precondition("no points in the window".into()))?;
    let congruent = |i: usize| sorted.iter().all(|p| is_integer(p[i] - anchor[i], eps));
    let degenerate = congruent(0) && congruent(1);

    let mut failures = Vec::new();
    for axis in [StripAxis::Horizontal, StripAxis::Vertical] {
        let (pts, hbox): (Vec<Point>, BoxRegion) = match axis {
            StripAxis::Horizontal => (sorted.clone(), bx.clone()),
            StripAxis::Vertical => (sorted.iter().map(|p| swap(p)).collect(), bx.select(&SWAP_TIME_FREQ)),
        };
        let mut ex = match extract_horizontal(&pts, &hbox, eps) {
            Ok(ex) => ex,
            Err(reason) => {
                failures.push(format!("{axis:?}: {reason}"));
                continue;
            }
        };
        ex.params.axis = axis;
        let observed_dependence = ParamDependence {
            shift: varying_indices(&ex.params.shift, &["n", "k"], eps),
            freq_offset: varying_indices(&ex.params.freq_offset, &["k", "m", "n"], eps),
        };
        let overlap_strips: Vec<i64> = ex.params.overlap_strips.iter().copied().collect();
        let tiling_strips: Vec<i64> = ex.params.tiling_strips.iter().copied().collect();
        let set = make_2d_theorem(ex.params)?.canonical();
        let rebuilt = set.enumerate(bx)?;
        if let Some(p) = first_difference(&sorted, &rebuilt, eps) {
            failures.push(format!("{axis:?}: reconstruction differs at {p:?}"));
            continue;
        }
        let StructuredSet::TwoDTheorem(params) = &set else { unreachable!("canonical form keeps the variant") };
        let mut labels = vec!["strip_form".to_string()];
        if overlap_strips.is_empty() {
            labels.push("standard".into());
        }
        return Ok(Classification2D {
            axis,
            labels,
            degenerate,
            overlap_strips,
            tiling_strips,
            tile_spectra: ex.tiles,
            observed_dependence,
            anchor,
            params: (**params).clone(),
            set,
        });
    }
    Err(Error::Consistency(failures.join("; ")))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChildReport {
    pub base_point: Point,
    pub points: usize,
    pub onb: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PseudoStructure {
    pub holds: bool,
    pub reason: Option<String>,
    pub m: usize,
    pub n: usize,
    pub projection_tiles: bool,
    pub children: Vec<ChildReport>,
    /// The set rebuilt from the projection and the restrictions, when the structure holds.
    pub decomposition: Option<StructuredSet>,
}

/// Checks the pseudo-standard structure with the first `m` time and frequency coordinates as base.
pub fn check_pseudo_structure(set: &StructuredSet, m: usize, bx: &BoxRegion) -> Result<PseudoStructure> {
    let d = check_split(set.dim(), m)?;
    let n = d - m;
    let pts = set.enumerate(bx)?;
    require_basis(&pts, bx, d, DEFAULT_INT_TOL)?;
    let (base_dims, child_dims) = split_dims(d, m);
    let base_box = bx.select(&base_dims);
    let child_box = bx.select(&child_dims);
    let projection = project_points(&pts, d, m);
    let proj_report = check_tiling_with(&projection, &base_box, DEFAULT_INT_TOL)?;
    let mut out = PseudoStructure {
        holds: false,
        reason: None,
        m,
        n,
        projection_tiles: proj_report.is_tiling(),
        children: Vec::new(),
        decomposition: None,
    };
    if !proj_report.is_tiling() {
        out.reason = Some(format!("projection does not tile the window ({:?})", proj_report.verdict));
        return Ok(out);
    }
    let window = Window::unit_cube(n)?;
    let mut entries = Vec::new();
    for b in &projection {
        let cell = BoxRegion::new(b.clone(), b.iter().map(|x| x + 1.0).collect())?;
        let child = restrict_points(&pts, d, &cell);
        let mut onb = true;
        if proj_report.region.contains(b) {
            let tiles = check_tiling_with(&child, &child_box, DEFAULT_INT_TOL)?.is_tiling();
            let ortho = check_points_orthogonality(&child, &window, OrthoOptions::default())?.verdict;
            onb = tiles && ortho;
        }
        out.children.push(ChildReport { base_point: b.clone(), points: child.len(), onb });
        entries.push((cell_key(b), StructuredSet::explicit(2 * n, child)?));
    }
    if let Some(bad) = out.children.iter().find(|c| !c.onb) {
        out.reason = Some(format!("restriction at {:?} is not a basis on the window", bad.base_point));
        return Ok(out);
    }
    let decomposition = StructuredSet::PseudoStandard {
        m,
        n,
        base: Box::new(StructuredSet::explicit(2 * m, projection)?),
        children: SetTable::from_entries(None, entries),
    };
    decomposition.validate()?;
    let mut sorted = pts.clone();
    sorted.sort_by(|a, b| lex_cmp(a, b));
    if let Some(p) = first_difference(&sorted, &decomposition.enumerate(bx)?, DEFAULT_INT_TOL) {
        return Err(Error::Consistency(format!("decomposition differs at {p:?}")));
    }
    out.holds = true;
    out.decomposition = Some(decomposition);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sets::{make_pseudo_standard, with_partition, StripKind, TilingAxis};

    fn z4_box(r: f64) -> BoxRegion {
        BoxRegion::centered(4, r).unwrap()
    }

    fn unit_square(x: f64, y: f64) -> BoxRegion {
        BoxRegion::new(vec![x, y], vec![x + 1.0, y + 1.0]).unwrap()
    }

    /// `⋃_m {m} × (Z + μ_m)` glued with `⋃_n {n + s_{m,j}} × (Z + ν_{n,m,j})`.
    fn section3_example() -> StructuredSet {
        let base = StructuredSet::cube_tiling_2d(
            TilingAxis::Columns,
            IndexedParam::from_entries(0.0, [(vec![0], 0.25), (vec![1], 0.5)]),
        )
        .unwrap();
        let mut children = Vec::new();
        for m in -3..3i64 {
            for j in -3..3i64 {
                let s = ((j.rem_euclid(4)) as f64) / 4.0 + if m == 0 { 0.0 } else { 0.125 };
                let offsets = IndexedParam::from_entries(
                    0.0,
                    (-3..3i64).map(|n| (vec![n], ((n + j).rem_euclid(8)) as f64 / 8.0)),
                );
                let child = StructuredSet::CubeTiling2D { axis: TilingAxis::Columns, strip_shift: s, offsets };
                children.push((vec![m, j], child));
            }
        }
        make_pseudo_standard(1, 1, base, SetTable::from_entries(None, children)).unwrap()
    }

    #[test]
    fn gamma_examples() {
        let z4 = StructuredSet::lattice(4);
        let freq = BoxRegion::centered(2, 2.0).unwrap();
        assert_eq!(
            gamma(&z4, &unit_square(0.0, 0.0), &freq).unwrap(),
            StructuredSet::lattice(2).enumerate(&freq).unwrap()
        );
        assert!(!gamma(&z4, &unit_square(0.5, 0.5), &freq).unwrap().is_empty());
        let empty = BoxRegion::new(vec![0.2, 0.2], vec![0.7, 0.7]).unwrap();
        assert!(gamma(&z4, &empty, &freq).unwrap().is_empty());
    }

    #[test]
    fn t_slice_examples() {
        let z4 = StructuredSet::lattice(4);
        let c = unit_square(0.0, 0.0);
        assert_eq!(t_slice(&z4, &c, &[0.0, 0.0]).unwrap(), vec![vec![0.0, 0.0]]);
        assert!(t_slice(&z4, &c, &[0.5, 0.0]).unwrap().is_empty());
        let ex = section3_example();
        // (0, s_{0,j}, j + μ_0, k + ν_{0,0,j}) with μ_0 = 0.25
        for j in -2..2i64 {
            let s = (j.rem_euclid(4)) as f64 / 4.0;
            let nu = (j.rem_euclid(8)) as f64 / 8.0;
            let got = t_slice(&ex, &c, &[j as f64 + 0.25, 1.0 + nu]).unwrap();
            assert_eq!(got, vec![vec![0.0, s]]);
        }
        let doubled = vec![vec![0.0, 0.0, 0.0, 0.0], vec![0.5, 0.0, 0.0, 0.0]];
        assert!(matches!(t_slice_points(&doubled, &c, &[0.0, 0.0]), Err(Error::InvariantViolation(_))));
    }

    #[test]
    fn projection_and_restriction() {
        let bx = z4_box(2.0);
        let z2 = StructuredSet::lattice(2).enumerate(&BoxRegion::centered(2, 2.0).unwrap()).unwrap();
        assert_eq!(project_tf(&StructuredSet::lattice(4), 1, &bx).unwrap(), z2);
        assert_eq!(restrict(&StructuredSet::lattice(4), &unit_square(0.0, 0.0), &bx).unwrap(), z2);
        let single = StructuredSet::explicit(4, vec![vec![0.1, 0.2, 0.3, 0.4]]).unwrap();
        assert!(restrict(&single, &unit_square(1.5, 1.5), &bx).unwrap().is_empty());
        assert_eq!(project_tf(&single, 1, &bx).unwrap(), vec![vec![0.1, 0.3]]);
        assert!(project_tf(&single, 2, &bx).is_err());
    }

    #[test]
    fn restriction_recovers_child() {
        let ex = section3_example();
        let bx = z4_box(3.0);
        let c = BoxRegion::new(vec![0.0, 1.25], vec![1.0, 2.25]).unwrap();
        let got = restrict(&ex, &c, &bx).unwrap();
        let StructuredSet::PseudoStandard { children, .. } = &ex else { unreachable!() };
        let want = children.get(&[0, 1]).unwrap().enumerate(&BoxRegion::centered(2, 3.0).unwrap()).unwrap();
        assert_eq!(got, want);
    }

    #[test]
    fn classify_1d_examples() {
        let bx = BoxRegion::centered(2, 3.0).unwrap();
        match classify_1d(&StructuredSet::lattice(2), &bx).unwrap() {
            Outcome1D::Standard(c) => {
                assert_eq!(c.time_offset, 0.0);
                assert_eq!(c.spectra_offsets, IndexedParam::default());
            }
            o => panic!("{o:?}"),
        }
        let spectra = SetTable::from_entries(
            Some(StructuredSet::lattice(1)),
            (-3..3i64).map(|k| (vec![k], StructuredSet::shifted_lattice(vec![k.rem_euclid(5) as f64 / 5.0]))),
        );
        let s = make_standard(1, StructuredSet::lattice(1), spectra).unwrap();
        match classify_1d(&s, &bx).unwrap() {
            Outcome1D::Standard(c) => {
                for k in -3..3i64 {
                    assert!((c.spectra_offsets.get(&[k]) - k.rem_euclid(5) as f64 / 5.0).abs() < 1e-12);
                }
            }
            o => panic!("{o:?}"),
        }
        let rows =
            StructuredSet::cube_tiling_2d(TilingAxis::Rows, IndexedParam::from_entries(0.0, [(vec![1], 0.5)])).unwrap();
        match classify_1d(&rows, &bx).unwrap() {
            Outcome1D::Failure { witness, .. } => assert_eq!(witness, vec![0.5, 1.0]),
            o => panic!("{o:?}"),
        }
    }

    #[test]
    fn classify_1d_rejects_non_tiling() {
        let bx = BoxRegion::centered(2, 3.0).unwrap();
        let s = StructuredSet::explicit(2, vec![vec![0.0, 0.0]]).unwrap();
        assert!(matches!(classify_1d(&s, &bx), Err(Error::Precondition(_))));
    }

    #[test]
    fn classify_z4_degenerate() {
        let c = classify_2d(&StructuredSet::lattice(4), &z4_box(3.0)).unwrap();
        assert!(c.degenerate);
        assert!(c.overlap_strips.is_empty());
        assert_eq!(c.tiling_strips, (-3..3).collect::<Vec<_>>());
        assert!(c.labels.contains(&"standard".to_string()));
        assert_eq!(c.set.enumerate(&z4_box(3.0)).unwrap(), StructuredSet::lattice(4).enumerate(&z4_box(3.0)).unwrap());
    }

    fn mixed_params(axis: StripAxis) -> TwoDTheorem {
        let mut p = TwoDTheorem::trivial(axis);
        for n in -4..4i64 {
            p.strip_freq.set(vec![n], (n.rem_euclid(3)) as f64 / 4.0);
            for k in -4..4i64 {
                p.shift.set(vec![n, k], ((k + 2 * n).rem_euclid(8)) as f64 / 8.0);
                for m in -4..4i64 {
                    p.freq_offset.set(vec![k, m, n], ((k * m + n).rem_euclid(16)) as f64 / 16.0);
                }
            }
        }
        with_partition(p, [], [1], StripKind::Overlap).unwrap()
    }

    #[test]
    fn classify_mixed_both_axes() {
        let bx = z4_box(3.0);
        for axis in [StripAxis::Horizontal, StripAxis::Vertical] {
            let s = make_2d_theorem(mixed_params(axis)).unwrap();
            let c = classify_2d(&s, &bx).unwrap();
            assert_eq!(c.axis, axis);
            assert_eq!(c.tiling_strips, vec![1]);
            assert_eq!(c.overlap_strips, vec![-3, -2, -1, 0, 2]);
            assert!(!c.degenerate);
            assert_eq!(c.set.enumerate(&bx).unwrap(), s.enumerate(&bx).unwrap());
        }
    }

    #[test]
    fn reports_observed_index_dependence() {
        let bx = z4_box(3.0);
        let c = classify_2d(&make_2d_theorem(mixed_params(StripAxis::Horizontal)).unwrap(), &bx).unwrap();
        assert_eq!(c.observed_dependence.shift, ["n", "k"]);
        assert_eq!(c.observed_dependence.freq_offset, ["k", "m", "n"]);

        let mut p = mixed_params(StripAxis::Horizontal);
        for n in -4..4i64 {
            for k in -4..4i64 {
                p.shift.set(vec![n, k], k.rem_euclid(8) as f64 / 8.0);
                for m in -4..4i64 {
                    p.freq_offset.set(vec![k, m, n], m.rem_euclid(16) as f64 / 16.0);
                }
            }
        }
        let c = classify_2d(&make_2d_theorem(p).unwrap(), &bx).unwrap();
        assert_eq!(c.observed_dependence.shift, ["k"]);
        assert_eq!(c.observed_dependence.freq_offset, ["m"]);
    }

    #[test]
    fn pseudo_structure_examples() {
        let bx = z4_box(2.0);
        let z4 = check_pseudo_structure(&StructuredSet::lattice(4), 1, &bx).unwrap();
        assert!(z4.holds);
        assert!(z4.children.iter().all(|c| c.onb));

        let ex = section3_example();
        let r = check_pseudo_structure(&ex, 1, &z4_box(3.0)).unwrap();
        assert!(r.holds, "{:?}", r.reason);
        assert_eq!(r.decomposition.unwrap().enumerate(&z4_box(3.0)).unwrap(), ex.enumerate(&z4_box(3.0)).unwrap());

        let mixed = make_2d_theorem(mixed_params(StripAxis::Horizontal)).unwrap();
        let r = check_pseudo_structure(&mixed, 1, &z4_box(3.0)).unwrap();
        assert!(!r.holds);
        assert!(!r.projection_tiles);
    }
}
